//! Dense complex linear algebra used throughout the crate.
//!
//! Matrices are plain `nalgebra::DMatrix<Complex64>`; the functions here add
//! the Hermitian/skew-Hermitian split, sorted spectra, a singular-aware
//! inverse, and rank-revealing compression. Tolerances are relative to the
//! largest singular value so that results do not depend on scaling.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Dense complex matrix.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex vector.
pub type CVector = DVector<Complex64>;

/// Imaginary unit.
pub const J: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Default relative rank tolerance for [`range_compress`].
pub const RANK_TOL: f64 = 1e-9;

/// Relative threshold below which [`det_and_inverse`] flags a matrix as singular.
pub const SINGULAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MatrixError {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix must have at least one row and one column")]
    Empty,
    #[error("entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Checks the construction invariants: non-empty and finite.
pub fn validate(a: &CMatrix) -> Result<(), MatrixError> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Err(MatrixError::Empty);
    }
    for c in 0..a.ncols() {
        for r in 0..a.nrows() {
            let z = a[(r, c)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(MatrixError::NonFinite { row: r, col: c });
            }
        }
    }
    Ok(())
}

pub fn ensure_square(a: &CMatrix) -> Result<usize, MatrixError> {
    if a.nrows() != a.ncols() {
        return Err(MatrixError::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(a.nrows())
}

/// Builds a complex matrix from real rows.
pub fn from_real_rows(rows: &[&[f64]]) -> CMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    CMatrix::from_fn(n, m, |i, j| Complex64::new(rows[i][j], 0.0))
}

/// Builds a complex matrix from rows of `(re, im)` pairs.
pub fn from_complex_rows(rows: &[&[(f64, f64)]]) -> CMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    CMatrix::from_fn(n, m, |i, j| Complex64::new(rows[i][j].0, rows[i][j].1))
}

/// Diagonal matrix with the given complex entries.
pub fn diag(entries: &[Complex64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_column_slice(entries))
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Lifts a real matrix into the complex field.
pub fn complexify(a: &DMatrix<f64>) -> CMatrix {
    a.map(|x| Complex64::new(x, 0.0))
}

/// H(A) = (A + A*)/2, without a squareness check.
pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

/// K(A) = (A − A*)/(2j), without a squareness check.
pub fn skew_part(a: &CMatrix) -> CMatrix {
    (a - a.adjoint()) * Complex64::new(0.0, -0.5)
}

/// Splits A = H + jK with H, K Hermitian.
pub fn hermitian_split(a: &CMatrix) -> Result<(CMatrix, CMatrix), MatrixError> {
    ensure_square(a)?;
    Ok((hermitian_part(a), skew_part(a)))
}

/// Largest absolute entry, used for relative tolerances.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Hermitian check with the relative tolerance of the matrix contract.
pub fn is_hermitian(h: &CMatrix) -> bool {
    if h.nrows() != h.ncols() {
        return false;
    }
    let dev = max_abs(&(h - h.adjoint()));
    dev <= 1e-12 * (1.0 + max_abs(h))
}

/// Singular values in descending order.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Largest singular value σ̄(A).
pub fn sigma_max(a: &CMatrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Eigenvalues (descending) and orthonormal eigenvectors of a Hermitian matrix.
///
/// The input is symmetrized first, so tiny asymmetries from roundoff are harmless.
pub fn eig_hermitian(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let hs = hermitian_part(h);
    let n = hs.nrows();
    let eig = hs.symmetric_eigen();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, idx[c])]);
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn eigvals_hermitian(h: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = hermitian_part(h)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    v.sort_by(|x, y| y.total_cmp(x));
    v
}

pub fn lambda_min(h: &CMatrix) -> f64 {
    eigvals_hermitian(h).last().copied().unwrap_or(0.0)
}

pub fn lambda_max(h: &CMatrix) -> f64 {
    eigvals_hermitian(h).first().copied().unwrap_or(0.0)
}

/// Largest eigenvalue of a Hermitian matrix with a unit eigenvector.
pub fn top_eigenpair(h: &CMatrix) -> (f64, CVector) {
    let (vals, vecs) = eig_hermitian(h);
    (vals[0], vecs.column(0).into_owned())
}

/// Determinant together with the inverse, or `None` when numerically singular.
#[derive(Debug, Clone)]
pub struct DetInverse {
    pub det: Complex64,
    pub inverse: Option<CMatrix>,
}

/// Determinant and inverse; singular when σ_min < 1e-12·σ̄.
pub fn det_and_inverse(a: &CMatrix) -> Result<DetInverse, MatrixError> {
    ensure_square(a)?;
    let s = singular_values(a);
    let smax = s[0];
    let smin = *s.last().unwrap();
    let det = a.clone().lu().determinant();
    if smax == 0.0 || smin < SINGULAR_TOL * smax {
        return Ok(DetInverse { det, inverse: None });
    }
    Ok(DetInverse {
        det,
        inverse: a.clone().lu().try_inverse(),
    })
}

/// Result of a rank-revealing compression.
#[derive(Debug, Clone)]
pub struct RangeCompression {
    /// r×n matrix whose adjoint's columns are an orthonormal basis of range(A*).
    pub t1: CMatrix,
    /// n×r orthonormal basis of range(A).
    pub left: CMatrix,
    pub rank: usize,
}

/// Numerical rank and orthonormal range bases from the SVD.
pub fn range_compress(a: &CMatrix, tol: f64) -> Result<RangeCompression, MatrixError> {
    let n = ensure_square(a)?;
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V*");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let smax = svd.singular_values[idx[0]];
    let rank = idx
        .iter()
        .filter(|&&i| smax > 0.0 && svd.singular_values[i] > tol * smax)
        .count();
    let t1 = CMatrix::from_fn(rank, n, |r, c| vt[(idx[r], c)]);
    let left = CMatrix::from_fn(n, rank, |r, c| u[(r, idx[c])]);
    Ok(RangeCompression { t1, left, rank })
}

/// Hermitian square root of the inverse of a positive definite matrix.
pub fn inv_sqrt_pd(h: &CMatrix) -> Option<CMatrix> {
    let (vals, vecs) = eig_hermitian(h);
    if vals.iter().any(|&v| v <= 0.0) {
        return None;
    }
    let d = CMatrix::from_diagonal(&CVector::from_iterator(
        vals.len(),
        vals.iter().map(|v| Complex64::new(1.0 / v.sqrt(), 0.0)),
    ));
    Some(&vecs * d * vecs.adjoint())
}

/// e^{jθ} as a complex scalar.
pub fn cis(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// JSON encoding `{"rows", "cols", "re", "im"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixJson {
    pub fn from_matrix(a: &CMatrix) -> Self {
        let re = (0..a.nrows())
            .map(|i| (0..a.ncols()).map(|j| a[(i, j)].re).collect())
            .collect();
        let im = (0..a.nrows())
            .map(|i| (0..a.ncols()).map(|j| a[(i, j)].im).collect())
            .collect();
        MatrixJson {
            rows: a.nrows(),
            cols: a.ncols(),
            re,
            im: Some(im),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix, MatrixError> {
        let shape_ok = |v: &Vec<Vec<f64>>| {
            v.len() == self.rows && v.iter().all(|row| row.len() == self.cols)
        };
        if !shape_ok(&self.re) || !self.im.as_ref().is_none_or(shape_ok) {
            return Err(MatrixError::Dimension(format!(
                "declared {}x{} does not match the entry arrays",
                self.rows, self.cols
            )));
        }
        let a = CMatrix::from_fn(self.rows, self.cols, |i, j| {
            let im = self.im.as_ref().map_or(0.0, |m| m[i][j]);
            Complex64::new(self.re[i][j], im)
        });
        validate(&a)?;
        Ok(a)
    }
}

/// Random matrices for sampling and tests.
pub mod random {
    use super::{CMatrix, CVector};
    use num_complex::Complex64;
    use rand::Rng;
    use rand_distr::StandardNormal;

    /// Standard complex Gaussian entry (unit variance).
    pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
    }

    pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
        let v = CVector::from_fn(n, |_, _| complex_normal(rng));
        let norm = v.norm();
        v / Complex64::new(norm, 0.0)
    }

    /// Haar-distributed unitary via QR with phase correction.
    pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
        let qr = gaussian(rng, n, n).qr();
        let (mut q, r) = qr.unpack();
        for j in 0..n {
            let d = r[(j, j)];
            let ph = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
            for i in 0..n {
                q[(i, j)] *= ph;
            }
        }
        q
    }

    /// Random Hermitian matrix with Gaussian entries.
    pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
        super::hermitian_part(&gaussian(rng, n, n))
    }
}
