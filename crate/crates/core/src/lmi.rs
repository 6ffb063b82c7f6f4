//! Small dense LMI feasibility solver.
//!
//! A problem asks for real scalars `x` and Hermitian matrices `X_j` such that
//!
//! ```text
//! C + Σ xᵢ Fᵢ + Σ_j L_j(X_j) ≻ 0,   X_j ≻ 0 (where flagged),   xᵢ ≥ 0 (where flagged).
//! ```
//!
//! All unknowns are stacked into one real coordinate vector (a Hermitian n×n
//! variable contributes n² coordinates in an orthonormal basis). The solver
//! maximizes the joint margin `t` — the smallest eigenvalue over the main block
//! and the definiteness side blocks — over the unit ball of coordinates, using
//! a log-barrier path-following Newton method. A problem is declared feasible
//! once the recovered point has margin ≥ `tol · scale`, where `scale` is the
//! largest coefficient norm. Failure is never a proof of infeasibility; the
//! outcome carries the best margin and an upper bound on the optimum instead.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::matrix::{self, CMatrix, MatrixJson};

/// Default Newton-iteration budget.
pub const DEFAULT_BUDGET: usize = 10_000;
/// Default relative strictness tolerance.
pub const DEFAULT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LmiError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("problem has no variables")]
    NoVariables,
    #[error("coefficient {0} is not Hermitian")]
    NotHermitian(String),
}

/// A scalar unknown and its coefficient matrix.
#[derive(Debug, Clone)]
pub struct ScalarTerm {
    pub coef: CMatrix,
    pub nonneg: bool,
}

/// A Hermitian matrix unknown, stored as the images of the Hermitian basis.
#[derive(Debug, Clone)]
pub struct MatrixVar {
    pub order: usize,
    /// `images[k] = L(E_k)` for the k-th element of [`hermitian_basis`].
    pub images: Vec<CMatrix>,
    /// Adds the side constraint X ≻ 0.
    pub positive: bool,
}

/// Affine Hermitian-valued feasibility problem.
#[derive(Debug, Clone)]
pub struct LmiProblem {
    pub dim: usize,
    pub constant: CMatrix,
    pub scalars: Vec<ScalarTerm>,
    pub matrix_vars: Vec<MatrixVar>,
}

/// Values for all unknowns of a problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LmiValues {
    pub scalars: Vec<f64>,
    #[serde(with = "matrix_list")]
    pub matrices: Vec<CMatrix>,
}

/// Margins of a candidate point.
#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    /// λ_min of the assembled main block.
    pub main: f64,
    /// λ_min of each positive-definite matrix variable, in variable order.
    pub sides: Vec<f64>,
    /// All sign-constrained scalars are non-negative.
    pub nonneg_ok: bool,
}

impl Verification {
    pub fn joint(&self) -> f64 {
        self.sides.iter().fold(self.main, |m, &s| m.min(s))
    }

    /// Strictly feasible point: positive joint margin and valid signs.
    pub fn is_certificate(&self) -> bool {
        self.nonneg_ok && self.joint() > 0.0
    }
}

/// Solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Cap on Newton iterations.
    pub budget: usize,
    /// Success threshold relative to the coefficient scale.
    pub tol: f64,
    /// Return as soon as the threshold is met instead of maximizing the margin.
    pub stop_at_first: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            budget: DEFAULT_BUDGET,
            tol: DEFAULT_TOL,
            stop_at_first: false,
        }
    }
}

impl SolveOptions {
    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn first_hit(mut self) -> Self {
        self.stop_at_first = true;
        self
    }
}

/// A verified strictly feasible point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityCertificate {
    pub scalars: Vec<f64>,
    #[serde(with = "matrix_list")]
    pub matrices: Vec<CMatrix>,
    /// λ_min of the assembled main block, recomputed directly.
    pub margin: f64,
    /// Minimum of `margin` and the side-block margins.
    pub joint_margin: f64,
    pub iterations: usize,
    pub scale: f64,
}

impl FeasibilityCertificate {
    pub fn values(&self) -> LmiValues {
        LmiValues {
            scalars: self.scalars.clone(),
            matrices: self.matrices.clone(),
        }
    }
}

/// Best effort when no certificate was found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoCertificate {
    /// Largest joint margin seen (≤ tol·scale).
    pub best_margin: f64,
    pub best: LmiValues,
    /// Barrier estimate of the optimal margin from above (not a rigorous dual bound).
    pub upper_bound: f64,
    pub iterations: usize,
    pub budget_exhausted: bool,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SolveOutcome {
    Feasible(FeasibilityCertificate),
    NotCertified(NoCertificate),
}

impl SolveOutcome {
    pub fn certificate(&self) -> Option<&FeasibilityCertificate> {
        match self {
            SolveOutcome::Feasible(c) => Some(c),
            SolveOutcome::NotCertified(_) => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, SolveOutcome::Feasible(_))
    }

    /// Certificate margin, or the best margin reached when not certified.
    pub fn margin(&self) -> f64 {
        match self {
            SolveOutcome::Feasible(c) => c.joint_margin,
            SolveOutcome::NotCertified(n) => n.best_margin,
        }
    }

    pub fn iterations(&self) -> usize {
        match self {
            SolveOutcome::Feasible(c) => c.iterations,
            SolveOutcome::NotCertified(n) => n.iterations,
        }
    }
}

/// Orthonormal (Frobenius) basis of n×n Hermitian matrices: diagonal units,
/// then (E_ij + E_ji)/√2 and j(E_ij − E_ji)/√2 for i < j.
pub fn hermitian_basis(n: usize) -> Vec<CMatrix> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let mut e = CMatrix::zeros(n, n);
        e[(i, i)] = Complex64::new(1.0, 0.0);
        out.push(e);
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut e = CMatrix::zeros(n, n);
            e[(i, j)] = Complex64::new(r, 0.0);
            e[(j, i)] = Complex64::new(r, 0.0);
            out.push(e);
            let mut f = CMatrix::zeros(n, n);
            f[(i, j)] = Complex64::new(0.0, r);
            f[(j, i)] = Complex64::new(0.0, -r);
            out.push(f);
        }
    }
    out
}

/// Hermitian matrix with the given basis coordinates.
pub fn hermitian_from_coords(n: usize, coords: &[f64]) -> CMatrix {
    hermitian_basis(n)
        .iter()
        .zip(coords)
        .fold(CMatrix::zeros(n, n), |acc, (e, &c)| acc + e * Complex64::new(c, 0.0))
}

/// Basis coordinates of a Hermitian matrix.
pub fn coords_of_hermitian(h: &CMatrix) -> Vec<f64> {
    hermitian_basis(h.nrows())
        .iter()
        .map(|e| (e.adjoint() * h).trace().re)
        .collect()
}

impl LmiProblem {
    /// Empty problem `constant ≻ 0`; add unknowns with the builder methods.
    pub fn new(constant: CMatrix) -> Self {
        LmiProblem {
            dim: constant.nrows(),
            constant,
            scalars: Vec::new(),
            matrix_vars: Vec::new(),
        }
    }

    /// Homogeneous problem of the given order.
    pub fn homogeneous(dim: usize) -> Self {
        Self::new(CMatrix::zeros(dim, dim))
    }

    pub fn scalar(mut self, coef: CMatrix, nonneg: bool) -> Self {
        self.scalars.push(ScalarTerm { coef, nonneg });
        self
    }

    /// Adds a Hermitian variable entering through the linear map `map`.
    pub fn matrix_var<F: Fn(&CMatrix) -> CMatrix>(mut self, order: usize, positive: bool, map: F) -> Self {
        let images = hermitian_basis(order).iter().map(&map).collect();
        self.matrix_vars.push(MatrixVar {
            order,
            images,
            positive,
        });
        self
    }

    pub fn coordinate_count(&self) -> usize {
        self.scalars.len() + self.matrix_vars.iter().map(|v| v.order * v.order).sum::<usize>()
    }

    /// Checks shapes and Hermitian symmetry of all coefficients.
    pub fn validate(&self) -> Result<(), LmiError> {
        let check = |m: &CMatrix, what: String| -> Result<(), LmiError> {
            if m.nrows() != self.dim || m.ncols() != self.dim {
                return Err(LmiError::Dimension(format!(
                    "{what} is {}x{}, expected {}x{}",
                    m.nrows(),
                    m.ncols(),
                    self.dim,
                    self.dim
                )));
            }
            if !matrix::is_hermitian(m) {
                let dev = matrix::max_abs(&(m - m.adjoint()));
                if dev > 1e-9 * (1.0 + matrix::max_abs(m)) {
                    return Err(LmiError::NotHermitian(what));
                }
            }
            Ok(())
        };
        check(&self.constant, "constant".into())?;
        for (i, s) in self.scalars.iter().enumerate() {
            check(&s.coef, format!("scalar term {i}"))?;
        }
        for (j, v) in self.matrix_vars.iter().enumerate() {
            if v.images.len() != v.order * v.order {
                return Err(LmiError::Dimension(format!("matrix variable {j} has a malformed map")));
            }
            for (k, img) in v.images.iter().enumerate() {
                check(img, format!("matrix variable {j} image {k}"))?;
            }
        }
        if self.coordinate_count() == 0 {
            return Err(LmiError::NoVariables);
        }
        Ok(())
    }

    /// Largest spectral norm among the coefficients (at least 1 for side blocks).
    pub fn scale(&self) -> f64 {
        let mut s = matrix::sigma_max(&self.constant);
        for t in &self.scalars {
            s = s.max(matrix::sigma_max(&t.coef));
        }
        for v in &self.matrix_vars {
            for img in &v.images {
                s = s.max(matrix::sigma_max(img));
            }
            if v.positive {
                s = s.max(1.0);
            }
        }
        if s > 0.0 {
            s
        } else {
            1.0
        }
    }

    fn check_values(&self, values: &LmiValues) -> Result<(), LmiError> {
        if values.scalars.len() != self.scalars.len() || values.matrices.len() != self.matrix_vars.len() {
            return Err(LmiError::Dimension(format!(
                "candidate has {} scalars and {} matrices, problem has {} and {}",
                values.scalars.len(),
                values.matrices.len(),
                self.scalars.len(),
                self.matrix_vars.len()
            )));
        }
        for (j, (m, v)) in values.matrices.iter().zip(&self.matrix_vars).enumerate() {
            if m.nrows() != v.order || m.ncols() != v.order {
                return Err(LmiError::Dimension(format!(
                    "matrix value {j} is {}x{}, expected order {}",
                    m.nrows(),
                    m.ncols(),
                    v.order
                )));
            }
        }
        Ok(())
    }

    /// The main block at the candidate values.
    pub fn assemble(&self, values: &LmiValues) -> Result<CMatrix, LmiError> {
        self.check_values(values)?;
        let mut s = self.constant.clone();
        for (t, &x) in self.scalars.iter().zip(&values.scalars) {
            s += &t.coef * Complex64::new(x, 0.0);
        }
        for (v, m) in self.matrix_vars.iter().zip(&values.matrices) {
            let herm = matrix::hermitian_part(m);
            for (img, c) in v.images.iter().zip(coords_of_hermitian(&herm)) {
                s += img * Complex64::new(c, 0.0);
            }
        }
        Ok(s)
    }

    /// Main-block and side-block margins of a candidate (no optimization).
    pub fn verify_full(&self, values: &LmiValues) -> Result<Verification, LmiError> {
        let main = matrix::lambda_min(&self.assemble(values)?);
        let sides = self
            .matrix_vars
            .iter()
            .zip(&values.matrices)
            .filter(|(v, _)| v.positive)
            .map(|(_, m)| matrix::lambda_min(m))
            .collect();
        let nonneg_ok = self
            .scalars
            .iter()
            .zip(&values.scalars)
            .all(|(t, &x)| !t.nonneg || x >= 0.0);
        Ok(Verification { main, sides, nonneg_ok })
    }

    /// λ_min of the assembled main block.
    pub fn verify(&self, values: &LmiValues) -> Result<f64, LmiError> {
        Ok(self.verify_full(values)?.main)
    }

    fn values_from_coords(&self, x: &[f64]) -> LmiValues {
        let ns = self.scalars.len();
        let mut off = ns;
        let matrices = self
            .matrix_vars
            .iter()
            .map(|v| {
                let k = v.order * v.order;
                let m = hermitian_from_coords(v.order, &x[off..off + k]);
                off += k;
                m
            })
            .collect();
        LmiValues {
            scalars: x[..ns].to_vec(),
            matrices,
        }
    }

    /// JSON audit dump of the problem data.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "dim": self.dim,
            "constant": MatrixJson::from_matrix(&self.constant),
            "scalars": self.scalars.iter().map(|s| serde_json::json!({
                "coef": MatrixJson::from_matrix(&s.coef),
                "nonneg": s.nonneg,
            })).collect::<Vec<_>>(),
            "matrix_vars": self.matrix_vars.iter().map(|v| serde_json::json!({
                "order": v.order,
                "positive": v.positive,
                "images": v.images.iter().map(MatrixJson::from_matrix).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// One positive-definite block `C + Σ xᵢ Dᵢ − tI`.
struct Block {
    constant: CMatrix,
    /// (coordinate index, derivative matrix)
    terms: Vec<(usize, CMatrix)>,
}

impl Block {
    fn at(&self, x: &[f64], t: f64) -> CMatrix {
        let n = self.constant.nrows();
        let mut s = self.constant.clone() - CMatrix::identity(n, n) * Complex64::new(t, 0.0);
        for (i, d) in &self.terms {
            s += d * Complex64::new(x[*i], 0.0);
        }
        s
    }
}

/// −log det of a Hermitian matrix, or `None` if it is not positive definite.
fn neg_log_det(s: &CMatrix) -> Option<f64> {
    let ch = matrix::hermitian_part(s).cholesky()?;
    let l = ch.l_dirty();
    let mut acc = 0.0;
    for i in 0..s.nrows() {
        let d = l[(i, i)].re;
        if !(d > 0.0) {
            return None;
        }
        acc -= 2.0 * d.ln();
    }
    Some(acc)
}

struct Barrier<'a> {
    blocks: Vec<Block>,
    nonneg: Vec<usize>,
    d: usize,
    problem: &'a LmiProblem,
}

impl<'a> Barrier<'a> {
    fn new(p: &'a LmiProblem) -> Self {
        let d = p.coordinate_count();
        let mut main_terms = Vec::with_capacity(d);
        let mut nonneg = Vec::new();
        for (i, s) in p.scalars.iter().enumerate() {
            main_terms.push((i, matrix::hermitian_part(&s.coef)));
            if s.nonneg {
                nonneg.push(i);
            }
        }
        let mut blocks = Vec::new();
        let mut off = p.scalars.len();
        for v in &p.matrix_vars {
            for (k, img) in v.images.iter().enumerate() {
                main_terms.push((off + k, matrix::hermitian_part(img)));
            }
            if v.positive {
                let basis = hermitian_basis(v.order);
                blocks.push(Block {
                    constant: CMatrix::zeros(v.order, v.order),
                    terms: basis.into_iter().enumerate().map(|(k, e)| (off + k, e)).collect(),
                });
            }
            off += v.order * v.order;
        }
        blocks.insert(
            0,
            Block {
                constant: matrix::hermitian_part(&p.constant),
                terms: main_terms,
            },
        );
        Barrier {
            blocks,
            nonneg,
            d,
            problem: p,
        }
    }

    fn nu(&self) -> f64 {
        let dims: usize = self.blocks.iter().map(|b| b.constant.nrows()).sum();
        (dims + self.nonneg.len() + 1) as f64
    }

    /// Barrier objective f = −τt − Σ log det S_b − Σ log xᵢ − log(1 − ‖x‖²).
    fn value(&self, z: &[f64], tau: f64) -> Option<f64> {
        let (x, t) = z.split_at(self.d);
        let t = t[0];
        let r: f64 = x.iter().map(|v| v * v).sum();
        if r >= 1.0 {
            return None;
        }
        let mut f = -tau * t - (1.0 - r).ln();
        for &i in &self.nonneg {
            if x[i] <= 0.0 {
                return None;
            }
            f -= x[i].ln();
        }
        for b in &self.blocks {
            f += neg_log_det(&b.at(x, t))?;
        }
        Some(f)
    }

    /// Gradient and Hessian of the barrier objective.
    fn derivatives(&self, z: &[f64], tau: f64) -> Option<(DVector<f64>, DMatrix<f64>)> {
        let nz = self.d + 1;
        let (x, t) = z.split_at(self.d);
        let t = t[0];
        let mut g = DVector::<f64>::zeros(nz);
        let mut h = DMatrix::<f64>::zeros(nz, nz);
        g[self.d] = -tau;
        for b in &self.blocks {
            let s = b.at(x, t);
            let sinv = matrix::hermitian_part(&s).cholesky()?.inverse();
            // W_a = S⁻¹ D_a for every coordinate touching the block, plus t.
            let mut ws: Vec<(usize, CMatrix)> = b.terms.iter().map(|(i, d)| (*i, &sinv * d)).collect();
            ws.push((self.d, -sinv.clone()));
            for (a, wa) in &ws {
                g[*a] -= wa.trace().re;
            }
            for (p, (a, wa)) in ws.iter().enumerate() {
                for (b2, wb) in ws.iter().skip(p) {
                    let mut tr = 0.0;
                    for r in 0..wa.nrows() {
                        for c in 0..wa.ncols() {
                            tr += (wa[(r, c)] * wb[(c, r)]).re;
                        }
                    }
                    h[(*a, *b2)] += tr;
                    if a != b2 {
                        h[(*b2, *a)] += tr;
                    }
                }
            }
        }
        for &i in &self.nonneg {
            g[i] -= 1.0 / x[i];
            h[(i, i)] += 1.0 / (x[i] * x[i]);
        }
        let r: f64 = x.iter().map(|v| v * v).sum();
        let q = 1.0 - r;
        for i in 0..self.d {
            g[i] += 2.0 * x[i] / q;
            h[(i, i)] += 2.0 / q;
            for j in 0..self.d {
                h[(i, j)] += 4.0 * x[i] * x[j] / (q * q);
            }
        }
        Some((g, h))
    }

    fn joint_margin(&self, x: &[f64]) -> (f64, LmiValues) {
        let values = self.problem.values_from_coords(x);
        let v = self.problem.verify_full(&values).expect("shapes are consistent");
        (v.joint(), values)
    }

    fn initial_point(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.d];
        let mut seeded = self.nonneg.clone();
        let mut off = self.problem.scalars.len();
        for v in &self.problem.matrix_vars {
            if v.positive {
                seeded.extend((0..v.order).map(|k| off + k));
            }
            off += v.order * v.order;
        }
        if !seeded.is_empty() {
            let c = 0.5 / (seeded.len() as f64).sqrt();
            for i in seeded {
                x[i] = c;
            }
        }
        x
    }
}

/// Maximizes the joint margin; see the module documentation.
pub fn solve(problem: &LmiProblem, opts: &SolveOptions) -> Result<SolveOutcome, LmiError> {
    problem.validate()?;
    let bar = Barrier::new(problem);
    let scale = problem.scale();
    let target = opts.tol * scale;
    let gap_tol = 0.1 * target;
    let nu = bar.nu();

    let x0 = bar.initial_point();
    let blocks_min = bar
        .blocks
        .iter()
        .map(|b| matrix::lambda_min(&b.at(&x0, 0.0)))
        .fold(f64::INFINITY, f64::min);
    let t0 = blocks_min - 0.5 * (blocks_min.abs() + scale);
    let mut z: Vec<f64> = x0.clone();
    z.push(t0);

    let (m0, v0) = bar.joint_margin(&x0);
    let mut best = (m0, v0);
    let mut iterations = 0usize;
    let mut tau = nu / scale;
    let mut upper = f64::INFINITY;

    let finish_feasible = |best: (f64, LmiValues), iterations: usize| {
        let ver = problem.verify_full(&best.1).expect("shapes are consistent");
        SolveOutcome::Feasible(FeasibilityCertificate {
            scalars: best.1.scalars,
            matrices: best.1.matrices,
            margin: ver.main,
            joint_margin: ver.joint(),
            iterations,
            scale,
        })
    };

    if best.0 >= target && opts.stop_at_first {
        return Ok(finish_feasible(best, iterations));
    }

    'outer: loop {
        // Centering by damped Newton.
        for _ in 0..100 {
            if iterations >= opts.budget {
                break 'outer;
            }
            iterations += 1;
            let Some((g, h)) = bar.derivatives(&z, tau) else {
                break 'outer;
            };
            let step = match h.clone().cholesky() {
                Some(ch) => ch.solve(&(-&g)),
                None => {
                    let n = h.nrows();
                    let reg = h + DMatrix::<f64>::identity(n, n) * 1e-12;
                    match reg.cholesky() {
                        Some(ch) => ch.solve(&(-&g)),
                        None => break 'outer,
                    }
                }
            };
            let dec = -g.dot(&step);
            if dec < 0.0 || !dec.is_finite() {
                break 'outer;
            }
            if dec * 0.5 <= 1e-10 {
                break;
            }
            let f0 = bar.value(&z, tau).expect("iterate stays interior");
            let mut s = 1.0 / (1.0 + dec.sqrt());
            let mut moved = false;
            for _ in 0..60 {
                let trial: Vec<f64> = z.iter().zip(step.iter()).map(|(a, b)| a + s * b).collect();
                if let Some(f1) = bar.value(&trial, tau) {
                    if f1 <= f0 - 0.25 * s * dec {
                        z = trial;
                        moved = true;
                        break;
                    }
                }
                s *= 0.5;
            }
            if !moved {
                break;
            }
        }
        let x = &z[..bar.d];
        let (m, vals) = bar.joint_margin(x);
        if m > best.0 {
            best = (m, vals);
        }
        let gap = nu / tau;
        upper = z[bar.d] + gap;
        if best.0 >= target && (opts.stop_at_first || gap <= gap_tol) {
            return Ok(finish_feasible(best, iterations));
        }
        let settle = if opts.stop_at_first { f64::INFINITY } else { 1e-6 * scale };
        if z[bar.d] + 1.5 * gap < target && gap <= settle {
            break;
        }
        if gap <= gap_tol {
            break;
        }
        tau *= 10.0;
    }
    if best.0 >= target {
        return Ok(finish_feasible(best, iterations));
    }
    Ok(SolveOutcome::NotCertified(NoCertificate {
        best_margin: best.0,
        best: best.1,
        upper_bound: upper,
        iterations,
        budget_exhausted: iterations >= opts.budget,
        scale,
    }))
}

/// Serde adapter for lists of complex matrices using the JSON matrix schema.
pub(crate) mod matrix_list {
    use super::{CMatrix, MatrixJson};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(ms: &[CMatrix], s: S) -> Result<S::Ok, S::Error> {
        ms.iter().map(MatrixJson::from_matrix).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<CMatrix>, D::Error> {
        let js = Vec::<MatrixJson>::deserialize(d)?;
        js.iter()
            .map(|m| m.to_matrix().map_err(serde::de::Error::custom))
            .collect()
    }
}
