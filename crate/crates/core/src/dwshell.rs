//! Davis-Wielandt shell geometry.
//!
//! DW(A) = {(Re u*Au, Im u*Au, u*A*Au) : ‖u‖ = 1} lifts the numerical range
//! into ℝ³. The canonical sets used to bound the union of shells over a
//! sectored disk are
//!
//! ```text
//! 𝒫    = {x² + y² ≤ z}          H_γ = {z ≤ γ²}
//! V_α  = {|y| ≤ tan(α)·x}        K_k = {z ≤ k·x}
//! ```
//!
//! DW(S_γ(α)) ⊂ H_γ ∩ V_α ∩ K_{γ sec²α}, and the normal matrices of S_γ(α)
//! already fill H_γ ∩ V_α ∩ K_{γ sec α} (within 𝒫) for n ≥ 3.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gainphase::{self, SectorSpec};
use crate::lmi::{self, LmiError, SolveOptions, SolveOutcome};
use crate::matrix::{self, cis, CMatrix, CVector, MatrixError};
use crate::sectored::{combination_margin, multiplier_problem};

/// Slack used by the canonical-set predicates.
pub const SET_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DwError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Lmi(#[from] LmiError),
    #[error("sector must be symmetric with 0 <= alpha < pi/2")]
    Sector,
    #[error("point lies outside the normal-matrix subset")]
    OutsideSubset,
    #[error("order must be at least {0}")]
    Order(usize),
    #[error("invalid argument: {0}")]
    Argument(String),
}

/// One point of a DW shell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DwPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl DwPoint {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        DwPoint { x, y, z }
    }

    /// Lift of a scalar λ onto the paraboloid: (Re λ, Im λ, |λ|²).
    pub fn lift(l: Complex64) -> Self {
        DwPoint::new(l.re, l.im, l.norm_sqr())
    }

    /// a·x + b·y + c·z for a direction (a, b, c).
    pub fn dot(&self, d: (f64, f64, f64)) -> f64 {
        d.0 * self.x + d.1 * self.y + d.2 * self.z
    }
}

/// DW point of `a` at `u`. Non-unit vectors are normalized first; the flag
/// reports whether that happened.
pub fn dw_point(a: &CMatrix, u: &CVector) -> Result<(DwPoint, bool), DwError> {
    let n = matrix::ensure_square(a)?;
    if u.len() != n {
        return Err(MatrixError::Dimension(format!("vector of length {} for order {n}", u.len())).into());
    }
    let norm = u.norm();
    if norm == 0.0 {
        return Err(DwError::Argument("zero vector".into()));
    }
    let normalized = (norm - 1.0).abs() > 1e-10;
    let u = if normalized { u / Complex64::new(norm, 0.0) } else { u.clone() };
    Ok((point_unchecked(a, &u), normalized))
}

fn point_unchecked(a: &CMatrix, u: &CVector) -> DwPoint {
    let au = a * u;
    let w = u.dotc(&au);
    DwPoint::new(w.re, w.im, au.norm_squared())
}

/// Support function of DW(A) in direction (a, b, c):
/// λ_max(a·H(A) + b·K(A) + c·A*A) with a maximizing unit vector.
pub fn dw_support(a: &CMatrix, dir: (f64, f64, f64)) -> Result<(f64, CVector), DwError> {
    matrix::ensure_square(a)?;
    if dir == (0.0, 0.0, 0.0) {
        return Err(DwError::Argument("zero direction".into()));
    }
    let (h, k) = matrix::hermitian_split(a)?;
    let g = h * Complex64::new(dir.0, 0.0) + k * Complex64::new(dir.1, 0.0) + a.adjoint() * a * Complex64::new(dir.2, 0.0);
    Ok(matrix::top_eigenpair(&g))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Plane {
    XZ,
    XY,
}

/// Convex outer polygon of a projected shell: support half-planes plus the
/// support points that touch them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    /// Distinct support points, ordered counter-clockwise.
    pub vertices: Vec<[f64; 2]>,
    /// (normal, offset) pairs: the polygon is {p : n·p ≤ offset}.
    pub half_planes: Vec<([f64; 2], f64)>,
}

impl Polygon {
    pub fn contains(&self, p: [f64; 2], slack: f64) -> bool {
        self.half_planes
            .iter()
            .all(|(n, off)| n[0] * p[0] + n[1] * p[1] <= off + slack)
    }
}

/// Projection of DW(A) onto a coordinate plane via `n_dirs` support directions.
pub fn dw_projection(a: &CMatrix, plane: Plane, n_dirs: usize) -> Result<Polygon, DwError> {
    if n_dirs < 8 {
        return Err(DwError::Argument(format!("need at least 8 directions, got {n_dirs}")));
    }
    let mut vertices: Vec<[f64; 2]> = Vec::new();
    let mut half_planes = Vec::with_capacity(n_dirs);
    for i in 0..n_dirs {
        let phi = std::f64::consts::TAU * i as f64 / n_dirs as f64;
        let (c, s) = (phi.cos(), phi.sin());
        let dir = match plane {
            Plane::XZ => (c, 0.0, s),
            Plane::XY => (c, s, 0.0),
        };
        let (value, u) = dw_support(a, dir)?;
        half_planes.push(([c, s], value));
        let p = point_unchecked(a, &u);
        let v = match plane {
            Plane::XZ => [p.x, p.z],
            Plane::XY => [p.x, p.y],
        };
        let dup = vertices
            .last()
            .is_some_and(|w: &[f64; 2]| (w[0] - v[0]).hypot(w[1] - v[1]) <= 1e-9);
        if !dup {
            vertices.push(v);
        }
    }
    if vertices.len() > 1 {
        let (f, l) = (vertices[0], vertices[vertices.len() - 1]);
        if (f[0] - l[0]).hypot(f[1] - l[1]) <= 1e-9 {
            vertices.pop();
        }
    }
    Ok(Polygon { vertices, half_planes })
}

/// The canonical sets of the DW analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CanonicalSet {
    /// Paraboloid x² + y² ≤ z.
    P,
    /// Gain slab z ≤ γ².
    H(f64),
    /// Wedge |y| ≤ tan(α)·x; the half-space x ≥ 0 at α = π/2.
    V(f64),
    /// Cone z ≤ k·x.
    K(f64),
}

pub fn in_canonical(p: &DwPoint, set: CanonicalSet) -> bool {
    match set {
        CanonicalSet::P => p.x * p.x + p.y * p.y <= p.z + SET_TOL,
        CanonicalSet::H(g) => p.z <= g * g + SET_TOL,
        CanonicalSet::V(a) if a >= FRAC_PI_2 => p.x >= -SET_TOL,
        CanonicalSet::V(a) => p.y.abs() <= a.tan() * p.x + SET_TOL,
        CanonicalSet::K(k) => p.z <= k * p.x + SET_TOL,
    }
}

fn symmetric_alpha(spec: &SectorSpec) -> Result<f64, DwError> {
    let a = spec.beta;
    if !spec.is_symmetric() || !(0.0..FRAC_PI_2).contains(&a) {
        return Err(DwError::Sector);
    }
    Ok(a)
}

fn member_with_slope(p: &DwPoint, gamma: f64, alpha: f64, k: f64) -> bool {
    in_canonical(p, CanonicalSet::P)
        && in_canonical(p, CanonicalSet::H(gamma))
        && in_canonical(p, CanonicalSet::V(alpha))
        && in_canonical(p, CanonicalSet::K(k))
}

/// Outer bound: 𝒫 ∩ H_γ ∩ V_α ∩ K_{γ sec²α}, which contains every DW shell
/// of a member of S_γ(α).
pub fn superset_member(p: &DwPoint, spec: &SectorSpec) -> Result<bool, DwError> {
    let a = symmetric_alpha(spec)?;
    Ok(member_with_slope(p, spec.gamma, a, spec.gamma / a.cos().powi(2)))
}

/// Inner bound: 𝒫 ∩ H_γ ∩ V_α ∩ K_{γ sec α}, the union of the shells of the
/// normal members of S_γ(α) when n ≥ 3.
pub fn subset_member(p: &DwPoint, spec: &SectorSpec) -> Result<bool, DwError> {
    let a = symmetric_alpha(spec)?;
    Ok(member_with_slope(p, spec.gamma, a, spec.gamma / a.cos()))
}

/// Builds a normal M ∈ S_γ(α) of order n whose shell contains `p`.
///
/// Case 1 (√z·cos α ≤ x ≤ √z): two conjugate eigenvalues √z·e^{±jθ},
/// θ = arccos(x/√z), at the height of p. Case 2 (x < √z·cos α): eigenvalues
/// √z₁·e^{±jα} and 0, whose triangle through the origin contains p, with
/// z₁ = (z/x)²cos²α. Points satisfying both use Case 1.
pub fn normal_witness(p: &DwPoint, spec: &SectorSpec, n: usize) -> Result<CMatrix, DwError> {
    if n < 3 {
        return Err(DwError::Order(3));
    }
    let alpha = symmetric_alpha(spec)?;
    if !subset_member(p, spec)? {
        return Err(DwError::OutsideSubset);
    }
    let z = p.z.max(0.0);
    if z <= SET_TOL {
        return Ok(CMatrix::zeros(n, n));
    }
    let r = z.sqrt();
    let x = p.x.max(0.0);
    let entries: Vec<Complex64> = if x >= r * alpha.cos() - SET_TOL {
        let theta = (x / r).clamp(-1.0, 1.0).acos();
        let mut e = vec![Complex64::from_polar(r, theta); n];
        e[1] = Complex64::from_polar(r, -theta);
        e
    } else {
        let r1 = ((z / x) * alpha.cos()).min(spec.gamma);
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        e[0] = Complex64::from_polar(r1, alpha);
        e[1] = Complex64::from_polar(r1, -alpha);
        e
    };
    Ok(matrix::diag(&entries))
}

/// Distance from `p` to the convex hull of `points`, by enumerating simplices
/// of up to four points (Carathéodory) and solving each barycentric
/// least-squares problem.
pub fn hull_distance(p: &DwPoint, points: &[DwPoint]) -> f64 {
    let pts: Vec<[f64; 3]> = points.iter().map(|q| [q.x, q.y, q.z]).collect();
    let target = [p.x, p.y, p.z];
    let m = pts.len();
    let mut best = f64::INFINITY;
    let mut idx = Vec::with_capacity(4);
    for size in 1..=m.min(4) {
        combos(m, size, 0, &mut idx, &mut |s| {
            if let Some(d) = simplex_distance(&target, s.iter().map(|&i| pts[i]).collect()) {
                best = best.min(d);
            }
        });
    }
    best
}

fn combos(m: usize, k: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if cur.len() == k {
        f(cur);
        return;
    }
    for i in start..m {
        cur.push(i);
        combos(m, k, i + 1, cur, f);
        cur.pop();
    }
}

/// Least-squares barycentric fit on the affine hull of `s`; returns the
/// residual if all weights are non-negative.
fn simplex_distance(t: &[f64; 3], s: Vec<[f64; 3]>) -> Option<f64> {
    let k = s.len();
    let base = s[0];
    if k == 1 {
        return Some(dist(t, &base));
    }
    let a = nalgebra::DMatrix::from_fn(3, k - 1, |r, c| s[c + 1][r] - base[r]);
    let b = nalgebra::DVector::from_fn(3, |r, _| t[r] - base[r]);
    let svd = a.clone().svd(true, true);
    let w = svd.solve(&b, 1e-12).ok()?;
    let w0 = 1.0 - w.sum();
    if w0 < -1e-12 || w.iter().any(|&x| x < -1e-12) {
        return None;
    }
    Some((a * w - b).norm())
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Shell of a normal matrix, as the hull of its eigenvalue lifts.
pub fn normal_lifts(m: &CMatrix) -> Vec<DwPoint> {
    m.diagonal().iter().map(|&l| DwPoint::lift(l)).collect()
}

const CHUNK: usize = 4096;

/// Monte-Carlo cloud of DW(S_γ(α)): each point is dw_point(B, u) for a drawn
/// B ∈ S_γ(α) and a random unit u.
///
/// One draw in eight is steered toward the extreme points: B is normal with
/// edge phases and near-maximal gain, and u is close to one of its
/// eigenvectors. Chunks of draws use independent streams of one seed, so the
/// cloud is identical for any thread count.
pub fn monte_carlo_union(spec: &SectorSpec, n: usize, draws: usize, seed: u64) -> Result<Vec<DwPoint>, DwError> {
    symmetric_alpha(spec)?;
    if n == 0 || draws == 0 {
        return Err(DwError::Argument("order and draws must be positive".into()));
    }
    let chunks = draws.div_ceil(CHUNK);
    let cloud = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = CHUNK.min(draws - c * CHUNK);
            (0..count)
                .map(|i| {
                    if i % 8 == 7 {
                        directed_point(spec, n, &mut rng)
                    } else {
                        let b = gainphase::sample_sectored_disk_with(spec, n, &mut rng);
                        let u = matrix::random::unit_vector(&mut rng, n);
                        point_unchecked(&b, &u)
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(cloud)
}

fn directed_point<R: Rng + ?Sized>(spec: &SectorSpec, n: usize, rng: &mut R) -> DwPoint {
    let q = matrix::random::unitary(rng, n);
    let eig: Vec<Complex64> = (0..n)
        .map(|_| {
            let r = spec.gamma * (1.0 - 0.05 * rng.random::<f64>());
            let edge = if rng.random::<bool>() { spec.beta } else { spec.alpha };
            let t = edge - (edge - spec.center()) * 0.05 * rng.random::<f64>();
            Complex64::from_polar(r, t)
        })
        .collect();
    let b = &q * matrix::diag(&eig) * q.adjoint();
    let mut u = q.column(0).into_owned() + matrix::random::unit_vector(rng, n) * Complex64::new(0.05, 0.0);
    u /= Complex64::new(u.norm(), 0.0);
    point_unchecked(&b, &u)
}

/// Multipliers separating DW(−A⁻¹) from H_γ ∩ V_α ∩ K_δ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationCertificate {
    pub k: [f64; 4],
    pub margin: f64,
    pub delta: f64,
}

/// Four separation terms: I − γ²A*A, H(e^{−j(π/2−α)}A), H(e^{j(π/2−α)}A),
/// δH(A) + I. An infinite δ drops the last term.
pub fn separation_terms(a: &CMatrix, gamma: f64, alpha: f64, delta: f64) -> Vec<CMatrix> {
    let n = a.nrows();
    let rot = |t: f64| matrix::hermitian_part(&(a * cis(t)));
    let mut terms = vec![
        matrix::identity(n) - a.adjoint() * a * Complex64::new(gamma * gamma, 0.0),
        rot(-(FRAC_PI_2 - alpha)),
        rot(FRAC_PI_2 - alpha),
    ];
    if delta.is_finite() {
        terms.push(matrix::hermitian_part(a) * Complex64::new(delta, 0.0) + matrix::identity(n));
    }
    terms
}

/// Searches for k ≥ 0 with Σ kᵢTᵢ ≻ 0 over the separation terms. Returns
/// `Ok(None)` when no certificate is found within the budget; that is not a
/// proof of infeasibility.
pub fn separation_certificate(
    a: &CMatrix,
    gamma: f64,
    alpha: f64,
    delta: f64,
    opts: &SolveOptions,
) -> Result<Option<SeparationCertificate>, DwError> {
    matrix::ensure_square(a)?;
    if !(0.0..FRAC_PI_2).contains(&alpha) {
        return Err(DwError::Sector);
    }
    if !(delta >= gamma) {
        return Err(DwError::Argument(format!("delta {delta} must be at least gamma {gamma}")));
    }
    let terms = separation_terms(a, gamma, alpha, delta);
    match lmi::solve(&multiplier_problem(&terms), opts)? {
        SolveOutcome::Feasible(c) => {
            let mut k = [0.0; 4];
            k[..c.scalars.len()].copy_from_slice(&c.scalars);
            let margin = combination_margin(&terms, &c.scalars);
            Ok(Some(SeparationCertificate { k, margin, delta }))
        }
        SolveOutcome::NotCertified(_) => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{diag, identity, random};
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn e(n: usize, i: usize) -> CVector {
        let mut v = CVector::zeros(n);
        v[i] = c(1.0);
        v
    }

    #[test]
    fn dw_point_basics() {
        let (p, flag) = dw_point(&identity(3), &e(3, 1)).unwrap();
        assert_eq!(p, DwPoint::new(1.0, 0.0, 1.0));
        assert!(!flag);
        let a = diag(&[c(1.0), Complex64::new(0.0, 1.0)]);
        let (p, _) = dw_point(&a, &e(2, 1)).unwrap();
        assert_eq!(p, DwPoint::new(0.0, 1.0, 1.0));
        let (_, flag) = dw_point(&a, &(e(2, 0) * c(2.0))).unwrap();
        assert!(flag);
    }

    #[test]
    fn support_basics() {
        assert!((dw_support(&identity(2), (0.0, 0.0, 1.0)).unwrap().0 - 1.0).abs() < 1e-12);
        let a = diag(&[c(2.0), c(0.0)]);
        assert!((dw_support(&a, (1.0, 0.0, 0.0)).unwrap().0 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn support_point_attains_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random::gaussian(&mut rng, 3, 3);
        let d = (0.3, -0.7, 0.2);
        let (v, u) = dw_support(&a, d).unwrap();
        assert!((point_unchecked(&a, &u).dot(d) - v).abs() < 1e-9);
    }

    #[test]
    fn projection_of_identity_is_a_point() {
        let poly = dw_projection(&identity(3), Plane::XZ, 16).unwrap();
        assert_eq!(poly.vertices.len(), 1);
        assert!((poly.vertices[0][0] - 1.0).abs() < 1e-12 && (poly.vertices[0][1] - 1.0).abs() < 1e-12);
        assert!(dw_projection(&identity(3), Plane::XZ, 4).is_err());
    }

    #[test]
    fn projection_of_normal_matrix_is_triangle() {
        let a = diag(&[c(1.0), cis(FRAC_PI_3), c(0.0)]);
        let poly = dw_projection(&a, Plane::XZ, 64).unwrap();
        for v in [[1.0, 1.0], [0.5, 1.0], [0.0, 0.0]] {
            assert!(poly.contains(v, 1e-9));
            assert!(poly.vertices.iter().any(|w| (w[0] - v[0]).hypot(w[1] - v[1]) < 1e-9));
        }
        assert!(!poly.contains([0.9, 0.2], 1e-9));
    }

    #[test]
    fn canonical_sets() {
        let o = DwPoint::new(0.0, 0.0, 0.0);
        for s in [CanonicalSet::P, CanonicalSet::H(1.0), CanonicalSet::V(0.3), CanonicalSet::K(2.0)] {
            assert!(in_canonical(&o, s));
        }
        assert!(!in_canonical(&DwPoint::new(1.0, 0.0, 2.0), CanonicalSet::H(1.0)));
        assert!(in_canonical(&DwPoint::new(0.0, 5.0, 0.0), CanonicalSet::V(FRAC_PI_2)));
        let (g, a) = (1.3, FRAC_PI_3);
        let v = DwPoint::new(g * a.cos(), g * a.sin(), g * g);
        assert!(in_canonical(&v, CanonicalSet::H(g)));
        assert!(in_canonical(&v, CanonicalSet::V(a)));
        assert!(in_canonical(&v, CanonicalSet::K(g / a.cos())));
        assert!(!in_canonical(&v, CanonicalSet::K(0.99 * g / a.cos())));
    }

    #[test]
    fn superset_and_subset_examples() {
        let g = 1.0;
        let spec = SectorSpec::symmetric(g, FRAC_PI_3).unwrap();
        let o = DwPoint::new(0.0, 0.0, 0.0);
        assert!(superset_member(&o, &spec).unwrap() && subset_member(&o, &spec).unwrap());
        // z = 0.81γ² > γsec²α·x = 0.8γ².
        assert!(!superset_member(&DwPoint::new(0.2 * g, 0.0, 0.81 * g * g), &spec).unwrap());
        let v = DwPoint::new(g * FRAC_PI_3.cos(), g * FRAC_PI_3.sin(), g * g);
        assert!(subset_member(&v, &spec).unwrap());
        let asym = SectorSpec::new(1.0, -0.2, 0.5).unwrap();
        assert_eq!(superset_member(&o, &asym), Err(DwError::Sector));
    }

    #[test]
    fn witness_examples() {
        let g = 1.7;
        let spec = SectorSpec::symmetric(g, FRAC_PI_4).unwrap();
        let m = normal_witness(&DwPoint::new(g, 0.0, g * g), &spec, 3).unwrap();
        assert!((m - identity(3) * c(g)).norm() < 1e-12);
        let m = normal_witness(&DwPoint::new(0.0, 0.0, 0.0), &spec, 4).unwrap();
        assert_eq!(m, CMatrix::zeros(4, 4));
        assert_eq!(
            normal_witness(&DwPoint::new(1.0, 0.0, 0.0), &spec, 3),
            Err(DwError::OutsideSubset)
        );
        assert_eq!(normal_witness(&DwPoint::new(0.0, 0.0, 0.0), &spec, 2), Err(DwError::Order(3)));
    }

    #[test]
    fn witness_case_two_contains_point() {
        let spec = SectorSpec::symmetric(1.0, FRAC_PI_3).unwrap();
        // x = 0.3 < √z·cos α = 0.35; z = 0.49 ≤ γ sec α·x = 0.6.
        let p = DwPoint::new(0.3, 0.1, 0.49);
        let m = normal_witness(&p, &spec, 3).unwrap();
        assert_eq!(m[(2, 2)], c(0.0));
        assert!(hull_distance(&p, &normal_lifts(&m)) < 1e-10);
        assert!(gainphase::in_sectored_disk(&m, &spec, 1e-9).unwrap());
    }

    #[test]
    fn hull_distance_basics() {
        let tri = [DwPoint::new(0.0, 0.0, 0.0), DwPoint::new(1.0, 0.0, 0.0), DwPoint::new(0.0, 1.0, 0.0)];
        assert!(hull_distance(&DwPoint::new(0.2, 0.2, 0.0), &tri) < 1e-14);
        assert!((hull_distance(&DwPoint::new(0.2, 0.2, 0.5), &tri) - 0.5).abs() < 1e-14);
        assert!((hull_distance(&DwPoint::new(1.0, 1.0, 0.0), &tri) - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cloud_is_deterministic_and_bounded() {
        let spec = SectorSpec::symmetric(1.0, FRAC_PI_3).unwrap();
        let a = monte_carlo_union(&spec, 3, 5000, 11).unwrap();
        let b = monte_carlo_union(&spec, 3, 5000, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 5000);
        assert!(a.iter().all(|p| superset_member(p, &spec).unwrap()));
    }

    #[test]
    fn separation_small_gain_case() {
        let (g, a) = (0.5, FRAC_PI_4);
        let cert = separation_certificate(&identity(3), g, a, g / a.cos(), &SolveOptions::default())
            .unwrap()
            .expect("certificate");
        assert!(cert.margin > 0.0);
        assert!(cert.k.iter().all(|&k| k >= 0.0));
        let terms = separation_terms(&identity(3), g, a, g / a.cos());
        assert!((combination_margin(&terms, &[1.0, 0.0, 0.0, 0.0]) - 0.75).abs() < 1e-14);
    }
}
