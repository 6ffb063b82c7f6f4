//! Matrix-level robust stability tests.
//!
//! Given A, decide whether det(I + AB) ≠ 0 for every B in a sectored disk
//! S_γ(α, β). The classical baselines (small gain, small phase) are exact
//! for their own uncertainty sets; the LMI tests below combine gain and
//! phase information through four multiplier terms:
//!
//! ```text
//! k₁(I − γ²A*A) + k₂H(e^{−j(π/2−β)}A) + k₃H(e^{j(π/2+α)}A) + k₄(c·H(e^{jq}A) + I) ≻ 0
//! ```
//!
//! with q the sector center, p the half width, and c = γ sec²p for the
//! sufficient test or c = γ sec p for the necessary one. Dropping k₄ gives
//! the S-procedure baseline.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::gainphase::{self, PhaseClass, PhaseError, SectorSpec, HALF_PI};
use crate::lmi::{self, FeasibilityCertificate, LmiError, LmiProblem, SolveOptions, SolveOutcome};
use crate::matrix::{self, cis, CMatrix, MatrixError};

/// Lower and upper γ brackets for the μ bisections.
pub const GAMMA_MIN: f64 = 1e-6;
pub const GAMMA_MAX: f64 = 1e6;
const MAX_BISECTIONS: usize = 60;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SectoredError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error(transparent)]
    Lmi(#[from] LmiError),
    #[error("the test requires an invertible matrix")]
    Singular,
    #[error("unsupported sector: {0}")]
    Sector(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    CertifiedRobust,
    NoCertificate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    SmallGain,
    SmallPhase,
    Sufficient,
    Necessary,
    HalfDisk,
    SProcedure,
}

/// Outcome of one LMI-based test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixTestReport {
    pub verdict: Verdict,
    pub method: Method,
    pub certificate: Option<FeasibilityCertificate>,
    /// Certificate margin, or the best margin reached when not certified.
    pub margin: f64,
    /// Multipliers k₁.. of the certificate, or of the best point found.
    pub multipliers: Vec<f64>,
    pub iterations: usize,
}

impl MatrixTestReport {
    pub fn certified(&self) -> bool {
        self.verdict == Verdict::CertifiedRobust
    }

    fn from_outcome(method: Method, out: SolveOutcome) -> Self {
        let iterations = out.iterations();
        match out {
            SolveOutcome::Feasible(c) => MatrixTestReport {
                verdict: Verdict::CertifiedRobust,
                method,
                margin: c.joint_margin,
                multipliers: c.scalars.clone(),
                certificate: Some(c),
                iterations,
            },
            SolveOutcome::NotCertified(n) => MatrixTestReport {
                verdict: Verdict::NoCertificate,
                method,
                margin: n.best_margin,
                multipliers: n.best.scalars,
                certificate: None,
                iterations,
            },
        }
    }
}

/// Small-phase verdict; undefined for matrices without quasi-sectorial phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SmallPhase {
    Holds,
    Fails,
    NotApplicable,
}

/// det(I + AB) ≠ 0 for all ‖B‖ ≤ γ iff σ̄(A) < 1/γ.
pub fn small_gain(a: &CMatrix, gamma: f64) -> bool {
    matrix::sigma_max(a) * gamma < 1.0
}

/// det(I + AB) ≠ 0 for all quasi-sectorial B with phases in [α, β] iff
/// [α, β] ⊂ (−π − φ̲(A), π − φ̄(A)) modulo 2π.
pub fn small_phase(a: &CMatrix, spec: &SectorSpec) -> Result<SmallPhase, SectoredError> {
    let info = match gainphase::matrix_phases(a, gainphase::MEMBER_TOL) {
        Ok(info) => info,
        Err(PhaseError::NotPhaseDefined(_)) => return Ok(SmallPhase::NotApplicable),
        Err(e) => return Err(e.into()),
    };
    let Some((lo, hi)) = gainphase::small_phase_window(&info) else {
        // Zero matrix: I + 0·B is always invertible.
        return Ok(SmallPhase::Holds);
    };
    let holds = (-3..=3).any(|k| {
        let s = 2.0 * PI * k as f64;
        spec.alpha + s > lo && spec.beta + s < hi
    });
    Ok(if holds { SmallPhase::Holds } else { SmallPhase::Fails })
}

fn rot(a: &CMatrix, theta: f64) -> CMatrix {
    matrix::hermitian_part(&(a * cis(theta)))
}

fn gain_term(a: &CMatrix, gamma: f64) -> CMatrix {
    let n = a.nrows();
    matrix::identity(n) - a.adjoint() * a * Complex64::new(gamma * gamma, 0.0)
}

fn cone_term(a: &CMatrix, spec: &SectorSpec, sec_power: i32) -> CMatrix {
    let n = a.nrows();
    let c = spec.gamma / spec.half_width().cos().powi(sec_power);
    rot(a, spec.center()) * Complex64::new(c, 0.0) + matrix::identity(n)
}

/// The three S-procedure terms: gain, upper-edge rotation, lower-edge rotation.
pub fn s_procedure_terms(a: &CMatrix, spec: &SectorSpec) -> Vec<CMatrix> {
    vec![
        gain_term(a, spec.gamma),
        rot(a, -(HALF_PI - spec.beta)),
        rot(a, HALF_PI + spec.alpha),
    ]
}

/// The four terms of the sufficient condition (γ sec²p in the last term).
pub fn sufficient_terms(a: &CMatrix, spec: &SectorSpec) -> Vec<CMatrix> {
    let mut t = s_procedure_terms(a, spec);
    t.push(cone_term(a, spec, 2));
    t
}

/// The four terms of the necessary condition (γ sec p in the last term).
pub fn necessary_terms(a: &CMatrix, spec: &SectorSpec) -> Vec<CMatrix> {
    let mut t = s_procedure_terms(a, spec);
    t.push(cone_term(a, spec, 1));
    t
}

/// The two half-disk terms: gain and passivity.
pub fn half_disk_terms(a: &CMatrix, gamma: f64) -> Vec<CMatrix> {
    vec![gain_term(a, gamma), matrix::hermitian_part(a)]
}

/// λ_min of Σ kᵢ Tᵢ.
pub fn combination_margin(terms: &[CMatrix], k: &[f64]) -> f64 {
    let n = terms[0].nrows();
    let s = terms
        .iter()
        .zip(k)
        .fold(CMatrix::zeros(n, n), |acc, (t, &ki)| acc + t * Complex64::new(ki, 0.0));
    matrix::lambda_min(&s)
}

/// Homogeneous LMI with one non-negative multiplier per term.
pub fn multiplier_problem(terms: &[CMatrix]) -> LmiProblem {
    let n = terms[0].nrows();
    terms
        .iter()
        .fold(LmiProblem::homogeneous(n), |p, t| p.scalar(t.clone(), true))
}

fn run(method: Method, terms: &[CMatrix], opts: &SolveOptions) -> Result<MatrixTestReport, SectoredError> {
    let out = lmi::solve(&multiplier_problem(terms), opts)?;
    Ok(MatrixTestReport::from_outcome(method, out))
}

fn is_half_disk(spec: &SectorSpec) -> bool {
    (spec.beta - spec.alpha - PI).abs() <= 1e-12
}

/// Sufficient LMI test; widths of exactly π are routed to the half-disk test
/// after rotating the sector to be symmetric.
pub fn sufficient_test(a: &CMatrix, spec: &SectorSpec, opts: &SolveOptions) -> Result<MatrixTestReport, SectoredError> {
    matrix::ensure_square(a)?;
    if is_half_disk(spec) {
        let rotated = a * cis(spec.center());
        let mut r = half_disk_test(&rotated, spec.gamma, opts)?;
        r.method = Method::Sufficient;
        return Ok(r);
    }
    run(Method::Sufficient, &sufficient_terms(a, spec), opts)
}

/// Necessary LMI test: a failure means some B in the set makes I + AB singular.
pub fn necessary_test(a: &CMatrix, spec: &SectorSpec, opts: &SolveOptions) -> Result<MatrixTestReport, SectoredError> {
    require_invertible(a)?;
    if is_half_disk(spec) {
        let rotated = a * cis(spec.center());
        let mut r = half_disk_test(&rotated, spec.gamma, opts)?;
        r.method = Method::Necessary;
        return Ok(r);
    }
    run(Method::Necessary, &necessary_terms(a, spec), opts)
}

/// Half-disk test k₁(I − γ²A*A) + k₂H(A) ≻ 0 (sector [−π/2, π/2]).
pub fn half_disk_test(a: &CMatrix, gamma: f64, opts: &SolveOptions) -> Result<MatrixTestReport, SectoredError> {
    matrix::ensure_square(a)?;
    run(Method::HalfDisk, &half_disk_terms(a, gamma), opts)
}

/// S-procedure baseline: the sufficient test without the cone term.
pub fn s_procedure_test(a: &CMatrix, spec: &SectorSpec, opts: &SolveOptions) -> Result<MatrixTestReport, SectoredError> {
    matrix::ensure_square(a)?;
    run(Method::SProcedure, &s_procedure_terms(a, spec), opts)
}

fn require_invertible(a: &CMatrix) -> Result<(), SectoredError> {
    if matrix::det_and_inverse(a)?.inverse.is_none() {
        return Err(SectoredError::Singular);
    }
    Ok(())
}

/// Result of a μ-bound bisection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuBound {
    /// 1/γ*; zero when feasibility persists up to the γ cap.
    pub mu: f64,
    pub gamma_star: f64,
    /// Feasible at the upper γ bracket.
    pub unbounded: bool,
    /// (γ, feasible) for every probe, in order.
    pub trace: Vec<(f64, bool)>,
}

fn bisect<F>(feasible: F, tol: f64) -> Result<MuBound, SectoredError>
where
    F: Fn(f64) -> Result<bool, SectoredError>,
{
    let mut trace = Vec::new();
    let hi_ok = feasible(GAMMA_MAX)?;
    trace.push((GAMMA_MAX, hi_ok));
    if hi_ok {
        return Ok(MuBound {
            mu: 0.0,
            gamma_star: f64::INFINITY,
            unbounded: true,
            trace,
        });
    }
    let lo_ok = feasible(GAMMA_MIN)?;
    trace.push((GAMMA_MIN, lo_ok));
    if !lo_ok {
        return Ok(MuBound {
            mu: 1.0 / GAMMA_MIN,
            gamma_star: GAMMA_MIN,
            unbounded: false,
            trace,
        });
    }
    let (mut lo, mut hi) = (GAMMA_MIN, GAMMA_MAX);
    for _ in 0..MAX_BISECTIONS {
        if hi / lo - 1.0 <= tol {
            break;
        }
        let mid = (lo * hi).sqrt();
        let ok = feasible(mid)?;
        trace.push((mid, ok));
        if ok {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let g = (lo * hi).sqrt();
    Ok(MuBound {
        mu: 1.0 / g,
        gamma_star: g,
        unbounded: false,
        trace,
    })
}

fn check_alpha(alpha: f64) -> Result<(), SectoredError> {
    if !(alpha > 0.0 && alpha <= HALF_PI + 1e-12) {
        return Err(SectoredError::Sector(format!("alpha must lie in (0, pi/2], got {alpha}")));
    }
    Ok(())
}

/// Upper bound μ̂_α(A) = 1/sup{γ : S-procedure LMI feasible}.
pub fn mu_hat(a: &CMatrix, alpha: f64, tol: f64, opts: &SolveOptions) -> Result<MuBound, SectoredError> {
    check_alpha(alpha)?;
    require_invertible(a)?;
    let opts = opts.first_hit();
    bisect(
        |g| {
            let spec = SectorSpec { gamma: g, alpha: -alpha, beta: alpha };
            Ok(s_procedure_test(a, &spec, &opts)?.certified())
        },
        tol,
    )
}

/// Tighter bound μ̃_α(A) = 1/sup{γ : sufficient LMI feasible}.
pub fn mu_tilde(a: &CMatrix, alpha: f64, tol: f64, opts: &SolveOptions) -> Result<MuBound, SectoredError> {
    check_alpha(alpha)?;
    require_invertible(a)?;
    let opts = opts.first_hit();
    bisect(
        |g| {
            let spec = SectorSpec { gamma: g, alpha: -alpha, beta: alpha };
            Ok(sufficient_test(a, &spec, &opts)?.certified())
        },
        tol,
    )
}

/// Smallest |det(I + AB)| found by sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub min_abs_det: f64,
    pub argmin: CMatrix,
}

/// Nearest admissible scalar to `c` in the disk-sector {r e^{jθ}: r ≤ γ, θ ∈ [α, β]}.
fn clamp_to_sector(c: Complex64, spec: &SectorSpec) -> Complex64 {
    let r = c.norm().min(spec.gamma);
    let th = c.arg();
    let inside = (-2..=2).find_map(|k| {
        let t = th + 2.0 * PI * k as f64;
        (t >= spec.alpha && t <= spec.beta).then_some(t)
    });
    match inside {
        Some(t) => Complex64::from_polar(r, t),
        None => {
            // Project onto whichever edge ray is closer.
            let edge = |e: f64| {
                let proj = (c.re * e.cos() + c.im * e.sin()).clamp(0.0, spec.gamma);
                Complex64::from_polar(proj, e)
            };
            let (a, b) = (edge(spec.alpha), edge(spec.beta));
            if (a - c).norm() <= (b - c).norm() {
                a
            } else {
                b
            }
        }
    }
}

/// Falsification oracle over S_γ(α, β).
///
/// Half of the draws are generic members of the set; the other half are
/// rank-one members B = c·uu* with c solved from 1 + c·u*Au = 0 and clamped
/// into the set, which hits exact singularity whenever a rank-one
/// destabilizer exists along the sampled direction.
pub fn brute_force_violation(a: &CMatrix, spec: &SectorSpec, draws: usize, seed: u64) -> Violation {
    let n = a.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id = matrix::identity(n);
    let mut best = Violation {
        min_abs_det: f64::INFINITY,
        argmin: CMatrix::zeros(n, n),
    };
    let consider = |b: CMatrix, best: &mut Violation| {
        let d = (&id + a * &b).determinant().norm();
        if d < best.min_abs_det {
            best.min_abs_det = d;
            best.argmin = b;
        }
    };
    for i in 0..draws.max(1) {
        if i % 2 == 0 {
            let b = gainphase::sample_sectored_disk_with(spec, n, &mut rng);
            consider(b, &mut best);
        } else {
            let u = matrix::random::unit_vector(&mut rng, n);
            let w = (u.adjoint() * a * &u)[(0, 0)];
            let c = if w.norm() > 0.0 { -1.0 / w } else { Complex64::new(spec.gamma, 0.0) };
            let c = clamp_to_sector(c, spec);
            consider(&u * u.adjoint() * c, &mut best);
        }
    }
    best
}

/// Falsification oracle over the gain ball {B : σ̄(B) ≤ γ}.
///
/// Draws rank-one B = c·x y* with random unit x, y and c solved from
/// 1 + c·y*Ax = 0 (clamped to |c| ≤ γ), followed by a random local search on
/// (x, y) that drives |y*Ax| up.
pub fn brute_force_gain_ball(a: &CMatrix, gamma: f64, draws: usize, seed: u64) -> Violation {
    let n = a.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id = matrix::identity(n);
    let eval = |x: &matrix::CVector, y: &matrix::CVector| {
        let w = (y.adjoint() * a * x)[(0, 0)];
        let c = if w.norm() > 0.0 { -1.0 / w } else { Complex64::new(gamma, 0.0) };
        let c = if c.norm() > gamma { c * (gamma / c.norm()) } else { c };
        let b = x * y.adjoint() * c;
        let d = (&id + a * &b).determinant().norm();
        (d, b)
    };
    let mut best = Violation {
        min_abs_det: f64::INFINITY,
        argmin: CMatrix::zeros(n, n),
    };
    let mut best_xy = None;
    let half = draws.max(2) / 2;
    for _ in 0..half {
        let x = matrix::random::unit_vector(&mut rng, n);
        let y = matrix::random::unit_vector(&mut rng, n);
        let (d, b) = eval(&x, &y);
        if d < best.min_abs_det {
            best = Violation { min_abs_det: d, argmin: b };
            best_xy = Some((x, y));
        }
    }
    let Some((mut x, mut y)) = best_xy else {
        return best;
    };
    let mut step = 0.5;
    for _ in half..draws.max(2) {
        let dx = matrix::random::unit_vector(&mut rng, n) * Complex64::new(step, 0.0);
        let dy = matrix::random::unit_vector(&mut rng, n) * Complex64::new(step, 0.0);
        let xn = (&x + dx).normalize();
        let yn = (&y + dy).normalize();
        let (d, b) = eval(&xn, &yn);
        if d < best.min_abs_det {
            best = Violation { min_abs_det: d, argmin: b };
            x = xn;
            y = yn;
        } else {
            step = (step * 0.995).max(1e-6);
        }
    }
    best
}

/// Classifies a matrix and reports whether phases are available for small-phase use.
pub fn phase_class(a: &CMatrix) -> Result<PhaseClass, SectoredError> {
    Ok(gainphase::classify_sectorial(a, gainphase::MEMBER_TOL)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{identity, random};
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn opts() -> SolveOptions {
        SolveOptions::default()
    }

    #[test]
    fn small_gain_basic() {
        assert!(small_gain(&CMatrix::zeros(2, 2), 1.0));
        assert!(small_gain(&(identity(2) * c(0.5)), 1.0));
        assert!(!small_gain(&identity(2), 1.0));
    }

    #[test]
    fn small_phase_cases() {
        let spec = SectorSpec::symmetric(1.0, FRAC_PI_4).unwrap();
        assert_eq!(small_phase(&identity(2), &spec).unwrap(), SmallPhase::Holds);
        let a = identity(2) * cis(3.0 * FRAC_PI_4);
        let wide = SectorSpec::symmetric(1.0, HALF_PI).unwrap();
        assert_eq!(small_phase(&a, &wide).unwrap(), SmallPhase::Fails);
        // The scalar destabilizer b = e^{jπ/4}: 1 + e^{j3π/4}e^{jπ/4} = 0.
        let b = cis(FRAC_PI_4);
        assert!((c(1.0) + cis(3.0 * FRAC_PI_4) * b).norm() < 1e-15);
        let tri = matrix::diag(&[c(1.0), cis(2.0 * PI / 3.0), cis(-2.0 * PI / 3.0)]);
        assert_eq!(small_phase(&tri, &spec).unwrap(), SmallPhase::NotApplicable);
    }

    #[test]
    fn zero_matrix_is_certified_by_cone_term() {
        let spec = SectorSpec::symmetric(1.0, FRAC_PI_3).unwrap();
        let r = sufficient_test(&CMatrix::zeros(3, 3), &spec, &opts()).unwrap();
        assert!(r.certified());
        // k₄ alone already works: the cone term is the identity.
        let t = sufficient_terms(&CMatrix::zeros(3, 3), &spec);
        assert!((combination_margin(&t, &[0.0, 0.0, 0.0, 1.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn half_disk_cases() {
        assert!(half_disk_test(&identity(2), 0.5, &opts()).unwrap().certified());
        assert!(half_disk_test(&identity(2), 2.0, &opts()).unwrap().certified());
        let r = half_disk_test(&(-identity(2)), 2.0, &opts()).unwrap();
        assert!(!r.certified());
        // B = I lies in the gain-2 half disk and makes I − B singular.
        assert!((identity(2) - identity(2)).determinant().norm() < 1e-15);
    }

    #[test]
    fn s_procedure_small_gain_case() {
        let spec = SectorSpec::symmetric(1.0, FRAC_PI_4).unwrap();
        assert!(s_procedure_test(&(identity(2) * c(0.5)), &spec, &opts()).unwrap().certified());
    }

    #[test]
    fn necessary_rejects_explicit_singular_pair() {
        let gamma = 2.0;
        let a = identity(3) * c(-1.0 / gamma);
        let spec = SectorSpec::symmetric(gamma, 1e-3).unwrap();
        let r = necessary_test(&a, &spec, &opts()).unwrap();
        assert!(!r.certified());
        let singular = CMatrix::zeros(2, 2);
        assert_eq!(necessary_test(&singular, &spec, &opts()), Err(SectoredError::Singular));
    }

    #[test]
    fn width_pi_routes_to_half_disk() {
        let spec = SectorSpec::new(2.0, 0.0, PI).unwrap();
        // Rotating by the center π/2 turns A = −jI into I, which is passive.
        let a = identity(2) * Complex64::new(0.0, -1.0);
        let r = sufficient_test(&a, &spec, &opts()).unwrap();
        assert!(r.certified());
        assert_eq!(r.multipliers.len(), 2);
    }

    #[test]
    fn brute_force_trivial_and_singular() {
        let spec = SectorSpec::symmetric(1.0, FRAC_PI_3).unwrap();
        let v = brute_force_violation(&CMatrix::zeros(2, 2), &spec, 100, 1);
        assert!((v.min_abs_det - 1.0).abs() < 1e-15);
        let gamma = 1.5;
        let a = identity(3) * c(-1.0 / gamma);
        let v = brute_force_violation(&a, &SectorSpec::symmetric(gamma, 1e-3).unwrap(), 100, 2);
        assert!(v.min_abs_det < 1e-12);
        assert!(matrix::sigma_max(&v.argmin) <= gamma * (1.0 + 1e-12));
    }

    #[test]
    fn gain_ball_oracle_tracks_small_gain() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random::gaussian(&mut rng, 3, 3);
        let s = matrix::sigma_max(&a);
        let safe = brute_force_gain_ball(&a, 0.8 / s, 4000, 1);
        assert!(safe.min_abs_det > 1e-3);
        let unsafe_ = brute_force_gain_ball(&a, 1.2 / s, 4000, 1);
        assert!(unsafe_.min_abs_det < 1e-12);
    }

    #[test]
    fn clamp_keeps_members() {
        let spec = SectorSpec::new(1.0, -0.5, 0.7).unwrap();
        let inside = Complex64::from_polar(0.5, 0.1);
        assert!((clamp_to_sector(inside, &spec) - inside).norm() < 1e-15);
        let out = clamp_to_sector(Complex64::from_polar(3.0, 2.0), &spec);
        assert!(out.norm() <= 1.0 + 1e-15);
        assert!(out.arg() >= -0.5 - 1e-12 && out.arg() <= 0.7 + 1e-12);
    }
}
