//! Matrix gain and phase.
//!
//! Phases are defined through the sectorial decomposition A = T*DT: after
//! rotating A so that its Hermitian part is positive definite, the phases are
//! the rotation angle plus the arctangents of the generalized eigenvalues of
//! the skew part against the Hermitian part. Matrices whose numerical range
//! touches the origin are compressed to their range first.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::matrix::{self, cis, CMatrix, MatrixError};

/// Default membership tolerance.
pub const MEMBER_TOL: f64 = 1e-8;

/// Number of coarse angles scanned before golden-section refinement.
const THETA_GRID: usize = 720;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PhaseError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("phases are not defined for a {0:?} matrix")]
    NotPhaseDefined(PhaseClass),
    #[error("invalid sector: {0}")]
    InvalidSector(String),
}

/// Gain bound γ together with a phase interval [α, β].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorSpec {
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl SectorSpec {
    /// Validates γ > 0, 0 < β − α ≤ π and −π ≤ (α+β)/2 < π.
    pub fn new(gamma: f64, alpha: f64, beta: f64) -> Result<Self, PhaseError> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(PhaseError::InvalidSector(format!("gamma must be positive, got {gamma}")));
        }
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(PhaseError::InvalidSector("angles must be finite".into()));
        }
        let width = beta - alpha;
        if !(width > 0.0 && width <= PI + 1e-12) {
            return Err(PhaseError::InvalidSector(format!(
                "need 0 < beta - alpha <= pi, got {width}"
            )));
        }
        let q = 0.5 * (alpha + beta);
        if !(-PI - 1e-12..PI).contains(&q) {
            return Err(PhaseError::InvalidSector(format!(
                "center (alpha+beta)/2 = {q} outside [-pi, pi)"
            )));
        }
        Ok(SectorSpec { gamma, alpha, beta })
    }

    /// Symmetric sector [−α, α].
    pub fn symmetric(gamma: f64, alpha: f64) -> Result<Self, PhaseError> {
        Self::new(gamma, -alpha, alpha)
    }

    pub fn is_symmetric(&self) -> bool {
        (self.alpha + self.beta).abs() <= 1e-12 * (1.0 + self.beta.abs())
    }

    /// Half width p = (β − α)/2.
    pub fn half_width(&self) -> f64 {
        0.5 * (self.beta - self.alpha)
    }

    /// Center q = (α + β)/2.
    pub fn center(&self) -> f64 {
        0.5 * (self.alpha + self.beta)
    }
}

/// Sectoriality class of a square matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseClass {
    Sectorial,
    QuasiSectorial,
    SemiSectorial,
    NonSectorial,
}

/// Phases (descending), phase center, and rank of a matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseInfo {
    pub class: PhaseClass,
    pub phases: Vec<f64>,
    pub center: f64,
    pub rank: usize,
    /// Set when the phases come from an ε-perturbed semi-sectorial core.
    pub approximate: bool,
    /// Set when the classifying margin was within tolerance of zero.
    pub near_boundary: bool,
}

impl PhaseInfo {
    pub fn max_phase(&self) -> Option<f64> {
        self.phases.first().copied()
    }

    pub fn min_phase(&self) -> Option<f64> {
        self.phases.last().copied()
    }
}

/// Support function of the numerical range: h(θ) = λ_max(H(e^{−jθ}A)).
pub fn nr_support(a: &CMatrix, theta: f64) -> f64 {
    matrix::lambda_max(&matrix::hermitian_part(&(a * cis(-theta))))
}

/// m(θ) = λ_min(H(e^{−jθ}A)); positive iff W(A) lies in the open half-plane around θ.
fn rotated_margin(a: &CMatrix, theta: f64) -> f64 {
    matrix::lambda_min(&matrix::hermitian_part(&(a * cis(-theta))))
}

/// Maximizes m(θ) over the circle: coarse grid plus golden-section refinement.
fn best_rotation(a: &CMatrix) -> (f64, f64) {
    let step = TAU / THETA_GRID as f64;
    let vals: Vec<f64> = (0..THETA_GRID)
        .map(|i| rotated_margin(a, -PI + step * i as f64))
        .collect();
    let mut order: Vec<usize> = (0..THETA_GRID).collect();
    order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]));
    let mut best = (-PI + step * order[0] as f64, vals[order[0]]);
    for &i in order.iter().take(3) {
        let c = -PI + step * i as f64;
        let (t, v) = golden_max(|t| rotated_margin(a, t), c - step, c + step, 60);
        if v > best.1 {
            best = (t, v);
        }
    }
    (wrap_angle(best.0), best.1)
}

/// Golden-section maximization of a unimodal function on [lo, hi].
pub(crate) fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, iters: usize) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Maps an angle to [−π, π).
pub fn wrap_angle(t: f64) -> f64 {
    let w = (t + PI).rem_euclid(TAU) - PI;
    if w >= PI {
        w - TAU
    } else {
        w
    }
}

/// Classification result with the data needed to compute phases.
struct Classified {
    class: PhaseClass,
    core: CMatrix,
    rank: usize,
    near_boundary: bool,
}

fn classify_full(a: &CMatrix, tol: f64) -> Result<Classified, PhaseError> {
    let n = matrix::ensure_square(a)?;
    let s = matrix::sigma_max(a);
    if s == 0.0 {
        return Ok(Classified {
            class: PhaseClass::QuasiSectorial,
            core: CMatrix::zeros(0, 0),
            rank: 0,
            near_boundary: true,
        });
    }
    let (_, margin) = best_rotation(a);
    let scaled = margin / s;
    if scaled > tol {
        return Ok(Classified {
            class: PhaseClass::Sectorial,
            core: a.clone(),
            rank: n,
            near_boundary: false,
        });
    }
    if scaled < -tol {
        return Ok(Classified {
            class: PhaseClass::NonSectorial,
            core: a.clone(),
            rank: n,
            near_boundary: false,
        });
    }
    // Zero sits on the boundary of W(A): compress to the range and inspect the core.
    let rc = matrix::range_compress(a, matrix::RANK_TOL)?;
    let q = &rc.left;
    let core = q.adjoint() * a * q;
    // EP test: range(A*) must coincide with range(A).
    let cross = &rc.t1 * q;
    let ep = rc.rank > 0 && matrix::singular_values(&cross).last().is_some_and(|&m| m > 1.0 - 1e-6);
    let core_sectorial = rc.rank > 0 && {
        let cs = matrix::sigma_max(&core);
        best_rotation(&core).1 / cs > tol
    };
    let class = if ep && core_sectorial && rc.rank < n {
        PhaseClass::QuasiSectorial
    } else {
        PhaseClass::SemiSectorial
    };
    Ok(Classified {
        class,
        core,
        rank: rc.rank,
        near_boundary: true,
    })
}

/// Sectoriality class of A with relative tolerance `tol` on the classifying margin.
pub fn classify_sectorial(a: &CMatrix, tol: f64) -> Result<PhaseClass, PhaseError> {
    Ok(classify_full(a, tol)?.class)
}

/// Phases of a matrix whose Hermitian part after rotation by θ₀ is positive definite.
fn sectorial_phases(core: &CMatrix) -> (Vec<f64>, f64) {
    let (theta0, _) = best_rotation(core);
    let rot = core * cis(-theta0);
    let h = matrix::hermitian_part(&rot);
    let k = matrix::skew_part(&rot);
    let l = matrix::inv_sqrt_pd(&h).expect("rotated Hermitian part is positive definite");
    let m = &l * k * &l;
    let mut phases: Vec<f64> = matrix::eigvals_hermitian(&m)
        .into_iter()
        .map(|mu| theta0 + mu.atan())
        .collect();
    phases.sort_by(|x, y| y.total_cmp(x));
    let mid = 0.5 * (phases[0] + phases[phases.len() - 1]);
    let shift = wrap_angle(mid) - mid;
    for p in &mut phases {
        *p += shift;
    }
    (phases, mid + shift)
}

fn info_from(c: Classified, approximate_semi: bool) -> Result<PhaseInfo, PhaseError> {
    match c.class {
        PhaseClass::Sectorial | PhaseClass::QuasiSectorial => {
            let (phases, center) = if c.rank == 0 {
                (vec![], 0.0)
            } else {
                sectorial_phases(&c.core)
            };
            Ok(PhaseInfo {
                class: c.class,
                phases,
                center,
                rank: c.rank,
                approximate: false,
                near_boundary: c.near_boundary,
            })
        }
        PhaseClass::SemiSectorial if approximate_semi && c.rank > 0 => {
            // Nudge the core off the origin along the best supporting direction.
            let (theta0, m) = best_rotation(&c.core);
            let eps = 1e-6 * matrix::sigma_max(&c.core) + 2.0 * (-m).max(0.0);
            let n = c.core.nrows();
            let pert = &c.core + matrix::identity(n) * (cis(theta0) * eps);
            let (phases, center) = sectorial_phases(&pert);
            Ok(PhaseInfo {
                class: c.class,
                phases,
                center,
                rank: c.rank,
                approximate: true,
                near_boundary: true,
            })
        }
        other => Err(PhaseError::NotPhaseDefined(other)),
    }
}

/// Phases of a sectorial or quasi-sectorial matrix, sorted descending.
pub fn matrix_phases(a: &CMatrix, tol: f64) -> Result<PhaseInfo, PhaseError> {
    info_from(classify_full(a, tol)?, false)
}

/// Like [`matrix_phases`], but semi-sectorial inputs get approximate phases
/// (flagged) instead of an error.
pub fn approximate_phases(a: &CMatrix, tol: f64) -> Result<PhaseInfo, PhaseError> {
    info_from(classify_full(a, tol)?, true)
}

/// True iff [lo, hi] fits inside [α − tol, β + tol] after a shift by a multiple of 2π.
fn interval_within(lo: f64, hi: f64, alpha: f64, beta: f64, tol: f64) -> bool {
    (-3..=3).any(|k| {
        let s = TAU * k as f64;
        lo + s >= alpha - tol && hi + s <= beta + tol
    })
}

/// Membership in the sectored-disk set S_γ(α, β).
pub fn in_sectored_disk(b: &CMatrix, spec: &SectorSpec, tol: f64) -> Result<bool, PhaseError> {
    matrix::ensure_square(b)?;
    if matrix::sigma_max(b) > spec.gamma * (1.0 + tol) {
        return Ok(false);
    }
    let info = match approximate_phases(b, tol) {
        Ok(info) => info,
        Err(PhaseError::NotPhaseDefined(PhaseClass::NonSectorial)) => return Ok(false),
        Err(e) => return Err(e),
    };
    match (info.min_phase(), info.max_phase()) {
        (Some(lo), Some(hi)) => Ok(interval_within(lo, hi, spec.alpha, spec.beta, tol)),
        _ => Ok(true),
    }
}

/// Draws a member of S_γ(α, β) using the given generator.
///
/// B = T*·diag(e^{jθᵢ})·T with θᵢ uniform in [α, β] and Gaussian T, rescaled
/// so that σ̄(B) = γ·r with r uniform in [0, 1]. Not uniform over the set.
pub fn sample_sectored_disk_with<R: Rng + ?Sized>(spec: &SectorSpec, n: usize, rng: &mut R) -> CMatrix {
    let t = matrix::random::gaussian(rng, n, n);
    let phases: Vec<Complex64> = (0..n)
        .map(|_| cis(rng.random_range(spec.alpha..=spec.beta)))
        .collect();
    let b = t.adjoint() * matrix::diag(&phases) * &t;
    let r: f64 = rng.random();
    let s = matrix::sigma_max(&b);
    b * Complex64::new(spec.gamma * r / s, 0.0)
}

/// Seeded, deterministic draw from S_γ(α, β).
pub fn sample_sectored_disk(spec: &SectorSpec, n: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_sectored_disk_with(spec, n, &mut rng)
}

/// Rotates B and its sector so that the sector becomes symmetric about 0.
pub fn rotate_to_symmetric(b: &CMatrix, spec: &SectorSpec) -> (CMatrix, SectorSpec) {
    let q = spec.center();
    let p = spec.half_width();
    (
        b * cis(-q),
        SectorSpec {
            gamma: spec.gamma,
            alpha: -p,
            beta: p,
        },
    )
}

/// Scalar test: 1 + ab ≠ 0 for every b ∈ S_γ(α, β).
///
/// A singular pair needs b = −1/a, which is admissible iff |a| ≥ 1/γ and
/// ∠a ∈ [π − β, π − α] (mod 2π).
pub fn scalar_sectored_disk_ok(a: Complex64, spec: &SectorSpec) -> bool {
    if a == Complex64::new(0.0, 0.0) {
        return true;
    }
    if a.norm() * spec.gamma < 1.0 {
        return true;
    }
    !angle_in(a.arg(), PI - spec.beta, PI - spec.alpha)
}

/// The scalar condition exactly as printed in the source literature:
/// |a| > 1/γ or ∠a ∉ [−π−α, π−β] (mod 2π). Kept for comparison only; it
/// disagrees with brute force (see tests).
pub fn scalar_sectored_disk_ok_printed(a: Complex64, spec: &SectorSpec) -> bool {
    if a == Complex64::new(0.0, 0.0) {
        return true;
    }
    a.norm() * spec.gamma > 1.0 || !angle_in(a.arg(), -PI - spec.alpha, PI - spec.beta)
}

/// Whether angle t lies in [lo, hi] modulo 2π.
fn angle_in(t: f64, lo: f64, hi: f64) -> bool {
    if hi - lo >= TAU {
        return true;
    }
    let off = (t - lo).rem_euclid(TAU);
    off <= hi - lo + 1e-15
}

/// Phase limits used by the small-phase test: (−π − φ̲, π − φ̄).
pub fn small_phase_window(info: &PhaseInfo) -> Option<(f64, f64)> {
    Some((-PI - info.min_phase()?, PI - info.max_phase()?))
}

/// π/2 shorthand used by the LMI builders.
pub(crate) const HALF_PI: f64 = FRAC_PI_2;
