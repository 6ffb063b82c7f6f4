//! State-space sectored-disk conditions.
//!
//! Both conditions search for multipliers k ≥ 0 and a storage matrix with
//!
//! ```text
//! −( F*·[[0, W], [W*, 0]]·F + Σ kᵢ Mᵢ ) ≻ 0,   F = [[A, B], [I, 0]]
//! ```
//!
//! The symmetric condition uses W = P ≻ 0 and covers U_γ(α) over all
//! frequencies. The asymmetric condition uses W = X + jY with Y ≻ 0 and
//! covers U_γ(α, β).
//!
//! For the asymmetric multipliers two forms are available. The printed form
//! keeps the formulas as stated. The derived form keeps what the frequency
//! domain argument actually needs. With β = −α the derived form coincides
//! with the symmetric condition up to a positive rescaling of k₄.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::gainphase::SectorSpec;
use crate::lmi::{self, LmiError, LmiProblem, LmiValues, SolveOptions, SolveOutcome};
use crate::ltisys::{self, LtiError, StateSpaceModel};
use crate::matrix::{self, cis, complexify, CMatrix};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KypError {
    #[error(transparent)]
    Lmi(#[from] LmiError),
    #[error(transparent)]
    Lti(#[from] LtiError),
    #[error("system must be square with at least one state")]
    Shape,
    #[error("invalid sector: {0}")]
    Sector(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Which value p takes in the asymmetric multipliers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PConvention {
    /// p = γ sec²(β − α), as printed in the condition's preamble.
    Printed,
    /// p = γ sec²((β − α)/2), consistent with the frequency-wise terms.
    #[default]
    HalfWidth,
}

/// Form of the lower-edge multiplier M₃.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum M3Form {
    /// Rotation e^{∓j(π/2−α)} as printed.
    Printed,
    /// Rotation e^{±j(π/2+α)} that maps onto 2H(e^{j(π/2+α)}G).
    #[default]
    Derived,
}

/// Form of the cone multiplier M₄.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum M4Form {
    /// [[0, −pe^{−jq}C*], [−pe^{jq}C, −2pH(e^{jq}D) + I]].
    Printed,
    /// [[0, −(p/2)e^{−jq}C*], [−(p/2)e^{jq}C, −pH(e^{jq}D) − I]], i.e. −(pH(e^{jq}G) + I).
    #[default]
    Derived,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Theorem6Options {
    pub p: PConvention,
    pub m3: M3Form,
    pub m4: M4Form,
}

impl Theorem6Options {
    /// All eight convention combinations.
    pub fn all() -> Vec<Theorem6Options> {
        let mut v = Vec::with_capacity(8);
        for p in [PConvention::Printed, PConvention::HalfWidth] {
            for m3 in [M3Form::Printed, M3Form::Derived] {
                for m4 in [M4Form::Printed, M4Form::Derived] {
                    v.push(Theorem6Options { p, m3, m4 });
                }
            }
        }
        v
    }

    pub fn p_value(&self, spec: &SectorSpec) -> f64 {
        let w = spec.beta - spec.alpha;
        let angle = match self.p {
            PConvention::Printed => w,
            PConvention::HalfWidth => w / 2.0,
        };
        spec.gamma / angle.cos().powi(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Variant {
    Symmetric,
    Asymmetric(Theorem6Options),
}

/// An assembled state-space condition.
#[derive(Debug, Clone)]
pub struct KypProblem {
    pub sys: StateSpaceModel,
    pub spec: SectorSpec,
    pub variant: Variant,
    pub multipliers: [CMatrix; 4],
    pub lmi: LmiProblem,
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// [[TL, TR], [TR*, BR]] with TL n×n, BR m×m.
fn block(n: usize, m: usize, tl: &CMatrix, tr: &CMatrix, br: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(n + m, n + m);
    out.view_mut((0, 0), (n, n)).copy_from(tl);
    out.view_mut((0, n), (n, m)).copy_from(tr);
    out.view_mut((n, 0), (m, n)).copy_from(&tr.adjoint());
    out.view_mut((n, n), (m, m)).copy_from(br);
    out
}

/// Multiplier with zero top-left block, off-diagonal −z̄·C* and bottom-right `br`.
fn edge(sys: &Mats, z: Complex64, br: CMatrix) -> CMatrix {
    block(sys.n, sys.m, &CMatrix::zeros(sys.n, sys.n), &(sys.c.adjoint() * (-z.conj())), &br)
}

struct Mats {
    n: usize,
    m: usize,
    a: CMatrix,
    b: CMatrix,
    c: CMatrix,
    d: CMatrix,
}

fn mats(sys: &StateSpaceModel) -> Result<Mats, KypError> {
    if !sys.is_square() || sys.states() == 0 {
        return Err(KypError::Shape);
    }
    Ok(Mats {
        n: sys.states(),
        m: sys.inputs(),
        a: complexify(&sys.a),
        b: complexify(&sys.b),
        c: complexify(&sys.c),
        d: complexify(&sys.d),
    })
}

fn gain_multiplier(s: &Mats, gamma: f64) -> CMatrix {
    let g2 = c(gamma * gamma);
    block(
        s.n,
        s.m,
        &(s.c.adjoint() * &s.c * g2),
        &(s.c.adjoint() * &s.d * g2),
        &(s.d.adjoint() * &s.d * g2 - matrix::identity(s.m)),
    )
}

fn rot_h2(d: &CMatrix, z: Complex64) -> CMatrix {
    matrix::hermitian_part(&(d * z)) * c(2.0)
}

/// M₁..M₄ of the symmetric condition.
pub fn theorem5_multipliers(sys: &StateSpaceModel, gamma: f64, alpha: f64) -> Result<[CMatrix; 4], KypError> {
    check_symmetric(gamma, alpha)?;
    let s = mats(sys)?;
    let z = cis(FRAC_PI_2 - alpha);
    let m4_br = -(s.d.adjoint() + &s.d) - matrix::identity(s.m) * c(2.0 * alpha.cos().powi(2) / gamma);
    Ok([
        gain_multiplier(&s, gamma),
        edge(&s, z, -rot_h2(&s.d, z)),
        edge(&s, z.conj(), -rot_h2(&s.d, z.conj())),
        edge(&s, c(1.0), m4_br),
    ])
}

/// M₁..M₄ of the asymmetric condition under the given conventions.
pub fn theorem6_multipliers(sys: &StateSpaceModel, spec: &SectorSpec, opts: &Theorem6Options) -> Result<[CMatrix; 4], KypError> {
    check_asymmetric(spec)?;
    let s = mats(sys)?;
    let (alpha, beta, q) = (spec.alpha, spec.beta, spec.center());
    let p = opts.p_value(spec);
    let z2 = cis(-(FRAC_PI_2 - beta));
    let z3 = match opts.m3 {
        M3Form::Printed => cis(FRAC_PI_2 - alpha),
        M3Form::Derived => cis(FRAC_PI_2 + alpha),
    };
    let zq = cis(q);
    let m4 = match opts.m4 {
        M4Form::Printed => edge(&s, zq * p, -rot_h2(&s.d, zq) * c(p) + matrix::identity(s.m)),
        M4Form::Derived => edge(&s, zq * (p / 2.0), -rot_h2(&s.d, zq) * c(p / 2.0) - matrix::identity(s.m)),
    };
    Ok([
        gain_multiplier(&s, spec.gamma),
        edge(&s, z2, -rot_h2(&s.d, z2)),
        edge(&s, z3, -rot_h2(&s.d, z3)),
        m4,
    ])
}

/// F*·[[0, W], [W*, 0]]·F = [[A*W* + WA, WB], [B*W*, 0]] for W = P, or
/// W = X + jY in the asymmetric condition.
pub fn storage_block(sys: &StateSpaceModel, w: &CMatrix) -> Result<CMatrix, KypError> {
    let s = mats(sys)?;
    if w.shape() != (s.n, s.n) {
        return Err(KypError::Dimension(format!("storage matrix must be {0}x{0}", s.n)));
    }
    let mut f = CMatrix::zeros(2 * s.n, s.n + s.m);
    f.view_mut((0, 0), (s.n, s.n)).copy_from(&s.a);
    f.view_mut((0, s.n), (s.n, s.m)).copy_from(&s.b);
    f.view_mut((s.n, 0), (s.n, s.n)).copy_from(&matrix::identity(s.n));
    let mut phi = CMatrix::zeros(2 * s.n, 2 * s.n);
    phi.view_mut((0, s.n), (s.n, s.n)).copy_from(w);
    phi.view_mut((s.n, 0), (s.n, s.n)).copy_from(&w.adjoint());
    Ok(f.adjoint() * phi * f)
}

fn check_symmetric(gamma: f64, alpha: f64) -> Result<(), KypError> {
    if !(gamma > 0.0 && gamma.is_finite()) || !(0.0..=FRAC_PI_2 + 1e-12).contains(&alpha) {
        return Err(KypError::Sector(format!("need gamma > 0 and alpha in [0, pi/2], got ({gamma}, {alpha})")));
    }
    Ok(())
}

fn check_asymmetric(spec: &SectorSpec) -> Result<(), KypError> {
    let w = spec.beta - spec.alpha;
    let q = spec.center();
    if !(spec.gamma > 0.0) || !(w > 0.0 && w < PI) || !(-PI..PI).contains(&q) {
        return Err(KypError::Sector(format!(
            "need gamma > 0, 0 < beta - alpha < pi and -pi <= center < pi, got {spec:?}"
        )));
    }
    Ok(())
}

fn negated_sum(mults: &[CMatrix; 4], problem: LmiProblem) -> LmiProblem {
    mults.iter().fold(problem, |p, m| p.scalar(-m, true))
}

/// Symmetric condition for U_γ(α): unknowns P ≻ 0 and k₁..k₄ ≥ 0.
pub fn assemble_theorem5(sys: &StateSpaceModel, gamma: f64, alpha: f64) -> Result<KypProblem, KypError> {
    let multipliers = theorem5_multipliers(sys, gamma, alpha)?;
    let n = sys.states();
    let dim = n + sys.inputs();
    let owned = sys.clone();
    let lmi = negated_sum(&multipliers, LmiProblem::homogeneous(dim)).matrix_var(n, true, move |e| {
        -storage_block(&owned, e).expect("shape checked")
    });
    Ok(KypProblem {
        sys: sys.clone(),
        spec: SectorSpec {
            gamma,
            alpha: -alpha,
            beta: alpha,
        },
        variant: Variant::Symmetric,
        multipliers,
        lmi,
    })
}

/// Asymmetric condition for U_γ(α, β): unknowns X Hermitian, Y ≻ 0 and k₁..k₄ ≥ 0.
pub fn assemble_theorem6(sys: &StateSpaceModel, spec: &SectorSpec, opts: &Theorem6Options) -> Result<KypProblem, KypError> {
    let multipliers = theorem6_multipliers(sys, spec, opts)?;
    let n = sys.states();
    let dim = n + sys.inputs();
    let (sx, sy) = (sys.clone(), sys.clone());
    let lmi = negated_sum(&multipliers, LmiProblem::homogeneous(dim))
        .matrix_var(n, false, move |e| -storage_block(&sx, e).expect("shape checked"))
        .matrix_var(n, true, move |e| {
            -storage_block(&sy, &(e * Complex64::new(0.0, 1.0))).expect("shape checked")
        });
    Ok(KypProblem {
        sys: sys.clone(),
        spec: *spec,
        variant: Variant::Asymmetric(*opts),
        multipliers,
        lmi,
    })
}

/// A verified state-space certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KypCertificate {
    pub k: [f64; 4],
    /// P for the symmetric condition; X and Y for the asymmetric one.
    #[serde(with = "crate::lmi::matrix_list")]
    pub storage: Vec<CMatrix>,
    /// λ_min of the negated main block.
    pub margin: f64,
    /// Minimum of `margin` and λ_min of P (or Y).
    pub joint_margin: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum KypOutcome {
    Certified(KypCertificate),
    /// No certificate within the budget; not a proof of infeasibility.
    NotCertified {
        best_margin: f64,
        iterations: usize,
        budget_exhausted: bool,
    },
}

impl KypOutcome {
    pub fn is_certified(&self) -> bool {
        matches!(self, KypOutcome::Certified(_))
    }

    pub fn margin(&self) -> f64 {
        match self {
            KypOutcome::Certified(c) => c.joint_margin,
            KypOutcome::NotCertified { best_margin, .. } => *best_margin,
        }
    }
}

pub fn solve_kyp(problem: &KypProblem, opts: &SolveOptions) -> Result<KypOutcome, KypError> {
    Ok(match lmi::solve(&problem.lmi, opts)? {
        SolveOutcome::Feasible(cert) => {
            let mut k = [0.0; 4];
            k.copy_from_slice(&cert.scalars);
            KypOutcome::Certified(KypCertificate {
                k,
                storage: cert.matrices,
                margin: cert.margin,
                joint_margin: cert.joint_margin,
                iterations: cert.iterations,
            })
        }
        SolveOutcome::NotCertified(n) => KypOutcome::NotCertified {
            best_margin: n.best_margin,
            iterations: n.iterations,
            budget_exhausted: n.budget_exhausted,
        },
    })
}

/// Direct eigenvalue check of a candidate certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KypVerification {
    /// λ_min of −(storage block + Σ kᵢMᵢ).
    pub main: f64,
    /// λ_min of P (symmetric) or Y (asymmetric).
    pub storage: f64,
    pub k_nonneg: bool,
}

impl KypVerification {
    pub fn holds(&self) -> bool {
        self.main > 0.0 && self.storage > 0.0 && self.k_nonneg
    }
}

fn verify(sys: &StateSpaceModel, mults: &[CMatrix; 4], w: &CMatrix, k: &[f64; 4], side: &CMatrix) -> Result<KypVerification, KypError> {
    let sum = mults
        .iter()
        .zip(k)
        .fold(storage_block(sys, w)?, |acc, (m, &ki)| acc + m * c(ki));
    Ok(KypVerification {
        main: matrix::lambda_min(&(-sum)),
        storage: matrix::lambda_min(side),
        k_nonneg: k.iter().all(|&x| x >= 0.0),
    })
}

/// Checks a given (P, k) for the symmetric condition without any solver.
pub fn verify_theorem5(sys: &StateSpaceModel, gamma: f64, alpha: f64, p: &DMatrix<f64>, k: &[f64; 4]) -> Result<KypVerification, KypError> {
    let mults = theorem5_multipliers(sys, gamma, alpha)?;
    let p = complexify(p);
    verify(sys, &mults, &p, k, &matrix::hermitian_part(&p))
}

/// Checks a given (X, Y, k) for the asymmetric condition without any solver.
pub fn verify_theorem6(
    sys: &StateSpaceModel,
    spec: &SectorSpec,
    opts: &Theorem6Options,
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
    k: &[f64; 4],
) -> Result<KypVerification, KypError> {
    let mults = theorem6_multipliers(sys, spec, opts)?;
    let (x, y) = (complexify(x), complexify(y));
    let w = &x + &y * Complex64::new(0.0, 1.0);
    verify(sys, &mults, &w, k, &matrix::hermitian_part(&y))
}

/// Re-verifies a solver certificate against its problem.
pub fn verify_certificate(problem: &KypProblem, cert: &KypCertificate) -> Result<lmi::Verification, KypError> {
    Ok(problem.lmi.verify_full(&LmiValues {
        scalars: cert.k.to_vec(),
        matrices: cert.storage.clone(),
    })?)
}

/// Frequency-wise weights on T₁..T₄ implied by a symmetric certificate:
/// [k₁, k₃, k₂, k₄·2cos²α/γ].
pub fn theorem5_frequency_weights(k: &[f64; 4], gamma: f64, alpha: f64) -> [f64; 4] {
    [k[0], k[2], k[1], k[3] * 2.0 * alpha.cos().powi(2) / gamma]
}

/// λ_min of Σ wᵢTᵢ(ω) at each grid frequency, for constant weights.
pub fn frequency_margins(sys: &StateSpaceModel, spec: &SectorSpec, weights: &[f64; 4], grid: &[f64]) -> Result<Vec<f64>, KypError> {
    grid.iter()
        .map(|&w| {
            let g = ltisys::freq_response(sys, w)?;
            let terms = ltisys::theorem4_terms(&g, spec);
            let m = g.nrows();
            let sum = terms
                .iter()
                .zip(weights)
                .fold(CMatrix::zeros(m, m), |acc, (t, &k)| acc + t * c(k));
            Ok(matrix::lambda_min(&sum))
        })
        .collect()
}
