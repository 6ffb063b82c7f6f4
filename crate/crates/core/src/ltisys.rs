//! Continuous-time LTI systems and the frequency-wise sectored-disk sweep.
//!
//! Systems are real state-space realizations G(s) = C(sI − A)⁻¹B + D. The
//! sweep evaluates, at each grid frequency, the four terms
//!
//! ```text
//! T₁ = I − γ²G*G
//! T₂ = 2H(e^{−j(π/2−p−q)}G)
//! T₃ = 2H(e^{j(π/2+q−p)}G)
//! T₄ = γ sec²(p)·H(e^{jq}G) + I
//! ```
//!
//! with p, q the half width and center of the local sector, and searches
//! for k(ω) ≥ 0 with Σ kᵢ(ω)Tᵢ(ω) ≻ 0. A segment of width π drops T₄
//! (T₂ and T₃ then coincide and the half-disk form remains).

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::gainphase::{self, golden_max, PhaseInfo, SectorSpec};
use crate::lmi::{self, LmiError, SolveOptions, SolveOutcome};
use crate::matrix::{self, cis, complexify, CMatrix, MatrixError};
use crate::sectored::multiplier_problem;

/// Real parts at or above −STABILITY_TOL count as unstable.
pub const STABILITY_TOL: f64 = 1e-9;
/// Minimum distance from jω to the spectrum of A.
pub const POLE_TOL: f64 = 1e-10;
/// Default relative tolerance of [`hinf_norm`].
pub const HINF_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LtiError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Lmi(#[from] LmiError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("pole on the imaginary axis at omega = {0}")]
    ImaginaryAxisPole(f64),
    #[error("system is not stable")]
    Unstable,
    #[error("interconnection is ill-posed: I + D_G D_H is singular")]
    IllPosed,
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("invalid frequency bounds: {0}")]
    Bounds(String),
}

/// Real state-space realization (A, B, C, D).
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpaceModel {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
}

/// One scalar entry (b₁s + b₀)/(a₁s + a₀) with a₀ ≠ 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstOrder {
    pub num: [f64; 2],
    pub den: [f64; 2],
}

impl FirstOrder {
    pub fn new(b1: f64, b0: f64, a1: f64, a0: f64) -> Self {
        FirstOrder { num: [b1, b0], den: [a1, a0] }
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        (s * self.num[0] + self.num[1]) / (s * self.den[0] + self.den[1])
    }
}

impl StateSpaceModel {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>, d: DMatrix<f64>) -> Result<Self, LtiError> {
        let n = a.nrows();
        if a.ncols() != n || b.nrows() != n || c.ncols() != n || d.nrows() != c.nrows() || d.ncols() != b.ncols() {
            return Err(LtiError::Dimension(format!(
                "A {}x{}, B {}x{}, C {}x{}, D {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols(),
                c.nrows(),
                c.ncols(),
                d.nrows(),
                d.ncols()
            )));
        }
        if [&a, &b, &c, &d].iter().any(|m| m.iter().any(|x| !x.is_finite())) {
            return Err(LtiError::Dimension("non-finite entry".into()));
        }
        Ok(StateSpaceModel { a, b, c, d })
    }

    /// Builds from row slices; an empty `a` gives a static gain.
    pub fn from_rows(a: &[&[f64]], b: &[&[f64]], c: &[&[f64]], d: &[&[f64]]) -> Result<Self, LtiError> {
        let dm = rows_to_matrix(d, None)?;
        let n = a.len();
        StateSpaceModel::new(
            rows_to_matrix(a, Some(n))?,
            rows_to_matrix(b, Some(dm.ncols())).map(|m| if n == 0 { DMatrix::zeros(0, dm.ncols()) } else { m })?,
            if n == 0 { DMatrix::zeros(dm.nrows(), 0) } else { rows_to_matrix(c, Some(n))? },
            dm,
        )
    }

    /// Memoryless system y = D u.
    pub fn static_gain(d: DMatrix<f64>) -> Self {
        let (p, m) = d.shape();
        StateSpaceModel {
            a: DMatrix::zeros(0, 0),
            b: DMatrix::zeros(0, m),
            c: DMatrix::zeros(p, 0),
            d,
        }
    }

    /// Diagonal realization of a transfer matrix whose entries are first order.
    pub fn from_first_order(entries: &[Vec<FirstOrder>]) -> Result<Self, LtiError> {
        let p = entries.len();
        let m = entries.first().map_or(0, Vec::len);
        if p == 0 || m == 0 || entries.iter().any(|r| r.len() != m) {
            return Err(LtiError::Dimension("ragged or empty transfer matrix".into()));
        }
        let mut poles = Vec::new();
        let mut d = DMatrix::zeros(p, m);
        for (i, row) in entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                let [b1, b0] = e.num;
                let [a1, a0] = e.den;
                if a0 == 0.0 {
                    return Err(LtiError::Dimension(format!("entry ({i},{j}) has a pole at the origin")));
                }
                if a1 == 0.0 {
                    if b1 != 0.0 {
                        return Err(LtiError::Dimension(format!("entry ({i},{j}) is improper")));
                    }
                    d[(i, j)] = b0 / a0;
                    continue;
                }
                // (b₁s + b₀)/(a₁s + a₀) = b₁/a₁ + r/(s + a₀/a₁), r = (b₀ − b₁a₀/a₁)/a₁.
                let dd = b1 / a1;
                d[(i, j)] = dd;
                let r = (b0 - dd * a0) / a1;
                if r != 0.0 {
                    poles.push((i, j, -a0 / a1, r));
                }
            }
        }
        let n = poles.len();
        let mut a = DMatrix::zeros(n, n);
        let mut b = DMatrix::zeros(n, m);
        let mut c = DMatrix::zeros(p, n);
        for (k, &(i, j, pole, r)) in poles.iter().enumerate() {
            a[(k, k)] = pole;
            b[(k, j)] = 1.0;
            c[(i, k)] = r;
        }
        StateSpaceModel::new(a, b, c, d)
    }

    pub fn states(&self) -> usize {
        self.a.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.c.nrows()
    }

    pub fn is_square(&self) -> bool {
        self.inputs() == self.outputs()
    }

    /// Eigenvalues of A.
    pub fn poles(&self) -> Vec<Complex64> {
        if self.states() == 0 {
            return Vec::new();
        }
        self.a.complex_eigenvalues().iter().copied().collect()
    }

    /// The system c·G, realized by scaling C and D.
    pub fn scaled(&self, factor: f64) -> Self {
        StateSpaceModel {
            a: self.a.clone(),
            b: self.b.clone(),
            c: &self.c * factor,
            d: &self.d * factor,
        }
    }
}

fn rows_to_matrix(rows: &[&[f64]], cols_if_empty: Option<usize>) -> Result<DMatrix<f64>, LtiError> {
    if rows.is_empty() {
        return Ok(DMatrix::zeros(0, cols_if_empty.unwrap_or(0)));
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(LtiError::Dimension("ragged rows".into()));
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    b: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    c: Vec<Vec<f64>>,
    #[serde(rename = "D")]
    d: Vec<Vec<f64>>,
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

impl Serialize for StateSpaceModel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ModelJson {
            a: matrix_rows(&self.a),
            b: matrix_rows(&self.b),
            c: matrix_rows(&self.c),
            d: matrix_rows(&self.d),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StateSpaceModel {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let j = ModelJson::deserialize(de)?;
        fn refs(v: &[Vec<f64>]) -> Vec<&[f64]> {
            v.iter().map(Vec::as_slice).collect()
        }
        StateSpaceModel::from_rows(&refs(&j.a), &refs(&j.b), &refs(&j.c), &refs(&j.d)).map_err(serde::de::Error::custom)
    }
}

/// G(jω); ω = ∞ gives D.
pub fn freq_response(sys: &StateSpaceModel, omega: f64) -> Result<CMatrix, LtiError> {
    let d = complexify(&sys.d);
    if omega.is_infinite() || sys.states() == 0 {
        return Ok(d);
    }
    let n = sys.states();
    let jw = Complex64::new(0.0, omega);
    if sys.poles().iter().any(|&l| (l - jw).norm() < POLE_TOL) {
        return Err(LtiError::ImaginaryAxisPole(omega));
    }
    let m = matrix::identity(n) * jw - complexify(&sys.a);
    let x = m
        .lu()
        .solve(&complexify(&sys.b))
        .ok_or(LtiError::ImaginaryAxisPole(omega))?;
    Ok(complexify(&sys.c) * x + d)
}

/// Hurwitz test on the realization's A.
pub fn is_stable(sys: &StateSpaceModel) -> bool {
    sys.poles().iter().all(|l| l.re < -STABILITY_TOL)
}

/// n log-spaced points from wmin to wmax, endpoints exact.
pub fn log_grid(wmin: f64, wmax: f64, n: usize) -> Result<Vec<f64>, LtiError> {
    if !(wmin > 0.0 && wmax > wmin && wmax.is_finite()) || n < 2 {
        return Err(LtiError::Grid(format!("need 0 < wmin < wmax and n >= 2, got ({wmin}, {wmax}, {n})")));
    }
    let (l0, l1) = (wmin.log10(), wmax.log10());
    let mut g: Vec<f64> = (0..n)
        .map(|i| 10f64.powf(l0 + (l1 - l0) * i as f64 / (n - 1) as f64))
        .collect();
    g[0] = wmin;
    g[n - 1] = wmax;
    Ok(g)
}

/// ‖G‖∞ to relative accuracy `tol`: dense log grid bracketing the poles,
/// then golden-section refinement around the three largest grid peaks.
pub fn hinf_norm(sys: &StateSpaceModel, tol: f64) -> Result<f64, LtiError> {
    if !is_stable(sys) {
        return Err(LtiError::Unstable);
    }
    let sig = |w: f64| freq_response(sys, w).map(|g| matrix::sigma_max(&g));
    let mut best = sig(0.0)?.max(sig(f64::INFINITY)?);
    let poles = sys.poles();
    if poles.is_empty() {
        return Ok(best);
    }
    let mags: Vec<f64> = poles.iter().map(|l| l.norm()).filter(|&m| m > 0.0).collect();
    let lo = mags.iter().cloned().fold(f64::INFINITY, f64::min) * 1e-3;
    let hi = mags.iter().cloned().fold(0.0, f64::max) * 1e3;
    let points = ((hi / lo).log10() * 100.0).ceil().max(200.0) as usize;
    let mut grid = log_grid(lo, hi, points)?;
    grid.extend(poles.iter().map(|l| l.im.abs()).filter(|&w| w > 0.0));
    grid.sort_by(f64::total_cmp);
    let vals = grid.iter().map(|&w| sig(w)).collect::<Result<Vec<_>, _>>()?;
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]));
    for &i in order.iter().take(3) {
        best = best.max(vals[i]);
        let a = grid[i.saturating_sub(1)].ln();
        let b = grid[(i + 1).min(grid.len() - 1)].ln();
        if b > a {
            let iters = ((b - a) / tol.max(1e-12)).log(1.618).ceil().clamp(10.0, 200.0) as usize;
            let (_, v) = golden_max(|t| sig(t.exp()).unwrap_or(0.0), a, b, iters);
            best = best.max(v);
        }
    }
    Ok(best)
}

/// Cascade: `first` followed by `second`.
pub fn series(first: &StateSpaceModel, second: &StateSpaceModel) -> Result<StateSpaceModel, LtiError> {
    if first.outputs() != second.inputs() {
        return Err(LtiError::Dimension("series: output/input mismatch".into()));
    }
    let (n1, n2) = (first.states(), second.states());
    let mut a = DMatrix::zeros(n1 + n2, n1 + n2);
    a.view_mut((0, 0), (n1, n1)).copy_from(&first.a);
    a.view_mut((n1, 0), (n2, n1)).copy_from(&(&second.b * &first.c));
    a.view_mut((n1, n1), (n2, n2)).copy_from(&second.a);
    let mut b = DMatrix::zeros(n1 + n2, first.inputs());
    b.view_mut((0, 0), (n1, first.inputs())).copy_from(&first.b);
    b.view_mut((n1, 0), (n2, first.inputs())).copy_from(&(&second.b * &first.d));
    let mut c = DMatrix::zeros(second.outputs(), n1 + n2);
    c.view_mut((0, 0), (second.outputs(), n1)).copy_from(&(&second.d * &first.c));
    c.view_mut((0, n1), (second.outputs(), n2)).copy_from(&second.c);
    StateSpaceModel::new(a, b, c, &second.d * &first.d)
}

/// (I + L)⁻¹ for a square L, i.e. unity negative feedback around L.
fn sensitivity(l: &StateSpaceModel) -> Result<StateSpaceModel, LtiError> {
    let m = l.outputs();
    let e = (DMatrix::identity(m, m) + &l.d).try_inverse().ok_or(LtiError::IllPosed)?;
    StateSpaceModel::new(&l.a - &l.b * &e * &l.c, &l.b * &e, -(&e * &l.c), e)
}

/// Realization of G # H = [[S, SH], [GS, GSH]], S = (I + GH)⁻¹.
///
/// Built as [I; G]·S·[I, H], which carries extra copies of G and H; for
/// stable G and H its A-matrix is Hurwitz exactly when the loop is
/// internally stable.
pub fn gang_of_four(g: &StateSpaceModel, h: &StateSpaceModel) -> Result<StateSpaceModel, LtiError> {
    let m = g.outputs();
    if !g.is_square() || !h.is_square() || h.inputs() != m {
        return Err(LtiError::Dimension("gang of four needs square systems of equal size".into()));
    }
    let s = sensitivity(&series(h, g)?)?;
    let nh = h.states();
    let nw = StateSpaceModel::new(
        h.a.clone(),
        {
            let mut b = DMatrix::zeros(nh, 2 * m);
            b.view_mut((0, m), (nh, m)).copy_from(&h.b);
            b
        },
        h.c.clone(),
        {
            let mut d = DMatrix::zeros(m, 2 * m);
            d.view_mut((0, 0), (m, m)).copy_from(&DMatrix::identity(m, m));
            d.view_mut((0, m), (m, m)).copy_from(&h.d);
            d
        },
    )?;
    let ng = g.states();
    let out = StateSpaceModel::new(
        g.a.clone(),
        g.b.clone(),
        {
            let mut c = DMatrix::zeros(2 * m, ng);
            c.view_mut((m, 0), (m, ng)).copy_from(&g.c);
            c
        },
        {
            let mut d = DMatrix::zeros(2 * m, m);
            d.view_mut((0, 0), (m, m)).copy_from(&DMatrix::identity(m, m));
            d.view_mut((m, 0), (m, m)).copy_from(&g.d);
            d
        },
    )?;
    series(&series(&nw, &s)?, &out)
}

/// One segment of piecewise-constant bounds, valid for ω ≤ w_max.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSegment {
    pub w_max: f64,
    pub spec: SectorSpec,
}

/// Piecewise-constant γ(ω), α(ω), β(ω) over [0, ∞].
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyBounds {
    segments: Vec<BoundSegment>,
}

impl FrequencyBounds {
    /// Segments must have strictly increasing `w_max`; the last one should
    /// extend to infinity to cover ω = ∞.
    pub fn new(segments: Vec<BoundSegment>) -> Result<Self, LtiError> {
        if segments.is_empty() {
            return Err(LtiError::Bounds("no segments".into()));
        }
        if segments.windows(2).any(|w| !(w[1].w_max > w[0].w_max)) {
            return Err(LtiError::Bounds("w_max must increase strictly".into()));
        }
        for s in &segments {
            SectorSpec::new(s.spec.gamma, s.spec.alpha, s.spec.beta).map_err(|e| LtiError::Bounds(e.to_string()))?;
            if !(s.w_max > 0.0) {
                return Err(LtiError::Bounds("w_max must be positive".into()));
            }
        }
        Ok(FrequencyBounds { segments })
    }

    pub fn constant(spec: SectorSpec) -> Self {
        FrequencyBounds {
            segments: vec![BoundSegment {
                w_max: f64::INFINITY,
                spec,
            }],
        }
    }

    pub fn segments(&self) -> &[BoundSegment] {
        &self.segments
    }

    /// Bounds at ω; ω = ∞ always uses the last segment.
    pub fn at(&self, omega: f64) -> Result<SectorSpec, LtiError> {
        if omega.is_infinite() {
            return Ok(self.segments[self.segments.len() - 1].spec);
        }
        self.segments
            .iter()
            .find(|s| omega <= s.w_max)
            .map(|s| s.spec)
            .ok_or_else(|| LtiError::Bounds(format!("no segment covers omega = {omega}")))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WMax {
    Num(f64),
    Text(String),
}

#[derive(Serialize, Deserialize)]
struct SegmentJson {
    w_max: WMax,
    gamma: f64,
    alpha: f64,
    beta: f64,
}

impl Serialize for FrequencyBounds {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<SegmentJson> = self
            .segments
            .iter()
            .map(|g| SegmentJson {
                w_max: if g.w_max.is_infinite() { WMax::Text("inf".into()) } else { WMax::Num(g.w_max) },
                gamma: g.spec.gamma,
                alpha: g.spec.alpha,
                beta: g.spec.beta,
            })
            .collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FrequencyBounds {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = Vec::<SegmentJson>::deserialize(de)?;
        let segments = raw
            .into_iter()
            .map(|s| {
                let w_max = match s.w_max {
                    WMax::Num(x) => x,
                    WMax::Text(t) if t.eq_ignore_ascii_case("inf") => f64::INFINITY,
                    WMax::Text(t) => return Err(D::Error::custom(format!("bad w_max {t:?}"))),
                };
                Ok(BoundSegment {
                    w_max,
                    spec: SectorSpec {
                        gamma: s.gamma,
                        alpha: s.alpha,
                        beta: s.beta,
                    },
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        FrequencyBounds::new(segments).map_err(D::Error::custom)
    }
}

/// T₁..T₄ at one frequency response value; T₄ is omitted at width π.
pub fn theorem4_terms(g: &CMatrix, spec: &SectorSpec) -> Vec<CMatrix> {
    let m = g.nrows();
    let (p, q) = (spec.half_width(), spec.center());
    let two_h = |t: f64| matrix::hermitian_part(&(g * cis(t))) * Complex64::new(2.0, 0.0);
    let mut terms = vec![
        matrix::identity(m) - g.adjoint() * g * Complex64::new(spec.gamma * spec.gamma, 0.0),
        two_h(-(FRAC_PI_2 - p - q)),
        two_h(FRAC_PI_2 + q - p),
    ];
    if (FRAC_PI_2 - p).abs() > 1e-12 {
        let c = spec.gamma / p.cos().powi(2);
        terms.push(matrix::hermitian_part(&(g * cis(q))) * Complex64::new(c, 0.0) + matrix::identity(m));
    }
    terms
}

/// Result at one frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub omega: f64,
    /// k₁..k₄; zero-padded when T₄ is dropped.
    pub k: [f64; 4],
    /// Certificate margin, or the best margin found when not certified.
    pub margin: f64,
    pub certified: bool,
    /// ω = 0 or ω = ∞ evaluation outside the log grid.
    pub sentinel: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub points: Vec<SweepPoint>,
    /// True iff every point (sentinels included) certifies.
    pub certified: bool,
}

impl SweepReport {
    pub fn grid_points(&self) -> impl Iterator<Item = &SweepPoint> {
        self.points.iter().filter(|p| !p.sentinel)
    }

    pub fn failures(&self) -> Vec<&SweepPoint> {
        self.points.iter().filter(|p| !p.certified).collect()
    }

    pub fn min_margin(&self) -> f64 {
        self.points.iter().map(|p| p.margin).fold(f64::INFINITY, f64::min)
    }
}

/// Frequency-wise multiplier search over `grid`, plus ω = 0 and ω = ∞ when
/// `sentinels` is set. Points are solved in parallel and reported in order.
pub fn sweep_theorem4(
    g: &StateSpaceModel,
    bounds: &FrequencyBounds,
    grid: &[f64],
    sentinels: bool,
    opts: &SolveOptions,
) -> Result<SweepReport, LtiError> {
    if !is_stable(g) {
        return Err(LtiError::Unstable);
    }
    if grid.is_empty() {
        return Err(LtiError::Grid("empty grid".into()));
    }
    if !g.is_square() {
        return Err(LtiError::Dimension("sweep needs a square system".into()));
    }
    let mut omegas: Vec<(f64, bool)> = Vec::with_capacity(grid.len() + 2);
    if sentinels {
        omegas.push((0.0, true));
    }
    omegas.extend(grid.iter().map(|&w| (w, false)));
    if sentinels {
        omegas.push((f64::INFINITY, true));
    }
    let points = omegas
        .par_iter()
        .map(|&(w, sentinel)| {
            let gw = freq_response(g, w)?;
            let spec = bounds.at(w)?;
            let terms = theorem4_terms(&gw, &spec);
            let out = lmi::solve(&multiplier_problem(&terms), opts)?;
            let mut k = [0.0; 4];
            let (scalars, margin, certified) = match &out {
                SolveOutcome::Feasible(c) => (&c.scalars, c.margin, true),
                SolveOutcome::NotCertified(n) => (&n.best.scalars, n.best_margin, false),
            };
            k[..scalars.len()].copy_from_slice(scalars);
            Ok(SweepPoint {
                omega: w,
                k,
                margin,
                certified,
                sentinel,
            })
        })
        .collect::<Result<Vec<_>, LtiError>>()?;
    let certified = points.iter().all(|p| p.certified);
    Ok(SweepReport { points, certified })
}

/// Phases of G(jω) at one frequency, or why they are undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub omega: f64,
    pub phases: Result<PhaseInfo, String>,
}

/// Phase response over a grid; points without defined phases are recorded.
pub fn phase_response(g: &StateSpaceModel, grid: &[f64]) -> Result<Vec<PhasePoint>, LtiError> {
    if !is_stable(g) {
        return Err(LtiError::Unstable);
    }
    grid.iter()
        .map(|&w| {
            let gw = freq_response(g, w)?;
            Ok(PhasePoint {
                omega: w,
                phases: gainphase::matrix_phases(&gw, gainphase::MEMBER_TOL).map_err(|e| e.to_string()),
            })
        })
        .collect()
}

/// Random stable uncertainty Δ(s) = U·diag(δᵢ(s))·Uᵀ with real orthogonal U
/// and first-order sections δᵢ(s) = c(s + a)/(s + b), chosen so that
/// Δ(jω) ∈ S_γ(α) at every frequency. Not exhaustive; used to falsify.
pub fn sample_normal_delta(spec: &SectorSpec, m: usize, seed: u64) -> Result<StateSpaceModel, LtiError> {
    if !spec.is_symmetric() {
        return Err(LtiError::Bounds("sampled uncertainty needs a symmetric sector".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha = spec.beta.min(FRAC_PI_2 - 1e-6);
    // Phase of (jω + a)/(jω + b) peaks at arcsin(|b − a|/(b + a)).
    let rmin = (1.0 - alpha.sin()) / (1.0 + alpha.sin());
    let q = {
        let g = DMatrix::from_fn(m, m, |_, _| rng.random::<f64>() - 0.5);
        g.qr().q()
    };
    let mut a = DMatrix::zeros(m, m);
    let mut cc = DMatrix::zeros(m, m);
    let mut dd = DMatrix::zeros(m, m);
    for i in 0..m {
        let b = 10f64.powf(rng.random_range(-2.0..2.0));
        let r = rmin + (1.0 - rmin) * rng.random::<f64>();
        let za = if rng.random::<bool>() { b * r } else { b / r };
        // |δ| peaks at c·max(1, a/b).
        let c = spec.gamma * rng.random::<f64>() / (za / b).max(1.0);
        a[(i, i)] = -b;
        cc[(i, i)] = c * (za - b);
        dd[(i, i)] = c;
    }
    StateSpaceModel::new(a, q.transpose(), &q * cc, &q * dd * q.transpose())
}
