//! Command implementations. Each returns whether the analysis certified
//! robustness; input problems surface as `CliError`.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use serde::Serialize;

use sectordisk::dwshell::{self, DwPoint, Plane};
use sectordisk::gainphase::{PhaseClass, SectorSpec};
use sectordisk::kyp::{self, KypOutcome, KypVerification, Theorem6Options};
use sectordisk::lmi::SolveOptions;
use sectordisk::ltisys::{self, FrequencyBounds, StateSpaceModel, SweepReport};
use sectordisk::matrix::{self, CMatrix, MatrixJson};
use sectordisk::repro::{self, ReproOptions};
use sectordisk::sectored::{self, MatrixTestReport, MuBound, SectoredError, SmallPhase};

use crate::args::{Common, Grid, Mode, SectorArgs};
use crate::output::{self, CliError};

/// Outcome of a successful run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Certified,
    NotCertified,
}

impl Status {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Certified
        } else {
            Status::NotCertified
        }
    }
}

/// Validated settings shared by every command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub solve: SolveOptions,
    pub seed: u64,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn new(common: &Common) -> Result<Self, CliError> {
        if !(common.tol > 0.0 && common.tol.is_finite()) {
            return Err(CliError::Input(format!("--tol must be positive, got {}", common.tol)));
        }
        if common.budget == 0 {
            return Err(CliError::Input("--budget must be at least 1".into()));
        }
        output::prepare_dir(&common.out)?;
        Ok(RunConfig {
            solve: SolveOptions::default().with_tol(common.tol).with_budget(common.budget),
            seed: common.seed,
            out: common.out.clone(),
        })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

fn sector(args: &SectorArgs) -> Result<SectorSpec, CliError> {
    let alpha = args
        .alpha
        .ok_or_else(|| CliError::Input("a sector needs --alpha (and optionally --beta)".into()))?;
    let spec = match args.beta {
        None => SectorSpec::symmetric(args.gamma, alpha),
        Some(beta) => SectorSpec::new(args.gamma, alpha, beta),
    };
    spec.map_err(|e| CliError::Input(e.to_string()))
}

fn read_matrix(path: &Path) -> Result<CMatrix, CliError> {
    let json: MatrixJson = output::read_json(path)?;
    let a = json.to_matrix().map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    matrix::ensure_square(&a).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(a)
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Serialize)]
struct Falsification {
    draws: usize,
    seed: u64,
    min_abs_det: f64,
}

#[derive(Serialize)]
struct MatrixReport {
    spec: SectorSpec,
    order: usize,
    sigma_max: f64,
    phase_class: PhaseClass,
    small_gain: bool,
    small_phase: SmallPhase,
    s_procedure: MatrixTestReport,
    sufficient: MatrixTestReport,
    /// Absent for singular A, where the test does not apply.
    necessary: Option<MatrixTestReport>,
    /// Present for sectors of width π.
    half_disk: Option<MatrixTestReport>,
    falsification: Option<Falsification>,
    certified_by: Vec<&'static str>,
    robust: bool,
}

pub fn analyze_matrix(path: &Path, sector_args: &SectorArgs, draws: usize, cfg: &RunConfig) -> Result<Status, CliError> {
    let a = read_matrix(path)?;
    let spec = sector(sector_args)?;
    let opts = &cfg.solve;
    let necessary = match sectored::necessary_test(&a, &spec, opts) {
        Ok(r) => Some(r),
        Err(SectoredError::Singular) => None,
        Err(e) => return Err(input(e)),
    };
    let half_disk = if (spec.half_width() - FRAC_PI_2).abs() <= 1e-12 {
        Some(sectored::half_disk_test(&(&a * matrix::cis(spec.center())), spec.gamma, opts).map_err(input)?)
    } else {
        None
    };
    let mut report = MatrixReport {
        spec,
        order: a.nrows(),
        sigma_max: matrix::sigma_max(&a),
        phase_class: sectored::phase_class(&a).map_err(input)?,
        small_gain: sectored::small_gain(&a, spec.gamma),
        small_phase: sectored::small_phase(&a, &spec).map_err(input)?,
        s_procedure: sectored::s_procedure_test(&a, &spec, opts).map_err(input)?,
        sufficient: sectored::sufficient_test(&a, &spec, opts).map_err(input)?,
        necessary,
        half_disk,
        falsification: (draws > 0).then(|| Falsification {
            draws,
            seed: cfg.seed,
            min_abs_det: sectored::brute_force_violation(&a, &spec, draws, cfg.seed).min_abs_det,
        }),
        certified_by: Vec::new(),
        robust: false,
    };
    let methods = [
        ("small_gain", report.small_gain),
        ("small_phase", report.small_phase == SmallPhase::Holds),
        ("s_procedure", report.s_procedure.certified()),
        ("sufficient", report.sufficient.certified()),
        ("half_disk", report.half_disk.as_ref().is_some_and(MatrixTestReport::certified)),
    ];
    report.certified_by = methods.iter().filter(|m| m.1).map(|m| m.0).collect();
    report.robust = !report.certified_by.is_empty();
    output::write_json(&cfg.path("matrix_report.json"), &report)?;

    println!("sector: gamma = {}, phases [{}, {}]", spec.gamma, spec.alpha, spec.beta);
    println!("sigma_max(A) = {:.6}, class {:?}", report.sigma_max, report.phase_class);
    println!("small gain: {}, small phase: {:?}", report.small_gain, report.small_phase);
    for (name, r) in [("s-procedure", &report.s_procedure), ("sufficient", &report.sufficient)] {
        println!("{name}: {:?} (margin {:.3e})", r.verdict, r.margin);
    }
    match &report.necessary {
        Some(r) => println!("necessary: {:?} (margin {:.3e})", r.verdict, r.margin),
        None => println!("necessary: not applicable (A is singular)"),
    }
    if let Some(f) = &report.falsification {
        println!("falsification: min |det(I + AB)| = {:.3e} over {} draws", f.min_abs_det, f.draws);
    }
    println!("verdict: {}", if report.robust { "robustly stable" } else { "not certified" });
    Ok(Status::from_bool(report.robust))
}

#[derive(Serialize)]
struct MuReport {
    alpha: f64,
    mu_hat: MuBound,
    mu_tilde: MuBound,
}

pub fn mu(path: &Path, alpha: f64, rel_tol: f64, cfg: &RunConfig) -> Result<Status, CliError> {
    if rel_tol.is_nan() || rel_tol <= 0.0 {
        return Err(CliError::Input(format!("--rel-tol must be positive, got {rel_tol}")));
    }
    let a = read_matrix(path)?;
    let hat = sectored::mu_hat(&a, alpha, rel_tol, &cfg.solve).map_err(input)?;
    let tilde = sectored::mu_tilde(&a, alpha, rel_tol, &cfg.solve).map_err(input)?;
    let show = |name: &str, m: &MuBound| {
        if m.unbounded {
            println!("{name} = 0 (feasible up to the gamma cap)");
        } else {
            println!("{name} = {:.8} (gamma* = {:.8}, {} probes)", m.mu, m.gamma_star, m.trace.len());
        }
    };
    show("mu_hat", &hat);
    show("mu_tilde", &tilde);
    let report = MuReport { alpha, mu_hat: hat, mu_tilde: tilde };
    output::write_json(&cfg.path("mu.json"), &report)?;
    Ok(Status::Certified)
}

#[derive(Serialize)]
struct DwSummary {
    spec: SectorSpec,
    order: usize,
    draws: usize,
    seed: u64,
    superset_pass: usize,
    subset_pass: usize,
    projected: Option<String>,
}

/// XZ outline of 𝒫 ∩ H_γ ∩ K_k: the parabola z = x² up to x = γ, then back
/// along z = min(γ², kx).
fn bound_outline(gamma: f64, k: f64) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = (0..=64)
        .map(|i| {
            let x = gamma * i as f64 / 64.0;
            [x, x * x]
        })
        .collect();
    pts.push([gamma * gamma / k, gamma * gamma]);
    pts.push([0.0, 0.0]);
    pts
}

pub fn dwshell_cmd(
    matrix_path: Option<&Path>,
    negate_inverse: bool,
    sector_args: &SectorArgs,
    order: usize,
    draws: usize,
    dirs: usize,
    cfg: &RunConfig,
) -> Result<Status, CliError> {
    let spec = sector(sector_args)?;
    if !spec.is_symmetric() || spec.beta >= FRAC_PI_2 {
        return Err(CliError::Input("the DW bounds need a symmetric sector with alpha < pi/2 (omit --beta)".into()));
    }
    if order == 0 || draws == 0 {
        return Err(CliError::Input("--order and --draws must be positive".into()));
    }
    let shell = match matrix_path {
        Some(p) => {
            let a = read_matrix(p)?;
            let m = if negate_inverse {
                let inv = matrix::det_and_inverse(&a)
                    .map_err(input)?
                    .inverse
                    .ok_or_else(|| CliError::Input("A is singular; -A^-1 does not exist".into()))?;
                -inv
            } else {
                a
            };
            let label = if negate_inverse { "neg_inverse" } else { "matrix" };
            let xz = dwshell::dw_projection(&m, Plane::XZ, dirs).map_err(input)?;
            let xy = dwshell::dw_projection(&m, Plane::XY, dirs).map_err(input)?;
            Some((label, xz, xy))
        }
        None => None,
    };

    let cloud = dwshell::monte_carlo_union(&spec, order, draws, cfg.seed).map_err(input)?;
    let count = |f: fn(&DwPoint, &SectorSpec) -> Result<bool, dwshell::DwError>| -> Result<usize, CliError> {
        cloud.iter().try_fold(0, |n, p| Ok(n + f(p, &spec).map_err(input)? as usize))
    };
    let superset_pass = count(dwshell::superset_member)?;
    let subset_pass = count(dwshell::subset_member)?;
    let summary = DwSummary {
        spec,
        order,
        draws,
        seed: cfg.seed,
        superset_pass,
        subset_pass,
        projected: shell.as_ref().map(|s| s.0.to_string()),
    };
    output::write_json(&cfg.path("dw_summary.json"), &summary)?;
    println!("{draws} points: {superset_pass} in the outer bound, {subset_pass} in the inner bound");
    if superset_pass != cloud.len() {
        eprintln!("self-check failed: {} cloud points outside the outer bound; CSV files not written", cloud.len() - superset_pass);
        return Ok(Status::NotCertified);
    }

    output::write_csv(
        &cfg.path("dw_cloud.csv"),
        &["x", "y", "z"],
        cloud.iter().map(|p| [p.x, p.y, p.z].map(output::num).to_vec()),
    )?;
    let (g, a) = (spec.gamma, spec.beta);
    let row = |set: &str, plane: &str, p: [f64; 2]| vec![set.to_string(), plane.to_string(), output::num(p[0]), output::num(p[1])];
    let mut rows = Vec::new();
    for (set, k) in [("outer", g / a.cos().powi(2)), ("inner", g / a.cos())] {
        rows.extend(bound_outline(g, k).into_iter().map(|p| row(set, "xz", p)));
    }
    if let Some((label, xz, xy)) = &shell {
        rows.extend(xz.vertices.iter().map(|&p| row(label, "xz", p)));
        rows.extend(xy.vertices.iter().map(|&p| row(label, "xy", p)));
    }
    output::write_csv(&cfg.path("dw_proj.csv"), &["set", "plane", "u", "v"], rows.into_iter())?;
    Ok(Status::Certified)
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    grid: (f64, f64, usize),
    sentinels: bool,
    certified: bool,
    failures: usize,
    min_margin: f64,
    report: &'a SweepReport,
}

#[derive(Serialize)]
struct KypReport {
    mode: &'static str,
    spec: SectorSpec,
    convention: Option<Theorem6Options>,
    outcome: KypOutcome,
    /// Direct eigenvalue re-check of the certificate.
    verification: Option<KypVerification>,
}

fn real_part(m: &CMatrix) -> nalgebra::DMatrix<f64> {
    m.map(|z| z.re)
}

pub fn analyze_system(
    model: &Path,
    bounds_path: Option<&Path>,
    mode: Mode,
    sector_args: &SectorArgs,
    grid: Grid,
    sentinels: bool,
    cfg: &RunConfig,
) -> Result<Status, CliError> {
    let sys: StateSpaceModel = output::read_json(model)?;
    if !sys.is_square() {
        return Err(CliError::Input("the loop needs a square system (inputs = outputs)".into()));
    }
    if !ltisys::is_stable(&sys) {
        let worst = sys.poles().iter().map(|p| p.re).fold(f64::NEG_INFINITY, f64::max);
        return Err(CliError::Input(format!("G is not stable: largest pole real part {worst:.6}")));
    }
    let bounds = match bounds_path {
        Some(p) => output::read_json::<FrequencyBounds>(p)?,
        None => FrequencyBounds::constant(sector(sector_args)?),
    };
    match mode {
        Mode::Sweep => {
            let omegas = ltisys::log_grid(grid.wmin, grid.wmax, grid.n).map_err(input)?;
            let report = ltisys::sweep_theorem4(&sys, &bounds, &omegas, sentinels, &cfg.solve).map_err(input)?;
            output::write_csv(
                &cfg.path("sweep.csv"),
                &["omega", "certified", "margin", "k1", "k2", "k3", "k4"],
                report.grid_points().map(|p| {
                    let mut row = vec![output::num(p.omega), u8::from(p.certified).to_string(), output::num(p.margin)];
                    row.extend(p.k.map(output::num));
                    row
                }),
            )?;
            let failures = report.failures().len();
            let summary = SweepSummary {
                grid: (grid.wmin, grid.wmax, grid.n),
                sentinels,
                certified: report.certified,
                failures,
                min_margin: report.min_margin(),
                report: &report,
            };
            output::write_json(&cfg.path("sweep_report.json"), &summary)?;
            println!(
                "{} of {} frequencies certified, min margin {:.3e}",
                report.points.len() - failures,
                report.points.len(),
                report.min_margin()
            );
            if let (Some(f), Some(l)) = (report.failures().first(), report.failures().last()) {
                println!("failures between omega = {:.6} and {:.6}", f.omega, l.omega);
            }
            Ok(Status::from_bool(report.certified))
        }
        Mode::Kyp | Mode::KypGeneral => {
            let [segment] = bounds.segments() else {
                return Err(CliError::Input("state-space modes need constant bounds (one segment)".into()));
            };
            let spec = segment.spec;
            let (name, convention, problem) = if mode == Mode::Kyp {
                if !spec.is_symmetric() {
                    return Err(CliError::Input("--mode kyp needs a symmetric sector; use --mode kyp-general".into()));
                }
                ("kyp", None, kyp::assemble_theorem5(&sys, spec.gamma, spec.beta).map_err(input)?)
            } else {
                let o = Theorem6Options::default();
                ("kyp-general", Some(o), kyp::assemble_theorem6(&sys, &spec, &o).map_err(input)?)
            };
            let outcome = kyp::solve_kyp(&problem, &cfg.solve).map_err(input)?;
            let verification = match (&outcome, convention) {
                (KypOutcome::Certified(c), None) => {
                    Some(kyp::verify_theorem5(&sys, spec.gamma, spec.beta, &real_part(&c.storage[0]), &c.k).map_err(input)?)
                }
                (KypOutcome::Certified(c), Some(o)) => Some(
                    kyp::verify_theorem6(&sys, &spec, &o, &real_part(&c.storage[0]), &real_part(&c.storage[1]), &c.k)
                        .map_err(input)?,
                ),
                _ => None,
            };
            let certified = verification.is_some_and(|v| v.holds());
            match &outcome {
                KypOutcome::Certified(c) => println!("certified: k = {:?}, margin {:.3e}", c.k, c.joint_margin),
                KypOutcome::NotCertified { best_margin, iterations, .. } => {
                    println!("not certified after {iterations} iterations (best margin {best_margin:.3e})")
                }
            }
            let report = KypReport {
                mode: name,
                spec,
                convention,
                outcome,
                verification,
            };
            output::write_json(&cfg.path("kyp_certificate.json"), &report)?;
            Ok(Status::from_bool(certified))
        }
    }
}

pub fn repro_cmd(id: &str, rel_tol: f64, cfg: &RunConfig) -> Result<Status, CliError> {
    let ids: Vec<&str> = if id == "all" { repro::IDS.to_vec() } else { vec![id] };
    if rel_tol.is_nan() || rel_tol <= 0.0 {
        return Err(CliError::Input(format!("--rel-tol must be positive, got {rel_tol}")));
    }
    let opts = ReproOptions {
        solve: cfg.solve,
        mu_tol: rel_tol,
    };
    let mut all = true;
    for id in ids {
        let report = repro::run(id, &opts).map_err(input)?;
        print!("{}", report.table());
        output::write_json(&cfg.path(&format!("repro_{id}.json")), &report)?;
        all &= report.passed();
    }
    Ok(Status::from_bool(all))
}
