//! Command-line surface.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, FRAC_PI_8, PI};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sectordisk::lmi::{DEFAULT_BUDGET, DEFAULT_TOL};

/// Robust stability under simultaneous gain and phase (sectored-disk)
/// uncertainty.
///
/// Angles accept plain radians or expressions such as `pi/3`, `-pi/4`,
/// `2pi/3` and `60deg`. A sector is given by `--gamma` and `--alpha` alone
/// for the symmetric set [-alpha, alpha], or by `--alpha` and `--beta` for
/// the phase interval [alpha, beta].
///
/// Exit status: 0 robustly stable / success, 1 not certified, 2 input error.
/// SECTORDISK_THREADS caps the number of worker threads.
#[derive(Debug, Parser)]
#[command(name = "sectordisk", version, about, long_about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every matrix test of I + AB over the sectored-disk set.
    AnalyzeMatrix {
        /// Matrix JSON: {"rows", "cols", "re", "im"}.
        matrix: PathBuf,
        #[command(flatten)]
        sector: SectorArgs,
        /// Brute-force falsification draws (0 disables).
        #[arg(long, default_value_t = 0)]
        draws: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Upper bounds mu_hat and mu_tilde of the phase-sensitive structured singular value.
    Mu {
        /// Matrix JSON: {"rows", "cols", "re", "im"}.
        matrix: PathBuf,
        /// Phase half width in (0, pi/2].
        #[arg(long, value_parser = parse_angle)]
        alpha: f64,
        /// Relative width at which the bisection stops.
        #[arg(long, default_value_t = 1e-4)]
        rel_tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// DW-shell data: a Monte-Carlo cloud of the symmetric set and projected polygons.
    Dwshell {
        /// Optional matrix whose shell projections are added to dw_proj.csv.
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Project the shell of -A^-1 instead of A.
        #[arg(long, requires = "matrix")]
        negate_inverse: bool,
        #[command(flatten)]
        sector: SectorArgs,
        /// Order of the sampled members.
        #[arg(long, default_value_t = 3)]
        order: usize,
        /// Number of cloud points.
        #[arg(long, default_value_t = 100_000)]
        draws: usize,
        /// Support directions per projected polygon.
        #[arg(long, default_value_t = 256)]
        dirs: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Robust stability of the loop G # Delta for stable G.
    AnalyzeSystem {
        /// State-space JSON: {"A", "B", "C", "D"} as row lists.
        model: PathBuf,
        /// Piecewise bounds JSON: [{"w_max", "gamma", "alpha", "beta"}, ...].
        #[arg(long, conflicts_with_all = ["alpha", "beta"])]
        bounds: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Mode::Sweep)]
        mode: Mode,
        #[command(flatten)]
        sector: SectorArgs,
        /// Log-spaced grid wmin:wmax:n for the sweep.
        #[arg(long, value_parser = parse_grid, default_value = "0.01:100:200")]
        grid: Grid,
        /// Skip the extra checks at omega = 0 and omega = infinity.
        #[arg(long)]
        no_sentinels: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Reproduce a published example: ex1, ex2, ex3, ex5, ex6, ex7, remark or all.
    Repro {
        id: String,
        /// Relative width at which mu bisections stop.
        #[arg(long, default_value_t = 1e-4)]
        rel_tol: f64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Multiplier search at every grid frequency.
    Sweep,
    /// State-space LMI with constant multipliers, symmetric sector.
    Kyp,
    /// State-space LMI with constant multipliers, general sector.
    KypGeneral,
}

#[derive(Debug, Clone, Args)]
pub struct SectorArgs {
    /// Gain bound.
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Half width of a symmetric sector, or the lower phase when --beta is given.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Upper phase of an asymmetric sector.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true, requires = "alpha")]
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Solver success threshold, relative to the problem scale.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Cap on solver iterations.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
    /// Seed for every random draw.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub wmin: f64,
    pub wmax: f64,
    pub n: usize,
}

/// Parses `wmin:wmax:n`.
pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(format!("expected wmin:wmax:n, got {s:?}"));
    };
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    let (wmin, wmax) = (num(lo)?, num(hi)?);
    let n = n.trim().parse::<usize>().map_err(|e| format!("{n:?}: {e}"))?;
    if !(wmin > 0.0 && wmax > wmin && wmax.is_finite()) || n == 0 {
        return Err(format!("need 0 < wmin < wmax < inf and n >= 1, got {s:?}"));
    }
    Ok(Grid { wmin, wmax, n })
}

/// Parses radians, `pi`-expressions (`pi/3`, `-2pi/3`, `2*pi/3`) or degrees (`60deg`).
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let bad = || format!("cannot read angle {s:?}");
    if let Some(deg) = t.strip_suffix("deg") {
        return deg.trim().parse::<f64>().map(f64::to_radians).map_err(|_| bad());
    }
    let Some(at) = t.find("pi") else {
        return t.parse::<f64>().map_err(|_| bad());
    };
    let (head, tail) = (t[..at].trim_end_matches('*').trim(), t[at + 2..].trim());
    let factor = match head {
        "" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    let divisor = match tail {
        "" => 1.0,
        d => d.strip_prefix('/').ok_or_else(bad)?.trim().parse::<f64>().map_err(|_| bad())?,
    };
    // Correctly rounded values for the common fractions.
    let base = match divisor {
        2.0 => FRAC_PI_2,
        3.0 => FRAC_PI_3,
        4.0 => FRAC_PI_4,
        6.0 => FRAC_PI_6,
        8.0 => FRAC_PI_8,
        d => PI / d,
    };
    let v = factor * base;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi/3").unwrap(), FRAC_PI_3);
        assert_eq!(parse_angle("-pi/4").unwrap(), -FRAC_PI_4);
        assert_eq!(parse_angle("2pi/3").unwrap(), 2.0 * FRAC_PI_3);
        assert_eq!(parse_angle("2*pi/3").unwrap(), 2.0 * FRAC_PI_3);
        assert_eq!(parse_angle("pi/5").unwrap(), PI / 5.0);
        assert_eq!(parse_angle("PI").unwrap(), PI);
        assert_eq!(parse_angle("0.5").unwrap(), 0.5);
        assert!((parse_angle("60deg").unwrap() - FRAC_PI_3).abs() < 1e-15);
        for bad in ["", "pi/", "pie", "x", "pi/0", "3pi4"] {
            assert!(parse_angle(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.01:100:200").unwrap(), Grid { wmin: 0.01, wmax: 100.0, n: 200 });
        for bad in ["1:2", "0:1:5", "2:1:5", "1:2:0", "a:2:3", "1:inf:3"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn cli_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
