//! System-level consistency: state-space certificates, frequency sweeps and
//! sampled closed loops must tell the same story.

use std::f64::consts::FRAC_PI_3;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sectordisk::fixtures as fx;
use sectordisk::gainphase::SectorSpec;
use sectordisk::kyp::{self, KypOutcome, Theorem6Options};
use sectordisk::lmi::SolveOptions;
use sectordisk::ltisys::{self, FrequencyBounds, StateSpaceModel};
use sectordisk::matrix;

/// Random stable m×m system of order n with ‖G‖∞ roughly in [0.4, 2].
fn random_stable(seed: u64, n: usize, m: usize) -> StateSpaceModel {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = |rows: usize, cols: usize| DMatrix::from_fn(rows, cols, |_, _| r.random_range(-1.0..1.0));
    let a0 = gauss(n, n);
    let (b, c, d) = (gauss(n, m), gauss(m, n), gauss(m, m) * 0.3);
    let shift = a0.complex_eigenvalues().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let a = a0 - DMatrix::identity(n, n) * (shift + 0.5);
    let sys = StateSpaceModel::new(a, b, c, d).unwrap();
    let h = ltisys::hinf_norm(&sys, 1e-6).unwrap();
    let target = 0.4 + 1.6 * (seed % 7) as f64 / 6.0;
    sys.scaled(target / h)
}

#[test]
fn symmetric_certificates_carry_over_to_the_asymmetric_condition() {
    let (gamma, alpha) = (1.0, FRAC_PI_3);
    let spec = SectorSpec::symmetric(gamma, alpha).unwrap();
    let opts = SolveOptions::default();
    let mut certified = 0;
    for seed in 0..20 {
        let sys = random_stable(seed, 1 + (seed as usize % 3), 1 + (seed as usize % 2));
        let p5 = kyp::assemble_theorem5(&sys, gamma, alpha).unwrap();
        let KypOutcome::Certified(c5) = kyp::solve_kyp(&p5, &opts).unwrap() else { continue };
        certified += 1;
        // W = P + jεI with k permuted and M₄ rescaled.
        let p = c5.storage[0].map(|z| z.re);
        let n = sys.states();
        let jblock = kyp::storage_block(&sys, &matrix::identity(n).map(|z| z * Complex64::i())).unwrap();
        let eps = 0.1 * c5.margin / (1.0 + jblock.norm());
        let k6 = kyp::theorem5_frequency_weights(&c5.k, gamma, alpha);
        let v = kyp::verify_theorem6(&sys, &spec, &Theorem6Options::default(), &p, &DMatrix::identity(n, n).scale(eps), &k6).unwrap();
        assert!(v.holds(), "seed {seed}: {v:?}");
        // The solver must then also succeed on the asymmetric condition.
        let p6 = kyp::assemble_theorem6(&sys, &spec, &Theorem6Options::default()).unwrap();
        assert!(kyp::solve_kyp(&p6, &opts).unwrap().is_certified(), "seed {seed}");
    }
    assert!(certified >= 5, "only {certified} of 20 systems certified");
}

#[test]
fn state_space_certificates_hold_at_every_frequency() {
    let (gamma, alpha) = (1.0, FRAC_PI_3);
    let spec = SectorSpec::symmetric(gamma, alpha).unwrap();
    let grid = ltisys::log_grid(1e-3, 1e3, 120).unwrap();
    for seed in 0..20 {
        let sys = random_stable(100 + seed, 2, 2);
        let prob = kyp::assemble_theorem5(&sys, gamma, alpha).unwrap();
        let KypOutcome::Certified(cert) = kyp::solve_kyp(&prob, &SolveOptions::default()).unwrap() else { continue };
        assert!(kyp::verify_certificate(&prob, &cert).unwrap().is_certificate());
        let w = kyp::theorem5_frequency_weights(&cert.k, gamma, alpha);
        let margins = kyp::frequency_margins(&sys, &spec, &w, &grid).unwrap();
        assert!(margins.iter().all(|&m| m > 0.0), "seed {seed}");
        let sweep = ltisys::sweep_theorem4(&sys, &FrequencyBounds::constant(spec), &grid, true, &SolveOptions::default()).unwrap();
        assert!(sweep.certified, "seed {seed}: {:?}", sweep.failures());
    }
}

#[test]
fn certified_loops_are_stable_for_sampled_uncertainty() {
    let cases = [
        (fx::example5_system(), SectorSpec::symmetric(fx::EXAMPLE5_GAMMA, fx::EXAMPLE5_ALPHA).unwrap()),
        (fx::example6_system(), SectorSpec::symmetric(fx::EXAMPLE6_GAMMA, fx::EXAMPLE6_ALPHA).unwrap()),
    ];
    for (g, spec) in cases {
        let p = kyp::assemble_theorem5(&g, spec.gamma, spec.beta).unwrap();
        assert!(kyp::solve_kyp(&p, &SolveOptions::default()).unwrap().is_certified());
        for seed in 0..100 {
            let delta = ltisys::sample_normal_delta(&spec, g.inputs(), seed).unwrap();
            let loop_ = ltisys::gang_of_four(&g, &delta).unwrap();
            assert!(ltisys::is_stable(&loop_), "seed {seed}");
        }
    }
}

#[test]
fn sampled_uncertainty_respects_its_bounds() {
    let spec = SectorSpec::symmetric(1.5, 1.1).unwrap();
    let grid = ltisys::log_grid(1e-3, 1e3, 60).unwrap();
    for seed in 0..20 {
        let delta = ltisys::sample_normal_delta(&spec, 2, seed).unwrap();
        assert!(ltisys::is_stable(&delta));
        for &w in &grid {
            let d = ltisys::freq_response(&delta, w).unwrap();
            assert!(sectordisk::gainphase::in_sectored_disk(&d, &spec, 1e-8).unwrap(), "seed {seed}, w {w}");
        }
    }
}

#[test]
fn hinf_norm_scales_linearly() {
    let g = fx::example6_system();
    let h = ltisys::hinf_norm(&g, 1e-6).unwrap();
    for c in [0.1, 0.5, 3.0, 20.0] {
        let hc = ltisys::hinf_norm(&g.scaled(c), 1e-6).unwrap();
        assert!((hc - c * h).abs() <= 1e-4 * c * h, "{hc} vs {}", c * h);
    }
    // The norm dominates the gain at any sampled frequency.
    for w in ltisys::log_grid(1e-2, 1e2, 50).unwrap() {
        assert!(matrix::sigma_max(&ltisys::freq_response(&g, w).unwrap()) <= h * (1.0 + 1e-6));
    }
}

#[test]
fn sweep_example_certifies_on_a_doubled_grid() {
    let (lo, hi, n) = fx::EXAMPLE3_GRID;
    let grid = ltisys::log_grid(lo, hi, 2 * n).unwrap();
    let rep = ltisys::sweep_theorem4(&fx::example3_plant(), &fx::example3_bounds(), &grid, true, &SolveOptions::default()).unwrap();
    assert_eq!(rep.points.len(), 2 * n + 2);
    assert!(rep.certified, "{:?}", rep.failures());
}

#[test]
fn sweep_rejects_unstable_plants() {
    let g = fx::example7_system();
    assert!(!ltisys::is_stable(&g));
    let spec = fx::example7_spec();
    let grid = ltisys::log_grid(1e-2, 1e2, 10).unwrap();
    assert!(ltisys::sweep_theorem4(&g, &FrequencyBounds::constant(spec), &grid, false, &SolveOptions::default()).is_err());
}
