//! Matrix-level sectored-disk tests against each other and against
//! brute-force falsification.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sectordisk::gainphase::{self, SectorSpec};
use sectordisk::lmi::SolveOptions;
use sectordisk::matrix::{self, cis, random, CMatrix};
use sectordisk::sectored::{self, SectoredError};

fn scaled(a: CMatrix, s: f64) -> CMatrix {
    a * Complex64::new(s, 0.0)
}

/// Random A with σ̄(A) = s.
fn random_with_norm(seed: u64, n: usize, s: f64) -> CMatrix {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let a = random::gaussian(&mut r, n, n);
    let norm = matrix::sigma_max(&a);
    scaled(a, s / norm)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sampled_members_are_members(seed in any::<u64>(), n in 1usize..5, gamma in 0.1f64..10.0, width in 0.05..PI, center in -PI..PI) {
        let spec = SectorSpec::new(gamma, center - width / 2.0, center + width / 2.0).unwrap();
        let b = gainphase::sample_sectored_disk(&spec, n, seed);
        prop_assert!(gainphase::in_sectored_disk(&b, &spec, 1e-8).unwrap());
    }

    #[test]
    fn rotation_reduces_to_symmetric_sector(seed in any::<u64>(), n in 2usize..4, s in 0.3f64..2.5, p in 0.1..FRAC_PI_2 - 0.1, q in -1.5f64..1.5) {
        let a = random_with_norm(seed, n, s);
        let spec = SectorSpec::new(1.0, q - p, q + p).unwrap();
        let sym = SectorSpec::symmetric(1.0, p).unwrap();
        let opts = SolveOptions::default();
        let r1 = sectored::sufficient_test(&a, &spec, &opts).unwrap();
        let r2 = sectored::sufficient_test(&(&a * cis(q)), &sym, &opts).unwrap();
        prop_assert_eq!(r1.verdict, r2.verdict);
        // The two term lists are identical, so the margins agree.
        let t1 = sectored::sufficient_terms(&a, &spec);
        let t2 = sectored::sufficient_terms(&(&a * cis(q)), &sym);
        for (x, y) in t1.iter().zip(&t2) {
            prop_assert!((x - y).norm() <= 1e-10 * (1.0 + x.norm()));
        }
    }

    #[test]
    fn verdicts_are_unitarily_invariant(seed in any::<u64>(), n in 2usize..4, s in 0.3f64..2.5, alpha in 0.1..FRAC_PI_2 - 0.1) {
        let a = random_with_norm(seed, n, s);
        let mut r = ChaCha8Rng::seed_from_u64(seed ^ 0x55);
        let u = random::unitary(&mut r, n);
        let b = u.adjoint() * &a * &u;
        let spec = SectorSpec::symmetric(1.0, alpha).unwrap();
        let opts = SolveOptions::default();
        let ra = sectored::sufficient_test(&a, &spec, &opts).unwrap();
        let rb = sectored::sufficient_test(&b, &spec, &opts).unwrap();
        prop_assert_eq!(ra.verdict, rb.verdict);
        // Any certificate for A certifies U*AU with the same margin.
        if let Some(c) = &ra.certificate {
            let m = sectored::combination_margin(&sectored::sufficient_terms(&b, &spec), &c.scalars);
            prop_assert!((m - c.margin).abs() <= 1e-8 * (1.0 + c.margin.abs()));
        }
    }

    #[test]
    fn certificate_chain(seed in any::<u64>(), n in 2usize..5, s in 0.3f64..2.5, alpha in 0.05..FRAC_PI_2 - 0.05) {
        let a = random_with_norm(seed, n, s);
        let spec = SectorSpec::symmetric(1.0, alpha).unwrap();
        let opts = SolveOptions::default();
        let sp = sectored::s_procedure_test(&a, &spec, &opts).unwrap();
        let su = sectored::sufficient_test(&a, &spec, &opts).unwrap();
        let ne = sectored::necessary_test(&a, &spec, &opts).unwrap();
        prop_assert!(!sp.certified() || su.certified());
        prop_assert!(!su.certified() || ne.certified());
        // Small gain is the k₁-only special case.
        if sectored::small_gain(&a, spec.gamma) {
            prop_assert!(sp.certified());
        }
    }

    #[test]
    fn certified_instances_survive_falsification(seed in any::<u64>(), n in 1usize..4, s in 0.5f64..2.0, alpha in 0.1..FRAC_PI_2 - 0.1) {
        let a = random_with_norm(seed, n, s);
        let spec = SectorSpec::symmetric(1.0, alpha).unwrap();
        let rep = sectored::sufficient_test(&a, &spec, &SolveOptions::default()).unwrap();
        prop_assume!(rep.certified());
        let v = sectored::brute_force_violation(&a, &spec, 2_000, seed);
        prop_assert!(v.min_abs_det > 1e-9);
    }

    #[test]
    fn necessary_failures_are_falsified_by_scalar_members(seed in any::<u64>(), s in 1.1f64..3.0, alpha in 0.1..FRAC_PI_2 - 0.1) {
        // For scalars the necessary condition is exact.
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let a = CMatrix::from_element(1, 1, Complex64::from_polar(s, r.random_range(-PI..PI)));
        let spec = SectorSpec::symmetric(1.0, alpha).unwrap();
        let ok = gainphase::scalar_sectored_disk_ok(a[(0, 0)], &spec);
        let nec = sectored::necessary_test(&a, &spec, &SolveOptions::default()).unwrap();
        if !nec.certified() {
            prop_assert!(!ok);
        }
    }
}

#[test]
fn feasibility_ladder_is_monotone_in_gamma() {
    let a = random_with_norm(4, 3, 1.3);
    let opts = SolveOptions::default();
    let verdicts: Vec<bool> = (1..=30)
        .map(|i| {
            let spec = SectorSpec::symmetric(0.1 * i as f64, 1.0).unwrap();
            sectored::sufficient_test(&a, &spec, &opts).unwrap().certified()
        })
        .collect();
    let first_fail = verdicts.iter().position(|v| !v).unwrap_or(verdicts.len());
    assert!(first_fail > 0, "small gamma must certify");
    assert!(verdicts[first_fail..].iter().all(|v| !v), "{verdicts:?}");
}

#[test]
fn mu_bounds_scale_and_are_ordered() {
    let opts = SolveOptions::default();
    for seed in 0..6 {
        let a = random_with_norm(seed, 3, 1.0);
        let hat = sectored::mu_hat(&a, 1.0, 1e-5, &opts).unwrap();
        let tilde = sectored::mu_tilde(&a, 1.0, 1e-5, &opts).unwrap();
        assert!(tilde.mu <= hat.mu * (1.0 + 1e-4), "{} > {}", tilde.mu, hat.mu);
        let hat2 = sectored::mu_hat(&scaled(a.clone(), 2.0), 1.0, 1e-5, &opts).unwrap();
        assert!((hat2.mu / hat.mu - 2.0).abs() < 1e-3, "{} vs {}", hat2.mu, hat.mu);
        // μ̂ never exceeds the gain bound σ̄(A), which small gain certifies.
        assert!(hat.mu <= matrix::sigma_max(&a) * (1.0 + 1e-3));
    }
}

#[test]
fn mu_hat_trace_brackets_the_threshold() {
    let a = random_with_norm(9, 3, 1.0);
    let m = sectored::mu_hat(&a, 0.8, 1e-4, &SolveOptions::default()).unwrap();
    assert!(!m.unbounded);
    let feasible: Vec<f64> = m.trace.iter().filter(|t| t.1).map(|t| t.0).collect();
    let infeasible: Vec<f64> = m.trace.iter().filter(|t| !t.1).map(|t| t.0).collect();
    let lo = feasible.iter().cloned().fold(0.0, f64::max);
    let hi = infeasible.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(lo <= m.gamma_star && m.gamma_star <= hi && hi / lo < 1.0 + 1e-3);
}

#[test]
fn half_disk_width_routes_to_half_disk_test() {
    let a = random_with_norm(5, 3, 0.8);
    let spec = SectorSpec::symmetric(1.0, FRAC_PI_2).unwrap();
    let opts = SolveOptions::default();
    let direct = sectored::half_disk_test(&a, 1.0, &opts).unwrap();
    let routed = sectored::sufficient_test(&a, &spec, &opts).unwrap();
    assert_eq!(direct.verdict, routed.verdict);
}

#[test]
fn singular_matrix_is_rejected_by_necessary_test() {
    let a = CMatrix::zeros(2, 2);
    let spec = SectorSpec::symmetric(1.0, 1.0).unwrap();
    assert!(matches!(
        sectored::necessary_test(&a, &spec, &SolveOptions::default()),
        Err(SectoredError::Singular)
    ));
}

#[test]
fn gain_ball_oracle_finds_destabilizers() {
    for seed in 0..20 {
        let big = random_with_norm(seed, 3, 1.5);
        assert!(!sectored::small_gain(&big, 1.0));
        assert!(sectored::brute_force_gain_ball(&big, 1.0, 5_000, seed).min_abs_det < 1e-12);
        let small = random_with_norm(seed, 3, 0.7);
        assert!(sectored::small_gain(&small, 1.0));
        assert!(sectored::brute_force_gain_ball(&small, 1.0, 5_000, seed).min_abs_det > 1e-3);
    }
}
