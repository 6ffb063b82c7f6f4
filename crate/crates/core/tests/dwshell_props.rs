//! Property tests of the DW shell: geometry, invariances and the
//! inner/outer bounds of the sectored-disk set.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sectordisk::dwshell::{self, DwPoint, Plane};
use sectordisk::gainphase::{self, SectorSpec};
use sectordisk::matrix::{self, random};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn points_lie_above_the_paraboloid(seed in any::<u64>(), n in 1usize..6) {
        let mut r = rng(seed);
        let a = random::gaussian(&mut r, n, n);
        for _ in 0..50 {
            let u = random::unit_vector(&mut r, n);
            let (p, normalized) = dwshell::dw_point(&a, &u).unwrap();
            prop_assert!(!normalized);
            prop_assert!(p.x * p.x + p.y * p.y <= p.z + 1e-10);
        }
    }

    #[test]
    fn support_is_unitarily_invariant(seed in any::<u64>(), n in 1usize..5) {
        let mut r = rng(seed);
        let a = random::gaussian(&mut r, n, n);
        let q = random::unitary(&mut r, n);
        let b = q.adjoint() * &a * &q;
        for _ in 0..8 {
            let dir = (r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
            let (ha, _) = dwshell::dw_support(&a, dir).unwrap();
            let (hb, _) = dwshell::dw_support(&b, dir).unwrap();
            prop_assert!((ha - hb).abs() <= 1e-9 * (1.0 + ha.abs()));
        }
    }

    #[test]
    fn support_bounds_every_point(seed in any::<u64>(), n in 1usize..5) {
        let mut r = rng(seed);
        let a = random::gaussian(&mut r, n, n);
        let dir = (r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
        let (h, u) = dwshell::dw_support(&a, dir).unwrap();
        let (top, _) = dwshell::dw_point(&a, &u).unwrap();
        prop_assert!((top.dot(dir) - h).abs() <= 1e-9 * (1.0 + h.abs()));
        for _ in 0..40 {
            let (p, _) = dwshell::dw_point(&a, &random::unit_vector(&mut r, n)).unwrap();
            prop_assert!(p.dot(dir) <= h + 1e-9);
        }
    }

    #[test]
    fn projections_contain_sampled_points(seed in any::<u64>(), n in 1usize..5) {
        let mut r = rng(seed);
        let a = random::gaussian(&mut r, n, n);
        let xz = dwshell::dw_projection(&a, Plane::XZ, 64).unwrap();
        let xy = dwshell::dw_projection(&a, Plane::XY, 64).unwrap();
        for _ in 0..40 {
            let (p, _) = dwshell::dw_point(&a, &random::unit_vector(&mut r, n)).unwrap();
            prop_assert!(xz.contains([p.x, p.z], 1e-9));
            prop_assert!(xy.contains([p.x, p.y], 1e-9));
        }
    }

    #[test]
    fn normal_shell_is_hull_of_eigenvalue_lifts(seed in any::<u64>(), n in 1usize..5) {
        let mut r = rng(seed);
        let eig: Vec<Complex64> = (0..n).map(|_| random::complex_normal(&mut r)).collect();
        let q = random::unitary(&mut r, n);
        let m = &q * matrix::diag(&eig) * q.adjoint();
        let lifts = dwshell::normal_lifts(&matrix::diag(&eig));
        for _ in 0..10 {
            let (p, _) = dwshell::dw_point(&m, &random::unit_vector(&mut r, n)).unwrap();
            prop_assert!(dwshell::hull_distance(&p, &lifts) <= 1e-9);
        }
    }

    #[test]
    fn shells_of_members_lie_in_the_outer_bound(seed in any::<u64>(), n in 1usize..5, alpha in 0.05..FRAC_PI_2 - 0.05, gamma in 0.2f64..5.0) {
        let spec = SectorSpec::symmetric(gamma, alpha).unwrap();
        let mut r = rng(seed);
        let b = gainphase::sample_sectored_disk_with(&spec, n, &mut r);
        for _ in 0..20 {
            let (p, _) = dwshell::dw_point(&b, &random::unit_vector(&mut r, n)).unwrap();
            prop_assert!(dwshell::superset_member(&p, &spec).unwrap());
        }
    }

    #[test]
    fn inner_bound_points_have_witnesses(x in 0.0f64..1.0, y in -1.0f64..1.0, z in 0.0f64..1.0, alpha in 0.05..FRAC_PI_2 - 0.05) {
        let spec = SectorSpec::symmetric(1.0, alpha).unwrap();
        let p = DwPoint::new(x, y, z);
        prop_assume!(dwshell::subset_member(&p, &spec).unwrap());
        let w = dwshell::normal_witness(&p, &spec, 3).unwrap();
        prop_assert!(gainphase::in_sectored_disk(&w, &spec, 1e-8).unwrap());
        prop_assert!(dwshell::hull_distance(&p, &dwshell::normal_lifts(&w)) <= 1e-8);
    }
}

#[test]
fn inner_bound_is_inside_outer_bound() {
    let mut r = rng(3);
    for _ in 0..20_000 {
        let spec = SectorSpec::symmetric(r.random_range(0.2..3.0), r.random_range(0.0..FRAC_PI_2 - 1e-3)).unwrap();
        let g = spec.gamma;
        let p = DwPoint::new(r.random_range(-g..g), r.random_range(-g..g), r.random_range(0.0..g * g));
        if dwshell::subset_member(&p, &spec).unwrap() {
            assert!(dwshell::superset_member(&p, &spec).unwrap());
        }
    }
}

#[test]
fn cloud_is_deterministic_across_thread_counts() {
    let spec = SectorSpec::symmetric(1.0, FRAC_PI_3).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| dwshell::monte_carlo_union(&spec, 3, 10_000, 7).unwrap())
    };
    let one = run(1);
    assert_eq!(one.len(), 10_000);
    assert_eq!(one, run(4));
    assert_ne!(one, dwshell::monte_carlo_union(&spec, 3, 10_000, 8).unwrap());
}

#[test]
fn cloud_lies_in_outer_bound() {
    let spec = SectorSpec::symmetric(2.0, 1.2).unwrap();
    let cloud = dwshell::monte_carlo_union(&spec, 4, 20_000, 11).unwrap();
    assert!(cloud.iter().all(|p| dwshell::superset_member(p, &spec).unwrap()));
}

#[test]
fn asymmetric_sectors_are_rejected_by_the_bounds() {
    let spec = SectorSpec::new(1.0, -0.3, 0.9).unwrap();
    let p = DwPoint::new(0.1, 0.0, 0.05);
    assert!(dwshell::superset_member(&p, &spec).is_err());
    assert!(dwshell::subset_member(&p, &spec).is_err());
    assert!(dwshell::monte_carlo_union(&spec, 3, 10, 0).is_err());
}
