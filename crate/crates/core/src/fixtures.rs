//! Published worked examples, stored verbatim.
//!
//! Every number here is copied as printed (three or four decimals); tests
//! and the `repro` driver build on these definitions.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

use nalgebra::DMatrix;

use crate::gainphase::SectorSpec;
use crate::ltisys::{BoundSegment, FirstOrder, FrequencyBounds, StateSpaceModel};
use crate::matrix::{from_complex_rows, CMatrix};

/// The 3×3 complex matrix of the matrix-level example (used for both the
/// sectored-disk test and the μ bounds).
pub fn example1_matrix() -> CMatrix {
    from_complex_rows(&[
        &[(0.58, -0.21), (-0.92, 0.41), (0.35, -0.90)],
        &[(0.91, 0.31), (0.69, -0.93), (0.51, -0.80)],
        &[(0.31, -0.65), (0.86, -0.44), (0.48, 0.64)],
    ])
}

pub const EXAMPLE1_GAMMA: f64 = 1.0;
pub const EXAMPLE1_ALPHA: f64 = FRAC_PI_3;
/// Published multipliers [k₁, k₂, k₃, k₄].
pub const EXAMPLE1_K: [f64; 4] = [1.0, 5.2311, 4.3742, 0.0468];

pub fn example1_spec() -> SectorSpec {
    SectorSpec::symmetric(EXAMPLE1_GAMMA, EXAMPLE1_ALPHA).expect("valid sector")
}

/// Published μ̂_{π/3}(A) = 1/0.5361 and μ̃_{π/3}(A) = 1/1.4436.
pub const EXAMPLE2_GAMMA_HAT: f64 = 0.5361;
pub const EXAMPLE2_GAMMA_TILDE: f64 = 1.4436;
pub const EXAMPLE2_ALPHA: f64 = FRAC_PI_3;

/// Entries (b₁s + b₀)/(a₁s + a₀) of the 2×2 plant of the frequency-sweep example.
pub fn example3_entries() -> Vec<Vec<FirstOrder>> {
    vec![
        vec![FirstOrder::new(2.0, 1.0, 5.0, 1.0), FirstOrder::new(12.0, 0.0, 10.0, 1.0)],
        vec![FirstOrder::new(1.0, 0.0, 20.0, 1.0), FirstOrder::new(5.0, 2.0, 8.0, 1.0)],
    ]
}

/// Four-state diagonal realization of the sweep-example plant.
pub fn example3_plant() -> StateSpaceModel {
    StateSpaceModel::from_first_order(&example3_entries()).expect("valid entries")
}

/// γ(ω): 10 up to π/9, then 4. β(ω) = −α(ω): π/2, π/3, π/4, π/6 with
/// breakpoints π/9, π/6, π/3.
pub fn example3_bounds() -> FrequencyBounds {
    let seg = |w_max: f64, gamma: f64, half: f64| BoundSegment {
        w_max,
        spec: SectorSpec::symmetric(gamma, half).expect("valid sector"),
    };
    FrequencyBounds::new(vec![
        seg(PI / 9.0, 10.0, FRAC_PI_2),
        seg(FRAC_PI_6, 4.0, FRAC_PI_3),
        seg(FRAC_PI_3, 4.0, FRAC_PI_4),
        seg(f64::INFINITY, 4.0, FRAC_PI_6),
    ])
    .expect("valid bounds")
}

pub const EXAMPLE3_GRID: (f64, f64, usize) = (1e-2, 1e2, 200);

/// Splits a packed [A B; C D] table with `n` states.
pub fn split_packed(rows: &[&[f64]], n: usize) -> StateSpaceModel {
    let total = rows.len();
    let cols = rows[0].len();
    let m = DMatrix::from_fn(total, cols, |i, j| rows[i][j]);
    StateSpaceModel::new(
        m.view((0, 0), (n, n)).into_owned(),
        m.view((0, n), (n, cols - n)).into_owned(),
        m.view((n, 0), (total - n, n)).into_owned(),
        m.view((n, n), (total - n, cols - n)).into_owned(),
    )
    .expect("consistent packed realization")
}

/// SISO system of the symmetric state-space example.
pub fn example5_system() -> StateSpaceModel {
    split_packed(
        &[&[0.3442, 1.1386, 1.6975], &[-1.0904, -0.8495, -0.8061], &[0.5363, 0.3336, -0.2373]],
        2,
    )
}

pub const EXAMPLE5_GAMMA: f64 = 1.0;
pub const EXAMPLE5_ALPHA: f64 = FRAC_PI_3;
pub const EXAMPLE5_K: [f64; 4] = [28.1602, 6.4926, 6.4926, 11.8703];
/// Published ‖G‖∞.
pub const EXAMPLE5_HINF: f64 = 1.1568;

pub fn example5_p() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[15.5281, 9.0543, 9.0543, 15.9003])
}

/// 3-state, 2×2 system of the MIMO state-space example.
pub fn example6_system() -> StateSpaceModel {
    split_packed(
        &[
            &[-0.699, 0.044, 0.855, 0.812, 0.044],
            &[0.418, -0.477, -0.568, 0.361, -0.792],
            &[-0.639, -0.074, -0.998, 0.029, 0.998],
            &[0.359, 0.393, 0.543, -0.248, -0.847],
            &[0.625, 0.077, 0.591, -0.044, -0.048],
        ],
        3,
    )
}

pub const EXAMPLE6_GAMMA: f64 = 1.0;
pub const EXAMPLE6_ALPHA: f64 = FRAC_PI_3;
pub const EXAMPLE6_K: [f64; 4] = [20.8005, 0.8003, 0.8003, 5.4204];

pub fn example6_p() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        3,
        3,
        &[14.5345, 9.5677, 10.0333, 9.5677, 11.9948, 10.2902, 10.0333, 10.2902, 18.0862],
    )
}

/// System contrasting constant and frequency-dependent multipliers.
pub fn remark_system() -> StateSpaceModel {
    split_packed(
        &[
            &[-3.803, -1.134, 3.474, 5.036, 3.568],
            &[4.573, -12.656, 5.861, 10.204, 10.512],
            &[1.559, 7.793, -15.323, 10.939, 13.879],
            &[0.075, 0.131, 0.165, -0.218, -0.278],
            &[0.378, 0.058, 0.128, -0.641, -0.575],
        ],
        3,
    )
}

pub const REMARK_GAMMA: f64 = 1.0;
pub const REMARK_ALPHA: f64 = FRAC_PI_3;
pub const REMARK_GRID: (f64, f64, usize) = (1e-2, 1e2, 200);

/// System of the asymmetric state-space example.
pub fn example7_system() -> StateSpaceModel {
    split_packed(
        &[
            &[-1.908, -0.894, 1.635, 0.349, 1.517],
            &[1.846, 1.882, 1.441, -1.796, 0.306],
            &[1.735, 1.847, -1.601, 1.983, -1.809],
            &[0.537, 0.356, 0.666, -0.146, -0.117],
            &[0.296, 0.002, 0.296, -0.634, -0.046],
        ],
        3,
    )
}

pub fn example7_spec() -> SectorSpec {
    SectorSpec::new(1.0, -FRAC_PI_4, FRAC_PI_3).expect("valid sector")
}

pub const EXAMPLE7_K: [f64; 4] = [0.8189, 0.0221, 0.1010, 0.0580];

pub fn example7_x() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        3,
        3,
        &[0.0055, -0.2315, -0.0719, -0.2315, -0.2350, -0.2768, -0.0719, -0.2768, 0.0197],
    )
}

pub fn example7_y() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        3,
        3,
        &[0.0319, 0.0838, 0.0432, 0.0838, 0.1200, 0.0851, 0.0432, 0.0851, 0.0357],
    )
}
