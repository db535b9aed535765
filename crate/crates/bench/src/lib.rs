//! Fixed inputs shared by the benchmarks.

use radialfs_core::bump::bump;
use radialfs_core::seq::CoefficientGrid;
use radialfs_core::{Grid1D, RadialProfile};

/// `bump(|t| - 1)` on a uniform grid of spacing `2^{-levels}` up to `t = 4`.
pub fn shell_profile(levels: i32) -> RadialProfile {
    let grid = Grid1D::uniform(2f64.powi(-levels), 4.0).expect("valid grid");
    RadialProfile::from_fn(&grid, |t| bump(t.abs() - 1.0)).expect("even profile")
}

/// Dense coefficient grid with levels `0..=top` and `4 * 2^j` entries per level.
pub fn dense_grid(top: usize) -> CoefficientGrid {
    let levels = (0..=top)
        .map(|j| (0..(4usize << j)).map(|k| 1.0 / (1.0 + (j + k) as f64)).collect())
        .collect();
    CoefficientGrid::from_levels(levels).expect("valid levels")
}
