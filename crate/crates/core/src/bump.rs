//! Smooth compactly supported templates shared by every module.
//!
//! All templates are built from `exp(-1/(1 - u^2))` and the associated
//! smooth step. Nothing here allocates.

use std::f64::consts::E;

/// Standard bump `e * exp(-1/(1-u^2))` on `|u| < 1`, normalized so that `bump(0) = 1`.
pub fn bump(u: f64) -> f64 {
    let w = 1.0 - u * u;
    if w <= 0.0 {
        0.0
    } else {
        E * (-1.0 / w).exp()
    }
}

/// First derivative of [`bump`].
pub fn bump_derivative(u: f64) -> f64 {
    let w = 1.0 - u * u;
    if w <= 0.0 {
        0.0
    } else {
        bump(u) * (-2.0 * u / (w * w))
    }
}

fn exp_ramp(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp()
    }
}

/// C^∞ step: 0 for `u <= 0`, 1 for `u >= 1`.
pub fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let a = exp_ramp(u);
        a / (a + exp_ramp(1.0 - u))
    }
}

/// Radial cutoff: 1 on `|x| <= 1`, 0 on `|x| >= 3/2`, smooth and monotone in between.
pub fn psi_cutoff(r: f64) -> f64 {
    smooth_step((1.5 - r.abs()) / 0.5)
}

const SHAPE_CENTER: f64 = 1.25;
const SHAPE_HALF_WIDTH: f64 = 0.75;

/// Even shape supported in `[-2,-1/2] ∪ [1/2,2]` with `shape(±1) = 1`.
pub fn annulus_shape(u: f64) -> f64 {
    let a = u.abs();
    if a <= 0.5 || a >= 2.0 {
        return 0.0;
    }
    bump((a - SHAPE_CENTER) / SHAPE_HALF_WIDTH) / bump((1.0 - SHAPE_CENTER) / SHAPE_HALF_WIDTH)
}

/// Frequency-side cutoff: 1 for `xi <= 1`, 0 for `xi >= 2`.
pub fn frequency_cutoff(xi: f64) -> f64 {
    smooth_step(2.0 - xi.abs())
}
