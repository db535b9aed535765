//! Radial Sobolev norms of profiles.

use crate::error::{Error, Result};
use crate::profile::RadialProfile;
use crate::radial::{radial_laplacian, weighted_lp_norm, weighted_lp_samples};

fn check(p: f64) -> Result<()> {
    if !(p >= 1.0) || p.is_infinite() {
        return Err(Error::InvalidParameter(format!("Sobolev norms need 1 <= p < ∞, got {p}")));
    }
    Ok(())
}

/// `‖g‖ + ‖g'‖` in `L_p(R, |t|^{d-1})`.
pub fn sobolev_radial_norm_1(g: &RadialProfile, p: f64, d: usize) -> Result<f64> {
    check(p)?;
    let d1 = g.derivative(1)?;
    Ok(weighted_lp_norm(g, p, d)? + weighted_lp_samples(g.nodes(), &d1, p, d)?)
}

/// `‖g‖ + ‖g'‖ + ‖g'/t‖ + ‖g''‖` in `L_p(R, |t|^{d-1})`; `g'/t` at the origin is `g''(0)`.
pub fn sobolev_radial_norm_2(g: &RadialProfile, p: f64, d: usize) -> Result<f64> {
    check(p)?;
    let d1 = g.derivative(1)?;
    let d2 = g.derivative(2)?;
    let over_t: Vec<f64> = g
        .nodes()
        .iter()
        .zip(d1.iter().zip(&d2))
        .map(|(t, (a, b))| if *t == 0.0 { *b } else { a / t })
        .collect();
    let x = g.nodes();
    Ok(weighted_lp_norm(g, p, d)?
        + weighted_lp_samples(x, &d1, p, d)?
        + weighted_lp_samples(x, &over_t, p, d)?
        + weighted_lp_samples(x, &d2, p, d)?)
}

/// `‖g‖ + ‖D_r^m g‖` in `L_p(R, |t|^{d-1})`, `1 < p < ∞`, `m >= 1`.
pub fn sobolev_radial_norm_2m(g: &RadialProfile, p: f64, d: usize, m: usize) -> Result<f64> {
    if !(p > 1.0) || p.is_infinite() {
        return Err(Error::InvalidParameter(format!("need 1 < p < ∞, got {p}")));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("order m must be at least 1".into()));
    }
    if g.nodes().len() < 2 * m + 1 {
        return Err(Error::Resolution(format!("{} nodes cannot resolve D_r^{m}", g.nodes().len())));
    }
    let mut lap = g.clone();
    for _ in 0..m {
        lap = radial_laplacian(&lap, d)?;
    }
    Ok(weighted_lp_norm(g, p, d)? + weighted_lp_norm(&lap, p, d)?)
}
