//! Weighted quadrature, the radial reduction of `L_p(R^d)` norms and radial
//! differential operators.

use crate::error::{Error, Result};
use crate::numerics::{self, omega, pairwise_sum};
use crate::profile::RadialProfile;

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!("p must be positive, got {p}")));
    }
    Ok(())
}

/// `(∫ |v|^p |t|^{d-1} dt)^{1/p}` by the composite trapezoid rule on arbitrary samples.
/// `p = ∞` returns the largest sampled `|v|` (the weight is ignored).
pub fn weighted_lp_samples(nodes: &[f64], values: &[f64], p: f64, d: usize) -> Result<f64> {
    check_p(p)?;
    if nodes.len() < 2 || nodes.len() != values.len() {
        return Err(Error::InvalidInput("need at least two aligned samples".into()));
    }
    if p.is_infinite() {
        return Ok(values.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    let e = (d as i32) - 1;
    let f: Vec<f64> = nodes
        .iter()
        .zip(values)
        .map(|(t, v)| if *v == 0.0 { 0.0 } else { v.abs().powf(p) * t.abs().powi(e) })
        .collect();
    let cells: Vec<f64> = nodes
        .windows(2)
        .zip(f.windows(2))
        .map(|(t, y)| 0.5 * (t[1] - t[0]) * (y[0] + y[1]))
        .collect();
    Ok(pairwise_sum(&cells).powf(1.0 / p))
}

/// Norm of `g` in `L_p(R, |t|^{d-1})`.
pub fn weighted_lp_norm(g: &RadialProfile, p: f64, d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    weighted_lp_samples(g.nodes(), g.values(), p, d)
}

/// A radial function `x ↦ g(|x|)` on `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    profile: RadialProfile,
    d: usize,
}

impl RadialField {
    pub fn new(profile: RadialProfile, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        Ok(Self { profile: profile.with_dim(d), d })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.d);
        self.profile.eval(norm(x))
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `‖f | L_p(R^d)‖` through `ω_{d-1}/2` times the full-line weighted integral.
pub fn lp_norm_rd(f: &RadialField, p: f64) -> Result<f64> {
    check_p(p)?;
    if p.is_infinite() {
        return Err(Error::InvalidParameter("lp_norm_rd needs finite p".into()));
    }
    let w = weighted_lp_norm(&f.profile, p, f.d)?;
    Ok((0.5 * omega(f.d)).powf(1.0 / p) * w)
}

/// Stencil width of the radial Laplacian; wide enough that powers `D_r^m` stay accurate.
const LAPLACIAN_STENCIL: usize = 7;

/// `g'' + (d-1)/t g'` at every node, with `d g''(0)` at the origin.
pub fn radial_laplacian(g: &RadialProfile, d: usize) -> Result<RadialProfile> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    let x = g.nodes();
    let v = g.values();
    if x.len() < 3 {
        return Err(Error::Resolution("radial Laplacian needs at least 3 nodes".into()));
    }
    let n = x.len();
    let mut out = vec![0.0; n];
    for i in g.grid().nonnegative_range() {
        let t = x[i];
        let g2 = numerics::derivative_at_width(x, v, 2, i, LAPLACIAN_STENCIL);
        let val = if t == 0.0 {
            d as f64 * g2
        } else {
            g2 + (d as f64 - 1.0) / t * numerics::derivative_at_width(x, v, 1, i, LAPLACIAN_STENCIL)
        };
        out[i] = val;
        out[n - 1 - i] = val;
    }
    Ok(RadialProfile::new(g.grid().clone(), out)?.with_dim(d))
}

/// Values of `g'` on the non-negative nodes.
pub(crate) fn half_derivative(g: &RadialProfile, m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let x = g.nodes();
    let v = g.values();
    let need = numerics::stencil_size(m);
    if x.len() < need {
        return Err(Error::Resolution(format!("need {need} nodes for order {m}")));
    }
    let r = g.grid().nonnegative_range();
    let t: Vec<f64> = x[r.clone()].to_vec();
    let dv = r.map(|i| numerics::derivative_at(x, v, m, i)).collect();
    Ok((t, dv))
}

/// The two evaluations of `‖ |∇ ext g| | L_p(R^d) ‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientIdentityReport {
    /// `(ω_{d-1}/2)^{1/p} ‖g' | L_p(R,|t|^{d-1})‖`.
    pub reduced: f64,
    /// Direct tensor Gauss–Legendre quadrature of `|g'(|x|)|^p` over `R^d`.
    pub full: f64,
    pub ratio: f64,
}

/// Compare the one-dimensional reduction of the gradient norm with direct
/// `d`-dimensional quadrature.
pub fn radial_gradient_identity_check(g: &RadialProfile, p: f64, d: usize) -> Result<GradientIdentityReport> {
    if !(p >= 1.0) || p.is_infinite() {
        return Err(Error::Unsupported(format!("gradient identity needs 1 <= p < ∞, got {p}")));
    }
    if !(2..=3).contains(&d) {
        return Err(Error::InvalidDimension(d));
    }
    let deriv = g.derivative(1)?;
    let reduced = (0.5 * omega(d)).powf(1.0 / p) * weighted_lp_samples(g.nodes(), &deriv, p, d)?;
    let (t, dv) = half_derivative(g, 1)?;
    let r_max = *t.last().unwrap();
    let panels = if d == 2 { 96 } else { 28 };
    let full = orthant_quadrature(d, r_max, panels, 6, |r| {
        numerics::interp(&t, &dv, r).map_or(0.0, |v| v.abs().powf(p))
    })
    .powf(1.0 / p);
    let ratio = if reduced == 0.0 && full == 0.0 { 1.0 } else { full / reduced };
    Ok(GradientIdentityReport { reduced, full, ratio })
}

/// `∫_{R^d} F(|x|) dx` over the cube `[-R, R]^d` by tensor Gauss–Legendre panels,
/// using the reflection symmetry across coordinate planes.
pub(crate) fn orthant_quadrature(d: usize, r_max: f64, panels: usize, order: usize, f: impl Fn(f64) -> f64) -> f64 {
    let (gx, gw) = numerics::gauss_legendre(order);
    let h = r_max / panels as f64;
    let mut xs = Vec::with_capacity(panels * order);
    let mut ws = Vec::with_capacity(panels * order);
    for k in 0..panels {
        let a = k as f64 * h;
        for (x, w) in gx.iter().zip(&gw) {
            xs.push(a + 0.5 * h * (x + 1.0));
            ws.push(0.5 * h * w);
        }
    }
    let n = xs.len();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = Vec::with_capacity(n);
        for j in 0..n {
            if d == 2 {
                acc.push(ws[j] * f((xs[i] * xs[i] + xs[j] * xs[j]).sqrt()));
            } else {
                let mut inner = 0.0;
                for k in 0..n {
                    inner += ws[k] * f((xs[i] * xs[i] + xs[j] * xs[j] + xs[k] * xs[k]).sqrt());
                }
                acc.push(ws[j] * inner);
            }
        }
        rows.push(ws[i] * pairwise_sum(&acc));
    }
    pairwise_sum(&rows) * 2f64.powi(d as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bump::{bump, psi_cutoff};
    use crate::grid::Grid1D;
    use std::f64::consts::PI;

    fn ind(a: f64, b: f64) -> impl Fn(f64) -> f64 {
        move |t: f64| if t >= a && t <= b { 1.0 } else { 0.0 }
    }

    #[test]
    fn shell_indicator_weighted_norm() {
        let g = Grid1D::uniform(1e-4, 3.0).unwrap();
        let p = RadialProfile::from_fn(&g, ind(1.0, 2.0)).unwrap();
        let v = weighted_lp_norm(&p, 1.0, 3).unwrap();
        assert!((v - 14.0 / 3.0).abs() < 1e-3, "{v}");
    }

    #[test]
    fn zero_profile_has_zero_norm() {
        let g = Grid1D::uniform(0.1, 1.0).unwrap();
        let p = RadialProfile::from_fn(&g, |_| 0.0).unwrap();
        assert_eq!(weighted_lp_norm(&p, 2.0, 2).unwrap(), 0.0);
        assert_eq!(weighted_lp_norm(&p, f64::INFINITY, 2).unwrap(), 0.0);
    }

    #[test]
    fn psi_cutoff_norm_matches_adaptive_oracle() {
        // Oracle: adaptive Simpson on the half-line, 2 ∫_0^{3/2} ψ(t)^2 t dt, tolerance 1e-12.
        fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64, whole: f64, depth: u32) -> f64 {
            let c = 0.5 * (a + b);
            let (l, r) = (0.5 * (a + c), 0.5 * (c + b));
            let left = (c - a) / 6.0 * (f(a) + 4.0 * f(l) + f(c));
            let right = (b - c) / 6.0 * (f(c) + 4.0 * f(r) + f(b));
            if depth == 0 || (left + right - whole).abs() < 15.0 * eps {
                return left + right + (left + right - whole) / 15.0;
            }
            simpson(f, a, c, eps / 2.0, left, depth - 1) + simpson(f, c, b, eps / 2.0, right, depth - 1)
        }
        let f = |t: f64| psi_cutoff(t).powi(2) * t;
        let whole = 1.5 / 6.0 * (f(0.0) + 4.0 * f(0.75) + f(1.5));
        let oracle = (2.0 * simpson(&f, 0.0, 1.5, 1e-13, whole, 40)).sqrt();
        let g = Grid1D::uniform(1e-4, 2.0).unwrap();
        let p = RadialProfile::from_fn(&g, psi_cutoff).unwrap();
        let v = weighted_lp_norm(&p, 2.0, 2).unwrap();
        assert!((v - oracle).abs() < 1e-8, "{v} vs {oracle}");
        // frozen baseline from the oracle run
        assert!((oracle - 1.2047245509).abs() < 1e-9, "{oracle}");
    }

    #[test]
    fn ball_volumes() {
        let g = Grid1D::uniform(1e-4, 2.0).unwrap();
        let p = RadialProfile::from_fn(&g, ind(0.0, 1.0)).unwrap();
        let f2 = RadialField::new(p.clone(), 2).unwrap();
        let f3 = RadialField::new(p, 3).unwrap();
        assert!((lp_norm_rd(&f2, 1.0).unwrap() - PI).abs() < 1e-3);
        assert!((lp_norm_rd(&f3, 1.0).unwrap() - 4.0 * PI / 3.0).abs() < 2e-3);
        assert!(RadialField::new(f2.profile().clone(), 1).is_err());
    }

    #[test]
    fn lp_norm_rd_matches_tensor_quadrature() {
        let g = Grid1D::uniform(1e-3, 1.5).unwrap();
        let p = RadialProfile::from_fn(&g, |t| bump(t / 1.2)).unwrap();
        let f = RadialField::new(p, 2).unwrap();
        let reduced = lp_norm_rd(&f, 2.0).unwrap();
        let direct = orthant_quadrature(2, 1.2, 64, 8, |r| bump(r / 1.2).powi(2)).sqrt();
        assert!((reduced / direct - 1.0).abs() < 1e-5, "{reduced} {direct}");
    }

    #[test]
    fn laplacian_of_polynomials() {
        let g = Grid1D::uniform(0.01, 1.0).unwrap();
        let p = RadialProfile::from_fn(&g, |t| t * t).unwrap();
        let l = radial_laplacian(&p, 3).unwrap();
        assert!(l.values().iter().all(|v| (v - 6.0).abs() < 1e-8));
        let c = RadialProfile::from_fn(&g, |_| 1.0).unwrap();
        assert!(radial_laplacian(&c, 2).unwrap().values().iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn laplacian_of_gaussian_against_symbolic_value() {
        let g = Grid1D::uniform(1e-3, 3.0).unwrap();
        let p = RadialProfile::from_fn(&g, |t| (-t * t).exp()).unwrap();
        let l = radial_laplacian(&p, 2).unwrap();
        let i = g.index_of(1.0).unwrap();
        let r = 1.0_f64;
        let want = (4.0 * r * r - 2.0) * (-r * r).exp() + 1.0 / r * (-2.0 * r * (-r * r).exp());
        assert!((l.values()[i] - want).abs() < 1e-4);
    }

    #[test]
    fn laplacian_is_second_order() {
        // D_r t^{2m} = 2m (2m - 2 + d) t^{2m-2}
        let err = |h: f64, m: i32, d: usize| {
            let g = Grid1D::uniform(h, 1.0).unwrap();
            let p = RadialProfile::from_fn(&g, |t| t.powi(2 * m)).unwrap();
            let l = radial_laplacian(&p, d).unwrap();
            let c = (2 * m * (2 * m - 2 + d as i32)) as f64;
            g.nodes()
                .iter()
                .zip(l.values())
                .filter(|(t, _)| t.abs() < 0.9)
                .map(|(t, v)| (v - c * t.powi(2 * m - 2)).abs())
                .fold(0.0, f64::max)
        };
        for d in [2, 3] {
            // the stencil is exact on low-degree polynomials
            for m in 1..=3 {
                assert!(err(0.01, m, d) < 1e-8, "m={m} d={d}: {}", err(0.01, m, d));
            }
            let order = (err(0.04, 4, d) / err(0.02, 4, d)).log2();
            assert!(order >= 1.9, "d={d}: order {order}");
        }
    }

    #[test]
    fn laplacian_needs_three_nodes() {
        let g = Grid1D::new(vec![-1.0, 1.0], crate::grid::GridKind::UniformDyadic).unwrap();
        let p = RadialProfile::from_fn(&g, |t| t).unwrap();
        assert!(matches!(radial_laplacian(&p, 2), Err(Error::Resolution(_))));
    }

    #[test]
    fn gradient_identity_bump_and_hat() {
        let g = Grid1D::uniform(1e-3, 1.2).unwrap();
        let b = RadialProfile::from_fn(&g, bump).unwrap();
        let r = radial_gradient_identity_check(&b, 1.0, 2).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-4, "{r:?}");
        let hat = RadialProfile::from_fn(&g, |t| (1.0 - t).max(0.0)).unwrap();
        let r = radial_gradient_identity_check(&hat, 1.0, 3).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-3, "{r:?}");
        // reduced side: (4π/2) · 2∫_0^1 t^2 dt
        assert!((r.reduced - 2.0 * PI * 2.0 / 3.0).abs() < 1e-2, "{r:?}");
        let z = RadialProfile::from_fn(&g, |_| 0.0).unwrap();
        assert_eq!(radial_gradient_identity_check(&z, 2.0, 2).unwrap().ratio, 1.0);
        assert!(matches!(radial_gradient_identity_check(&z, 0.5, 2), Err(Error::Unsupported(_))));
    }
}
