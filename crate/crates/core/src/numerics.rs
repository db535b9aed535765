//! Small numerical kernels: surface constants, finite-difference weights,
//! Gauss–Legendre rules, log–log regression and stable summation.

use crate::error::{Error, Result};

/// Surface area `ω_{n}` of the unit sphere `S^n ⊂ R^{n+1}`, via `ω_{n+1} = 2π/n · ω_{n-1}`.
pub fn sphere_area(n: usize) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let (mut a, mut b) = (2.0, two_pi);
    if n == 0 {
        return a;
    }
    for m in 1..n {
        let next = two_pi / m as f64 * a;
        a = b;
        b = next;
    }
    b
}

/// Area of the unit sphere in `R^d`, i.e. `2 π^{d/2} / Γ(d/2)`.
pub fn omega(d: usize) -> f64 {
    assert!(d >= 1);
    sphere_area(d - 1)
}

/// Fornberg's finite-difference weights for derivative order `m` at `x0`
/// on the stencil `xs`.
pub fn fd_weights(x0: f64, xs: &[f64], m: usize) -> Vec<f64> {
    let n = xs.len();
    assert!(n > m, "stencil too small for derivative order");
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] *= c4 / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Stencil size used for derivative order `m`: the smallest odd count above `m`.
pub fn stencil_size(m: usize) -> usize {
    2 * m.div_ceil(2) + 1
}

/// Derivative of order `m` of samples `v` on nodes `x`, centered where possible
/// and shifted one-sided at the boundaries.
pub fn derivative(x: &[f64], v: &[f64], m: usize) -> Result<Vec<f64>> {
    let n = x.len();
    if n != v.len() {
        return Err(Error::InvalidInput("node/value length mismatch".into()));
    }
    if m == 0 {
        return Ok(v.to_vec());
    }
    let w = stencil_size(m);
    if n < w {
        return Err(Error::Resolution(format!(
            "{n} nodes cannot resolve derivative order {m} (need {w})"
        )));
    }
    let half = w / 2;
    let mut out = vec![0.0; n];
    for i in 0..n {
        let start = i.saturating_sub(half).min(n - w);
        let xs = &x[start..start + w];
        let wts = fd_weights(x[i], xs, m);
        out[i] = wts.iter().zip(&v[start..start + w]).map(|(a, b)| a * b).sum();
    }
    Ok(out)
}

/// Derivative of order `m` at a single node `i`.
pub fn derivative_at(x: &[f64], v: &[f64], m: usize, i: usize) -> f64 {
    derivative_at_width(x, v, m, i, stencil_size(m))
}

/// As [`derivative_at`] with an explicit stencil width (clamped to the node count).
pub fn derivative_at_width(x: &[f64], v: &[f64], m: usize, i: usize, width: usize) -> f64 {
    let n = x.len();
    let w = width.max(m + 1).min(n);
    let half = w / 2;
    let start = i.saturating_sub(half).min(n - w);
    let wts = fd_weights(x[i], &x[start..start + w], m);
    wts.iter().zip(&v[start..start + w]).map(|(a, b)| a * b).sum()
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            dp = 1.0;
            z = 0.0;
        }
        xs[i] = -z;
        xs[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    if n == 1 {
        ws[0] = 2.0;
    }
    (xs, ws)
}

/// Ordinary least squares of `ys` on `xs`; returns `(slope, intercept, rms residual)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return Err(Error::UndefinedFit(format!("need matching samples, got {n}")));
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::UndefinedFit("degenerate abscissae".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum::<f64>()
        / n as f64)
        .sqrt();
    Ok((slope, intercept, rms))
}

/// Slope of `log2 y` against `log2 x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if ys.iter().any(|y| *y <= 0.0 || !y.is_finite()) {
        return Err(Error::UndefinedFit("non-positive amplitude".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.log2()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.log2()).collect();
    Ok(linear_fit(&lx, &ly)?.0)
}

/// `ln Σ exp(a_i)`, ignoring `-∞` terms; `-∞` for an empty sum.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + pairwise_sum(&terms.iter().map(|a| (a - m).exp()).collect::<Vec<_>>()).ln()
}

/// Pairwise summation.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        v.iter().sum()
    } else {
        let (a, b) = v.split_at(v.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

/// `1/x` with `1/∞ = 0`.
pub fn recip(x: f64) -> f64 {
    if x.is_infinite() {
        0.0
    } else {
        1.0 / x
    }
}

/// Linear interpolation on increasing nodes; `None` outside `[x_0, x_{n-1}]`.
pub fn interp(x: &[f64], v: &[f64], t: f64) -> Option<f64> {
    let n = x.len();
    if n == 0 || t < x[0] || t > x[n - 1] {
        return None;
    }
    let i = x.partition_point(|&a| a <= t);
    if i == 0 {
        return Some(v[0]);
    }
    if i >= n {
        return Some(v[n - 1]);
    }
    let (x0, x1) = (x[i - 1], x[i]);
    if t == x0 {
        return Some(v[i - 1]);
    }
    let w = (t - x0) / (x1 - x0);
    Some(v[i - 1] + w * (v[i] - v[i - 1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_areas_match_gamma_formula() {
        assert!((omega(2) - 2.0 * PI).abs() < 1e-14);
        assert!((omega(3) - 4.0 * PI).abs() < 1e-13);
        assert!((omega(4) - 2.0 * PI * PI).abs() < 1e-12);
        assert_eq!(omega(1), 2.0);
        // ω_{d-1} / d is the volume of the unit ball
        assert!((omega(5) / 5.0 - 8.0 * PI * PI / 15.0).abs() < 1e-12);
    }

    #[test]
    fn fornberg_reproduces_polynomials() {
        let xs = [0.0, 0.1, 0.25, 0.45, 0.7];
        for m in 0..4 {
            let w = fd_weights(0.3, &xs, m);
            // derivative of x^3 of order m at 0.3
            let f: Vec<f64> = xs.iter().map(|x| x * x * x).collect();
            let got: f64 = w.iter().zip(&f).map(|(a, b)| a * b).sum();
            let want = match m {
                0 => 0.027,
                1 => 3.0 * 0.09,
                2 => 6.0 * 0.3,
                _ => 6.0,
            };
            assert!((got - want).abs() < 1e-9, "m={m} got {got}");
        }
    }

    #[test]
    fn gauss_legendre_integrates_degree_2n_minus_1() {
        for n in 1..10 {
            let (x, w) = gauss_legendre(n);
            let deg = 2 * n - 1;
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let k = deg - 1;
            let want = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            assert!((got - want).abs() < 1e-13, "n={n}");
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn fit_recovers_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let (a, b, r) = linear_fit(&xs, &ys).unwrap();
        assert!((a - 2.5).abs() < 1e-14 && (b + 1.0).abs() < 1e-14 && r < 1e-14);
    }

    #[test]
    fn log_sum_exp_is_stable() {
        let v = [1000.0, 1000.0];
        assert!((log_sum_exp(&v) - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }
}
