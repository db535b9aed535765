//! Wavelet coefficients of the surface measure of the unit sphere.
//!
//! The one-dimensional family is Daubechies' orthonormal wavelet with eight
//! filter taps (four vanishing moments), tabulated by the cascade algorithm on
//! the dyadic grid of step `2^{-10}` and interpolated linearly in between. The
//! `d`-dimensional generators are the `2^d - 1` mixed tensor products.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::numerics::gauss_legendre;

/// Low-pass filter, normalized to `Σ h_k = √2`.
pub const DB4_FILTER: [f64; 8] = [
    0.230_377_813_308_896_500_86,
    0.714_846_570_552_915_647_09,
    0.630_880_767_929_858_907_88,
    -0.027_983_769_416_859_854_211,
    -0.187_034_811_719_093_084_08,
    0.030_841_381_835_560_763_627,
    0.032_883_011_666_885_199_735,
    -0.010_597_401_785_069_032_105,
];

/// Support length of both `φ` and `ψ`.
pub const SUPPORT: usize = 7;
/// Cascade depth: tables hold values at multiples of `2^{-RESOLUTION}`.
pub const RESOLUTION: u32 = 10;

/// Tabulated scaling function and wavelet on `[0, 7]`.
#[derive(Debug, Clone)]
pub struct Daubechies4 {
    phi: Vec<f64>,
    psi: Vec<f64>,
}

impl Daubechies4 {
    /// The shared cascade tables.
    pub fn get() -> &'static Daubechies4 {
        static T: OnceLock<Daubechies4> = OnceLock::new();
        T.get_or_init(Self::cascade)
    }

    fn cascade() -> Self {
        let h = DB4_FILTER;
        let s2 = std::f64::consts::SQRT_2;
        // φ(n), n = 1..6: eigenvector of the two-scale matrix with Σ φ(n) = 1
        let n = SUPPORT - 1;
        let mut a = vec![vec![0.0; n + 1]; n];
        for r in 0..n {
            let x = r + 1;
            for c in 0..n {
                let m = c + 1;
                let k = 2 * x as i64 - m as i64;
                if (0..8).contains(&k) {
                    a[r][c] += s2 * h[k as usize];
                }
            }
            a[r][r] -= 1.0;
        }
        // the system is singular; swap the last row for the normalization
        a[n - 1] = vec![1.0; n + 1];
        let ints = solve(a);
        let scale = 1usize << RESOLUTION;
        let len = SUPPORT * scale + 1;
        let mut phi = vec![0.0; len];
        for (i, v) in ints.iter().enumerate() {
            phi[(i + 1) * scale] = *v;
        }
        for level in 1..=RESOLUTION {
            let step = scale >> level;
            let mut idx = step;
            while idx < len {
                if (idx / step) % 2 == 1 {
                    // x = idx / scale, φ(x) = √2 Σ h_k φ(2x - k)
                    let mut acc = 0.0;
                    for (k, hk) in h.iter().enumerate() {
                        let arg = 2 * idx as i64 - (k * scale) as i64;
                        if arg > 0 && (arg as usize) < len {
                            acc += hk * phi[arg as usize];
                        }
                    }
                    phi[idx] = s2 * acc;
                }
                idx += step;
            }
        }
        let mut psi = vec![0.0; len];
        for (idx, out) in psi.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in 0..8 {
                let g = if k % 2 == 0 { h[7 - k] } else { -h[7 - k] };
                let arg = 2 * idx as i64 - (k * scale) as i64;
                if arg > 0 && (arg as usize) < len {
                    acc += g * phi[arg as usize];
                }
            }
            *out = s2 * acc;
        }
        Daubechies4 { phi, psi }
    }

    fn lookup(table: &[f64], x: f64) -> f64 {
        if !(x > 0.0 && x < SUPPORT as f64) {
            return 0.0;
        }
        let pos = x * (1u32 << RESOLUTION) as f64;
        let i = (pos.floor() as usize).min(table.len() - 2);
        let w = pos - i as f64;
        table[i] * (1.0 - w) + table[i + 1] * w
    }

    pub fn phi(&self, x: f64) -> f64 {
        Self::lookup(&self.phi, x)
    }

    pub fn psi(&self, x: f64) -> f64 {
        Self::lookup(&self.psi, x)
    }

    /// Tabulated `(φ, ψ)` samples at multiples of `2^{-10}`.
    pub fn tables(&self) -> (&[f64], &[f64]) {
        (&self.phi, &self.psi)
    }

    /// `max |φ|` and `max |ψ|` over the tables.
    pub fn sup_norms(&self) -> (f64, f64) {
        let m = |t: &[f64]| t.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        (m(&self.phi), m(&self.psi))
    }
}

fn solve(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, piv);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..=n {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
    }
    let rhs: Vec<f64> = (0..n).map(|r| a[r][n]).collect();
    (0..n).map(|r| rhs[r] / a[r][r]).collect()
}

/// Bound `C` in `|⟨σ, Ψ_{i,j,k}⟩| <= C 2^{jd/2} 2^{-j(d-1)}`: sup of the generator
/// times the surface a convex set of side `7·2^{-j}` can cut from the sphere
/// (at most its own boundary measure).
pub fn coefficient_bound(d: usize) -> f64 {
    let (mp, ms) = Daubechies4::get().sup_norms();
    let gen = ms * mp.max(ms).powi(d as i32 - 1);
    let side = SUPPORT as f64;
    match d {
        2 => gen * 4.0 * side,
        _ => gen * 6.0 * side * side,
    }
}

/// Per-level result of the spherical-mean experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalMeanLevel {
    pub j: usize,
    /// `2^{j(1/p - 1 + d(1/2 - 1/p))} (Σ |⟨σ, Ψ⟩|^p)^{1/p}`.
    pub scaled_sum: f64,
    /// Wavelets with a nonzero sample on the sphere.
    pub count: usize,
    pub max_coefficient: f64,
    /// Richardson error estimate of the worst coefficient.
    pub error_estimate: f64,
    pub quadrature_nodes: usize,
}

/// Absolute tolerance on the Richardson estimate.
pub const QUADRATURE_TOLERANCE: f64 = 1e-6;

/// Coefficients `⟨σ, Ψ_{i,j,k}⟩ = ∫_{|x|=1} Ψ_{i,j,k} dσ` summarized for `j = 0..=jmax`.
pub fn spherical_mean_wavelet_coeffs(d: usize, p: f64, jmax: usize) -> Result<Vec<SphericalMeanLevel>> {
    spherical_mean_wavelet_coeffs_tol(d, p, jmax, QUADRATURE_TOLERANCE)
}

/// As [`spherical_mean_wavelet_coeffs`] with an explicit quadrature tolerance.
/// The sphere rule in `d = 3` needs tens of millions of nodes per level at `1e-6`.
pub fn spherical_mean_wavelet_coeffs_tol(
    d: usize,
    p: f64,
    jmax: usize,
    tol: f64,
) -> Result<Vec<SphericalMeanLevel>> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    if d != 2 && d != 3 {
        return Err(Error::InvalidDimension(d));
    }
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!("p must be positive, got {p}")));
    }
    (0..=jmax)
        .map(|j| {
            let (coeffs, seen, err, nodes) = level_coefficients(d, j, tol)?;
            let mut sum = 0.0;
            let mut max_c = 0.0f64;
            let mut count = 0;
            for (c, s) in coeffs.iter().zip(&seen) {
                if *s {
                    count += 1;
                    max_c = max_c.max(c.abs());
                    sum += if p.is_infinite() { 0.0 } else { c.abs().powf(p) };
                }
            }
            let lp = if p.is_infinite() { max_c } else { sum.powf(1.0 / p) };
            let inv_p = if p.is_infinite() { 0.0 } else { 1.0 / p };
            let df = d as f64;
            let expo = j as f64 * (inv_p - 1.0 + df * (0.5 - inv_p));
            Ok(SphericalMeanLevel {
                j,
                scaled_sum: 2f64.powf(expo) * lp,
                count,
                max_coefficient: max_c,
                error_estimate: err,
                quadrature_nodes: nodes,
            })
        })
        .collect()
}

/// Layout of the coefficient array at level `j`: `k_l ∈ [-2^j - 7, 2^j]`.
struct Layout {
    d: usize,
    kmin: i64,
    width: usize,
    gens: usize,
}

impl Layout {
    fn new(d: usize, j: usize) -> Self {
        let n = 1i64 << j;
        let kmin = -n - SUPPORT as i64;
        let width = (n - kmin + 1) as usize;
        Layout { d, kmin, width, gens: (1 << d) - 1 }
    }

    fn len(&self) -> usize {
        self.width.pow(self.d as u32) * self.gens
    }
}

/// Adds `w · Ψ_{i,j,k}(x)` for every wavelet nonzero at `x`; marks touched entries.
fn scatter(lay: &Layout, j: usize, x: &[f64], w: f64, acc: &mut [f64], seen: &mut [bool]) {
    let db = Daubechies4::get();
    let sj = (1u64 << j) as f64;
    // per axis: first array index and the 8 values of (φ, ψ); out-of-range offsets zeroed
    let mut first = [0usize; 3];
    let mut vals = [[[0.0f64; 2]; 8]; 3];
    for l in 0..lay.d {
        let y = sj * x[l];
        let k0 = (y - SUPPORT as f64).floor() as i64;
        let rel = k0 - lay.kmin;
        for (o, slot) in vals[l].iter_mut().enumerate() {
            let k = rel + o as i64;
            if k >= 0 && (k as usize) < lay.width {
                let arg = y - (k0 + o as i64) as f64;
                *slot = [db.phi(arg), db.psi(arg)];
            }
        }
        // the layout spans every k that can meet the unit ball, so rel >= 0
        first[l] = rel.max(0) as usize;
    }
    let wd = lay.width;
    let len = acc.len();
    let mut put = |idx: usize, v: f64| {
        if v != 0.0 {
            acc[idx] += w * v;
            seen[idx] = true;
        }
    };
    if lay.d == 2 {
        for (o1, a) in vals[0].iter().enumerate() {
            for (o2, b) in vals[1].iter().enumerate() {
                let idx = ((first[0] + o1) * wd + first[1] + o2) * 3;
                if idx + 3 > len {
                    continue;
                }
                put(idx, a[1] * b[0]);
                put(idx + 1, a[0] * b[1]);
                put(idx + 2, a[1] * b[1]);
            }
        }
    } else {
        for (o1, a) in vals[0].iter().enumerate() {
            for (o2, b) in vals[1].iter().enumerate() {
                let ab = [[a[0] * b[0], a[0] * b[1]], [a[1] * b[0], a[1] * b[1]]];
                for (o3, c) in vals[2].iter().enumerate() {
                    let idx = (((first[0] + o1) * wd + first[1] + o2) * wd + first[2] + o3) * 7;
                    if idx + 7 > len {
                        continue;
                    }
                    for g in 1..8usize {
                        put(idx + g - 1, ab[g & 1][(g >> 1) & 1] * c[(g >> 2) & 1]);
                    }
                }
            }
        }
    }
}

type LevelData = (Vec<f64>, Vec<bool>, f64, usize);

fn level_coefficients(d: usize, j: usize, tol: f64) -> Result<LevelData> {
    let lay = Layout::new(d, j);
    match d {
        2 => circle_level(&lay, j, tol),
        _ => sphere_level(&lay, j, tol),
    }
}

fn circle_level(lay: &Layout, j: usize, tol: f64) -> Result<LevelData> {
    const MAX_NODES: usize = 1 << 23;
    let amp = 2f64.powi(j as i32);
    let mut n = 256usize << j;
    let mut sums = vec![0.0; lay.len()];
    let mut seen = vec![false; lay.len()];
    for i in 0..n {
        let th = 2.0 * PI * i as f64 / n as f64;
        scatter(lay, j, &[th.cos(), th.sin()], amp, &mut sums, &mut seen);
    }
    loop {
        // refine by the midpoints; trapezoid values are (2π/n) · sums
        let mut fine = sums.clone();
        for i in 0..n {
            let th = 2.0 * PI * (i as f64 + 0.5) / n as f64;
            scatter(lay, j, &[th.cos(), th.sin()], amp, &mut fine, &mut seen);
        }
        let coarse_w = 2.0 * PI / n as f64;
        let fine_w = PI / n as f64;
        let err = sums
            .iter()
            .zip(&fine)
            .map(|(a, b)| (a * coarse_w - b * fine_w).abs() / 3.0)
            .fold(0.0, f64::max);
        n *= 2;
        sums = fine;
        if err <= tol {
            let coeffs = sums.iter().map(|s| s * fine_w).collect();
            return Ok((coeffs, seen, err, n));
        }
        if n >= MAX_NODES {
            return Err(Error::Quadrature(format!(
                "circle rule did not reach {tol:e} at level {j} (estimate {err:e})"
            )));
        }
    }
}

/// Product rule in polar coordinates about the `x_3` axis: composite 4-point
/// Gauss–Legendre panels in the polar angle, trapezoid in the azimuth.
fn sphere_level(lay: &Layout, j: usize, tol: f64) -> Result<LevelData> {
    const MAX_PANELS: usize = 1 << 10;
    let (gx, gw) = gauss_legendre(4);
    let amp = 2f64.powf(1.5 * j as f64);
    let mut panels = 4usize << j;
    let mut prev: Option<Vec<f64>> = None;
    loop {
        let mut acc = vec![0.0; lay.len()];
        let mut seen = vec![false; lay.len()];
        let nphi = 8 * panels;
        let hth = PI / panels as f64;
        let wphi = 2.0 * PI / nphi as f64;
        let azimuth: Vec<(f64, f64)> = (0..nphi).map(|i| (wphi * i as f64).sin_cos()).collect();
        for pt in 0..panels {
            let t0 = pt as f64 * hth;
            for (x, w) in gx.iter().zip(&gw) {
                let th = t0 + 0.5 * hth * (x + 1.0);
                let (st, ct) = th.sin_cos();
                let wt = 0.5 * hth * w * st * wphi * amp;
                for (sp, cp) in &azimuth {
                    scatter(lay, j, &[st * cp, st * sp, ct], wt, &mut acc, &mut seen);
                }
            }
        }
        if let Some(p) = prev {
            let err = p.iter().zip(&acc).map(|(a, b)| (a - b).abs() / 3.0).fold(0.0, f64::max);
            if err <= tol {
                return Ok((acc, seen, err, panels * 4 * nphi));
            }
            if panels >= MAX_PANELS {
                return Err(Error::Quadrature(format!(
                    "sphere rule did not reach {tol:e} at level {j} (estimate {err:e})"
                )));
            }
        }
        prev = Some(acc);
        panels *= 2;
    }
}
