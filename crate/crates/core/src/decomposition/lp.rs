//! Smooth dyadic frequency bands of a profile on a uniform grid.
//!
//! With `ξ = ω/π` and the cutoff `χ` (1 on `ξ <= 1`, 0 on `ξ >= 2`), band `0` is
//! `χ(ξ)` and band `j >= 1` is `χ(ξ/2^j) - χ(ξ/2^{j-1})`. The bands up to
//! `⌈log₂(1/h)⌉` sum to the identity on the sampled frequencies.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::bump::frequency_cutoff;
use crate::error::{Error, Result};
use crate::numerics::pairwise_sum;
use crate::profile::RadialProfile;
use crate::spaces::SpaceParams;

/// Spectrum of a zero-padded profile, ready for band extraction.
pub struct DyadicBandSpectrum {
    h: f64,
    n: usize,
    /// Padded index of original node 0.
    offset: usize,
    /// Coordinate of padded index 0.
    t0: f64,
    spectrum: Vec<Complex<f64>>,
    omega: Vec<f64>,
    inverse: Arc<dyn Fft<f64>>,
    top: usize,
}

impl std::fmt::Debug for DyadicBandSpectrum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DyadicBandSpectrum")
            .field("h", &self.h)
            .field("padded", &self.spectrum.len())
            .field("top", &self.top)
            .finish()
    }
}

/// Frequency window of band `j` at `ξ >= 0`.
pub fn band_window(j: usize, xi: f64) -> f64 {
    if j == 0 {
        frequency_cutoff(xi)
    } else {
        frequency_cutoff(xi / 2f64.powi(j as i32)) - frequency_cutoff(xi / 2f64.powi(j as i32 - 1))
    }
}

impl DyadicBandSpectrum {
    /// Transform `g`, which must sit on a uniform grid and vanish at its ends.
    pub fn new(g: &RadialProfile) -> Result<Self> {
        let h = g
            .grid()
            .uniform_spacing()
            .ok_or_else(|| Error::InvalidInput("band decomposition needs a uniform grid".into()))?;
        let v = g.values();
        let n = v.len();
        let scale = g.max_abs();
        if scale > 0.0 && (v[0].abs() > 1e-10 * scale || v[n - 1].abs() > 1e-10 * scale) {
            return Err(Error::InvalidInput(
                "profile must vanish at the grid ends (compact support on the grid)".into(),
            ));
        }
        let padded = (2 * n).next_power_of_two();
        let offset = (padded - n) / 2;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(padded);
        let inverse = planner.plan_fft_inverse(padded);
        let mut buf = vec![Complex::new(0.0, 0.0); padded];
        for (i, x) in v.iter().enumerate() {
            buf[offset + i] = Complex::new(*x, 0.0);
        }
        forward.process(&mut buf);
        let period = padded as f64 * h;
        let omega = (0..padded)
            .map(|m| {
                let mm = if m <= padded / 2 { m as f64 } else { m as f64 - padded as f64 };
                2.0 * std::f64::consts::PI * mm / period
            })
            .collect();
        let top = (1.0 / h).log2().ceil().max(0.0) as usize;
        Ok(Self {
            h,
            n,
            offset,
            t0: g.nodes()[0] - offset as f64 * h,
            spectrum: buf,
            omega,
            inverse,
            top,
        })
    }

    /// Highest band index; bands `0..=top` reconstruct the input.
    pub fn top_level(&self) -> usize {
        self.top
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    /// Coordinates of the padded samples.
    pub fn padded_nodes(&self) -> Vec<f64> {
        (0..self.spectrum.len()).map(|m| self.t0 + m as f64 * self.h).collect()
    }

    fn filtered(&self, window: impl Fn(f64) -> f64, order: usize) -> Vec<f64> {
        let len = self.spectrum.len();
        let mut buf: Vec<Complex<f64>> = self
            .spectrum
            .iter()
            .zip(&self.omega)
            .map(|(c, &w)| {
                let f = window(w.abs() / std::f64::consts::PI);
                if f == 0.0 {
                    return Complex::new(0.0, 0.0);
                }
                let mut m = Complex::new(f, 0.0);
                for _ in 0..order {
                    m *= Complex::new(0.0, w);
                }
                c * m
            })
            .collect();
        self.inverse.process(&mut buf);
        buf.iter().map(|c| c.re / len as f64).collect()
    }

    /// `(d/dt)^order Δ_j g` on the padded grid.
    pub fn band_padded(&self, j: usize, order: usize) -> Vec<f64> {
        self.filtered(|xi| band_window(j, xi), order)
    }

    /// `(d/dt)^order Δ_j g` at the original nodes.
    pub fn band(&self, j: usize, order: usize) -> Vec<f64> {
        let full = self.band_padded(j, order);
        full[self.offset..self.offset + self.n].to_vec()
    }

    /// Weighted `L_p` norm of a padded-grid function; `d = 1` is unweighted.
    pub fn padded_norm(&self, values: &[f64], p: f64, d: usize) -> f64 {
        if p.is_infinite() {
            return values.iter().fold(0.0, |m, v| m.max(v.abs()));
        }
        let e = d as i32 - 1;
        let terms: Vec<f64> = values
            .iter()
            .enumerate()
            .map(|(m, v)| v.abs().powf(p) * (self.t0 + m as f64 * self.h).abs().powi(e) * self.h)
            .collect();
        pairwise_sum(&terms).powf(1.0 / p)
    }
}

/// `(Σ_j 2^{jsq} ‖Δ_j g‖^q)^{1/q}`, with `‖·‖` in `L_p(R, |t|^{d-1})` when `weighted`
/// and in `L_p(R)` otherwise.
pub fn lp_besov_norm_1d(g: &RadialProfile, params: &SpaceParams, weighted: bool) -> Result<f64> {
    lp_besov_norm_1d_levels(g, params, weighted, None)
}

/// As [`lp_besov_norm_1d`], restricted to bands `0..=levels`.
pub fn lp_besov_norm_1d_levels(
    g: &RadialProfile,
    params: &SpaceParams,
    weighted: bool,
    levels: Option<usize>,
) -> Result<f64> {
    if g.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let spec = DyadicBandSpectrum::new(g)?;
    let top = match levels {
        Some(j) if j > spec.top_level() => {
            return Err(Error::Resolution(format!(
                "grid spacing {} resolves bands up to {}, requested {j}",
                spec.spacing(),
                spec.top_level()
            )))
        }
        Some(j) => j,
        None => spec.top_level(),
    };
    let d = if weighted { params.d } else { 1 };
    let mut logs = Vec::with_capacity(top + 1);
    for j in 0..=top {
        let b = spec.band_padded(j, 0);
        let n = spec.padded_norm(&b, params.p, d);
        if n > 0.0 {
            logs.push(j as f64 * params.s * std::f64::consts::LN_2 + n.ln());
        }
    }
    if logs.is_empty() {
        return Ok(0.0);
    }
    Ok(if params.q.is_infinite() {
        logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max).exp()
    } else {
        let t: Vec<f64> = logs.iter().map(|l| params.q * l).collect();
        (crate::numerics::log_sum_exp(&t) / params.q).exp()
    })
}
