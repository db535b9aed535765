//! Coefficient grids `s_{j,k}` and the quasi-norms of `b^s_{p,q,d}`, `f^s_{p,q,d}`,
//! `b_{p,q,d}` and `f_{p,q,d}`.
//!
//! Sums run over ascending `j`, then ascending `k`, and are accumulated in log space.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::numerics::{log_sum_exp, omega, pairwise_sum, recip};
use crate::radial::weighted_lp_samples;
use crate::spaces::SpaceParams;

/// Doubly indexed coefficients; absent entries are zero.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CoefficientGrid {
    levels: Vec<Vec<f64>>,
}

impl CoefficientGrid {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build from ragged rows, row `j` holding `s_{j,0}, s_{j,1}, …`.
    pub fn from_levels(levels: Vec<Vec<f64>>) -> Result<Self> {
        if levels.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("coefficients must be finite".into()));
        }
        Ok(Self { levels })
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.levels.get(j).and_then(|r| r.get(k)).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, j: usize, k: usize, v: f64) {
        if self.levels.len() <= j {
            self.levels.resize(j + 1, Vec::new());
        }
        let row = &mut self.levels[j];
        if row.len() <= k {
            row.resize(k + 1, 0.0);
        }
        row[k] = v;
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    /// Highest level holding a non-zero entry.
    pub fn max_level(&self) -> Option<usize> {
        self.levels.iter().rposition(|r| r.iter().any(|v| *v != 0.0))
    }

    /// Non-zero entries `(j, k, value)` in storage order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.levels
            .iter()
            .enumerate()
            .flat_map(|(j, r)| r.iter().enumerate().filter(|e| *e.1 != 0.0).map(move |(k, v)| (j, k, *v)))
    }

    pub fn is_zero(&self) -> bool {
        self.entries().next().is_none()
    }

    /// `c'_{j,k} = f(j) c_{j,k}`.
    pub fn level_scaled(&self, f: impl Fn(usize) -> f64) -> Self {
        Self {
            levels: self
                .levels
                .iter()
                .enumerate()
                .map(|(j, r)| r.iter().map(|v| v * f(j)).collect())
                .collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.level_scaled(|_| c)
    }

    /// Entry-wise sum.
    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (j, k, v) in other.entries() {
            out.set(j, k, out.get(j, k) + v);
        }
        out
    }

    /// Copy with every level above `j0` removed.
    pub fn truncated(&self, j0: usize) -> Self {
        Self { levels: self.levels.iter().take(j0 + 1).cloned().collect() }
    }

    /// Sparse CSV rows `j,k,value`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["j", "k", "value"])?;
        for (j, k, v) in self.entries() {
            wr.write_record([j.to_string(), k.to_string(), format!("{v:e}")])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let mut g = Self::new();
        for (line, rec) in rd.records().enumerate() {
            let rec = rec?;
            let bad = || Error::Parse(format!("row {}: expected j,k,value", line + 2));
            if rec.len() != 3 {
                return Err(bad());
            }
            let j: usize = rec[0].trim().parse().map_err(|_| bad())?;
            let k: usize = rec[1].trim().parse().map_err(|_| bad())?;
            let v: f64 = rec[2].trim().parse().map_err(|_| bad())?;
            g.set(j, k, v);
        }
        Ok(g)
    }
}

/// `χ^#_{j,k}`: 1 on `k 2^{-j} <= |t| <= (k+1) 2^{-j}` (closed).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnnulusIndicator {
    pub j: usize,
    pub k: usize,
}

impl AnnulusIndicator {
    pub fn closed(&self, t: f64) -> bool {
        let u = t.abs() * 2f64.powi(self.j as i32);
        u >= self.k as f64 && u <= (self.k + 1) as f64
    }

    /// Characteristic function of `P_{j,k}` (half-open in `|x|`).
    pub fn half_open(&self, x: &[f64]) -> bool {
        let u = crate::radial::norm(x) * 2f64.powi(self.j as i32);
        u >= self.k as f64 && u < (self.k + 1) as f64
    }
}

fn check(p: f64, q: f64) -> Result<()> {
    if !(p > 0.0) || !(q > 0.0) {
        return Err(Error::InvalidParameter(format!("need p, q > 0, got p={p}, q={q}")));
    }
    Ok(())
}

/// `(Σ_j 2^{j e q} (Σ_k (1+k)^{d-1} |s_{j,k}|^p)^{q/p})^{1/q}` with `e` the level exponent.
fn b_type(c: &CoefficientGrid, e: f64, p: f64, q: f64, d: usize) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    let mut level_logs = Vec::with_capacity(c.levels.len());
    for (j, row) in c.levels.iter().enumerate() {
        let inner = if p.is_infinite() {
            row.iter().fold(0.0_f64, |m, v| m.max(v.abs())).ln()
        } else {
            let terms: Vec<f64> = row
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(k, v)| (d as f64 - 1.0) * ((1 + k) as f64).ln() + p * v.abs().ln())
                .collect();
            log_sum_exp(&terms) / p
        };
        if inner > f64::NEG_INFINITY {
            level_logs.push(j as f64 * e * ln2 + inner);
        }
    }
    if level_logs.is_empty() {
        return 0.0;
    }
    if q.is_infinite() {
        level_logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max).exp()
    } else {
        let t: Vec<f64> = level_logs.iter().map(|l| q * l).collect();
        (log_sum_exp(&t) / q).exp()
    }
}

/// `‖c | b^s_{p,q,d}‖`.
pub fn seq_norm_bspqd(c: &CoefficientGrid, params: &SpaceParams) -> Result<f64> {
    check(params.p, params.q)?;
    Ok(b_type(c, params.differential_dimension(), params.p, params.q, params.d))
}

/// `‖c | b_{p,q,d}‖`.
pub fn seq_norm_bpqd(c: &CoefficientGrid, p: f64, q: f64, d: usize) -> Result<f64> {
    check(p, q)?;
    Ok(b_type(c, 0.0, p, q, d))
}

/// Per-cell value of the inner function on cells `[m h, (m+1) h)`, `h = 2^{-J}`.
/// Returns `(J, values)`; the inner function is constant on each cell.
fn cell_values(c: &CoefficientGrid, level_weight: impl Fn(usize) -> f64, q: f64) -> (usize, Vec<f64>) {
    let top = c.max_level().unwrap_or(0);
    let cells = c
        .levels
        .iter()
        .enumerate()
        .take(top + 1)
        .map(|(j, r)| r.len() << (top - j))
        .max()
        .unwrap_or(0);
    let mut acc = vec![0.0_f64; cells];
    for (j, row) in c.levels.iter().enumerate().take(top + 1) {
        let w = level_weight(j);
        let span = 1usize << (top - j);
        for (k, v) in row.iter().enumerate() {
            if *v == 0.0 {
                continue;
            }
            let a = v.abs() * w;
            for slot in &mut acc[k * span..(k + 1) * span] {
                if q.is_infinite() {
                    *slot = slot.max(a);
                } else {
                    *slot += a.powf(q);
                }
            }
        }
    }
    if !q.is_infinite() {
        for v in &mut acc {
            *v = v.powf(1.0 / q);
        }
    }
    (top, acc)
}

/// `Σ_m F_m^p ∫_{m h}^{(m+1) h} t^{d-1} dt`.
fn cell_integral(top: usize, f: &[f64], p: f64, d: usize) -> f64 {
    let h = 2f64.powi(-(top as i32));
    let hd = h.powi(d as i32) / d as f64;
    let terms: Vec<f64> = f
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(m, v)| {
            let shell = ((m + 1) as f64).powi(d as i32) - (m as f64).powi(d as i32);
            v.powf(p) * shell * hd
        })
        .collect();
    pairwise_sum(&terms)
}

/// `‖c | f^s_{p,q,d}‖`, exact: the inner function is constant between the
/// breakpoints `m 2^{-J}`.
pub fn seq_norm_fspqd(c: &CoefficientGrid, params: &SpaceParams) -> Result<f64> {
    check(params.p, params.q)?;
    if params.p.is_infinite() {
        return Err(Error::InvalidParameter("f-spaces need p < ∞".into()));
    }
    if c.is_zero() {
        return Ok(0.0);
    }
    let s = params.s;
    let (top, f) = cell_values(c, |j| 2f64.powf(j as f64 * s), params.q);
    Ok((2.0 * cell_integral(top, &f, params.p, params.d)).powf(1.0 / params.p))
}

/// `‖c | f^s_{p,q,d}‖` by building the inner function on the nodes of `grid` and
/// applying the weighted trapezoid rule.
pub fn seq_norm_fspqd_on_grid(c: &CoefficientGrid, params: &SpaceParams, grid: &Grid1D) -> Result<f64> {
    check(params.p, params.q)?;
    if params.p.is_infinite() {
        return Err(Error::InvalidParameter("f-spaces need p < ∞".into()));
    }
    let top = c.max_level().unwrap_or(0);
    let reach = c
        .levels
        .iter()
        .enumerate()
        .map(|(j, r)| r.len() as f64 * 2f64.powi(-(j as i32)))
        .fold(0.0, f64::max);
    let need = 2f64.powi(-(top as i32) - 1);
    if grid.max_spacing_in(0.0, reach) > need * (1.0 + 1e-12) {
        return Err(Error::Resolution(format!(
            "grid spacing {} exceeds 2^(-J-1) = {need}",
            grid.max_spacing_in(0.0, reach)
        )));
    }
    let values: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&t| {
            let mut acc = 0.0_f64;
            for (j, row) in c.levels.iter().enumerate() {
                let w = 2f64.powf(j as f64 * params.s);
                let u = t.abs() * 2f64.powi(j as i32);
                // closed annuli: on a breakpoint both neighbours count
                let k_hi = u.floor() as usize;
                let mut ks = vec![k_hi];
                if u == u.floor() && k_hi > 0 {
                    ks.push(k_hi - 1);
                }
                for k in ks {
                    let v = row.get(k).copied().unwrap_or(0.0).abs() * w;
                    if params.q.is_infinite() {
                        acc = acc.max(v);
                    } else {
                        acc += v.powf(params.q);
                    }
                }
            }
            if params.q.is_infinite() {
                acc
            } else {
                acc.powf(recip(params.q))
            }
        })
        .collect();
    weighted_lp_samples(grid.nodes(), &values, params.p, params.d)
}

/// `‖c | f_{p,q,d}‖`, the `L_p(R^d)` norm of `(Σ |s_{j,k}|^q 2^{jdq/p} χ~_{j,k})^{1/q}`,
/// through the radial reduction.
pub fn seq_norm_fpqd(c: &CoefficientGrid, p: f64, q: f64, d: usize) -> Result<f64> {
    check(p, q)?;
    if p.is_infinite() {
        return Err(Error::InvalidParameter("f-spaces need p < ∞".into()));
    }
    if c.is_zero() {
        return Ok(0.0);
    }
    let (top, f) = cell_values(c, |j| 2f64.powf(j as f64 * d as f64 / p), q);
    Ok((omega(d) * cell_integral(top, &f, p, d)).powf(1.0 / p))
}

/// Constant of the quasi-triangle inequality, `2^{max(0, 1/min(p,q,1) - 1)}`.
pub fn quasi_triangle_constant(p: f64, q: f64) -> f64 {
    let m = p.min(q).min(1.0);
    2f64.powf((1.0 / m - 1.0).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bp(s: f64, p: f64, q: f64, d: usize) -> SpaceParams {
        SpaceParams::b(s, p, q, d).unwrap()
    }

    #[test]
    fn single_entry_is_one() {
        let mut c = CoefficientGrid::new();
        c.set(0, 0, 1.0);
        for &(s, p, q, d) in &[(1.0, 2.0, 2.0, 2), (-0.5, 0.5, f64::INFINITY, 3), (3.0, f64::INFINITY, 1.0, 2)] {
            assert!((seq_norm_bspqd(&c, &bp(s, p, q, d)).unwrap() - 1.0).abs() < 1e-15);
        }
        assert!((seq_norm_bpqd(&c, 1.0, 1.0, 2).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn arithmetic_series() {
        let k_n = 10;
        let c = CoefficientGrid::from_levels(vec![vec![1.0; k_n]]).unwrap();
        let v = seq_norm_bspqd(&c, &bp(0.3, 1.0, 2.0, 2)).unwrap();
        assert!((v - (k_n * (k_n + 1) / 2) as f64).abs() < 1e-12);
    }

    #[test]
    fn weights_cancel() {
        let (s, p, d) = (0.75, 2.0, 2);
        let e = s - d as f64 / p;
        let mut c = CoefficientGrid::new();
        c.set(0, 0, 1.0);
        c.set(1, 0, 2f64.powf(-e));
        assert!((seq_norm_bspqd(&c, &bp(s, p, 1.0, d)).unwrap() - 2.0).abs() < 1e-14);
        // change of variables to the plain space
        let plain = c.level_scaled(|j| 2f64.powf(j as f64 * e));
        let a = seq_norm_bspqd(&c, &bp(s, p, 3.0, d)).unwrap();
        let b = seq_norm_bpqd(&plain, p, 3.0, d).unwrap();
        assert!((a - b).abs() < 1e-14 * a);
        // q = ∞ takes the larger level
        let mut two = CoefficientGrid::new();
        two.set(0, 0, 1.0);
        two.set(1, 0, 3.0);
        assert!((seq_norm_bpqd(&two, 2.0, f64::INFINITY, 2).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn f_single_entry_values() {
        let mut c = CoefficientGrid::new();
        c.set(0, 0, 1.0);
        assert!((seq_norm_fspqd(&c, &bp(0.5, 1.0, 2.0, 2)).unwrap() - 1.0).abs() < 1e-15);
        let v = seq_norm_fpqd(&c, 2.0, 2.0, 2).unwrap();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-14);
        assert_eq!(seq_norm_fpqd(&CoefficientGrid::new(), 2.0, 1.0, 3).unwrap(), 0.0);
    }

    #[test]
    fn grid_variant_agrees_and_checks_resolution() {
        let mut c = CoefficientGrid::new();
        c.set(0, 1, 0.5);
        c.set(2, 3, -1.5);
        c.set(3, 0, 2.0);
        let par = bp(0.4, 1.5, 2.0, 2);
        let exact = seq_norm_fspqd(&c, &par).unwrap();
        let fine = Grid1D::uniform(2f64.powi(-12), 3.0).unwrap();
        let approx = seq_norm_fspqd_on_grid(&c, &par, &fine).unwrap();
        assert!((approx / exact - 1.0).abs() < 1e-2, "{approx} {exact}");
        let coarse = Grid1D::uniform(0.25, 3.0).unwrap();
        assert!(matches!(seq_norm_fspqd_on_grid(&c, &par, &coarse), Err(Error::Resolution(_))));
    }

    #[test]
    fn direct_summation_oracle_for_p_eq_q_two() {
        // For p = q the inner sum and the integral commute: each annulus contributes
        // |s|^p 2^{jsp} · 2∫_{k2^-j}^{(k+1)2^-j} t^{d-1} dt independently.
        let mut c = CoefficientGrid::new();
        c.set(0, 2, 1.25);
        c.set(1, 0, -0.5);
        c.set(3, 9, 3.0);
        c.set(5, 4, 0.75);
        let (s, p, d) = (0.6, 2.0, 2);
        let mut oracle = 0.0;
        for (j, k, v) in c.entries() {
            let h = 2f64.powi(-(j as i32));
            let shell = ((k + 1) as f64 * h).powi(2) - (k as f64 * h).powi(2);
            oracle += v.abs().powf(p) * 2f64.powf(j as f64 * s * p) * shell; // 2 · (b²-a²)/2
        }
        let oracle = oracle.sqrt();
        let got = seq_norm_fspqd(&c, &bp(s, p, p, d)).unwrap();
        assert!((got - oracle).abs() < 1e-12 * oracle);
    }

    #[test]
    fn csv_round_trip() {
        let mut c = CoefficientGrid::new();
        c.set(1, 2, 0.5);
        c.set(3, 0, -2.0);
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let back = CoefficientGrid::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.entries().collect::<Vec<_>>(), c.entries().collect::<Vec<_>>());
    }

    #[test]
    fn indicators() {
        let a = AnnulusIndicator { j: 1, k: 2 };
        assert!(a.closed(1.0) && a.closed(-1.5) && !a.closed(1.6));
        assert!(a.half_open(&[1.0, 0.0]) && !a.half_open(&[1.5, 0.0]));
    }
}
