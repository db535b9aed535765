//! Even-atom decompositions of profiles and the surrogate trace-space norms.
//!
//! Level `j` takes the Littlewood–Paley band `Δ_j g` and cuts it with a smooth
//! partition of unity `ψ_{j,k}(t) = Ψ_k(2^j |t|)` adapted to the intervals of the
//! annuli `(j, k)`. Each piece is divided by the smallest constant that turns it
//! into an even `L`-atom, which becomes the coefficient `s_{j,k}`.

pub mod lp;
pub mod sobolev;
pub mod wavelet;

use std::io::Write;
use std::sync::OnceLock;

use crate::atoms::{AtomFlavor, AtomInterval, AtomSpec};
use crate::bump::bump;
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::numerics;
use crate::profile::RadialProfile;
use crate::radial::weighted_lp_samples;
use crate::seq::{seq_norm_bspqd, seq_norm_fspqd, CoefficientGrid};
use crate::spaces::SpaceParams;

pub use lp::{lp_besov_norm_1d, lp_besov_norm_1d_levels, DyadicBandSpectrum};
pub use sobolev::{sobolev_radial_norm_1, sobolev_radial_norm_2, sobolev_radial_norm_2m};
pub use wavelet::{spherical_mean_wavelet_coeffs, spherical_mean_wavelet_coeffs_tol, SphericalMeanLevel};

/// Highest regularity order supported by the window tables.
pub const MAX_ORDER: usize = 6;

fn raw_window(k: usize, u: f64) -> f64 {
    if k == 0 {
        bump(u / 1.5)
    } else {
        bump(u - k as f64 - 0.5)
    }
}

/// Active windows at `u = 2^j |t| >= 0` with their normalized values.
fn windows_at(u: f64) -> Vec<(usize, f64)> {
    let lo = (u - 1.5).floor().max(0.0) as usize;
    let hi = (u + 0.5).ceil() as usize;
    let mut act: Vec<(usize, f64)> = Vec::with_capacity(4);
    if u < 1.5 {
        act.push((0, raw_window(0, u)));
    }
    for k in lo.max(1)..=hi {
        let v = raw_window(k, u);
        if v > 0.0 {
            act.push((k, v));
        }
    }
    let s: f64 = act.iter().map(|a| a.1).sum();
    act.retain(|a| a.1 > 0.0);
    for a in &mut act {
        a.1 /= s;
    }
    act
}

const TABLE_STEP: f64 = 1.0 / 4096.0;
const TABLE_MIN: f64 = -2.0;
const TABLE_MAX: f64 = 4.0;

/// Derivatives of `Ψ_0, Ψ_1, Ψ_2` sampled on `[TABLE_MIN, TABLE_MAX]`, `tables[k][n]`.
fn window_tables() -> &'static Vec<Vec<Vec<f64>>> {
    static T: OnceLock<Vec<Vec<Vec<f64>>>> = OnceLock::new();
    T.get_or_init(|| {
        let n = ((TABLE_MAX - TABLE_MIN) / TABLE_STEP).round() as usize + 1;
        let u: Vec<f64> = (0..n).map(|i| TABLE_MIN + i as f64 * TABLE_STEP).collect();
        (0..3)
            .map(|k| {
                let v: Vec<f64> = u
                    .iter()
                    .map(|&x| {
                        windows_at(x.abs())
                            .into_iter()
                            .find(|w| w.0 == k)
                            .map_or(0.0, |w| w.1)
                    })
                    .collect();
                (0..=MAX_ORDER)
                    .map(|m| numerics::derivative(&u, &v, m).expect("table grid"))
                    .collect()
            })
            .collect()
    })
}

/// `Ψ_k^{(m)}(u)` for `u >= 0`.
fn window_derivative(k: usize, m: usize, u: f64) -> f64 {
    let (table, shift) = if k <= 2 { (k, 0.0) } else { (2, (k - 2) as f64) };
    let x = u - shift;
    if !(TABLE_MIN..=TABLE_MAX).contains(&x) {
        return 0.0;
    }
    let t = window_tables();
    let pos = (x - TABLE_MIN) / TABLE_STEP;
    let i = (pos.floor() as usize).min(t[table][m].len() - 2);
    let w = pos - i as f64;
    let row = &t[table][m];
    row[i] * (1.0 - w) + row[i + 1] * w
}

/// One stored atom `g_{j,k}`, sampled on a contiguous range of nodes with `t >= 0`;
/// the negative half is its mirror image.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomRecord {
    pub j: usize,
    pub k: usize,
    /// Index of the first stored node.
    pub start: usize,
    pub values: Vec<f64>,
}

impl AtomRecord {
    /// Add `c` times the atom to full-grid samples `out`.
    fn accumulate(&self, out: &mut [f64], c: f64) {
        let n = out.len();
        for (off, v) in self.values.iter().enumerate() {
            let i = self.start + off;
            out[i] += c * v;
            if n - 1 - i != i {
                out[n - 1 - i] += c * v;
            }
        }
    }

    /// The atom as a profile on the full grid.
    pub fn profile(&self, grid: &Grid1D) -> Result<RadialProfile> {
        let mut v = vec![0.0; grid.len()];
        self.accumulate(&mut v, 1.0);
        RadialProfile::new(grid.clone(), v)
    }
}

/// Coefficients, atoms and residual history of a decomposition.
#[derive(Debug, Clone)]
pub struct AtomicDecomposition {
    pub coefficients: CoefficientGrid,
    pub atoms: Vec<AtomRecord>,
    pub spec: AtomSpec,
    pub grid: Grid1D,
    /// Relative weighted `L_{max(1,p)}` residual after levels `0..=j`.
    pub level_residuals: Vec<f64>,
    /// Final relative residual.
    pub residual: f64,
}

impl AtomicDecomposition {
    /// `Σ s_{j,k} g_{j,k}` on the grid.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.len()];
        for a in &self.atoms {
            a.accumulate(&mut out, self.coefficients.get(a.j, a.k));
        }
        out
    }

    /// CSV `j,k,coefficient` preceded by a manifest comment line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "# template=exp-bump-window spec=L{},M{},s{},p{},{:?}",
            self.spec.l, self.spec.m, self.spec.s, self.spec.p, self.spec.flavor
        )?;
        writeln!(w, "j,k,coefficient")?;
        for (j, k, v) in self.coefficients.entries() {
            writeln!(w, "{j},{k},{v:e}")?;
        }
        Ok(())
    }
}

/// Decompose `g` into even `L`-atoms over levels `0..=levels` (default: all resolved bands).
///
/// `d` fixes the weight of the residual norm.
pub fn decompose_profile(
    g: &RadialProfile,
    spec: &AtomSpec,
    d: usize,
    levels: Option<usize>,
) -> Result<AtomicDecomposition> {
    if spec.l > MAX_ORDER {
        return Err(Error::Unsupported(format!("regularity L <= {MAX_ORDER}")));
    }
    let grid = g.grid().clone();
    let rp = spec.p.max(1.0);
    let base = weighted_lp_samples(grid.nodes(), g.values(), rp, d)?;
    if base == 0.0 {
        return Ok(AtomicDecomposition {
            coefficients: CoefficientGrid::new(),
            atoms: Vec::new(),
            spec: *spec,
            grid,
            level_residuals: vec![0.0],
            residual: 0.0,
        });
    }
    let spectrum = DyadicBandSpectrum::new(g)?;
    let top = match levels {
        Some(j) if j > spectrum.top_level() => {
            return Err(Error::Resolution(format!(
                "grid resolves levels up to {}, requested {j}",
                spectrum.top_level()
            )))
        }
        Some(j) => j,
        None => spectrum.top_level(),
    };
    let x = grid.nodes();
    let n = x.len();
    let half = grid.nonnegative_range();
    let mut coefficients = CoefficientGrid::new();
    let mut atoms = Vec::new();
    let mut partial = vec![0.0; n];
    let mut level_residuals = Vec::with_capacity(top + 1);
    for j in 0..=top {
        let bands: Vec<Vec<f64>> = (0..=spec.l).map(|m| spectrum.band(j, m)).collect();
        let scale = 2f64.powi(j as i32);
        let len = AtomInterval::for_annulus(j, 1).length();
        // per-k accumulators: sup of |piece^{(n)}| |I|^n and the piece on t >= 0
        let mut sups: Vec<f64> = Vec::new();
        let mut pieces: Vec<(usize, Vec<f64>)> = Vec::new();
        for i in half.clone() {
            let t = x[i];
            let u = scale * t;
            for (k, psi) in windows_at(u) {
                if sups.len() <= k {
                    sups.resize(k + 1, 0.0);
                    pieces.resize(k + 1, (usize::MAX, Vec::new()));
                }
                let mut worst = (bands[0][i] * psi).abs();
                for order in 1..=spec.l {
                    let mut acc = 0.0;
                    for m in 0..=order {
                        let w = if m == order {
                            psi
                        } else {
                            scale.powi((order - m) as i32) * window_derivative(k, order - m, u)
                        };
                        acc += binomial(order, m) * bands[m][i] * w;
                    }
                    worst = worst.max(acc.abs() * len.powi(order as i32));
                }
                sups[k] = sups[k].max(worst);
                let entry = &mut pieces[k];
                if entry.0 == usize::MAX {
                    entry.0 = i;
                }
                let offset = i - entry.0;
                if entry.1.len() <= offset {
                    entry.1.resize(offset + 1, 0.0);
                }
                entry.1[offset] = bands[0][i] * psi;
            }
        }
        for (k, (first, vals)) in pieces.into_iter().enumerate() {
            let s = sups.get(k).copied().unwrap_or(0.0);
            if first == usize::MAX || s == 0.0 || vals.iter().all(|v| *v == 0.0) {
                continue;
            }
            let atom = AtomRecord { j, k, start: first, values: vals.iter().map(|v| v / s).collect() };
            atom.accumulate(&mut partial, s);
            coefficients.set(j, k, s);
            atoms.push(atom);
        }
        let resid: Vec<f64> = g.values().iter().zip(&partial).map(|(a, b)| a - b).collect();
        level_residuals.push(weighted_lp_samples(x, &resid, rp, d)? / base);
        // coarse levels of a concentrated profile may drift before the fine ones take over
        let best = level_residuals.iter().cloned().fold(f64::INFINITY, f64::min);
        let last = *level_residuals.last().unwrap();
        if last > 2.0 * best && last > 1e-10 {
            return Err(Error::Decomposition(format!(
                "residual grew from {best:e} to {last:e} by level {j}"
            )));
        }
    }
    let residual = *level_residuals.last().unwrap();
    Ok(AtomicDecomposition { coefficients, atoms, spec: *spec, grid, level_residuals, residual })
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn even_spec(spec: &AtomSpec) -> Result<()> {
    if spec.flavor != AtomFlavor::Even1D {
        return Err(Error::InvalidParameter("trace-space norms use even one-dimensional atoms".into()));
    }
    Ok(())
}

/// Surrogate for `‖g | TB^s_{p,q}(R, L, d)‖`: the `b^s_{p,q,d}` norm of the
/// constructed decomposition, an upper bound for the infimum.
pub fn tb_norm(g: &RadialProfile, params: &SpaceParams, spec: &AtomSpec) -> Result<f64> {
    even_spec(spec)?;
    if !spec.b_admissible(params.d)? {
        return Err(Error::InvalidParameter(format!(
            "L = {}, M = {} not admissible for s = {}, p = {}",
            spec.l, spec.m, spec.s, spec.p
        )));
    }
    let dec = decompose_profile(g, spec, params.d, None)?;
    seq_norm_bspqd(&dec.coefficients, params)
}

/// Surrogate for `‖g | TF^s_{p,q}(R, L, d)‖`, using `f^s_{p,q,d}`.
pub fn tf_norm(g: &RadialProfile, params: &SpaceParams, spec: &AtomSpec) -> Result<f64> {
    even_spec(spec)?;
    if !spec.f_admissible(params.q, params.d)? {
        return Err(Error::InvalidParameter(format!(
            "L = {}, M = {} not admissible for s = {}, p = {}, q = {}",
            spec.l, spec.m, spec.s, spec.p, params.q
        )));
    }
    let dec = decompose_profile(g, spec, params.d, None)?;
    seq_norm_fspqd(&dec.coefficients, params)
}

/// Both sequence norms of one decomposition, `(b, f)`.
pub fn tb_tf_norms(g: &RadialProfile, params: &SpaceParams, spec: &AtomSpec) -> Result<(f64, f64)> {
    even_spec(spec)?;
    let dec = decompose_profile(g, spec, params.d, None)?;
    Ok((seq_norm_bspqd(&dec.coefficients, params)?, seq_norm_fspqd(&dec.coefficients, params)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atoms::{template_even_atom, validate_even_atom};
    use crate::bump::psi_cutoff;

    fn spec(l: usize, s: f64, p: f64) -> AtomSpec {
        AtomSpec::new(l, -1, s, p, AtomFlavor::Even1D).unwrap()
    }

    #[test]
    fn windows_sum_to_one() {
        for i in 0..2000 {
            let u = i as f64 * 0.00731;
            let s: f64 = windows_at(u).iter().map(|w| w.1).sum();
            assert!((s - 1.0).abs() < 1e-14);
            for (k, _) in windows_at(u) {
                let (lo, hi) = AtomInterval::for_annulus(0, k).support_window();
                assert!(u >= lo && u <= hi, "k={k} u={u}");
            }
        }
    }

    #[test]
    fn window_table_derivative_matches_difference_quotient() {
        for &u in &[0.3, 1.1, 2.2, 5.7] {
            let k = windows_at(u)[0].0;
            let e = 1e-6;
            let val = |x: f64| windows_at(x).into_iter().find(|w| w.0 == k).map_or(0.0, |w| w.1);
            let fd = (val(u + e) - val(u - e)) / (2.0 * e);
            assert!((fd - window_derivative(k, 1, u)).abs() < 1e-5, "u={u}");
        }
    }

    #[test]
    fn zero_profile() {
        let grid = Grid1D::uniform(1.0 / 64.0, 4.0).unwrap();
        let z = RadialProfile::from_fn(&grid, |_| 0.0).unwrap();
        let d = decompose_profile(&z, &spec(1, 0.5, 2.0), 2, None).unwrap();
        assert!(d.coefficients.is_zero() && d.atoms.is_empty());
        assert_eq!(d.residual, 0.0);
    }

    #[test]
    fn atoms_validate_and_reconstruct() {
        let grid = Grid1D::uniform(1.0 / 128.0, 6.0).unwrap();
        let g = RadialProfile::from_fn(&grid, |t| psi_cutoff(t) * (1.0 + t * t)).unwrap();
        let sp = spec(2, 1.0, 2.0);
        let dec = decompose_profile(&g, &sp, 2, None).unwrap();
        assert!(dec.residual < 1e-8, "{}", dec.residual);
        let rec = dec.reconstruct();
        let err = rec.iter().zip(g.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8);
        // the finite-difference validator needs about 32 nodes per unit of 2^j t
        for a in dec.atoms.iter().filter(|a| a.j <= 2) {
            let p = a.profile(&grid).unwrap();
            let rep = validate_even_atom(&p, AtomInterval::for_annulus(a.j, a.k), 2).unwrap();
            assert!(rep.support_ok, "atom ({}, {}) support", a.j, a.k);
            assert!(rep.constant <= 1.0 + 1e-6, "atom ({}, {}) constant {}", a.j, a.k, rep.constant);
        }
    }

    #[test]
    fn residual_decays_across_levels() {
        let grid = Grid1D::uniform(1.0 / 512.0, 4.0).unwrap();
        let g = RadialProfile::from_fn(&grid, psi_cutoff).unwrap();
        let dec = decompose_profile(&g, &spec(1, 0.5, 2.0), 2, Some(8)).unwrap();
        let r = &dec.level_residuals;
        let rate = (r[0] / r[8].max(1e-300)).powf(1.0 / 8.0);
        assert!(rate >= 2.0, "rate {rate}, residuals {r:?}");
    }

    #[test]
    fn single_atom_concentrates() {
        let grid = Grid1D::uniform(1.0 / 256.0, 6.0).unwrap();
        let i = AtomInterval::for_annulus(2, 3);
        let a = template_even_atom(i, 1, &grid).unwrap();
        let dec = decompose_profile(&a, &spec(1, 0.5, 2.0), 2, None).unwrap();
        // the largest coefficient sits at annulus 3 or its neighbours on the levels around 2
        let (j, k, _) = dec
            .coefficients
            .entries()
            .fold((0, 0, 0.0), |b, e| if e.2.abs() > b.2 { e } else { b });
        let centre = (k as f64 + 0.5) * 2f64.powi(-(j as i32));
        assert!((centre - 0.875).abs() <= 0.5, "peak at ({j},{k})");
        assert!(dec.residual < 1e-8);
    }

    #[test]
    fn tb_equals_tf_needs_admissible_spec() {
        let grid = Grid1D::uniform(1.0 / 64.0, 4.0).unwrap();
        let g = RadialProfile::from_fn(&grid, psi_cutoff).unwrap();
        let par = SpaceParams::b(1.5, 2.0, 2.0, 2).unwrap();
        assert!(tb_norm(&g, &par, &spec(1, 1.5, 2.0)).is_err());
        let v = tb_norm(&g, &par, &spec(2, 1.5, 2.0)).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn dilation_law() {
        let (s, p, d) = (1.0, 2.0, 2);
        let par = SpaceParams::b(s, p, 2.0, d).unwrap();
        let sp = spec(2, s, p);
        let mut vals = Vec::new();
        for m in 0..=5 {
            let lam = 2f64.powi(-m);
            let h = lam / 64.0;
            let grid = Grid1D::uniform(h, 4.0 * lam + 8.0).unwrap();
            let g = RadialProfile::from_fn(&grid, |t| psi_cutoff(t / lam)).unwrap();
            vals.push(tb_norm(&g, &par, &sp).unwrap());
        }
        let e = s - d as f64 / p;
        let norm: Vec<f64> = vals.iter().enumerate().map(|(m, v)| v * 2f64.powf(-(m as f64) * e)).collect();
        let hi = norm.iter().cloned().fold(0.0, f64::max);
        let lo = norm.iter().cloned().fold(f64::INFINITY, f64::min);
        // a common constant C with every value in [C/2, 2C]
        assert!(hi / lo <= 4.0, "{norm:?}");
    }
}
