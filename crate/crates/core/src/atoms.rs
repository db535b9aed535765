//! Atom specifications and validators for even one-dimensional atoms and
//! `(s,p)_{L,M}`-atoms on balls.

use std::sync::OnceLock;

use crate::bump::bump;
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::numerics::{self, omega};
use crate::profile::RadialProfile;
use crate::spaces::{sigma_p, sigma_pq};

/// Which atom notion an [`AtomSpec`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomFlavor {
    Even1D,
    OneL,
    SpLM,
}

/// Regularity `L`, moment order `M` and the normalization `(s, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomSpec {
    pub l: usize,
    pub m: i32,
    pub s: f64,
    pub p: f64,
    pub flavor: AtomFlavor,
}

impl AtomSpec {
    pub fn new(l: usize, m: i32, s: f64, p: f64, flavor: AtomFlavor) -> Result<Self> {
        if m < -1 {
            return Err(Error::InvalidParameter(format!("M must be >= -1, got {m}")));
        }
        if !(p > 0.0) {
            return Err(Error::InvalidParameter(format!("p must be positive, got {p}")));
        }
        Ok(Self { l, m, s, p, flavor })
    }

    /// Smallest admissible even-atom spec for smoothness `s` in the `B` scale.
    pub fn minimal_even(s: f64, p: f64, d: usize) -> Result<Self> {
        let l = (s.floor() + 1.0).max(0.0) as usize;
        let m = ((sigma_p(p, d)? - s).floor() as i32).max(-1);
        Self::new(l, m, s, p, AtomFlavor::Even1D)
    }

    fn l_ok(&self) -> bool {
        self.l as f64 >= (self.s.floor() + 1.0).max(0.0)
    }

    /// `L >= max(0, [s]+1)` and `M >= max([σ_p(d) - s], -1)`.
    pub fn b_admissible(&self, d: usize) -> Result<bool> {
        let m = ((sigma_p(self.p, d)? - self.s).floor()).max(-1.0);
        Ok(self.l_ok() && self.m as f64 >= m)
    }

    /// `L >= max(0, [s]+1)` and `M >= max([σ_{p,q}(d) - s], -1)`.
    pub fn f_admissible(&self, q: f64, d: usize) -> Result<bool> {
        let m = ((sigma_pq(self.p, q, d)? - self.s).floor()).max(-1.0);
        Ok(self.l_ok() && self.m as f64 >= m)
    }
}

/// The interval `I` of an even atom: `[-a, a]` or `[-b,-a] ∪ [a,b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AtomInterval {
    Centered { a: f64 },
    Pair { a: f64, b: f64 },
}

impl AtomInterval {
    /// Interval attached to the annulus `(j, k)`.
    pub fn for_annulus(j: usize, k: usize) -> Self {
        let h = 2f64.powi(-(j as i32));
        if k == 0 {
            AtomInterval::Centered { a: h }
        } else {
            AtomInterval::Pair { a: k as f64 * h, b: (k + 1) as f64 * h }
        }
    }

    /// Lebesgue measure `|I|`.
    pub fn length(&self) -> f64 {
        match *self {
            AtomInterval::Centered { a } => 2.0 * a,
            AtomInterval::Pair { a, b } => 2.0 * (b - a),
        }
    }

    /// Admissible support as radii `(inner, outer)` of `|t|`.
    pub fn support_window(&self) -> (f64, f64) {
        match *self {
            AtomInterval::Centered { a } => (0.0, 1.5 * a),
            AtomInterval::Pair { a, b } => ((3.0 * a - b) / 2.0, (3.0 * b - a) / 2.0),
        }
    }
}

/// `sup |b^{(n)}|` of the standard bump for `n = 0..=MAX_TEMPLATE_ORDER`.
pub const MAX_TEMPLATE_ORDER: usize = 6;

pub fn bump_derivative_sups() -> &'static [f64] {
    static SUPS: OnceLock<Vec<f64>> = OnceLock::new();
    SUPS.get_or_init(|| {
        let h = 1.0 / 8192.0;
        let x: Vec<f64> = (-8192..=8192).map(|i| i as f64 * h).collect();
        let v: Vec<f64> = x.iter().map(|&u| bump(u)).collect();
        (0..=MAX_TEMPLATE_ORDER)
            .map(|n| {
                numerics::derivative(&x, &v, n)
                    .expect("fine grid")
                    .iter()
                    .fold(0.0_f64, |m, d| m.max(d.abs()))
            })
            .collect()
    })
}

/// Profile of the template even `L`-atom for `interval`, sampled on `grid`.
pub fn template_even_atom(interval: AtomInterval, l: usize, grid: &Grid1D) -> Result<RadialProfile> {
    if l > MAX_TEMPLATE_ORDER {
        return Err(Error::Unsupported(format!("template atoms up to L = {MAX_TEMPLATE_ORDER}")));
    }
    let sups = bump_derivative_sups();
    let (center, width) = match interval {
        AtomInterval::Centered { a } => (0.0, 1.5 * a),
        AtomInterval::Pair { a, b } => (0.5 * (a + b), b - a),
    };
    let len = interval.length();
    // A · M_n · width^{-n} <= |I|^{-n}
    let amp = 0.99
        * (0..=l)
            .map(|n| (width / len).powi(n as i32) / sups[n])
            .fold(f64::INFINITY, f64::min);
    RadialProfile::from_fn(grid, |t| amp * bump((t - center) / width))
}

/// Result of [`validate_even_atom`].
#[derive(Debug, Clone, PartialEq)]
pub struct EvenAtomReport {
    pub ok: bool,
    /// `sup |g^{(n)}| · |I|^n` for `n = 0..=L`.
    pub derivative_ratios: Vec<f64>,
    /// Smallest `C` such that `g / C` satisfies all derivative bounds.
    pub constant: f64,
    pub first_violation: Option<usize>,
    pub support_ok: bool,
    /// Largest `|t|` outside the admissible window carrying a non-zero value.
    pub support_excess: f64,
}

/// Tolerance applied to sampled derivative ratios.
pub const RATIO_TOLERANCE: f64 = 1e-6;

/// Check the derivative bounds and the support inclusion of an even `L`-atom.
pub fn validate_even_atom(g: &RadialProfile, interval: AtomInterval, l: usize) -> Result<EvenAtomReport> {
    let len = interval.length();
    let x = g.nodes();
    let v = g.values();
    let half = g.grid().nonnegative_range();
    let mut ratios = Vec::with_capacity(l + 1);
    for n in 0..=l {
        let need = numerics::stencil_size(n);
        if x.len() < need {
            return Err(Error::Resolution(format!("order {n} needs {need} nodes")));
        }
        let sup = half
            .clone()
            .map(|i| numerics::derivative_at(x, v, n, i).abs())
            .fold(0.0_f64, f64::max);
        ratios.push(sup * len.powi(n as i32));
    }
    let first_violation = ratios.iter().position(|r| *r > 1.0 + RATIO_TOLERANCE);
    let (lo, hi) = interval.support_window();
    let mut excess = 0.0_f64;
    for i in half {
        let t = x[i];
        if v[i] != 0.0 && (t < lo || t > hi) {
            excess = excess.max(if t < lo { lo - t } else { t - hi });
        }
    }
    let support_ok = excess == 0.0;
    let constant = ratios.iter().copied().fold(0.0, f64::max);
    Ok(EvenAtomReport {
        ok: first_violation.is_none() && support_ok,
        derivative_ratios: ratios,
        constant,
        first_violation,
        support_ok,
        support_excess: excess,
    })
}

/// Samples of a function on a uniform tensor grid in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    d: usize,
    n: usize,
    h: f64,
    origin: Vec<f64>,
    values: Vec<f64>,
}

impl GridFunction {
    /// Sample `f` on `n^d` nodes covering the cube `center ± half_width`.
    pub fn from_fn(d: usize, center: &[f64], half_width: f64, n: usize, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        if !(1..=3).contains(&d) || center.len() != d {
            return Err(Error::InvalidDimension(d));
        }
        if n < 3 {
            return Err(Error::Resolution("tensor grid needs n >= 3".into()));
        }
        let h = 2.0 * half_width / (n - 1) as f64;
        let origin: Vec<f64> = center.iter().map(|c| c - half_width).collect();
        let total = n.pow(d as u32);
        let mut values = Vec::with_capacity(total);
        let mut x = vec![0.0; d];
        for idx in 0..total {
            let mut r = idx;
            for a in (0..d).rev() {
                x[a] = origin[a] + (r % n) as f64 * h;
                r /= n;
            }
            values.push(f(&x));
        }
        Ok(Self { d, n, h, origin, values })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Coordinates of the node with flat index `idx`.
    pub fn point(&self, idx: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.d];
        let mut r = idx;
        for a in (0..self.d).rev() {
            x[a] = self.origin[a] + (r % self.n) as f64 * self.h;
            r /= self.n;
        }
        x
    }

    /// Partial derivative of the given order along one axis.
    pub fn partial(&self, axis: usize, order: usize) -> Result<Self> {
        if order == 0 {
            return Ok(self.clone());
        }
        let n = self.n;
        let stride = n.pow((self.d - 1 - axis) as u32);
        let coords: Vec<f64> = (0..n).map(|i| i as f64 * self.h).collect();
        let mut out = vec![0.0; self.values.len()];
        let mut line = vec![0.0; n];
        for start in 0..self.values.len() {
            if !(start / stride).is_multiple_of(n) {
                continue;
            }
            for (i, slot) in line.iter_mut().enumerate() {
                *slot = self.values[start + i * stride];
            }
            let dl = numerics::derivative(&coords, &line, order)?;
            for (i, v) in dl.into_iter().enumerate() {
                out[start + i * stride] = v;
            }
        }
        Ok(Self { values: out, ..self.clone() })
    }

    /// `D^α` as successive one-dimensional differences.
    pub fn derivative(&self, alpha: &[usize]) -> Result<Self> {
        let mut g = self.clone();
        for (axis, &o) in alpha.iter().enumerate() {
            g = g.partial(axis, o)?;
        }
        Ok(g)
    }

    /// `∫ a(y) (y - c)^α dy` by the tensor trapezoid rule.
    pub fn moment(&self, alpha: &[usize], c: &[f64]) -> f64 {
        let n = self.n;
        let mut acc = Vec::with_capacity(self.values.len());
        for (idx, v) in self.values.iter().enumerate() {
            let mut w = self.h.powi(self.d as i32);
            let mut mono = 1.0;
            let mut r = idx;
            for a in (0..self.d).rev() {
                let i = r % n;
                r /= n;
                if i == 0 || i == n - 1 {
                    w *= 0.5;
                }
                let y = self.origin[a] + i as f64 * self.h - c[a];
                mono *= y.powi(alpha[a] as i32);
            }
            acc.push(w * mono * v);
        }
        numerics::pairwise_sum(&acc)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// All multi-indices `α ∈ N^d` with `|α| <= order`, in graded order.
pub fn multi_indices(d: usize, order: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for total in 0..=order {
        let mut cur = vec![0; d];
        fill(&mut out, &mut cur, 0, total);
    }
    out
}

fn fill(out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>, pos: usize, left: usize) {
    if pos == cur.len() - 1 {
        cur[pos] = left;
        out.push(cur.clone());
        return;
    }
    for v in (0..=left).rev() {
        cur[pos] = v;
        fill(out, cur, pos + 1, left - v);
    }
}

/// A ball `Q` given by its center and diameter `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub diameter: f64,
}

impl Ball {
    pub fn volume(&self) -> f64 {
        let d = self.center.len();
        omega(d) / d as f64 * (0.5 * self.diameter).powi(d as i32)
    }
}

/// Result of [`validate_spl_atom`].
#[derive(Debug, Clone, PartialEq)]
pub struct SplAtomReport {
    pub ok: bool,
    pub support_ok: bool,
    /// `sup |D^α a| / r^{s-|α|-d/p}` per multi-index.
    pub derivative_ratios: Vec<(Vec<usize>, f64)>,
    /// Moments `∫ a(y)(y-c)^α dy`; `None` when `M = -1`.
    pub moments: Option<Vec<(Vec<usize>, f64)>>,
    pub moment_tolerance: f64,
    pub moments_ok: bool,
}

/// Check support in `(r/2)Q`, the derivative bounds and the vanishing moments.
pub fn validate_spl_atom(a: &GridFunction, q: &Ball, spec: &AtomSpec) -> Result<SplAtomReport> {
    let d = a.dim();
    if q.center.len() != d {
        return Err(Error::InvalidDimension(q.center.len()));
    }
    let r = q.diameter;
    // (r/2)Q for a ball of diameter r is the concentric ball of radius r
    let support_ok = a
        .values()
        .iter()
        .enumerate()
        .all(|(i, v)| *v == 0.0 || crate::covering::dist(&a.point(i), &q.center) < r);
    let (s, dp) = match spec.flavor {
        AtomFlavor::OneL => (0.0, 0.0),
        _ => (spec.s, d as f64 / spec.p),
    };
    let mut ratios = Vec::new();
    for alpha in multi_indices(d, spec.l) {
        let k: usize = alpha.iter().sum();
        let bound = match spec.flavor {
            AtomFlavor::OneL => 1.0,
            _ => r.powf(s - k as f64 - dp),
        };
        let sup = a.derivative(&alpha)?.max_abs();
        ratios.push((alpha, sup / bound));
    }
    let tol = 1e-6 * r.powf(spec.s - d as f64 / spec.p) * q.volume();
    let (moments, moments_ok) = if spec.m < 0 {
        (None, true)
    } else {
        let ms: Vec<(Vec<usize>, f64)> = multi_indices(d, spec.m as usize)
            .into_iter()
            .map(|al| {
                let v = a.moment(&al, &q.center);
                (al, v)
            })
            .collect();
        let ok = ms.iter().all(|(_, v)| v.abs() <= tol);
        (Some(ms), ok)
    };
    let deriv_ok = ratios.iter().all(|(_, v)| *v <= 1.0 + RATIO_TOLERANCE);
    Ok(SplAtomReport {
        ok: support_ok && deriv_ok && moments_ok,
        support_ok,
        derivative_ratios: ratios,
        moments,
        moment_tolerance: tol,
        moments_ok,
    })
}

/// Template `(s,p)_{L,0}` atom on `q`: `A r^{s-d/p} y₁ b(|y|)` with `y = (x - c)/ρ`, odd in `x₁`.
///
/// The amplitude is fitted against the derivative sups of the template measured on
/// a fine reference grid, with a 2% margin.
pub fn template_spl_atom(q: &Ball, spec: &AtomSpec) -> Result<impl Fn(&[f64]) -> f64> {
    let d = q.center.len();
    let rho = 0.95 * q.diameter;
    let shape = |y: &[f64]| y[0] * bump(crate::radial::norm(y));
    let reference = GridFunction::from_fn(d, &vec![0.0; d], 1.0, if d == 3 { 61 } else { 201 }, shape)?;
    let r = q.diameter;
    let mut amp = f64::INFINITY;
    for alpha in multi_indices(d, spec.l) {
        let k = alpha.iter().sum::<usize>() as i32;
        let sup = reference.derivative(&alpha)?.max_abs();
        if sup > 0.0 {
            // A r^{s-d/p} ρ^{-|α|} sup <= r^{s-|α|-d/p}
            amp = amp.min((rho / r).powi(k) / sup);
        }
    }
    let amp = 0.98 * amp * r.powf(spec.s - d as f64 / spec.p);
    let c = q.center.clone();
    Ok(move |x: &[f64]| {
        let y: Vec<f64> = x.iter().zip(&c).map(|(a, b)| (a - b) / rho).collect();
        amp * shape(&y)
    })
}
