//! Pointwise trace `tr f = f(·, 0, …, 0)` and radial extension `ext g = g(|·|)`,
//! with the `C^m` norms on both sides.

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::numerics;
use crate::profile::RadialProfile;
use crate::radial::{norm, RadialField};

/// Relative tolerance of the radiality check on sampled fields.
pub const RADIALITY_TOLERANCE: f64 = 1e-8;
/// Absolute threshold for the numerical support.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

/// Samples of a function on the tensor grid `axis^d`, row-major in `x_1, …, x_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSamples {
    pub axis: Grid1D,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Profile(RadialField),
    Sampled(TensorSamples),
}

/// A radial function on `R^d`, either backed by its profile or by tensor samples.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGridField {
    d: usize,
    repr: Repr,
    provenance: String,
    origin_kink: bool,
}

impl RadialGridField {
    /// Sample `f` on `axis^d`. The axis must be even and contain 0.
    pub fn sample(d: usize, axis: &Grid1D, f: impl Fn(&[f64]) -> f64, provenance: &str) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        if !axis.is_even() || axis.index_of(0.0).is_none() {
            return Err(Error::InvalidInput("sampling axis must be even and contain 0".into()));
        }
        let n = axis.len();
        let total = n.checked_pow(d as u32).filter(|t| *t <= 1 << 26).ok_or_else(|| {
            Error::Resolution(format!("{n}^{d} samples exceed the tensor-grid budget"))
        })?;
        let nodes = axis.nodes();
        let mut x = vec![0.0; d];
        let mut values = Vec::with_capacity(total);
        for flat in 0..total {
            let mut rem = flat;
            for l in (0..d).rev() {
                x[l] = nodes[rem % n];
                rem /= n;
            }
            let v = f(&x);
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite sample at {x:?}")));
            }
            values.push(v);
        }
        Ok(Self {
            d,
            repr: Repr::Sampled(TensorSamples { axis: axis.clone(), values }),
            provenance: provenance.to_string(),
            origin_kink: false,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn is_profile_backed(&self) -> bool {
        matches!(self.repr, Repr::Profile(_))
    }

    /// The backing profile, if any.
    pub fn profile(&self) -> Option<&RadialProfile> {
        match &self.repr {
            Repr::Profile(f) => Some(f.profile()),
            Repr::Sampled(_) => None,
        }
    }

    pub fn samples(&self) -> Option<&TensorSamples> {
        match &self.repr {
            Repr::Sampled(s) => Some(s),
            Repr::Profile(_) => None,
        }
    }

    /// `g'(0+) != 0`: the extension is not differentiable at the origin.
    pub fn has_origin_kink(&self) -> bool {
        self.origin_kink
    }

    /// Value at `x`; sampled fields answer only at grid points.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.d {
            return Err(Error::InvalidInput(format!("point has {} coordinates, field is {}-dimensional", x.len(), self.d)));
        }
        match &self.repr {
            Repr::Profile(f) => Ok(f.eval(x)),
            Repr::Sampled(s) => {
                let n = s.axis.len();
                let mut flat = 0;
                for &c in x {
                    let i = s.axis.index_of(c).ok_or_else(|| Error::InvalidInput(format!("{c} is not a grid node")))?;
                    flat = flat * n + i;
                }
                Ok(s.values[flat])
            }
        }
    }

    /// Smallest closed annulus `{a <= |x| <= b}` containing the numerical support.
    pub fn support_annulus(&self) -> Support {
        match &self.repr {
            Repr::Profile(f) => support_annulus(f.profile()),
            Repr::Sampled(s) => {
                let n = s.axis.len();
                let nodes = s.axis.nodes();
                let mut radii = Vec::new();
                let mut x = vec![0.0; self.d];
                for (flat, v) in s.values.iter().enumerate() {
                    if v.abs() > SUPPORT_THRESHOLD {
                        let mut rem = flat;
                        for l in (0..self.d).rev() {
                            x[l] = nodes[rem % n];
                            rem /= n;
                        }
                        radii.push(norm(&x));
                    }
                }
                let smallest = nodes[s.axis.nonnegative_range()].first().copied().unwrap_or(0.0);
                support_from_radii(&radii, smallest)
            }
        }
    }
}

/// `ext g`: `x ↦ g(|x|)`, linear interpolation between profile nodes.
pub fn extend(g: &RadialProfile, d: usize) -> Result<RadialGridField> {
    let field = RadialField::new(g.clone(), d)?;
    // for even smooth g the one-sided slope is O(h^3); a kink keeps it O(1)
    let origin_kink = origin_slope(g).is_some_and(|(slope, scale, h)| {
        slope.abs() > scale.max(f64::MIN_POSITIVE) * (10.0 * h * h).max(1e-6)
    });
    Ok(RadialGridField { d, repr: Repr::Profile(field), provenance: "ext".into(), origin_kink })
}

/// One-sided slope at `0+`, the largest chord slope, and the spacing at 0.
fn origin_slope(g: &RadialProfile) -> Option<(f64, f64, f64)> {
    let i0 = g.grid().index_of(0.0)?;
    let x = g.nodes();
    let v = g.values();
    if i0 + 2 >= x.len() {
        return None;
    }
    let w = numerics::fd_weights(0.0, &x[i0..i0 + 3], 1);
    let slope: f64 = w.iter().zip(&v[i0..i0 + 3]).map(|(a, b)| a * b).sum();
    let scale = x
        .windows(2)
        .zip(v.windows(2))
        .map(|(t, u)| ((u[1] - u[0]) / (t[1] - t[0])).abs())
        .fold(0.0, f64::max);
    Some((slope, scale, x[i0 + 1]))
}

/// `tr f`: restriction to the `x_1` axis.
pub fn trace(f: &RadialGridField) -> Result<RadialProfile> {
    match &f.repr {
        Repr::Profile(field) => Ok(field.profile().clone()),
        Repr::Sampled(s) => {
            check_radial(f.d, s)?;
            let n = s.axis.len();
            let i0 = s.axis.index_of(0.0).expect("axis contains 0");
            // stride of x_1 is n^{d-1}; the other coordinates sit at index i0
            let mut rest = 0;
            for _ in 1..f.d {
                rest = rest * n + i0;
            }
            let stride = n.pow(f.d as u32 - 1);
            let values = (0..n).map(|i| s.values[i * stride + rest]).collect();
            Ok(RadialProfile::new(s.axis.clone(), values)?.with_dim(f.d))
        }
    }
}

/// Evenness along every axis, symmetry under coordinate swaps, and agreement with the
/// axis value wherever `|x|` is itself an axis node.
fn check_radial(d: usize, s: &TensorSamples) -> Result<()> {
    let n = s.axis.len();
    let nodes = s.axis.nodes();
    let scale = s.values.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    let tol = RADIALITY_TOLERANCE * scale;
    let i0 = s.axis.index_of(0.0).expect("axis contains 0");
    let stride = n.pow(d as u32 - 1);
    let mut axis_offset = 0;
    for _ in 1..d {
        axis_offset = axis_offset * n + i0;
    }
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0; d];
    let flat_of = |idx: &[usize]| idx.iter().fold(0, |acc, i| acc * n + i);
    for (flat, &v) in s.values.iter().enumerate() {
        let mut rem = flat;
        for l in (0..d).rev() {
            idx[l] = rem % n;
            x[l] = nodes[idx[l]];
            rem /= n;
        }
        for l in 0..d {
            let mut m = idx.clone();
            m[l] = n - 1 - idx[l];
            let w = s.values[flat_of(&m)];
            if (v - w).abs() > tol {
                return Err(Error::SymmetryViolation(format!("not even in x_{} at {x:?}: {v} vs {w}", l + 1)));
            }
            if l + 1 < d {
                let mut sw = idx.clone();
                sw.swap(l, l + 1);
                let w = s.values[flat_of(&sw)];
                if (v - w).abs() > tol {
                    return Err(Error::SymmetryViolation(format!(
                        "not symmetric under x_{} <-> x_{} at {x:?}",
                        l + 1,
                        l + 2
                    )));
                }
            }
        }
        let r = norm(&x);
        if let Some(i) = s.axis.index_of(r) {
            let w = s.values[i * stride + axis_offset];
            if (v - w).abs() > tol {
                return Err(Error::SymmetryViolation(format!("value at {x:?} differs from the axis value at |x| = {r}")));
            }
        }
    }
    Ok(())
}

/// Numerical support of a profile or field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    Empty,
    /// `inner = 0` means a ball.
    Annulus { inner: f64, outer: f64 },
}

/// Smallest closed annulus containing the nodes where `|g| > 1e-12`.
pub fn support_annulus(g: &RadialProfile) -> Support {
    let (t, v) = g.half();
    let radii: Vec<f64> = t.iter().zip(v).filter(|(_, v)| v.abs() > SUPPORT_THRESHOLD).map(|(t, _)| *t).collect();
    support_from_radii(&radii, t.first().copied().unwrap_or(0.0))
}

fn support_from_radii(radii: &[f64], smallest_node: f64) -> Support {
    if radii.is_empty() {
        return Support::Empty;
    }
    let lo = radii.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = radii.iter().cloned().fold(0.0, f64::max);
    let inner = if lo <= smallest_node { 0.0 } else { lo };
    Support::Annulus { inner, outer: hi }
}

/// `Σ_{n <= m} sup |g^{(n)}|` over the grid nodes.
pub fn cm_norm_profile(g: &RadialProfile, m: usize) -> Result<f64> {
    let mut total = g.max_abs();
    for order in 1..=m {
        let dv = g.derivative(order)?;
        total += dv.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    }
    Ok(total)
}

/// Multi-indices `α ∈ N^d` with `1 <= |α| <= m`, as lists of differentiated axes.
fn derivative_axes(d: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..m {
        let mut next = Vec::new();
        for a in &frontier {
            let start = a.last().copied().unwrap_or(0);
            for l in start..d {
                let mut b = a.clone();
                b.push(l);
                next.push(b);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// `Σ_{|α| <= m} sup |D^α f|`.
///
/// Profile-backed fields use the chain rule for `m <= 2` on the profile nodes along a
/// fixed set of directions that includes the `x_1` axis; sampled fields use tensor
/// finite differences.
pub fn cm_norm_field(f: &RadialGridField, m: usize) -> Result<f64> {
    match &f.repr {
        Repr::Profile(field) => {
            if m >= 1 && f.origin_kink {
                return Err(Error::OutOfHypothesis("ext g is not differentiable at the origin (g'(0) != 0)".into()));
            }
            if m > 2 {
                return Err(Error::Unsupported("chain-rule C^m norm of fields is implemented for m <= 2".into()));
            }
            chain_rule_norm(field.profile(), f.d, m)
        }
        Repr::Sampled(s) => tensor_fd_norm(s, f.d, m),
    }
}

fn directions(d: usize) -> Vec<Vec<f64>> {
    let mut dirs = vec![];
    let mut e1 = vec![0.0; d];
    e1[0] = 1.0;
    dirs.push(e1);
    for k in 2..=d {
        let c = 1.0 / (k as f64).sqrt();
        let mut v = vec![0.0; d];
        v[..k].iter_mut().for_each(|x| *x = c);
        dirs.push(v);
    }
    // a few generic directions
    for a in [0.3f64, 0.7, 1.1] {
        let mut v: Vec<f64> = (0..d).map(|l| (a * (l + 1) as f64).cos()).collect();
        let r = norm(&v);
        v.iter_mut().for_each(|x| *x /= r);
        dirs.push(v);
    }
    dirs
}

fn chain_rule_norm(g: &RadialProfile, d: usize, m: usize) -> Result<f64> {
    let (t, v) = g.half();
    let r = g.grid().nonnegative_range();
    let d1: Vec<f64> = if m >= 1 { g.derivative(1)?[r.clone()].to_vec() } else { Vec::new() };
    let d2: Vec<f64> = if m >= 2 { g.derivative(2)?[r].to_vec() } else { Vec::new() };
    let alphas = derivative_axes(d, m);
    let mut sups = vec![0.0f64; alphas.len()];
    let dirs = directions(d);
    for (i, &ti) in t.iter().enumerate() {
        for n in &dirs {
            for (a, sup) in alphas.iter().zip(sups.iter_mut()) {
                let val = match a.len() {
                    1 => {
                        if ti == 0.0 {
                            0.0
                        } else {
                            d1[i] * n[a[0]]
                        }
                    }
                    _ => {
                        let (p, q) = (a[0], a[1]);
                        let delta = if p == q { 1.0 } else { 0.0 };
                        if ti == 0.0 {
                            d2[i] * delta
                        } else {
                            d2[i] * n[p] * n[q] + d1[i] / ti * (delta - n[p] * n[q])
                        }
                    }
                };
                *sup = sup.max(val.abs());
            }
        }
    }
    let base = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    Ok(base + sups.iter().sum::<f64>())
}

fn tensor_fd_norm(s: &TensorSamples, d: usize, m: usize) -> Result<f64> {
    let n = s.axis.len();
    if n < numerics::stencil_size(m) {
        return Err(Error::Resolution(format!("{n} axis nodes cannot resolve order {m}")));
    }
    let base = s.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut total = base;
    for a in derivative_axes(d, m) {
        let mut cur = s.values.clone();
        for &axis in &a {
            cur = partial_along(&cur, s.axis.nodes(), d, axis, 1)?;
        }
        total += cur.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    }
    Ok(total)
}

fn partial_along(values: &[f64], nodes: &[f64], d: usize, axis: usize, order: usize) -> Result<Vec<f64>> {
    let n = nodes.len();
    let stride = n.pow((d - 1 - axis) as u32);
    let mut out = vec![0.0; values.len()];
    let mut line = vec![0.0; n];
    for start in 0..values.len() {
        // first element of each line along `axis`
        if !(start / stride).is_multiple_of(n) {
            continue;
        }
        for (k, slot) in line.iter_mut().enumerate() {
            *slot = values[start + k * stride];
        }
        let dl = numerics::derivative(nodes, &line, order)?;
        for (k, v) in dl.into_iter().enumerate() {
            out[start + k * stride] = v;
        }
    }
    Ok(out)
}
