//! Space parameters, the thresholds `σ_p`, `σ_{p,q}` and the membership predicates.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::recip;

/// Besov (`B`) or Lizorkin–Triebel (`F`) scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scale {
    B,
    F,
}

impl FromStr for Scale {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "B" | "b" => Ok(Scale::B),
            "F" | "f" => Ok(Scale::F),
            other => Err(Error::Parse(format!("unknown scale `{other}`"))),
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scale::B => "B",
            Scale::F => "F",
        })
    }
}

/// The tuple `(s, p, q, d, scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceParams {
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub d: usize,
    pub scale: Scale,
}

impl SpaceParams {
    pub fn new(s: f64, p: f64, q: f64, d: usize, scale: Scale) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::InvalidParameter(format!("s must be finite, got {s}")));
        }
        if !(p > 0.0) || !(q > 0.0) {
            return Err(Error::InvalidParameter(format!("need p, q > 0, got p={p}, q={q}")));
        }
        if d == 0 {
            return Err(Error::InvalidDimension(d));
        }
        if scale == Scale::F && p.is_infinite() {
            return Err(Error::InvalidParameter("F-spaces need p < ∞".into()));
        }
        Ok(Self { s, p, q, d, scale })
    }

    pub fn b(s: f64, p: f64, q: f64, d: usize) -> Result<Self> {
        Self::new(s, p, q, d, Scale::B)
    }

    pub fn f(s: f64, p: f64, q: f64, d: usize) -> Result<Self> {
        Self::new(s, p, q, d, Scale::F)
    }

    pub fn inv_p(&self) -> f64 {
        recip(self.p)
    }

    pub fn inv_q(&self) -> f64 {
        recip(self.q)
    }

    /// `s - d/p`.
    pub fn differential_dimension(&self) -> f64 {
        self.s - self.d as f64 * self.inv_p()
    }
}

/// Relative comparison used at the boundary lines of every predicate.
pub(crate) fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn gt(a: f64, b: f64) -> bool {
    a > b && !same(a, b)
}

/// `σ_p(d) = d · max(0, 1/p - 1)`.
pub fn sigma_p(p: f64, d: usize) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!("p must be positive, got {p}")));
    }
    Ok(d as f64 * (recip(p) - 1.0).max(0.0))
}

/// `σ_{p,q}(d) = d · max(0, 1/p - 1, 1/q - 1)`.
pub fn sigma_pq(p: f64, q: f64, d: usize) -> Result<f64> {
    if !(p > 0.0) || !(q > 0.0) {
        return Err(Error::InvalidParameter(format!("need p, q > 0, got p={p}, q={q}")));
    }
    Ok(d as f64 * (recip(p) - 1.0).max(recip(q) - 1.0).max(0.0))
}

/// Three-valued outcome of a predicate that only makes sense under hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    OutOfHypothesis,
}

impl Verdict {
    fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }
}

/// `s > 1/p`, or `s = 1/p` with `q <= 1` (B) / `p <= 1` (F).
pub fn in_u(params: &SpaceParams) -> bool {
    let ip = params.inv_p();
    if gt(params.s, ip) {
        return true;
    }
    same(params.s, ip)
        && match params.scale {
            Scale::B => params.q <= 1.0,
            Scale::F => params.p <= 1.0,
        }
}

/// Bounded functions: `s > d/p`, or `s = d/p` with `q <= 1` (B) / `p <= 1` (F).
pub fn embeds_in_linfty(params: &SpaceParams) -> bool {
    let t = params.d as f64 * params.inv_p();
    if gt(params.s, t) {
        return true;
    }
    same(params.s, t)
        && match params.scale {
            Scale::B => params.q <= 1.0,
            Scale::F => params.p <= 1.0,
        }
}

/// Whether the trace lands in `S'(R)`; out of hypothesis below `σ_p` (B) or `σ_{p,q}` (F).
pub fn trace_in_sprime_verdict(params: &SpaceParams) -> Verdict {
    let sigma = match params.scale {
        Scale::B => sigma_p(params.p, params.d),
        Scale::F => sigma_pq(params.p, params.q, params.d),
    }
    .expect("validated parameters");
    if !gt(params.s, sigma) {
        return Verdict::OutOfHypothesis;
    }
    let line = params.d as f64 * params.inv_p() - 1.0;
    if gt(params.s, line) {
        return Verdict::Holds;
    }
    Verdict::from_bool(
        same(params.s, line)
            && match params.scale {
                Scale::B => params.q <= 1.0,
                Scale::F => params.p <= 1.0,
            },
    )
}

/// Boolean form of [`trace_in_sprime_verdict`]; errors outside the hypotheses.
pub fn trace_lands_in_sprime(params: &SpaceParams) -> Result<bool> {
    match trace_in_sprime_verdict(params) {
        Verdict::Holds => Ok(true),
        Verdict::Fails => Ok(false),
        Verdict::OutOfHypothesis => Err(Error::OutOfHypothesis(format!(
            "s = {} is not above the threshold for {}(p={}, q={}, d={})",
            params.s, params.scale, params.p, params.q, params.d
        ))),
    }
}

/// `L_p(R, |t|^{d-1}) ⊂ S'(R)` iff `d < p`.
pub fn weighted_lp_in_sprime(p: f64, d: usize) -> Result<bool> {
    if !(p > 0.0) || p.is_infinite() {
        return Err(Error::InvalidParameter(format!("need 0 < p < ∞, got {p}")));
    }
    Ok((d as f64) < p)
}

/// Membership of `(α, σ)` in the region `U_t`, `1 <= t <= ∞`.
pub fn in_u_t(alpha: f64, sigma: f64, t: f64) -> Result<bool> {
    if !(t >= 1.0) {
        return Err(Error::InvalidParameter(format!("t must be >= 1, got {t}")));
    }
    if t == 1.0 {
        return Ok((same(alpha, 0.0) && sigma > 0.0) || (alpha < 0.0 && !same(alpha, 0.0)));
    }
    if t.is_infinite() {
        return Ok((same(alpha, 1.0) && sigma >= 0.0) || (alpha < 1.0 && !same(alpha, 1.0)));
    }
    let edge = 1.0 - 1.0 / t;
    Ok((same(alpha, edge) && gt(sigma, 1.0 / t)) || (alpha < edge && !same(alpha, edge)))
}

/// Named classifications of the `(1/p, s)` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamRegion {
    /// Where the trace lands in `S'`.
    TraceSprime { d: usize, q: f64, scale: Scale },
    /// Decay at infinity.
    DecayInfinity { d: usize, q: f64, scale: Scale },
    /// Boundedness near the origin.
    OriginBehaviour { d: usize, q: f64, scale: Scale },
    /// The set `U(A)`.
    U { q: f64, scale: Scale },
    /// Embedding into `L_∞`.
    Linfty { d: usize, q: f64, scale: Scale },
}

pub const REGION_NAMES: [&str; 5] = ["trace-sprime", "decay-infinity", "origin", "U", "linfty"];

impl ParamRegion {
    /// Build a region by name; `fig1`, `fig2`, `fig3` are accepted aliases.
    pub fn from_name(name: &str, d: usize, q: f64, scale: Scale) -> Result<Self> {
        Ok(match name {
            "trace-sprime" | "fig1" => ParamRegion::TraceSprime { d, q, scale },
            "decay-infinity" | "fig2" => ParamRegion::DecayInfinity { d, q, scale },
            "origin" | "fig3" => ParamRegion::OriginBehaviour { d, q, scale },
            "U" | "u" => ParamRegion::U { q, scale },
            "linfty" => ParamRegion::Linfty { d, q, scale },
            other => return Err(Error::Parse(format!("unknown region `{other}`"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ParamRegion::TraceSprime { .. } => "trace-sprime",
            ParamRegion::DecayInfinity { .. } => "decay-infinity",
            ParamRegion::OriginBehaviour { .. } => "origin",
            ParamRegion::U { .. } => "U",
            ParamRegion::Linfty { .. } => "linfty",
        }
    }

    fn params(&self, inv_p: f64, s: f64) -> Result<SpaceParams> {
        let p = if inv_p <= 0.0 { f64::INFINITY } else { 1.0 / inv_p };
        let (d, q, scale) = match *self {
            ParamRegion::TraceSprime { d, q, scale }
            | ParamRegion::DecayInfinity { d, q, scale }
            | ParamRegion::OriginBehaviour { d, q, scale }
            | ParamRegion::Linfty { d, q, scale } => (d, q, scale),
            ParamRegion::U { q, scale } => (1, q, scale),
        };
        // the F scale excludes p = ∞; classify that edge with B
        let scale = if p.is_infinite() { Scale::B } else { scale };
        SpaceParams::new(s, p, q, d, scale)
    }

    /// Label of the point `(1/p, s)`.
    pub fn classify(&self, inv_p: f64, s: f64) -> Result<&'static str> {
        let params = self.params(inv_p, s)?;
        Ok(match self {
            ParamRegion::TraceSprime { .. } => match trace_in_sprime_verdict(&params) {
                Verdict::Holds => "trace in S'",
                Verdict::Fails => "trace not in S'",
                Verdict::OutOfHypothesis => "out of hypothesis",
            },
            ParamRegion::DecayInfinity { d, .. } => {
                let sig = sigma_p(params.p, *d)?;
                if in_u(&params) {
                    "decay"
                } else if s < sig && !same(s, sig) {
                    "singular radial distributions"
                } else {
                    "no decay"
                }
            }
            ParamRegion::OriginBehaviour { .. } => {
                if embeds_in_linfty(&params) {
                    "global boundedness"
                } else if in_u(&params) {
                    "controlled unboundedness near the origin"
                } else {
                    "no boundedness"
                }
            }
            ParamRegion::U { .. } => {
                if in_u(&params) {
                    "in U"
                } else {
                    "not in U"
                }
            }
            ParamRegion::Linfty { .. } => {
                if embeds_in_linfty(&params) {
                    "bounded"
                } else {
                    "unbounded"
                }
            }
        })
    }
}
