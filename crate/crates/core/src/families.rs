//! Named test functions with known regularity, used as ground truth.
//!
//! Every family is evaluated at profile level, `t ↦ f(t)` with `f` even. The
//! annular cutoff `φ` is [`annulus_shape`]: even, supported in
//! `[-2,-1/2] ∪ [1/2,2]`, `φ(1) = 1`.

use std::fmt;
use std::str::FromStr;

use crate::bump::{annulus_shape, psi_cutoff};
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::profile::RadialProfile;
use crate::spaces::{in_u_t, sigma_p, Scale, SpaceParams, Verdict};

const INV_E: f64 = 0.367_879_441_171_442_33;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFamily {
    /// `φ(|x|) ||x| - 1|^{-α}`.
    FAlpha { alpha: f64, p: f64 },
    /// `φ(|x|) ||x| - 1|^{-α} (-log ||x| - 1|)^{-δ}`.
    FAlphaDelta { alpha: f64, delta: f64, p: f64 },
    /// `max(0, 1 - |x|^2)^α`.
    PhiAlpha { alpha: f64 },
    /// `φ(2^j |x| - λ)`.
    FJLambda { j: u32, lambda: f64 },
    /// `ψ(x) |log |x||^α |log |log |x|||^{-σ}`.
    FAlphaSigma { alpha: f64, sigma: f64 },
    /// `ψ`: 1 on `|x| <= 1`, 0 on `|x| >= 3/2`.
    PsiCutoff,
    /// `ψ(x) |x|^{e}`.
    OriginPower { exponent: f64 },
}

pub fn make_f_alpha(alpha: f64, p: f64) -> Result<TestFamily> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!("p must be positive, got {p}")));
    }
    let cap = 1f64.min(1.0 / p);
    if !(alpha > 0.0 && alpha < cap) {
        return Err(Error::InvalidParameter(format!("f_alpha needs 0 < alpha < {cap}, got {alpha}")));
    }
    Ok(TestFamily::FAlpha { alpha, p })
}

pub fn make_f_alpha_delta(alpha: f64, delta: f64, p: f64) -> Result<TestFamily> {
    make_f_alpha(alpha, p)?;
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    Ok(TestFamily::FAlphaDelta { alpha, delta, p })
}

pub fn make_phi_alpha(alpha: f64) -> Result<TestFamily> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("Phi_alpha needs alpha > 0, got {alpha}")));
    }
    Ok(TestFamily::PhiAlpha { alpha })
}

pub fn make_f_j_lambda(j: u32, lambda: f64) -> Result<TestFamily> {
    if j < 1 {
        return Err(Error::InvalidParameter("f_j_lambda needs j >= 1".into()));
    }
    if !(lambda > 2.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("f_j_lambda needs lambda > 2, got {lambda}")));
    }
    Ok(TestFamily::FJLambda { j, lambda })
}

pub fn make_f_alpha_sigma(alpha: f64, sigma: f64) -> Result<TestFamily> {
    if !alpha.is_finite() || !sigma.is_finite() {
        return Err(Error::InvalidParameter("f_alpha_sigma needs finite parameters".into()));
    }
    Ok(TestFamily::FAlphaSigma { alpha, sigma })
}

pub fn make_psi_cutoff() -> TestFamily {
    TestFamily::PsiCutoff
}

pub fn make_origin_power(exponent: f64) -> Result<TestFamily> {
    if !exponent.is_finite() {
        return Err(Error::InvalidParameter("exponent must be finite".into()));
    }
    Ok(TestFamily::OriginPower { exponent })
}

impl TestFamily {
    pub fn name(&self) -> &'static str {
        match self {
            TestFamily::FAlpha { .. } => "f_alpha",
            TestFamily::FAlphaDelta { .. } => "f_alpha_delta",
            TestFamily::PhiAlpha { .. } => "Phi_alpha",
            TestFamily::FJLambda { .. } => "f_j_lambda",
            TestFamily::FAlphaSigma { .. } => "f_alpha_sigma",
            TestFamily::PsiCutoff => "psi_cutoff",
            TestFamily::OriginPower { .. } => "origin_power",
        }
    }

    /// Profile value at `t`; infinite or NaN exactly on [`singularities`](Self::singularities).
    pub fn eval(&self, t: f64) -> f64 {
        let a = t.abs();
        match *self {
            TestFamily::FAlpha { alpha, .. } => {
                let phi = annulus_shape(a);
                if phi == 0.0 {
                    0.0
                } else {
                    phi * (a - 1.0).abs().powf(-alpha)
                }
            }
            TestFamily::FAlphaDelta { alpha, delta, .. } => {
                let phi = annulus_shape(a);
                if phi == 0.0 {
                    0.0
                } else {
                    let u = (a - 1.0).abs();
                    phi * u.powf(-alpha) * (-u.ln()).powf(-delta)
                }
            }
            TestFamily::PhiAlpha { alpha } => (1.0 - a * a).max(0.0).powf(alpha),
            TestFamily::FJLambda { j, lambda } => annulus_shape(2f64.powi(j as i32) * a - lambda),
            TestFamily::FAlphaSigma { alpha, sigma } => {
                let psi = psi_cutoff(a);
                if psi == 0.0 {
                    return 0.0;
                }
                let l = a.ln().abs();
                psi * l.powf(alpha) * l.ln().abs().powf(-sigma)
            }
            TestFamily::PsiCutoff => psi_cutoff(a),
            TestFamily::OriginPower { exponent } => {
                let psi = psi_cutoff(a);
                if psi == 0.0 {
                    0.0
                } else {
                    psi * a.powf(exponent)
                }
            }
        }
    }

    /// Documented support window `[a, b]` of `|t|`.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            TestFamily::FAlpha { .. } | TestFamily::FAlphaDelta { .. } => (0.5, 2.0),
            TestFamily::PhiAlpha { .. } => (0.0, 1.0),
            TestFamily::FJLambda { j, lambda } => {
                let s = 2f64.powi(-(j as i32));
                ((lambda - 2.0) * s, (lambda + 2.0) * s)
            }
            TestFamily::FAlphaSigma { .. } | TestFamily::PsiCutoff | TestFamily::OriginPower { .. } => (0.0, 1.5),
        }
    }

    /// Radii where the profile may be singular or undefined; grids must avoid them.
    pub fn singularities(&self) -> Vec<f64> {
        match *self {
            TestFamily::FAlpha { .. } | TestFamily::FAlphaDelta { .. } => vec![1.0],
            TestFamily::FAlphaSigma { .. } => vec![0.0, INV_E, 1.0],
            TestFamily::OriginPower { exponent } if exponent < 0.0 => vec![0.0],
            _ => Vec::new(),
        }
    }

    /// Samples on `grid`, with nodes on singularities moved by half a spacing.
    pub fn profile_on(&self, grid: &Grid1D) -> Result<RadialProfile> {
        let sing = self.singularities();
        let g = if sing.is_empty() { grid.clone() } else { grid.avoiding(&sing)? };
        RadialProfile::from_fn(&g, |t| self.eval(t))
    }

    /// Membership in `A^s_{p,q}(R^d)` as documented for the family.
    ///
    /// Only the smoothness the family is built for is covered; anything else is
    /// [`Verdict::OutOfHypothesis`].
    pub fn documented_membership(&self, params: &SpaceParams) -> Result<Verdict> {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
        let ip = params.inv_p();
        let d = params.d;
        Ok(match *self {
            TestFamily::FAlpha { alpha, p } => {
                if !close(p, params.p) || !close(params.s, ip - alpha) {
                    Verdict::OutOfHypothesis
                } else if params.q.is_infinite() && params.scale == Scale::B {
                    if alpha < ip - sigma_p(params.p, d)? {
                        Verdict::Holds
                    } else {
                        Verdict::OutOfHypothesis
                    }
                } else if ip - alpha > sigma_p(params.p, 1)? {
                    Verdict::Fails
                } else {
                    Verdict::OutOfHypothesis
                }
            }
            TestFamily::PhiAlpha { alpha } => {
                if !close(params.s, ip + alpha) {
                    Verdict::OutOfHypothesis
                } else if params.q.is_infinite() && params.scale == Scale::B {
                    if ip + alpha > sigma_p(params.p, d)? {
                        Verdict::Holds
                    } else {
                        Verdict::OutOfHypothesis
                    }
                } else if ip + alpha > sigma_p(params.p, 1)? {
                    Verdict::Fails
                } else {
                    Verdict::OutOfHypothesis
                }
            }
            TestFamily::FAlphaSigma { alpha, sigma } => {
                if !close(params.s, d as f64 * ip) {
                    Verdict::OutOfHypothesis
                } else {
                    match params.scale {
                        Scale::B if params.q > 1.0 => verdict(in_u_t(alpha, sigma, params.q)?),
                        Scale::F if params.p > 1.0 && params.p.is_finite() => verdict(in_u_t(alpha, sigma, params.p)?),
                        _ => Verdict::OutOfHypothesis,
                    }
                }
            }
            TestFamily::FJLambda { .. } | TestFamily::PsiCutoff => Verdict::Holds,
            TestFamily::FAlphaDelta { .. } | TestFamily::OriginPower { .. } => Verdict::OutOfHypothesis,
        })
    }

    /// `(α, σ) ∈ U_t` for the `f_{α,σ}` family.
    pub fn in_u_t(&self, t: f64) -> Result<bool> {
        match *self {
            TestFamily::FAlphaSigma { alpha, sigma } => in_u_t(alpha, sigma, t),
            _ => Err(Error::InvalidParameter(format!("{} has no (alpha, sigma) pair", self.name()))),
        }
    }

    /// Exponents `(a, b)` in `‖f_{j,λ}‖ ≍ 2^{ja} λ^b` for the smoothness norm and
    /// for `L_p`: `(s - d/p, (d-1)/p)` and `(-d/p, (d-1)/p)`.
    pub fn documented_scaling(&self, params: &SpaceParams) -> Option<((f64, f64), (f64, f64))> {
        match self {
            TestFamily::FJLambda { .. } => {
                let ip = params.inv_p();
                let d = params.d as f64;
                Some(((params.s - d * ip, (d - 1.0) * ip), (-d * ip, (d - 1.0) * ip)))
            }
            _ => None,
        }
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            TestFamily::FAlpha { alpha, p } => vec![("alpha", alpha), ("p", p)],
            TestFamily::FAlphaDelta { alpha, delta, p } => vec![("alpha", alpha), ("delta", delta), ("p", p)],
            TestFamily::PhiAlpha { alpha } => vec![("alpha", alpha)],
            TestFamily::FJLambda { j, lambda } => vec![("j", j as f64), ("lambda", lambda)],
            TestFamily::FAlphaSigma { alpha, sigma } => vec![("alpha", alpha), ("sigma", sigma)],
            TestFamily::PsiCutoff => vec![],
            TestFamily::OriginPower { exponent } => vec![("exponent", exponent)],
        }
    }
}

fn verdict(b: bool) -> Verdict {
    if b {
        Verdict::Holds
    } else {
        Verdict::Fails
    }
}

impl fmt::Display for TestFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.params().iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{}({})", self.name(), body.join(","))
    }
}

impl FromStr for TestFamily {
    type Err = Error;

    /// `name(key=value,…)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, rest) = s.split_once('(').ok_or_else(|| Error::Parse(format!("expected name(...), got {s:?}")))?;
        let body = rest.strip_suffix(')').ok_or_else(|| Error::Parse(format!("missing ')' in {s:?}")))?;
        let mut kv = std::collections::BTreeMap::new();
        for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value, got {part:?}")))?;
            let v: f64 = match v.trim() {
                "inf" | "∞" => f64::INFINITY,
                x => x.parse().map_err(|_| Error::Parse(format!("bad number {x:?} for {k}")))?,
            };
            kv.insert(k.trim().to_string(), v);
        }
        let name = name.trim();
        let mut take = |k: &str| kv.remove(k).ok_or_else(|| Error::Parse(format!("{name}: missing parameter {k}")));
        let fam = match name {
            "f_alpha" => make_f_alpha(take("alpha")?, take("p")?)?,
            "f_alpha_delta" => make_f_alpha_delta(take("alpha")?, take("delta")?, take("p")?)?,
            "Phi_alpha" | "phi_alpha" => make_phi_alpha(take("alpha")?)?,
            "f_j_lambda" => {
                let j = take("j")?;
                if j.fract() != 0.0 || j < 0.0 {
                    return Err(Error::Parse(format!("j must be a nonnegative integer, got {j}")));
                }
                make_f_j_lambda(j as u32, take("lambda")?)?
            }
            "f_alpha_sigma" => make_f_alpha_sigma(take("alpha")?, take("sigma")?)?,
            "psi_cutoff" | "psi" => make_psi_cutoff(),
            "origin_power" => make_origin_power(take("exponent")?)?,
            other => return Err(Error::Parse(format!("unknown family {other:?}"))),
        };
        if let Some(k) = kv.keys().next() {
            return Err(Error::Parse(format!("{name}: unexpected parameter {k}")));
        }
        Ok(fam)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::interp;
    use crate::radial::weighted_lp_norm;

    #[test]
    fn f_alpha_values_and_range() {
        let f = make_f_alpha(0.25, 2.0).unwrap();
        assert_eq!(f.eval(1.5), annulus_shape(1.5) * 0.5f64.powf(-0.25));
        assert_eq!(f.eval(-1.5), f.eval(1.5));
        assert!(make_f_alpha(0.6, 2.0).is_err());
        assert!(make_f_alpha(0.0, 2.0).is_err());
        let b = |q| SpaceParams::b(0.25, 2.0, q, 2).unwrap();
        assert_eq!(f.documented_membership(&b(f64::INFINITY)).unwrap(), Verdict::Holds);
        assert_eq!(f.documented_membership(&b(2.0)).unwrap(), Verdict::Fails);
        let fp = SpaceParams::f(0.25, 2.0, f64::INFINITY, 2).unwrap();
        assert_eq!(f.documented_membership(&fp).unwrap(), Verdict::Fails);
    }

    #[test]
    fn f_alpha_norm_converges_under_refinement() {
        // α p = 1/2 < 1: the weighted L_2 norm settles as the grid is refined
        let f = make_f_alpha(0.25, 2.0).unwrap();
        let norms: Vec<f64> = (8..14)
            .map(|k| {
                let grid = Grid1D::uniform(2f64.powi(-k), 2.5).unwrap();
                weighted_lp_norm(&f.profile_on(&grid).unwrap(), 2.0, 2).unwrap()
            })
            .collect();
        let diffs: Vec<f64> = norms.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        // successive differences shrink like h^{1 - αp}: a geometric series, hence a finite limit
        let rate = 2f64.powf(-(1.0 - 0.25 * 2.0));
        for w in diffs.windows(2) {
            assert!((w[1] / w[0] / rate - 1.0).abs() < 0.1, "{diffs:?}");
        }
    }

    #[test]
    fn phi_alpha_shape() {
        for alpha in [0.5, 1.0, 2.5] {
            let f = make_phi_alpha(alpha).unwrap();
            assert_eq!(f.eval(0.0), 1.0);
            assert_eq!(f.eval(1.0), 0.0);
            assert_eq!(f.eval(1.3), 0.0);
            let mut last = 1.0;
            for i in 1..=100 {
                let v = f.eval(i as f64 / 100.0);
                assert!(v <= last);
                last = v;
            }
        }
        assert!(make_phi_alpha(0.0).is_err());
        let f = make_phi_alpha(1.0).unwrap();
        let b = SpaceParams::b(1.5, 2.0, f64::INFINITY, 2).unwrap();
        assert_eq!(f.documented_membership(&b).unwrap(), Verdict::Holds);
    }

    #[test]
    fn f_j_lambda_properties() {
        let f = make_f_j_lambda(3, 16.0).unwrap();
        assert_eq!(f.eval(17.0 / 8.0), 1.0);
        assert_eq!(f.support(), (14.0 / 8.0, 18.0 / 8.0));
        // endpoints are zeros, just inside is not
        assert_eq!(f.eval(14.0 / 8.0), 0.0);
        assert_eq!(f.eval(18.0 / 8.0), 0.0);
        assert!(f.eval(14.0 / 8.0 + 1e-3) > 0.0 && f.eval(18.0 / 8.0 - 1e-3) > 0.0);
        let g = make_f_j_lambda(4, 16.0).unwrap();
        for i in 0..500 {
            let t = i as f64 * 0.0049;
            assert_eq!(g.eval(t), f.eval(2.0 * t));
        }
        assert!(make_f_j_lambda(3, 2.0).is_err());
        assert!(make_f_j_lambda(0, 4.0).is_err());
    }

    #[test]
    fn f_alpha_sigma_membership() {
        let a = make_f_alpha_sigma(0.0, 1.0).unwrap();
        assert!(a.in_u_t(1.0).unwrap());
        let b = make_f_alpha_sigma(1.0, 0.0).unwrap();
        assert!(b.in_u_t(f64::INFINITY).unwrap());
        assert!(!b.in_u_t(2.0).unwrap());
        let par = SpaceParams::b(1.0, 2.0, f64::INFINITY, 2).unwrap();
        assert_eq!(b.documented_membership(&par).unwrap(), Verdict::Holds);
        let par = SpaceParams::b(1.0, 2.0, 2.0, 2).unwrap();
        assert_eq!(b.documented_membership(&par).unwrap(), Verdict::Fails);
        assert_eq!(b.eval(0.5), 0.5f64.ln().abs() * 0.5f64.ln().abs().ln().abs().powf(-0.0));
        assert_eq!(b.singularities(), vec![0.0, INV_E, 1.0]);
    }

    #[test]
    fn profiles_avoid_singularities() {
        let grid = Grid1D::uniform(1.0 / 64.0, 2.0).unwrap();
        for fam in [
            make_f_alpha(0.3, 2.0).unwrap(),
            make_f_alpha_sigma(0.5, 2.0).unwrap(),
            make_origin_power(-0.25).unwrap(),
        ] {
            let p = fam.profile_on(&grid).unwrap();
            assert!(p.values().iter().all(|v| v.is_finite()), "{fam}");
            for s in fam.singularities() {
                assert!(p.nodes().iter().all(|t| (t.abs() - s).abs() > 1e-9), "{fam} hits {s}");
            }
        }
    }

    #[test]
    fn psi_plateaus() {
        let f = make_psi_cutoff();
        assert_eq!(f.eval(0.5), 1.0);
        assert_eq!(f.eval(2.0), 0.0);
        let grid = Grid1D::uniform(1e-3, 2.0).unwrap();
        let p = f.profile_on(&grid).unwrap();
        assert!(p.values().iter().all(|v| (0.0..=1.0).contains(v)));
        assert_eq!(interp(p.nodes(), p.values(), 1.0), Some(1.0));
    }

    #[test]
    fn descriptors_round_trip() {
        for fam in [
            make_f_alpha(0.25, 2.0).unwrap(),
            make_f_alpha_delta(0.25, 1.0, 2.0).unwrap(),
            make_phi_alpha(1.0).unwrap(),
            make_f_j_lambda(5, 16.0).unwrap(),
            make_f_alpha_sigma(1.0, 0.0).unwrap(),
            make_psi_cutoff(),
            make_origin_power(-0.25).unwrap(),
        ] {
            let s = fam.to_string();
            assert_eq!(s.parse::<TestFamily>().unwrap(), fam, "{s}");
        }
        assert!("f_j_lambda(j=3)".parse::<TestFamily>().is_err());
        assert!("nope()".parse::<TestFamily>().is_err());
        assert!("psi_cutoff(x=1)".parse::<TestFamily>().is_err());
    }
}
