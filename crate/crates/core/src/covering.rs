//! Annular coverings by balls of diameter `12·2^{-j}` and subordinate partitions of unity.
//!
//! Level-0 centers on the annulus `k` sit on the sphere of radius `k + 1/2`:
//! equally spaced angles for `d = 2`, a Fibonacci point set for `d = 3`.
//! Level `j` is level 0 scaled by `2^{-j}`.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bump::smooth_step;
use crate::error::{Error, Result};
use crate::radial::norm;

/// Ball radius at level 0.
pub const BALL_RADIUS: f64 = 6.0;
/// Coverage radius demanded during construction (10% margin).
pub const MARGIN_RADIUS: f64 = 6.0 / 1.1;
const SEED: u64 = 0x5eed_c0de;
const CONSTRUCTION_SAMPLES: usize = 3000;

/// Balls `Ω_{j,k,ℓ}` for `0 <= j <= J`, `0 <= k <= Kmax`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnularCovering {
    d: usize,
    max_level: usize,
    k_max: usize,
    /// Level-0 centers per annulus, axis-meeting balls first.
    centers0: Vec<Vec<Vec<f64>>>,
    axis_counts: Vec<usize>,
}

/// Uniform sample of the level-0 annulus `k <= |x| < k+1`.
pub fn sample_annulus(d: usize, k: usize, rng: &mut impl Rng) -> Vec<f64> {
    let (a, b) = (k as f64, k as f64 + 1.0);
    let u: f64 = rng.gen();
    let r = (a.powi(d as i32) + u * (b.powi(d as i32) - a.powi(d as i32))).powf(1.0 / d as f64);
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let n = norm(&v);
        if n > 1e-3 && n <= 1.0 {
            return v.iter().map(|x| x * r / n).collect();
        }
    }
}

fn sphere_points(d: usize, n: usize, rho: f64) -> Vec<Vec<f64>> {
    match d {
        2 => (0..n)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                vec![rho * a.cos(), rho * a.sin()]
            })
            .collect(),
        _ => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..n)
                .map(|i| {
                    let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
                    let s = (1.0 - z * z).max(0.0).sqrt();
                    let a = golden * i as f64;
                    // x₁ is the polar axis so that the axis-meeting balls are the polar caps
                    vec![rho * z, rho * s * a.cos(), rho * s * a.sin()]
                })
                .collect()
        }
    }
}

fn max_gap(centers: &[Vec<f64>], samples: &[Vec<f64>]) -> f64 {
    samples
        .iter()
        .map(|x| {
            centers
                .iter()
                .map(|c| dist(x, c))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Distance from `x` to the `x₁`-axis.
fn axis_distance(x: &[f64]) -> f64 {
    x[1..].iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn annulus_centers(d: usize, k: usize) -> Result<Vec<Vec<f64>>> {
    if k == 0 {
        return Ok(vec![vec![0.0; d]]);
    }
    let rho = k as f64 + 0.5;
    let cap = (2 * k + 1).pow(d as u32 - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ ((d as u64) << 32) ^ k as u64);
    let samples: Vec<Vec<f64>> = (0..CONSTRUCTION_SAMPLES).map(|_| sample_annulus(d, k, &mut rng)).collect();
    // every center covers a cap of the sphere of radius at most MARGIN_RADIUS
    let lower = if d == 3 {
        ((rho / MARGIN_RADIUS).powi(2) * 4.0).floor().max(1.0) as usize
    } else {
        1
    };
    for n in lower.min(cap)..=cap {
        let c = sphere_points(d, n, rho);
        if max_gap(&c, &samples) <= MARGIN_RADIUS {
            return Ok(c);
        }
    }
    let c = sphere_points(d, cap, rho);
    if max_gap(&c, &samples) < BALL_RADIUS {
        return Ok(c);
    }
    Err(Error::Covering(format!("annulus k = {k} not covered by {cap} balls")))
}

impl AnnularCovering {
    /// Build the covering for `d ∈ {2, 3}`.
    pub fn build(d: usize, max_level: usize, k_max: usize) -> Result<Self> {
        if !(2..=3).contains(&d) {
            return Err(Error::InvalidDimension(d));
        }
        if k_max < 1 {
            return Err(Error::InvalidInput("Kmax must be at least 1".into()));
        }
        let mut centers0 = Vec::with_capacity(k_max + 1);
        let mut axis_counts = Vec::with_capacity(k_max + 1);
        for k in 0..=k_max {
            let mut c = annulus_centers(d, k)?;
            // property (f): balls whose radius-12 neighbourhood meets the axis come first
            c.sort_by_key(|x| axis_distance(x) >= 2.0 * BALL_RADIUS);
            axis_counts.push(c.iter().filter(|x| axis_distance(x) < 2.0 * BALL_RADIUS).count());
            centers0.push(c);
        }
        Ok(Self { d, max_level, k_max, centers0, axis_counts })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// `C(d, k)`.
    pub fn count(&self, k: usize) -> usize {
        self.centers0[k].len()
    }

    /// The axis constant `K` of the enumeration.
    pub fn axis_constant(&self) -> usize {
        self.axis_counts.iter().copied().max().unwrap_or(1)
    }

    pub fn radius(&self, j: usize) -> f64 {
        BALL_RADIUS * scale(j)
    }

    /// Centers `x_{j,k,ℓ}`, `ℓ = 1..C(d,k)`.
    pub fn centers(&self, j: usize, k: usize) -> Vec<Vec<f64>> {
        let s = scale(j);
        self.centers0[k].iter().map(|c| c.iter().map(|v| v * s).collect()).collect()
    }

    /// All balls `(k, ℓ, center)` at level `j`, `ℓ` one-based.
    pub fn balls(&self, j: usize) -> impl Iterator<Item = (usize, usize, Vec<f64>)> + '_ {
        let s = scale(j);
        self.centers0.iter().enumerate().flat_map(move |(k, cs)| {
            cs.iter()
                .enumerate()
                .map(move |(l, c)| (k, l + 1, c.iter().map(|v| v * s).collect()))
        })
    }

    /// Balls at level `j` whose centers may lie within `reach` of `x`.
    fn nearby(&self, x: &[f64], j: usize, reach: f64) -> Vec<(usize, usize, Vec<f64>)> {
        let s = scale(j);
        let r = norm(x) / s;
        let lo = (r - reach / s - 1.0).floor().max(0.0) as usize;
        let hi = ((r + reach / s).ceil() as usize).min(self.k_max);
        let mut out = Vec::new();
        for k in lo..=hi.max(lo).min(self.k_max) {
            for (l, c) in self.centers0[k].iter().enumerate() {
                let c: Vec<f64> = c.iter().map(|v| v * s).collect();
                if dist(x, &c) < reach {
                    out.push((k, l + 1, c));
                }
            }
        }
        out
    }

    /// Number of level-`j` balls containing `x`.
    pub fn multiplicity(&self, x: &[f64], j: usize) -> usize {
        self.nearby(x, j, self.radius(j)).len()
    }

    /// Whether `x` lies in the covered region `|x| < (Kmax + 1) 2^{-j}`.
    pub fn covers(&self, x: &[f64], j: usize) -> bool {
        norm(x) < (self.k_max as f64 + 1.0) * scale(j)
    }

    /// CSV rows `j,k,l,x1,..,xd,radius`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header = vec!["j".to_string(), "k".into(), "l".into()];
        header.extend((1..=self.d).map(|i| format!("x{i}")));
        header.push("radius".into());
        wr.write_record(&header)?;
        for j in 0..=self.max_level {
            for (k, l, c) in self.balls(j) {
                let mut row = vec![j.to_string(), k.to_string(), l.to_string()];
                row.extend(c.iter().map(|v| format!("{v:e}")));
                row.push(format!("{:e}", self.radius(j)));
                wr.write_record(&row)?;
            }
        }
        wr.flush()?;
        Ok(())
    }
}

fn scale(j: usize) -> f64 {
    2f64.powi(-(j as i32))
}

/// Inner plateau of the ball template, as a fraction of the radius.
pub const PLATEAU: f64 = 0.9;

/// Template `θ(u)`: 1 for `u <= PLATEAU`, 0 for `u >= 1`.
pub fn ball_template(u: f64) -> f64 {
    smooth_step((1.0 - u) / (1.0 - PLATEAU))
}

/// Smooth partition of unity `ψ_{j,k,ℓ}` subordinate to a covering.
#[derive(Debug, Clone)]
pub struct PartitionOfUnity<'a> {
    covering: &'a AnnularCovering,
    order: usize,
}

/// One non-vanishing member `ψ_{j,k,ℓ}(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionValue {
    pub k: usize,
    pub l: usize,
    pub value: f64,
}

impl<'a> PartitionOfUnity<'a> {
    pub fn new(covering: &'a AnnularCovering, order: usize) -> Self {
        Self { covering, order }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// All non-zero `ψ_{j,k,ℓ}(x)`; errors if the raw template sum is below `1e-8`.
    pub fn eval(&self, x: &[f64], j: usize) -> Result<Vec<PartitionValue>> {
        let r = self.covering.radius(j);
        let raw: Vec<(usize, usize, f64)> = self
            .covering
            .nearby(x, j, r)
            .into_iter()
            .map(|(k, l, c)| (k, l, ball_template(dist(x, &c) / r)))
            .filter(|t| t.2 > 0.0)
            .collect();
        let total: f64 = raw.iter().map(|t| t.2).sum();
        if total < 1e-8 {
            return Err(Error::Covering(format!("partition sum {total:e} at {x:?}, level {j}")));
        }
        Ok(raw
            .into_iter()
            .map(|(k, l, v)| PartitionValue { k, l, value: v / total })
            .collect())
    }

    /// `ψ_{j,k,ℓ}(x)` for a single member.
    pub fn value(&self, x: &[f64], j: usize, k: usize, l: usize) -> Result<f64> {
        Ok(self
            .eval(x, j)?
            .into_iter()
            .find(|v| v.k == k && v.l == l)
            .map_or(0.0, |v| v.value))
    }

    /// Batch evaluation of the partition sum at many points.
    pub fn sums(&self, points: &[Vec<f64>], j: usize) -> Result<Vec<f64>> {
        points
            .iter()
            .map(|x| Ok(self.eval(x, j)?.iter().map(|v| v.value).sum()))
            .collect()
    }

    /// Largest `|∇ψ_{j,k,ℓ}(x)|` over the members at `x`, by central differences.
    pub fn max_gradient(&self, x: &[f64], j: usize) -> Result<f64> {
        let eta = 1e-5 * scale(j);
        let mut best = 0.0_f64;
        let members = self.eval(x, j)?;
        for m in members {
            let mut g2 = 0.0;
            for i in 0..x.len() {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[i] += eta;
                xm[i] -= eta;
                let d = (self.value(&xp, j, m.k, m.l)? - self.value(&xm, j, m.k, m.l)?) / (2.0 * eta);
                g2 += d * d;
            }
            best = best.max(g2.sqrt());
        }
        Ok(best)
    }

    /// `max |∇ψ| / 2^j` over `samples` points drawn in the covered region at level `j`.
    pub fn gradient_constant(&self, j: usize, samples: usize, seed: u64) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kmax = self.covering.k_max().min(8);
        let mut c = 0.0_f64;
        for _ in 0..samples {
            let k = rng.gen_range(0..kmax);
            let x: Vec<f64> = sample_annulus(self.covering.dim(), k, &mut rng)
                .into_iter()
                .map(|v| v * scale(j))
                .collect();
            c = c.max(self.max_gradient(&x, j)? * scale(j));
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_ball_and_counts() {
        let c = AnnularCovering::build(2, 3, 8).unwrap();
        assert_eq!(c.count(0), 1);
        assert_eq!(c.centers(0, 0), vec![vec![0.0, 0.0]]);
        assert!(c.count(5) <= 11);
        for k in 1..=8 {
            assert!(c.count(k) <= 2 * k + 1);
            for x in c.centers(2, k) {
                assert!((norm(&x) - 0.25 * (k as f64 + 0.5)).abs() < 1e-14);
            }
        }
        assert!(AnnularCovering::build(4, 1, 2).is_err());
        assert!(AnnularCovering::build(2, 1, 0).is_err());
    }

    #[test]
    fn self_similarity_is_exact() {
        let c = AnnularCovering::build(3, 4, 6).unwrap();
        for j in 0..=4 {
            for k in 0..=6 {
                let a = c.centers(j, k);
                let b = c.centers(0, k);
                for (x, y) in a.iter().zip(&b) {
                    for (u, v) in x.iter().zip(y) {
                        assert_eq!(*u, v * 2f64.powi(-(j as i32)));
                    }
                }
            }
        }
    }

    #[test]
    fn three_dimensional_coverage_monte_carlo() {
        let c = AnnularCovering::build(3, 2, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for j in [0usize, 2] {
            for k in 0..=6 {
                let centers = c.centers(j, k);
                let s = 2f64.powi(-(j as i32));
                let pts: Vec<Vec<f64>> = (0..10_000)
                    .map(|_| sample_annulus(3, k, &mut rng).iter().map(|v| v * s).collect())
                    .collect();
                assert!(max_gap(&centers, &pts) <= 6.0 * s, "j={j} k={k}");
            }
            assert!(c.count(6) <= 13 * 13);
        }
    }

    #[test]
    fn partition_sums_to_one() {
        let c = AnnularCovering::build(2, 3, 10).unwrap();
        let pu = PartitionOfUnity::new(&c, 2);
        for k in 1..8 {
            let x = vec![0.125 * (k as f64 + 0.5), 0.0];
            let s: f64 = pu.eval(&x, 3).unwrap().iter().map(|v| v.value).sum();
            assert!((s - 1.0).abs() < 1e-10);
        }
        // near the origin only the central ball is active
        let v = pu.eval(&[0.0, 0.0], 3).unwrap();
        let central = v.iter().find(|m| m.k == 0).unwrap().value;
        assert!(central > 0.0);
    }

    #[test]
    fn gradient_bound_scales_dyadically() {
        let c = AnnularCovering::build(2, 3, 10).unwrap();
        let pu = PartitionOfUnity::new(&c, 1);
        // level-0 oracle on a dense sample; level 3 reuses a scaled prefix of the same points
        let c0 = pu.gradient_constant(0, 600, 1).unwrap();
        let c3 = pu.gradient_constant(3, 200, 1).unwrap();
        assert!(c0 > 0.0);
        assert!(c3 <= c0 * (1.0 + 1e-6), "c3={c3} c0={c0}");
    }
}
