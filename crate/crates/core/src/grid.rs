//! One-dimensional grids and their textual descriptors.
//!
//! Descriptor grammar, segments separated by `;`:
//!
//! * `dyadic:J=10,m=8`: shells `[2^{-i-1}, 2^{-i}]`, `i < J`, with `m` cells each, plus `[0, 2^{-J}]`
//! * `uniform:h=0.01,T=256`: uniform spacing from the end of the previous segment (or 0) up to `T`
//! * `log:rmin=1e-3,rmax=10,n=200`: geometric nodes
//!
//! The positive half is mirrored, so every grid built from a descriptor is even.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Tag describing how a grid was generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    UniformDyadic,
    LogSpaced,
    Composite,
}

/// Strictly increasing nodes, flagged even when closed under negation.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    nodes: Vec<f64>,
    kind: GridKind,
    even: bool,
}

impl Grid1D {
    pub fn new(nodes: Vec<f64>, kind: GridKind) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidInput("grid needs at least 2 nodes".into()));
        }
        if nodes.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("grid nodes must be finite".into()));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("grid nodes must be strictly increasing".into()));
        }
        let n = nodes.len();
        let even = (0..n).all(|i| nodes[i] == -nodes[n - 1 - i]);
        Ok(Self { nodes, kind, even })
    }

    /// Mirror strictly increasing non-negative nodes into an even grid.
    pub fn mirrored(positive: &[f64], kind: GridKind) -> Result<Self> {
        if positive.iter().any(|&x| x < 0.0) {
            return Err(Error::InvalidInput("mirrored grid expects non-negative nodes".into()));
        }
        let mut nodes: Vec<f64> = positive.iter().rev().filter(|&&x| x > 0.0).map(|x| -x).collect();
        nodes.extend_from_slice(positive);
        Self::new(nodes, kind)
    }

    /// Even uniform grid `{i h : |i h| <= T}` containing 0.
    pub fn uniform(h: f64, t_max: f64) -> Result<Self> {
        if !(h > 0.0) || !(t_max > 0.0) {
            return Err(Error::InvalidInput("uniform grid needs h > 0 and T > 0".into()));
        }
        let n = (t_max / h + 1e-9).floor() as i64;
        if n < 1 {
            return Err(Error::InvalidInput("uniform grid needs T >= h".into()));
        }
        let nodes = (-n..=n).map(|i| i as f64 * h).collect();
        Self::new(nodes, GridKind::UniformDyadic)
    }

    /// Even uniform grid with nodes at `(i + 1/2) h`, avoiding the origin.
    pub fn uniform_offset(h: f64, t_max: f64) -> Result<Self> {
        if !(h > 0.0) || !(t_max > h) {
            return Err(Error::InvalidInput("offset grid needs 0 < h < T".into()));
        }
        let n = (t_max / h - 0.5 + 1e-9).floor() as i64;
        let pos: Vec<f64> = (0..=n).map(|i| (i as f64 + 0.5) * h).collect();
        Self::mirrored(&pos, GridKind::UniformDyadic)
    }

    pub fn from_descriptor(desc: &str) -> Result<Self> {
        desc.parse()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn extent(&self) -> (f64, f64) {
        (self.nodes[0], self.nodes[self.nodes.len() - 1])
    }

    pub fn max_spacing(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Largest spacing among cells meeting `[a, b]`.
    pub fn max_spacing_in(&self, a: f64, b: f64) -> f64 {
        self.nodes
            .windows(2)
            .filter(|w| w[1] >= a && w[0] <= b)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// Uniform spacing if all gaps agree to relative `1e-9`.
    pub fn uniform_spacing(&self) -> Option<f64> {
        let h = self.nodes[1] - self.nodes[0];
        self.nodes
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h)
            .then_some(h)
    }

    /// Index of the node equal to `t`, if any.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let i = self.nodes.partition_point(|&x| x < t);
        (i < self.nodes.len() && self.nodes[i] == t).then_some(i)
    }

    /// Index of the mirror partner of node `i` on an even grid.
    pub fn mirror_index(&self, i: usize) -> usize {
        self.nodes.len() - 1 - i
    }

    /// Indices of the nodes with `t >= 0`.
    pub fn nonnegative_range(&self) -> std::ops::Range<usize> {
        self.nodes.partition_point(|&x| x < 0.0)..self.nodes.len()
    }

    /// Move nodes sitting on `|t| = r` for any `r` in `singular` by half the local
    /// spacing away from the origin; a node at 0 is dropped. Evenness is preserved.
    pub fn avoiding(&self, singular: &[f64]) -> Result<Self> {
        let pos: Vec<f64> = self.nodes[self.nonnegative_range()].to_vec();
        let mut out = Vec::with_capacity(pos.len());
        for (i, &x) in pos.iter().enumerate() {
            let hit = singular
                .iter()
                .any(|&r| (x - r.abs()).abs() <= 1e-12 * r.abs().max(1e-300) || (r == 0.0 && x == 0.0));
            if !hit {
                out.push(x);
            } else if x > 0.0 {
                let next = pos.get(i + 1).copied().unwrap_or(x + (x - pos[i - 1]));
                out.push(x + 0.5 * (next - x));
            }
        }
        let g = if self.even {
            Self::mirrored(&out, self.kind)?
        } else {
            let neg: Vec<f64> = self.nodes[..self.nonnegative_range().start].to_vec();
            let mut all = neg;
            all.extend(out);
            Self::new(all, self.kind)?
        };
        Ok(g)
    }
}

/// One segment of a grid descriptor.
#[derive(Debug, Clone, PartialEq)]
pub enum GridSegment {
    Dyadic { levels: u32, per_shell: u32 },
    Uniform { h: f64, t_max: f64 },
    Log { r_min: f64, r_max: f64, n: usize },
}

/// Parsed grid descriptor.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub segments: Vec<GridSegment>,
}

fn kv_pairs(body: &str) -> Result<Vec<(String, String)>> {
    body.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{kv}`")))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

fn num<T: FromStr>(pairs: &[(String, String)], key: &str, default: Option<T>) -> Result<T> {
    match pairs.iter().find(|(k, _)| k == key) {
        Some((_, v)) => v
            .parse()
            .map_err(|_| Error::Parse(format!("bad value `{v}` for `{key}`"))),
        None => default.ok_or_else(|| Error::Parse(format!("missing `{key}`"))),
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut segments = Vec::new();
        for seg in s.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, body) = seg
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("segment `{seg}` lacks `name:`")))?;
            let kv = kv_pairs(body)?;
            let segment = match name.trim() {
                "dyadic" => GridSegment::Dyadic {
                    levels: num(&kv, "J", None)?,
                    per_shell: num(&kv, "m", Some(8))?,
                },
                "uniform" => GridSegment::Uniform {
                    h: num(&kv, "h", None)?,
                    t_max: num(&kv, "T", None)?,
                },
                "log" => GridSegment::Log {
                    r_min: num(&kv, "rmin", None)?,
                    r_max: num(&kv, "rmax", None)?,
                    n: num(&kv, "n", None)?,
                },
                other => return Err(Error::Parse(format!("unknown grid segment `{other}`"))),
            };
            segments.push(segment);
        }
        if segments.is_empty() {
            return Err(Error::Parse("empty grid descriptor".into()));
        }
        Ok(Self { segments })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .segments
            .iter()
            .map(|s| match s {
                GridSegment::Dyadic { levels, per_shell } => format!("dyadic:J={levels},m={per_shell}"),
                GridSegment::Uniform { h, t_max } => format!("uniform:h={h},T={t_max}"),
                GridSegment::Log { r_min, r_max, n } => format!("log:rmin={r_min},rmax={r_max},n={n}"),
            })
            .collect();
        write!(f, "{}", parts.join(";"))
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid1D> {
        let mut pos: Vec<f64> = Vec::new();
        let mut end = 0.0_f64;
        let only_log = self.segments.iter().all(|s| matches!(s, GridSegment::Log { .. }));
        for seg in &self.segments {
            match *seg {
                GridSegment::Dyadic { levels, per_shell } => {
                    if per_shell == 0 || levels > 60 {
                        return Err(Error::InvalidInput("dyadic segment needs m >= 1, J <= 60".into()));
                    }
                    let m = per_shell as f64;
                    let inner = 2f64.powi(-(levels as i32));
                    pos.push(0.0);
                    for c in 1..=per_shell {
                        pos.push(inner * c as f64 / m);
                    }
                    for i in (0..levels).rev() {
                        let a = 2f64.powi(-(i as i32) - 1);
                        for c in 1..=per_shell {
                            pos.push(a + a * c as f64 / m);
                        }
                    }
                    end = 1.0;
                }
                GridSegment::Uniform { h, t_max } => {
                    if !(h > 0.0) || !(t_max > end) {
                        return Err(Error::InvalidInput(format!(
                            "uniform segment needs h > 0 and T > {end}"
                        )));
                    }
                    if pos.is_empty() {
                        pos.push(0.0);
                    }
                    let n = ((t_max - end) / h + 1e-9).floor() as i64;
                    for i in 1..=n {
                        pos.push(end + i as f64 * h);
                    }
                    end += n as f64 * h;
                }
                GridSegment::Log { r_min, r_max, n } => {
                    if !(r_min > 0.0) || !(r_max > r_min) || n < 2 {
                        return Err(Error::InvalidInput("log segment needs 0 < rmin < rmax, n >= 2".into()));
                    }
                    let ratio = (r_max / r_min).ln();
                    for i in 0..n {
                        let r = r_min * (ratio * i as f64 / (n - 1) as f64).exp();
                        if r > end || pos.is_empty() {
                            pos.push(r);
                        }
                    }
                    end = r_max;
                }
            }
        }
        pos.dedup();
        let kind = if only_log {
            GridKind::LogSpaced
        } else if self.segments.len() == 1 && matches!(self.segments[0], GridSegment::Uniform { .. }) {
            GridKind::UniformDyadic
        } else {
            GridKind::Composite
        };
        Grid1D::mirrored(&pos, kind)
    }
}

impl FromStr for Grid1D {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse::<GridSpec>()?.build()
    }
}
