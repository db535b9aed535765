//! Even sampled profiles `g` on symmetric grids.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::grid::{Grid1D, GridKind};
use crate::numerics;

/// An even function sampled on an even grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    grid: Grid1D,
    values: Vec<f64>,
    dim: Option<usize>,
}

impl RadialProfile {
    /// Wrap samples, rejecting non-finite values and any mismatch at paired nodes.
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "{} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if !grid.is_even() {
            return Err(Error::InvalidInput("profile grid must be even".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite value at t = {}",
                grid.nodes()[i]
            )));
        }
        let n = values.len();
        for i in 0..n / 2 {
            let (a, b) = (values[i], values[n - 1 - i]);
            if a != b {
                return Err(Error::EvennessViolation {
                    t: grid.nodes()[n - 1 - i],
                    mismatch: (a - b).abs(),
                });
            }
        }
        Ok(Self { grid, values, dim: None })
    }

    /// Sample `f(|t|)` on the non-negative half and mirror, so evenness is exact.
    pub fn from_fn(grid: &Grid1D, f: impl Fn(f64) -> f64) -> Result<Self> {
        let n = grid.len();
        let mut values = vec![0.0; n];
        for i in grid.nonnegative_range() {
            let v = f(grid.nodes()[i]);
            values[i] = v;
            values[n - 1 - i] = v;
        }
        Self::new(grid.clone(), values)
    }

    /// Attach a dimension used by the weight `|t|^{d-1}`.
    pub fn with_dim(mut self, d: usize) -> Self {
        self.dim = Some(d);
        self
    }

    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn nodes(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Nodes and values restricted to `t >= 0`.
    pub fn half(&self) -> (&[f64], &[f64]) {
        let r = self.grid.nonnegative_range();
        (&self.grid.nodes()[r.clone()], &self.values[r])
    }

    /// Piecewise-linear value at `t`; zero outside the grid extent.
    pub fn eval(&self, t: f64) -> f64 {
        numerics::interp(self.grid.nodes(), &self.values, t).unwrap_or(0.0)
    }

    /// Apply `f` to each value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let v = self.values.iter().map(|&x| f(x)).collect();
        let mut p = Self::new(self.grid.clone(), v)?;
        p.dim = self.dim;
        Ok(p)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        self.map(|x| c * x)
    }

    /// Pointwise sum of two profiles on the same grid.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::InvalidInput("profiles live on different grids".into()));
        }
        let v = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        let mut p = Self::new(self.grid.clone(), v)?;
        p.dim = self.dim.or(other.dim);
        Ok(p)
    }

    /// Finite-difference derivative of order `m` at every node.
    pub fn derivative(&self, m: usize) -> Result<Vec<f64>> {
        numerics::derivative(self.grid.nodes(), &self.values, m)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Write `t,value` CSV with a header row.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["t", "value"])?;
        for (t, v) in self.grid.nodes().iter().zip(&self.values) {
            wr.write_record([format!("{t:e}"), format!("{v:e}")])?;
        }
        wr.flush()?;
        Ok(())
    }

    /// Read `t,value` CSV; the node set must be even.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let header = rd.headers()?.clone();
        if header.len() != 2 || &header[0] != "t" || &header[1] != "value" {
            return Err(Error::Parse("expected header `t,value`".into()));
        }
        let mut t = Vec::new();
        let mut v = Vec::new();
        for (line, rec) in rd.records().enumerate() {
            let rec = rec?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("row {}: bad number `{s}`", line + 2)))
            };
            t.push(parse(&rec[0])?);
            v.push(parse(&rec[1])?);
        }
        Self::new(Grid1D::new(t, GridKind::Composite)?, v)
    }
}
