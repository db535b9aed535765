//! Measurement reports: CSV rows plus named assertions.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Where a threshold comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    /// Exponent or identity stated by the theory.
    Theory,
    /// Baseline frozen from a first oracle run.
    Baseline,
    /// Holds by construction (closed form).
    Exact,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Theory => "theory",
            Provenance::Baseline => "baseline",
            Provenance::Exact => "exact",
        })
    }
}

/// How a measurement is compared with its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Comparison {
    AtMost,
    AtLeast,
    /// `|measured - target| <= tolerance`.
    Within { target: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub provenance: Provenance,
    pub passed: bool,
}

impl Assertion {
    pub fn at_most(name: impl Into<String>, measured: f64, threshold: f64, provenance: Provenance) -> Self {
        let passed = measured <= threshold;
        Self { name: name.into(), measured, threshold, comparison: Comparison::AtMost, provenance, passed }
    }

    pub fn at_least(name: impl Into<String>, measured: f64, threshold: f64, provenance: Provenance) -> Self {
        let passed = measured >= threshold;
        Self { name: name.into(), measured, threshold, comparison: Comparison::AtLeast, provenance, passed }
    }

    pub fn within(name: impl Into<String>, measured: f64, target: f64, tolerance: f64, provenance: Provenance) -> Self {
        let passed = (measured - target).abs() <= tolerance;
        Self {
            name: name.into(),
            measured,
            threshold: tolerance,
            comparison: Comparison::Within { target },
            provenance,
            passed,
        }
    }

    /// A yes/no property, recorded as 1 or 0 against 1.
    pub fn holds(name: impl Into<String>, ok: bool, provenance: Provenance) -> Self {
        Self::at_least(name, if ok { 1.0 } else { 0.0 }, 1.0, provenance)
    }
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        match self.comparison {
            Comparison::AtMost => write!(f, "{status} {}: {:.6e} <= {:.6e}", self.name, self.measured, self.threshold)?,
            Comparison::AtLeast => write!(f, "{status} {}: {:.6e} >= {:.6e}", self.name, self.measured, self.threshold)?,
            Comparison::Within { target } => write!(
                f,
                "{status} {}: {:.6e} = {:.6e} +- {:.3e}",
                self.name, self.measured, target, self.threshold
            )?,
        }
        write!(f, " [{}]", self.provenance)
    }
}

/// One measured ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub witness: String,
    pub radius: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub rows: Vec<RatioRow>,
    pub assertions: Vec<Assertion>,
}

impl Report {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), ..Default::default() }
    }

    pub fn row(&mut self, witness: impl Into<String>, radius: f64, ratio: f64) {
        self.rows.push(RatioRow { witness: witness.into(), radius, ratio });
    }

    pub fn assert(&mut self, a: Assertion) {
        self.assertions.push(a);
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    /// Append another report's rows and assertions.
    pub fn merge(&mut self, other: Report) {
        self.rows.extend(other.rows);
        self.assertions.extend(other.assertions);
    }

    /// Ratios of one witness, in row order.
    pub fn ratios_of(&self, witness: &str) -> Vec<f64> {
        self.rows.iter().filter(|r| r.witness == witness).map(|r| r.ratio).collect()
    }

    /// CSV `witness,radius,ratio`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["witness", "radius", "ratio"])?;
        for r in &self.rows {
            out.write_record([r.witness.clone(), format!("{:e}", r.radius), format!("{:e}", r.ratio)])?;
        }
        out.flush()?;
        Ok(())
    }

    /// One line per assertion followed by a summary line.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for a in &self.assertions {
            s.push_str(&a.to_string());
            s.push('\n');
        }
        let failed = self.assertions.iter().filter(|a| !a.passed).count();
        s.push_str(&format!(
            "{}: {} assertions, {} failed -> {}\n",
            self.name,
            self.assertions.len(),
            failed,
            if failed == 0 { "PASS" } else { "FAIL" }
        ));
        s
    }
}

/// `max / min` of positive values; infinite when a value is not positive.
pub fn spread(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    if values.is_empty() || !(min > 0.0) {
        return f64::INFINITY;
    }
    max / min
}
