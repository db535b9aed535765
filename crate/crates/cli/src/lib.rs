//! Config parsing and artifact writing for the `radialfs` binary.
//!
//! Two config formats are accepted. JSON, when the first non-blank character
//! is `{`, deserializes straight into [`ExperimentConfig`]. Otherwise the file
//! is flat `key = value` text with optional `[section]` headers:
//!
//! ```text
//! experiment = decay-infinity
//! seed = 7
//!
//! [params]
//! dims = 2, 3
//! p = 1, 2
//! scale = B
//!
//! [witnesses]
//! ids = f_j_lambda(j=1,lambda=3)
//! ```
//!
//! `#` starts a comment. Lists are comma separated; `inf` is accepted for numbers.

use std::fs;
use std::path::{Path, PathBuf};

use radialfs_core::{ExperimentConfig, ExperimentOutput};
use thiserror::Error;

/// Exit status when every assertion passes.
pub const EXIT_PASS: i32 = 0;
/// Exit status when at least one assertion fails.
pub const EXIT_FAIL: i32 = 1;
/// Exit status on config or runtime errors.
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: field `{field}`: {msg}")]
    Field { line: usize, field: String, msg: String },
    #[error("field `{field}`: {msg}")]
    Missing { field: String, msg: String },
    #[error("json: {0}")]
    Json(String),
}

/// Accepted keys, as `(section, key, field)`. An empty section means top level;
/// every key is also accepted at top level.
const KEYS: &[(&str, &str, &str)] = &[
    ("experiment", "name", "experiment"),
    ("", "experiment", "experiment"),
    ("experiment", "seed", "seed"),
    ("", "seed", "seed"),
    ("output", "dir", "output"),
    ("", "output", "output"),
    ("params", "dims", "dims"),
    ("params", "d", "dims"),
    ("params", "p", "p"),
    ("params", "s", "s"),
    ("params", "q", "q"),
    ("params", "scale", "scale"),
    ("witnesses", "ids", "witnesses"),
    ("", "witnesses", "witnesses"),
    ("grid", "descriptor", "grid"),
    ("", "grid", "grid"),
    ("params", "samples", "samples"),
    ("", "samples", "samples"),
    ("map", "region", "region"),
    ("map", "rect", "rect"),
    ("map", "res", "res"),
];

fn resolve(section: &str, key: &str) -> Option<&'static str> {
    KEYS.iter()
        .find(|(s, k, _)| *s == section && *k == key)
        .or_else(|| KEYS.iter().find(|(_, k, _)| *k == key))
        .map(|(_, _, f)| *f)
}

fn parse_f64(v: &str) -> Result<f64, String> {
    match v.trim() {
        "inf" | "∞" | "infinity" => Ok(f64::INFINITY),
        x => x.parse().map_err(|_| format!("expected a number, got {x:?}")),
    }
}

fn list(v: &str) -> Vec<&str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

/// Split on top-level commas, keeping `name(a=1,b=2)` descriptors whole.
fn descriptor_list(v: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in v.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                if !cur.trim().is_empty() {
                    out.push(cur.trim().to_string());
                }
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

fn assign(cfg: &mut ExperimentConfig, field: &str, v: &str) -> Result<(), String> {
    match field {
        "experiment" => cfg.experiment = v.to_string(),
        "seed" => cfg.seed = Some(v.parse().map_err(|_| format!("expected an unsigned integer, got {v:?}"))?),
        "output" => cfg.output = Some(v.to_string()),
        "dims" => {
            cfg.dims = Some(
                list(v)
                    .iter()
                    .map(|x| x.parse().map_err(|_| format!("expected an integer, got {x:?}")))
                    .collect::<Result<_, _>>()?,
            )
        }
        "p" => cfg.p = Some(list(v).iter().map(|x| parse_f64(x)).collect::<Result<_, _>>()?),
        "s" => cfg.s = Some(parse_f64(v)?),
        "q" => cfg.q = Some(parse_f64(v)?),
        "scale" => cfg.scale = Some(v.to_string()),
        "witnesses" => cfg.witnesses = Some(descriptor_list(v)),
        "grid" => cfg.grid = Some(v.to_string()),
        "samples" => cfg.samples = Some(v.parse().map_err(|_| format!("expected an integer, got {v:?}"))?),
        "region" => cfg.region = Some(v.to_string()),
        "rect" => cfg.rect = Some(parse_rect(v)?),
        "res" => cfg.res = Some(v.parse().map_err(|_| format!("expected an integer, got {v:?}"))?),
        _ => unreachable!("field table and assign disagree on {field}"),
    }
    Ok(())
}

/// `a,b,c,d` as four numbers.
pub fn parse_rect(v: &str) -> Result<[f64; 4], String> {
    let xs: Vec<f64> = list(v).iter().map(|x| parse_f64(x)).collect::<Result<_, _>>()?;
    <[f64; 4]>::try_from(xs.as_slice()).map_err(|_| format!("expected four numbers a,b,c,d, got {v:?}"))
}

/// Parse a config in either format.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let cfg = if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| ConfigError::Json(e.to_string()))?
    } else {
        parse_key_value(text)?
    };
    if cfg.experiment.is_empty() {
        return Err(ConfigError::Missing { field: "experiment".into(), msg: "no experiment named".into() });
    }
    if matches!(&cfg.witnesses, Some(w) if w.is_empty()) {
        return Err(ConfigError::Missing { field: "witnesses".into(), msg: "empty witness set".into() });
    }
    Ok(cfg)
}

fn parse_key_value(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = ExperimentConfig::default();
    let mut section = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        if let Some(name) = l.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::Syntax { line, msg: format!("unterminated section header {l:?}") })?;
            section = name.trim().to_string();
            continue;
        }
        let (k, v) = l
            .split_once('=')
            .ok_or_else(|| ConfigError::Syntax { line, msg: format!("expected key = value, got {l:?}") })?;
        let (k, v) = (k.trim(), v.trim());
        let field = resolve(&section, k).ok_or_else(|| ConfigError::Field {
            line,
            field: if section.is_empty() { k.to_string() } else { format!("{section}.{k}") },
            msg: "unknown key".into(),
        })?;
        assign(&mut cfg, field, v).map_err(|msg| ConfigError::Field { line, field: field.to_string(), msg })?;
        if field == "witnesses" && cfg.witnesses.as_ref().is_some_and(|w| w.is_empty()) {
            return Err(ConfigError::Field { line, field: field.into(), msg: "empty witness set".into() });
        }
    }
    Ok(cfg)
}

pub fn load_config(path: &Path) -> anyhow::Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    parse_config(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

/// Write every table, `summary.txt` and `report.json` under `dir`; returns the written paths.
pub fn write_artifacts(out: &ExperimentOutput, dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for t in &out.tables {
        let p = dir.join(&t.file);
        fs::write(&p, &t.csv)?;
        written.push(p);
    }
    let p = dir.join("summary.txt");
    fs::write(&p, out.report.summary())?;
    written.push(p);
    let p = dir.join("report.json");
    fs::write(&p, serde_json::to_string_pretty(&out.report)?)?;
    written.push(p);
    Ok(written)
}
