//! The fourteen acceptance criteria, one line each. Exits non-zero when any
//! criterion fails (assertion or runtime limit).

use std::process::ExitCode;
use std::time::Instant;

use radialfs_core::{run_experiment, ExperimentConfig};

struct Criterion {
    id: usize,
    title: &'static str,
    config: ExperimentConfig,
    limit_s: f64,
}

fn cfg(name: &str, edit: impl FnOnce(&mut ExperimentConfig)) -> ExperimentConfig {
    let mut c = ExperimentConfig::named(name);
    edit(&mut c);
    c
}

fn criteria() -> Vec<Criterion> {
    let c = |id, title, config, limit_s| Criterion { id, title, config, limit_s };
    vec![
        c(1, "f_{j,λ} band-norm scaling", cfg("scaling-f-j-lambda", |_| {}), 120.0),
        c(2, "weighted L_p scaling", cfg("lp-scaling", |_| {}), 30.0),
        c(3, "decay at infinity", cfg("decay-infinity", |_| {}), 120.0),
        c(4, "Strauss exponent, d = 3", cfg("strauss", |c| c.dims = Some(vec![3])), 60.0),
        c(5, "blow-up at the origin", cfg("origin-blow-up", |_| {}), 30.0),
        c(6, "log-borderline, q = ∞", cfg("log-borderline", |c| c.q = Some(f64::INFINITY)), 30.0),
        c(7, "BV decay on random staircases", cfg("bv-decay", |_| {}), 10.0),
        c(8, "BV trace equivalence", cfg("bv-equivalence", |_| {}), 10.0),
        c(9, "sequence-space identities", cfg("sequence-identities", |_| {}), 10.0),
        c(10, "trace/extension round trips", cfg("trace-round-trip", |_| {}), 10.0),
        c(11, "support-shift norm law", cfg("support-shift", |_| {}), 60.0),
        c(12, "spherical-mean wavelet sums", cfg("spherical-mean-wavelet", |_| {}), 180.0),
        c(13, "Sobolev radial reduction", cfg("sobolev-reduction", |_| {}), 60.0),
        c(14, "predicate tables", cfg("predicate-tables", |_| {}), 1.0),
    ]
}

fn main() -> ExitCode {
    let mut failed = 0;
    let start = Instant::now();
    for cr in criteria() {
        let t = Instant::now();
        let out = run_experiment(&cr.config, false);
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(out) => {
                let n = out.report.assertions.len();
                let bad: Vec<_> = out.report.assertions.iter().filter(|a| !a.passed).collect();
                let in_time = secs <= cr.limit_s;
                let ok = bad.is_empty() && in_time;
                println!(
                    "{} criterion {:>2} {}: {}/{} assertions, {:.2}s (limit {}s)",
                    if ok { "PASS" } else { "FAIL" },
                    cr.id,
                    cr.title,
                    n - bad.len(),
                    n,
                    secs,
                    cr.limit_s
                );
                for a in bad {
                    println!("      {a}");
                }
                if !ok {
                    failed += 1;
                }
            }
            Err(e) => {
                println!("FAIL criterion {:>2} {}: error: {e}", cr.id, cr.title);
                failed += 1;
            }
        }
    }
    println!("acceptance: {failed} of 14 criteria failed, {:.1}s total", start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
