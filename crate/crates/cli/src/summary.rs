//! Human-readable summary, computed from result records only.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde_json::Value;

use crate::records::{EvalPayload, Record};

/// Witness lines printed before eliding the rest.
const WITNESS_LINES: usize = 20;

fn value(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            if x == 0.0 || (1e-4..1e9).contains(&x.abs()) {
                format!("{x}")
            } else {
                format!("{x:.9e}")
            }
        }
        Value::String(s) => format!("{s:?}"),
        other => other.to_string(),
    }
}

fn pairs(map: &BTreeMap<String, Value>) -> String {
    map.iter().map(|(k, v)| format!("{k}={}", value(v))).collect::<Vec<_>>().join(" ")
}

fn eval_line(e: &EvalPayload) -> String {
    format!("{:<12} {}  ->  {}", e.quantity, pairs(&e.inputs), pairs(&e.outputs))
}

pub fn summarize(records: &[Record]) -> String {
    let mut s = String::new();
    let mut witnesses = 0usize;
    let mut ratios: BTreeMap<&'static str, (usize, f64, String)> = BTreeMap::new();
    for rec in records {
        match rec {
            Record::Manifest(m) => {
                let _ = writeln!(s, "almsq {} {}  config {}", m.command, m.tool_version, &m.config_digest[..16]);
            }
            Record::Witness(w) => {
                witnesses += 1;
                if witnesses <= WITNESS_LINES {
                    let _ = writeln!(s, "witness      {} = {} × {}", w.n, w.a, w.b);
                }
            }
            Record::Coverage(c) => {
                let r = &c.report;
                let _ = writeln!(
                    s,
                    "coverage     X={} span={} samples={} exceptional={} fraction={:.6} max_wait={:.3}",
                    c.x, c.span, r.sampled, r.exceptional, r.exceptional_fraction, r.max_gap
                );
            }
            Record::Gap(g) => {
                let _ = writeln!(
                    s,
                    "gaps         [{}, {}] almost_squares={} max_gap={}",
                    g.lo, g.hi, g.stats.count, g.stats.max_gap
                );
                for b in &g.stats.histogram {
                    let _ = writeln!(s, "  [{}, {}) {}", b.lo, b.hi, b.count);
                }
            }
            Record::Bound(b) => {
                let entry = ratios.entry(b.lemma.label()).or_insert((0, f64::NEG_INFINITY, String::new()));
                entry.0 += 1;
                if b.ratio > entry.1 {
                    entry.1 = b.ratio;
                    entry.2 = b.grid_point.describe();
                }
            }
            Record::Eval(e) => {
                let _ = writeln!(s, "{}", eval_line(e));
            }
        }
    }
    if witnesses > WITNESS_LINES {
        let _ = writeln!(s, "... {} witnesses in total", witnesses);
    } else if witnesses > 0 {
        let _ = writeln!(s, "{witnesses} witness(es)");
    }
    for (lemma, (count, max, at)) in &ratios {
        let _ = writeln!(s, "lemma {lemma:<3} points={count} max_ratio={max:.6e} at {at}");
    }
    s
}
