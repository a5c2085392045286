//! Timing of the direct product against the modular route for `(q;q)_inf`.

use std::time::Instant;

use qgamma_core::qseries::qpoch_infinite_direct_relative;
use qgamma_core::theta::qq_infinity_fast;
use qgamma_core::{Error, PrecisionSpec, QNome, TruncatedValue, XComplex};
use rug::Float;
use serde::Serialize;

use crate::CliError;

pub const DEFAULT_QS: &[&str] = &["0.9", "0.99", "0.999", "0.9999"];
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Modular,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub method: Method,
    pub q: String,
    pub terms_used: u64,
    /// Fastest of the repeated runs.
    pub wall_time_ms: f64,
    pub result_digits_agreed: u32,
    pub status: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub schema_version: u32,
    pub precision_bits: u32,
    pub budget: u64,
    pub records: Vec<BenchRecord>,
}

impl BenchReport {
    pub fn to_json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::Io(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{:<8} {:<12} {:>10} {:>12} {:>7}  status\n", "method", "q", "terms", "ms", "digits");
        for r in &self.records {
            out += &format!(
                "{:<8} {:<12} {:>10} {:>12.3} {:>7}  {}\n",
                match r.method {
                    Method::Direct => "direct",
                    Method::Modular => "modular",
                },
                r.q,
                r.terms_used,
                r.wall_time_ms,
                r.result_digits_agreed,
                r.status
            );
        }
        out
    }

    pub fn record(&self, method: Method, q: &str) -> Option<&BenchRecord> {
        self.records.iter().find(|r| r.method == method && r.q == q)
    }
}

/// Decimal digits on which `v` agrees with `reference`.
fn digits_agreed(v: &XComplex, reference: &XComplex, cap: u32) -> u32 {
    let p = reference.prec();
    let diff = Float::with_val(p, (v.with_prec(p) - reference).abs());
    if diff.is_zero() {
        return cap;
    }
    let rel = Float::with_val(p, diff / reference.abs());
    let d = -rel.log10().to_f64();
    if d.is_finite() && d > 0.0 {
        (d.floor() as u32).min(cap)
    } else {
        0
    }
}

fn timed<F>(repeats: u32, f: F) -> (Result<TruncatedValue, Error>, f64)
where
    F: Fn() -> Result<TruncatedValue, Error>,
{
    let mut best = f64::INFINITY;
    let mut out = f();
    for i in 0..repeats.max(1) {
        let start = Instant::now();
        let r = f();
        best = best.min(start.elapsed().as_secs_f64() * 1e3);
        if i == 0 {
            out = r;
        }
        if out.is_err() {
            break;
        }
    }
    (out, best)
}

pub fn cmd_bench(qs: &[String], budget: u64, repeats: u32, spec: &PrecisionSpec) -> Result<BenchReport, CliError> {
    let spec = spec.clone().with_term_budget(budget);
    let ref_spec = spec.scaled(2);
    let cap = spec.printable_digits() as u32;
    let mut records = Vec::new();
    for text in qs {
        let q = QNome::parse(text, ref_spec.work_bits() + 64)?;
        let reference = qq_infinity_fast(&q, &ref_spec)?.value;
        let a = XComplex::from_real(q.q().clone());
        let runs: [(Method, Box<dyn Fn() -> Result<TruncatedValue, Error>>); 2] = [
            (Method::Direct, Box::new(|| qpoch_infinite_direct_relative(&a, &q, &spec))),
            (Method::Modular, Box::new(|| qq_infinity_fast(&q, &spec))),
        ];
        for (method, run) in runs {
            let (res, ms) = timed(repeats, run);
            records.push(match res {
                Ok(v) => BenchRecord {
                    method,
                    q: text.clone(),
                    terms_used: v.terms,
                    wall_time_ms: ms,
                    result_digits_agreed: digits_agreed(&v.value, &reference, cap),
                    status: "OK".into(),
                },
                Err(Error::PrecisionUnreachable(_)) => BenchRecord {
                    method,
                    q: text.clone(),
                    terms_used: 0,
                    wall_time_ms: 0.0,
                    result_digits_agreed: 0,
                    status: "SKIPPED".into(),
                },
                Err(e) => return Err(e.into()),
            });
        }
    }
    Ok(BenchReport { schema_version: crate::SCHEMA_VERSION, precision_bits: spec.work_bits(), budget, records })
}
