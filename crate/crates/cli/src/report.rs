//! The machine-readable report envelope and exact value rendering.
//!
//! Every numeric value in a report is an exact string: rationals render as
//! `"p/q"` (or `"p"` for integers) and enclosures carry both endpoints plus
//! a 12-digit decimal approximation derived deterministically from the exact
//! midpoint. Binary floats never appear.

use irrcrit::exact::{rat_str, BigInt, BigRat, Precision, RatBall};
use irrcrit::seq::Window;
use irrcrit::verdict::{AssumedFact, Verdict};
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const REPORT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
pub struct Report {
    pub analysis: String,
    pub inputs: Value,
    pub verdict: Verdict,
    pub assumed_facts: Vec<AssumedFact>,
    pub window: Option<Window>,
    pub precision: PrecisionEcho,
    pub values: Value,
    pub runtime_ms: u128,
    pub version: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PrecisionEcho {
    pub target_width: String,
    pub max_work: u64,
}

impl PrecisionEcho {
    pub fn of(prec: &Precision) -> Self {
        PrecisionEcho {
            target_width: rat_str(prec.target_width()),
            max_work: prec.max_work(),
        }
    }
}

impl Report {
    pub fn new(analysis: &str, inputs: Value, prec: &Precision) -> Self {
        Report {
            analysis: analysis.to_string(),
            inputs,
            verdict: Verdict::certified(),
            assumed_facts: Vec::new(),
            window: None,
            precision: PrecisionEcho::of(prec),
            values: Value::Null,
            runtime_ms: 0,
            version: REPORT_VERSION.to_string(),
        }
    }

    pub fn render(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Deterministic decimal approximation with `digits` places, half-away ties.
pub fn approx_str(x: &BigRat, digits: u32) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits as usize);
    let scaled = (x * BigRat::from_integer(scale.clone())).round().to_integer();
    let negative = scaled.is_negative();
    let mag = scaled.abs();
    let (int_part, frac_part) = (mag.clone() / &scale, mag % &scale);
    let frac = format!("{:0>width$}", frac_part.to_string(), width = digits as usize);
    format!("{}{}.{}", if negative { "-" } else { "" }, int_part, frac)
}

pub fn rat_json(x: &BigRat) -> Value {
    json!({ "exact": rat_str(x), "approx": approx_str(x, 12) })
}

pub fn ball_json(b: &RatBall) -> Value {
    json!({
        "lo": rat_str(b.lo()),
        "hi": rat_str(b.hi()),
        "approx": approx_str(&b.midpoint(), 12),
        "width": rat_str(&b.width()),
    })
}

pub fn indexed_rats(values: &[(i64, BigRat)]) -> Value {
    Value::Array(
        values
            .iter()
            .map(|(n, v)| json!({ "n": n, "value": rat_json(v) }))
            .collect(),
    )
}

pub fn indexed_balls(values: &[(i64, RatBall)]) -> Value {
    Value::Array(
        values
            .iter()
            .map(|(n, v)| json!({ "n": n, "ball": ball_json(v) }))
            .collect(),
    )
}

pub fn status_json(v: &irrcrit::verdict::Status) -> Value {
    serde_json::to_value(v).expect("status serializes")
}
