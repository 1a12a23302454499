//! Declared asymptotic facts and their finite-window audits.
//!
//! A declared fact encodes a "for all large n" hypothesis as data. The
//! library never trusts one silently: a fact is either exactly verified on
//! the analysis window (and reported as assumed beyond it) or refuted at a
//! concrete index.

use super::ast::SeqExpr;
use super::system::{EvalError, SeqSystem};
use crate::exact::{ball_ln, rat_pow, rat_str, BigRat, Precision, RatBall};
use crate::verdict::{AssumedFact, Verdict};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Inclusive index range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub from: i64,
    pub to: i64,
}

impl Window {
    pub fn new(from: i64, to: i64) -> Result<Self, String> {
        if from > to {
            return Err(format!("window {from}..{to} is empty"));
        }
        Ok(Window { from, to })
    }

    pub fn len(&self) -> u64 {
        (self.to - self.from + 1) as u64
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.from..=self.to
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DeclaredFact {
    /// `term(n) >= bound(n)` for all `n >= from`.
    EventuallyGe { bound: SeqExpr, from: i64 },
    /// `term(n) > 0` for all `n >= from`.
    EventuallyPositive { from: i64 },
    /// `term(n+1) >= term(n)` for all `n >= from`.
    MonotoneNondecreasing { from: i64 },
    /// `|term(n+1)| <= c * |term(n)|` for all `n >= from`, with `c < 1`.
    RatioDominated { c: BigRat, from: i64 },
    /// `0 <= ln term(n) <= coeff * ratio^n` for all `n >= from`, with
    /// `ratio < 1`.
    LogTailDominated { coeff: BigRat, ratio: BigRat, from: i64 },
}

impl DeclaredFact {
    pub fn validate(&self) -> Result<(), String> {
        match self {
            DeclaredFact::RatioDominated { c, .. } => {
                if c.is_negative() || *c >= BigRat::one() {
                    return Err(format!("ratio_dominated constant {} outside [0,1)", rat_str(c)));
                }
            }
            DeclaredFact::LogTailDominated { coeff, ratio, .. } => {
                if coeff.is_negative() {
                    return Err("log_tail_dominated coefficient must be nonnegative".into());
                }
                if !ratio.is_positive() || *ratio >= BigRat::one() {
                    return Err(format!(
                        "log_tail_dominated ratio {} outside (0,1)",
                        rat_str(ratio)
                    ));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Index from which the fact is claimed.
    pub fn from_index(&self) -> i64 {
        match self {
            DeclaredFact::EventuallyGe { from, .. }
            | DeclaredFact::EventuallyPositive { from }
            | DeclaredFact::MonotoneNondecreasing { from }
            | DeclaredFact::RatioDominated { from, .. }
            | DeclaredFact::LogTailDominated { from, .. } => *from,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            DeclaredFact::EventuallyGe { bound, from } => {
                format!("term(n) >= {bound} for n >= {from}")
            }
            DeclaredFact::EventuallyPositive { from } => {
                format!("term(n) > 0 for n >= {from}")
            }
            DeclaredFact::MonotoneNondecreasing { from } => {
                format!("term(n+1) >= term(n) for n >= {from}")
            }
            DeclaredFact::RatioDominated { c, from } => {
                format!("|term(n+1)| <= {} * |term(n)| for n >= {from}", rat_str(c))
            }
            DeclaredFact::LogTailDominated { coeff, ratio, from } => {
                format!(
                    "0 <= ln term(n) <= {} * ({})^n for n >= {from}",
                    rat_str(coeff),
                    rat_str(ratio)
                )
            }
        }
    }

    pub fn assumed_beyond(&self, checked: Window) -> AssumedFact {
        AssumedFact {
            fact: self.describe(),
            checked: Some((checked.from, checked.to)),
        }
    }
}

/// Audits a fact against an arbitrary term function on a window.
///
/// `CertifiedTrue` means the inequality held, in exact arithmetic, at every
/// window index the fact claims; the verdict's assumed list records that
/// indices beyond the window remain unchecked.
pub fn check_fact_terms<F>(
    mut term: F,
    fact: &DeclaredFact,
    w: Window,
) -> Result<Verdict, EvalError>
where
    F: FnMut(i64) -> Result<BigRat, EvalError>,
{
    fact.validate().map_err(EvalError::Domain)?;
    let start = fact.from_index().max(w.from);
    let mk_certified = |checked_to: i64| {
        if checked_to < start {
            return Verdict::inconclusive(format!(
                "window [{}, {}] contains no index covered by the fact",
                w.from, w.to
            ));
        }
        let checked = Window { from: start, to: checked_to };
        Verdict::certified().with_assumed(vec![fact.assumed_beyond(checked)])
    };
    match fact {
        DeclaredFact::EventuallyGe { bound, from: _ } => {
            for n in start..=w.to {
                let t = term(n)?;
                let b = eval_bound(bound, n, &mut term)?;
                if t < b {
                    return Ok(Verdict::refuted_at(n));
                }
            }
            Ok(mk_certified(w.to))
        }
        DeclaredFact::EventuallyPositive { .. } => {
            for n in start..=w.to {
                if !term(n)?.is_positive() {
                    return Ok(Verdict::refuted_at(n));
                }
            }
            Ok(mk_certified(w.to))
        }
        DeclaredFact::MonotoneNondecreasing { .. } => {
            for n in start..w.to {
                if term(n + 1)? < term(n)? {
                    return Ok(Verdict::refuted_at(n));
                }
            }
            Ok(mk_certified(w.to - 1))
        }
        DeclaredFact::RatioDominated { c, .. } => {
            // Checked multiplicatively so zero terms verify instead of
            // dividing by zero: |t(n+1)| <= c |t(n)| forces later zeros.
            for n in start..w.to {
                let t = term(n)?.abs();
                let next = term(n + 1)?.abs();
                if next > &t * c {
                    return Ok(Verdict::refuted_at(n));
                }
            }
            Ok(mk_certified(w.to - 1))
        }
        DeclaredFact::LogTailDominated { coeff, ratio, .. } => {
            for n in start..=w.to {
                let t = term(n)?;
                if t < BigRat::one() {
                    // ln term(n) < 0 violates the lower bound.
                    return Ok(Verdict::refuted_at(n));
                }
                if n < 0 {
                    return Err(EvalError::Domain(
                        "log_tail_dominated needs nonnegative indices".into(),
                    ));
                }
                let rhs = coeff * rat_pow(ratio, n as u64);
                // The margin of ln(1+x) <= x shrinks like x^2/2; the
                // enclosure must be tighter than that to decide.
                let target = if rhs.is_positive() {
                    (&rhs * &rhs / crate::exact::rat_int(8))
                        .min(crate::exact::parse_rat("1e-40").expect("literal"))
                } else {
                    crate::exact::parse_rat("1e-60").expect("literal")
                };
                let prec = Precision::new(target, 1 << 20)
                    .map_err(|e| EvalError::Domain(e.to_string()))?;
                let ln_ball = ball_ln(&RatBall::point(t), &prec)
                    .map_err(|e| EvalError::Domain(e.to_string()))?;
                // Non-strict: d(n) = 1 against a zero bound must verify.
                if *ln_ball.hi() <= rhs {
                    continue;
                }
                if *ln_ball.lo() > rhs {
                    return Ok(Verdict::refuted_at(n));
                }
                return Ok(Verdict::inconclusive(format!(
                    "ln enclosure at n={n} overlaps the declared bound"
                )));
            }
            Ok(mk_certified(w.to))
        }
    }
}

fn eval_bound<F>(bound: &SeqExpr, n: i64, _term: &mut F) -> Result<BigRat, EvalError>
where
    F: FnMut(i64) -> Result<BigRat, EvalError>,
{
    // Bounds are closed-form in n only (no params, no sequence refs).
    match bound {
        SeqExpr::Int(v) => Ok(BigRat::from_integer(v.clone())),
        SeqExpr::Var => Ok(BigRat::from_integer(n.into())),
        SeqExpr::Add(a, b) => Ok(eval_bound(a, n, _term)? + eval_bound(b, n, _term)?),
        SeqExpr::Sub(a, b) => Ok(eval_bound(a, n, _term)? - eval_bound(b, n, _term)?),
        SeqExpr::Mul(a, b) => Ok(eval_bound(a, n, _term)? * eval_bound(b, n, _term)?),
        SeqExpr::Div(a, b) => {
            let d = eval_bound(b, n, _term)?;
            if d.is_zero() {
                return Err(EvalError::DivisionByZero);
            }
            Ok(eval_bound(a, n, _term)? / d)
        }
        SeqExpr::Pow(a, b) => {
            let base = eval_bound(a, n, _term)?;
            let e = eval_bound(b, n, _term)?;
            if !e.is_integer() || e.is_negative() {
                return Err(EvalError::Domain("bound exponent must be a nonnegative integer".into()));
            }
            let e = num_traits::ToPrimitive::to_u64(&e.to_integer())
                .ok_or_else(|| EvalError::ResourceCap("bound exponent too large".into()))?;
            Ok(rat_pow(&base, e))
        }
        other => Err(EvalError::Domain(format!(
            "unsupported construct in fact bound: {other}"
        ))),
    }
}

/// Audits a fact against a named sequence of a [`SeqSystem`].
pub fn check_fact_on_window(
    sys: &SeqSystem,
    name: &str,
    fact: &DeclaredFact,
    w: Window,
) -> Result<Verdict, EvalError> {
    check_fact_terms(|n| sys.eval_rat(name, n), fact, w)
}
