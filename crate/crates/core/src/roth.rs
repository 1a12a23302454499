//! Effective-irrationality exponents of partial-sum approximants measured
//! against the Roth threshold κ = 2, the two transcendence-criterion
//! hypothesis checks, and the branchwise counterexample family that led to
//! the criterion's corrected hypothesis.
//!
//! The Roth statement itself — κ <= 2 for algebraic irrationals — is never
//! applied silently: it rides along as a named assumption on every
//! transcendence-flavored conclusion.

use crate::exact::{
    ball_ln, ball_powr, cmp_certified, rat_str, BallCmp, BigInt, BigRat, Precision, RatBall,
};
use crate::primes::PrimeCache;
use crate::seq::{DeclaredFact, SeqSystem, SequenceDef, Window};
use crate::series::{self, SeriesError, SeriesForm, SeriesInstance};
use crate::verdict::{AssumedFact, Status, Verdict};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::sync::Arc;

pub const ROTH_ASSUMPTION: &str =
    "Roth: if |x - p/q| < q^-k has infinitely many coprime solutions with q > 0 \
     and x is algebraic irrational, then k <= 2 (taken as an assumption, not proved)";

/// Effective exponent of one partial-sum approximant.
#[derive(Debug, Clone)]
pub enum KappaEstimate {
    /// Enclosure of `-ln(gap) / ln(scale)`.
    Ball(RatBall),
    /// Only an upper bound on the gap was available; the exponent is at
    /// least this value.
    AtLeast(BigRat),
    /// No finite exponent (exact approximation or unit scale).
    Undefined(String),
}

impl KappaEstimate {
    /// Certified lower bound on the exponent, when one exists.
    pub fn certified_lower(&self) -> Option<BigRat> {
        match self {
            KappaEstimate::Ball(b) => Some(b.lo().clone()),
            KappaEstimate::AtLeast(v) => Some(v.clone()),
            KappaEstimate::Undefined(_) => None,
        }
    }
}

/// A partial-sum approximant `p/q` in lowest terms, the enclosure of its
/// gap to the series value, and the effective exponent measured against the
/// denominator scale `D(k) = ∏_{i<=k} a(i)` (the denominator before
/// reduction, which is what the criterion's proof manipulates).
#[derive(Debug, Clone)]
pub struct Approximant {
    pub k: i64,
    pub p: BigInt,
    /// Reduced denominator, coprime to `p` and positive.
    pub q: BigInt,
    /// Unreduced denominator scale `∏_{i<=k} a(i)`.
    pub q_scale: BigInt,
    /// Enclosure of `|value - p/q|`.
    pub gap: RatBall,
    pub kappa: KappaEstimate,
}

/// Builds approximants from partial sums for `k` up to `kmax`.
pub fn approximants(
    s: &SeriesInstance,
    kmax: i64,
    prec: &Precision,
    facts: &[DeclaredFact],
) -> Result<Vec<Approximant>, SeriesError> {
    if s.form() != SeriesForm::Plain {
        return Err(SeriesError::Domain("approximants take the plain form".into()));
    }
    let mut out = Vec::new();
    for k in s.first_index()..=kmax {
        let sum = series::partial_sum(s, k)?;
        let p = sum.numer().clone();
        let q = sum.denom().clone();
        debug_assert!(q.is_positive() && p.gcd(&q).is_one());
        let q_scale = series::partial_product(s, k)?;
        // Refine the tail until the gap is relatively tight (the exponent
        // needs ln-accuracy, not absolute width). Finite tables stop the
        // refinement at their last entry.
        let mut extra = 1u32;
        let mut last: Option<RatBall> = None;
        let gap = loop {
            let gap = match series::tail_enclosure(s, k, facts, extra) {
                Ok((tail, _, _)) => tail.abs(),
                Err(SeriesError::Eval(crate::seq::EvalError::TableOutOfRange { .. }))
                | Err(SeriesError::Eval(crate::seq::EvalError::ResourceCap(_)))
                    if last.is_some() =>
                {
                    break last.expect("checked");
                }
                Err(e) => return Err(e),
            };
            let tight_enough = gap.hi().is_zero()
                || (gap.lo().is_positive()
                    && gap.hi() - gap.lo() <= gap.lo() * crate::exact::rat(1, 1 << 20));
            if tight_enough || extra >= 32 {
                break gap;
            }
            last = Some(gap);
            extra *= 2;
        };
        let kappa = kappa_estimate(&gap, &q_scale, prec)?;
        out.push(Approximant { k, p, q, q_scale, gap, kappa });
    }
    Ok(out)
}

fn kappa_estimate(
    gap: &RatBall,
    q_scale: &BigInt,
    prec: &Precision,
) -> Result<KappaEstimate, SeriesError> {
    if q_scale.is_one() {
        return Ok(KappaEstimate::Undefined("denominator scale is 1; ln q = 0".into()));
    }
    if gap.hi().is_zero() {
        return Ok(KappaEstimate::Undefined("tail exactly zero; approximation exact".into()));
    }
    let ln_q = ball_ln(&RatBall::point(BigRat::from_integer(q_scale.clone())), prec)?;
    if gap.lo().is_positive() {
        let ln_gap = ball_ln(gap, prec)?;
        let kappa = ln_gap.neg().div(&ln_q)?;
        Ok(KappaEstimate::Ball(kappa))
    } else {
        // Only the upper gap bound is certified; it yields a lower bound.
        let ln_hi = ball_ln(&RatBall::point(gap.hi().clone()), prec)?;
        let bound = ln_hi.neg().div(&ln_q)?;
        Ok(KappaEstimate::AtLeast(bound.lo().clone()))
    }
}

/// Hypothesis bundle for the transcendence criteria.
pub struct HrHypotheses {
    pub delta: BigRat,
    /// Required by the second criterion only.
    pub epsilon: Option<BigRat>,
    /// Start index of the root-gap requirement.
    pub t: i64,
    pub window: Window,
    pub prec: Precision,
}

impl HrHypotheses {
    pub fn new(delta: BigRat, window: Window, prec: Precision) -> Result<Self, SeriesError> {
        if !delta.is_positive() {
            return Err(SeriesError::Domain("delta must be positive".into()));
        }
        Ok(HrHypotheses { delta, epsilon: None, t: 1, window, prec })
    }

    pub fn with_epsilon(mut self, epsilon: BigRat) -> Result<Self, SeriesError> {
        if !epsilon.is_positive() {
            return Err(SeriesError::Domain("epsilon must be positive".into()));
        }
        self.epsilon = Some(epsilon);
        Ok(self)
    }

    pub fn with_start(mut self, t: i64) -> Self {
        self.t = t;
        self
    }
}

/// Window diagnostics for the first transcendence criterion.
#[derive(Debug, Clone)]
pub struct HrThm21Report {
    /// `ln` of the unboundedness quantity
    /// `a(k+1) / (∏_{i<=k} a(i))^(2+δ) / b(k+1)` per index.
    pub limsup_log: Vec<(i64, RatBall)>,
    /// Indices where a new running maximum occurs.
    pub new_max_indices: Vec<i64>,
    /// Set when the running maximum stalls in the lower half of the window.
    pub no_divergence_flag: bool,
    /// `(a(k+1)/a(k)) (b(k)/b(k+1))` per index, exact.
    pub liminf_values: Vec<(i64, BigRat)>,
    /// Exact window minimum of the above, with its index.
    pub liminf_window_min: Option<(i64, BigRat)>,
    /// Certified margin of the window minimum over 1 (negative if below).
    pub liminf_margin_over_one: Option<BigRat>,
    pub verdict: Verdict,
}

fn limsup_log_values(
    s: &SeriesInstance,
    exponent: &BigRat,
    w: Window,
    prec: &Precision,
) -> Result<Vec<(i64, RatBall)>, SeriesError> {
    let mut out = Vec::new();
    for k in w.iter() {
        let a_next = BigRat::from_integer(s.a_int(k + 1)?);
        let b_next = BigRat::from_integer(s.b_int(k + 1)?);
        if !b_next.is_positive() {
            return Err(SeriesError::Domain(format!("b({}) must be positive", k + 1)));
        }
        let d = BigRat::from_integer(series::partial_product(s, k)?);
        let ln_a = ball_ln(&RatBall::point(a_next), prec)?;
        let ln_d = ball_ln(&RatBall::point(d), prec)?;
        let ln_b = ball_ln(&RatBall::point(b_next), prec)?;
        let v = ln_a.sub(&ln_d.scale(exponent)).sub(&ln_b);
        out.push((k, v));
    }
    Ok(out)
}

fn running_max_indices(values: &[(i64, RatBall)]) -> Vec<i64> {
    let mut out = Vec::new();
    let mut best: Option<&RatBall> = None;
    for (k, v) in values {
        let is_new_max = match best {
            None => true,
            // Certified strictly above the previous maximum.
            Some(b) => v.lo() > b.hi(),
        };
        if is_new_max {
            best = Some(v);
            out.push(*k);
        }
    }
    out
}

pub fn check_hr_thm21(
    s: &SeriesInstance,
    h: &HrHypotheses,
) -> Result<HrThm21Report, SeriesError> {
    let w = h.window;
    let exponent = crate::exact::rat_int(2) + &h.delta;
    let limsup_log = limsup_log_values(s, &exponent, w, &h.prec)?;
    let new_max_indices = running_max_indices(&limsup_log);
    let midpoint = w.from + (w.to - w.from) / 2;
    let no_divergence_flag =
        new_max_indices.last().map_or(true, |&last| last < midpoint);

    let mut liminf_values = Vec::new();
    let mut min: Option<(i64, BigRat)> = None;
    for k in w.iter() {
        let a_k = BigRat::from_integer(s.a_int(k)?);
        let a_next = BigRat::from_integer(s.a_int(k + 1)?);
        let b_k = BigRat::from_integer(s.b_int(k)?);
        let b_next = BigRat::from_integer(s.b_int(k + 1)?);
        if !b_k.is_positive() || !b_next.is_positive() {
            return Err(SeriesError::Domain(format!("b({k}) must be positive")));
        }
        let v = (a_next / a_k) * (b_k / b_next);
        if min.as_ref().map_or(true, |(_, m)| v < *m) {
            min = Some((k, v.clone()));
        }
        liminf_values.push((k, v));
    }
    let liminf_margin_over_one = min.as_ref().map(|(_, m)| m - BigRat::one());
    let verdict = Verdict::inconclusive(
        "both hypotheses are limit statements; the window yields diagnostics only",
    )
    .with_assumed(vec![
        AssumedFact {
            fact: format!(
                "limsup a(k+1)/(prod a_i)^(2+{})/b(k+1) = infinity",
                rat_str(&h.delta)
            ),
            checked: Some((w.from, w.to)),
        },
        AssumedFact {
            fact: "liminf (a(k+1)/a(k))(b(k)/b(k+1)) > 1".into(),
            checked: Some((w.from, w.to)),
        },
    ]);
    Ok(HrThm21Report {
        limsup_log,
        new_max_indices,
        no_divergence_flag,
        liminf_values,
        liminf_window_min: min,
        liminf_margin_over_one,
        verdict,
    })
}

/// Window diagnostics for the second transcendence criterion.
#[derive(Debug, Clone)]
pub struct HrThm22Report {
    /// Exponent `2 + 2/ε + δ` used in the unboundedness quantity.
    pub exponent: BigRat,
    pub limsup_log: Vec<(i64, RatBall)>,
    pub new_max_indices: Vec<i64>,
    pub no_divergence_flag: bool,
    /// Per-index certified check of
    /// `(a(k+1)/b(k+1))^(1/(1+ε)) >= (a(k)/b(k))^(1/(1+ε)) + 1`.
    pub root_gap: Vec<(i64, Status)>,
    pub root_gap_verdict: Verdict,
}

pub fn check_hr_thm22(
    s: &SeriesInstance,
    h: &HrHypotheses,
) -> Result<HrThm22Report, SeriesError> {
    let epsilon = h
        .epsilon
        .clone()
        .ok_or_else(|| SeriesError::Domain("this criterion needs epsilon > 0".into()))?;
    let w = h.window;
    let exponent = crate::exact::rat_int(2) + crate::exact::rat_int(2) / &epsilon + &h.delta;
    let limsup_log = limsup_log_values(s, &exponent, w, &h.prec)?;
    let new_max_indices = running_max_indices(&limsup_log);
    let midpoint = w.from + (w.to - w.from) / 2;
    let no_divergence_flag =
        new_max_indices.last().map_or(true, |&last| last < midpoint);

    let root_exp = RatBall::point(BigRat::one() / (BigRat::one() + &epsilon));
    let mut root_gap = Vec::new();
    let mut first_refuted = None;
    let mut any_overlap = false;
    for k in w.iter().filter(|&k| k >= h.t) {
        let ratio_k = BigRat::from_integer(s.a_int(k)?) / BigRat::from_integer(s.b_int(k)?);
        let ratio_next =
            BigRat::from_integer(s.a_int(k + 1)?) / BigRat::from_integer(s.b_int(k + 1)?);
        let lhs = ball_powr(&RatBall::point(ratio_next), &root_exp, &h.prec)?;
        let rhs = ball_powr(&RatBall::point(ratio_k), &root_exp, &h.prec)?
            .add_rat(&BigRat::one());
        let status = match cmp_certified(&lhs, &rhs) {
            BallCmp::Greater => Status::CertifiedTrue,
            BallCmp::Less => Status::RefutedAt(k),
            BallCmp::Overlap => Status::Inconclusive("enclosures overlap".into()),
        };
        match &status {
            Status::RefutedAt(_) if first_refuted.is_none() => first_refuted = Some(k),
            Status::Inconclusive(_) => any_overlap = true,
            _ => {}
        }
        root_gap.push((k, status));
    }
    let root_gap_verdict = match first_refuted {
        Some(k) => Verdict::refuted_at(k),
        None if root_gap.is_empty() => {
            Verdict::inconclusive("window has no index at or past t")
        }
        None if any_overlap => Verdict::inconclusive("some enclosures overlapped"),
        None => Verdict::certified().with_assumed(vec![AssumedFact {
            fact: "the root-gap inequality beyond the window".into(),
            checked: Some((h.t.max(w.from), w.to)),
        }]),
    };
    Ok(HrThm22Report {
        exponent,
        limsup_log,
        new_max_indices,
        no_divergence_flag,
        root_gap,
        root_gap_verdict,
    })
}

/// Combined approximant/hypothesis report. The headline counts indices with
/// a certified exponent strictly above the Roth threshold 2; the
/// transcendence reading of that headline explicitly assumes the Roth
/// statement.
#[derive(Debug, Clone)]
pub struct TranscendenceReport {
    pub approximants: Vec<Approximant>,
    /// Indices with certified exponent lower bound > 2.
    pub exceptional_indices: Vec<i64>,
    pub roth_assumption: AssumedFact,
    pub summary: String,
}

pub fn transcendence_report(
    s: &SeriesInstance,
    kmax: i64,
    prec: &Precision,
    facts: &[DeclaredFact],
) -> Result<TranscendenceReport, SeriesError> {
    let approx = approximants(s, kmax, prec, facts)?;
    let two = crate::exact::rat_int(2);
    let exceptional: Vec<i64> = approx
        .iter()
        .filter(|a| a.kappa.certified_lower().map_or(false, |lo| lo > two))
        .map(|a| a.k)
        .collect();
    let summary = format!(
        "{} of {} approximants have a certified effective exponent above 2; \
         reading persistence of such exponents as transcendence relies on the \
         Roth assumption",
        exceptional.len(),
        approx.len()
    );
    Ok(TranscendenceReport {
        approximants: approx,
        exceptional_indices: exceptional,
        roth_assumption: AssumedFact { fact: ROTH_ASSUMPTION.into(), checked: None },
        summary,
    })
}

/// The two-branch sequence family that broke the criterion's original
/// "for each A > 1" claim: `a(k+1) = k (∏_{i<=k} a(i))^ceil(2+δ)` at odd k,
/// `a(k+1) = 2 a(k)` at even k, with unit numerators.
pub struct CounterexampleFamily {
    pub delta: BigRat,
    pub exponent: BigInt,
    pub a_values: Vec<BigInt>,
    pub series: SeriesInstance,
}

pub fn counterexample_sequence(
    delta: &BigRat,
    a1: &BigInt,
    kmax: i64,
) -> Result<CounterexampleFamily, SeriesError> {
    if !delta.is_positive() {
        return Err(SeriesError::Domain("delta must be positive".into()));
    }
    if a1 < &BigInt::from(2) {
        return Err(SeriesError::Domain("a1 must be at least 2".into()));
    }
    if kmax < 1 {
        return Err(SeriesError::Domain("kmax must be at least 1".into()));
    }
    let exponent = (crate::exact::rat_int(2) + delta).ceil().to_integer();
    let e_u64 = num_traits::ToPrimitive::to_u64(&exponent)
        .ok_or_else(|| SeriesError::Domain("ceil(2+delta) out of range".into()))?;
    let mut a_values = vec![a1.clone()];
    let mut product = a1.clone();
    for k in 1..kmax {
        let next = if k % 2 == 1 {
            let powed = crate::exact::rat_pow(&BigRat::from_integer(product.clone()), e_u64)
                .to_integer();
            BigInt::from(k) * powed
        } else {
            BigInt::from(2) * &a_values[(k - 1) as usize]
        };
        product *= &next;
        a_values.push(next);
    }
    let mut sys = SeqSystem::new(Arc::new(PrimeCache::new()));
    sys.insert(SequenceDef::table_of_ints("a", a_values.clone()))
        .map_err(SeriesError::Eval)?;
    sys.insert(SequenceDef::table_of_ints(
        "b",
        vec![BigInt::one(); a_values.len()],
    ))
    .map_err(SeriesError::Eval)?;
    let series = SeriesInstance::new(sys, SeriesForm::Plain)?;
    Ok(CounterexampleFamily {
        delta: delta.clone(),
        exponent,
        a_values,
        series,
    })
}

impl CounterexampleFamily {
    pub fn kmax(&self) -> i64 {
        self.a_values.len() as i64
    }

    /// Indices `k` where the claim `(1/A)(b(k)/a(k)) >= b(k+1)/a(k+1)`
    /// fails, i.e. `a(k+1) < A a(k)` with unit numerators. The original
    /// "for each A > 1" form fails at every even index once `A > 2`; the
    /// corrected "there exists A > 1" form is consistent with `A <= 2`
    /// on the window.
    pub fn claim_failure_indices(&self, a_const: &BigRat) -> Vec<i64> {
        let mut out = Vec::new();
        for k in 1..self.kmax() {
            let a_k = BigRat::from_integer(self.a_values[(k - 1) as usize].clone());
            let a_next = BigRat::from_integer(self.a_values[k as usize].clone());
            if a_next < a_const * a_k {
                out.push(k);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{parse_rat, rat, rat_int};
    use crate::seq::parse_sequence;

    fn instance(a: &str, b: &str) -> SeriesInstance {
        let mut sys = SeqSystem::new(Arc::new(PrimeCache::new()));
        sys.insert(parse_sequence(a).unwrap().named("a")).unwrap();
        sys.insert(parse_sequence(b).unwrap().named("b")).unwrap();
        SeriesInstance::new(sys, SeriesForm::Plain).unwrap()
    }

    fn facts() -> Vec<DeclaredFact> {
        vec![
            DeclaredFact::RatioDominated { c: rat(1, 2), from: 1 },
            DeclaredFact::EventuallyPositive { from: 1 },
        ]
    }

    #[test]
    fn liouville_approximants_exact_exponents() {
        let s = instance("2^(n!)", "1");
        let approx = approximants(&s, 5, &Precision::decimal(12), &facts()).unwrap();
        // k = 4: unreduced scale 2^33, reduced denominator 2^24,
        // gap about 2^-120, exponent near 120/33.
        let a4 = &approx[3];
        assert_eq!(a4.q_scale, BigInt::one() << 33);
        assert_eq!(a4.q, BigInt::one() << 24);
        assert!(a4.p.gcd(&a4.q).is_one());
        match &a4.kappa {
            KappaEstimate::Ball(b) => {
                assert!(b.contains(&rat(120, 33)), "{b}");
                assert!(b.width() <= rat(1, 1000));
            }
            other => panic!("expected a kappa ball, got {other:?}"),
        }
        // Gap ball brackets the true tail (brute force to depth 7).
        let mut brute = BigRat::zero();
        for j in 5..=7i64 {
            brute += s.term(j).unwrap();
        }
        assert!(a4.gap.contains(&brute));
    }

    #[test]
    fn gap_soundness_for_truncated_table_series() {
        // On a finite table the exact value is computable; the gap ball of
        // every approximant must bracket |value - p/q|.
        let mut sys = SeqSystem::new(Arc::new(PrimeCache::new()));
        let a: Vec<BigInt> = vec![2, 8, 64, 1024, 32768, 1 << 21]
            .into_iter()
            .map(BigInt::from)
            .collect();
        let b = vec![BigInt::one(); 6];
        sys.insert(SequenceDef::table_of_ints("a", a.clone())).unwrap();
        sys.insert(SequenceDef::table_of_ints("b", b)).unwrap();
        let s = SeriesInstance::new(sys, SeriesForm::Plain).unwrap();
        let value = series::partial_sum(&s, 6).unwrap();
        let approx = approximants(&s, 4, &Precision::decimal(12), &facts()).unwrap();
        for ap in &approx {
            let gap = (&value - BigRat::new(ap.p.clone(), ap.q.clone())).abs();
            assert!(
                *ap.gap.lo() <= gap && gap <= ap.gap.hi().clone() + ap.gap.width(),
                "k={}: true gap {} outside {}",
                ap.k,
                rat_str(&gap),
                ap.gap
            );
        }
    }

    #[test]
    fn geometric_exponents_stay_below_two() {
        let s = instance("2^n", "1");
        let approx = approximants(&s, 10, &Precision::decimal(12), &facts()).unwrap();
        for ap in &approx {
            let lo = ap.kappa.certified_lower().expect("ball kappa");
            assert!(lo < rat_int(2), "k={}: {lo}", ap.k);
        }
    }

    #[test]
    fn kappa_consistency_with_rational_power_check() {
        // If gap.hi < scale^-u exactly then the kappa lower bound is >= u.
        let s = instance("2^(n!)", "1");
        let approx = approximants(&s, 5, &Precision::decimal(12), &facts()).unwrap();
        for ap in &approx[2..] {
            let u = 3u64;
            let scale_pow = crate::exact::rat_pow(
                &BigRat::from_integer(ap.q_scale.clone()),
                u,
            );
            if *ap.gap.hi() < scale_pow.recip() {
                let lo = ap.kappa.certified_lower().expect("kappa");
                assert!(lo >= rat_int(u as i64), "k={}: {lo} < {u}", ap.k);
            }
        }
    }

    #[test]
    fn exact_tail_gives_undefined_kappa() {
        let mut sys = SeqSystem::new(Arc::new(PrimeCache::new()));
        let a: Vec<BigInt> = vec![2, 4, 8, 16].into_iter().map(BigInt::from).collect();
        let b: Vec<BigInt> =
            vec![1, 1, 0, 0].into_iter().map(BigInt::from).collect();
        sys.insert(SequenceDef::table_of_ints("a", a)).unwrap();
        sys.insert(SequenceDef::table_of_ints("b", b)).unwrap();
        let s = SeriesInstance::new(sys, SeriesForm::Plain).unwrap();
        let approx = approximants(
            &s,
            2,
            &Precision::decimal(12),
            &[DeclaredFact::RatioDominated { c: rat(1, 2), from: 1 }],
        )
        .unwrap();
        let a2 = &approx[1];
        assert_eq!(a2.gap, RatBall::from_int(0));
        assert!(matches!(a2.kappa, KappaEstimate::Undefined(_)));
    }

    #[test]
    fn hr_thm21_liouville_diagnostics() {
        let s = instance("2^(n!)", "1");
        let h = HrHypotheses::new(
            rat_int(1),
            Window::new(2, 7).unwrap(),
            Precision::decimal(10),
        )
        .unwrap();
        let rep = check_hr_thm21(&s, &h).unwrap();
        // The liminf quantity is 2^((k+1)! - k!) = 2^(k! * k) >= 2^4.
        let (_, min) = rep.liminf_window_min.clone().unwrap();
        assert!(min >= rat_int(16));
        assert!(rep.liminf_margin_over_one.unwrap() > rat_int(0));
        assert!(!rep.no_divergence_flag);
        // Maxima keep arriving through the window.
        assert_eq!(rep.new_max_indices.last(), Some(&7));
    }

    #[test]
    fn hr_thm21_geometric_flags_no_divergence() {
        let s = instance("2^n", "1");
        let h = HrHypotheses::new(
            rat_int(1),
            Window::new(1, 12).unwrap(),
            Precision::decimal(10),
        )
        .unwrap();
        let rep = check_hr_thm21(&s, &h).unwrap();
        assert!(rep.no_divergence_flag);
    }

    #[test]
    fn hr_thm22_liouville_root_gap() {
        // At k = 1 the gap genuinely fails: sqrt(4) = 2 < sqrt(2) + 1.
        // From k = 2 on it holds comfortably.
        let s = instance("2^(n!)", "1");
        let h = HrHypotheses::new(
            rat_int(1),
            Window::new(1, 8).unwrap(),
            Precision::decimal(12),
        )
        .unwrap()
        .with_epsilon(rat_int(1))
        .unwrap();
        let rep = check_hr_thm22(&s, &h).unwrap();
        assert_eq!(rep.root_gap_verdict.status, Status::RefutedAt(1));
        assert_eq!(rep.exponent, rat_int(5));
        let h2 = HrHypotheses::new(
            rat_int(1),
            Window::new(1, 8).unwrap(),
            Precision::decimal(12),
        )
        .unwrap()
        .with_epsilon(rat_int(1))
        .unwrap()
        .with_start(2);
        let rep2 = check_hr_thm22(&s, &h2).unwrap();
        assert!(rep2.root_gap_verdict.is_certified(), "{:?}", rep2.root_gap_verdict.status);
    }

    #[test]
    fn hr_thm22_slow_family_fails_root_gap() {
        // a(k) = k+1: sqrt(k+2) - sqrt(k+1) < 1 from the start.
        let s = instance("n+1", "1");
        let h = HrHypotheses::new(
            rat_int(1),
            Window::new(1, 10).unwrap(),
            Precision::decimal(12),
        )
        .unwrap()
        .with_epsilon(rat_int(1))
        .unwrap();
        let rep = check_hr_thm22(&s, &h).unwrap();
        assert!(matches!(rep.root_gap_verdict.status, Status::RefutedAt(_)));
    }

    #[test]
    fn thm22_exponent_decreases_in_epsilon() {
        let delta = rat(1, 2);
        let mut last: Option<BigRat> = None;
        for eps in [rat(1, 4), rat(1, 2), rat_int(1), rat_int(4), rat_int(1000)] {
            let e = rat_int(2) + rat_int(2) / &eps + &delta;
            if let Some(prev) = last {
                assert!(e < prev);
            }
            last = Some(e);
        }
        // Huge epsilon approaches 2 + delta.
        assert!(last.unwrap() - (rat_int(2) + &delta) < rat(1, 100));
    }

    #[test]
    fn transcendence_headline_liouville() {
        let s = instance("2^(n!)", "1");
        let rep = transcendence_report(&s, 6, &Precision::decimal(12), &facts()).unwrap();
        // kappa is near 2 at k = 1, 2 and certified above 2 from k = 3.
        assert_eq!(rep.exceptional_indices, vec![3, 4, 5, 6]);
        assert!(rep.roth_assumption.fact.contains("assumption"));
    }

    #[test]
    fn transcendence_geometric_has_no_exceptional_indices() {
        let s = instance("2^n", "1");
        let rep = transcendence_report(&s, 10, &Precision::decimal(12), &facts()).unwrap();
        assert!(rep.exceptional_indices.is_empty());
    }

    #[test]
    fn counterexample_branches() {
        let fam = counterexample_sequence(&rat_int(1), &BigInt::from(2), 12).unwrap();
        assert_eq!(fam.exponent, BigInt::from(3));
        // a1=2, a2 = 1*(2)^3 = 8, a3 = 2*8 = 16, a4 = 3*(2*8*16)^3.
        assert_eq!(fam.a_values[0], BigInt::from(2));
        assert_eq!(fam.a_values[1], BigInt::from(8));
        assert_eq!(fam.a_values[2], BigInt::from(16));
        assert_eq!(fam.a_values[3], BigInt::from(3) * BigInt::from(256u32).pow(3));
        // Branch identities on the whole window.
        let mut product = fam.a_values[0].clone();
        for k in 1..fam.kmax() {
            let prev = &fam.a_values[(k - 1) as usize];
            let cur = &fam.a_values[k as usize];
            if k % 2 == 0 {
                assert_eq!(cur, &(BigInt::from(2) * prev), "even k={k}");
            } else {
                let powed =
                    crate::exact::rat_pow(&BigRat::from_integer(product.clone()), 3).to_integer();
                assert!(cur.is_multiple_of(&powed), "odd k={k}");
            }
            product *= cur;
        }
    }

    #[test]
    fn counterexample_claim_failures() {
        let fam = counterexample_sequence(&rat_int(1), &BigInt::from(2), 12).unwrap();
        // A = 3: fails exactly at even indices (a(k+1) = 2a(k) < 3a(k)).
        let failures = fam.claim_failure_indices(&rat_int(3));
        assert_eq!(failures, vec![2, 4, 6, 8, 10]);
        // A = 3/2 and the corrected-claim audit at A = 2: no failures.
        assert!(fam.claim_failure_indices(&rat(3, 2)).is_empty());
        assert!(fam.claim_failure_indices(&rat_int(2)).is_empty());
    }

    #[test]
    fn counterexample_degenerate_and_bad_inputs() {
        let fam = counterexample_sequence(&rat_int(1), &BigInt::from(2), 1).unwrap();
        assert_eq!(fam.kmax(), 1);
        assert!(fam.claim_failure_indices(&rat_int(3)).is_empty());
        assert!(counterexample_sequence(&rat_int(0), &BigInt::from(2), 5).is_err());
        assert!(counterexample_sequence(&rat_int(1), &BigInt::one(), 5).is_err());
    }

    #[test]
    fn counterexample_non_integer_delta_ceiling() {
        let fam = counterexample_sequence(&parse_rat("1/2").unwrap(), &BigInt::from(2), 6)
            .unwrap();
        // ceil(2 + 1/2) = 3.
        assert_eq!(fam.exponent, BigInt::from(3));
        let fam2 = counterexample_sequence(&parse_rat("2").unwrap(), &BigInt::from(2), 6)
            .unwrap();
        // Integer delta: ceiling is 2 + delta itself.
        assert_eq!(fam2.exponent, BigInt::from(4));
    }
}
