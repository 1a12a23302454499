//! Partial sums and products, certified tail bounds, the limit form of the
//! ratio test, and the denominator-refutation engine shared by the witness
//! and product criteria.

use crate::exact::{
    cmp_certified, rat_str, BallCmp, BigInt, BigRat, ExactError, Precision, RatBall,
};
use crate::seq::{check_fact_terms, DeclaredFact, EvalError, SeqSystem, Window};
use crate::verdict::{AssumedFact, Verdict};
use num_traits::{One, Signed, Zero};
use std::cell::RefCell;
use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("series evaluation: {0}")]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("{0}")]
    Domain(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

/// Shape of the series denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesForm {
    /// `Σ b(n) / ∏_{i<=n} a(i)` — running-product denominators.
    Cantor,
    /// `Σ b(n) / a(n)` — direct denominators.
    Plain,
}

impl SeriesForm {
    pub fn name(self) -> &'static str {
        match self {
            SeriesForm::Cantor => "cantor",
            SeriesForm::Plain => "plain",
        }
    }
}

/// A concrete series `(a, b, form)` over a sequence system, together with
/// the declared facts about its terms.
pub struct SeriesInstance {
    sys: SeqSystem,
    a: String,
    b: String,
    form: SeriesForm,
    facts: Vec<DeclaredFact>,
    first_index: i64,
    psum: RefCell<HashMap<i64, BigRat>>,
}

impl SeriesInstance {
    /// Expects sequences named `a` and `b` registered in `sys` with equal
    /// first indices.
    pub fn new(sys: SeqSystem, form: SeriesForm) -> Result<Self, SeriesError> {
        Self::with_names(sys, form, "a", "b")
    }

    pub fn with_names(
        sys: SeqSystem,
        form: SeriesForm,
        a: &str,
        b: &str,
    ) -> Result<Self, SeriesError> {
        let fa = sys
            .def(a)
            .ok_or_else(|| SeriesError::Domain(format!("missing sequence {a:?}")))?
            .first_index;
        let fb = sys
            .def(b)
            .ok_or_else(|| SeriesError::Domain(format!("missing sequence {b:?}")))?
            .first_index;
        if fa != fb {
            return Err(SeriesError::Domain(format!(
                "sequences {a:?} and {b:?} start at different indices ({fa} vs {fb})"
            )));
        }
        Ok(SeriesInstance {
            sys,
            a: a.to_string(),
            b: b.to_string(),
            form,
            facts: Vec::new(),
            first_index: fa,
            psum: RefCell::new(HashMap::new()),
        })
    }

    pub fn with_facts(mut self, facts: Vec<DeclaredFact>) -> Self {
        self.facts = facts;
        self
    }

    pub fn sys(&self) -> &SeqSystem {
        &self.sys
    }

    pub fn form(&self) -> SeriesForm {
        self.form
    }

    pub fn facts(&self) -> &[DeclaredFact] {
        &self.facts
    }

    pub fn first_index(&self) -> i64 {
        self.first_index
    }

    pub fn a_name(&self) -> &str {
        &self.a
    }

    pub fn b_name(&self) -> &str {
        &self.b
    }

    /// `a(n)` with the positivity invariant enforced at every access.
    pub fn a_int(&self, n: i64) -> Result<BigInt, SeriesError> {
        let v = self.sys.eval_int(&self.a, n)?;
        if v < BigInt::one() {
            return Err(SeriesError::Domain(format!("a({n}) = {v} violates a(n) >= 1")));
        }
        Ok(v)
    }

    pub fn b_int(&self, n: i64) -> Result<BigInt, SeriesError> {
        Ok(self.sys.eval_int(&self.b, n)?)
    }

    /// The n-th series term in the declared form.
    pub fn term(&self, n: i64) -> Result<BigRat, SeriesError> {
        let b = BigRat::from_integer(self.b_int(n)?);
        match self.form {
            SeriesForm::Plain => Ok(b / BigRat::from_integer(self.a_int(n)?)),
            SeriesForm::Cantor => {
                let d = self.partial_product_rat(n)?;
                Ok(b / d)
            }
        }
    }

    fn partial_product_rat(&self, n: i64) -> Result<BigRat, SeriesError> {
        // Positivity of every factor is part of the instance invariant.
        for i in self.first_index..=n {
            self.a_int(i)?;
        }
        Ok(self.sys.prefix_product(&self.a, n)?)
    }
}

/// Exact `∏_{i=first..n} a(i)`; the running product is the denominator scale
/// `D(n)` for both series forms.
pub fn partial_product(s: &SeriesInstance, n: i64) -> Result<BigInt, SeriesError> {
    if n < s.first_index {
        return Err(SeriesError::Domain(format!(
            "partial product below first index {}",
            s.first_index
        )));
    }
    Ok(s.partial_product_rat(n)?.to_integer())
}

/// Exact partial sum of the first terms through index `n`.
pub fn partial_sum(s: &SeriesInstance, n: i64) -> Result<BigRat, SeriesError> {
    if n < s.first_index {
        return Err(SeriesError::Domain(format!(
            "partial sum below first index {}",
            s.first_index
        )));
    }
    if let Some(v) = s.psum.borrow().get(&n) {
        return Ok(v.clone());
    }
    let mut best: Option<(i64, BigRat)> = None;
    for (&k, v) in s.psum.borrow().iter() {
        if k <= n && best.as_ref().map_or(true, |(bk, _)| k > *bk) {
            best = Some((k, v.clone()));
        }
    }
    let (mut k, mut acc) = best.unwrap_or((s.first_index - 1, BigRat::zero()));
    while k < n {
        k += 1;
        acc += s.term(k)?;
        s.psum.borrow_mut().insert(k, acc.clone());
    }
    Ok(acc)
}

/// Keeps structured evaluation errors intact when a term closure needs the
/// narrower error type.
fn to_eval_error(e: SeriesError) -> EvalError {
    match e {
        SeriesError::Eval(inner) => inner,
        other => EvalError::Domain(other.to_string()),
    }
}

/// Certified tail bound derived from a declared ratio-domination fact.
#[derive(Debug, Clone)]
pub struct TailBound {
    /// The tail is `Σ_{k > from} term(k)`.
    pub from: i64,
    /// Enclosure of the tail's absolute value.
    pub bound: RatBall,
    pub justification: Vec<DeclaredFact>,
}

fn find_ratio_fact<'f>(
    facts: &'f [DeclaredFact],
    at: i64,
    max_c: Option<&BigRat>,
) -> Option<&'f DeclaredFact> {
    facts.iter().find(|f| match f {
        DeclaredFact::RatioDominated { c, from } => {
            *from <= at && max_c.map_or(true, |m| c <= m)
        }
        _ => false,
    })
}

/// Signed enclosure of `Σ_{k > n} term(k)` from a window-audited
/// ratio-domination fact, refined by `extra` exact leading tail terms.
pub(crate) fn tail_enclosure(
    s: &SeriesInstance,
    n: i64,
    facts: &[DeclaredFact],
    extra: u32,
) -> Result<(RatBall, Vec<DeclaredFact>, Vec<AssumedFact>), SeriesError> {
    let fact = find_ratio_fact(facts, n, None).ok_or_else(|| {
        SeriesError::Inconclusive(format!(
            "no ratio_dominated fact covering index {n}; tail bound unavailable"
        ))
    })?;
    let (c, from) = match fact {
        DeclaredFact::RatioDominated { c, from } => (c.clone(), *from),
        _ => unreachable!(),
    };
    let m = n + extra as i64;
    // Audit the fact on every index the bound relies on.
    let audit = Window::new(from.min(n), m + 1).expect("nonempty audit window");
    let verdict = check_fact_terms(
        |k| s.term(k).map_err(to_eval_error),
        fact,
        audit,
    )?;
    if let Some(idx) = verdict.refutation_index() {
        return Err(SeriesError::Inconclusive(format!(
            "declared fact [{}] fails at index {idx}",
            fact.describe()
        )));
    }
    let mut justification = vec![fact.clone()];
    let mut assumed = vec![fact.assumed_beyond(audit)];

    // Exact leading terms, then the geometric bound on the rest.
    let mut head = BigRat::zero();
    for k in (n + 1)..=m {
        head += s.term(k)?;
    }
    let first_omitted = s.term(m + 1)?;
    let geo = first_omitted.abs() / (BigRat::one() - &c);
    let rest = if tail_positivity(s, facts, m + 1, &mut justification, &mut assumed)? {
        RatBall::new(first_omitted, geo).expect("0 <= t <= |t|/(1-c)")
    } else {
        RatBall::new(-geo.clone(), geo).expect("symmetric")
    };
    Ok((rest.add_rat(&head), justification, assumed))
}

/// Positivity of the unevaluated tail needs a declared fact; the first
/// omitted term is checked exactly.
fn tail_positivity(
    s: &SeriesInstance,
    facts: &[DeclaredFact],
    at: i64,
    justification: &mut Vec<DeclaredFact>,
    assumed: &mut Vec<AssumedFact>,
) -> Result<bool, SeriesError> {
    let Some(fact) = facts
        .iter()
        .find(|f| matches!(f, DeclaredFact::EventuallyPositive { from } if *from <= at))
    else {
        return Ok(false);
    };
    if s.term(at)?.is_positive() {
        justification.push(fact.clone());
        assumed.push(fact.assumed_beyond(Window::new(at, at).unwrap()));
        Ok(true)
    } else {
        Ok(false)
    }
}

/// Upper bound `|Σ_{k>n} term(k)| <= |term(n+1)| / (1 - c)` from a declared,
/// window-audited domination fact.
pub fn tail_bound(
    s: &SeriesInstance,
    n: i64,
    facts: &[DeclaredFact],
) -> Result<TailBound, SeriesError> {
    let (ball, justification, _) = tail_enclosure(s, n, facts, 0)?;
    Ok(TailBound { from: n, bound: ball.abs(), justification })
}

/// The limit form of the ratio test: terms whose ratios tend to `c < 1` are
/// summable because they are eventually dominated by `(1+c)/2 < 1`.
///
/// `CertifiedTrue` requires a declared `ratio_dominated` fact with constant
/// at most `(1+c)/2`, verified exactly on the window; without one the result
/// is a diagnostic `Inconclusive` reporting the observed ratio trend.
pub fn ratio_test_tendsto(
    s: &SeriesInstance,
    c: &BigRat,
    facts: &[DeclaredFact],
    w: Window,
) -> Result<Verdict, SeriesError> {
    if *c >= BigRat::one() {
        return Err(SeriesError::Domain("ratio test requires c < 1".into()));
    }
    let threshold = (BigRat::one() + c) / crate::exact::rat_int(2);
    let Some(fact) = find_ratio_fact(facts, w.from, Some(&threshold)) else {
        let mut worst: Option<(i64, BigRat)> = None;
        for n in w.from..w.to {
            let t = s.term(n)?;
            if t.is_zero() {
                return Ok(Verdict::inconclusive(format!(
                    "term({n}) is zero; ratio undefined"
                )));
            }
            let r = (s.term(n + 1)? / t).abs();
            if worst.as_ref().map_or(true, |(_, m)| r > *m) {
                worst = Some((n, r));
            }
        }
        let trend = worst
            .map(|(n, r)| format!("max observed ratio {} at n={n}", rat_str(&r)))
            .unwrap_or_else(|| "window too short for ratios".into());
        return Ok(Verdict::inconclusive(format!(
            "no ratio_dominated fact with constant <= (1+c)/2 = {}; {trend}",
            rat_str(&threshold)
        )));
    };
    Ok(check_fact_terms(
        |k| s.term(k).map_err(to_eval_error),
        fact,
        w,
    )?)
}

/// Enclosure of the series value at a fixed truncation depth:
/// `partial_sum(depth)` plus the coarse tail bound.
pub fn value_enclosure_at(
    s: &SeriesInstance,
    depth: i64,
    facts: &[DeclaredFact],
) -> Result<RatBall, SeriesError> {
    let head = partial_sum(s, depth)?;
    let (tail, _, _) = tail_enclosure(s, depth, facts, 0)?;
    Ok(tail.add_rat(&head))
}

/// Enclosure at a fixed depth, refining the tail with exact leading terms
/// until the width target is met, refinement stops helping, or term sizes
/// hit a resource cap.
pub fn value_enclosure_at_target(
    s: &SeriesInstance,
    depth: i64,
    facts: &[DeclaredFact],
    target: &BigRat,
) -> Result<RatBall, SeriesError> {
    let head = partial_sum(s, depth)?;
    let mut best: Option<RatBall> = None;
    let mut extra = 0u32;
    loop {
        let ball = match tail_enclosure(s, depth, facts, extra) {
            Ok((tail, _, _)) => tail.add_rat(&head),
            // Deeper tail terms can outgrow evaluation caps; keep what we have.
            Err(SeriesError::Eval(EvalError::ResourceCap(_))) if best.is_some() => break,
            Err(e) => return Err(e),
        };
        let next = match &best {
            None => ball,
            Some(prev) => prev.intersect(&ball).unwrap_or_else(|| prev.clone()),
        };
        let done = next.width() <= *target || extra >= 64;
        best = Some(next);
        if done {
            break;
        }
        extra = if extra == 0 { 2 } else { extra * 2 };
    }
    Ok(best.expect("at least one enclosure computed"))
}

/// Enclosure of the series value, deepening the partial sum until the width
/// target is met; returns the ball and the depth used.
pub fn value_enclosure(
    s: &SeriesInstance,
    prec: &Precision,
    facts: &[DeclaredFact],
) -> Result<(RatBall, i64), SeriesError> {
    let mut n = s.first_index;
    let max_depth = s.first_index + prec.max_work().min(100_000) as i64;
    let mut acc: Option<RatBall> = None;
    loop {
        let e = value_enclosure_at(s, n, facts)?;
        let next = match &acc {
            None => e,
            // Successive depths are nested given the domination fact; the
            // intersection makes that unconditional.
            Some(prev) => prev.intersect(&e).unwrap_or_else(|| prev.clone()),
        };
        let done = next.width() <= *prec.target_width() || n >= max_depth;
        acc = Some(next);
        if done {
            return Ok((acc.expect("set"), n));
        }
        n += 1;
    }
}

/// Refutes the hypothesis that the series value is rational with denominator
/// `q`: if it were, `E(n) = q * D(n) * tail(n)` would be a positive integer
/// for every `n`, so a certified `E(n) < 1` at any index is a contradiction.
pub fn denominator_refutation(
    s: &SeriesInstance,
    q: &BigInt,
    nmax: i64,
    prec: &Precision,
    facts: &[DeclaredFact],
) -> Result<Verdict, SeriesError> {
    if !q.is_positive() {
        return Err(SeriesError::Domain("denominator candidate must be positive".into()));
    }
    let _ = prec;
    let first = s.first_index;
    let mut assumed: Vec<AssumedFact> = Vec::new();
    for n in first..=nmax {
        // Positivity of b on everything evaluated keeps E(n) > 0.
        if !s.b_int(n)?.is_positive() {
            return Ok(Verdict::inconclusive(format!(
                "b({n}) is not positive; refutation requires positive terms"
            )));
        }
        let d = s.partial_product_rat(n)?;
        let scale = BigRat::from_integer(q.clone()) * &d;
        let mut extra = 4u32;
        loop {
            let (tail, _, assume) = tail_enclosure(s, n, facts, extra)?;
            let e_ball = tail.scale(&scale);
            match cmp_certified(&e_ball, &RatBall::from_int(1)) {
                BallCmp::Less => {
                    if e_ball.lo().is_negative() {
                        return Ok(Verdict::inconclusive(format!(
                            "E({n}) enclosure {e_ball} not certified positive"
                        )));
                    }
                    let mut v = Verdict::refuted_at(n);
                    assumed.extend(assume);
                    v.assumed = dedup_assumed(assumed);
                    return Ok(v);
                }
                BallCmp::Greater => {
                    assumed.extend(assume);
                    break;
                }
                BallCmp::Overlap => {
                    if extra >= 64 {
                        assumed.extend(assume);
                        break;
                    }
                    extra *= 2;
                }
            }
        }
    }
    let mut v = Verdict::inconclusive(format!(
        "no index up to {nmax} certifies E(n) < 1 for q = {q}"
    ));
    v.assumed = dedup_assumed(assumed);
    Ok(v)
}

pub(crate) fn dedup_assumed(mut facts: Vec<AssumedFact>) -> Vec<AssumedFact> {
    let mut seen = std::collections::HashSet::new();
    facts.retain(|f| seen.insert(f.fact.clone()));
    facts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_int};
    use crate::primes::PrimeCache;
    use crate::seq::{parse_sequence, SequenceDef};
    use crate::verdict::Status;
    use std::sync::Arc;

    fn system(a: &str, b: &str) -> SeqSystem {
        let mut sys = SeqSystem::new(Arc::new(PrimeCache::new()));
        sys.insert(parse_sequence(a).unwrap().named("a")).unwrap();
        sys.insert(parse_sequence(b).unwrap().named("b")).unwrap();
        sys
    }

    /// a(n) = n+2, b(n) = n+1: the Cantor series telescoping to exactly 1.
    fn telescoping() -> SeriesInstance {
        SeriesInstance::new(system("n+2", "n+1"), SeriesForm::Cantor).unwrap()
    }

    fn ratio_facts(c: BigRat) -> Vec<DeclaredFact> {
        vec![
            DeclaredFact::RatioDominated { c, from: 1 },
            DeclaredFact::EventuallyPositive { from: 1 },
        ]
    }

    #[test]
    fn partial_products() {
        let s = telescoping();
        assert_eq!(partial_product(&s, 3).unwrap(), BigInt::from(60));
        let s2 = SeriesInstance::new(system("2^(2^n)", "1"), SeriesForm::Cantor).unwrap();
        assert_eq!(partial_product(&s2, 2).unwrap(), BigInt::from(64));
        let sp = SeriesInstance::new(system("nth_prime(n)", "1"), SeriesForm::Cantor).unwrap();
        assert_eq!(partial_product(&sp, 4).unwrap(), BigInt::from(210));
    }

    #[test]
    fn partial_product_is_incremental() {
        let s = telescoping();
        for n in 1..=12 {
            let p = partial_product(&s, n).unwrap();
            if n > 1 {
                let prev = partial_product(&s, n - 1).unwrap();
                assert_eq!(p, prev * s.a_int(n).unwrap());
            }
        }
    }

    #[test]
    fn telescoping_partial_sums_closed_form() {
        // partial_sum(n) = 1 - 2/(n+2)! exactly.
        let s = telescoping();
        assert_eq!(partial_sum(&s, 3).unwrap(), rat(59, 60));
        for n in 1..=30i64 {
            let mut fact = BigRat::one();
            for i in 2..=(n + 2) {
                fact *= rat_int(i);
            }
            let expected = BigRat::one() - rat_int(2) / &fact;
            assert_eq!(partial_sum(&s, n).unwrap(), expected, "n = {n}");
        }
    }

    #[test]
    fn zero_series_sums_to_zero() {
        let s = SeriesInstance::new(system("n+2", "0"), SeriesForm::Cantor).unwrap();
        assert_eq!(partial_sum(&s, 10).unwrap(), BigRat::zero());
        let ball = value_enclosure_at(&s, 3, &ratio_facts(rat(1, 2))).unwrap();
        assert_eq!(ball, RatBall::from_int(0));
    }

    #[test]
    fn plain_form_direct_sum() {
        let s = SeriesInstance::new(system("2^(n!)", "1"), SeriesForm::Plain).unwrap();
        assert_eq!(partial_sum(&s, 2).unwrap(), rat(3, 4));
    }

    #[test]
    fn ratio_test_geometric() {
        let s = SeriesInstance::new(system("2^n", "1"), SeriesForm::Plain).unwrap();
        let v = ratio_test_tendsto(
            &s,
            &rat(1, 2),
            &ratio_facts(rat(3, 4)),
            Window::new(1, 40).unwrap(),
        )
        .unwrap();
        assert!(v.is_certified());
        assert!(!v.assumed.is_empty());
    }

    #[test]
    fn ratio_test_divergent_refuted() {
        // Series terms n!: constant denominator 1, b = n!.
        let s = SeriesInstance::new(system("1", "n!"), SeriesForm::Plain).unwrap();
        let v = ratio_test_tendsto(
            &s,
            &rat(1, 2),
            &ratio_facts(rat(3, 4)),
            Window::new(1, 10).unwrap(),
        )
        .unwrap();
        assert_eq!(v.status, Status::RefutedAt(1));
    }

    #[test]
    fn ratio_test_e_minus_2() {
        // Terms 1/(n+1)!: ratios 1/(n+2) <= 1/2 from n = 1.
        let s = SeriesInstance::new(system("(n+1)!", "1"), SeriesForm::Plain).unwrap();
        let v = ratio_test_tendsto(
            &s,
            &rat_int(0),
            &ratio_facts(rat(1, 2)),
            Window::new(1, 30).unwrap(),
        )
        .unwrap();
        assert!(v.is_certified());
    }

    #[test]
    fn ratio_test_without_fact_is_diagnostic() {
        let s = SeriesInstance::new(system("2^n", "1"), SeriesForm::Plain).unwrap();
        let v = ratio_test_tendsto(&s, &rat(1, 2), &[], Window::new(1, 10).unwrap()).unwrap();
        assert!(matches!(v.status, Status::Inconclusive(_)));
    }

    #[test]
    fn tail_bound_geometric() {
        // Terms 2^-n at n = 10: bound = 2^-11 / (1/2) = 2^-10, the exact tail.
        let s = SeriesInstance::new(system("2^n", "1"), SeriesForm::Plain).unwrap();
        let tb = tail_bound(&s, 10, &ratio_facts(rat(1, 2))).unwrap();
        let exact = rat(1, 1024);
        assert!(tb.bound.contains(&exact), "{} does not contain 1/1024", tb.bound);
        assert!(*tb.bound.hi() <= rat(1, 512));
        assert!(*tb.bound.lo() >= BigRat::zero());
        assert!(!tb.justification.is_empty());
    }

    #[test]
    fn tail_bound_zero_series() {
        let s = SeriesInstance::new(system("n+2", "0"), SeriesForm::Cantor).unwrap();
        let tb = tail_bound(&s, 5, &ratio_facts(rat(1, 2))).unwrap();
        assert_eq!(tb.bound, RatBall::from_int(0));
    }

    #[test]
    fn tail_bound_e_minus_2() {
        // At n = 5 with c = 1/2 the coarse bound is 2/6!; the true tail,
        // brute-forced over 30 terms, is below 1/420.
        let s = SeriesInstance::new(system("(n+1)!", "1"), SeriesForm::Plain).unwrap();
        let tb = tail_bound(&s, 5, &ratio_facts(rat(1, 2))).unwrap();
        assert!(*tb.bound.hi() <= rat(1, 180));
        let mut brute = BigRat::zero();
        for k in 6..=35i64 {
            brute += s.term(k).unwrap();
        }
        assert!(tb.bound.contains(&brute));
        assert!(brute < rat(1, 420));
    }

    #[test]
    fn tail_bound_requires_fact() {
        let s = telescoping();
        assert!(matches!(tail_bound(&s, 5, &[]), Err(SeriesError::Inconclusive(_))));
    }

    #[test]
    fn value_enclosure_telescoping_is_one() {
        let s = telescoping();
        let facts = ratio_facts(rat(1, 2));
        let prec = Precision::decimal(15);
        let (ball, depth) = value_enclosure(&s, &prec, &facts).unwrap();
        assert!(ball.contains(&BigRat::one()), "{ball}");
        assert!(ball.width() <= rat(1, 1_000_000_000_000_000));
        assert!(depth <= 20, "depth {depth}");
        // At fixed depth 12 a refined tail reaches the same width.
        let at12 =
            value_enclosure_at_target(&s, 12, &facts, &rat(1, 1_000_000_000_000_000)).unwrap();
        assert!(at12.contains(&BigRat::one()));
        assert!(at12.width() <= rat(1, 1_000_000_000_000_000));
    }

    #[test]
    fn value_enclosure_monotone_refinement() {
        let s = telescoping();
        let facts = ratio_facts(rat(1, 2));
        let mut prev: Option<RatBall> = None;
        for depth in 2..=12 {
            let ball = value_enclosure_at(&s, depth, &facts).unwrap();
            if let Some(p) = &prev {
                assert!(p.encloses(&ball), "{p} should enclose {ball}");
            }
            prev = Some(ball);
        }
    }

    #[test]
    fn value_enclosure_liouville_depth_four() {
        let s = SeriesInstance::new(system("2^(n!)", "1"), SeriesForm::Plain).unwrap();
        let facts = ratio_facts(rat(1, 2));
        let ball = value_enclosure_at(&s, 4, &facts).unwrap();
        // Partial sum through depth 4 is 2^-1 + 2^-2 + 2^-6 + 2^-24 = 0.7656...;
        // a much deeper partial sum stands in for the true value.
        let head = rat(1, 2) + rat(1, 4) + rat(1, 64) + BigRat::new(1.into(), (1u64 << 24).into());
        assert_eq!(partial_sum(&s, 4).unwrap(), head);
        let better = partial_sum(&s, 7).unwrap();
        assert!(ball.contains(&better), "{ball}");
        let width_cap = BigRat::new(1.into(), BigInt::from(1u8) << 119);
        assert!(ball.width() <= width_cap, "width {}", rat_str(&ball.width()));
    }

    #[test]
    fn value_enclosure_brackets_brute_force_table_sum() {
        // Oracle equivalence on a 12-term table series.
        let mut sys = SeqSystem::new(Arc::new(PrimeCache::new()));
        let a: Vec<BigInt> = (1..=12i64).map(|i| BigInt::from(i * i + 1)).collect();
        let b: Vec<BigInt> = (1..=12i64).map(|i| BigInt::from(i % 5 + 1)).collect();
        sys.insert(SequenceDef::table_of_ints("a", a.clone())).unwrap();
        sys.insert(SequenceDef::table_of_ints("b", b.clone())).unwrap();
        let s = SeriesInstance::new(sys, SeriesForm::Plain).unwrap();
        let mut brute = BigRat::zero();
        for i in 0..12usize {
            brute += BigRat::new(b[i].clone(), a[i].clone());
        }
        assert_eq!(partial_sum(&s, 12).unwrap(), brute);
    }

    #[test]
    fn refutation_e_minus_2_small_q() {
        // e-2 as the Cantor series with a(n) = n+1, b(n) = 1.
        let s = SeriesInstance::new(system("n+1", "1"), SeriesForm::Cantor).unwrap();
        let facts = ratio_facts(rat(1, 2));
        for q in [1i64, 2, 7] {
            let v =
                denominator_refutation(&s, &BigInt::from(q), 60, &Precision::default(), &facts)
                    .unwrap();
            let n = v
                .refutation_index()
                .unwrap_or_else(|| panic!("q={q}: {:?}", v.status));
            assert!(n <= 60);
        }
    }

    #[test]
    fn refutation_inconclusive_for_true_rational() {
        // The telescoping series sums to exactly 1 = 1/1; q = 1 must never
        // be refuted: E(n) >= 1 is a theorem there.
        let s = telescoping();
        let facts = ratio_facts(rat(1, 2));
        let v = denominator_refutation(&s, &BigInt::one(), 40, &Precision::default(), &facts)
            .unwrap();
        assert!(matches!(v.status, Status::Inconclusive(_)), "{:?}", v.status);
    }

    #[test]
    fn refutation_huge_q_is_inconclusive_on_short_scan() {
        let s = SeriesInstance::new(system("n+1", "1"), SeriesForm::Cantor).unwrap();
        let facts = ratio_facts(rat(1, 2));
        let q = BigInt::from(10_000_000u64);
        let v = denominator_refutation(&s, &q, 8, &Precision::default(), &facts).unwrap();
        assert!(matches!(v.status, Status::Inconclusive(_)));
    }

    #[test]
    fn refutation_soundness_recheck() {
        // Whenever RefutedAt(n), recomputing E(n) with a deeper tail still
        // certifies hi < 1.
        let s = SeriesInstance::new(system("n+1", "1"), SeriesForm::Cantor).unwrap();
        let facts = ratio_facts(rat(1, 2));
        let v = denominator_refutation(&s, &BigInt::from(5), 60, &Precision::default(), &facts)
            .unwrap();
        let n = v.refutation_index().expect("refuted");
        let (tail, _, _) = tail_enclosure(&s, n, &facts, 48).unwrap();
        let d = partial_product(&s, n).unwrap();
        let e = tail.scale(&BigRat::from_integer(d * BigInt::from(5)));
        assert!(*e.hi() < BigRat::one());
        assert!(*e.lo() > BigRat::zero());
    }
}
