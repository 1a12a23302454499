//! The rapidly-convergent-series criterion built on two-stage infinite
//! products: certified tail-product enclosures, the three hypothesis checks,
//! the contradiction quantity used by the irrationality proof, and the
//! specialization with product factors `d(n) = 1 + (2/3)^n`.

use crate::exact::{
    ball_exp, ball_ln, ball_powr, ball_root, cmp_certified, rat, rat_pow, rat_str, BallCmp,
    BigInt, BigRat, Precision, RatBall,
};
use crate::seq::{check_fact_on_window, DeclaredFact, EvalError, SeqSystem, Window};
use crate::series::{self, SeriesError, SeriesForm, SeriesInstance};
use crate::verdict::{AssumedFact, Status, Verdict};
use num_traits::{One, Signed, Zero};

/// A sequence of exact rational product factors, expected greater than one,
/// whose log-tail decay is declared as a fact.
pub struct ProductSeq {
    sys: SeqSystem,
    name: String,
    facts: Vec<DeclaredFact>,
}

impl ProductSeq {
    pub fn new(sys: SeqSystem, name: &str, facts: Vec<DeclaredFact>) -> Result<Self, SeriesError> {
        if sys.def(name).is_none() {
            return Err(SeriesError::Domain(format!("missing sequence {name:?}")));
        }
        Ok(ProductSeq { sys, name: name.to_string(), facts })
    }

    pub fn factor(&self, j: i64) -> Result<BigRat, SeriesError> {
        let v = self.sys.eval_rat(&self.name, j)?;
        if v.is_negative() {
            return Err(SeriesError::Domain(format!(
                "product factor d({j}) = {} is negative",
                rat_str(&v)
            )));
        }
        Ok(v)
    }

    pub fn facts(&self) -> &[DeclaredFact] {
        &self.facts
    }

    fn log_tail_fact(&self) -> Option<&DeclaredFact> {
        // The fact only has to cover the unevaluated tail beyond M >= from;
        // factors before it are multiplied exactly.
        self.facts
            .iter()
            .find(|f| matches!(f, DeclaredFact::LogTailDominated { .. }))
    }
}

/// Enclosure of `∏_{j >= from} d(j)` with the two-stage bookkeeping: zero
/// factors are recorded and excluded (the product then converges to zero by
/// convention), and the unevaluated tail is bounded through the declared
/// log-tail fact as `exp([0, C r^(M+1)/(1-r)])`.
#[derive(Debug, Clone)]
pub struct TailProduct {
    pub from: i64,
    pub ball: RatBall,
    pub zero_indices: Vec<i64>,
    pub converges_to_zero: bool,
    pub assumed: Vec<AssumedFact>,
}

pub fn tail_product(
    p: &ProductSeq,
    from: i64,
    prec: &Precision,
) -> Result<TailProduct, SeriesError> {
    let fact = p.log_tail_fact().ok_or_else(|| {
        SeriesError::Inconclusive(
            "no log_tail_dominated fact declared; tail product unavailable".into(),
        )
    })?;
    let (coeff, ratio, fact_from) = match fact {
        DeclaredFact::LogTailDominated { coeff, ratio, from } => (coeff.clone(), ratio.clone(), *from),
        _ => unreachable!(),
    };
    let mut m = (from.max(fact_from)) + 8;
    let mut best: Option<TailProduct> = None;
    loop {
        match tail_product_at(p, from, fact, &coeff, &ratio, fact_from, m, prec) {
            Ok(tp) => {
                let done = tp.ball.width() <= *prec.target_width() || (m - from) >= 4096;
                let keep = match &best {
                    None => true,
                    Some(b) => tp.ball.width() < b.ball.width(),
                };
                if keep {
                    best = Some(tp);
                }
                if done {
                    break;
                }
                m += (m - from).max(8);
            }
            // Table sequences end; keep the best evaluable enclosure.
            Err(SeriesError::Eval(EvalError::TableOutOfRange { .. }))
            | Err(SeriesError::Eval(EvalError::ResourceCap(_)))
                if best.is_some() =>
            {
                break
            }
            Err(e) => return Err(e),
        }
    }
    Ok(best.expect("at least one enclosure"))
}

#[allow(clippy::too_many_arguments)]
fn tail_product_at(
    p: &ProductSeq,
    from: i64,
    fact: &DeclaredFact,
    coeff: &BigRat,
    ratio: &BigRat,
    fact_from: i64,
    m: i64,
    prec: &Precision,
) -> Result<TailProduct, SeriesError> {
    // Audit the declared decay on the evaluated range.
    let audit = Window::new(fact_from, m).expect("audit window");
    let verdict = check_fact_on_window(&p.sys, &p.name, fact, audit)?;
    if let Some(idx) = verdict.refutation_index() {
        return Err(SeriesError::Inconclusive(format!(
            "declared fact [{}] fails at index {idx}",
            fact.describe()
        )));
    }
    if matches!(verdict.status, Status::Inconclusive(_)) {
        return Err(SeriesError::Inconclusive(format!(
            "fact audit undecided: {}",
            crate::erdos_straus::describe_status(&verdict)
        )));
    }
    let mut zero_indices = Vec::new();
    let mut head = BigRat::one();
    for j in from..=m {
        let d = p.factor(j)?;
        if d.is_zero() {
            zero_indices.push(j);
        } else {
            head *= d;
        }
    }
    // ln of the unevaluated tail lies in [0, C r^(M+1) / (1 - r)].
    let eps = coeff * rat_pow(ratio, (m + 1).max(0) as u64) / (BigRat::one() - ratio);
    let band = ball_exp(
        &RatBall::new(BigRat::zero(), eps).expect("nonnegative band"),
        prec,
    )?;
    let ball = band.scale(&head);
    Ok(TailProduct {
        from,
        ball,
        converges_to_zero: !zero_indices.is_empty(),
        zero_indices,
        assumed: vec![fact.assumed_beyond(audit)],
    })
}

/// Hypothesis bundle: the claimed root limit `A > 1`, the index `s > 0` from
/// which the product inequality is required, the analysis window, and the
/// working precision.
pub struct HanclHypotheses {
    pub a_limit: BigRat,
    pub s: i64,
    pub window: Window,
    pub prec: Precision,
}

impl HanclHypotheses {
    pub fn new(a_limit: BigRat, s: i64, window: Window, prec: Precision) -> Result<Self, SeriesError> {
        if a_limit <= BigRat::one() {
            return Err(SeriesError::Domain("the root limit A must exceed 1".into()));
        }
        if s < 1 {
            return Err(SeriesError::Domain("the start index s must be positive".into()));
        }
        Ok(HanclHypotheses { a_limit, s, window, prec })
    }
}

#[derive(Debug, Clone)]
pub struct MarginCheck {
    pub n: i64,
    /// Enclosure of `A / a(n)^(1/2^n)`.
    pub lhs: RatBall,
    /// Enclosure of `∏_{j>=n} d(j)`.
    pub rhs: RatBall,
    pub status: Status,
}

/// Report for the main irrationality criterion's three hypotheses.
#[derive(Debug, Clone)]
pub struct HanclThm3Report {
    /// `a(n)^(1/2^n)` per window index.
    pub roots: Vec<(i64, RatBall)>,
    /// `A - a(n)^(1/2^n)` per window index (diagnostic for the limit).
    pub gap_to_limit: Vec<(i64, RatBall)>,
    /// Running maximum of the root enclosures.
    pub running_max_root: Vec<(i64, RatBall)>,
    /// Certified `A / root(n) > ∏_{j>=n} d(j)` for `n >= s`.
    pub product_margin: Vec<MarginCheck>,
    /// `2^n ln d(n) - ln b(n)` per index, the growth quantity in log space.
    pub growth_log: Vec<(i64, RatBall)>,
    /// Cleared when the growth quantity fails to increase over the window.
    pub growth_increasing: bool,
    pub verdict: Verdict,
}

fn root_ball(s: &SeriesInstance, n: i64, prec: &Precision) -> Result<RatBall, SeriesError> {
    if !(0..=62).contains(&n) {
        return Err(SeriesError::Eval(EvalError::ResourceCap(format!(
            "root index 2^{n} out of range"
        ))));
    }
    Ok(ball_root(&s.a_int(n)?, 1u64 << n, prec)?)
}

pub fn check_hancl_thm3(
    s: &SeriesInstance,
    p: &ProductSeq,
    h: &HanclHypotheses,
) -> Result<HanclThm3Report, SeriesError> {
    if s.form() != SeriesForm::Plain {
        return Err(SeriesError::Domain("this criterion takes the plain form".into()));
    }
    let w = h.window;
    let mut roots = Vec::new();
    let mut gap_to_limit = Vec::new();
    let mut running_max_root: Vec<(i64, RatBall)> = Vec::new();
    for n in w.iter() {
        if !s.b_int(n)?.is_positive() {
            return Err(SeriesError::Domain(format!("b({n}) must be positive")));
        }
        let root = root_ball(s, n, &h.prec)?;
        gap_to_limit.push((n, RatBall::point(h.a_limit.clone()).sub(&root)));
        let running = match running_max_root.last() {
            None => root.clone(),
            Some((_, prev)) => RatBall::new(
                prev.lo().clone().max(root.lo().clone()),
                prev.hi().clone().max(root.hi().clone()),
            )
            .expect("max of ordered pairs"),
        };
        running_max_root.push((n, running));
        roots.push((n, root));
    }

    let mut product_margin = Vec::new();
    let mut first_refuted: Option<i64> = None;
    let mut any_overlap = false;
    let mut assumed: Vec<AssumedFact> = Vec::new();
    for (n, root) in roots.iter().filter(|(n, _)| *n >= h.s) {
        let lhs = RatBall::point(h.a_limit.clone()).div(root)?;
        let tp = tail_product(p, *n, &h.prec)?;
        assumed.extend(tp.assumed.clone());
        let status = match cmp_certified(&lhs, &tp.ball) {
            BallCmp::Greater => Status::CertifiedTrue,
            BallCmp::Less => Status::RefutedAt(*n),
            BallCmp::Overlap => Status::Inconclusive("enclosures overlap".into()),
        };
        match &status {
            Status::RefutedAt(_) if first_refuted.is_none() => first_refuted = Some(*n),
            Status::Inconclusive(_) => any_overlap = true,
            _ => {}
        }
        product_margin.push(MarginCheck { n: *n, lhs, rhs: tp.ball, status });
    }

    let mut growth_log = Vec::new();
    for n in w.iter() {
        let d = p.factor(n)?;
        if d <= BigRat::zero() {
            return Err(SeriesError::Domain(format!("d({n}) must be positive")));
        }
        let ln_d = ball_ln(&RatBall::point(d), &h.prec)?;
        let ln_b = ball_ln(&RatBall::point(BigRat::from_integer(s.b_int(n)?)), &h.prec)?;
        if n < 0 || n > 62 {
            return Err(SeriesError::Eval(EvalError::ResourceCap("2^n overflow".into())));
        }
        let val = ln_d.scale(&BigRat::from_integer(BigInt::one() << n as u64)).sub(&ln_b);
        growth_log.push((n, val));
    }
    let growth_increasing = growth_log
        .windows(2)
        .all(|w| w[1].1.hi() >= w[0].1.hi() || w[1].1.lo() >= w[0].1.lo());

    assumed.push(AssumedFact {
        fact: format!("lim a(n)^(1/2^n) = {}", rat_str(&h.a_limit)),
        checked: Some((w.from, w.to)),
    });
    assumed.push(AssumedFact {
        fact: "lim d(n)^(2^n) / b(n) = infinity".into(),
        checked: Some((w.from, w.to)),
    });
    assumed.push(AssumedFact {
        fact: "the product of the d(n) converges (two-stage sense)".into(),
        checked: None,
    });
    let verdict = match first_refuted {
        Some(n) => Verdict::refuted_at(n),
        None if any_overlap => {
            Verdict::inconclusive("some product-margin enclosures overlapped")
        }
        None if product_margin.is_empty() => {
            Verdict::inconclusive("window contains no index at or past s")
        }
        None => Verdict::certified(),
    }
    .with_assumed(series::dedup_assumed(assumed));
    Ok(HanclThm3Report {
        roots,
        gap_to_limit,
        running_max_root,
        product_margin,
        growth_log,
        growth_increasing,
        verdict,
    })
}

/// Per-index outcome of the specialized criterion's two inequalities plus
/// the reduction inequality that feeds the main criterion.
#[derive(Debug, Clone)]
pub struct Cor2Check {
    pub n: i64,
    pub root: RatBall,
    /// `a(n)^(1/2^n) (1 + 4 (2/3)^n) <= A`.
    pub a_bound: Status,
    /// `b(n) <= 2^((4/3)^(n-1))`.
    pub b_bound: Status,
    /// `1 + 4 (2/3)^n > ∏_{j>=n} (1 + (2/3)^j)`.
    pub reduction: Status,
}

#[derive(Debug, Clone)]
pub struct HanclCor2Report {
    pub threshold: i64,
    pub checks: Vec<Cor2Check>,
    pub verdict: Verdict,
}

/// The canonical product factors `d(n) = 1 + (2/3)^n` with their log-tail
/// fact `ln d(n) <= (2/3)^n`.
pub fn standard_product_seq(primes: std::sync::Arc<crate::primes::PrimeCache>) -> ProductSeq {
    let mut sys = SeqSystem::new(primes);
    let def = crate::seq::parse_sequence("1 + (2/3)^n")
        .expect("grammar literal")
        .named("d")
        .rational();
    sys.insert(def).expect("valid definition");
    ProductSeq::new(
        sys,
        "d",
        vec![DeclaredFact::LogTailDominated { coeff: BigRat::one(), ratio: rat(2, 3), from: 1 }],
    )
    .expect("sequence registered")
}

pub fn check_hancl_cor2(
    s: &SeriesInstance,
    a_limit: &BigRat,
    w: Window,
    prec: &Precision,
    threshold: i64,
) -> Result<HanclCor2Report, SeriesError> {
    if s.form() != SeriesForm::Plain {
        return Err(SeriesError::Domain("this criterion takes the plain form".into()));
    }
    if *a_limit <= BigRat::one() {
        return Err(SeriesError::Domain("the root limit A must exceed 1".into()));
    }
    let d = standard_product_seq(s.sys().primes().clone());
    let mut checks = Vec::new();
    let mut first_refuted: Option<i64> = None;
    let mut any_overlap = false;
    for n in w.iter().filter(|&n| n >= threshold) {
        let b_n = s.b_int(n)?;
        if !b_n.is_positive() {
            return Err(SeriesError::Domain(format!("b({n}) must be positive")));
        }
        let root = root_ball(s, n, prec)?;
        let factor = BigRat::one() + rat_pow(&rat(2, 3), n as u64) * rat(4, 1);
        let lhs = root.scale(&factor);
        let a_bound = if *lhs.hi() <= *a_limit {
            Status::CertifiedTrue
        } else if *lhs.lo() > *a_limit {
            Status::RefutedAt(n)
        } else {
            Status::Inconclusive("enclosure straddles A".into())
        };
        // Right side 2^((4/3)^(n-1)) via the real-power enclosure.
        let exp = rat_pow(&rat(4, 3), (n - 1).max(0) as u64);
        let rhs = ball_powr(&RatBall::from_int(2), &RatBall::point(exp), prec)?;
        let b_rat = BigRat::from_integer(b_n);
        let b_bound = if b_rat <= *rhs.lo() {
            Status::CertifiedTrue
        } else if b_rat > *rhs.hi() {
            Status::RefutedAt(n)
        } else {
            Status::Inconclusive("enclosure straddles b(n)".into())
        };
        let tp = tail_product(&d, n, prec)?;
        let reduction = match cmp_certified(&RatBall::point(factor), &tp.ball) {
            BallCmp::Greater => Status::CertifiedTrue,
            BallCmp::Less => Status::RefutedAt(n),
            BallCmp::Overlap => Status::Inconclusive("enclosures overlap".into()),
        };
        for st in [&a_bound, &b_bound, &reduction] {
            match st {
                Status::RefutedAt(_) if first_refuted.is_none() => first_refuted = Some(n),
                Status::Inconclusive(_) => any_overlap = true,
                _ => {}
            }
        }
        checks.push(Cor2Check { n, root, a_bound, b_bound, reduction });
    }
    let verdict = match first_refuted {
        Some(n) => Verdict::refuted_at(n),
        None if checks.is_empty() => Verdict::inconclusive(format!(
            "window has no index at or past the threshold {threshold}"
        )),
        None if any_overlap => Verdict::inconclusive("some enclosures overlapped"),
        None => Verdict::certified(),
    }
    .with_assumed(vec![AssumedFact {
        fact: format!("lim a(n)^(1/2^n) = {}", rat_str(a_limit)),
        checked: Some((w.from, w.to)),
    }]);
    Ok(HanclCor2Report { threshold, checks, verdict })
}

/// The contradiction quantity: `q * ∏_{j=1..n} a(j) * Σ_{j>=n+2} b(j)/a(j)`,
/// the tail taken after the first `n+1` terms, matching the shifted-index
/// convention of the criterion's proof.
pub fn alpha_quantity(
    s: &SeriesInstance,
    q: &BigInt,
    n: i64,
    prec: &Precision,
    facts: &[DeclaredFact],
) -> Result<RatBall, SeriesError> {
    if s.form() != SeriesForm::Plain {
        return Err(SeriesError::Domain("the contradiction quantity takes the plain form".into()));
    }
    if !q.is_positive() {
        return Err(SeriesError::Domain("q must be positive".into()));
    }
    let d = series::partial_product(s, n)?;
    let scale = BigRat::from_integer(q * d);
    let mut extra = 2u32;
    loop {
        let (tail, _, _) = series::tail_enclosure(s, n + 1, facts, extra)?;
        let ball = tail.scale(&scale);
        if ball.width() <= *prec.target_width() || extra >= 64 {
            return Ok(ball);
        }
        extra *= 2;
    }
}

/// Sweep result: for each scanned index, the largest denominator certified
/// refuted there. The sweep covers every `q <= q_max` iff some index's
/// threshold reaches `q_max`.
#[derive(Debug, Clone)]
pub struct RefutationSweep {
    pub q_max: BigInt,
    pub n_max: i64,
    /// `(n, t)`: every `q <= t` has `E(n)` certified below 1.
    pub thresholds: Vec<(i64, BigInt)>,
    pub assumed: Vec<AssumedFact>,
}

impl RefutationSweep {
    /// Least index refuting denominator `q`, if the sweep found one.
    pub fn least_refuting_index(&self, q: &BigInt) -> Option<i64> {
        self.thresholds.iter().find(|(_, t)| t >= q).map(|(n, _)| *n)
    }

    pub fn fully_covered(&self) -> bool {
        self.q_max.is_zero() || self.least_refuting_index(&self.q_max).is_some()
    }

    /// Largest least-index over all `q <= q_max` (the sweep horizon).
    pub fn max_index_needed(&self) -> Option<i64> {
        self.least_refuting_index(&self.q_max)
    }
}

/// For each `q <= q_max`, finds the least n with a certified `E(n) < 1`.
/// `E(n)` is linear in `q`, so one enclosure per index decides a whole band
/// of denominators at once.
pub fn refute_rational_candidates(
    s: &SeriesInstance,
    q_max: &BigInt,
    n_max: i64,
    prec: &Precision,
    facts: &[DeclaredFact],
) -> Result<RefutationSweep, SeriesError> {
    if q_max.is_negative() {
        return Err(SeriesError::Domain("q_max must be nonnegative".into()));
    }
    let mut thresholds = Vec::new();
    let mut assumed = Vec::new();
    if q_max.is_zero() {
        return Ok(RefutationSweep {
            q_max: q_max.clone(),
            n_max,
            thresholds,
            assumed,
        });
    }
    let mut covered = BigInt::zero();
    for n in s.first_index()..=n_max {
        if !s.b_int(n)?.is_positive() {
            return Err(SeriesError::Domain(format!(
                "b({n}) is not positive; refutation requires positive terms"
            )));
        }
        let d = series::partial_product(s, n)?;
        let scale = BigRat::from_integer(d);
        let mut extra = 2u32;
        let e1 = loop {
            let (tail, _, assume) = series::tail_enclosure(s, n, facts, extra)?;
            let ball = tail.scale(&scale);
            if ball.width() <= *prec.target_width()
                || extra >= 64
                || (ball.hi().is_positive() && {
                    // Enough precision once the band q <= 1/hi stabilizes.
                    let t = ball.hi().recip().floor();
                    t.to_integer() > &covered + BigInt::one()
                })
            {
                assumed.extend(assume);
                break ball;
            }
            extra *= 2;
        };
        if !e1.lo().is_positive() {
            continue;
        }
        // q * hi < 1 iff q <= ceil(1/hi) - 1.
        let t = (e1.hi().recip() - BigRat::new(1.into(), 1_000_000_000i64.into()))
            .floor()
            .to_integer();
        let t = t.min(q_max.clone());
        if t > covered {
            covered = t.clone();
            thresholds.push((n, t));
            if covered >= *q_max {
                break;
            }
        }
    }
    Ok(RefutationSweep {
        q_max: q_max.clone(),
        n_max,
        thresholds,
        assumed: series::dedup_assumed(assumed),
    })
}
