//! The rationality-witness machinery for Cantor-type series: candidate
//! construction by the rounding recursion, independent verification of the
//! witness criterion, finite search over the existential, the residual
//! sequence behind the criterion's proof, and window diagnostics for the
//! companion hypotheses (including the prime-numerator specialization).
//!
//! The criterion: `Σ b(n)/∏a(i)` is rational iff some integer `B > 0` and
//! integer sequence `c(n)` satisfy, for all large n,
//! `B b(n) = c(n) a(n) - c(n+1)` with `|c(n+1)| < a(n)/2`.

use crate::exact::{BigInt, BigRat, Precision, RatBall};
use crate::primes::PrimeCache;
use crate::seq::{DeclaredFact, SeqKind, SeqSystem, SequenceDef, Window};
use crate::series::{self, SeriesError, SeriesForm, SeriesInstance};
use crate::verdict::{AssumedFact, Status, Verdict};
use num_traits::{One, Signed, Zero};
use std::sync::Arc;

/// Candidate witness: multiplier `B`, start index, and the window
/// `c(N) ... c(N+len)` of constructed integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EsWitness {
    pub multiplier: BigInt,
    pub start: i64,
    pub c: Vec<BigInt>,
}

impl EsWitness {
    /// Number of criterion indices the window can verify.
    pub fn window_len(&self) -> usize {
        self.c.len().saturating_sub(1)
    }
}

/// Builds the candidate from raw window values: `c(N)` is the nearest
/// integer to `B b(N)/a(N)` (ties away from zero), then
/// `c(n+1) = c(n) a(n) - B b(n)`.
pub fn witness_from_window(
    a: &[BigInt],
    b: &[BigInt],
    start: i64,
    multiplier: BigInt,
) -> EsWitness {
    assert_eq!(a.len(), b.len());
    assert!(!a.is_empty());
    let mut c = Vec::with_capacity(a.len() + 1);
    let first = BigRat::new(&multiplier * &b[0], a[0].clone()).round().to_integer();
    c.push(first);
    for i in 0..a.len() {
        let next = c[i].clone() * &a[i] - &multiplier * &b[i];
        c.push(next);
    }
    EsWitness { multiplier, start, c }
}

/// First criterion index violated by the witness over the raw windows, or
/// `None` when every index passes. The inequality is checked in integers as
/// `2 |c(n+1)| < a(n)`.
pub fn verify_from_window(a: &[BigInt], b: &[BigInt], w: &EsWitness) -> Option<i64> {
    let len = w.window_len().min(a.len());
    for i in 0..len {
        let n = w.start + i as i64;
        let lhs = &w.multiplier * &b[i];
        let rhs = &w.c[i] * &a[i] - &w.c[i + 1];
        if lhs != rhs {
            return Some(n);
        }
        if w.c[i + 1].abs() * BigInt::from(2) >= a[i] {
            return Some(n);
        }
    }
    None
}

fn windows(
    s: &SeriesInstance,
    start: i64,
    len: usize,
) -> Result<(Vec<BigInt>, Vec<BigInt>), SeriesError> {
    let mut a = Vec::with_capacity(len);
    let mut b = Vec::with_capacity(len);
    for n in start..start + len as i64 {
        a.push(s.a_int(n)?);
        b.push(s.b_int(n)?);
    }
    Ok((a, b))
}

/// Constructs the candidate witness window by the rounding recursion;
/// the linear identity holds exactly by construction.
pub fn construct_c(
    s: &SeriesInstance,
    multiplier: &BigInt,
    start: i64,
    len: usize,
) -> Result<EsWitness, SeriesError> {
    if !multiplier.is_positive() {
        return Err(SeriesError::Domain("witness multiplier B must be positive".into()));
    }
    if len == 0 {
        return Err(SeriesError::Domain("witness window must be nonempty".into()));
    }
    let (a, b) = windows(s, start, len)?;
    let w = witness_from_window(&a, &b, start, multiplier.clone());
    debug_assert!(
        (0..len).all(|i| &w.multiplier * &b[i] == &w.c[i] * &a[i] - &w.c[i + 1]),
        "construction identity must hold exactly"
    );
    Ok(w)
}

/// Re-checks the criterion from the witness's raw integers alone.
pub fn verify_witness(s: &SeriesInstance, w: &EsWitness) -> Result<Verdict, SeriesError> {
    let len = w.window_len();
    if len == 0 {
        return Ok(Verdict::inconclusive("witness window too short to verify"));
    }
    let (a, b) = windows(s, w.start, len)?;
    Ok(match verify_from_window(&a, &b, w) {
        Some(n) => Verdict::refuted_at(n),
        None => Verdict::certified().with_assumed(vec![AssumedFact {
            fact: "B b(n) = c(n) a(n) - c(n+1) and 2|c(n+1)| < a(n) beyond the window".into(),
            checked: Some((w.start, w.start + len as i64 - 1)),
        }]),
    })
}

/// Searches `(B, N)` in lexicographic order for a witness verifying on the
/// whole window. Absence of a witness within bounds is `Inconclusive`, never
/// a proof of irrationality.
pub fn search_witness(
    s: &SeriesInstance,
    b_max: u64,
    n_max: i64,
    len: usize,
) -> Result<(Option<EsWitness>, Verdict), SeriesError> {
    if b_max == 0 || n_max < s.first_index() || len == 0 {
        return Err(SeriesError::Domain("search bounds must be positive".into()));
    }
    for b_mult in 1..=b_max {
        for start in s.first_index()..=n_max {
            let w = construct_c(s, &BigInt::from(b_mult), start, len)?;
            let verdict = verify_witness(s, &w)?;
            if verdict.is_certified() {
                return Ok((Some(w), verdict));
            }
        }
    }
    Ok((
        None,
        Verdict::inconclusive(format!(
            "no witness with B <= {b_max}, N <= {n_max}, window length {len}; \
             the criterion's existential is unbounded"
        )),
    ))
}

/// The residual sequence of the criterion's proof:
/// `R(n) = B * ∏_{i<n} a(i) * Σ_{k>n} term(k)`, satisfying
/// `R(n+1) = a(n) R(n) - B b(n+1)/a(n+1)` and `c(n) - B b(n)/a(n) = R(n)`.
#[derive(Debug, Clone)]
pub struct RSequence {
    pub multiplier: BigInt,
    pub start: i64,
    /// Independent enclosures of `R(N) ... R(N+len)`.
    pub values: Vec<RatBall>,
    /// Recursion residuals `R(n+1) - (a(n) R(n) - B b(n+1)/a(n+1))`; each
    /// must contain zero.
    pub residuals: Vec<RatBall>,
    /// Whether `c(n) - B b(n)/a(n)` lies in the matching enclosure.
    pub consistency_ok: Vec<bool>,
    /// Indices with `|R(n)| < 1/4` certified.
    pub small_indices: Vec<i64>,
    pub witness: EsWitness,
    pub assumed: Vec<AssumedFact>,
}

pub fn r_sequence(
    s: &SeriesInstance,
    multiplier: &BigInt,
    start: i64,
    len: usize,
    prec: &Precision,
    facts: &[DeclaredFact],
) -> Result<RSequence, SeriesError> {
    if s.form() != SeriesForm::Cantor {
        return Err(SeriesError::Domain(
            "residual sequence is defined for the cantor form".into(),
        ));
    }
    let witness = construct_c(s, multiplier, start, len + 1)?;
    let mut values = Vec::with_capacity(len + 1);
    let mut assumed = Vec::new();
    for n in start..=start + len as i64 {
        // Scale factor B * ∏_{i<n} a(i).
        let scale = BigRat::from_integer(multiplier.clone())
            * s.sys().prefix_product(s.a_name(), n - 1).map_err(SeriesError::Eval)?;
        let mut extra = 2u32;
        let ball = loop {
            let (tail, _, assume) = series::tail_enclosure(s, n, facts, extra)?;
            let ball = tail.scale(&scale);
            if ball.width() <= *prec.target_width() || extra >= 64 {
                assumed.extend(assume);
                break ball;
            }
            extra *= 2;
        };
        values.push(ball);
    }
    let mut residuals = Vec::with_capacity(len);
    for i in 0..len {
        let n = start + i as i64;
        let a_n = BigRat::from_integer(s.a_int(n)?);
        let correction = BigRat::from_integer(multiplier * s.b_int(n + 1)?)
            / BigRat::from_integer(s.a_int(n + 1)?);
        let propagated = values[i].scale(&a_n).add_rat(&-correction);
        residuals.push(values[i + 1].sub(&propagated));
    }
    let quarter = crate::exact::rat(1, 4);
    let mut small_indices = Vec::new();
    let mut consistency_ok = Vec::with_capacity(len + 1);
    for (i, ball) in values.iter().enumerate() {
        let n = start + i as i64;
        if *ball.hi() < quarter && *ball.lo() > -quarter.clone() {
            small_indices.push(n);
        }
        let point = BigRat::from_integer(witness.c[i].clone())
            - BigRat::from_integer(multiplier * s.b_int(n)?)
                / BigRat::from_integer(s.a_int(n)?);
        consistency_ok.push(ball.contains(&point));
    }
    Ok(RSequence {
        multiplier: multiplier.clone(),
        start,
        values,
        residuals,
        consistency_ok,
        small_indices,
        witness,
        assumed: series::dedup_assumed(assumed),
    })
}

/// Per-index diagnostic value with its exact rational.
pub type IndexedValue = (i64, BigRat);

/// Window diagnostics for the two hypotheses of the witness criterion.
#[derive(Debug, Clone)]
pub struct Thm21Report {
    /// `a(n) > 0` on the window (enforced structurally, reported anyway).
    pub positivity: Verdict,
    /// `a(n) > 1` on the window.
    pub eventually_gt1: Verdict,
    /// `|b(n)| / (a(n-1) a(n))` for each window index past the first.
    pub decay: Vec<IndexedValue>,
    /// Set when no decrease is observed across the window.
    pub no_decay_flag: bool,
    pub assumed: Vec<AssumedFact>,
}

pub fn check_thm21_hypotheses(s: &SeriesInstance, w: Window) -> Result<Thm21Report, SeriesError> {
    let mut positivity = Verdict::certified();
    let mut gt1 = Verdict::certified();
    for n in w.iter() {
        let a = s.a_int(n)?;
        if !a.is_positive() && positivity.is_certified() {
            positivity = Verdict::refuted_at(n);
        }
        if a <= BigInt::one() && gt1.is_certified() {
            gt1 = Verdict::refuted_at(n);
        }
    }
    let mut decay = Vec::new();
    for n in (w.from + 1)..=w.to {
        let v = BigRat::from_integer(s.b_int(n)?.abs())
            / BigRat::from_integer(s.a_int(n - 1)? * s.a_int(n)?);
        decay.push((n, v));
    }
    let no_decay_flag = match (decay.first(), decay.last()) {
        (Some((_, first)), Some((_, last))) => last >= first,
        _ => true,
    };
    let assumed = vec![AssumedFact {
        fact: "lim |b(n)|/(a(n-1) a(n)) = 0".into(),
        checked: Some((w.from, w.to)),
    }];
    Ok(Thm21Report { positivity, eventually_gt1: gt1, decay, no_decay_flag, assumed })
}

/// Window diagnostics for the irrationality corollary's four extra
/// hypotheses. Limits cannot be certified from a window, so the overall
/// verdict is inconclusive by design and every limit is listed as assumed.
#[derive(Debug, Clone)]
pub struct Cor210Report {
    pub b_positive: Verdict,
    pub a_monotone: Verdict,
    /// `(b(n+1) - b(n)) / a(n)` per index.
    pub b_increment_over_a: Vec<IndexedValue>,
    /// Running minimum of `a(n)/b(n)` per index.
    pub running_min_a_over_b: Vec<IndexedValue>,
    pub verdict: Verdict,
}

pub fn check_cor210(s: &SeriesInstance, w: Window) -> Result<Cor210Report, SeriesError> {
    let mut b_positive = Verdict::certified();
    let mut a_monotone = Verdict::certified();
    for n in w.iter() {
        if !s.b_int(n)?.is_positive() && b_positive.is_certified() {
            b_positive = Verdict::refuted_at(n);
        }
    }
    for n in w.from..w.to {
        if s.a_int(n + 1)? < s.a_int(n)? && a_monotone.is_certified() {
            a_monotone = Verdict::refuted_at(n);
        }
    }
    let mut b_increment_over_a = Vec::new();
    for n in w.from..w.to {
        let v = BigRat::from_integer(s.b_int(n + 1)? - s.b_int(n)?)
            / BigRat::from_integer(s.a_int(n)?);
        b_increment_over_a.push((n, v));
    }
    let mut running_min_a_over_b = Vec::new();
    let mut min: Option<BigRat> = None;
    for n in w.iter() {
        let b = s.b_int(n)?;
        if b.is_zero() {
            continue;
        }
        let v = BigRat::from_integer(s.a_int(n)?) / BigRat::from_integer(b);
        let m = match &min {
            None => v,
            Some(m) => v.min(m.clone()),
        };
        min = Some(m.clone());
        running_min_a_over_b.push((n, m));
    }
    let verdict = Verdict::inconclusive(
        "liminf a(n)/b(n) = 0 and lim (b(n+1)-b(n))/a(n) <= 0 are limit hypotheses; \
         only window diagnostics are computable",
    )
    .with_assumed(vec![
        AssumedFact { fact: "liminf a(n)/b(n) = 0".into(), checked: Some((w.from, w.to)) },
        AssumedFact {
            fact: "lim (b(n+1)-b(n))/a(n) <= 0".into(),
            checked: Some((w.from, w.to)),
        },
    ]);
    Ok(Cor210Report { b_positive, a_monotone, b_increment_over_a, running_min_a_over_b, verdict })
}

/// Window diagnostics for the prime-numerator series `Σ p(n)/∏a(i)`:
/// positivity and monotonicity of `a` (required), the two limit quantities,
/// and cross-references to the consecutive-ratio and double-gap prime checks.
#[derive(Debug, Clone)]
pub struct PrimeSeriesReport {
    pub a_positive: Verdict,
    pub a_monotone: Verdict,
    /// `p(n) / a(n)^2` per index.
    pub p_over_a_squared: Vec<IndexedValue>,
    /// Running minimum of `a(n)/p(n)` per index.
    pub running_min_a_over_p: Vec<IndexedValue>,
    /// Exact extrema of `p(n+1)/p(n)` on the window.
    pub ratio_max: Option<(u64, BigRat)>,
    pub ratio_min: Option<(u64, BigRat)>,
    /// Double-gap check at `N = w.to` with epsilon 1/10.
    pub double_sqrt: Verdict,
    pub assumed: Vec<AssumedFact>,
}

pub fn check_thm31_prime(
    a_def: SequenceDef,
    w: Window,
    primes: Arc<PrimeCache>,
) -> Result<PrimeSeriesReport, SeriesError> {
    if w.from < 1 {
        return Err(SeriesError::Domain("prime series windows start at 1".into()));
    }
    let mut sys = SeqSystem::new(primes.clone());
    sys.insert(a_def.named("a")).map_err(SeriesError::Eval)?;
    sys.insert(SequenceDef::new("b", SeqKind::Primes)).map_err(SeriesError::Eval)?;
    let s = SeriesInstance::new(sys, SeriesForm::Cantor)?;

    let mut a_positive = Verdict::certified();
    let mut a_monotone = Verdict::certified();
    for n in w.iter() {
        if !s.a_int(n)?.is_positive() && a_positive.is_certified() {
            a_positive = Verdict::refuted_at(n);
        }
    }
    for n in w.from..w.to {
        if s.a_int(n + 1)? < s.a_int(n)? && a_monotone.is_certified() {
            a_monotone = Verdict::refuted_at(n);
        }
    }
    if !a_positive.is_certified() || !a_monotone.is_certified() {
        return Err(SeriesError::Domain(
            "prime-series hypotheses need a positive and monotone on the window".into(),
        ));
    }
    let mut p_over_a_squared = Vec::new();
    let mut running_min_a_over_p = Vec::new();
    let mut min: Option<BigRat> = None;
    for n in w.iter() {
        let p = s.b_int(n)?;
        let a = s.a_int(n)?;
        p_over_a_squared.push((n, BigRat::new(p.clone(), &a * &a)));
        let v = BigRat::new(a, p);
        let m = match &min {
            None => v,
            Some(m) => v.min(m.clone()),
        };
        min = Some(m.clone());
        running_min_a_over_p.push((n, m));
    }
    let stats = primes
        .prime_ratio_window(w.from as u64, w.to as u64)
        .map_err(|e| SeriesError::Domain(e.to_string()))?;
    let double_sqrt = primes
        .double_sqrt_check(w.to as u64, &crate::exact::rat(1, 10), &Precision::decimal(20))
        .map_err(|e| SeriesError::Domain(e.to_string()))?;
    Ok(PrimeSeriesReport {
        a_positive,
        a_monotone,
        p_over_a_squared,
        running_min_a_over_p,
        ratio_max: stats.max,
        ratio_min: stats.min,
        double_sqrt,
        assumed: vec![
            AssumedFact { fact: "lim p(n)/a(n)^2 = 0".into(), checked: Some((w.from, w.to)) },
            AssumedFact { fact: "liminf a(n)/p(n) = 0".into(), checked: Some((w.from, w.to)) },
        ],
    })
}

/// Renders a witness window for reports.
pub fn witness_summary(w: &EsWitness) -> String {
    let head: Vec<String> = w.c.iter().take(6).map(|c| c.to_string()).collect();
    format!(
        "B={}, N={}, c=[{}{}]",
        w.multiplier,
        w.start,
        head.join(", "),
        if w.c.len() > 6 { ", ..." } else { "" }
    )
}

/// Renders a verdict for report payloads.
pub fn describe_status(v: &Verdict) -> String {
    match &v.status {
        Status::CertifiedTrue => "certified-true".into(),
        Status::RefutedAt(n) => format!("refuted-at({n})"),
        Status::Inconclusive(r) => format!("inconclusive: {r}"),
    }
}
