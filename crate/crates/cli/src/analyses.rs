//! One function per CLI analysis, each producing a [`Report`].

use crate::report::{
    approx_str, ball_json, indexed_balls, indexed_rats, rat_json, status_json, Report,
};
use crate::spec::{build_spec, LoadedSpec, SpecFile};
use irrcrit::erdos_straus::{self, EsWitness};
use irrcrit::exact::{parse_rat, rat, rat_str, BigInt, BigRat, Precision};
use irrcrit::hancl::{self, HanclHypotheses, ProductSeq};
use irrcrit::primes::{PrimeCache, PrimesError};
use irrcrit::roth::{self, HrHypotheses, KappaEstimate};
use irrcrit::seq::{EvalError, Window};
use irrcrit::series::{self, SeriesError, SeriesForm};
use irrcrit::verdict::Verdict;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

/// Analysis failures carry the exit code mandated by the CLI contract:
/// 1 for input errors, 2 for resource caps. Verdicts are data, never errors.
#[derive(Debug)]
pub struct CliError {
    pub exit_code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { exit_code: 1, message: message.into() }
    }

    pub fn resource(message: impl Into<String>) -> Self {
        CliError { exit_code: 2, message: message.into() }
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        match &e {
            SeriesError::Eval(EvalError::ResourceCap(_))
            | SeriesError::Eval(EvalError::Primes(PrimesError::CapExceeded { .. })) => {
                CliError::resource(e.to_string())
            }
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<PrimesError> for CliError {
    fn from(e: PrimesError) -> Self {
        match e {
            PrimesError::CapExceeded { .. } => CliError::resource(e.to_string()),
            _ => CliError::input(e.to_string()),
        }
    }
}

pub fn parse_rat_flag(s: &str, what: &str) -> Result<BigRat, CliError> {
    parse_rat(s).ok_or_else(|| CliError::input(format!("{what}: {s:?} is not a rational")))
}

fn spec_inputs(spec: &LoadedSpec, extra: Value) -> Value {
    json!({ "spec": spec.file, "flags": extra })
}

/// Inconclusive op results are verdict data; everything else is an error.
fn verdict_or<T>(
    r: Result<T, SeriesError>,
) -> Result<Result<T, Verdict>, CliError> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(SeriesError::Inconclusive(reason)) => Ok(Err(Verdict::inconclusive(reason))),
        Err(e) => Err(e.into()),
    }
}

fn require_form(spec: &LoadedSpec, form: SeriesForm, analysis: &str) -> Result<(), CliError> {
    if spec.form != form {
        return Err(CliError::input(format!(
            "{analysis} requires the {} form, but the spec declares {}",
            form.name(),
            spec.form.name()
        )));
    }
    Ok(())
}

pub fn eval(spec: LoadedSpec, depth: Option<i64>, prec: &Precision) -> Result<Report, CliError> {
    let mut report = Report::new(
        "eval",
        spec_inputs(&spec, json!({ "depth": depth })),
        prec,
    );
    let facts = spec.term_facts.clone();
    let outcome = match depth {
        Some(d) => verdict_or(
            series::value_enclosure_at_target(&spec.series, d, &facts, prec.target_width())
                .map(|ball| (ball, d)),
        )?,
        None => verdict_or(series::value_enclosure(&spec.series, prec, &facts))?,
    };
    match outcome {
        Ok((ball, used_depth)) => {
            report.values = json!({
                "enclosure": ball_json(&ball),
                "depth": used_depth,
                "partial_sum": rat_json(
                    &series::partial_sum(&spec.series, used_depth).map_err(CliError::from)?
                ),
            });
            let tb = series::tail_bound(&spec.series, used_depth, &facts)?;
            report.assumed_facts = tb
                .justification
                .iter()
                .map(|f| {
                    f.assumed_beyond(
                        Window::new(f.from_index().min(used_depth), used_depth + 1)
                            .expect("audit window nonempty"),
                    )
                })
                .collect();
            report.verdict = Verdict::certified();
        }
        Err(verdict) => report.verdict = verdict,
    }
    Ok(report)
}

#[derive(Clone, Copy)]
pub struct SearchBounds {
    pub b_max: u64,
    pub n_max: i64,
    pub len: usize,
}

fn witness_json(w: &EsWitness) -> Value {
    json!({
        "B": w.multiplier.to_string(),
        "N": w.start,
        "c": w.c.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    })
}

pub fn check_erdos_straus(
    spec: LoadedSpec,
    bounds: SearchBounds,
    prec: &Precision,
    jobs: usize,
) -> Result<Report, CliError> {
    require_form(&spec, SeriesForm::Cantor, "erdos-straus")?;
    let mut report = Report::new(
        "check:erdos-straus",
        spec_inputs(
            &spec,
            json!({ "Bmax": bounds.b_max, "Nmax": bounds.n_max, "len": bounds.len }),
        ),
        prec,
    );
    let (witness, verdict) = if jobs > 1 {
        parallel_search(&spec.file, bounds, jobs)?
    } else {
        erdos_straus::search_witness(&spec.series, bounds.b_max, bounds.n_max, bounds.len)?
    };
    let hyp = erdos_straus::check_thm21_hypotheses(
        &spec.series,
        Window::new(spec.series.first_index(), bounds.n_max + bounds.len as i64)
            .map_err(CliError::input)?,
    )?;
    report.window = Some(
        Window::new(spec.series.first_index(), bounds.n_max + bounds.len as i64)
            .map_err(CliError::input)?,
    );
    report.values = json!({
        "witness": witness.as_ref().map(witness_json),
        "hypotheses": {
            "positivity": status_json(&hyp.positivity.status),
            "eventually_gt1": status_json(&hyp.eventually_gt1.status),
            "decay": indexed_rats(&hyp.decay[..hyp.decay.len().min(24)]),
            "no_decay_flag": hyp.no_decay_flag,
        },
    });
    report.assumed_facts = verdict.assumed.clone();
    report.assumed_facts.extend(hyp.assumed);
    report.verdict = verdict;
    Ok(report)
}

/// The `(B, N)` search is embarrassingly parallel; workers get their own
/// spec instances and results merge by lexicographic minimum.
fn parallel_search(
    file: &SpecFile,
    bounds: SearchBounds,
    jobs: usize,
) -> Result<(Option<EsWitness>, Verdict), CliError> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::input(e.to_string()))?;
    let candidates: Vec<u64> = (1..=bounds.b_max).collect();
    let found: Vec<(u64, Option<EsWitness>)> = pool.install(|| {
        candidates
            .par_iter()
            .map(|&b_mult| {
                let spec = build_spec(file.clone()).map_err(|e| CliError::input(e.to_string()))?;
                for start in spec.series.first_index()..=bounds.n_max {
                    let w = erdos_straus::construct_c(
                        &spec.series,
                        &BigInt::from(b_mult),
                        start,
                        bounds.len,
                    )?;
                    if erdos_straus::verify_witness(&spec.series, &w)?.is_certified() {
                        return Ok((b_mult, Some(w)));
                    }
                }
                Ok::<_, CliError>((b_mult, None))
            })
            .collect::<Result<Vec<_>, _>>()
    })?;
    let best = found
        .into_iter()
        .filter_map(|(b, w)| w.map(|w| (b, w)))
        .min_by_key(|(b, w)| (*b, w.start));
    match best {
        Some((_, w)) => {
            let spec = build_spec(file.clone()).map_err(|e| CliError::input(e.to_string()))?;
            let verdict = erdos_straus::verify_witness(&spec.series, &w)?;
            Ok((Some(w), verdict))
        }
        None => Ok((
            None,
            Verdict::inconclusive(format!(
                "no witness with B <= {}, N <= {}, window length {}",
                bounds.b_max, bounds.n_max, bounds.len
            )),
        )),
    }
}

pub fn check_erdos_straus_cor(
    spec: LoadedSpec,
    w: Window,
    prec: &Precision,
) -> Result<Report, CliError> {
    require_form(&spec, SeriesForm::Cantor, "erdos-straus-cor")?;
    let mut report = Report::new("check:erdos-straus-cor", spec_inputs(&spec, json!({})), prec);
    let rep = erdos_straus::check_cor210(&spec.series, w)?;
    report.window = Some(w);
    report.values = json!({
        "b_positive": status_json(&rep.b_positive.status),
        "a_monotone": status_json(&rep.a_monotone.status),
        "b_increment_over_a": indexed_rats(&rep.b_increment_over_a),
        "running_min_a_over_b": indexed_rats(&rep.running_min_a_over_b),
    });
    report.assumed_facts = rep.verdict.assumed.clone();
    report.verdict = rep.verdict;
    Ok(report)
}

pub fn check_prime_series(
    spec: LoadedSpec,
    w: Window,
    prec: &Precision,
) -> Result<Report, CliError> {
    let mut report = Report::new("check:prime-series", spec_inputs(&spec, json!({})), prec);
    let a_def = spec
        .series
        .sys()
        .def("a")
        .ok_or_else(|| CliError::input("spec has no sequence a"))?
        .clone();
    let rep =
        erdos_straus::check_thm31_prime(a_def, w, spec.series.sys().primes().clone())?;
    report.window = Some(w);
    report.values = json!({
        "a_positive": status_json(&rep.a_positive.status),
        "a_monotone": status_json(&rep.a_monotone.status),
        "p_over_a_squared": indexed_rats(&clip(&rep.p_over_a_squared, 32)),
        "running_min_a_over_p": indexed_rats(&clip(&rep.running_min_a_over_p, 32)),
        "ratio_max": rep.ratio_max.as_ref().map(|(n, r)| json!({"n": n, "ratio": rat_str(r)})),
        "ratio_min": rep.ratio_min.as_ref().map(|(n, r)| json!({"n": n, "ratio": rat_str(r)})),
        "double_sqrt": status_json(&rep.double_sqrt.status),
    });
    report.assumed_facts = rep.assumed;
    report.verdict = Verdict::inconclusive(
        "both prime-series hypotheses are limits; window diagnostics only",
    );
    Ok(report)
}

fn clip(values: &[(i64, BigRat)], cap: usize) -> Vec<(i64, BigRat)> {
    if values.len() <= cap {
        values.to_vec()
    } else {
        let mut out = values[..cap / 2].to_vec();
        out.extend_from_slice(&values[values.len() - cap / 2..]);
        out
    }
}

pub fn check_hancl(
    spec: LoadedSpec,
    a_limit: BigRat,
    s_start: i64,
    w: Window,
    prec: &Precision,
) -> Result<Report, CliError> {
    require_form(&spec, SeriesForm::Plain, "hancl")?;
    let mut report = Report::new(
        "check:hancl",
        spec_inputs(&spec, json!({ "A": rat_str(&a_limit), "s": s_start })),
        prec,
    );
    let standard;
    let product: &ProductSeq = match &spec.product {
        Some(p) => p,
        None => {
            standard = hancl::standard_product_seq(spec.series.sys().primes().clone());
            &standard
        }
    };
    let h = HanclHypotheses::new(a_limit, s_start, w, prec.clone())?;
    let rep = match verdict_or(hancl::check_hancl_thm3(&spec.series, product, &h))? {
        Ok(rep) => rep,
        Err(verdict) => {
            report.verdict = verdict;
            return Ok(report);
        }
    };
    report.window = Some(w);
    report.values = json!({
        "roots": indexed_balls(&rep.roots),
        "gap_to_limit": indexed_balls(&rep.gap_to_limit),
        "running_max_root": indexed_balls(&rep.running_max_root),
        "product_margin": rep.product_margin.iter().map(|m| json!({
            "n": m.n,
            "lhs": ball_json(&m.lhs),
            "rhs": ball_json(&m.rhs),
            "status": status_json(&m.status),
        })).collect::<Vec<_>>(),
        "growth_log": indexed_balls(&rep.growth_log),
        "growth_increasing": rep.growth_increasing,
    });
    report.assumed_facts = rep.verdict.assumed.clone();
    report.verdict = rep.verdict;
    Ok(report)
}

pub fn check_hancl_cor2(
    spec: LoadedSpec,
    a_limit: BigRat,
    w: Window,
    threshold: i64,
    prec: &Precision,
) -> Result<Report, CliError> {
    require_form(&spec, SeriesForm::Plain, "hancl-cor2")?;
    let mut report = Report::new(
        "check:hancl-cor2",
        spec_inputs(&spec, json!({ "A": rat_str(&a_limit), "threshold": threshold })),
        prec,
    );
    let rep = hancl::check_hancl_cor2(&spec.series, &a_limit, w, prec, threshold)?;
    report.window = Some(w);
    report.values = json!({
        "threshold": rep.threshold,
        "checks": rep.checks.iter().map(|c| json!({
            "n": c.n,
            "root": ball_json(&c.root),
            "a_bound": status_json(&c.a_bound),
            "b_bound": status_json(&c.b_bound),
            "reduction": status_json(&c.reduction),
        })).collect::<Vec<_>>(),
    });
    report.assumed_facts = rep.verdict.assumed.clone();
    report.verdict = rep.verdict;
    Ok(report)
}

pub fn check_hancl_refute(
    spec: LoadedSpec,
    q_max: BigInt,
    n_max: i64,
    prec: &Precision,
) -> Result<Report, CliError> {
    require_form(&spec, SeriesForm::Plain, "hancl-refute")?;
    let mut report = Report::new(
        "check:hancl-refute",
        spec_inputs(&spec, json!({ "qmax": q_max.to_string(), "nmax": n_max })),
        prec,
    );
    let facts = spec.term_facts.clone();
    let sweep = match verdict_or(hancl::refute_rational_candidates(
        &spec.series,
        &q_max,
        n_max,
        prec,
        &facts,
    ))? {
        Ok(s) => s,
        Err(verdict) => {
            report.verdict = verdict;
            return Ok(report);
        }
    };
    report.values = json!({
        "bands": sweep.thresholds.iter().map(|(n, t)| json!({
            "n": n, "refutes_q_up_to": t.to_string(),
        })).collect::<Vec<_>>(),
        "fully_covered": sweep.fully_covered(),
        "max_index_needed": sweep.max_index_needed(),
    });
    report.assumed_facts = sweep.assumed.clone();
    report.verdict = if sweep.fully_covered() {
        Verdict::certified().with_assumed(sweep.assumed)
    } else {
        Verdict::inconclusive(format!(
            "denominators up to {} not all refuted within n <= {}",
            sweep.q_max, n_max
        ))
    };
    Ok(report)
}

pub fn check_erdos_straus_refute(
    spec: LoadedSpec,
    q_max: u64,
    n_max: i64,
    prec: &Precision,
    jobs: usize,
) -> Result<Report, CliError> {
    require_form(&spec, SeriesForm::Cantor, "erdos-straus-refute")?;
    let mut report = Report::new(
        "check:erdos-straus-refute",
        spec_inputs(&spec, json!({ "qmax": q_max, "nmax": n_max })),
        prec,
    );
    let facts = spec.term_facts.clone();
    let run_q = |series: &irrcrit::series::SeriesInstance,
                 q: u64|
     -> Result<(u64, Option<i64>, Verdict), CliError> {
        let v = series::denominator_refutation(series, &BigInt::from(q), n_max, prec, &facts)?;
        Ok((q, v.refutation_index(), v))
    };
    let results: Vec<(u64, Option<i64>, Verdict)> = if jobs > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| CliError::input(e.to_string()))?;
        let file = spec.file.clone();
        pool.install(|| {
            (1..=q_max)
                .into_par_iter()
                .map(|q| {
                    let local =
                        build_spec(file.clone()).map_err(|e| CliError::input(e.to_string()))?;
                    run_q(&local.series, q)
                })
                .collect::<Result<Vec<_>, _>>()
        })?
    } else {
        (1..=q_max)
            .map(|q| run_q(&spec.series, q))
            .collect::<Result<Vec<_>, _>>()?
    };
    let refuted = results.iter().filter(|(_, n, _)| n.is_some()).count() as u64;
    let worst = results.iter().filter_map(|(_, n, _)| *n).max();
    let mut assumed = Vec::new();
    for (_, _, v) in &results {
        assumed.extend(v.assumed.clone());
    }
    report.values = json!({
        "per_q": results.iter().map(|(q, n, v)| json!({
            "q": q,
            "refuted_at": n,
            "status": status_json(&v.status),
        })).collect::<Vec<_>>(),
        "refuted_count": refuted,
        "max_index_needed": worst,
    });
    report.verdict = if refuted == q_max {
        Verdict::certified()
    } else {
        Verdict::inconclusive(format!("{refuted} of {q_max} denominators refuted"))
    };
    report.assumed_facts = {
        let mut seen = std::collections::HashSet::new();
        assumed.retain(|f| seen.insert(f.fact.clone()));
        assumed
    };
    Ok(report)
}

pub fn check_hancl_rucki(
    spec: LoadedSpec,
    second: bool,
    delta: BigRat,
    epsilon: Option<BigRat>,
    t_start: i64,
    w: Window,
    prec: &Precision,
) -> Result<Report, CliError> {
    let analysis = if second { "check:hancl-rucki-2" } else { "check:hancl-rucki-1" };
    require_form(&spec, SeriesForm::Plain, analysis)?;
    let mut report = Report::new(
        analysis,
        spec_inputs(
            &spec,
            json!({
                "delta": rat_str(&delta),
                "epsilon": epsilon.as_ref().map(rat_str),
                "t": t_start,
            }),
        ),
        prec,
    );
    report.window = Some(w);
    let mut h = HrHypotheses::new(delta, w, prec.clone())?.with_start(t_start);
    if second {
        let eps = epsilon.ok_or_else(|| CliError::input("hancl-rucki-2 needs --epsilon"))?;
        h = h.with_epsilon(eps)?;
        let rep = roth::check_hr_thm22(&spec.series, &h)?;
        report.values = json!({
            "exponent": rat_str(&rep.exponent),
            "limsup_log": indexed_balls(&rep.limsup_log),
            "new_max_indices": rep.new_max_indices,
            "no_divergence_flag": rep.no_divergence_flag,
            "root_gap": rep.root_gap.iter().map(|(k, s)| json!({
                "k": k, "status": status_json(s),
            })).collect::<Vec<_>>(),
        });
        report.assumed_facts = rep.root_gap_verdict.assumed.clone();
        report.verdict = rep.root_gap_verdict;
    } else {
        let rep = roth::check_hr_thm21(&spec.series, &h)?;
        report.values = json!({
            "limsup_log": indexed_balls(&rep.limsup_log),
            "new_max_indices": rep.new_max_indices,
            "no_divergence_flag": rep.no_divergence_flag,
            "liminf_values": indexed_rats(&rep.liminf_values),
            "liminf_window_min": rep.liminf_window_min.as_ref().map(|(k, v)| json!({
                "k": k, "value": rat_json(v),
            })),
            "liminf_margin_over_one": rep.liminf_margin_over_one.as_ref().map(rat_str),
        });
        report.assumed_facts = rep.verdict.assumed.clone();
        report.verdict = rep.verdict;
    }
    Ok(report)
}

pub fn counterexample(
    delta: BigRat,
    a1: BigInt,
    a_const: BigRat,
    kmax: i64,
    prec: &Precision,
) -> Result<Report, CliError> {
    let mut report = Report::new(
        "counterexample",
        json!({
            "delta": rat_str(&delta),
            "a1": a1.to_string(),
            "A": rat_str(&a_const),
            "kmax": kmax,
        }),
        prec,
    );
    let fam = roth::counterexample_sequence(&delta, &a1, kmax)?;
    let failures = fam.claim_failure_indices(&a_const);
    let fixed_claim_ok = fam.claim_failure_indices(&rat(2, 1)).is_empty();
    report.values = json!({
        "exponent": fam.exponent.to_string(),
        "terms": fam.a_values.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
        "claim_failure_indices": failures.clone(),
        "fixed_claim_audit": {
            "A": "2",
            "failure_free": fixed_claim_ok,
        },
    });
    report.verdict = if failures.is_empty() {
        Verdict::certified()
    } else {
        Verdict::refuted_at(failures[0])
    };
    report.assumed_facts = vec![irrcrit::verdict::AssumedFact {
        fact: "the claim audit covers the generated window only".into(),
        checked: Some((1, kmax.max(2) - 1)),
    }];
    Ok(report)
}

pub fn primes_diag(
    nmin: u64,
    nmax: u64,
    epsilon: BigRat,
    prec: &Precision,
) -> Result<Report, CliError> {
    let mut report = Report::new(
        "primes:diag",
        json!({ "nmin": nmin, "nmax": nmax, "epsilon": rat_str(&epsilon) }),
        prec,
    );
    let cache = PrimeCache::new();
    let stats = cache.prime_ratio_window(nmin, nmax)?;
    let check_min = cache.double_sqrt_check(nmin, &epsilon, prec)?;
    let check_max = cache.double_sqrt_check(nmax, &epsilon, prec)?;
    report.window = Some(
        Window::new(nmin as i64, nmax as i64).map_err(CliError::input)?,
    );
    report.values = json!({
        "p_nmin": cache.nth_prime(nmin)?.to_string(),
        "p_nmax": cache.nth_prime(nmax)?.to_string(),
        "ratio_count": stats.count,
        "ratio_max": stats.max.as_ref().map(|(n, r)| json!({
            "n": n, "ratio": rat_str(r), "approx": approx_str(r, 12),
        })),
        "ratio_min": stats.min.as_ref().map(|(n, r)| json!({
            "n": n, "ratio": rat_str(r), "approx": approx_str(r, 12),
        })),
        "double_sqrt_at_nmin": status_json(&check_min.status),
        "double_sqrt_at_nmax": status_json(&check_max.status),
    });
    report.assumed_facts = check_max.assumed.clone();
    report.verdict = check_max;
    Ok(report)
}

pub fn roth_exponent(spec: LoadedSpec, kmax: i64, prec: &Precision) -> Result<Report, CliError> {
    require_form(&spec, SeriesForm::Plain, "roth exponent")?;
    let mut report = Report::new(
        "roth:exponent",
        spec_inputs(&spec, json!({ "kmax": kmax })),
        prec,
    );
    let facts = spec.term_facts.clone();
    let rep = match verdict_or(roth::transcendence_report(&spec.series, kmax, prec, &facts))? {
        Ok(rep) => rep,
        Err(verdict) => {
            report.verdict = verdict;
            return Ok(report);
        }
    };
    report.values = json!({
        "approximants": rep.approximants.iter().map(|a| json!({
            "k": a.k,
            "p": a.p.to_string(),
            "q": a.q.to_string(),
            "q_scale": a.q_scale.to_string(),
            "gap": ball_json(&a.gap),
            "kappa": kappa_json(&a.kappa),
        })).collect::<Vec<_>>(),
        "exceptional_indices": rep.exceptional_indices,
        "summary": rep.summary,
    });
    report.assumed_facts = vec![rep.roth_assumption];
    report.verdict = Verdict::inconclusive(
        "effective exponents are evidence under the Roth assumption, not a decision",
    );
    Ok(report)
}

fn kappa_json(k: &KappaEstimate) -> Value {
    match k {
        KappaEstimate::Ball(b) => json!({ "kind": "ball", "ball": ball_json(b) }),
        KappaEstimate::AtLeast(v) => json!({
            "kind": "at_least",
            "value": rat_str(v),
            "approx": approx_str(v, 12),
        }),
        KappaEstimate::Undefined(reason) => json!({ "kind": "undefined", "reason": reason }),
    }
}

/// Best-effort u64 view of a rational flag for sweep sizes.
pub fn rat_to_u64(v: &BigRat, what: &str) -> Result<u64, CliError> {
    if !v.is_integer() {
        return Err(CliError::input(format!("{what} must be an integer")));
    }
    v.to_integer()
        .to_u64()
        .ok_or_else(|| CliError::input(format!("{what} out of range")))
}
