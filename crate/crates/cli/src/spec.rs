//! The series spec-file format and its validated conversion into core
//! analysis objects. The JSON schema shipped in `docs/spec.schema.json`
//! documents exactly what strict deserialization plus the checks here
//! enforce.

use irrcrit::exact::{parse_rat, BigRat};
use irrcrit::hancl::ProductSeq;
use irrcrit::primes::PrimeCache;
use irrcrit::seq::{parse_expr, DeclaredFact, SeqKind, SeqSystem, SequenceDef};
use irrcrit::series::{SeriesForm, SeriesInstance};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub form: String,
    #[serde(default = "default_first_index")]
    pub first_index: i64,
    pub a: SeqSpec,
    pub b: SeqSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<SeqSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub facts: Vec<FactSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, String>,
}

fn default_first_index() -> i64 {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeqSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub facts: Vec<FactSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactSpec {
    #[serde(rename = "type")]
    pub kind: String,
    /// Which object the fact describes: "terms" (default), "a", "b", or "d".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub about: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeff: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<String>,
    pub from: i64,
}

/// Spec-file errors are input errors (exit code 1).
#[derive(Debug)]
pub struct SpecError(pub String);

impl std::fmt::Display for SpecError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "spec error: {}", self.0)
    }
}

fn rat_field(v: &Option<String>, what: &str) -> Result<BigRat, SpecError> {
    let s = v
        .as_ref()
        .ok_or_else(|| SpecError(format!("fact is missing its {what} field")))?;
    parse_rat(s).ok_or_else(|| SpecError(format!("{what} {s:?} is not a rational")))
}

impl FactSpec {
    pub fn to_fact(&self) -> Result<DeclaredFact, SpecError> {
        let fact = match self.kind.as_str() {
            "ratio_dominated" => DeclaredFact::RatioDominated {
                c: rat_field(&self.c, "c")?,
                from: self.from,
            },
            "eventually_positive" => DeclaredFact::EventuallyPositive { from: self.from },
            "monotone_nondecreasing" => {
                DeclaredFact::MonotoneNondecreasing { from: self.from }
            }
            "eventually_ge" => {
                let text = self
                    .bound
                    .as_ref()
                    .ok_or_else(|| SpecError("eventually_ge needs a bound".into()))?;
                DeclaredFact::EventuallyGe {
                    bound: parse_expr(text).map_err(|e| SpecError(e.to_string()))?,
                    from: self.from,
                }
            }
            "log_tail_dominated" => DeclaredFact::LogTailDominated {
                coeff: rat_field(&self.coeff, "coeff")?,
                ratio: rat_field(&self.ratio, "ratio")?,
                from: self.from,
            },
            other => return Err(SpecError(format!("unknown fact type {other:?}"))),
        };
        fact.validate().map_err(SpecError)?;
        Ok(fact)
    }

    fn about(&self) -> &str {
        self.about.as_deref().unwrap_or("terms")
    }
}

impl SeqSpec {
    fn to_def(&self, name: &str, first_index: i64, rational: bool) -> Result<SequenceDef, SpecError> {
        let kind = match self.kind.as_str() {
            "closed_form" => {
                let text = self
                    .expr
                    .as_ref()
                    .ok_or_else(|| SpecError(format!("{name}: closed_form needs expr")))?;
                let e = parse_expr(text).map_err(|e| SpecError(format!("{name}: {e}")))?;
                if e.max_prev_depth() > 0 {
                    return Err(SpecError(format!(
                        "{name}: closed_form must not reference prior terms"
                    )));
                }
                SeqKind::ClosedForm(e)
            }
            "recurrence" => {
                let text = self
                    .expr
                    .as_ref()
                    .ok_or_else(|| SpecError(format!("{name}: recurrence needs expr")))?;
                let step = parse_expr(text).map_err(|e| SpecError(format!("{name}: {e}")))?;
                let base = self
                    .base
                    .as_ref()
                    .ok_or_else(|| SpecError(format!("{name}: recurrence needs base terms")))?
                    .iter()
                    .map(|s| {
                        parse_rat(s)
                            .ok_or_else(|| SpecError(format!("{name}: bad base value {s:?}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                SeqKind::Recurrence { base, step }
            }
            "table" => {
                let values = self
                    .values
                    .as_ref()
                    .ok_or_else(|| SpecError(format!("{name}: table needs values")))?
                    .iter()
                    .map(|s| {
                        parse_rat(s)
                            .ok_or_else(|| SpecError(format!("{name}: bad table value {s:?}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                SeqKind::Table(values)
            }
            "primes" => SeqKind::Primes,
            other => return Err(SpecError(format!("{name}: unknown kind {other:?}"))),
        };
        let mut def = SequenceDef::new(name, kind).with_first_index(first_index);
        if rational {
            def = def.rational();
        }
        let facts = self
            .facts
            .iter()
            .map(|f| f.to_fact())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(def.with_facts(facts))
    }
}

pub struct LoadedSpec {
    pub file: SpecFile,
    pub form: SeriesForm,
    pub series: SeriesInstance,
    pub product: Option<ProductSeq>,
    /// Facts about the series terms ("about": "terms" or omitted).
    pub term_facts: Vec<DeclaredFact>,
}

pub fn load_spec(path: &std::path::Path) -> Result<LoadedSpec, SpecError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SpecError(format!("cannot read {}: {e}", path.display())))?;
    let file: SpecFile = serde_json::from_str(&text)
        .map_err(|e| SpecError(format!("{}: {e}", path.display())))?;
    build_spec(file)
}

pub fn build_spec(file: SpecFile) -> Result<LoadedSpec, SpecError> {
    let form = match file.form.as_str() {
        "cantor" => SeriesForm::Cantor,
        "plain" => SeriesForm::Plain,
        other => return Err(SpecError(format!("form must be cantor or plain, got {other:?}"))),
    };
    let primes = Arc::new(PrimeCache::new());
    let mut sys = SeqSystem::new(primes.clone());
    let mut a_def = file.a.to_def("a", file.first_index, false)?;
    let mut b_def = file.b.to_def("b", file.first_index, false)?;
    // Facts addressed to a or b attach to the definitions.
    for fact in &file.facts {
        match fact.about() {
            "a" => a_def.facts.push(fact.to_fact()?),
            "b" => b_def.facts.push(fact.to_fact()?),
            _ => {}
        }
    }
    sys.insert(a_def).map_err(|e| SpecError(e.to_string()))?;
    sys.insert(b_def).map_err(|e| SpecError(e.to_string()))?;
    for (name, value) in &file.params {
        let v = parse_rat(value)
            .ok_or_else(|| SpecError(format!("param {name}: bad rational {value:?}")))?;
        sys.set_param(name.clone(), v);
    }
    let term_facts = file
        .facts
        .iter()
        .filter(|f| f.about() == "terms")
        .map(|f| f.to_fact())
        .collect::<Result<Vec<_>, _>>()?;
    let series = SeriesInstance::new(sys, form)
        .map_err(|e| SpecError(e.to_string()))?
        .with_facts(term_facts.clone());

    let product = match &file.d {
        None => None,
        Some(d_spec) => {
            let mut d_sys = SeqSystem::new(primes);
            let d_def = d_spec.to_def("d", file.first_index, true)?;
            d_sys.insert(d_def).map_err(|e| SpecError(e.to_string()))?;
            let d_facts = file
                .facts
                .iter()
                .filter(|f| f.about() == "d")
                .chain(d_spec.facts.iter())
                .map(|f| f.to_fact())
                .collect::<Result<Vec<_>, _>>()?;
            Some(
                ProductSeq::new(d_sys, "d", d_facts).map_err(|e| SpecError(e.to_string()))?,
            )
        }
    };
    Ok(LoadedSpec { file, form, series, product, term_facts })
}
