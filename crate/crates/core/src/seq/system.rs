//! Sequence definitions and their memoized exact evaluator.

use super::ast::{Builtin, SeqExpr};
use super::facts::DeclaredFact;
use crate::exact::{rat_pow, BigInt, BigRat};
use crate::primes::{PrimeCache, PrimesError};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cell::{Cell, RefCell};
use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

const MAX_POW_EXPONENT: u64 = 1 << 26;
const MAX_POW_RESULT_BITS: u64 = 1 << 27;
const MAX_FACTORIAL_ARG: u64 = 1_000_000;
const MAX_EVAL_DEPTH: u32 = 128;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unknown sequence {0:?}")]
    UnknownSequence(String),
    #[error("unknown identifier {0:?}")]
    UnknownIdentifier(String),
    #[error("index {index} below first index {first_index} of {name:?}")]
    IndexBelowFirst { name: String, index: i64, first_index: i64 },
    #[error("table sequence {name:?} has no entry at index {index}")]
    TableOutOfRange { name: String, index: i64 },
    #[error("prior-term reference outside a recurrence step")]
    PrevOutsideRecurrence,
    #[error("recurrence {name:?} base covers {have} terms but the step reaches back {need}")]
    BaseTooShort { name: String, need: u32, have: usize },
    #[error("sequence {name:?} produced the non-integer value {value} at index {index}")]
    NonIntegerValue { name: String, index: i64, value: String },
    #[error("{0}")]
    Domain(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cyclic definition involving {0:?}")]
    CyclicDefinition(String),
    #[error("resource cap: {0}")]
    ResourceCap(String),
    #[error("prime generation: {0}")]
    Primes(#[from] PrimesError),
}

/// Whether a sequence is required to take integer values.
///
/// Integer is the default: the series theorems all take integer sequences.
/// Rational is for auxiliary sequences like the product factors `d(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Domain {
    #[default]
    Integer,
    Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeqKind {
    ClosedForm(SeqExpr),
    Recurrence { base: Vec<BigRat>, step: SeqExpr },
    Table(Vec<BigRat>),
    Primes,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceDef {
    pub name: String,
    pub kind: SeqKind,
    pub first_index: i64,
    pub domain: Domain,
    pub facts: Vec<DeclaredFact>,
}

impl SequenceDef {
    pub fn new(name: impl Into<String>, kind: SeqKind) -> Self {
        SequenceDef {
            name: name.into(),
            kind,
            first_index: 1,
            domain: Domain::Integer,
            facts: Vec::new(),
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_first_index(mut self, first_index: i64) -> Self {
        self.first_index = first_index;
        self
    }

    pub fn rational(mut self) -> Self {
        self.domain = Domain::Rational;
        self
    }

    pub fn with_facts(mut self, facts: Vec<DeclaredFact>) -> Self {
        self.facts = facts;
        self
    }

    /// Attach base terms to a recurrence definition.
    pub fn with_base(mut self, base: Vec<BigRat>) -> Self {
        if let SeqKind::Recurrence { base: b, .. } = &mut self.kind {
            *b = base;
        }
        self
    }

    pub fn table_of_ints(name: impl Into<String>, values: Vec<BigInt>) -> Self {
        SequenceDef::new(
            name,
            SeqKind::Table(values.into_iter().map(BigRat::from_integer).collect()),
        )
    }
}

/// A registry of named sequences evaluated against shared parameters and a
/// shared prime cache.
///
/// Evaluation is memoized per system; a system is single-threaded by design
/// (interior mutability via `RefCell`) while distinct systems are fully
/// independent.
pub struct SeqSystem {
    defs: HashMap<String, SequenceDef>,
    params: HashMap<String, BigRat>,
    primes: Arc<PrimeCache>,
    memo: RefCell<HashMap<(String, i64), BigRat>>,
    filled_to: RefCell<HashMap<String, i64>>,
    prod_memo: RefCell<HashMap<(String, i64), BigRat>>,
    in_progress: RefCell<BTreeSet<(String, i64)>>,
    depth: Cell<u32>,
}

impl SeqSystem {
    pub fn new(primes: Arc<PrimeCache>) -> Self {
        SeqSystem {
            defs: HashMap::new(),
            params: HashMap::new(),
            primes,
            memo: RefCell::new(HashMap::new()),
            filled_to: RefCell::new(HashMap::new()),
            prod_memo: RefCell::new(HashMap::new()),
            in_progress: RefCell::new(BTreeSet::new()),
            depth: Cell::new(0),
        }
    }

    pub fn primes(&self) -> &Arc<PrimeCache> {
        &self.primes
    }

    pub fn insert(&mut self, def: SequenceDef) -> Result<(), EvalError> {
        if let SeqKind::Recurrence { base, step } = &def.kind {
            let need = step.max_prev_depth();
            if (base.len() as u32) < need {
                return Err(EvalError::BaseTooShort {
                    name: def.name.clone(),
                    need,
                    have: base.len(),
                });
            }
        }
        for fact in &def.facts {
            fact.validate().map_err(EvalError::Domain)?;
        }
        self.defs.insert(def.name.clone(), def);
        Ok(())
    }

    pub fn set_param(&mut self, name: impl Into<String>, value: BigRat) {
        self.params.insert(name.into(), value);
    }

    pub fn def(&self, name: &str) -> Option<&SequenceDef> {
        self.defs.get(name)
    }

    /// Exact term value as a rational.
    pub fn eval_rat(&self, name: &str, n: i64) -> Result<BigRat, EvalError> {
        let def = self
            .defs
            .get(name)
            .ok_or_else(|| EvalError::UnknownSequence(name.to_string()))?;
        if n < def.first_index {
            return Err(EvalError::IndexBelowFirst {
                name: name.to_string(),
                index: n,
                first_index: def.first_index,
            });
        }
        if let Some(v) = self.memo.borrow().get(&(name.to_string(), n)) {
            return Ok(v.clone());
        }
        match &def.kind {
            SeqKind::Table(values) => {
                let off = (n - def.first_index) as usize;
                let v = values
                    .get(off)
                    .cloned()
                    .ok_or_else(|| EvalError::TableOutOfRange { name: name.to_string(), index: n })?;
                self.store(def, n, v)
            }
            SeqKind::Primes => {
                let k = (n - def.first_index + 1) as u64;
                let p = self.primes.nth_prime(k)?;
                self.store(def, n, BigRat::from_integer(p.into()))
            }
            SeqKind::ClosedForm(expr) => {
                self.enter(name, n)?;
                let v = self.eval_expr_inner(expr, def, n, false);
                self.leave(name, n);
                self.store(def, n, v?)
            }
            SeqKind::Recurrence { base, step } => {
                let start = {
                    let filled = self.filled_to.borrow();
                    filled.get(name).map(|f| f + 1).unwrap_or(def.first_index)
                };
                let mut last = BigRat::zero();
                for i in start..=n {
                    let off = (i - def.first_index) as usize;
                    let v = if off < base.len() {
                        base[off].clone()
                    } else {
                        self.enter(name, i)?;
                        let r = self.eval_expr_inner(step, def, i, true);
                        self.leave(name, i);
                        r?
                    };
                    last = self.store(def, i, v)?;
                    self.filled_to.borrow_mut().insert(name.to_string(), i);
                }
                if start > n {
                    // Already filled past n but the memo missed: recompute key.
                    last = self
                        .memo
                        .borrow()
                        .get(&(name.to_string(), n))
                        .cloned()
                        .expect("filled range is memoized");
                }
                Ok(last)
            }
        }
    }

    /// Exact integer term value; integer-domain sequences enforce this on
    /// every stored term already, rational-domain ones here.
    pub fn eval_int(&self, name: &str, n: i64) -> Result<BigInt, EvalError> {
        let v = self.eval_rat(name, n)?;
        if !v.is_integer() {
            return Err(EvalError::NonIntegerValue {
                name: name.to_string(),
                index: n,
                value: crate::exact::rat_str(&v),
            });
        }
        Ok(v.to_integer())
    }

    /// `∏ s(i)` for `i` from the sequence's first index through `upto`
    /// inclusive; the empty product is 1.
    pub fn prefix_product(&self, name: &str, upto: i64) -> Result<BigRat, EvalError> {
        let first = self
            .defs
            .get(name)
            .ok_or_else(|| EvalError::UnknownSequence(name.to_string()))?
            .first_index;
        if upto < first {
            return Ok(BigRat::one());
        }
        if let Some(v) = self.prod_memo.borrow().get(&(name.to_string(), upto)) {
            return Ok(v.clone());
        }
        let mut i = upto;
        let mut acc_from = None;
        while i >= first {
            if let Some(v) = self.prod_memo.borrow().get(&(name.to_string(), i)) {
                acc_from = Some((i, v.clone()));
                break;
            }
            i -= 1;
        }
        let (mut i, mut acc) = acc_from.unwrap_or((first - 1, BigRat::one()));
        while i < upto {
            i += 1;
            acc *= self.eval_rat(name, i)?;
            self.prod_memo
                .borrow_mut()
                .insert((name.to_string(), i), acc.clone());
        }
        Ok(acc)
    }

    /// Evaluates a standalone expression at index `n` (no prior-term refs).
    pub fn eval_expr_at(&self, expr: &SeqExpr, n: i64) -> Result<BigRat, EvalError> {
        let scratch = SequenceDef::new("<expr>", SeqKind::Primes).rational();
        self.eval_expr_inner(expr, &scratch, n, false)
    }

    fn store(&self, def: &SequenceDef, n: i64, v: BigRat) -> Result<BigRat, EvalError> {
        if def.domain == Domain::Integer && !v.is_integer() {
            return Err(EvalError::NonIntegerValue {
                name: def.name.clone(),
                index: n,
                value: crate::exact::rat_str(&v),
            });
        }
        self.memo
            .borrow_mut()
            .insert((def.name.clone(), n), v.clone());
        Ok(v)
    }

    fn enter(&self, name: &str, n: i64) -> Result<(), EvalError> {
        if self.depth.get() >= MAX_EVAL_DEPTH {
            return Err(EvalError::ResourceCap("evaluation recursion too deep".into()));
        }
        if !self
            .in_progress
            .borrow_mut()
            .insert((name.to_string(), n))
        {
            return Err(EvalError::CyclicDefinition(name.to_string()));
        }
        self.depth.set(self.depth.get() + 1);
        Ok(())
    }

    fn leave(&self, name: &str, n: i64) {
        self.in_progress.borrow_mut().remove(&(name.to_string(), n));
        self.depth.set(self.depth.get() - 1);
    }

    fn eval_expr_inner(
        &self,
        expr: &SeqExpr,
        def: &SequenceDef,
        n: i64,
        allow_prev: bool,
    ) -> Result<BigRat, EvalError> {
        match expr {
            SeqExpr::Int(v) => Ok(BigRat::from_integer(v.clone())),
            SeqExpr::Var => Ok(BigRat::from_integer(n.into())),
            SeqExpr::Param(p) => self
                .params
                .get(p)
                .cloned()
                .ok_or_else(|| EvalError::UnknownIdentifier(p.clone())),
            SeqExpr::Prev(k) => {
                if !allow_prev {
                    return Err(EvalError::PrevOutsideRecurrence);
                }
                let i = n - *k as i64;
                self.memo
                    .borrow()
                    .get(&(def.name.clone(), i))
                    .cloned()
                    .ok_or_else(|| EvalError::IndexBelowFirst {
                        name: def.name.clone(),
                        index: i,
                        first_index: def.first_index,
                    })
            }
            SeqExpr::SeqRef(other, ix) => {
                let ix = self.eval_expr_inner(ix, def, n, allow_prev)?;
                let i = rat_to_index(&ix)?;
                self.eval_rat(other, i)
            }
            SeqExpr::ProdPrefix(other) => self.prefix_product(other, n - 1),
            SeqExpr::Add(a, b) => Ok(self.eval_expr_inner(a, def, n, allow_prev)?
                + self.eval_expr_inner(b, def, n, allow_prev)?),
            SeqExpr::Sub(a, b) => Ok(self.eval_expr_inner(a, def, n, allow_prev)?
                - self.eval_expr_inner(b, def, n, allow_prev)?),
            SeqExpr::Mul(a, b) => Ok(self.eval_expr_inner(a, def, n, allow_prev)?
                * self.eval_expr_inner(b, def, n, allow_prev)?),
            SeqExpr::Div(a, b) => {
                let d = self.eval_expr_inner(b, def, n, allow_prev)?;
                if d.is_zero() {
                    return Err(EvalError::DivisionByZero);
                }
                Ok(self.eval_expr_inner(a, def, n, allow_prev)? / d)
            }
            SeqExpr::Pow(a, b) => {
                let base = self.eval_expr_inner(a, def, n, allow_prev)?;
                let exp = self.eval_expr_inner(b, def, n, allow_prev)?;
                if !exp.is_integer() || exp.is_negative() {
                    return Err(EvalError::Domain(format!(
                        "exponent must be a nonnegative integer, got {}",
                        crate::exact::rat_str(&exp)
                    )));
                }
                let e = exp.to_integer().to_u64().filter(|&e| e <= MAX_POW_EXPONENT).ok_or_else(
                    || EvalError::ResourceCap(format!("exponent {} too large", exp.to_integer())),
                )?;
                let base_bits = base.numer().bits().max(base.denom().bits());
                if base_bits.saturating_mul(e) > MAX_POW_RESULT_BITS {
                    return Err(EvalError::ResourceCap(format!(
                        "power result would exceed {MAX_POW_RESULT_BITS} bits"
                    )));
                }
                let v = rat_pow(&base, e);
                if def.domain == Domain::Integer && !v.is_integer() {
                    return Err(EvalError::NonIntegerValue {
                        name: def.name.clone(),
                        index: n,
                        value: crate::exact::rat_str(&v),
                    });
                }
                Ok(v)
            }
            SeqExpr::Factorial(a) => {
                let v = self.eval_expr_inner(a, def, n, allow_prev)?;
                if !v.is_integer() || v.is_negative() {
                    return Err(EvalError::Domain(format!(
                        "factorial of {}",
                        crate::exact::rat_str(&v)
                    )));
                }
                let k = v.to_integer().to_u64().filter(|&k| k <= MAX_FACTORIAL_ARG).ok_or_else(
                    || EvalError::ResourceCap("factorial argument too large".into()),
                )?;
                let mut acc = BigInt::one();
                for i in 2..=k {
                    acc *= BigInt::from(i);
                }
                Ok(BigRat::from_integer(acc))
            }
            SeqExpr::Call(Builtin::NthPrime, args) => {
                let v = self.eval_expr_inner(&args[0], def, n, allow_prev)?;
                if !v.is_integer() || !v.is_positive() {
                    return Err(EvalError::Domain(format!(
                        "nth_prime index must be a positive integer, got {}",
                        crate::exact::rat_str(&v)
                    )));
                }
                let k = v
                    .to_integer()
                    .to_u64()
                    .ok_or_else(|| EvalError::ResourceCap("nth_prime index too large".into()))?;
                Ok(BigRat::from_integer(self.primes.nth_prime(k)?.into()))
            }
            SeqExpr::Call(Builtin::FloorDiv, args) => {
                let a = self.eval_expr_inner(&args[0], def, n, allow_prev)?;
                let b = self.eval_expr_inner(&args[1], def, n, allow_prev)?;
                if b.is_zero() {
                    return Err(EvalError::DivisionByZero);
                }
                Ok((a / b).floor())
            }
            SeqExpr::Call(Builtin::Ceil, args) => {
                Ok(self.eval_expr_inner(&args[0], def, n, allow_prev)?.ceil())
            }
            SeqExpr::Call(Builtin::Round, args) => {
                // Ties round half away from zero.
                Ok(self.eval_expr_inner(&args[0], def, n, allow_prev)?.round())
            }
        }
    }
}

fn rat_to_index(v: &BigRat) -> Result<i64, EvalError> {
    if !v.is_integer() {
        return Err(EvalError::Domain(format!(
            "sequence index must be an integer, got {}",
            crate::exact::rat_str(v)
        )));
    }
    v.to_integer()
        .to_i64()
        .ok_or_else(|| EvalError::ResourceCap("sequence index out of i64 range".into()))
}
