//! Expression AST for sequence definitions.

use crate::exact::BigInt;
use num_traits::Signed;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    NthPrime,
    FloorDiv,
    Ceil,
    Round,
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::NthPrime => "nth_prime",
            Builtin::FloorDiv => "floor_div",
            Builtin::Ceil => "ceil",
            Builtin::Round => "round",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Builtin::FloorDiv => 2,
            _ => 1,
        }
    }

    pub fn from_name(s: &str) -> Option<Builtin> {
        match s {
            "nth_prime" => Some(Builtin::NthPrime),
            "floor_div" => Some(Builtin::FloorDiv),
            "ceil" => Some(Builtin::Ceil),
            "round" => Some(Builtin::Round),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeqExpr {
    Int(BigInt),
    /// The index variable `n`.
    Var,
    /// Prior-term reference `t(n-k)`, valid only inside recurrence steps.
    Prev(u32),
    /// A named constant bound at evaluation time.
    Param(String),
    /// Another sequence indexed by a subexpression, `name(expr)`.
    SeqRef(String, Box<SeqExpr>),
    /// Running product of a named sequence over indices strictly below `n`.
    ProdPrefix(String),
    Add(Box<SeqExpr>, Box<SeqExpr>),
    Sub(Box<SeqExpr>, Box<SeqExpr>),
    Mul(Box<SeqExpr>, Box<SeqExpr>),
    Div(Box<SeqExpr>, Box<SeqExpr>),
    Pow(Box<SeqExpr>, Box<SeqExpr>),
    Factorial(Box<SeqExpr>),
    Call(Builtin, Vec<SeqExpr>),
}

impl SeqExpr {
    pub fn int(n: i64) -> Self {
        SeqExpr::Int(BigInt::from(n))
    }

    /// Deepest prior-term reference, 0 when there is none.
    pub fn max_prev_depth(&self) -> u32 {
        match self {
            SeqExpr::Prev(k) => *k,
            SeqExpr::Int(_) | SeqExpr::Var | SeqExpr::Param(_) | SeqExpr::ProdPrefix(_) => 0,
            SeqExpr::SeqRef(_, e) | SeqExpr::Factorial(e) => e.max_prev_depth(),
            SeqExpr::Add(a, b)
            | SeqExpr::Sub(a, b)
            | SeqExpr::Mul(a, b)
            | SeqExpr::Div(a, b)
            | SeqExpr::Pow(a, b) => a.max_prev_depth().max(b.max_prev_depth()),
            SeqExpr::Call(_, args) => args.iter().map(|a| a.max_prev_depth()).max().unwrap_or(0),
        }
    }

    fn is_atom(&self) -> bool {
        matches!(
            self,
            SeqExpr::Var
                | SeqExpr::Prev(_)
                | SeqExpr::Param(_)
                | SeqExpr::SeqRef(..)
                | SeqExpr::ProdPrefix(_)
                | SeqExpr::Call(..)
        ) || matches!(self, SeqExpr::Int(n) if !n.is_negative())
    }

    fn fmt_atom(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_atom() {
            write!(f, "{self}")
        } else {
            write!(f, "({self})")
        }
    }
}

/// Pretty-printer staying inside the published grammar; printing and
/// re-parsing yields a structurally equal AST.
impl fmt::Display for SeqExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeqExpr::Int(n) => {
                if n.is_negative() {
                    // The grammar has no unary minus; spell -k as (0 - k).
                    write!(f, "(0 - {})", -n)
                } else {
                    write!(f, "{n}")
                }
            }
            SeqExpr::Var => write!(f, "n"),
            SeqExpr::Prev(k) => write!(f, "t(n-{k})"),
            SeqExpr::Param(p) => write!(f, "{p}"),
            SeqExpr::SeqRef(name, ix) => write!(f, "{name}({ix})"),
            SeqExpr::ProdPrefix(name) => write!(f, "prodprefix({name})"),
            SeqExpr::Add(a, b) => write!(f, "({a} + {b})"),
            SeqExpr::Sub(a, b) => write!(f, "({a} - {b})"),
            SeqExpr::Mul(a, b) => write!(f, "({a} * {b})"),
            SeqExpr::Div(a, b) => write!(f, "({a} / {b})"),
            SeqExpr::Pow(a, b) => {
                write!(f, "(")?;
                a.fmt_atom(f)?;
                write!(f, "^")?;
                b.fmt_atom(f)?;
                write!(f, ")")
            }
            SeqExpr::Factorial(a) => {
                write!(f, "(")?;
                a.fmt_atom(f)?;
                write!(f, "!)")
            }
            SeqExpr::Call(b, args) => {
                write!(f, "{}(", b.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}
