//! Recursive-descent parser for the sequence grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := atom ('^' atom)? ('!')?
//! atom   := INT | 'n' | 't' '(' 'n' '-' INT ')' | ident '(' args ')'
//!         | ident | '(' expr ')'
//! ```
//!
//! Builtins: `nth_prime`, `floor_div`, `ceil`, `round`, `prodprefix`.
//! Whitespace insensitive; integers are decimal. A bare identifier is a
//! named constant bound at evaluation time; `ident(expr)` indexes another
//! sequence.

use super::ast::{Builtin, SeqExpr};
use super::system::{SeqKind, SequenceDef};
use crate::exact::BigInt;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&ch) = chars.peek() {
        let (tline, tcol) = (line, col);
        let bump = |c: char, line: &mut usize, col: &mut usize| {
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        };
        if ch.is_whitespace() {
            chars.next();
            bump(ch, &mut line, &mut col);
            continue;
        }
        if ch.is_ascii_digit() {
            let mut digits = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_digit() {
                    digits.push(c);
                    chars.next();
                    bump(c, &mut line, &mut col);
                } else {
                    break;
                }
            }
            let n: BigInt = digits.parse().expect("decimal digits");
            out.push(Spanned { tok: Tok::Int(n), line: tline, col: tcol });
            continue;
        }
        if ch.is_ascii_alphabetic() || ch == '_' {
            let mut ident = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    ident.push(c);
                    chars.next();
                    bump(c, &mut line, &mut col);
                } else {
                    break;
                }
            }
            out.push(Spanned { tok: Tok::Ident(ident), line: tline, col: tcol });
            continue;
        }
        if "+-*/^!(),".contains(ch) {
            chars.next();
            bump(ch, &mut line, &mut col);
            out.push(Spanned { tok: Tok::Sym(ch), line: tline, col: tcol });
            continue;
        }
        return Err(ParseError {
            line: tline,
            col: tcol,
            message: format!("unexpected character {ch:?}"),
        });
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end_line: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|s| (s.line, s.col))
            .unwrap_or((self.end_line, self.end_col))
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError { line, col, message: message.into() }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat_sym(&mut self, c: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Sym(s)) if *s == c => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(format!("expected {c:?}"))),
        }
    }

    fn expr(&mut self) -> Result<SeqExpr, ParseError> {
        let mut acc = self.term()?;
        while let Some(Tok::Sym(op @ ('+' | '-'))) = self.peek() {
            let op = *op;
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' {
                SeqExpr::Add(acc.into(), rhs.into())
            } else {
                SeqExpr::Sub(acc.into(), rhs.into())
            };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<SeqExpr, ParseError> {
        let mut acc = self.factor()?;
        while let Some(Tok::Sym(op @ ('*' | '/'))) = self.peek() {
            let op = *op;
            self.pos += 1;
            let rhs = self.factor()?;
            acc = if op == '*' {
                SeqExpr::Mul(acc.into(), rhs.into())
            } else {
                SeqExpr::Div(acc.into(), rhs.into())
            };
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<SeqExpr, ParseError> {
        let mut acc = self.atom()?;
        if let Some(Tok::Sym('^')) = self.peek() {
            self.pos += 1;
            let exp = self.atom()?;
            acc = SeqExpr::Pow(acc.into(), exp.into());
        }
        if let Some(Tok::Sym('!')) = self.peek() {
            self.pos += 1;
            acc = SeqExpr::Factorial(acc.into());
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<SeqExpr, ParseError> {
        let err_loc = self.here();
        match self.next() {
            Some(Tok::Int(n)) => Ok(SeqExpr::Int(n)),
            Some(Tok::Sym('(')) => {
                let e = self.expr()?;
                self.eat_sym(')')?;
                Ok(e)
            }
            Some(Tok::Ident(id)) => self.ident_atom(id, err_loc),
            Some(other) => Err(ParseError {
                line: err_loc.0,
                col: err_loc.1,
                message: format!("expected an atom, found {other:?}"),
            }),
            None => Err(ParseError {
                line: err_loc.0,
                col: err_loc.1,
                message: "unexpected end of input".into(),
            }),
        }
    }

    fn ident_atom(&mut self, id: String, loc: (usize, usize)) -> Result<SeqExpr, ParseError> {
        let has_call = matches!(self.peek(), Some(Tok::Sym('(')));
        match id.as_str() {
            "n" if !has_call => return Ok(SeqExpr::Var),
            "n" => {
                return Err(ParseError {
                    line: loc.0,
                    col: loc.1,
                    message: "'n' is the index variable, not a sequence".into(),
                })
            }
            "t" => return self.prev_ref(loc),
            "prodprefix" => {
                self.eat_sym('(')?;
                let name = match self.next() {
                    Some(Tok::Ident(name)) => name,
                    _ => return Err(self.error("prodprefix takes a sequence name")),
                };
                self.eat_sym(')')?;
                return Ok(SeqExpr::ProdPrefix(name));
            }
            _ => {}
        }
        if !has_call {
            return Ok(SeqExpr::Param(id));
        }
        self.eat_sym('(')?;
        let mut args = vec![self.expr()?];
        while let Some(Tok::Sym(',')) = self.peek() {
            self.pos += 1;
            args.push(self.expr()?);
        }
        self.eat_sym(')')?;
        if let Some(b) = Builtin::from_name(&id) {
            if args.len() != b.arity() {
                return Err(ParseError {
                    line: loc.0,
                    col: loc.1,
                    message: format!(
                        "{} takes {} argument(s), got {}",
                        b.name(),
                        b.arity(),
                        args.len()
                    ),
                });
            }
            return Ok(SeqExpr::Call(b, args));
        }
        if args.len() != 1 {
            return Err(ParseError {
                line: loc.0,
                col: loc.1,
                message: format!("sequence reference {id} takes exactly one index"),
            });
        }
        Ok(SeqExpr::SeqRef(id, args.pop().expect("one arg").into()))
    }

    fn prev_ref(&mut self, loc: (usize, usize)) -> Result<SeqExpr, ParseError> {
        let mangled = |p: &Parser| ParseError {
            line: loc.0,
            col: loc.1,
            message: format!(
                "prior-term reference must be written t(n-K){}",
                if p.peek().is_none() { " (input ended)" } else { "" }
            ),
        };
        self.eat_sym('(').map_err(|_| mangled(self))?;
        match self.next() {
            Some(Tok::Ident(v)) if v == "n" => {}
            _ => return Err(mangled(self)),
        }
        self.eat_sym('-').map_err(|_| mangled(self))?;
        let k = match self.next() {
            Some(Tok::Int(n)) => n,
            _ => return Err(mangled(self)),
        };
        self.eat_sym(')').map_err(|_| mangled(self))?;
        let k: u32 = k.try_into().map_err(|_| mangled(self))?;
        if !(1..=8).contains(&k) {
            return Err(ParseError {
                line: loc.0,
                col: loc.1,
                message: format!("prior-term depth {k} outside 1..=8"),
            });
        }
        Ok(SeqExpr::Prev(k))
    }
}

/// Parses a single expression in the published grammar.
pub fn parse_expr(text: &str) -> Result<SeqExpr, ParseError> {
    let toks = tokenize(text)?;
    let lines = text.lines().count().max(1);
    let last_len = text.lines().last().map(|l| l.len()).unwrap_or(0);
    let mut p = Parser { toks, pos: 0, end_line: lines, end_col: last_len + 1 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.error("trailing input after expression"));
    }
    Ok(e)
}

/// Parses sequence text and infers its kind: `nth_prime(n)` is the prime
/// sequence, anything referencing prior terms is a recurrence step (attach
/// base terms with [`SequenceDef::with_base`]), the rest are closed forms.
pub fn parse_sequence(text: &str) -> Result<SequenceDef, ParseError> {
    let expr = parse_expr(text)?;
    let kind = if expr == SeqExpr::Call(Builtin::NthPrime, vec![SeqExpr::Var]) {
        SeqKind::Primes
    } else if expr.max_prev_depth() > 0 {
        SeqKind::Recurrence { base: Vec::new(), step: expr }
    } else {
        SeqKind::ClosedForm(expr)
    };
    Ok(SequenceDef::new("seq", kind))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_int;
    use crate::primes::PrimeCache;
    use std::sync::Arc;

    #[test]
    fn nested_power_parses_and_evaluates() {
        let def = parse_sequence("2^(2^n)").unwrap();
        assert!(matches!(def.kind, SeqKind::ClosedForm(_)));
        let mut sys = SeqSystem::new(Arc::new(PrimeCache::new()));
        sys.insert(def.named("a")).unwrap();
        assert_eq!(sys.eval_int("a", 3).unwrap(), BigInt::from(256));
    }

    #[test]
    fn recurrence_kind_inferred() {
        let def = parse_sequence("t(n-1)*a(n-1) - B*b(n-1)").unwrap();
        assert!(matches!(def.kind, SeqKind::Recurrence { .. }));
    }

    #[test]
    fn primes_kind_inferred() {
        let def = parse_sequence("nth_prime(n)").unwrap();
        assert!(matches!(def.kind, SeqKind::Primes));
        let mut sys = SeqSystem::new(Arc::new(PrimeCache::new()));
        sys.insert(def.named("p")).unwrap();
        assert_eq!(sys.eval_int("p", 1).unwrap(), BigInt::from(2));
    }

    #[test]
    fn pretty_print_roundtrips() {
        for text in [
            "2^(2^n)",
            "t(n-1)*a(n-1) - B*b(n-1)",
            "nth_prime(n)",
            "(n+1)!",
            "floor_div(n^2, 3) + ceil(n / 2) - round(1 / n)",
            "prodprefix(a)^3 * n",
            "1 + 4 * (2/3)^n",
        ] {
            let ast = parse_expr(text).unwrap();
            let printed = ast.to_string();
            let reparsed = parse_expr(&printed).unwrap();
            assert_eq!(ast, reparsed, "{text} -> {printed}");
        }
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_expr("2 +\n* 3").unwrap_err();
        assert_eq!((err.line, err.col), (2, 1));
        let err = parse_expr("nth_prime(n, 2)").unwrap_err();
        assert!(err.message.contains("argument"));
        let err = parse_expr("t(n-9)").unwrap_err();
        assert!(err.message.contains("outside"));
        let err = parse_expr("2 @ 3").unwrap_err();
        assert!(err.message.contains("unexpected character"));
    }

    use super::super::system::SeqSystem;
    use crate::exact::BigInt;

    #[test]
    fn whitespace_insensitive() {
        let a = parse_expr("2^(2^n)").unwrap();
        let b = parse_expr("  2 ^ ( 2 ^ n )  ").unwrap();
        assert_eq!(a, b);
        let _ = rat_int(0);
    }
}
