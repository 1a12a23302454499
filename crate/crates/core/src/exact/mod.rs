//! Exact arbitrary-precision arithmetic and directed-rounding enclosures.
//!
//! The only notion of "certified" in this crate is containment: every
//! operation on [`RatBall`] returns a pair of exact rationals guaranteed to
//! bracket the exact mathematical result. Elementary functions are computed
//! from argument reduction plus series with explicit remainder bounds, all
//! in integer arithmetic with directed rounding, so the containment
//! obligation never rests on floating point.

mod ball;
mod crossover;
mod elem;

pub use ball::{cmp_certified, BallCmp, Precision, RatBall};
pub use crossover::{log_power_crossover, CrossoverCert};
pub use elem::{ball_exp, ball_ln, ball_powr, ball_root, ball_sqrt};

pub type BigInt = num_bigint::BigInt;
pub type BigRat = num_rational::BigRational;

use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("division by a ball containing zero")]
    DivisionByZero,
    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

/// Shorthand for an integer-valued rational.
pub fn rat_int(n: i64) -> BigRat {
    BigRat::from_integer(BigInt::from(n))
}

/// Shorthand for `n/d` with `d != 0`.
pub fn rat(n: i64, d: i64) -> BigRat {
    BigRat::new(BigInt::from(n), BigInt::from(d))
}

/// Exact integer power of a rational.
pub fn rat_pow(base: &BigRat, mut k: u64) -> BigRat {
    let mut acc = BigRat::one();
    let mut sq = base.clone();
    while k > 0 {
        if k & 1 == 1 {
            acc *= &sq;
        }
        k >>= 1;
        if k > 0 {
            sq = &sq * &sq;
        }
    }
    acc
}

/// Renders a rational as `"p"` or `"p/q"`, always in lowest terms.
pub fn rat_str(r: &BigRat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p"`, `"p/q"`, plain decimals (`"1.5"`), and scientific decimals
/// (`"1e-30"`, `"2.5e3"`) into an exact rational.
pub fn parse_rat(s: &str) -> Option<BigRat> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let num: BigInt = n.trim().parse().ok()?;
        let den: BigInt = d.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(BigRat::new(num, den));
    }
    let (mantissa, exp10) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if frac_part.contains(['+', '-']) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || digits == "-" || digits == "+" {
        return None;
    }
    let num: BigInt = digits.parse().ok()?;
    let shift = exp10 - frac_part.len() as i64;
    let ten = BigInt::from(10);
    Some(if shift >= 0 {
        BigRat::from_integer(num * num_traits::pow(ten, shift as usize))
    } else {
        BigRat::new(num, num_traits::pow(ten, (-shift) as usize))
    })
}

/// Largest `e` with `2^e <= x`; requires `x > 0`.
pub fn floor_log2(x: &BigRat) -> i64 {
    assert!(x.is_positive(), "floor_log2 requires a positive argument");
    let mut e = x.numer().bits() as i64 - x.denom().bits() as i64;
    while pow2(e) > *x {
        e -= 1;
    }
    while pow2(e + 1) <= *x {
        e += 1;
    }
    e
}

/// `2^e` as an exact rational, for any sign of `e`.
pub fn pow2(e: i64) -> BigRat {
    if e >= 0 {
        BigRat::from_integer(BigInt::one() << e as u64)
    } else {
        BigRat::new(BigInt::one(), BigInt::one() << (-e) as u64)
    }
}
