//! Independent naive high-precision oracle used only by the acceptance
//! suite. Deliberately different algorithms from the library: long-division
//! square roots, Mercator logarithm series, reduction-free Taylor
//! exponentials, and exact rational bisection for integer roots. Everything
//! runs in fixed-point decimal and returns a bracket guaranteed to contain
//! the true value, with generous slack swallowing all truncation error.

use irrcrit::exact::{BigInt, BigRat};
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use std::sync::OnceLock;

const DIGITS: u32 = 50;

pub struct Bracket {
    pub lo: BigRat,
    pub hi: BigRat,
}

impl Bracket {
    pub fn intersects_ball(&self, ball: &irrcrit::exact::RatBall) -> bool {
        *ball.lo() <= self.hi && self.lo <= *ball.hi()
    }

    pub fn contains(&self, x: &BigRat) -> bool {
        self.lo <= *x && *x <= self.hi
    }
}

fn pow10(d: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), d as usize)
}

fn slack(mag: &BigRat) -> BigRat {
    // 1e-44 absolute, relative for large magnitudes.
    let base = BigRat::new(BigInt::one(), pow10(44));
    &base * (mag.abs() + BigRat::one())
}

/// Digit-by-digit (long division) square root: `floor(sqrt(n))` in base 10.
fn long_division_isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative());
    if n.is_zero() {
        return BigInt::zero();
    }
    let mut digits = n.to_string();
    if digits.len() % 2 == 1 {
        digits.insert(0, '0');
    }
    let mut remainder = BigInt::zero();
    let mut root = BigInt::zero();
    let twenty = BigInt::from(20);
    for pair in digits.as_bytes().chunks(2) {
        let p = BigInt::from((pair[0] - b'0') as u32 * 10 + (pair[1] - b'0') as u32);
        remainder = remainder * BigInt::from(100) + p;
        // Largest d in 0..=9 with (20*root + d) * d <= remainder.
        let mut d = 9u32;
        loop {
            let candidate = (&twenty * &root + BigInt::from(d)) * BigInt::from(d);
            if candidate <= remainder {
                remainder -= candidate;
                break;
            }
            d -= 1;
        }
        root = root * BigInt::from(10) + BigInt::from(d);
    }
    root
}

pub fn sqrt_bracket(x: &BigRat) -> Bracket {
    assert!(!x.is_negative());
    let scaled = (x * BigRat::from_integer(pow10(2 * DIGITS))).floor().to_integer();
    let root = long_division_isqrt(&scaled);
    let den = pow10(DIGITS);
    Bracket {
        lo: BigRat::new(root.clone(), den.clone()),
        // floor(x*10^2D) <= x*10^2D < floor + 1, and isqrt rounds down once
        // more, so one extra grid step covers the truth.
        hi: BigRat::new(root + 2, den),
    }
}

/// Scaled ln 2 from the Mercator series `Σ 1/(j 2^j)`, truncated upward of
/// 10^-DIGITS and memoized.
fn ln2_scaled() -> &'static BigInt {
    static LN2: OnceLock<BigInt> = OnceLock::new();
    LN2.get_or_init(|| {
        let scale = pow10(DIGITS);
        let mut acc = BigInt::zero();
        let mut pow2 = BigInt::from(2);
        let mut j = 1u32;
        loop {
            let term = (&scale).div_floor(&(&pow2 * BigInt::from(j)));
            if term.is_zero() {
                break acc;
            }
            acc += term;
            pow2 <<= 1;
            j += 1;
        }
    })
}

pub fn ln_bracket(x: &BigRat) -> Bracket {
    assert!(x.is_positive());
    let mut m = x.clone();
    let mut k = 0i64;
    let four_thirds = BigRat::new(4.into(), 3.into());
    let two_thirds = BigRat::new(2.into(), 3.into());
    while m > four_thirds {
        m /= BigRat::from_integer(2.into());
        k += 1;
    }
    while m < two_thirds {
        m *= BigRat::from_integer(2.into());
        k -= 1;
    }
    // Mercator: ln(1+y) = y - y^2/2 + y^3/3 - ..., |y| <= 1/3.
    let scale = pow10(DIGITS);
    let y = &m - BigRat::one();
    let ys = (&y * BigRat::from_integer(scale.clone()))
        .round()
        .to_integer();
    let mut acc = BigInt::zero();
    let mut power = ys.clone();
    let mut j = 1u32;
    loop {
        let term = (&power).div_floor(&BigInt::from(j));
        if j % 2 == 1 {
            acc += &term;
        } else {
            acc -= &term;
        }
        power = (&power * &ys).div_floor(&scale);
        j += 1;
        if power.abs() < BigInt::from(j) || j > 600 {
            break;
        }
    }
    acc += BigInt::from(k) * ln2_scaled();
    let value = BigRat::new(acc, scale);
    let s = slack(&BigRat::from_integer(BigInt::from(k.unsigned_abs())));
    Bracket { lo: &value - &s, hi: value + s }
}

pub fn exp_bracket(x: &BigRat) -> Bracket {
    let mag = x.abs().to_integer().to_u32().unwrap_or(u32::MAX);
    assert!(mag <= 48, "oracle exp limited to |x| <= 48");
    let work = DIGITS + 30;
    let scale = pow10(work);
    let mut term = scale.clone();
    let mut acc = scale.clone();
    let mut k = 1u32;
    loop {
        // term *= x / k, truncated toward zero.
        let next = (&term * x.numer()) / (x.denom() * BigInt::from(k));
        term = next;
        acc += &term;
        k += 1;
        if term.abs() < BigInt::from(k) && k > 3 * mag + 12 {
            break;
        }
        assert!(k < 4000, "oracle exp series failed to converge");
    }
    let value = BigRat::new(acc, scale);
    let s = slack(&value);
    Bracket { lo: &value - &s, hi: value + s }
}

/// Exact rational bisection for x^(1/k), independent of any root primitive.
pub fn root_bracket(x: &BigInt, k: u32) -> Bracket {
    assert!(*x >= BigInt::one() && k >= 1);
    let target = BigRat::from_integer(x.clone());
    let mut lo = BigRat::one();
    let mut hi = BigRat::from_integer(x.clone()).max(BigRat::one());
    for _ in 0..170 {
        let mid = (&lo + &hi) / BigRat::from_integer(2.into());
        if Pow::pow(&mid, k as u64) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Bracket { lo, hi }
}

pub fn powr_bracket(x: &BigRat, y: &BigRat) -> Bracket {
    let l = ln_bracket(x);
    let (plo, phi) = if y.is_negative() {
        (&l.hi * y, &l.lo * y)
    } else {
        (&l.lo * y, &l.hi * y)
    };
    let lo = exp_bracket(&plo).lo;
    let hi = exp_bracket(&phi).hi;
    Bracket { lo, hi }
}

/// Trial-division primality, the cross-oracle for the sieve.
pub fn is_prime_trial(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod self_checks {
    use super::*;
    use irrcrit::exact::{parse_rat, rat, rat_int};

    #[test]
    fn oracle_hits_frozen_constants() {
        let sqrt2 = sqrt_bracket(&rat_int(2));
        assert!(sqrt2.contains(
            &parse_rat("1.4142135623730950488016887242096980785697").unwrap()
        ));
        let ln2 = ln_bracket(&rat_int(2));
        assert!(ln2.contains(
            &parse_rat("0.6931471805599453094172321214581765680755").unwrap()
        ));
        let e = exp_bracket(&rat_int(1));
        assert!(e.contains(
            &parse_rat("2.7182818284590452353602874713526624977572").unwrap()
        ));
        let r = root_bracket(&BigInt::from(2), 2);
        assert!(r.contains(
            &parse_rat("1.4142135623730950488016887242096980785697").unwrap()
        ));
        let p = powr_bracket(&rat_int(2), &rat(4, 3));
        assert!(p.contains(
            &parse_rat("2.5198420997897463295344212145564567011405").unwrap()
        ));
    }

    #[test]
    fn long_division_isqrt_small_values() {
        for n in 0u32..200 {
            let r = long_division_isqrt(&BigInt::from(n));
            let r_u = r.to_u32().unwrap();
            assert!(r_u * r_u <= n && (r_u + 1) * (r_u + 1) > n, "n = {n}");
        }
    }
}
