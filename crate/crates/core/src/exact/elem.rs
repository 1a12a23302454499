//! Enclosures of sqrt, ln, exp, integer roots, and real powers.
//!
//! Internally everything runs on scaled integers `m / 2^B` with directed
//! rounding: lower bounds round down at every step, upper bounds round up,
//! and truncated series carry an explicit tail bound. Public operations
//! refine along a deterministic work ladder (64, 128, 256, ... bits),
//! intersecting successive enclosures, so a tighter `Precision` always
//! yields a ball nested inside the looser one.

use super::{floor_log2, pow2, rat_int, BigInt, BigRat, ExactError, Precision, RatBall};
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};

const LADDER_START: u64 = 64;
const SERIES_GUARD: u64 = 1 << 20;

fn shr_floor(x: BigInt, k: u64) -> BigInt {
    // BigInt shift-right rounds toward negative infinity.
    x >> k
}

fn shr_ceil(x: BigInt, k: u64) -> BigInt {
    -((-x) >> k)
}

/// `floor(x * 2^b)` as an integer.
fn scaled_floor(x: &BigRat, b: u64) -> BigInt {
    (x.numer() << b).div_floor(x.denom())
}

/// `ceil(x * 2^b)` as an integer.
fn scaled_ceil(x: &BigRat, b: u64) -> BigInt {
    (x.numer() << b).div_ceil(x.denom())
}

/// Runs `f` along the doubling work ladder, intersecting enclosures, until
/// the width target is met, the width stops improving (wide inputs bound the
/// achievable width from below), or the work cap is reached.
fn refine<F>(prec: &Precision, seed: Option<RatBall>, f: F) -> Result<RatBall, ExactError>
where
    F: Fn(u64) -> Result<RatBall, ExactError>,
{
    let cap = prec.max_work().max(LADDER_START);
    let mut acc = seed;
    let mut prev_width: Option<BigRat> = None;
    let mut work = LADDER_START;
    loop {
        let e = f(work)?;
        let next = match &acc {
            None => e,
            Some(prev) => prev
                .intersect(&e)
                .expect("enclosures of the same exact value must intersect"),
        };
        let width = next.width();
        let improving = prev_width
            .as_ref()
            .map_or(true, |p| &width * super::rat(16, 15) <= *p);
        let done = width <= *prec.target_width() || work >= cap || !improving;
        prev_width = Some(width);
        acc = Some(next);
        if done {
            break;
        }
        work = work.saturating_mul(2);
    }
    Ok(acc.expect("ladder ran at least once").round_outward(prec.bits()))
}

/// Lower dyadic bound of `sqrt(r)` with `2^-m` resolution; `r >= 0`.
fn sqrt_lower(r: &BigRat, m: u64) -> BigRat {
    if !r.is_positive() {
        return BigRat::zero();
    }
    // sqrt(p/q) = sqrt(p*q)/q, so isqrt(p*q*4^m) / (q*2^m) rounds down.
    let n = r.numer() * r.denom();
    let scaled = (n << (2 * m)).sqrt();
    BigRat::new(scaled, r.denom() << m)
}

fn sqrt_upper(r: &BigRat, m: u64) -> BigRat {
    if !r.is_positive() {
        return BigRat::zero();
    }
    let n = r.numer() * r.denom();
    let scaled = (n << (2 * m)).sqrt() + 1;
    BigRat::new(scaled, r.denom() << m)
}

fn is_perfect_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let s = n.sqrt();
    (&s * &s == *n).then_some(s)
}

/// Enclosure of the square root of everything in `x`; `x.lo >= 0` required.
pub fn ball_sqrt(x: &RatBall, prec: &Precision) -> Result<RatBall, ExactError> {
    if x.lo().is_negative() {
        return Err(ExactError::Domain("sqrt of a negative ball".into()));
    }
    if x.is_point() {
        if x.lo().is_zero() {
            return Ok(RatBall::point(BigRat::zero()));
        }
        if let (Some(sn), Some(sd)) =
            (is_perfect_square(x.lo().numer()), is_perfect_square(x.lo().denom()))
        {
            return Ok(RatBall::point(BigRat::new(sn, sd)));
        }
    }
    let m = prec.bits() + 2;
    let ball = RatBall::new(sqrt_lower(x.lo(), m), sqrt_upper(x.hi(), m))
        .expect("sqrt bounds ordered");
    Ok(ball.round_outward(prec.bits()))
}

/// Scaled-integer bounds of `atanh(w) = sum w^(2k+1)/(2k+1)` for dyadic
/// `0 <= wl <= wh < 2^B / 2`.
fn atanh_scaled(wl: &BigInt, wh: &BigInt, b: u64) -> (BigInt, BigInt) {
    debug_assert!(!wl.is_negative() && wl <= wh);
    debug_assert!((wh << 1u8) < (BigInt::one() << b));
    let w2l = shr_floor(wl * wl, b);
    let w2h = shr_ceil(wh * wh, b);
    let mut pl = wl.clone();
    let mut ph = wh.clone();
    let mut sum_lo = BigInt::zero();
    let mut sum_hi = BigInt::zero();
    let mut k: u64 = 0;
    loop {
        sum_lo += pl.div_floor(&BigInt::from(2 * k + 1));
        sum_hi += ph.div_ceil(&BigInt::from(2 * k + 1));
        pl = shr_floor(&pl * &w2l, b);
        ph = shr_ceil(&ph * &w2h, b);
        k += 1;
        // w^2 <= 1/4 makes the remaining tail at most 4/3 of the next term.
        if ph < BigInt::from(2 * k + 1) || k > SERIES_GUARD {
            sum_hi += BigInt::from(2);
            break;
        }
    }
    (sum_lo, sum_hi)
}

/// Cached scaled-integer enclosure of ln 2 = 2 atanh(1/3) at scale `2^-b`.
fn ln2_scaled(b: u64) -> (BigInt, BigInt) {
    static CACHE: OnceLock<Mutex<BTreeMap<u64, (BigInt, BigInt)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&b) {
        return v.clone();
    }
    let third_lo = (BigInt::one() << b).div_floor(&BigInt::from(3));
    let third_hi = (BigInt::one() << b).div_ceil(&BigInt::from(3));
    let (al, ah) = atanh_scaled(&third_lo, &third_hi, b);
    let v = (al << 1u8, ah << 1u8);
    cache.lock().unwrap().insert(b, v.clone());
    v
}

/// Enclosure of `ln x` for a single rational `x > 0`.
pub(crate) fn ln_enclosure(x: &BigRat, work: u64) -> Result<(BigRat, BigRat), ExactError> {
    debug_assert!(x.is_positive());
    if x.is_one() {
        return Ok((BigRat::zero(), BigRat::zero()));
    }
    // Normalize x = m * 2^e with m in [2/3, 4/3], so |(m-1)/(m+1)| <= 1/5.
    let mut e = floor_log2(x);
    let mut m = x / pow2(e);
    if m > BigRat::new(BigInt::from(4), BigInt::from(3)) {
        m /= rat_int(2);
        e += 1;
    }
    let e_bits = 64 - e.unsigned_abs().leading_zeros() as u64;
    let b = work + e_bits + 64;
    let z = (&m - BigRat::one()) / (&m + BigRat::one());
    let (mut lo, mut hi) = if z.is_zero() {
        (BigInt::zero(), BigInt::zero())
    } else {
        let za = z.abs();
        let (al, ah) = atanh_scaled(&scaled_floor(&za, b), &scaled_ceil(&za, b), b);
        if z.is_positive() {
            (al << 1u8, ah << 1u8)
        } else {
            (-(ah << 1u8), -(al << 1u8))
        }
    };
    if e != 0 {
        let (l2l, l2h) = ln2_scaled(b);
        let e_big = BigInt::from(e);
        if e > 0 {
            lo += &e_big * l2l;
            hi += &e_big * l2h;
        } else {
            lo += &e_big * l2h;
            hi += &e_big * l2l;
        }
    }
    let den = BigInt::one() << b;
    Ok((BigRat::new(lo, den.clone()), BigRat::new(hi, den)))
}

/// Enclosure of `e^x` for a single rational `x`.
pub(crate) fn exp_enclosure(x: &BigRat, work: u64) -> Result<(BigRat, BigRat), ExactError> {
    if x.is_zero() {
        return Ok((BigRat::one(), BigRat::one()));
    }
    if x.is_negative() {
        let (lo, hi) = exp_enclosure(&-x.clone(), work)?;
        return Ok((hi.recip(), lo.recip()));
    }
    // Magnitude bound: e^x needs about 3x/2 bits; refuse absurd arguments.
    let mag_bits = (x.numer() * BigInt::from(3)).div_ceil(&(x.denom() << 1u8));
    let mag_bits = mag_bits
        .to_u64()
        .filter(|&m| m <= SERIES_GUARD)
        .ok_or_else(|| ExactError::Domain("exp argument too large to enclose".into()))?;
    // Reduce to s = x / 2^j <= 1/2, then square j times.
    let log = floor_log2(x);
    let j = (log + 2).max(0) as u64;
    let s = x / pow2(j as i64);
    let b = work + j + mag_bits + 64;
    let sl = scaled_floor(&s, b);
    let sh = scaled_ceil(&s, b);
    let mut tl = BigInt::one() << b;
    let mut th = BigInt::one() << b;
    let mut sum_lo = BigInt::zero();
    let mut sum_hi = BigInt::zero();
    let mut k: u64 = 0;
    loop {
        sum_lo += &tl;
        sum_hi += &th;
        k += 1;
        tl = shr_floor(&tl * &sl, b).div_floor(&BigInt::from(k));
        th = shr_ceil(&th * &sh, b).div_ceil(&BigInt::from(k));
        // s <= 1/2 bounds the remaining tail by twice the next term.
        if th <= BigInt::one() || k > SERIES_GUARD {
            sum_hi += (&th << 1u8) + 1;
            break;
        }
    }
    let mut vl = sum_lo;
    let mut vh = sum_hi;
    for _ in 0..j {
        vl = shr_floor(&vl * &vl, b);
        vh = shr_ceil(&vh * &vh, b);
    }
    let den = BigInt::one() << b;
    Ok((BigRat::new(vl, den.clone()), BigRat::new(vh, den)))
}

/// Enclosure of the natural logarithm over the ball; `x.lo > 0` required.
pub fn ball_ln(x: &RatBall, prec: &Precision) -> Result<RatBall, ExactError> {
    if !x.lo().is_positive() {
        return Err(ExactError::Domain("ln of a nonpositive ball".into()));
    }
    refine(prec, None, |work| {
        let (lo, _) = ln_enclosure(x.lo(), work)?;
        let (_, hi) = ln_enclosure(x.hi(), work)?;
        RatBall::new(lo, hi)
    })
}

/// Enclosure of the exponential over the ball.
pub fn ball_exp(x: &RatBall, prec: &Precision) -> Result<RatBall, ExactError> {
    refine(prec, None, |work| {
        let (lo, _) = exp_enclosure(x.lo(), work)?;
        let (_, hi) = exp_enclosure(x.hi(), work)?;
        RatBall::new(lo, hi)
    })
}

/// Enclosure of `x^(1/k)` for an integer `x >= 1`; exact on perfect powers.
pub fn ball_root(x: &BigInt, k: u64, prec: &Precision) -> Result<RatBall, ExactError> {
    if x < &BigInt::one() {
        return Err(ExactError::Domain("root argument must be at least one".into()));
    }
    if k == 0 {
        return Err(ExactError::Domain("zeroth root".into()));
    }
    if k == 1 || x.is_one() {
        return Ok(RatBall::point(BigRat::from_integer(x.clone())));
    }
    let k32 = u32::try_from(k)
        .map_err(|_| ExactError::Domain("root index exceeds u32".into()))?;
    let r = x.nth_root(k32);
    if Pow::pow(&r, k) == *x {
        return Ok(RatBall::point(BigRat::from_integer(r)));
    }
    let bracket = RatBall::new(
        BigRat::from_integer(r.clone()),
        BigRat::from_integer(r + 1),
    )
    .expect("bracket ordered");
    let xr = BigRat::from_integer(x.clone());
    let kr = rat_int(k as i64);
    refine(prec, Some(bracket), |work| {
        let (ll, lh) = ln_enclosure(&xr, work)?;
        let (lo, _) = exp_enclosure(&(ll / &kr), work)?;
        let (_, hi) = exp_enclosure(&(lh / &kr), work)?;
        RatBall::new(lo, hi)
    })
}

/// Directed bounds of the v-th root of a positive rational:
/// `(p/q)^(1/v) = (p q^(v-1))^(1/v) / q`, with the integer root scaled onto
/// the grid `2^-m`. Exact on perfect powers.
fn rat_root_bounds(z: &BigRat, v: u32, m: u64) -> (BigRat, BigRat) {
    debug_assert!(z.is_positive());
    let (rp, rq) = (z.numer().nth_root(v), z.denom().nth_root(v));
    if Pow::pow(&rp, v) == *z.numer() && Pow::pow(&rq, v) == *z.denom() {
        let exact = BigRat::new(rp, rq);
        return (exact.clone(), exact);
    }
    let n = z.numer() * Pow::pow(z.denom(), v - 1);
    let scaled = (n << (v as u64 * m)).nth_root(v);
    let den = z.denom() << m;
    (
        BigRat::new(scaled.clone(), den.clone()),
        BigRat::new(scaled + 1, den),
    )
}

/// Bit budget below which the exact-power-plus-integer-root route is
/// preferred over exp/ln series for rational exponents.
const POW_FAST_PATH_BITS: u64 = 1 << 24;

fn powr_rational_exponent(
    x: &RatBall,
    u: i64,
    v: u32,
    prec: &Precision,
) -> Option<RatBall> {
    let m = prec.bits() + 2;
    let budget = |r: &BigRat| {
        let bits = r.numer().bits().max(r.denom().bits());
        bits.saturating_mul(u.unsigned_abs().max(1))
            .saturating_mul(v as u64)
            <= POW_FAST_PATH_BITS
    };
    if !budget(x.lo()) || !budget(x.hi()) {
        return None;
    }
    let side = |r: &BigRat| super::rat_pow(r, u.unsigned_abs());
    // Positive base: t^(u/v) is monotone in t, increasing iff u >= 0.
    let (zlo, zhi) = if u >= 0 {
        (side(x.lo()), side(x.hi()))
    } else {
        (side(x.hi()).recip(), side(x.lo()).recip())
    };
    let (lo, _) = rat_root_bounds(&zlo, v, m);
    let (_, hi) = rat_root_bounds(&zhi, v, m);
    let ball = RatBall::new(lo, hi).expect("monotone bounds ordered");
    Some(if ball.is_point() { ball } else { ball.round_outward(prec.bits()) })
}

/// Enclosure of `x^y = exp(y ln x)` over both balls; `x.lo > 0` required.
pub fn ball_powr(x: &RatBall, y: &RatBall, prec: &Precision) -> Result<RatBall, ExactError> {
    if !x.lo().is_positive() {
        return Err(ExactError::Domain("powr of a nonpositive base".into()));
    }
    // Exact path for smallish point integer exponents.
    if y.is_point() && y.lo().is_integer() {
        if let Some(n) = y.lo().numer().to_i64() {
            if n.unsigned_abs() <= 4096 {
                let p = RatBall::new(
                    super::rat_pow(x.lo(), n.unsigned_abs()),
                    super::rat_pow(x.hi(), n.unsigned_abs()),
                )
                .expect("monotone on positive base");
                return if n >= 0 { Ok(p) } else { p.recip() };
            }
        }
    }
    // Integer-root path for point rational exponents u/v: exact powers and
    // scaled nth roots stay cheap even when exp/ln magnitudes explode.
    if y.is_point() {
        let (u, v) = (y.lo().numer(), y.lo().denom());
        if let (Some(u), Some(v)) = (u.to_i64(), v.to_u32()) {
            if u.unsigned_abs() <= 64 && v as u64 <= 64 {
                if let Some(ball) = powr_rational_exponent(x, u, v, prec) {
                    return Ok(ball);
                }
            }
        }
    }
    refine(prec, None, |work| {
        let (lll, _) = ln_enclosure(x.lo(), work)?;
        let (_, lhh) = ln_enclosure(x.hi(), work)?;
        let ln_ball = RatBall::new(lll, lhh)?;
        let prod = ln_ball.mul(y);
        let (lo, _) = exp_enclosure(prod.lo(), work)?;
        let (_, hi) = exp_enclosure(prod.hi(), work)?;
        RatBall::new(lo, hi)
    })
}
