//! Rigorous enclosures by pairs of exact rationals.

use super::{BigInt, BigRat, ExactError};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// A closed interval `[lo, hi]` of exact rationals enclosing a real value.
///
/// Containment is the contract: whatever operation produced the ball, the
/// exact mathematical result lies between `lo` and `hi` inclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatBall {
    lo: BigRat,
    hi: BigRat,
}

impl RatBall {
    pub fn new(lo: BigRat, hi: BigRat) -> Result<Self, ExactError> {
        if lo > hi {
            return Err(ExactError::Domain(format!(
                "ball endpoints out of order: {} > {}",
                super::rat_str(&lo),
                super::rat_str(&hi)
            )));
        }
        Ok(RatBall { lo, hi })
    }

    pub fn point(x: BigRat) -> Self {
        RatBall { lo: x.clone(), hi: x }
    }

    pub fn from_int(n: i64) -> Self {
        Self::point(super::rat_int(n))
    }

    pub fn lo(&self) -> &BigRat {
        &self.lo
    }

    pub fn hi(&self) -> &BigRat {
        &self.hi
    }

    pub fn width(&self) -> BigRat {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &BigRat) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    /// `other ⊆ self`.
    pub fn encloses(&self, other: &RatBall) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersect(&self, other: &RatBall) -> Option<RatBall> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        (lo <= hi).then_some(RatBall { lo, hi })
    }

    pub fn hull(&self, other: &RatBall) -> RatBall {
        RatBall {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn midpoint(&self) -> BigRat {
        (&self.lo + &self.hi) / super::rat_int(2)
    }

    pub fn add(&self, o: &RatBall) -> RatBall {
        RatBall { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &RatBall) -> RatBall {
        RatBall { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn neg(&self) -> RatBall {
        RatBall { lo: -self.hi.clone(), hi: -self.lo.clone() }
    }

    pub fn add_rat(&self, r: &BigRat) -> RatBall {
        RatBall { lo: &self.lo + r, hi: &self.hi + r }
    }

    /// Multiplication by an exact rational.
    pub fn scale(&self, r: &BigRat) -> RatBall {
        if r.is_negative() {
            RatBall { lo: &self.hi * r, hi: &self.lo * r }
        } else {
            RatBall { lo: &self.lo * r, hi: &self.hi * r }
        }
    }

    pub fn mul(&self, o: &RatBall) -> RatBall {
        let candidates = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = candidates.iter().min().expect("nonempty").clone();
        let hi = candidates.into_iter().max().expect("nonempty");
        RatBall { lo, hi }
    }

    /// Reciprocal; balls containing zero are rejected rather than returning
    /// an unbounded enclosure.
    pub fn recip(&self) -> Result<RatBall, ExactError> {
        if self.lo.is_positive() || self.hi.is_negative() {
            Ok(RatBall { lo: self.hi.recip(), hi: self.lo.recip() })
        } else {
            Err(ExactError::DivisionByZero)
        }
    }

    pub fn div(&self, o: &RatBall) -> Result<RatBall, ExactError> {
        Ok(self.mul(&o.recip()?))
    }

    /// Enclosure of `|x|` over the ball.
    pub fn abs(&self) -> RatBall {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            RatBall {
                lo: BigRat::zero(),
                hi: (-self.lo.clone()).max(self.hi.clone()),
            }
        }
    }

    /// Rounds outward onto the dyadic grid `k / 2^bits`, capping denominator
    /// growth without violating containment.
    pub fn round_outward(&self, bits: u64) -> RatBall {
        RatBall {
            lo: dyadic_floor(&self.lo, bits),
            hi: dyadic_ceil(&self.hi, bits),
        }
    }
}

impl fmt::Display for RatBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", super::rat_str(&self.lo), super::rat_str(&self.hi))
    }
}

pub(crate) fn dyadic_floor(x: &BigRat, bits: u64) -> BigRat {
    let scaled: BigInt = (x.numer() << bits).div_floor(x.denom());
    BigRat::new(scaled, BigInt::one() << bits)
}

pub(crate) fn dyadic_ceil(x: &BigRat, bits: u64) -> BigRat {
    let scaled: BigInt = (x.numer() << bits).div_ceil(x.denom());
    BigRat::new(scaled, BigInt::one() << bits)
}

/// Requested enclosure quality: an absolute width target plus a work cap.
///
/// Tightening `target_width` never moves result bounds outward; when the
/// work cap stops refinement early the ball is simply wider, never wrong.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Precision {
    target_width: BigRat,
    max_work: u64,
}

impl Precision {
    pub fn new(target_width: BigRat, max_work: u64) -> Result<Self, ExactError> {
        if !target_width.is_positive() {
            return Err(ExactError::Domain("precision target must be positive".into()));
        }
        if max_work == 0 {
            return Err(ExactError::Domain("max_work must be positive".into()));
        }
        Ok(Precision { target_width, max_work })
    }

    /// Target width `10^-digits`.
    pub fn decimal(digits: u32) -> Self {
        let den = num_traits::pow(BigInt::from(10), digits as usize);
        Precision {
            target_width: BigRat::new(BigInt::one(), den),
            max_work: 1 << 20,
        }
    }

    pub fn target_width(&self) -> &BigRat {
        &self.target_width
    }

    pub fn max_work(&self) -> u64 {
        self.max_work
    }

    pub fn with_max_work(mut self, max_work: u64) -> Self {
        self.max_work = max_work.max(1);
        self
    }

    /// Dyadic grid fine enough that outward rounding cannot by itself exceed
    /// the width target.
    pub fn bits(&self) -> u64 {
        let t = &self.target_width;
        if *t >= super::rat_int(1) {
            return 32;
        }
        let e = super::floor_log2(t);
        (-e) as u64 + 8
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::decimal(30)
    }
}

/// Outcome of a certified order comparison between two enclosures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallCmp {
    Less,
    Greater,
    Overlap,
}

/// `Less` and `Greater` certify the same strict order of the exact values;
/// `Overlap` decides nothing.
pub fn cmp_certified(x: &RatBall, y: &RatBall) -> BallCmp {
    if x.hi < y.lo {
        BallCmp::Less
    } else if x.lo > y.hi {
        BallCmp::Greater
    } else {
        BallCmp::Overlap
    }
}
