//! Certified crossover points for log-versus-power inequalities.

use super::{
    ball_ln, ball_powr, cmp_certified, rat_int, BallCmp, BigRat, ExactError, Precision,
    RatBall,
};
use num_traits::Signed;

/// Certificate that `cln*ln n + c0 < cpow*n^e` holds for every `n >= n0`.
///
/// The certificate has two checkable parts: the inequality itself at `n0`
/// (witnessed by the two enclosures), and derivative domination
/// `e*cpow*n0^e >= cln`, which makes the difference increasing on `[n0, ∞)`
/// so the single-point check propagates to all larger `n`.
#[derive(Debug, Clone)]
pub struct CrossoverCert {
    pub n0: u64,
    pub cln: BigRat,
    pub c0: BigRat,
    pub cpow: BigRat,
    pub exponent: BigRat,
    /// Enclosure of `cln*ln n0 + c0`.
    pub lhs: RatBall,
    /// Enclosure of `cpow*n0^e`.
    pub rhs: RatBall,
    /// Enclosure of `e*cpow*n0^e`, whose lower bound dominates `cln`.
    pub derivative_lhs: RatBall,
}

impl CrossoverCert {
    /// Re-checks the claimed inequality at one index by a fresh computation.
    pub fn holds_at(&self, n: u64, prec: &Precision) -> Result<bool, ExactError> {
        let (lhs, rhs) = crossover_sides(&self.cln, &self.c0, &self.cpow, &self.exponent, n, prec)?;
        Ok(cmp_certified(&lhs, &rhs) == BallCmp::Less)
    }

    /// Re-verifies both certificate parts at `n0` plus the inequality at
    /// `n0 + 1` and `2 n0`.
    pub fn reverify(&self, prec: &Precision) -> Result<bool, ExactError> {
        let at_n0 = self.holds_at(self.n0, prec)?;
        let at_next = self.holds_at(self.n0 + 1, prec)?;
        let at_double = self.holds_at(self.n0 * 2, prec)?;
        let deriv = derivative_dominates(&self.cln, &self.cpow, &self.exponent, self.n0, prec)?;
        Ok(at_n0 && at_next && at_double && deriv)
    }
}

fn crossover_sides(
    cln: &BigRat,
    c0: &BigRat,
    cpow: &BigRat,
    e: &BigRat,
    n: u64,
    prec: &Precision,
) -> Result<(RatBall, RatBall), ExactError> {
    let n_ball = RatBall::point(rat_int(n as i64));
    let ln_n = ball_ln(&n_ball, prec)?;
    let lhs = ln_n.scale(cln).add_rat(c0);
    let rhs = ball_powr(&n_ball, &RatBall::point(e.clone()), prec)?.scale(cpow);
    Ok((lhs, rhs))
}

fn derivative_dominates(
    cln: &BigRat,
    cpow: &BigRat,
    e: &BigRat,
    n: u64,
    prec: &Precision,
) -> Result<bool, ExactError> {
    let n_ball = RatBall::point(rat_int(n as i64));
    let pow = ball_powr(&n_ball, &RatBall::point(e.clone()), prec)?;
    let lhs = pow.scale(cpow).scale(e);
    Ok(lhs.lo() >= cln)
}

/// Finds `n0` with a [`CrossoverCert`] for `cln*ln n + c0 < cpow*n^e`,
/// scanning the doubling ladder `1, 2, 4, ...` up to `prec.max_work()`.
pub fn log_power_crossover(
    cln: &BigRat,
    c0: &BigRat,
    cpow: &BigRat,
    e: &BigRat,
    prec: &Precision,
) -> Result<CrossoverCert, ExactError> {
    if cln.is_negative() {
        return Err(ExactError::Domain("cln must be nonnegative".into()));
    }
    if !cpow.is_positive() {
        return Err(ExactError::Domain("cpow must be positive".into()));
    }
    if !e.is_positive() || *e > rat_int(1) {
        return Err(ExactError::Domain("exponent must lie in (0, 1]".into()));
    }
    let mut n: u64 = 1;
    while n <= prec.max_work() {
        let (lhs, rhs) = crossover_sides(cln, c0, cpow, e, n, prec)?;
        if cmp_certified(&lhs, &rhs) == BallCmp::Less
            && derivative_dominates(cln, cpow, e, n, prec)?
        {
            let n_ball = RatBall::point(rat_int(n as i64));
            let derivative_lhs = ball_powr(&n_ball, &RatBall::point(e.clone()), prec)?
                .scale(cpow)
                .scale(e);
            return Ok(CrossoverCert {
                n0: n,
                cln: cln.clone(),
                c0: c0.clone(),
                cpow: cpow.clone(),
                exponent: e.clone(),
                lhs,
                rhs,
                derivative_lhs,
            });
        }
        n = n.saturating_mul(2);
    }
    Err(ExactError::Inconclusive(format!(
        "no certified crossover below {}",
        prec.max_work()
    )))
}
