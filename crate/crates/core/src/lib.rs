//! Desk-scale certified checks of irrationality and transcendence criteria
//! for infinite series.
//!
//! The library evaluates, over finite index windows and with exact rational
//! enclosures, the hypotheses and conclusions of three families of criteria:
//!
//! * rationality witnesses for Cantor-type series `Σ bₙ/∏aᵢ` (the
//!   Erdős–Straus criterion), including witness construction, search, and
//!   denominator refutation;
//! * irrationality conditions for rapidly convergent series `Σ bₙ/aₙ`
//!   built on two-stage infinite products (Hančl's criterion);
//! * effective-irrationality exponents of partial-sum approximants measured
//!   against the Roth threshold κ = 2 (Hančl–Rucki transcendence criteria).
//!
//! Everything numeric is an exact rational or a [`exact::RatBall`] — a pair
//! of rationals guaranteed to bracket the real value in question. No verdict
//! is ever derived from floating point. Asymptotic hypotheses ("for all
//! large n") are represented as [`seq::DeclaredFact`]s which are audited on
//! the analysis window and reported as assumed beyond it.

pub mod erdos_straus;
pub mod exact;
pub mod hancl;
pub mod primes;
pub mod roth;
pub mod seq;
pub mod series;
pub mod verdict;

pub use exact::{BigInt, BigRat, Precision, RatBall};
pub use verdict::{Status, Verdict};
