//! Exact arithmetic: rationals, polynomials over the torus variables, their
//! fraction field, matrices, elimination and Smith normal form.

mod linalg;
mod matrix;
mod polynomial;
mod ratfunc;
mod rational;
mod snf;

use std::fmt;

pub use linalg::{
    clear_denominators, generic_specialized_rank, kernel_q, rank_and_solve, rank_and_solve_poly, rank_q, rref, solve_q,
    SolveOutcome, SolveReport, SpecializedRank, DEFAULT_SEED,
};
pub use matrix::Matrix;
pub use polynomial::{Monomial, Polynomial};
pub use ratfunc::RationalFunction;
pub use rational::{format_rational, parse_rational, rat, ratio, Rational};
pub use snf::{smith_normal_form, Smith};

/// Commutative ring operations needed by the generic matrix code.
///
/// Method names avoid clashing with the `std::ops` traits, which are also
/// implemented for the concrete types.
pub trait Ring: Clone + PartialEq + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
}

pub trait Field: Ring {
    /// Panics on zero.
    fn inverse(&self) -> Self;

    fn over(&self, other: &Self) -> Self {
        self.times(&other.inverse())
    }
}

impl Ring for Rational {
    fn zero_like(&self) -> Self {
        rat(0)
    }
    fn one_like(&self) -> Self {
        rat(1)
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
}

impl Field for Rational {
    fn inverse(&self) -> Self {
        num_traits::Inv::inv(self)
    }
}
