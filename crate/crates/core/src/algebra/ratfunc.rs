use std::fmt;

use super::{Field, Polynomial, Rational, Ring};

/// Element of the fraction field of ℚ[u1..un].
///
/// Only cheap reductions are applied: the denominator is made content-one
/// with positive leading coefficient, exact polynomial quotients are taken
/// when one side divides the other, and in one variable the univariate gcd
/// is cancelled. Equality is decided by cross-multiplication, so unreduced
/// representations compare correctly.
#[derive(Clone)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        assert_eq!(num.nvars(), den.nvars());
        let mut r = RationalFunction { num, den };
        r.reduce();
        r
    }

    pub fn from_poly(p: Polynomial) -> Self {
        let n = p.nvars();
        RationalFunction { num: p, den: Polynomial::one(n) }
    }

    pub fn from_rational(nvars: usize, c: Rational) -> Self {
        Self::from_poly(Polynomial::constant(nvars, c))
    }

    pub fn zero(nvars: usize) -> Self {
        Self::from_poly(Polynomial::zero(nvars))
    }

    pub fn one(nvars: usize) -> Self {
        Self::from_poly(Polynomial::one(nvars))
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The polynomial this function equals, if it is one.
    pub fn as_polynomial(&self) -> Option<Polynomial> {
        if self.den.is_constant() {
            return Some(self.num.scale(&(Rational::from_integer(1.into()) / self.den.constant_term())));
        }
        self.num.div_exact(&self.den)
    }

    fn reduce(&mut self) {
        let n = self.num.nvars();
        if self.num.is_zero() {
            self.den = Polynomial::one(n);
            return;
        }
        if self.den.is_constant() {
            let c = self.den.constant_term();
            self.num = self.num.scale(&(Rational::from_integer(1.into()) / c));
            self.den = Polynomial::one(n);
            return;
        }
        if n == 1 {
            let g = self.num.gcd(&self.den);
            if !g.is_one() {
                self.num = self.num.div_rem(&g).0;
                self.den = self.den.div_rem(&g).0;
            }
        } else if let Some(q) = self.num.div_exact(&self.den) {
            self.num = q;
            self.den = Polynomial::one(n);
            return;
        } else if let Some(q) = self.den.div_exact(&self.num) {
            self.num = Polynomial::one(n);
            self.den = q;
        }
        let (c, den) = self.den.normalized();
        self.den = den;
        self.num = self.num.scale(&(Rational::from_integer(1.into()) / c));
    }

    pub fn evaluate(&self, point: &[Rational]) -> Option<Rational> {
        let d = self.den.evaluate(point);
        if num_traits::Zero::is_zero(&d) {
            None
        } else {
            Some(self.num.evaluate(point) / d)
        }
    }

    /// Linear substitution of the variables; `None` when the denominator
    /// vanishes identically after substitution.
    pub fn substitute_linear(&self, a: &[Vec<i64>], r: usize) -> Option<Self> {
        let den = self.den.substitute_linear(a, r);
        if den.is_zero() {
            return None;
        }
        Some(Self::new(self.num.substitute_linear(a, r), den))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.num.scale(c), self.den.clone())
    }
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Eq for RationalFunction {}

impl serde::Serialize for RationalFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            let wrap = |p: &Polynomial| {
                if p.num_terms() > 1 {
                    format!("({p})")
                } else {
                    p.to_string()
                }
            };
            write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction({self})")
    }
}

impl Ring for RationalFunction {
    fn zero_like(&self) -> Self {
        Self::zero(self.nvars())
    }
    fn one_like(&self) -> Self {
        Self::one(self.nvars())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn plus(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        if self.den == other.den {
            return Self::new(&self.num + &other.num, self.den.clone());
        }
        Self::new(&(&self.num * &other.den) + &(&other.num * &self.den), &self.den * &other.den)
    }
    fn minus(&self, other: &Self) -> Self {
        self.plus(&other.negated())
    }
    fn times(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return self.zero_like();
        }
        Self::new(&self.num * &other.num, &self.den * &other.den)
    }
    fn negated(&self) -> Self {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

impl Field for RationalFunction {
    fn inverse(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero rational function");
        Self::new(self.den.clone(), self.num.clone())
    }
}
