use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{rat, Rational};
use crate::error::{Error, Result};

/// Exponent vector, one entry per torus variable.
pub type Monomial = Vec<u32>;

/// Sparse polynomial over ℚ in the torus variables `u1..un`.
///
/// Terms are keyed by exponent vector; the map never stores a zero
/// coefficient. The key order is lexicographic with `u1` most significant, so
/// the last entry is the lex-leading term. A variable has cohomological
/// degree 2.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, rat(1))
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    /// The variable `u_{i+1}` (zero-based index).
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range for {nvars} variables");
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, e, rat(1))
    }

    pub fn monomial(nvars: usize, exponents: Monomial, c: Rational) -> Self {
        assert_eq!(exponents.len(), nvars);
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(exponents, c);
        }
        p
    }

    /// Linear form `Σ coeffs[i]·u_{i+1}`.
    pub fn linear(coeffs: &[i64]) -> Self {
        let n = coeffs.len();
        coeffs.iter().enumerate().fold(Self::zero(n), |acc, (i, &a)| acc + Self::var(n, i).scale(&rat(a)))
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// `self + a·b`, reducing each coefficient once.
    pub fn add_product(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        assert!(self.nvars == a.nvars && a.nvars == b.nvars, "polynomials in different rings");
        let (ns, ds) = self.integer_form();
        let (na, da) = a.integer_form();
        let (nb, db) = b.integer_form();
        let dab = da * db;
        let den = ds.lcm(&dab);
        let (fs, fab) = (&den / &ds, &den / &dab);
        let mut acc: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (m, c) in ns {
            acc.insert(m.clone(), c * &fs);
        }
        for (ma, ca) in &na {
            let ca = ca * &fab;
            for (mb, cb) in &nb {
                let m: Monomial = ma.iter().zip(mb.iter()).map(|(x, y)| x + y).collect();
                *acc.entry(m).or_default() += &ca * cb;
            }
        }
        let terms =
            acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(m, c)| (m, Rational::new(c, den.clone()))).collect();
        Polynomial { nvars: self.nvars, terms }
    }

    /// Integer numerators over the least common denominator.
    fn integer_form(&self) -> (Vec<(&Monomial, BigInt)>, BigInt) {
        let den = self.terms.values().fold(BigInt::one(), |d, c| if c.denom().is_one() { d } else { d.lcm(c.denom()) });
        let nums = self.terms.iter().map(|(m, c)| (m, c.numer() * (&den / c.denom()))).collect();
        (nums, den)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        debug_assert_eq!(m.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(|&e| e == 0))
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.constant_term().is_one()
    }

    pub fn constant_term(&self) -> Rational {
        self.terms.get(&vec![0; self.nvars]).cloned().unwrap_or_else(|| rat(0))
    }

    pub fn coefficient(&self, m: &[u32]) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(|| rat(0))
    }

    /// Largest total degree of a term; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().sum()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Lex-leading term. Panics on zero.
    pub fn leading_term(&self) -> (&Monomial, &Rational) {
        self.terms.iter().next_back().expect("leading term of zero polynomial")
    }

    pub fn leading_coefficient(&self) -> Rational {
        self.leading_term().1.clone()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial { nvars: self.nvars, terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn evaluate(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars);
        let mut total = rat(0);
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m) {
                for _ in 0..e {
                    t *= x;
                }
            }
            total += t;
        }
        total
    }

    /// Replaces `u_{i+1}` by `images[i]`; every image must live in the same
    /// ring of `nvars` variables.
    pub fn substitute(&self, images: &[Polynomial], nvars: usize) -> Self {
        assert_eq!(images.len(), self.nvars);
        let mut out = Self::zero(nvars);
        for (m, c) in &self.terms {
            let mut t = Self::constant(nvars, c.clone());
            for (img, &e) in images.iter().zip(m) {
                if e > 0 {
                    t = &t * &img.pow(e);
                }
            }
            out = out + t;
        }
        out
    }

    /// Substitution `u_i ↦ Σ_j a[i][j]·v_j` along an `n × r` integer matrix.
    pub fn substitute_linear(&self, a: &[Vec<i64>], r: usize) -> Self {
        let images: Vec<Polynomial> = a
            .iter()
            .map(|row| {
                assert_eq!(row.len(), r);
                Polynomial::linear(row)
            })
            .collect();
        self.substitute(&images, r)
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        assert_eq!(self.nvars, d.nvars);
        if d.is_zero() {
            return None;
        }
        let (dm, dc) = d.leading_term();
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut rem = self.clone();
        let mut q = Self::zero(self.nvars);
        while !rem.is_zero() {
            let (rm, rc) = rem.leading_term();
            if rm.iter().zip(&dm).any(|(a, b)| a < b) {
                return None;
            }
            let m: Monomial = rm.iter().zip(&dm).map(|(a, b)| a - b).collect();
            let t = Self::monomial(self.nvars, m, rc / &dc);
            rem = &rem - &(&t * d);
            q = q + t;
        }
        Some(q)
    }

    /// Positive rational `c` such that `self / c` has coprime integer
    /// coefficients. Zero for the zero polynomial.
    pub fn content(&self) -> Rational {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return rat(0);
        }
        Rational::new(num, den)
    }

    /// Integer-content-one associate with positive leading coefficient,
    /// together with the factor removed (`self = factor · result`).
    pub fn normalized(&self) -> (Rational, Polynomial) {
        if self.is_zero() {
            return (rat(1), self.clone());
        }
        let mut c = self.content();
        if self.leading_term().1.is_negative() {
            c = -c;
        }
        let inv = rat(1) / &c;
        (c, self.scale(&inv))
    }

    fn assert_univariate(&self) {
        assert_eq!(self.nvars, 1, "univariate operation on a polynomial in {} variables", self.nvars);
    }

    /// Euclidean division in ℚ[u].
    pub fn div_rem(&self, d: &Polynomial) -> (Polynomial, Polynomial) {
        self.assert_univariate();
        d.assert_univariate();
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.total_degree().unwrap();
        let lc = d.leading_coefficient();
        let mut q = Self::zero(1);
        let mut r = self.clone();
        while let Some(rd) = r.total_degree() {
            if rd < dd {
                break;
            }
            let t = Self::monomial(1, vec![rd - dd], r.leading_coefficient() / &lc);
            r = &r - &(&t * d);
            q = q + t;
        }
        (q, r)
    }

    /// Monic associate (zero stays zero).
    pub fn monic(&self) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&(rat(1) / self.leading_coefficient()))
    }

    /// Monic gcd in ℚ[u].
    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn var_name(nvars: usize, i: usize) -> String {
        if nvars == 1 {
            "u".to_string()
        } else {
            format!("u{}", i + 1)
        }
    }

    /// Parses expressions such as `u^2 - 3/2*u1*u2 + (u1 - u2)^2`.
    pub fn parse(s: &str, nvars: usize) -> Result<Polynomial> {
        let mut p = Parser { src: s.as_bytes(), pos: 0, nvars };
        let out = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("trailing input"));
        }
        Ok(out)
    }
}

impl serde::Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let vars: Vec<String> = m
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    let v = Self::var_name(self.nvars, i);
                    if e == 1 {
                        v
                    } else {
                        format!("{v}^{e}")
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{a}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at column {} in polynomial `{}`", self.pos + 1, String::from_utf8_lossy(self.src)))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap().parse().unwrap())
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = Polynomial::zero(self.nvars);
        let mut sign = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -1
            }
            Some(b'+') => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        loop {
            let t = self.term()?;
            acc = if sign < 0 { acc - t } else { acc + t };
            match self.peek() {
                Some(b'+') => sign = 1,
                Some(b'-') => sign = -1,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn exponent(&mut self) -> Result<u32> {
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.integer()?;
            u32::try_from(e).map_err(|_| self.err("exponent too large"))
        } else {
            Ok(1)
        }
    }

    fn factor(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                let e = self.exponent()?;
                Ok(inner.pow(e))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                let d = if self.peek() == Some(b'/') {
                    self.pos += 1;
                    let d = self.integer()?;
                    if d.is_zero() {
                        return Err(self.err("zero denominator"));
                    }
                    d
                } else {
                    BigInt::one()
                };
                Ok(Polynomial::constant(self.nvars, Rational::new(n, d)))
            }
            Some(b'u') => {
                self.pos += 1;
                let idx = match self.src.get(self.pos) {
                    Some(c) if c.is_ascii_digit() => {
                        let k = self.integer()?;
                        let k = usize::try_from(k).map_err(|_| self.err("bad variable index"))?;
                        if k == 0 || k > self.nvars {
                            return Err(self.err("variable index out of range"));
                        }
                        k - 1
                    }
                    _ => {
                        if self.nvars != 1 {
                            return Err(self.err("bare `u` only allowed at torus rank 1"));
                        }
                        0
                    }
                };
                let e = self.exponent()?;
                Ok(Polynomial::var(self.nvars, idx).pow(e))
            }
            _ => Err(self.err("expected term")),
        }
    }
}

impl super::Ring for Polynomial {
    fn zero_like(&self) -> Self {
        Polynomial::zero(self.nvars)
    }
    fn one_like(&self) -> Self {
        Polynomial::one(self.nvars)
    }
    fn is_zero(&self) -> bool {
        Polynomial::is_zero(self)
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

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "polynomials in different rings");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "polynomials in different rings");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "polynomials in different rings");
        // integer products over a common denominator, reduced once per term
        let (na, da) = self.integer_form();
        let (nb, db) = rhs.integer_form();
        let mut acc: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (ma, ca) in &na {
            for (mb, cb) in &nb {
                let m: Monomial = ma.iter().zip(mb.iter()).map(|(a, b)| a + b).collect();
                *acc.entry(m).or_default() += ca * cb;
            }
        }
        let den = da * db;
        let terms =
            acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(m, c)| (m, Rational::new(c, den.clone()))).collect();
        Polynomial { nvars: self.nvars, terms }
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: Polynomial) -> Polynomial {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}
