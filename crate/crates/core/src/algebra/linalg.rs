//! Elimination over ℚ and over the fraction field of ℚ[u1..un].
//!
//! Fraction-field systems are first cleared of denominators row by row and
//! reduced fraction-free (Bareiss) over the polynomial ring, so intermediate
//! entries stay polynomial minors of the input. Back-substitution then runs
//! in the fraction field.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{rat, Field, Matrix, Polynomial, Rational, RationalFunction, Ring};
use crate::error::{Error, Result};

/// Seed used for random specialization points unless overridden.
pub const DEFAULT_SEED: u64 = 0x00C0_FFEE;

/// Reduced row echelon form and pivot columns.
pub fn rref<F: Field>(m: &Matrix<F>) -> (Matrix<F>, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols() {
        if r == a.rows() {
            break;
        }
        let Some(p) = (r..a.rows()).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        a.swap_rows(p, r);
        let inv = a.get(r, c).inverse();
        for j in c..a.cols() {
            let v = a.get(r, j).times(&inv);
            a.set(r, j, v);
        }
        for i in 0..a.rows() {
            if i == r || a.get(i, c).is_zero() {
                continue;
            }
            let f = a.get(i, c).clone();
            for j in c..a.cols() {
                let v = a.get(i, j).minus(&f.times(a.get(r, j)));
                a.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank_q(m: &Matrix<Rational>) -> usize {
    rref(m).1.len()
}

/// Kernel basis over ℚ read off the reduced echelon form: one vector per
/// free column, with a 1 in that column.
pub fn kernel_q(m: &Matrix<Rational>) -> Vec<Vec<Rational>> {
    let (e, pivots) = rref(m);
    let free: Vec<usize> = (0..m.cols()).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![rat(0); m.cols()];
            v[f] = rat(1);
            for (k, &p) in pivots.iter().enumerate() {
                v[p] = -e.get(k, f).clone();
            }
            v
        })
        .collect()
}

/// Reduced-echelon particular solution of `m·x = b` (free variables zero),
/// or `None` when the system is inconsistent.
pub fn solve_q(m: &Matrix<Rational>, b: &[Rational]) -> Option<Vec<Rational>> {
    assert_eq!(b.len(), m.rows(), "right-hand side length mismatch");
    let bcol = Matrix::from_columns(&[b.to_vec()], m.rows(), rat(0));
    let (e, pivots) = rref(&m.hcat(&bcol));
    if pivots.last() == Some(&m.cols()) {
        return None;
    }
    let mut x = vec![rat(0); m.cols()];
    for (k, &p) in pivots.iter().enumerate() {
        x[p] = e.get(k, m.cols()).clone();
    }
    Some(x)
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolveOutcome {
    NotRequested,
    Consistent(Vec<RationalFunction>),
    Inconsistent,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub rank: usize,
    pub pivots: Vec<usize>,
    pub solution: SolveOutcome,
    pub kernel: Vec<Vec<RationalFunction>>,
}

/// Least common multiple of the denominators, up to a rational factor.
/// Without a multivariate gcd this is the product of pairwise-distinct
/// denominators, which is enough for exact clearing.
fn common_denominator<'a>(nvars: usize, items: impl Iterator<Item = &'a RationalFunction>) -> Polynomial {
    let mut acc = Polynomial::one(nvars);
    let mut seen: Vec<Polynomial> = Vec::new();
    for x in items {
        let d = x.denominator();
        if d.is_constant() || seen.contains(d) {
            continue;
        }
        if nvars == 1 {
            let g = acc.gcd(d);
            acc = &acc * &d.div_rem(&g).0;
        } else if acc.div_exact(d).is_none() {
            acc = &acc * d;
        }
        seen.push(d.clone());
    }
    acc
}

fn times_poly(x: &RationalFunction, l: &Polynomial) -> Result<Polynomial> {
    x.times(&RationalFunction::from_poly(l.clone()))
        .as_polynomial()
        .ok_or_else(|| Error::Inconsistent("denominator clearing was not exact".into()))
}

/// Fraction-free forward elimination restricted to pivots in the first
/// `pivot_cols` columns. Returns `(row, col)` of each pivot.
fn bareiss(a: &mut Matrix<Polynomial>, pivot_cols: usize) -> Result<Vec<(usize, usize)>> {
    let n = a.zero().nvars();
    let mut prev = Polynomial::one(n);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == a.rows() {
            break;
        }
        let best = (r..a.rows())
            .filter(|&i| !a.get(i, c).is_zero())
            .min_by_key(|&i| (a.get(i, c).num_terms(), a.get(i, c).total_degree(), i));
        let Some(p) = best else { continue };
        a.swap_rows(p, r);
        let piv = a.get(r, c).clone();
        for i in r + 1..a.rows() {
            let lead = a.get(i, c).clone();
            for j in c + 1..a.cols() {
                let num = &(&piv * a.get(i, j)) - &(&lead * a.get(r, j));
                let v = num
                    .div_exact(&prev)
                    .ok_or_else(|| Error::Inconsistent("Bareiss step produced a non-exact quotient".into()))?;
                a.set(i, j, v);
            }
            a.set(i, c, Polynomial::zero(n));
        }
        prev = piv;
        pivots.push((r, c));
        r += 1;
    }
    Ok(pivots)
}

/// Rank, optional solution and kernel basis of `m` over the fraction field.
///
/// An inconsistent right-hand side is reported as
/// [`SolveOutcome::Inconsistent`], not as an error.
pub fn rank_and_solve(m: &Matrix<RationalFunction>, b: Option<&[RationalFunction]>) -> Result<SolveReport> {
    let nvars = m.zero().nvars();
    let ncols = m.cols();
    if let Some(b) = b {
        if b.len() != m.rows() {
            return Err(Error::Dimension(format!(
                "right-hand side has length {}, matrix has {} rows",
                b.len(),
                m.rows()
            )));
        }
    }
    let width = ncols + 1;
    let mut a = Matrix::new(m.rows(), width, Polynomial::zero(nvars));
    for i in 0..m.rows() {
        let rhs = b.map(|b| b[i].clone()).unwrap_or_else(|| RationalFunction::zero(nvars));
        let row: Vec<&RationalFunction> = m.row(i).iter().chain(std::iter::once(&rhs)).collect();
        let l = common_denominator(nvars, row.iter().copied());
        for (j, x) in row.into_iter().enumerate() {
            a.set(i, j, times_poly(x, &l)?);
        }
    }
    let all = bareiss(&mut a, width)?;
    let inconsistent = all.iter().any(|&(_, c)| c == ncols);
    let pivots: Vec<(usize, usize)> = all.into_iter().filter(|&(_, c)| c < ncols).collect();
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();

    let back_substitute = |rhs_col: Option<usize>, fixed: &[(usize, RationalFunction)]| {
        let mut x = vec![RationalFunction::zero(nvars); ncols];
        for (c, v) in fixed {
            x[*c] = v.clone();
        }
        for &(r, c) in pivots.iter().rev() {
            let mut acc = match rhs_col {
                Some(rc) => RationalFunction::from_poly(a.get(r, rc).clone()),
                None => RationalFunction::zero(nvars),
            };
            for (j, xj) in x.iter().enumerate().take(ncols).skip(c + 1) {
                if !xj.is_zero() && !a.get(r, j).is_zero() {
                    acc = acc.minus(&RationalFunction::from_poly(a.get(r, j).clone()).times(xj));
                }
            }
            x[c] = acc.over(&RationalFunction::from_poly(a.get(r, c).clone()));
        }
        x
    };

    let solution = match b {
        None => SolveOutcome::NotRequested,
        Some(_) if inconsistent => SolveOutcome::Inconsistent,
        Some(_) => SolveOutcome::Consistent(back_substitute(Some(ncols), &[])),
    };
    let kernel = (0..ncols)
        .filter(|c| !pivot_cols.contains(c))
        .map(|f| back_substitute(None, &[(f, RationalFunction::one(nvars))]))
        .collect();
    Ok(SolveReport { rank: pivots.len(), pivots: pivot_cols, solution, kernel })
}

pub fn rank_and_solve_poly(m: &Matrix<Polynomial>, b: Option<&[Polynomial]>) -> Result<SolveReport> {
    let nvars = m.zero().nvars();
    let lifted = m.map(RationalFunction::zero(nvars), |p| RationalFunction::from_poly(p.clone()));
    let b: Option<Vec<RationalFunction>> =
        b.map(|b| b.iter().map(|p| RationalFunction::from_poly(p.clone())).collect());
    rank_and_solve(&lifted, b.as_deref())
}

/// Scales a fraction-field vector to a polynomial vector spanning the same
/// line: denominators cleared, common factors removed (gcd at rank one,
/// rational content otherwise), last nonzero entry with positive leading
/// coefficient.
pub fn clear_denominators(v: &[RationalFunction]) -> Vec<Polynomial> {
    let Some(first) = v.first() else { return Vec::new() };
    let nvars = first.nvars();
    let l = common_denominator(nvars, v.iter());
    let mut out: Vec<Polynomial> =
        v.iter().map(|x| times_poly(x, &l).expect("clearing by a common denominator is exact")).collect();
    if nvars == 1 {
        let g = out.iter().fold(Polynomial::zero(1), |g, p| g.gcd(p));
        if !g.is_zero() && !g.is_one() {
            out = out.iter().map(|p| p.div_rem(&g).0).collect();
        }
    }
    let content = out.iter().filter(|p| !p.is_zero()).map(|p| p.content()).reduce(|a, b| rational_gcd(&a, &b));
    if let Some(c) = content {
        let last_lc = out.iter().rev().find(|p| !p.is_zero()).unwrap().leading_coefficient();
        let c = if num_traits::Signed::is_negative(&last_lc) { -c } else { c };
        let inv = rat(1) / c;
        out = out.iter().map(|p| p.scale(&inv)).collect();
    }
    out
}

fn rational_gcd(a: &Rational, b: &Rational) -> Rational {
    use num_integer::Integer;
    Rational::new(a.numer().gcd(b.numer()), a.denom().lcm(b.denom()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecializedRank {
    pub rank: usize,
    /// Rank at each random point drawn, in order.
    pub draws: Vec<usize>,
    pub disagreement: bool,
}

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    (0..n)
        .map(|_| {
            let num: i64 = rng.gen_range(-10_000..=10_000);
            let den: i64 = rng.gen_range(1..=100);
            super::ratio(num, den)
        })
        .collect()
}

fn rank_at(m: &Matrix<Polynomial>, point: &[Rational]) -> usize {
    rank_q(&m.map(rat(0), |p| p.evaluate(point)))
}

/// Generic rank of a polynomial matrix by evaluation at seeded random
/// rational points. Two draws that agree settle it; otherwise a third draw
/// is taken and the largest rank returned. Three distinct ranks are an
/// error.
pub fn generic_specialized_rank(m: &Matrix<Polynomial>, seed: u64) -> Result<SpecializedRank> {
    let n = m.zero().nvars();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r1 = rank_at(m, &random_point(&mut rng, n));
    let r2 = rank_at(m, &random_point(&mut rng, n));
    if r1 == r2 {
        return Ok(SpecializedRank { rank: r1, draws: vec![r1, r2], disagreement: false });
    }
    let r3 = rank_at(m, &random_point(&mut rng, n));
    if r3 != r1 && r3 != r2 {
        return Err(Error::RankDisagreement([r1, r2, r3]));
    }
    Ok(SpecializedRank { rank: r1.max(r2).max(r3), draws: vec![r1, r2, r3], disagreement: true })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(rows: &[&[&str]], nvars: usize) -> Matrix<Polynomial> {
        let cols = rows.first().map_or(0, |r| r.len());
        Matrix::from_rows(
            rows.iter().map(|r| r.iter().map(|s| Polynomial::parse(s, nvars).unwrap()).collect()).collect(),
            cols,
            Polynomial::zero(nvars),
        )
    }

    fn rf(s: &str, n: usize) -> RationalFunction {
        RationalFunction::from_poly(Polynomial::parse(s, n).unwrap())
    }

    #[test]
    fn zero_matrix_has_full_kernel() {
        let r = rank_and_solve_poly(&pm(&[&["0", "0"], &["0", "0"]], 1), None).unwrap();
        assert_eq!(r.rank, 0);
        assert_eq!(r.kernel.len(), 2);
        assert_eq!(r.solution, SolveOutcome::NotRequested);
    }

    #[test]
    fn scalar_division() {
        let r = rank_and_solve_poly(&pm(&[&["u"]], 1), Some(&[Polynomial::parse("u^2", 1).unwrap()])).unwrap();
        assert_eq!(r.rank, 1);
        assert_eq!(r.solution, SolveOutcome::Consistent(vec![rf("u", 1)]));
    }

    #[test]
    fn singular_polynomial_matrix() {
        // det = u*u - u^2*1 = 0
        let m = pm(&[&["u", "u^2"], &["1", "u"]], 1);
        let r = rank_and_solve_poly(&m, None).unwrap();
        assert_eq!(r.rank, 1);
        let k = clear_denominators(&r.kernel[0]);
        assert_eq!(m.apply(&k).iter().filter(|p| !p.is_zero()).count(), 0);
        assert_eq!(generic_specialized_rank(&m, DEFAULT_SEED).unwrap().rank, 1);
    }

    #[test]
    fn inconsistent_is_an_outcome() {
        let m = pm(&[&["u", "u^2"], &["1", "u"]], 1);
        let r = rank_and_solve_poly(&m, Some(&[Polynomial::parse("1", 1).unwrap(), Polynomial::zero(1)])).unwrap();
        assert_eq!(r.solution, SolveOutcome::Inconsistent);
    }

    #[test]
    fn specialized_rank_examples() {
        assert_eq!(generic_specialized_rank(&pm(&[&["u"]], 1), 7).unwrap().rank, 1);
        assert_eq!(generic_specialized_rank(&pm(&[&["u1 - u2"]], 2), 7).unwrap().rank, 1);
    }

    #[test]
    fn multivariate_solve() {
        let m = pm(&[&["u1", "u2"], &["u2", "u1"]], 2);
        let b = [rf("1", 2), rf("0", 2)];
        let r = rank_and_solve(&m.map(RationalFunction::zero(2), |p| RationalFunction::from_poly(p.clone())), Some(&b))
            .unwrap();
        let SolveOutcome::Consistent(x) = r.solution else { panic!("expected solution") };
        let den = Polynomial::parse("u1^2 - u2^2", 2).unwrap();
        assert_eq!(x[0], RationalFunction::new(Polynomial::parse("u1", 2).unwrap(), den.clone()));
        assert_eq!(x[1], RationalFunction::new(Polynomial::parse("-u2", 2).unwrap(), den));
    }

    #[test]
    fn rational_kernel_and_solve() {
        let m = Matrix::from_rows(vec![vec![rat(1), rat(2), rat(3)], vec![rat(2), rat(4), rat(6)]], 3, rat(0));
        assert_eq!(rank_q(&m), 1);
        let k = kernel_q(&m);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.apply(v).iter().all(|x| x == &rat(0)));
        }
        assert_eq!(solve_q(&m, &[rat(1), rat(2)]).unwrap(), vec![rat(1), rat(0), rat(0)]);
        assert!(solve_q(&m, &[rat(1), rat(1)]).is_none());
    }
}
