//! Smith normal form over ℚ[u].

use super::{Matrix, Polynomial, Rational};
use crate::error::{Error, Result};

/// `u · a · v = d` with `d` diagonal and `d[0][0] | d[1][1] | …`. The
/// inverses of `u` and `v` are tracked alongside so that callers can read
/// off new bases without a second elimination.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: Matrix<Polynomial>,
    pub d: Matrix<Polynomial>,
    pub v: Matrix<Polynomial>,
    pub u_inv: Matrix<Polynomial>,
    pub v_inv: Matrix<Polynomial>,
}

impl Smith {
    /// Nonzero diagonal entries, monic, in divisibility order.
    pub fn invariant_factors(&self) -> Vec<Polynomial> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d.get(i, i).clone()).take_while(|p| !p.is_zero()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

struct State {
    a: Matrix<Polynomial>,
    u: Matrix<Polynomial>,
    u_inv: Matrix<Polynomial>,
    v: Matrix<Polynomial>,
    v_inv: Matrix<Polynomial>,
}

fn zero1() -> Polynomial {
    Polynomial::zero(1)
}

impl State {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.v.swap_cols(i, j);
        self.v_inv.swap_rows(i, j);
    }

    /// row_i ← row_i − q·row_t
    fn row_axpy(&mut self, i: usize, t: usize, q: &Polynomial) {
        let minus_q = -q;
        for m in [&mut self.a, &mut self.u] {
            for j in 0..m.cols() {
                let v = m.get(i, j).add_product(&minus_q, m.get(t, j));
                m.set(i, j, v);
            }
        }
        for r in 0..self.u_inv.rows() {
            let v = self.u_inv.get(r, t).add_product(self.u_inv.get(r, i), q);
            self.u_inv.set(r, t, v);
        }
    }

    /// col_j ← col_j − q·col_t
    fn col_axpy(&mut self, j: usize, t: usize, q: &Polynomial) {
        let minus_q = -q;
        for m in [&mut self.a, &mut self.v] {
            for r in 0..m.rows() {
                let v = m.get(r, j).add_product(m.get(r, t), &minus_q);
                m.set(r, j, v);
            }
        }
        for c in 0..self.v_inv.cols() {
            let v = self.v_inv.get(t, c).add_product(q, self.v_inv.get(j, c));
            self.v_inv.set(t, c, v);
        }
    }

    fn scale_row(&mut self, t: usize, s: &Rational) {
        for m in [&mut self.a, &mut self.u] {
            for j in 0..m.cols() {
                let v = m.get(t, j).scale(s);
                m.set(t, j, v);
            }
        }
        let inv = Rational::from_integer(1.into()) / s;
        for r in 0..self.u_inv.rows() {
            let v = self.u_inv.get(r, t).scale(&inv);
            self.u_inv.set(r, t, v);
        }
    }

    /// Minimal-degree nonzero entry among `cells`; ties resolved by the
    /// iteration order (row-major).
    fn min_degree(&self, cells: impl Iterator<Item = (usize, usize)>) -> Option<(usize, usize)> {
        let mut best: Option<((usize, usize), u32)> = None;
        for (i, j) in cells {
            if let Some(d) = self.a.get(i, j).total_degree() {
                if best.map_or(true, |(_, bd)| d < bd) {
                    best = Some(((i, j), d));
                }
            }
        }
        best.map(|(c, _)| c)
    }
}

/// Smith normal form of a matrix over ℚ[u]. Pivots are chosen as the
/// nonzero entry of least degree (ties: smallest row, then column); the
/// diagonal is made monic.
pub fn smith_normal_form(a: &Matrix<Polynomial>) -> Result<Smith> {
    let nvars = a.zero().nvars();
    if nvars != 1 {
        return Err(Error::UnsupportedRank { expected: 1, found: nvars });
    }
    let (rows, cols) = (a.rows(), a.cols());
    let mut s = State {
        a: a.clone(),
        u: Matrix::identity(rows, zero1()),
        u_inv: Matrix::identity(rows, zero1()),
        v: Matrix::identity(cols, zero1()),
        v_inv: Matrix::identity(cols, zero1()),
    };
    for t in 0..rows.min(cols) {
        let cells = (t..rows).flat_map(|i| (t..cols).map(move |j| (i, j)));
        let Some((pi, pj)) = s.min_degree(cells) else { break };
        s.swap_rows(t, pi);
        s.swap_cols(t, pj);
        loop {
            // Euclid down the column first: row entries are only reduced
            // once the pivot has reached the column gcd
            loop {
                let piv = s.a.get(t, t).clone();
                for i in t + 1..rows {
                    let (q, _) = s.a.get(i, t).div_rem(&piv);
                    if !q.is_zero() {
                        s.row_axpy(i, t, &q);
                    }
                }
                match s.min_degree((t + 1..rows).map(|i| (i, t))) {
                    Some((i, _)) => s.swap_rows(t, i),
                    None => break,
                }
            }
            let piv = s.a.get(t, t).clone();
            for j in t + 1..cols {
                let (q, _) = s.a.get(t, j).div_rem(&piv);
                if !q.is_zero() {
                    s.col_axpy(j, t, &q);
                }
            }
            if let Some((_, j)) = s.min_degree((t + 1..cols).map(|j| (t, j))) {
                s.swap_cols(t, j);
                continue;
            }
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !s.a.get(i, j).div_rem(&piv).1.is_zero());
            match bad {
                Some((i, _)) => {
                    let minus_one = Polynomial::constant(1, Rational::from_integer((-1).into()));
                    s.row_axpy(t, i, &minus_one);
                }
                None => break,
            }
        }
    }
    for t in 0..rows.min(cols) {
        let p = s.a.get(t, t);
        if p.is_zero() {
            break;
        }
        let lc = p.leading_coefficient();
        if lc != Rational::from_integer(1.into()) {
            s.scale_row(t, &(Rational::from_integer(1.into()) / lc));
        }
    }
    Ok(Smith { u: s.u, d: s.a, v: s.v, u_inv: s.u_inv, v_inv: s.v_inv })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(rows: &[&[&str]]) -> Matrix<Polynomial> {
        let cols = rows.first().map_or(0, |r| r.len());
        Matrix::from_rows(
            rows.iter().map(|r| r.iter().map(|s| Polynomial::parse(s, 1).unwrap()).collect()).collect(),
            cols,
            zero1(),
        )
    }

    fn factors(m: &Matrix<Polynomial>) -> Vec<String> {
        let s = smith_normal_form(m).unwrap();
        assert_eq!(s.u.mul(m).mul(&s.v), s.d);
        assert_eq!(s.u.mul(&s.u_inv), Matrix::identity(m.rows(), zero1()));
        assert_eq!(s.v.mul(&s.v_inv), Matrix::identity(m.cols(), zero1()));
        s.invariant_factors().iter().map(|p| p.to_string()).collect()
    }

    #[test]
    fn identity_is_its_own_form() {
        assert_eq!(factors(&pm(&[&["1", "0", "0"], &["0", "1", "0"], &["0", "0", "1"]])), ["1", "1", "1"]);
    }

    #[test]
    fn already_diagonal() {
        assert_eq!(factors(&pm(&[&["u", "0"], &["0", "u^2"]])), ["u", "u^2"]);
        assert_eq!(factors(&pm(&[&["u^2", "0"], &["0", "u"]])), ["u", "u^2"]);
    }

    #[test]
    fn upper_triangular_example() {
        // det = u^3, gcd of entries = u
        assert_eq!(factors(&pm(&[&["u", "u"], &["0", "u^2"]])), ["u", "u^2"]);
    }

    #[test]
    fn coprime_entries_need_divisibility_fix() {
        assert_eq!(factors(&pm(&[&["u", "0"], &["0", "u + 1"]])), ["1", "u^2 + u"]);
    }

    #[test]
    fn rectangular_and_zero() {
        assert_eq!(factors(&pm(&[&["0", "0", "0"], &["0", "0", "0"]])), Vec::<String>::new());
        assert_eq!(factors(&pm(&[&["u", "2*u", "u^2 - 1"]])), ["1"]);
    }

    #[test]
    fn multivariate_rejected() {
        let m = Matrix::new(1, 1, Polynomial::zero(2));
        assert!(matches!(smith_normal_form(&m), Err(Error::UnsupportedRank { .. })));
    }
}
