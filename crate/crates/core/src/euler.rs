//! Weights, equivariant Euler classes of linear representations,
//! fixed-point localization and Lefschetz numbers.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::algebra::{rat, Matrix, Polynomial, Rational, RationalFunction, Ring};
use crate::duality::integrate;
use crate::error::{Error, Result};
use crate::gcomplex::{cohomology_generic, EquivariantElement, InvariantModel};

/// Integral character `Σ aᵢuᵢ` of the torus.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn linear_form(&self) -> Polynomial {
        Polynomial::linear(&self.0)
    }

    /// Weight seen by the subtorus `v ↦ A v`: `α'_j = Σᵢ αᵢ A_ij`.
    pub fn restrict(&self, a: &[Vec<i64>]) -> Weight {
        let r = a.first().map_or(0, |row| row.len());
        Weight((0..r).map(|j| self.0.iter().zip(a).map(|(ai, row)| ai * row[j]).sum()).collect())
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.linear_form())
    }
}

/// `V = ℝ^{μ₀} ⊕ ⨁ C(α)^{μ(α)}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearRepresentation {
    pub torus_rank: usize,
    pub trivial: u32,
    pub weighted: Vec<(Weight, u32)>,
}

impl LinearRepresentation {
    pub fn new(torus_rank: usize, trivial: u32, weighted: Vec<(Weight, u32)>) -> Result<Self> {
        for (w, mult) in &weighted {
            if w.rank() != torus_rank {
                return Err(Error::Dimension(format!(
                    "weight {:?} has length {}, torus rank is {torus_rank}",
                    w.0,
                    w.rank()
                )));
            }
            if w.is_zero() {
                return Err(Error::Precondition("zero weight outside the trivial summand".into()));
            }
            if *mult == 0 {
                return Err(Error::Precondition(format!("weight {:?} has multiplicity 0", w.0)));
            }
        }
        Ok(LinearRepresentation { torus_rank, trivial, weighted })
    }

    /// Representation with the given weights, each of multiplicity one.
    pub fn from_weights(torus_rank: usize, weights: &[Vec<i64>]) -> Result<Self> {
        Self::new(torus_rank, 0, weights.iter().map(|w| (Weight(w.clone()), 1)).collect())
    }

    pub fn trivial(torus_rank: usize, dim: u32) -> Self {
        LinearRepresentation { torus_rank, trivial: dim, weighted: Vec::new() }
    }

    pub fn real_dimension(&self) -> u64 {
        self.trivial as u64 + 2 * self.weighted.iter().map(|(_, m)| *m as u64).sum::<u64>()
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.torus_rank != other.torus_rank {
            return Err(Error::Dimension("direct sum of representations of different rank".into()));
        }
        let mut weighted = self.weighted.clone();
        weighted.extend(other.weighted.iter().cloned());
        Ok(LinearRepresentation { torus_rank: self.torus_rank, trivial: self.trivial + other.trivial, weighted })
    }

    /// Restriction to a subtorus; weights that become zero join the trivial
    /// part with real multiplicity 2 each.
    pub fn restrict(&self, a: &[Vec<i64>], r: usize) -> Self {
        let mut out = LinearRepresentation { torus_rank: r, trivial: self.trivial, weighted: Vec::new() };
        for (w, m) in &self.weighted {
            let w2 = w.restrict(a);
            let w2 = if w2.rank() == r { w2 } else { Weight(vec![0; r]) };
            if w2.is_zero() {
                out.trivial += 2 * m;
            } else {
                out.weighted.push((w2, *m));
            }
        }
        out
    }
}

/// `Eu_T(0, V)`: zero when a trivial summand is present, otherwise the
/// product of weights with multiplicity (1 for the zero representation).
pub fn euler_linear(rep: &LinearRepresentation) -> Polynomial {
    let n = rep.torus_rank;
    if rep.trivial > 0 {
        return Polynomial::zero(n);
    }
    rep.weighted.iter().fold(Polynomial::one(n), |acc, (w, m)| &acc * &w.linear_form().pow(*m))
}

/// Isolated fixed point with the restrictions of named classes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixedPointDatum {
    pub name: String,
    pub tangent: LinearRepresentation,
    pub restrictions: BTreeMap<String, Polynomial>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Localized {
    pub value: RationalFunction,
    pub is_polynomial: bool,
}

/// `Σ_x μ|ₓ / Eu_T(x)` over isolated fixed points.
pub fn localize_integral(points: &[FixedPointDatum], class_name: &str) -> Result<Localized> {
    let n = points.first().map_or(0, |p| p.tangent.torus_rank);
    let mut total = RationalFunction::zero(n);
    for p in points {
        let eu = euler_linear(&p.tangent);
        if eu.is_zero() {
            return Err(Error::NonIsolatedFixedPoint(p.name.clone()));
        }
        let r = p
            .restrictions
            .get(class_name)
            .ok_or_else(|| Error::MissingRestriction { point: p.name.clone(), class: class_name.to_string() })?;
        total = total.plus(&RationalFunction::new(r.clone(), eu));
    }
    let is_polynomial = total.as_polynomial().is_some();
    Ok(Localized { value: total, is_polynomial })
}

/// Pullback of an element to the fixed point with the given index.
pub fn restrict_to_point(m: &InvariantModel, point: usize, x: &EquivariantElement) -> Result<Polynomial> {
    m.check_element(x)?;
    let p = &m.fixed_points[point];
    Ok(x.coeffs
        .iter()
        .zip(&p.evaluation)
        .filter(|(_, e)| !Ring::is_zero(*e))
        .fold(Polynomial::zero(m.torus_rank), |acc, (c, e)| acc + c.scale(e)))
}

/// Fixed-point data of a model: restrictions of every named class, plus
/// `euler` (the tangent Euler class) unless a class of that name exists.
pub fn fixed_point_data(m: &InvariantModel) -> Result<Vec<FixedPointDatum>> {
    (0..m.fixed_points.len())
        .map(|i| {
            let p = &m.fixed_points[i];
            let mut restrictions = BTreeMap::new();
            for c in &m.classes {
                restrictions.insert(c.name.clone(), restrict_to_point(m, i, &c.element)?);
            }
            restrictions.entry("euler".to_string()).or_insert_with(|| euler_linear(&p.tangent));
            Ok(FixedPointDatum { name: p.name.clone(), tangent: p.tangent.clone(), restrictions })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalizationResidual {
    pub class: String,
    pub localized: RationalFunction,
    pub integral: Polynomial,
    pub residual: RationalFunction,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalizationReport {
    pub entries: Vec<LocalizationResidual>,
}

impl LocalizationReport {
    pub fn consistent(&self) -> bool {
        self.entries.iter().all(|e| e.residual.is_zero())
    }
}

/// Compares the localization sum with equivariant integration on every
/// generic cocycle representative.
pub fn localization_consistency(m: &InvariantModel) -> Result<LocalizationReport> {
    if m.fixed_points.is_empty() {
        return Err(Error::Precondition(format!("model `{}` declares no fixed points", m.name)));
    }
    let coh = cohomology_generic(m)?;
    let mut entries = Vec::new();
    for rep in &coh.reps {
        let mut points = Vec::new();
        for (i, p) in m.fixed_points.iter().enumerate() {
            let mut restrictions = BTreeMap::new();
            restrictions.insert("rep".to_string(), restrict_to_point(m, i, &rep.element)?);
            points.push(FixedPointDatum { name: p.name.clone(), tangent: p.tangent.clone(), restrictions });
        }
        let localized = localize_integral(&points, "rep")?.value;
        let integral = integrate(m, &rep.element)?;
        let residual = localized.minus(&RationalFunction::from_poly(integral.clone()));
        entries.push(LocalizationResidual { class: m.format_element(&rep.element), localized, integral, residual });
    }
    Ok(LocalizationReport { entries })
}

/// `Λ_f = Σ (−1)^k Tr(f*: H^k → H^k)`.
pub fn lefschetz_number(action: &[Matrix<Rational>]) -> Result<Rational> {
    let mut total = rat(0);
    for (k, mat) in action.iter().enumerate() {
        if !mat.is_square() {
            return Err(Error::Dimension(format!("action in degree {k} is {}x{}", mat.rows(), mat.cols())));
        }
        let tr = mat.trace();
        if k % 2 == 0 {
            total += tr;
        } else {
            total -= tr;
        }
    }
    Ok(total)
}

/// Identity action on cohomology of the given dimensions.
pub fn identity_action(dims: &[usize]) -> Vec<Matrix<Rational>> {
    dims.iter().map(|&d| Matrix::identity(d, rat(0))).collect()
}

/// `Eu(inner ⊕ extra) = Eu(inner)·Eu(extra)`.
pub fn nested_euler_check(inner: &LinearRepresentation, mid_extra: &LinearRepresentation) -> Result<bool> {
    let sum = inner.direct_sum(mid_extra)?;
    Ok(euler_linear(&sum) == &euler_linear(inner) * &euler_linear(mid_extra))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rep(n: usize, trivial: u32, ws: &[&[i64]]) -> LinearRepresentation {
        LinearRepresentation::new(n, trivial, ws.iter().map(|w| (Weight(w.to_vec()), 1)).collect()).unwrap()
    }

    fn datum(name: &str, w: &[i64], class: &str, r: Polynomial) -> FixedPointDatum {
        FixedPointDatum {
            name: name.into(),
            tangent: rep(w.len(), 0, &[w]),
            restrictions: [(class.to_string(), r)].into_iter().collect(),
        }
    }

    #[test]
    fn euler_of_linear_representations() {
        assert_eq!(euler_linear(&rep(2, 0, &[&[1, 2]])), Polynomial::linear(&[1, 2]));
        assert!(euler_linear(&rep(1, 1, &[&[1]])).is_zero());
        assert_eq!(euler_linear(&rep(2, 0, &[&[1, 0], &[0, 1]])).to_string(), "u1*u2");
        assert!(euler_linear(&rep(3, 0, &[])).is_one());
    }

    #[test]
    fn zero_weights_rejected() {
        assert!(LinearRepresentation::new(1, 0, vec![(Weight(vec![0]), 1)]).is_err());
        assert!(LinearRepresentation::new(1, 0, vec![(Weight(vec![1, 1]), 1)]).is_err());
    }

    #[test]
    fn localization_on_sphere_data() {
        let u = Polynomial::var(1, 0);
        let pts = [datum("N", &[1], "e", u.clone()), datum("S", &[-1], "e", -&u)];
        let r = localize_integral(&pts, "e").unwrap();
        assert_eq!(r.value, RationalFunction::from_rational(1, rat(2)));
        assert!(r.is_polynomial);
        let pts = [datum("N", &[1], "one", Polynomial::one(1)), datum("S", &[-1], "one", Polynomial::one(1))];
        assert!(localize_integral(&pts, "one").unwrap().value.is_zero());
    }

    #[test]
    fn localization_errors() {
        let mut p = datum("x", &[1], "a", Polynomial::one(1));
        assert!(matches!(localize_integral(&[p.clone()], "b"), Err(Error::MissingRestriction { .. })));
        p.tangent.trivial = 2;
        assert!(matches!(localize_integral(&[p], "a"), Err(Error::NonIsolatedFixedPoint(_))));
    }

    #[test]
    fn non_polynomial_sum_is_flagged() {
        let pts = [datum("x", &[1], "a", Polynomial::one(1))];
        assert!(!localize_integral(&pts, "a").unwrap().is_polynomial);
    }

    #[test]
    fn lefschetz_examples() {
        assert_eq!(lefschetz_number(&identity_action(&[1, 0, 1])).unwrap(), rat(2));
        assert_eq!(lefschetz_number(&identity_action(&[1, 1])).unwrap(), rat(0));
        let action = vec![Matrix::identity(1, rat(0)), Matrix::new(2, 2, rat(0)), Matrix::new(1, 1, rat(0))];
        assert_eq!(lefschetz_number(&action).unwrap(), rat(1));
        assert!(lefschetz_number(&[Matrix::new(1, 2, rat(0))]).is_err());
    }

    #[test]
    fn nested_examples() {
        assert!(nested_euler_check(&rep(2, 0, &[&[1, 0]]), &rep(2, 0, &[&[0, 1]])).unwrap());
        assert!(nested_euler_check(&rep(1, 1, &[]), &rep(1, 0, &[&[3]])).unwrap());
    }

    #[test]
    fn restriction_moves_vanishing_weights_to_trivial() {
        let v = rep(2, 0, &[&[1, 0], &[1, 1]]);
        let r = v.restrict(&[vec![0], vec![1]], 1);
        assert_eq!(r.trivial, 2);
        assert_eq!(r.weighted, vec![(Weight(vec![1]), 1)]);
        assert_eq!(r.real_dimension(), v.real_dimension());
    }
}
