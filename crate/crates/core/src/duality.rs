//! Equivariant integration, the Poincaré pairing over the fraction field,
//! and graded module structure of `H_T` at torus rank 1.

use serde::Serialize;

use crate::algebra::{rank_and_solve, smith_normal_form, Matrix, Polynomial, RationalFunction};
use crate::error::{Error, Result};
use crate::gcomplex::{cohomology_generic, EquivariantElement, GenericCohomology, InvariantModel};

/// `P ⊗ ω ↦ P ∫ω`, applied to the top-degree components.
pub fn integrate(m: &InvariantModel, x: &EquivariantElement) -> Result<Polynomial> {
    if !m.compact {
        return Err(Error::NotCompact(m.name.clone()));
    }
    m.check_element(x)?;
    let mut out = Polynomial::zero(m.torus_rank);
    for (g, p) in x.coeffs.iter().enumerate() {
        if p.is_zero() || m.degree(g) != m.top_degree {
            continue;
        }
        let c = m.integration.get(&g).ok_or_else(|| Error::MissingIntegral(m.gen_name(g).to_string()))?;
        out = out + p.scale(c);
    }
    Ok(out)
}

/// Pairing on the generic cohomology basis with the basis degrees.
#[derive(Clone, Debug)]
pub struct Pairing {
    pub matrix: Matrix<RationalFunction>,
    pub degrees: Vec<i64>,
}

pub fn pairing_on(m: &InvariantModel, coh: &GenericCohomology) -> Result<Pairing> {
    let k = coh.reps.len();
    let mut matrix = Matrix::new(k, k, RationalFunction::zero(m.torus_rank));
    for i in 0..k {
        for j in 0..k {
            let prod = m.wedge(&coh.reps[i].element, &coh.reps[j].element)?;
            matrix.set(i, j, RationalFunction::from_poly(integrate(m, &prod)?));
        }
    }
    Ok(Pairing { matrix, degrees: coh.reps.iter().map(|r| r.degree).collect() })
}

/// `⟨rep_i, rep_j⟩ = ∫ rep_i ∧ rep_j` on the generic basis.
pub fn pairing_matrix(m: &InvariantModel) -> Result<Pairing> {
    if !m.compact {
        return Err(Error::NotCompact(m.name.clone()));
    }
    pairing_on(m, &cohomology_generic(m)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualityReport {
    pub pairing_rank: usize,
    pub generic_betti_total: usize,
    pub perfect: bool,
}

pub fn duality_check(m: &InvariantModel) -> Result<DualityReport> {
    let p = pairing_matrix(m)?;
    let pairing_rank = rank_and_solve(&p.matrix, None)?.rank;
    let total = p.matrix.rows();
    Ok(DualityReport { pairing_rank, generic_betti_total: total, perfect: pairing_rank == total })
}

/// `Q_T ⊗ H_T(M) = 0`.
pub fn is_torsion(m: &InvariantModel) -> Result<bool> {
    Ok(cohomology_generic(m)?.total_rank() == 0)
}

/// Decomposition `⊕ ℚ[u][−aᵢ] ⊕ ⊕ ℚ[u]/(pⱼ)[−bⱼ]` of a graded module.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModuleClassification {
    pub free_rank: usize,
    pub free_degrees: Vec<i64>,
    /// Non-unit elementary divisors, monic, in divisibility order.
    pub divisors: Vec<Polynomial>,
    pub torsion_degrees: Vec<i64>,
    pub is_free: bool,
    pub is_torsion_free: bool,
    pub is_reflexive: bool,
    pub is_torsion: bool,
}

impl ModuleClassification {
    /// Over a principal ideal domain torsion-free, reflexive and free agree.
    pub fn new(mut free_degrees: Vec<i64>, torsion: Vec<(Polynomial, i64)>) -> Self {
        free_degrees.sort_unstable();
        let free_rank = free_degrees.len();
        let is_free = torsion.is_empty();
        let (divisors, torsion_degrees) = torsion.into_iter().unzip();
        ModuleClassification {
            free_rank,
            free_degrees,
            divisors,
            torsion_degrees,
            is_free,
            is_torsion_free: is_free,
            is_reflexive: is_free,
            is_torsion: free_rank == 0,
        }
    }

    /// `dim_ℚ` of each degree `0..=cutoff` implied by the decomposition.
    pub fn hilbert(&self, cutoff: usize) -> Vec<usize> {
        let mut out = vec![0usize; cutoff + 1];
        let mut bump = |k: i64| {
            if (0..=cutoff as i64).contains(&k) {
                out[k as usize] += 1;
            }
        };
        for &a in &self.free_degrees {
            let mut k = a;
            while k <= cutoff as i64 {
                bump(k);
                k += 2;
            }
        }
        for (p, &b) in self.divisors.iter().zip(&self.torsion_degrees) {
            let len = p.total_degree().unwrap_or(0) as i64;
            for i in 0..len {
                bump(b + 2 * i);
            }
        }
        out
    }
}

/// Cokernel of `relations` (generators × relations) over ℚ[u], with
/// generator degrees.
#[derive(Clone, Debug, PartialEq)]
pub struct ModulePresentation {
    pub torus_rank: usize,
    pub generator_degrees: Vec<i64>,
    pub relations: Matrix<Polynomial>,
}

impl ModulePresentation {
    pub fn free(degrees: &[i64]) -> Self {
        ModulePresentation {
            torus_rank: 1,
            generator_degrees: degrees.to_vec(),
            relations: Matrix::new(degrees.len(), 0, Polynomial::zero(1)),
        }
    }

    /// Canonical presentation of a classified module.
    pub fn from_classification(c: &ModuleClassification) -> Self {
        let mut degrees = c.free_degrees.clone();
        degrees.extend(&c.torsion_degrees);
        let t = c.divisors.len();
        let mut relations = Matrix::new(degrees.len(), t, Polynomial::zero(1));
        for (j, p) in c.divisors.iter().enumerate() {
            relations.set(c.free_rank + j, j, p.clone());
        }
        ModulePresentation { torus_rank: 1, generator_degrees: degrees, relations }
    }
}

fn require_rank1(n: usize) -> Result<()> {
    if n != 1 {
        return Err(Error::UnsupportedRank { expected: 1, found: n });
    }
    Ok(())
}

/// Degree of a homogeneous column vector whose entry `i` multiplies a
/// generator of degree `degrees[i]`.
fn column_degree(col: &[Polynomial], degrees: &[i64]) -> Result<i64> {
    col.iter()
        .zip(degrees)
        .find_map(|(p, d)| p.total_degree().map(|k| d + 2 * k as i64))
        .ok_or_else(|| Error::Inconsistent("zero column in an invertible matrix".into()))
}

/// Classifies a presented module from the Smith form of its relations.
pub fn classify_presentation(p: &ModulePresentation) -> Result<ModuleClassification> {
    require_rank1(p.torus_rank)?;
    let s = smith_normal_form(&p.relations)?;
    let factors = s.invariant_factors();
    let mut free = Vec::new();
    let mut torsion = Vec::new();
    for i in 0..p.generator_degrees.len() {
        let deg = column_degree(&s.u_inv.column(i), &p.generator_degrees)?;
        match factors.get(i) {
            None => free.push(deg),
            Some(f) if f.is_constant() => {}
            Some(f) => torsion.push((f.clone(), deg)),
        }
    }
    Ok(ModuleClassification::new(free, torsion))
}

/// Removes each element of `minus` from `from` once.
fn multiset_difference(mut from: Vec<i64>, minus: &[i64]) -> Result<Vec<i64>> {
    for x in minus {
        let pos = from
            .iter()
            .position(|y| y == x)
            .ok_or_else(|| Error::Inconsistent(format!("degree {x} missing from the kernel basis")))?;
        from.swap_remove(pos);
    }
    Ok(from)
}

/// Exact graded decomposition of `H_T(m)` over ℚ[u] from the Smith form of
/// the Cartan boundary on the free module `ℚ[u] ⊗ C`.
pub fn classify_rank1(m: &InvariantModel) -> Result<ModuleClassification> {
    require_rank1(m.torus_rank)?;
    crate::gcomplex::ensure_valid(m)?;
    let degrees: Vec<i64> = m.generators.iter().map(|g| g.degree as i64).collect();
    let s = smith_normal_form(&m.cartan_matrix())?;
    let factors = s.invariant_factors();
    let r = factors.len();
    let mut kernel_degrees = Vec::new();
    let mut image_degrees = Vec::new();
    let mut torsion = Vec::new();
    for j in 0..m.dim() {
        let deg = column_degree(&s.v.column(j), &degrees)?;
        if j >= r {
            kernel_degrees.push(deg);
            continue;
        }
        // d f_j = σ_j g_j, so g_j sits in degree deg f_j + 1 − 2 deg σ_j
        let k = factors[j].total_degree().unwrap_or(0) as i64;
        let g = deg + 1 - 2 * k;
        image_degrees.push(g);
        if k > 0 {
            torsion.push((factors[j].clone(), g));
        }
    }
    let free = multiset_difference(kernel_degrees, &image_degrees)?;
    Ok(ModuleClassification::new(free, torsion))
}

pub fn cohomology_presentation(m: &InvariantModel) -> Result<ModulePresentation> {
    Ok(ModulePresentation::from_classification(&classify_rank1(m)?))
}

/// `Ext⁰ = Hom(V, ℚ[u])` and `Ext¹(V, ℚ[u])` of a rank-1 module.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtRank1 {
    pub ext0: ModuleClassification,
    /// Non-unit divisors with the degree of the Ext¹ generator.
    pub ext1: Vec<(Polynomial, i64)>,
}

/// Dual of the free part (negated degrees) and `Ext¹(ℚ[u]/(p)[−b]) =
/// ℚ[u]/(p)` generated in degree `−b − 2 deg p`.
pub fn ext_rank1(p: &ModulePresentation) -> Result<ExtRank1> {
    let c = classify_presentation(p)?;
    let ext0 = ModuleClassification::new(c.free_degrees.iter().map(|a| -a).collect(), Vec::new());
    let ext1 = c
        .divisors
        .iter()
        .zip(&c.torsion_degrees)
        .map(|(f, b)| (f.clone(), -b - 2 * f.total_degree().unwrap_or(0) as i64))
        .collect();
    Ok(ExtRank1 { ext0, ext1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::gcomplex::Generator;

    fn circle_free() -> InvariantModel {
        let mut m =
            InvariantModel::skeleton("circle_free", 1, vec![Generator::new("b0", 0), Generator::new("b1", 1)], 1);
        m.contractions[0].set(0, 1, rat(1));
        m.unit = Some(0);
        m.compact = true;
        m.integration.insert(1, rat(1));
        m
    }

    #[test]
    fn free_presentation_and_ext() {
        let p = ModulePresentation::free(&[0, 2]);
        let e = ext_rank1(&p).unwrap();
        assert_eq!(e.ext0.free_rank, 2);
        assert_eq!(e.ext0.free_degrees, vec![-2, 0]);
        assert!(e.ext1.is_empty());
    }

    #[test]
    fn cyclic_torsion_ext() {
        let mut rel = Matrix::new(1, 1, Polynomial::zero(1));
        rel.set(0, 0, Polynomial::var(1, 0));
        let p = ModulePresentation { torus_rank: 1, generator_degrees: vec![0], relations: rel };
        let e = ext_rank1(&p).unwrap();
        assert_eq!(e.ext0.free_rank, 0);
        assert_eq!(e.ext1, vec![(Polynomial::var(1, 0), -2)]);
    }

    #[test]
    fn circle_free_is_torsion() {
        let m = circle_free();
        let c = classify_rank1(&m).unwrap();
        assert_eq!(c.free_rank, 0);
        assert_eq!(c.divisors, vec![Polynomial::var(1, 0)]);
        assert_eq!(c.torsion_degrees, vec![0]);
        assert!(c.is_torsion && !c.is_free);
        assert_eq!(c.hilbert(4), vec![1, 0, 0, 0, 0]);
        assert!(is_torsion(&m).unwrap());
        let d = duality_check(&m).unwrap();
        assert!(d.perfect && d.pairing_rank == 0);
    }

    #[test]
    fn classification_hilbert_for_free_module() {
        let c = ModuleClassification::new(vec![2, 0], vec![]);
        assert_eq!(c.hilbert(5), vec![1, 0, 2, 0, 2, 0]);
        assert!(c.is_free && c.is_reflexive && c.is_torsion_free && !c.is_torsion);
    }

    #[test]
    fn integration_requires_compactness() {
        let mut m = circle_free();
        m.compact = false;
        assert!(matches!(integrate(&m, &m.basis_element(1)), Err(Error::NotCompact(_))));
    }

    #[test]
    fn multivariate_classification_rejected() {
        let m = InvariantModel::skeleton("p", 2, vec![Generator::new("1", 0)], 0);
        assert!(matches!(classify_rank1(&m), Err(Error::UnsupportedRank { .. })));
    }
}
