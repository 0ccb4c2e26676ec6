//! Model maps, pullback on cohomology, Gysin morphisms from the adjunction
//! identity, Thom class extension and restriction to subtori.

use serde::Serialize;

use crate::algebra::{
    rank_and_solve, rat, solve_q, Matrix, Polynomial, Rational, RationalFunction, Ring, SolveOutcome,
};
use crate::duality::{integrate, pairing_on, Pairing};
use crate::error::{Error, Result};
use crate::gcomplex::{
    cartan_differential, cohomology_generic, ensure_valid, EquivariantElement, GenericCohomology, InvariantModel,
    NamedClass,
};

/// Equivariant map `f: source → target` given by its pullback on
/// generators: entry `(i, j)` is the coefficient of source generator `i`
/// in `f*(target generator j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelMap {
    pub name: String,
    pub source: InvariantModel,
    pub target: InvariantModel,
    pub pullback: Matrix<Rational>,
    pub proper: bool,
}

impl ModelMap {
    pub fn new(name: &str, source: InvariantModel, target: InvariantModel, pullback: Matrix<Rational>) -> Result<Self> {
        if source.torus_rank != target.torus_rank {
            return Err(Error::Dimension(format!(
                "map between torus ranks {} and {}",
                source.torus_rank, target.torus_rank
            )));
        }
        if pullback.rows() != source.dim() || pullback.cols() != target.dim() {
            return Err(Error::Dimension(format!(
                "pullback is {}x{}, expected {}x{}",
                pullback.rows(),
                pullback.cols(),
                source.dim(),
                target.dim()
            )));
        }
        let proper = source.compact;
        Ok(ModelMap { name: name.to_string(), source, target, pullback, proper })
    }

    pub fn identity(m: &InvariantModel) -> Self {
        ModelMap {
            name: format!("id_{}", m.name),
            source: m.clone(),
            target: m.clone(),
            pullback: Matrix::identity(m.dim(), rat(0)),
            proper: m.compact,
        }
    }

    /// Constant map `m → point`; the point's unit pulls back to the unit.
    pub fn constant(m: &InvariantModel, point: &InvariantModel) -> Result<Self> {
        let (Some(u_m), Some(u_p)) = (m.unit, point.unit) else {
            return Err(Error::Precondition("constant map needs units on both models".into()));
        };
        let mut p = Matrix::new(m.dim(), point.dim(), rat(0));
        p.set(u_m, u_p, rat(1));
        Self::new(&format!("const_{}", m.name), m.clone(), point.clone(), p)
    }

    /// Inclusion of the fixed point with the given index: pullback is the
    /// point's evaluation functional.
    pub fn fixed_point_inclusion(m: &InvariantModel, index: usize, point: &InvariantModel) -> Result<Self> {
        let fp = m
            .fixed_points
            .get(index)
            .ok_or_else(|| Error::Precondition(format!("model `{}` has no fixed point #{index}", m.name)))?;
        let u_p = point.unit.ok_or_else(|| Error::Precondition("point model has no unit".into()))?;
        let mut p = Matrix::new(point.dim(), m.dim(), rat(0));
        for (j, e) in fp.evaluation.iter().enumerate() {
            p.set(u_p, j, e.clone());
        }
        Self::new(&format!("{}->{}", fp.name, m.name), point.clone(), m.clone(), p)
    }

    /// `g ∘ self`, pulling back through `g` first.
    pub fn then(&self, g: &ModelMap) -> Result<Self> {
        if self.target.dim() != g.source.dim() {
            return Err(Error::Dimension("maps are not composable".into()));
        }
        Self::new(
            &format!("{}∘{}", g.name, self.name),
            self.source.clone(),
            g.target.clone(),
            self.pullback.mul(&g.pullback),
        )
    }

    pub fn pull(&self, x: &EquivariantElement) -> Result<EquivariantElement> {
        self.target.check_element(x)?;
        Ok(x.map_generators(&self.pullback))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MapViolation {
    pub relation: String,
    pub witness: String,
    pub residual: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct MapReport {
    pub map: String,
    pub violations: Vec<MapViolation>,
}

impl MapReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `f*∘d = d∘f*`, `f*∘cᵢ = cᵢ∘f*`, degree preservation and units.
pub fn validate_map(f: &ModelMap) -> Result<MapReport> {
    let (s, t, p) = (&f.source, &f.target, &f.pullback);
    if p.rows() != s.dim() || p.cols() != t.dim() || s.torus_rank != t.torus_rank {
        return Err(Error::Dimension(format!("map `{}` does not match its models", f.name)));
    }
    let mut out = MapReport { map: f.name.clone(), violations: Vec::new() };
    let render = |col: Vec<Rational>| -> Vec<String> {
        col.iter()
            .enumerate()
            .filter(|(_, c)| !Ring::is_zero(*c))
            .map(|(i, c)| format!("{}: {}", s.gen_name(i), c))
            .collect()
    };
    let mut compare = |relation: &str, lhs: Matrix<Rational>, rhs: Matrix<Rational>| {
        let diff = lhs.sub(&rhs);
        for j in 0..diff.cols() {
            let col = diff.column(j);
            if col.iter().any(|c| !Ring::is_zero(c)) {
                out.violations.push(MapViolation {
                    relation: relation.to_string(),
                    witness: t.gen_name(j).to_string(),
                    residual: render(col),
                });
            }
        }
    };
    compare("f*∘d = d∘f*", p.mul(&t.d), s.d.mul(p));
    for (k, (cs, ct)) in s.contractions.iter().zip(&t.contractions).enumerate() {
        let label =
            if s.torus_rank == 1 { "f*∘c = c∘f*".to_string() } else { format!("f*∘c{0} = c{0}∘f*", k + 1) };
        compare(&label, p.mul(ct), cs.mul(p));
    }
    for j in 0..t.dim() {
        let bad: Vec<Rational> =
            (0..s.dim()).map(|i| if s.degree(i) == t.degree(j) { rat(0) } else { p.get(i, j).clone() }).collect();
        if bad.iter().any(|c| !Ring::is_zero(c)) {
            out.violations.push(MapViolation {
                relation: "degree 0".into(),
                witness: t.gen_name(j).to_string(),
                residual: render(bad),
            });
        }
    }
    if let (Some(us), Some(ut)) = (s.unit, t.unit) {
        let col = p.column(ut);
        let ok = col.iter().enumerate().all(|(i, c)| *c == if i == us { rat(1) } else { rat(0) });
        if !ok {
            out.violations.push(MapViolation {
                relation: "f*(1) = 1".into(),
                witness: t.gen_name(ut).to_string(),
                residual: render(col),
            });
        }
    }
    Ok(out)
}

fn ensure_valid_map(f: &ModelMap) -> Result<()> {
    ensure_valid(&f.source)?;
    ensure_valid(&f.target)?;
    let r = validate_map(f)?;
    if r.is_valid() {
        Ok(())
    } else {
        let v = &r.violations[0];
        Err(Error::Precondition(format!("map `{}` violates {} at {}", f.name, v.relation, v.witness)))
    }
}

fn pullback_with(f: &ModelMap, cs: &GenericCohomology, ct: &GenericCohomology) -> Result<Matrix<RationalFunction>> {
    let n = f.source.torus_rank;
    let mut out = Matrix::new(cs.reps.len(), ct.reps.len(), RationalFunction::zero(n));
    for (j, rep) in ct.reps.iter().enumerate() {
        let img = f.pull(&rep.element)?;
        let coords = cs.express_element(&img).map_err(|_| {
            Error::Inconsistent(format!("pullback of target class #{j} does not decompose in the source basis"))
        })?;
        for (i, c) in coords.into_iter().enumerate() {
            out.set(i, j, c);
        }
    }
    Ok(out)
}

/// Matrix of `f*` from the target's generic basis to the source's.
pub fn pullback_cohomology(f: &ModelMap) -> Result<Matrix<RationalFunction>> {
    ensure_valid_map(f)?;
    pullback_with(f, &cohomology_generic(&f.source)?, &cohomology_generic(&f.target)?)
}

/// `f_!` on generic bases (target reps × source reps), with the degree
/// shift `d_source − d_target` kept separately from the entries.
#[derive(Clone, Debug)]
pub struct GysinMatrix {
    pub matrix: Matrix<RationalFunction>,
    pub degree_shift: i64,
    pub source_basis: GenericCohomology,
    pub target_basis: GenericCohomology,
    pub source_pairing: Pairing,
    pub target_pairing: Pairing,
}

/// Solves `⟨f*βⱼ, αᵢ⟩_M = ⟨βⱼ, X αᵢ⟩_N` for `X`.
pub fn gysin_localized(f: &ModelMap) -> Result<GysinMatrix> {
    ensure_valid_map(f)?;
    for m in [&f.source, &f.target] {
        if !m.compact {
            return Err(Error::NotCompact(m.name.clone()));
        }
    }
    let n = f.source.torus_rank;
    let cs = cohomology_generic(&f.source)?;
    let ct = cohomology_generic(&f.target)?;
    let pm = pairing_on(&f.source, &cs)?;
    let pn = pairing_on(&f.target, &ct)?;
    let fstar = pullback_with(f, &cs, &ct)?;
    let rhs = fstar.transpose().mul(&pm.matrix);
    let (kt, ks) = (ct.reps.len(), cs.reps.len());
    let mut x = Matrix::new(kt, ks, RationalFunction::zero(n));
    if rank_and_solve(&pn.matrix, None)?.rank != kt {
        return Err(Error::DegeneratePairing(f.target.name.clone()));
    }
    for i in 0..ks {
        let b = rhs.column(i);
        match rank_and_solve(&pn.matrix, Some(&b))?.solution {
            SolveOutcome::Consistent(sol) => {
                for (l, v) in sol.into_iter().enumerate() {
                    x.set(l, i, v);
                }
            }
            _ => return Err(Error::DegeneratePairing(f.target.name.clone())),
        }
    }
    let g = GysinMatrix {
        matrix: x,
        degree_shift: f.source.top_degree as i64 - f.target.top_degree as i64,
        source_basis: cs,
        target_basis: ct,
        source_pairing: pm,
        target_pairing: pn,
    };
    let res = adjunction_residuals(f, &g)?;
    if !res.is_zero() {
        return Err(Error::Inconsistent(format!("adjunction residual nonzero for `{}`", f.name)));
    }
    Ok(g)
}

/// `∫_M f*βⱼ ∧ αᵢ − ∫_N βⱼ ∧ f_!αᵢ`, recomputed from the cocycles
/// themselves rather than from the stored matrices.
pub fn adjunction_residuals(f: &ModelMap, g: &GysinMatrix) -> Result<Matrix<RationalFunction>> {
    let n = f.source.torus_rank;
    let (ct, cs) = (&g.target_basis, &g.source_basis);
    let mut out = Matrix::new(ct.reps.len(), cs.reps.len(), RationalFunction::zero(n));
    for (j, beta) in ct.reps.iter().enumerate() {
        let pulled = f.pull(&beta.element)?;
        for (i, alpha) in cs.reps.iter().enumerate() {
            let lhs = integrate(&f.source, &f.source.wedge(&pulled, &alpha.element)?)?;
            let mut rhs = RationalFunction::zero(n);
            for (l, gamma) in ct.reps.iter().enumerate() {
                let c = g.matrix.get(l, i);
                if c.is_zero() {
                    continue;
                }
                let v = integrate(&f.target, &f.target.wedge(&beta.element, &gamma.element)?)?;
                rhs = rhs.plus(&c.times(&RationalFunction::from_poly(v)));
            }
            out.set(j, i, RationalFunction::from_poly(lhs).minus(&rhs));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjectionResidual {
    pub alpha: String,
    pub beta: String,
    pub residual: Vec<RationalFunction>,
}

impl ProjectionResidual {
    pub fn is_zero(&self) -> bool {
        self.residual.iter().all(|r| r.is_zero())
    }
}

/// Default samples: every pair of basis cocycles, plus `u₁·1` in the
/// target against every source cocycle when the target has a unit.
pub fn default_samples(f: &ModelMap, g: &GysinMatrix) -> Vec<(EquivariantElement, EquivariantElement)> {
    let mut out = Vec::new();
    for a in &g.target_basis.reps {
        for b in &g.source_basis.reps {
            out.push((a.element.clone(), b.element.clone()));
        }
    }
    if let (Some(u), true) = (f.target.unit, f.target.torus_rank > 0) {
        let alpha = f.target.basis_element(u).mul_poly(&Polynomial::var(f.target.torus_rank, 0));
        for b in &g.source_basis.reps {
            out.push((alpha.clone(), b.element.clone()));
        }
    }
    out
}

/// `f_!(f*α ∪ β) − α ∪ f_!β` in the target basis for each sample
/// `(α in target, β in source)`.
pub fn projection_formula_check(
    f: &ModelMap,
    g: &GysinMatrix,
    samples: &[(EquivariantElement, EquivariantElement)],
) -> Result<Vec<ProjectionResidual>> {
    let n = f.source.torus_rank;
    let (ct, cs) = (&g.target_basis, &g.source_basis);
    let mut out = Vec::new();
    for (alpha, beta) in samples {
        let left_src = f.source.wedge(&f.pull(alpha)?, beta)?;
        let y = cs.express_element(&left_src)?;
        let lhs = g.matrix.apply(&y);
        let fb = g.matrix.apply(&cs.express_element(beta)?);
        let mut rhs = vec![RationalFunction::zero(n); ct.reps.len()];
        for (l, gamma) in ct.reps.iter().enumerate() {
            if fb[l].is_zero() {
                continue;
            }
            let z = ct.express_element(&f.target.wedge(alpha, &gamma.element)?)?;
            for (r, zc) in rhs.iter_mut().zip(z) {
                *r = r.plus(&fb[l].times(&zc));
            }
        }
        out.push(ProjectionResidual {
            alpha: f.target.format_element(alpha),
            beta: f.source.format_element(beta),
            residual: lhs.iter().zip(&rhs).map(|(a, b)| a.minus(b)).collect(),
        });
    }
    Ok(out)
}

/// Extends a `d`-closed rational cocycle of degree `k` to a Cartan cocycle
/// `Φ = Σ_a u^a ⊗ φ_a` by solving `d φ_a = −Σᵢ cᵢ φ_{a−eᵢ}` level by level.
pub fn thom_extend(m: &InvariantModel, phi_top: &[Rational]) -> Result<EquivariantElement> {
    ensure_valid(m)?;
    let dim = m.dim();
    if phi_top.len() != dim {
        return Err(Error::Dimension(format!("cocycle has {} entries, model has {dim} generators", phi_top.len())));
    }
    let support: Vec<usize> = (0..dim).filter(|&i| !Ring::is_zero(&phi_top[i])).collect();
    let Some(&first) = support.first() else {
        return Ok(m.zero_element());
    };
    let k = m.degree(first) as i64;
    if support.iter().any(|&i| m.degree(i) as i64 != k) {
        return Err(Error::Precondition("top component is not homogeneous".into()));
    }
    if m.d.apply(phi_top).iter().any(|c| !Ring::is_zero(c)) {
        return Err(Error::Precondition("top component is not d-closed".into()));
    }
    let n = m.torus_rank;
    let by_degree = |deg: i64| -> Vec<usize> { (0..dim).filter(|&i| m.degree(i) as i64 == deg).collect() };
    let mut out = EquivariantElement::from_rational(n, phi_top);
    let mut level: Vec<(Vec<u32>, Vec<Rational>)> = vec![(vec![0; n], phi_top.to_vec())];
    let mut l = 1i64;
    while !level.is_empty() {
        let target_deg = k - 2 * l;
        let rows = by_degree(target_deg + 1);
        let cols = by_degree(target_deg);
        let dsub = m.d.select(&rows, &cols);
        let mut next = Vec::new();
        for a in crate::gcomplex::monomials(n, l as u32) {
            let mut rhs = vec![rat(0); dim];
            for i in 0..n {
                if a[i] == 0 {
                    continue;
                }
                let mut prev = a.clone();
                prev[i] -= 1;
                if let Some((_, phi)) = level.iter().find(|(b, _)| *b == prev) {
                    for (r, v) in rhs.iter_mut().zip(m.contractions[i].apply(phi)) {
                        *r -= v;
                    }
                }
            }
            if rhs.iter().all(Ring::is_zero) {
                continue;
            }
            let b: Vec<Rational> = rows.iter().map(|&g| rhs[g].clone()).collect();
            let off_rows = (0..dim).any(|g| !rows.contains(&g) && !Ring::is_zero(&rhs[g]));
            let sol = if off_rows || cols.is_empty() { None } else { solve_q(&dsub, &b) };
            let Some(x) = sol else {
                return Err(Error::ThomObstruction { degree: target_deg });
            };
            let mut phi = vec![rat(0); dim];
            for (&g, v) in cols.iter().zip(x) {
                phi[g] = v;
            }
            let mono = Polynomial::monomial(n, a.clone(), rat(1));
            for (g, v) in phi.iter().enumerate() {
                if !Ring::is_zero(v) {
                    out.coeffs[g] = &out.coeffs[g] + &mono.scale(v);
                }
            }
            next.push((a, phi));
        }
        level = next;
        l += 1;
    }
    debug_assert!(cartan_differential(m, &out).map(|d| d.is_zero()).unwrap_or(false));
    Ok(out)
}

fn check_restriction_matrix(n: usize, a: &[Vec<i64>], r: usize) -> Result<()> {
    if a.len() != n || a.iter().any(|row| row.len() != r) {
        return Err(Error::Dimension(format!("restriction matrix must be {n}x{r}")));
    }
    Ok(())
}

/// Restriction along `v ↦ A v`: `c'_j = Σᵢ A_ij cᵢ`, classes transported
/// by `uᵢ ↦ Σⱼ A_ij vⱼ`, tangent weights restricted.
pub fn restrict_subtorus(m: &InvariantModel, a: &[Vec<i64>], r: usize) -> Result<InvariantModel> {
    check_restriction_matrix(m.torus_rank, a, r)?;
    let zero = Matrix::new(m.dim(), m.dim(), rat(0));
    let contractions = (0..r)
        .map(|j| m.contractions.iter().zip(a).fold(zero.clone(), |acc, (c, row)| acc.add(&c.scale(&rat(row[j])))))
        .collect();
    let mut out = m.clone();
    out.name = format!("{}|rank{}", m.name, r);
    out.torus_rank = r;
    out.contractions = contractions;
    out.classes = m
        .classes
        .iter()
        .map(|c| NamedClass { name: c.name.clone(), element: c.element.substitute_linear(a, r) })
        .collect();
    for p in &mut out.fixed_points {
        p.tangent = p.tangent.restrict(a, r);
    }
    Ok(out)
}

/// The same map between the restricted models.
pub fn restrict_map(f: &ModelMap, a: &[Vec<i64>], r: usize) -> Result<ModelMap> {
    ModelMap::new(
        &format!("{}|rank{}", f.name, r),
        restrict_subtorus(&f.source, a, r)?,
        restrict_subtorus(&f.target, a, r)?,
        f.pullback.clone(),
    )
}

/// Matrix of the restriction `H_T(m) → H_{T'}(m|A)` on generic bases.
pub fn restriction_on_cohomology(
    basis: &GenericCohomology,
    restricted_basis: &GenericCohomology,
    a: &[Vec<i64>],
    r: usize,
) -> Result<Matrix<RationalFunction>> {
    let mut out = Matrix::new(restricted_basis.reps.len(), basis.reps.len(), RationalFunction::zero(r));
    for (j, rep) in basis.reps.iter().enumerate() {
        let coords = restricted_basis.express_element(&rep.element.substitute_linear(a, r))?;
        for (i, c) in coords.into_iter().enumerate() {
            out.set(i, j, c);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct RestrictionCommutation {
    pub gysin_after_restriction: Matrix<RationalFunction>,
    pub restriction_after_gysin: Matrix<RationalFunction>,
    pub commutes: bool,
}

/// Compares `f'_! ∘ R_M` with `R_N ∘ f_!`, where `f'` is `f` restricted
/// along `A` and `R` the restriction maps on generic cohomology.
pub fn gysin_restriction_check(f: &ModelMap, a: &[Vec<i64>], r: usize) -> Result<RestrictionCommutation> {
    let g = gysin_localized(f)?;
    let fr = restrict_map(f, a, r)?;
    let gr = gysin_localized(&fr)?;
    let rm = restriction_on_cohomology(&g.source_basis, &gr.source_basis, a, r)?;
    let rn = restriction_on_cohomology(&g.target_basis, &gr.target_basis, a, r)?;
    let subst = {
        let mut s = Matrix::new(g.matrix.rows(), g.matrix.cols(), RationalFunction::zero(r));
        for i in 0..g.matrix.rows() {
            for j in 0..g.matrix.cols() {
                let v = g
                    .matrix
                    .get(i, j)
                    .substitute_linear(a, r)
                    .ok_or_else(|| Error::Precondition("Gysin entry has a pole on the subtorus".into()))?;
                s.set(i, j, v);
            }
        }
        s
    };
    let lhs = gr.matrix.mul(&rm);
    let rhs = rn.mul(&subst);
    let commutes = lhs == rhs;
    Ok(RestrictionCommutation { gysin_after_restriction: lhs, restriction_after_gysin: rhs, commutes })
}
