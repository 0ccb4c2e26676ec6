//! Finite invariant models of torus actions and their Cartan complexes.
//!
//! A model is a finite graded ℚ-complex `(C, d)` with contraction operators
//! `c_1..c_n` for the torus generators. Since only invariant models are
//! accepted, the Cartan complex is `ℚ[u1..un] ⊗ C` with differential
//! `d_T = 1⊗d + Σ u_i ⊗ c_i`, the variables sitting in degree 2.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{
    clear_denominators, generic_specialized_rank, kernel_q, rank_and_solve, rank_and_solve_poly, rank_q, rat, solve_q,
    Matrix, Monomial, Polynomial, Rational, RationalFunction, Ring, SolveOutcome,
};
use crate::error::{Error, Result};
use crate::euler::LinearRepresentation;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
}

impl Generator {
    pub fn new(name: &str, degree: u32) -> Self {
        Generator { name: name.to_string(), degree }
    }
}

/// Isolated fixed point attached to a model: tangent representation plus the
/// values of the degree-0 generators at the point (the pullback to the
/// point, which kills every positive-degree generator).
#[derive(Clone, Debug, PartialEq)]
pub struct FixedPoint {
    pub name: String,
    pub tangent: LinearRepresentation,
    pub evaluation: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NamedClass {
    pub name: String,
    pub element: EquivariantElement,
}

/// Products of generators: `(a, b) ↦ Σ coeff·generator`.
pub type ProductTable = BTreeMap<(usize, usize), Vec<(usize, Rational)>>;

/// Finite stand-in for the invariant forms `(Ω(M)^T, d, c)`.
///
/// Matrices act on column vectors of generator coefficients: entry `(i, j)`
/// of `d` is the coefficient of generator `i` in `d(generator j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantModel {
    pub name: String,
    pub torus_rank: usize,
    pub generators: Vec<Generator>,
    pub d: Matrix<Rational>,
    pub contractions: Vec<Matrix<Rational>>,
    /// Partial: products absent from the table are unknown, except products
    /// with the unit and products landing above the top degree (zero).
    pub products: ProductTable,
    pub unit: Option<usize>,
    pub top_degree: u32,
    pub integration: BTreeMap<usize, Rational>,
    pub compact: bool,
    pub fixed_points: Vec<FixedPoint>,
    pub classes: Vec<NamedClass>,
    pub notes: Vec<String>,
}

impl InvariantModel {
    /// Empty skeleton: all maps zero, no products, no fixed points.
    pub fn skeleton(name: &str, torus_rank: usize, generators: Vec<Generator>, top_degree: u32) -> Self {
        let n = generators.len();
        InvariantModel {
            name: name.to_string(),
            torus_rank,
            d: Matrix::new(n, n, rat(0)),
            contractions: vec![Matrix::new(n, n, rat(0)); torus_rank],
            generators,
            products: BTreeMap::new(),
            unit: None,
            top_degree,
            integration: BTreeMap::new(),
            compact: false,
            fixed_points: Vec::new(),
            classes: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.generators[i].degree
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn gen_name(&self, i: usize) -> &str {
        &self.generators[i].name
    }

    pub fn class(&self, name: &str) -> Option<&EquivariantElement> {
        self.classes.iter().find(|c| c.name == name).map(|c| &c.element)
    }

    pub fn zero_element(&self) -> EquivariantElement {
        EquivariantElement::zero(self.torus_rank, self.dim())
    }

    /// `1 ⊗ generator_i`.
    pub fn basis_element(&self, i: usize) -> EquivariantElement {
        EquivariantElement::basis(self.torus_rank, self.dim(), i)
    }

    /// Product of two generators, as a list of (generator, coefficient).
    pub fn product(&self, a: usize, b: usize) -> Result<Vec<(usize, Rational)>> {
        if self.unit == Some(a) {
            return Ok(vec![(b, rat(1))]);
        }
        if self.unit == Some(b) {
            return Ok(vec![(a, rat(1))]);
        }
        let (da, db) = (self.degree(a), self.degree(b));
        if da + db > self.top_degree {
            return Ok(Vec::new());
        }
        if let Some(v) = self.products.get(&(a, b)) {
            return Ok(v.clone());
        }
        if let Some(v) = self.products.get(&(b, a)) {
            let sign = if (da * db) % 2 == 1 { rat(-1) } else { rat(1) };
            return Ok(v.iter().map(|(g, c)| (*g, c * &sign)).collect());
        }
        Err(Error::MissingProduct(self.gen_name(a).to_string(), self.gen_name(b).to_string()))
    }

    /// Product of Cartan elements. Polynomial coefficients are even and
    /// commute with everything.
    pub fn wedge(&self, x: &EquivariantElement, y: &EquivariantElement) -> Result<EquivariantElement> {
        self.check_element(x)?;
        self.check_element(y)?;
        let mut out = self.zero_element();
        for (a, pa) in x.coeffs.iter().enumerate().filter(|(_, p)| !p.is_zero()) {
            for (b, pb) in y.coeffs.iter().enumerate().filter(|(_, p)| !p.is_zero()) {
                let prod = self.product(a, b)?;
                if prod.is_empty() {
                    continue;
                }
                let pab = pa * pb;
                for (g, c) in prod {
                    out.coeffs[g] = &out.coeffs[g] + &pab.scale(&c);
                }
            }
        }
        Ok(out)
    }

    pub fn check_element(&self, x: &EquivariantElement) -> Result<()> {
        if x.coeffs.len() != self.dim() || x.nvars != self.torus_rank {
            return Err(Error::ElementMismatch {
                model: self.name.clone(),
                reason: format!(
                    "element has {} components over {} variables, model has {} generators over {}",
                    x.coeffs.len(),
                    x.nvars,
                    self.dim(),
                    self.torus_rank
                ),
            });
        }
        Ok(())
    }

    /// Matrix of `d_T` on the free ℚ[u]-module spanned by the generators.
    pub fn cartan_matrix(&self) -> Matrix<Polynomial> {
        let n = self.torus_rank;
        Matrix::from_fn(self.dim(), self.dim(), Polynomial::zero(n), |i, j| {
            let mut p = Polynomial::constant(n, self.d.get(i, j).clone());
            for (k, c) in self.contractions.iter().enumerate() {
                let v = c.get(i, j);
                if !Ring::is_zero(v) {
                    p = p + Polynomial::var(n, k).scale(v);
                }
            }
            p
        })
    }

    /// Renders an element using generator names, e.g. `vol + u*t`.
    pub fn format_element(&self, x: &EquivariantElement) -> String {
        let parts: Vec<String> = x
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(i, p)| {
                let name = self.gen_name(i);
                if p.is_one() {
                    name.to_string()
                } else if p.num_terms() == 1 {
                    format!("{p}*{name}")
                } else {
                    format!("({p})*{name}")
                }
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Element of the Cartan complex: one polynomial coefficient per generator.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivariantElement {
    pub nvars: usize,
    pub coeffs: Vec<Polynomial>,
}

impl EquivariantElement {
    pub fn zero(nvars: usize, dim: usize) -> Self {
        EquivariantElement { nvars, coeffs: vec![Polynomial::zero(nvars); dim] }
    }

    pub fn basis(nvars: usize, dim: usize, i: usize) -> Self {
        let mut x = Self::zero(nvars, dim);
        x.coeffs[i] = Polynomial::one(nvars);
        x
    }

    pub fn from_rational(nvars: usize, v: &[Rational]) -> Self {
        EquivariantElement { nvars, coeffs: v.iter().map(|c| Polynomial::constant(nvars, c.clone())).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|p| p.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        EquivariantElement {
            nvars: self.nvars,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        EquivariantElement {
            nvars: self.nvars,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn mul_poly(&self, p: &Polynomial) -> Self {
        EquivariantElement { nvars: self.nvars, coeffs: self.coeffs.iter().map(|c| c * p).collect() }
    }

    /// Total degree `2·polydeg + generator degree`, if the element is
    /// homogeneous and nonzero.
    pub fn degree(&self, gens: &[Generator]) -> Option<i64> {
        let mut deg = None;
        for (p, g) in self.coeffs.iter().zip(gens) {
            for (m, _) in p.terms() {
                let d = 2 * m.iter().sum::<u32>() as i64 + g.degree as i64;
                match deg {
                    None => deg = Some(d),
                    Some(e) if e != d => return None,
                    _ => {}
                }
            }
        }
        deg
    }

    pub fn as_fraction_vector(&self) -> Vec<RationalFunction> {
        self.coeffs.iter().map(|p| RationalFunction::from_poly(p.clone())).collect()
    }

    /// Applies a rational generator map (e.g. a pullback) coefficientwise.
    pub fn map_generators(&self, m: &Matrix<Rational>) -> Self {
        assert_eq!(m.cols(), self.coeffs.len());
        let mut out = Self::zero(self.nvars, m.rows());
        for (j, p) in self.coeffs.iter().enumerate().filter(|(_, p)| !p.is_zero()) {
            for i in 0..m.rows() {
                let c = m.get(i, j);
                if !Ring::is_zero(c) {
                    out.coeffs[i] = &out.coeffs[i] + &p.scale(c);
                }
            }
        }
        out
    }

    pub fn substitute_linear(&self, a: &[Vec<i64>], r: usize) -> Self {
        EquivariantElement { nvars: r, coeffs: self.coeffs.iter().map(|p| p.substitute_linear(a, r)).collect() }
    }

    /// Splits into components by monomial: `Σ u^a ⊗ φ_a`.
    pub fn components(&self) -> BTreeMap<Monomial, Vec<Rational>> {
        let mut out: BTreeMap<Monomial, Vec<Rational>> = BTreeMap::new();
        let dim = self.coeffs.len();
        for (g, p) in self.coeffs.iter().enumerate() {
            for (m, c) in p.terms() {
                out.entry(m.clone()).or_insert_with(|| vec![rat(0); dim])[g] = c.clone();
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Validation

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Axiom {
    #[serde(rename = "degree")]
    Degree,
    #[serde(rename = "d∘d = 0")]
    DSquared,
    #[serde(rename = "d∘c + c∘d = 0")]
    DcPlusCd,
    #[serde(rename = "c∘c + c∘c = 0")]
    ContractionsAnticommute,
    #[serde(rename = "product degree")]
    ProductDegree,
    #[serde(rename = "graded commutativity")]
    GradedCommutativity,
    #[serde(rename = "unit")]
    Unit,
    #[serde(rename = "integration")]
    Integration,
    #[serde(rename = "top degree")]
    TopDegree,
    #[serde(rename = "fixed point")]
    FixedPoint,
    #[serde(rename = "class cocycle")]
    ClassCocycle,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::Degree => "degree",
            Axiom::DSquared => "d∘d = 0",
            Axiom::DcPlusCd => "d∘c + c∘d = 0",
            Axiom::ContractionsAnticommute => "c∘c + c∘c = 0",
            Axiom::ProductDegree => "product degree",
            Axiom::GradedCommutativity => "graded commutativity",
            Axiom::Unit => "unit",
            Axiom::Integration => "integration",
            Axiom::TopDegree => "top degree",
            Axiom::FixedPoint => "fixed point",
            Axiom::ClassCocycle => "class cocycle",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    /// Generator names (or fixed-point / class names) witnessing the failure.
    pub witnesses: Vec<String>,
    /// Offending vector, rendered `generator: coefficient`.
    pub residual: Vec<String>,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub model: String,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return writeln!(f, "model `{}`: valid", self.model);
        }
        writeln!(f, "model `{}`: {} violation(s)", self.model, self.violations.len())?;
        for v in &self.violations {
            writeln!(
                f,
                "  [{}] witness {}: {} (residual: {})",
                v.axiom,
                v.witnesses.join(", "),
                v.detail,
                if v.residual.is_empty() { "-".to_string() } else { v.residual.join(", ") }
            )?;
        }
        Ok(())
    }
}

fn render_residual(m: &InvariantModel, v: &[Rational]) -> Vec<String> {
    v.iter().enumerate().filter(|(_, c)| !Ring::is_zero(*c)).map(|(i, c)| format!("{}: {}", m.gen_name(i), c)).collect()
}

fn structural(m: &InvariantModel) -> Result<()> {
    let n = m.dim();
    let square = |mat: &Matrix<Rational>, what: &str| {
        if mat.rows() != n || mat.cols() != n {
            Err(Error::Dimension(format!("{what} is {}x{}, expected {n}x{n}", mat.rows(), mat.cols())))
        } else {
            Ok(())
        }
    };
    square(&m.d, "d")?;
    if m.contractions.len() != m.torus_rank {
        return Err(Error::Dimension(format!(
            "{} contraction operators for torus rank {}",
            m.contractions.len(),
            m.torus_rank
        )));
    }
    for (k, c) in m.contractions.iter().enumerate() {
        square(c, &format!("c{}", k + 1))?;
    }
    let idx = |i: usize, what: &str| {
        if i >= n {
            Err(Error::Dimension(format!("{what} refers to generator index {i}, model has {n}")))
        } else {
            Ok(())
        }
    };
    for (&(a, b), v) in &m.products {
        idx(a, "product table")?;
        idx(b, "product table")?;
        for (g, _) in v {
            idx(*g, "product table")?;
        }
    }
    if let Some(u) = m.unit {
        idx(u, "unit")?;
    }
    for &g in m.integration.keys() {
        idx(g, "integration")?;
    }
    for p in &m.fixed_points {
        if p.evaluation.len() != n {
            return Err(Error::Dimension(format!(
                "fixed point `{}` evaluates {} generators, model has {n}",
                p.name,
                p.evaluation.len()
            )));
        }
        if p.tangent.torus_rank != m.torus_rank {
            return Err(Error::Dimension(format!(
                "fixed point `{}` has tangent weights of rank {}, model has rank {}",
                p.name, p.tangent.torus_rank, m.torus_rank
            )));
        }
    }
    for c in &m.classes {
        m.check_element(&c.element)?;
    }
    Ok(())
}

/// Checks every model axiom; dimension problems are an `Err`, axiom
/// failures are collected into the report with witnesses.
pub fn validate_model(m: &InvariantModel) -> Result<ValidationReport> {
    structural(m)?;
    let n = m.dim();
    let mut out = ValidationReport { model: m.name.clone(), violations: Vec::new() };
    let mut push = |axiom, witnesses: Vec<String>, residual: Vec<String>, detail: String| {
        out.violations.push(Violation { axiom, witnesses, residual, detail })
    };
    let zero_col = |mat: &Matrix<Rational>, j: usize| (0..n).all(|i| Ring::is_zero(mat.get(i, j)));

    for j in 0..n {
        if m.degree(j) > m.top_degree {
            push(
                Axiom::TopDegree,
                vec![m.gen_name(j).into()],
                vec![],
                format!("degree {} exceeds top degree {}", m.degree(j), m.top_degree),
            );
        }
    }

    let mut ops: Vec<(String, &Matrix<Rational>, i64)> = vec![("d".into(), &m.d, 1)];
    for (k, c) in m.contractions.iter().enumerate() {
        ops.push((format!("c{}", k + 1), c, -1));
    }
    for (label, mat, shift) in &ops {
        for j in 0..n {
            let bad: Vec<Rational> = (0..n)
                .map(|i| {
                    let ok = m.degree(i) as i64 == m.degree(j) as i64 + shift;
                    if ok {
                        rat(0)
                    } else {
                        mat.get(i, j).clone()
                    }
                })
                .collect();
            if bad.iter().any(|c| !Ring::is_zero(c)) {
                push(
                    Axiom::Degree,
                    vec![m.gen_name(j).into()],
                    render_residual(m, &bad),
                    format!("{label} does not shift degree by {shift}"),
                );
            }
        }
    }

    let dd = m.d.mul(&m.d);
    for j in (0..n).filter(|&j| !zero_col(&dd, j)) {
        push(Axiom::DSquared, vec![m.gen_name(j).into()], render_residual(m, &dd.column(j)), "d(d x) ≠ 0".into());
    }
    for (k, c) in m.contractions.iter().enumerate() {
        let h = m.d.mul(c).add(&c.mul(&m.d));
        for j in (0..n).filter(|&j| !zero_col(&h, j)) {
            push(
                Axiom::DcPlusCd,
                vec![m.gen_name(j).into()],
                render_residual(m, &h.column(j)),
                format!("(d∘c{0} + c{0}∘d) x ≠ 0", k + 1),
            );
        }
    }
    for (k, ck) in m.contractions.iter().enumerate() {
        for (l, cl) in m.contractions.iter().enumerate().skip(k) {
            let h = ck.mul(cl).add(&cl.mul(ck));
            for j in (0..n).filter(|&j| !zero_col(&h, j)) {
                push(
                    Axiom::ContractionsAnticommute,
                    vec![m.gen_name(j).into()],
                    render_residual(m, &h.column(j)),
                    format!("(c{}∘c{} + c{}∘c{}) x ≠ 0", k + 1, l + 1, l + 1, k + 1),
                );
            }
        }
    }

    for (&(a, b), v) in &m.products {
        for (g, c) in v {
            if !Ring::is_zero(c) && m.degree(*g) != m.degree(a) + m.degree(b) {
                push(
                    Axiom::ProductDegree,
                    vec![m.gen_name(a).into(), m.gen_name(b).into()],
                    vec![format!("{}: {}", m.gen_name(*g), c)],
                    "product lands in the wrong degree".into(),
                );
            }
        }
        let dense = |v: &[(usize, Rational)]| {
            let mut out = vec![rat(0); n];
            for (g, c) in v {
                out[*g] += c;
            }
            out
        };
        let sign = if (m.degree(a) * m.degree(b)) % 2 == 1 { rat(-1) } else { rat(1) };
        let lhs = dense(v);
        let partner = if a == b {
            Some(v)
        } else if a < b {
            m.products.get(&(b, a))
        } else {
            None
        };
        if let Some(w) = partner {
            let rhs: Vec<Rational> = dense(w).iter().map(|c| c * &sign).collect();
            let diff: Vec<Rational> = lhs.iter().zip(&rhs).map(|(x, y)| x - y).collect();
            if diff.iter().any(|c| !Ring::is_zero(c)) {
                push(
                    Axiom::GradedCommutativity,
                    vec![m.gen_name(a).into(), m.gen_name(b).into()],
                    render_residual(m, &diff),
                    "a·b ≠ (−1)^{|a||b|} b·a".into(),
                );
            }
        }
    }

    if let Some(u) = m.unit {
        let mut bad = m.degree(u) != 0 || !zero_col(&m.d, u);
        bad |= m.contractions.iter().any(|c| !zero_col(c, u));
        if bad {
            push(
                Axiom::Unit,
                vec![m.gen_name(u).into()],
                vec![],
                "unit must be a degree-0 cocycle killed by every contraction".into(),
            );
        }
    }

    for (&g, c) in &m.integration {
        if m.degree(g) != m.top_degree && !Ring::is_zero(c) {
            push(
                Axiom::Integration,
                vec![m.gen_name(g).into()],
                vec![format!("{}: {}", m.gen_name(g), c)],
                "integration functional is nonzero off the top degree".into(),
            );
        }
    }

    for p in &m.fixed_points {
        let off: Vec<Rational> =
            (0..n).map(|i| if m.degree(i) == 0 { rat(0) } else { p.evaluation[i].clone() }).collect();
        if off.iter().any(|c| !Ring::is_zero(c)) {
            push(
                Axiom::FixedPoint,
                vec![p.name.clone()],
                render_residual(m, &off),
                "restriction to a point is nonzero in positive degree".into(),
            );
        }
        for (k, c) in m.contractions.iter().enumerate() {
            // eval ∘ c_k must vanish: the vector field is zero at the point
            let row: Vec<Rational> =
                (0..n).map(|j| (0..n).fold(rat(0), |acc, i| acc + &p.evaluation[i] * c.get(i, j))).collect();
            if row.iter().any(|c| !Ring::is_zero(c)) {
                push(
                    Axiom::FixedPoint,
                    vec![p.name.clone()],
                    render_residual(m, &row),
                    format!("restriction does not commute with c{}", k + 1),
                );
            }
        }
        let dim = p.tangent.real_dimension();
        if dim != m.top_degree as u64 {
            push(
                Axiom::FixedPoint,
                vec![p.name.clone()],
                vec![],
                format!("tangent representation has real dimension {dim}, top degree is {}", m.top_degree),
            );
        }
        if let Some(u) = m.unit {
            if p.evaluation[u] != rat(1) {
                push(Axiom::FixedPoint, vec![p.name.clone()], vec![], "unit does not restrict to 1".into());
            }
        }
    }

    for c in &m.classes {
        let dx = cartan_differential_unchecked(m, &c.element);
        if !dx.is_zero() {
            push(
                Axiom::ClassCocycle,
                vec![c.name.clone()],
                vec![m.format_element(&dx)],
                "named class is not a Cartan cocycle".into(),
            );
        }
    }
    Ok(out)
}

/// Validates and turns violations into an error.
pub fn ensure_valid(m: &InvariantModel) -> Result<()> {
    let r = validate_model(m)?;
    if r.is_valid() {
        Ok(())
    } else {
        Err(Error::Invalid(r))
    }
}

// ---------------------------------------------------------------------------
// Cartan differential

fn cartan_differential_unchecked(m: &InvariantModel, x: &EquivariantElement) -> EquivariantElement {
    let n = m.torus_rank;
    let mut out = m.zero_element();
    for (j, p) in x.coeffs.iter().enumerate().filter(|(_, p)| !p.is_zero()) {
        for i in 0..m.dim() {
            let dij = m.d.get(i, j);
            if !Ring::is_zero(dij) {
                out.coeffs[i] = &out.coeffs[i] + &p.scale(dij);
            }
            for (k, c) in m.contractions.iter().enumerate() {
                let cij = c.get(i, j);
                if !Ring::is_zero(cij) {
                    out.coeffs[i] = &out.coeffs[i] + &(&Polynomial::var(n, k) * p).scale(cij);
                }
            }
        }
    }
    out
}

/// `d_T(P ⊗ ω) = P ⊗ dω + Σ_i u_i P ⊗ c_i ω`.
pub fn cartan_differential(m: &InvariantModel, x: &EquivariantElement) -> Result<EquivariantElement> {
    m.check_element(x)?;
    Ok(cartan_differential_unchecked(m, x))
}

// ---------------------------------------------------------------------------
// Generic (fraction-field) cohomology

#[derive(Clone, Debug, PartialEq)]
pub struct CocycleRep {
    pub element: EquivariantElement,
    pub degree: i64,
}

/// Cohomology of the Cartan complex after inverting the torus variables.
/// The grading collapses to parity.
#[derive(Clone, Debug)]
pub struct GenericCohomology {
    pub even_rank: usize,
    pub odd_rank: usize,
    /// Even representatives first, then odd.
    pub reps: Vec<CocycleRep>,
    pub boundary: Matrix<Polynomial>,
}

impl GenericCohomology {
    pub fn total_rank(&self) -> usize {
        self.even_rank + self.odd_rank
    }

    /// Coordinates of a cocycle (fraction-field coefficients) in the
    /// representative basis, modulo coboundaries.
    pub fn express(&self, x: &[RationalFunction]) -> Result<Vec<RationalFunction>> {
        let nvars = self.boundary.zero().nvars();
        let dim = self.boundary.rows();
        if x.len() != dim {
            return Err(Error::Dimension(format!("vector of length {} for a complex of rank {dim}", x.len())));
        }
        let mut cols: Vec<Vec<RationalFunction>> = self.reps.iter().map(|r| r.element.as_fraction_vector()).collect();
        for j in 0..dim {
            cols.push(self.boundary.column(j).into_iter().map(RationalFunction::from_poly).collect());
        }
        let a = Matrix::from_columns(&cols, dim, RationalFunction::zero(nvars));
        match rank_and_solve(&a, Some(x))?.solution {
            SolveOutcome::Consistent(sol) => Ok(sol[..self.reps.len()].to_vec()),
            _ => Err(Error::Inconsistent("vector is not a cocycle over the fraction field".into())),
        }
    }

    pub fn express_element(&self, x: &EquivariantElement) -> Result<Vec<RationalFunction>> {
        self.express(&x.as_fraction_vector())
    }
}

fn parity_indices(m: &InvariantModel, parity: u32) -> Vec<usize> {
    (0..m.dim()).filter(|&i| m.degree(i) % 2 == parity).collect()
}

/// Ranks (even, odd) of the 2-periodic fraction-field complex, with
/// representative cocycles independent modulo coboundaries.
pub fn cohomology_generic(m: &InvariantModel) -> Result<GenericCohomology> {
    ensure_valid(m)?;
    let nvars = m.torus_rank;
    let dmat = m.cartan_matrix();
    let mut reps = Vec::new();
    let mut ranks = [0usize; 2];
    for parity in [0u32, 1] {
        let own = parity_indices(m, parity);
        let other = parity_indices(m, 1 - parity);
        let out_map = dmat.select(&other, &own);
        let in_map = dmat.select(&own, &other);
        let kernel = rank_and_solve_poly(&out_map, None)?.kernel;
        let mut span: Vec<Vec<Polynomial>> = (0..in_map.cols()).map(|j| in_map.column(j)).collect();
        let mut current = rank_of_columns(&span, own.len(), nvars)?;
        for k in kernel {
            let v = clear_denominators(&k);
            span.push(v.clone());
            let r = rank_of_columns(&span, own.len(), nvars)?;
            if r > current {
                current = r;
                let mut element = m.zero_element();
                for (pos, &g) in own.iter().enumerate() {
                    element.coeffs[g] = v[pos].clone();
                }
                let degree = element
                    .degree(&m.generators)
                    .ok_or_else(|| Error::Inconsistent("kernel vector is not homogeneous".into()))?;
                reps.push(CocycleRep { element, degree });
                ranks[parity as usize] += 1;
            } else {
                span.pop();
            }
        }
    }
    Ok(GenericCohomology { even_rank: ranks[0], odd_rank: ranks[1], reps, boundary: dmat })
}

fn rank_of_columns(cols: &[Vec<Polynomial>], rows: usize, nvars: usize) -> Result<usize> {
    if cols.is_empty() || rows == 0 {
        return Ok(0);
    }
    Ok(rank_and_solve_poly(&Matrix::from_columns(cols, rows, Polynomial::zero(nvars)), None)?.rank)
}

/// Rank of `d_T` over the fraction field by random specialization: the
/// second route to the generic Betti total, `dim − 2·rank`.
pub fn generic_betti_total_specialized(m: &InvariantModel, seed: u64) -> Result<usize> {
    let r = generic_specialized_rank(&m.cartan_matrix(), seed)?;
    Ok(m.dim() - 2 * r.rank)
}

// ---------------------------------------------------------------------------
// Degreewise cohomology over ℚ

/// Exponent vectors of total degree `deg` in `n` variables, lex-descending.
pub fn monomials(n: usize, deg: u32) -> Vec<Monomial> {
    if n == 0 {
        return if deg == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=deg).rev() {
        for mut rest in monomials(n - 1, deg - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// ℚ-basis of the degree-`k` slice of `ℚ[u] ⊗ C`.
fn slice_basis(m: &InvariantModel, k: i64) -> Vec<(Monomial, usize)> {
    let mut out = Vec::new();
    for g in 0..m.dim() {
        let rest = k - m.degree(g) as i64;
        if rest >= 0 && rest % 2 == 0 {
            for mono in monomials(m.torus_rank, (rest / 2) as u32) {
                out.push((mono, g));
            }
        }
    }
    out
}

fn slice_boundary(m: &InvariantModel, src: &[(Monomial, usize)], dst: &[(Monomial, usize)]) -> Matrix<Rational> {
    let index: HashMap<&(Monomial, usize), usize> = dst.iter().enumerate().map(|(i, b)| (b, i)).collect();
    let mut mat = Matrix::new(dst.len(), src.len(), rat(0));
    for (col, (mono, g)) in src.iter().enumerate() {
        let mut add = |mono: Monomial, i: usize, c: &Rational| {
            let row = index[&(mono, i)];
            let v = mat.get(row, col) + c;
            mat.set(row, col, v);
        };
        for i in 0..m.dim() {
            let dij = m.d.get(i, *g);
            if !Ring::is_zero(dij) {
                add(mono.clone(), i, dij);
            }
            for (k, c) in m.contractions.iter().enumerate() {
                let cij = c.get(i, *g);
                if !Ring::is_zero(cij) {
                    let mut up = mono.clone();
                    up[k] += 1;
                    add(up, i, cij);
                }
            }
        }
    }
    mat
}

/// `dim_ℚ H^k_T` for `0 ≤ k ≤ cutoff`, computed slice by slice.
pub fn cohomology_hilbert(m: &InvariantModel, cutoff: usize) -> Result<Vec<usize>> {
    ensure_valid(m)?;
    let slices: Vec<Vec<(Monomial, usize)>> = (0..=cutoff as i64 + 1).map(|k| slice_basis(m, k)).collect();
    let ranks: Vec<usize> =
        (0..=cutoff).into_par_iter().map(|k| rank_q(&slice_boundary(m, &slices[k], &slices[k + 1]))).collect();
    Ok((0..=cutoff).map(|k| slices[k].len() - ranks[k] - if k > 0 { ranks[k - 1] } else { 0 }).collect())
}

pub fn default_cutoff(m: &InvariantModel) -> usize {
    2 * m.top_degree as usize + 2 * m.torus_rank + 4
}

/// Betti numbers of the underlying complex `(C, d)` in degrees
/// `0..=top_degree`.
pub fn ordinary_cohomology(m: &InvariantModel) -> Vec<usize> {
    (0..=m.top_degree)
        .map(|k| {
            let here: Vec<usize> = (0..m.dim()).filter(|&i| m.degree(i) == k).collect();
            let up: Vec<usize> = (0..m.dim()).filter(|&i| m.degree(i) == k + 1).collect();
            let down: Vec<usize> = (0..m.dim()).filter(|&i| m.degree(i) + 1 == k).collect();
            here.len() - rank_q(&m.d.select(&up, &here)) - rank_q(&m.d.select(&here, &down))
        })
        .collect()
}

/// Matrices of a generator-level self-map on `H^k(C, d)` over ℚ, one per
/// degree `0..=top_degree`. Columns are images of the chosen basis classes.
pub fn induced_on_cohomology(m: &InvariantModel, pullback: &Matrix<Rational>) -> Result<Vec<Matrix<Rational>>> {
    if pullback.rows() != m.dim() || pullback.cols() != m.dim() {
        return Err(Error::Dimension("self-map must be square on the generators".into()));
    }
    let mut out = Vec::new();
    for k in 0..=m.top_degree {
        let here: Vec<usize> = (0..m.dim()).filter(|&i| m.degree(i) == k).collect();
        let up: Vec<usize> = (0..m.dim()).filter(|&i| m.degree(i) == k + 1).collect();
        let down: Vec<usize> = (0..m.dim()).filter(|&i| m.degree(i) + 1 == k).collect();
        let image = m.d.select(&here, &down);
        let mut cols: Vec<Vec<Rational>> = (0..image.cols()).map(|j| image.column(j)).collect();
        let mut reps: Vec<Vec<Rational>> = Vec::new();
        let mut r = rank_cols_q(&cols, here.len());
        for v in kernel_q(&m.d.select(&up, &here)) {
            cols.push(v.clone());
            let r2 = rank_cols_q(&cols, here.len());
            if r2 > r {
                r = r2;
                reps.push(v);
            } else {
                cols.pop();
            }
        }
        let mut system: Vec<Vec<Rational>> = reps.clone();
        system.extend((0..image.cols()).map(|j| image.column(j)));
        let a = Matrix::from_columns(&system, here.len(), rat(0));
        let sub = pullback.select(&here, &here);
        let mut mat = Matrix::new(reps.len(), reps.len(), rat(0));
        for (j, rep) in reps.iter().enumerate() {
            let img = sub.apply(rep);
            let sol = solve_q(&a, &img)
                .ok_or_else(|| Error::Inconsistent(format!("image of a degree-{k} class is not closed")))?;
            for i in 0..reps.len() {
                mat.set(i, j, sol[i].clone());
            }
        }
        out.push(mat);
    }
    Ok(out)
}

fn rank_cols_q(cols: &[Vec<Rational>], rows: usize) -> usize {
    if cols.is_empty() || rows == 0 {
        0
    } else {
        rank_q(&Matrix::from_columns(cols, rows, rat(0)))
    }
}

/// Hilbert table predicted by `H_T = S(t) ⊗ h(C)`, which holds when the
/// underlying cohomology is concentrated in even degrees.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FreePrediction {
    pub underlying: Vec<usize>,
    pub predicted: Vec<usize>,
    pub actual: Vec<usize>,
    pub matches: bool,
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// `dim_ℚ S(t)^{2m}` = number of monomials of degree `m` in `n` variables.
pub fn polynomial_ring_dim(n: usize, m: usize) -> usize {
    if n == 0 {
        usize::from(m == 0)
    } else {
        binomial(m + n - 1, n - 1)
    }
}

pub fn predict_free_hilbert(m: &InvariantModel, cutoff: usize) -> Result<FreePrediction> {
    let actual = cohomology_hilbert(m, cutoff)?;
    let underlying = ordinary_cohomology(m);
    let predicted: Vec<usize> = (0..=cutoff)
        .map(|k| {
            underlying
                .iter()
                .enumerate()
                .filter(|&(j, _)| j <= k && (k - j) % 2 == 0)
                .map(|(j, &b)| b * polynomial_ring_dim(m.torus_rank, (k - j) / 2))
                .sum()
        })
        .collect();
    let matches = predicted == actual;
    Ok(FreePrediction { underlying, predicted, actual, matches })
}

/// Summary of the equivariant cohomology of a model.
#[derive(Clone, Debug, Serialize)]
pub struct CohomologyReport {
    pub model: String,
    pub generic_betti: (usize, usize),
    pub generic_cocycles: Vec<String>,
    pub cocycle_degrees: Vec<i64>,
    pub hilbert: Vec<usize>,
}

pub fn cohomology_report(m: &InvariantModel, cutoff: usize) -> Result<CohomologyReport> {
    let g = cohomology_generic(m)?;
    Ok(CohomologyReport {
        model: m.name.clone(),
        generic_betti: (g.even_rank, g.odd_rank),
        generic_cocycles: g.reps.iter().map(|r| m.format_element(&r.element)).collect(),
        cocycle_degrees: g.reps.iter().map(|r| r.degree).collect(),
        hilbert: cohomology_hilbert(m, cutoff)?,
    })
}
