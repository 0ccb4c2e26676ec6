//! Property tests for the algebraic invariants.

use cartan_core::algebra::{
    generic_specialized_rank, rank_and_solve_poly, rat, smith_normal_form, Field, Matrix, Polynomial, Rational,
    RationalFunction, Ring,
};
use cartan_core::duality::{classify_presentation, pairing_matrix, ModuleClassification, ModulePresentation};
use cartan_core::euler::{
    euler_linear, localize_integral, nested_euler_check, FixedPointDatum, LinearRepresentation, Weight,
};
use cartan_core::gcomplex::{cartan_differential, cohomology_generic, cohomology_hilbert, EquivariantElement};
use cartan_core::models::{builtin, c_alpha, circle_free};
use proptest::prelude::*;

fn poly(nvars: usize, max_deg: u32, max_terms: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((prop::collection::vec(0..=max_deg, nvars), -4i64..=4), 0..=max_terms).prop_map(
        move |terms| {
            let terms = terms.into_iter().filter(|(e, _)| e.iter().sum::<u32>() <= max_deg);
            Polynomial::from_terms(nvars, terms.map(|(e, c)| (e, rat(c))))
        },
    )
}

fn poly_matrix(nvars: usize, max_deg: u32) -> impl Strategy<Value = Matrix<Polynomial>> {
    (1usize..=5, 1usize..=5).prop_flat_map(move |(r, c)| {
        prop::collection::vec(poly(nvars, max_deg, 3), r * c).prop_map(move |entries| {
            let mut it = entries.into_iter();
            Matrix::from_fn(r, c, Polynomial::zero(nvars), |_, _| it.next().unwrap())
        })
    })
}

fn nonzero_weight(n: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, n).prop_filter("nonzero", |w| w.iter().any(|&x| x != 0))
}

fn representation(n: usize) -> impl Strategy<Value = LinearRepresentation> {
    (0u32..=1, prop::collection::vec((nonzero_weight(n), 1u32..=2), 0..=3)).prop_map(move |(trivial, ws)| {
        LinearRepresentation::new(n, trivial, ws.into_iter().map(|(w, k)| (Weight(w), k)).collect()).unwrap()
    })
}

fn is_unit(p: &Polynomial) -> bool {
    p.is_constant() && !p.is_zero()
}

fn determinant(m: &Matrix<Polynomial>) -> Polynomial {
    let n = m.rows();
    if n == 0 {
        return Polynomial::one(1);
    }
    let mut acc = Polynomial::zero(1);
    for j in 0..n {
        let rows: Vec<usize> = (1..n).collect();
        let cols: Vec<usize> = (0..n).filter(|&k| k != j).collect();
        let term = m.get(0, j) * &determinant(&m.select(&rows, &cols));
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polynomial_ring_identities(a in poly(2, 3, 4), b in poly(2, 3, 4), c in poly(2, 3, 4)) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn rational_function_cross_multiplication(a in poly(2, 2, 3), b in poly(2, 2, 3), c in poly(2, 2, 3)) {
        prop_assume!(!b.is_zero() && !c.is_zero());
        let x = RationalFunction::new(a.clone(), b.clone());
        let y = RationalFunction::new(&a * &c, &b * &c);
        prop_assert_eq!(&x, &y);
        let one = RationalFunction::from_poly(c.clone());
        prop_assert_eq!(x.times(&one).over(&one), x.clone());
        prop_assert!(x.minus(&y).is_zero());
    }

    #[test]
    fn smith_form_contract(a in poly_matrix(1, 3)) {
        let s = smith_normal_form(&a).unwrap();
        prop_assert_eq!(s.u.mul(&a).mul(&s.v), s.d.clone());
        prop_assert_eq!(s.u.mul(&s.u_inv), Matrix::identity(a.rows(), Polynomial::zero(1)));
        prop_assert_eq!(s.v.mul(&s.v_inv), Matrix::identity(a.cols(), Polynomial::zero(1)));
        prop_assert!(is_unit(&determinant(&s.u)) && is_unit(&determinant(&s.v)));
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                prop_assert!(i == j || s.d.get(i, j).is_zero());
            }
        }
        let f = s.invariant_factors();
        for w in f.windows(2) {
            prop_assert!(w[1].div_exact(&w[0]).is_some());
        }
        prop_assert_eq!(f.len(), rank_and_solve_poly(&a, None).unwrap().rank);
    }

    #[test]
    fn exact_and_specialized_ranks_agree(a in poly_matrix(2, 3), seed in any::<u64>()) {
        let exact = rank_and_solve_poly(&a, None).unwrap().rank;
        let special = generic_specialized_rank(&a, seed).unwrap();
        prop_assert_eq!(exact, special.rank);
    }

    #[test]
    fn euler_is_multiplicative(a in representation(2), b in representation(2)) {
        prop_assert!(nested_euler_check(&a, &b).unwrap());
        let sum = a.direct_sum(&b).unwrap();
        prop_assert_eq!(sum.real_dimension(), a.real_dimension() + b.real_dimension());
    }

    #[test]
    fn euler_vanishes_exactly_with_a_trivial_summand(a in representation(2)) {
        prop_assert_eq!(euler_linear(&a).is_zero(), a.trivial > 0);
    }

    #[test]
    fn weight_restriction_matches_substitution(
        rep in representation(2),
        a in prop::collection::vec(prop::collection::vec(-2i64..=2, 1), 2),
    ) {
        let restricted = rep.restrict(&a, 1);
        prop_assert_eq!(euler_linear(&restricted), euler_linear(&rep).substitute_linear(&a, 1));
        prop_assert_eq!(restricted.real_dimension(), rep.real_dimension());
    }

    #[test]
    fn opposite_weight_pairs_sum_to_zero(ws in prop::collection::vec(nonzero_weight(2), 1..=4)) {
        let mut points = Vec::new();
        for (k, w) in ws.iter().enumerate() {
            for (sign, tag) in [(1, "p"), (-1, "q")] {
                let w: Vec<i64> = w.iter().map(|x| sign * x).collect();
                let tangent = LinearRepresentation::from_weights(2, &[w]).unwrap();
                let mut restrictions = std::collections::BTreeMap::new();
                restrictions.insert("one".to_string(), Polynomial::one(2));
                restrictions.insert("euler".to_string(), euler_linear(&tangent));
                points.push(FixedPointDatum { name: format!("{tag}{k}"), tangent, restrictions });
            }
        }
        prop_assert!(localize_integral(&points, "one").unwrap().value.is_zero());
        let count = RationalFunction::from_rational(2, rat(points.len() as i64));
        prop_assert_eq!(localize_integral(&points, "euler").unwrap().value, count);
    }

    #[test]
    fn weighted_spheres_share_cohomology(w in nonzero_weight(2)) {
        let m = c_alpha(&w).unwrap();
        prop_assert_eq!(cohomology_hilbert(&m, 8).unwrap(), cohomology_hilbert(&builtin("c_alpha(1,0)").unwrap(), 8).unwrap());
        let g = cohomology_generic(&m).unwrap();
        prop_assert_eq!((g.even_rank, g.odd_rank), (2, 0));
    }

    #[test]
    fn contraction_scaling_preserves_hilbert(l in prop::sample::select(vec![-3i64, -1, 2, 5])) {
        let base = circle_free();
        let mut scaled = base.clone();
        scaled.contractions[0] = scaled.contractions[0].scale(&rat(l));
        prop_assert_eq!(cohomology_hilbert(&scaled, 8).unwrap(), cohomology_hilbert(&base, 8).unwrap());
    }

    #[test]
    fn cartan_differential_squares_to_zero(coeffs in prop::collection::vec(poly(2, 2, 3), 8)) {
        let m = builtin("c_alpha(1,-2)").unwrap();
        let x = EquivariantElement { nvars: 2, coeffs };
        let dx = cartan_differential(&m, &x).unwrap();
        prop_assert!(cartan_differential(&m, &dx).unwrap().is_zero());
    }

    #[test]
    fn classification_flags_nest(
        free in prop::collection::vec(0i64..=4, 0..=3),
        torsion in prop::collection::vec((1u32..=3, 0i64..=4), 0..=3),
    ) {
        let torsion: Vec<(Polynomial, i64)> = torsion
            .into_iter()
            .map(|(k, d)| (Polynomial::var(1, 0).pow(k), 2 * d))
            .collect();
        let c = ModuleClassification::new(free.iter().map(|d| 2 * d).collect(), torsion);
        prop_assert!(!c.is_free || c.is_reflexive);
        prop_assert!(!c.is_reflexive || c.is_torsion_free);
        prop_assert_eq!(c.is_torsion, c.free_rank == 0);
        let again = classify_presentation(&ModulePresentation::from_classification(&c)).unwrap();
        prop_assert_eq!(again.hilbert(12), c.hilbert(12));
        prop_assert_eq!(again.free_rank, c.free_rank);
    }
}

#[test]
fn pairing_is_graded_symmetric() {
    for name in ["s2_rotation", "c_alpha(2,1)", "circle_trivial(1)", "point(2)"] {
        let m = builtin(name).unwrap();
        let p = pairing_matrix(&m).unwrap();
        for i in 0..p.degrees.len() {
            for j in 0..p.degrees.len() {
                let sign: Rational = if (p.degrees[i] * p.degrees[j]) % 2 == 0 { rat(1) } else { rat(-1) };
                assert_eq!(*p.matrix.get(i, j), p.matrix.get(j, i).scale(&sign), "{name}");
            }
        }
    }
}
