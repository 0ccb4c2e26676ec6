//! Independent re-computations checked against the library.

use cartan_core::algebra::{rat, ratio, Polynomial, Rational, RationalFunction};
use cartan_core::duality::{classify_rank1, pairing_matrix};
use cartan_core::euler::{fixed_point_data, localize_integral};
use cartan_core::gcomplex::{cohomology_generic, cohomology_hilbert, generic_betti_total_specialized, InvariantModel};
use cartan_core::gysin::{gysin_localized, ModelMap};
use cartan_core::models::builtin;

const BUILTINS: &[&str] = &[
    "point",
    "point(2)",
    "circle_trivial",
    "circle_trivial(2)",
    "circle_free",
    "rema_adj",
    "s2_rotation",
    "obstruction_pair",
    "c_alpha(1,-2)",
];

/// Rank by plain row reduction on dense rational rows.
fn oracle_rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let zero = rat(0);
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in (0..cols).rev() {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] != zero) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank][c].clone();
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != zero {
                let f = rows[r][c].clone() / pivot.clone();
                for k in 0..cols {
                    let v = rows[rank][k].clone() * f.clone();
                    rows[r][k] = rows[r][k].clone() - v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Exponent vectors of total degree `deg`, ascending lexicographically
/// (reverse of the library's enumeration).
fn ascending_monomials(n: usize, deg: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return if deg == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=deg {
        for mut rest in ascending_monomials(n - 1, deg - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn slice(m: &InvariantModel, k: i64) -> Vec<(Vec<u32>, usize)> {
    let mut out = Vec::new();
    for (g, gen) in m.generators.iter().enumerate().rev() {
        let rest = k - gen.degree as i64;
        if rest >= 0 && rest % 2 == 0 {
            for mono in ascending_monomials(m.torus_rank, (rest / 2) as u32) {
                out.push((mono, g));
            }
        }
    }
    out
}

/// Boundary from slice `k` to slice `k + 1`, as rows indexed by the source.
fn boundary_rows(m: &InvariantModel, k: i64) -> Vec<Vec<Rational>> {
    let src = slice(m, k);
    let dst = slice(m, k + 1);
    src.iter()
        .map(|(mono, g)| {
            let mut row = vec![rat(0); dst.len()];
            for (idx, (dm, dg)) in dst.iter().enumerate() {
                let mut v = rat(0);
                if dm == mono {
                    v += m.d.get(*dg, *g).clone();
                }
                for (i, c) in m.contractions.iter().enumerate() {
                    let mut up = mono.clone();
                    up[i] += 1;
                    if *dm == up {
                        v += c.get(*dg, *g).clone();
                    }
                }
                row[idx] = v;
            }
            row
        })
        .collect()
}

fn oracle_hilbert(m: &InvariantModel, cutoff: usize) -> Vec<usize> {
    let ranks: Vec<usize> = (0..=cutoff as i64).map(|k| oracle_rank(boundary_rows(m, k))).collect();
    (0..=cutoff).map(|k| slice(m, k as i64).len() - ranks[k] - if k > 0 { ranks[k - 1] } else { 0 }).collect()
}

#[test]
fn hilbert_matches_brute_force_slices() {
    for name in BUILTINS {
        let m = builtin(name).unwrap();
        let cutoff = 10;
        let lib = cohomology_hilbert(&m, cutoff).unwrap();
        let oracle = oracle_hilbert(&m, cutoff);
        assert_eq!(lib[..=cutoff - 2], oracle[..=cutoff - 2], "{name}");
    }
}

#[test]
fn generic_ranks_agree_with_specialization() {
    for name in BUILTINS {
        let m = builtin(name).unwrap();
        let g = cohomology_generic(&m).unwrap();
        for seed in [1, 2, 3] {
            assert_eq!(g.total_rank(), generic_betti_total_specialized(&m, seed).unwrap(), "{name}");
        }
    }
}

#[test]
fn s2_generic_cohomology_by_hand() {
    // even generators 1, t, t², vol, t·vol; odd dt, t·dt, β
    // D(even) has rank 2 (t ↦ dt, t² ↦ 2t·dt), D(odd) rank 1 (β)
    let m = builtin("s2_rotation").unwrap();
    let g = cohomology_generic(&m).unwrap();
    assert_eq!((g.even_rank, g.odd_rank), (5 - 2 - 1, 3 - 1 - 2));
    assert_eq!(g.reps.iter().map(|r| r.degree).collect::<Vec<_>>(), [0, 2]);
}

#[test]
fn s2_pairing_by_hand() {
    // ⟨1, w⟩ = ∫vol = 2; ⟨w, w⟩ = ∫(2u·t·vol + u²t²) = 2u·∫t·vol = 0
    let p = pairing_matrix(&builtin("s2_rotation").unwrap()).unwrap();
    let two = RationalFunction::from_rational(1, rat(2));
    assert_eq!(p.matrix.row(0), [RationalFunction::zero(1), two.clone()]);
    assert_eq!(p.matrix.row(1), [two, RationalFunction::zero(1)]);
}

#[test]
fn inclusion_gysin_by_hand() {
    // P_N = [[0,2],[2,0]], F* = [1, u], P_M = [1]; X = P_N⁻¹ F*ᵗ = [u/2, 1/2]
    let s2 = builtin("s2_rotation").unwrap();
    let pt = builtin("point").unwrap();
    for (index, sign) in [(0usize, 1i64), (1, -1)] {
        let g = gysin_localized(&ModelMap::fixed_point_inclusion(&s2, index, &pt).unwrap()).unwrap();
        let expect_u = RationalFunction::from_poly(Polynomial::monomial(1, vec![1], ratio(sign, 2)));
        assert_eq!(*g.matrix.get(0, 0), expect_u);
        assert_eq!(*g.matrix.get(1, 0), RationalFunction::from_rational(1, ratio(1, 2)));
    }
}

#[test]
fn localization_by_hand_for_weighted_sphere() {
    // c_alpha(a): restrictions of w are ±a·u at ±a weights, so each term is 1
    for a in [1i64, 2, -3] {
        let m = builtin(&format!("c_alpha({a})")).unwrap();
        let data = fixed_point_data(&m).unwrap();
        assert_eq!(localize_integral(&data, "w").unwrap().value, RationalFunction::from_rational(1, rat(2)));
        let n = &data[0];
        assert_eq!(n.restrictions["w"], Polynomial::linear(&[a]));
    }
}

#[test]
fn circle_free_module_by_hand() {
    // coker(u: ℚ[u] → ℚ[u]) is ℚ in degree 0
    let c = classify_rank1(&builtin("circle_free").unwrap()).unwrap();
    assert_eq!(c.hilbert(6), [1, 0, 0, 0, 0, 0, 0]);
    assert_eq!(c.torsion_degrees, [0]);
}
