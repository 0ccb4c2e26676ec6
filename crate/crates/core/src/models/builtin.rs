//! Builtin models with their derivations.

use crate::algebra::{rat, ratio, Matrix, Rational};
use crate::error::{Error, Result};
use crate::euler::{LinearRepresentation, Weight};
use crate::gcomplex::{ensure_valid, EquivariantElement, FixedPoint, Generator, InvariantModel, NamedClass};

pub const BUILTIN_NAMES: &[&str] = &[
    "point(n)",
    "circle_trivial(n)",
    "circle_free",
    "rema_adj",
    "s2_rotation",
    "obstruction_pair",
    "c_alpha(a1,...,an)",
];

/// Looks up a builtin by name, e.g. `point(2)`, `s2_rotation`,
/// `c_alpha(1,-2)`. A bare `point` or `circle_trivial` means rank 1.
pub fn builtin(name: &str) -> Result<InvariantModel> {
    let unknown = || Error::UnknownBuiltin { name: name.to_string(), available: BUILTIN_NAMES.join(", ") };
    let s: String = name.chars().filter(|c| !c.is_whitespace()).collect();
    let (head, args) = match s.find('(') {
        Some(i) if s.ends_with(')') => (&s[..i], Some(&s[i + 1..s.len() - 1])),
        Some(_) => return Err(unknown()),
        None => (s.as_str(), None),
    };
    let ints = |a: Option<&str>| -> Result<Vec<i64>> {
        match a {
            None | Some("") => Ok(Vec::new()),
            Some(a) => a.split(',').map(|x| x.parse::<i64>().map_err(|_| unknown())).collect(),
        }
    };
    let rank = |a: Option<&str>| -> Result<usize> {
        match ints(a)?.as_slice() {
            [] => Ok(1),
            [n] if *n >= 0 => Ok(*n as usize),
            _ => Err(unknown()),
        }
    };
    let m = match head {
        "point" => point(rank(args)?),
        "circle_trivial" => circle_trivial(rank(args)?),
        "circle_free" if args.is_none() => circle_free(),
        "rema_adj" if args.is_none() => rema_adj(),
        "s2_rotation" if args.is_none() => s2_rotation(),
        "obstruction_pair" if args.is_none() => obstruction_pair(),
        "c_alpha" => c_alpha(&ints(args)?)?,
        _ => return Err(unknown()),
    };
    ensure_valid(&m)?;
    Ok(m)
}

fn named(m: &InvariantModel, name: &str, element: EquivariantElement) -> NamedClass {
    debug_assert_eq!(element.coeffs.len(), m.dim());
    NamedClass { name: name.to_string(), element }
}

/// The point with the trivial action of a rank-`n` torus: `H_T = S(t)`.
pub fn point(n: usize) -> InvariantModel {
    let mut m = InvariantModel::skeleton(&format!("point({n})"), n, vec![Generator::new("1", 0)], 0);
    m.unit = Some(0);
    m.compact = true;
    m.integration.insert(0, rat(1));
    m.fixed_points.push(FixedPoint {
        name: "pt".into(),
        tangent: LinearRepresentation::trivial(n, 0),
        evaluation: vec![rat(1)],
    });
    m.classes.push(named(&m, "one", m.basis_element(0)));
    m.notes.push("Invariant forms of a point: constants. All maps vanish.".into());
    m
}

fn circle(name: &str, n: usize) -> InvariantModel {
    let mut m = InvariantModel::skeleton(name, n, vec![Generator::new("b0", 0), Generator::new("b1", 1)], 1);
    m.unit = Some(0);
    m.compact = true;
    m.integration.insert(1, rat(1));
    m.classes.push(named(&m, "one", m.basis_element(0)));
    m
}

/// Circle with the trivial action of a rank-`n` torus: harmonic forms
/// `1, dθ/2π`, all contractions zero, so `H_T = S(t) ⊗ H(S¹)`.
pub fn circle_trivial(n: usize) -> InvariantModel {
    let mut m = circle(&format!("circle_trivial({n})"), n);
    m.notes.push(
        "Trivial action: invariant forms are all forms; harmonic representatives 1 and the unit-volume angle form."
            .into(),
    );
    m
}

/// Circle acted on by rotation: invariant forms `1` and `b1 = dθ/2π`, with
/// `c(∂θ) b1 = b0` after normalizing the generator. `d_T b1 = u b0`, so
/// `H_T = ℚ[u]/(u)` sits in degree 0.
pub fn circle_free() -> InvariantModel {
    let mut m = circle("circle_free", 1);
    m.contractions[0].set(0, 1, rat(1));
    m.notes.push("Free rotation of the circle: c(b1) = b0 after normalizing the generating vector field.".into());
    m
}

/// Rank-2 torus acting on a circle through its second factor only:
/// `c1 = 0`, `c2` as for the free rotation. The cohomology is `ℚ[u1,u2]/(u2)`,
/// a torsion module.
pub fn rema_adj() -> InvariantModel {
    let mut m = circle("rema_adj", 2);
    m.contractions[1].set(0, 1, rat(1));
    m.notes.push("(s, z) acts on the circle by z; the first factor acts trivially.".into());
    m
}

/// Two generators `a` (degree 1) and `b` (degree 0) with `d = 0` and
/// `c(a) = b`: the contraction of the top class is not exact, so the Thom
/// extension of `a` is obstructed.
pub fn obstruction_pair() -> InvariantModel {
    let mut m =
        InvariantModel::skeleton("obstruction_pair", 1, vec![Generator::new("a", 1), Generator::new("b", 0)], 1);
    m.contractions[0].set(1, 0, rat(1));
    m.unit = Some(1);
    m.compact = true;
    m.integration.insert(0, rat(1));
    m.classes.push(named(&m, "one", m.basis_element(1)));
    m.notes.push("Same complex as circle_free with the generators listed top-down.".into());
    m
}

/// Rotation of S² about the vertical axis with speed `α`. Generators, in
/// terms of the height function `t` and the normalized area form `vol`:
///
/// `1, t, t², dt, t·dt, β, vol, t·vol` with `d t = dt`, `d t² = 2 t·dt`,
/// `d β = t·vol` and `c(vol) = −dt`, `c(t·vol) = −t·dt`,
/// `c(β) = (t² − 1)/2`, scaled by `αᵢ` for `cᵢ`. Here `β` is the invariant
/// 1-form `(t² − 1)/2 · dφ/2π`, and `∫ vol = 2`. The class
/// `w = vol + α(u)·t` restricts to `α` at the north pole (`t = 1`) and to
/// `−α` at the south pole, matching the tangent weights there.
pub fn c_alpha(alpha: &[i64]) -> Result<InvariantModel> {
    let n = alpha.len();
    if n == 0 || alpha.iter().all(|&a| a == 0) {
        return Err(Error::Precondition("c_alpha needs a nonzero integral weight".into()));
    }
    let gens = ["1", "t", "t2", "dt", "tdt", "beta", "vol", "tvol"];
    let degrees = [0, 0, 0, 1, 1, 1, 2, 2];
    let generators = gens.iter().zip(degrees).map(|(g, d)| Generator::new(g, d)).collect();
    let name = if alpha == [1] {
        "s2_rotation".to_string()
    } else {
        format!("c_alpha({})", alpha.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(","))
    };
    let mut m = InvariantModel::skeleton(&name, n, generators, 2);
    let ix = |g: &str| gens.iter().position(|x| *x == g).unwrap();
    let set = |mat: &mut Matrix<Rational>, row: &str, col: &str, v: Rational| mat.set(ix(row), ix(col), v);
    set(&mut m.d, "dt", "t", rat(1));
    set(&mut m.d, "tdt", "t2", rat(2));
    set(&mut m.d, "tvol", "beta", rat(1));
    for (k, &a) in alpha.iter().enumerate() {
        let c = &mut m.contractions[k];
        set(c, "dt", "vol", rat(-a));
        set(c, "tdt", "tvol", rat(-a));
        set(c, "t2", "beta", ratio(a, 2));
        set(c, "1", "beta", ratio(-a, 2));
    }
    let mut product = |a: &str, b: &str, out: &[(&str, i64)]| {
        m.products.insert((ix(a), ix(b)), out.iter().map(|(g, c)| (ix(g), rat(*c))).collect());
    };
    product("t", "t", &[("t2", 1)]);
    product("t", "dt", &[("tdt", 1)]);
    product("t", "vol", &[("tvol", 1)]);
    product("dt", "dt", &[]);
    m.unit = Some(ix("1"));
    m.compact = true;
    m.integration.insert(ix("vol"), rat(2));
    m.integration.insert(ix("tvol"), rat(0));
    let weight = Weight(alpha.to_vec());
    let minus = Weight(alpha.iter().map(|a| -a).collect());
    let eval = |t: i64| {
        let mut v = vec![rat(0); gens.len()];
        v[ix("1")] = rat(1);
        v[ix("t")] = rat(t);
        v[ix("t2")] = rat(t * t);
        v
    };
    m.fixed_points.push(FixedPoint {
        name: "N".into(),
        tangent: LinearRepresentation::new(n, 0, vec![(weight.clone(), 1)])?,
        evaluation: eval(1),
    });
    m.fixed_points.push(FixedPoint {
        name: "S".into(),
        tangent: LinearRepresentation::new(n, 0, vec![(minus, 1)])?,
        evaluation: eval(-1),
    });
    m.classes.push(named(&m, "one", m.basis_element(ix("1"))));
    let mut w = m.basis_element(ix("vol"));
    w.coeffs[ix("t")] = weight.linear_form();
    m.classes.push(named(&m, "w", w));
    m.notes.push("Products cover what the pairing and the fixed-point maps need; others are left undeclared.".into());
    Ok(m)
}

/// The rotation sphere with unit speed.
pub fn s2_rotation() -> InvariantModel {
    c_alpha(&[1]).expect("unit weight is nonzero")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gcomplex::validate_model;

    #[test]
    fn all_builtins_validate() {
        for name in [
            "point",
            "point(0)",
            "point(3)",
            "circle_trivial(2)",
            "circle_free",
            "rema_adj",
            "s2_rotation",
            "obstruction_pair",
            "c_alpha(1,-2)",
        ] {
            let m = builtin(name).unwrap();
            assert!(validate_model(&m).unwrap().is_valid(), "{name}");
        }
    }

    #[test]
    fn unknown_names_list_choices() {
        let e = builtin("torus").unwrap_err().to_string();
        assert!(e.contains("s2_rotation"));
        assert!(builtin("point(x)").is_err());
        assert!(builtin("circle_free(2)").is_err());
        assert!(builtin("c_alpha(0)").is_err());
    }

    #[test]
    fn point_shape() {
        let m = builtin("point(1)").unwrap();
        assert_eq!(m.dim(), 1);
        assert!(m.d.is_zero() && m.contractions[0].is_zero());
    }

    #[test]
    fn rema_adj_uses_second_variable() {
        let m = rema_adj();
        assert!(m.contractions[0].is_zero());
        assert_eq!(m.contractions[1], circle_free().contractions[0]);
    }
}
