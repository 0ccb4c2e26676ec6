//! JSON model files: exact rationals as strings, sparse triplets keyed by
//! generator name, canonical ordering on save.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::builtin::builtin;
use crate::algebra::{format_rational, parse_rational, Matrix, Polynomial, Rational, Ring};
use crate::error::{Error, Result};
use crate::euler::{LinearRepresentation, Weight};
use crate::gcomplex::{validate_model, EquivariantElement, FixedPoint, Generator, InvariantModel, NamedClass};
use crate::gysin::{validate_map, ModelMap};

pub const SCHEMA_VERSION: u32 = 1;

/// `[row, column, value]`: coefficient of generator `row` in the image of
/// generator `column`.
pub type Entry = (String, String, String);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorEntry {
    pub name: String,
    pub degree: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightEntry {
    pub weight: Vec<i64>,
    #[serde(default = "one")]
    pub multiplicity: u32,
}

fn one() -> u32 {
    1
}

fn is_zero(x: &u32) -> bool {
    *x == 0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedPointEntry {
    pub name: String,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub trivial: u32,
    #[serde(default)]
    pub weights: Vec<WeightEntry>,
    /// `[generator, value]` for degree-0 generators; missing ones are 0.
    pub evaluation: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassEntry {
    pub name: String,
    /// `[generator, polynomial]`.
    pub terms: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapEntry {
    pub name: String,
    /// `self` or `builtin:NAME`.
    pub source: String,
    pub target: String,
    /// `[source generator, target generator, value]`.
    pub pullback: Vec<Entry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub schema_version: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub torus_rank: usize,
    pub top_degree: u32,
    pub compact: bool,
    pub generators: Vec<GeneratorEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
    #[serde(default)]
    pub d: Vec<Entry>,
    #[serde(default)]
    pub contractions: Vec<Vec<Entry>>,
    /// `[a, b, result, value]`.
    #[serde(default)]
    pub products: Vec<(String, String, String, String)>,
    #[serde(default)]
    pub integration: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fixed_points: Vec<FixedPointEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub classes: Vec<ClassEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub maps: Vec<MapEntry>,
}

/// A loaded file: the model and any maps declared alongside it.
#[derive(Clone, Debug)]
pub struct ModelBundle {
    pub model: InvariantModel,
    pub maps: Vec<ModelMap>,
}

fn sparse(m: &InvariantModel, mat: &Matrix<Rational>) -> Vec<Entry> {
    let mut out = Vec::new();
    for i in 0..mat.rows() {
        for j in 0..mat.cols() {
            let v = mat.get(i, j);
            if !Ring::is_zero(v) {
                out.push((m.gen_name(i).to_string(), m.gen_name(j).to_string(), format_rational(v)));
            }
        }
    }
    out
}

fn element_terms(m: &InvariantModel, x: &EquivariantElement) -> Vec<(String, String)> {
    x.coeffs
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .map(|(g, p)| (m.gen_name(g).to_string(), p.to_string()))
        .collect()
}

/// Canonical file representation of a model and maps.
pub fn to_file(m: &InvariantModel, maps: &[(ModelMap, String, String)]) -> ModelFile {
    let names = |i: usize| m.gen_name(i).to_string();
    ModelFile {
        schema_version: SCHEMA_VERSION,
        name: m.name.clone(),
        notes: m.notes.clone(),
        torus_rank: m.torus_rank,
        top_degree: m.top_degree,
        compact: m.compact,
        generators: m.generators.iter().map(|g| GeneratorEntry { name: g.name.clone(), degree: g.degree }).collect(),
        unit: m.unit.map(names),
        d: sparse(m, &m.d),
        contractions: m.contractions.iter().map(|c| sparse(m, c)).collect(),
        products: m
            .products
            .iter()
            .flat_map(|(&(a, b), v)| {
                let mut entries: Vec<_> = v
                    .iter()
                    .filter(|(_, c)| !Ring::is_zero(c))
                    .map(|(g, c)| (names(a), names(b), names(*g), format_rational(c)))
                    .collect();
                if entries.is_empty() {
                    entries.push((names(a), names(b), String::new(), "0".into()));
                }
                entries
            })
            .collect(),
        integration: m.integration.iter().map(|(&g, c)| (names(g), format_rational(c))).collect(),
        fixed_points: m
            .fixed_points
            .iter()
            .map(|p| FixedPointEntry {
                name: p.name.clone(),
                trivial: p.tangent.trivial,
                weights: p
                    .tangent
                    .weighted
                    .iter()
                    .map(|(w, k)| WeightEntry { weight: w.0.clone(), multiplicity: *k })
                    .collect(),
                evaluation: p
                    .evaluation
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !Ring::is_zero(*c))
                    .map(|(g, c)| (names(g), format_rational(c)))
                    .collect(),
            })
            .collect(),
        classes: m
            .classes
            .iter()
            .map(|c| ClassEntry { name: c.name.clone(), terms: element_terms(m, &c.element) })
            .collect(),
        maps: maps
            .iter()
            .map(|(f, src, tgt)| MapEntry {
                name: f.name.clone(),
                source: src.clone(),
                target: tgt.clone(),
                pullback: {
                    let mut out = Vec::new();
                    for i in 0..f.pullback.rows() {
                        for j in 0..f.pullback.cols() {
                            let v = f.pullback.get(i, j);
                            if !Ring::is_zero(v) {
                                out.push((
                                    f.source.gen_name(i).to_string(),
                                    f.target.gen_name(j).to_string(),
                                    format_rational(v),
                                ));
                            }
                        }
                    }
                    out
                },
            })
            .collect(),
    }
}

/// Writes JSON with containers kept on one line when they are short.
pub fn render_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn inline(v: &Value) -> String {
    match v {
        Value::Array(a) => format!("[{}]", a.iter().map(inline).collect::<Vec<_>>().join(", ")),
        Value::Object(o) => {
            let parts: Vec<String> = o
                .iter()
                .map(|(k, x)| format!("{}: {}", serde_json::to_string(k).expect("keys serialize"), inline(x)))
                .collect();
            format!("{{{}}}", parts.join(", "))
        }
        _ => serde_json::to_string(v).expect("JSON values serialize"),
    }
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let flat = inline(v);
    let fits = match v {
        Value::Array(a) => a.iter().all(|x| !x.is_object()) && flat.len() + indent <= 96,
        Value::Object(o) => flat.len() + indent <= 72 && o.values().all(|x| !x.is_array() && !x.is_object()),
        _ => true,
    };
    if fits {
        out.push_str(&flat);
        return;
    }
    let pad = " ".repeat(indent + 2);
    match v {
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad);
                write_value(x, indent + 2, out);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&" ".repeat(indent));
            out.push(']');
        }
        Value::Object(o) => {
            out.push_str("{\n");
            for (i, (k, x)) in o.iter().enumerate() {
                out.push_str(&pad);
                out.push_str(&serde_json::to_string(k).expect("keys serialize"));
                out.push_str(": ");
                write_value(x, indent + 2, out);
                out.push_str(if i + 1 < o.len() { ",\n" } else { "\n" });
            }
            out.push_str(&" ".repeat(indent));
            out.push('}');
        }
        _ => unreachable!(),
    }
}

pub fn model_to_string(m: &InvariantModel) -> String {
    bundle_to_string(m, &[])
}

/// Maps are given with the selectors to record for their two ends.
pub fn bundle_to_string(m: &InvariantModel, maps: &[(ModelMap, String, String)]) -> String {
    let file = to_file(m, maps);
    render_json(&serde_json::to_value(&file).expect("model files serialize"))
}

pub fn save_model(m: &InvariantModel, path: &Path) -> Result<()> {
    std::fs::write(path, model_to_string(m))?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<InvariantModel> {
    Ok(load_bundle(path)?.model)
}

pub fn load_bundle(path: &Path) -> Result<ModelBundle> {
    let text = std::fs::read_to_string(path)?;
    parse_bundle(&text, &path.display().to_string())
}

/// First line (1-based) mentioning `"needle"` as a JSON string.
fn locate(text: &str, needle: &str) -> Option<usize> {
    let quoted = format!("\"{needle}\"");
    let decl = format!("\"name\": {quoted}");
    let decl_tight = format!("\"name\":{quoted}");
    let lines: Vec<&str> = text.lines().collect();
    lines
        .iter()
        .position(|l| l.contains(&decl) || l.contains(&decl_tight))
        .or_else(|| lines.iter().position(|l| l.contains(&quoted)))
        .map(|i| i + 1)
}

fn anchor(origin: &str, text: &str, needle: &str) -> String {
    match locate(text, needle) {
        Some(line) => format!("{origin}:{line}"),
        None => origin.to_string(),
    }
}

/// Parses and validates a model file. `origin` names the source in
/// diagnostics.
pub fn parse_bundle(text: &str, origin: &str) -> Result<ModelBundle> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("{origin}:{}:{}: {e}", e.line(), e.column())))?;
    match value.get("schema_version").and_then(Value::as_u64) {
        Some(v) if v == SCHEMA_VERSION as u64 => {}
        Some(v) => return Err(Error::SchemaVersion { found: v as u32, expected: SCHEMA_VERSION }),
        None => return Err(Error::Parse(format!("{origin}:1: missing numeric schema_version"))),
    }
    let file: ModelFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("{origin}:{}:{}: {e}", e.line(), e.column())))?;
    let model = from_file(&file).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{origin}: {msg}")),
        other => other,
    })?;
    let report = validate_model(&model).map_err(|e| Error::Parse(format!("{origin}: {e}")))?;
    if !report.is_valid() {
        let witness = report.violations[0].witnesses.first().cloned().unwrap_or_default();
        return Err(Error::Rejected { location: anchor(origin, text, &witness), report });
    }
    let mut maps = Vec::new();
    for entry in &file.maps {
        let loc = anchor(origin, text, &entry.name);
        let rejected = |reason: String| Error::MapRejected { location: loc.clone(), map: entry.name.clone(), reason };
        let source = resolve(&entry.source, &model).map_err(|e| rejected(e.to_string()))?;
        let target = resolve(&entry.target, &model).map_err(|e| rejected(e.to_string()))?;
        let mut p = Matrix::new(source.dim(), target.dim(), crate::algebra::rat(0));
        for (row, col, v) in &entry.pullback {
            let i = source.index_of(row).ok_or_else(|| rejected(format!("unknown source generator `{row}`")))?;
            let j = target.index_of(col).ok_or_else(|| rejected(format!("unknown target generator `{col}`")))?;
            p.set(i, j, parse_rational(v).map_err(|e| rejected(e.to_string()))?);
        }
        let f = ModelMap::new(&entry.name, source, target, p).map_err(|e| rejected(e.to_string()))?;
        let r = validate_map(&f).map_err(|e| rejected(e.to_string()))?;
        if let Some(v) = r.violations.first() {
            return Err(rejected(format!("{} fails at `{}`", v.relation, v.witness)));
        }
        maps.push(f);
    }
    Ok(ModelBundle { model, maps })
}

fn resolve(selector: &str, this: &InvariantModel) -> Result<InvariantModel> {
    if selector == "self" {
        Ok(this.clone())
    } else if let Some(name) = selector.strip_prefix("builtin:") {
        builtin(name)
    } else {
        Err(Error::Parse(format!("map endpoint `{selector}` must be `self` or `builtin:NAME`")))
    }
}

/// Builds the model from parsed file contents without validating axioms.
pub fn from_file(f: &ModelFile) -> Result<InvariantModel> {
    let generators: Vec<Generator> = f.generators.iter().map(|g| Generator::new(&g.name, g.degree)).collect();
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, g) in f.generators.iter().enumerate() {
        if index.insert(g.name.as_str(), i).is_some() {
            return Err(Error::Parse(format!("duplicate generator `{}`", g.name)));
        }
    }
    let ix = |name: &str, ctx: &str| -> Result<usize> {
        index.get(name).copied().ok_or_else(|| Error::Parse(format!("{ctx} refers to unknown generator `{name}`")))
    };
    let q = |s: &str, ctx: &str| parse_rational(s).map_err(|e| Error::Parse(format!("{ctx}: {e}")));
    let n = f.torus_rank;
    let mut m = InvariantModel::skeleton(&f.name, n, generators, f.top_degree);
    m.notes = f.notes.clone();
    m.compact = f.compact;
    m.unit = f.unit.as_deref().map(|u| ix(u, "unit")).transpose()?;
    let fill = |entries: &[Entry], ctx: &str, mat: &mut Matrix<Rational>| -> Result<()> {
        for (row, col, v) in entries {
            let (i, j) = (ix(row, ctx)?, ix(col, ctx)?);
            if !Ring::is_zero(mat.get(i, j)) {
                return Err(Error::Parse(format!("{ctx}: duplicate entry ({row}, {col})")));
            }
            mat.set(i, j, q(v, ctx)?);
        }
        Ok(())
    };
    fill(&f.d, "d", &mut m.d)?;
    if f.contractions.len() != n {
        return Err(Error::Parse(format!("{} contraction lists for torus rank {n}", f.contractions.len())));
    }
    for (k, entries) in f.contractions.iter().enumerate() {
        fill(entries, &format!("c{}", k + 1), &mut m.contractions[k])?;
    }
    let mut products: BTreeMap<(usize, usize), Vec<(usize, Rational)>> = BTreeMap::new();
    for (a, b, c, v) in &f.products {
        let key = (ix(a, "products")?, ix(b, "products")?);
        let slot = products.entry(key).or_default();
        if !c.is_empty() {
            let val = q(v, "products")?;
            if !Ring::is_zero(&val) {
                slot.push((ix(c, "products")?, val));
            }
        }
    }
    m.products = products;
    for (g, v) in &f.integration {
        m.integration.insert(ix(g, "integration")?, q(v, "integration")?);
    }
    for p in &f.fixed_points {
        let ctx = format!("fixed point `{}`", p.name);
        let weighted = p.weights.iter().map(|w| (Weight(w.weight.clone()), w.multiplicity)).collect();
        let tangent =
            LinearRepresentation::new(n, p.trivial, weighted).map_err(|e| Error::Parse(format!("{ctx}: {e}")))?;
        let mut evaluation = vec![crate::algebra::rat(0); m.dim()];
        for (g, v) in &p.evaluation {
            evaluation[ix(g, &ctx)?] = q(v, &ctx)?;
        }
        m.fixed_points.push(FixedPoint { name: p.name.clone(), tangent, evaluation });
    }
    for c in &f.classes {
        let ctx = format!("class `{}`", c.name);
        let mut element = m.zero_element();
        for (g, expr) in &c.terms {
            let p = Polynomial::parse(expr, n).map_err(|e| Error::Parse(format!("{ctx}: {e}")))?;
            let i = ix(g, &ctx)?;
            element.coeffs[i] = &element.coeffs[i] + &p;
        }
        m.classes.push(NamedClass { name: c.name.clone(), element });
    }
    Ok(m)
}

/// `builtin:NAME` or a path to a model file.
pub fn select(selector: &str) -> Result<InvariantModel> {
    Ok(select_bundle(selector)?.model)
}

pub fn select_bundle(selector: &str) -> Result<ModelBundle> {
    match selector.strip_prefix("builtin:") {
        Some(name) => Ok(ModelBundle { model: builtin(name)?, maps: Vec::new() }),
        None => load_bundle(Path::new(selector)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_version_checked_first() {
        let e = parse_bundle(r#"{"schema_version": 7, "bogus": 1}"#, "mem").unwrap_err();
        assert!(matches!(e, Error::SchemaVersion { found: 7, expected: 1 }));
    }

    #[test]
    fn syntax_errors_carry_location() {
        let e = parse_bundle("{\n  \"schema_version\": 1,\n  oops\n}", "mem").unwrap_err();
        assert!(e.to_string().contains("mem:3:"), "{e}");
    }

    #[test]
    fn unknown_generator_is_named() {
        let text = r#"{"schema_version": 1, "name": "x", "torus_rank": 0, "top_degree": 0, "compact": true,
            "generators": [{"name": "g", "degree": 0}], "d": [["h", "g", "1"]]}"#;
        let e = parse_bundle(text, "mem").unwrap_err().to_string();
        assert!(e.contains("unknown generator `h`"), "{e}");
    }

    #[test]
    fn render_keeps_short_arrays_inline() {
        let v: Value = serde_json::from_str(r#"{"a": [["x", "y", "1"]], "b": {"name": "t", "degree": 0}}"#).unwrap();
        let s = render_json(&v);
        assert!(s.contains(r#"[["x", "y", "1"]]"#), "{s}");
        assert!(s.contains(r#"{"name": "t", "degree": 0}"#), "{s}");
    }
}
