//! The `cartan` command line: argument parsing, dispatch and report
//! rendering. `run` is the whole program minus process exit.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use cartan_core::algebra::{parse_rational, Matrix, Polynomial, Rational, RationalFunction, Ring, DEFAULT_SEED};
use cartan_core::duality::{
    classify_rank1, cohomology_presentation, duality_check, ext_rank1, integrate, is_torsion, pairing_on,
    ModuleClassification,
};
use cartan_core::euler::{
    euler_linear, fixed_point_data, lefschetz_number, localization_consistency, localize_integral, nested_euler_check,
    LinearRepresentation,
};
use cartan_core::gcomplex::{
    cartan_differential, cohomology_generic, cohomology_report, default_cutoff, generic_betti_total_specialized,
    induced_on_cohomology, ordinary_cohomology, predict_free_hilbert, validate_model, InvariantModel,
};
use cartan_core::gysin::{
    adjunction_residuals, default_samples, gysin_localized, projection_formula_check, pullback_cohomology,
    restrict_subtorus, thom_extend, validate_map, ModelMap,
};
use cartan_core::models::{builtin, save_model, select_bundle, ModelBundle};
use cartan_core::{Error, ValidationReport};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

/// Library operations and the one subcommand that exposes each.
pub const COVERAGE: &[(&str, &str)] = &[
    ("builtin", "validate"),
    ("load_model", "validate"),
    ("validate_model", "validate"),
    ("validate_map", "validate"),
    ("cohomology_generic", "cohomology"),
    ("cohomology_hilbert", "cohomology"),
    ("predict_free_hilbert", "cohomology"),
    ("generic_specialized_rank", "cohomology"),
    ("smith_normal_form", "classify"),
    ("classify_rank1", "classify"),
    ("ext_rank1", "classify"),
    ("pairing_matrix", "pairing"),
    ("rank_and_solve", "duality"),
    ("duality_check", "duality"),
    ("is_torsion", "duality"),
    ("pullback_cohomology", "gysin"),
    ("gysin_localized", "gysin"),
    ("projection_formula_check", "gysin"),
    ("cartan_differential", "thom"),
    ("thom_extend", "thom"),
    ("euler_linear", "euler"),
    ("nested_euler_check", "euler"),
    ("integrate", "localize"),
    ("localize_integral", "localize"),
    ("localization_consistency", "localize"),
    ("lefschetz_number", "lefschetz"),
    ("restrict_subtorus", "restrict"),
    ("save_model", "restrict"),
];

pub const SUBCOMMANDS: &[&str] = &[
    "validate",
    "cohomology",
    "classify",
    "pairing",
    "duality",
    "gysin",
    "thom",
    "euler",
    "localize",
    "lefschetz",
    "restrict",
];

#[derive(Parser, Debug)]
#[command(name = "cartan", version, about = "Exact torus-equivariant cohomology of finite invariant models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
pub struct Common {
    /// `builtin:NAME` or a model file path.
    #[arg(long)]
    pub model: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Highest degree of Hilbert tables [default: 2·top + 2·rank + 4].
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Seed for randomized rank checks.
    #[arg(long, env = "CARTAN_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the model axioms and any maps declared with it.
    Validate(Common),
    /// Generic Betti numbers, cocycle representatives and the Hilbert table.
    Cohomology(Common),
    /// Graded decomposition over ℚ[u] with Hom and Ext¹ (rank 1 only).
    Classify(Common),
    /// Equivariant Poincaré pairing on the generic representatives.
    Pairing(Common),
    /// Perfectness of the pairing over the fraction field, and torsion.
    Duality(Common),
    /// Localized Gysin morphism with adjunction and projection residuals.
    Gysin {
        #[command(flatten)]
        common: Common,
        /// `identity`, `constant`, `inclusion:POINT` or a map declared in the file.
        #[arg(long, default_value = "constant")]
        map: String,
    },
    /// Extend an ordinary cocycle to a Cartan cocycle.
    Thom {
        #[command(flatten)]
        common: Common,
        /// Comma-separated `generator=value` entries, e.g. `vol=1`.
        #[arg(long)]
        cocycle: String,
    },
    /// Tangent Euler classes at the fixed points.
    Euler {
        #[command(flatten)]
        common: Common,
        /// Extra weights `a,b;c,d` summed onto every tangent space.
        #[arg(long)]
        extra: Option<String>,
    },
    /// Localization of integrals to the fixed points.
    Localize {
        #[command(flatten)]
        common: Common,
        /// Named class; without it every generic cocycle is checked.
        #[arg(long)]
        class: Option<String>,
    },
    /// Lefschetz number of a self-map on ordinary cohomology.
    Lefschetz {
        #[command(flatten)]
        common: Common,
        /// `identity` or a self-map declared in the file.
        #[arg(long, default_value = "identity")]
        map: String,
    },
    /// Restrict along `v ↦ A v` to a subtorus.
    Restrict {
        #[command(flatten)]
        common: Common,
        /// Rows of the integer matrix `A` (one per torus variable),
        /// `;`-separated with `,` between entries.
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        /// Write the restricted model here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Validate(c)
            | Command::Cohomology(c)
            | Command::Classify(c)
            | Command::Pairing(c)
            | Command::Duality(c) => c,
            Command::Gysin { common, .. }
            | Command::Thom { common, .. }
            | Command::Euler { common, .. }
            | Command::Localize { common, .. }
            | Command::Lefschetz { common, .. }
            | Command::Restrict { common, .. } => common,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::Cohomology(_) => "cohomology",
            Command::Classify(_) => "classify",
            Command::Pairing(_) => "pairing",
            Command::Duality(_) => "duality",
            Command::Gysin { .. } => "gysin",
            Command::Thom { .. } => "thom",
            Command::Euler { .. } => "euler",
            Command::Localize { .. } => "localize",
            Command::Lefschetz { .. } => "lefschetz",
            Command::Restrict { .. } => "restrict",
        }
    }
}

/// A finished report: machine form, human form, exit status.
struct Report {
    json: Value,
    text: String,
    code: i32,
}

impl Report {
    fn ok(json: Value, text: String) -> Self {
        Report { json, text, code: 0 }
    }
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = std::result::Result<Report, Failure>;

/// Runs the program on `args` (including the program name) and returns the
/// exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    0
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    1
                }
            };
        }
    };
    let common = cli.command.common();
    let format = common.format;
    let name = cli.command.name();
    let outcome = select_bundle(&common.model).map_err(Failure::from).and_then(|b| dispatch(&cli.command, &b));
    let report = match outcome {
        Ok(r) => r,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            return 1;
        }
        Err(Failure::Core(e)) => match rejection(name, &common.model, &e) {
            Some(r) => r,
            None => {
                let _ = writeln!(err, "error: {e}");
                return 1;
            }
        },
    };
    let _ = match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report.json).expect("json values serialize")),
        Format::Text => write!(out, "{}", report.text),
    };
    report.code
}

/// Validation failures still produce a report, with exit status 2.
fn rejection(command: &str, selector: &str, e: &Error) -> Option<Report> {
    let (location, report, reason) = match e {
        Error::Invalid(r) => (None, Some(r), None),
        Error::Rejected { location, report } => (Some(location.as_str()), Some(report), None),
        Error::MapRejected { location, map, reason } => (Some(location.as_str()), None, Some((map, reason))),
        _ => return None,
    };
    let mut json = json!({ "command": command, "model": selector, "valid": false });
    let mut text = String::new();
    if let Some(loc) = location {
        json["location"] = json!(loc);
        text.push_str(&format!("{loc}: rejected\n"));
    }
    if let Some(r) = report {
        json["violations"] = violations_json(r);
        text.push_str(&r.to_string());
    }
    if let Some((map, why)) = reason {
        json["map"] = json!(map);
        json["reason"] = json!(why);
        text.push_str(&format!("map `{map}`: {why}\n"));
    }
    Some(Report { json, text, code: 2 })
}

fn violations_json(r: &ValidationReport) -> Value {
    Value::Array(
        r.violations
            .iter()
            .map(|v| {
                json!({
                    "axiom": v.axiom.to_string(),
                    "witnesses": v.witnesses,
                    "residual": v.residual,
                    "detail": v.detail,
                })
            })
            .collect(),
    )
}

fn dispatch(command: &Command, bundle: &ModelBundle) -> Outcome {
    let m = &bundle.model;
    let c = command.common();
    match command {
        Command::Validate(_) => validate(c, bundle),
        Command::Cohomology(_) => cohomology(c, m),
        Command::Classify(_) => classify(c, m),
        Command::Pairing(_) => pairing(c, m),
        Command::Duality(_) => duality(c, m),
        Command::Gysin { map, .. } => gysin(c, bundle, map),
        Command::Thom { cocycle, .. } => thom(c, m, cocycle),
        Command::Euler { extra, .. } => euler(c, m, extra.as_deref()),
        Command::Localize { class, .. } => localize(c, m, class.as_deref()),
        Command::Lefschetz { map, .. } => lefschetz(c, bundle, map),
        Command::Restrict { matrix, output, .. } => restrict(c, m, matrix, output.as_ref()),
    }
}

fn header(command: &str, c: &Common, m: &InvariantModel) -> Value {
    json!({ "command": command, "model": m.name, "selector": c.model, "torus_rank": m.torus_rank })
}

fn extend(mut base: Value, more: Value) -> Value {
    if let (Value::Object(b), Value::Object(m)) = (&mut base, more) {
        b.extend(m);
    }
    base
}

fn strings<T: ToString>(xs: &[T]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

fn matrix_rows<T: Ring + ToString>(m: &Matrix<T>) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| strings(m.row(i))).collect()
}

fn matrix_text<T: Ring + ToString>(m: &Matrix<T>, indent: &str) -> String {
    let rows = matrix_rows(m);
    if rows.iter().all(Vec::is_empty) {
        return format!("{indent}({}x{} empty)\n", m.rows(), m.cols());
    }
    let width = rows.iter().flatten().map(|s| s.chars().count()).max().unwrap_or(0);
    rows.iter()
        .map(|r| {
            let cells: Vec<String> = r.iter().map(|s| format!("{s:>width$}")).collect();
            format!("{indent}[ {} ]\n", cells.join("  "))
        })
        .collect()
}

fn list(xs: &[usize]) -> String {
    format!("[{}]", xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
}

fn validate(c: &Common, b: &ModelBundle) -> Outcome {
    let m = &b.model;
    let report = validate_model(m)?;
    let mut maps = Vec::new();
    let mut text = report.to_string();
    let mut code = if report.is_valid() { 0 } else { 2 };
    for f in &b.maps {
        let r = validate_map(f)?;
        if !r.is_valid() {
            code = 2;
        }
        text.push_str(&format!(
            "map `{}`: {}\n",
            f.name,
            if r.is_valid() { "valid".to_string() } else { format!("{} violation(s)", r.violations.len()) }
        ));
        for v in &r.violations {
            text.push_str(&format!("  [{}] witness {}\n", v.relation, v.witness));
        }
        maps.push(json!({ "name": f.name, "valid": r.is_valid(), "violations": serde_json::to_value(&r.violations).expect("serializable") }));
    }
    let json = extend(
        header("validate", c, m),
        json!({ "valid": code == 0, "violations": violations_json(&report), "maps": maps }),
    );
    Ok(Report { json, text, code })
}

fn cohomology(c: &Common, m: &InvariantModel) -> Outcome {
    let cutoff = c.cutoff.unwrap_or_else(|| default_cutoff(m));
    let r = cohomology_report(m, cutoff)?;
    let special = generic_betti_total_specialized(m, c.seed)?;
    let free = predict_free_hilbert(m, cutoff)?;
    let cocycles: Vec<Value> =
        r.generic_cocycles.iter().zip(&r.cocycle_degrees).map(|(e, d)| json!({ "degree": d, "element": e })).collect();
    let json = extend(
        header("cohomology", c, m),
        json!({
            "cutoff": cutoff,
            "generic_betti": { "even": r.generic_betti.0, "odd": r.generic_betti.1 },
            "generic_cocycles": cocycles,
            "specialized_total": special,
            "seed": c.seed,
            "hilbert": r.hilbert,
            "free_prediction": { "underlying": free.underlying, "predicted": free.predicted, "matches": free.matches },
        }),
    );
    let mut text = format!("model {} (torus rank {})\n", m.name, m.torus_rank);
    text.push_str(&format!("generic Betti numbers: even {}, odd {}\n", r.generic_betti.0, r.generic_betti.1));
    text.push_str(&format!("specialized total (seed {}): {special}\n", c.seed));
    for (e, d) in r.generic_cocycles.iter().zip(&r.cocycle_degrees) {
        text.push_str(&format!("  degree {d}: {e}\n"));
    }
    text.push_str(&format!("hilbert (0..={cutoff}): {}\n", list(&r.hilbert)));
    text.push_str(&format!(
        "free prediction from {}: {} ({})\n",
        list(&free.underlying),
        list(&free.predicted),
        if free.matches { "matches" } else { "differs" }
    ));
    Ok(Report::ok(json, text))
}

fn classification_json(c: &ModuleClassification) -> Value {
    json!({
        "free_rank": c.free_rank,
        "free_degrees": c.free_degrees,
        "torsion": c.divisors.iter().zip(&c.torsion_degrees).map(|(p, d)| json!({ "divisor": p.to_string(), "degree": d })).collect::<Vec<_>>(),
        "is_free": c.is_free,
        "is_torsion_free": c.is_torsion_free,
        "is_reflexive": c.is_reflexive,
        "is_torsion": c.is_torsion,
    })
}

fn classification_text(c: &ModuleClassification) -> String {
    let mut parts: Vec<String> = c.free_degrees.iter().map(|d| format!("Q[u][{}]", -d)).collect();
    for (p, d) in c.divisors.iter().zip(&c.torsion_degrees) {
        parts.push(format!("Q[u]/({p})[{}]", -d));
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn classify(c: &Common, m: &InvariantModel) -> Outcome {
    let cutoff = c.cutoff.unwrap_or_else(|| default_cutoff(m));
    let cl = classify_rank1(m)?;
    let p = cohomology_presentation(m)?;
    let e = ext_rank1(&p)?;
    let ext1: Vec<Value> = e.ext1.iter().map(|(p, d)| json!({ "divisor": p.to_string(), "degree": d })).collect();
    let json = extend(
        header("classify", c, m),
        json!({
            "classification": classification_json(&cl),
            "hilbert": cl.hilbert(cutoff),
            "presentation": { "generator_degrees": p.generator_degrees, "relations": matrix_rows(&p.relations) },
            "hom": classification_json(&e.ext0),
            "ext1": ext1,
        }),
    );
    let flags = [
        ("free", cl.is_free),
        ("reflexive", cl.is_reflexive),
        ("torsion-free", cl.is_torsion_free),
        ("torsion", cl.is_torsion),
    ];
    let mut text = format!("H_T({}) = {}\n", m.name, classification_text(&cl));
    let set: Vec<&str> = flags.iter().filter(|f| f.1).map(|f| f.0).collect();
    text.push_str(&format!("flags: {}\n", if set.is_empty() { "-".into() } else { set.join(", ") }));
    text.push_str(&format!("hilbert (0..={cutoff}): {}\n", list(&cl.hilbert(cutoff))));
    text.push_str(&format!("Hom(H, Q[u]) = {}\n", classification_text(&e.ext0)));
    let ext1_text: Vec<String> = e.ext1.iter().map(|(p, d)| format!("Q[u]/({p})[{}]", -d)).collect();
    text.push_str(&format!(
        "Ext1(H, Q[u]) = {}\n",
        if ext1_text.is_empty() { "0".into() } else { ext1_text.join(" + ") }
    ));
    Ok(Report::ok(json, text))
}

fn pairing(c: &Common, m: &InvariantModel) -> Outcome {
    let coh = cohomology_generic(m)?;
    let p = pairing_on(m, &coh)?;
    let reps: Vec<String> = coh.reps.iter().map(|r| m.format_element(&r.element)).collect();
    let json = extend(
        header("pairing", c, m),
        json!({ "basis": reps, "degrees": p.degrees, "matrix": matrix_rows(&p.matrix) }),
    );
    let mut text = format!("pairing on {} generic cocycle(s) of {}\n", reps.len(), m.name);
    for (r, d) in reps.iter().zip(&p.degrees) {
        text.push_str(&format!("  degree {d}: {r}\n"));
    }
    text.push_str(&matrix_text(&p.matrix, "  "));
    Ok(Report::ok(json, text))
}

fn duality(c: &Common, m: &InvariantModel) -> Outcome {
    let d = duality_check(m)?;
    let torsion = is_torsion(m)?;
    let json = extend(
        header("duality", c, m),
        json!({
            "pairing_rank": d.pairing_rank,
            "generic_betti_total": d.generic_betti_total,
            "perfect": d.perfect,
            "is_torsion": torsion,
        }),
    );
    let text = format!(
        "pairing rank {} of {} generic classes: {}\ntorsion: {}\n",
        d.pairing_rank,
        d.generic_betti_total,
        if d.perfect { "perfect" } else { "degenerate" },
        if torsion { "yes" } else { "no" }
    );
    Ok(Report { json, text, code: if d.perfect { 0 } else { 2 } })
}

fn point_for(m: &InvariantModel) -> Result<InvariantModel, Failure> {
    Ok(builtin(&format!("point({})", m.torus_rank))?)
}

fn pick_map(b: &ModelBundle, spec: &str) -> Result<ModelMap, Failure> {
    let m = &b.model;
    if let Some(f) = b.maps.iter().find(|f| f.name == spec) {
        return Ok(f.clone());
    }
    match spec {
        "identity" => Ok(ModelMap::identity(m)),
        "constant" => Ok(ModelMap::constant(m, &point_for(m)?)?),
        _ => match spec.strip_prefix("inclusion:") {
            Some(name) => {
                let idx = m
                    .fixed_points
                    .iter()
                    .position(|p| p.name == name)
                    .ok_or_else(|| Failure::Usage(format!("model `{}` has no fixed point `{name}`", m.name)))?;
                Ok(ModelMap::fixed_point_inclusion(m, idx, &point_for(m)?)?)
            }
            None => {
                let declared: Vec<&str> = b.maps.iter().map(|f| f.name.as_str()).collect();
                Err(Failure::Usage(format!(
                    "unknown map `{spec}`; use identity, constant, inclusion:POINT{}",
                    if declared.is_empty() { String::new() } else { format!(" or one of {}", declared.join(", ")) }
                )))
            }
        },
    }
}

fn rf_zero(xs: &Matrix<RationalFunction>) -> bool {
    xs.is_zero()
}

fn gysin(c: &Common, b: &ModelBundle, spec: &str) -> Outcome {
    let f = pick_map(b, spec)?;
    let base = extend(
        header("gysin", c, &b.model),
        json!({ "map": f.name, "source": f.source.name, "target": f.target.name }),
    );
    if is_torsion(&f.target)? {
        let reason = "target cohomology is torsion: the localized Gysin map is zero-dimensional and the integral \
                      one is not determined by adjunction";
        let json = extend(base, json!({ "status": "refused_torsion_target", "reason": reason }));
        let text = format!("gysin {}: refused ({reason})\n", f.name);
        return Ok(Report::ok(json, text));
    }
    let g = gysin_localized(&f)?;
    let residuals = adjunction_residuals(&f, &g)?;
    let pull = pullback_cohomology(&f)?;
    let samples = default_samples(&f, &g);
    let projection = projection_formula_check(&f, &g, &samples)?;
    let proj_ok = projection.iter().all(|r| r.is_zero());
    let src: Vec<String> = g.source_basis.reps.iter().map(|r| f.source.format_element(&r.element)).collect();
    let tgt: Vec<String> = g.target_basis.reps.iter().map(|r| f.target.format_element(&r.element)).collect();
    let json = extend(
        base,
        json!({
            "status": "ok",
            "degree_shift": g.degree_shift,
            "source_basis": src,
            "target_basis": tgt,
            "gysin": matrix_rows(&g.matrix),
            "pullback": matrix_rows(&pull),
            "adjunction_zero": rf_zero(&residuals),
            "projection_formula": {
                "samples": projection.len(),
                "all_zero": proj_ok,
                "failures": projection.iter().filter(|r| !r.is_zero()).map(|r| json!({ "alpha": r.alpha, "beta": r.beta })).collect::<Vec<_>>(),
            },
        }),
    );
    let mut text =
        format!("gysin {}: {} -> {} (degree shift {})\n", f.name, f.source.name, f.target.name, g.degree_shift);
    text.push_str(&format!("source basis: {}\n", src.join(", ")));
    text.push_str(&format!("target basis: {}\n", tgt.join(", ")));
    text.push_str("f_! =\n");
    text.push_str(&matrix_text(&g.matrix, "  "));
    text.push_str("f^* =\n");
    text.push_str(&matrix_text(&pull, "  "));
    text.push_str(&format!("adjunction residuals: {}\n", if rf_zero(&residuals) { "zero" } else { "NONZERO" }));
    text.push_str(&format!(
        "projection formula: {} sample(s), {}\n",
        projection.len(),
        if proj_ok { "all zero" } else { "NONZERO residuals" }
    ));
    Ok(Report::ok(json, text))
}

fn parse_cocycle(m: &InvariantModel, s: &str) -> Result<Vec<Rational>, Failure> {
    let mut v = vec![Rational::from_integer(0.into()); m.dim()];
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (g, val) =
            part.split_once('=').ok_or_else(|| Failure::Usage(format!("expected generator=value, got `{part}`")))?;
        let i = m
            .index_of(g.trim())
            .ok_or_else(|| Failure::Usage(format!("model `{}` has no generator `{}`", m.name, g.trim())))?;
        v[i] = parse_rational(val.trim()).map_err(|e| Failure::Usage(e.to_string()))?;
    }
    Ok(v)
}

fn thom(c: &Common, m: &InvariantModel, cocycle: &str) -> Outcome {
    let phi = parse_cocycle(m, cocycle)?;
    let base = extend(header("thom", c, m), json!({ "cocycle": cocycle }));
    let x = match thom_extend(m, &phi) {
        Ok(x) => x,
        Err(Error::ThomObstruction { degree }) => {
            let json = extend(base, json!({ "status": "obstructed", "obstruction_degree": degree }));
            let text = format!("extension of {cocycle} is obstructed in degree {degree}\n");
            return Ok(Report::ok(json, text));
        }
        Err(e) => return Err(e.into()),
    };
    let closed = cartan_differential(m, &x)?.is_zero();
    let coh = cohomology_generic(m)?;
    let coords = coh.express_element(&x)?;
    let basis: Vec<String> = coh.reps.iter().map(|r| m.format_element(&r.element)).collect();
    let json = extend(
        base,
        json!({
            "status": "ok",
            "extension": m.format_element(&x),
            "cartan_closed": closed,
            "basis": basis,
            "class": strings(&coords),
        }),
    );
    let mut text = format!("extension: {}\n", m.format_element(&x));
    text.push_str(&format!("d_T(extension) = 0: {}\n", if closed { "yes" } else { "NO" }));
    text.push_str(&format!("class in basis [{}]: [{}]\n", basis.join(", "), strings(&coords).join(", ")));
    Ok(Report::ok(json, text))
}

fn parse_weights(s: &str) -> Result<Vec<Vec<i64>>, Failure> {
    s.split(';')
        .map(str::trim)
        .filter(|r| !r.is_empty())
        .map(|row| {
            row.split(',')
                .map(|x| x.trim().parse::<i64>().map_err(|_| Failure::Usage(format!("bad integer `{}`", x.trim()))))
                .collect()
        })
        .collect()
}

fn euler(c: &Common, m: &InvariantModel, extra: Option<&str>) -> Outcome {
    let extra = match extra {
        Some(s) => Some(
            LinearRepresentation::from_weights(m.torus_rank, &parse_weights(s)?)
                .map_err(|e| Failure::Usage(e.to_string()))?,
        ),
        None => None,
    };
    let mut points = Vec::new();
    let mut text = format!("tangent Euler classes of {}\n", m.name);
    for p in &m.fixed_points {
        let eu = euler_linear(&p.tangent);
        let weights: Vec<Value> =
            p.tangent.weighted.iter().map(|(w, k)| json!({ "weight": w.0, "multiplicity": k })).collect();
        let mut entry =
            json!({ "name": p.name, "trivial": p.tangent.trivial, "weights": weights, "euler": eu.to_string() });
        text.push_str(&format!("  {}: {eu}", p.name));
        if let Some(x) = &extra {
            let ok = nested_euler_check(&p.tangent, x)?;
            let total = euler_linear(&p.tangent.direct_sum(x)?);
            entry["with_extra"] = json!({ "euler": total.to_string(), "multiplicative": ok });
            text.push_str(&format!(
                "; with extra: {total} ({})",
                if ok { "multiplicative" } else { "NOT multiplicative" }
            ));
        }
        text.push('\n');
        points.push(entry);
    }
    let json = extend(header("euler", c, m), json!({ "fixed_points": points }));
    Ok(Report::ok(json, text))
}

fn localize(c: &Common, m: &InvariantModel, class: Option<&str>) -> Outcome {
    match class {
        Some(name) => {
            let data = fixed_point_data(m)?;
            let l = localize_integral(&data, name)?;
            let integral = match m.class(name) {
                Some(x) => Some(integrate(m, x)?),
                None => None,
            };
            let residual = integral.as_ref().map(|p| l.value.minus_poly(p));
            let json = extend(
                header("localize", c, m),
                json!({
                    "class": name,
                    "localized": l.value.to_string(),
                    "is_polynomial": l.is_polynomial,
                    "integral": integral.as_ref().map(ToString::to_string),
                    "residual": residual.as_ref().map(ToString::to_string),
                }),
            );
            let mut text = format!("{}\n", l.value);
            if let (Some(i), Some(r)) = (&integral, &residual) {
                text.push_str(&format!("integral: {i}; residual: {r}\n"));
            }
            Ok(Report::ok(json, text))
        }
        None => {
            let r = localization_consistency(m)?;
            let entries: Vec<Value> = r
                .entries
                .iter()
                .map(|e| {
                    json!({
                        "cocycle": e.class,
                        "localized": e.localized.to_string(),
                        "integral": e.integral.to_string(),
                        "residual": e.residual.to_string(),
                    })
                })
                .collect();
            let json = extend(header("localize", c, m), json!({ "consistent": r.consistent(), "entries": entries }));
            let mut text = String::new();
            for e in &r.entries {
                text.push_str(&format!(
                    "{}: localized {}, integral {}, residual {}\n",
                    e.class, e.localized, e.integral, e.residual
                ));
            }
            text.push_str(&format!("consistent: {}\n", if r.consistent() { "yes" } else { "no" }));
            Ok(Report { json, text, code: if r.consistent() { 0 } else { 2 } })
        }
    }
}

trait MinusPoly {
    fn minus_poly(&self, p: &Polynomial) -> RationalFunction;
}

impl MinusPoly for RationalFunction {
    fn minus_poly(&self, p: &Polynomial) -> RationalFunction {
        self.minus(&RationalFunction::from_poly(p.clone()))
    }
}

fn lefschetz(c: &Common, b: &ModelBundle, spec: &str) -> Outcome {
    let m = &b.model;
    let f = match spec {
        "identity" => ModelMap::identity(m),
        _ => pick_map(b, spec)?,
    };
    if f.source != *m || f.target != *m {
        return Err(Failure::Usage(format!("map `{}` is not a self-map of `{}`", f.name, m.name)));
    }
    let action = induced_on_cohomology(m, &f.pullback)?;
    let number = lefschetz_number(&action)?;
    let dims = ordinary_cohomology(m);
    let traces: Vec<String> = action.iter().map(|a| a.trace().to_string()).collect();
    let json = extend(
        header("lefschetz", c, m),
        json!({ "map": f.name, "betti": dims, "traces": traces, "lefschetz_number": number.to_string() }),
    );
    let text =
        format!("map {}: betti {}, traces [{}], Lefschetz number {number}\n", f.name, list(&dims), traces.join(", "));
    Ok(Report::ok(json, text))
}

fn parse_restriction(n: usize, s: &str) -> Result<(Vec<Vec<i64>>, usize), Failure> {
    let rows: Vec<&str> = if n == 0 && s.trim().is_empty() { Vec::new() } else { s.split(';').collect() };
    if rows.len() != n {
        return Err(Failure::Usage(format!("--matrix needs {n} row(s) separated by `;`, got {}", rows.len())));
    }
    let a: Vec<Vec<i64>> = rows
        .iter()
        .map(|row| {
            row.split(',')
                .map(str::trim)
                .filter(|x| !x.is_empty())
                .map(|x| x.parse::<i64>().map_err(|_| Failure::Usage(format!("bad integer `{x}`"))))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let r = a.first().map_or(0, Vec::len);
    if a.iter().any(|row| row.len() != r) {
        return Err(Failure::Usage("--matrix rows have different lengths".into()));
    }
    Ok((a, r))
}

fn restrict(c: &Common, m: &InvariantModel, matrix: &str, output: Option<&PathBuf>) -> Outcome {
    let (a, r) = parse_restriction(m.torus_rank, matrix)?;
    let restricted = restrict_subtorus(m, &a, r)?;
    let cutoff = c.cutoff.unwrap_or_else(|| default_cutoff(&restricted));
    let report = cohomology_report(&restricted, cutoff)?;
    if let Some(path) = output {
        save_model(&restricted, path)?;
    }
    let json = extend(
        header("restrict", c, m),
        json!({
            "matrix": a,
            "restricted": restricted.name,
            "restricted_rank": r,
            "cutoff": cutoff,
            "generic_betti": { "even": report.generic_betti.0, "odd": report.generic_betti.1 },
            "hilbert": report.hilbert,
            "output": output.map(|p| p.display().to_string()),
        }),
    );
    let mut text = format!("{} restricted to rank {r}: {}\n", m.name, restricted.name);
    text.push_str(&format!("generic Betti numbers: even {}, odd {}\n", report.generic_betti.0, report.generic_betti.1));
    text.push_str(&format!("hilbert (0..={cutoff}): {}\n", list(&report.hilbert)));
    if let Some(p) = output {
        text.push_str(&format!("written to {}\n", p.display()));
    }
    Ok(Report::ok(json, text))
}
