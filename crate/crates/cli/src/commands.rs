use std::path::{Path, PathBuf};

use carnot_core::contact::{
    conformal_defect, contact_defect, jet, jet_jacobi_check, one_part_in, solve_polynomial_conformal, zero_part_in,
    DEFAULT_ORACLE_DEGREE,
};
use carnot_core::derivations::{basis_maps, constrain_g0, strata_derivations};
use carnot_core::group::{extend_automorphism, similarity_check, GroupError};
use carnot_core::linalg::{int, rat};
use carnot_core::prolongation::{
    full_prolongation, Element, ProlongationAlgebra, Status, TerminationReport, DEFAULT_MAX_K,
};
use carnot_core::tau::{realize_tau, TauRealization};
use carnot_core::{
    left_invariant_frame, CoordinateRecipe, Frame, GradedLieAlgebra, Group, Matrix, Polynomial, PolyVectorField,
    Rational, Subspace,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::report::Report;
use crate::spec_file::{self, ParseError, SpecFile};

const SEED: u64 = 0x00ca_4e07;
const JET_POINTS: usize = 5;
const TRANSLATIONS: usize = 10;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {err}", path.display())]
    Parse { path: PathBuf, err: ParseError },
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub max_k: Option<usize>,
    pub degree: Option<u32>,
    pub inject_field: Option<String>,
}

fn load(path: &Path) -> Result<SpecFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    spec_file::parse(&text).map_err(|err| CliError::Parse {
        path: path.to_path_buf(),
        err,
    })
}

fn header(command: &str, path: &Path, spec: &SpecFile) -> Report {
    let mut r = Report::new(command);
    let file = path.file_name().map_or_else(|| path.display().to_string(), |f| f.to_string_lossy().into_owned());
    r.set("file", file);
    r.set("name", spec.algebra.name.clone());
    r
}

fn build(spec: &SpecFile, r: &mut Report) -> Option<GradedLieAlgebra> {
    match GradedLieAlgebra::from_spec(&spec.algebra) {
        Ok(g) => Some(g),
        Err(e) => {
            r.set("valid", false);
            r.set("violation", e.to_string());
            r.fail(format!("invalid algebra: {e}"));
            None
        }
    }
}

fn make_group(g: &GradedLieAlgebra, spec: &SpecFile) -> Result<Group, GroupError> {
    let recipe = match &spec.recipe {
        Some(factors) => CoordinateRecipe::new(g, factors)?,
        None => CoordinateRecipe::first_kind(g),
    };
    Group::new(g.clone(), recipe)
}

fn group_or_fail(g: &GradedLieAlgebra, spec: &SpecFile, r: &mut Report) -> Option<Group> {
    r.set("recipe", if spec.recipe.is_some() { "declared" } else { "first_kind" });
    match make_group(g, spec) {
        Ok(group) => Some(group),
        Err(e) => {
            r.fail(format!("coordinate recipe: {e}"));
            None
        }
    }
}

fn g0_or_fail(g: &GradedLieAlgebra, spec: &SpecFile, r: &mut Report) -> Option<(Subspace, Subspace)> {
    let ders = strata_derivations(g);
    match constrain_g0(g, &ders, &spec.g0) {
        Ok(g0) => Some((ders, g0)),
        Err(e) => {
            r.fail(format!("g0 constraint: {e}"));
            None
        }
    }
}

fn prolong_or_fail(
    g: &GradedLieAlgebra,
    g0: &Subspace,
    max_k: usize,
    r: &mut Report,
) -> Option<(ProlongationAlgebra, TerminationReport)> {
    match full_prolongation(g, g0, max_k) {
        Ok(out) => Some(out),
        Err(e) => {
            r.fail(format!("prolongation: {e}"));
            None
        }
    }
}

fn max_k(spec: &SpecFile, opts: &Options) -> usize {
    opts.max_k.or(spec.max_k).unwrap_or(DEFAULT_MAX_K)
}

fn render_vec(v: &[Rational]) -> String {
    format!("[{}]", v.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
}

fn render_matrix(m: &Matrix) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| render_vec(&(0..m.cols()).map(|j| m[(i, j)].clone()).collect::<Vec<_>>()))
        .collect();
    format!("[{}]", rows.join(","))
}

/// `Σ cᵢ·nameᵢ` with unit coefficients elided.
fn combination(names: &[String], coeffs: &[Rational]) -> String {
    let one = int(1);
    let mut out = String::new();
    for (c, name) in coeffs.iter().zip(names) {
        if *c == int(0) {
            continue;
        }
        let negative = *c < int(0);
        let abs = if negative { -c } else { c.clone() };
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        if abs != one {
            out.push_str(&format!("{abs}*"));
        }
        out.push_str(name);
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

fn summary(report: &TerminationReport) -> String {
    let levels = format!(
        "[{}]",
        report.level_dims.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
    );
    let g0 = report.level_dims.first().copied().unwrap_or(0);
    match report.status {
        Status::TerminatedAt(k) => format!("g0_dim={g0} levels={levels} total={} terminated_at={k}", report.total_dim),
        Status::CutoffReached => format!("g0_dim={g0} cutoff_reached levels={levels}"),
    }
}

fn frame_names(g: &GradedLieAlgebra) -> Vec<String> {
    g.names().iter().map(|n| format!("{n}~")).collect()
}

pub fn validate(path: &Path, _opts: &Options) -> Result<Report, CliError> {
    let spec = load(path)?;
    let mut r = header("validate", path, &spec);
    let Some(g) = build(&spec, &mut r) else { return Ok(r) };
    r.set("valid", true);
    r.set("dim", g.dim());
    r.set("step", g.step());
    r.set("layer_dims", g.layer_dims());
    let layers: Map<String, Value> = (1..=g.step() as i32)
        .map(|w| {
            let names: Vec<&str> = g.layer(-w).iter().map(|&i| g.names()[i].as_str()).collect();
            (format!("g-{w}"), json!(names))
        })
        .collect();
    r.set("layers", layers);
    r.set("brackets", spec.algebra.brackets.len());
    r.set("generated", g.check_generation());
    r.set("g0_kind", spec.g0.kind());
    if let Some((_, g0)) = g0_or_fail(&g, &spec, &mut r) {
        r.set("g0_dim", g0.dim());
    }
    if let Some(group) = group_or_fail(&g, &spec, &mut r) {
        r.set("coordinates", group.recipe().coordinate_names().to_vec());
    }
    Ok(r)
}

pub fn prolong(path: &Path, opts: &Options) -> Result<Report, CliError> {
    let spec = load(path)?;
    let mut r = header("prolong", path, &spec);
    let Some(g) = build(&spec, &mut r) else { return Ok(r) };
    let Some((ders, g0)) = g0_or_fail(&g, &spec, &mut r) else { return Ok(r) };
    let max_k = max_k(&spec, opts);
    let Some((s, report)) = prolong_or_fail(&g, &g0, max_k, &mut r) else { return Ok(r) };
    r.set("summary", summary(&report));
    r.set("layer_dims", g.layer_dims());
    r.set("max_k", max_k);
    r.set("derivations_dim", ders.dim());
    r.set("g0_kind", spec.g0.kind());
    r.set("g0_dim", g0.dim());
    let g0_basis: Vec<String> = basis_maps(&g, &g0).iter().map(|d| render_matrix(&d.to_matrix(&g))).collect();
    r.set("g0_basis", g0_basis);
    r.set("level_dims", report.level_dims.clone());
    match report.status {
        Status::TerminatedAt(k) => {
            r.set("status", "terminated");
            r.set("terminated_at", k);
        }
        Status::CutoffReached => r.set("status", "cutoff_reached"),
    }
    r.set("total_dim", report.total_dim);
    r.set("termination_justified", report.justified);
    r.set("basis", s.names().to_vec());
    let mut levels = Map::new();
    for e in 0..s.dim() {
        if let Element::Level { k, i } = s.element(e) {
            if k == 0 {
                continue;
            }
            let action: Vec<String> = (0..g.dim())
                .map(|x| format!("{} -> {}", g.names()[x], combination(s.names(), &s.action(k, i, x))))
                .collect();
            levels.insert(s.names()[e].clone(), action.join("; ").into());
        }
    }
    if !levels.is_empty() {
        r.set("level_actions", levels);
    }
    let (jacobi, checked) = s.jacobi_failures();
    r.set("jacobi_triples", checked);
    r.set("jacobi_failures", jacobi.len());
    if !jacobi.is_empty() {
        r.fail(format!("Jacobi fails on {} triples", jacobi.len()));
    }
    let grading = s.grading_failures();
    let action = s.action_failures();
    if !grading.is_empty() {
        r.fail(format!("grading fails on {} pairs", grading.len()));
    }
    if !action.is_empty() {
        r.fail(format!("bracket and action disagree on {} pairs", action.len()));
    }
    if !report.justified {
        r.warn("the algebra is not generated by its first layer; a zero level does not prove termination");
    }
    Ok(r)
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.gen_range(-20..=20), rng.gen_range(1..=9))
}

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    (0..n).map(|_| random_rational(rng)).collect()
}

/// A generator name selects its frame field; otherwise `;`-separated
/// frame components in the recipe coordinates.
fn injected_field(text: &str, frame: &Frame) -> Result<PolyVectorField, CliError> {
    let g = frame.algebra();
    if let Some(i) = g.index_of(text.trim()) {
        let mut coeffs = vec![int(0); g.dim()];
        coeffs[i] = int(1);
        return Ok(PolyVectorField::constant(&coeffs));
    }
    let names: Vec<&str> = frame.coordinate_names().iter().map(String::as_str).collect();
    let parts: Vec<&str> = text.split(';').collect();
    if parts.len() != g.dim() {
        return Err(CliError::Usage(format!(
            "--inject-field needs a generator name or {} `;`-separated components",
            g.dim()
        )));
    }
    let comps = parts
        .iter()
        .map(|p| Polynomial::parse(p.trim(), &names))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(format!("--inject-field: {e}")))?;
    Ok(PolyVectorField::new(comps))
}

fn defect_entry(v: &PolyVectorField, frame: &Frame) -> (String, bool) {
    let contact = contact_defect(v, frame);
    if !contact.all_zero {
        return (format!("contact defect on {}", contact.failing().join(" ")), false);
    }
    match conformal_defect(v, frame) {
        Ok(c) if c.all_zero => ("contact=0 conformal=0".into(), true),
        Ok(c) => (format!("contact=0 conformal defect on {}", c.failing().join(" ")), false),
        Err(e) => (e.to_string(), false),
    }
}

fn jet_entry(v: &PolyVectorField, frame: &Frame, s: &ProlongationAlgebra, points: &[Vec<Rational>]) -> Vec<String> {
    let g = s.negative();
    let mut failures = Vec::new();
    for (pi, p) in points.iter().enumerate() {
        let j = match jet(v, frame, p, 1) {
            Ok(j) => j,
            Err(e) => {
                failures.push(format!("p{pi}: {e}"));
                continue;
            }
        };
        if !jet_jacobi_check(&j, g) {
            failures.push(format!("p{pi}: A0 breaks the Leibniz law"));
        }
        if !zero_part_in(&j, &s.levels()[0]) {
            failures.push(format!("p{pi}: A0 outside g0"));
        }
        if s.levels().len() > 1 && !one_part_in(&j, s) {
            failures.push(format!("p{pi}: A1 outside g1"));
        }
    }
    failures
}

fn similarity_section(group: &Group, frame: &Frame, rng: &mut ChaCha8Rng, r: &mut Report) {
    let g = group.algebra();
    let mut sim = Map::new();
    let mut translated = 0;
    for _ in 0..TRANSLATIONS {
        let p = random_point(rng, g.dim());
        match similarity_check(&group.left_translation(&p), frame) {
            Ok(s) if s.similar && s.scale == Some(Polynomial::one()) => translated += 1,
            Ok(_) => r.fail(format!("left translation by {} is not an isometry", render_vec(&p))),
            Err(e) => r.fail(format!("left translation by {}: {e}", render_vec(&p))),
        }
    }
    sim.insert("translations".into(), format!("{translated}/{TRANSLATIONS} similar, k=1").into());
    let mut dilations = Vec::new();
    for lambda in [int(2), rat(1, 3)] {
        let expected = Polynomial::constant(&lambda * &lambda);
        let check = group.dilation(&lambda).map_err(|e| e.to_string()).and_then(|d| {
            similarity_check(&d, frame).map_err(|e| e.to_string())
        });
        match check {
            Ok(s) if s.similar && s.scale.as_ref() == Some(&expected) => {
                dilations.push(format!("lambda={lambda} k={}", &lambda * &lambda));
            }
            Ok(_) => r.fail(format!("dilation by {lambda} is not a similarity with k = lambda^2")),
            Err(e) => r.fail(format!("dilation by {lambda}: {e}")),
        }
    }
    sim.insert("dilations".into(), dilations.into());
    let m = g.layer(-1).len();
    let entry = if m == 1 {
        "skipped: every first-layer map is conformal when m = 1".to_string()
    } else {
        let mut block = Matrix::identity(m);
        for i in 0..m {
            block[(i, i)] = int(i as i64 + 1);
        }
        let label = format!("diag({})", (1..=m).map(|i| i.to_string()).collect::<Vec<_>>().join(","));
        match extend_automorphism(g, &block) {
            Err(_) => format!("skipped: {label} does not extend to an automorphism"),
            Ok(a) => match similarity_check(&group.automorphism_map(&a), frame) {
                Ok(s) if !s.similar => format!("{label}: contact={} similar=false", s.contact),
                Ok(_) => {
                    r.fail(format!("{label} automorphism reported similar"));
                    format!("{label}: similar=true")
                }
                Err(e) => {
                    r.fail(format!("{label}: {e}"));
                    e.to_string()
                }
            },
        }
    };
    sim.insert("nonconformal_automorphism".into(), entry.into());
    r.set("similarity", sim);
}

fn tau_or_fail(s: &ProlongationAlgebra, group: &Group, frame: &Frame, r: &mut Report) -> Option<TauRealization> {
    match realize_tau(s, group, frame) {
        Ok(t) => Some(t),
        Err(e) => {
            r.fail(format!("tau: {e}"));
            None
        }
    }
}

pub fn verify(path: &Path, opts: &Options) -> Result<Report, CliError> {
    let spec = load(path)?;
    let mut r = header("verify", path, &spec);
    let Some(g) = build(&spec, &mut r) else { return Ok(r) };
    let Some((_, g0)) = g0_or_fail(&g, &spec, &mut r) else { return Ok(r) };
    let Some(group) = group_or_fail(&g, &spec, &mut r) else { return Ok(r) };
    let frame = left_invariant_frame(&group);
    let injected = opts.inject_field.as_deref().map(|t| injected_field(t, &frame)).transpose()?;
    let Some((s, report)) = prolong_or_fail(&g, &g0, max_k(&spec, opts), &mut r) else { return Ok(r) };
    r.set("summary", summary(&report));
    if !s.is_terminated() {
        r.fail("the prolongation reached the cutoff; tau needs a terminated prolongation");
        return Ok(r);
    }
    let coords = frame.coordinate_names().to_vec();
    r.set("coordinates", coords.clone());
    let partials: Vec<String> = coords.iter().map(|c| format!("d{c}")).collect();
    let frame_map: Map<String, Value> = (0..g.dim())
        .map(|i| (g.names()[i].clone(), frame.field(i).display(&coords, &partials).into()))
        .collect();
    r.set("frame", frame_map);
    let Some(tau) = tau_or_fail(&s, &group, &frame, &mut r) else { return Ok(r) };
    let fnames = frame_names(&g);
    r.set("fields", tau.fields.len());
    let tau_map: Map<String, Value> = tau
        .names
        .iter()
        .zip(&tau.fields)
        .map(|(n, v)| (n.clone(), v.display(&coords, &fnames).into()))
        .collect();
    r.set("tau", tau_map);
    let check = tau.check_homomorphism(&s, &frame);
    r.set("sign", check.sign);
    r.set("sign_pairs_checked", check.pairs_checked);
    for (a, b) in &check.failures {
        r.fail(format!("[tau({0}),tau({1})] != eps*tau([{0},{1}])", s.names()[*a], s.names()[*b]));
    }
    let mut defects = Map::new();
    for (n, v) in tau.names.iter().zip(&tau.fields) {
        let (entry, ok) = defect_entry(v, &frame);
        if !ok {
            r.fail(format!("tau({n}): {entry}"));
        }
        defects.insert(n.clone(), entry.into());
    }
    r.set("defects", defects);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let points: Vec<Vec<Rational>> = (0..JET_POINTS).map(|_| random_point(&mut rng, g.dim())).collect();
    let mut jets = Map::new();
    jets.insert("points".into(), points.iter().map(|p| render_vec(p)).collect::<Vec<_>>().into());
    for (n, v) in tau.names.iter().zip(&tau.fields) {
        let failures = jet_entry(v, &frame, &s, &points);
        let entry = if failures.is_empty() { "pass".to_string() } else { failures.join("; ") };
        if !failures.is_empty() {
            r.fail(format!("jets of tau({n}): {entry}"));
        }
        jets.insert(n.clone(), entry.into());
    }
    r.set("jets", jets);
    similarity_section(&group, &frame, &mut rng, &mut r);
    if let Some(v) = injected {
        let (entry, ok) = defect_entry(&v, &frame);
        r.set("injected", json!({ "field": v.display(&coords, &fnames), "defects": entry }));
        if !ok {
            r.fail(format!("injected field: {entry}"));
        }
    }
    Ok(r)
}

pub fn oracle(path: &Path, opts: &Options) -> Result<Report, CliError> {
    let spec = load(path)?;
    let mut r = header("oracle", path, &spec);
    let Some(g) = build(&spec, &mut r) else { return Ok(r) };
    let Some((_, g0)) = g0_or_fail(&g, &spec, &mut r) else { return Ok(r) };
    let Some(group) = group_or_fail(&g, &spec, &mut r) else { return Ok(r) };
    let frame = left_invariant_frame(&group);
    let degree = opts.degree.or(spec.oracle_degree).unwrap_or(DEFAULT_ORACLE_DEGREE);
    let solutions = solve_polynomial_conformal(&frame, degree);
    r.set("degree", degree);
    r.set("oracle_dim", solutions.dim());
    let Some((s, report)) = prolong_or_fail(&g, &g0, max_k(&spec, opts), &mut r) else { return Ok(r) };
    r.set("summary", summary(&report));
    if !s.is_terminated() {
        r.set("prolongation_total", Value::Null);
        r.set("span_match", "unavailable");
        r.warn("the prolongation reached the cutoff; only the oracle dimension is reported");
        return Ok(r);
    }
    r.set("prolongation_total", report.total_dim);
    let Some(tau) = tau_or_fail(&s, &group, &frame, &mut r) else { return Ok(r) };
    let dim = solutions.dim();
    let total = report.total_dim;
    let span = solutions.span_matches(&tau.fields);
    r.set(
        "span_match",
        match span {
            Some(true) => "match",
            Some(false) => "mismatch",
            None => "tau fields exceed the degree bound",
        },
    );
    if dim < total {
        r.warn(format!("cutoff too small: degree {degree} finds {dim} of {total} fields"));
    } else if dim > total {
        r.fail(format!("oracle finds {dim} fields, more than the prolongation total {total}"));
    } else if span != Some(true) {
        r.fail("oracle space differs from the span of the tau fields");
    }
    Ok(r)
}
