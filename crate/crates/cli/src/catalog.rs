//! Curated scenarios with stored expected outcomes.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use uctkit::tower::{jensen_kernel_profile, parse_tower, pext, RuleVerdict};
use uctkit::uct::{
    fine_structure, finite_model_check, jensen_obstruction, kk_filtration_diagram, kk_group, kl_group,
    lim1_gamma_check, milnor_obstruction, random_finite_data, topology_report, FiniteModelReport,
};
use uctkit::{DirectTower, FgGroup, GroupExpr, GroupValue, KTheoryData};

use crate::job::Catalog;
use crate::report::Report;
use crate::run::{cert_kind, obstruction_name, single_ext_data, to_json, verdict_name};
use crate::CliError;

pub const FINITE_MODEL_SEED: u64 = 20_240_531;
pub const FINITE_MODEL_COUNT: usize = 100;
pub const FINITE_MODEL_MAX_ORDER: u64 = 32;
pub const FINITE_MODEL_MAX_KK: u64 = 4096;

/// Outcome rows are compared at this window; larger windows only lengthen
/// kernel lists, which are cut to this length.
const KERNEL_ROWS: usize = 12;

/// `(tower, target, verdict dictated by the vanishing rules)`.
pub const VANISHING_SUITE: [(&str, &str, RuleVerdict); 14] = [
    ("stable(Z/6)", "Z", RuleVerdict::Zero),
    ("stable(Sum(Z^2, Z/4))", "InfSum(2; n)", RuleVerdict::Zero),
    ("elementary(2,1)", "Z", RuleVerdict::Zero),
    ("affine(3; n)", "Z", RuleVerdict::Zero),
    ("free(1)", "InfSum(2; n)", RuleVerdict::Zero),
    ("elementary(5,2)", "Prufer(5)", RuleVerdict::Zero),
    ("prufer(2)", "Prufer(3)", RuleVerdict::Zero),
    ("prufer(3)", "Sum(Z/5, Prufer(2))", RuleVerdict::Zero),
    ("prufer(2)", "InfSum(2; 3)", RuleVerdict::Zero),
    ("prufer(3)", "InfProduct(Z/3)", RuleVerdict::Zero),
    ("prufer(2)", "Z", RuleVerdict::Divisible),
    ("prufer(5)", "Z^(omega)", RuleVerdict::Divisible),
    ("prufer(2)", "Padic(2; Z)", RuleVerdict::Divisible),
    ("prufer(3)", "Sum(Z, Z^3)", RuleVerdict::Divisible),
];

fn e(s: &str) -> GroupExpr {
    s.parse().expect("catalog expression")
}

fn trivial() -> DirectTower {
    DirectTower::stable(FgGroup::trivial())
}

pub fn remark24_data() -> (DirectTower, GroupExpr) {
    (DirectTower::elementary(2, 1).unwrap(), GroupExpr::z())
}

pub fn remark46_data() -> KTheoryData {
    KTheoryData::new(DirectTower::elementary(2, 1).unwrap(), trivial(), e("Z/2"), e("0"))
}

pub fn example53_data(p: u64) -> KTheoryData {
    KTheoryData::new(
        DirectTower::prufer(p).unwrap(),
        trivial(),
        e("0"),
        GroupExpr::inf_sum(p, 1, 0).unwrap(),
    )
}

/// The seeded random finite models of the `finite-models` scenario.
pub fn finite_models() -> Vec<KTheoryData> {
    let mut rng = ChaCha8Rng::seed_from_u64(FINITE_MODEL_SEED);
    (0..FINITE_MODEL_COUNT)
        .map(|_| random_finite_data(&mut rng, FINITE_MODEL_MAX_ORDER, FINITE_MODEL_MAX_KK))
        .collect()
}

fn profile_of(g: &GroupValue) -> Value {
    json!({
        "value": g.describe(),
        "cardinality": to_json(&g.profile.cardinality),
        "exponent": to_json(&g.profile.exponent),
    })
}

fn remark24(window: usize) -> Result<Value, CliError> {
    let (t, h) = remark24_data();
    let r = pext(&t, &h, window)?;
    let data = single_ext_data(&t, &h);
    let kk = kk_group(&data, 0, window)?;
    let top = topology_report(&data, 0, window)?;
    let kernels: Vec<Value> = jensen_kernel_profile(&t, &h, window)?
        .into_iter()
        .take(KERNEL_ROWS)
        .map(|k| json!({ "stage": k.stage, "value": k.value, "description": k.description }))
        .collect();
    Ok(json!({
        "ext": profile_of(&kk.components[0].value),
        "pext": verdict_name(r.verdict),
        "pext_certificate": cert_kind(&r.certificate),
        "rule": r.rule_name,
        "zadic_discrete": to_json(&top.zadic_discrete),
        "jensen_discrete": to_json(&top.jensen_discrete),
        "jensen_kernels": kernels,
    }))
}

fn remark46(window: usize) -> Result<Value, CliError> {
    let data = remark46_data();
    let mut degrees = Vec::new();
    for n in 0..2 {
        let kk = kk_group(&data, n, window)?;
        let z = fine_structure(&data, n, window)?;
        degrees.push(json!({
            "degree": n,
            "kk": profile_of(&kk.group),
            "hom": kk.hom.describe(),
            "ext": kk.ext.describe(),
            "fine_structure": verdict_name(z.verdict),
            "milnor": obstruction_name(&milnor_obstruction(&data, n, window)?),
        }));
    }
    Ok(json!({
        "degrees": degrees,
        "grading_check": lim1_gamma_check(&data, window).passed,
    }))
}

fn example53(window: usize) -> Result<Value, CliError> {
    let mut cases = Vec::new();
    for p in [2, 3] {
        let data = example53_data(p);
        let kk = kk_group(&data, 0, window)?;
        let z = fine_structure(&data, 0, window)?;
        let d = kk_filtration_diagram(&data, 0, window)?;
        let split = kk.group.as_extension().map(|x| to_json(&x.split));
        cases.push(json!({
            "p": p,
            "hom": kk.hom.describe(),
            "kk": kk.group.describe(),
            "split": split,
            "pext": verdict_name(z.verdict),
            "pext_certificate": cert_kind(&z.components[0].certificate),
            "kl": kl_group(&data, 0, window).describe(),
            "milnor": to_json(&milnor_obstruction(&data, 0, window)?),
            "jensen": to_json(&jensen_obstruction(&data, 0, window)?),
            "pullback_square": to_json(&d.exactness.pullback_square),
            "grading_check": lim1_gamma_check(&data, window).passed,
        }));
    }
    Ok(json!({ "cases": cases }))
}

fn vanishing_suite(window: usize) -> Result<Value, CliError> {
    let mut rows = Vec::new();
    for (tower, target, expected) in VANISHING_SUITE {
        let t = parse_tower(tower)?;
        let r = pext(&t, &e(target), window)?;
        let window_agrees = !(expected == RuleVerdict::Zero
            && r.window_verdict == uctkit::tower::Lim1Verdict::NonzeroCertified);
        rows.push(json!({
            "tower": tower,
            "target": target,
            "rule": to_json(&r.rule),
            "rule_name": r.rule_name,
            "verdict": verdict_name(r.verdict),
            "matches_rule": r.rule == expected && window_agrees,
        }));
    }
    Ok(json!({ "pairs": rows }))
}

fn check_model(data: &KTheoryData) -> Result<Vec<FiniteModelReport>, CliError> {
    (0..2).map(|n| Ok(finite_model_check(data, n)?)).collect()
}

fn finite(_window: usize) -> Result<Value, CliError> {
    let models = finite_models();
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(8);
    let chunk = models.len().div_ceil(threads);
    let results: Vec<Result<Vec<FiniteModelReport>, CliError>> = std::thread::scope(|s| {
        let handles: Vec<_> = models
            .chunks(chunk)
            .map(|c| s.spawn(move || c.iter().map(check_model).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut passed = 0;
    let mut pairs = 0u64;
    let mut deep = 0;
    let mut failures = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        let reports = r?;
        if reports.iter().all(|x| x.passed) {
            passed += 1;
        } else {
            failures.push(i);
        }
        pairs += reports.iter().map(|x| x.compatible_pairs).sum::<u64>();
        deep += usize::from(reports.iter().any(|x| x.stages > 2));
    }
    Ok(json!({
        "seed": FINITE_MODEL_SEED,
        "instances": FINITE_MODEL_COUNT,
        "passed": passed,
        "failures": failures,
        "compatible_pairs": pairs,
        "instances_with_three_or_more_stages": deep,
    }))
}

fn golden_text(c: Catalog) -> &'static str {
    match c {
        Catalog::Remark24 => include_str!("../golden/remark24.json"),
        Catalog::Remark46 => include_str!("../golden/remark46.json"),
        Catalog::Example53 => include_str!("../golden/example53.json"),
        Catalog::VanishingSuite => include_str!("../golden/thm52-suite.json"),
        Catalog::FiniteModels => include_str!("../golden/finite-models.json"),
    }
}

pub fn golden(c: Catalog) -> Value {
    serde_json::from_str(golden_text(c)).expect("golden files are JSON")
}

pub fn outcome(c: Catalog, window: usize) -> Result<Value, CliError> {
    match c {
        Catalog::Remark24 => remark24(window),
        Catalog::Remark46 => remark46(window),
        Catalog::Example53 => example53(window),
        Catalog::VanishingSuite => vanishing_suite(window),
        Catalog::FiniteModels => finite(window),
    }
}

/// Paths at which `got` differs from `want`, one line each.
pub fn diff(want: &Value, got: &Value) -> Vec<String> {
    fn walk(path: &str, a: &Value, b: &Value, out: &mut Vec<String>) {
        match (a, b) {
            (Value::Object(x), Value::Object(y)) => {
                let keys: std::collections::BTreeSet<&String> = x.keys().chain(y.keys()).collect();
                for k in keys {
                    let p = format!("{path}.{k}");
                    match (x.get(k), y.get(k)) {
                        (Some(u), Some(v)) => walk(&p, u, v, out),
                        (Some(u), None) => out.push(format!("- {p}: {u}")),
                        (None, Some(v)) => out.push(format!("+ {p}: {v}")),
                        (None, None) => unreachable!(),
                    }
                }
            }
            (Value::Array(x), Value::Array(y)) if x.len() == y.len() => {
                for (i, (u, v)) in x.iter().zip(y).enumerate() {
                    walk(&format!("{path}[{i}]"), u, v, out);
                }
            }
            _ if a != b => out.push(format!("~ {path}: expected {a}, got {b}")),
            _ => {}
        }
    }
    let mut out = Vec::new();
    walk("$", want, got, &mut out);
    out
}

/// Writes `value` as the new golden file when `UCTKIT_BLESS` is set.
fn bless(c: Catalog, value: &Value) -> Result<bool, CliError> {
    if std::env::var_os("UCTKIT_BLESS").is_none() {
        return Ok(false);
    }
    let path = format!("{}/golden/{}.json", env!("CARGO_MANIFEST_DIR"), c.name());
    let text = crate::report::render(value);
    std::fs::write(&path, text).map_err(|source| CliError::Io { path, source })?;
    Ok(true)
}

pub fn run(c: Catalog, job: String, window: usize) -> Result<Report, CliError> {
    let got = outcome(c, window)?;
    if !bless(c, &got)? {
        let lines = diff(&golden(c), &got);
        if !lines.is_empty() {
            return Err(CliError::GoldenMismatch {
                name: c.name().into(),
                diff: lines.join("\n"),
            });
        }
    }
    let summary = match &got {
        Value::Object(m) => m.iter().map(|(k, v)| (k.clone(), compact(v))).collect(),
        other => vec![("outcome".into(), other.to_string())],
    };
    Ok(Report {
        command: "catalog-run",
        job,
        summary,
        result: json!({ "catalog": c.name(), "golden_match": true, "outcome": got }),
    })
}

fn compact(v: &Value) -> String {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Array(xs) => format!("{} entries", xs.len()),
        other => other.to_string(),
    };
    if s.chars().count() > 72 {
        format!("{}...", s.chars().take(69).collect::<String>())
    } else {
        s
    }
}
