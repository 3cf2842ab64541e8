use serde::Serialize;
use serde_json::{json, Value};

use uctkit::expr::{ext_from_fg, hom_from_fg};
use uctkit::tower::{
    apply_ext, apply_hom, colimit_group, image_chain, jensen_kernel_profile, lim1, lim_group, ml_status, pext,
    Certificate, Lim1Verdict,
};
use uctkit::uct::{
    fine_structure, jensen_obstruction, kk_filtration_diagram, kk_group, kl_group, lim1_gamma_check,
    milnor_obstruction, topology_report, NodeStatus, ObstructionReport, ObstructionVerdict,
};
use uctkit::{DirectTower, FgGroup, GroupExpr, GroupValue, KTheoryData};

use crate::job::{Command, Functor, JobSpec};
use crate::report::Report;
use crate::{catalog, CliError};

pub(crate) fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

pub(crate) fn verdict_name(v: Lim1Verdict) -> &'static str {
    match v {
        Lim1Verdict::Zero => "zero",
        Lim1Verdict::NonzeroCertified => "nonzero_certified",
        Lim1Verdict::Inconclusive => "inconclusive",
    }
}

pub(crate) fn cert_kind(c: &Certificate) -> &'static str {
    match c {
        Certificate::MlStabilized { .. } => "ml_stabilized",
        Certificate::SelfSimilarStrictDescent { .. } => "self_similar_strict_descent",
        Certificate::InconclusiveWindow { .. } => "inconclusive_window",
        Certificate::RuleDerived { .. } => "rule_derived",
    }
}

pub(crate) fn obstruction_name(o: &ObstructionReport) -> String {
    match &o.verdict {
        ObstructionVerdict::Vanishes { reason } => format!("vanishes ({reason})"),
        ObstructionVerdict::NonzeroPaperBacked { rule, infinite_order } => {
            let order = if *infinite_order { ", infinite order" } else { "" };
            format!("nonzero ({rule}{order})")
        }
        ObstructionVerdict::Unknown => "unknown".into(),
    }
}

fn status_name(s: &NodeStatus) -> String {
    match s {
        NodeStatus::Verified => "verified".into(),
        NodeStatus::RuleDerived { rule } => format!("by {rule}"),
        NodeStatus::Unchecked { reason } => format!("unchecked: {reason}"),
    }
}

fn fg_source(g: &GroupExpr) -> Result<FgGroup, CliError> {
    g.as_fg()
        .ok_or_else(|| CliError::Semantic(format!("source {g} is not finitely generated")))
}

fn degrees(degree: Option<usize>) -> Vec<usize> {
    match degree {
        Some(d) => vec![d],
        None => vec![0, 1],
    }
}

/// `KTheoryData` with `K_0(A)` given by `t` and `h` as the Ext target of
/// `KK_0`, so that `KK_0 = Ext(colim t, h)`.
pub(crate) fn single_ext_data(t: &DirectTower, h: &GroupExpr) -> KTheoryData {
    KTheoryData::new(
        t.clone(),
        DirectTower::stable(FgGroup::trivial()),
        GroupExpr::zero(),
        h.clone(),
    )
}

fn fg_functor(name: &'static str, job: String, g: &GroupExpr, h: &GroupExpr) -> Result<Report, CliError> {
    let f = fg_source(g)?;
    let value = if name == "fg-hom" { hom_from_fg(&f, h)? } else { ext_from_fg(&f, h)? };
    let v = GroupValue::expr(value);
    Ok(Report {
        command: name,
        job,
        summary: vec![(if name == "fg-hom" { "Hom" } else { "Ext" }.to_string(), v.describe())],
        result: json!({ "source": g, "target": h, "value": to_json(&v) }),
    })
}

fn tower_analyze(
    job: String,
    t: &DirectTower,
    functor: Functor,
    h: &GroupExpr,
    stage: usize,
    spec: &JobSpec,
) -> Result<Report, CliError> {
    let window = spec.options.window;
    let inv = match functor {
        Functor::Hom => apply_hom(t, h),
        Functor::Ext => apply_ext(t, h),
    };
    let l1 = lim1(&inv, window);
    let ml = ml_status(&inv, window);
    let (lim, lim_cert) = lim_group(&inv, window);
    let lim = GroupValue::from_lim(lim, lim_cert);
    let chain = match image_chain(&inv, stage, window, spec.options.truncation) {
        Ok(c) => json!({
            "decreasing": c.is_decreasing(),
            "first_repeat": c.first_repeat(),
            "chain": to_json(&c),
        }),
        Err(e) => json!({ "unavailable": e.to_string() }),
    };
    let stage_value = inv.stage_expr(stage)?;
    let replays = l1.certificate.verify();
    if !replays {
        return Err(CliError::Internal(format!("lim¹ certificate for {} does not replay", inv.describe())));
    }
    let summary = vec![
        ("tower".to_string(), inv.describe()),
        (format!("stage {stage}"), stage_value.to_string()),
        ("lim".to_string(), lim.describe()),
        ("lim¹".to_string(), verdict_name(l1.verdict).to_string()),
        ("certificate".to_string(), cert_kind(&l1.certificate).to_string()),
    ];
    Ok(Report {
        command: "tower-analyze",
        job,
        summary,
        result: json!({
            "tower": t,
            "functor": match functor { Functor::Hom => "hom", Functor::Ext => "ext" },
            "target": h,
            "inverse_tower": inv.describe(),
            "stage": { "index": stage, "group": stage_value },
            "image_chain": chain,
            "ml": to_json(&ml),
            "lim": to_json(&lim),
            "lim1": to_json(&l1),
            "certificate_replays": replays,
        }),
    })
}

fn pext_job(job: String, t: &DirectTower, h: &GroupExpr, window: usize) -> Result<Report, CliError> {
    let r = pext(t, h, window)?;
    let data = single_ext_data(t, h);
    let kk = kk_group(&data, 0, window)?;
    let c = &kk.components[0];
    let topology = topology_report(&data, 0, window)?;
    let kernels = jensen_kernel_profile(t, h, window)?;
    let colim = colimit_group(t);
    let summary = vec![
        ("Ext".to_string(), c.value.describe()),
        ("Pext".to_string(), verdict_name(r.verdict).to_string()),
        ("certificate".to_string(), cert_kind(&r.certificate).to_string()),
        ("rule".to_string(), r.rule_name.unwrap_or("none").to_string()),
        ("lim Ext".to_string(), c.lim_ext.describe()),
        ("Z-adic discrete".to_string(), format!("{:?}", topology.zadic_discrete)),
        ("Jensen discrete".to_string(), format!("{:?}", topology.jensen_discrete)),
    ];
    Ok(Report {
        command: "pext",
        job,
        summary,
        result: json!({
            "tower": t,
            "colimit": colim,
            "target": h,
            "pext": to_json(&r),
            "ext": to_json(&c.value),
            "lim_ext": to_json(&c.lim_ext),
            "topology": {
                "zadic_discrete": to_json(&topology.zadic_discrete),
                "jensen_discrete": to_json(&topology.jensen_discrete),
                "zadic": to_json(&topology.zadic),
                "facts": to_json(&topology.facts),
            },
            "jensen_kernels": to_json(&kernels),
        }),
    })
}

fn uct_report(job: String, data: &KTheoryData, degree: Option<usize>, window: usize) -> Result<Report, CliError> {
    let mut out = Vec::new();
    let mut summary = Vec::new();
    for n in degrees(degree) {
        let kk = kk_group(data, n, window)?;
        let fine = fine_structure(data, n, window)?;
        let kl = kl_group(data, n, window);
        let m = milnor_obstruction(data, n, window)?;
        let j = jensen_obstruction(data, n, window)?;
        summary.extend([
            (format!("KK_{n}"), kk.group.describe()),
            (format!("Hom_{n}"), kk.hom.describe()),
            (format!("Ext_{n}"), kk.ext.describe()),
            (format!("Z_{n}"), verdict_name(fine.verdict).to_string()),
            (format!("KL_{n}"), kl.describe()),
            (format!("m_{n}"), obstruction_name(&m)),
            (format!("j_{n}"), obstruction_name(&j)),
        ]);
        out.push(json!({
            "degree": n,
            "kk": to_json(&kk),
            "fine_structure": to_json(&fine),
            "kl": to_json(&kl),
            "milnor": to_json(&m),
            "jensen": to_json(&j),
        }));
    }
    let gamma = lim1_gamma_check(data, window);
    summary.push(("grading check".into(), if gamma.passed { "passed" } else { "failed" }.into()));
    Ok(Report {
        command: "uct-report",
        job,
        summary,
        result: json!({ "data": to_json(data), "degrees": out, "grading": to_json(&gamma) }),
    })
}

fn diagram_check(job: String, data: &KTheoryData, degree: Option<usize>, window: usize) -> Result<Report, CliError> {
    let mut out = Vec::new();
    let mut summary = Vec::new();
    for n in degrees(degree) {
        let d = kk_filtration_diagram(data, n, window)?;
        summary.extend([
            (format!("KK_{n}"), d.groups.kk.describe()),
            (format!("lim¹ KK_{n}"), d.groups.lim1_kk.describe()),
            (format!("lim KK_{n}"), d.groups.lim_kk.describe()),
            (format!("Milnor row {n}"), status_name(&d.exactness.milnor_row)),
            (format!("UCT row {n}"), status_name(&d.exactness.uct_row)),
            (format!("pullback {n}"), status_name(&d.exactness.pullback_square)),
        ]);
        if let Some(f) = &d.finite_model {
            summary.push((
                format!("finite model {n}"),
                format!("{} ({} compatible pairs)", if f.passed { "passed" } else { "failed" }, f.compatible_pairs),
            ));
        }
        out.push(to_json(&d));
    }
    Ok(Report {
        command: "diagram-check",
        job,
        summary,
        result: json!({ "data": to_json(data), "degrees": out }),
    })
}

/// Runs one job. Strictness and output are handled by the caller.
pub fn run_job(spec: &JobSpec) -> Result<Report, CliError> {
    let job = spec.to_string();
    let window = spec.options.window;
    match &spec.command {
        Command::FgHom { source, target } => fg_functor("fg-hom", job, source, target),
        Command::FgExt { source, target } => fg_functor("fg-ext", job, source, target),
        Command::TowerAnalyze {
            tower,
            functor,
            target,
            stage,
        } => tower_analyze(job, tower, *functor, target, *stage, spec),
        Command::Pext { tower, target } => pext_job(job, tower, target, window),
        Command::UctReport { data, degree } => uct_report(job, data, *degree, window),
        Command::DiagramCheck { data, degree } => diagram_check(job, data, *degree, window),
        Command::CatalogRun { catalog } => catalog::run(*catalog, job, window),
    }
}
