use serde::Serialize;

use super::certificate::{Certificate, DescentEvidence, MemberWitness, MlEvidence};
use super::direct::{DirectKind, DirectTower};
use super::inverse::{Copies, FgInverse, FgSource, InverseTower, Maker, Part, Tail};
use crate::expr::{
    canonicalize, ext_from_fg, hom_from_fg, invariants, quotient_by, torsion_subgroup_at, Cardinality, GroupExpr,
    InfSum, InvariantProfile,
};
use crate::fg::{hom_induced_co, FgGroup, FgHom, IntMatrix, Subgroup};
use crate::num::{pow, valuation};

pub const DEFAULT_WINDOW: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Lim1Verdict {
    Zero,
    NonzeroCertified,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValueHint {
    Expr { value: GroupExpr },
    Profile { profile: InvariantProfile },
}

#[derive(Clone, Debug, Serialize)]
pub struct Lim1Result {
    pub verdict: Lim1Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value_hint: Option<ValueHint>,
    pub certificate: Certificate,
}

/// An inverse limit with no closed form among group expressions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProDescriptor {
    pub description: String,
    pub profile: InvariantProfile,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LimValue {
    Expr { value: GroupExpr },
    Pro(ProDescriptor),
}

impl LimValue {
    fn expr(e: GroupExpr) -> Self {
        LimValue::Expr { value: canonicalize(&e) }
    }

    pub fn as_expr(&self) -> Option<&GroupExpr> {
        match self {
            LimValue::Expr { value } => Some(value),
            LimValue::Pro(_) => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            LimValue::Expr { value } => value.to_string(),
            LimValue::Pro(d) => d.description.clone(),
        }
    }

    pub fn profile(&self) -> InvariantProfile {
        match self {
            LimValue::Expr { value } => invariants(value),
            LimValue::Pro(d) => d.profile.clone(),
        }
    }

    fn sum(self, other: LimValue) -> LimValue {
        match (self, other) {
            (LimValue::Expr { value: a }, LimValue::Expr { value: b }) => LimValue::expr(GroupExpr::Sum(vec![a, b])),
            (a, b) => LimValue::Pro(ProDescriptor {
                description: format!("Sum({}, {})", a.describe(), b.describe()),
                profile: a.profile().direct_sum(&b.profile()),
            }),
        }
    }
}

enum PartStatus {
    Ml { evidence: Vec<MlEvidence>, depth: usize },
    Descent { evidence: DescentEvidence, shift: String, countable: bool },
    Inconclusive(String),
}

fn analyze_fg(label: &str, t: &FgInverse, window: usize, copies: Copies) -> PartStatus {
    if let FgSource::Sum(parts) = t.source() {
        let mut evidence = Vec::new();
        let mut depth = 0;
        for (j, p) in parts.iter().enumerate() {
            match analyze_fg(&format!("{label} #{}", j + 1), p, window, copies) {
                PartStatus::Ml { evidence: e, depth: d } => {
                    evidence.extend(e);
                    depth = depth.max(d);
                }
                other => return other,
            }
        }
        return PartStatus::Ml { evidence, depth };
    }
    match t.tail() {
        Tail::Surjective { reason } => {
            let maps: Vec<FgHom> = (1..=window).map(|i| t.map(i)).collect();
            if let Some(i) = maps.iter().position(|m| !m.is_surjective()) {
                return PartStatus::Inconclusive(format!("{label}: map at stage {} is not onto", i + 1));
            }
            PartStatus::Ml {
                evidence: vec![MlEvidence::SurjectiveMaps {
                    part: label.to_string(),
                    reason,
                    maps,
                }],
                depth: 0,
            }
        }
        Tail::Constant { from } => {
            let endo = t.map(from);
            let mut chain = vec![Subgroup::whole(endo.source())];
            for j in 0..window {
                let next = chain[j].image_under(&endo).expect("endomorphism").simplified();
                let stable = next.equals(&chain[j]).expect("same ambient");
                chain.push(next);
                if stable {
                    return PartStatus::Ml {
                        evidence: vec![MlEvidence::EndoStable {
                            part: label.to_string(),
                            from,
                            endo,
                            chain,
                        }],
                        depth: from - 1 + j,
                    };
                }
                let evidence = DescentEvidence::EndoDescent {
                    part: label.to_string(),
                    from,
                    endo: endo.clone(),
                    chain: chain.clone(),
                    at: j,
                };
                if evidence.verify() {
                    return PartStatus::Descent {
                        shift: format!("the tail map {} of {label} applied once more", endo.matrix()),
                        evidence,
                        countable: copies != Copies::Continuum,
                    };
                }
            }
            PartStatus::Inconclusive(format!("{label}: images neither settle nor descend injectively within {window} steps"))
        }
        Tail::Unknown => PartStatus::Inconclusive(format!("{label}: no tail rule")),
    }
}

fn family_shift(label: &str, rule: &InfSum, t: &DirectTower, window: usize) -> PartStatus {
    let p = rule.p;
    if rule.first() as usize > window {
        return PartStatus::Inconclusive(format!(
            "{label}: first strict step lies beyond window {window}"
        ));
    }
    let a = rule.slope as u32;
    let mut count = 1;
    while count < window && rule.exponent(count as u64 + 1) as usize <= window {
        count += 1;
    }
    let count = count + 1;
    let members: Vec<MemberWitness> = (1..=count as u64)
        .map(|n| {
            let e = rule.exponent(n);
            let tower = FgInverse::hom(t, &FgGroup::cyclic(pow(p, e)));
            let shift = if n < count as u64 {
                let r = FgHom::new(
                    FgGroup::cyclic(pow(p, e)),
                    FgGroup::cyclic(pow(p, rule.exponent(n + 1))),
                    IntMatrix::diagonal(1, 1, &[pow(p, a)]),
                )
                .expect("multiplication by p^slope is well defined");
                (0..=window).map(|j| hom_induced_co(&t.stage(1 + j), &r)).collect()
            } else {
                Vec::new()
            };
            MemberWitness {
                n,
                maps: (1..=window).map(|i| tower.map(i)).collect(),
                chain: tower.image_chain(1, window),
                shift,
            }
        })
        .collect();
    let evidence = DescentEvidence::FamilyShift {
        part: label.to_string(),
        rule: *rule,
        stage: 1,
        members,
    };
    if !evidence.verify() {
        return PartStatus::Inconclusive(format!("{label}: shift witness failed to replay"));
    }
    PartStatus::Descent {
        shift: format!("multiplication by {p}^{a} from member n into member n+1"),
        evidence,
        countable: true,
    }
}

/// Reason every structure map is onto, or eventually the identity, that holds
/// whatever the coefficients.
fn structural_reason(t: &InverseTower) -> Option<String> {
    match t {
        InverseTower::Hom { tower, .. } if tower.is_split() => Some("restriction along a split inclusion".into()),
        InverseTower::Hom { tower, .. } | InverseTower::Ext { tower, .. } if tower.stable_from().is_some() => {
            Some(format!("the direct tower is constant from stage {}", tower.stable_from().unwrap()))
        }
        InverseTower::Ext { .. } => Some("Ext^2 vanishes over Z, so Ext restricts onto along injections".into()),
        InverseTower::Quotient { .. } => Some("quotient projections".into()),
        _ => None,
    }
}

fn truncated_family(rule: &InfSum, maker: &Maker, level: u32) -> FgInverse {
    let mut members = Vec::new();
    let mut n = 1;
    while rule.exponent(n) <= level {
        members.push(Part::member(rule, maker, n));
        n += 1;
    }
    FgInverse::sum(members)
}

fn analyze_part(part: &Part, structural: Option<&str>, window: usize) -> PartStatus {
    match part {
        Part::Fg { label, tower, copies } => analyze_fg(label, tower, window, *copies),
        Part::Family { label, rule, maker } => {
            if let Maker::Hom(t) = maker {
                if let DirectKind::Prufer { p } = t.kind() {
                    if *p == rule.p {
                        return family_shift(label, rule, t, window);
                    }
                }
            }
            // Every member follows the same tail rule, so the members up to
            // the truncation level stand for all of them.
            let approx = truncated_family(rule, maker, (window + 4) as u32);
            match analyze_fg(label, &approx, window, Copies::Countable) {
                PartStatus::Ml { evidence, depth } => PartStatus::Ml { evidence, depth },
                PartStatus::Descent { .. } => {
                    PartStatus::Inconclusive(format!("{label}: descent seen only in a truncation"))
                }
                other => other,
            }
        }
        Part::Divisible { label, .. } => PartStatus::Ml {
            evidence: vec![MlEvidence::DivisibleTarget { part: label.clone() }],
            depth: 0,
        },
        Part::Opaque { label } => match structural {
            Some(reason) => PartStatus::Ml {
                evidence: vec![MlEvidence::SurjectiveMaps {
                    part: label.clone(),
                    reason: reason.to_string(),
                    maps: Vec::new(),
                }],
                depth: 0,
            },
            None => PartStatus::Inconclusive(format!("{label}: stages have no exact model")),
        },
    }
}

fn collect_parts(t: &InverseTower, out: &mut Vec<(Part, Option<String>)>) {
    match t {
        InverseTower::Sum(ts) => ts.iter().for_each(|x| collect_parts(x, out)),
        _ => {
            let reason = structural_reason(t);
            out.extend(t.parts().into_iter().map(|p| (p, reason.clone())));
        }
    }
}

/// Mittag-Leffler analysis with a replayable certificate.
pub fn ml_status(t: &InverseTower, window: usize) -> Certificate {
    let mut parts = Vec::new();
    collect_parts(t, &mut parts);
    let mut evidence = Vec::new();
    let mut depth = 0;
    let mut open = Vec::new();
    let mut uncountable_descent = None;
    for (part, reason) in &parts {
        match analyze_part(part, reason.as_deref(), window) {
            PartStatus::Ml { evidence: e, depth: d } => {
                evidence.extend(e);
                depth = depth.max(d);
            }
            PartStatus::Descent {
                evidence,
                shift,
                countable: true,
            } => {
                return Certificate::SelfSimilarStrictDescent {
                    shift,
                    window,
                    evidence,
                    countable_stages: true,
                }
            }
            PartStatus::Descent { evidence, shift, .. } => {
                uncountable_descent.get_or_insert((evidence, shift));
            }
            PartStatus::Inconclusive(reason) => open.push(reason),
        }
    }
    if let Some((evidence, shift)) = uncountable_descent {
        return Certificate::SelfSimilarStrictDescent {
            shift,
            window,
            evidence,
            countable_stages: false,
        };
    }
    if open.is_empty() {
        Certificate::MlStabilized {
            stage: depth,
            window,
            evidence,
        }
    } else {
        Certificate::InconclusiveWindow {
            window,
            reason: open.join("; "),
        }
    }
}

pub fn lim1(t: &InverseTower, window: usize) -> Lim1Result {
    let certificate = ml_status(t, window);
    let verdict = match &certificate {
        Certificate::MlStabilized { .. } => Lim1Verdict::Zero,
        Certificate::SelfSimilarStrictDescent {
            countable_stages: true,
            ..
        } => Lim1Verdict::NonzeroCertified,
        _ => Lim1Verdict::Inconclusive,
    };
    Lim1Result {
        verdict,
        value_hint: (verdict == Lim1Verdict::Zero).then(|| ValueHint::Expr {
            value: GroupExpr::zero(),
        }),
        certificate,
    }
}

fn rule(name: &str) -> Certificate {
    Certificate::RuleDerived { rule: name.into() }
}

fn pro(description: String, factor: &InvariantProfile) -> LimValue {
    LimValue::Pro(ProDescriptor {
        description,
        profile: InvariantProfile {
            cardinality: Cardinality::Continuum,
            torsionfree: factor.torsionfree,
            reduced: factor.reduced,
            ..InvariantProfile::unknown()
        },
    })
}

/// `∏_{n ≥ start} f(n)` where `f(n)` is eventually constant once `settled(n)`
/// holds. Gives up after a bounded search or when a factor is out of reach.
fn product(
    name: &str,
    start: u64,
    f: impl Fn(u64) -> Option<GroupExpr>,
    settled: impl Fn(u64) -> Option<bool>,
) -> LimValue {
    let give_up = |n: u64| {
        let factor = f(n).map(|x| invariants(&x)).unwrap_or_else(InvariantProfile::unknown);
        pro(format!("product over n >= {start} of {name}"), &factor)
    };
    let mut head = Vec::new();
    let mut n = start;
    loop {
        match settled(n) {
            Some(true) => break,
            Some(false) if n < start + 256 => match f(n) {
                Some(x) => head.push(x),
                None => return give_up(n),
            },
            _ => return give_up(n),
        }
        n += 1;
    }
    let Some(tail) = f(n).map(|x| canonicalize(&x)) else {
        return give_up(n);
    };
    if tail.is_zero() {
        return LimValue::expr(GroupExpr::Sum(head));
    }
    match tail.as_fg().filter(FgGroup::is_finite) {
        Some(_) => {
            head.push(GroupExpr::InfProduct(Box::new(tail)));
            LimValue::expr(GroupExpr::Sum(head))
        }
        None => pro(format!("product over n >= {start} of {name}"), &invariants(&tail)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Settles {
    At(u32),
    Never,
    Unknown,
}

/// Least `k` with `h[p^e]` (for `hom`) or `h/p^e h` constant for `e ≥ k`,
/// read off the atoms of `h`.
fn settling_exponent(h: &GroupExpr, p: u64, hom: bool) -> Settles {
    use Settles::{At, Never, Unknown};
    match h {
        GroupExpr::Free(0) => At(0),
        GroupExpr::Free(_) | GroupExpr::FreeCountable => {
            if hom {
                At(0)
            } else {
                Never
            }
        }
        GroupExpr::Cyclic(d) => At(valuation(d, p)),
        GroupExpr::Prufer(q) => {
            if hom && *q == p {
                Never
            } else {
                At(0)
            }
        }
        GroupExpr::InfSum(s) if s.p != p => At(0),
        GroupExpr::InfSum(s) if s.is_bounded() => At(s.first()),
        GroupExpr::InfSum(_) => Never,
        GroupExpr::InfProduct(b) => match b.as_fg().and_then(|g| g.exponent()) {
            Some(x) => At(valuation(&x, p)),
            None => Unknown,
        },
        GroupExpr::Padic(..) => Unknown,
        GroupExpr::Sum(xs) => xs.iter().fold(At(0), |acc, x| match (acc, settling_exponent(x, p, hom)) {
            (Never, _) | (_, Never) => Never,
            (Unknown, _) | (_, Unknown) => Unknown,
            (At(a), At(b)) => At(a.max(b)),
        }),
    }
}

/// `∏_{n ≥ start} Hom(C_n, h)` or `∏_{n ≥ start} Ext(C_n, h)` over the
/// summands of a split tower.
pub(crate) fn split_product(kind: &DirectKind, h: &GroupExpr, hom: bool, start: u64) -> LimValue {
    let at = |d: &num_bigint::BigInt| {
        if hom {
            torsion_subgroup_at(h, d)
        } else {
            quotient_by(h, d)
        }
        .ok()
    };
    let functor = if hom { "Hom" } else { "Ext" };
    match kind {
        DirectKind::Elementary { p, k } => {
            let d = pow(*p, *k);
            product(&format!("{functor}(Z/{d}, {h})"), start, |_| at(&d), |_| Some(true))
        }
        DirectKind::Free { step } => {
            if !hom || h.is_zero() {
                return LimValue::expr(GroupExpr::zero());
            }
            let f = GroupExpr::Sum(vec![h.clone(); *step]);
            product(&format!("Hom(Z^{step}, {h})"), start, |_| Some(f.clone()), |_| Some(true))
        }
        DirectKind::Affine(s) => {
            let d = |n: u64, extra: u32| pow(s.p, s.exponent(n) + extra);
            let bound = settling_exponent(&canonicalize(h), s.p, hom);
            product(
                &format!("{functor}(Z/{}^(e_n), {h})", s.p),
                start,
                |n| at(&d(n, 0)),
                |n| match bound {
                    Settles::At(k) => Some(s.exponent(n) >= k),
                    Settles::Never => None,
                    // Once h[p^e] = h[p^(e+1)] (or h/p^e h = h/p^(e+1) h), it
                    // is constant for every larger e.
                    Settles::Unknown => Some(canonicalize(&at(&d(n, 0))?) == canonicalize(&at(&d(n, 1))?)),
                },
            )
        }
        _ => unreachable!("split kinds only"),
    }
}

/// Inverse limit: a closed form where one is known, otherwise a descriptor.
pub fn lim_group(t: &InverseTower, window: usize) -> (LimValue, Certificate) {
    match t {
        InverseTower::Hom { tower, target } => match tower.kind() {
            DirectKind::Stable(_) | DirectKind::Explicit { .. } => {
                let g = tower.stage(tower.stable_from().unwrap());
                match hom_from_fg(&g, target) {
                    Ok(v) => (LimValue::expr(v), rule("stable_stage")),
                    Err(e) => (pro(e.to_string(), &InvariantProfile::unknown()), rule("stable_stage")),
                }
            }
            DirectKind::Prufer { p } => {
                let c = canonicalize(target)
                    .atoms()
                    .iter()
                    .filter(|a| **a == GroupExpr::Prufer(*p))
                    .count();
                (
                    LimValue::expr(GroupExpr::Padic(*p, Box::new(GroupExpr::Free(c as u64)))),
                    rule("hom_from_prufer"),
                )
            }
            kind => (split_product(kind, target, true, 1), rule("product_of_summands")),
        },
        InverseTower::Ext { tower, target } => match tower.kind() {
            DirectKind::Stable(_) | DirectKind::Explicit { .. } => {
                let g = tower.stage(tower.stable_from().unwrap());
                match ext_from_fg(&g, target) {
                    Ok(v) => (LimValue::expr(v), rule("stable_stage")),
                    Err(e) => (pro(e.to_string(), &InvariantProfile::unknown()), rule("stable_stage")),
                }
            }
            DirectKind::Prufer { p } => (
                LimValue::expr(GroupExpr::Padic(*p, Box::new(target.clone()))),
                rule("padic_completion"),
            ),
            kind => (split_product(kind, target, false, 1), rule("product_of_summands")),
        },
        InverseTower::Quotient { target, p } => (
            LimValue::expr(GroupExpr::Padic(*p, Box::new(target.clone()))),
            rule("padic_completion"),
        ),
        InverseTower::Explicit(fg) => match fg.source() {
            FgSource::Hom(d, f) => lim_group(&InverseTower::hom(d, &GroupExpr::from_fg(f)), window),
            FgSource::Ext(d, f) => lim_group(&InverseTower::ext(d, &GroupExpr::from_fg(f)), window),
            FgSource::Quotient(f, p) => lim_group(&InverseTower::Quotient { target: GroupExpr::from_fg(f), p: *p }, window),
            FgSource::Sum(parts) => {
                let ts: Vec<InverseTower> = parts.iter().cloned().map(InverseTower::Explicit).collect();
                lim_group(&InverseTower::Sum(ts), window)
            }
            FgSource::Explicit { .. } => {
                let cert = ml_status(t, window);
                if let Certificate::MlStabilized { evidence, .. } = &cert {
                    if let Some(MlEvidence::EndoStable { chain, .. }) = evidence.first() {
                        // A surjective endomorphism of a finitely generated
                        // group is an automorphism, so the limit is the
                        // stable image.
                        let s = chain.last().unwrap().structure();
                        return (LimValue::expr(GroupExpr::from_fg(&s)), cert);
                    }
                }
                let profile = InvariantProfile {
                    cardinality: Cardinality::Unknown,
                    ..InvariantProfile::unknown()
                };
                (
                    LimValue::Pro(ProDescriptor {
                        description: format!("lim of {}", fg.describe()),
                        profile,
                    }),
                    cert,
                )
            }
        },
        InverseTower::Sum(ts) => {
            let mut value = LimValue::expr(GroupExpr::zero());
            for x in ts {
                value = value.sum(lim_group(x, window).0);
            }
            (value, rule("sum_of_limits"))
        }
    }
}
