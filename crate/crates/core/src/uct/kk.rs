use serde::Serialize;

use super::value::{GroupValue, Split};
use crate::error::Result;
use crate::expr::{canonicalize, ext_from_fg, hom_from_fg, GroupExpr};
use crate::tower::{
    apply_ext, apply_hom, lim1, lim_group, pext, DirectKind, DirectTower, FgInverse, InverseTower, Lim1Verdict,
    PextResult, RuleVerdict,
};

/// Graded K-theory of a KK-filtered algebra `A` (as two direct towers) and
/// of a coefficient algebra `B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KTheoryData {
    pub ka: [DirectTower; 2],
    pub kb: [GroupExpr; 2],
}

impl KTheoryData {
    pub fn new(ka0: DirectTower, ka1: DirectTower, kb0: GroupExpr, kb1: GroupExpr) -> Self {
        KTheoryData {
            ka: [ka0, ka1],
            kb: [canonicalize(&kb0), canonicalize(&kb1)],
        }
    }

    /// Target of the Hom summand of `KK_n` with source `K_j(A)`.
    pub fn hom_target(&self, j: usize, n: usize) -> &GroupExpr {
        &self.kb[(j + n) % 2]
    }

    /// Target of the Ext summand of `KK_n` with source `K_j(A)`.
    pub fn ext_target(&self, j: usize, n: usize) -> &GroupExpr {
        &self.kb[(j + n + 1) % 2]
    }

    /// Both towers stabilize with finite stages and both `K_*(B)` are finite.
    pub fn is_finite_model(&self) -> bool {
        self.ka.iter().all(|t| match t.stable_from() {
            Some(n) => (1..=n).all(|i| t.stage(i).is_finite()),
            None => false,
        }) && self.kb.iter().all(|h| h.as_fg().is_some_and(|g| g.is_finite()))
    }

    /// `Hom_n` stage tower `⊕_j Hom(K_j(A_i), K_{j+n}(B))`.
    pub fn hom_tower(&self, n: usize) -> InverseTower {
        InverseTower::Sum((0..2).map(|j| apply_hom(&self.ka[j], self.hom_target(j, n))).collect())
    }

    /// `Ext_n` stage tower `⊕_j Ext(K_j(A_i), K_{j+n+1}(B))`.
    pub fn ext_tower(&self, n: usize) -> InverseTower {
        InverseTower::Sum((0..2).map(|j| apply_ext(&self.ka[j], self.ext_target(j, n))).collect())
    }

    /// `KK_n(A_i, B)` with restriction maps, split as Hom plus Ext.
    pub fn kk_tower(&self, n: usize) -> InverseTower {
        InverseTower::Sum(vec![self.hom_tower(n), self.ext_tower(n)])
    }
}

/// `KK_n(A_i, B) = ⊕_j Hom(K_j(A_i), K_{j+n}(B)) ⊕ ⊕_j Ext(K_j(A_i), K_{j+n+1}(B))`.
pub fn stage_kk(data: &KTheoryData, i: usize, n: usize) -> Result<GroupValue> {
    let n = n % 2;
    let mut parts = Vec::new();
    for j in 0..2 {
        let g = data.ka[j].stage(i);
        parts.push(GroupValue::expr(hom_from_fg(&g, data.hom_target(j, n))?));
        parts.push(GroupValue::expr(ext_from_fg(&g, data.ext_target(j, n))?));
    }
    Ok(GroupValue::sum(parts))
}

/// True for `G = Z(p^∞)` against `H = ⊕_n Z/p^n`, where the Jensen sequence
/// is known not to split.
pub fn nonsplit_pattern(t: &DirectTower, h: &GroupExpr) -> bool {
    match t.kind() {
        DirectKind::Prufer { p } => canonicalize(h) == GroupExpr::inf_sum(*p, 1, 0).expect("prime"),
        _ => false,
    }
}

pub const NONSPLIT_RULE: &str = "prufer_against_cyclic_sum";

/// One Ext summand `Ext(K_j(A), H)` as an extension of `lim_i Ext(K_j(A_i), H)`
/// by `Pext(K_j(A), H)`.
#[derive(Clone, Debug, Serialize)]
pub struct ExtComponent {
    pub j: usize,
    pub tower: DirectTower,
    pub target: GroupExpr,
    pub pext: PextResult,
    pub lim_ext: GroupValue,
    pub value: GroupValue,
}

impl ExtComponent {
    fn build(data: &KTheoryData, j: usize, n: usize, window: usize) -> Result<Self> {
        let tower = data.ka[j].clone();
        let target = data.ext_target(j, n).clone();
        let pext = pext(&tower, &target, window)?;
        let (lim, cert) = lim_group(&apply_ext(&tower, &target), window);
        let lim_ext = GroupValue::from_lim(lim, cert);
        let sub = GroupValue::from_pext(format!("Pext({}, {target})", crate::tower::colimit_group(&tower)), &pext);
        let split = if nonsplit_pattern(&tower, &target) {
            Split::No {
                rule: NONSPLIT_RULE.into(),
            }
        } else if pext.rule == RuleVerdict::Divisible {
            // A divisible subgroup is a direct summand.
            Split::Yes
        } else {
            Split::Unknown
        };
        let value = GroupValue::extension(sub, lim_ext.clone(), split);
        Ok(ExtComponent {
            j,
            tower,
            target,
            pext,
            lim_ext,
            value,
        })
    }
}

/// `KK_n(A, B)` via the split UCT, with its Hom and Ext parts.
#[derive(Clone, Debug, Serialize)]
pub struct KkGroup {
    pub degree: usize,
    pub group: GroupValue,
    pub hom: GroupValue,
    pub ext: GroupValue,
    pub components: Vec<ExtComponent>,
}

pub fn kk_group(data: &KTheoryData, n: usize, window: usize) -> Result<KkGroup> {
    let n = n % 2;
    let hom = GroupValue::sum(
        (0..2)
            .map(|j| {
                let (v, c) = lim_group(&apply_hom(&data.ka[j], data.hom_target(j, n)), window);
                GroupValue::from_lim(v, c)
            })
            .collect(),
    );
    let components = (0..2)
        .map(|j| ExtComponent::build(data, j, n, window))
        .collect::<Result<Vec<_>>>()?;
    let ext = GroupValue::sum(components.iter().map(|c| c.value.clone()).collect());
    let group = GroupValue::sum(vec![hom.clone(), ext.clone()]);
    Ok(KkGroup {
        degree: n,
        group,
        hom,
        ext,
        components,
    })
}

pub(crate) fn combine_verdicts(vs: impl IntoIterator<Item = Lim1Verdict>) -> Lim1Verdict {
    let mut out = Lim1Verdict::Zero;
    for v in vs {
        match v {
            Lim1Verdict::NonzeroCertified => return Lim1Verdict::NonzeroCertified,
            Lim1Verdict::Inconclusive => out = Lim1Verdict::Inconclusive,
            Lim1Verdict::Zero => {}
        }
    }
    out
}

/// `Z_n(A, B) = ⊕_j Pext(K_j(A), K_{j+n+1}(B))`, the closure of zero in
/// `KK_n(A, B)`.
#[derive(Clone, Debug, Serialize)]
pub struct FineStructure {
    pub degree: usize,
    pub verdict: Lim1Verdict,
    pub group: GroupValue,
    pub components: Vec<PextResult>,
}

pub fn fine_structure(data: &KTheoryData, n: usize, window: usize) -> Result<FineStructure> {
    let n = n % 2;
    let mut components = Vec::new();
    let mut parts = Vec::new();
    for j in 0..2 {
        let h = data.ext_target(j, n);
        let r = pext(&data.ka[j], h, window)?;
        let label = format!("Pext({}, {h})", crate::tower::colimit_group(&data.ka[j]));
        parts.push(GroupValue::from_pext(label, &r));
        components.push(r);
    }
    Ok(FineStructure {
        degree: n,
        verdict: combine_verdicts(components.iter().map(|c| c.verdict)),
        group: GroupValue::sum(parts),
        components,
    })
}

/// `KL_n(A, B) = lim_i KK_n(A_i, B)`, the Hausdorff quotient `KK_n / Z_n`.
pub fn kl_group(data: &KTheoryData, n: usize, window: usize) -> GroupValue {
    let (v, c) = lim_group(&data.kk_tower(n % 2), window);
    GroupValue::from_lim(v, c)
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RoosStatus {
    /// Every restriction map `Ext(G_{i+1}, H) → Ext(G_i, H)` in the window
    /// was checked onto.
    Verified { maps_checked: usize },
    /// `H` is not finitely generated; onto-ness follows from injectivity of
    /// the tower maps and right exactness of `Ext(-, H)`.
    Structural,
    Failed { stage: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct RoosCheck {
    pub j: usize,
    pub target: GroupExpr,
    #[serde(flatten)]
    pub status: RoosStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaDegree {
    pub degree: usize,
    pub roos: Vec<RoosCheck>,
    pub ext_lim1: Lim1Verdict,
    pub hom_lim1: Lim1Verdict,
    pub kk_lim1: Lim1Verdict,
    pub agree: bool,
}

/// `lim¹ KK_n(A_i, B) ≅ lim¹ Hom_n` once `lim¹ Ext_n = 0`.
#[derive(Clone, Debug, Serialize)]
pub struct GammaReport {
    pub degrees: Vec<GammaDegree>,
    pub passed: bool,
}

pub fn lim1_gamma_check(data: &KTheoryData, window: usize) -> GammaReport {
    let degrees: Vec<GammaDegree> = (0..2)
        .map(|n| {
            let roos = (0..2)
                .map(|j| {
                    let target = data.ext_target(j, n).clone();
                    let status = match target.as_fg() {
                        Some(f) => {
                            let t = FgInverse::ext(&data.ka[j], &f);
                            match (1..=window).find(|&i| !t.map(i).is_surjective()) {
                                Some(stage) => RoosStatus::Failed { stage },
                                None => RoosStatus::Verified { maps_checked: window },
                            }
                        }
                        None => RoosStatus::Structural,
                    };
                    RoosCheck { j, target, status }
                })
                .collect::<Vec<_>>();
            let ext_lim1 = lim1(&data.ext_tower(n), window).verdict;
            let hom_lim1 = lim1(&data.hom_tower(n), window).verdict;
            let kk_lim1 = lim1(&data.kk_tower(n), window).verdict;
            let onto = roos.iter().all(|r| !matches!(r.status, RoosStatus::Failed { .. }));
            GammaDegree {
                degree: n,
                agree: onto && kk_lim1 == hom_lim1 && ext_lim1 != Lim1Verdict::NonzeroCertified,
                roos,
                ext_lim1,
                hom_lim1,
                kk_lim1,
            }
        })
        .collect();
    GammaReport {
        passed: degrees.iter().all(|d| d.agree),
        degrees,
    }
}
