use serde::Serialize;

use crate::expr::{GroupExpr, InfSum};
use crate::fg::{image_subgroup, kernel_subgroup, FgHom, Subgroup};

/// Why one summand of an inverse tower is Mittag-Leffler.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MlEvidence {
    /// Every structure map is onto. `maps` are the checked maps
    /// `H_{i+1} → H_i`, `i = 1..=window`; empty when the stages have no exact
    /// model and the claim rests on `reason` alone.
    SurjectiveMaps {
        part: String,
        reason: String,
        maps: Vec<FgHom>,
    },
    /// From stage `from` on the tower is `H ← H ← ...` with structure map
    /// `endo`; `chain[j] = endo^j(H)` and the last two entries agree.
    EndoStable {
        part: String,
        from: usize,
        endo: FgHom,
        chain: Vec<Subgroup>,
    },
    /// `Hom(G_i, D)` for divisible `D`: restriction along an injection is onto.
    DivisibleTarget { part: String },
}

/// Why one summand of an inverse tower fails the Mittag-Leffler condition at
/// every depth.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DescentEvidence {
    /// From stage `from` on the tower is constant with structure map `endo`,
    /// `chain[j] = endo^j(H)`, `chain[at + 1] ⊊ chain[at]`, and `endo` is
    /// injective on `chain[at]`. Applying the injective shift `endo` carries
    /// each strict inclusion one step further down, forever.
    EndoDescent {
        part: String,
        from: usize,
        endo: FgHom,
        chain: Vec<Subgroup>,
        at: usize,
    },
    /// A family `⊕_n T^{(n)}` with a shift morphism `σ_n: T^{(n)} → T^{(n+1)}`,
    /// injective at every stage, with `σ_n(Im_k^{(n)}) = Im_{k+slope}^{(n+1)}`
    /// at stage `stage`. A strict step of one member therefore reappears
    /// `slope` levels deeper in the next member, so the sum never stabilizes.
    FamilyShift {
        part: String,
        #[serde(serialize_with = "infsum_string")]
        rule: InfSum,
        stage: usize,
        members: Vec<MemberWitness>,
    },
}

/// One member of a family: its structure maps, image chain at the examined
/// stage, and the shift into the next member.
#[derive(Clone, Debug, Serialize)]
pub struct MemberWitness {
    pub n: u64,
    /// `maps[j]`: stage `stage + j + 1 → stage + j`.
    pub maps: Vec<FgHom>,
    /// `chain[k] = Im(H_{stage+k} → H_stage)`.
    pub chain: Vec<Subgroup>,
    /// `shift[j]`: member `n` at stage `stage + j` into member `n + 1`.
    pub shift: Vec<FgHom>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// Every summand is Mittag-Leffler; images are constant from depth `stage`.
    MlStabilized {
        stage: usize,
        window: usize,
        evidence: Vec<MlEvidence>,
    },
    SelfSimilarStrictDescent {
        shift: String,
        window: usize,
        evidence: DescentEvidence,
        /// Whether the descending summand has countable stages.
        countable_stages: bool,
    },
    InconclusiveWindow { window: usize, reason: String },
    /// A verdict taken from a structural rule rather than a window check.
    RuleDerived { rule: String },
}

fn infsum_string<S: serde::Serializer>(s: &InfSum, ser: S) -> Result<S::Ok, S::Error> {
    ser.collect_str(&GroupExpr::InfSum(*s))
}

fn chain_of(endo: &FgHom, len: usize) -> Vec<Subgroup> {
    let mut out = vec![Subgroup::whole(endo.source())];
    while out.len() < len {
        let next = out.last().unwrap().image_under(endo).expect("endomorphism");
        out.push(next);
    }
    out
}

fn same_chain(a: &[Subgroup], b: &[Subgroup]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.equals(y).unwrap_or(false))
}

fn injective_on(f: &FgHom, s: &Subgroup) -> bool {
    kernel_subgroup(f)
        .intersection(s)
        .map(|k| k.is_trivial())
        .unwrap_or(false)
}

fn strictly_contains(big: &Subgroup, small: &Subgroup) -> bool {
    big.contains_subgroup(small).unwrap_or(false) && !small.contains_subgroup(big).unwrap_or(true)
}

impl MlEvidence {
    pub fn part(&self) -> &str {
        match self {
            MlEvidence::SurjectiveMaps { part, .. }
            | MlEvidence::EndoStable { part, .. }
            | MlEvidence::DivisibleTarget { part } => part,
        }
    }

    pub fn verify(&self) -> bool {
        match self {
            MlEvidence::SurjectiveMaps { maps, .. } => maps.iter().all(FgHom::is_surjective),
            MlEvidence::EndoStable { endo, chain, .. } => {
                endo.source() == endo.target()
                    && chain.len() >= 2
                    && same_chain(chain, &chain_of(endo, chain.len()))
                    && chain[chain.len() - 1].equals(&chain[chain.len() - 2]).unwrap_or(false)
            }
            MlEvidence::DivisibleTarget { .. } => true,
        }
    }
}

impl DescentEvidence {
    pub fn part(&self) -> &str {
        match self {
            DescentEvidence::EndoDescent { part, .. } | DescentEvidence::FamilyShift { part, .. } => part,
        }
    }

    pub fn verify(&self) -> bool {
        match self {
            DescentEvidence::EndoDescent { endo, chain, at, .. } => {
                endo.source() == endo.target()
                    && *at + 1 < chain.len()
                    && same_chain(chain, &chain_of(endo, chain.len()))
                    && strictly_contains(&chain[*at], &chain[*at + 1])
                    && injective_on(endo, &chain[*at])
            }
            DescentEvidence::FamilyShift { rule, members, .. } => {
                let a = rule.slope as usize;
                if a == 0 || members.is_empty() {
                    return false;
                }
                let chains_replay = members.iter().all(|m| {
                    let Some(first) = m.maps.first() else { return false };
                    let mut f = FgHom::identity(first.target());
                    let mut replay = vec![image_subgroup(&f)];
                    for g in m.maps.iter().take(m.chain.len().saturating_sub(1)) {
                        match f.compose(g) {
                            Ok(h) => f = h,
                            Err(_) => return false,
                        }
                        replay.push(image_subgroup(&f));
                    }
                    same_chain(&m.chain, &replay)
                });
                let shifts_ok = members.windows(2).all(|w| {
                    let (m, next) = (&w[0], &w[1]);
                    if next.n != m.n + 1 || m.shift.len() != m.maps.len() + 1 {
                        return false;
                    }
                    let commutes = m.maps.iter().enumerate().all(|(j, g)| {
                        let lhs = m.shift[j].compose(g);
                        let Some(down) = next.maps.get(j) else { return false };
                        let rhs = down.compose(&m.shift[j + 1]);
                        matches!((lhs, rhs), (Ok(l), Ok(r)) if l == r)
                    });
                    let injective = m.shift.iter().all(FgHom::is_injective);
                    let carried = m.chain.iter().enumerate().all(|(k, s)| {
                        k + a >= next.chain.len()
                            || s.image_under(&m.shift[0])
                                .and_then(|img| img.equals(&next.chain[k + a]))
                                .unwrap_or(false)
                    });
                    commutes && injective && carried
                });
                let strict_step = members
                    .iter()
                    .any(|m| m.chain.windows(2).any(|w| strictly_contains(&w[0], &w[1])));
                chains_replay && shifts_ok && strict_step
            }
        }
    }
}

impl Certificate {
    /// Replays the stored evidence. Inconclusive and rule-derived
    /// certificates claim nothing checkable and always pass.
    pub fn verify(&self) -> bool {
        match self {
            Certificate::MlStabilized { evidence, .. } => evidence.iter().all(MlEvidence::verify),
            Certificate::SelfSimilarStrictDescent { evidence, .. } => evidence.verify(),
            Certificate::InconclusiveWindow { .. } | Certificate::RuleDerived { .. } => true,
        }
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self, Certificate::InconclusiveWindow { .. })
    }
}
