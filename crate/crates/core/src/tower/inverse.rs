use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use super::direct::{DirectKind, DirectTower};
use crate::error::{Error, Result};
use crate::expr::{canonicalize, ext_from_fg, hom_from_fg, quotient_by, GroupExpr, InfSum};
use crate::fg::{
    ext_group, ext_induced_contra, hom_group, hom_induced, image_subgroup, FgGroup, FgHom, IntMatrix, Subgroup,
};
use crate::num::{pow, valuation};

/// Where an exact tower of finitely generated groups comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FgSource {
    /// `Hom(G_i, F)` with restriction maps.
    Hom(DirectTower, FgGroup),
    /// `Ext(G_i, F)` with restriction maps.
    Ext(DirectTower, FgGroup),
    /// `F / p^i F` with projections.
    Quotient(FgGroup, u64),
    /// Stages `H_1..H_N`, maps `H_{i+1} → H_i` for `i < N`, then `H_N`
    /// forever with the endomorphism `endo` as structure map.
    Explicit {
        stages: Vec<FgGroup>,
        maps: Vec<FgHom>,
        endo: FgHom,
    },
    /// Stagewise direct sum.
    Sum(Vec<FgInverse>),
}

/// How the tail of an exact tower behaves, as known from its construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "tail", rename_all = "snake_case")]
pub enum Tail {
    /// Every structure map is onto.
    Surjective { reason: String },
    /// `H_i = H_from` and `map(i) = map(from)` for all `i ≥ from`.
    Constant { from: usize },
    Unknown,
}

type Cache = BTreeMap<usize, Arc<(FgGroup, FgHom)>>;

/// An inverse tower `H_1 ← H_2 ← ...` of finitely generated groups, computed
/// exactly and lazily.
#[derive(Clone)]
pub struct FgInverse {
    source: FgSource,
    cache: Arc<Mutex<Cache>>,
}

impl PartialEq for FgInverse {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
    }
}

impl Eq for FgInverse {}

impl fmt::Debug for FgInverse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

fn sum_map(dom: &[FgGroup], cod: &[FgGroup], blocks: &[FgHom]) -> (FgGroup, FgGroup, FgHom) {
    let pd = FgGroup::direct_sum_all(dom);
    let pc = FgGroup::direct_sum_all(cod);
    let mut m = IntMatrix::zeros(0, 0);
    for b in blocks {
        m = m.block_diag(b.matrix());
    }
    let matrix = pc.to_canon.mul(&m).mul(&pd.from_canon);
    let f = FgHom::new(pd.group.clone(), pc.group.clone(), matrix).expect("block maps are well defined");
    (pd.group, pc.group, f)
}

impl FgInverse {
    pub fn new(source: FgSource) -> Result<Self> {
        if let FgSource::Explicit { stages, maps, endo } = &source {
            if stages.is_empty() || maps.len() + 1 != stages.len() {
                return Err(Error::InvalidTower(format!(
                    "{} stages need {} maps",
                    stages.len(),
                    stages.len().saturating_sub(1)
                )));
            }
            for (i, m) in maps.iter().enumerate() {
                if m.source() != &stages[i + 1] || m.target() != &stages[i] {
                    return Err(Error::InvalidTower(format!(
                        "map {} does not go from stage {} to stage {}",
                        i + 1,
                        i + 2,
                        i + 1
                    )));
                }
            }
            let last = stages.last().unwrap();
            if endo.source() != last || endo.target() != last {
                return Err(Error::InvalidTower("tail map must be an endomorphism of the last stage".into()));
            }
        }
        Ok(FgInverse {
            source,
            cache: Arc::default(),
        })
    }

    pub fn hom(t: &DirectTower, f: &FgGroup) -> Self {
        Self::new(FgSource::Hom(t.clone(), f.clone())).unwrap()
    }

    pub fn ext(t: &DirectTower, f: &FgGroup) -> Self {
        Self::new(FgSource::Ext(t.clone(), f.clone())).unwrap()
    }

    pub fn quotient(f: &FgGroup, p: u64) -> Self {
        Self::new(FgSource::Quotient(f.clone(), p)).unwrap()
    }

    pub fn explicit(stages: Vec<FgGroup>, maps: Vec<FgHom>, endo: FgHom) -> Result<Self> {
        Self::new(FgSource::Explicit { stages, maps, endo })
    }

    /// `H, H, ...` with a constant structure map `f: H → H`.
    pub fn constant(f: FgHom) -> Result<Self> {
        Self::explicit(vec![f.source().clone()], Vec::new(), f)
    }

    pub fn sum(parts: Vec<FgInverse>) -> Self {
        Self::new(FgSource::Sum(parts)).unwrap()
    }

    pub fn source(&self) -> &FgSource {
        &self.source
    }

    pub fn describe(&self) -> String {
        match &self.source {
            FgSource::Hom(t, f) => format!("Hom({t}, {f})"),
            FgSource::Ext(t, f) => format!("Ext({t}, {f})"),
            FgSource::Quotient(f, p) => format!("{f}/{p}^i"),
            FgSource::Explicit { stages, .. } => format!("explicit tower ending at {}", stages.last().unwrap()),
            FgSource::Sum(parts) => {
                let names: Vec<String> = parts.iter().map(FgInverse::describe).collect();
                format!("Sum({})", names.join(", "))
            }
        }
    }

    fn compute(&self, i: usize) -> (FgGroup, FgHom) {
        match &self.source {
            FgSource::Hom(t, f) => {
                let m = hom_induced(&t.map(i), f);
                (hom_group(&t.stage(i), f).0, m)
            }
            FgSource::Ext(t, f) => {
                let m = ext_induced_contra(&t.map(i), f);
                (ext_group(&t.stage(i), f), m)
            }
            FgSource::Quotient(f, p) => {
                let q = |j: u32| Subgroup::whole(f).scaled(&pow(*p, j));
                let (hi, lo) = (q(i as u32 + 1), q(i as u32));
                let (hp, lp) = (hi.quotient_presentation(), lo.quotient_presentation());
                // Both quotients are presented on the generators of F.
                let m = lp.to_canon.mul(&hp.from_canon);
                let map = FgHom::new(hp.group, lp.group.clone(), m).expect("projection");
                (lp.group, map)
            }
            FgSource::Explicit { stages, maps, endo } => {
                let n = stages.len();
                if i < n {
                    (stages[i - 1].clone(), maps[i - 1].clone())
                } else {
                    (stages[n - 1].clone(), endo.clone())
                }
            }
            FgSource::Sum(parts) => {
                let doms: Vec<FgGroup> = parts.iter().map(|t| t.stage(i + 1)).collect();
                let cods: Vec<FgGroup> = parts.iter().map(|t| t.stage(i)).collect();
                let blocks: Vec<FgHom> = parts.iter().map(|t| t.map(i)).collect();
                let (_, cod, f) = sum_map(&doms, &cods, &blocks);
                (cod, f)
            }
        }
    }

    fn entry(&self, i: usize) -> Arc<(FgGroup, FgHom)> {
        assert!(i >= 1, "stages are indexed from 1");
        if let Some(e) = self.cache.lock().unwrap().get(&i) {
            return e.clone();
        }
        // Constant tails are made literally constant, so a tail endomorphism
        // read off at `from` describes every later map.
        if let Tail::Constant { from } = self.tail() {
            if i > from {
                let e = self.entry(from);
                return self.cache.lock().unwrap().entry(i).or_insert(e).clone();
            }
        }
        let e = Arc::new(self.compute(i));
        self.cache.lock().unwrap().entry(i).or_insert(e).clone()
    }

    pub fn stage(&self, i: usize) -> FgGroup {
        self.entry(i).0.clone()
    }

    /// `H_{i+1} → H_i`.
    pub fn map(&self, i: usize) -> FgHom {
        self.entry(i).1.clone()
    }

    /// `H_j → H_i` for `i ≤ j`.
    pub fn map_between(&self, j: usize, i: usize) -> FgHom {
        let mut f = FgHom::identity(&self.stage(j));
        for s in (i..j).rev() {
            f = self.map(s).compose(&f).expect("composable");
        }
        f
    }

    pub fn tail(&self) -> Tail {
        match &self.source {
            FgSource::Hom(t, f) => match t.kind() {
                DirectKind::Stable(_) | DirectKind::Explicit { .. } => Tail::Constant {
                    from: t.stable_from().unwrap(),
                },
                DirectKind::Prufer { p } => {
                    // Hom(Z/p^i, F) = F[p^i] is constant once p^i kills the
                    // p-part of F.
                    let e = f.torsion().iter().map(|d| valuation(d, *p)).max().unwrap_or(0);
                    Tail::Constant {
                        from: (e as usize).max(1),
                    }
                }
                _ => Tail::Surjective {
                    reason: "restriction along a split inclusion".into(),
                },
            },
            FgSource::Ext(t, _) => match t.kind() {
                DirectKind::Stable(_) | DirectKind::Explicit { .. } => Tail::Constant {
                    from: t.stable_from().unwrap(),
                },
                _ => Tail::Surjective {
                    reason: "Ext^2 vanishes over Z, so Ext restricts onto along injections".into(),
                },
            },
            FgSource::Quotient(..) => Tail::Surjective {
                reason: "quotient projections".into(),
            },
            FgSource::Explicit { stages, .. } => Tail::Constant { from: stages.len() },
            FgSource::Sum(parts) => {
                let tails: Vec<Tail> = parts.iter().map(FgInverse::tail).collect();
                if tails.iter().all(|t| matches!(t, Tail::Surjective { .. })) {
                    Tail::Surjective {
                        reason: "every summand has onto maps".into(),
                    }
                } else if tails.iter().all(|t| matches!(t, Tail::Constant { .. })) {
                    let from = tails
                        .iter()
                        .map(|t| match t {
                            Tail::Constant { from } => *from,
                            _ => unreachable!(),
                        })
                        .max()
                        .unwrap_or(1);
                    Tail::Constant { from }
                } else {
                    Tail::Unknown
                }
            }
        }
    }

    /// `Im(H_{i+k} → H_i)` for `k = 0..=window`.
    pub fn image_chain(&self, i: usize, window: usize) -> Vec<Subgroup> {
        let mut out = Vec::with_capacity(window + 1);
        let mut f = FgHom::identity(&self.stage(i));
        for k in 0..=window {
            if k > 0 {
                f = f.compose(&self.map(i + k - 1)).expect("composable");
            }
            out.push(image_subgroup(&f).simplified());
        }
        out
    }
}

/// An inverse tower whose stages may be infinitely generated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InverseTower {
    /// `Hom(G_i, H)`.
    Hom { tower: DirectTower, target: GroupExpr },
    /// `Ext(G_i, H)`.
    Ext { tower: DirectTower, target: GroupExpr },
    /// `H / p^i H` with projections.
    Quotient { target: GroupExpr, p: u64 },
    Explicit(FgInverse),
    /// Stagewise direct sum.
    Sum(Vec<InverseTower>),
}

/// How many copies of a component tower a stage contains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Copies {
    One,
    Countable,
    Continuum,
}

/// Builds the component tower for a finitely generated coefficient group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Maker {
    Hom(DirectTower),
    Ext(DirectTower),
    Quotient(u64),
}

impl Maker {
    pub fn build(&self, f: &FgGroup) -> FgInverse {
        match self {
            Maker::Hom(t) => FgInverse::hom(t, f),
            Maker::Ext(t) => FgInverse::ext(t, f),
            Maker::Quotient(p) => FgInverse::quotient(f, *p),
        }
    }
}

/// A summand of an inverse tower with infinitely generated stages.
#[derive(Clone, Debug)]
pub enum Part {
    /// Copies of one exact tower.
    Fg { label: String, tower: FgInverse, copies: Copies },
    /// `⊕_n T^{(n)}` where `T^{(n)}` is built from `Z/p^{e_n}`.
    Family { label: String, rule: InfSum, maker: Maker },
    /// `Hom(G_i, Z(q^∞))`; divisible targets are injective.
    Divisible { label: String, q: u64, tower: DirectTower },
    /// No exact model.
    Opaque { label: String },
}

impl Part {
    /// Member `n` of a family.
    pub fn member(rule: &InfSum, maker: &Maker, n: u64) -> FgInverse {
        maker.build(&FgGroup::cyclic(pow(rule.p, rule.exponent(n))))
    }

    pub fn label(&self) -> &str {
        match self {
            Part::Fg { label, .. } | Part::Family { label, .. } | Part::Divisible { label, .. } | Part::Opaque { label } => {
                label
            }
        }
    }
}

fn coefficient_parts(h: &GroupExpr, maker: Maker, name: &str) -> Vec<Part> {
    let mut parts = Vec::new();
    let mut fg_atoms = Vec::new();
    for a in canonicalize(h).atoms() {
        match &a {
            GroupExpr::Free(_) | GroupExpr::Cyclic(_) => fg_atoms.push(a.clone()),
            GroupExpr::FreeCountable => parts.push(Part::Fg {
                label: format!("{} x countable", name.replace('-', "Z")),
                tower: maker.build(&FgGroup::free(1)),
                copies: Copies::Countable,
            }),
            GroupExpr::InfSum(s) if s.is_bounded() => {
                let f = FgGroup::cyclic(pow(s.p, s.first()));
                parts.push(Part::Fg {
                    label: format!("{} x countable", name.replace('-', &f.to_string())),
                    tower: maker.build(&f),
                    copies: Copies::Countable,
                })
            }
            GroupExpr::InfSum(s) => parts.push(Part::Family {
                label: name.replace('-', &a.to_string()),
                rule: *s,
                maker: maker.clone(),
            }),
            GroupExpr::InfProduct(b) => {
                let f = b.as_fg().expect("finite product base");
                parts.push(Part::Fg {
                    label: format!("{} x continuum", name.replace('-', &f.to_string())),
                    tower: maker.build(&f),
                    copies: Copies::Continuum,
                })
            }
            GroupExpr::Prufer(q) => {
                // Ext(-, divisible) = 0 and divisible groups are killed by
                // p^i-quotients.
                if let Maker::Hom(t) = &maker {
                    parts.push(Part::Divisible {
                        label: name.replace('-', &a.to_string()),
                        q: *q,
                        tower: t.clone(),
                    })
                }
            }
            GroupExpr::Padic(..) => parts.push(Part::Opaque {
                label: name.replace('-', &a.to_string()),
            }),
            GroupExpr::Sum(_) => unreachable!("atoms are not sums"),
        }
    }
    if !fg_atoms.is_empty() {
        let f = GroupExpr::Sum(fg_atoms).as_fg().expect("finitely generated atoms");
        parts.insert(
            0,
            Part::Fg {
                label: name.replace('-', &f.to_string()),
                tower: maker.build(&f),
                copies: Copies::One,
            },
        );
    }
    parts
}

/// Exact truncation of one stage's image chain.
#[derive(Clone, Debug, Serialize)]
pub struct ImageChain {
    pub stage: usize,
    /// `Im(H_{i+k} → H_i)` for `k = 0..=window`, inside the (truncated) stage.
    pub images: Vec<Subgroup>,
    /// Truncation level when the stage is infinitely generated.
    pub truncation: Option<u32>,
}

impl ImageChain {
    pub fn is_decreasing(&self) -> bool {
        self.images
            .windows(2)
            .all(|w| w[0].contains_subgroup(&w[1]).unwrap_or(false))
    }

    /// First `k` with `Im_k = Im_{k+1}`.
    pub fn first_repeat(&self) -> Option<usize> {
        self.images
            .windows(2)
            .position(|w| w[0].equals(&w[1]).unwrap_or(false))
    }
}

impl InverseTower {
    pub fn hom(tower: &DirectTower, target: &GroupExpr) -> Self {
        InverseTower::Hom {
            tower: tower.clone(),
            target: canonicalize(target),
        }
    }

    pub fn ext(tower: &DirectTower, target: &GroupExpr) -> Self {
        InverseTower::Ext {
            tower: tower.clone(),
            target: canonicalize(target),
        }
    }

    pub fn quotient(target: &GroupExpr, p: u64) -> Result<Self> {
        crate::expr::GroupExpr::padic(p, target.clone()).map_err(|e| Error::InvalidTower(e.to_string()))?;
        Ok(InverseTower::Quotient {
            target: canonicalize(target),
            p,
        })
    }

    pub fn describe(&self) -> String {
        match self {
            InverseTower::Hom { tower, target } => format!("Hom({tower}, {target})"),
            InverseTower::Ext { tower, target } => format!("Ext({tower}, {target})"),
            InverseTower::Quotient { target, p } => format!("{target}/{p}^i"),
            InverseTower::Explicit(t) => t.describe(),
            InverseTower::Sum(ts) => {
                let names: Vec<String> = ts.iter().map(InverseTower::describe).collect();
                format!("Sum({})", names.join(", "))
            }
        }
    }

    /// Stage `i` as a group expression.
    pub fn stage_expr(&self, i: usize) -> Result<GroupExpr> {
        Ok(match self {
            InverseTower::Hom { tower, target } => hom_from_fg(&tower.stage(i), target)?,
            InverseTower::Ext { tower, target } => ext_from_fg(&tower.stage(i), target)?,
            InverseTower::Quotient { target, p } => quotient_by(target, &pow(*p, i as u32))?,
            InverseTower::Explicit(t) => GroupExpr::from_fg(&t.stage(i)),
            InverseTower::Sum(ts) => {
                let parts = ts.iter().map(|t| t.stage_expr(i)).collect::<Result<Vec<_>>>()?;
                canonicalize(&GroupExpr::Sum(parts))
            }
        })
    }

    /// The exact tower, when every stage is finitely generated.
    pub fn as_fg(&self) -> Option<FgInverse> {
        match self {
            InverseTower::Hom { tower, target } => target.as_fg().map(|f| FgInverse::hom(tower, &f)),
            InverseTower::Ext { tower, target } => target.as_fg().map(|f| FgInverse::ext(tower, &f)),
            InverseTower::Quotient { target, p } => target.as_fg().map(|f| FgInverse::quotient(&f, *p)),
            InverseTower::Explicit(t) => Some(t.clone()),
            InverseTower::Sum(ts) => ts.iter().map(InverseTower::as_fg).collect::<Option<Vec<_>>>().map(FgInverse::sum),
        }
    }

    /// Summands with exact component towers. Sums are flattened.
    pub fn parts(&self) -> Vec<Part> {
        match self {
            InverseTower::Hom { tower, target } => coefficient_parts(target, Maker::Hom(tower.clone()), "Hom(G_i, -)"),
            InverseTower::Ext { tower, target } => coefficient_parts(target, Maker::Ext(tower.clone()), "Ext(G_i, -)"),
            InverseTower::Quotient { target, p } => coefficient_parts(target, Maker::Quotient(*p), &format!("- mod {p}^i")),
            InverseTower::Explicit(t) => vec![Part::Fg {
                label: t.describe(),
                tower: t.clone(),
                copies: Copies::One,
            }],
            InverseTower::Sum(ts) => ts.iter().flat_map(InverseTower::parts).collect(),
        }
    }

    /// Finitely generated approximant: one copy of each component, family
    /// members with `e_n ≤ level`, and `Z/q^level` for `Z(q^∞)`.
    pub fn truncate(&self, level: u32) -> Result<FgInverse> {
        if let Some(t) = self.as_fg() {
            return Ok(t);
        }
        let mut towers = Vec::new();
        for part in self.parts() {
            match part {
                Part::Fg { tower, .. } => towers.push(tower),
                Part::Family { rule, maker, .. } => {
                    let mut n = 1;
                    while rule.exponent(n) <= level {
                        towers.push(Part::member(&rule, &maker, n));
                        n += 1;
                    }
                }
                Part::Divisible { q, tower, .. } => towers.push(FgInverse::hom(&tower, &FgGroup::cyclic(pow(q, level)))),
                Part::Opaque { label } => {
                    return Err(Error::TooLarge(format!("{label} has no finitely generated approximant")))
                }
            }
        }
        Ok(FgInverse::sum(towers))
    }
}

/// `Hom(G_i, h)` with restriction maps.
pub fn apply_hom(t: &DirectTower, h: &GroupExpr) -> InverseTower {
    InverseTower::hom(t, h)
}

/// `Ext(G_i, h)` with restriction maps.
pub fn apply_ext(t: &DirectTower, h: &GroupExpr) -> InverseTower {
    InverseTower::ext(t, h)
}

/// `Im(H_{i+k} → H_i)` for `k = 0..=window`. Infinitely generated stages are
/// truncated at level `truncation` (default `i + window + 4`).
pub fn image_chain(t: &InverseTower, i: usize, window: usize, truncation: Option<u32>) -> Result<ImageChain> {
    if let Some(fg) = t.as_fg() {
        return Ok(ImageChain {
            stage: i,
            images: fg.image_chain(i, window),
            truncation: None,
        });
    }
    let level = truncation.unwrap_or((i + window + 4) as u32);
    let fg = t.truncate(level)?;
    Ok(ImageChain {
        stage: i,
        images: fg.image_chain(i, window),
        truncation: Some(level),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn e(s: &str) -> GroupExpr {
        s.parse().unwrap()
    }

    #[test]
    fn remark24_towers() {
        let t = DirectTower::elementary(2, 1).unwrap();
        let hom = apply_hom(&t, &GroupExpr::z()).as_fg().unwrap();
        assert!((1..6).all(|i| hom.stage(i).is_trivial()));
        let ext = apply_ext(&t, &GroupExpr::z()).as_fg().unwrap();
        assert_eq!(ext.stage(3), FgGroup::from_cyclic_orders([2, 2, 2]));
        assert!(ext.map(3).is_surjective());
    }

    #[test]
    fn prufer_hom_is_multiplication_by_p() {
        let t = DirectTower::prufer(2).unwrap();
        let fg = apply_hom(&t, &e("Z/8")).as_fg().unwrap();
        assert_eq!(fg.stage(2), FgGroup::cyclic(4));
        assert_eq!(fg.stage(5), FgGroup::cyclic(8));
        // H[2^6] -> H[2^5] is x -> 2x on Z/8
        let m = fg.map(5);
        assert_eq!(m.apply(&[BigInt::from(1)]), vec![BigInt::from(2)]);
        assert_eq!(fg.tail(), Tail::Constant { from: 3 });
    }

    #[test]
    fn chains() {
        let c = FgInverse::constant(FgHom::identity(&FgGroup::cyclic(6))).unwrap();
        assert!(c.image_chain(1, 4).iter().all(|s| s.is_whole()));

        let z = FgGroup::free(1);
        let t = FgInverse::constant(FgHom::scalar(&z, 3)).unwrap();
        let chain = t.image_chain(1, 4);
        for (k, s) in chain.iter().enumerate() {
            assert_eq!(s.index(), Some(BigInt::from(3u64.pow(k as u32))));
        }

        // Example 5.3 Hom tower at stage 1: strict descent at every k.
        let t = apply_hom(&DirectTower::prufer(2).unwrap(), &e("InfSum(2; n)"));
        let ch = image_chain(&t, 1, 8, None).unwrap();
        assert!(ch.is_decreasing());
        assert_eq!(ch.first_repeat(), None);
    }

    #[test]
    fn quotient_tower() {
        let t = InverseTower::quotient(&e("Sum(Z, Z/4)"), 2).unwrap().as_fg().unwrap();
        assert_eq!(t.stage(1), FgGroup::from_cyclic_orders([2, 2]));
        assert_eq!(t.stage(3), FgGroup::from_cyclic_orders([4, 8]));
        assert!(t.map(3).is_surjective());
    }
}
