use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::expr::{GroupExpr, InfSum};
use crate::fg::{FgGroup, FgHom, IntMatrix};
use crate::num::{is_prime, pow};

/// The rule generating a direct tower. Stages are indexed from 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DirectKind {
    /// `G, G, G, ...` with identity maps.
    Stable(FgGroup),
    /// `Z/p ↪ Z/p^2 ↪ ...`, `1 ↦ p`.
    Prufer { p: u64 },
    /// `(Z/p^k)^i`, coordinate inclusions.
    Elementary { p: u64, k: u32 },
    /// `Z^{step·i}`, coordinate inclusions.
    Free { step: usize },
    /// `⊕_{n ≤ i} Z/p^{e_n}`, coordinate inclusions.
    Affine(InfSum),
    /// The given stages and maps, then constant at the last stage.
    Explicit { stages: Vec<FgGroup>, maps: Vec<FgHom> },
}

type StageCache = BTreeMap<usize, Arc<(FgGroup, FgHom)>>;

/// An increasing tower `G_1 ↪ G_2 ↪ ...` of finitely generated groups.
#[derive(Clone)]
pub struct DirectTower {
    kind: DirectKind,
    cache: Arc<Mutex<StageCache>>,
}

impl PartialEq for DirectTower {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for DirectTower {}

impl fmt::Debug for DirectTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::InvalidTower(format!("{p} is not prime")))
    }
}

impl DirectTower {
    pub fn new(kind: DirectKind) -> Result<Self> {
        match &kind {
            DirectKind::Stable(_) => {}
            DirectKind::Prufer { p } => check_prime(*p)?,
            DirectKind::Elementary { p, k } => {
                check_prime(*p)?;
                if *k == 0 {
                    return Err(Error::InvalidTower("elementary tower needs k >= 1".into()));
                }
            }
            DirectKind::Free { step } => {
                if *step == 0 {
                    return Err(Error::InvalidTower("free tower needs step >= 1".into()));
                }
            }
            DirectKind::Affine(s) => {
                InfSum::new(s.p, s.slope, s.offset).map_err(|e| Error::InvalidTower(e.to_string()))?;
            }
            DirectKind::Explicit { stages, maps } => {
                if stages.is_empty() {
                    return Err(Error::InvalidTower("explicit tower needs a stage".into()));
                }
                if maps.len() + 1 != stages.len() {
                    return Err(Error::InvalidTower(format!(
                        "{} stages need {} maps, got {}",
                        stages.len(),
                        stages.len() - 1,
                        maps.len()
                    )));
                }
                for (i, m) in maps.iter().enumerate() {
                    if m.source() != &stages[i] || m.target() != &stages[i + 1] {
                        return Err(Error::InvalidTower(format!(
                            "map {} does not go from stage {} to stage {}",
                            i + 1,
                            i + 1,
                            i + 2
                        )));
                    }
                    if !m.is_injective() {
                        return Err(Error::InvalidTower(format!(
                            "map {} : {} -> {} is not injective",
                            i + 1,
                            m.source(),
                            m.target()
                        )));
                    }
                }
            }
        }
        Ok(DirectTower {
            kind,
            cache: Arc::default(),
        })
    }

    pub fn stable(g: FgGroup) -> Self {
        Self::new(DirectKind::Stable(g)).expect("stable towers are valid")
    }

    pub fn prufer(p: u64) -> Result<Self> {
        Self::new(DirectKind::Prufer { p })
    }

    pub fn elementary(p: u64, k: u32) -> Result<Self> {
        Self::new(DirectKind::Elementary { p, k })
    }

    pub fn free(step: usize) -> Result<Self> {
        Self::new(DirectKind::Free { step })
    }

    pub fn affine(p: u64, slope: u64, offset: i64) -> Result<Self> {
        let s = InfSum::new(p, slope, offset).map_err(|e| Error::InvalidTower(e.to_string()))?;
        Self::new(DirectKind::Affine(s))
    }

    pub fn explicit(stages: Vec<FgGroup>, maps: Vec<FgHom>) -> Result<Self> {
        Self::new(DirectKind::Explicit { stages, maps })
    }

    pub fn kind(&self) -> &DirectKind {
        &self.kind
    }

    /// Stage from which all structure maps are identities, if any.
    pub fn stable_from(&self) -> Option<usize> {
        match &self.kind {
            DirectKind::Stable(_) => Some(1),
            DirectKind::Explicit { stages, .. } => Some(stages.len()),
            _ => None,
        }
    }

    /// True when each `G_i ↪ G_{i+1}` is a coordinate inclusion onto a
    /// direct summand.
    pub fn is_split(&self) -> bool {
        matches!(
            self.kind,
            DirectKind::Elementary { .. } | DirectKind::Free { .. } | DirectKind::Affine(_)
        )
    }

    /// The summand `C_n` added at stage `n` by a split tower, so that
    /// `G_i = ⊕_{n ≤ i} C_n`.
    pub fn summand(&self, n: usize) -> Option<FgGroup> {
        match &self.kind {
            DirectKind::Elementary { p, k } => Some(FgGroup::cyclic(pow(*p, *k))),
            DirectKind::Free { step } => Some(FgGroup::free(*step)),
            DirectKind::Affine(s) => Some(FgGroup::cyclic(pow(s.p, s.exponent(n as u64)))),
            _ => None,
        }
    }

    fn compute(&self, i: usize) -> (FgGroup, FgHom) {
        let cyclics = |exps: &mut dyn Iterator<Item = u32>, p: u64| {
            FgGroup::from_cyclic_orders(exps.map(|e| pow(p, e)).collect::<Vec<BigInt>>())
        };
        let group = |i: usize| -> FgGroup {
            match &self.kind {
                DirectKind::Stable(g) => g.clone(),
                DirectKind::Prufer { p } => FgGroup::cyclic(pow(*p, i as u32)),
                DirectKind::Elementary { p, k } => cyclics(&mut std::iter::repeat_n(*k, i), *p),
                DirectKind::Free { step } => FgGroup::free(step * i),
                DirectKind::Affine(s) => cyclics(&mut (1..=i as u64).map(|n| s.exponent(n)), s.p),
                DirectKind::Explicit { stages, .. } => stages[i.min(stages.len()) - 1].clone(),
            }
        };
        let (g, h) = (group(i), group(i + 1));
        let map = match &self.kind {
            DirectKind::Stable(_) => FgHom::identity(&g),
            DirectKind::Prufer { p } => {
                FgHom::new(g.clone(), h, IntMatrix::from_rows(&[[*p as i64]])).expect("1 ↦ p is well defined")
            }
            DirectKind::Elementary { .. } | DirectKind::Free { .. } | DirectKind::Affine(_) => {
                let m = IntMatrix::diagonal(h.ngens(), g.ngens(), &vec![BigInt::from(1); g.ngens()]);
                FgHom::new(g.clone(), h, m).expect("coordinate inclusion")
            }
            DirectKind::Explicit { stages, maps } => {
                if i < stages.len() {
                    maps[i - 1].clone()
                } else {
                    FgHom::identity(&g)
                }
            }
        };
        (g, map)
    }

    fn entry(&self, i: usize) -> Arc<(FgGroup, FgHom)> {
        assert!(i >= 1, "stages are indexed from 1");
        if let Some(e) = self.cache.lock().unwrap().get(&i) {
            return e.clone();
        }
        // Computed outside the lock; concurrent fills store identical data.
        let e = Arc::new(self.compute(i));
        self.cache.lock().unwrap().entry(i).or_insert(e).clone()
    }

    /// `G_i`, `i ≥ 1`.
    pub fn stage(&self, i: usize) -> FgGroup {
        self.entry(i).0.clone()
    }

    /// `G_i → G_{i+1}`.
    pub fn map(&self, i: usize) -> FgHom {
        self.entry(i).1.clone()
    }

    /// `G_i → G_j` for `i ≤ j`.
    pub fn map_between(&self, i: usize, j: usize) -> FgHom {
        let mut f = FgHom::identity(&self.stage(i));
        for s in i..j {
            f = self.map(s).compose(&f).expect("composable");
        }
        f
    }

    /// Coordinate retraction `G_{i+1} → G_i` of a split tower.
    pub fn retraction(&self, i: usize) -> Option<FgHom> {
        if !self.is_split() {
            return None;
        }
        let (g, h) = (self.stage(i), self.stage(i + 1));
        let m = IntMatrix::diagonal(g.ngens(), h.ngens(), &vec![BigInt::from(1); g.ngens()]);
        Some(FgHom::new(h, g, m).expect("coordinate projection"))
    }
}

/// `colim G_i`.
pub fn colimit_group(t: &DirectTower) -> GroupExpr {
    match t.kind() {
        DirectKind::Stable(g) => GroupExpr::from_fg(g),
        DirectKind::Explicit { stages, .. } => GroupExpr::from_fg(stages.last().unwrap()),
        DirectKind::Prufer { p } => GroupExpr::Prufer(*p),
        DirectKind::Elementary { p, k } => GroupExpr::InfSum(InfSum::constant(*p, *k)),
        DirectKind::Free { .. } => GroupExpr::FreeCountable,
        DirectKind::Affine(s) => GroupExpr::InfSum(*s),
    }
}

impl fmt::Display for DirectTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            DirectKind::Stable(g) => write!(f, "stable({})", GroupExpr::from_fg(g)),
            DirectKind::Prufer { p } => write!(f, "prufer({p})"),
            DirectKind::Elementary { p, k } => write!(f, "elementary({p},{k})"),
            DirectKind::Free { step } => write!(f, "free({step})"),
            DirectKind::Affine(s) => {
                let e = GroupExpr::InfSum(*s).to_string();
                // "InfSum(p; rule)" -> "affine(p; rule)"
                write!(f, "affine{}", &e["InfSum".len()..])
            }
            DirectKind::Explicit { stages, maps } => {
                write!(f, "explicit([")?;
                for (i, g) in stages.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", GroupExpr::from_fg(g))?;
                }
                write!(f, "], [")?;
                for (i, m) in maps.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", m.matrix())?;
                }
                write!(f, "])")
            }
        }
    }
}

impl Serialize for DirectTower {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_stages() {
        let t = DirectTower::prufer(3).unwrap();
        assert_eq!(t.stage(2), FgGroup::cyclic(9));
        assert!(t.map(2).is_injective());
        assert_eq!(colimit_group(&t).to_string(), "Prufer(3)");

        let t = DirectTower::elementary(2, 1).unwrap();
        assert_eq!(t.stage(3), FgGroup::from_cyclic_orders([2, 2, 2]));
        assert_eq!(colimit_group(&t).to_string(), "InfSum(2; 1)");

        let t = DirectTower::affine(2, 1, 0).unwrap();
        assert_eq!(t.stage(3), FgGroup::from_cyclic_orders([2, 4, 8]));
        let r = t.retraction(3).unwrap();
        assert!(r.compose(&t.map(3)).unwrap() == FgHom::identity(&t.stage(3)));
        assert_eq!(t.to_string(), "affine(2; n)");

        let t = DirectTower::stable(FgGroup::free(2));
        assert_eq!(colimit_group(&t).to_string(), "Z^2");
    }

    #[test]
    fn explicit_towers_validate() {
        let z2 = FgGroup::cyclic(2);
        let z4 = FgGroup::cyclic(4);
        let inc = FgHom::new(z2.clone(), z4.clone(), IntMatrix::from_rows(&[[2]])).unwrap();
        let t = DirectTower::explicit(vec![z2.clone(), z4.clone()], vec![inc]).unwrap();
        assert_eq!(t.stage(5), z4);
        assert_eq!(t.stable_from(), Some(2));
        assert_eq!(t.map_between(1, 4).matrix(), &IntMatrix::from_rows(&[[2]]));
        let zero = FgHom::zero(&z2, &z4);
        assert!(matches!(
            DirectTower::explicit(vec![z2, z4], vec![zero]),
            Err(Error::InvalidTower(_))
        ));
    }

    #[test]
    fn stages_are_reproducible_across_threads() {
        let t = DirectTower::affine(3, 2, 1).unwrap();
        let handles: Vec<_> = (0..4)
            .map(|_| {
                let t = t.clone();
                std::thread::spawn(move || (1..8).map(|i| t.map(i)).collect::<Vec<_>>())
            })
            .collect();
        let results: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        assert!(results.windows(2).all(|w| w[0] == w[1]));
    }
}
