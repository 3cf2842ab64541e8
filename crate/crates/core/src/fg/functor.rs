use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::group::{present, FgGroup, FgHom, Presentation};
use super::matrix::IntMatrix;
use super::subgroup::unit;
use crate::error::{Error, Result};

/// One cyclic parameter of a raw coordinate system: the entry at `(row, col)`
/// is `value · unit`, with `value` in `Z` (`order = None`) or `Z/order`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct RawParam {
    row: usize,
    col: usize,
    order: Option<BigInt>,
    unit: BigInt,
}

fn raw_presentation(params: &[RawParam]) -> Presentation {
    let orders: Vec<BigInt> = params
        .iter()
        .map(|p| p.order.clone().unwrap_or_else(BigInt::zero))
        .collect();
    let n = orders.len();
    present(&IntMatrix::diagonal(n, n, &orders))
}

/// `Hom(g, h)` in canonical form with explicit coordinates.
#[derive(Clone, Debug)]
pub struct HomGroup {
    source: FgGroup,
    target: FgGroup,
    params: Vec<RawParam>,
    pres: Presentation,
}

impl HomGroup {
    pub fn new(g: &FgGroup, h: &FgGroup) -> Self {
        let mut params = Vec::new();
        for col in 0..g.ngens() {
            for row in 0..h.ngens() {
                let p = match (g.gen_order(col), h.gen_order(row)) {
                    (None, None) => RawParam {
                        row,
                        col,
                        order: None,
                        unit: BigInt::one(),
                    },
                    (None, Some(e)) => RawParam {
                        row,
                        col,
                        order: Some(e.clone()),
                        unit: BigInt::one(),
                    },
                    (Some(_), None) => continue,
                    (Some(d), Some(e)) => {
                        let c = d.gcd(e);
                        if c.is_one() {
                            continue;
                        }
                        RawParam {
                            row,
                            col,
                            unit: e / &c,
                            order: Some(c),
                        }
                    }
                };
                params.push(p);
            }
        }
        let pres = raw_presentation(&params);
        HomGroup {
            source: g.clone(),
            target: h.clone(),
            params,
            pres,
        }
    }

    pub fn group(&self) -> &FgGroup {
        &self.pres.group
    }

    pub fn source(&self) -> &FgGroup {
        &self.source
    }

    pub fn target(&self) -> &FgGroup {
        &self.target
    }

    /// Coordinates of `f` in the canonical group.
    pub fn coords(&self, f: &FgHom) -> Result<Vec<BigInt>> {
        if f.source() != &self.source || f.target() != &self.target {
            return Err(Error::Shape("homomorphism does not belong to this Hom group".into()));
        }
        let m = f.matrix();
        let mut raw = Vec::with_capacity(self.params.len());
        for p in &self.params {
            let x = &m[(p.row, p.col)];
            let (q, r) = x.div_rem(&p.unit);
            if !r.is_zero() {
                return Err(Error::IllDefined("entry is not a multiple of its unit".into()));
            }
            raw.push(q);
        }
        Ok(self.pres.to_canonical(&raw))
    }

    /// Homomorphism with the given canonical coordinates.
    pub fn hom_at(&self, w: &[BigInt]) -> FgHom {
        let raw = self.pres.from_canonical(w);
        let mut m = IntMatrix::zeros(self.target.ngens(), self.source.ngens());
        for (p, x) in self.params.iter().zip(&raw) {
            m[(p.row, p.col)] = x * &p.unit;
        }
        FgHom::new_unchecked(self.source.clone(), self.target.clone(), m)
    }

    /// Homomorphisms corresponding to the canonical generators.
    pub fn basis(&self) -> Vec<FgHom> {
        let n = self.group().ngens();
        (0..n).map(|k| self.hom_at(&unit(n, k))).collect()
    }
}

/// `Ext(g, h)` computed from the resolution `0 → Z^k → Z^{r+k} → g → 0`.
///
/// A class is represented by a cocycle: one element `c_i ∈ h` per torsion
/// generator of `g`, taken modulo `d_i · h`.
#[derive(Clone, Debug)]
pub struct ExtGroup {
    source: FgGroup,
    target: FgGroup,
    params: Vec<RawParam>,
    pres: Presentation,
}

impl ExtGroup {
    pub fn new(g: &FgGroup, h: &FgGroup) -> Self {
        let mut params = Vec::new();
        for (i, d) in g.torsion().iter().enumerate() {
            for row in 0..h.ngens() {
                let c = match h.gen_order(row) {
                    None => d.clone(),
                    Some(e) => d.gcd(e),
                };
                if c.is_one() {
                    continue;
                }
                params.push(RawParam {
                    row,
                    col: i,
                    order: Some(c),
                    unit: BigInt::one(),
                });
            }
        }
        let pres = raw_presentation(&params);
        ExtGroup {
            source: g.clone(),
            target: h.clone(),
            params,
            pres,
        }
    }

    pub fn group(&self) -> &FgGroup {
        &self.pres.group
    }

    pub fn source(&self) -> &FgGroup {
        &self.source
    }

    pub fn target(&self) -> &FgGroup {
        &self.target
    }

    /// Number of cocycle entries (torsion generators of the source).
    pub fn cocycle_len(&self) -> usize {
        self.source.torsion().len()
    }

    /// Canonical coordinates of the class of a cocycle (`cocycle[i] ∈ h`).
    pub fn coords(&self, cocycle: &[Vec<BigInt>]) -> Vec<BigInt> {
        assert_eq!(cocycle.len(), self.cocycle_len(), "cocycle length mismatch");
        let raw: Vec<BigInt> = self
            .params
            .iter()
            .map(|p| cocycle[p.col][p.row].clone())
            .collect();
        self.pres.to_canonical(&raw)
    }

    /// A cocycle representing the class with the given coordinates.
    pub fn cocycle_at(&self, w: &[BigInt]) -> Vec<Vec<BigInt>> {
        let raw = self.pres.from_canonical(w);
        let mut c = vec![self.target.zero_element(); self.cocycle_len()];
        for (p, x) in self.params.iter().zip(&raw) {
            c[p.col][p.row] = x.clone();
        }
        c
    }
}

pub fn hom_group(g: &FgGroup, h: &FgGroup) -> (FgGroup, Vec<FgHom>) {
    let hg = HomGroup::new(g, h);
    (hg.group().clone(), hg.basis())
}

pub fn ext_group(g: &FgGroup, h: &FgGroup) -> FgGroup {
    ExtGroup::new(g, h).group().clone()
}

/// `f^*: Hom(g, h) → Hom(g', h)` for `f: g' → g`.
pub fn hom_induced(f: &FgHom, h: &FgGroup) -> FgHom {
    let from = HomGroup::new(f.target(), h);
    let to = HomGroup::new(f.source(), h);
    let cols: Vec<Vec<BigInt>> = from
        .basis()
        .iter()
        .map(|m| to.coords(&m.compose(f).expect("composable")).expect("well-defined"))
        .collect();
    FgHom::new_unchecked(
        from.group().clone(),
        to.group().clone(),
        IntMatrix::from_columns(to.group().ngens(), &cols),
    )
}

/// `r_*: Hom(g, h) → Hom(g, h')` for `r: h → h'`.
pub fn hom_induced_co(g: &FgGroup, r: &FgHom) -> FgHom {
    let from = HomGroup::new(g, r.source());
    let to = HomGroup::new(g, r.target());
    let cols: Vec<Vec<BigInt>> = from
        .basis()
        .iter()
        .map(|m| to.coords(&r.compose(m).expect("composable")).expect("well-defined"))
        .collect();
    FgHom::new_unchecked(
        from.group().clone(),
        to.group().clone(),
        IntMatrix::from_columns(to.group().ngens(), &cols),
    )
}

/// `r_*: Ext(g, h) → Ext(g, h')` for `r: h → h'`, acting on cocycles.
pub fn ext_induced_co(g: &FgGroup, r: &FgHom) -> FgHom {
    let from = ExtGroup::new(g, r.source());
    let to = ExtGroup::new(g, r.target());
    let n = from.group().ngens();
    let cols: Vec<Vec<BigInt>> = (0..n)
        .map(|k| {
            let c: Vec<Vec<BigInt>> = from
                .cocycle_at(&unit(n, k))
                .iter()
                .map(|x| r.apply(x))
                .collect();
            to.coords(&c)
        })
        .collect();
    FgHom::new_unchecked(
        from.group().clone(),
        to.group().clone(),
        IntMatrix::from_columns(to.group().ngens(), &cols),
    )
}

/// `f^*: Ext(g, h) → Ext(g', h)` for `f: g' → g`.
///
/// The chain map on resolutions is `f_0 = F` and
/// `f_1[i, i'] = d'_{i'} · F[r + i, r' + i'] / d_i`; a cocycle `c` pulls back
/// to `c ∘ f_1`.
pub fn ext_induced_contra(f: &FgHom, h: &FgGroup) -> FgHom {
    let g = f.target();
    let gp = f.source();
    let from = ExtGroup::new(g, h);
    let to = ExtGroup::new(gp, h);
    let (r, rp) = (g.rank(), gp.rank());
    let m = f.matrix();
    let k = g.torsion().len();
    let kp = gp.torsion().len();
    let mut f1 = IntMatrix::zeros(k, kp);
    for i in 0..k {
        for ip in 0..kp {
            let num = &gp.torsion()[ip] * &m[(r + i, rp + ip)];
            let (q, rem) = num.div_rem(&g.torsion()[i]);
            assert!(rem.is_zero(), "well-defined map lifts to the resolution");
            f1[(i, ip)] = q;
        }
    }
    let n = from.group().ngens();
    let cols: Vec<Vec<BigInt>> = (0..n)
        .map(|kk| {
            let c = from.cocycle_at(&unit(n, kk));
            let cp: Vec<Vec<BigInt>> = (0..kp)
                .map(|ip| {
                    let mut acc = h.zero_element();
                    for (i, ci) in c.iter().enumerate() {
                        let s = &f1[(i, ip)];
                        if s.is_zero() {
                            continue;
                        }
                        for (a, x) in acc.iter_mut().zip(ci) {
                            *a += s * x;
                        }
                    }
                    h.reduce(&acc)
                })
                .collect();
            to.coords(&cp)
        })
        .collect();
    FgHom::new_unchecked(
        from.group().clone(),
        to.group().clone(),
        IntMatrix::from_columns(to.group().ngens(), &cols),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn hom_z4_z6_is_z2() {
        let (g, basis) = hom_group(&FgGroup::cyclic(4), &FgGroup::cyclic(6));
        assert_eq!(g, FgGroup::cyclic(2));
        // enumerate k with 4k ≡ 0 mod 6
        let sols: Vec<i64> = (0..6).filter(|k| (4 * k) % 6 == 0).collect();
        assert_eq!(sols, vec![0, 3]);
        assert_eq!(basis[0].matrix()[(0, 0)], z(3));
    }

    #[test]
    fn small_hom_groups() {
        assert!(hom_group(&FgGroup::cyclic(2), &FgGroup::free(1)).0.is_trivial());
        assert_eq!(
            hom_group(&FgGroup::free(2), &FgGroup::cyclic(3)).0,
            FgGroup::from_cyclic_orders([3, 3])
        );
    }

    #[test]
    fn ext_values() {
        assert_eq!(ext_group(&FgGroup::cyclic(2), &FgGroup::free(1)), FgGroup::cyclic(2));
        assert!(ext_group(&FgGroup::free(3), &FgGroup::cyclic(5)).is_trivial());
        assert_eq!(ext_group(&FgGroup::cyclic(4), &FgGroup::cyclic(6)), FgGroup::cyclic(2));
    }

    #[test]
    fn contra_ext_along_z2_into_z4_is_onto() {
        let f = FgHom::new(FgGroup::cyclic(2), FgGroup::cyclic(4), IntMatrix::from_rows(&[[2]])).unwrap();
        let h = FgGroup::cyclic(4);
        let ind = ext_induced_contra(&f, &h);
        assert_eq!(ind.source(), &FgGroup::cyclic(4));
        assert_eq!(ind.target(), &FgGroup::cyclic(2));
        let images: std::collections::BTreeSet<_> =
            ind.source().elements().iter().map(|x| ind.apply(x)).collect();
        assert_eq!(images.len(), 2);
    }

    #[test]
    fn doubling_kills_ext_z2_z() {
        let z1 = FgGroup::free(1);
        let ind = ext_induced_co(&FgGroup::cyclic(2), &FgHom::scalar(&z1, 2));
        assert_eq!(ind.source(), &FgGroup::cyclic(2));
        assert!(ind.is_zero());
    }

    #[test]
    fn identities_induce_identities() {
        let g = FgGroup::new(1, vec![z(2), z(4)]).unwrap();
        let h = FgGroup::new(1, vec![z(6)]).unwrap();
        let id = FgHom::identity(&g);
        assert_eq!(hom_induced(&id, &h), FgHom::identity(&HomGroup::new(&g, &h).group().clone()));
        assert_eq!(ext_induced_contra(&id, &h), FgHom::identity(&ext_group(&g, &h)));
        let idh = FgHom::identity(&h);
        assert_eq!(ext_induced_co(&g, &idh), FgHom::identity(&ext_group(&g, &h)));
        let zero = FgHom::zero(&g, &g);
        assert!(hom_induced(&zero, &h).is_zero());
    }
}
