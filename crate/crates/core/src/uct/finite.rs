use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::Rng;
use serde::Serialize;

use super::kk::KTheoryData;
use crate::error::{Error, Result};
use crate::expr::GroupExpr;
use crate::fg::{
    ext_induced_contra, hom_induced, image_subgroup, kernel_subgroup, subgroup_quotient, FgGroup, FgHom, IntMatrix,
    Presentation, Subgroup,
};
use crate::tower::DirectTower;

/// Largest group the checker will enumerate.
pub const ENUMERATION_LIMIT: u64 = 1 << 20;

/// A finite canonical group with elements indexed by `0..size`.
struct Fin {
    orders: Vec<u64>,
    size: u64,
}

impl Fin {
    fn of(g: &FgGroup) -> Result<Fin> {
        if !g.is_finite() {
            return Err(Error::Internal(format!("{g} is infinite")));
        }
        let orders: Vec<u64> = g.torsion().iter().map(|d| d.to_u64().unwrap_or(u64::MAX)).collect();
        let size = orders.iter().try_fold(1u64, |a, &d| a.checked_mul(d)).unwrap_or(u64::MAX);
        if size > ENUMERATION_LIMIT {
            return Err(Error::TooLarge(format!("{g} has more than {ENUMERATION_LIMIT} elements")));
        }
        Ok(Fin { orders, size })
    }

    fn decode(&self, mut x: u64) -> Vec<u64> {
        self.orders
            .iter()
            .map(|d| {
                let c = x % d;
                x /= d;
                c
            })
            .collect()
    }

    fn encode(&self, v: &[u64]) -> u64 {
        self.orders.iter().zip(v).rev().fold(0, |acc, (d, c)| acc * d + c)
    }
}

/// Value table of a homomorphism between finite groups.
struct Table {
    source: Fin,
    target: Fin,
    values: Vec<u64>,
}

impl Table {
    fn of(f: &FgHom) -> Result<Table> {
        let source = Fin::of(f.source())?;
        let target = Fin::of(f.target())?;
        let m = f.matrix();
        let entry = |r: usize, c: usize| -> u128 {
            let d = BigInt::from(target.orders[r]);
            num_integer::Integer::mod_floor(&m[(r, c)], &d).to_u128().unwrap()
        };
        let cols: Vec<Vec<u128>> = (0..source.orders.len())
            .map(|c| (0..target.orders.len()).map(|r| entry(r, c)).collect())
            .collect();
        let values = (0..source.size)
            .map(|x| {
                let v = source.decode(x);
                let w: Vec<u64> = (0..target.orders.len())
                    .map(|r| {
                        let d = target.orders[r] as u128;
                        (v.iter().zip(&cols).map(|(&a, col)| a as u128 * col[r] % d).sum::<u128>() % d) as u64
                    })
                    .collect();
                target.encode(&w)
            })
            .collect();
        Ok(Table { source, target, values })
    }

    fn at(&self, x: u64) -> u64 {
        self.values[x as usize]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FiniteCheck {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

fn check(name: &str, failure: Option<String>) -> FiniteCheck {
    FiniteCheck {
        name: name.to_string(),
        passed: failure.is_none(),
        counterexample: failure,
    }
}

fn show(t: &Fin, x: u64) -> String {
    format!("{:?}", t.decode(x))
}

/// `0 → A →f B →g C → 0` element by element.
fn short_exact(name: &str, f: &Table, g: &Table) -> FiniteCheck {
    let mut seen = HashMap::new();
    for a in 0..f.source.size {
        let b = f.at(a);
        if let Some(prev) = seen.insert(b, a) {
            return check(
                name,
                Some(format!(
                    "not injective: {} and {} have the same image",
                    show(&f.source, prev),
                    show(&f.source, a)
                )),
            );
        }
        if g.at(b) != 0 {
            return check(name, Some(format!("{} maps to a nonzero element", show(&f.source, a))));
        }
    }
    let mut hit = vec![false; g.target.size as usize];
    for b in 0..g.source.size {
        let c = g.at(b);
        hit[c as usize] = true;
        if c == 0 && !seen.contains_key(&b) {
            return check(name, Some(format!("{} is in the kernel but not the image", show(&g.source, b))));
        }
    }
    if let Some(c) = hit.iter().position(|h| !h) {
        return check(name, Some(format!("{} is not hit", show(&g.target, c as u64))));
    }
    check(name, None)
}

/// `second ∘ first = fourth ∘ third` on every element.
fn commutes(name: &str, first: &Table, second: &Table, third: &Table, fourth: &Table) -> FiniteCheck {
    let bad = (0..first.source.size).find(|&x| second.at(first.at(x)) != fourth.at(third.at(x)));
    check(name, bad.map(|x| format!("{} goes to different places", show(&first.source, x))))
}

/// Canonical form of a direct sum, with block maps in the concatenated
/// coordinates.
struct Blocks {
    parts: Vec<FgGroup>,
    pres: Presentation,
}

impl Blocks {
    fn new(parts: Vec<FgGroup>) -> Blocks {
        let pres = FgGroup::direct_sum_all(&parts);
        Blocks { parts, pres }
    }

    fn offset(&self, k: usize) -> usize {
        self.parts[..k].iter().map(FgGroup::ngens).sum()
    }

    fn width(&self) -> usize {
        self.offset(self.parts.len())
    }

    /// The map whose `(t, s)` block is `m` for every `(t, s, m)`.
    fn map_to(&self, target: &Blocks, blocks: &[(usize, usize, IntMatrix)]) -> Result<FgHom> {
        let mut raw = IntMatrix::zeros(target.width(), self.width());
        for (t, s, m) in blocks {
            let (r0, c0) = (target.offset(*t), self.offset(*s));
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    raw[(r0 + r, c0 + c)] = m[(r, c)].clone();
                }
            }
        }
        let canon = target.pres.to_canon.mul(&raw).mul(&self.pres.from_canon);
        FgHom::new(self.pres.group.clone(), target.pres.group.clone(), canon)
            .map_err(|e| Error::Internal(format!("block map: {e}")))
    }
}

fn identity(g: &FgGroup) -> IntMatrix {
    IntMatrix::identity(g.ngens())
}

/// Rewrites `f` (landing in `sub`) in the canonical coordinates of `sub`.
fn into_sub(f: &FgHom, sub: &Subgroup, pres: &Presentation) -> Result<FgHom> {
    let n = f.source().ngens();
    let cols = (0..n)
        .map(|j| {
            let mut e = vec![BigInt::from(0); n];
            e[j] = BigInt::from(1);
            let x = f.apply(&e);
            sub.express(&x)
                .map(|c| pres.to_canonical(&c))
                .ok_or_else(|| Error::Internal("map leaves the limit subgroup".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    FgHom::new(
        f.source().clone(),
        pres.group.clone(),
        IntMatrix::from_columns(pres.group.ngens(), &cols),
    )
    .map_err(|e| Error::Internal(format!("limit coordinates: {e}")))
}

fn out_of_sub(sub: &Subgroup, pres: &Presentation) -> Result<FgHom> {
    FgHom::new(
        pres.group.clone(),
        sub.ambient().clone(),
        sub.generators().mul(&pres.from_canon),
    )
    .map_err(|e| Error::Internal(format!("limit inclusion: {e}")))
}

fn compose(second: &FgHom, first: &FgHom) -> Result<FgHom> {
    second.compose(first).map_err(|e| Error::Internal(e.to_string()))
}

/// The stage groups of `KK_n(A_i, B)` for `i = 1..=last`: per stage, the
/// parts `Hom(K_0(A_i), ·), Hom(K_1(A_i), ·), Ext(K_0(A_i), ·), Ext(K_1(A_i), ·)`
/// and the restriction maps `stage i + 1 → stage i` per part.
struct StageModel {
    parts: Vec<[FgGroup; 4]>,
    restrictions: Vec<[FgHom; 4]>,
}

impl StageModel {
    fn new(data: &KTheoryData, n: usize, last: usize) -> Result<StageModel> {
        let h = |e: &GroupExpr| {
            e.as_fg()
                .filter(FgGroup::is_finite)
                .ok_or_else(|| Error::InvalidTower(format!("{e} is not a finite group")))
        };
        let targets = [
            h(data.hom_target(0, n))?,
            h(data.hom_target(1, n))?,
            h(data.ext_target(0, n))?,
            h(data.ext_target(1, n))?,
        ];
        let mut parts = Vec::new();
        let mut restrictions = Vec::new();
        for i in 1..=last {
            let g = [data.ka[0].stage(i), data.ka[1].stage(i)];
            parts.push([
                crate::fg::hom_group(&g[0], &targets[0]).0,
                crate::fg::hom_group(&g[1], &targets[1]).0,
                crate::fg::ext_group(&g[0], &targets[2]),
                crate::fg::ext_group(&g[1], &targets[3]),
            ]);
            if i < last {
                let f = [data.ka[0].map(i), data.ka[1].map(i)];
                restrictions.push([
                    hom_induced(&f[0], &targets[0]),
                    hom_induced(&f[1], &targets[1]),
                    ext_induced_contra(&f[0], &targets[2]),
                    ext_induced_contra(&f[1], &targets[3]),
                ]);
            }
        }
        Ok(StageModel { parts, restrictions })
    }

    fn last(&self) -> usize {
        self.parts.len()
    }

    /// `stage last → stage i` on part `k`.
    fn down(&self, i: usize, k: usize) -> Result<FgHom> {
        let mut f = FgHom::identity(&self.parts[self.last() - 1][k]);
        for s in (i..self.last()).rev() {
            f = compose(&self.restrictions[s - 1][k], &f)?;
        }
        Ok(f)
    }

    /// Product over stages of the parts in `ks`.
    fn product(&self, ks: &[usize], upto: usize) -> Blocks {
        Blocks::new(
            self.parts[..upto]
                .iter()
                .flat_map(|p| ks.iter().map(|&k| p[k].clone()))
                .collect(),
        )
    }

    /// `(x_i) ↦ (x_i − r_i(x_{i+1}))` on `∏_{i ≤ last}` into `∏_{i < last}`.
    fn eilenberg(&self, ks: &[usize]) -> Result<(Blocks, Blocks, FgHom)> {
        let all = self.product(ks, self.last());
        let head = self.product(ks, self.last() - 1);
        let w = ks.len();
        let mut blocks = Vec::new();
        for i in 0..self.last() - 1 {
            for (a, &k) in ks.iter().enumerate() {
                blocks.push((i * w + a, i * w + a, identity(&self.parts[i][k])));
                blocks.push((i * w + a, (i + 1) * w + a, self.restrictions[i][k].matrix().scale(&BigInt::from(-1))));
            }
        }
        let psi = all.map_to(&head, &blocks)?;
        Ok((all, head, psi))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FiniteGroups {
    pub lim1_kk: FgGroup,
    pub kk: FgGroup,
    pub lim_kk: FgGroup,
    pub lim_ext: FgGroup,
    pub ext: FgGroup,
    pub hom: FgGroup,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiniteMaps {
    pub sigma: FgHom,
    pub rho: FgHom,
    pub delta: FgHom,
    pub gamma: FgHom,
    pub psi: FgHom,
    pub phi: FgHom,
    pub lim_delta: FgHom,
    pub gamma_tilde: FgHom,
}

/// Element-level verification of the diagram on a finite model.
#[derive(Clone, Debug, Serialize)]
pub struct FiniteModelReport {
    pub degree: usize,
    pub stages: usize,
    pub groups: FiniteGroups,
    pub maps: FiniteMaps,
    pub checks: Vec<FiniteCheck>,
    /// Pairs `(x, y)` with `ρ(x) = (lim δ_i)(y)`.
    pub compatible_pairs: u64,
    pub passed: bool,
}

/// Builds the diagram for degree `n` from explicit finite groups and checks
/// commutativity, exactness of both rows and both columns, and that the
/// square `δ, φ, ρ, lim δ_i` is a pullback, by enumerating elements.
pub fn finite_model_check(data: &KTheoryData, n: usize) -> Result<FiniteModelReport> {
    if !data.is_finite_model() {
        return Err(Error::InvalidTower(
            "finite models need stable towers of finite groups and finite K_*(B)".into(),
        ));
    }
    let n = n % 2;
    let last = data.ka.iter().map(|t| t.stable_from().unwrap()).max().unwrap() + 1;
    let model = StageModel::new(data, n, last)?;
    let top = &model.parts[last - 1];

    let kk = Blocks::new(top.to_vec());
    let ext = Blocks::new(top[2..].to_vec());
    let hom = Blocks::new(top[..2].to_vec());
    let delta = ext.map_to(&kk, &[(2, 0, identity(&top[2])), (3, 1, identity(&top[3]))])?;
    let gamma = kk.map_to(&hom, &[(0, 0, identity(&top[0])), (1, 1, identity(&top[1]))])?;

    let (kk_all, _, psi_kk) = model.eilenberg(&[0, 1, 2, 3])?;
    let lim_kk_sub = kernel_subgroup(&psi_kk);
    let lim_kk = lim_kk_sub.structure_presentation();
    let (ext_all, _, psi_ext) = model.eilenberg(&[2, 3])?;
    let lim_ext_sub = kernel_subgroup(&psi_ext);
    let lim_ext = lim_ext_sub.structure_presentation();

    let mut rho_blocks = Vec::new();
    let mut phi_blocks = Vec::new();
    let mut lim_delta_blocks = Vec::new();
    for i in 1..=last {
        for k in 0..4 {
            rho_blocks.push(((i - 1) * 4 + k, k, model.down(i, k)?.matrix().clone()));
        }
        for k in 0..2 {
            phi_blocks.push(((i - 1) * 2 + k, k, model.down(i, k + 2)?.matrix().clone()));
            lim_delta_blocks.push(((i - 1) * 4 + 2 + k, (i - 1) * 2 + k, identity(&model.parts[i - 1][k + 2])));
        }
    }
    let rho = into_sub(&kk.map_to(&kk_all, &rho_blocks)?, &lim_kk_sub, &lim_kk)?;
    let phi = into_sub(&ext.map_to(&ext_all, &phi_blocks)?, &lim_ext_sub, &lim_ext)?;
    let lim_delta = into_sub(
        &compose(&ext_all.map_to(&kk_all, &lim_delta_blocks)?, &out_of_sub(&lim_ext_sub, &lim_ext)?)?,
        &lim_kk_sub,
        &lim_kk,
    )?;
    let top_k = (last - 1) * 4;
    let gamma_tilde = compose(
        &kk_all.map_to(&hom, &[(0, top_k, identity(&top[0])), (1, top_k + 1, identity(&top[1]))])?,
        &out_of_sub(&lim_kk_sub, &lim_kk)?,
    )?;

    // The Milnor kernel comes from the degree n + 1 tower.
    let shifted = StageModel::new(data, n + 1, last)?;
    let (_, head, psi_next) = shifted.eilenberg(&[0, 1, 2, 3])?;
    let lim1_kk = subgroup_quotient(&head.pres.group, &image_subgroup(&psi_next))
        .map_err(|e| Error::Internal(e.to_string()))?;
    let sigma = FgHom::zero(&lim1_kk, &kk.pres.group);
    let psi = FgHom::zero(&lim1_kk, &ext.pres.group);

    let t = |f: &FgHom| Table::of(f);
    let (t_sigma, t_rho, t_delta, t_gamma) = (t(&sigma)?, t(&rho)?, t(&delta)?, t(&gamma)?);
    let (t_psi, t_phi, t_ld, t_gt) = (t(&psi)?, t(&phi)?, t(&lim_delta)?, t(&gamma_tilde)?);

    let mut checks = vec![
        short_exact("milnor_row", &t_sigma, &t_rho),
        short_exact("uct_row", &t_delta, &t_gamma),
        short_exact("left_column", &t_psi, &t_phi),
        short_exact("right_column", &t_ld, &t_gt),
        commutes("left_square", &t_psi, &t_delta, &t_sigma, &identity_table(&kk.pres.group)?),
        commutes("right_square", &t_rho, &t_gt, &identity_table(&kk.pres.group)?, &t_gamma),
        commutes("pullback_square", &t_delta, &t_rho, &t_phi, &t_ld),
    ];
    let (pullback, compatible_pairs) = pullback_check(&t_rho, &t_ld, &t_delta, &t_phi);
    checks.push(pullback);
    let passed = checks.iter().all(|c| c.passed);
    Ok(FiniteModelReport {
        degree: n,
        stages: last,
        groups: FiniteGroups {
            lim1_kk,
            kk: kk.pres.group.clone(),
            lim_kk: lim_kk.group.clone(),
            lim_ext: lim_ext.group.clone(),
            ext: ext.pres.group.clone(),
            hom: hom.pres.group.clone(),
        },
        maps: FiniteMaps {
            sigma,
            rho,
            delta,
            gamma,
            psi,
            phi,
            lim_delta,
            gamma_tilde,
        },
        checks,
        compatible_pairs,
        passed,
    })
}

fn identity_table(g: &FgGroup) -> Result<Table> {
    Table::of(&FgHom::identity(g))
}

/// Every pair `(x, y)` with `ρ(x) = (lim δ_i)(y)` has exactly one `z` with
/// `δ(z) = x` and `φ(z) = y`.
fn pullback_check(rho: &Table, lim_delta: &Table, delta: &Table, phi: &Table) -> (FiniteCheck, u64) {
    let mut preimage: HashMap<u64, Vec<u64>> = HashMap::new();
    for y in 0..lim_delta.source.size {
        preimage.entry(lim_delta.at(y)).or_default().push(y);
    }
    let mut witnesses: HashMap<(u64, u64), u32> = HashMap::new();
    for z in 0..delta.source.size {
        *witnesses.entry((delta.at(z), phi.at(z))).or_default() += 1;
    }
    let mut pairs = 0;
    for x in 0..rho.source.size {
        for &y in preimage.get(&rho.at(x)).map(Vec::as_slice).unwrap_or(&[]) {
            pairs += 1;
            let count = witnesses.get(&(x, y)).copied().unwrap_or(0);
            if count != 1 {
                let detail = format!(
                    "pair ({}, {}) has {count} mediating elements",
                    show(&rho.source, x),
                    show(&lim_delta.source, y)
                );
                return (check("pullback", Some(detail)), pairs);
            }
        }
    }
    (check("pullback", None), pairs)
}

fn random_group(rng: &mut impl Rng, max_order: u64) -> FgGroup {
    let mut orders = Vec::new();
    let mut size = 1;
    while size * 2 <= max_order && rng.gen_bool(0.6) {
        let d = rng.gen_range(2..=max_order / size);
        orders.push(d);
        size *= d;
    }
    FgGroup::from_cyclic_orders(orders)
}

/// A random injective map out of `g` into a group of order at most
/// `max_order` that contains it.
fn random_embedding(rng: &mut impl Rng, g: &FgGroup, max_order: u64) -> Option<FgHom> {
    let size = g.order_u64()?;
    let room = max_order / size;
    if room < 2 {
        return None;
    }
    let c = rng.gen_range(2..=room);
    let mut orders: Vec<u64> = g.torsion().iter().map(|d| d.to_u64().unwrap()).collect();
    if !orders.is_empty() && rng.gen_bool(0.5) {
        let k = rng.gen_range(0..orders.len());
        orders[k] *= c;
    } else {
        orders.push(c);
    }
    let target = FgGroup::from_cyclic_orders(orders);
    for _ in 0..64 {
        let data: Vec<BigInt> = (0..target.ngens() * g.ngens())
            .map(|idx| {
                let r = idx / g.ngens().max(1);
                BigInt::from(rng.gen_range(0..target.torsion()[r].to_u64().unwrap()))
            })
            .collect();
        let m = IntMatrix::from_vec(target.ngens(), g.ngens(), data).ok()?;
        if let Ok(f) = FgHom::new(g.clone(), target.clone(), m) {
            if f.is_injective() {
                return Some(f);
            }
        }
    }
    None
}

fn random_tower(rng: &mut impl Rng, max_order: u64) -> DirectTower {
    let first = random_group(rng, max_order);
    if rng.gen_bool(0.4) {
        return DirectTower::stable(first);
    }
    let mut stages = vec![first];
    let mut maps = Vec::new();
    while stages.len() < 3 {
        match random_embedding(rng, stages.last().unwrap(), max_order) {
            Some(f) => {
                stages.push(f.target().clone());
                maps.push(f);
            }
            None => break,
        }
        if rng.gen_bool(0.5) {
            break;
        }
    }
    DirectTower::explicit(stages, maps).expect("random maps are injective")
}

/// Size of the largest group the finite checker enumerates for `data`.
pub fn finite_model_size(data: &KTheoryData) -> Option<u64> {
    let last = data.ka.iter().map(|t| t.stable_from()).max()??;
    let mut worst = 1u64;
    for n in 0..2 {
        let mut size = 1u64;
        for j in 0..2 {
            let g = data.ka[j].stage(last);
            let h = data.hom_target(j, n).as_fg()?;
            let e = data.ext_target(j, n).as_fg()?;
            size = size.checked_mul(crate::fg::hom_group(&g, &h).0.order_u64()?)?;
            size = size.checked_mul(crate::fg::ext_group(&g, &e).order_u64()?)?;
        }
        worst = worst.max(size);
    }
    Some(worst)
}

/// Random finite K-theory data: stable or explicit towers and coefficient
/// groups of order at most `max_order`, with `|KK_n| ≤ max_kk`.
pub fn random_finite_data(rng: &mut impl Rng, max_order: u64, max_kk: u64) -> KTheoryData {
    loop {
        let data = KTheoryData::new(
            random_tower(rng, max_order),
            random_tower(rng, max_order),
            GroupExpr::from_fg(&random_group(rng, max_order)),
            GroupExpr::from_fg(&random_group(rng, max_order)),
        );
        if finite_model_size(&data).is_some_and(|s| s <= max_kk) {
            return data;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn data(ka0: DirectTower, kb0: &str) -> KTheoryData {
        KTheoryData::new(
            ka0,
            DirectTower::stable(FgGroup::trivial()),
            kb0.parse().unwrap(),
            GroupExpr::zero(),
        )
    }

    #[test]
    fn cyclic_four() {
        let d = data(DirectTower::stable(FgGroup::cyclic(4)), "Z/4");
        for n in 0..2 {
            let r = finite_model_check(&d, n).unwrap();
            assert!(r.passed, "{:?}", r.checks);
            assert_eq!(r.groups.kk.order_u64(), Some(4));
            assert_eq!(r.compatible_pairs, r.groups.ext.order_u64().unwrap());
        }
    }

    #[test]
    fn zero_data() {
        let d = data(DirectTower::stable(FgGroup::trivial()), "0");
        let r = finite_model_check(&d, 0).unwrap();
        assert!(r.passed);
        assert_eq!(r.compatible_pairs, 1);
    }

    #[test]
    fn explicit_tower_has_a_nontrivial_limit_coordinate() {
        let f = FgHom::new(FgGroup::cyclic(2), FgGroup::cyclic(4), IntMatrix::from_rows(&[[2]])).unwrap();
        let t = DirectTower::explicit(vec![FgGroup::cyclic(2), FgGroup::cyclic(4)], vec![f]).unwrap();
        let d = data(t, "Z/4");
        let r = finite_model_check(&d, 1).unwrap();
        assert!(r.passed, "{:?}", r.checks);
        assert_eq!(r.groups.ext, FgGroup::cyclic(4));
        assert_eq!(r.groups.lim_ext, FgGroup::cyclic(4));
    }

    #[test]
    fn broken_maps_are_caught() {
        let d = data(DirectTower::stable(FgGroup::cyclic(2)), "Z/2");
        let mut r = finite_model_check(&d, 1).unwrap();
        r.maps.phi = FgHom::zero(r.maps.phi.source(), r.maps.phi.target());
        let t = |f: &FgHom| Table::of(f).unwrap();
        let c = short_exact("left_column", &t(&r.maps.psi), &t(&r.maps.phi));
        assert!(!c.passed && c.counterexample.is_some());
    }

    #[test]
    fn random_instances() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let (mut deep, mut big) = (0, 0);
        for _ in 0..20 {
            let d = random_finite_data(&mut rng, 32, 4096);
            for n in 0..2 {
                let r = finite_model_check(&d, n).unwrap();
                assert!(r.passed, "{d:?} {:?}", r.checks);
                deep += usize::from(r.stages > 2);
                big += usize::from(r.compatible_pairs > 4);
            }
        }
        assert!(deep > 0 && big > 0, "{deep} {big}");
    }
}
