use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::lattice::solve_integer;
use super::matrix::IntMatrix;
use super::snf::smith_normal_form;
use crate::error::{Error, Result};

/// `Z^rank ⊕ Z/d_1 ⊕ ... ⊕ Z/d_k` with `d_1 | ... | d_k`, every `d_j ≥ 2`.
///
/// Elements are coordinate vectors: free coordinates first, then torsion
/// coordinates in increasing invariant-factor order. Torsion coordinates are
/// kept reduced into `0..d_j`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FgGroup {
    rank: usize,
    #[serde(with = "crate::num::serde_big_vec")]
    torsion: Vec<BigInt>,
}

impl FgGroup {
    pub fn new(rank: usize, torsion: Vec<BigInt>) -> Result<Self> {
        for d in &torsion {
            if d < &BigInt::from(2) {
                return Err(Error::InvalidExpr(format!("invariant factor {d} < 2")));
            }
        }
        for w in torsion.windows(2) {
            if !w[1].is_multiple_of(&w[0]) {
                return Err(Error::InvalidExpr(format!(
                    "invariant factors {} and {} violate divisibility",
                    w[0], w[1]
                )));
            }
        }
        Ok(FgGroup { rank, torsion })
    }

    pub fn trivial() -> Self {
        FgGroup {
            rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        FgGroup {
            rank,
            torsion: Vec::new(),
        }
    }

    pub fn cyclic(d: impl Into<BigInt>) -> Self {
        let d: BigInt = d.into();
        let d = d.abs();
        if d.is_zero() {
            Self::free(1)
        } else if d.is_one() {
            Self::trivial()
        } else {
            FgGroup {
                rank: 0,
                torsion: vec![d],
            }
        }
    }

    /// Canonical form of a direct sum of cyclic groups with the given orders
    /// (order 0 meaning `Z`).
    pub fn from_cyclic_orders<I, T>(orders: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        let orders: Vec<BigInt> = orders.into_iter().map(Into::into).collect();
        let n = orders.len();
        let rel = IntMatrix::diagonal(n, n, &orders);
        fg_from_presentation(&rel)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn ngens(&self) -> usize {
        self.rank + self.torsion.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.ngens() == 0
    }

    pub fn is_finite(&self) -> bool {
        self.rank == 0
    }

    /// Order of generator `j`, `None` for a free generator.
    pub fn gen_order(&self, j: usize) -> Option<&BigInt> {
        j.checked_sub(self.rank).map(|t| &self.torsion[t])
    }

    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.torsion.iter().product())
    }

    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }

    /// Exponent of a finite group (1 for the trivial group).
    pub fn exponent(&self) -> Option<BigInt> {
        self.is_finite()
            .then(|| self.torsion.last().cloned().unwrap_or_else(BigInt::one))
    }

    pub fn order_u64(&self) -> Option<u64> {
        self.order().and_then(|o| o.to_u64())
    }

    /// Reduces torsion coordinates into canonical range.
    pub fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.ngens(), "element has wrong length");
        v.iter()
            .enumerate()
            .map(|(j, x)| match self.gen_order(j) {
                Some(d) => x.mod_floor(d),
                None => x.clone(),
            })
            .collect()
    }

    pub fn is_zero_element(&self, v: &[BigInt]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    pub fn zero_element(&self) -> Vec<BigInt> {
        vec![BigInt::zero(); self.ngens()]
    }

    /// Relations as columns: `d_j · e_{rank+j}`.
    pub fn relation_matrix(&self) -> IntMatrix {
        let n = self.ngens();
        let mut m = IntMatrix::zeros(n, self.torsion.len());
        for (j, d) in self.torsion.iter().enumerate() {
            m[(self.rank + j, j)] = d.clone();
        }
        m
    }

    /// Order of an element, `None` when it has infinite order.
    pub fn element_order(&self, v: &[BigInt]) -> Option<BigInt> {
        let v = self.reduce(v);
        if v[..self.rank].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let mut ord = BigInt::one();
        for (x, d) in v[self.rank..].iter().zip(&self.torsion) {
            ord = ord.lcm(&(d / x.gcd(d)));
        }
        Some(ord)
    }

    pub fn direct_sum(&self, other: &FgGroup) -> FgGroup {
        Self::direct_sum_all(&[self.clone(), other.clone()]).group
    }

    /// Canonical form of `⊕ groups`, with maps from and to the concatenated
    /// coordinates.
    pub fn direct_sum_all(groups: &[FgGroup]) -> Presentation {
        let n: usize = groups.iter().map(FgGroup::ngens).sum();
        let mut data = Vec::new();
        let mut nrows = 0;
        let mut offset = 0;
        for g in groups {
            for (j, d) in g.torsion.iter().enumerate() {
                let mut row = vec![BigInt::zero(); n];
                row[offset + g.rank + j] = d.clone();
                data.extend(row);
                nrows += 1;
            }
            offset += g.ngens();
        }
        present(&IntMatrix::from_vec(nrows, n, data).expect("relation shape"))
    }

    /// All elements of a finite group, in mixed-radix order.
    pub fn elements(&self) -> Vec<Vec<BigInt>> {
        assert!(self.is_finite(), "element enumeration of an infinite group");
        let mut out = vec![Vec::new()];
        for d in &self.torsion {
            let d = d.to_u64().expect("enumeration of a huge group");
            let mut next = Vec::with_capacity(out.len() * d as usize);
            for v in &out {
                for x in 0..d {
                    let mut w = v.clone();
                    w.push(BigInt::from(x));
                    next.push(w);
                }
            }
            out = next;
        }
        out
    }
}

impl fmt::Debug for FgGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Renders in the expression grammar: `0`, `Z^2`, `Sum(Z, Z/2, Z/6)`.
impl fmt::Display for FgGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        match parts.len() {
            0 => write!(f, "0"),
            1 => write!(f, "{}", parts[0]),
            _ => write!(f, "Sum({})", parts.join(", ")),
        }
    }
}

/// A canonical group together with the change of coordinates from the
/// generators of a presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub group: FgGroup,
    /// `ngens(group) × n`: image of each presentation generator.
    pub to_canon: IntMatrix,
    /// `n × ngens(group)`: a preimage of each canonical generator.
    pub from_canon: IntMatrix,
}

impl Presentation {
    pub fn to_canonical(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.group.reduce(&self.to_canon.mul_vec(v))
    }

    pub fn from_canonical(&self, w: &[BigInt]) -> Vec<BigInt> {
        self.from_canon.mul_vec(w)
    }
}

/// Canonical form of the group with `n = relations.cols()` generators and one
/// relation per row, together with coordinate changes.
pub fn present(relations: &IntMatrix) -> Presentation {
    let n = relations.cols();
    let f = smith_normal_form(&relations.transpose());
    let diag = f.diagonal();
    let r = diag.len();
    let mut free_rows: Vec<usize> = (r..n).collect();
    let mut torsion_rows = Vec::new();
    let mut torsion = Vec::new();
    for (i, d) in diag.iter().enumerate() {
        if !d.is_one() {
            torsion_rows.push(i);
            torsion.push(d.clone());
        }
    }
    let group = FgGroup {
        rank: free_rows.len(),
        torsion,
    };
    let mut sel = std::mem::take(&mut free_rows);
    sel.extend(torsion_rows);
    let mut to_canon = f.u.select_rows(&sel);
    for i in group.rank..group.ngens() {
        let d = &group.torsion[i - group.rank];
        for j in 0..n {
            to_canon[(i, j)] = to_canon[(i, j)].mod_floor(d);
        }
    }
    let from_canon = f.u_inv.select_columns(&sel);
    Presentation {
        group,
        to_canon,
        from_canon,
    }
}

/// Canonical form of the cokernel of `relations` (one relation per row).
pub fn fg_from_presentation(relations: &IntMatrix) -> FgGroup {
    present(relations).group
}

/// A homomorphism of canonical groups; column `j` of `matrix` is the image of
/// source generator `j`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FgHom {
    source: FgGroup,
    target: FgGroup,
    matrix: IntMatrix,
}

impl FgHom {
    pub fn new(source: FgGroup, target: FgGroup, matrix: IntMatrix) -> Result<Self> {
        if matrix.rows() != target.ngens() || matrix.cols() != source.ngens() {
            return Err(Error::Shape(format!(
                "{}x{} matrix for a map {source} -> {target}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        for j in source.rank..source.ngens() {
            let d = source.gen_order(j).unwrap();
            let img: Vec<BigInt> = matrix.column(j).iter().map(|x| x * d).collect();
            if !target.is_zero_element(&img) {
                return Err(Error::IllDefined(format!(
                    "generator {j} has order {d} but its image does not"
                )));
            }
        }
        Ok(Self::new_unchecked(source, target, matrix))
    }

    pub(crate) fn new_unchecked(source: FgGroup, target: FgGroup, mut matrix: IntMatrix) -> Self {
        for i in target.rank..target.ngens() {
            let e = &target.torsion[i - target.rank];
            for j in 0..matrix.cols() {
                matrix[(i, j)] = matrix[(i, j)].mod_floor(e);
            }
        }
        FgHom {
            source,
            target,
            matrix,
        }
    }

    pub fn identity(g: &FgGroup) -> Self {
        Self::new_unchecked(g.clone(), g.clone(), IntMatrix::identity(g.ngens()))
    }

    pub fn zero(source: &FgGroup, target: &FgGroup) -> Self {
        FgHom {
            source: source.clone(),
            target: target.clone(),
            matrix: IntMatrix::zeros(target.ngens(), source.ngens()),
        }
    }

    /// Multiplication by `n` on `g`.
    pub fn scalar(g: &FgGroup, n: impl Into<BigInt>) -> Self {
        Self::new_unchecked(
            g.clone(),
            g.clone(),
            IntMatrix::identity(g.ngens()).scale(&n.into()),
        )
    }

    pub fn source(&self) -> &FgGroup {
        &self.source
    }

    pub fn target(&self) -> &FgGroup {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.target.reduce(&self.matrix.mul_vec(v))
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &FgHom) -> Result<FgHom> {
        if first.target != self.source {
            return Err(Error::Shape(format!(
                "cannot compose {} -> {} after {} -> {}",
                self.source, self.target, first.source, first.target
            )));
        }
        Ok(Self::new_unchecked(
            first.source.clone(),
            self.target.clone(),
            self.matrix.mul(&first.matrix),
        ))
    }

    pub fn add(&self, other: &FgHom) -> Result<FgHom> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::Shape("sum of homomorphisms with different ends".into()));
        }
        let data = self
            .matrix
            .entries()
            .iter()
            .zip(other.matrix.entries())
            .map(|(a, b)| a + b)
            .collect();
        let m = IntMatrix::from_vec(self.matrix.rows(), self.matrix.cols(), data)?;
        Ok(Self::new_unchecked(self.source.clone(), self.target.clone(), m))
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn is_injective(&self) -> bool {
        super::subgroup::kernel_subgroup(self).is_trivial()
    }

    pub fn is_surjective(&self) -> bool {
        super::subgroup::image_subgroup(self).is_whole()
    }

    /// Inverse of an isomorphism.
    pub fn inverse(&self) -> Result<FgHom> {
        if !(self.is_injective() && self.is_surjective()) {
            return Err(Error::IllDefined("inverse of a non-isomorphism".into()));
        }
        let a = self.matrix.hconcat(&self.target.relation_matrix());
        let n = self.source.ngens();
        let mut cols = Vec::with_capacity(self.target.ngens());
        for i in 0..self.target.ngens() {
            let mut e = vec![BigInt::zero(); self.target.ngens()];
            e[i] = BigInt::one();
            let x = solve_integer(&a, &e)
                .ok_or_else(|| Error::Internal("surjective map without preimage".into()))?;
            cols.push(x[..n].to_vec());
        }
        let m = IntMatrix::from_columns(n, &cols);
        Ok(Self::new_unchecked(self.target.clone(), self.source.clone(), m))
    }
}

impl fmt::Debug for FgHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} by {}", self.source, self.target, self.matrix)
    }
}
