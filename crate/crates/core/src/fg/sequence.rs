use num_bigint::BigInt;
use serde::Serialize;

use super::functor::{ext_induced_co, hom_induced_co, ExtGroup, HomGroup};
use super::group::{FgGroup, FgHom};
use super::lattice::solve_integer;
use super::matrix::IntMatrix;
use super::subgroup::{image_subgroup, kernel_subgroup, unit, Subgroup};
use crate::error::{Error, Result};

/// `0 → H' →ι H →π H'' → 0`.
#[derive(Clone, Debug)]
pub struct ShortExactSequence {
    pub iota: FgHom,
    pub pi: FgHom,
}

impl ShortExactSequence {
    pub fn new(iota: FgHom, pi: FgHom) -> Result<Self> {
        if iota.target() != pi.source() {
            return Err(Error::Shape("maps are not composable".into()));
        }
        if !iota.is_injective() {
            return Err(not_exact("H'", "inclusion is not injective"));
        }
        if !pi.is_surjective() {
            return Err(not_exact("H''", "projection is not surjective"));
        }
        if !image_subgroup(&iota).equals(&kernel_subgroup(&pi))? {
            return Err(not_exact("H", "image of inclusion differs from kernel of projection"));
        }
        Ok(ShortExactSequence { iota, pi })
    }

    pub fn sub(&self) -> &FgGroup {
        self.iota.source()
    }

    pub fn total(&self) -> &FgGroup {
        self.iota.target()
    }

    pub fn quotient(&self) -> &FgGroup {
        self.pi.target()
    }
}

fn not_exact(node: &str, detail: &str) -> Error {
    Error::NotExact {
        node: node.to_string(),
        detail: detail.to_string(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodeCheck {
    pub node: String,
    pub exact: bool,
}

/// The Hom–Ext six-term sequence of a short exact sequence, with maps.
#[derive(Clone, Debug)]
pub struct SixTermReport {
    pub groups: Vec<(String, FgGroup)>,
    pub maps: Vec<(String, FgHom)>,
    pub connecting: FgHom,
    pub nodes: Vec<NodeCheck>,
}

impl SixTermReport {
    pub fn exact(&self) -> bool {
        self.nodes.iter().all(|n| n.exact)
    }
}

/// Preimage of `y` under `f`, if any.
fn preimage(f: &FgHom, y: &[BigInt]) -> Option<Vec<BigInt>> {
    let a = f.matrix().hconcat(&f.target().relation_matrix());
    solve_integer(&a, y).map(|x| f.source().reduce(&x[..f.source().ngens()]))
}

/// Connecting map `Hom(g, H'') → Ext(g, H')`.
fn connecting_map(ses: &ShortExactSequence, g: &FgGroup) -> FgHom {
    let hom = HomGroup::new(g, ses.quotient());
    let ext = ExtGroup::new(g, ses.sub());
    let r = g.rank();
    let n = hom.group().ngens();
    let cols: Vec<Vec<BigInt>> = (0..n)
        .map(|k| {
            let phi = hom.hom_at(&unit(n, k));
            let cocycle: Vec<Vec<BigInt>> = g
                .torsion()
                .iter()
                .enumerate()
                .map(|(i, d)| {
                    let target = phi.matrix().column(r + i);
                    let x = preimage(&ses.pi, &target).expect("projection is onto");
                    let dx: Vec<BigInt> = x.iter().map(|v| v * d).collect();
                    preimage(&ses.iota, &dx).expect("d·x lies in the kernel of the projection")
                })
                .collect();
            ext.coords(&cocycle)
        })
        .collect();
    FgHom::new_unchecked(
        hom.group().clone(),
        ext.group().clone(),
        IntMatrix::from_columns(ext.group().ngens(), &cols),
    )
}

fn exact_at(incoming: &FgHom, outgoing: &FgHom) -> Result<bool> {
    image_subgroup(incoming).equals(&kernel_subgroup(outgoing))
}

/// Builds `0 → Hom(g,H') → Hom(g,H) → Hom(g,H'') → Ext(g,H') → Ext(g,H) →
/// Ext(g,H'') → 0` and checks exactness at each of the six groups.
pub fn six_term_check(ses: &ShortExactSequence, g: &FgGroup) -> Result<SixTermReport> {
    // Revalidate: callers may construct the struct literally.
    let ses = ShortExactSequence::new(ses.iota.clone(), ses.pi.clone())?;
    let a1 = hom_induced_co(g, &ses.iota);
    let a2 = hom_induced_co(g, &ses.pi);
    let delta = connecting_map(&ses, g);
    let b1 = ext_induced_co(g, &ses.iota);
    let b2 = ext_induced_co(g, &ses.pi);
    let zero_in = FgHom::zero(&FgGroup::trivial(), a1.source());
    let zero_out = FgHom::zero(b2.target(), &FgGroup::trivial());
    let nodes = vec![
        NodeCheck {
            node: "Hom(g,H')".into(),
            exact: exact_at(&zero_in, &a1)?,
        },
        NodeCheck {
            node: "Hom(g,H)".into(),
            exact: exact_at(&a1, &a2)?,
        },
        NodeCheck {
            node: "Hom(g,H'')".into(),
            exact: exact_at(&a2, &delta)?,
        },
        NodeCheck {
            node: "Ext(g,H')".into(),
            exact: exact_at(&delta, &b1)?,
        },
        NodeCheck {
            node: "Ext(g,H)".into(),
            exact: exact_at(&b1, &b2)?,
        },
        NodeCheck {
            node: "Ext(g,H'')".into(),
            exact: exact_at(&b2, &zero_out)?,
        },
    ];
    let groups = vec![
        ("Hom(g,H')".to_string(), a1.source().clone()),
        ("Hom(g,H)".to_string(), a1.target().clone()),
        ("Hom(g,H'')".to_string(), a2.target().clone()),
        ("Ext(g,H')".to_string(), b1.source().clone()),
        ("Ext(g,H)".to_string(), b1.target().clone()),
        ("Ext(g,H'')".to_string(), b2.target().clone()),
    ];
    let maps = vec![
        ("iota_*".to_string(), a1),
        ("pi_*".to_string(), a2),
        ("iota_* (Ext)".to_string(), b1),
        ("pi_* (Ext)".to_string(), b2),
    ];
    Ok(SixTermReport {
        groups,
        maps,
        connecting: delta,
        nodes,
    })
}

/// An extension `0 → H → E → G → 0` of finitely generated groups.
#[derive(Clone, Debug)]
pub struct ExplicitExtension {
    pub sub: FgGroup,
    pub total: FgGroup,
    pub quotient: FgGroup,
    pub inclusion: FgHom,
    pub projection: FgHom,
}

impl ExplicitExtension {
    pub fn new(inclusion: FgHom, projection: FgHom) -> Result<Self> {
        let ses = ShortExactSequence::new(inclusion, projection)?;
        Ok(ExplicitExtension {
            sub: ses.sub().clone(),
            total: ses.total().clone(),
            quotient: ses.quotient().clone(),
            inclusion: ses.iota,
            projection: ses.pi,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PurityReport {
    /// `(n, H ∩ nE = nH)` for `n = 1..=n_max`.
    pub per_n: Vec<(u64, bool)>,
    pub pure: bool,
}

/// Checks `H ∩ nE = nH` inside `E` for every `n ≤ n_max`.
pub fn purity_check(e: &ExplicitExtension, n_max: u64) -> PurityReport {
    let h_in_e = image_subgroup(&e.inclusion);
    let whole = Subgroup::whole(&e.total);
    let per_n: Vec<(u64, bool)> = (1..=n_max)
        .map(|n| {
            let nb = BigInt::from(n);
            let lhs = h_in_e
                .intersection(&whole.scaled(&nb))
                .expect("same ambient");
            let rhs = h_in_e.scaled(&nb);
            (n, lhs.equals(&rhs).expect("same ambient"))
        })
        .collect();
    let pure = per_n.iter().all(|(_, ok)| *ok);
    PurityReport { per_n, pure }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hom(src: FgGroup, tgt: FgGroup, rows: &[&[i64]]) -> FgHom {
        FgHom::new(src, tgt, IntMatrix::from_rows(rows)).unwrap()
    }

    #[test]
    fn doubling_sequence_has_iso_connecting_map() {
        let z = FgGroup::free(1);
        let z2 = FgGroup::cyclic(2);
        let ses = ShortExactSequence::new(
            hom(z.clone(), z.clone(), &[&[2]]),
            hom(z.clone(), z2.clone(), &[&[1]]),
        )
        .unwrap();
        let rep = six_term_check(&ses, &z2).unwrap();
        assert!(rep.exact());
        assert_eq!(rep.connecting.source(), &z2);
        assert_eq!(rep.connecting.target(), &z2);
        assert!(rep.connecting.is_injective() && rep.connecting.is_surjective());
    }

    #[test]
    fn split_sequence_has_zero_connecting_map() {
        let z2 = FgGroup::cyclic(2);
        let z3 = FgGroup::cyclic(3);
        let z6 = FgGroup::cyclic(6);
        let ses = ShortExactSequence::new(hom(z2.clone(), z6.clone(), &[&[3]]), hom(z6, z3, &[&[1]])).unwrap();
        for g in [FgGroup::cyclic(6), FgGroup::free(1), FgGroup::cyclic(4)] {
            let rep = six_term_check(&ses, &g).unwrap();
            assert!(rep.exact());
            assert!(rep.connecting.is_zero());
        }
    }

    #[test]
    fn z2_z4_z2_sequence() {
        let z2 = FgGroup::cyclic(2);
        let z4 = FgGroup::cyclic(4);
        let ses = ShortExactSequence::new(hom(z2.clone(), z4.clone(), &[&[2]]), hom(z4, z2.clone(), &[&[1]])).unwrap();
        let rep = six_term_check(&ses, &z2).unwrap();
        assert!(rep.exact());
        assert_eq!(rep.groups[1].1.order(), Some(BigInt::from(2)));
        assert_eq!(rep.groups[4].1.order(), Some(BigInt::from(2)));
    }

    #[test]
    fn non_exact_input_rejected() {
        let z2 = FgGroup::cyclic(2);
        let z4 = FgGroup::cyclic(4);
        let r = ShortExactSequence::new(hom(z2.clone(), z4.clone(), &[&[2]]), hom(z4, z2, &[&[0]]));
        assert!(matches!(r, Err(Error::NotExact { .. })));
    }

    #[test]
    fn purity_examples() {
        let z = FgGroup::free(1);
        let e = ExplicitExtension::new(
            hom(z.clone(), z.clone(), &[&[2]]),
            hom(z.clone(), FgGroup::cyclic(2), &[&[1]]),
        )
        .unwrap();
        let rep = purity_check(&e, 4);
        assert!(!rep.pure);
        assert_eq!(rep.per_n[1], (2, false));

        let total = FgGroup::from_cyclic_orders([2, 4]);
        let e = ExplicitExtension::new(
            hom(FgGroup::cyclic(2), total.clone(), &[&[1], &[0]]),
            hom(total, FgGroup::cyclic(4), &[&[0, 1]]),
        )
        .unwrap();
        assert!(purity_check(&e, 8).pure);
    }
}
