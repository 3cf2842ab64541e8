use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::group::{present, FgGroup, FgHom, Presentation};
use super::lattice::{integer_kernel, kernel_with, solve_with};
use super::matrix::IntMatrix;
use super::snf::smith_normal_form;
use crate::error::{Error, Result};

/// Subgroup of a canonical group, generated by the columns of `generators`.
#[derive(Clone, PartialEq, Eq, serde::Serialize)]
pub struct Subgroup {
    ambient: FgGroup,
    generators: IntMatrix,
}

impl Subgroup {
    pub fn new(ambient: FgGroup, generators: IntMatrix) -> Result<Self> {
        if generators.rows() != ambient.ngens() {
            return Err(Error::Shape(format!(
                "generators have {} coordinates, ambient {ambient} has {}",
                generators.rows(),
                ambient.ngens()
            )));
        }
        Ok(Subgroup {
            ambient,
            generators,
        })
    }

    pub fn trivial(ambient: &FgGroup) -> Self {
        Subgroup {
            ambient: ambient.clone(),
            generators: IntMatrix::zeros(ambient.ngens(), 0),
        }
    }

    pub fn whole(ambient: &FgGroup) -> Self {
        Subgroup {
            ambient: ambient.clone(),
            generators: IntMatrix::identity(ambient.ngens()),
        }
    }

    pub fn from_elements(ambient: &FgGroup, elems: &[Vec<BigInt>]) -> Self {
        Subgroup {
            ambient: ambient.clone(),
            generators: IntMatrix::from_columns(ambient.ngens(), elems),
        }
    }

    pub fn ambient(&self) -> &FgGroup {
        &self.ambient
    }

    pub fn generators(&self) -> &IntMatrix {
        &self.generators
    }

    /// `[generators | ambient relations]`.
    fn spanning(&self) -> IntMatrix {
        self.generators.hconcat(&self.ambient.relation_matrix())
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        let a = self.spanning();
        solve_with(&smith_normal_form(&a), a.cols(), x).is_some()
    }

    /// Coefficients expressing `x` in the generators, if `x` lies in the
    /// subgroup.
    pub fn express(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        let a = self.spanning();
        solve_with(&smith_normal_form(&a), a.cols(), x).map(|y| y[..self.generators.cols()].to_vec())
    }

    fn check_ambient(&self, other: &Subgroup) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch(format!(
                "{} vs {}",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }

    pub fn contains_subgroup(&self, other: &Subgroup) -> Result<bool> {
        self.check_ambient(other)?;
        let a = self.spanning();
        let f = smith_normal_form(&a);
        Ok(other
            .generators
            .columns()
            .iter()
            .all(|c| solve_with(&f, a.cols(), c).is_some()))
    }

    pub fn equals(&self, other: &Subgroup) -> Result<bool> {
        Ok(self.contains_subgroup(other)? && other.contains_subgroup(self)?)
    }

    pub fn is_trivial(&self) -> bool {
        self.generators
            .columns()
            .iter()
            .all(|c| self.ambient.is_zero_element(c))
    }

    pub fn is_whole(&self) -> bool {
        self.contains_subgroup(&Subgroup::whole(&self.ambient))
            .expect("same ambient")
    }

    /// The subgroup as an abstract group, with coordinates relative to the
    /// generator columns.
    pub fn structure_presentation(&self) -> Presentation {
        let k = self.generators.cols();
        let ker = integer_kernel(&self.spanning());
        let rel = ker.select_rows(&(0..k).collect::<Vec<_>>()).transpose();
        present(&rel)
    }

    pub fn structure(&self) -> FgGroup {
        self.structure_presentation().group
    }

    pub fn order(&self) -> Option<BigInt> {
        self.structure().order()
    }

    /// Index `[ambient : self]`, `None` when infinite.
    pub fn index(&self) -> Option<BigInt> {
        self.quotient().order()
    }

    pub fn quotient_presentation(&self) -> Presentation {
        present(&self.spanning().transpose())
    }

    pub fn quotient(&self) -> FgGroup {
        self.quotient_presentation().group
    }

    /// Projection `ambient → ambient / self`.
    pub fn projection(&self) -> FgHom {
        let p = self.quotient_presentation();
        FgHom::new_unchecked(self.ambient.clone(), p.group.clone(), p.to_canon)
    }

    pub fn sum(&self, other: &Subgroup) -> Result<Subgroup> {
        self.check_ambient(other)?;
        Ok(Subgroup {
            ambient: self.ambient.clone(),
            generators: self.generators.hconcat(&other.generators),
        })
    }

    pub fn intersection(&self, other: &Subgroup) -> Result<Subgroup> {
        self.check_ambient(other)?;
        let a = &self.generators;
        let b = other.generators.scale(&BigInt::from(-1));
        let m = a.hconcat(&b).hconcat(&self.ambient.relation_matrix());
        let ker = kernel_with(&smith_normal_form(&m));
        let coeff = ker.select_rows(&(0..a.cols()).collect::<Vec<_>>());
        Ok(Subgroup {
            ambient: self.ambient.clone(),
            generators: a.mul(&coeff),
        })
    }

    /// `n · self`.
    pub fn scaled(&self, n: &BigInt) -> Subgroup {
        Subgroup {
            ambient: self.ambient.clone(),
            generators: self.generators.scale(n),
        }
    }

    /// Image under a homomorphism out of the ambient group.
    pub fn image_under(&self, f: &FgHom) -> Result<Subgroup> {
        if f.source() != &self.ambient {
            return Err(Error::AmbientMismatch(format!(
                "map from {} applied to a subgroup of {}",
                f.source(),
                self.ambient
            )));
        }
        Ok(Subgroup {
            ambient: f.target().clone(),
            generators: f.matrix().mul(&self.generators),
        })
    }

    /// Same subgroup, generated by images of a canonical basis of its
    /// structure.
    pub fn simplified(&self) -> Subgroup {
        let pres = self.structure_presentation();
        let cols: Vec<Vec<BigInt>> = self
            .generators
            .mul(&pres.from_canon)
            .columns()
            .into_iter()
            .map(|c| self.ambient.reduce(&c))
            .collect();
        Subgroup {
            ambient: self.ambient.clone(),
            generators: IntMatrix::from_columns(self.ambient.ngens(), &cols),
        }
    }

    /// Generators reduced to canonical coordinates, zero columns dropped.
    pub fn reduced_generators(&self) -> Vec<Vec<BigInt>> {
        self.generators
            .columns()
            .into_iter()
            .map(|c| self.ambient.reduce(&c))
            .filter(|c| c.iter().any(|x| !x.is_zero()))
            .collect()
    }
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}> in {}", self.generators, self.ambient)
    }
}

pub fn image_subgroup(f: &FgHom) -> Subgroup {
    Subgroup {
        ambient: f.target().clone(),
        generators: f.matrix().clone(),
    }
}

pub fn kernel_subgroup(f: &FgHom) -> Subgroup {
    let n = f.source().ngens();
    let m = f.matrix().hconcat(&f.target().relation_matrix());
    let ker = integer_kernel(&m);
    Subgroup {
        ambient: f.source().clone(),
        generators: ker.select_rows(&(0..n).collect::<Vec<_>>()),
    }
}

pub fn subgroup_equal(a: &Subgroup, b: &Subgroup) -> Result<bool> {
    a.equals(b)
}

pub fn subgroup_quotient(ambient: &FgGroup, sub: &Subgroup) -> Result<FgGroup> {
    if sub.ambient() != ambient {
        return Err(Error::AmbientMismatch(format!(
            "subgroup of {} used as a subgroup of {ambient}",
            sub.ambient()
        )));
    }
    Ok(sub.quotient())
}

/// Unit vector helper used throughout the crate.
pub(crate) fn unit(n: usize, i: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); n];
    v[i] = BigInt::one();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn image_of_doubling_on_z() {
        let z = FgGroup::free(1);
        let f = FgHom::scalar(&z, 2);
        let im = image_subgroup(&f);
        assert_eq!(im.quotient(), FgGroup::cyclic(2));
        let g = FgHom::scalar(&z, -2);
        assert!(subgroup_equal(&im, &image_subgroup(&g)).unwrap());
    }

    #[test]
    fn kernel_of_doubling_on_z4() {
        let g = FgGroup::cyclic(4);
        let k = kernel_subgroup(&FgHom::scalar(&g, 2));
        assert_eq!(k.structure(), FgGroup::cyclic(2));
        let elems: Vec<_> = g.elements().into_iter().filter(|x| k.contains(x)).collect();
        assert_eq!(elems, vec![vec![BigInt::from(0)], vec![BigInt::from(2)]]);
    }

    #[test]
    fn intersection_in_z() {
        let z = FgGroup::free(1);
        let a = image_subgroup(&FgHom::scalar(&z, 4));
        let b = image_subgroup(&FgHom::scalar(&z, 6));
        let c = a.intersection(&b).unwrap();
        assert!(c.equals(&image_subgroup(&FgHom::scalar(&z, 12))).unwrap());
    }

    #[test]
    fn ambient_mismatch_is_an_error() {
        let a = Subgroup::whole(&FgGroup::cyclic(2));
        let b = Subgroup::whole(&FgGroup::cyclic(3));
        assert!(matches!(a.equals(&b), Err(Error::AmbientMismatch(_))));
    }
}
