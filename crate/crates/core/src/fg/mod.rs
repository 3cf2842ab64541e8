//! Finitely generated abelian groups: normal forms, homomorphisms, subgroup
//! arithmetic and the Hom/Ext bifunctors.

mod functor;
mod group;
mod lattice;
mod matrix;
mod sequence;
mod snf;
mod subgroup;

pub use functor::{
    ext_group, ext_induced_co, ext_induced_contra, hom_group, hom_induced, hom_induced_co, ExtGroup,
    HomGroup,
};
pub use group::{fg_from_presentation, present, FgGroup, FgHom, Presentation};
pub use lattice::{integer_kernel, solve_integer};
pub use matrix::IntMatrix;
pub use sequence::{
    purity_check, six_term_check, ExplicitExtension, NodeCheck, PurityReport, ShortExactSequence,
    SixTermReport,
};
pub use snf::{smith_normal_form, Snf};
pub use subgroup::{image_subgroup, kernel_subgroup, subgroup_equal, subgroup_quotient, Subgroup};

pub(crate) use matrix::serialize_bigint;
