//! Direct and inverse towers of abelian groups, Mittag-Leffler analysis,
//! `lim`, `lim¹` and `Pext`.

mod analysis;
mod certificate;
mod direct;
mod inverse;
mod parse;
mod pext;

pub use analysis::{
    lim1, lim_group, ml_status, Lim1Result, Lim1Verdict, LimValue, ProDescriptor, ValueHint, DEFAULT_WINDOW,
};
pub use certificate::{Certificate, DescentEvidence, MemberWitness, MlEvidence};
pub use direct::{colimit_group, DirectKind, DirectTower};
pub use inverse::{
    apply_ext, apply_hom, image_chain, Copies, FgInverse, FgSource, ImageChain, InverseTower, Maker, Part, Tail,
};
pub use parse::parse_tower;
pub use pext::{
    jensen_kernel_profile, pext, pext_rule, pext_rules, zadic_closure_check, KernelDescriptor, PextResult,
    RuleVerdict, ZadicReport,
};
