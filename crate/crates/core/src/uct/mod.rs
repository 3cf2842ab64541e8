//! KK-filtration diagrams: the split UCT, the Milnor and Jensen sequences,
//! fine structure, splitting obstructions and finite-model verification.

mod diagram;
mod finite;
mod kk;
mod value;

pub use diagram::{
    jensen_obstruction, kk_filtration_diagram, milnor_obstruction, topology_report, DiagramGroups, DiagramMaps,
    DiagramReport, Exactness, MapDescriptor, NodeStatus, ObstructionReport, ObstructionVerdict, RuleFact,
    TopologyReport,
};
pub use finite::{
    finite_model_check, finite_model_size, random_finite_data, FiniteCheck, FiniteGroups, FiniteMaps,
    FiniteModelReport, ENUMERATION_LIMIT,
};
pub use kk::{
    fine_structure, kk_group, kl_group, lim1_gamma_check, nonsplit_pattern, stage_kk, ExtComponent, FineStructure,
    GammaDegree, GammaReport, KTheoryData, KkGroup, RoosCheck, RoosStatus, NONSPLIT_RULE,
};
pub use value::{ExtensionDescriptor, GroupValue, Split, Value};
