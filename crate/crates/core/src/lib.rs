//! Exact computation of Hom, Ext, Pext, lim and lim¹ for abelian groups, and
//! assembly of KK-filtration diagrams from graded K-theory data.

pub mod error;
pub mod expr;
pub mod fg;
pub mod num;
pub mod tower;
pub mod uct;

pub use error::{Error, Result};
pub use expr::{GroupExpr, InvariantProfile};
pub use fg::{FgGroup, FgHom, IntMatrix, Subgroup};
pub use tower::{DirectTower, InverseTower};
pub use uct::{GroupValue, KTheoryData};
