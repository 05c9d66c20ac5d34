#![no_std]
#![doc = include_str!("../README.md")]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod animals;
pub mod budget;
pub mod charges;
pub mod dsu;
pub mod error;
pub mod group;
pub mod knots;
pub mod lattice;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod paths;
pub mod percolation;
pub mod predictor;
pub mod sampler;
pub mod stats;
pub mod support;
pub mod tree;

pub use budget::{theorem_budgets, BudgetInputs, ErrorBudget};
pub use error::{Error, Result};
pub use group::{make_group, FiniteGroup, GroupKind, HiggsGroup, Phase, RepChoice, UnitaryRep};
pub use lattice::{Lattice, OrientedEdge};
pub use linalg::{CMatrix, C64};
pub use model::{GaugeHiggsField, KnField, Model, ModelKind};
pub use paths::LoopPath;
pub use support::{PlaquetteSet, SupportKind, VortexClass};
pub use tree::{gauge_fix, undo_gauge_fix, SpanningTree};
