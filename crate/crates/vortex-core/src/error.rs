use alloc::string::String;
use thiserror::Error;

/// Failures raised by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("lattice dimension {0} is outside 2..=4")]
    Dimension(usize),
    #[error("side length along axis {axis} must be at least 1")]
    EmptySide { axis: usize },
    #[error("edge {0} lies on the lattice boundary and has fewer than 2(d-1) plaquettes")]
    BoundaryEdge(usize),
    #[error("loop does not fit inside the lattice")]
    LoopOutOfRange,
    #[error("path is not contiguous at step {0}")]
    Discontiguous(usize),
    #[error("path is not closed")]
    OpenPath,
    #[error("spanning tree: {0}")]
    SpanningTree(&'static str),
    #[error("group table: {0}")]
    GroupTable(String),
    #[error("representation: {what} violated by {err:e}")]
    Representation { what: &'static str, err: f64 },
    #[error("Z_{order} does not contain the scalar subgroup")]
    HiggsQuotient { order: usize },
    #[error("model: {0}")]
    Model(String),
    #[error("{states} states exceed the enumeration budget of {budget}")]
    Budget { states: u128, budget: u128 },
    #[error("region touches the lattice boundary")]
    RegionTouchesBoundary,
    #[error("plaquette set is not a single vortex shape this routine supports")]
    UnsupportedShape,
    #[error("vortex size {k} exceeds the supported limit {max}")]
    EnumerationLimit { k: usize, max: usize },
    #[error("magnetization table: {0}")]
    Magnetization(&'static str),
    #[error("statistics: {0}")]
    Statistics(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
