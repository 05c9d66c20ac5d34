//! Charge structure outside a support, and external boundaries of vertex regions.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::model::GaugeHiggsField;
use crate::support::PlaquetteSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChargeViolation {
    /// Two vertices of one complement component carry different charges.
    Mixed { a: usize, b: usize },
    /// A support vertex next to a complement component carries another charge.
    Border { inside: usize, outside: usize },
    /// An edge outside the support's edge set carries a nontrivial gauge element.
    Gauge { edge: usize },
}

/// Checks that every connected component of the vertices off `V(P)` carries
/// one charge, shared by the support vertices next to it, and that edges
/// touching the complement carry the identity.
pub fn validate_monochrome(lat: &Lattice, field: &GaugeHiggsField, supp: &PlaquetteSet) -> Vec<ChargeViolation> {
    let nv = lat.num_vertices();
    let mut comp = vec![usize::MAX; nv];
    let mut charge = Vec::new();
    let mut out = Vec::new();
    for s in 0..nv {
        if comp[s] != usize::MAX || supp.contains_vertex(s) {
            continue;
        }
        let id = charge.len();
        charge.push(field.phi[s]);
        comp[s] = id;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &e in lat.incident_edges(v) {
                let (x, y) = lat.endpoints(e);
                let w = if x == v { y } else { x };
                if field.sigma[e] != 0 {
                    out.push(ChargeViolation::Gauge { edge: e });
                }
                if supp.contains_vertex(w) {
                    if field.phi[w] != field.phi[s] {
                        out.push(ChargeViolation::Border { inside: w, outside: v });
                    }
                } else if comp[w] == usize::MAX {
                    comp[w] = id;
                    if field.phi[w] != field.phi[s] {
                        out.push(ChargeViolation::Mixed { a: s, b: w });
                    }
                    queue.push_back(w);
                }
            }
        }
    }
    out.sort_by_key(|v| match *v {
        ChargeViolation::Mixed { a, b } => (0, a, b),
        ChargeViolation::Border { inside, outside } => (1, inside, outside),
        ChargeViolation::Gauge { edge } => (2, edge, 0),
    });
    out.dedup();
    out
}

#[derive(Clone, Debug)]
pub struct ExternalBoundary {
    /// The component of the complement containing the lattice boundary.
    pub outer: Vec<usize>,
    /// Edges joining `outer` to the region.
    pub edges: Vec<usize>,
    /// Plaquettes containing one of those edges.
    pub plaquettes: PlaquetteSet,
}

/// External boundary of a vertex region that stays off the lattice boundary.
pub fn external_boundary(lat: &Lattice, region: &[usize]) -> Result<ExternalBoundary> {
    let nv = lat.num_vertices();
    let mut in_region = vec![false; nv];
    for &v in region {
        if lat.is_boundary_vertex(v) {
            return Err(Error::RegionTouchesBoundary);
        }
        in_region[v] = true;
    }
    let mut outer = vec![false; nv];
    let mut queue: VecDeque<usize> = (0..nv).filter(|&v| lat.is_boundary_vertex(v)).collect();
    for &v in &queue {
        outer[v] = true;
    }
    let mut edges = Vec::new();
    while let Some(v) = queue.pop_front() {
        for &e in lat.incident_edges(v) {
            let (x, y) = lat.endpoints(e);
            let w = if x == v { y } else { x };
            if in_region[w] {
                edges.push(e);
            } else if !outer[w] {
                outer[w] = true;
                queue.push_back(w);
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let plaquettes = PlaquetteSet::new(lat, edges.iter().flat_map(|&e| lat.edge_plaquettes(e).iter().copied()));
    Ok(ExternalBoundary { outer: (0..nv).filter(|&v| outer[v]).collect(), edges, plaquettes })
}
