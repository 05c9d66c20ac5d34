//! Closed lattice paths, rectangular loops and their flat spanning surfaces.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::{Lattice, OrientedEdge};

/// A closed, contiguous sequence of oriented edges.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopPath {
    edges: Vec<OrientedEdge>,
    on_loop: Vec<bool>,
}

/// Checks that consecutive oriented edges share endpoints; returns the start
/// and end vertices.
pub fn check_contiguous(lat: &Lattice, path: &[OrientedEdge]) -> Result<(usize, usize)> {
    let Some(first) = path.first() else {
        return Err(Error::Discontiguous(0));
    };
    let start = lat.oriented_endpoints(*first).0;
    let mut at = start;
    for (k, oe) in path.iter().enumerate() {
        let (x, y) = lat.oriented_endpoints(*oe);
        if x != at {
            return Err(Error::Discontiguous(k));
        }
        at = y;
    }
    Ok((start, at))
}

impl LoopPath {
    pub fn new(lat: &Lattice, edges: Vec<OrientedEdge>) -> Result<Self> {
        let (s, t) = check_contiguous(lat, &edges)?;
        if s != t {
            return Err(Error::OpenPath);
        }
        let mut on_loop = alloc::vec![false; lat.num_edges()];
        for oe in &edges {
            on_loop[oe.edge] = true;
        }
        Ok(Self { edges, on_loop })
    }

    /// Rectangle with a corner at `corner`, first running `extent.0` steps up
    /// `axes.0`, then `extent.1` steps up `axes.1`, then back.
    pub fn rectangle(lat: &Lattice, corner: &[usize], axes: (usize, usize), extent: (usize, usize)) -> Result<Self> {
        let (a, b) = axes;
        let d = lat.dim();
        if a == b || a >= d || b >= d || extent.0 == 0 || extent.1 == 0 {
            return Err(Error::LoopOutOfRange);
        }
        let start = lat.vertex(corner).ok_or(Error::LoopOutOfRange)?;
        if corner[a] + extent.0 > lat.dims()[a] || corner[b] + extent.1 > lat.dims()[b] {
            return Err(Error::LoopOutOfRange);
        }
        let mut edges = Vec::with_capacity(2 * (extent.0 + extent.1));
        let mut at = start;
        for (axis, n, up) in [(a, extent.0, true), (b, extent.1, true), (a, extent.0, false), (b, extent.1, false)] {
            for _ in 0..n {
                let next = lat.step(at, axis, up).ok_or(Error::LoopOutOfRange)?;
                edges.push(lat.oriented_between(at, next).expect("adjacent"));
                at = next;
            }
        }
        Self::new(lat, edges)
    }

    pub fn edges(&self) -> &[OrientedEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains_edge(&self, e: usize) -> bool {
        self.on_loop[e]
    }

    /// Plaquettes with at least one boundary edge on the loop.
    pub fn touching_plaquettes(&self, lat: &Lattice) -> Vec<usize> {
        let mut ps: Vec<usize> = self.edges.iter().flat_map(|oe| lat.edge_plaquettes(oe.edge).iter().copied()).collect();
        ps.sort_unstable();
        ps.dedup();
        ps
    }
}

/// Flat surface spanned by a rectangle: plaquettes with orientation signs
/// whose boundary chain equals the loop.
pub fn rectangle_surface(
    lat: &Lattice,
    corner: &[usize],
    axes: (usize, usize),
    extent: (usize, usize),
) -> Result<Vec<(usize, i8)>> {
    let (a, b) = axes;
    let start = lat.vertex(corner).ok_or(Error::LoopOutOfRange)?;
    let sign = if a < b { 1 } else { -1 };
    let mut out = Vec::with_capacity(extent.0 * extent.1);
    let mut row = start;
    for _ in 0..extent.1 {
        let mut v = row;
        for _ in 0..extent.0 {
            out.push((lat.plaquette_id(v, a, b).ok_or(Error::LoopOutOfRange)?, sign));
            v = lat.step(v, a, true).ok_or(Error::LoopOutOfRange)?;
        }
        row = lat.step(row, b, true).ok_or(Error::LoopOutOfRange)?;
    }
    out.sort_unstable();
    Ok(out)
}

/// Boundary 1-chain of a signed plaquette chain, as (edge, coefficient)
/// with zero coefficients dropped.
pub fn chain_boundary(lat: &Lattice, chain: &[(usize, i8)]) -> Vec<(usize, i64)> {
    let mut coef = alloc::collections::BTreeMap::new();
    for &(p, s) in chain {
        for oe in lat.plaquette(p).boundary {
            let c = if oe.forward { s as i64 } else { -(s as i64) };
            *coef.entry(oe.edge).or_insert(0) += c;
        }
    }
    coef.into_iter().filter(|&(_, c)| c != 0).collect()
}

/// The 1-chain of an oriented path.
pub fn path_chain(path: &[OrientedEdge]) -> Vec<(usize, i64)> {
    let mut coef = alloc::collections::BTreeMap::new();
    for oe in path {
        *coef.entry(oe.edge).or_insert(0) += if oe.forward { 1 } else { -1 };
    }
    coef.into_iter().filter(|&(_, c)| c != 0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangle_perimeter_and_surface() {
        let lat = Lattice::new(&[5, 5, 5]).unwrap();
        for (axes, ext) in [((0, 1), (4, 4)), ((2, 0), (3, 1)), ((1, 2), (1, 1))] {
            let lp = LoopPath::rectangle(&lat, &[0, 1, 0], axes, ext).unwrap();
            assert_eq!(lp.len(), 2 * (ext.0 + ext.1));
            let surf = rectangle_surface(&lat, &[0, 1, 0], axes, ext).unwrap();
            assert_eq!(surf.len(), ext.0 * ext.1);
            assert_eq!(chain_boundary(&lat, &surf), path_chain(lp.edges()));
        }
    }

    #[test]
    fn rectangle_outside_is_rejected() {
        let lat = Lattice::new(&[3, 3]).unwrap();
        assert_eq!(LoopPath::rectangle(&lat, &[2, 0], (0, 1), (2, 1)).unwrap_err(), Error::LoopOutOfRange);
    }

    #[test]
    fn open_path_is_rejected() {
        let lat = Lattice::new(&[2, 2]).unwrap();
        let e = OrientedEdge::new(lat.edge_id(0, 0).unwrap(), true);
        assert_eq!(LoopPath::new(&lat, alloc::vec![e]).unwrap_err(), Error::OpenPath);
    }
}
