//! Spanning trees with per-region constraints.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::dsu::UnionFind;
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::lattice::Lattice;

#[derive(Clone, Debug)]
pub struct SpanningTree {
    in_tree: Vec<bool>,
    edges: Vec<usize>,
}

impl SpanningTree {
    /// A spanning tree of the whole lattice that restricts to a spanning
    /// tree on each of the (disjoint) vertex `regions` and uses none of the
    /// `avoid` edges. Edges are scanned in index order, so the result is
    /// deterministic.
    pub fn build(lat: &Lattice, regions: &[Vec<usize>], avoid: &[usize]) -> Result<Self> {
        let nv = lat.num_vertices();
        let mut region_of = vec![usize::MAX; nv];
        for (r, vs) in regions.iter().enumerate() {
            for &v in vs {
                if region_of[v] != usize::MAX {
                    return Err(Error::SpanningTree("regions overlap"));
                }
                region_of[v] = r;
            }
        }
        let mut banned = vec![false; lat.num_edges()];
        for &e in avoid {
            banned[e] = true;
        }
        let mut uf = UnionFind::new(nv);
        let mut in_tree = vec![false; lat.num_edges()];
        let mut edges = Vec::new();
        for e in 0..lat.num_edges() {
            let (x, y) = lat.endpoints(e);
            if !banned[e] && region_of[x] != usize::MAX && region_of[x] == region_of[y] && uf.union(x, y) {
                in_tree[e] = true;
                edges.push(e);
            }
        }
        for vs in regions {
            if let Some(&first) = vs.first() {
                let root = uf.find(first);
                if vs.iter().any(|&v| uf.find(v) != root) {
                    return Err(Error::SpanningTree("region is disconnected by the avoided edges"));
                }
            }
        }
        for e in 0..lat.num_edges() {
            let (x, y) = lat.endpoints(e);
            if !banned[e] && uf.union(x, y) {
                in_tree[e] = true;
                edges.push(e);
            }
        }
        if edges.len() + 1 != nv {
            return Err(Error::SpanningTree("lattice is disconnected by the avoided edges"));
        }
        edges.sort_unstable();
        Ok(Self { in_tree, edges })
    }

    pub fn contains(&self, e: usize) -> bool {
        self.in_tree[e]
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    /// Vertices in breadth-first order from `root`, each with the tree edge
    /// to its parent (`None` for the root).
    pub fn bfs_order(&self, lat: &Lattice, root: usize) -> Vec<(usize, Option<usize>)> {
        let mut seen = vec![false; lat.num_vertices()];
        let mut out = Vec::with_capacity(lat.num_vertices());
        let mut queue = VecDeque::new();
        seen[root] = true;
        queue.push_back((root, None));
        while let Some((v, via)) = queue.pop_front() {
            out.push((v, via));
            for &e in lat.incident_edges(v) {
                if !self.in_tree[e] {
                    continue;
                }
                let (x, y) = lat.endpoints(e);
                let w = if x == v { y } else { x };
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back((w, Some(e)));
                }
            }
        }
        out
    }
}

/// Axial gauge along `tree` rooted at `base`: returns `(fixed, eta)` with
/// `fixed_e = eta_x sigma_e eta_y^{-1}` for `e = (x, y)`, `eta_base = 1`, and
/// the identity on every tree edge.
pub fn gauge_fix(lat: &Lattice, group: &FiniteGroup, sigma: &[usize], tree: &SpanningTree, base: usize) -> (Vec<usize>, Vec<usize>) {
    let mut eta = vec![0; lat.num_vertices()];
    for (v, via) in tree.bfs_order(lat, base) {
        if let Some(e) = via {
            let (x, y) = lat.endpoints(e);
            eta[v] = if v == y { group.mul(eta[x], sigma[e]) } else { group.mul(eta[y], group.inv(sigma[e])) };
        }
    }
    (apply_gauge(lat, group, sigma, &eta), eta)
}

/// `sigma_e -> eta_x sigma_e eta_y^{-1}`.
pub fn apply_gauge(lat: &Lattice, group: &FiniteGroup, sigma: &[usize], eta: &[usize]) -> Vec<usize> {
    (0..lat.num_edges())
        .map(|e| {
            let (x, y) = lat.endpoints(e);
            group.mul(group.mul(eta[x], sigma[e]), group.inv(eta[y]))
        })
        .collect()
}

/// Inverse of [`gauge_fix`]: `sigma_e = eta_x^{-1} fixed_e eta_y`.
pub fn undo_gauge_fix(lat: &Lattice, group: &FiniteGroup, fixed: &[usize], eta: &[usize]) -> Vec<usize> {
    let inv: Vec<usize> = eta.iter().map(|&g| group.inv(g)).collect();
    apply_gauge(lat, group, fixed, &inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_tree_has_v_minus_one_edges() {
        let lat = Lattice::new(&[3, 2, 2]).unwrap();
        let t = SpanningTree::build(&lat, &[], &[]).unwrap();
        assert_eq!(t.edges().len(), lat.num_vertices() - 1);
    }

    #[test]
    fn region_restriction_is_a_tree() {
        let lat = Lattice::new(&[4, 4]).unwrap();
        let region: Vec<usize> = (0..lat.num_vertices()).filter(|&v| lat.coord(v, 0) <= 1).collect();
        let t = SpanningTree::build(&lat, &[region.clone()], &[]).unwrap();
        let inside = t
            .edges()
            .iter()
            .filter(|&&e| {
                let (x, y) = lat.endpoints(e);
                region.contains(&x) && region.contains(&y)
            })
            .count();
        assert_eq!(inside, region.len() - 1);
    }

    #[test]
    fn cutting_edges_disconnect() {
        let lat = Lattice::new(&[2, 2]).unwrap();
        let avoid: Vec<usize> = lat.incident_edges(0).to_vec();
        assert!(SpanningTree::build(&lat, &[], &avoid).is_err());
    }

    #[test]
    fn quaternion_gauge_fix_round_trips() {
        use crate::group::{make_group, GroupKind, RepChoice};
        let (g, _) = make_group(GroupKind::Quaternion, RepChoice::Faithful).unwrap();
        let lat = Lattice::new(&[2, 2, 1]).unwrap();
        let sigma: Vec<usize> = (0..lat.num_edges()).map(|e| (e * 5 + 3) % 8).collect();
        let t = SpanningTree::build(&lat, &[], &[]).unwrap();
        let (fixed, eta) = gauge_fix(&lat, &g, &sigma, &t, 4);
        assert_eq!(eta[4], 0);
        assert!(t.edges().iter().all(|&e| fixed[e] == 0));
        assert_eq!(undo_gauge_fix(&lat, &g, &fixed, &eta), sigma);
    }
}
