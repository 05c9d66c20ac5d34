//! Clusters of activated edges, connection-to-distance estimates for the
//! decorrelation model against independent bond percolation, and the
//! two-site magnetization table.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

use crate::dsu::UnionFind;
use crate::lattice::Lattice;
use crate::model::{KnField, Model};
use crate::sampler::{chain_rng, CurrentLaw, KnChain, Schedule};
use crate::stats::{batch_means, mean_stderr, Estimate, MIN_BATCHES};

/// Cluster label per vertex (first-appearance order) and the cluster count,
/// for the graph of edges with a nonzero current.
pub fn activated_clusters(lat: &Lattice, currents: &[u32]) -> (Vec<usize>, usize) {
    let mut uf = UnionFind::new(lat.num_vertices());
    for (e, &i) in currents.iter().enumerate() {
        if i != 0 {
            let (x, y) = lat.endpoints(e);
            uf.union(x, y);
        }
    }
    uf.labels()
}

/// Same partition as [`activated_clusters`], by breadth-first search.
pub fn activated_clusters_bfs(lat: &Lattice, currents: &[u32]) -> (Vec<usize>, usize) {
    let nv = lat.num_vertices();
    let mut label = vec![usize::MAX; nv];
    let mut count = 0;
    for s in 0..nv {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = count;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &e in lat.incident_edges(v) {
                if currents[e] == 0 {
                    continue;
                }
                let (x, y) = lat.endpoints(e);
                let w = if x == v { y } else { x };
                if label[w] == usize::MAX {
                    label[w] = count;
                    queue.push_back(w);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

/// Per vertex: whether its cluster holds a vertex at sup-distance at least
/// `k`. Exact via the per-cluster bounding box, since the farthest member
/// along some axis attains the sup-distance.
pub fn reach_indicator(lat: &Lattice, labels: &[usize], clusters: usize, k: usize) -> Vec<bool> {
    let d = lat.dim();
    let mut lo = vec![usize::MAX; clusters * d];
    let mut hi = vec![0usize; clusters * d];
    let mut xs = vec![0; d];
    for (v, &c) in labels.iter().enumerate() {
        lat.write_coords(v, &mut xs);
        for a in 0..d {
            lo[c * d + a] = lo[c * d + a].min(xs[a]);
            hi[c * d + a] = hi[c * d + a].max(xs[a]);
        }
    }
    (0..labels.len())
        .map(|v| {
            lat.write_coords(v, &mut xs);
            let c = labels[v];
            (0..d).any(|a| hi[c * d + a] - xs[a] >= k || xs[a] - lo[c * d + a] >= k)
        })
        .collect()
}

/// Fraction of vertices whose activated cluster reaches sup-distance `k`.
/// Boxes near the free boundary are clipped, not excluded.
pub fn reach_fraction(lat: &Lattice, labels: &[usize], clusters: usize, k: usize) -> f64 {
    let hits = reach_indicator(lat, labels, clusters, k).iter().filter(|&&b| b).count();
    hits as f64 / lat.num_vertices() as f64
}

/// Independent bond percolation with parameter `p`, as a 0/1 current field.
pub fn bond_configuration<R: Rng>(lat: &Lattice, p: f64, rng: &mut R) -> Vec<u32> {
    (0..lat.num_edges()).map(|_| u32::from(rng.random::<f64>() < p)).collect()
}

/// Edge activation probability dominating the decorrelation-model currents:
/// `1 - exp(-kappa (2 max f + c))`.
pub fn activation_bound(model: &Model, offset: f64) -> f64 {
    1.0 - libm::exp(-model.kappa * (2.0 * model.f_range().1 + offset))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayPoint {
    pub k: usize,
    pub currents: Estimate,
    pub bond: Estimate,
}

fn estimate(xs: &[f64]) -> Estimate {
    if xs.len() >= MIN_BATCHES {
        batch_means(xs, MIN_BATCHES).unwrap_or_else(|_| mean_stderr(xs))
    } else {
        mean_stderr(xs)
    }
}

/// Reach fractions for each `k` under the decorrelation model's currents and
/// under bond percolation at [`activation_bound`], one sample per thinning
/// interval. Stream `stream` drives the chain, `stream + 1` the bond process.
pub fn decay_profile(lat: &Lattice, model: &Model, ks: &[usize], schedule: Schedule, seed: u64, stream: u64) -> Vec<DecayPoint> {
    let offset = model.choose_offset_c();
    let law = CurrentLaw::new(model, offset);
    let p = activation_bound(model, offset);
    let mut chain = KnChain::new(lat, seed, stream);
    let mut bond_rng = chain_rng(seed, stream + 1);
    for _ in 0..schedule.burn_in {
        chain.sweep(lat, model);
    }
    let mut a = vec![Vec::with_capacity(schedule.samples as usize); ks.len()];
    let mut b = a.clone();
    for _ in 0..schedule.samples {
        for _ in 0..schedule.thin.max(1) {
            chain.sweep(lat, model);
        }
        let cur = chain.sample_currents(lat, model, &law);
        let (labels, n) = activated_clusters(lat, &cur);
        let bonds = bond_configuration(lat, p, &mut bond_rng);
        let (bl, bn) = activated_clusters(lat, &bonds);
        for (i, &k) in ks.iter().enumerate() {
            a[i].push(reach_fraction(lat, &labels, n, k));
            b[i].push(reach_fraction(lat, &bl, bn, k));
        }
    }
    ks.iter().enumerate().map(|(i, &k)| DecayPoint { k, currents: estimate(&a[i]), bond: estimate(&b[i]) }).collect()
}

/// Joint law of `(eta_x, eta_y, phi_x, phi_y)` on one edge.
#[derive(Clone, Debug, PartialEq)]
pub struct MagnetizationTable {
    pub group_order: usize,
    pub higgs_order: usize,
    pub probs: Vec<f64>,
}

impl MagnetizationTable {
    pub fn zeros(group_order: usize, higgs_order: usize) -> Self {
        Self { group_order, higgs_order, probs: vec![0.0; group_order * group_order * higgs_order * higgs_order] }
    }

    #[inline]
    pub fn index(&self, eta1: usize, eta2: usize, phi1: usize, phi2: usize) -> usize {
        ((eta1 * self.group_order + eta2) * self.higgs_order + phi1) * self.higgs_order + phi2
    }

    #[inline]
    pub fn get(&self, eta1: usize, eta2: usize, phi1: usize, phi2: usize) -> f64 {
        self.probs[self.index(eta1, eta2, phi1, phi2)]
    }

    pub fn add(&mut self, eta1: usize, eta2: usize, phi1: usize, phi2: usize, w: f64) {
        let i = self.index(eta1, eta2, phi1, phi2);
        self.probs[i] += w;
    }

    pub fn normalize(&mut self) {
        let total: f64 = self.probs.iter().sum();
        if total > 0.0 {
            self.probs.iter_mut().for_each(|p| *p /= total);
        }
    }

    /// Adds an observation spread uniformly over its symmetry orbit: global
    /// right-shift of `eta`, and global shift of `phi` when every Higgs value
    /// is allowed.
    pub fn add_orbit(&mut self, model: &Model, eta: (usize, usize), phi: (usize, usize)) {
        let g = &model.group;
        let shifts = if model.domain.len() == model.higgs.order() { model.higgs.order() } else { 1 };
        let w = 1.0 / (g.order() * shifts) as f64;
        for a in 0..g.order() {
            for h in 0..shifts {
                self.add(g.mul(eta.0, a), g.mul(eta.1, a), model.higgs.mul(phi.0, h), model.higgs.mul(phi.1, h), w);
            }
        }
    }

    /// Law of `(eta, phi)` at the first endpoint, indexed `eta * k + phi`.
    pub fn first_site(&self) -> Vec<f64> {
        let (n, k) = (self.group_order, self.higgs_order);
        let mut out = vec![0.0; n * k];
        for e1 in 0..n {
            for e2 in 0..n {
                for p1 in 0..k {
                    for p2 in 0..k {
                        out[e1 * k + p1] += self.get(e1, e2, p1, p2);
                    }
                }
            }
        }
        out
    }

    /// Law at the second endpoint, indexed `eta * k + phi`.
    pub fn second_site(&self) -> Vec<f64> {
        let (n, k) = (self.group_order, self.higgs_order);
        let mut out = vec![0.0; n * k];
        for e1 in 0..n {
            for e2 in 0..n {
                for p1 in 0..k {
                    for p2 in 0..k {
                        out[e2 * k + p2] += self.get(e1, e2, p1, p2);
                    }
                }
            }
        }
        out
    }
}

/// An edge along axis 0 starting at the centre of the box.
pub fn bulk_edge(lat: &Lattice) -> usize {
    let centre: Vec<usize> = lat.dims().iter().map(|&l| (l.saturating_sub(1)) / 2).collect();
    let v = lat.vertex(&centre).expect("centre lies in the box");
    lat.edge_id(v, 0).expect("axis 0 has positive length")
}

/// Orbit-averaged magnetization table on `edge` from a decorrelation-model chain.
pub fn magnetization_table(lat: &Lattice, model: &Model, edge: usize, schedule: Schedule, seed: u64, stream: u64) -> MagnetizationTable {
    let mut chain = KnChain::new(lat, seed, stream);
    let mut table = MagnetizationTable::zeros(model.group.order(), model.higgs.order());
    let (x, y) = lat.endpoints(edge);
    for _ in 0..schedule.burn_in {
        chain.sweep(lat, model);
    }
    for _ in 0..schedule.samples {
        for _ in 0..schedule.thin.max(1) {
            chain.sweep(lat, model);
        }
        let f: &KnField = &chain.field;
        table.add_orbit(model, (f.eta[x], f.eta[y]), (f.phi[x], f.phi[y]));
    }
    table.normalize();
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_and_full_activation() {
        let lat = Lattice::new(&[3, 3, 3]).unwrap();
        let (_, n) = activated_clusters(&lat, &vec![0; lat.num_edges()]);
        assert_eq!(n, lat.num_vertices());
        let (_, n) = activated_clusters(&lat, &vec![1; lat.num_edges()]);
        assert_eq!(n, 1);
    }

    #[test]
    fn union_find_agrees_with_bfs() {
        let lat = Lattice::new(&[5, 4, 3]).unwrap();
        let mut rng = chain_rng(5, 0);
        for p in [0.1, 0.3, 0.5] {
            let cur = bond_configuration(&lat, p, &mut rng);
            assert_eq!(activated_clusters(&lat, &cur), activated_clusters_bfs(&lat, &cur));
        }
    }

    #[test]
    fn reach_of_a_straight_bar() {
        let lat = Lattice::new(&[6, 6]).unwrap();
        let mut cur = vec![0; lat.num_edges()];
        for x in 1..4 {
            cur[lat.edge_id(lat.vertex(&[x, 2]).unwrap(), 0).unwrap()] = 1;
        }
        let (l, n) = activated_clusters(&lat, &cur);
        let r = reach_indicator(&lat, &l, n, 3);
        assert!(r[lat.vertex(&[1, 2]).unwrap()] && r[lat.vertex(&[4, 2]).unwrap()]);
        assert!(!r[lat.vertex(&[2, 2]).unwrap()]);
        assert_eq!(r.iter().filter(|&&b| b).count(), 2);
    }

    #[test]
    fn zero_coupling_never_reaches() {
        let lat = Lattice::new(&[4, 4, 4]).unwrap();
        let m = Model::toy(1.0, 0.0, [1.0, 0.0, -1.0, 0.0]).unwrap();
        let s = Schedule { burn_in: 2, samples: 20, thin: 1 };
        for pt in decay_profile(&lat, &m, &[1, 2], s, 9, 0) {
            assert_eq!(pt.currents.mean, 0.0);
            assert_eq!(pt.bond.mean, 0.0);
        }
    }

    #[test]
    fn table_rows_sum_to_one() {
        let lat = Lattice::new(&[3, 3]).unwrap();
        let m = Model::toy(1.0, 0.2, [1.0, 0.0, -1.0, 0.0]).unwrap();
        let s = Schedule { burn_in: 10, samples: 200, thin: 1 };
        let t = magnetization_table(&lat, &m, bulk_edge(&lat), s, 1, 0);
        assert!((t.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // orbit averaging makes the eta right-shift an exact symmetry
        assert!((t.get(0, 1, 0, 1) - t.get(1, 0, 0, 1)).abs() < 1e-15);
    }
}
