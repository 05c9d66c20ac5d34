//! Supports of configurations and their decomposition into vortices
//! (connected components under the shared-3-cell adjacency).

use alloc::vec;
use alloc::vec::Vec;

use crate::dsu::UnionFind;
use crate::lattice::Lattice;
use crate::model::{GaugeHiggsField, Model};
use crate::paths::LoopPath;

/// A sorted set of plaquettes with its edges `E(P)` and vertices `V(P)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlaquetteSet {
    plaquettes: Vec<usize>,
    edges: Vec<usize>,
    vertices: Vec<usize>,
}

impl PlaquetteSet {
    pub fn new(lat: &Lattice, plaquettes: impl IntoIterator<Item = usize>) -> Self {
        let mut ps: Vec<usize> = plaquettes.into_iter().collect();
        ps.sort_unstable();
        ps.dedup();
        let mut edges: Vec<usize> = ps.iter().flat_map(|&p| lat.plaquette(p).boundary.map(|oe| oe.edge)).collect();
        edges.sort_unstable();
        edges.dedup();
        let mut vertices: Vec<usize> = ps.iter().flat_map(|&p| lat.plaquette(p).corners).collect();
        vertices.sort_unstable();
        vertices.dedup();
        Self { plaquettes: ps, edges, vertices }
    }

    pub fn empty() -> Self {
        Self { plaquettes: Vec::new(), edges: Vec::new(), vertices: Vec::new() }
    }

    pub fn plaquettes(&self) -> &[usize] {
        &self.plaquettes
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.plaquettes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plaquettes.is_empty()
    }

    pub fn contains(&self, p: usize) -> bool {
        self.plaquettes.binary_search(&p).is_ok()
    }

    pub fn contains_edge(&self, e: usize) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn union(&self, lat: &Lattice, other: &Self) -> Self {
        Self::new(lat, self.plaquettes.iter().chain(&other.plaquettes).copied())
    }

    /// Whether no plaquette of `self` shares a 3-cell with (or equals) one of `other`.
    pub fn is_compatible(&self, lat: &Lattice, other: &Self) -> bool {
        self.plaquettes.iter().all(|&p| !other.contains(p) && lat.g2_neighbors(p).iter().all(|&q| !other.contains(q)))
    }
}

/// Which notion of support to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupportKind {
    /// Plaquettes bounding an excited edge (`sigma_e != 1` or `phi` jumps).
    LowDisorder,
    /// Plaquettes with nontrivial holonomy.
    PureGauge,
    /// Nontrivial holonomy, plus plaquettes touching an edge with a current.
    RandomCurrent,
}

/// Whether edge `e` is excited: `sigma_e != 1` or the Higgs field differs across it.
#[inline]
pub fn is_excited(lat: &Lattice, field: &GaugeHiggsField, e: usize) -> bool {
    let (x, y) = lat.endpoints(e);
    field.sigma[e] != 0 || field.phi[x] != field.phi[y]
}

pub fn support_low_disorder(lat: &Lattice, field: &GaugeHiggsField) -> PlaquetteSet {
    let mut mark = vec![false; lat.num_plaquettes()];
    for e in 0..lat.num_edges() {
        if is_excited(lat, field, e) {
            for &p in lat.edge_plaquettes(e) {
                mark[p] = true;
            }
        }
    }
    PlaquetteSet::new(lat, (0..mark.len()).filter(|&p| mark[p]))
}

/// Plaquettes whose holonomy acts nontrivially, i.e. `psi_p(sigma) != psi_p(1)`.
pub fn support_pure_gauge(lat: &Lattice, model: &Model, sigma: &[usize]) -> PlaquetteSet {
    PlaquetteSet::new(lat, (0..lat.num_plaquettes()).filter(|&p| !model.rep.is_trivial(model.holonomy(lat, sigma, p))))
}

pub fn support_random_current(lat: &Lattice, model: &Model, sigma: &[usize], currents: &[u32]) -> PlaquetteSet {
    let mut hot = vec![false; lat.num_vertices()];
    for e in 0..lat.num_edges() {
        if currents[e] != 0 {
            let (x, y) = lat.endpoints(e);
            hot[x] = true;
            hot[y] = true;
        }
    }
    PlaquetteSet::new(
        lat,
        (0..lat.num_plaquettes()).filter(|&p| {
            !model.rep.is_trivial(model.holonomy(lat, sigma, p)) || lat.plaquette(p).corners.iter().any(|&v| hot[v])
        }),
    )
}

pub fn support(lat: &Lattice, model: &Model, field: &GaugeHiggsField, currents: Option<&[u32]>, kind: SupportKind) -> PlaquetteSet {
    match kind {
        SupportKind::LowDisorder => support_low_disorder(lat, field),
        SupportKind::PureGauge => support_pure_gauge(lat, model, &field.sigma),
        SupportKind::RandomCurrent => {
            let zero;
            let cur = match currents {
                Some(c) => c,
                None => {
                    zero = vec![0; lat.num_edges()];
                    &zero
                }
            };
            support_random_current(lat, model, &field.sigma, cur)
        }
    }
}

/// Connected components of `set` under shared-3-cell adjacency, each sorted,
/// ordered by smallest plaquette.
pub fn vortex_decomposition(lat: &Lattice, set: &PlaquetteSet) -> Vec<PlaquetteSet> {
    let ps = set.plaquettes();
    let mut uf = UnionFind::new(ps.len());
    for (i, &p) in ps.iter().enumerate() {
        for &q in lat.g2_neighbors(p) {
            if q > p {
                if let Ok(j) = ps.binary_search(&q) {
                    uf.union(i, j);
                }
            }
        }
    }
    let (labels, n) = uf.labels();
    let mut groups = vec![Vec::new(); n];
    for (i, &l) in labels.iter().enumerate() {
        groups[l].push(ps[i]);
    }
    groups.into_iter().map(|g| PlaquetteSet::new(lat, g)).collect()
}

/// The edge `e` with `set == P(e)`, if `set` is a minimal vortex.
pub fn minimal_center(lat: &Lattice, set: &PlaquetteSet) -> Option<usize> {
    if set.len() != 2 * (lat.dim() - 1) {
        return None;
    }
    let first = *set.plaquettes().first()?;
    lat.plaquette(first)
        .boundary
        .iter()
        .map(|oe| oe.edge)
        .find(|&e| lat.is_interior_edge(e) && lat.edge_plaquettes(e).iter().all(|&p| set.contains(p)))
}

/// Number of vortices in the support that are minimal, centred on an edge of
/// `gamma`, and (for the low-disorder support) carry `sigma_e != 1` at the centre.
pub fn count_minimal_on_loop(
    lat: &Lattice,
    model: &Model,
    field: &GaugeHiggsField,
    currents: Option<&[u32]>,
    gamma: &LoopPath,
    kind: SupportKind,
) -> usize {
    let supp = support(lat, model, field, currents, kind);
    vortex_decomposition(lat, &supp)
        .iter()
        .filter_map(|v| minimal_center(lat, v))
        .filter(|&e| gamma.contains_edge(e) && (kind != SupportKind::LowDisorder || field.sigma[e] != 0))
        .count()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VortexClass {
    /// Shares no edge with the loop, or is a minimal vortex centred off it.
    NonContributing,
    MinimalOnLoop,
    /// Touches the loop but every holonomy in it is trivial.
    WilsonTrivial,
    /// Touches the loop and carries a nontrivial holonomy.
    WilsonNontrivial,
}

pub fn classify_vortex(lat: &Lattice, model: &Model, sigma: &[usize], vortex: &PlaquetteSet, gamma: &LoopPath) -> VortexClass {
    if !vortex.edges().iter().any(|&e| gamma.contains_edge(e)) {
        return VortexClass::NonContributing;
    }
    if let Some(e) = minimal_center(lat, vortex) {
        return if gamma.contains_edge(e) { VortexClass::MinimalOnLoop } else { VortexClass::NonContributing };
    }
    if vortex.plaquettes().iter().any(|&p| !model.rep.is_trivial(model.holonomy(lat, sigma, p))) {
        VortexClass::WilsonNontrivial
    } else {
        VortexClass::WilsonTrivial
    }
}

/// Whether a configuration makes the Wilson loop nontrivial: some support
/// plaquette touches `gamma` and some support plaquette has nontrivial holonomy.
pub fn is_wilson_nontrivial(lat: &Lattice, model: &Model, sigma: &[usize], supp: &PlaquetteSet, gamma: &LoopPath) -> bool {
    let touches = supp.plaquettes().iter().any(|&p| lat.plaquette(p).boundary.iter().any(|oe| gamma.contains_edge(oe.edge)));
    touches && supp.plaquettes().iter().any(|&p| !model.rep.is_trivial(model.holonomy(lat, sigma, p)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Model {
        Model::toy(1.0, 1.0, [1.0, 0.0, -1.0, 0.0]).unwrap()
    }

    #[test]
    fn single_flip_is_one_minimal_vortex() {
        let lat = Lattice::new(&[3, 3, 3]).unwrap();
        let v = lat.vertex(&[1, 1, 1]).unwrap();
        let e = lat.edge_id(v, 0).unwrap();
        let mut field = GaugeHiggsField::identity(&lat);
        field.sigma[e] = 1;
        let supp = support_low_disorder(&lat, &field);
        let vs = vortex_decomposition(&lat, &supp);
        assert_eq!(vs.len(), 1);
        assert_eq!(vs[0].plaquettes(), &lat.minimal_vortex(e).unwrap()[..]);
        assert_eq!(minimal_center(&lat, &vs[0]), Some(e));
        assert_eq!(support_pure_gauge(&lat, &toy(), &field.sigma), supp);
    }

    #[test]
    fn ground_state_has_empty_support() {
        let lat = Lattice::new(&[2, 2, 2]).unwrap();
        let field = GaugeHiggsField::identity(&lat);
        assert!(support_low_disorder(&lat, &field).is_empty());
        assert!(vortex_decomposition(&lat, &PlaquetteSet::empty()).is_empty());
    }

    #[test]
    fn classification_of_higgs_only_excitation() {
        let lat = Lattice::new(&[4, 4, 4]).unwrap();
        let m = toy();
        let gamma = LoopPath::rectangle(&lat, &[1, 1, 1], (0, 1), (2, 2)).unwrap();
        let mut field = GaugeHiggsField::identity(&lat);
        field.phi[lat.vertex(&[1, 1, 1]).unwrap()] = 1;
        let vs = vortex_decomposition(&lat, &support_low_disorder(&lat, &field));
        assert_eq!(vs.len(), 1);
        assert_eq!(classify_vortex(&lat, &m, &field.sigma, &vs[0], &gamma), VortexClass::WilsonTrivial);
    }

    #[test]
    fn classification_of_minimal_vortices() {
        let lat = Lattice::new(&[4, 4, 4]).unwrap();
        let m = toy();
        let gamma = LoopPath::rectangle(&lat, &[1, 1, 1], (0, 1), (2, 2)).unwrap();
        let on = gamma.edges()[0].edge;
        let mut field = GaugeHiggsField::identity(&lat);
        field.sigma[on] = 1;
        let v = vortex_decomposition(&lat, &support_low_disorder(&lat, &field)).remove(0);
        assert_eq!(classify_vortex(&lat, &m, &field.sigma, &v, &gamma), VortexClass::MinimalOnLoop);
        assert_eq!(count_minimal_on_loop(&lat, &m, &field, None, &gamma, SupportKind::LowDisorder), 1);

        // perpendicular edge touching the loop at a corner: shares loop edges, centred off it
        let off = lat.edge_id(lat.vertex(&[1, 1, 1]).unwrap(), 2).unwrap();
        let mut field = GaugeHiggsField::identity(&lat);
        field.sigma[off] = 1;
        let v = vortex_decomposition(&lat, &support_low_disorder(&lat, &field)).remove(0);
        assert_eq!(classify_vortex(&lat, &m, &field.sigma, &v, &gamma), VortexClass::NonContributing);
    }

    #[test]
    fn collinear_flips_split_and_bent_flips_merge() {
        let lat = Lattice::new(&[4, 4, 4]).unwrap();
        let m = toy();
        let gamma = LoopPath::rectangle(&lat, &[1, 1, 1], (0, 1), (2, 2)).unwrap();
        let mut field = GaugeHiggsField::identity(&lat);
        field.sigma[gamma.edges()[0].edge] = 1;
        field.sigma[gamma.edges()[1].edge] = 1;
        let vs = vortex_decomposition(&lat, &support_low_disorder(&lat, &field));
        assert_eq!(vs.len(), 2);
        assert_eq!(count_minimal_on_loop(&lat, &m, &field, None, &gamma, SupportKind::LowDisorder), 2);

        let mut field = GaugeHiggsField::identity(&lat);
        field.sigma[gamma.edges()[0].edge] = 1;
        field.sigma[lat.edge_id(lat.vertex(&[2, 1, 1]).unwrap(), 2).unwrap()] = 1;
        let vs = vortex_decomposition(&lat, &support_low_disorder(&lat, &field));
        assert_eq!(vs.len(), 1);
        assert_eq!(vs[0].len(), 7);
        assert_eq!(classify_vortex(&lat, &m, &field.sigma, &vs[0], &gamma), VortexClass::WilsonNontrivial);
    }
}
