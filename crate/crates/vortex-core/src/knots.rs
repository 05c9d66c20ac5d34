//! Separating boxes between plaquette sets and the knot decomposition of a
//! collection of vortices.

use alloc::vec;
use alloc::vec::Vec;

use crate::lattice::Lattice;
use crate::support::{minimal_center, PlaquetteSet};

/// Axis-aligned box of vertices `lo <= x <= hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub lo: Vec<usize>,
    pub hi: Vec<usize>,
}

/// Largest growth tried around the bounding box.
pub const MAX_GROWTH: usize = 3;

impl Region {
    /// Bounding box of the vertices of `set`; `None` for the empty set.
    pub fn bounding(lat: &Lattice, set: &PlaquetteSet) -> Option<Self> {
        let d = lat.dim();
        let mut lo = vec![usize::MAX; d];
        let mut hi = vec![0; d];
        for &v in set.vertices() {
            for a in 0..d {
                let c = lat.coord(v, a);
                lo[a] = lo[a].min(c);
                hi[a] = hi[a].max(c);
            }
        }
        (!set.is_empty()).then_some(Self { lo, hi })
    }

    /// The box grown by `g` on every side, clamped to the lattice.
    pub fn grown(&self, lat: &Lattice, g: usize) -> Self {
        Self {
            lo: self.lo.iter().map(|&l| l.saturating_sub(g)).collect(),
            hi: self.hi.iter().zip(lat.dims()).map(|(&h, &l)| (h + g).min(l)).collect(),
        }
    }

    pub fn side(&self) -> usize {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).max().unwrap_or(0)
    }

    pub fn contains_vertex(&self, lat: &Lattice, v: usize) -> bool {
        (0..self.lo.len()).all(|a| {
            let c = lat.coord(v, a);
            self.lo[a] <= c && c <= self.hi[a]
        })
    }

    pub fn contains_plaquette(&self, lat: &Lattice, p: usize) -> bool {
        lat.plaquette(p).corners.iter().all(|&v| self.contains_vertex(lat, v))
    }

    /// Whether `p` lies inside the box and within one of its faces.
    pub fn plaquette_on_boundary(&self, lat: &Lattice, p: usize) -> bool {
        if !self.contains_plaquette(lat, p) {
            return false;
        }
        let pl = lat.plaquette(p);
        (0..self.lo.len()).filter(|&a| a != pl.axes.0 && a != pl.axes.1).any(|a| {
            let c = lat.coord(pl.base, a);
            c == self.lo[a] || c == self.hi[a]
        })
    }
}

/// A box `R` from the bounding box of `inner` grown by `0..=3` such that
/// `inner` lies in `R` off its boundary, every plaquette of `outer` has a
/// corner outside `R`, and the two sets share no edge.
pub fn is_well_separated(lat: &Lattice, inner: &PlaquetteSet, outer: &PlaquetteSet) -> Option<Region> {
    let bbox = Region::bounding(lat, inner)?;
    if inner.edges().iter().any(|&e| outer.contains_edge(e)) {
        return None;
    }
    (0..=MAX_GROWTH).map(|g| bbox.grown(lat, g)).find(|r| {
        inner.plaquettes().iter().all(|&p| !r.plaquette_on_boundary(lat, p))
            && outer.plaquettes().iter().all(|&p| !r.contains_plaquette(lat, p))
    })
}

#[derive(Clone, Debug)]
pub struct Knot {
    /// Indices into the input vortex list.
    pub vortices: Vec<usize>,
    pub plaquettes: PlaquetteSet,
    pub minimal: bool,
    /// Box separating this knot from every later one.
    pub region: Option<Region>,
    /// Side of the bounding box.
    pub cube_side: usize,
    /// Whether a box separates the knot from the loop's plaquettes, when requested.
    pub separated_from_loop: Option<bool>,
}

fn gap(a: &Region, b: &Region) -> usize {
    (0..a.lo.len())
        .map(|i| {
            if a.hi[i] < b.lo[i] {
                b.lo[i] - a.hi[i]
            } else if b.hi[i] < a.lo[i] {
                a.lo[i] - b.hi[i]
            } else {
                0
            }
        })
        .max()
        .unwrap_or(0)
}

/// Minimal vortices first as singleton knots, then the rest: repeatedly peel
/// off the first group that a box separates from all remaining groups, and
/// when none separates, merge the first group with its nearest neighbour.
pub fn knot_decomposition(lat: &Lattice, vortices: &[PlaquetteSet], loop_plaquettes: Option<&PlaquetteSet>) -> Vec<Knot> {
    let union_of = |ids: &[usize]| PlaquetteSet::new(lat, ids.iter().flat_map(|&i| vortices[i].plaquettes().iter().copied()));
    let finish = |ids: Vec<usize>, minimal: bool, region: Option<Region>| {
        let plaquettes = union_of(&ids);
        let cube_side = Region::bounding(lat, &plaquettes).map_or(0, |r| r.side());
        let separated_from_loop = loop_plaquettes.map(|lp| {
            let rest = PlaquetteSet::new(lat, lp.plaquettes().iter().copied().filter(|&p| !plaquettes.contains(p)));
            is_well_separated(lat, &plaquettes, &rest).is_some()
        });
        Knot { vortices: ids, plaquettes, minimal, region, cube_side, separated_from_loop }
    };
    let mut out = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, v) in vortices.iter().enumerate() {
        if minimal_center(lat, v).is_some() {
            let region = Region::bounding(lat, v).map(|r| r.grown(lat, 1));
            out.push(finish(vec![i], true, region));
        } else {
            groups.push(vec![i]);
        }
    }
    while !groups.is_empty() {
        let sets: Vec<PlaquetteSet> = groups.iter().map(|g| union_of(g)).collect();
        let found = (0..groups.len()).find_map(|i| {
            let others = PlaquetteSet::new(
                lat,
                sets.iter().enumerate().filter(|&(j, _)| j != i).flat_map(|(_, s)| s.plaquettes().iter().copied()),
            );
            if groups.len() == 1 {
                return Some((i, is_well_separated(lat, &sets[i], &others)));
            }
            is_well_separated(lat, &sets[i], &others).map(|r| (i, Some(r)))
        });
        match found {
            Some((i, region)) => {
                let ids = groups.remove(i);
                out.push(finish(ids, false, region));
            }
            None => {
                let b0 = Region::bounding(lat, &sets[0]).expect("non-empty");
                let j = (1..groups.len())
                    .min_by_key(|&j| gap(&b0, &Region::bounding(lat, &sets[j]).expect("non-empty")))
                    .expect("at least two groups");
                let merged = groups.remove(j);
                groups[0].extend(merged);
                groups[0].sort_unstable();
            }
        }
    }
    out
}
