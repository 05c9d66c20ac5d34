//! Box lattices `[0, L_1] x ... x [0, L_d]` with free boundary.
//!
//! Cells are numbered lexicographically by base-vertex coordinate (first
//! axis most significant) and then by axis tuple. Unoriented edges and
//! plaquettes carry a canonical positive orientation: an edge points along
//! its axis, and a plaquette in plane `(i, j)` with `i < j` is traversed
//! `v -> v+e_i -> v+e_i+e_j -> v+e_j -> v`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

const NONE: usize = usize::MAX;

/// An unoriented edge together with a traversal direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrientedEdge {
    pub edge: usize,
    pub forward: bool,
}

impl OrientedEdge {
    pub const fn new(edge: usize, forward: bool) -> Self {
        Self { edge, forward }
    }

    #[must_use]
    pub const fn reversed(self) -> Self {
        Self { edge: self.edge, forward: !self.forward }
    }
}

/// Compressed adjacency rows.
#[derive(Clone, Debug, Default)]
pub struct Csr {
    offsets: Vec<usize>,
    data: Vec<usize>,
}

impl Csr {
    fn from_rows(rows: Vec<Vec<usize>>) -> Self {
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        let mut data = Vec::new();
        offsets.push(0);
        for r in rows {
            data.extend_from_slice(&r);
            offsets.push(data.len());
        }
        Self { offsets, data }
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.data[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn rows(&self) -> usize {
        self.offsets.len() - 1
    }
}

#[derive(Clone, Debug)]
pub struct Plaquette {
    pub base: usize,
    pub axes: (usize, usize),
    /// Boundary in positive orientation, starting at `base`.
    pub boundary: [OrientedEdge; 4],
    /// Corners in traversal order.
    pub corners: [usize; 4],
}

#[derive(Clone, Debug)]
pub struct Cell {
    pub base: usize,
    pub axes: [usize; 3],
    pub faces: [usize; 6],
}

#[derive(Clone, Debug)]
pub struct Lattice {
    dims: Vec<usize>,
    strides: Vec<usize>,
    n_vertices: usize,
    edge_base: Vec<usize>,
    edge_axis: Vec<usize>,
    edge_at: Vec<usize>,
    plaquettes: Vec<Plaquette>,
    plaquette_at: Vec<usize>,
    cells: Vec<Cell>,
    vertex_edges: Csr,
    edge_plaquettes: Csr,
    plaquette_cells: Csr,
    g2: Csr,
}

fn pair_index(d: usize, i: usize, j: usize) -> usize {
    // position of (i, j), i < j, in the lexicographic list of pairs
    let mut k = 0;
    for a in 0..d {
        for b in a + 1..d {
            if (a, b) == (i, j) {
                return k;
            }
            k += 1;
        }
    }
    unreachable!("axis pair out of range")
}

impl Lattice {
    /// A box with side lengths `dims`; requires `2 <= d <= 4` and every side >= 1.
    pub fn new(dims: &[usize]) -> Result<Self> {
        if !(2..=4).contains(&dims.len()) {
            return Err(Error::Dimension(dims.len()));
        }
        Self::build(dims)
    }

    /// A path of `len` edges. Used for tiny two-vertex and chain test systems;
    /// it has no plaquettes.
    pub fn path(len: usize) -> Result<Self> {
        Self::build(&[len])
    }

    fn build(dims: &[usize]) -> Result<Self> {
        if let Some(axis) = dims.iter().position(|&l| l == 0) {
            return Err(Error::EmptySide { axis });
        }
        let d = dims.len();
        let mut strides = vec![1; d];
        for a in (0..d.saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * (dims[a + 1] + 1);
        }
        let n_vertices = dims.iter().map(|l| l + 1).product();
        let mut lat = Self {
            dims: dims.to_vec(),
            strides,
            n_vertices,
            edge_base: Vec::new(),
            edge_axis: Vec::new(),
            edge_at: vec![NONE; n_vertices * d],
            plaquettes: Vec::new(),
            plaquette_at: vec![NONE; n_vertices * (d * (d - 1) / 2).max(1)],
            cells: Vec::new(),
            vertex_edges: Csr::default(),
            edge_plaquettes: Csr::default(),
            plaquette_cells: Csr::default(),
            g2: Csr::default(),
        };
        let mut coords = vec![0usize; d];
        for v in 0..n_vertices {
            lat.write_coords(v, &mut coords);
            for a in 0..d {
                if coords[a] < dims[a] {
                    lat.edge_at[v * d + a] = lat.edge_base.len();
                    lat.edge_base.push(v);
                    lat.edge_axis.push(a);
                }
            }
        }
        for v in 0..n_vertices {
            lat.write_coords(v, &mut coords);
            for i in 0..d {
                for j in i + 1..d {
                    if coords[i] < dims[i] && coords[j] < dims[j] {
                        let vi = v + lat.strides[i];
                        let vj = v + lat.strides[j];
                        let vij = vi + lat.strides[j];
                        let boundary = [
                            OrientedEdge::new(lat.edge_at[v * d + i], true),
                            OrientedEdge::new(lat.edge_at[vi * d + j], true),
                            OrientedEdge::new(lat.edge_at[vj * d + i], false),
                            OrientedEdge::new(lat.edge_at[v * d + j], false),
                        ];
                        let npairs = d * (d - 1) / 2;
                        lat.plaquette_at[v * npairs + pair_index(d, i, j)] = lat.plaquettes.len();
                        lat.plaquettes.push(Plaquette { base: v, axes: (i, j), boundary, corners: [v, vi, vij, vj] });
                    }
                }
            }
        }
        for v in 0..n_vertices {
            lat.write_coords(v, &mut coords);
            for i in 0..d {
                for j in i + 1..d {
                    for k in j + 1..d {
                        if coords[i] < dims[i] && coords[j] < dims[j] && coords[k] < dims[k] {
                            let p = |base: usize, a: usize, b: usize| lat.plaquette_id(base, a, b).expect("face exists");
                            let faces = [
                                p(v, i, j),
                                p(v + lat.strides[k], i, j),
                                p(v, i, k),
                                p(v + lat.strides[j], i, k),
                                p(v, j, k),
                                p(v + lat.strides[i], j, k),
                            ];
                            lat.cells.push(Cell { base: v, axes: [i, j, k], faces });
                        }
                    }
                }
            }
        }
        let mut vertex_edges = vec![Vec::new(); n_vertices];
        for e in 0..lat.edge_base.len() {
            let (x, y) = lat.endpoints(e);
            vertex_edges[x].push(e);
            vertex_edges[y].push(e);
        }
        for row in &mut vertex_edges {
            row.sort_unstable();
        }
        let mut edge_plaquettes = vec![Vec::new(); lat.edge_base.len()];
        for (p, pl) in lat.plaquettes.iter().enumerate() {
            for oe in pl.boundary {
                edge_plaquettes[oe.edge].push(p);
            }
        }
        let mut plaquette_cells = vec![Vec::new(); lat.plaquettes.len()];
        for (c, cell) in lat.cells.iter().enumerate() {
            for &f in &cell.faces {
                plaquette_cells[f].push(c);
            }
        }
        let mut g2 = vec![Vec::new(); lat.plaquettes.len()];
        for cell in &lat.cells {
            for &a in &cell.faces {
                for &b in &cell.faces {
                    if a != b {
                        g2[a].push(b);
                    }
                }
            }
        }
        for row in &mut g2 {
            row.sort_unstable();
            row.dedup();
        }
        lat.vertex_edges = Csr::from_rows(vertex_edges);
        lat.edge_plaquettes = Csr::from_rows(edge_plaquettes);
        lat.plaquette_cells = Csr::from_rows(plaquette_cells);
        lat.g2 = Csr::from_rows(g2);
        Ok(lat)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edge_base.len()
    }

    pub fn num_plaquettes(&self) -> usize {
        self.plaquettes.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn write_coords(&self, v: usize, out: &mut [usize]) {
        let mut r = v;
        for a in 0..self.dims.len() {
            out[a] = r / self.strides[a];
            r %= self.strides[a];
        }
    }

    pub fn coords(&self, v: usize) -> Vec<usize> {
        let mut c = vec![0; self.dims.len()];
        self.write_coords(v, &mut c);
        c
    }

    pub fn coord(&self, v: usize, axis: usize) -> usize {
        (v / self.strides[axis]) % (self.dims[axis] + 1)
    }

    pub fn vertex(&self, coords: &[usize]) -> Option<usize> {
        if coords.len() != self.dims.len() || coords.iter().zip(&self.dims).any(|(c, l)| c > l) {
            return None;
        }
        Some(coords.iter().zip(&self.strides).map(|(c, s)| c * s).sum())
    }

    /// Neighbour of `v` one step along `axis` in direction `up`, if inside.
    pub fn step(&self, v: usize, axis: usize, up: bool) -> Option<usize> {
        let c = self.coord(v, axis);
        if up {
            (c < self.dims[axis]).then(|| v + self.strides[axis])
        } else {
            (c > 0).then(|| v - self.strides[axis])
        }
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        (0..self.dims.len()).any(|a| {
            let c = self.coord(v, a);
            c == 0 || c == self.dims[a]
        })
    }

    /// Edge from `v` to `v + e_axis`.
    pub fn edge_id(&self, v: usize, axis: usize) -> Option<usize> {
        let id = *self.edge_at.get(v * self.dims.len() + axis)?;
        (id != NONE).then_some(id)
    }

    pub fn edge_axis(&self, e: usize) -> usize {
        self.edge_axis[e]
    }

    /// (tail, head) in positive orientation.
    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        let b = self.edge_base[e];
        (b, b + self.strides[self.edge_axis[e]])
    }

    pub fn oriented_endpoints(&self, oe: OrientedEdge) -> (usize, usize) {
        let (x, y) = self.endpoints(oe.edge);
        if oe.forward {
            (x, y)
        } else {
            (y, x)
        }
    }

    /// Oriented edge from `x` to an adjacent `y`.
    pub fn oriented_between(&self, x: usize, y: usize) -> Option<OrientedEdge> {
        for &e in self.vertex_edges.row(x) {
            let (a, b) = self.endpoints(e);
            if (a, b) == (x, y) {
                return Some(OrientedEdge::new(e, true));
            }
            if (a, b) == (y, x) {
                return Some(OrientedEdge::new(e, false));
            }
        }
        None
    }

    pub fn incident_edges(&self, v: usize) -> &[usize] {
        self.vertex_edges.row(v)
    }

    pub fn plaquette(&self, p: usize) -> &Plaquette {
        &self.plaquettes[p]
    }

    pub fn plaquettes(&self) -> &[Plaquette] {
        &self.plaquettes
    }

    /// Plaquette with base `v` in plane `(i, j)`, in either axis order.
    pub fn plaquette_id(&self, v: usize, i: usize, j: usize) -> Option<usize> {
        let d = self.dims.len();
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        if i == j || j >= d || v >= self.n_vertices {
            return None;
        }
        let npairs = d * (d - 1) / 2;
        let id = self.plaquette_at[v * npairs + pair_index(d, i, j)];
        (id != NONE).then_some(id)
    }

    pub fn edge_plaquettes(&self, e: usize) -> &[usize] {
        self.edge_plaquettes.row(e)
    }

    pub fn cell(&self, c: usize) -> &Cell {
        &self.cells[c]
    }

    pub fn plaquette_cells(&self, p: usize) -> &[usize] {
        self.plaquette_cells.row(p)
    }

    /// Plaquettes sharing a 3-cell with `p`, excluding `p` itself.
    pub fn g2_neighbors(&self, p: usize) -> &[usize] {
        self.g2.row(p)
    }

    pub fn g2_adjacent(&self, p: usize, q: usize) -> bool {
        self.g2.row(p).binary_search(&q).is_ok()
    }

    /// Number of G2 neighbours of an interior plaquette: `10 (d - 2)`.
    pub fn interior_g2_degree(&self) -> usize {
        10 * self.dims.len().saturating_sub(2)
    }

    /// True when all `2(d-1)` plaquettes around `e` exist.
    pub fn is_interior_edge(&self, e: usize) -> bool {
        self.edge_plaquettes(e).len() == 2 * (self.dims.len() - 1)
    }

    /// The minimal vortex around `e`: the `2(d-1)` plaquettes containing it.
    pub fn minimal_vortex(&self, e: usize) -> Result<Vec<usize>> {
        if !self.is_interior_edge(e) {
            return Err(Error::BoundaryEdge(e));
        }
        let mut ps = self.edge_plaquettes(e).to_vec();
        ps.sort_unstable();
        Ok(ps)
    }

    /// Whether `p` lies in a face of the lattice boundary.
    pub fn is_boundary_plaquette(&self, p: usize) -> bool {
        let pl = &self.plaquettes[p];
        (0..self.dims.len()).filter(|&a| a != pl.axes.0 && a != pl.axes.1).any(|a| {
            let c = self.coord(pl.base, a);
            c == 0 || c == self.dims[a]
        })
    }

    /// Whether `e` lies in a face of the lattice boundary.
    pub fn is_boundary_edge(&self, e: usize) -> bool {
        !self.is_interior_edge(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expected_edges(dims: &[usize]) -> usize {
        (0..dims.len())
            .map(|i| dims[i] * (0..dims.len()).filter(|&j| j != i).map(|j| dims[j] + 1).product::<usize>())
            .sum()
    }

    #[test]
    fn counts_on_small_boxes() {
        for dims in [&[2usize, 2][..], &[1, 1, 1], &[2, 3], &[3, 2, 2], &[1, 2, 1, 2]] {
            let lat = Lattice::new(dims).unwrap();
            assert_eq!(lat.num_vertices(), dims.iter().map(|l| l + 1).product::<usize>());
            assert_eq!(lat.num_edges(), expected_edges(dims));
        }
    }

    #[test]
    fn square_two_by_two() {
        let lat = Lattice::new(&[2, 2]).unwrap();
        assert_eq!((lat.num_vertices(), lat.num_edges(), lat.num_plaquettes()), (9, 12, 4));
    }

    #[test]
    fn unit_cube() {
        let lat = Lattice::new(&[1, 1, 1]).unwrap();
        assert_eq!((lat.num_vertices(), lat.num_edges(), lat.num_plaquettes(), lat.num_cells()), (8, 12, 6, 1));
        for p in 0..6 {
            assert_eq!(lat.g2_neighbors(p).len(), 5);
        }
    }

    #[test]
    fn rejects_bad_dimension() {
        assert_eq!(Lattice::new(&[3]).unwrap_err(), Error::Dimension(1));
        assert_eq!(Lattice::new(&[1, 1, 1, 1, 1]).unwrap_err(), Error::Dimension(5));
        assert_eq!(Lattice::new(&[2, 0]).unwrap_err(), Error::EmptySide { axis: 1 });
    }

    #[test]
    fn lexicographic_vertex_order() {
        let lat = Lattice::new(&[2, 3]).unwrap();
        assert_eq!(lat.coords(0), vec![0, 0]);
        assert_eq!(lat.coords(1), vec![0, 1]);
        assert_eq!(lat.coords(4), vec![1, 0]);
        assert_eq!(lat.vertex(&[2, 3]), Some(11));
    }

    #[test]
    fn plaquette_boundary_is_closed_loop() {
        let lat = Lattice::new(&[2, 2, 2]).unwrap();
        for pl in lat.plaquettes() {
            let mut at = pl.base;
            for (k, oe) in pl.boundary.iter().enumerate() {
                let (x, y) = lat.oriented_endpoints(*oe);
                assert_eq!(x, at);
                assert_eq!(x, pl.corners[k]);
                at = y;
            }
            assert_eq!(at, pl.base);
        }
    }

    #[test]
    fn minimal_vortex_sizes() {
        let lat = Lattice::new(&[2, 2, 2]).unwrap();
        let centre = lat.vertex(&[1, 1, 0]).unwrap();
        let e = lat.edge_id(centre, 2).unwrap();
        assert_eq!(lat.minimal_vortex(e).unwrap().len(), 4);
        let corner = lat.edge_id(0, 0).unwrap();
        assert_eq!(lat.minimal_vortex(corner).unwrap_err(), Error::BoundaryEdge(corner));

        let lat4 = Lattice::new(&[2, 2, 2, 2]).unwrap();
        let c = lat4.vertex(&[1, 1, 1, 0]).unwrap();
        assert_eq!(lat4.minimal_vortex(lat4.edge_id(c, 3).unwrap()).unwrap().len(), 6);
    }

    #[test]
    fn interior_g2_degree_matches_table() {
        let lat = Lattice::new(&[3, 3, 3]).unwrap();
        let v = lat.vertex(&[1, 1, 1]).unwrap();
        let p = lat.plaquette_id(v, 0, 1).unwrap();
        assert_eq!(lat.g2_neighbors(p).len(), lat.interior_g2_degree());
        let lat4 = Lattice::new(&[3, 3, 3, 3]).unwrap();
        let v = lat4.vertex(&[1, 1, 1, 1]).unwrap();
        let p = lat4.plaquette_id(v, 1, 3).unwrap();
        assert_eq!(lat4.g2_neighbors(p).len(), 20);
    }

    #[test]
    fn d2_has_no_g2_edges() {
        let lat = Lattice::new(&[3, 3]).unwrap();
        assert!((0..lat.num_plaquettes()).all(|p| lat.g2_neighbors(p).is_empty()));
    }

    #[test]
    fn path_system() {
        let lat = Lattice::path(1).unwrap();
        assert_eq!((lat.num_vertices(), lat.num_edges(), lat.num_plaquettes()), (2, 1, 0));
    }
}
