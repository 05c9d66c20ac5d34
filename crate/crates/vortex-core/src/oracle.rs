//! Exhaustive enumeration on tiny lattices.
//!
//! States are mixed-radix numbers over `(sigma_0..sigma_{E-1}, phi_0..phi_{V-1})`
//! with the first digit most significant. The index range is cut into fixed
//! chunks of [`CHUNK`] states; each chunk is reduced on its own and chunk
//! results are merged in index order, so a parallel driver that maps chunks
//! and merges in order gets bit-identical sums.

use alloc::vec;
use alloc::vec::Vec;

use crate::dsu::UnionFind;
use crate::error::{Error, Result};
use crate::knots::Region;
use crate::lattice::Lattice;
use crate::linalg::C64;
use crate::model::{current_term, GaugeHiggsField, KnField, Model};
use crate::paths::LoopPath;
use crate::percolation::MagnetizationTable;
use crate::stats::CompensatedSum;
use crate::support::{is_wilson_nontrivial, minimal_center, support_low_disorder, PlaquetteSet};

/// Default cap on the number of enumerated states.
pub const DEFAULT_BUDGET: u128 = 1 << 26;
/// States per chunk.
pub const CHUNK: u64 = 1 << 16;

/// Order-independent accumulation of chunk results.
pub trait Merge {
    fn merge(&mut self, other: Self);
}

impl Merge for CompensatedSum {
    fn merge(&mut self, other: Self) {
        self.add_sum(&other);
    }
}

/// Gibbs weight total and weighted sums of real-valued observables.
#[derive(Clone, Debug, Default)]
pub struct WeightedSums {
    pub z: CompensatedSum,
    pub values: Vec<CompensatedSum>,
}

impl WeightedSums {
    pub fn record(&mut self, w: f64, vals: &[f64]) {
        self.z.add(w);
        if self.values.len() < vals.len() {
            self.values.resize(vals.len(), CompensatedSum::default());
        }
        for (s, v) in self.values.iter_mut().zip(vals) {
            s.add(w * v);
        }
    }

    /// Weighted average of observable `i`.
    pub fn mean(&self, i: usize) -> f64 {
        self.values.get(i).map_or(0.0, |s| s.value()) / self.z.value()
    }
}

impl Merge for WeightedSums {
    fn merge(&mut self, other: Self) {
        self.z.add_sum(&other.z);
        if self.values.len() < other.values.len() {
            self.values.resize(other.values.len(), CompensatedSum::default());
        }
        for (s, o) in self.values.iter_mut().zip(&other.values) {
            s.add_sum(o);
        }
    }
}

fn state_count(radices: &[usize]) -> u128 {
    radices.iter().fold(1u128, |acc, &r| acc.saturating_mul(r as u128))
}

fn check_budget(radices: &[usize], budget: u128) -> Result<u64> {
    let states = state_count(radices);
    if states > budget || states > u64::MAX as u128 {
        return Err(Error::Budget { states, budget });
    }
    Ok(states as u64)
}

/// Streaming enumerator over every `(sigma, phi)` of a model on a lattice.
#[derive(Clone, Debug)]
pub struct Enumerator<'a> {
    lat: &'a Lattice,
    model: &'a Model,
    radices: Vec<usize>,
    total: u64,
}

impl<'a> Enumerator<'a> {
    pub fn new(lat: &'a Lattice, model: &'a Model, budget: u128) -> Result<Self> {
        let mut radices = vec![model.group.order(); lat.num_edges()];
        radices.extend(core::iter::repeat(model.domain.len()).take(lat.num_vertices()));
        let total = check_budget(&radices, budget)?;
        Ok(Self { lat, model, radices, total })
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn num_chunks(&self) -> usize {
        self.total.div_ceil(CHUNK) as usize
    }

    fn decode(&self, mut idx: u64, digits: &mut [usize]) {
        for (d, &r) in digits.iter_mut().zip(&self.radices).rev() {
            *d = (idx % r as u64) as usize;
            idx /= r as u64;
        }
    }

    fn write_field(&self, digits: &[usize], field: &mut GaugeHiggsField) {
        let ne = self.lat.num_edges();
        field.sigma.copy_from_slice(&digits[..ne]);
        for (p, &d) in field.phi.iter_mut().zip(&digits[ne..]) {
            *p = self.model.domain[d];
        }
    }

    /// Feeds every state of chunk `chunk` with its weight `exp(H)` to `f`.
    pub fn fold_chunk<A, F>(&self, chunk: usize, acc: &mut A, f: &F)
    where
        F: Fn(&mut A, &GaugeHiggsField, f64),
    {
        let start = chunk as u64 * CHUNK;
        let end = (start + CHUNK).min(self.total);
        let mut digits = vec![0; self.radices.len()];
        self.decode(start, &mut digits);
        let mut field = GaugeHiggsField::identity(self.lat);
        self.write_field(&digits, &mut field);
        let ne = self.lat.num_edges();
        for _ in start..end {
            let w = libm::exp(self.model.energy(self.lat, &field));
            f(acc, &field, w);
            // odometer, last digit fastest
            for pos in (0..digits.len()).rev() {
                digits[pos] += 1;
                let wrapped = digits[pos] == self.radices[pos];
                if wrapped {
                    digits[pos] = 0;
                }
                if pos < ne {
                    field.sigma[pos] = digits[pos];
                } else {
                    field.phi[pos - ne] = self.model.domain[digits[pos]];
                }
                if !wrapped {
                    break;
                }
            }
        }
    }

    /// Sequential reduction over all chunks, merged in index order.
    pub fn fold<A, F>(&self, f: &F) -> A
    where
        A: Default + Merge,
        F: Fn(&mut A, &GaugeHiggsField, f64),
    {
        let mut total = A::default();
        for c in 0..self.num_chunks() {
            let mut acc = A::default();
            self.fold_chunk(c, &mut acc, f);
            total.merge(acc);
        }
        total
    }
}

/// `Z = sum exp(H)` over all states.
pub fn exact_partition(lat: &Lattice, model: &Model, budget: u128) -> Result<f64> {
    let en = Enumerator::new(lat, model, budget)?;
    let z: CompensatedSum = en.fold(&|acc: &mut CompensatedSum, _: &GaugeHiggsField, w| acc.add(w));
    Ok(z.value())
}

/// Gibbs expectation of a complex observable.
pub fn exact_expectation<F>(lat: &Lattice, model: &Model, budget: u128, obs: F) -> Result<C64>
where
    F: Fn(&GaugeHiggsField) -> C64,
{
    let en = Enumerator::new(lat, model, budget)?;
    let s: WeightedSums = en.fold(&|acc: &mut WeightedSums, f: &GaugeHiggsField, w| {
        let o = obs(f);
        acc.record(w, &[o.re, o.im]);
    });
    Ok(C64::new(s.mean(0), s.mean(1)))
}

/// Gibbs probability of an event.
pub fn exact_event_probability<F>(lat: &Lattice, model: &Model, budget: u128, event: F) -> Result<f64>
where
    F: Fn(&GaugeHiggsField) -> bool,
{
    let en = Enumerator::new(lat, model, budget)?;
    let s: WeightedSums = en.fold(&|acc: &mut WeightedSums, f: &GaugeHiggsField, w| {
        acc.record(w, &[if event(f) { 1.0 } else { 0.0 }]);
    });
    Ok(s.mean(0))
}

/// Energy from vertex coordinates and the raw coupling tables, without the
/// lattice's plaquette list or the model's compiled edge weights.
pub fn coordinate_energy(lat: &Lattice, model: &Model, field: &GaugeHiggsField) -> f64 {
    let g = &model.group;
    let dims = lat.dims();
    let d = dims.len();
    let trace_one = model.rep.character(0).re;
    let ground = 2.0 * model.f(0, 0);
    let mut x = vec![0; d];
    let mut plaq = 0.0;
    let mut edges = 0.0;
    for v in 0..lat.num_vertices() {
        lat.write_coords(v, &mut x);
        let shifted = |x: &[usize], a: usize| {
            let mut y = x.to_vec();
            y[a] += 1;
            lat.vertex(&y).expect("inside the box")
        };
        for i in 0..d {
            if x[i] == dims[i] {
                continue;
            }
            let w = shifted(&x, i);
            let e = lat.edge_id(v, i).expect("edge exists");
            let s = field.sigma[e];
            let h = model.higgs.ratio(field.phi[v], field.phi[w]);
            edges += model.kappa * (model.f(s, h) + model.f(g.inv(s), model.higgs.inv(h)) - ground);
            for j in i + 1..d {
                if x[j] == dims[j] {
                    continue;
                }
                let vj = shifted(&x, j);
                let a = field.sigma[e];
                let b = field.sigma[lat.edge_id(w, j).expect("edge exists")];
                let c = field.sigma[lat.edge_id(vj, i).expect("edge exists")];
                let dd = field.sigma[lat.edge_id(v, j).expect("edge exists")];
                let hol = g.mul(g.mul(g.mul(a, b), g.inv(c)), g.inv(dd));
                plaq += 2.0 * model.beta * (model.rep.character(hol).re - trace_one);
            }
        }
    }
    plaq + edges
}

fn pairwise(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        xs.iter().sum()
    } else {
        let (a, b) = xs.split_at(xs.len() / 2);
        pairwise(a) + pairwise(b)
    }
}

/// Second oracle: first digit fastest, [`coordinate_energy`], pairwise sums.
/// Returns `(Z, E[obs])`.
pub fn exact_expectation_reversed<F>(lat: &Lattice, model: &Model, budget: u128, obs: F) -> Result<(f64, C64)>
where
    F: Fn(&GaugeHiggsField) -> C64,
{
    let ne = lat.num_edges();
    let mut radices = vec![model.group.order(); ne];
    radices.extend(core::iter::repeat(model.domain.len()).take(lat.num_vertices()));
    let total = check_budget(&radices, budget)?;
    let mut digits = vec![0; radices.len()];
    let mut field = GaugeHiggsField::identity(lat);
    let mut zs = Vec::with_capacity(total as usize);
    let mut re = Vec::with_capacity(total as usize);
    let mut im = Vec::with_capacity(total as usize);
    for _ in 0..total {
        for (pos, &dg) in digits.iter().enumerate() {
            if pos < ne {
                field.sigma[pos] = dg;
            } else {
                field.phi[pos - ne] = model.domain[dg];
            }
        }
        let w = libm::exp(coordinate_energy(lat, model, &field));
        let o = obs(&field);
        zs.push(w);
        re.push(w * o.re);
        im.push(w * o.im);
        for pos in 0..digits.len() {
            digits[pos] += 1;
            if digits[pos] < radices[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
    let z = pairwise(&zs);
    Ok((z, C64::new(pairwise(&re) / z, pairwise(&im) / z)))
}

/// Which constrained sum [`exact_phi`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiVariant {
    /// All configurations with the given support.
    Total,
    /// Those that are Wilson-loop nontrivial.
    NonTrivial,
    /// Weighted by the Wilson loop (one-dimensional representations).
    Wilson,
}

/// Sum of `exp(H)` over configurations whose low-disorder support is exactly
/// `set`, with one representative per global Higgs shift.
///
/// Only edges all of whose plaquettes lie in `set` can be excited, so the
/// gauge field is enumerated there and the Higgs field is constant on each
/// component of the graph without those edges. For a two-valued Higgs field
/// on an odd number of vertices the representative is fixed by a positive
/// sum of the values; otherwise the sum over all shifts is divided by their
/// number.
pub fn exact_phi(lat: &Lattice, model: &Model, set: &PlaquetteSet, variant: PhiVariant, gamma: Option<&LoopPath>, budget: u128) -> Result<C64> {
    if variant != PhiVariant::Total && gamma.is_none() {
        return Err(Error::Model("this variant needs a loop".into()));
    }
    if variant == PhiVariant::Wilson && model.rep.dim() != 1 {
        return Err(Error::Model("Wilson-weighted sums need a one-dimensional representation".into()));
    }
    let free: Vec<usize> = set.edges().iter().copied().filter(|&e| lat.edge_plaquettes(e).iter().all(|&p| set.contains(p))).collect();
    let nv = lat.num_vertices();
    let mut uf = UnionFind::new(nv);
    for e in 0..lat.num_edges() {
        if free.binary_search(&e).is_err() {
            let (x, y) = lat.endpoints(e);
            uf.union(x, y);
        }
    }
    let (comp, ncomp) = uf.labels();
    let mut radices = vec![model.group.order(); free.len()];
    radices.extend(core::iter::repeat(model.domain.len()).take(ncomp));
    let total = check_budget(&radices, budget)?;
    let literal = model.domain.len() == 2 && model.higgs.order() == 2 && nv % 2 == 1;
    let mut field = GaugeHiggsField::identity(lat);
    let mut digits = vec![0; radices.len()];
    let (mut re, mut im) = (CompensatedSum::default(), CompensatedSum::default());
    for _ in 0..total {
        for (i, &e) in free.iter().enumerate() {
            field.sigma[e] = digits[i];
        }
        for v in 0..nv {
            field.phi[v] = model.domain[digits[free.len() + comp[v]]];
        }
        let keep = (!literal || 2 * field.phi.iter().filter(|&&p| p == 0).count() > nv)
            && support_low_disorder(lat, &field) == *set
            && (variant != PhiVariant::NonTrivial || is_wilson_nontrivial(lat, model, &field.sigma, set, gamma.expect("checked")));
        if keep {
            let w = libm::exp(model.energy(lat, &field));
            if variant == PhiVariant::Wilson {
                let wl = model.wilson_loop(&field.sigma, gamma.expect("checked"));
                re.add(w * wl.re);
                im.add(w * wl.im);
            } else {
                re.add(w);
            }
        }
        for pos in (0..digits.len()).rev() {
            digits[pos] += 1;
            if digits[pos] < radices[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
    let norm = if literal { 1.0 } else { model.domain.len() as f64 };
    Ok(C64::new(re.value() / norm, im.value() / norm))
}

/// Cube bound for a minimal vortex: the gauge sum over the centre value
/// times `exp[kappa (max f - min f)]` for every oriented edge of the
/// vortex's bounding box.
pub fn phi_upper_bound(lat: &Lattice, model: &Model, set: &PlaquetteSet) -> Result<f64> {
    if minimal_center(lat, set).is_none() {
        return Err(Error::UnsupportedShape);
    }
    let d = lat.dim() as f64;
    let trace_one = model.rep.character(0).re;
    let gauge: f64 =
        (1..model.group.order()).map(|g| libm::exp(4.0 * (d - 1.0) * model.beta * (model.rep.character(g).re - trace_one))).sum();
    let r = Region::bounding(lat, set).ok_or(Error::UnsupportedShape)?;
    let sides: Vec<usize> = r.lo.iter().zip(&r.hi).map(|(l, h)| h - l).collect();
    let edges: usize = (0..sides.len()).map(|a| sides[a] * sides.iter().enumerate().filter(|&(b, _)| b != a).map(|(_, s)| s + 1).product::<usize>()).sum();
    let (lo, hi) = model.f_range();
    Ok(gauge * libm::exp(model.kappa * (hi - lo) * 2.0 * edges as f64))
}

/// `sum_{I >= 0} mu^I / I!`, truncated once past the mode with the
/// remaining tail below `tol` relative to the running sum.
pub fn truncated_current_sum(mu: f64, tol: f64) -> f64 {
    if mu <= 0.0 {
        return 1.0;
    }
    let mut sum = CompensatedSum::default();
    let mut i = 0u32;
    loop {
        let term = libm::exp(current_term(mu, i));
        sum.add(term);
        i += 1;
        let ratio = mu / i as f64;
        // geometric bound on the tail once terms decrease
        if ratio < 1.0 && term * ratio / (1.0 - ratio) < tol * sum.value() {
            return sum.value();
        }
    }
}

/// Law of `(sigma, phi)` obtained by summing the augmented weight over the
/// currents edge by edge; states in [`Enumerator`] order.
pub fn current_marginal_law(lat: &Lattice, model: &Model, offset: f64, tol: f64, budget: u128) -> Result<Vec<f64>> {
    let mut radices = vec![model.group.order(); lat.num_edges()];
    radices.extend(core::iter::repeat(model.domain.len()).take(lat.num_vertices()));
    check_budget(&radices, budget)?;
    let en = Enumerator::new(lat, model, budget)?;
    let mut out = Vec::with_capacity(en.total() as usize);
    for c in 0..en.num_chunks() {
        en.fold_chunk(c, &mut out, &|acc: &mut Vec<f64>, f: &GaugeHiggsField, _| {
            let mut w = model.plaquette_energy(lat, &f.sigma);
            for e in 0..lat.num_edges() {
                let mu = model.current_mean(f.sigma[e], model.ratio_on(lat, &f.phi, e), offset);
                w += libm::log(truncated_current_sum(mu, tol));
            }
            acc.push(w);
        });
    }
    let top = out.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    out.iter_mut().for_each(|w| *w = libm::exp(*w - top));
    let z: f64 = out.iter().sum();
    out.iter_mut().for_each(|w| *w /= z);
    Ok(out)
}

/// Gibbs law of `(sigma, phi)` in [`Enumerator`] order.
pub fn gibbs_law(lat: &Lattice, model: &Model, budget: u128) -> Result<Vec<f64>> {
    let en = Enumerator::new(lat, model, budget)?;
    let mut out = Vec::with_capacity(en.total() as usize);
    for c in 0..en.num_chunks() {
        en.fold_chunk(c, &mut out, &|acc: &mut Vec<f64>, _: &GaugeHiggsField, w| acc.push(w));
    }
    let z: f64 = out.iter().sum();
    out.iter_mut().for_each(|w| *w /= z);
    Ok(out)
}

/// Index of a state in [`Enumerator`] order.
pub fn state_index(model: &Model, field: &GaugeHiggsField) -> usize {
    let mut idx = 0usize;
    for &s in &field.sigma {
        idx = idx * model.group.order() + s;
    }
    for &p in &field.phi {
        let d = model.domain.iter().position(|&h| h == p).expect("value in domain");
        idx = idx * model.domain.len() + d;
    }
    idx
}

/// Exact two-site law of the decorrelation model on `edge`, by enumerating
/// every `(eta, phi)`.
pub fn exact_magnetization(lat: &Lattice, model: &Model, edge: usize, budget: u128) -> Result<MagnetizationTable> {
    let nv = lat.num_vertices();
    let mut radices = vec![model.group.order(); nv];
    radices.extend(core::iter::repeat(model.domain.len()).take(nv));
    let total = check_budget(&radices, budget)?;
    let (x, y) = lat.endpoints(edge);
    let mut table = MagnetizationTable::zeros(model.group.order(), model.higgs.order());
    let mut field = KnField::identity(lat);
    let mut digits = vec![0; 2 * nv];
    for _ in 0..total {
        for v in 0..nv {
            field.eta[v] = digits[v];
            field.phi[v] = model.domain[digits[nv + v]];
        }
        let w = libm::exp(model.kn_energy(lat, &field));
        table.add(field.eta[x], field.eta[y], field.phi[x], field.phi[y], w);
        for pos in (0..digits.len()).rev() {
            digits[pos] += 1;
            if digits[pos] < radices[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
    table.normalize();
    Ok(table)
}
