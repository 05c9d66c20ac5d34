//! Markov chains for the gauge-Higgs measure, its random-current
//! augmentation, and the decorrelation model on `(eta, phi)`.
//!
//! Chains do not hold the lattice or model; every call takes them by
//! reference. Randomness comes from a ChaCha stream per chain, so a
//! `(seed, stream)` pair fixes the trajectory.

use alloc::vec;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::lattice::Lattice;
use crate::linalg::C64;
use crate::model::{GaugeHiggsField, KnField, Model};
use crate::paths::LoopPath;
use crate::support::{count_minimal_on_loop, SupportKind};

pub type ChainRng = ChaCha8Rng;

/// Default burn-in sweeps.
pub const DEFAULT_BURN_IN: u64 = 1_000;
/// Default sweeps between measurements.
pub const DEFAULT_THIN: u64 = 10;

pub fn chain_rng(seed: u64, stream: u64) -> ChainRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// How edges in the boundary faces of the box are treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Boundary {
    #[default]
    Free,
    /// Edges with fewer than `2(d-1)` plaquettes stay at the identity.
    Frozen,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum UpdateRule {
    /// Uniform proposals, accepted with `min(1, exp(dH))`.
    #[default]
    Metropolis,
    /// Resample each site from its exact conditional law.
    HeatBath,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub burn_in: u64,
    pub samples: u64,
    pub thin: u64,
}

impl Default for Schedule {
    fn default() -> Self {
        Self { burn_in: DEFAULT_BURN_IN, samples: 1_000, thin: DEFAULT_THIN }
    }
}

/// Metropolis acceptance probability for a log-weight change `delta`.
#[inline]
pub fn acceptance(delta: f64) -> f64 {
    if delta >= 0.0 {
        1.0
    } else {
        libm::exp(delta)
    }
}

#[inline]
fn accept<R: Rng>(rng: &mut R, delta: f64) -> bool {
    delta >= 0.0 || rng.random::<f64>() < libm::exp(delta)
}

fn categorical<R: Rng>(rng: &mut R, log_w: &[f64]) -> usize {
    let top = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_w.iter().map(|l| libm::exp(l - top)).collect();
    let total: f64 = w.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, x) in w.iter().enumerate() {
        if u < *x {
            return i;
        }
        u -= x;
    }
    w.len() - 1
}

/// Single-site chain on `(sigma, phi)`.
#[derive(Clone, Debug)]
pub struct GaugeChain {
    pub field: GaugeHiggsField,
    pub rng: ChainRng,
    pub boundary: Boundary,
    pub rule: UpdateRule,
    pub sweeps: u64,
    pub proposed: u64,
    pub accepted: u64,
}

impl GaugeChain {
    /// Starts from the ground state.
    pub fn new(lat: &Lattice, seed: u64, stream: u64) -> Self {
        Self {
            field: GaugeHiggsField::identity(lat),
            rng: chain_rng(seed, stream),
            boundary: Boundary::Free,
            rule: UpdateRule::Metropolis,
            sweeps: 0,
            proposed: 0,
            accepted: 0,
        }
    }

    #[must_use]
    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    #[must_use]
    pub fn with_rule(mut self, rule: UpdateRule) -> Self {
        self.rule = rule;
        self
    }

    /// One pass over every edge, then every vertex, in index order.
    pub fn sweep(&mut self, lat: &Lattice, model: &Model) {
        let ng = model.group.order();
        for e in 0..lat.num_edges() {
            if self.boundary == Boundary::Frozen && !lat.is_interior_edge(e) {
                continue;
            }
            match self.rule {
                UpdateRule::Metropolis => {
                    let g = self.rng.random_range(0..ng);
                    self.proposed += 1;
                    let d = model.delta_edge(lat, &self.field, e, g);
                    if accept(&mut self.rng, d) {
                        self.field.sigma[e] = g;
                        self.accepted += 1;
                    }
                }
                UpdateRule::HeatBath => {
                    let lw: Vec<f64> = (0..ng).map(|g| model.delta_edge(lat, &self.field, e, g)).collect();
                    self.field.sigma[e] = categorical(&mut self.rng, &lw);
                }
            }
        }
        let dom = &model.domain;
        for v in 0..lat.num_vertices() {
            match self.rule {
                UpdateRule::Metropolis => {
                    let h = dom[self.rng.random_range(0..dom.len())];
                    self.proposed += 1;
                    let d = model.delta_vertex(lat, &self.field, v, h);
                    if accept(&mut self.rng, d) {
                        self.field.phi[v] = h;
                        self.accepted += 1;
                    }
                }
                UpdateRule::HeatBath => {
                    let lw: Vec<f64> = dom.iter().map(|&h| model.delta_vertex(lat, &self.field, v, h)).collect();
                    self.field.phi[v] = dom[categorical(&mut self.rng, &lw)];
                }
            }
        }
        self.sweeps += 1;
    }

    /// Burn-in, then `samples` observations spaced `thin` sweeps apart.
    pub fn run<F: FnMut(&GaugeHiggsField)>(&mut self, lat: &Lattice, model: &Model, schedule: Schedule, mut observe: F) {
        for _ in 0..schedule.burn_in {
            self.sweep(lat, model);
        }
        for _ in 0..schedule.samples {
            for _ in 0..schedule.thin.max(1) {
                self.sweep(lat, model);
            }
            observe(&self.field);
        }
    }
}

/// Time series of the standard observables.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ObservableSeries {
    pub wilson: Vec<C64>,
    pub minimal_on_loop: Vec<u32>,
    pub energy: Vec<f64>,
}

/// Records the Wilson loop, the number of minimal vortices on the loop
/// (under `kind`) and the energy after each thinning interval.
pub fn measure(chain: &mut GaugeChain, lat: &Lattice, model: &Model, gamma: &LoopPath, kind: SupportKind, schedule: Schedule) -> ObservableSeries {
    let mut out = ObservableSeries::default();
    chain.run(lat, model, schedule, |f| {
        out.wilson.push(model.wilson_loop(&f.sigma, gamma));
        out.minimal_on_loop.push(count_minimal_on_loop(lat, model, f, None, gamma, kind) as u32);
        out.energy.push(model.energy(lat, f));
    });
    out
}

/// Per-(g, h) Poisson laws of the current given the edge state.
#[derive(Clone, Debug)]
pub struct CurrentLaw {
    k: usize,
    log_mean: Vec<f64>,
    dists: Vec<Option<Poisson<f64>>>,
}

impl CurrentLaw {
    pub fn new(model: &Model, offset: f64) -> Self {
        let k = model.higgs.order();
        let n = model.group.order() * k;
        let means: Vec<f64> = (0..n).map(|i| model.current_mean(i / k, i % k, offset)).collect();
        Self {
            k,
            log_mean: means.iter().map(|&m| if m > 0.0 { libm::log(m) } else { f64::NEG_INFINITY }).collect(),
            dists: means.iter().map(|&m| if m > 0.0 { Poisson::new(m).ok() } else { None }).collect(),
        }
    }

    #[inline]
    pub fn log_mean(&self, g: usize, h: usize) -> f64 {
        self.log_mean[g * self.k + h]
    }

    #[inline]
    pub fn sample<R: Rng>(&self, g: usize, h: usize, rng: &mut R) -> u32 {
        match &self.dists[g * self.k + h] {
            Some(p) => p.sample(rng) as u32,
            None => 0,
        }
    }
}

/// Draws `I(e) ~ Poisson(kappa (g_e + c))` independently on every edge.
pub fn sample_currents<R: Rng>(lat: &Lattice, model: &Model, law: &CurrentLaw, field: &GaugeHiggsField, rng: &mut R) -> Vec<u32> {
    (0..lat.num_edges()).map(|e| law.sample(field.sigma[e], model.ratio_on(lat, &field.phi, e), rng)).collect()
}

/// Data-augmentation chain on `(sigma, phi, I)`: Metropolis on the fields
/// given the currents, then a fresh draw of the currents given the fields.
#[derive(Clone, Debug)]
pub struct CurrentChain {
    pub field: GaugeHiggsField,
    pub currents: Vec<u32>,
    pub offset: f64,
    pub rng: ChainRng,
    law: CurrentLaw,
}

impl CurrentChain {
    pub fn new(lat: &Lattice, model: &Model, offset: f64, seed: u64, stream: u64) -> Self {
        let law = CurrentLaw::new(model, offset);
        let mut rng = chain_rng(seed, stream);
        let field = GaugeHiggsField::identity(lat);
        let currents = sample_currents(lat, model, &law, &field, &mut rng);
        Self { field, currents, offset, rng, law }
    }

    fn current_delta(&self, e: usize, g_old: usize, h_old: usize, g_new: usize, h_new: usize) -> f64 {
        let i = self.currents[e];
        if i == 0 {
            return 0.0;
        }
        i as f64 * (self.law.log_mean(g_new, h_new) - self.law.log_mean(g_old, h_old))
    }

    pub fn sweep(&mut self, lat: &Lattice, model: &Model) {
        let ng = model.group.order();
        for e in 0..lat.num_edges() {
            let old = self.field.sigma[e];
            let g = self.rng.random_range(0..ng);
            if g == old {
                continue;
            }
            let h = model.ratio_on(lat, &self.field.phi, e);
            let plaq: f64 = lat
                .edge_plaquettes(e)
                .iter()
                .map(|&p| {
                    let before = model.plaquette_weight(model.holonomy(lat, &self.field.sigma, p));
                    self.field.sigma[e] = g;
                    let after = model.plaquette_weight(model.holonomy(lat, &self.field.sigma, p));
                    self.field.sigma[e] = old;
                    after - before
                })
                .sum();
            let d = plaq + self.current_delta(e, old, h, g, h);
            if accept(&mut self.rng, d) {
                self.field.sigma[e] = g;
            }
        }
        let dom = &model.domain;
        for v in 0..lat.num_vertices() {
            let old = self.field.phi[v];
            let new = dom[self.rng.random_range(0..dom.len())];
            if new == old {
                continue;
            }
            let mut d = 0.0;
            for &e in lat.incident_edges(v) {
                let (x, y) = lat.endpoints(e);
                let (h_old, h_new) = if x == v {
                    (model.higgs.ratio(old, self.field.phi[y]), model.higgs.ratio(new, self.field.phi[y]))
                } else {
                    (model.higgs.ratio(self.field.phi[x], old), model.higgs.ratio(self.field.phi[x], new))
                };
                let g = self.field.sigma[e];
                d += self.current_delta(e, g, h_old, g, h_new);
            }
            if accept(&mut self.rng, d) {
                self.field.phi[v] = new;
            }
        }
        self.currents = sample_currents(lat, model, &self.law, &self.field, &mut self.rng);
    }
}

/// Metropolis chain for the decorrelation model on `(eta, phi)`.
#[derive(Clone, Debug)]
pub struct KnChain {
    pub field: KnField,
    pub rng: ChainRng,
}

impl KnChain {
    pub fn new(lat: &Lattice, seed: u64, stream: u64) -> Self {
        Self { field: KnField::identity(lat), rng: chain_rng(seed, stream) }
    }

    pub fn sweep(&mut self, lat: &Lattice, model: &Model) {
        let ng = model.group.order();
        let dom = &model.domain;
        for v in 0..lat.num_vertices() {
            let eta = self.rng.random_range(0..ng);
            let phi = self.field.phi[v];
            if eta != self.field.eta[v] {
                let d = model.kn_delta(lat, &self.field, v, eta, phi);
                if accept(&mut self.rng, d) {
                    self.field.eta[v] = eta;
                }
            }
            let phi = dom[self.rng.random_range(0..dom.len())];
            let eta = self.field.eta[v];
            if phi != self.field.phi[v] {
                let d = model.kn_delta(lat, &self.field, v, eta, phi);
                if accept(&mut self.rng, d) {
                    self.field.phi[v] = phi;
                }
            }
        }
    }

    /// Currents of the decorrelation model: `Poisson(kappa (g(eta_x eta_y^{-1}, h) + c))`.
    pub fn sample_currents(&mut self, lat: &Lattice, model: &Model, law: &CurrentLaw) -> Vec<u32> {
        let g = &model.group;
        (0..lat.num_edges())
            .map(|e| {
                let (x, y) = lat.endpoints(e);
                let a = g.mul(self.field.eta[x], g.inv(self.field.eta[y]));
                law.sample(a, model.higgs.ratio(self.field.phi[x], self.field.phi[y]), &mut self.rng)
            })
            .collect()
    }
}

/// Exact one-site Metropolis kernel for an edge: `(new value, probability)`
/// pairs, used to check detailed balance on tiny systems.
pub fn edge_kernel(lat: &Lattice, model: &Model, field: &GaugeHiggsField, e: usize) -> Vec<(usize, f64)> {
    let ng = model.group.order() as f64;
    let mut out = vec![0.0; model.group.order()];
    for (g, slot) in out.iter_mut().enumerate() {
        if g != field.sigma[e] {
            *slot = acceptance(model.delta_edge(lat, field, e, g)) / ng;
        }
    }
    let stay = 1.0 - out.iter().sum::<f64>();
    out[field.sigma[e]] += stay;
    out.into_iter().enumerate().collect()
}

/// Exact one-site Metropolis kernel for a vertex, over domain values.
pub fn vertex_kernel(lat: &Lattice, model: &Model, field: &GaugeHiggsField, v: usize) -> Vec<(usize, f64)> {
    let nd = model.domain.len() as f64;
    let mut out: Vec<(usize, f64)> = model
        .domain
        .iter()
        .map(|&h| (h, if h == field.phi[v] { 0.0 } else { acceptance(model.delta_vertex(lat, field, v, h)) / nd }))
        .collect();
    let stay = 1.0 - out.iter().map(|x| x.1).sum::<f64>();
    for slot in &mut out {
        if slot.0 == field.phi[v] {
            slot.1 += stay;
        }
    }
    out
}
