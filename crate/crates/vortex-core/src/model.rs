//! Gauge-Higgs Hamiltonians.
//!
//! Conventions: the measure is proportional to `exp(H)` and `H` is
//! normalized so the ground state `sigma = 1`, `phi` constant has `H = 0`.
//! Plaquette and edge terms are summed over both orientations.
//!
//! Every model is compiled to an edge table `f(g, h)`, the oriented edge
//! coupling as a function of the gauge element `g` on the edge and the Higgs
//! ratio `h = phi_x phi_y^{-1}` across it. The unoriented edge energy is
//! `f(g, h) + f(g^{-1}, h^{-1})`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::group::{make_group, FiniteGroup, GroupKind, HiggsGroup, RepChoice, UnitaryRep};
use crate::lattice::Lattice;
use crate::linalg::C64;
use crate::paths::LoopPath;

/// Which family a model was built from; only used for reporting and for
/// the toy-specific closed forms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelKind {
    /// `Z2` gauge, `Z2` Higgs, edge energies `[f(1,1), f(1,-1), f(-1,1), f(-1,-1)]`.
    Toy([f64; 4]),
    /// Edge coupling `Re(h Tr rho(g))`.
    Character,
    /// Any other explicit table.
    Table,
}

#[derive(Clone, Debug)]
pub struct Model {
    pub group: FiniteGroup,
    pub rep: UnitaryRep,
    pub higgs: HiggsGroup,
    /// Allowed Higgs values (the whole group, or coset representatives).
    pub domain: Vec<usize>,
    pub beta: f64,
    pub kappa: f64,
    pub kind: ModelKind,
    f: Vec<f64>,
    edge_raw: Vec<f64>,
    edge_w: Vec<f64>,
    plaq_w: Vec<f64>,
}

/// Gauge field on unoriented edges (positive orientation) and Higgs field on vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaugeHiggsField {
    pub sigma: Vec<usize>,
    pub phi: Vec<usize>,
}

impl GaugeHiggsField {
    /// The ground state `sigma = 1`, `phi = 1`.
    pub fn identity(lat: &Lattice) -> Self {
        Self { sigma: vec![0; lat.num_edges()], phi: vec![0; lat.num_vertices()] }
    }
}

/// Auxiliary gauge transform `eta` and Higgs field for the decorrelation model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnField {
    pub eta: Vec<usize>,
    pub phi: Vec<usize>,
}

impl KnField {
    pub fn identity(lat: &Lattice) -> Self {
        Self { eta: vec![0; lat.num_vertices()], phi: vec![0; lat.num_vertices()] }
    }
}

impl Model {
    /// Builds a model from an explicit oriented edge table indexed `g * k + h`.
    #[allow(clippy::too_many_arguments)]
    pub fn with_table(
        group: FiniteGroup,
        rep: UnitaryRep,
        higgs: HiggsGroup,
        domain: Vec<usize>,
        beta: f64,
        kappa: f64,
        f: Vec<f64>,
        kind: ModelKind,
    ) -> Result<Self> {
        let k = higgs.order();
        if f.len() != group.order() * k {
            return Err(Error::Model(format!("edge table has {} entries, expected {}", f.len(), group.order() * k)));
        }
        if !(beta.is_finite() && kappa.is_finite() && beta >= 0.0 && kappa >= 0.0) {
            return Err(Error::Model("couplings must be finite and non-negative".into()));
        }
        if domain.is_empty() || domain.iter().any(|&h| h >= k) || domain[0] != 0 {
            return Err(Error::Model("Higgs domain must start at the identity and lie in Z_k".into()));
        }
        let n = group.order();
        let mut edge_raw = vec![0.0; n * k];
        for g in 0..n {
            for h in 0..k {
                edge_raw[g * k + h] = f[g * k + h] + f[group.inv(g) * k + higgs.inv(h)];
            }
        }
        let ground = edge_raw[0];
        let edge_w = edge_raw.iter().map(|x| kappa * (x - ground)).collect();
        let d = rep.character(0).re;
        let plaq_w = (0..n).map(|g| 2.0 * beta * (rep.character(g).re - d)).collect();
        Ok(Self { group, rep, higgs, domain, beta, kappa, kind, f, edge_raw, edge_w, plaq_w })
    }

    /// Edge coupling `Re(h Tr rho(g))`, i.e. the unoriented edge energy
    /// `2 Re[phi_x Tr rho(sigma_e) phi_y^{-1}]`.
    pub fn character(
        group: FiniteGroup,
        rep: UnitaryRep,
        higgs: HiggsGroup,
        domain: Vec<usize>,
        beta: f64,
        kappa: f64,
    ) -> Result<Self> {
        let k = higgs.order();
        let f = (0..group.order() * k).map(|i| (higgs.value(i % k) * rep.character(i / k)).re).collect();
        Self::with_table(group, rep, higgs, domain, beta, kappa, f, ModelKind::Character)
    }

    /// The two-charge toy model: `Z2` gauge field, `Z2` Higgs field, and
    /// `energies = [f(1,1), f(1,-1), f(-1,1), f(-1,-1)]` with the first
    /// strictly largest.
    pub fn toy(beta: f64, kappa: f64, energies: [f64; 4]) -> Result<Self> {
        if energies[1..].iter().any(|&e| !(e < energies[0])) {
            return Err(Error::Model("toy energies need f(1,1) strictly above the other three".into()));
        }
        let (group, rep) = make_group(GroupKind::Cyclic(2), RepChoice::Faithful)?;
        let higgs = HiggsGroup::new(2)?;
        // index g * 2 + h with 0 = +1, 1 = -1
        let f = energies.to_vec();
        Self::with_table(group, rep, higgs, vec![0, 1], beta, kappa, f, ModelKind::Toy(energies))
    }

    /// Same group data with different couplings.
    pub fn with_couplings(&self, beta: f64, kappa: f64) -> Result<Self> {
        Self::with_table(
            self.group.clone(),
            self.rep.clone(),
            self.higgs,
            self.domain.clone(),
            beta,
            kappa,
            self.f.clone(),
            self.kind,
        )
    }

    pub fn is_toy(&self) -> bool {
        matches!(self.kind, ModelKind::Toy(_))
    }

    /// Oriented edge coupling `f(g, h)`.
    #[inline]
    pub fn f(&self, g: usize, h: usize) -> f64 {
        self.f[g * self.higgs.order() + h]
    }

    /// Unoriented edge energy `f(g, h) + f(g^{-1}, h^{-1})` before normalization.
    #[inline]
    pub fn edge_raw(&self, g: usize, h: usize) -> f64 {
        self.edge_raw[g * self.higgs.order() + h]
    }

    /// Normalized unoriented edge weight `kappa (g_e - g(1, 1))`.
    #[inline]
    pub fn edge_weight(&self, g: usize, h: usize) -> f64 {
        self.edge_w[g * self.higgs.order() + h]
    }

    /// Normalized unoriented plaquette weight for holonomy `g`.
    #[inline]
    pub fn plaquette_weight(&self, g: usize) -> f64 {
        self.plaq_w[g]
    }

    /// Higgs ratios reachable between two domain values.
    pub fn reachable_ratios(&self) -> Vec<usize> {
        let mut hs: Vec<usize> =
            self.domain.iter().flat_map(|&a| self.domain.iter().map(move |&b| (a, b))).map(|(a, b)| self.higgs.ratio(a, b)).collect();
        hs.sort_unstable();
        hs.dedup();
        hs
    }

    /// Range `(min, max)` of the oriented coupling `f` over all gauge
    /// elements and reachable ratios.
    pub fn f_range(&self) -> (f64, f64) {
        let hs = self.reachable_ratios();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for g in 0..self.group.order() {
            for &h in &hs {
                lo = lo.min(self.f(g, h));
                hi = hi.max(self.f(g, h));
            }
        }
        (lo, hi)
    }

    /// Range of the unoriented edge energy.
    pub fn edge_raw_range(&self) -> (f64, f64) {
        let hs = self.reachable_ratios();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for g in 0..self.group.order() {
            for &h in &hs {
                lo = lo.min(self.edge_raw(g, h));
                hi = hi.max(self.edge_raw(g, h));
            }
        }
        (lo, hi)
    }

    /// Smallest offset making every shifted edge energy at least 1:
    /// `c = max(0, 1 - min g_e)`.
    pub fn choose_offset_c(&self) -> f64 {
        (1.0 - self.edge_raw_range().0).max(0.0)
    }

    /// Holonomy of plaquette `p` in positive orientation.
    #[inline]
    pub fn holonomy(&self, lat: &Lattice, sigma: &[usize], p: usize) -> usize {
        self.group.chain_product(sigma, &lat.plaquette(p).boundary)
    }

    fn holonomy_with(&self, lat: &Lattice, sigma: &[usize], p: usize, edge: usize, value: usize) -> usize {
        lat.plaquette(p).boundary.iter().fold(0, |acc, oe| {
            let s = if oe.edge == edge { value } else { sigma[oe.edge] };
            self.group.mul(acc, if oe.forward { s } else { self.group.inv(s) })
        })
    }

    /// Higgs ratio across edge `e` in positive orientation.
    #[inline]
    pub fn ratio_on(&self, lat: &Lattice, phi: &[usize], e: usize) -> usize {
        let (x, y) = lat.endpoints(e);
        self.higgs.ratio(phi[x], phi[y])
    }

    pub fn plaquette_energy(&self, lat: &Lattice, sigma: &[usize]) -> f64 {
        (0..lat.num_plaquettes()).map(|p| self.plaq_w[self.holonomy(lat, sigma, p)]).sum()
    }

    /// Normalized Hamiltonian `H(sigma, phi) <= 0`.
    pub fn energy(&self, lat: &Lattice, field: &GaugeHiggsField) -> f64 {
        let edges: f64 = (0..lat.num_edges()).map(|e| self.edge_weight(field.sigma[e], self.ratio_on(lat, &field.phi, e))).sum();
        edges + self.plaquette_energy(lat, &field.sigma)
    }

    /// Change of [`energy`](Self::energy) when `sigma_e` becomes `value`.
    pub fn delta_edge(&self, lat: &Lattice, field: &GaugeHiggsField, e: usize, value: usize) -> f64 {
        let old = field.sigma[e];
        if old == value {
            return 0.0;
        }
        let h = self.ratio_on(lat, &field.phi, e);
        let mut delta = self.edge_weight(value, h) - self.edge_weight(old, h);
        for &p in lat.edge_plaquettes(e) {
            delta += self.plaq_w[self.holonomy_with(lat, &field.sigma, p, e, value)] - self.plaq_w[self.holonomy(lat, &field.sigma, p)];
        }
        delta
    }

    /// Change of [`energy`](Self::energy) when `phi_v` becomes `value`.
    pub fn delta_vertex(&self, lat: &Lattice, field: &GaugeHiggsField, v: usize, value: usize) -> f64 {
        let old = field.phi[v];
        if old == value {
            return 0.0;
        }
        let mut delta = 0.0;
        for &e in lat.incident_edges(v) {
            let (x, y) = lat.endpoints(e);
            let (h_old, h_new) = if x == v {
                (self.higgs.ratio(old, field.phi[y]), self.higgs.ratio(value, field.phi[y]))
            } else {
                (self.higgs.ratio(field.phi[x], old), self.higgs.ratio(field.phi[x], value))
            };
            delta += self.edge_weight(field.sigma[e], h_new) - self.edge_weight(field.sigma[e], h_old);
        }
        delta
    }

    /// Energy of a pure gauge field with the Higgs field gauged away:
    /// oriented sums of `kappa (Re Tr rho(sigma_e) - D)` and
    /// `beta (Re Tr rho(d sigma_p) - D)`.
    pub fn gauged_out_energy(&self, lat: &Lattice, sigma: &[usize]) -> f64 {
        let d = self.rep.character(0).re;
        let edges: f64 = sigma.iter().map(|&g| 2.0 * self.kappa * (self.rep.character(g).re - d)).sum();
        edges + self.plaquette_energy(lat, sigma)
    }

    /// Absorbs the Higgs field into the gauge field: `sigma_e -> eta_x sigma_e eta_y^{-1}`
    /// with `rho(eta_v) = phi_v`. Fails unless every Higgs value is the scalar
    /// image of some group element.
    pub fn gauge_out_higgs(&self, lat: &Lattice, field: &GaugeHiggsField) -> Result<Vec<usize>> {
        let n = self.group.order() as u64;
        let mut preimage = vec![usize::MAX; self.higgs.order()];
        for g in 0..self.group.order() {
            if let Some(c) = self.rep.matrix(g).as_scalar(1e-9) {
                if let Some(p) = crate::group::Phase::from_complex(c, n) {
                    if let Some(h) = self.higgs.element_of(p) {
                        if preimage[h] == usize::MAX {
                            preimage[h] = g;
                        }
                    }
                }
            }
        }
        let eta: Vec<usize> = field.phi.iter().map(|&h| preimage[h]).collect();
        if eta.contains(&usize::MAX) {
            return Err(Error::Model("a Higgs value is not in the scalar image of the gauge group".into()));
        }
        Ok((0..lat.num_edges())
            .map(|e| {
                let (x, y) = lat.endpoints(e);
                self.group.mul(self.group.mul(eta[x], field.sigma[e]), self.group.inv(eta[y]))
            })
            .collect())
    }

    /// `Tr rho` of the ordered product along the loop.
    pub fn wilson_loop(&self, sigma: &[usize], gamma: &LoopPath) -> C64 {
        self.rep.character(self.group.chain_product(sigma, gamma.edges()))
    }

    /// Decorrelation energy before normalization:
    /// `sum over oriented e=(v,w) of kappa f(eta_v eta_w^{-1}, phi_v phi_w^{-1})`.
    pub fn kn_energy_raw(&self, lat: &Lattice, field: &KnField) -> f64 {
        (0..lat.num_edges())
            .map(|e| {
                let (x, y) = lat.endpoints(e);
                let a = self.group.mul(field.eta[x], self.group.inv(field.eta[y]));
                self.kappa * self.edge_raw(a, self.higgs.ratio(field.phi[x], field.phi[y]))
            })
            .sum()
    }

    /// Normalized decorrelation energy (zero at constant fields).
    pub fn kn_energy(&self, lat: &Lattice, field: &KnField) -> f64 {
        (0..lat.num_edges())
            .map(|e| {
                let (x, y) = lat.endpoints(e);
                let a = self.group.mul(field.eta[x], self.group.inv(field.eta[y]));
                self.edge_weight(a, self.higgs.ratio(field.phi[x], field.phi[y]))
            })
            .sum()
    }

    /// Change of [`kn_energy`](Self::kn_energy) when vertex `v` takes `(eta, phi)`.
    pub fn kn_delta(&self, lat: &Lattice, field: &KnField, v: usize, eta: usize, phi: usize) -> f64 {
        let g = &self.group;
        let mut delta = 0.0;
        for &e in lat.incident_edges(v) {
            let (x, y) = lat.endpoints(e);
            let (a_old, h_old, a_new, h_new) = if x == v {
                let ey = g.inv(field.eta[y]);
                (g.mul(field.eta[x], ey), self.higgs.ratio(field.phi[x], field.phi[y]), g.mul(eta, ey), self.higgs.ratio(phi, field.phi[y]))
            } else {
                let ex = field.eta[x];
                (
                    g.mul(ex, g.inv(field.eta[y])),
                    self.higgs.ratio(field.phi[x], field.phi[y]),
                    g.mul(ex, g.inv(eta)),
                    self.higgs.ratio(field.phi[x], phi),
                )
            };
            delta += self.edge_weight(a_new, h_new) - self.edge_weight(a_old, h_old);
        }
        delta
    }

    /// Poisson mean `kappa (g_e + c)` of the current on an edge.
    #[inline]
    pub fn current_mean(&self, g: usize, h: usize, c: f64) -> f64 {
        self.kappa * (self.edge_raw(g, h) + c)
    }

    /// Log-weight of the augmented measure on `(sigma, phi, I)`:
    /// plaquette terms plus `sum_e [I_e log(kappa (g_e + c)) - log I_e!]`.
    pub fn random_current_log_weight(&self, lat: &Lattice, field: &GaugeHiggsField, currents: &[u32], c: f64) -> f64 {
        let mut w = self.plaquette_energy(lat, &field.sigma);
        for e in 0..lat.num_edges() {
            w += current_term(self.current_mean(field.sigma[e], self.ratio_on(lat, &field.phi, e), c), currents[e]);
        }
        w
    }
}

/// `I log(mu) - log I!`, with `0 log 0 = 0`.
pub fn current_term(mu: f64, i: u32) -> f64 {
    if i == 0 {
        return 0.0;
    }
    if mu <= 0.0 {
        return f64::NEG_INFINITY;
    }
    i as f64 * libm::log(mu) - libm::lgamma(i as f64 + 1.0)
}
