//! Leading-order predictions: minimal-vortex weights, the averaged vortex
//! matrices, Poisson moments and the Chen-Stein bound.

use alloc::vec::Vec;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::model::Model;
use crate::percolation::MagnetizationTable;
use crate::stats::{bootstrap_tv, poisson_pmf};

/// Slack allowed when checking that a magnetization table is a law.
pub const TABLE_TOL: f64 = 1e-9;

/// Default truncation of the Poisson series in [`poisson_trace_moment_series`].
pub const SERIES_TAIL: f64 = 1e-15;

/// `exp[4(d-1) beta Re(Tr rho(g) - Tr rho(1))]`: the plaquette factor of a
/// minimal vortex whose centre carries `g` (all `2(d-1)` plaquettes in both
/// orientations).
pub fn minimal_gauge_weight(model: &Model, dim: usize, g: usize) -> f64 {
    libm::exp(2.0 * (dim as f64 - 1.0) * model.plaquette_weight(g))
}

/// Weight of a single minimal vortex with the Higgs field flat across its
/// centre: `sum_{g != 1} exp[4(d-1) beta Re(Tr rho(g) - Tr rho(1))] exp[kappa (g_e(g, 1) - g_e(1, 1))]`.
///
/// For the two-charge toy model this is
/// `exp[-4(d-1) beta Re(rho(1) - rho(-1))] exp[-2 kappa (f(1,1) - f(-1,1))]`.
pub fn phi_minimal(model: &Model, dim: usize) -> f64 {
    (1..model.group.order()).map(|g| minimal_gauge_weight(model, dim, g) * libm::exp(model.edge_weight(g, 0))).sum()
}

/// The pure-gauge part `sum_{g != 1} exp[4(d-1) beta Re(Tr rho(g) - Tr rho(1))]`.
pub fn phi_minimal_gauge(model: &Model, dim: usize) -> f64 {
    (1..model.group.order()).map(|g| minimal_gauge_weight(model, dim, g)).sum()
}

fn weighted_average(model: &Model, weights: &[f64]) -> CMatrix {
    let n = model.rep.dim();
    let total: f64 = weights.iter().sum();
    let mut acc = CMatrix::zeros(n);
    for (g, &w) in weights.iter().enumerate().skip(1) {
        acc = acc.add(&model.rep.matrix(g).scale(C64::new(w / total, 0.0)));
    }
    acc
}

/// Weighted average of `rho(g)` over `g != 1` with the minimal-vortex
/// weights. With `kappa_factor` each weight also carries
/// `exp[2 kappa Re(Tr rho(g) - Tr rho(1))]`.
pub fn a_matrix(model: &Model, dim: usize, kappa_factor: bool) -> CMatrix {
    let trace_one = model.rep.character(0).re;
    let weights: Vec<f64> = (0..model.group.order())
        .map(|g| {
            let extra = if kappa_factor { libm::exp(2.0 * model.kappa * (model.rep.character(g).re - trace_one)) } else { 1.0 };
            if g == 0 {
                0.0
            } else {
                minimal_gauge_weight(model, dim, g) * extra
            }
        })
        .collect();
    weighted_average(model, &weights)
}

fn check_table(model: &Model, m: &MagnetizationTable) -> Result<()> {
    if m.group_order != model.group.order() || m.higgs_order != model.higgs.order() {
        return Err(Error::Magnetization("shape does not match the model"));
    }
    if m.probs.iter().any(|&p| !(p >= -TABLE_TOL)) {
        return Err(Error::Magnetization("negative or non-finite entry"));
    }
    if (m.probs.iter().sum::<f64>() - 1.0).abs() > TABLE_TOL {
        return Err(Error::Magnetization("entries do not sum to one"));
    }
    Ok(())
}

/// Relative change of the Higgs edge weight when the centre edge of a
/// minimal vortex is set to `g`, averaged over the endpoint law:
/// `sum m(eta1, eta2, phi1, phi2) exp[kappa (g_e(eta1 g eta2^{-1}, h) - g_e(eta1 eta2^{-1}, h))]`
/// with `h = phi1 phi2^{-1}`.
pub fn x_of_g(model: &Model, m: &MagnetizationTable, g: usize) -> Result<f64> {
    check_table(model, m)?;
    Ok(x_unchecked(model, m, g))
}

fn x_unchecked(model: &Model, m: &MagnetizationTable, g: usize) -> f64 {
    let grp = &model.group;
    let (n, k) = (grp.order(), model.higgs.order());
    let mut x = 0.0;
    for e1 in 0..n {
        for e2 in 0..n {
            let flat = grp.mul(e1, grp.inv(e2));
            let bent = grp.mul(grp.mul(e1, g), grp.inv(e2));
            for p1 in 0..k {
                for p2 in 0..k {
                    let w = m.get(e1, e2, p1, p2);
                    if w != 0.0 {
                        let h = model.higgs.ratio(p1, p2);
                        x += w * libm::exp(model.kappa * (model.edge_raw(bent, h) - model.edge_raw(flat, h)));
                    }
                }
            }
        }
    }
    x
}

/// `X(g)` for every element; entry 0 is `X(1) = 1`.
pub fn x_table(model: &Model, m: &MagnetizationTable) -> Result<Vec<f64>> {
    check_table(model, m)?;
    Ok((0..model.group.order()).map(|g| x_unchecked(model, m, g)).collect())
}

/// `sum_{g != 1} rho(g) w_g X(g) / sum_{g != 1} w_g X(g)` with the
/// minimal-vortex weights `w_g` of [`a_matrix`].
pub fn d_matrix(model: &Model, m: &MagnetizationTable, dim: usize) -> Result<CMatrix> {
    let x = x_table(model, m)?;
    let weights: Vec<f64> =
        (0..model.group.order()).map(|g| if g == 0 { 0.0 } else { minimal_gauge_weight(model, dim, g) * x[g] }).collect();
    Ok(weighted_average(model, &weights))
}

/// `E[a^N]` for `N ~ Poisson(lambda)`.
pub fn poisson_moment(a: C64, lambda: f64) -> C64 {
    (C64::new(lambda, 0.0) * (a - 1.0)).exp()
}

/// `E[Tr A^N] = Tr exp(lambda (A - I))` for `N ~ Poisson(lambda)`, from the
/// eigenvalues of `A`.
pub fn poisson_trace_moment(a: &CMatrix, lambda: f64) -> C64 {
    a.eigenvalues().into_iter().map(|mu| poisson_moment(mu, lambda)).sum()
}

/// The same moment as a direct Poisson series, stopped once the remaining
/// Poisson mass is below `tail`. Only meaningful for `||A|| <= 1`.
pub fn poisson_trace_moment_series(a: &CMatrix, lambda: f64, tail: f64) -> C64 {
    let mut power = CMatrix::identity(a.dim());
    let mut total = C64::new(0.0, 0.0);
    let mut mass = 0.0;
    for k in 0..10_000u64 {
        let p = poisson_pmf(k, lambda);
        total += power.trace() * p;
        mass += p;
        if k as f64 > lambda && 1.0 - mass < tail {
            break;
        }
        power = power.mul(a);
    }
    total
}

/// Chen-Stein bound `min(1, 1/lambda)(b1 + b2) + min(1, 1.4 lambda^{-1/2}) b3`.
/// With `lambda <= 0` the bound is vacuous (1) unless every input is zero.
pub fn chen_stein(b1: f64, b2: f64, b3: f64, lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return if b1 == 0.0 && b2 == 0.0 && b3 == 0.0 { 0.0 } else { 1.0 };
    }
    (1.0f64).min(1.0 / lambda) * (b1 + b2) + (1.0f64).min(1.4 / libm::sqrt(lambda)) * b3
}

/// Empirical total variation to `Poisson(lambda)` with a bootstrap error.
pub fn tv_empirical<R: Rng>(samples: &[u32], lambda: f64, resamples: usize, rng: &mut R) -> (f64, f64) {
    bootstrap_tv(samples, lambda, resamples, rng)
}
