//! Error budgets of the minimal-vortex approximations.
//!
//! Every bound is reported with the precondition under which it holds. When
//! a precondition fails the bound is vacuous and reported at its trivial cap
//! (1 for a total-variation distance, `2 Tr rho(1)` for a Wilson-loop gap).
//! Unspecified universal constants are taken to be 1.

use crate::animals::vortex_growth_constant;
use crate::model::Model;
use crate::predictor::{phi_minimal, phi_minimal_gauge};

/// Knot-count growth constant: at most `KNOT_GROWTH^m` knots of size `m`
/// contain a given plaquette.
pub const KNOT_GROWTH: f64 = 1e24;

/// Size limit of a single excitation in the cube-counting argument; `alpha`
/// takes the `2 * binom(8, 2)`-th root of the current factor.
pub const CURRENT_ROOT: f64 = 56.0;

/// Scale-dependent inputs that are not functions of the model alone.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BudgetInputs {
    pub dim: usize,
    pub loop_len: usize,
    /// Box size `K` around the loop.
    pub box_size: usize,
    /// Random-current offset `c`.
    pub offset: f64,
    /// Decay rate `c` of the decorrelation estimate.
    pub decorrelation_rate: f64,
    /// Decay rate `c'` of the single-site decorrelation estimate.
    pub site_decorrelation_rate: f64,
    /// Smallest probability of an endpoint configuration under the
    /// decorrelation model.
    pub min_site_probability: f64,
    /// Operator norm of the corrected vortex matrix.
    pub d_norm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bound {
    /// The right-hand side as displayed, evaluated even outside its regime.
    pub raw: f64,
    pub valid: bool,
    /// Trivial bound used when the displayed one does not apply.
    pub cap: f64,
}

impl Bound {
    fn new(raw: f64, valid: bool, cap: f64) -> Self {
        Self { raw, valid, cap }
    }

    /// The usable bound: `raw` capped, or the cap outside the regime.
    pub fn value(&self) -> f64 {
        if self.valid && self.raw.is_finite() {
            self.raw.min(self.cap)
        } else {
            self.cap
        }
    }

    pub fn is_vacuous(&self) -> bool {
        self.value() >= self.cap
    }
}

/// Preconditions of the individual estimates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Validity {
    /// `C(d) C1 < 1`.
    pub large_vortices: bool,
    /// `2(d-1) C(d) D < 1`.
    pub poisson: bool,
    /// `1e24 alpha < 1`.
    pub knots: bool,
    /// `frak_c < 1`.
    pub knot_poisson: bool,
    /// `12 K^4 frak_b^6 < 1`.
    pub box_poisson: bool,
    /// A positive lower bound on endpoint probabilities is available.
    pub site_probability: bool,
}

/// Gaps of the model that drive every estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelGaps {
    /// `Tr rho(1) - max_{a != 1} Re Tr rho(a)`.
    pub rho: f64,
    /// `f(1,1) - max_{(a,b) != (1,1)} f(a,b)`.
    pub f: f64,
    /// `max f - min f`.
    pub f_spread: f64,
    /// Largest shifted edge energy `max g_e + c`.
    pub current_top: f64,
}

impl ModelGaps {
    pub fn of(model: &Model, offset: f64) -> Self {
        let trace_one = model.rep.character(0).re;
        let top = (1..model.group.order()).map(|a| model.rep.character(a).re).fold(f64::NEG_INFINITY, f64::max);
        let hs = model.reachable_ratios();
        let mut f_next = f64::NEG_INFINITY;
        for g in 0..model.group.order() {
            for &h in &hs {
                if (g, h) != (0, 0) {
                    f_next = f_next.max(model.f(g, h));
                }
            }
        }
        let (lo, hi) = model.f_range();
        Self {
            rho: trace_one - top,
            f: model.f(0, 0) - f_next,
            f_spread: hi - lo,
            current_top: model.edge_raw_range().1 + offset,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorBudget {
    pub gaps: ModelGaps,
    /// `C(d)`.
    pub growth: f64,
    pub c1: f64,
    /// The constant `D` of the large-vortex reduction.
    pub d_const: f64,
    pub alpha: f64,
    /// `frak_c = 6 (1e24 alpha)^6 / (1 - 1e24 alpha)`.
    pub knot_const: f64,
    /// `frak_b`, the easy bound with `Phi_UB(P(e)) <= frak_b^6`.
    pub cube_const: f64,
    /// `L = |G|^24 |H|^24 exp[96 kappa (max f - min f)]`.
    pub l_const: f64,
    /// `12 K^4 frak_b^6`.
    pub box_const: f64,
    /// Minimal-vortex weight with the Higgs factor.
    pub phi: f64,
    /// Minimal-vortex weight of the gauge field alone.
    pub phi_gauge: f64,
    /// `|gamma| phi`.
    pub lambda: f64,
    /// `|gamma| phi_gauge`.
    pub lambda_gauge: f64,
    pub validity: Validity,
    /// `|E W - E rho(-1)^M|` from large vortices.
    pub reduction: Bound,
    /// Total variation of the minimal-vortex count to `Poisson(lambda)`.
    pub poisson_tv: Bound,
    /// `|E W - E rho(-1)^X|`, `X ~ Poisson(lambda)`.
    pub main_abelian: Bound,
    /// Probability that some knot touches the loop.
    pub knot_event: Bound,
    /// Total variation to `Poisson(lambda_gauge)` with knots.
    pub poisson_tv_knots: Bound,
    /// `|E W - E Tr A^X|`.
    pub main_knots: Bound,
    /// Probability of the rare low-disorder event.
    pub rare_event: Bound,
    /// Total variation to `Poisson(|gamma| ||D||)` inside the box.
    pub poisson_tv_box: Bound,
    /// `|E W - E D^X|`.
    pub main_decorrelated: Bound,
}

/// Evaluates every constant and right-hand side at the model's couplings.
pub fn theorem_budgets(model: &Model, inputs: &BudgetInputs) -> ErrorBudget {
    let d = inputs.dim as f64;
    let gamma = inputs.loop_len as f64;
    let k = inputs.box_size as f64;
    let (beta, kappa) = (model.beta, model.kappa);
    let order = model.group.order() as f64;
    let trace_one = model.rep.character(0).re;
    let wilson_cap = 2.0 * trace_one;
    let gaps = ModelGaps::of(model, inputs.offset);
    let growth = vortex_growth_constant(inputs.dim);

    // Large-vortex reduction and the abelian Poisson comparison.
    let plaquette_decay = libm::exp(-2.0 * beta * gaps.rho);
    let edge_decay = libm::exp(-kappa * gaps.f / (d - 1.0));
    let c1 = 256.0 * plaquette_decay.max(edge_decay);
    let large_vortices = growth * c1 < 1.0;
    let d_const = [plaquette_decay, edge_decay].iter().map(|&t| t / (1.0 - 256.0 * growth * t)).fold(f64::NEG_INFINITY, f64::max);
    let reduction_raw = 2.0
        * (d - 1.0)
        * gamma
        * libm::pow(256.0 * growth, 2.0 * (d - 1.0) + 1.0)
        * libm::exp(-4.0 * (d - 1.0) * beta * gaps.rho)
        * d_const;
    let reduction = Bound::new(reduction_raw, large_vortices, wilson_cap);

    let phi = phi_minimal(model, inputs.dim);
    let lambda = gamma * phi;
    let q = 2.0 * (d - 1.0) * growth * d_const;
    let poisson = large_vortices && q < 1.0;
    let b1 = 8.0 * (d - 1.0) * gamma * phi * phi;
    let b3 = gamma * phi * q / (1.0 - q);
    let poisson_tv = Bound::new(b1 + 2.0 * b3, poisson, 1.0);
    let main_abelian = Bound::new(b1 + 2.0 * b3 + reduction_raw, poisson, wilson_cap);

    // Knot decomposition with random currents.
    let psi_gap = -gaps.rho;
    let current = kappa * gaps.current_top;
    let current_factor = if current > 0.0 { libm::pow(current * libm::exp(current), 1.0 / CURRENT_ROOT) } else { 0.0 };
    let alpha = 16.0 * order * libm::exp(2.0 * beta * psi_gap).max(current_factor);
    let scaled = KNOT_GROWTH * alpha;
    let knots = scaled < 1.0;
    let knot_const = 6.0 * libm::pow(scaled, 6.0) / (1.0 - scaled);
    let knot_poisson = knots && knot_const < 1.0;
    let phi_gauge = phi_minimal_gauge(model, inputs.dim);
    let lambda_gauge = gamma * phi_gauge;
    let loop_decay = libm::exp(4.0 * (d - 1.0) * beta * psi_gap);
    let resum = libm::pow(1.0 / (1.0 - scaled), 5.0);
    let knot_event_raw = order * gamma * loop_decay * resum;
    let knot_event = Bound::new(knot_event_raw, knots, 1.0);
    let tv_knots_raw = gamma * phi_gauge * phi_gauge + 2.0 * knot_const * gamma * phi_gauge;
    let poisson_tv_knots = Bound::new(tv_knots_raw, knot_poisson, 1.0);
    let main_knots = Bound::new(knot_event_raw + tv_knots_raw, knot_poisson, wilson_cap);

    // Low-disorder support with decorrelation inside a box of size K.
    let higgs_order = model.higgs.order() as f64;
    let cube_const = libm::pow(order, 4.0) * libm::exp(2.0 * beta * psi_gap) * libm::exp(8.0 * kappa * gaps.f_spread);
    let cube6 = libm::pow(cube_const, 6.0);
    let l_const = libm::pow(order, 24.0) * libm::pow(higgs_order, 24.0) * libm::exp(96.0 * kappa * gaps.f_spread);
    let k4 = libm::pow(k, 4.0);
    let box_const = 12.0 * k4 * cube6;
    let box_poisson = box_const < 1.0;
    let site_probability = inputs.min_site_probability > 0.0;
    let rare_raw = k4 * order * gamma * loop_decay * resum + k4 * gamma * cube6 * cube6;
    let rare_event = Bound::new(rare_raw, knots, 1.0);
    let leak = libm::pow(k, 3.0) * libm::exp(-inputs.decorrelation_rate * k) * l_const;
    let dn = inputs.d_norm;
    let spread = ((1.0 - box_const) * (dn - leak) - (dn + leak)).abs();
    let tv_box_raw = 12.0 * gamma * k4 * cube6 * cube6 + 2.0 * gamma * spread;
    let poisson_tv_box = Bound::new(tv_box_raw, box_poisson, 1.0);
    let decor = gamma * gamma * cube6 * leak * libm::exp(cube6 * gamma * l_const);
    let site_decay = libm::exp(-inputs.site_decorrelation_rate * k);
    let site_l = (1.0 + site_decay) * l_const;
    let site = gamma * cube6 * site_l * site_decay / inputs.min_site_probability * libm::exp(gamma * cube6 * site_l);
    let main_decorrelated = Bound::new(tv_box_raw + rare_raw + decor + site, knots && box_poisson && site_probability, wilson_cap);

    ErrorBudget {
        gaps,
        growth,
        c1,
        d_const,
        alpha,
        knot_const,
        cube_const,
        l_const,
        box_const,
        phi,
        phi_gauge,
        lambda,
        lambda_gauge,
        validity: Validity { large_vortices, poisson, knots, knot_poisson, box_poisson, site_probability },
        reduction,
        poisson_tv,
        main_abelian,
        knot_event,
        poisson_tv_knots,
        main_knots,
        rare_event,
        poisson_tv_box,
        main_decorrelated,
    }
}
