use vortex_core::budget::{theorem_budgets, BudgetInputs};
use vortex_core::oracle::{exact_expectation, exact_magnetization, DEFAULT_BUDGET};
use vortex_core::predictor::{a_matrix, d_matrix, x_table};
use vortex_core::{make_group, GaugeHiggsField, GroupKind, HiggsGroup, Lattice, LoopPath, Model, RepChoice, C64};

fn z3_model(beta: f64, kappa: f64) -> Model {
    let (g, r) = make_group(GroupKind::Cyclic(3), RepChoice::Faithful).unwrap();
    let h = HiggsGroup::new(3).unwrap();
    Model::character(g, r, h, vec![0, 1, 2], beta, kappa).unwrap()
}

/// On two plaquettes sharing one edge, conditioning on the gauge class of a
/// single flip of the shared edge leaves exactly the endpoint law of the
/// decorrelation model, so the conditional Wilson loop is `Tr D`.
#[test]
fn corrected_vortex_matrix_is_conditional_wilson_loop() {
    let lat = Lattice::new(&[2, 1]).unwrap();
    let model = z3_model(0.35, 0.4);
    let e = lat.edge_id(lat.vertex(&[1, 0]).unwrap(), 1).unwrap();
    let plaqs = lat.edge_plaquettes(e).to_vec();
    assert_eq!(plaqs.len(), 2);
    let gamma = LoopPath::rectangle(&lat, &[0, 0], (0, 1), (1, 1)).unwrap();

    let flipped: Vec<(usize, Vec<usize>)> = (1..3)
        .map(|g| {
            let mut sigma = vec![0; lat.num_edges()];
            sigma[e] = g;
            (g, plaqs.iter().map(|&p| model.holonomy(&lat, &sigma, p)).collect())
        })
        .collect();
    let in_class = |f: &GaugeHiggsField| {
        let hol: Vec<usize> = plaqs.iter().map(|&p| model.holonomy(&lat, &f.sigma, p)).collect();
        flipped.iter().any(|(_, h)| *h == hol)
    };
    let joint = exact_expectation(&lat, &model, DEFAULT_BUDGET, |f| {
        if in_class(f) {
            model.wilson_loop(&f.sigma, &gamma)
        } else {
            C64::new(0.0, 0.0)
        }
    })
    .unwrap();
    let prob = exact_expectation(&lat, &model, DEFAULT_BUDGET, |f| C64::new(if in_class(f) { 1.0 } else { 0.0 }, 0.0)).unwrap();
    let conditional = joint / prob.re;

    let m = exact_magnetization(&lat, &model, e, DEFAULT_BUDGET).unwrap();
    let d = d_matrix(&model, &m, 2).unwrap();
    // the loop runs up the shared edge, so its holonomy is the flip itself
    let predicted = d.trace();
    assert!((conditional - predicted).norm() < 1e-10, "{conditional} vs {predicted}");
    // X is far from 1 here, but symmetric under g -> g^{-1}, so D = A
    let x = x_table(&model, &m).unwrap();
    assert!(x[1] < 0.9 && (x[1] - x[2]).abs() < 1e-12);
    assert!((predicted - a_matrix(&model, 2, false).trace()).norm() < 1e-12);
}

/// Every term of the budget at beta = 2, kappa = 0.05 for the toy model in
/// d = 4 with |gamma| = 16 and K = 2, written out from the displayed
/// formulas with the toy gaps substituted by hand.
#[test]
fn worked_budget_term_by_term() {
    let (beta, kappa, gamma, k) = (2.0f64, 0.05f64, 16.0f64, 2.0f64);
    let model = Model::toy(beta, kappa, [1.0, 0.0, -1.0, 0.0]).unwrap();
    let inputs = BudgetInputs {
        dim: 4,
        loop_len: 16,
        box_size: 2,
        offset: 3.0,
        decorrelation_rate: 0.5,
        site_decorrelation_rate: 0.25,
        min_site_probability: 0.02,
        d_norm: 1.0,
    };
    let b = theorem_budgets(&model, &inputs);
    let close = |a: f64, e: f64| (a - e).abs() <= 1e-12 * e.abs().max(1e-300);

    // toy gaps: rho(1) - rho(-1) = 2, f(1,1) - max other f = 1,
    // f spread = 2, max edge energy 2 plus offset 3
    let cd = 20.0 * std::f64::consts::E;
    assert!(close(b.growth, cd));
    let t1 = (-2.0 * beta * 2.0f64).exp();
    let t2 = (-kappa * 1.0 / 3.0f64).exp();
    assert!(close(b.c1, 256.0 * t1.max(t2)));
    assert!(!b.validity.large_vortices);
    let dc = (t1 / (1.0 - 256.0 * cd * t1)).max(t2 / (1.0 - 256.0 * cd * t2));
    assert!(close(b.d_const, dc));
    let reduction = 2.0 * 3.0 * gamma * (256.0 * cd).powf(7.0) * (-12.0 * beta * 2.0f64).exp() * dc;
    assert!(close(b.reduction.raw, reduction));

    let phi = (-24.0 * beta - 4.0 * kappa).exp();
    assert!(close(b.phi, phi));
    assert!(close(b.lambda, gamma * phi));
    let q = 2.0 * 3.0 * cd * dc;
    let tv = 8.0 * 3.0 * gamma * phi * phi + 4.0 * gamma * phi * 3.0 * cd * dc / (1.0 - q);
    assert!(close(b.poisson_tv.raw, tv));
    assert!(close(b.main_abelian.raw, tv + reduction));

    let alpha = 16.0 * 2.0 * (-4.0 * beta).exp().max((kappa * 5.0 * (kappa * 5.0f64).exp()).powf(1.0 / 56.0));
    assert!(close(b.alpha, alpha));
    assert!(!b.validity.knots);
    let s = 1e24 * alpha;
    let frak_c = 6.0 * s.powi(6) / (1.0 - s);
    assert!(close(b.knot_const, frak_c));
    let phi_g = (-24.0 * beta).exp();
    assert!(close(b.phi_gauge, phi_g));
    let knot_event = 2.0 * gamma * (-24.0 * beta).exp() * (1.0 / (1.0 - s)).powi(5);
    assert!(close(b.knot_event.raw, knot_event));
    let tv_knots = gamma * phi_g * phi_g + 2.0 * frak_c * gamma * phi_g;
    assert!(close(b.poisson_tv_knots.raw, tv_knots));
    assert!(close(b.main_knots.raw, knot_event + tv_knots));

    let frak_b = 16.0 * (-4.0 * beta).exp() * (8.0 * kappa * 2.0).exp();
    assert!(close(b.cube_const, frak_b));
    let l = 2f64.powi(48) * (96.0 * kappa * 2.0).exp();
    assert!(close(b.l_const, l));
    let c_tilde = 12.0 * k.powi(4) * frak_b.powi(6);
    assert!(close(b.box_const, c_tilde));
    let rare = k.powi(4) * 2.0 * gamma * (-24.0 * beta).exp() * (1.0 / (1.0 - s)).powi(5) + k.powi(4) * gamma * frak_b.powi(12);
    assert!(close(b.rare_event.raw, rare));
    let leak = k.powi(3) * (-0.5 * k).exp() * l;
    let tv_box = 12.0 * gamma * k.powi(4) * frak_b.powi(12) + 2.0 * gamma * ((1.0 - c_tilde) * (1.0 - leak) - (1.0 + leak)).abs();
    assert!(close(b.poisson_tv_box.raw, tv_box));
    let b6 = frak_b.powi(6);
    let decor = gamma * gamma * b6 * leak * (b6 * gamma * l).exp();
    let sd = (-0.25 * k).exp();
    let site = gamma * b6 * (1.0 + sd) * l * sd / 0.02 * (gamma * b6 * (1.0 + sd) * l).exp();
    let main2 = tv_box + rare + decor + site;
    assert!(main2.is_infinite() || close(b.main_decorrelated.raw, main2));
    assert_eq!(b.main_decorrelated.value(), 2.0);
}
