use proptest::prelude::*;
use vortex_core::budget::{theorem_budgets, BudgetInputs};
use vortex_core::charges::validate_monochrome;
use vortex_core::dsu::UnionFind;
use vortex_core::knots::knot_decomposition;
use vortex_core::percolation::MagnetizationTable;
use vortex_core::predictor::{a_matrix, d_matrix, poisson_trace_moment, poisson_trace_moment_series, SERIES_TAIL};
use vortex_core::support::{support_low_disorder, support_pure_gauge, vortex_decomposition};
use vortex_core::tree::apply_gauge;
use vortex_core::{
    gauge_fix, make_group, undo_gauge_fix, CMatrix, GaugeHiggsField, GroupKind, HiggsGroup, Lattice, LoopPath, Model, RepChoice,
    SpanningTree,
};

const TOY: [f64; 4] = [1.0, 0.0, -1.0, 0.0];

fn quaternion(beta: f64, kappa: f64) -> Model {
    let (g, r) = make_group(GroupKind::Quaternion, RepChoice::Faithful).unwrap();
    let h = HiggsGroup::new(4).unwrap();
    let dom = h.quotient_representatives(&r.scalar_subgroup(&g)).unwrap();
    Model::character(g, r, h, dom, beta, kappa).unwrap()
}

fn s3(beta: f64, kappa: f64) -> Model {
    let (g, r) = make_group(GroupKind::Symmetric3, RepChoice::Faithful).unwrap();
    let h = HiggsGroup::new(1).unwrap();
    Model::character(g, r, h, vec![0], beta, kappa).unwrap()
}

fn z3(beta: f64, kappa: f64) -> Model {
    let (g, r) = make_group(GroupKind::Cyclic(3), RepChoice::Faithful).unwrap();
    let h = HiggsGroup::new(3).unwrap();
    Model::character(g, r, h, vec![0, 1, 2], beta, kappa).unwrap()
}

fn models(beta: f64, kappa: f64) -> Vec<Model> {
    vec![Model::toy(beta, kappa, TOY).unwrap(), z3(beta, kappa), quaternion(beta, kappa), s3(beta, kappa)]
}

fn random_field(lat: &Lattice, model: &Model, seed: &[u8]) -> GaugeHiggsField {
    let n = model.group.order();
    let dom = &model.domain;
    let byte = |i: usize| seed[i % seed.len()] as usize + i / seed.len();
    GaugeHiggsField {
        sigma: (0..lat.num_edges()).map(|e| byte(e) % n).collect(),
        phi: (0..lat.num_vertices()).map(|v| dom[byte(v + 7) % dom.len()]).collect(),
    }
}

fn lattice() -> impl Strategy<Value = Lattice> {
    prop_oneof![
        (1usize..4, 1usize..4).prop_map(|(a, b)| Lattice::new(&[a, b]).unwrap()),
        (1usize..3, 1usize..3, 1usize..3).prop_map(|(a, b, c)| Lattice::new(&[a, b, c]).unwrap()),
        Just(Lattice::new(&[2, 1, 1, 2]).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn plaquette_energy_is_gauge_invariant(lat in lattice(), seed in prop::collection::vec(any::<u8>(), 1..64), beta in 0.0f64..3.0) {
        for model in models(beta, 0.0) {
            let f = random_field(&lat, &model, &seed);
            let eta: Vec<usize> = (0..lat.num_vertices()).map(|v| (seed[v % seed.len()] as usize * 7 + v) % model.group.order()).collect();
            let moved = apply_gauge(&lat, &model.group, &f.sigma, &eta);
            let a = model.plaquette_energy(&lat, &f.sigma);
            let b = model.plaquette_energy(&lat, &moved);
            prop_assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn abelian_stokes(seed in prop::collection::vec(any::<u8>(), 1..64), w in 1usize..4, h in 1usize..4) {
        let lat = Lattice::new(&[3, 3]).unwrap();
        let model = z3(0.5, 0.5);
        let f = random_field(&lat, &model, &seed);
        let gamma = LoopPath::rectangle(&lat, &[0, 0], (0, 1), (w, h)).unwrap();
        let around = model.group.chain_product(&f.sigma, gamma.edges());
        let mut inside = 0;
        for x in 0..w {
            for y in 0..h {
                let p = lat.plaquette_id(lat.vertex(&[x, y]).unwrap(), 0, 1).unwrap();
                inside = model.group.mul(inside, model.holonomy(&lat, &f.sigma, p));
            }
        }
        prop_assert_eq!(around, inside);
    }

    #[test]
    fn g2_is_symmetric(lat in lattice()) {
        for p in 0..lat.num_plaquettes() {
            for &q in lat.g2_neighbors(p) {
                prop_assert!(lat.g2_adjacent(q, p));
                prop_assert!(q != p);
            }
        }
    }

    #[test]
    fn local_deltas_match_full_energy(lat in lattice(), seed in prop::collection::vec(any::<u8>(), 1..64), beta in 0.0f64..2.0, kappa in 0.0f64..2.0, pick in any::<usize>()) {
        for model in models(beta, kappa) {
            let f = random_field(&lat, &model, &seed);
            let base = model.energy(&lat, &f);
            let e = pick % lat.num_edges();
            let g = (pick / 7) % model.group.order();
            let mut moved = f.clone();
            moved.sigma[e] = g;
            prop_assert!((model.delta_edge(&lat, &f, e, g) - (model.energy(&lat, &moved) - base)).abs() < 1e-9);
            let v = pick % lat.num_vertices();
            let h = model.domain[(pick / 3) % model.domain.len()];
            let mut moved = f.clone();
            moved.phi[v] = h;
            prop_assert!((model.delta_vertex(&lat, &f, v, h) - (model.energy(&lat, &moved) - base)).abs() < 1e-9);
        }
    }

    #[test]
    fn characters_are_cyclic_and_bounded(a in 0usize..8, b in 0usize..8) {
        for model in models(0.0, 0.0) {
            let n = model.group.order();
            let (a, b) = (a % n, b % n);
            let r = &model.rep;
            let ab = r.matrix(a).mul(r.matrix(b)).trace();
            let ba = r.matrix(b).mul(r.matrix(a)).trace();
            prop_assert!((ab - ba).norm() < 1e-12);
            prop_assert!(r.character(a).norm() <= r.dim() as f64 + 1e-12);
        }
    }

    #[test]
    fn support_covers_nontrivial_holonomy(lat in lattice(), seed in prop::collection::vec(any::<u8>(), 1..64)) {
        for model in models(1.0, 1.0) {
            let f = random_field(&lat, &model, &seed);
            let low = support_low_disorder(&lat, &f);
            for &p in support_pure_gauge(&lat, &model, &f.sigma).plaquettes() {
                prop_assert!(low.contains(p));
            }
        }
    }

    #[test]
    fn knots_partition_vortices(seed in prop::collection::vec(any::<u8>(), 1..64), density in 1u8..40) {
        let lat = Lattice::new(&[4, 4, 4]).unwrap();
        let mut f = GaugeHiggsField::identity(&lat);
        for e in 0..lat.num_edges() {
            if seed[e % seed.len()].wrapping_mul(31).wrapping_add(e as u8) < density {
                f.sigma[e] = 1;
            }
        }
        let vs = vortex_decomposition(&lat, &support_low_disorder(&lat, &f));
        let knots = knot_decomposition(&lat, &vs, None);
        let mut seen = vec![0usize; vs.len()];
        for k in &knots {
            let mut plaqs = 0;
            for &i in &k.vortices {
                seen[i] += 1;
                plaqs += vs[i].len();
            }
            prop_assert_eq!(plaqs, k.plaquettes.len());
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn averaged_vortex_matrices_are_contractions(beta in 0.0f64..2.0, kappa in 0.0f64..2.0, weights in prop::collection::vec(0.0f64..1.0, 1024)) {
        for model in models(beta, kappa) {
            for dim in 2..=4 {
                for with_kappa in [false, true] {
                    let a = a_matrix(&model, dim, with_kappa);
                    prop_assert!(a.operator_norm() <= 1.0 + 1e-9);
                    let mut power = CMatrix::identity(a.dim());
                    for _ in 0..6 {
                        prop_assert!(power.trace().norm() <= a.dim() as f64 + 1e-9);
                        power = power.mul(&a);
                    }
                }
                let mut t = MagnetizationTable::zeros(model.group.order(), model.higgs.order());
                for (p, w) in t.probs.iter_mut().zip(&weights) {
                    *p = *w;
                }
                if t.probs.iter().sum::<f64>() == 0.0 {
                    t.probs[0] = 1.0;
                }
                t.normalize();
                prop_assert!(d_matrix(&model, &t, dim).unwrap().operator_norm() <= 1.0 + 1e-9);
            }
        }
    }

    #[test]
    fn decorrelated_matrix_reduces_without_coupling(beta in 0.0f64..2.0, weights in prop::collection::vec(0.01f64..1.0, 1024)) {
        for model in models(beta, 0.0) {
            let mut t = MagnetizationTable::zeros(model.group.order(), model.higgs.order());
            for (p, w) in t.probs.iter_mut().zip(&weights) {
                *p = *w;
            }
            t.normalize();
            let d = d_matrix(&model, &t, 4).unwrap();
            prop_assert!(d.max_abs_diff(&a_matrix(&model, 4, false)) < 1e-12);
        }
    }

    #[test]
    fn poisson_moment_matches_series(beta in 0.0f64..1.5, kappa in 0.0f64..1.0, lambda in 0.0f64..5.0) {
        for model in models(beta, kappa) {
            let a = a_matrix(&model, 4, true);
            let closed = poisson_trace_moment(&a, lambda);
            let series = poisson_trace_moment_series(&a, lambda, SERIES_TAIL);
            prop_assert!((closed - series).norm() < 1e-12, "{} vs {}", closed, series);
        }
    }

    #[test]
    fn valid_budgets_fall_with_beta(b0 in 5.0f64..40.0, step in 0.1f64..5.0, kappa in 0.0f64..300.0, dim in 2usize..=4, loop_len in 4usize..64) {
        let inputs = BudgetInputs {
            dim,
            loop_len,
            box_size: 2,
            offset: 3.0,
            decorrelation_rate: 1.0,
            site_decorrelation_rate: 1.0,
            min_site_probability: 0.01,
            d_norm: 1.0,
        };
        for model in models(b0, kappa) {
            let lo = theorem_budgets(&model, &inputs);
            let hi = theorem_budgets(&model.with_couplings(b0 + step, kappa).unwrap(), &inputs);
            let pairs = [
                (lo.main_abelian, hi.main_abelian),
                (lo.poisson_tv, hi.poisson_tv),
                (lo.reduction, hi.reduction),
                (lo.main_knots, hi.main_knots),
                (lo.poisson_tv_knots, hi.poisson_tv_knots),
                (lo.rare_event, hi.rare_event),
                (lo.poisson_tv_box, hi.poisson_tv_box),
            ];
            for (a, b) in pairs {
                if a.valid && b.valid {
                    prop_assert!(b.raw <= a.raw * (1.0 + 1e-12), "{} > {}", b.raw, a.raw);
                }
            }
        }
    }

    #[test]
    fn spanning_tree_connects_without_cycles(lat in lattice()) {
        let tree = SpanningTree::build(&lat, &[], &[]).unwrap();
        prop_assert_eq!(tree.edges().len() + 1, lat.num_vertices());
        let mut uf = UnionFind::new(lat.num_vertices());
        for &e in tree.edges() {
            let (x, y) = lat.endpoints(e);
            prop_assert!(uf.union(x, y));
        }
        let root = uf.find(0);
        prop_assert!((0..lat.num_vertices()).all(|v| uf.find(v) == root));
    }

    #[test]
    fn gauge_fix_round_trips(lat in lattice(), seed in prop::collection::vec(any::<u8>(), 1..64)) {
        for model in models(0.0, 0.0) {
            let f = random_field(&lat, &model, &seed);
            let tree = SpanningTree::build(&lat, &[], &[]).unwrap();
            let (fixed, eta) = gauge_fix(&lat, &model.group, &f.sigma, &tree, 0);
            prop_assert_eq!(eta[0], 0);
            prop_assert!(tree.edges().iter().all(|&e| fixed[e] == 0));
            prop_assert_eq!(undo_gauge_fix(&lat, &model.group, &fixed, &eta), f.sigma.clone());
        }
    }

    #[test]
    fn complement_of_support_is_monochrome(lat in lattice(), seed in prop::collection::vec(any::<u8>(), 1..64), density in 0u8..80) {
        let mut f = GaugeHiggsField::identity(&lat);
        for e in 0..lat.num_edges() {
            if seed[e % seed.len()].wrapping_add(e as u8) < density {
                f.sigma[e] = 1 + e % 2;
            }
        }
        for v in 0..lat.num_vertices() {
            if seed[(v * 5) % seed.len()] < density {
                f.phi[v] = 1;
            }
        }
        let supp = support_low_disorder(&lat, &f);
        prop_assert!(validate_monochrome(&lat, &f, &supp).is_empty());
    }
}
