use proptest::prelude::*;
use vortex_core::oracle::{exact_expectation, DEFAULT_BUDGET};
use vortexlab::{run_config, Command, ExperimentConfig};

const TINY: &str = r#"{"dims": [2, 2], "model": {"kind": "toy"}, "beta": 0.6, "kappa": 0.4, "seed": 3,
    "loop": {"corner": [0, 0], "axes": [0, 1], "extent": [1, 1]},
    "schedule": {"burn_in": 500, "samples": 4000, "thin": 5, "chains": 4}}"#;

#[test]
fn exact_report_matches_oracle() {
    let a = run_config(Command::Exact, TINY, None, Some(2)).unwrap();
    let cfg = ExperimentConfig::from_json(TINY).unwrap();
    let (lat, model) = (cfg.lattice().unwrap(), cfg.model().unwrap());
    let gamma = cfg.require_gamma(&lat).unwrap();
    let w = exact_expectation(&lat, &model, DEFAULT_BUDGET, |f| model.wilson_loop(&f.sigma, &gamma)).unwrap();
    let got = a.report["results"]["wilson_loop"][0].as_f64().unwrap();
    assert!((got - w.re).abs() < 1e-12, "{got} vs {}", w.re);
    let law: f64 = std::str::from_utf8(&a.series[0].1)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((law - 1.0).abs() < 1e-12);
}

#[test]
fn compare_agrees_with_exact_on_tiny_lattice() {
    let a = run_config(Command::Compare, TINY, None, None).unwrap();
    let r = &a.report["results"];
    assert_eq!(r["exact_within_sigmas"], true, "{r}");
    assert_eq!(r["budget_name"], "main_abelian");
    assert!(r["sigma"].as_f64().unwrap() > 0.0);
}

#[test]
fn loop_is_required_where_used() {
    let text = r#"{"dims": [2, 2], "model": {"kind": "toy"}, "beta": 1.0, "kappa": 1.0, "seed": 1}"#;
    assert_eq!(run_config(Command::Sample, text, None, None).unwrap_err().exit_code(), 2);
    assert!(run_config(Command::Exact, text, None, None).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn config_survives_a_round_trip(beta in 0.0f64..5.0, kappa in 0.0f64..5.0, seed in any::<u64>(), chains in 1u64..8) {
        let text = format!(
            r#"{{"dims": [3, 3, 3], "model": {{"kind": "character", "group": "quaternion", "higgs_order": 4, "higgs_domain": "quotient"}},
                "beta": {beta}, "kappa": {kappa}, "seed": {seed}, "schedule": {{"chains": {chains}}}}}"#
        );
        let cfg = ExperimentConfig::from_json(&text).unwrap();
        let again = ExperimentConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        prop_assert_eq!(&again, &cfg);
        prop_assert_eq!(cfg.model().unwrap().domain, vec![0, 1]);
    }

    #[test]
    fn thread_count_does_not_change_exact_reports(beta in 0.0f64..2.0, kappa in 0.0f64..2.0, threads in 2usize..5) {
        let text = format!(r#"{{"dims": [2, 1], "model": {{"kind": "toy"}}, "beta": {beta}, "kappa": {kappa}, "seed": 0}}"#);
        let one = run_config(Command::Exact, &text, None, Some(1)).unwrap();
        let many = run_config(Command::Exact, &text, None, Some(threads)).unwrap();
        prop_assert_eq!(one.report_bytes(), many.report_bytes());
    }
}
