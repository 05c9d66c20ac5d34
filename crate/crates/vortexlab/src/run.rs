//! Subcommand drivers. Each returns [`Artifacts`]: a JSON report and CSV
//! series whose bytes depend only on the config and seed.

use std::path::Path;
use std::time::Duration;

use rayon::prelude::*;
use serde_json::{json, Value};
use vortex_core::budget::Bound;
use vortex_core::oracle::{exact_magnetization, Enumerator, Merge, WeightedSums};
use vortex_core::percolation::{activation_bound, bulk_edge, decay_profile, magnetization_table, MagnetizationTable};
use vortex_core::predictor::{a_matrix, d_matrix, minimal_gauge_weight, phi_minimal, phi_minimal_gauge, poisson_moment, poisson_trace_moment, tv_empirical, x_table};
use vortex_core::sampler::{chain_rng, measure, GaugeChain, ObservableSeries};
use vortex_core::stats::{batch_means, mean_stderr, poisson_pmf, Estimate, MIN_BATCHES};
use vortex_core::support::{count_minimal_on_loop, support_low_disorder};
use vortex_core::{theorem_budgets, BudgetInputs, CMatrix, ErrorBudget, Lattice, LoopPath, Model, SupportKind, C64};

use crate::config::{ExperimentConfig, MagnetizationSource};
use crate::error::{HarnessError, Result};

/// Bootstrap resamples behind every empirical total-variation error bar.
pub const BOOTSTRAP_RESAMPLES: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Exact,
    Sample,
    Predict,
    Compare,
    Perc,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Sample => "sample",
            Self::Predict => "predict",
            Self::Compare => "compare",
            Self::Perc => "perc",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Artifacts {
    pub command: Command,
    pub report: Value,
    /// `(file name, CSV bytes)`.
    pub series: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn report_bytes(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(&self.report).expect("reports are plain JSON values");
        out.push(b'\n');
        out
    }

    /// Writes the report, the series and a `run_meta.json` sidecar holding
    /// the wall-clock time and thread count, which are the only
    /// nondeterministic outputs.
    pub fn write(&self, dir: &Path, elapsed: Duration, threads: usize) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(format!("{}.json", self.command.name())), self.report_bytes())?;
        for (name, bytes) in &self.series {
            std::fs::write(dir.join(name), bytes)?;
        }
        let meta = json!({ "command": self.command.name(), "wall_clock_seconds": elapsed.as_secs_f64(), "threads": threads });
        std::fs::write(dir.join("run_meta.json"), serde_json::to_vec_pretty(&meta)?)?;
        Ok(())
    }
}

pub fn version_stamp() -> Value {
    json!({
        "name": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "git_rev": option_env!("VORTEXLAB_GIT_REV"),
    })
}

/// Runs `command` on `cfg`. The caller resolves seed overrides and installs
/// the thread pool.
pub fn execute(command: Command, cfg: &ExperimentConfig) -> Result<Artifacts> {
    let seed = cfg.seed()?;
    let lat = cfg.lattice()?;
    let model = cfg.model()?;
    let (results, series) = match command {
        Command::Exact => exact(cfg, &lat, &model)?,
        Command::Sample => sample(cfg, &lat, &model, seed)?,
        Command::Predict => predict(cfg, &lat, &model, seed)?,
        Command::Compare => compare(cfg, &lat, &model, seed)?,
        Command::Perc => perc(cfg, &lat, &model, seed)?,
    };
    let report = json!({
        "tool": version_stamp(),
        "command": command.name(),
        "config": cfg,
        "results": results,
    });
    Ok(Artifacts { command, report, series })
}

type Output = (Value, Vec<(String, Vec<u8>)>);

fn complex(c: C64) -> Value {
    json!([c.re, c.im])
}

fn matrix(m: &CMatrix) -> Value {
    let n = m.dim();
    Value::Array((0..n).map(|i| Value::Array((0..n).map(|j| complex(m.get(i, j))).collect())).collect())
}

fn estimate(e: Estimate) -> Value {
    json!({ "mean": e.mean, "stderr": e.stderr })
}

fn bound(b: &Bound) -> Value {
    json!({ "raw": b.raw, "valid": b.valid, "cap": b.cap, "value": b.value(), "vacuous": b.is_vacuous() })
}

fn budget_json(b: &ErrorBudget) -> Value {
    json!({
        "gaps": { "rho": b.gaps.rho, "f": b.gaps.f, "f_spread": b.gaps.f_spread, "current_top": b.gaps.current_top },
        "constants": {
            "growth": b.growth, "c1": b.c1, "d_const": b.d_const, "alpha": b.alpha, "knot_const": b.knot_const,
            "cube_const": b.cube_const, "l_const": b.l_const, "box_const": b.box_const,
        },
        "phi": b.phi, "phi_gauge": b.phi_gauge, "lambda": b.lambda, "lambda_gauge": b.lambda_gauge,
        "validity": {
            "large_vortices": b.validity.large_vortices, "poisson": b.validity.poisson, "knots": b.validity.knots,
            "knot_poisson": b.validity.knot_poisson, "box_poisson": b.validity.box_poisson,
            "site_probability": b.validity.site_probability,
        },
        "reduction": bound(&b.reduction),
        "poisson_tv": bound(&b.poisson_tv),
        "main_abelian": bound(&b.main_abelian),
        "knot_event": bound(&b.knot_event),
        "poisson_tv_knots": bound(&b.poisson_tv_knots),
        "main_knots": bound(&b.main_knots),
        "rare_event": bound(&b.rare_event),
        "poisson_tv_box": bound(&b.poisson_tv_box),
        "main_decorrelated": bound(&b.main_decorrelated),
    })
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.into_inner().map_err(|e| HarnessError::Io(e.into_error()))
}

/// Every state's weight fed through `f`, chunks reduced in parallel and
/// merged in index order so the sums do not depend on the thread count.
fn parallel_fold<A, F>(en: &Enumerator<'_>, f: F) -> A
where
    A: Default + Merge + Send,
    F: Fn(&mut A, &vortex_core::GaugeHiggsField, f64) + Sync,
{
    let parts: Vec<A> = (0..en.num_chunks())
        .into_par_iter()
        .map(|c| {
            let mut acc = A::default();
            en.fold_chunk(c, &mut acc, &f);
            acc
        })
        .collect();
    parts.into_iter().fold(A::default(), |mut total, p| {
        total.merge(p);
        total
    })
}

/// Observable columns of the exact pass: `Re W`, `Im W`, energy, empty
/// support indicator, then one indicator per value of `M_gamma`.
const EXACT_FIXED: usize = 4;

fn exact_sums(lat: &Lattice, model: &Model, gamma: Option<&LoopPath>, budget: u128) -> Result<(WeightedSums, u64, usize)> {
    let en = Enumerator::new(lat, model, budget)?;
    let max_m = gamma.map_or(0, |g| g.len());
    let sums: WeightedSums = parallel_fold(&en, |acc: &mut WeightedSums, f, w| {
        let mut vals = vec![0.0; EXACT_FIXED + max_m + 1];
        if let Some(g) = gamma {
            let wl = model.wilson_loop(&f.sigma, g);
            vals[0] = wl.re;
            vals[1] = wl.im;
            let m = count_minimal_on_loop(lat, model, f, None, g, SupportKind::LowDisorder);
            vals[EXACT_FIXED + m.min(max_m)] = 1.0;
        }
        vals[2] = model.energy(lat, f);
        vals[3] = if support_low_disorder(lat, f).is_empty() { 1.0 } else { 0.0 };
        acc.record(w, &vals);
    });
    Ok((sums, en.total(), max_m))
}

fn exact(cfg: &ExperimentConfig, lat: &Lattice, model: &Model) -> Result<Output> {
    let gamma = cfg.gamma(lat)?;
    let (sums, states, max_m) = exact_sums(lat, model, gamma.as_ref(), cfg.enumeration_budget as u128)?;
    let mut results = json!({
        "states": states,
        "log_partition": sums.z.value().ln(),
        "energy": sums.mean(2),
        "empty_support_probability": sums.mean(3),
    });
    let mut series = Vec::new();
    if let Some(g) = &gamma {
        let law: Vec<f64> = (0..=max_m).map(|m| sums.mean(EXACT_FIXED + m)).collect();
        let lambda = g.len() as f64 * phi_minimal(model, lat.dim());
        let tv = 0.5 * (law.iter().enumerate().map(|(k, p)| (p - poisson_pmf(k as u64, lambda)).abs()).sum::<f64>()
            + (1.0 - (0..=max_m).map(|k| poisson_pmf(k as u64, lambda)).sum::<f64>()).max(0.0));
        results["wilson_loop"] = complex(C64::new(sums.mean(0), sums.mean(1)));
        results["minimal_on_loop_mean"] = json!(law.iter().enumerate().map(|(k, p)| k as f64 * p).sum::<f64>());
        results["lambda"] = json!(lambda);
        results["poisson_tv"] = json!(tv);
        let rows = law.iter().enumerate().map(|(k, p)| vec![k.to_string(), p.to_string(), poisson_pmf(k as u64, lambda).to_string()]);
        series.push(("exact_minimal_on_loop.csv".to_string(), csv_bytes(&["m", "probability", "poisson"], rows)?));
    }
    Ok((results, series))
}

/// Combines independent per-chain estimates of the same mean.
fn pool(parts: &[Estimate]) -> Estimate {
    let n = parts.len() as f64;
    let mean = parts.iter().map(|e| e.mean).sum::<f64>() / n;
    let var = parts.iter().map(|e| e.stderr * e.stderr).sum::<f64>();
    Estimate { mean, stderr: var.sqrt() / n }
}

fn chain_estimate(xs: &[f64]) -> Estimate {
    if xs.len() >= MIN_BATCHES {
        batch_means(xs, MIN_BATCHES).unwrap_or_else(|_| mean_stderr(xs))
    } else {
        mean_stderr(xs)
    }
}

struct Sampled {
    gamma: LoopPath,
    chains: Vec<ObservableSeries>,
    wilson_re: Estimate,
    wilson_im: Estimate,
    energy: Estimate,
    minimal: Estimate,
    lambda: f64,
    tv: (f64, f64),
}

fn run_chains(cfg: &ExperimentConfig, lat: &Lattice, model: &Model, seed: u64) -> Result<Sampled> {
    let gamma = cfg.require_gamma(lat)?;
    let schedule = cfg.schedule.per_chain();
    let kind: SupportKind = cfg.support.into();
    if kind == SupportKind::RandomCurrent {
        return Err(HarnessError::Schema("sampling reports support low_disorder or pure_gauge".into()));
    }
    let chains: Vec<ObservableSeries> = (0..cfg.schedule.chains)
        .into_par_iter()
        .map(|c| {
            let mut chain = GaugeChain::new(lat, seed, c).with_boundary(cfg.boundary.into()).with_rule(cfg.update.into());
            measure(&mut chain, lat, model, &gamma, kind, schedule)
        })
        .collect();
    let per = |f: &dyn Fn(&ObservableSeries) -> Vec<f64>| pool(&chains.iter().map(|s| chain_estimate(&f(s))).collect::<Vec<_>>());
    let wilson_re = per(&|s| s.wilson.iter().map(|w| w.re).collect());
    let wilson_im = per(&|s| s.wilson.iter().map(|w| w.im).collect());
    let energy = per(&|s| s.energy.clone());
    let minimal = per(&|s| s.minimal_on_loop.iter().map(|&m| m as f64).collect());
    let pooled: Vec<u32> = chains.iter().flat_map(|s| s.minimal_on_loop.iter().copied()).collect();
    let lambda = gamma.len() as f64 * phi_minimal(model, lat.dim());
    // one stream past the chains drives the bootstrap
    let mut rng = chain_rng(seed, cfg.schedule.chains);
    let tv = tv_empirical(&pooled, lambda, BOOTSTRAP_RESAMPLES, &mut rng);
    Ok(Sampled { gamma, chains, wilson_re, wilson_im, energy, minimal, lambda, tv })
}

fn sample_json(s: &Sampled) -> Value {
    json!({
        "loop_length": s.gamma.len(),
        "wilson_loop": { "re": estimate(s.wilson_re), "im": estimate(s.wilson_im) },
        "energy": estimate(s.energy),
        "minimal_on_loop": estimate(s.minimal),
        "lambda": s.lambda,
        "poisson_tv": { "value": s.tv.0, "bootstrap_stderr": s.tv.1 },
    })
}

fn sample_series(s: &Sampled) -> Result<Vec<(String, Vec<u8>)>> {
    let rows = s.chains.iter().enumerate().flat_map(|(c, ch)| {
        (0..ch.energy.len()).map(move |i| {
            vec![c.to_string(), i.to_string(), ch.wilson[i].re.to_string(), ch.wilson[i].im.to_string(), ch.minimal_on_loop[i].to_string(), ch.energy[i].to_string()]
        })
    });
    let header = ["chain", "sample", "wilson_re", "wilson_im", "minimal_on_loop", "energy"];
    Ok(vec![("sample_series.csv".to_string(), csv_bytes(&header, rows)?)])
}

fn sample(cfg: &ExperimentConfig, lat: &Lattice, model: &Model, seed: u64) -> Result<Output> {
    let s = run_chains(cfg, lat, model, seed)?;
    Ok((sample_json(&s), sample_series(&s)?))
}

struct Prediction {
    phi: f64,
    phi_gauge: f64,
    a: CMatrix,
    d: CMatrix,
    x: Vec<f64>,
    magnetization: &'static str,
    budget: ErrorBudget,
}

fn endpoint_law(cfg: &ExperimentConfig, lat: &Lattice, model: &Model, seed: u64) -> Result<(MagnetizationTable, &'static str)> {
    let edge = bulk_edge(lat);
    let budget = cfg.enumeration_budget as u128;
    let sampled = || magnetization_table(lat, model, edge, cfg.schedule.per_chain(), seed, 0);
    match cfg.predict.magnetization {
        MagnetizationSource::Exact => Ok((exact_magnetization(lat, model, edge, budget)?, "exact")),
        MagnetizationSource::Sampled => Ok((sampled(), "sampled")),
        MagnetizationSource::Auto => match exact_magnetization(lat, model, edge, budget) {
            Ok(m) => Ok((m, "exact")),
            Err(vortex_core::Error::Budget { .. }) => Ok((sampled(), "sampled")),
            Err(e) => Err(e.into()),
        },
    }
}

fn prediction(cfg: &ExperimentConfig, lat: &Lattice, model: &Model, seed: u64, loop_len: usize) -> Result<Prediction> {
    let dim = lat.dim();
    let (m, source) = endpoint_law(cfg, lat, model, seed)?;
    let a = a_matrix(model, dim, cfg.predict.kappa_factor);
    let d = d_matrix(model, &m, dim)?;
    let x = x_table(model, &m)?;
    let min_site = m.first_site().into_iter().filter(|&p| p > 0.0).fold(f64::INFINITY, f64::min);
    let inputs = BudgetInputs {
        dim,
        loop_len,
        box_size: cfg.box_size,
        offset: model.choose_offset_c(),
        decorrelation_rate: cfg.predict.decorrelation_rate,
        site_decorrelation_rate: cfg.predict.site_decorrelation_rate,
        min_site_probability: if min_site.is_finite() { min_site } else { 0.0 },
        d_norm: d.operator_norm(),
    };
    Ok(Prediction {
        phi: phi_minimal(model, dim),
        phi_gauge: phi_minimal_gauge(model, dim),
        a,
        d,
        x,
        magnetization: source,
        budget: theorem_budgets(model, &inputs),
    })
}

/// Predicted Wilson loop: the scalar moment `exp(lambda (a - 1))` for
/// one-dimensional representations, `Tr exp(lambda_gauge (A - 1))` otherwise.
fn predicted_wilson(model: &Model, p: &Prediction, loop_len: usize) -> (C64, f64, &'static str) {
    if model.rep.dim() == 1 {
        (poisson_moment(p.a.get(0, 0), loop_len as f64 * p.phi), p.budget.main_abelian.value(), "main_abelian")
    } else {
        (poisson_trace_moment(&p.a, loop_len as f64 * p.phi_gauge), p.budget.main_knots.value(), "main_knots")
    }
}

fn prediction_json(model: &Model, p: &Prediction, loop_len: usize) -> Value {
    let lambda = loop_len as f64 * p.phi;
    let lambda_gauge = loop_len as f64 * p.phi_gauge;
    let mut v = json!({
        "loop_length": loop_len,
        "phi_minimal": p.phi,
        "phi_minimal_gauge": p.phi_gauge,
        "lambda": lambda,
        "lambda_gauge": lambda_gauge,
        "a_matrix": matrix(&p.a),
        "d_matrix": matrix(&p.d),
        "magnetization": p.magnetization,
        "x": p.x,
        "trace_moment_a": complex(poisson_trace_moment(&p.a, lambda_gauge)),
        "trace_moment_d": complex(poisson_trace_moment(&p.d, lambda_gauge)),
        "budgets": budget_json(&p.budget),
    });
    if model.rep.dim() == 1 {
        v["scalar_moment"] = complex(poisson_moment(p.a.get(0, 0), lambda));
    }
    v
}

fn predict(cfg: &ExperimentConfig, lat: &Lattice, model: &Model, seed: u64) -> Result<Output> {
    let loop_len = cfg.require_gamma(lat)?.len();
    let p = prediction(cfg, lat, model, seed, loop_len)?;
    let dim = lat.dim();
    let rows = (1..model.group.order()).map(|g| {
        vec![g.to_string(), model.group.label(g).to_string(), minimal_gauge_weight(model, dim, g).to_string(), p.x[g].to_string()]
    });
    let series = vec![("predict_weights.csv".to_string(), csv_bytes(&["element", "label", "minimal_weight", "x"], rows)?)];
    Ok((prediction_json(model, &p, loop_len), series))
}

/// Standard errors allowed between an estimate and its target.
pub const COMPARE_SIGMAS: f64 = 3.0;

fn compare(cfg: &ExperimentConfig, lat: &Lattice, model: &Model, seed: u64) -> Result<Output> {
    let s = run_chains(cfg, lat, model, seed)?;
    let loop_len = s.gamma.len();
    let p = prediction(cfg, lat, model, seed, loop_len)?;
    let (predicted, budget, which) = predicted_wilson(model, &p, loop_len);
    let measured = C64::new(s.wilson_re.mean, s.wilson_im.mean);
    let sigma = s.wilson_re.stderr.hypot(s.wilson_im.stderr);
    let gap = (measured - predicted).norm();
    let mut results = json!({
        "measured": sample_json(&s),
        "predicted": prediction_json(model, &p, loop_len),
        "predicted_wilson": complex(predicted),
        "gap": gap,
        "sigma": sigma,
        "budget_name": which,
        "budget": budget,
        "within_budget": gap <= budget + COMPARE_SIGMAS * sigma,
    });
    match exact_sums(lat, model, Some(&s.gamma), cfg.enumeration_budget as u128) {
        Ok((sums, _, _)) => {
            let exact = C64::new(sums.mean(0), sums.mean(1));
            results["exact_wilson"] = complex(exact);
            results["exact_within_sigmas"] = json!((measured - exact).norm() <= COMPARE_SIGMAS * sigma);
        }
        Err(HarnessError::Budget(_)) => results["exact_wilson"] = Value::Null,
        Err(e) => return Err(e),
    }
    Ok((results, sample_series(&s)?))
}

fn perc(cfg: &ExperimentConfig, lat: &Lattice, model: &Model, seed: u64) -> Result<Output> {
    let ks = &cfg.percolation.ks;
    let schedule = cfg.schedule.per_chain();
    // each chain uses two streams: the currents and the bond process
    let chains: Vec<_> = (0..cfg.schedule.chains).into_par_iter().map(|c| decay_profile(lat, model, ks, schedule, seed, 2 * c)).collect();
    let offset = model.choose_offset_c();
    let p = activation_bound(model, offset);
    let points: Vec<(usize, Estimate, Estimate)> = (0..ks.len())
        .map(|i| {
            let cur: Vec<Estimate> = chains.iter().map(|c| c[i].currents).collect();
            let bond: Vec<Estimate> = chains.iter().map(|c| c[i].bond).collect();
            (ks[i], pool(&cur), pool(&bond))
        })
        .collect();
    let dominated = points.iter().all(|(_, c, b)| c.mean <= b.mean + COMPARE_SIGMAS * c.stderr.hypot(b.stderr));
    let decreasing = points.windows(2).all(|w| w[1].1.mean < w[0].1.mean);
    let results = json!({
        "offset": offset,
        "bond_probability": p,
        "points": points.iter().map(|(k, c, b)| json!({ "k": k, "currents": estimate(*c), "bond": estimate(*b) })).collect::<Vec<_>>(),
        "dominated": dominated,
        "log_decreasing": decreasing,
    });
    let rows = points.iter().map(|(k, c, b)| vec![k.to_string(), c.mean.to_string(), c.stderr.to_string(), b.mean.to_string(), b.stderr.to_string()]);
    let series = vec![("perc_profile.csv".to_string(), csv_bytes(&["k", "currents_mean", "currents_stderr", "bond_mean", "bond_stderr"], rows)?)];
    Ok((results, series))
}
