//! Experiment configuration: the JSON schema and its translation into core
//! objects.

use serde::{Deserialize, Serialize};
use vortex_core::sampler::{Boundary, Schedule, UpdateRule};
use vortex_core::{make_group, CMatrix, FiniteGroup, GroupKind, HiggsGroup, Lattice, LoopPath, Model, RepChoice, SupportKind, UnitaryRep, C64};

use crate::error::{HarnessError, Result};

/// Default number of states an exact run may visit.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = vortex_core::oracle::DEFAULT_BUDGET as u64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Side lengths of the box, one per axis (2 to 4 axes).
    pub dims: Vec<usize>,
    pub model: ModelSpec,
    pub beta: f64,
    pub kappa: f64,
    #[serde(rename = "loop", default, skip_serializing_if = "Option::is_none")]
    pub wilson_loop: Option<LoopSpec>,
    #[serde(default)]
    pub schedule: ScheduleSpec,
    /// Mandatory unless given on the command line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub support: SupportChoice,
    #[serde(default)]
    pub boundary: BoundaryChoice,
    #[serde(default)]
    pub update: UpdateChoice,
    /// Box size `K` around the loop.
    #[serde(default = "default_box_size")]
    pub box_size: usize,
    #[serde(default = "default_budget")]
    pub enumeration_budget: u64,
    #[serde(default)]
    pub percolation: PercolationSpec,
    #[serde(default)]
    pub predict: PredictSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

fn default_box_size() -> usize {
    2
}

fn default_budget() -> u64 {
    DEFAULT_ENUMERATION_BUDGET
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    /// `Z2` gauge and `Z2` Higgs with `[f(1,1), f(1,-1), f(-1,1), f(-1,-1)]`.
    Toy {
        #[serde(default = "default_toy")]
        energies: [f64; 4],
    },
    /// Edge coupling `Re(h Tr rho(g))`.
    Character {
        group: GroupSpec,
        #[serde(default)]
        rep: RepSpec,
        higgs_order: usize,
        #[serde(default)]
        higgs_domain: DomainChoice,
    },
    /// Explicit oriented edge table indexed `g * higgs_order + h`.
    Table {
        group: GroupSpec,
        #[serde(default)]
        rep: RepSpec,
        higgs_order: usize,
        #[serde(default)]
        higgs_domain: DomainChoice,
        f: Vec<f64>,
    },
}

fn default_toy() -> [f64; 4] {
    [1.0, 0.0, -1.0, 0.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupSpec {
    Cyclic(usize),
    Quaternion,
    Symmetric3,
    Custom(CustomGroup),
}

/// A Cayley table with the identity at index 0 and one unitary matrix per
/// element, rows of `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomGroup {
    pub table: Vec<Vec<usize>>,
    #[serde(default)]
    pub labels: Vec<String>,
    pub matrices: Vec<Vec<Vec<[f64; 2]>>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RepSpec {
    #[default]
    Faithful,
    Trivial,
    Character(usize),
    Sign,
    Permutation,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainChoice {
    /// Every element of `Z_k`.
    #[default]
    Full,
    /// Coset representatives modulo the scalar image of the gauge group.
    Quotient,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopSpec {
    pub corner: Vec<usize>,
    pub axes: [usize; 2],
    pub extent: [usize; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    #[serde(default = "default_burn_in")]
    pub burn_in: u64,
    #[serde(default = "default_samples")]
    pub samples: u64,
    #[serde(default = "default_thin")]
    pub thin: u64,
    #[serde(default = "default_chains")]
    pub chains: u64,
}

fn default_burn_in() -> u64 {
    vortex_core::sampler::DEFAULT_BURN_IN
}

fn default_samples() -> u64 {
    1000
}

fn default_thin() -> u64 {
    vortex_core::sampler::DEFAULT_THIN
}

fn default_chains() -> u64 {
    4
}

impl Default for ScheduleSpec {
    fn default() -> Self {
        Self { burn_in: default_burn_in(), samples: default_samples(), thin: default_thin(), chains: default_chains() }
    }
}

impl ScheduleSpec {
    pub fn per_chain(&self) -> Schedule {
        Schedule { burn_in: self.burn_in, samples: self.samples, thin: self.thin }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportChoice {
    #[default]
    LowDisorder,
    PureGauge,
    RandomCurrent,
}

impl From<SupportChoice> for SupportKind {
    fn from(s: SupportChoice) -> Self {
        match s {
            SupportChoice::LowDisorder => SupportKind::LowDisorder,
            SupportChoice::PureGauge => SupportKind::PureGauge,
            SupportChoice::RandomCurrent => SupportKind::RandomCurrent,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryChoice {
    #[default]
    Free,
    Frozen,
}

impl From<BoundaryChoice> for Boundary {
    fn from(b: BoundaryChoice) -> Self {
        match b {
            BoundaryChoice::Free => Boundary::Free,
            BoundaryChoice::Frozen => Boundary::Frozen,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateChoice {
    #[default]
    Metropolis,
    HeatBath,
}

impl From<UpdateChoice> for UpdateRule {
    fn from(u: UpdateChoice) -> Self {
        match u {
            UpdateChoice::Metropolis => UpdateRule::Metropolis,
            UpdateChoice::HeatBath => UpdateRule::HeatBath,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PercolationSpec {
    #[serde(default = "default_ks")]
    pub ks: Vec<usize>,
}

fn default_ks() -> Vec<usize> {
    vec![2, 4, 6]
}

impl Default for PercolationSpec {
    fn default() -> Self {
        Self { ks: default_ks() }
    }
}

/// Where the endpoint law on a bulk edge comes from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MagnetizationSource {
    /// Exact when the lattice is enumerable, sampled otherwise.
    #[default]
    Auto,
    Exact,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictSpec {
    /// Include `exp[2 kappa Re(Tr rho(g) - Tr rho(1))]` in the vortex weights.
    #[serde(default)]
    pub kappa_factor: bool,
    #[serde(default)]
    pub magnetization: MagnetizationSource,
    /// Decay rate `c` of the decorrelation estimate.
    #[serde(default = "default_rate")]
    pub decorrelation_rate: f64,
    /// Decay rate `c'` of the single-site estimate.
    #[serde(default = "default_rate")]
    pub site_decorrelation_rate: f64,
}

fn default_rate() -> f64 {
    1.0
}

impl Default for PredictSpec {
    fn default() -> Self {
        Self { kappa_factor: false, magnetization: MagnetizationSource::Auto, decorrelation_rate: default_rate(), site_decorrelation_rate: default_rate() }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| HarnessError::Schema(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(HarnessError::Schema(m.to_string()));
        if !(2..=4).contains(&self.dims.len()) || self.dims.contains(&0) {
            return bad("dims needs 2 to 4 positive side lengths");
        }
        if !(self.beta >= 0.0 && self.kappa >= 0.0 && self.beta.is_finite() && self.kappa.is_finite()) {
            return bad("beta and kappa must be finite and non-negative");
        }
        if self.schedule.samples == 0 || self.schedule.chains == 0 {
            return bad("schedule needs at least one sample and one chain");
        }
        if self.percolation.ks.is_empty() {
            return bad("percolation.ks is empty");
        }
        Ok(())
    }

    pub fn seed(&self) -> Result<u64> {
        self.seed.ok_or(HarnessError::MissingSeed)
    }

    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::new(&self.dims).map_err(|e| HarnessError::Schema(e.to_string()))
    }

    pub fn model(&self) -> Result<Model> {
        let schema = |e: vortex_core::Error| HarnessError::Schema(e.to_string());
        match &self.model {
            ModelSpec::Toy { energies } => Model::toy(self.beta, self.kappa, *energies).map_err(schema),
            ModelSpec::Character { group, rep, higgs_order, higgs_domain } => {
                let (g, r) = build_group(group, *rep)?;
                let h = HiggsGroup::new(*higgs_order).map_err(schema)?;
                let dom = domain(&g, &r, h, *higgs_domain)?;
                Model::character(g, r, h, dom, self.beta, self.kappa).map_err(schema)
            }
            ModelSpec::Table { group, rep, higgs_order, higgs_domain, f } => {
                let (g, r) = build_group(group, *rep)?;
                let h = HiggsGroup::new(*higgs_order).map_err(schema)?;
                let dom = domain(&g, &r, h, *higgs_domain)?;
                Model::with_table(g, r, h, dom, self.beta, self.kappa, f.clone(), vortex_core::ModelKind::Table).map_err(schema)
            }
        }
    }

    pub fn gamma(&self, lat: &Lattice) -> Result<Option<LoopPath>> {
        self.wilson_loop
            .as_ref()
            .map(|l| {
                LoopPath::rectangle(lat, &l.corner, (l.axes[0], l.axes[1]), (l.extent[0], l.extent[1]))
                    .map_err(|e| HarnessError::Schema(e.to_string()))
            })
            .transpose()
    }

    pub fn require_gamma(&self, lat: &Lattice) -> Result<LoopPath> {
        self.gamma(lat)?.ok_or_else(|| HarnessError::Schema("this subcommand needs a loop".into()))
    }
}

fn domain(g: &FiniteGroup, r: &UnitaryRep, h: HiggsGroup, choice: DomainChoice) -> Result<Vec<usize>> {
    match choice {
        DomainChoice::Full => Ok((0..h.order()).collect()),
        DomainChoice::Quotient => h.quotient_representatives(&r.scalar_subgroup(g)).map_err(|e| HarnessError::Schema(e.to_string())),
    }
}

fn build_group(spec: &GroupSpec, rep: RepSpec) -> Result<(FiniteGroup, UnitaryRep)> {
    let schema = |e: vortex_core::Error| HarnessError::Schema(e.to_string());
    let choice = match rep {
        RepSpec::Faithful => RepChoice::Faithful,
        RepSpec::Trivial => RepChoice::Trivial,
        RepSpec::Character(m) => RepChoice::Character(m),
        RepSpec::Sign => RepChoice::Sign,
        RepSpec::Permutation => RepChoice::Permutation,
    };
    let kind = match spec {
        GroupSpec::Cyclic(n) => GroupKind::Cyclic(*n),
        GroupSpec::Quaternion => GroupKind::Quaternion,
        GroupSpec::Symmetric3 => GroupKind::Symmetric3,
        GroupSpec::Custom(c) => {
            let order = c.table.len();
            if c.table.iter().any(|row| row.len() != order) {
                return Err(HarnessError::Schema("custom group table is not square".into()));
            }
            let g = FiniteGroup::from_table(order, c.table.concat(), c.labels.clone()).map_err(schema)?;
            let mats = c
                .matrices
                .iter()
                .map(|rows| {
                    let n = rows.len();
                    if rows.iter().any(|r| r.len() != n) {
                        return Err(HarnessError::Schema("custom matrix is not square".into()));
                    }
                    Ok(CMatrix::from_rows(n, rows.iter().flatten().map(|&[re, im]| C64::new(re, im)).collect()))
                })
                .collect::<Result<Vec<_>>>()?;
            let r = UnitaryRep::new(&g, mats).map_err(schema)?;
            return Ok((g, r));
        }
    };
    make_group(kind, choice).map_err(schema)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = r#"{"dims": [2, 2], "model": {"kind": "toy"}, "beta": 1.0, "kappa": 0.5, "seed": 3}"#;

    #[test]
    fn minimal_toy_config() {
        let c = ExperimentConfig::from_json(TOY).unwrap();
        assert_eq!(c.schedule, ScheduleSpec::default());
        assert!(c.model().unwrap().is_toy());
        assert_eq!(c.seed().unwrap(), 3);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = TOY.replace("\"seed\"", "\"sed\"");
        assert!(matches!(ExperimentConfig::from_json(&text), Err(HarnessError::Schema(_))));
        let text = TOY.replace("{\"kind\": \"toy\"}", "{\"kind\": \"toy\", \"extra\": 1}");
        assert!(matches!(ExperimentConfig::from_json(&text), Err(HarnessError::Schema(_))));
    }

    #[test]
    fn custom_group_round_trip() {
        let text = r#"{"dims": [2, 2], "beta": 1.0, "kappa": 0.5, "seed": 1,
            "model": {"kind": "character", "higgs_order": 2,
              "group": {"custom": {"table": [[0, 1], [1, 0]], "labels": ["e", "s"],
                "matrices": [[[[1, 0]]], [[[-1, 0]]]]}}}}"#;
        let c = ExperimentConfig::from_json(text).unwrap();
        let m = c.model().unwrap();
        assert_eq!(m.group.order(), 2);
        assert_eq!(m.rep.character(1), C64::new(-1.0, 0.0));
        let again: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn missing_seed_is_its_own_error() {
        let c = ExperimentConfig::from_json(&TOY.replace(", \"seed\": 3", "")).unwrap();
        assert!(matches!(c.seed(), Err(HarnessError::MissingSeed)));
    }
}
