//! Experiment configuration: a single human-editable TOML file, validated
//! field-by-field, echoed into the results directory for provenance.

use std::sync::Arc;

use corruptgp::adversary::RegionCenter;
use corruptgp::confidence::GammaMode;
use corruptgp::kernels::MaternNu;
use corruptgp::simulator::{ObjectivePlan, PolicyPlan};
use corruptgp::{AdversaryStrategy, DomainGrid, ExperimentSetup, GridKernel, Kernel};
use serde::{Deserialize, Serialize};

/// Defaults applied when the config omits a field.
pub mod defaults {
    pub const LAMBDA: f64 = 1.0;
    pub const ALPHA: f64 = 2.0;
    pub const DELTA: f64 = 0.1;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Horizon: rounds per run.
    pub t: u64,
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    pub grid: GridConfig,
    pub kernel: KernelConfig,
    pub objective: ObjectiveConfig,
    pub policy: PolicyConfig,
    #[serde(default)]
    pub noise: NoiseConfig,
    pub adversary: AdversaryConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum KernelConfig {
    SquaredExponential { lengthscale: f64 },
    Matern { nu: NuConfig, lengthscale: f64 },
    Linear { scale: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NuConfig {
    #[serde(rename = "1/2")]
    Half,
    #[serde(rename = "3/2")]
    ThreeHalves,
    #[serde(rename = "5/2")]
    FiveHalves,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ObjectiveConfig {
    /// Fresh random RKHS sample per seed.
    SampleRkhs { centers: usize, norm: f64 },
    /// Fixed kernel expansion; 1-d center coordinates snap to the nearest
    /// grid point.
    KernelMix {
        centers_x: Vec<f64>,
        weights: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        normalize_to: Option<f64>,
    },
    /// Fixed grid values with a claimed norm bound.
    Explicit { values: Vec<f64>, b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyVariant {
    VanillaUcb,
    KnownC,
    FastSlow,
    Layered,
}

impl PolicyVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            PolicyVariant::VanillaUcb => "vanilla-ucb",
            PolicyVariant::KnownC => "known-c",
            PolicyVariant::FastSlow => "fast-slow",
            PolicyVariant::Layered => "layered",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GammaModeConfig {
    Realized,
    AnalyticSe,
}

impl Default for GammaModeConfig {
    fn default() -> Self {
        GammaModeConfig::Realized
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyConfig {
    pub variant: PolicyVariant,
    /// RKHS norm bound fed into the exploration coefficient.
    pub b: f64,
    /// Range bound; defaults to the objective's realized `max |f|`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b0: Option<f64>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Corruption budget known to the policy; required by `known-c` and
    /// `fast-slow`, forbidden otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default)]
    pub gamma_mode: GammaModeConfig,
}

fn default_delta() -> f64 {
    defaults::DELTA
}
fn default_lambda() -> f64 {
    defaults::LAMBDA
}
fn default_alpha() -> f64 {
    defaults::ALPHA
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    /// True noise standard deviation; omitted means `0.05 * b0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AdversaryConfig {
    Zero,
    Region {
        budget: f64,
        /// Region center coordinate; omitted means the true maximizer.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<f64>,
        radius: f64,
        /// Corruption magnitude as a fraction of the optimal value.
        fraction: f64,
    },
    Flatten {
        budget: f64,
    },
    Swap {
        budget: f64,
        target_index: usize,
        delta: f64,
    },
}

impl AdversaryConfig {
    pub fn budget(&self) -> f64 {
        match self {
            AdversaryConfig::Zero => 0.0,
            AdversaryConfig::Region { budget, .. }
            | AdversaryConfig::Flatten { budget }
            | AdversaryConfig::Swap { budget, .. } => *budget,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
}

/// Parse a config document; collects every invariant violation instead of
/// stopping at the first.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, Vec<String>> {
    let config: ExperimentConfig = toml::from_str(text).map_err(|e| vec![e.to_string()])?;
    config.validate()?;
    Ok(config)
}

/// Render a config back to TOML; `parse(render(c)) == c` for valid configs.
pub fn render_config(config: &ExperimentConfig) -> String {
    toml::to_string(config).expect("config serializes")
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), Vec<String>> {
        let mut errors = Vec::new();
        let mut bad = |field: &str, msg: String| errors.push(format!("{field}: {msg}"));

        if self.t < 1 {
            bad("t", "horizon must be >= 1".into());
        }
        if self.seeds.is_empty() {
            bad("seeds", "need at least one seed".into());
        }
        if self.grid.points == 0 {
            bad("grid.points", "need at least one grid point".into());
        }
        if !(self.grid.lo.is_finite() && self.grid.hi.is_finite()) {
            bad("grid", "bounds must be finite".into());
        } else if self.grid.points > 1 && self.grid.lo >= self.grid.hi {
            bad("grid.lo", format!("must be < grid.hi, got [{}, {}]", self.grid.lo, self.grid.hi));
        }

        match &self.kernel {
            KernelConfig::SquaredExponential { lengthscale } | KernelConfig::Matern { lengthscale, .. } => {
                if !(*lengthscale > 0.0) {
                    bad("kernel.lengthscale", format!("must be > 0, got {lengthscale}"));
                }
            }
            KernelConfig::Linear { scale } => {
                if !(*scale > 0.0) {
                    bad("kernel.scale", format!("must be > 0, got {scale}"));
                }
            }
        }

        match &self.objective {
            ObjectiveConfig::SampleRkhs { centers, norm } => {
                if *centers == 0 {
                    bad("objective.centers", "need at least one center".into());
                }
                if !(*norm > 0.0) {
                    bad("objective.norm", format!("must be > 0, got {norm}"));
                }
            }
            ObjectiveConfig::KernelMix { centers_x, weights, normalize_to } => {
                if centers_x.is_empty() {
                    bad("objective.centers_x", "need at least one center".into());
                }
                if centers_x.len() != weights.len() {
                    bad(
                        "objective.weights",
                        format!("{} weights for {} centers", weights.len(), centers_x.len()),
                    );
                }
                if let Some(n) = normalize_to {
                    if !(*n > 0.0) {
                        bad("objective.normalize_to", format!("must be > 0, got {n}"));
                    }
                }
            }
            ObjectiveConfig::Explicit { values, .. } => {
                if values.len() != self.grid.points {
                    bad(
                        "objective.values",
                        format!("{} values for {} grid points", values.len(), self.grid.points),
                    );
                }
                if values.iter().any(|v| !v.is_finite()) {
                    bad("objective.values", "must be finite".into());
                }
            }
        }

        let p = &self.policy;
        if !(p.delta > 0.0 && p.delta < 1.0) {
            bad("policy.delta", format!("must be in (0, 1), got {}", p.delta));
        }
        if !(p.lambda > 0.0) {
            bad("policy.lambda", format!("must be > 0, got {}", p.lambda));
        }
        if !(p.alpha >= 1.0) {
            bad("policy.alpha", format!("must be >= 1, got {}", p.alpha));
        }
        if !(p.b > 0.0) {
            bad("policy.b", format!("must be > 0, got {}", p.b));
        }
        if let Some(b0) = p.b0 {
            if !(b0 >= 0.0) {
                bad("policy.b0", format!("must be >= 0, got {b0}"));
            }
        }
        match p.variant {
            PolicyVariant::KnownC | PolicyVariant::FastSlow => match p.c {
                None => bad("policy.c", format!("{} requires a corruption budget", p.variant.as_str())),
                Some(c) if !(c >= 0.0) => bad("policy.c", format!("must be >= 0, got {c}")),
                _ => {}
            },
            PolicyVariant::VanillaUcb | PolicyVariant::Layered => {
                if p.c.is_some() {
                    bad(
                        "policy.c",
                        format!("{} must not receive a corruption budget", p.variant.as_str()),
                    );
                }
            }
        }
        if p.gamma_mode == GammaModeConfig::AnalyticSe
            && !matches!(self.kernel, KernelConfig::SquaredExponential { .. })
        {
            bad("policy.gamma_mode", "analytic-se needs the squared-exponential kernel".into());
        }

        if let Some(std) = self.noise.std {
            if !(std >= 0.0 && std.is_finite()) {
                bad("noise.std", format!("must be >= 0, got {std}"));
            }
        }

        match &self.adversary {
            AdversaryConfig::Zero => {}
            AdversaryConfig::Region { budget, radius, fraction, .. } => {
                if !(*budget >= 0.0) {
                    bad("adversary.budget", format!("must be >= 0, got {budget}"));
                }
                if !(*radius > 0.0) {
                    bad("adversary.radius", format!("must be > 0, got {radius}"));
                }
                if !(*fraction > 0.0) {
                    bad("adversary.fraction", format!("must be > 0, got {fraction}"));
                }
            }
            AdversaryConfig::Flatten { budget } => {
                if !(*budget >= 0.0) {
                    bad("adversary.budget", format!("must be >= 0, got {budget}"));
                }
            }
            AdversaryConfig::Swap { budget, target_index, delta } => {
                if !(*budget >= 0.0) {
                    bad("adversary.budget", format!("must be >= 0, got {budget}"));
                }
                if *target_index >= self.grid.points {
                    bad("adversary.target_index", format!("{target_index} outside the grid"));
                }
                if !(*delta > 0.0) {
                    bad("adversary.delta", format!("must be > 0, got {delta}"));
                }
            }
        }

        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }

    fn build_kernel(&self) -> anyhow::Result<Kernel> {
        Ok(match &self.kernel {
            KernelConfig::SquaredExponential { lengthscale } => {
                Kernel::squared_exponential(*lengthscale)?
            }
            KernelConfig::Matern { nu, lengthscale } => {
                let nu = match nu {
                    NuConfig::Half => MaternNu::Half,
                    NuConfig::ThreeHalves => MaternNu::ThreeHalves,
                    NuConfig::FiveHalves => MaternNu::FiveHalves,
                };
                Kernel::matern(nu, *lengthscale)?
            }
            KernelConfig::Linear { scale } => Kernel::linear(*scale)?,
        })
    }

    /// Snap a 1-d coordinate onto the nearest grid index.
    fn nearest_index(grid: &DomainGrid, x: f64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, p) in grid.points().enumerate() {
            let d = (p[0] - x).abs();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Translate into the simulator's setup. Assumes `validate` passed.
    pub fn to_setup(&self) -> anyhow::Result<ExperimentSetup> {
        let grid = DomainGrid::uniform(self.grid.lo, self.grid.hi, self.grid.points)?;
        let objective = match &self.objective {
            ObjectiveConfig::SampleRkhs { centers, norm } => {
                ObjectivePlan::SampleRkhs { num_centers: *centers, norm: *norm }
            }
            ObjectiveConfig::KernelMix { centers_x, weights, normalize_to } => {
                ObjectivePlan::KernelMix {
                    center_indices: centers_x.iter().map(|&x| Self::nearest_index(&grid, x)).collect(),
                    weights: weights.clone(),
                    normalize_to: *normalize_to,
                }
            }
            ObjectiveConfig::Explicit { values, b } => {
                ObjectivePlan::Explicit { values: values.clone(), b: *b }
            }
        };
        let gk = Arc::new(GridKernel::new(self.build_kernel()?, grid)?);
        let policy = match self.policy.variant {
            PolicyVariant::VanillaUcb => PolicyPlan::Vanilla,
            PolicyVariant::KnownC => PolicyPlan::KnownC { budget: self.policy.c.unwrap_or(0.0) },
            PolicyVariant::FastSlow => PolicyPlan::FastSlow { budget: self.policy.c.unwrap_or(0.0) },
            PolicyVariant::Layered => PolicyPlan::Layered,
        };
        let adversary = match &self.adversary {
            AdversaryConfig::Zero => AdversaryStrategy::Zero,
            AdversaryConfig::Region { center, radius, fraction, .. } => AdversaryStrategy::Region {
                center: match center {
                    None => RegionCenter::AtMaximizer,
                    Some(x) => RegionCenter::Coord(vec![*x]),
                },
                radius: *radius,
                fraction: *fraction,
            },
            AdversaryConfig::Flatten { .. } => AdversaryStrategy::Flatten,
            AdversaryConfig::Swap { target_index, delta, .. } => {
                AdversaryStrategy::Swap { target: *target_index, delta: *delta }
            }
        };
        Ok(ExperimentSetup {
            gk,
            objective,
            policy,
            adversary,
            adversary_budget: self.adversary.budget(),
            horizon: self.t,
            b: self.policy.b,
            b0: self.policy.b0,
            noise_std: self.noise.std,
            lambda: self.policy.lambda,
            delta: self.policy.delta,
            alpha: self.policy.alpha,
            gamma_mode: match self.policy.gamma_mode {
                GammaModeConfig::Realized => GammaMode::Realized,
                GammaModeConfig::AnalyticSe => GammaMode::AnalyticSe,
            },
        })
    }
}

/// A minimal valid config, the starting point for tests and docs.
pub fn minimal_config() -> ExperimentConfig {
    ExperimentConfig {
        t: 50,
        seeds: vec![0],
        workers: None,
        grid: GridConfig { lo: 0.0, hi: 1.0, points: 200 },
        kernel: KernelConfig::SquaredExponential { lengthscale: 0.2 },
        objective: ObjectiveConfig::SampleRkhs { centers: 20, norm: 2.0 },
        policy: PolicyConfig {
            variant: PolicyVariant::VanillaUcb,
            b: 2.0,
            b0: None,
            delta: defaults::DELTA,
            lambda: defaults::LAMBDA,
            alpha: defaults::ALPHA,
            c: None,
            gamma_mode: GammaModeConfig::Realized,
        },
        noise: NoiseConfig::default(),
        adversary: AdversaryConfig::Zero,
        output: None,
    }
}
