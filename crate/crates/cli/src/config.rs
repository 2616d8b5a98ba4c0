//! Run configuration: TOML schema and construction of library objects.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use ltlsynth::automata::{builtin_automata, load_automaton, Ldba};
use ltlsynth::cmp::{Boat, BoatParams, CartPole, CartPoleParams, Environment, FiniteMdp, FiniteMdpEnv, Interval, Labeling};
use ltlsynth::guided::{Curriculum, Stage};
use ltlsynth::ltl::{parse_ltl, LtlFormula};
use ltlsynth::oracle::SurrogateCheck;
use ltlsynth::product::{AugmentedProduct, EpsilonMode, Mode};
use ltlsynth::rl::TrainConfig;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    pub environment: EnvConfig,
    pub specification: SpecConfig,
    pub labeling: LabelingConfig,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curriculum: Option<CurriculumSection>,
    #[serde(default)]
    pub evaluate: EvaluateSection,
}

fn default_output() -> PathBuf {
    PathBuf::from("runs/latest")
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvConfig {
    Cartpole {
        #[serde(default = "cp_noise")]
        noise_std: f64,
        #[serde(default = "cp_init")]
        init_range: f64,
        #[serde(default)]
        angle_from_cart_velocity: bool,
    },
    Boat {
        #[serde(default = "boat_noise")]
        noise_std: f64,
        #[serde(default = "boat_initial_y")]
        initial_y: [f64; 2],
    },
    /// Explicit MDP in the text format of `FiniteMdp::from_text`; a relative
    /// path is resolved against the config file's directory.
    Finite { path: PathBuf },
}

fn cp_noise() -> f64 {
    CartPoleParams::<f64>::default().noise_std
}
fn cp_init() -> f64 {
    CartPoleParams::<f64>::default().init_range
}
fn boat_noise() -> f64 {
    BoatParams::<f64>::default().noise_std
}
fn boat_initial_y() -> [f64; 2] {
    let (lo, hi) = BoatParams::<f64>::default().initial_y;
    [lo, hi]
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    #[default]
    Upper,
    Lower,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonName {
    #[default]
    Optional,
    Exclusive,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SpecConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    /// `builtin:<name>` or a path to an automaton file.
    pub automaton: String,
    #[serde(default)]
    pub mode: ModeName,
    pub zeta: f64,
    #[serde(default)]
    pub epsilon_mode: EpsilonName,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BoxConfig {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LabelingConfig {
    Cartpole {
        #[serde(default = "cp_reach_lo")]
        reach_lo: f64,
    },
    Boat {
        #[serde(default = "boat_band")]
        band: [f64; 2],
    },
    /// One union of boxes per proposition.
    Boxes { propositions: Vec<String>, regions: Vec<Vec<BoxConfig>> },
    /// Propositions holding at each state of a finite MDP.
    States { propositions: Vec<String>, states: Vec<Vec<String>> },
}

fn cp_reach_lo() -> f64 {
    0.4
}
fn boat_band() -> [f64; 2] {
    [95.0, 105.0]
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub episodes: usize,
    pub horizon: usize,
    pub actor_lr: f64,
    pub critic_lr: f64,
    pub entropy_coef: f64,
    pub batch_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invalid_penalty: Option<f64>,
    pub actor_hidden: Vec<usize>,
    pub critic_hidden: Vec<usize>,
    pub estimate_samples: usize,
    pub shortcut_decided: bool,
    pub trap_expectation: bool,
}

impl Default for TrainSection {
    fn default() -> Self {
        let d = TrainConfig::<f64>::default();
        Self {
            episodes: d.episodes,
            horizon: d.horizon,
            actor_lr: d.actor_lr,
            critic_lr: d.critic_lr,
            entropy_coef: d.entropy_coef,
            batch_size: d.batch_size,
            invalid_penalty: d.invalid_penalty,
            actor_hidden: d.actor_hidden,
            critic_hidden: d.critic_hidden,
            estimate_samples: d.estimate_samples,
            shortcut_decided: d.shortcut_decided,
            trap_expectation: d.trap_expectation,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CurriculumSection {
    #[serde(default = "critic_fraction")]
    pub critic_fraction: f64,
    pub stages: Vec<StageConfig>,
}

fn critic_fraction() -> f64 {
    0.25
}

/// One stage; exactly one of the relaxation fields must be set.
#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct StageConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regions: Option<Vec<Vec<BoxConfig>>>,
    /// Cart-pole reach set `a = [value, 1]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cartpole_reach_lo: Option<f64>,
    /// Boat target band `y ∈ [lo, hi]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boat_band: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub episodes: Option<usize>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluateSection {
    pub trajectories: usize,
    /// Defaults to the training horizon.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    /// Hoeffding ε; derived from `delta` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    pub delta: f64,
    pub safety: Vec<String>,
    pub reach: Vec<String>,
    pub greedy: bool,
    pub log_trajectories: usize,
}

impl Default for EvaluateSection {
    fn default() -> Self {
        Self {
            trajectories: 10_000,
            horizon: None,
            eps: None,
            delta: 1e-6,
            safety: Vec::new(),
            reach: Vec::new(),
            greedy: true,
            log_trajectories: 10,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        Ok(cfg)
    }

    /// Loads and validates a config file, resolving relative paths against
    /// its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg = Self::from_toml(&text).with_context(|| format!("parsing {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let EnvConfig::Finite { path } = &mut cfg.environment {
            *path = resolve(base, path);
        }
        if !cfg.specification.automaton.starts_with("builtin:") {
            let p = resolve(base, Path::new(&cfg.specification.automaton));
            cfg.specification.automaton = p.to_string_lossy().into_owned();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string_pretty(self)?)
    }

    /// Builds every library object once so that schema errors surface before
    /// any training starts.
    pub fn validate(&self) -> Result<()> {
        let ap = self.product()?;
        self.train_config().validate()?;
        if let Some(f) = &self.specification.formula {
            let props: BTreeSet<String> = ap.labeling().propositions().iter().cloned().collect();
            parse_ltl(f, Some(&props)).context("specification.formula")?;
        }
        if self.curriculum.is_some() {
            self.curriculum()?.validate(ap.labeling())?;
        }
        for p in self.evaluate.safety.iter().chain(&self.evaluate.reach) {
            if !ap.labeling().propositions().contains(p) {
                bail!("evaluate: unknown proposition `{p}`");
            }
        }
        if self.evaluate.trajectories == 0 {
            bail!("evaluate.trajectories must be positive");
        }
        Ok(())
    }

    pub fn environment(&self) -> Result<Arc<dyn Environment<f64>>> {
        Ok(match &self.environment {
            EnvConfig::Cartpole { noise_std, init_range, angle_from_cart_velocity } => {
                if !(*noise_std >= 0.0 && *init_range >= 0.0) {
                    bail!("environment: noise_std and init_range must be non-negative");
                }
                Arc::new(CartPole::new(CartPoleParams {
                    noise_std: *noise_std,
                    init_range: *init_range,
                    angle_from_cart_velocity: *angle_from_cart_velocity,
                    ..Default::default()
                }))
            }
            EnvConfig::Boat { noise_std, initial_y } => {
                if !(*noise_std >= 0.0 && initial_y[0] <= initial_y[1]) {
                    bail!("environment: noise_std must be non-negative and initial_y ordered");
                }
                Arc::new(Boat::new(BoatParams {
                    noise_std: *noise_std,
                    initial_y: (initial_y[0], initial_y[1]),
                    ..Default::default()
                }))
            }
            EnvConfig::Finite { path } => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                Arc::new(FiniteMdpEnv::new(FiniteMdp::from_text(&text)?))
            }
        })
    }

    pub fn automaton(&self) -> Result<Ldba> {
        load_automaton_ref(&self.specification.automaton)
    }

    pub fn labeling(&self) -> Result<Labeling<f64>> {
        Ok(match &self.labeling {
            LabelingConfig::Cartpole { reach_lo } => CartPole::labeling(*reach_lo)?,
            LabelingConfig::Boat { band } => Boat::labeling(band[0], band[1])?,
            LabelingConfig::Boxes { propositions, regions } => {
                let dim = self.environment()?.state_dim();
                Labeling::new(dim, propositions.clone(), boxes(regions)?)?
            }
            LabelingConfig::States { propositions, states } => {
                let letters: Vec<Vec<&str>> = states.iter().map(|s| s.iter().map(String::as_str).collect()).collect();
                Labeling::for_finite_states(propositions.clone(), &letters)?
            }
        })
    }

    pub fn product(&self) -> Result<AugmentedProduct<f64>> {
        let s = &self.specification;
        let mode = match s.mode {
            ModeName::Upper => Mode::UpperBound,
            ModeName::Lower => Mode::LowerBound,
        };
        let eps = match s.epsilon_mode {
            EpsilonName::Optional => EpsilonMode::Optional,
            EpsilonName::Exclusive => EpsilonMode::Exclusive,
        };
        let ap = AugmentedProduct::new(self.environment()?, Arc::new(self.automaton()?), self.labeling()?, s.zeta, mode)
            .context("building the product")?;
        Ok(ap.with_epsilon_mode(eps))
    }

    pub fn train_config(&self) -> TrainConfig<f64> {
        let t = &self.train;
        TrainConfig {
            episodes: t.episodes,
            horizon: t.horizon,
            actor_lr: t.actor_lr,
            critic_lr: t.critic_lr,
            entropy_coef: t.entropy_coef,
            batch_size: t.batch_size,
            seed: self.seed,
            invalid_penalty: t.invalid_penalty,
            actor_hidden: t.actor_hidden.clone(),
            critic_hidden: t.critic_hidden.clone(),
            estimate_samples: t.estimate_samples,
            shortcut_decided: t.shortcut_decided,
            trap_expectation: t.trap_expectation,
        }
    }

    pub fn curriculum(&self) -> Result<Curriculum<f64>> {
        let Some(c) = &self.curriculum else {
            bail!("the config has no [curriculum] section");
        };
        let mut stages = Vec::with_capacity(c.stages.len());
        for (i, st) in c.stages.iter().enumerate() {
            let set = [st.radius.is_some(), st.regions.is_some(), st.cartpole_reach_lo.is_some(), st.boat_band.is_some()];
            if set.iter().filter(|&&b| b).count() != 1 {
                bail!("curriculum stage {i}: set exactly one of radius, regions, cartpole_reach_lo, boat_band");
            }
            let mut stage = if let Some(r) = st.radius {
                Stage::radius(r)
            } else if let Some(regions) = &st.regions {
                Stage::regions(boxes(regions)?)
            } else if let Some(a) = st.cartpole_reach_lo {
                Stage::regions(CartPole::labeling(a)?.regions().to_vec())
            } else {
                let [lo, hi] = st.boat_band.unwrap();
                Stage::regions(Boat::labeling(lo, hi)?.regions().to_vec())
            };
            stage.zeta = st.zeta;
            stage.episodes = st.episodes;
            stages.push(stage);
        }
        let mut cur = Curriculum::new(stages);
        cur.critic_fraction = c.critic_fraction;
        Ok(cur)
    }

    pub fn eval_horizon(&self) -> usize {
        self.evaluate.horizon.unwrap_or(self.train.horizon)
    }

    pub fn surrogate(&self) -> SurrogateCheck {
        let safety: Vec<&str> = self.evaluate.safety.iter().map(String::as_str).collect();
        let reach: Vec<&str> = self.evaluate.reach.iter().map(String::as_str).collect();
        SurrogateCheck::new(&safety, &reach)
    }
}

/// Absolute form of `p`, read relative to `base`, so that the config
/// snapshot in a run directory stays loadable.
fn resolve(base: &Path, p: &Path) -> PathBuf {
    let joined = if p.is_relative() { base.join(p) } else { p.to_path_buf() };
    std::fs::canonicalize(&joined).unwrap_or(joined)
}

fn boxes(regions: &[Vec<BoxConfig>]) -> Result<Vec<Vec<Interval<f64>>>> {
    regions
        .iter()
        .map(|bs| bs.iter().map(|b| Ok(Interval::new(b.lo.clone(), b.hi.clone())?)).collect())
        .collect()
}

/// Resolves `builtin:<name>` or reads an automaton file.
pub fn load_automaton_ref(spec: &str) -> Result<Ldba> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        let mut all = builtin_automata();
        let names: Vec<&str> = all.keys().copied().collect();
        return all
            .remove(name)
            .with_context(|| format!("unknown built-in automaton `{name}` (known: {})", names.join(", ")));
    }
    let text = std::fs::read_to_string(spec).with_context(|| format!("reading automaton {spec}"))?;
    load_automaton(&text).with_context(|| format!("parsing automaton {spec}"))
}

/// Formula and its propositions in labelling order, when a config supplies
/// both.
pub fn formula_with_props(cfg: &RunConfig) -> Result<Option<(LtlFormula, Vec<String>)>> {
    let Some(text) = &cfg.specification.formula else { return Ok(None) };
    let props = cfg.labeling()?.propositions().to_vec();
    let set: BTreeSet<String> = props.iter().cloned().collect();
    Ok(Some((parse_ltl(text, Some(&set))?, props)))
}
