//! Specification-guided learning: train on a relaxed labelling first, then
//! tighten it stage by stage while keeping the automaton and the networks.

use crate::cmp::{Interval, Labeling};
use crate::product::AugmentedProduct;
use crate::rl::{critic_estimate, train_agent, Agent, MetricsRow, TrainConfig};
use crate::{Error, Real, Result};

/// How one stage relaxes the labelling.
#[derive(Clone, Debug, PartialEq)]
pub enum Relaxation<T> {
    /// Λ_r over the base regions.
    Radius(T),
    /// Replacement regions, one union of boxes per proposition, read with
    /// `r = 0`.
    Regions(Vec<Vec<Interval<T>>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stage<T> {
    pub relaxation: Relaxation<T>,
    /// Sink parameter for this stage; the product's own value when `None`.
    pub zeta: Option<T>,
    /// Episode budget; an even share of `TrainConfig::episodes` when `None`.
    pub episodes: Option<usize>,
}

impl<T> Stage<T> {
    pub fn radius(r: T) -> Self {
        Self { relaxation: Relaxation::Radius(r), zeta: None, episodes: None }
    }

    pub fn regions(regions: Vec<Vec<Interval<T>>>) -> Self {
        Self { relaxation: Relaxation::Regions(regions), zeta: None, episodes: None }
    }

    pub fn with_zeta(mut self, zeta: T) -> Self {
        self.zeta = Some(zeta);
        self
    }

    pub fn with_episodes(mut self, n: usize) -> Self {
        self.episodes = Some(n);
        self
    }
}

/// Stages in training order: the most relaxed first, the exact labelling
/// last.
#[derive(Clone, Debug, PartialEq)]
pub struct Curriculum<T> {
    pub stages: Vec<Stage<T>>,
    /// Share of each later stage's budget spent refitting the critic with
    /// the actor frozen.
    pub critic_fraction: f64,
}

impl<T: Real> Curriculum<T> {
    pub fn new(stages: Vec<Stage<T>>) -> Self {
        Self { stages, critic_fraction: 0.25 }
    }

    /// Pure radius schedule, e.g. `[0.3, 0.1, 0.0]`.
    pub fn from_radii(radii: &[T]) -> Self {
        Self::new(radii.iter().map(|&r| Stage::radius(r)).collect())
    }

    /// A single exact stage; equivalent to plain training.
    pub fn flat() -> Self {
        Self::from_radii(&[T::zero()])
    }

    pub fn num_stages(&self) -> usize {
        self.stages.len()
    }

    /// Labelling and radius used at `stage`.
    pub fn stage_labeling(&self, base: &Labeling<T>, stage: usize) -> Result<(Labeling<T>, T)> {
        let st = self
            .stages
            .get(stage)
            .ok_or_else(|| Error::Curriculum(format!("stage {stage} of {}", self.stages.len())))?;
        match &st.relaxation {
            Relaxation::Radius(r) => Ok((base.clone(), *r)),
            Relaxation::Regions(regions) => {
                let lab = Labeling::new(base.dim(), base.propositions().to_vec(), regions.clone())
                    .map_err(|e| Error::Curriculum(format!("stage {stage}: {e}")))?;
                Ok((lab, T::zero()))
            }
        }
    }

    /// Checks the nesting of consecutive stages (regions contain the next
    /// stage's regions, radii do not grow, and something shrinks), that the
    /// last stage is the exact labelling, and that the ζ values lie in
    /// `(0, 1)` and never decrease.
    pub fn validate(&self, base: &Labeling<T>) -> Result<()> {
        if self.stages.is_empty() {
            return Err(Error::Curriculum("no stages".into()));
        }
        if !(0.0..=1.0).contains(&self.critic_fraction) {
            return Err(Error::Curriculum(format!("critic fraction {} outside [0, 1]", self.critic_fraction)));
        }
        let labs = (0..self.stages.len()).map(|i| self.stage_labeling(base, i)).collect::<Result<Vec<_>>>()?;
        for (i, (lab, r)) in labs.iter().enumerate() {
            if !(*r >= T::zero()) {
                return Err(Error::Curriculum(format!("stage {i}: radius {r} is negative")));
            }
            if let Some((next, r2)) = labs.get(i + 1) {
                if *r < *r2 {
                    return Err(Error::Curriculum(format!("stage {i}: radius {r} below the next stage's {r2}")));
                }
                if !lab.contains_regions_of(next) {
                    return Err(Error::Curriculum(format!("stage {i}: regions do not contain the next stage's")));
                }
                if *r == *r2 && next.contains_regions_of(lab) {
                    return Err(Error::Curriculum(format!("stage {i}: identical to the next stage")));
                }
            }
        }
        let (last, r) = labs.last().unwrap();
        if *r != T::zero() || !(last.contains_regions_of(base) && base.contains_regions_of(last)) {
            return Err(Error::Curriculum("the last stage must be the exact labelling".into()));
        }
        let mut prev: Option<T> = None;
        for (i, z) in self.stages.iter().enumerate().filter_map(|(i, s)| s.zeta.map(|z| (i, z))) {
            if !(z > T::zero() && z < T::one()) {
                return Err(Error::Curriculum(format!("stage {i}: zeta {z} outside (0, 1)")));
            }
            if prev.is_some_and(|p| z < p) {
                return Err(Error::Curriculum(format!("stage {i}: zeta {z} decreases")));
            }
            prev = Some(z);
        }
        Ok(())
    }
}

/// The letter-set labelling of one stage.
#[derive(Clone, Debug)]
pub struct StageLabel<T> {
    pub labeling: Labeling<T>,
    pub radius: T,
}

impl<T: Real> StageLabel<T> {
    /// Letters emitted at `s`, as a mask over letter indices.
    pub fn letters(&self, s: &[T]) -> Result<u64> {
        self.labeling.relaxed_label(self.radius, s)
    }
}

pub fn stage_label_fn<T: Real>(base: &Labeling<T>, cur: &Curriculum<T>, stage: usize) -> Result<StageLabel<T>> {
    let (labeling, radius) = cur.stage_labeling(base, stage)?;
    Ok(StageLabel { labeling, radius })
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageReport {
    pub stage: usize,
    pub radius: f64,
    pub zeta: f64,
    pub episodes: usize,
    /// Critic value at sampled initial states after the stage.
    pub estimate: f64,
}

#[derive(Clone, Debug)]
pub struct GuidedOutcome<T> {
    pub agent: Agent<T>,
    pub stages: Vec<StageReport>,
    pub metrics: Vec<MetricsRow>,
}

/// Product for `stage`: the base product with that stage's labelling,
/// radius and ζ. The automaton is shared, never rebuilt.
pub fn stage_product<T: Real>(base: &AugmentedProduct<T>, cur: &Curriculum<T>, stage: usize) -> Result<AugmentedProduct<T>> {
    let (lab, r) = cur.stage_labeling(base.labeling(), stage)?;
    let mut ap = base.clone().with_labeling(lab)?.with_radius(r)?;
    if let Some(z) = cur.stages[stage].zeta {
        ap = ap.with_zeta(z)?;
    }
    Ok(ap)
}

/// Trains the first stage from scratch; every later stage first refits the
/// critic with the actor frozen, then trains both. `on_stage` sees the agent
/// after each stage.
pub fn guided_train<T: Real>(
    base: &AugmentedProduct<T>,
    cur: &Curriculum<T>,
    cfg: &TrainConfig<T>,
    on_stage: &mut dyn FnMut(&StageReport, &Agent<T>) -> Result<()>,
) -> Result<GuidedOutcome<T>> {
    cur.validate(base.labeling())?;
    cfg.validate()?;
    let share = cfg.episodes / cur.num_stages();
    let mut agent = Agent::new(base, cfg)?;
    let mut metrics = Vec::new();
    let mut stages = Vec::new();
    let mut next_episode = 0;
    for (i, st) in cur.stages.iter().enumerate() {
        let ap = stage_product(base, cur, i)?;
        let budget = st.episodes.unwrap_or(share);
        if i == 0 {
            train_agent(&ap, cfg, &mut agent, budget, next_episode, i, "joint", &mut metrics)?;
        } else {
            let critic_only = (budget as f64 * cur.critic_fraction).round() as usize;
            let frozen = TrainConfig { actor_lr: T::zero(), ..cfg.clone() };
            train_agent(&ap, &frozen, &mut agent, critic_only, next_episode, i, "critic", &mut metrics)?;
            train_agent(&ap, cfg, &mut agent, budget - critic_only, next_episode + critic_only, i, "joint", &mut metrics)?;
        }
        next_episode += budget;
        let report = StageReport {
            stage: i,
            radius: ap.radius().to_f64_lossy(),
            zeta: ap.zeta().to_f64_lossy(),
            episodes: budget,
            estimate: critic_estimate(&ap, &agent, cfg)?.to_f64_lossy(),
        };
        on_stage(&report, &agent)?;
        stages.push(report);
    }
    Ok(GuidedOutcome { agent, stages, metrics })
}

/// Region overrides for the cart-pole reach set `a = [α, 1]`, one stage per
/// `α` (increasing, ending at the objective's `0.4`).
pub fn cartpole_curriculum<T: Real>(alphas: &[T]) -> Result<Curriculum<T>> {
    let stages = alphas
        .iter()
        .map(|&a| Ok(Stage::regions(crate::cmp::CartPole::labeling(a)?.regions().to_vec())))
        .collect::<Result<Vec<_>>>()?;
    Ok(Curriculum::new(stages))
}

/// Region overrides for the boat target band `y ∈ [lo, hi]` with a ζ per
/// stage.
pub fn boat_curriculum<T: Real>(bands: &[(T, T)], zetas: &[T]) -> Result<Curriculum<T>> {
    if bands.len() != zetas.len() {
        return Err(Error::Curriculum(format!("{} bands but {} zeta values", bands.len(), zetas.len())));
    }
    let stages = bands
        .iter()
        .zip(zetas)
        .map(|(&(lo, hi), &z)| Ok(Stage::regions(crate::cmp::Boat::labeling(lo, hi)?.regions().to_vec()).with_zeta(z)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Curriculum::new(stages))
}
