use rand::SeedableRng;
use rayon::prelude::*;

use super::mlp::{Adam, Mlp, Tape};
use crate::product::{episode_reward, AugmentedProduct, Mode, ProductState};
use crate::{Error, Real, Result, SimRng};

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig<T> {
    pub episodes: usize,
    pub horizon: usize,
    pub actor_lr: T,
    pub critic_lr: T,
    pub entropy_coef: T,
    /// Episodes per synchronous update.
    pub batch_size: usize,
    pub seed: u64,
    /// `Some(p)`: sample over all inputs, keep the state on an invalid one and
    /// subtract `p` from that step's return. `None`: mask invalid inputs.
    pub invalid_penalty: Option<T>,
    pub actor_hidden: Vec<usize>,
    pub critic_hidden: Vec<usize>,
    /// Initial states averaged for the reported estimate.
    pub estimate_samples: usize,
    /// End an episode as soon as its outcome no longer depends on the inputs:
    /// the sink became unreachable, or every remaining step is accepting (the
    /// remaining sink draws are then sampled in one go).
    pub shortcut_decided: bool,
    /// With `shortcut_decided`, use the expected return of the skipped sink
    /// draws (`1 - ζ^k` or `ζ^k`) instead of one sampled outcome.
    pub trap_expectation: bool,
}

impl<T: Real> Default for TrainConfig<T> {
    fn default() -> Self {
        Self {
            episodes: 2000,
            horizon: 500,
            actor_lr: T::lit(8e-4),
            critic_lr: T::lit(8e-4),
            entropy_coef: T::lit(0.01),
            batch_size: 16,
            seed: 0,
            invalid_penalty: None,
            actor_hidden: vec![7, 7],
            critic_hidden: vec![7],
            estimate_samples: 64,
            shortcut_decided: true,
            trap_expectation: false,
        }
    }
}

impl<T: Real> TrainConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 || self.batch_size == 0 {
            return Err(Error::InvalidArgument("horizon and batch size must be at least 1".into()));
        }
        if !(self.actor_lr >= T::zero() && self.critic_lr >= T::zero() && self.entropy_coef >= T::zero()) {
            return Err(Error::InvalidArgument("rates must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step<T> {
    pub features: Vec<T>,
    pub q: usize,
    pub action: usize,
    pub mask: Vec<bool>,
    /// The input was invalid and the state was kept (penalty mode only).
    pub invalid: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeRecord<T> {
    pub steps: Vec<Step<T>>,
    pub reached_phi: bool,
    /// Episode return before invalid-input penalties: 0 or 1, or the
    /// expected value of the skipped sink draws with `trap_expectation`.
    pub ret: T,
    pub initial_features: Vec<T>,
}

/// Softmax over the inputs allowed by `mask`; masked entries are exactly 0.
pub fn masked_softmax<T: Real>(logits: &[T], mask: &[bool]) -> Result<Vec<T>> {
    let max = logits
        .iter()
        .zip(mask)
        .filter(|e| *e.1)
        .map(|e| *e.0)
        .fold(None, |m: Option<T>, x| Some(m.map_or(x, |m| m.max(x))))
        .ok_or_else(|| Error::InvalidArgument("no valid input".into()))?;
    let mut p: Vec<T> = logits
        .iter()
        .zip(mask)
        .map(|(&l, &ok)| if ok { (l - max).exp() } else { T::zero() })
        .collect();
    let total: T = p.iter().copied().sum();
    for x in &mut p {
        *x /= total;
    }
    Ok(p)
}

fn sample_index<T: Real>(p: &[T], rng: &mut SimRng) -> usize {
    let x = T::unit_uniform(rng);
    let mut acc = T::zero();
    let mut last = 0;
    for (i, &pi) in p.iter().enumerate() {
        if pi > T::zero() {
            acc += pi;
            last = i;
            if x < acc {
                return i;
            }
        }
    }
    last
}

/// Samples an input from the masked softmax of the actor's logits.
pub fn actor_sample<T: Real>(actor: &Mlp<T>, encoded: &[T], mask: &[bool], rng: &mut SimRng) -> Result<usize> {
    let p = masked_softmax(&actor.forward(encoded), mask)?;
    Ok(sample_index(&p, rng))
}

/// Index of the most probable valid input.
pub fn actor_greedy<T: Real>(actor: &Mlp<T>, encoded: &[T], mask: &[bool]) -> Result<usize> {
    let logits = actor.forward(encoded);
    (0..logits.len())
        .filter(|&i| mask[i])
        .max_by(|&a, &b| logits[a].partial_cmp(&logits[b]).unwrap_or(std::cmp::Ordering::Equal))
        .ok_or_else(|| Error::InvalidArgument("no valid input".into()))
}

fn q_of<T>(x: &ProductState<T>) -> usize {
    match x {
        ProductState::Pair { q, .. } => *q,
        ProductState::Sink => usize::MAX,
    }
}

/// One episode of at most `cfg.horizon` product steps.
pub fn rollout<T: Real>(
    ap: &AugmentedProduct<T>,
    actor: &Mlp<T>,
    cfg: &TrainConfig<T>,
    rng: &mut SimRng,
) -> Result<EpisodeRecord<T>> {
    if actor.input_dim() != ap.feature_dim() || actor.output_dim() != ap.num_inputs() {
        return Err(Error::Shape(format!(
            "actor {:?} for a product with {} features and {} inputs",
            actor.sizes(),
            ap.feature_dim(),
            ap.num_inputs()
        )));
    }
    let mut x = ap.sample_initial(rng);
    let mut features = Vec::with_capacity(ap.feature_dim());
    ap.encode(&x, &mut features)?;
    let initial_features = features.clone();
    let mut steps = Vec::new();
    let mut reached_phi = false;
    let mut expected = None;
    let mut mask = Vec::new();
    for t in 0..cfg.horizon {
        let q = q_of(&x);
        if cfg.shortcut_decided {
            if !ap.phi_reachable(q) {
                break;
            }
            if ap.in_accepting_trap(q) {
                let stay = ap.zeta().powi((cfg.horizon - t) as i32);
                reached_phi = T::unit_uniform(rng) < T::one() - stay;
                if cfg.trap_expectation {
                    expected = Some(match ap.mode() {
                        Mode::UpperBound => T::one() - stay,
                        Mode::LowerBound => stay,
                    });
                }
                break;
            }
        }
        ap.encode(&x, &mut features)?;
        ap.valid_inputs(&x, &mut mask)?;
        let (action, invalid) = match cfg.invalid_penalty {
            None => (actor_sample(actor, &features, &mask, rng)?, false),
            Some(_) => {
                let all = vec![true; mask.len()];
                let a = actor_sample(actor, &features, &all, rng)?;
                (a, !mask[a])
            }
        };
        steps.push(Step {
            features: features.clone(),
            q,
            action,
            mask: if cfg.invalid_penalty.is_some() { vec![true; mask.len()] } else { mask.clone() },
            invalid,
        });
        if invalid {
            continue;
        }
        let (next, phi) = ap.step(&x, action, rng)?;
        if phi {
            reached_phi = true;
            break;
        }
        x = next;
    }
    Ok(EpisodeRecord {
        steps,
        reached_phi,
        ret: expected.unwrap_or_else(|| episode_reward(ap.mode(), reached_phi)),
        initial_features,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Losses<T> {
    pub actor: T,
    pub critic: T,
}

/// Losses and their gradients for a batch. Every step of every episode is a
/// sample; the advantage is the Monte-Carlo return minus the critic value.
/// Losses are averaged over the `batch × horizon` step slots; slots after an
/// episode ended contribute zero.
pub fn batch_gradients<T: Real>(
    actor: &Mlp<T>,
    critic: &Mlp<T>,
    batch: &[EpisodeRecord<T>],
    cfg: &TrainConfig<T>,
) -> (Losses<T>, Vec<T>, Vec<T>) {
    let total: usize = batch.iter().map(|e| e.steps.len()).sum();
    let mut ga = vec![T::zero(); actor.num_params()];
    let mut gc = vec![T::zero(); critic.num_params()];
    if total == 0 {
        return (Losses { actor: T::zero(), critic: T::zero() }, ga, gc);
    }
    let scale = T::one() / T::lit((batch.len() * cfg.horizon.max(1)) as f64);
    let parts: Vec<(T, T, Vec<T>, Vec<T>)> = batch
        .par_iter()
        .map(|ep| {
            let mut ga = vec![T::zero(); actor.num_params()];
            let mut gc = vec![T::zero(); critic.num_params()];
            let (mut la, mut lc) = (T::zero(), T::zero());
            let mut ta = Tape::default();
            let mut tc = Tape::default();
            for st in &ep.steps {
                let penalty = match cfg.invalid_penalty {
                    Some(p) if st.invalid => p,
                    _ => T::zero(),
                };
                let g = ep.ret - penalty;
                critic.forward_tape(&st.features, &mut tc);
                let v = tc.output()[0];
                let adv = g - v;
                lc += adv * adv * scale;
                critic.backward(&tc, &[-T::lit(2.0) * adv * scale], &mut gc);

                actor.forward_tape(&st.features, &mut ta);
                let p = masked_softmax(ta.output(), &st.mask).expect("recorded mask has a valid input");
                let logp: Vec<T> = p.iter().map(|&x| if x > T::zero() { x.ln() } else { T::zero() }).collect();
                let entropy: T = -p.iter().zip(&logp).map(|(&x, &l)| x * l).sum::<T>();
                la += -(adv * logp[st.action] + cfg.entropy_coef * entropy) * scale;
                let dlogits: Vec<T> = (0..p.len())
                    .map(|j| {
                        if !st.mask[j] {
                            return T::zero();
                        }
                        let ind = if j == st.action { T::one() } else { T::zero() };
                        (-adv * (ind - p[j]) + cfg.entropy_coef * p[j] * (logp[j] + entropy)) * scale
                    })
                    .collect();
                actor.backward(&ta, &dlogits, &mut ga);
            }
            (la, lc, ga, gc)
        })
        .collect();
    let (mut la, mut lc) = (T::zero(), T::zero());
    for (a, c, pa, pc) in parts {
        la += a;
        lc += c;
        for (x, y) in ga.iter_mut().zip(pa) {
            *x += y;
        }
        for (x, y) in gc.iter_mut().zip(pc) {
            *x += y;
        }
    }
    (Losses { actor: la, critic: lc }, ga, gc)
}

/// Actor and critic with their optimiser states.
#[derive(Clone, Debug, PartialEq)]
pub struct Agent<T> {
    pub actor: Mlp<T>,
    pub critic: Mlp<T>,
    pub actor_opt: Adam<T>,
    pub critic_opt: Adam<T>,
}

impl<T: Real> Agent<T> {
    pub fn new(ap: &AugmentedProduct<T>, cfg: &TrainConfig<T>) -> Result<Self> {
        let mut rng = SimRng::seed_from_u64(cfg.seed);
        rng.set_stream(u64::MAX - 1);
        let input = ap.feature_dim();
        let mut sizes = vec![input];
        sizes.extend(&cfg.actor_hidden);
        sizes.push(ap.num_inputs());
        let actor = Mlp::new(&sizes, &mut rng)?;
        let mut sizes = vec![input];
        sizes.extend(&cfg.critic_hidden);
        sizes.push(1);
        let critic = Mlp::new(&sizes, &mut rng)?;
        Ok(Self::from_networks(actor, critic))
    }

    pub fn from_networks(actor: Mlp<T>, critic: Mlp<T>) -> Self {
        Self {
            actor_opt: Adam::new(actor.num_params()),
            critic_opt: Adam::new(critic.num_params()),
            actor,
            critic,
        }
    }

    pub fn value(&self, features: &[T]) -> T {
        self.critic.forward(features)[0]
    }
}

/// One synchronous update from a batch. An actor rate of zero leaves the
/// actor and its optimiser state untouched.
pub fn a2c_update<T: Real>(agent: &mut Agent<T>, batch: &[EpisodeRecord<T>], cfg: &TrainConfig<T>) -> Result<Losses<T>> {
    if batch.is_empty() {
        return Err(Error::InvalidArgument("empty batch".into()));
    }
    let (losses, ga, gc) = batch_gradients(&agent.actor, &agent.critic, batch, cfg);
    if !losses.actor.is_finite() || !losses.critic.is_finite() {
        return Err(Error::NonFiniteLoss(format!("actor {}, critic {}", losses.actor, losses.critic)));
    }
    if cfg.actor_lr > T::zero() {
        agent.actor_opt.step(agent.actor.params_mut(), &ga, cfg.actor_lr);
    }
    if cfg.critic_lr > T::zero() {
        agent.critic_opt.step(agent.critic.params_mut(), &gc, cfg.critic_lr);
    }
    Ok(losses)
}

/// Random stream of episode `index` under `seed`.
pub fn episode_rng(seed: u64, index: u64) -> SimRng {
    let mut rng = SimRng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricsRow {
    pub stage: usize,
    pub phase: String,
    /// Episodes completed so far over the whole run.
    pub episode: usize,
    pub return_mean: f64,
    pub actor_loss: f64,
    pub critic_loss: f64,
    /// Mean critic value at the batch's initial states.
    pub estimate: f64,
}

/// Runs `episodes` episodes in batches, numbering their random streams from
/// `first_episode`.
#[allow(clippy::too_many_arguments)]
pub fn train_agent<T: Real>(
    ap: &AugmentedProduct<T>,
    cfg: &TrainConfig<T>,
    agent: &mut Agent<T>,
    episodes: usize,
    first_episode: usize,
    stage: usize,
    phase: &str,
    metrics: &mut Vec<MetricsRow>,
) -> Result<()> {
    cfg.validate()?;
    let mut done = 0;
    while done < episodes {
        let n = cfg.batch_size.min(episodes - done);
        let start = first_episode + done;
        let actor = &agent.actor;
        let batch = (start..start + n)
            .into_par_iter()
            .map(|e| rollout(ap, actor, cfg, &mut episode_rng(cfg.seed, e as u64)))
            .collect::<Result<Vec<_>>>()?;
        let losses = a2c_update(agent, &batch, cfg)?;
        done += n;
        let k = batch.len() as f64;
        metrics.push(MetricsRow {
            stage,
            phase: phase.to_string(),
            episode: first_episode + done,
            return_mean: batch.iter().map(|e| e.ret.to_f64_lossy()).sum::<f64>() / k,
            actor_loss: losses.actor.to_f64_lossy(),
            critic_loss: losses.critic.to_f64_lossy(),
            estimate: batch.iter().map(|e| agent.value(&e.initial_features).to_f64_lossy()).sum::<f64>() / k,
        });
    }
    Ok(())
}

/// Mean critic value over `cfg.estimate_samples` initial product states.
pub fn critic_estimate<T: Real>(ap: &AugmentedProduct<T>, agent: &Agent<T>, cfg: &TrainConfig<T>) -> Result<T> {
    let mut rng = episode_rng(cfg.seed, u64::MAX);
    let n = cfg.estimate_samples.max(1);
    let mut f = Vec::new();
    let mut total = T::zero();
    for _ in 0..n {
        ap.encode(&ap.sample_initial(&mut rng), &mut f)?;
        total += agent.value(&f);
    }
    Ok(total / T::lit(n as f64))
}

#[derive(Clone, Debug)]
pub struct TrainOutcome<T> {
    pub agent: Agent<T>,
    pub estimate: T,
    pub metrics: Vec<MetricsRow>,
}

/// Advantage actor-critic on the augmented product from fresh networks.
pub fn train<T: Real>(ap: &AugmentedProduct<T>, cfg: &TrainConfig<T>) -> Result<TrainOutcome<T>> {
    let mut agent = Agent::new(ap, cfg)?;
    let mut metrics = Vec::new();
    train_agent(ap, cfg, &mut agent, cfg.episodes, 0, 0, "joint", &mut metrics)?;
    let estimate = critic_estimate(ap, &agent, cfg)?;
    Ok(TrainOutcome { agent, estimate, metrics })
}
