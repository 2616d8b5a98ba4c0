use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;

use crate::product::{AugmentedProduct, ProductState};
use crate::rl::{actor_greedy, actor_sample, episode_rng, Mlp};
use crate::{Error, Real, Result, SimRng};

/// Output kernel of a finite-memory controller: picks an input of the
/// product from the encoded (state, automaton state) pair.
pub trait ProductPolicy<T>: Sync {
    fn select(&self, features: &[T], mask: &[bool], rng: &mut SimRng) -> Result<usize>;
}

/// A trained actor, sampled or used greedily.
#[derive(Clone, Copy, Debug)]
pub struct ActorPolicy<'a, T> {
    pub actor: &'a Mlp<T>,
    pub greedy: bool,
}

impl<T: Real> ProductPolicy<T> for ActorPolicy<'_, T> {
    fn select(&self, features: &[T], mask: &[bool], rng: &mut SimRng) -> Result<usize> {
        if self.greedy {
            actor_greedy(self.actor, features, mask)
        } else {
            actor_sample(self.actor, features, mask, rng)
        }
    }
}

/// Bounded stand-in for an infinite-horizon objective: every `safety`
/// proposition holds at each checked step and every `reach` proposition holds
/// at some checked step.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SurrogateCheck {
    pub safety: Vec<String>,
    pub reach: Vec<String>,
}

impl SurrogateCheck {
    pub fn new(safety: &[&str], reach: &[&str]) -> Self {
        Self {
            safety: safety.iter().map(|s| s.to_string()).collect(),
            reach: reach.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRow {
    pub trajectory: usize,
    pub step: usize,
    pub state: Vec<f64>,
    pub q: usize,
    pub input: String,
    pub letter: String,
}

/// Per-step records of the first few evaluated trajectories.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrajectoryLog {
    pub rows: Vec<TrajectoryRow>,
}

impl TrajectoryLog {
    /// Columns: `trajectory, step, s0..s{d-1}, q, input, letter`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let dim = self.rows.first().map_or(0, |r| r.state.len());
        let mut header = vec!["trajectory".to_string(), "step".into()];
        header.extend((0..dim).map(|i| format!("s{i}")));
        header.extend(["q".into(), "input".into(), "letter".into()]);
        w.write_record(&header).map_err(csv_err)?;
        for r in &self.rows {
            let mut rec = vec![r.trajectory.to_string(), r.step.to_string()];
            rec.extend(r.state.iter().map(|x| x.to_string()));
            rec.extend([r.q.to_string(), r.input.clone(), r.letter.clone()]);
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

#[derive(Clone, Debug, PartialEq)]
pub struct McReport {
    pub trajectories: usize,
    pub satisfied: usize,
    pub frequency: f64,
    pub horizon: usize,
    /// Failed trajectories by first cause: `safety:<prop>` for the earliest
    /// violated safety proposition, `reach:<prop>` for a reach proposition
    /// never seen.
    pub failures: BTreeMap<String, usize>,
}

struct Outcome {
    failure: Option<String>,
    rows: Vec<TrajectoryRow>,
}

fn prop_bits(props: &[String], names: &[String]) -> Result<Vec<(usize, String)>> {
    let n = props.len();
    names
        .iter()
        .map(|p| {
            props
                .iter()
                .position(|x| x == p)
                .map(|k| (n - 1 - k, p.clone()))
                .ok_or_else(|| Error::UnknownProposition(p.clone()))
        })
        .collect()
}

/// Executes the finite-memory controller that keeps the automaton state as
/// memory and asks `policy` for the next input, for `trajectories` runs of
/// `horizon` environment moves each (ε-moves change only the memory and do
/// not count). The surrogate is checked at the states where the moves are
/// taken, so a horizon of 0 checks nothing. The `φ` sink plays no part.
///
/// Trajectory `i` uses random stream `i` of `seed`; the first `log_first`
/// trajectories are recorded.
#[allow(clippy::too_many_arguments)]
pub fn monte_carlo_satisfaction<T: Real>(
    ap: &AugmentedProduct<T>,
    policy: &dyn ProductPolicy<T>,
    check: &SurrogateCheck,
    trajectories: usize,
    horizon: usize,
    seed: u64,
    log_first: usize,
) -> Result<(McReport, TrajectoryLog)> {
    let lab = ap.labeling();
    let safety = prop_bits(lab.propositions(), &check.safety)?;
    let reach = prop_bits(lab.propositions(), &check.reach)?;
    let nq = ap.automaton().num_states();
    let m = ap.env().num_inputs();

    let run = |i: usize| -> Result<Outcome> {
        let mut rng = episode_rng(seed, i as u64);
        let logging = i < log_first;
        let mut rows = Vec::new();
        let mut x = ap.sample_initial(&mut rng);
        let mut seen = vec![false; reach.len()];
        let mut features = Vec::new();
        let mut mask = Vec::new();
        let mut moves = 0;
        let mut eps_run = 0;
        let mut step = 0;
        while moves < horizon {
            let ProductState::Pair { s, q } = &x else { unreachable!("the executor never enters the sink") };
            let letter = lab.label(s);
            if eps_run == 0 {
                if let Some((_, p)) = safety.iter().find(|(b, _)| letter >> b & 1 == 0) {
                    return Ok(Outcome { failure: Some(format!("safety:{p}")), rows });
                }
                for (k, (b, _)) in reach.iter().enumerate() {
                    seen[k] |= letter >> b & 1 == 1;
                }
                if safety.is_empty() && seen.iter().all(|&v| v) {
                    return Ok(Outcome { failure: None, rows });
                }
            }
            ap.encode(&x, &mut features)?;
            ap.valid_inputs(&x, &mut mask)?;
            let u = policy.select(&features, &mask, &mut rng)?;
            if !mask[u] {
                return Err(Error::InvalidArgument(format!("policy chose invalid input {u}")));
            }
            if logging {
                rows.push(TrajectoryRow {
                    trajectory: i,
                    step,
                    state: s.iter().map(|v| v.to_f64_lossy()).collect(),
                    q: *q,
                    input: ap.input_label(u),
                    letter: lab.alphabet().name(letter).to_string(),
                });
            }
            step += 1;
            x = if let Some(t) = ap.epsilon_target(u) {
                eps_run += 1;
                if eps_run > nq {
                    return Err(Error::InvalidArgument("unbounded run of ε-moves".into()));
                }
                ProductState::Pair { s: s.clone(), q: t }
            } else {
                debug_assert!(u < m);
                eps_run = 0;
                moves += 1;
                let (q2, _) = ap.automaton_successor(*q, s)?;
                ProductState::Pair { s: ap.env().sample_next(s, u, &mut rng)?, q: q2 }
            };
        }
        let failure = reach.iter().zip(&seen).find(|(_, &v)| !v).map(|((_, p), _)| format!("reach:{p}"));
        Ok(Outcome { failure, rows })
    };

    let outcomes = (0..trajectories).into_par_iter().map(run).collect::<Result<Vec<_>>>()?;
    let mut failures = BTreeMap::new();
    let mut log = TrajectoryLog::default();
    let mut satisfied = 0;
    for o in outcomes {
        match o.failure {
            None => satisfied += 1,
            Some(f) => *failures.entry(f).or_insert(0) += 1,
        }
        log.rows.extend(o.rows);
    }
    let report = McReport {
        trajectories,
        satisfied,
        frequency: if trajectories == 0 { 1.0 } else { satisfied as f64 / trajectories as f64 },
        horizon,
        failures,
    };
    Ok((report, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{boat_pos, universal};
    use crate::cmp::{FiniteMdp, FiniteMdpEnv, Labeling};
    use crate::product::Mode;
    use std::sync::Arc;

    struct First;
    impl<T: Real> ProductPolicy<T> for First {
        fn select(&self, _: &[T], mask: &[bool], _: &mut SimRng) -> Result<usize> {
            Ok(mask.iter().position(|&b| b).unwrap())
        }
    }

    // 0 -> 1 -> 2 (target, absorbing), deterministic.
    fn line() -> AugmentedProduct<f64> {
        let rows = vec![vec![vec![(1, 1.0)]], vec![vec![(2, 1.0)]], vec![vec![(2, 1.0)]]];
        let mdp = FiniteMdp::new(rows, vec![false; 3], vec![false; 3], 0).unwrap();
        let lab = Labeling::for_finite_states(vec!["t".into()], &[vec![], vec![], vec!["t"]]).unwrap();
        let a = boat_pos();
        AugmentedProduct::new(Arc::new(FiniteMdpEnv::new(mdp)), Arc::new(a), lab, 0.99, Mode::UpperBound).unwrap()
    }

    #[test]
    fn horizon_zero_safety_is_trivial() {
        let ap = line();
        let (r, _) = monte_carlo_satisfaction(&ap, &First, &SurrogateCheck::new(&["t"], &[]), 50, 0, 1, 0).unwrap();
        assert_eq!(r.frequency, 1.0);
    }

    #[test]
    fn deterministic_frequency_is_zero_or_one() {
        let ap = line();
        let reach = SurrogateCheck::new(&[], &["t"]);
        let (r, log) = monte_carlo_satisfaction(&ap, &First, &reach, 20, 3, 1, 1).unwrap();
        assert_eq!(r.frequency, 1.0);
        assert_eq!(log.rows.len(), 2);
        let (r, _) = monte_carlo_satisfaction(&ap, &First, &reach, 20, 2, 1, 0).unwrap();
        assert_eq!(r.frequency, 0.0);
        assert_eq!(r.failures["reach:t"], 20);
        let (r, _) = monte_carlo_satisfaction(&ap, &First, &SurrogateCheck::new(&["t"], &[]), 20, 5, 1, 0).unwrap();
        assert_eq!(r.failures["safety:t"], 20);
    }

    #[test]
    fn counts_are_reproducible() {
        let rows = vec![vec![vec![(0, 0.5), (1, 0.5)]], vec![vec![(1, 1.0)]]];
        let mdp = FiniteMdp::new(rows, vec![false; 2], vec![false; 2], 0).unwrap();
        let lab = Labeling::for_finite_states(vec!["t".into()], &[vec![], vec!["t"]]).unwrap();
        let names: Vec<&str> = lab.alphabet().names().iter().map(String::as_str).collect();
        let a = universal(&names);
        let ap = AugmentedProduct::new(Arc::new(FiniteMdpEnv::new(mdp)), Arc::new(a), lab, 0.99, Mode::UpperBound)
            .unwrap();
        let check = SurrogateCheck::new(&[], &["t"]);
        let (a, la) = monte_carlo_satisfaction(&ap, &First, &check, 2000, 3, 9, 5).unwrap();
        let (b, lb) = monte_carlo_satisfaction(&ap, &First, &check, 2000, 3, 9, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(la, lb);
        // P(t seen within the first 3 checked states) = 1 - 0.5^2
        assert!((a.frequency - 0.75).abs() < 0.04, "{}", a.frequency);
        let mut buf = Vec::new();
        la.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("trajectory,step,s0,q,input,letter"));
    }

    #[test]
    fn unknown_proposition_is_an_error() {
        let ap = line();
        let r = monte_carlo_satisfaction(&ap, &First, &SurrogateCheck::new(&["zz"], &[]), 1, 1, 1, 0);
        assert!(matches!(r, Err(Error::UnknownProposition(_))));
    }
}
