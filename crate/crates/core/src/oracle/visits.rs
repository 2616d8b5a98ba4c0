use crate::cmp::FiniteMdp;
use crate::{Error, Real, Result, SimRng};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VisitEstimate {
    /// Mean number of accepting visits over qualifying trajectories.
    pub mean: f64,
    pub stderr: f64,
    /// Trajectories with no accepting visit in the final fifth of the horizon.
    pub qualifying: usize,
    pub total: usize,
}

/// Estimates the expected number of visits to `accepting` conditioned on
/// that number being finite. A trajectory counts as finite when it has no
/// accepting visit in the last 20% of the horizon.
pub fn conditional_visits_estimate<T: Real>(
    mdp: &FiniteMdp<T>,
    accepting: &[bool],
    policy: &dyn Fn(usize, &mut SimRng) -> usize,
    trajectories: usize,
    horizon: usize,
    rng: &mut SimRng,
) -> Result<VisitEstimate> {
    if horizon == 0 || trajectories == 0 {
        return Err(Error::InvalidArgument("horizon and trajectory count must be positive".into()));
    }
    if accepting.len() != mdp.num_states() {
        return Err(Error::Shape("accepting mask length".into()));
    }
    let tail_start = horizon - horizon / 5;
    let mut counts = Vec::new();
    for _ in 0..trajectories {
        let mut s = mdp.initial();
        let mut visits = 0usize;
        let mut late = false;
        for t in 0..horizon {
            if accepting[s] {
                visits += 1;
                if t >= tail_start {
                    late = true;
                }
            }
            let a = policy(s, rng);
            s = mdp.sample(s, a, rng);
        }
        if !late {
            counts.push(visits as f64);
        }
    }
    if counts.is_empty() {
        return Err(Error::InvalidArgument(
            "no trajectory had finitely many accepting visits; estimate undefined".into(),
        ));
    }
    let k = counts.len() as f64;
    let mean = counts.iter().sum::<f64>() / k;
    let var = if counts.len() > 1 {
        counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    Ok(VisitEstimate { mean, stderr: (var / k).sqrt(), qualifying: counts.len(), total: trajectories })
}
