use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use ltlsynth::cmp::{chain_mdp_from, FiniteMdp};
use ltlsynth::oracle::{
    buchi_value, chain_reach_closed_form, conditional_visits_estimate, hoeffding_eps, hoeffding_lower, max_reach,
};
use ltlsynth::product::augment_finite;
use ltlsynth::SimRng;
use rand::SeedableRng;

use crate::ConfigError;

pub fn chain(zetas: &[f64], n_trunc: usize, first_accepting: usize) -> Result<()> {
    let mdp = chain_mdp_from::<f64>(n_trunc, first_accepting).context(ConfigError)?;
    for &z in zetas {
        if !(z > 0.0 && z < 1.0) {
            return Err(anyhow::anyhow!("zeta {z} outside (0, 1)").context(ConfigError));
        }
        let v = max_reach(&augment_finite(&mdp, z)?)?.values[mdp.initial()];
        if first_accepting == 2 {
            println!("zeta {z}: value {v:.6} closed form {:.6}", chain_reach_closed_form(z)?);
        } else {
            println!("zeta {z}: value {v:.6}");
        }
    }
    Ok(())
}

pub fn hoeffding(n: u64, h: u64, eps: Option<f64>, delta: Option<f64>) -> Result<()> {
    let eps = match (eps, delta) {
        (Some(e), None) => e,
        (None, Some(d)) => hoeffding_eps(n, d).context(ConfigError)?,
        _ => return Err(anyhow::anyhow!("give exactly one of --eps and --delta").context(ConfigError)),
    };
    let r = hoeffding_lower(n, h, eps).context(ConfigError)?;
    println!("frequency {:.6}", h as f64 / n as f64);
    println!("eps {eps}");
    println!("interval [{:.4}, {}]", r.lower, r.upper);
    println!("confidence 1 - {:.3e}", r.failure_prob);
    Ok(())
}

fn read_mdp(path: &Path) -> Result<FiniteMdp<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    FiniteMdp::from_text(&text).context(ConfigError)
}

/// Büchi value of the MDP's accepting set and the augmented reach values.
pub fn buchi(path: &Path, zetas: &[f64]) -> Result<()> {
    let mdp = read_mdp(path)?;
    let b = buchi_value(&mdp, mdp.accepting(), 1e-12)?;
    println!("buchi {:.6}", b.values[mdp.initial()]);
    for &z in zetas {
        let r = max_reach(&augment_finite(&mdp, z).context(ConfigError)?)?;
        println!("zeta {z}: reach {:.6}", r.values[mdp.initial()]);
    }
    Ok(())
}

pub fn visits(path: Option<&Path>, chain_n: Option<usize>, horizons: &[usize], trajectories: usize, seed: u64) -> Result<()> {
    let mdp = match (path, chain_n) {
        (Some(p), None) => read_mdp(p)?,
        (None, Some(n)) => ltlsynth::cmp::chain_mdp(n).context(ConfigError)?,
        _ => return Err(anyhow::anyhow!("give exactly one of --mdp and --chain").context(ConfigError)),
    };
    if horizons.is_empty() {
        bail!("no horizon given");
    }
    let mut rng = SimRng::seed_from_u64(seed);
    for &h in horizons {
        let e = conditional_visits_estimate(&mdp, mdp.accepting(), &|_, _| 0, trajectories, h, &mut rng)?;
        println!("horizon {h}: mean {:.4} stderr {:.4} qualifying {}/{}", e.mean, e.stderr, e.qualifying, e.total);
    }
    Ok(())
}
