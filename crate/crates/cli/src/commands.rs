use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use ltlsynth::automata::{accepts_lasso, universal, Ldba};
use ltlsynth::guided::{guided_train, StageReport};
use ltlsynth::ltl::{eval_lasso, parse_ltl, Alphabet, LassoWord, Letter, LtlFormula};
use ltlsynth::oracle::{hoeffding_eps, hoeffding_lower, monte_carlo_satisfaction, ActorPolicy};
use ltlsynth::rl::{load_checkpoint, save_checkpoint, train, Agent, MetricsRow};
use ltlsynth::SimRng;
use rand::{Rng, SeedableRng};

use crate::config::{formula_with_props, load_automaton_ref, ModeName, RunConfig};
use crate::ConfigError;

/// Overrides applied on top of a loaded config.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub episodes: Option<usize>,
}

pub fn load_config(path: &Path, o: &Overrides) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(path).context(ConfigError)?;
    if let Some(s) = o.seed {
        cfg.seed = s;
    }
    if let Some(out) = &o.output {
        cfg.output = out.clone();
    }
    if let Some(n) = o.episodes {
        cfg.train.episodes = n;
    }
    cfg.validate().context(ConfigError)?;
    Ok(cfg)
}

fn prepare_run_dir(cfg: &RunConfig) -> Result<PathBuf> {
    let dir = cfg.output.clone();
    fs::create_dir_all(dir.join("checkpoints")).with_context(|| format!("creating {}", dir.display()))?;
    fs::write(dir.join("config.toml"), cfg.to_toml()?)?;
    Ok(dir)
}

fn write_metrics(path: &Path, rows: &[MetricsRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["stage", "phase", "episode", "return_mean", "actor_loss", "critic_loss", "estimate"])?;
    for r in rows {
        w.write_record([
            r.stage.to_string(),
            r.phase.clone(),
            r.episode.to_string(),
            r.return_mean.to_string(),
            r.actor_loss.to_string(),
            r.critic_loss.to_string(),
            r.estimate.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Merges `entries` into the `key,value` file at `path`, keeping earlier keys.
fn update_summary(path: &Path, entries: &[(&str, String)]) -> Result<()> {
    let mut rows: Vec<(String, String)> = Vec::new();
    if path.exists() {
        let mut r = csv::Reader::from_path(path)?;
        for rec in r.records() {
            let rec = rec?;
            rows.push((rec.get(0).unwrap_or("").to_string(), rec.get(1).unwrap_or("").to_string()));
        }
    }
    for (k, v) in entries {
        match rows.iter_mut().find(|(key, _)| key == k) {
            Some(row) => row.1 = v.clone(),
            None => rows.push((k.to_string(), v.clone())),
        }
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["key", "value"])?;
    for (k, v) in rows {
        w.write_record([k, v])?;
    }
    w.flush()?;
    Ok(())
}

pub fn cmd_train(cfg: &RunConfig) -> Result<()> {
    let t = Instant::now();
    let ap = cfg.product().context(ConfigError)?;
    let tc = cfg.train_config();
    let dir = prepare_run_dir(cfg)?;
    let out = train(&ap, &tc)?;
    fs::write(dir.join("checkpoints/final.ckpt"), save_checkpoint(&out.agent.actor, &out.agent.critic))?;
    write_metrics(&dir.join("metrics.csv"), &out.metrics)?;
    update_summary(
        &dir.join("summary.csv"),
        &[
            ("command", "train".into()),
            ("seed", cfg.seed.to_string()),
            ("episodes", tc.episodes.to_string()),
            ("estimate", out.estimate.to_string()),
            ("elapsed_s", format!("{:.1}", t.elapsed().as_secs_f64())),
        ],
    )?;
    println!("estimate {:.6}", out.estimate);
    println!("run directory {}", dir.display());
    Ok(())
}

pub fn cmd_guided_train(cfg: &RunConfig) -> Result<()> {
    let t = Instant::now();
    let ap = cfg.product().context(ConfigError)?;
    let cur = cfg.curriculum().context(ConfigError)?;
    let tc = cfg.train_config();
    let dir = prepare_run_dir(cfg)?;
    let mut stages = csv::Writer::from_path(dir.join("stages.csv"))?;
    stages.write_record(["stage", "radius", "zeta", "episodes", "estimate"])?;
    let ckpt_dir = dir.join("checkpoints");
    let mut on_stage = |r: &StageReport, a: &Agent<f64>| -> ltlsynth::Result<()> {
        let rec = [r.stage.to_string(), r.radius.to_string(), r.zeta.to_string(), r.episodes.to_string(), r.estimate.to_string()];
        stages.write_record(&rec)?;
        stages.flush()?;
        fs::write(ckpt_dir.join(format!("stage-{}.ckpt", r.stage)), save_checkpoint(&a.actor, &a.critic))?;
        println!("stage {} zeta {} episodes {} estimate {:.6}", r.stage, r.zeta, r.episodes, r.estimate);
        Ok(())
    };
    let out = guided_train(&ap, &cur, &tc, &mut on_stage)?;
    let last = out.stages.last().context("no stage was trained")?;
    fs::write(dir.join("checkpoints/final.ckpt"), save_checkpoint(&out.agent.actor, &out.agent.critic))?;
    write_metrics(&dir.join("metrics.csv"), &out.metrics)?;
    update_summary(
        &dir.join("summary.csv"),
        &[
            ("command", "guided-train".into()),
            ("seed", cfg.seed.to_string()),
            ("stages", out.stages.len().to_string()),
            ("episodes", out.stages.iter().map(|s| s.episodes).sum::<usize>().to_string()),
            ("estimate", last.estimate.to_string()),
            ("elapsed_s", format!("{:.1}", t.elapsed().as_secs_f64())),
        ],
    )?;
    println!("estimate {:.6}", last.estimate);
    println!("run directory {}", dir.display());
    Ok(())
}

#[derive(Clone, Debug, Default)]
pub struct EvalArgs {
    pub checkpoint: Option<PathBuf>,
    pub untrained: bool,
    pub trajectories: Option<usize>,
    pub horizon: Option<usize>,
}

pub fn cmd_evaluate(cfg: &RunConfig, args: &EvalArgs) -> Result<()> {
    let ap = cfg.product().context(ConfigError)?;
    let tc = cfg.train_config();
    let agent = if args.untrained {
        Agent::new(&ap, &tc)?
    } else {
        let path = args.checkpoint.clone().unwrap_or_else(|| cfg.output.join("checkpoints/final.ckpt"));
        let text = fs::read_to_string(&path).with_context(|| format!("reading checkpoint {}", path.display()))?;
        let (actor, critic) = load_checkpoint(&text)?;
        if actor.input_dim() != ap.feature_dim() || actor.output_dim() != ap.num_inputs() {
            bail!(
                "checkpoint actor maps {} features to {} inputs; the configured product needs {} to {}",
                actor.input_dim(),
                actor.output_dim(),
                ap.feature_dim(),
                ap.num_inputs()
            );
        }
        Agent::from_networks(actor, critic)
    };
    let n = args.trajectories.unwrap_or(cfg.evaluate.trajectories);
    let horizon = args.horizon.unwrap_or_else(|| cfg.eval_horizon());
    let pol = ActorPolicy { actor: &agent.actor, greedy: cfg.evaluate.greedy };
    let (rep, log) =
        monte_carlo_satisfaction(&ap, &pol, &cfg.surrogate(), n, horizon, cfg.seed, cfg.evaluate.log_trajectories)?;
    let eps = match cfg.evaluate.eps {
        Some(e) => e,
        None => hoeffding_eps(n as u64, cfg.evaluate.delta)?,
    };
    let h = hoeffding_lower(n as u64, rep.satisfied as u64, eps)?;
    let dir = cfg.output.clone();
    fs::create_dir_all(&dir)?;
    log.write_csv(fs::File::create(dir.join("trajectories.csv"))?)?;
    let mut entries = vec![
        ("trajectories", n.to_string()),
        ("horizon", horizon.to_string()),
        ("satisfied", rep.satisfied.to_string()),
        ("frequency", rep.frequency.to_string()),
        ("hoeffding_eps", eps.to_string()),
        ("hoeffding_lower", h.lower.to_string()),
        ("hoeffding_upper", h.upper.to_string()),
        ("hoeffding_failure_prob", format!("{:e}", h.failure_prob)),
    ];
    let failures: Vec<(String, String)> = rep.failures.iter().map(|(k, v)| (format!("failures.{k}"), v.to_string())).collect();
    entries.extend(failures.iter().map(|(k, v)| (k.as_str(), v.clone())));
    update_summary(&dir.join("summary.csv"), &entries)?;
    println!("satisfied {} of {} (frequency {:.6}, horizon {})", rep.satisfied, n, rep.frequency, horizon);
    println!("interval [{:.6}, {}] with confidence 1 - {:.3e}", h.lower, h.upper, h.failure_prob);
    for (k, v) in &rep.failures {
        println!("failures {k}: {v}");
    }
    Ok(())
}

#[derive(Clone, Debug, Default)]
pub struct TranslateArgs {
    pub formula: Option<String>,
    pub props: Option<Vec<String>>,
    pub automaton: Option<String>,
    pub config: Option<PathBuf>,
    pub lassos: usize,
    pub seed: u64,
}

/// Lasso over letter names whose positions are singletons half of the time
/// and arbitrary letter sets otherwise.
fn random_letter_lasso(rng: &mut SimRng, names: &[String]) -> LassoWord {
    let pos = |rng: &mut SimRng| -> Letter {
        if rng.random_bool(0.5) {
            [names[rng.random_range(0..names.len())].clone()].into()
        } else {
            names.iter().filter(|_| rng.random_bool(0.3)).cloned().collect()
        }
    };
    let prefix = (0..rng.random_range(0..=5)).map(|_| pos(rng)).collect();
    let cycle = (0..rng.random_range(1..=5)).map(|_| pos(rng)).collect();
    LassoWord::new(prefix, cycle).expect("non-empty cycle")
}

/// Number of lassos on which the automaton and the formula disagree.
pub fn agreement_mismatches(a: &Ldba, bar: &LtlFormula, alphabet: &Alphabet, lassos: usize, seed: u64) -> Result<usize> {
    let mut rng = SimRng::seed_from_u64(seed);
    let mut bad = 0;
    for _ in 0..lassos {
        let w = random_letter_lasso(&mut rng, alphabet.names());
        if accepts_lasso(a, &w)? != eval_lasso(bar, &w) {
            bad += 1;
        }
    }
    Ok(bad)
}

/// Returns whether the agreement check (if any) passed.
pub fn cmd_translate(args: &TranslateArgs) -> Result<bool> {
    let cfg = match &args.config {
        Some(p) => Some(RunConfig::load(p).context(ConfigError)?),
        None => None,
    };
    let (formula, props) = match (&args.formula, &cfg) {
        (Some(text), _) => {
            let f = parse_ltl(text, None).context(ConfigError)?;
            let props = match (&args.props, &cfg) {
                (Some(p), _) => p.clone(),
                (None, Some(c)) => c.labeling().context(ConfigError)?.propositions().to_vec(),
                (None, None) => f.propositions().into_iter().collect(),
            };
            let set: BTreeSet<String> = props.iter().cloned().collect();
            if let Some(p) = f.propositions().difference(&set).next() {
                return Err(anyhow::anyhow!("formula uses `{p}`, which is not among the propositions").context(ConfigError));
            }
            (f, props)
        }
        (None, Some(c)) => formula_with_props(c)
            .context(ConfigError)?
            .ok_or_else(|| anyhow::anyhow!("no formula given and the config has none").context(ConfigError))?,
        (None, None) => return Err(anyhow::anyhow!("give --formula or --config").context(ConfigError)),
    };
    // A lower-bound config pairs the formula with an automaton for its negation.
    let negate = args.automaton.is_none() && cfg.as_ref().is_some_and(|c| c.specification.mode == ModeName::Lower);
    let formula = if negate { LtlFormula::Not(Box::new(formula)) } else { formula };
    let alphabet = Alphabet::powerset(props.clone()).context(ConfigError)?;
    let pnf = formula.to_pnf();
    let bar = pnf.interpret_over_alphabet(&alphabet)?;
    println!("formula: {formula}");
    println!("pnf: {pnf}");
    println!("letters: {}", letter_table(&alphabet));
    println!("over letters: {bar}");
    let automaton_ref = args.automaton.clone().or_else(|| cfg.as_ref().map(|c| c.specification.automaton.clone()));
    let Some(r) = automaton_ref else { return Ok(true) };
    let a = if r == "builtin:universal" {
        let names: Vec<&str> = alphabet.names().iter().map(String::as_str).collect();
        universal(&names)
    } else {
        load_automaton_ref(&r).context(ConfigError)?
    };
    let bad = agreement_mismatches(&a, &bar, &alphabet, args.lassos, args.seed)?;
    if bad == 0 {
        println!("automaton agreement: PASS ({} lassos)", args.lassos);
    } else {
        println!("automaton agreement: FAIL ({bad} of {} lassos disagree)", args.lassos);
    }
    Ok(bad == 0)
}

fn letter_table(alphabet: &Alphabet) -> String {
    (0..alphabet.len())
        .map(|i| {
            let l: Vec<&str> = alphabet.letter(i).iter().map(String::as_str).collect();
            format!("{}={{{}}}", alphabet.name(i), l.join(","))
        })
        .collect::<Vec<_>>()
        .join(" ")
}
