//! Plain-text checkpoints:
//!
//! ```text
//! ltlsynth-checkpoint 1
//! actor 6 7 7 3
//! <parameters, whitespace separated>
//! critic 6 7 1
//! <parameters>
//! ```
//!
//! Values are written in shortest round-trip form, so loading a saved
//! checkpoint reproduces the networks exactly.

use std::fmt::Write;

use super::mlp::Mlp;
use crate::num::parse_real;
use crate::{Error, Real, Result};

const MAGIC: &str = "ltlsynth-checkpoint 1";

pub fn save_checkpoint<T: Real>(actor: &Mlp<T>, critic: &Mlp<T>) -> String {
    let mut out = String::from(MAGIC);
    out.push('\n');
    for (name, net) in [("actor", actor), ("critic", critic)] {
        out.push_str(name);
        for s in net.sizes() {
            write!(out, " {s}").unwrap();
        }
        out.push('\n');
        let row: Vec<String> = net.params().iter().map(|p| p.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

fn format_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Format { line, msg: msg.into() }
}

pub fn load_checkpoint<T: Real>(text: &str) -> Result<(Mlp<T>, Mlp<T>)> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, l)) if l.trim() == MAGIC => {}
        Some((i, _)) => return Err(format_err(i + 1, "missing checkpoint header")),
        None => return Err(format_err(1, "empty checkpoint")),
    }
    let mut nets = Vec::new();
    for name in ["actor", "critic"] {
        let (i, head) = lines.next().ok_or_else(|| format_err(0, format!("missing {name} section")))?;
        let mut toks = head.split_whitespace();
        if toks.next() != Some(name) {
            return Err(format_err(i + 1, format!("expected `{name}`")));
        }
        let sizes = toks
            .map(|t| t.parse::<usize>().map_err(|_| format_err(i + 1, format!("bad layer size `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        let (j, body) = lines.next().ok_or_else(|| format_err(i + 2, format!("missing {name} parameters")))?;
        let params = body
            .split_whitespace()
            .map(|t| parse_real::<T>(t).ok_or_else(|| format_err(j + 1, format!("bad number `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        nets.push(Mlp::from_params(&sizes, params).map_err(|e| format_err(j + 1, e.to_string()))?);
    }
    if let Some((i, _)) = lines.next() {
        return Err(format_err(i + 1, "trailing content"));
    }
    let critic = nets.pop().unwrap();
    let actor = nets.pop().unwrap();
    if critic.output_dim() != 1 || critic.input_dim() != actor.input_dim() {
        return Err(format_err(0, "actor and critic shapes do not fit together"));
    }
    Ok((actor, critic))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn round_trip_is_exact() {
        let mut rng = crate::SimRng::seed_from_u64(3);
        let a = Mlp::<f64>::new(&[5, 7, 7, 3], &mut rng).unwrap();
        let c = Mlp::<f64>::new(&[5, 7, 1], &mut rng).unwrap();
        let (a2, c2) = load_checkpoint::<f64>(&save_checkpoint(&a, &c)).unwrap();
        assert_eq!(a, a2);
        assert_eq!(c, c2);
    }

    #[test]
    fn rejects_wrong_parameter_count() {
        let text = "ltlsynth-checkpoint 1\nactor 1 1\n0.5\ncritic 1 1\n0 0\n";
        assert!(matches!(load_checkpoint::<f64>(text), Err(Error::Format { line: 3, .. })));
    }

    #[test]
    fn rejects_garbage() {
        assert!(load_checkpoint::<f32>("hello").is_err());
        assert!(load_checkpoint::<f32>("").is_err());
    }
}
