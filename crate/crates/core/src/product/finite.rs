use super::EpsilonMode;
use crate::automata::{Ldba, Symbol};
use crate::cmp::FiniteMdp;
use crate::{Error, Real, Result};

/// Explicit product of a finite MDP with an automaton. Product state
/// `(s, q)` has index `s * (|Q| + 1) + q`; `q = |Q|` is the automaton's
/// implicit rejecting sink. Accepting states are those whose outgoing
/// environment actions fire an accepting transition.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteProduct<T> {
    pub mdp: FiniteMdp<T>,
    pub automaton_states: usize,
}

impl<T: Real> FiniteProduct<T> {
    pub fn index(&self, s: usize, q: usize) -> usize {
        s * (self.automaton_states + 1) + q
    }

    pub fn pair(&self, i: usize) -> (usize, usize) {
        (i / (self.automaton_states + 1), i % (self.automaton_states + 1))
    }
}

/// `labels[s]` is the symbol read at MDP state `s`. Environment actions come
/// first in each product state, ε-jumps after them.
pub fn build_finite_product<T: Real>(
    mdp: &FiniteMdp<T>,
    a: &Ldba,
    labels: &[Symbol],
    epsilon_mode: EpsilonMode,
) -> Result<FiniteProduct<T>> {
    let n = mdp.num_states();
    if labels.len() != n {
        return Err(Error::Shape(format!("{} labels for {n} states", labels.len())));
    }
    let sym_idx = labels
        .iter()
        .map(|&l| {
            a.symbol_index(l)
                .ok_or_else(|| Error::InvalidArgument(format!("alphabet mismatch: label {l:#b}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let nq = a.num_states();
    let width = nq + 1;
    let mut rows = Vec::with_capacity(n * width);
    let mut accepting = Vec::with_capacity(n * width);
    for s in 0..n {
        for q in 0..width {
            if q == nq {
                rows.push(vec![vec![(s * width + q, T::one())]]);
                accepting.push(false);
                continue;
            }
            let eps = a.epsilon(q);
            let q2 = a.step_index(q, sym_idx[s]).unwrap_or(nq);
            let mut actions = Vec::new();
            if eps.is_empty() || epsilon_mode == EpsilonMode::Optional {
                for act in 0..mdp.num_actions(s) {
                    actions.push(mdp.row(s, act).iter().map(|&(t, p)| (t * width + q2, p)).collect());
                }
            }
            for &t in eps {
                actions.push(vec![(s * width + t, T::one())]);
            }
            rows.push(actions);
            accepting.push(a.is_accepting_index(q, sym_idx[s]));
        }
    }
    let total = n * width;
    let product = FiniteMdp::new(rows, accepting, vec![false; total], mdp.initial() * width + a.initial())?;
    Ok(FiniteProduct { mdp: product, automaton_states: nq })
}

/// Adds the sink `φ` (last index): every accepting state moves there with
/// probability `1 - zeta` and keeps `zeta` times its original row. `φ` is the
/// only target state.
pub fn augment_finite<T: Real>(mdp: &FiniteMdp<T>, zeta: T) -> Result<FiniteMdp<T>> {
    if !(zeta > T::zero() && zeta <= T::one()) {
        return Err(Error::InvalidArgument(format!("zeta = {zeta} outside (0, 1]")));
    }
    let n = mdp.num_states();
    let mut rows: Vec<Vec<Vec<(usize, T)>>> = mdp.rows().to_vec();
    for (s, actions) in rows.iter_mut().enumerate() {
        if !mdp.accepting()[s] {
            continue;
        }
        for row in actions.iter_mut() {
            for e in row.iter_mut() {
                e.1 *= zeta;
            }
            row.push((n, T::one() - zeta));
        }
    }
    rows.push(vec![vec![(n, T::one())]]);
    let mut accepting = mdp.accepting().to_vec();
    accepting.push(false);
    let mut target = vec![false; n];
    target.push(true);
    FiniteMdp::new(rows, accepting, target, mdp.initial())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::universal;
    use crate::cmp::chain_mdp;

    fn two_state() -> FiniteMdp<f64> {
        FiniteMdp::new(
            vec![vec![vec![(0, 0.3), (1, 0.7)]], vec![vec![(1, 1.0)]]],
            vec![false, true],
            vec![false; 2],
            0,
        )
        .unwrap()
    }

    #[test]
    fn augment_identity_at_one() {
        let m = two_state();
        let aug = augment_finite(&m, 1.0).unwrap();
        assert_eq!(aug.num_states(), 3);
        assert_eq!(aug.prob(1, 0, 2), 0.0);
        assert_eq!(aug.prob(1, 0, 1), 1.0);
        assert_eq!(aug.prob(0, 0, 1), 0.7);
    }

    #[test]
    fn augment_chain_rows() {
        let m = chain_mdp::<f64>(10_000).unwrap();
        let aug = augment_finite(&m, 0.9).unwrap();
        let phi = m.num_states();
        for k in [3usize, 10, 500] {
            let s = k - 1;
            assert!((aug.prob(s, 0, phi) - 0.1).abs() < 1e-15);
            assert!((aug.prob(s, 0, 0) - 0.9 / k as f64).abs() < 1e-15);
            let sum: f64 = aug.row(s, 0).iter().map(|e| e.1).sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
        assert_eq!(aug.prob(1, 0, phi), 0.0);
    }

    #[test]
    fn universal_product_is_identity() {
        let m = two_state();
        let a = universal(&["x"]);
        let p = build_finite_product(&m, &a, &[0, 1], EpsilonMode::Optional).unwrap();
        assert_eq!(p.mdp.num_states(), 4);
        let (i0, i1) = (p.index(0, 0), p.index(1, 0));
        assert_eq!(p.mdp.initial(), i0);
        assert_eq!(p.mdp.prob(i0, 0, i1), 0.7);
        assert_eq!(p.mdp.prob(i0, 0, i0), 0.3);
        assert!(p.mdp.accepting()[i0] && p.mdp.accepting()[i1]);
        assert!(build_finite_product(&m, &a, &[0, 4], EpsilonMode::Optional).is_err());
    }
}
