use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::value_iteration::{reach_value_iteration, Objective, ValueVector};
use crate::cmp::FiniteMdp;
use crate::{Error, Real, Result};

/// A maximal end component: its states and, per state, the actions that
/// keep the process inside it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndComponent {
    pub states: Vec<usize>,
    pub actions: Vec<Vec<usize>>,
}

/// Maximal end components by repeated SCC refinement: drop actions that can
/// leave their SCC, drop states without actions, repeat until stable.
pub fn maximal_end_components<T: Real>(mdp: &FiniteMdp<T>) -> Vec<EndComponent> {
    let n = mdp.num_states();
    let mut allowed: Vec<Vec<usize>> = (0..n).map(|s| (0..mdp.num_actions(s)).collect()).collect();
    let mut alive = vec![true; n];
    loop {
        let mut g = DiGraph::<usize, ()>::with_capacity(n, 0);
        let nodes: Vec<_> = (0..n).map(|s| g.add_node(s)).collect();
        for s in (0..n).filter(|&s| alive[s]) {
            for &a in &allowed[s] {
                for &(t, p) in mdp.row(s, a) {
                    if p > T::zero() && alive[t] {
                        g.add_edge(nodes[s], nodes[t], ());
                    }
                }
            }
        }
        let mut comp = vec![usize::MAX; n];
        for (c, scc) in tarjan_scc(&g).into_iter().enumerate() {
            for v in scc {
                comp[g[v]] = c;
            }
        }
        let mut changed = false;
        for s in 0..n {
            if !alive[s] {
                continue;
            }
            let before = allowed[s].len();
            allowed[s].retain(|&a| {
                mdp.row(s, a)
                    .iter()
                    .all(|&(t, p)| p == T::zero() || (alive[t] && comp[t] == comp[s]))
            });
            if allowed[s].len() != before {
                changed = true;
            }
            if allowed[s].is_empty() {
                alive[s] = false;
                changed = true;
            }
        }
        if !changed {
            let mut by_comp: std::collections::BTreeMap<usize, EndComponent> = Default::default();
            for s in (0..n).filter(|&s| alive[s]) {
                let ec = by_comp.entry(comp[s]).or_insert(EndComponent { states: vec![], actions: vec![] });
                ec.states.push(s);
                ec.actions.push(allowed[s].clone());
            }
            let mut out: Vec<_> = by_comp.into_values().collect();
            out.sort_by_key(|ec| ec.states[0]);
            return out;
        }
    }
}

/// Maximal probability of visiting `accepting` infinitely often: maximal
/// reachability of the union of end components that contain an accepting
/// state.
pub fn buchi_value<T: Real>(mdp: &FiniteMdp<T>, accepting: &[bool], tol: T) -> Result<ValueVector<T>> {
    if accepting.len() != mdp.num_states() {
        return Err(Error::Shape("accepting mask length".into()));
    }
    let mut good = vec![false; mdp.num_states()];
    for ec in maximal_end_components(mdp) {
        if ec.states.iter().any(|&s| accepting[s]) {
            for s in ec.states {
                good[s] = true;
            }
        }
    }
    reach_value_iteration(mdp, &good, Objective::Max, tol, 10_000_000)
}
