use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::Ldba;
use crate::ltl::LassoWord;
use crate::Result;

/// Decides whether some resolution of the ε-choices gives a run on `w` that
/// fires accepting transitions infinitely often.
///
/// Explores the graph of `(state, word position)` pairs reachable from the
/// initial pair, where positions are taken modulo the cycle, and looks for an
/// accepting edge inside a strongly connected component.
pub fn accepts_lasso(a: &Ldba, w: &LassoWord) -> Result<bool> {
    let positions = w.positions();
    let syms = (0..positions)
        .map(|i| a.symbol_of(w.at(i)))
        .collect::<Result<Vec<_>>>()?;
    let n = a.num_states();
    let node = |q: usize, i: usize| q * positions + i;
    let mut graph = DiGraph::<(), bool>::new();
    let mut ids: Vec<Option<NodeIndex>> = vec![None; n * positions];
    let mut stack = vec![(a.initial(), 0)];
    ids[node(a.initial(), 0)] = Some(graph.add_node(()));
    let mut acc_edges = Vec::new();
    while let Some((q, i)) = stack.pop() {
        let from = ids[node(q, i)].unwrap();
        let mut succ: Vec<(usize, usize, bool)> =
            a.epsilon(q).iter().map(|&q2| (q2, i, false)).collect();
        if let Some(si) = a.symbol_index(syms[i]) {
            if let Some(q2) = a.step_index(q, si) {
                succ.push((q2, w.succ(i), a.is_accepting_index(q, si)));
            }
        }
        for (q2, i2, acc) in succ {
            let to = match ids[node(q2, i2)] {
                Some(id) => id,
                None => {
                    let id = graph.add_node(());
                    ids[node(q2, i2)] = Some(id);
                    stack.push((q2, i2));
                    id
                }
            };
            graph.add_edge(from, to, acc);
            if acc {
                acc_edges.push((from, to));
            }
        }
    }
    if acc_edges.is_empty() {
        return Ok(false);
    }
    let mut component = vec![usize::MAX; graph.node_count()];
    for (c, scc) in tarjan_scc(&graph).into_iter().enumerate() {
        for v in scc {
            component[v.index()] = c;
        }
    }
    Ok(acc_edges
        .iter()
        .any(|(u, v)| component[u.index()] == component[v.index()]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::ldba_from_table;
    use crate::ltl::{letter, Letter};
    use rand::{Rng, SeedableRng};
    use std::collections::HashMap;

    /// Enumerates ε-jump schedules explicitly: at most `|Q|` jumps, each no
    /// later than position `|prefix| + |Q|·|cycle|`; after the last jump the
    /// run is deterministic and its loop is inspected for acceptance.
    fn accepts_by_schedules(a: &Ldba, w: &LassoWord) -> bool {
        let bound = w.prefix().len() + a.num_states() * w.cycle().len();
        fn go(a: &Ldba, w: &LassoWord, q: usize, n: usize, jumps: usize, bound: usize) -> bool {
            if jumps < a.num_states() && n <= bound {
                for &q2 in a.epsilon(q) {
                    if go(a, w, q2, n, jumps + 1, bound) {
                        return true;
                    }
                }
            }
            if n > bound {
                return deterministic_tail(a, w, q, n);
            }
            let sym = a.symbol_of(w.letter_at(n)).unwrap();
            match a.step(q, sym) {
                Some(q2) => go(a, w, q2, n + 1, jumps, bound),
                None => false,
            }
        }
        fn deterministic_tail(a: &Ldba, w: &LassoWord, mut q: usize, mut n: usize) -> bool {
            let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
            let mut accs = Vec::new();
            loop {
                let key = (q, w.canonical(n));
                if let Some(&start) = seen.get(&key) {
                    return accs[start..].iter().any(|&x| x);
                }
                seen.insert(key, accs.len());
                let sym = a.symbol_of(w.letter_at(n)).unwrap();
                match a.step(q, sym) {
                    Some(q2) => {
                        accs.push(a.is_accepting(q, sym));
                        q = q2;
                        n += 1;
                    }
                    None => return false,
                }
            }
        }
        go(a, w, a.initial(), 0, 0, bound)
    }

    fn eventually_always_a() -> Ldba {
        // ◊□a: wait in 0, guess the point from which a holds forever.
        ldba_from_table(
            2,
            0,
            &[1],
            &["a"],
            &[(0, &[], 0, false), (0, &["a"], 0, false), (1, &["a"], 1, true)],
            &[(0, 1)],
        )
        .unwrap()
    }

    fn random_word(rng: &mut crate::SimRng, atoms: &[&str]) -> LassoWord {
        let p = rng.random_range(0..5);
        let c = rng.random_range(1..5);
        let mut l = || -> Letter { letter(atoms.iter().filter(|_| rng.random_bool(0.5)).copied()) };
        let prefix = (0..p).map(|_| l()).collect();
        let cycle = (0..c).map(|_| l()).collect();
        LassoWord::new(prefix, cycle).unwrap()
    }

    #[test]
    fn epsilon_guess() {
        let a = eventually_always_a();
        let w = LassoWord::new(vec![letter::<_, &str>([]); 3], vec![letter(["a"])]).unwrap();
        assert!(accepts_lasso(&a, &w).unwrap());
        let w = LassoWord::new(vec![], vec![letter(["a"]), letter::<_, &str>([])]).unwrap();
        assert!(!accepts_lasso(&a, &w).unwrap());
    }

    #[test]
    fn empty_acceptance_rejects() {
        let a = ldba_from_table(1, 0, &[0], &["a"], &[(0, &[], 0, false), (0, &["a"], 0, false)], &[])
            .unwrap();
        let w = LassoWord::new(vec![], vec![letter(["a"])]).unwrap();
        assert!(!accepts_lasso(&a, &w).unwrap());
    }

    #[test]
    fn agrees_with_schedule_enumeration() {
        let mut rng = crate::SimRng::seed_from_u64(7);
        // A 4-state automaton with two ε-branches: ◊□a ∨ □◊b.
        let pairs: Vec<(usize, &[&str], usize, bool)> = {
            let all: [&[&str]; 4] = [&[], &["a"], &["b"], &["a", "b"]];
            let mut t = Vec::new();
            for s in all {
                t.push((0, s, 0, false));
                if s.contains(&"a") {
                    t.push((1, s, 1, true));
                }
                t.push((2, s, if s.contains(&"b") { 3 } else { 2 }, false));
                t.push((3, s, if s.contains(&"b") { 3 } else { 2 }, s.contains(&"b")));
            }
            t
        };
        let a = ldba_from_table(4, 0, &[1, 2, 3], &["a", "b"], &pairs, &[(0, 1), (0, 2)]).unwrap();
        for _ in 0..500 {
            let w = random_word(&mut rng, &["a", "b"]);
            assert_eq!(accepts_lasso(&a, &w).unwrap(), accepts_by_schedules(&a, &w), "{w:?}");
        }
    }
}
