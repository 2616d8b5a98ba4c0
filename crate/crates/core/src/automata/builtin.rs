//! Hand-built deterministic automata for the case studies, over the letter
//! atoms of `Alphabet::powerset` of their propositions.

use std::collections::BTreeMap;

use super::{Ldba, LdbaBuilder, Symbol};
use crate::ltl::Alphabet;

/// Propositions and formula text of each built-in automaton.
pub const BUILTINS: [(&str, &[&str], &str); 4] = [
    ("cartpole_pos", &["a", "c1", "c2"], "<>a & [](c1 & c2)"),
    ("cartpole_neg", &["a", "c1", "c2"], "!(<>a & [](c1 & c2))"),
    ("boat_pos", &["t"], "<>t"),
    ("boat_neg", &["t"], "!<>t"),
];

/// View of a symbol as the list of letters it contains.
struct Letters<'a> {
    alphabet: &'a Alphabet,
    sym: Symbol,
}

impl Letters<'_> {
    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.alphabet.len()).filter(|i| self.sym >> i & 1 == 1)
    }

    /// Some letter of the symbol contains `p`.
    fn has(&self, p: &str) -> bool {
        self.iter().any(|i| self.alphabet.letter(i).contains(p))
    }

    /// Some letter of the symbol does not contain `p`.
    fn lacks(&self, p: &str) -> bool {
        self.iter().any(|i| !self.alphabet.letter(i).contains(p))
    }
}

fn from_rule(
    props: &[&str],
    n: usize,
    rule: impl Fn(usize, &Letters) -> (usize, bool),
) -> Ldba {
    let alphabet = Alphabet::powerset(props.iter().map(|s| s.to_string()).collect())
        .expect("built-in propositions");
    let all: Vec<usize> = (0..n).collect();
    let mut b = LdbaBuilder::new(n, 0, &all, alphabet.names().to_vec(), None)
        .expect("built-in automaton header");
    for q in 0..n {
        for i in 0..b.alphabet().len() {
            let sym = b.alphabet()[i];
            let (to, acc) = rule(q, &Letters { alphabet: &alphabet, sym });
            b.transition_index(q, i, to, acc).expect("built-in transition");
        }
    }
    b.build()
}

/// `◊a ∧ □(c1 ∧ c2)` over letters of `{a, c1, c2}`. State 1: target seen and
/// still safe; state 2: safety violated.
pub fn cartpole_pos() -> Ldba {
    from_rule(&["a", "c1", "c2"], 3, |q, x| {
        let safe = x.has("c1") && x.has("c2");
        match (q, safe) {
            (2, _) | (_, false) => (2, false),
            (1, true) => (1, true),
            _ => (if x.has("a") { 1 } else { 0 }, false),
        }
    })
}

/// `□¬a ∨ ◊(¬c1 ∨ ¬c2)` over letters of `{a, c1, c2}`. State 0: neither
/// disjunct decided; state 1: `a` seen, waiting for a violation; state 2:
/// violation seen.
pub fn cartpole_neg() -> Ldba {
    from_rule(&["a", "c1", "c2"], 3, |q, x| {
        let unsafe_ = x.lacks("c1") || x.lacks("c2");
        match q {
            2 => (2, true),
            _ if unsafe_ => (2, false),
            0 if x.lacks("a") => (0, true),
            _ => (1, false),
        }
    })
}

/// `◊t` over letters of `{t}`.
pub fn boat_pos() -> Ldba {
    from_rule(&["t"], 2, |q, x| match q {
        1 => (1, true),
        _ => (if x.has("t") { 1 } else { 0 }, false),
    })
}

/// `□¬t` over letters of `{t}`.
pub fn boat_neg() -> Ldba {
    from_rule(&["t"], 2, |q, x| match q {
        0 if x.lacks("t") => (0, true),
        _ => (1, false),
    })
}

/// One accepting state looping on every symbol over `atoms`.
pub fn universal(atoms: &[&str]) -> Ldba {
    let mut b = LdbaBuilder::new(1, 0, &[0], atoms.iter().map(|s| s.to_string()).collect(), None)
        .expect("universal automaton header");
    for i in 0..b.alphabet().len() {
        b.transition_index(0, i, 0, true).expect("universal transition");
    }
    b.build()
}

pub fn builtin_automata() -> BTreeMap<&'static str, Ldba> {
    BTreeMap::from([
        ("cartpole_pos", cartpole_pos()),
        ("cartpole_neg", cartpole_neg()),
        ("boat_pos", boat_pos()),
        ("boat_neg", boat_neg()),
    ])
}
