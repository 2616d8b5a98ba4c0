//! Limit-deterministic Büchi automata with transition-based acceptance.
//!
//! A symbol is a set of atoms encoded as a bitmask over [`Ldba::atoms`]. When
//! the atoms are base propositions a symbol is an ordinary letter of `2^AP`;
//! after reinterpretation over labelling letters the atoms are letter names
//! and a symbol is the set of letters emitted by a relaxed labelling.

mod builtin;
mod format;
mod lasso;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::{Error, Result};

pub use builtin::{BUILTINS, boat_neg, boat_pos, builtin_automata, cartpole_neg, cartpole_pos, universal};
pub use format::{load_automaton, serialize_automaton};
pub use lasso::accepts_lasso;

/// Bitmask over the automaton atoms.
pub type Symbol = u64;

pub const MAX_ATOMS: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct Ldba {
    n: usize,
    initial: usize,
    deterministic: Vec<bool>,
    atoms: Vec<String>,
    alphabet: Vec<Symbol>,
    symbol_index: HashMap<Symbol, usize>,
    delta: Vec<Vec<Option<usize>>>,
    acc: Vec<Vec<bool>>,
    epsilon: Vec<Vec<usize>>,
}

impl Ldba {
    pub fn num_states(&self) -> usize {
        self.n
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_deterministic_state(&self, q: usize) -> bool {
        self.deterministic[q]
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn alphabet(&self) -> &[Symbol] {
        &self.alphabet
    }

    pub fn symbol_index(&self, sym: Symbol) -> Option<usize> {
        self.symbol_index.get(&sym).copied()
    }

    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == name)
    }

    /// Converts a set of atom names into a symbol.
    pub fn symbol_of<S: AsRef<str>>(&self, names: impl IntoIterator<Item = S>) -> Result<Symbol> {
        let mut sym = 0;
        for name in names {
            let name = name.as_ref();
            let i = self
                .atom_index(name)
                .ok_or_else(|| Error::UnknownProposition(name.to_string()))?;
            sym |= 1 << i;
        }
        Ok(sym)
    }

    /// Atom names of a symbol, in atom order.
    pub fn symbol_names(&self, sym: Symbol) -> BTreeSet<String> {
        (0..self.atoms.len())
            .filter(|i| sym >> i & 1 == 1)
            .map(|i| self.atoms[i].clone())
            .collect()
    }

    /// The δ-successor, or `None` when the transition is undefined (the run
    /// falls into an implicit rejecting sink) or the symbol is not in the
    /// alphabet.
    pub fn step(&self, q: usize, sym: Symbol) -> Option<usize> {
        self.step_index(q, self.symbol_index(sym)?)
    }

    pub fn step_index(&self, q: usize, sym_idx: usize) -> Option<usize> {
        self.delta[q][sym_idx]
    }

    pub fn is_accepting(&self, q: usize, sym: Symbol) -> bool {
        self.symbol_index(sym).is_some_and(|i| self.acc[q][i])
    }

    pub fn is_accepting_index(&self, q: usize, sym_idx: usize) -> bool {
        self.acc[q][sym_idx]
    }

    pub fn epsilon(&self, q: usize) -> &[usize] {
        &self.epsilon[q]
    }

    pub fn has_epsilon(&self) -> bool {
        self.epsilon.iter().any(|e| !e.is_empty())
    }

    /// True when some `(q, symbol)` pair has no successor.
    pub fn is_partial(&self) -> bool {
        self.delta.iter().flatten().any(Option::is_none)
    }

    /// Number of accepting transitions.
    pub fn num_accepting(&self) -> usize {
        self.acc.iter().flatten().filter(|&&a| a).count()
    }
}

/// Incremental constructor that enforces the LDBA invariants.
#[derive(Clone, Debug)]
pub struct LdbaBuilder {
    n: usize,
    initial: usize,
    deterministic: Vec<bool>,
    atoms: Vec<String>,
    alphabet: Vec<Symbol>,
    symbol_index: HashMap<Symbol, usize>,
    delta: Vec<Vec<Option<usize>>>,
    acc: Vec<Vec<bool>>,
    epsilon: Vec<BTreeSet<usize>>,
}

impl LdbaBuilder {
    /// `alphabet = None` uses every subset of `atoms`.
    pub fn new(
        n: usize,
        initial: usize,
        deterministic: &[usize],
        atoms: Vec<String>,
        alphabet: Option<Vec<Symbol>>,
    ) -> Result<Self, String> {
        if n == 0 {
            return Err("automaton needs at least one state".into());
        }
        if initial >= n {
            return Err(format!("initial state {initial} out of range"));
        }
        if atoms.len() > MAX_ATOMS {
            return Err(format!("at most {MAX_ATOMS} atoms supported"));
        }
        let distinct: BTreeSet<_> = atoms.iter().collect();
        if distinct.len() != atoms.len() {
            return Err("duplicate atom".into());
        }
        let mut det = vec![false; n];
        for &q in deterministic {
            if q >= n {
                return Err(format!("dangling state index {q}"));
            }
            det[q] = true;
        }
        let alphabet = alphabet.unwrap_or_else(|| (0..1u64 << atoms.len()).collect());
        let mut symbol_index = HashMap::new();
        for (i, &s) in alphabet.iter().enumerate() {
            if s >> atoms.len() != 0 {
                return Err(format!("symbol {s:#b} uses undeclared atoms"));
            }
            if symbol_index.insert(s, i).is_some() {
                return Err("alphabet symbols must be pairwise distinct".into());
            }
        }
        let k = alphabet.len();
        Ok(Self {
            n,
            initial,
            deterministic: det,
            atoms,
            alphabet,
            symbol_index,
            delta: vec![vec![None; k]; n],
            acc: vec![vec![false; k]; n],
            epsilon: vec![BTreeSet::new(); n],
        })
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn alphabet(&self) -> &[Symbol] {
        &self.alphabet
    }

    pub fn symbol_index(&self, sym: Symbol) -> Option<usize> {
        self.symbol_index.get(&sym).copied()
    }

    fn check_state(&self, q: usize) -> Result<(), String> {
        if q >= self.n {
            Err(format!("dangling state index {q}"))
        } else {
            Ok(())
        }
    }

    pub fn has_transition(&self, q: usize, sym_idx: usize) -> bool {
        self.delta[q][sym_idx].is_some()
    }

    pub fn transition(&mut self, q: usize, sym: Symbol, to: usize, accepting: bool) -> Result<(), String> {
        let i = self
            .symbol_index(sym)
            .ok_or_else(|| format!("unknown letter {sym:#b}"))?;
        self.transition_index(q, i, to, accepting)
    }

    pub fn transition_index(
        &mut self,
        q: usize,
        sym_idx: usize,
        to: usize,
        accepting: bool,
    ) -> Result<(), String> {
        self.check_state(q)?;
        self.check_state(to)?;
        if self.delta[q][sym_idx].is_some() {
            return Err(format!("determinism violation: second transition from {q} on the same letter"));
        }
        if self.deterministic[q] && !self.deterministic[to] {
            return Err(format!("trap violation: {q} is deterministic but {to} is not"));
        }
        if accepting && !(self.deterministic[q] && self.deterministic[to]) {
            return Err(format!(
                "acceptance placement: accepting transition {q} -> {to} leaves the deterministic part"
            ));
        }
        self.delta[q][sym_idx] = Some(to);
        self.acc[q][sym_idx] = accepting;
        Ok(())
    }

    pub fn epsilon(&mut self, q: usize, to: usize) -> Result<(), String> {
        self.check_state(q)?;
        self.check_state(to)?;
        if self.deterministic[q] {
            return Err(format!("epsilon transition from deterministic state {q}"));
        }
        self.epsilon[q].insert(to);
        Ok(())
    }

    pub fn build(self) -> Ldba {
        Ldba {
            n: self.n,
            initial: self.initial,
            deterministic: self.deterministic,
            atoms: self.atoms,
            alphabet: self.alphabet,
            symbol_index: self.symbol_index,
            delta: self.delta,
            acc: self.acc,
            epsilon: self.epsilon.into_iter().map(|e| e.into_iter().collect()).collect(),
        }
    }
}

pub(crate) fn automaton_err(msg: String) -> Error {
    Error::Automaton(msg)
}

/// Builds an automaton from a transition table keyed by atom-name sets.
/// Intended for small hand-written automata.
pub fn ldba_from_table(
    n: usize,
    initial: usize,
    deterministic: &[usize],
    atoms: &[&str],
    transitions: &[(usize, &[&str], usize, bool)],
    epsilon: &[(usize, usize)],
) -> Result<Ldba> {
    let mut b = LdbaBuilder::new(
        n,
        initial,
        deterministic,
        atoms.iter().map(|s| s.to_string()).collect(),
        None,
    )
    .map_err(automaton_err)?;
    let pos: BTreeMap<&str, usize> = atoms.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    for &(q, names, to, acc) in transitions {
        let mut sym = 0;
        for name in names {
            let i = pos
                .get(name)
                .ok_or_else(|| Error::UnknownProposition(name.to_string()))?;
            sym |= 1 << i;
        }
        b.transition(q, sym, to, acc).map_err(automaton_err)?;
    }
    for &(q, to) in epsilon {
        b.epsilon(q, to).map_err(automaton_err)?;
    }
    Ok(b.build())
}
