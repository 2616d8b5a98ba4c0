//! Composition of an environment with an LDBA, plus the absorbing sink `φ`
//! entered with probability `1 - zeta` whenever an accepting transition fires.

mod finite;

use std::sync::Arc;

use crate::automata::{Ldba, Symbol};
use crate::cmp::{Environment, Labeling};
use crate::{Error, Real, Result, SimRng};

pub use finite::{augment_finite, build_finite_product, FiniteProduct};

/// Which bound the sink reward yields.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Automaton for the objective; reward 1 on reaching `φ`.
    UpperBound,
    /// Automaton for the negated objective; reward 1 on avoiding `φ`.
    LowerBound,
}

/// How ε-moves combine with environment inputs at states that have them.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum EpsilonMode {
    /// Environment inputs stay available next to the ε-jumps, so the
    /// controller may postpone the jump.
    #[default]
    Optional,
    /// Only the ε-jumps are available.
    Exclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProductState<T> {
    /// The absorbing sink `φ`.
    Sink,
    /// Environment state and automaton state. `q == num_states()` of the
    /// automaton denotes its implicit rejecting sink.
    Pair { s: Vec<T>, q: usize },
}

impl<T> ProductState<T> {
    pub fn is_sink(&self) -> bool {
        matches!(self, ProductState::Sink)
    }
}

/// Reward of a finished episode.
pub fn episode_reward<T: Real>(mode: Mode, reached_phi: bool) -> T {
    match (mode, reached_phi) {
        (Mode::UpperBound, true) | (Mode::LowerBound, false) => T::one(),
        _ => T::zero(),
    }
}

#[derive(Clone, Debug)]
enum SymbolMap {
    /// Automaton atoms are letter names; `bits[id]` is the atom bit of letter `id`.
    Letters(Vec<Symbol>),
    /// Automaton atoms are propositions; `bits[id]` is the symbol of letter `id`.
    Props(Vec<Symbol>),
}

#[derive(Clone)]
pub struct AugmentedProduct<T: Real> {
    env: Arc<dyn Environment<T>>,
    automaton: Arc<Ldba>,
    labeling: Labeling<T>,
    symbols: SymbolMap,
    radius: T,
    zeta: T,
    mode: Mode,
    epsilon_mode: EpsilonMode,
    eps_targets: Vec<usize>,
    live: Vec<bool>,
    accepting_trap: Vec<bool>,
    initial: Option<Vec<T>>,
}

impl<T: Real> std::fmt::Debug for AugmentedProduct<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AugmentedProduct")
            .field("radius", &self.radius)
            .field("zeta", &self.zeta)
            .field("mode", &self.mode)
            .field("epsilon_mode", &self.epsilon_mode)
            .finish_non_exhaustive()
    }
}

fn symbol_map<T: Real>(a: &Ldba, lab: &Labeling<T>) -> Result<SymbolMap> {
    let alphabet = lab.alphabet();
    let letters_named = a.atoms().iter().all(|x| alphabet.names().contains(x));
    if letters_named {
        let mut bits = vec![0; alphabet.len()];
        for (id, b) in bits.iter_mut().enumerate() {
            match a.atom_index(alphabet.name(id)) {
                Some(i) => *b = 1 << i,
                None if lab.cell(id).is_empty() => {}
                None => {
                    return Err(Error::InvalidArgument(format!(
                        "labelling emits letter {} which is not an automaton atom",
                        alphabet.name(id)
                    )))
                }
            }
        }
        return Ok(SymbolMap::Letters(bits));
    }
    if let Some(x) = a.atoms().iter().find(|x| !alphabet.propositions().contains(x)) {
        return Err(Error::UnknownProposition(x.clone()));
    }
    let bits = (0..alphabet.len())
        .map(|id| {
            alphabet
                .letter(id)
                .iter()
                .filter_map(|p| a.atom_index(p))
                .fold(0, |acc, i| acc | 1 << i)
        })
        .collect();
    Ok(SymbolMap::Props(bits))
}

/// States from which some accepting transition is reachable.
fn live_states(a: &Ldba) -> Vec<bool> {
    let n = a.num_states();
    let mut live: Vec<bool> = (0..n)
        .map(|q| (0..a.alphabet().len()).any(|i| a.is_accepting_index(q, i)))
        .collect();
    loop {
        let mut changed = false;
        for q in 0..n {
            if live[q] {
                continue;
            }
            let succ_live = a.epsilon(q).iter().any(|&t| live[t])
                || (0..a.alphabet().len()).any(|i| a.step_index(q, i).is_some_and(|t| live[t]));
            if succ_live {
                live[q] = true;
                changed = true;
            }
        }
        if !changed {
            live.push(false);
            return live;
        }
    }
}

/// States whose every future transition is accepting: all symbols defined,
/// all successors in the set, no ε-moves. Requires the full symbol powerset
/// so that no emitted symbol can fall outside the alphabet.
fn accepting_traps(a: &Ldba) -> Vec<bool> {
    let n = a.num_states();
    let full = a.alphabet().len() == 1 << a.atoms().len();
    let mut trap: Vec<bool> = (0..n)
        .map(|q| {
            full && a.epsilon(q).is_empty()
                && (0..a.alphabet().len()).all(|i| a.is_accepting_index(q, i))
        })
        .collect();
    loop {
        let mut changed = false;
        for q in 0..n {
            if trap[q] && !(0..a.alphabet().len()).all(|i| a.step_index(q, i).is_some_and(|t| trap[t])) {
                trap[q] = false;
                changed = true;
            }
        }
        if !changed {
            trap.push(false);
            return trap;
        }
    }
}

impl<T: Real> AugmentedProduct<T> {
    pub fn new(
        env: Arc<dyn Environment<T>>,
        automaton: Arc<Ldba>,
        labeling: Labeling<T>,
        zeta: T,
        mode: Mode,
    ) -> Result<Self> {
        if !(zeta > T::zero() && zeta <= T::one()) {
            return Err(Error::InvalidArgument(format!("zeta = {zeta} outside (0, 1]")));
        }
        if labeling.dim() != env.state_dim() {
            return Err(Error::Shape(format!(
                "labelling over dimension {} for a {}-dimensional environment",
                labeling.dim(),
                env.state_dim()
            )));
        }
        let symbols = symbol_map(&automaton, &labeling)?;
        let mut eps_targets: Vec<usize> = (0..automaton.num_states())
            .flat_map(|q| automaton.epsilon(q).to_vec())
            .collect();
        eps_targets.sort_unstable();
        eps_targets.dedup();
        Ok(Self {
            live: live_states(&automaton),
            accepting_trap: accepting_traps(&automaton),
            env,
            automaton,
            labeling,
            symbols,
            radius: T::zero(),
            zeta,
            mode,
            epsilon_mode: EpsilonMode::default(),
            eps_targets,
            initial: None,
        })
    }

    pub fn with_radius(mut self, r: T) -> Result<Self> {
        if !(r >= T::zero()) {
            return Err(Error::InvalidArgument(format!("relaxation radius {r} is negative")));
        }
        self.radius = r;
        Ok(self)
    }

    pub fn with_zeta(mut self, zeta: T) -> Result<Self> {
        if !(zeta > T::zero() && zeta <= T::one()) {
            return Err(Error::InvalidArgument(format!("zeta = {zeta} outside (0, 1]")));
        }
        self.zeta = zeta;
        Ok(self)
    }

    /// Replaces the labelling; the automaton is kept as is.
    pub fn with_labeling(mut self, labeling: Labeling<T>) -> Result<Self> {
        if labeling.dim() != self.env.state_dim() {
            return Err(Error::Shape("labelling dimension".into()));
        }
        self.symbols = symbol_map(&self.automaton, &labeling)?;
        self.labeling = labeling;
        Ok(self)
    }

    pub fn with_epsilon_mode(mut self, m: EpsilonMode) -> Self {
        self.epsilon_mode = m;
        self
    }

    /// Fixes the initial environment state instead of sampling it.
    pub fn with_initial_state(mut self, s: Option<Vec<T>>) -> Self {
        self.initial = s;
        self
    }

    pub fn env(&self) -> &Arc<dyn Environment<T>> {
        &self.env
    }

    pub fn automaton(&self) -> &Arc<Ldba> {
        &self.automaton
    }

    pub fn labeling(&self) -> &Labeling<T> {
        &self.labeling
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn zeta(&self) -> T {
        self.zeta
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn epsilon_mode(&self) -> EpsilonMode {
        self.epsilon_mode
    }

    /// Environment inputs followed by one ε-jump input per ε-target state.
    pub fn num_inputs(&self) -> usize {
        self.env.num_inputs() + self.eps_targets.len()
    }

    /// The automaton state an input jumps to, if it is an ε-input.
    pub fn epsilon_target(&self, u: usize) -> Option<usize> {
        u.checked_sub(self.env.num_inputs())
            .and_then(|k| self.eps_targets.get(k).copied())
    }

    pub fn input_label(&self, u: usize) -> String {
        match self.epsilon_target(u) {
            Some(q) => format!("eps{q}"),
            None => self.env.input_label(u),
        }
    }

    pub fn feature_dim(&self) -> usize {
        self.env.feature_dim() + self.automaton.num_states()
    }

    /// Network input: environment features followed by a one-hot block for
    /// the automaton state.
    pub fn encode(&self, x: &ProductState<T>, out: &mut Vec<T>) -> Result<()> {
        let ProductState::Pair { s, q } = x else {
            return Err(Error::InvalidArgument("the sink has no encoding".into()));
        };
        out.clear();
        self.env.features(s, out);
        let nq = self.automaton.num_states();
        out.extend((0..nq).map(|j| if j == *q { T::one() } else { T::zero() }));
        Ok(())
    }

    pub fn sample_initial(&self, rng: &mut SimRng) -> ProductState<T> {
        let s = match &self.initial {
            Some(s) => s.clone(),
            None => self.env.sample_initial(rng),
        };
        ProductState::Pair { s, q: self.automaton.initial() }
    }

    /// The automaton symbol read at environment state `s`.
    pub fn symbol_at(&self, s: &[T]) -> Result<Symbol> {
        let letters = self.labeling.relaxed_label(self.radius, s)?;
        match &self.symbols {
            SymbolMap::Letters(bits) => Ok((0..bits.len())
                .filter(|id| letters >> id & 1 == 1)
                .fold(0, |acc, id| acc | bits[id])),
            SymbolMap::Props(bits) => {
                if letters.count_ones() != 1 {
                    return Err(Error::InvalidArgument(
                        "relaxed labelling emits several letters but the automaton reads propositions"
                            .into(),
                    ));
                }
                Ok(bits[letters.trailing_zeros() as usize])
            }
        }
    }

    /// Valid-input mask at `x` (length [`AugmentedProduct::num_inputs`]).
    pub fn valid_inputs(&self, x: &ProductState<T>, mask: &mut Vec<bool>) -> Result<()> {
        let ProductState::Pair { s, q } = x else {
            return Err(Error::InvalidArgument("no inputs at the sink".into()));
        };
        let m = self.env.num_inputs();
        mask.clear();
        mask.resize(self.num_inputs(), false);
        let eps: &[usize] = if *q < self.automaton.num_states() { self.automaton.epsilon(*q) } else { &[] };
        if eps.is_empty() || self.epsilon_mode == EpsilonMode::Optional {
            self.env.valid_inputs(s, &mut mask[..m]);
        }
        for (k, t) in self.eps_targets.iter().enumerate() {
            mask[m + k] = eps.contains(t);
        }
        Ok(())
    }

    /// One product transition. Returns the next state and whether it is `φ`.
    pub fn step(&self, x: &ProductState<T>, u: usize, rng: &mut SimRng) -> Result<(ProductState<T>, bool)> {
        let ProductState::Pair { s, q } = x else {
            return Err(Error::InvalidArgument("the sink is absorbing and terminal".into()));
        };
        let nq = self.automaton.num_states();
        if let Some(t) = self.epsilon_target(u) {
            if *q >= nq || !self.automaton.epsilon(*q).contains(&t) {
                return Err(Error::InvalidArgument(format!("no ε-move {q} -> {t}")));
            }
            return Ok((ProductState::Pair { s: s.clone(), q: t }, false));
        }
        if u >= self.env.num_inputs() {
            return Err(Error::InvalidArgument(format!("input {u} out of range")));
        }
        if self.epsilon_mode == EpsilonMode::Exclusive && *q < nq && !self.automaton.epsilon(*q).is_empty() {
            return Err(Error::InvalidArgument(format!("only ε-inputs are valid at automaton state {q}")));
        }
        let (q2, accepting) = self.automaton_successor(*q, s)?;
        if accepting && self.zeta < T::one() && T::unit_uniform(rng) < T::one() - self.zeta {
            return Ok((ProductState::Sink, true));
        }
        let s2 = self.env.sample_next(s, u, rng)?;
        Ok((ProductState::Pair { s: s2, q: q2 }, false))
    }

    /// Automaton successor of `q` on the symbol read at `s`, and whether that
    /// transition is accepting. Undefined moves lead to the rejecting sink.
    pub fn automaton_successor(&self, q: usize, s: &[T]) -> Result<(usize, bool)> {
        let nq = self.automaton.num_states();
        if q >= nq {
            return Ok((nq, false));
        }
        let sym = self.symbol_at(s)?;
        Ok(self
            .automaton
            .symbol_index(sym)
            .and_then(|i| self.automaton.step_index(q, i).map(|t| (t, self.automaton.is_accepting_index(q, i))))
            .unwrap_or((nq, false)))
    }

    /// Whether `φ` can still be reached from automaton state `q`.
    pub fn phi_reachable(&self, q: usize) -> bool {
        self.live[q]
    }

    /// Whether every transition from `q` on is accepting, so that each
    /// further step enters `φ` with probability `1 - zeta` regardless of the
    /// inputs.
    pub fn in_accepting_trap(&self, q: usize) -> bool {
        self.accepting_trap[q]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{cartpole_neg, cartpole_pos, ldba_from_table, universal};
    use crate::cmp::{CartPole, CartPoleParams, FiniteMdp, FiniteMdpEnv, Interval};
    use rand::SeedableRng;

    fn cartpole_labeling() -> Labeling<f64> {
        let inf = f64::INFINITY;
        let deg = 12f64.to_radians();
        Labeling::new(
            4,
            vec!["a".into(), "c1".into(), "c2".into()],
            vec![
                vec![Interval::slab(4, 0, 0.4, 1.0)],
                vec![Interval::slab(4, 0, -1.0, 1.0)],
                vec![Interval::new(vec![-inf, -inf, -deg, -inf], vec![inf, inf, deg, inf]).unwrap()],
            ],
        )
        .unwrap()
    }

    fn cartpole_product(zeta: f64, noise: f64) -> AugmentedProduct<f64> {
        let env = CartPole::new(CartPoleParams { noise_std: noise, ..Default::default() });
        AugmentedProduct::new(Arc::new(env), Arc::new(cartpole_pos()), cartpole_labeling(), zeta, Mode::UpperBound)
            .unwrap()
    }

    #[test]
    fn rewards_are_complementary() {
        for reached in [false, true] {
            let up: f64 = episode_reward(Mode::UpperBound, reached);
            let low: f64 = episode_reward(Mode::LowerBound, reached);
            assert_eq!(up + low, 1.0);
        }
        assert_eq!(episode_reward::<f64>(Mode::UpperBound, true), 1.0);
        assert_eq!(episode_reward::<f64>(Mode::LowerBound, true), 0.0);
    }

    #[test]
    fn cartpole_inputs_and_encoding() {
        let p = cartpole_product(0.999, 0.01);
        let mut rng = SimRng::seed_from_u64(0);
        let x = p.sample_initial(&mut rng);
        let mut mask = Vec::new();
        p.valid_inputs(&x, &mut mask).unwrap();
        assert_eq!(mask, vec![true, true]);
        let mut enc = Vec::new();
        p.encode(&x, &mut enc).unwrap();
        assert_eq!(enc.len(), 7);
        assert_eq!(&enc[4..], &[1.0, 0.0, 0.0]);
        let y = ProductState::Pair { s: x_state(&x), q: 1 };
        let mut enc2 = Vec::new();
        p.encode(&y, &mut enc2).unwrap();
        assert_eq!(&enc[..4], &enc2[..4]);
        assert_eq!(&enc2[4..], &[0.0, 1.0, 0.0]);
        assert!(p.valid_inputs(&ProductState::Sink, &mut mask).is_err());
    }

    fn x_state(x: &ProductState<f64>) -> Vec<f64> {
        match x {
            ProductState::Pair { s, .. } => s.clone(),
            ProductState::Sink => unreachable!(),
        }
    }

    #[test]
    fn zeta_one_never_jumps() {
        let p = cartpole_product(1.0, 0.01);
        let mut rng = SimRng::seed_from_u64(1);
        let mut x = ProductState::Pair { s: vec![0.5, 0.0, 0.0, 0.0], q: 1 };
        for _ in 0..200 {
            let (y, phi) = p.step(&x, 1, &mut rng).unwrap();
            assert!(!phi);
            x = y;
        }
    }

    #[test]
    fn non_accepting_step_matches_raw_kernel() {
        let p = cartpole_product(0.5, 0.01);
        let env = CartPole::<f64>::new(CartPoleParams::default());
        let s = vec![0.0, 0.1, 0.02, -0.1];
        for seed in 0..20 {
            let mut r1 = SimRng::seed_from_u64(seed);
            let mut r2 = SimRng::seed_from_u64(seed);
            let (y, phi) = p.step(&ProductState::Pair { s: s.clone(), q: 0 }, 0, &mut r1).unwrap();
            assert!(!phi);
            assert_eq!(x_state(&y), env.sample_next(&s, 0, &mut r2).unwrap());
        }
    }

    #[test]
    fn sink_jump_frequency() {
        let p = cartpole_product(0.999, 0.0);
        let mut rng = SimRng::seed_from_u64(2);
        let x = ProductState::Pair { s: vec![0.5, 0.0, 0.0, 0.0], q: 1 };
        let n = 1_000_000;
        let hits = (0..n).filter(|_| p.step(&x, 0, &mut rng).unwrap().1).count();
        let freq = hits as f64 / n as f64;
        assert!((freq - 0.001).abs() < 3e-4, "{freq}");
    }

    #[test]
    fn epsilon_inputs() {
        // ◊□a with an ε-guess from 0 to 1.
        let a = ldba_from_table(
            2,
            0,
            &[1],
            &["a"],
            &[(0, &[], 0, false), (0, &["a"], 0, false), (1, &["a"], 1, true)],
            &[(0, 1)],
        )
        .unwrap();
        let mdp = FiniteMdp::new(vec![vec![vec![(0, 1.0)], vec![(0, 1.0)]]], vec![false], vec![false], 0).unwrap();
        let lab = Labeling::for_finite_states(vec!["a".into()], &[vec!["a"]]).unwrap();
        let p = AugmentedProduct::new(Arc::new(FiniteMdpEnv::new(mdp)), Arc::new(a), lab, 0.9, Mode::UpperBound)
            .unwrap();
        assert_eq!(p.num_inputs(), 3);
        let x = ProductState::Pair { s: vec![0.0], q: 0 };
        let mut mask = Vec::new();
        p.valid_inputs(&x, &mut mask).unwrap();
        assert_eq!(mask, vec![true, true, true]);
        let strict = p.clone().with_epsilon_mode(EpsilonMode::Exclusive);
        strict.valid_inputs(&x, &mut mask).unwrap();
        assert_eq!(mask, vec![false, false, true]);
        let mut rng = SimRng::seed_from_u64(0);
        let (y, phi) = p.step(&x, 2, &mut rng).unwrap();
        assert_eq!(y, ProductState::Pair { s: vec![0.0], q: 1 });
        assert!(!phi);
        assert!(strict.step(&x, 0, &mut rng).is_err());
        let x1 = ProductState::Pair { s: vec![0.0], q: 1 };
        p.valid_inputs(&x1, &mut mask).unwrap();
        assert_eq!(mask, vec![true, true, false]);
        assert!(p.step(&x1, 2, &mut rng).is_err());
    }

    #[test]
    fn liveness_and_traps() {
        let env: Arc<dyn Environment<f64>> = Arc::new(CartPole::new(CartPoleParams::default()));
        let pos = AugmentedProduct::new(env.clone(), Arc::new(cartpole_pos()), cartpole_labeling(), 0.99, Mode::UpperBound)
            .unwrap();
        assert_eq!((0..4).map(|q| pos.phi_reachable(q)).collect::<Vec<_>>(), [true, true, false, false]);
        assert!(!(0..4).any(|q| pos.in_accepting_trap(q)));
        let neg = AugmentedProduct::new(env, Arc::new(cartpole_neg()), cartpole_labeling(), 0.99, Mode::LowerBound)
            .unwrap();
        assert_eq!((0..4).map(|q| neg.in_accepting_trap(q)).collect::<Vec<_>>(), [false, false, true, false]);
    }

    #[test]
    fn rejects_foreign_atoms() {
        let env: Arc<dyn Environment<f64>> = Arc::new(CartPole::new(CartPoleParams::default()));
        let r = AugmentedProduct::new(env, Arc::new(universal(&["zz"])), cartpole_labeling(), 0.9, Mode::UpperBound);
        assert!(matches!(r, Err(Error::UnknownProposition(_))));
    }
}
