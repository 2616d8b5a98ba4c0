mod common;

use common::{random_boat_state, random_cartpole_state, relaxation_violations};

use std::sync::Arc;

use ltlsynth::automata::{accepts_lasso, cartpole_pos, ldba_from_table, Ldba};
use ltlsynth::cmp::{Boat, BoatParams, CartPole, CartPoleParams, Environment, FiniteMdp, FiniteMdpEnv, Labeling};
use ltlsynth::guided::{stage_label_fn, Curriculum};
use ltlsynth::ltl::{LassoWord, Letter};
use ltlsynth::product::{AugmentedProduct, EpsilonMode, Mode, ProductState};
use ltlsynth::{Real, SimRng};
use rand::{Rng, SeedableRng};

#[test]
fn relaxed_labels_grow_with_radius() {
    assert_eq!(relaxation_violations(&CartPole::labeling(0.4).unwrap(), random_cartpole_state, 1.0), 0);
    assert_eq!(relaxation_violations(&Boat::labeling(95.0, 105.0).unwrap(), random_boat_state, 60.0), 0);
}

/// Word induced by relabelling a recorded state sequence, with the last
/// letter repeated forever.
fn induced_word(states: &[Vec<f64>], letters: impl Fn(&[f64]) -> u64, names: &[String]) -> LassoWord {
    let letter = |mask: u64| -> Letter { (0..names.len()).filter(|i| mask >> i & 1 == 1).map(|i| names[i].clone()).collect() };
    let mut word: Vec<Letter> = states.iter().map(|s| letter(letters(s))).collect();
    let last = word.pop().unwrap();
    LassoWord::new(word, vec![last]).unwrap()
}

#[test]
fn tighter_stage_acceptance_implies_looser() {
    let lab = CartPole::labeling(0.4).unwrap();
    let names = lab.alphabet().names().to_vec();
    let a: Ldba = cartpole_pos();
    let cur = Curriculum::from_radii(&[0.6, 0.3, 0.1, 0.0]);
    let stages: Vec<_> = (0..4).map(|i| stage_label_fn(&lab, &cur, i).unwrap()).collect();
    let env = CartPole::new(CartPoleParams { noise_std: 0.05, init_range: 0.3, ..Default::default() });
    let mut rng = SimRng::seed_from_u64(12);
    let mut accepted_tight = 0;
    for _ in 0..300 {
        let mut s = env.sample_initial(&mut rng);
        let mut states = vec![s.clone()];
        for _ in 0..60 {
            s = env.sample_next(&s, rng.random_range(0..2), &mut rng).unwrap();
            states.push(s.clone());
        }
        // Stage order runs from loose to tight; compare each tight stage
        // with the looser one before it.
        for i in (1..4).rev() {
            let tight = induced_word(&states, |x| stages[i].letters(x).unwrap(), &names);
            let loose = induced_word(&states, |x| stages[i - 1].letters(x).unwrap(), &names);
            if accepts_lasso(&a, &tight).unwrap() {
                accepted_tight += 1;
                assert!(accepts_lasso(&a, &loose).unwrap());
            }
        }
    }
    assert!(accepted_tight > 0);
}

#[test]
fn environment_moves_replay_exactly() {
    // Product steps on the raw environment must be exactly the
    // environment's own transitions under the chosen inputs.
    let env: Arc<dyn Environment<f64>> = Arc::new(CartPole::new(CartPoleParams::default()));
    let ap = AugmentedProduct::new(env.clone(), Arc::new(cartpole_pos()), CartPole::labeling(0.4).unwrap(), 0.9, Mode::UpperBound)
        .unwrap();
    let mut rng = SimRng::seed_from_u64(77);
    for _ in 0..200 {
        let mut x = ap.sample_initial(&mut rng);
        for _ in 0..100 {
            let ProductState::Pair { s, q } = x.clone() else { break };
            let u = rng.random_range(0..ap.num_inputs());
            let before = rng.clone();
            let (next, phi) = ap.step(&x, u, &mut rng).unwrap();
            let (q2, accepting) = ap.automaton_successor(q, &s).unwrap();
            let mut replay = before;
            if accepting && ap.zeta() < 1.0 {
                let _ = f64::unit_uniform(&mut replay);
            }
            if phi {
                assert!(accepting && next.is_sink());
                break;
            }
            let s2 = env.sample_next(&s, u, &mut replay).unwrap();
            assert_eq!(next, ProductState::Pair { s: s2, q: q2 });
            x = next;
        }
    }
}

fn eventually_always_env() -> AugmentedProduct<f64> {
    let a = ldba_from_table(2, 0, &[1], &["a"], &[(0, &[], 0, false), (0, &["a"], 0, false), (1, &["a"], 1, true)], &[(0, 1)])
        .unwrap();
    let mdp = FiniteMdp::new(vec![vec![vec![(0, 1.0)], vec![(0, 1.0)]]], vec![false], vec![false], 0).unwrap();
    let lab = Labeling::for_finite_states(vec!["a".into()], &[vec!["a"]]).unwrap();
    AugmentedProduct::new(Arc::new(FiniteMdpEnv::new(mdp)), Arc::new(a), lab, 0.9, Mode::UpperBound).unwrap()
}

#[test]
fn epsilon_inputs_and_modes() {
    let opt = eventually_always_env();
    let x = opt.sample_initial(&mut SimRng::seed_from_u64(0));
    let mut mask = Vec::new();
    opt.valid_inputs(&x, &mut mask).unwrap();
    assert_eq!(mask, [true, true, true]);
    let ex = eventually_always_env().with_epsilon_mode(EpsilonMode::Exclusive);
    ex.valid_inputs(&x, &mut mask).unwrap();
    assert_eq!(mask, [false, false, true]);
    let mut rng = SimRng::seed_from_u64(0);
    let (y, _) = ex.step(&x, 2, &mut rng).unwrap();
    assert_eq!(y, ProductState::Pair { s: vec![0.0], q: 1 });
    assert!(ex.step(&x, 0, &mut rng).is_err());
}

#[test]
fn boat_product_encodes_with_automaton_block() {
    let env: Arc<dyn Environment<f64>> = Arc::new(Boat::new(BoatParams::default()));
    let ap = AugmentedProduct::new(env, Arc::new(ltlsynth::automata::boat_pos()), Boat::labeling(95.0, 105.0).unwrap(), 0.99, Mode::UpperBound)
        .unwrap();
    let mut f = Vec::new();
    ap.encode(&ProductState::Pair { s: vec![0.0, 80.0, 0.0, 0.0, 0.0, 0.0], q: 1 }, &mut f).unwrap();
    assert_eq!(f.len(), 6 + 2);
    assert_eq!(&f[6..], &[0.0, 1.0]);
    let cp = AugmentedProduct::new(
        Arc::new(CartPole::new(CartPoleParams::default())),
        Arc::new(cartpole_pos()),
        CartPole::labeling(0.4).unwrap(),
        0.99,
        Mode::UpperBound,
    )
    .unwrap();
    assert_eq!(cp.feature_dim(), 7);
}
