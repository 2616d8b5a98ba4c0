#![allow(dead_code)]

use std::collections::BTreeSet;

use ltlsynth::ltl::{LassoWord, Letter, LtlFormula};
use ltlsynth::cmp::Labeling;
use ltlsynth::SimRng;
use rand::{Rng, SeedableRng};

pub fn props(n: usize) -> Vec<String> {
    ["a", "b", "c"][..n].iter().map(|s| s.to_string()).collect()
}

pub fn random_letter(rng: &mut SimRng, props: &[String]) -> Letter {
    props.iter().filter(|_| rng.random_bool(0.5)).cloned().collect()
}

pub fn random_lasso(rng: &mut SimRng, props: &[String], max_len: usize) -> LassoWord {
    let p = rng.random_range(0..=max_len);
    let c = rng.random_range(1..=max_len);
    let prefix = (0..p).map(|_| random_letter(rng, props)).collect();
    let cycle = (0..c).map(|_| random_letter(rng, props)).collect();
    LassoWord::new(prefix, cycle).unwrap()
}

/// Random formula with general negation, depth at most `depth`.
pub fn random_formula(rng: &mut SimRng, props: &[String], depth: usize) -> LtlFormula {
    use LtlFormula::*;
    let b = |f: LtlFormula| Box::new(f);
    if depth == 0 || rng.random_bool(0.25) {
        return match rng.random_range(0..6) {
            0 => True,
            1 => False,
            2 | 3 => Atom(props[rng.random_range(0..props.len())].clone()),
            _ => NegAtom(props[rng.random_range(0..props.len())].clone()),
        };
    }
    let d = depth - 1;
    match rng.random_range(0..9) {
        0 => Not(b(random_formula(rng, props, d))),
        1 => And(b(random_formula(rng, props, d)), b(random_formula(rng, props, d))),
        2 => Or(b(random_formula(rng, props, d)), b(random_formula(rng, props, d))),
        3 => Next(b(random_formula(rng, props, d))),
        4 => Until(b(random_formula(rng, props, d)), b(random_formula(rng, props, d))),
        5 => Release(b(random_formula(rng, props, d)), b(random_formula(rng, props, d))),
        6 => Eventually(b(random_formula(rng, props, d))),
        7 => Always(b(random_formula(rng, props, d))),
        _ => Not(b(random_formula(rng, props, d))),
    }
}

/// Path-based evaluation: follows the unique successor path from each
/// position for as many steps as the word has positions, after which the
/// path repeats.
pub fn eval_by_paths(f: &LtlFormula, w: &LassoWord) -> bool {
    holds(f, w, 0)
}

fn holds(f: &LtlFormula, w: &LassoWord, i: usize) -> bool {
    use LtlFormula::*;
    let n = w.positions();
    let path = |i: usize| {
        let mut out = Vec::with_capacity(n);
        let mut j = i;
        for _ in 0..n {
            out.push(j);
            j = w.succ(j);
        }
        out
    };
    match f {
        True => true,
        False => false,
        Atom(p) => w.at(i).contains(p),
        NegAtom(p) => !w.at(i).contains(p),
        Not(g) => !holds(g, w, i),
        And(a, b) => holds(a, w, i) && holds(b, w, i),
        Or(a, b) => holds(a, w, i) || holds(b, w, i),
        Next(g) => holds(g, w, w.succ(i)),
        Until(a, b) => {
            for j in path(i) {
                if holds(b, w, j) {
                    return true;
                }
                if !holds(a, w, j) {
                    return false;
                }
            }
            false
        }
        Release(a, b) => {
            for j in path(i) {
                if !holds(b, w, j) {
                    return false;
                }
                if holds(a, w, j) {
                    return true;
                }
            }
            true
        }
        Eventually(g) => path(i).into_iter().any(|j| holds(g, w, j)),
        Always(g) => path(i).into_iter().all(|j| holds(g, w, j)),
    }
}

pub fn letter_set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

use ltlsynth::automata::{ldba_from_table, Ldba, Symbol};
use ltlsynth::cmp::{random_finite_mdp, FiniteMdp};
use ltlsynth::oracle::{buchi_value, max_reach, min_reach};
use ltlsynth::product::{augment_finite, build_finite_product, EpsilonMode};

/// `◊□a` as an LDBA with one ε-jump.
pub fn eventually_always_a() -> Ldba {
    ldba_from_table(
        2,
        0,
        &[1],
        &["a", "b"],
        &[
            (0, &[], 0, false),
            (0, &["a"], 0, false),
            (0, &["b"], 0, false),
            (0, &["a", "b"], 0, false),
            (1, &["a"], 1, true),
            (1, &["a", "b"], 1, true),
        ],
        &[(0, 1)],
    )
    .unwrap()
}

/// `□◊¬a` as a one-state DBA.
pub fn infinitely_often_not_a() -> Ldba {
    ldba_from_table(
        1,
        0,
        &[0],
        &["a", "b"],
        &[(0, &[], 0, true), (0, &["b"], 0, true), (0, &["a"], 0, false), (0, &["a", "b"], 0, false)],
        &[],
    )
    .unwrap()
}

/// `◊a ∧ □b` as a DBA.
pub fn reach_a_keep_b() -> Ldba {
    ldba_from_table(
        2,
        0,
        &[0, 1],
        &["a", "b"],
        &[(0, &["b"], 0, false), (0, &["a", "b"], 1, true), (1, &["b"], 1, true), (1, &["a", "b"], 1, true)],
        &[],
    )
    .unwrap()
}

/// `□¬a ∨ ◊¬b` as a DBA.
pub fn avoid_a_or_break_b() -> Ldba {
    ldba_from_table(
        3,
        0,
        &[0, 1, 2],
        &["a", "b"],
        &[
            (0, &["b"], 0, true),
            (0, &["a", "b"], 1, false),
            (0, &[], 2, true),
            (0, &["a"], 2, true),
            (1, &["b"], 1, false),
            (1, &["a", "b"], 1, false),
            (1, &[], 2, true),
            (1, &["a"], 2, true),
            (2, &[], 2, true),
            (2, &["a"], 2, true),
            (2, &["b"], 2, true),
            (2, &["a", "b"], 2, true),
        ],
        &[],
    )
    .unwrap()
}

/// `(ψ automaton, ¬ψ DBA)` pairs over atoms `a`, `b`.
pub fn complement_pairs() -> Vec<(&'static str, Ldba, Ldba)> {
    vec![
        ("<>[]a", eventually_always_a(), infinitely_often_not_a()),
        ("<>a & []b", reach_a_keep_b(), avoid_a_or_break_b()),
    ]
}

/// Random MDP with every state labelled by a random subset of `{a, b}`.
pub fn random_labelled_mdp(rng: &mut SimRng, a: &Ldba) -> (FiniteMdp<f64>, Vec<Symbol>) {
    let n = rng.random_range(2..=8);
    let k = rng.random_range(1..=3);
    let mdp = random_finite_mdp(n, k, 0.0, rng).unwrap();
    let labels = (0..n)
        .map(|_| {
            let names: Vec<&str> = ["a", "b"].into_iter().filter(|_| rng.random_bool(0.6)).collect();
            a.symbol_of(names).unwrap()
        })
        .collect();
    (mdp, labels)
}

pub struct Sandwich {
    pub lower: f64,
    pub buchi: f64,
    pub reach: f64,
}

/// Exact values of both sides of the complement sandwich on one fixture.
pub fn sandwich(mdp: &FiniteMdp<f64>, labels: &[Symbol], pos: &Ldba, neg: &Ldba, zeta: f64) -> Sandwich {
    let p = build_finite_product(mdp, pos, labels, EpsilonMode::Optional).unwrap();
    let n = build_finite_product(mdp, neg, labels, EpsilonMode::Optional).unwrap();
    let init_p = p.mdp.initial();
    let buchi = buchi_value(&p.mdp, p.mdp.accepting(), 1e-12).unwrap().values[init_p];
    let aug_p = augment_finite(&p.mdp, zeta).unwrap();
    let reach = max_reach(&aug_p).unwrap().values[init_p];
    let aug_n = augment_finite(&n.mdp, zeta).unwrap();
    let lower = 1.0 - min_reach(&aug_n).unwrap().values[n.mdp.initial()];
    Sandwich { lower, buchi, reach }
}

pub fn random_cartpole_state(rng: &mut SimRng) -> Vec<f64> {
    vec![rng.random_range(-1.5..1.5), rng.random_range(-2.0..2.0), rng.random_range(-0.4..0.4), rng.random_range(-2.0..2.0)]
}

pub fn random_boat_state(rng: &mut SimRng) -> Vec<f64> {
    vec![
        rng.random_range(150.0..=200.0),
        rng.random_range(0.0..200.0),
        rng.random_range(-90.0..90.0),
        rng.random_range(-10.0..10.0),
        rng.random_range(0.0..2.5),
        rng.random_range(-10.0..10.0),
    ]
}

/// Samples `(s, r <= r')` and counts states where `Λ_r(s)` is not contained
/// in `Λ_r'(s)` or does not contain the exact letter.
pub fn relaxation_violations(lab: &Labeling<f64>, draw: impl Fn(&mut SimRng) -> Vec<f64>, max_r: f64) -> usize {
    let mut rng = SimRng::seed_from_u64(99);
    let mut violations = 0;
    for _ in 0..10_000 {
        let s = draw(&mut rng);
        let r1 = rng.random_range(0.0..max_r);
        let r2 = rng.random_range(r1..=max_r);
        let small = lab.relaxed_label(r1, &s).unwrap();
        let big = lab.relaxed_label(r2, &s).unwrap();
        let exact = lab.relaxed_label(0.0, &s).unwrap();
        if small & big != small || exact & small != exact || exact != 1 << lab.label(&s) {
            violations += 1;
        }
    }
    violations
}

/// Random lasso whose positions are sets of letter names: singletons half of
/// the time, arbitrary (possibly empty) sets otherwise.
pub fn random_letter_lasso(rng: &mut SimRng, names: &[String]) -> LassoWord {
    let pos = |rng: &mut SimRng| -> Letter {
        if rng.random_bool(0.5) {
            [names[rng.random_range(0..names.len())].clone()].into()
        } else {
            names.iter().filter(|_| rng.random_bool(0.3)).cloned().collect()
        }
    };
    let p = rng.random_range(0..=5);
    let c = rng.random_range(1..=5);
    let prefix = (0..p).map(|_| pos(rng)).collect();
    let cycle = (0..c).map(|_| pos(rng)).collect();
    LassoWord::new(prefix, cycle).unwrap()
}
