use super::{Letter, LtlFormula};
use crate::{Error, Result};

/// An ultimately periodic word `prefix · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LassoWord {
    prefix: Vec<Letter>,
    cycle: Vec<Letter>,
}

impl LassoWord {
    pub fn new(prefix: Vec<Letter>, cycle: Vec<Letter>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::InvalidArgument("lasso cycle must be nonempty".into()));
        }
        Ok(Self { prefix, cycle })
    }

    pub fn prefix(&self) -> &[Letter] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[Letter] {
        &self.cycle
    }

    /// Number of distinct positions, `|prefix| + |cycle|`.
    pub fn positions(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    /// Letter at distinct position `i < positions()`.
    pub fn at(&self, i: usize) -> &Letter {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.cycle[i - self.prefix.len()]
        }
    }

    /// Letter at any absolute position of the infinite word.
    pub fn letter_at(&self, n: usize) -> &Letter {
        self.at(self.canonical(n))
    }

    /// Maps an absolute position onto `0..positions()`.
    pub fn canonical(&self, n: usize) -> usize {
        let p = self.prefix.len();
        if n < p {
            n
        } else {
            p + (n - p) % self.cycle.len()
        }
    }

    /// Successor of a distinct position.
    pub fn succ(&self, i: usize) -> usize {
        if i + 1 < self.positions() {
            i + 1
        } else {
            self.prefix.len()
        }
    }
}

/// Decides `w ⊨ f` exactly.
///
/// Each subformula is evaluated on all distinct positions; until is the least
/// fixpoint of its one-step expansion over the successor structure, release
/// the greatest.
pub fn eval_lasso(f: &LtlFormula, w: &LassoWord) -> bool {
    table(f, w)[0]
}

fn table(f: &LtlFormula, w: &LassoWord) -> Vec<bool> {
    use LtlFormula::*;
    let n = w.positions();
    match f {
        True => vec![true; n],
        False => vec![false; n],
        Atom(p) => (0..n).map(|i| w.at(i).contains(p)).collect(),
        NegAtom(p) => (0..n).map(|i| !w.at(i).contains(p)).collect(),
        Not(g) => table(g, w).into_iter().map(|v| !v).collect(),
        And(a, b) => zip(table(a, w), table(b, w), |x, y| x && y),
        Or(a, b) => zip(table(a, w), table(b, w), |x, y| x || y),
        Next(g) => {
            let t = table(g, w);
            (0..n).map(|i| t[w.succ(i)]).collect()
        }
        Until(a, b) => fixpoint(w, &table(a, w), &table(b, w), false),
        Release(a, b) => fixpoint(w, &table(a, w), &table(b, w), true),
        Eventually(g) => fixpoint(w, &vec![true; n], &table(g, w), false),
        Always(g) => fixpoint(w, &vec![false; n], &table(g, w), true),
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

/// Until (`greatest = false`): `v = b ∨ (a ∧ X v)` from all-false.
/// Release (`greatest = true`): `v = b ∧ (a ∨ X v)` from all-true.
fn fixpoint(w: &LassoWord, a: &[bool], b: &[bool], greatest: bool) -> Vec<bool> {
    let n = w.positions();
    let mut v = vec![greatest; n];
    loop {
        let mut changed = false;
        for i in (0..n).rev() {
            let next = v[w.succ(i)];
            let nv = if greatest {
                b[i] && (a[i] || next)
            } else {
                b[i] || (a[i] && next)
            };
            if nv != v[i] {
                v[i] = nv;
                changed = true;
            }
        }
        if !changed {
            return v;
        }
    }
}
