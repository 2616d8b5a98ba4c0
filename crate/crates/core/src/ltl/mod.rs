//! Linear temporal logic: syntax, positive normal form, reinterpretation over
//! alphabet letters, and exact evaluation on ultimately periodic words.
//!
//! Concrete grammar (see `docs/ltl-grammar.md`):
//!
//! ```text
//! formula := implication
//! implication := disjunction ( "->" implication )?
//! disjunction := conjunction ( ("|" | "||") conjunction )*
//! conjunction := binary ( ("&" | "&&") binary )*
//! binary      := unary ( ("U" | "R") binary )?
//! unary       := ("!" | "X" | "<>" | "F" | "[]" | "G") unary | primary
//! primary     := "true" | "false" | ident | "(" formula ")"
//! ```

mod alphabet;
mod eval;
mod parser;

use std::collections::BTreeSet;
use std::fmt;

pub use alphabet::Alphabet;
pub use eval::{eval_lasso, LassoWord};
pub use parser::parse_ltl;

/// A letter of `2^AP`: the set of propositions that hold.
pub type Letter = BTreeSet<String>;

/// Builds a letter from proposition names.
pub fn letter<I, S>(props: I) -> Letter
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    props.into_iter().map(Into::into).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LtlFormula {
    True,
    False,
    Atom(String),
    NegAtom(String),
    /// General negation; removed by [`LtlFormula::to_pnf`].
    Not(Box<LtlFormula>),
    And(Box<LtlFormula>, Box<LtlFormula>),
    Or(Box<LtlFormula>, Box<LtlFormula>),
    Next(Box<LtlFormula>),
    Until(Box<LtlFormula>, Box<LtlFormula>),
    Release(Box<LtlFormula>, Box<LtlFormula>),
    Eventually(Box<LtlFormula>),
    Always(Box<LtlFormula>),
}

use LtlFormula::*;

impl LtlFormula {
    pub fn atom(p: impl Into<String>) -> Self {
        Atom(p.into())
    }

    pub fn neg_atom(p: impl Into<String>) -> Self {
        NegAtom(p.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Self) -> Self {
        Not(Box::new(f))
    }

    pub fn and(a: Self, b: Self) -> Self {
        And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Self, b: Self) -> Self {
        Or(Box::new(a), Box::new(b))
    }

    pub fn next(f: Self) -> Self {
        Next(Box::new(f))
    }

    pub fn until(a: Self, b: Self) -> Self {
        Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: Self, b: Self) -> Self {
        Release(Box::new(a), Box::new(b))
    }

    pub fn eventually(f: Self) -> Self {
        Eventually(Box::new(f))
    }

    pub fn always(f: Self) -> Self {
        Always(Box::new(f))
    }

    /// Left-folded disjunction; `false` when empty.
    pub fn disjunction(items: impl IntoIterator<Item = Self>) -> Self {
        items.into_iter().reduce(Self::or).unwrap_or(False)
    }

    /// Left-folded conjunction; `true` when empty.
    pub fn conjunction(items: impl IntoIterator<Item = Self>) -> Self {
        items.into_iter().reduce(Self::and).unwrap_or(True)
    }

    /// True when the formula contains no general negation node.
    pub fn is_pnf(&self) -> bool {
        match self {
            True | False | Atom(_) | NegAtom(_) => true,
            Not(_) => false,
            Next(f) | Eventually(f) | Always(f) => f.is_pnf(),
            And(a, b) | Or(a, b) | Until(a, b) | Release(a, b) => a.is_pnf() && b.is_pnf(),
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            True | False | Atom(_) | NegAtom(_) => 1,
            Not(f) | Next(f) | Eventually(f) | Always(f) => 1 + f.size(),
            And(a, b) | Or(a, b) | Until(a, b) | Release(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Propositions mentioned by the formula.
    pub fn propositions(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_props(&mut out);
        out
    }

    fn collect_props(&self, out: &mut BTreeSet<String>) {
        match self {
            True | False => {}
            Atom(p) | NegAtom(p) => {
                out.insert(p.clone());
            }
            Not(f) | Next(f) | Eventually(f) | Always(f) => f.collect_props(out),
            And(a, b) | Or(a, b) | Until(a, b) | Release(a, b) => {
                a.collect_props(out);
                b.collect_props(out);
            }
        }
    }

    /// Pushes negations down to the propositions. The result has the same
    /// size as the input minus the removed negation nodes.
    pub fn to_pnf(&self) -> Self {
        self.pnf(false)
    }

    fn pnf(&self, neg: bool) -> Self {
        let b = |f: &Self, n: bool| Box::new(f.pnf(n));
        match (self, neg) {
            (True, false) | (False, true) => True,
            (True, true) | (False, false) => False,
            (Atom(p), false) | (NegAtom(p), true) => Atom(p.clone()),
            (Atom(p), true) | (NegAtom(p), false) => NegAtom(p.clone()),
            (Not(f), n) => f.pnf(!n),
            (And(x, y), false) => And(b(x, false), b(y, false)),
            (And(x, y), true) => Or(b(x, true), b(y, true)),
            (Or(x, y), false) => Or(b(x, false), b(y, false)),
            (Or(x, y), true) => And(b(x, true), b(y, true)),
            (Next(f), n) => Next(b(f, n)),
            (Until(x, y), false) => Until(b(x, false), b(y, false)),
            (Until(x, y), true) => Release(b(x, true), b(y, true)),
            (Release(x, y), false) => Release(b(x, false), b(y, false)),
            (Release(x, y), true) => Until(b(x, true), b(y, true)),
            (Eventually(f), false) => Eventually(b(f, false)),
            (Eventually(f), true) => Always(b(f, true)),
            (Always(f), false) => Always(b(f, false)),
            (Always(f), true) => Eventually(b(f, true)),
        }
    }

    /// Replaces `◊`/`□` by their until/release definitions.
    pub fn desugar(&self) -> Self {
        let b = |f: &Self| Box::new(f.desugar());
        match self {
            True | False | Atom(_) | NegAtom(_) => self.clone(),
            Not(f) => Not(b(f)),
            Next(f) => Next(b(f)),
            And(x, y) => And(b(x), b(y)),
            Or(x, y) => Or(b(x), b(y)),
            Until(x, y) => Until(b(x), b(y)),
            Release(x, y) => Release(b(x), b(y)),
            Eventually(f) => Until(Box::new(True), b(f)),
            Always(f) => Release(Box::new(False), b(f)),
        }
    }

    /// Rewrites a PNF formula over the letters of `alphabet`: `p` becomes the
    /// disjunction of letters containing `p`, `¬p` the disjunction of letters
    /// not containing it. Letter atoms are named by [`Alphabet::name`].
    pub fn interpret_over_alphabet(&self, alphabet: &Alphabet) -> crate::Result<Self> {
        if !self.is_pnf() {
            return Err(crate::Error::InvalidArgument(
                "reinterpretation requires a formula in positive normal form".into(),
            ));
        }
        Ok(self.interpret(alphabet))
    }

    fn interpret(&self, alphabet: &Alphabet) -> Self {
        let b = |f: &Self| Box::new(f.interpret(alphabet));
        let letters_where = |pred: &dyn Fn(&Letter) -> bool| {
            Self::disjunction(
                (0..alphabet.len())
                    .filter(|&i| pred(alphabet.letter(i)))
                    .map(|i| Atom(alphabet.name(i).to_string())),
            )
        };
        match self {
            True | False => self.clone(),
            Atom(p) => letters_where(&|l| l.contains(p)),
            NegAtom(p) => letters_where(&|l| !l.contains(p)),
            Not(f) => Not(b(f)),
            Next(f) => Next(b(f)),
            Eventually(f) => Eventually(b(f)),
            Always(f) => Always(b(f)),
            And(x, y) => And(b(x), b(y)),
            Or(x, y) => Or(b(x), b(y)),
            Until(x, y) => Until(b(x), b(y)),
            Release(x, y) => Release(b(x), b(y)),
        }
    }
}

impl fmt::Display for LtlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            True => write!(f, "true"),
            False => write!(f, "false"),
            Atom(p) => write!(f, "{p}"),
            NegAtom(p) => write!(f, "!{p}"),
            Not(g) => write!(f, "!({g})"),
            Next(g) => write!(f, "X {g}"),
            Eventually(g) => write!(f, "<>{g}"),
            Always(g) => write!(f, "[]{g}"),
            And(a, b) => write!(f, "({a} & {b})"),
            Or(a, b) => write!(f, "({a} | {b})"),
            Until(a, b) => write!(f, "({a} U {b})"),
            Release(a, b) => write!(f, "({a} R {b})"),
        }
    }
}
