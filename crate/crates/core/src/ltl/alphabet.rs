use std::collections::{BTreeSet, HashMap};

use super::{Letter, LassoWord};
use crate::{Error, Result};

/// An ordered list of distinct letters over a fixed proposition order.
///
/// Letter `i` is named `L` followed by one bit per proposition, e.g. `L101`
/// for `{a, c}` over `[a, b, c]`. These names become the atoms of a formula
/// reinterpreted over the alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    props: Vec<String>,
    letters: Vec<Letter>,
    names: Vec<String>,
}

impl Alphabet {
    pub fn new(props: Vec<String>, letters: Vec<Letter>) -> Result<Self> {
        let known: BTreeSet<&String> = props.iter().collect();
        if known.len() != props.len() {
            return Err(Error::InvalidArgument("duplicate proposition".into()));
        }
        let mut seen = BTreeSet::new();
        for l in &letters {
            if let Some(p) = l.iter().find(|p| !known.contains(p)) {
                return Err(Error::UnknownProposition(p.clone()));
            }
            if !seen.insert(l.clone()) {
                return Err(Error::InvalidArgument(format!(
                    "letters are not pairwise distinct: {l:?} repeated"
                )));
            }
        }
        let names = letters
            .iter()
            .map(|l| {
                let bits: String = props
                    .iter()
                    .map(|p| if l.contains(p) { '1' } else { '0' })
                    .collect();
                format!("L{bits}")
            })
            .collect();
        Ok(Self { props, letters, names })
    }

    /// All `2^|AP|` letters, ordered by their bit string read as a number with
    /// the first proposition as the most significant bit.
    pub fn powerset(props: Vec<String>) -> Result<Self> {
        let n = props.len();
        if n > 6 {
            return Err(Error::InvalidArgument(format!(
                "at most 6 propositions supported, got {n}"
            )));
        }
        let letters = (0..1usize << n)
            .map(|mask| {
                props
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask & (1 << (n - 1 - k)) != 0)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        Self::new(props, letters)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn propositions(&self) -> &[String] {
        &self.props
    }

    pub fn letter(&self, i: usize) -> &Letter {
        &self.letters[i]
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, l: &Letter) -> Option<usize> {
        self.letters.iter().position(|x| x == l)
    }

    /// Maps every letter of `w` to the singleton holding its letter atom.
    pub fn letterize(&self, w: &LassoWord) -> Result<LassoWord> {
        let index: HashMap<&Letter, usize> =
            self.letters.iter().enumerate().map(|(i, l)| (l, i)).collect();
        let map = |l: &Letter| -> Result<Letter> {
            let i = index.get(l).ok_or_else(|| {
                Error::InvalidArgument(format!("letter {l:?} is not in the alphabet"))
            })?;
            Ok(std::iter::once(self.names[*i].clone()).collect())
        };
        let prefix = w.prefix().iter().map(map).collect::<Result<Vec<_>>>()?;
        let cycle = w.cycle().iter().map(map).collect::<Result<Vec<_>>>()?;
        LassoWord::new(prefix, cycle)
    }
}
