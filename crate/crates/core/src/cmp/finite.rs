use std::fmt::Write;

use rand::Rng;

use super::Environment;
use crate::num::parse_real;
use crate::{Error, Real, Result, SimRng};

/// Explicit finite MDP. `rows[s][a]` lists `(successor, probability)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMdp<T> {
    rows: Vec<Vec<Vec<(usize, T)>>>,
    accepting: Vec<bool>,
    target: Vec<bool>,
    initial: usize,
}

fn row_tolerance<T: Real>(len: usize) -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(4.0 * (len.max(1) as f64)))
}

impl<T: Real> FiniteMdp<T> {
    pub fn new(
        rows: Vec<Vec<Vec<(usize, T)>>>,
        accepting: Vec<bool>,
        target: Vec<bool>,
        initial: usize,
    ) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidArgument("MDP needs at least one state".into()));
        }
        if accepting.len() != n || target.len() != n {
            return Err(Error::Shape(format!("state masks must have length {n}")));
        }
        if initial >= n {
            return Err(Error::InvalidArgument(format!("initial state {initial} out of range")));
        }
        for (s, actions) in rows.iter().enumerate() {
            if actions.is_empty() {
                return Err(Error::InvalidArgument(format!("state {s} has no actions")));
            }
            for (a, row) in actions.iter().enumerate() {
                let mut sum = T::zero();
                for &(t, p) in row {
                    if t >= n {
                        return Err(Error::InvalidArgument(format!("successor {t} out of range")));
                    }
                    if !(p >= T::zero()) {
                        return Err(Error::InvalidArgument(format!("negative probability at ({s}, {a})")));
                    }
                    sum += p;
                }
                if (sum - T::one()).abs() > row_tolerance(row.len()) {
                    return Err(Error::InvalidArgument(format!(
                        "row ({s}, {a}) sums to {sum}, not 1"
                    )));
                }
            }
        }
        Ok(Self { rows, accepting, target, initial })
    }

    pub fn num_states(&self) -> usize {
        self.rows.len()
    }

    pub fn num_actions(&self, s: usize) -> usize {
        self.rows[s].len()
    }

    pub fn max_actions(&self) -> usize {
        self.rows.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn row(&self, s: usize, a: usize) -> &[(usize, T)] {
        &self.rows[s][a]
    }

    pub fn rows(&self) -> &[Vec<Vec<(usize, T)>>] {
        &self.rows
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn accepting(&self) -> &[bool] {
        &self.accepting
    }

    pub fn target(&self) -> &[bool] {
        &self.target
    }

    pub fn with_accepting(mut self, accepting: Vec<bool>) -> Result<Self> {
        if accepting.len() != self.num_states() {
            return Err(Error::Shape("accepting mask length".into()));
        }
        self.accepting = accepting;
        Ok(self)
    }

    pub fn with_initial(mut self, initial: usize) -> Result<Self> {
        if initial >= self.num_states() {
            return Err(Error::InvalidArgument(format!("initial state {initial} out of range")));
        }
        self.initial = initial;
        Ok(self)
    }

    /// Probability of moving from `s` to `t` under `a` (duplicates summed).
    pub fn prob(&self, s: usize, a: usize, t: usize) -> T {
        self.rows[s][a].iter().filter(|e| e.0 == t).map(|e| e.1).sum()
    }

    pub fn sample(&self, s: usize, a: usize, rng: &mut SimRng) -> usize {
        let row = &self.rows[s][a];
        let x = T::unit_uniform(rng);
        let mut acc = T::zero();
        for &(t, p) in row {
            acc += p;
            if x < acc {
                return t;
            }
        }
        row.iter().rev().find(|e| e.1 > T::zero()).map_or(s, |e| e.0)
    }

    /// Text form: `states`, `initial`, `accepting`, `target` headers followed by
    /// `transition s a t p` lines. Actions are numbered per state from 0.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let list = |mask: &[bool]| -> String {
            mask.iter()
                .enumerate()
                .filter(|e| *e.1)
                .map(|e| format!(" {}", e.0))
                .collect()
        };
        writeln!(out, "states {}", self.num_states()).unwrap();
        writeln!(out, "initial {}", self.initial).unwrap();
        writeln!(out, "accepting{}", list(&self.accepting)).unwrap();
        writeln!(out, "target{}", list(&self.target)).unwrap();
        for (s, actions) in self.rows.iter().enumerate() {
            for (a, row) in actions.iter().enumerate() {
                for (t, p) in row {
                    writeln!(out, "transition {s} {a} {t} {p}").unwrap();
                }
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Format { line, msg };
        let mut n = None;
        let mut initial = 0;
        let mut accepting = Vec::new();
        let mut target = Vec::new();
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let toks: Vec<&str> = raw.split('#').next().unwrap_or("").split_whitespace().collect();
            let Some((&key, rest)) = toks.split_first() else { continue };
            let idx = |t: &str| t.parse::<usize>().map_err(|_| err(line, format!("bad index `{t}`")));
            match key {
                "states" if rest.len() == 1 => n = Some(idx(rest[0])?),
                "initial" if rest.len() == 1 => initial = idx(rest[0])?,
                "accepting" => accepting = rest.iter().map(|t| idx(t)).collect::<Result<_>>()?,
                "target" => target = rest.iter().map(|t| idx(t)).collect::<Result<_>>()?,
                "transition" if rest.len() == 4 => {
                    let p = parse_real::<T>(rest[3])
                        .ok_or_else(|| err(line, format!("bad probability `{}`", rest[3])))?;
                    edges.push((idx(rest[0])?, idx(rest[1])?, idx(rest[2])?, p, line));
                }
                _ => return Err(err(line, format!("unrecognised line `{}`", raw.trim()))),
            }
        }
        let n = n.ok_or_else(|| err(1, "missing `states` line".into()))?;
        let mut rows: Vec<Vec<Vec<(usize, T)>>> = vec![Vec::new(); n];
        for (s, a, t, p, line) in edges {
            if s >= n || t >= n {
                return Err(err(line, format!("state index out of range (n = {n})")));
            }
            if rows[s].len() <= a {
                rows[s].resize(a + 1, Vec::new());
            }
            rows[s][a].push((t, p));
        }
        let mask = |list: Vec<usize>| -> Result<Vec<bool>> {
            let mut m = vec![false; n];
            for s in list {
                *m.get_mut(s).ok_or_else(|| err(1, format!("state {s} out of range")))? = true;
            }
            Ok(m)
        };
        Self::new(rows, mask(accepting)?, mask(target)?, initial)
    }
}

/// The countable chain truncated at `n_trunc`, with accepting states
/// `{3, ..., n_trunc}`. State `k` is stored at index `k - 1`; the initial
/// state is 2.
pub fn chain_mdp<T: Real>(n_trunc: usize) -> Result<FiniteMdp<T>> {
    chain_mdp_from(n_trunc, 3)
}

/// [`chain_mdp`] with accepting states `{first_accepting, ..., n_trunc}`.
pub fn chain_mdp_from<T: Real>(n_trunc: usize, first_accepting: usize) -> Result<FiniteMdp<T>> {
    if n_trunc < 4 {
        return Err(Error::InvalidArgument(format!("chain truncation {n_trunc} < 4")));
    }
    if !(2..=n_trunc).contains(&first_accepting) {
        return Err(Error::InvalidArgument(format!("first accepting state {first_accepting}")));
    }
    let mut rows = Vec::with_capacity(n_trunc);
    rows.push(vec![vec![(0, T::one())]]);
    for k in 2..n_trunc {
        let back = T::one() / T::lit(k as f64);
        rows.push(vec![vec![(0, back), (k, T::lit((k - 1) as f64) / T::lit(k as f64))]]);
    }
    rows.push(vec![vec![(0, T::one())]]);
    let accepting = (1..=n_trunc).map(|k| k >= first_accepting).collect();
    FiniteMdp::new(rows, accepting, vec![false; n_trunc], 1)
}

/// Random MDP with `n` states and `k` actions per state. Each action has one
/// to three distinct successors with weights drawn from `U[0.1, 1]`; each
/// state is accepting with probability `label_density`.
pub fn random_finite_mdp<T: Real>(
    n: usize,
    k: usize,
    label_density: f64,
    rng: &mut SimRng,
) -> Result<FiniteMdp<T>> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidArgument("random MDP needs n >= 1 and k >= 1".into()));
    }
    if !(0.0..=1.0).contains(&label_density) {
        return Err(Error::InvalidArgument(format!("label density {label_density}")));
    }
    let rows = (0..n)
        .map(|_| {
            (0..k)
                .map(|_| {
                    let m = rng.random_range(1..=3.min(n));
                    let succ = rand::seq::index::sample(rng, n, m).into_vec();
                    let w: Vec<f64> = (0..m).map(|_| rng.random_range(0.1..=1.0)).collect();
                    let total: f64 = w.iter().sum();
                    let mut row: Vec<(usize, T)> =
                        succ.into_iter().zip(w).map(|(t, x)| (t, T::lit(x / total))).collect();
                    // Put the rounding residue on the first entry.
                    let rest: T = row[1..].iter().map(|e| e.1).sum();
                    row[0].1 = T::one() - rest;
                    row
                })
                .collect()
        })
        .collect();
    let accepting = (0..n).map(|_| rng.random_bool(label_density)).collect();
    FiniteMdp::new(rows, accepting, vec![false; n], 0)
}

/// A finite MDP seen through the [`Environment`] interface: the state is the
/// one-element vector `[index]`, features are one-hot.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMdpEnv<T> {
    pub mdp: FiniteMdp<T>,
}

impl<T: Real> FiniteMdpEnv<T> {
    pub fn new(mdp: FiniteMdp<T>) -> Self {
        Self { mdp }
    }

    fn index(&self, s: &[T]) -> usize {
        s[0].to_usize().unwrap_or(0).min(self.mdp.num_states() - 1)
    }
}

impl<T: Real> Environment<T> for FiniteMdpEnv<T> {
    fn state_dim(&self) -> usize {
        1
    }

    fn num_inputs(&self) -> usize {
        self.mdp.max_actions()
    }

    fn input_label(&self, u: usize) -> String {
        u.to_string()
    }

    fn valid_inputs(&self, s: &[T], mask: &mut [bool]) {
        let k = self.mdp.num_actions(self.index(s));
        for (a, m) in mask.iter_mut().enumerate() {
            *m = a < k;
        }
    }

    fn sample_initial(&self, _rng: &mut SimRng) -> Vec<T> {
        vec![T::lit(self.mdp.initial() as f64)]
    }

    fn sample_next(&self, s: &[T], u: usize, rng: &mut SimRng) -> Result<Vec<T>> {
        let i = self.index(s);
        if u >= self.mdp.num_actions(i) {
            return Err(Error::InvalidArgument(format!("action {u} invalid in state {i}")));
        }
        Ok(vec![T::lit(self.mdp.sample(i, u, rng) as f64)])
    }

    fn feature_dim(&self) -> usize {
        self.mdp.num_states()
    }

    fn features(&self, s: &[T], out: &mut Vec<T>) {
        let i = self.index(s);
        out.extend((0..self.mdp.num_states()).map(|j| if j == i { T::one() } else { T::zero() }));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn assert_stochastic(m: &FiniteMdp<f64>) {
        for s in 0..m.num_states() {
            for a in 0..m.num_actions(s) {
                let sum: f64 = m.row(s, a).iter().map(|e| e.1).sum();
                assert!((sum - 1.0).abs() <= 1e-12, "row ({s},{a}) sums to {sum}");
            }
        }
    }

    #[test]
    fn chain_structure() {
        let m = chain_mdp::<f64>(20).unwrap();
        assert_stochastic(&m);
        // State 2 (index 1): back to 1 w.p. 1/2, on to 3 w.p. 1/2.
        assert_eq!(m.prob(1, 0, 0), 0.5);
        assert_eq!(m.prob(1, 0, 2), 0.5);
        for k in 2..20 {
            assert_eq!(m.prob(k - 1, 0, 0), 1.0 / k as f64);
            assert_eq!(m.prob(k - 1, 0, k), (k as f64 - 1.0) / k as f64);
        }
        assert_eq!(m.prob(19, 0, 0), 1.0);
        assert_eq!(m.prob(0, 0, 0), 1.0);
        assert!(!m.accepting()[1] && m.accepting()[2] && m.accepting()[19]);
        assert_eq!(m.initial(), 1);
        assert!(chain_mdp::<f64>(3).is_err());
    }

    #[test]
    fn random_mdp_properties() {
        let one = random_finite_mdp::<f64>(1, 1, 0.5, &mut SimRng::seed_from_u64(0)).unwrap();
        assert_eq!(one.row(0, 0), &[(0, 1.0)]);
        let a = random_finite_mdp::<f64>(8, 3, 0.3, &mut SimRng::seed_from_u64(42)).unwrap();
        let b = random_finite_mdp::<f64>(8, 3, 0.3, &mut SimRng::seed_from_u64(42)).unwrap();
        assert_eq!(a, b);
        assert_stochastic(&a);
    }

    #[test]
    fn text_round_trip() {
        let m = random_finite_mdp::<f64>(6, 2, 0.5, &mut SimRng::seed_from_u64(1)).unwrap();
        assert_eq!(FiniteMdp::from_text(&m.to_text()).unwrap(), m);
        assert!(FiniteMdp::<f64>::from_text("states 2\ntransition 0 0 1 0.5\n").is_err());
        assert!(matches!(
            FiniteMdp::<f64>::from_text("states 1\nbogus\n"),
            Err(Error::Format { line: 2, .. })
        ));
    }

    #[test]
    fn env_wrapper_masks_actions() {
        let rows = vec![vec![vec![(1, 1.0)], vec![(0, 1.0)]], vec![vec![(1, 1.0)]]];
        let env = FiniteMdpEnv::new(FiniteMdp::new(rows, vec![false, true], vec![false; 2], 0).unwrap());
        let mut mask = vec![false; 2];
        env.valid_inputs(&[1.0], &mut mask);
        assert_eq!(mask, vec![true, false]);
        let mut f = Vec::new();
        env.features(&[1.0], &mut f);
        assert_eq!(f, vec![0.0, 1.0]);
        let mut rng = SimRng::seed_from_u64(0);
        assert_eq!(env.sample_next(&[0.0], 0, &mut rng).unwrap(), vec![1.0]);
    }
}
