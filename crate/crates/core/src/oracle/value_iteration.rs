use crate::cmp::FiniteMdp;
use crate::{Error, Real, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    Max,
    Min,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValueVector<T> {
    pub values: Vec<T>,
    pub residual: T,
    pub iterations: usize,
}

/// States that reach `target` with positive probability under some policy.
fn exists_reach<T: Real>(mdp: &FiniteMdp<T>, target: &[bool], within: &[bool]) -> Vec<bool> {
    let mut r = target.to_vec();
    loop {
        let mut changed = false;
        for s in 0..mdp.num_states() {
            if r[s] || !within[s] {
                continue;
            }
            if mdp.rows()[s].iter().any(|row| row.iter().any(|&(t, p)| p > T::zero() && r[t])) {
                r[s] = true;
                changed = true;
            }
        }
        if !changed {
            return r;
        }
    }
}

/// States that reach `target` with positive probability under every policy.
fn forall_reach<T: Real>(mdp: &FiniteMdp<T>, target: &[bool]) -> Vec<bool> {
    let mut r = target.to_vec();
    loop {
        let mut changed = false;
        for s in 0..mdp.num_states() {
            if r[s] {
                continue;
            }
            if mdp.rows()[s].iter().all(|row| row.iter().any(|&(t, p)| p > T::zero() && r[t])) {
                r[s] = true;
                changed = true;
            }
        }
        if !changed {
            return r;
        }
    }
}

/// States where some policy reaches `target` almost surely.
fn prob1_exists<T: Real>(mdp: &FiniteMdp<T>, target: &[bool]) -> Vec<bool> {
    let n = mdp.num_states();
    let mut u = vec![true; n];
    loop {
        let mut r = target.to_vec();
        loop {
            let mut changed = false;
            for s in 0..n {
                if r[s] || !u[s] {
                    continue;
                }
                let ok = mdp.rows()[s].iter().any(|row| {
                    row.iter().all(|&(t, p)| p == T::zero() || u[t])
                        && row.iter().any(|&(t, p)| p > T::zero() && r[t])
                });
                if ok {
                    r[s] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if r == u {
            return u;
        }
        u = r;
    }
}

/// Optimal probability of reaching `target`, by Gauss–Seidel iteration in
/// descending state order after fixing the states whose value is 0 or 1 by
/// graph analysis.
pub fn reach_value_iteration<T: Real>(
    mdp: &FiniteMdp<T>,
    target: &[bool],
    objective: Objective,
    tol: T,
    max_iter: usize,
) -> Result<ValueVector<T>> {
    let n = mdp.num_states();
    if target.len() != n {
        return Err(Error::Shape(format!("target mask of length {} for {n} states", target.len())));
    }
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let all = vec![true; n];
    let (zero, one) = match objective {
        Objective::Max => {
            let reach = exists_reach(mdp, target, &all);
            (reach.iter().map(|r| !r).collect::<Vec<_>>(), prob1_exists(mdp, target))
        }
        Objective::Min => {
            let reach = forall_reach(mdp, target);
            let zero: Vec<bool> = reach.iter().map(|r| !r).collect();
            let escape = exists_reach(mdp, &zero, &target.iter().map(|t| !t).collect::<Vec<_>>());
            (zero, escape.iter().map(|e| !e).collect())
        }
    };
    let mut v: Vec<T> = (0..n).map(|s| if one[s] { T::one() } else { T::zero() }).collect();
    let free: Vec<usize> = (0..n).rev().filter(|&s| !zero[s] && !one[s]).collect();
    let mut residual = T::zero();
    for it in 1..=max_iter {
        residual = T::zero();
        for &s in &free {
            let mut best: Option<T> = None;
            for row in &mdp.rows()[s] {
                let x: T = row.iter().map(|&(t, p)| p * v[t]).sum();
                best = Some(match (best, objective) {
                    (None, _) => x,
                    (Some(b), Objective::Max) => b.max(x),
                    (Some(b), Objective::Min) => b.min(x),
                });
            }
            let x = best.unwrap_or_else(T::zero).min(T::one()).max(T::zero());
            residual = residual.max((x - v[s]).abs());
            v[s] = x;
        }
        if residual <= tol {
            return Ok(ValueVector { values: v, residual, iterations: it });
        }
    }
    Err(Error::NotConverged { iterations: max_iter, residual: residual.to_f64_lossy() })
}

/// Maximal probability of reaching the `target` states of `mdp`.
pub fn max_reach<T: Real>(mdp: &FiniteMdp<T>) -> Result<ValueVector<T>> {
    reach_value_iteration(mdp, mdp.target(), Objective::Max, T::lit(1e-12), 10_000_000)
}

/// Minimal probability of reaching the `target` states of `mdp`.
pub fn min_reach<T: Real>(mdp: &FiniteMdp<T>) -> Result<ValueVector<T>> {
    reach_value_iteration(mdp, mdp.target(), Objective::Min, T::lit(1e-12), 10_000_000)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmp::random_finite_mdp;
    use crate::SimRng;
    use rand::SeedableRng;

    #[test]
    fn trivial_cases() {
        let m = FiniteMdp::new(
            vec![vec![vec![(0, 1.0)]], vec![vec![(1, 1.0)]]],
            vec![false; 2],
            vec![true, false],
            0,
        )
        .unwrap();
        let v = max_reach(&m).unwrap();
        assert_eq!(v.values, vec![1.0, 0.0]);
    }

    #[test]
    fn max_and_min_differ() {
        // state 0: action 0 -> target, action 1 -> trap
        let m = FiniteMdp::new(
            vec![
                vec![vec![(1, 1.0)], vec![(2, 1.0)]],
                vec![vec![(1, 1.0)]],
                vec![vec![(2, 1.0)]],
            ],
            vec![false; 3],
            vec![false, true, false],
            0,
        )
        .unwrap();
        assert_eq!(max_reach(&m).unwrap().values[0], 1.0);
        assert_eq!(min_reach(&m).unwrap().values[0], 0.0);
    }

    /// Plain Jacobi iteration from zero without any graph precomputation.
    fn naive(m: &FiniteMdp<f64>, objective: Objective) -> Vec<f64> {
        let n = m.num_states();
        let mut v: Vec<f64> = m.target().iter().map(|&t| if t { 1.0 } else { 0.0 }).collect();
        for _ in 0..20_000 {
            let next: Vec<f64> = (0..n)
                .map(|s| {
                    if m.target()[s] {
                        return 1.0;
                    }
                    let vals = m.rows()[s].iter().map(|row| row.iter().map(|&(t, p)| p * v[t]).sum::<f64>());
                    match objective {
                        Objective::Max => vals.fold(f64::MIN, f64::max),
                        Objective::Min => vals.fold(f64::MAX, f64::min),
                    }
                })
                .collect();
            v = next;
        }
        v
    }

    #[test]
    fn matches_naive_iteration() {
        let mut rng = SimRng::seed_from_u64(11);
        for _ in 0..30 {
            let m = random_finite_mdp::<f64>(7, 2, 0.0, &mut rng).unwrap();
            let mut target = vec![false; 7];
            target[6] = true;
            let m = FiniteMdp::new(m.rows().to_vec(), vec![false; 7], target.clone(), 0).unwrap();
            for obj in [Objective::Max, Objective::Min] {
                let v = reach_value_iteration(&m, &target, obj, 1e-13, 1_000_000).unwrap();
                for (a, b) in v.values.iter().zip(naive(&m, obj)) {
                    assert!((a - b).abs() < 1e-8, "{obj:?}: {a} vs {b}");
                    assert!((0.0..=1.0).contains(a));
                }
            }
        }
    }

    #[test]
    fn reports_non_convergence() {
        let m = FiniteMdp::new(
            vec![vec![vec![(0, 0.5), (1, 0.25), (2, 0.25)]], vec![vec![(1, 1.0)]], vec![vec![(2, 1.0)]]],
            vec![false; 3],
            vec![false, true, false],
            0,
        )
        .unwrap();
        let r = reach_value_iteration(&m, m.target(), Objective::Max, 1e-300, 3);
        assert!(matches!(r, Err(Error::NotConverged { iterations: 3, .. })));
    }
}
