use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HoeffdingResult {
    pub trials: u64,
    pub successes: u64,
    pub eps: f64,
    /// `1 - exp(-2 ε² N)`.
    pub confidence: f64,
    /// `exp(-2 ε² N)`, kept separately to avoid cancellation.
    pub failure_prob: f64,
    pub lower: f64,
    pub upper: f64,
}

/// One-sided bound: with the returned confidence the success probability is
/// at least `H/N - ε` (clamped to 0).
pub fn hoeffding_lower(trials: u64, successes: u64, eps: f64) -> Result<HoeffdingResult> {
    if trials == 0 {
        return Err(Error::InvalidArgument("no trials".into()));
    }
    if successes > trials {
        return Err(Error::InvalidArgument(format!("{successes} successes out of {trials} trials")));
    }
    let freq = successes as f64 / trials as f64;
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("eps = {eps} must be finite and non-negative")));
    }
    let failure_prob = (-2.0 * eps * eps * trials as f64).exp();
    Ok(HoeffdingResult {
        trials,
        successes,
        eps,
        confidence: -(-2.0 * eps * eps * trials as f64).exp_m1(),
        failure_prob,
        lower: (freq - eps).max(0.0),
        upper: 1.0,
    })
}

/// Smallest ε reaching confidence `1 - delta` with `trials` samples.
pub fn hoeffding_eps(trials: u64, delta: f64) -> Result<f64> {
    if trials == 0 || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument("need trials > 0 and delta in (0, 1)".into()));
    }
    Ok(((1.0 / delta).ln() / (2.0 * trials as f64)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cartpole_validation_numbers() {
        let r = hoeffding_lower(50_000, 49_485, 0.0147).unwrap();
        assert_abs_diff_eq!(r.lower, 0.975, epsilon = 1e-4);
        assert_eq!(r.upper, 1.0);
        assert!((r.failure_prob / 4.1e-10 - 1.0).abs() < 0.1, "{}", r.failure_prob);
    }

    #[test]
    fn edge_cases() {
        assert_eq!(hoeffding_lower(10, 5, 0.0).unwrap().confidence, 0.0);
        let r = hoeffding_lower(100, 100, 0.1).unwrap();
        assert_abs_diff_eq!(r.lower, 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(r.confidence, 1.0 - (-2.0f64).exp(), epsilon = 1e-15);
        assert!(hoeffding_lower(10, 11, 0.1).is_err());
        assert_eq!(hoeffding_lower(10, 1, 0.5).unwrap().lower, 0.0);
        assert!(hoeffding_lower(10, 5, -0.1).is_err());
        let eps = hoeffding_eps(1000, 0.01).unwrap();
        assert_abs_diff_eq!(hoeffding_lower(1000, 1000, eps).unwrap().failure_prob, 0.01, epsilon = 1e-12);
    }
}
