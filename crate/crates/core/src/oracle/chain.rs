use crate::{Error, Real, Result};

fn check_zeta<T: Real>(zeta: T) -> Result<()> {
    if zeta > T::zero() && zeta < T::one() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("zeta = {zeta} outside (0, 1)")))
    }
}

/// `-(1 - ζ) ln(1 - ζ) / ζ`: probability of reaching the sink from state 2
/// of the countable chain when every state from 2 on is accepting.
pub fn chain_reach_closed_form<T: Real>(zeta: T) -> Result<T> {
    check_zeta(zeta)?;
    let one = T::one();
    Ok(-(one - zeta) * (one - zeta).ln() / zeta)
}

/// Same quantity when accepting states start at 3:
/// `(1 - ζ) (-ln(1 - ζ) - ζ) / ζ²`.
pub fn chain_reach_closed_form_from3<T: Real>(zeta: T) -> Result<T> {
    check_zeta(zeta)?;
    let one = T::one();
    Ok((one - zeta) * (-(one - zeta).ln() - zeta) / (zeta * zeta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn known_values() {
        assert_abs_diff_eq!(chain_reach_closed_form(0.5).unwrap(), std::f64::consts::LN_2, epsilon = 1e-15);
        assert_abs_diff_eq!(chain_reach_closed_form(0.9).unwrap(), 0.2558428, epsilon = 1e-7);
        assert_abs_diff_eq!(chain_reach_closed_form(0.99).unwrap(), 0.0465169, epsilon = 1e-7);
        assert_abs_diff_eq!(chain_reach_closed_form_from3(0.5).unwrap(), 2.0 * (std::f64::consts::LN_2 - 0.5), epsilon = 1e-15);
        assert!(chain_reach_closed_form(1.0).is_err());
        assert!(chain_reach_closed_form(0.0f32).is_err());
    }

    #[test]
    fn vanishes_as_zeta_approaches_one() {
        let mut prev = f64::INFINITY;
        for k in 1..12 {
            let z = 1.0 - 10f64.powi(-k);
            let v = chain_reach_closed_form(z).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(prev < 1e-9);
    }

    #[test]
    fn series_agrees() {
        // (1-ζ) Σ_{m≥1} ζ^{m-1}/m and (1-ζ) Σ_{m≥2} ζ^{m-2}/m
        let z: f64 = 0.9;
        let s2: f64 = (1..4000).map(|m| z.powi(m - 1) / m as f64).sum::<f64>() * (1.0 - z);
        let s3: f64 = (2..4000).map(|m| z.powi(m - 2) / m as f64).sum::<f64>() * (1.0 - z);
        assert_abs_diff_eq!(s2, chain_reach_closed_form(z).unwrap(), epsilon = 1e-12);
        assert_abs_diff_eq!(s3, chain_reach_closed_form_from3(z).unwrap(), epsilon = 1e-12);
    }
}
