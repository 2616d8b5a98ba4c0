use super::{scale, Environment, Interval, Labeling};
use crate::{Error, Real, Result, SimRng};

#[derive(Clone, Debug, PartialEq)]
pub struct CartPoleParams<T> {
    pub cart_mass: T,
    pub pole_mass: T,
    /// Half length of the pole.
    pub half_length: T,
    pub gravity: T,
    /// Sampling time.
    pub dt: T,
    pub max_force: T,
    /// Standard deviation of the angular-velocity disturbance.
    pub noise_std: T,
    /// Initial states are uniform on `[-init_range, init_range]^4`.
    pub init_range: T,
    /// Integrate the angle with the cart velocity `s2` instead of the
    /// angular velocity `s4`.
    pub angle_from_cart_velocity: bool,
    /// Per-dimension `(lo, hi)` used to scale network features.
    pub feature_bounds: [(T, T); 4],
}

impl<T: Real> Default for CartPoleParams<T> {
    fn default() -> Self {
        let l = T::lit;
        Self {
            cart_mass: l(1.0),
            pole_mass: l(0.1),
            half_length: l(0.5),
            gravity: l(9.8),
            dt: l(0.02),
            max_force: l(10.0),
            noise_std: l(0.01),
            init_range: l(0.05),
            angle_from_cart_velocity: false,
            feature_bounds: [(l(-1.0), l(1.0)), (l(-2.0), l(2.0)), (l(-0.21), l(0.21)), (l(-2.0), l(2.0))],
        }
    }
}

/// Cart-pole with state `(position, velocity, angle, angular velocity)` and
/// inputs `{-F, +F}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CartPole<T> {
    pub params: CartPoleParams<T>,
}

impl<T: Real> CartPole<T> {
    pub fn new(params: CartPoleParams<T>) -> Self {
        Self { params }
    }

    /// Labelling over `[a, c1, c2]`: `a` on `s1 ∈ [reach_lo, 1]`, `c1` on
    /// `s1 ∈ [-1, 1]`, `c2` on `s3 ∈ [-12°, 12°]`. The objective uses
    /// `reach_lo = 0.4`; smaller values give an easier reach set.
    pub fn labeling(reach_lo: T) -> Result<Labeling<T>> {
        let inf = T::infinity();
        let deg = T::lit(12f64.to_radians());
        Labeling::new(
            4,
            vec!["a".into(), "c1".into(), "c2".into()],
            vec![
                vec![Interval::slab(4, 0, reach_lo, T::one())],
                vec![Interval::slab(4, 0, -T::one(), T::one())],
                vec![Interval::new(vec![-inf, -inf, -deg, -inf], vec![inf, inf, deg, inf])?],
            ],
        )
    }

    pub fn force(&self, u: usize) -> Result<T> {
        match u {
            0 => Ok(-self.params.max_force),
            1 => Ok(self.params.max_force),
            _ => Err(Error::InvalidArgument(format!("cart-pole input index {u}"))),
        }
    }

    /// One transition under force `u`, which must be `±max_force`.
    pub fn step_force(&self, s: &[T], u: T, rng: &mut SimRng) -> Result<Vec<T>> {
        let p = &self.params;
        if u != p.max_force && u != -p.max_force {
            return Err(Error::InvalidArgument(format!("cart-pole force {u} is not ±{}", p.max_force)));
        }
        if s.len() != 4 {
            return Err(Error::Shape(format!("cart-pole state of length {}", s.len())));
        }
        let (s1, s2, s3, s4) = (s[0], s[1], s[2], s[3]);
        let total = p.cart_mass + p.pole_mass;
        let (sin, cos) = (s3.sin(), s3.cos());
        let a1 = (u + p.half_length * s4 * s4 * sin) / total;
        let a2 = (p.gravity * sin - cos * a1)
            / (p.half_length * (T::lit(4.0 / 3.0) - p.pole_mass * cos * cos / total));
        let a3 = a1 - p.half_length * a2 * cos / total;
        let eta = if p.noise_std > T::zero() {
            p.noise_std * T::standard_normal(rng)
        } else {
            T::zero()
        };
        let angle_rate = if p.angle_from_cart_velocity { s2 } else { s4 };
        Ok(vec![
            s1 + p.dt * s2,
            s2 + p.dt * a3,
            s3 + p.dt * angle_rate,
            s4 + p.dt * a2 + eta,
        ])
    }
}

impl<T: Real> Environment<T> for CartPole<T> {
    fn state_dim(&self) -> usize {
        4
    }

    fn num_inputs(&self) -> usize {
        2
    }

    fn input_label(&self, u: usize) -> String {
        match self.force(u) {
            Ok(f) => f.to_string(),
            Err(_) => "?".into(),
        }
    }

    fn sample_initial(&self, rng: &mut SimRng) -> Vec<T> {
        let r = self.params.init_range;
        (0..4)
            .map(|_| r * (T::lit(2.0) * T::unit_uniform(rng) - T::one()))
            .collect()
    }

    fn sample_next(&self, s: &[T], u: usize, rng: &mut SimRng) -> Result<Vec<T>> {
        self.step_force(s, self.force(u)?, rng)
    }

    fn features(&self, s: &[T], out: &mut Vec<T>) {
        out.extend(
            s.iter()
                .zip(&self.params.feature_bounds)
                .map(|(&x, &(lo, hi))| scale(x, lo, hi)),
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;

    fn noiseless() -> CartPole<f64> {
        CartPole::new(CartPoleParams { noise_std: 0.0, ..Default::default() })
    }

    #[test]
    fn frozen_dynamics() {
        let env = CartPole::new(CartPoleParams { dt: 0.0, noise_std: 0.0, ..Default::default() });
        let mut rng = SimRng::seed_from_u64(0);
        let s = vec![0.3, -0.2, 0.1, 0.05];
        assert_eq!(env.sample_next(&s, 1, &mut rng).unwrap(), s);
    }

    #[test]
    fn one_step_from_rest() {
        // a1 = 10/1.1, a2 = -a1 / (0.5 (4/3 - 0.1/1.1)), a3 = a1 - 0.5 a2 / 1.1
        let a1 = 10.0 / 1.1;
        let a2 = -a1 / (0.5 * (4.0 / 3.0 - 0.1 / 1.1));
        let a3 = a1 - 0.5 * a2 / 1.1;
        assert_abs_diff_eq!(a1, 9.0909, epsilon = 1e-4);
        assert_abs_diff_eq!(a2, -14.634, epsilon = 1e-3);
        assert_abs_diff_eq!(a3, 15.743, epsilon = 1e-3);
        let mut rng = SimRng::seed_from_u64(0);
        let s = noiseless().sample_next(&[0.0; 4], 1, &mut rng).unwrap();
        let want = [0.0, 0.02 * a3, 0.0, 0.02 * a2];
        for (x, y) in s.iter().zip(want) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(s[1], 0.31486, epsilon = 1e-5);
        assert_abs_diff_eq!(s[3], -0.29268, epsilon = 1e-5);
    }

    #[test]
    fn literal_angle_update() {
        let env = CartPole::new(CartPoleParams {
            noise_std: 0.0,
            angle_from_cart_velocity: true,
            ..Default::default()
        });
        let mut rng = SimRng::seed_from_u64(0);
        let s = env.sample_next(&[0.0, 1.0, 0.0, 3.0], 0, &mut rng).unwrap();
        assert_abs_diff_eq!(s[2], 0.02, epsilon = 1e-15);
        let s = noiseless().sample_next(&[0.0, 1.0, 0.0, 3.0], 0, &mut rng).unwrap();
        assert_abs_diff_eq!(s[2], 0.06, epsilon = 1e-15);
    }

    #[test]
    fn rejects_invalid_force() {
        let mut rng = SimRng::seed_from_u64(0);
        assert!(noiseless().step_force(&[0.0; 4], 3.0, &mut rng).is_err());
        assert!(noiseless().sample_next(&[0.0; 4], 2, &mut rng).is_err());
    }

    #[test]
    fn seeded_runs_repeat() {
        let env = CartPole::<f64>::new(CartPoleParams::default());
        let run = || {
            let mut rng = SimRng::seed_from_u64(99);
            let mut s = env.sample_initial(&mut rng);
            for n in 0..50 {
                s = env.sample_next(&s, n % 2, &mut rng).unwrap();
            }
            s
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn disturbance_moments() {
        let env = CartPole::<f64>::new(CartPoleParams { dt: 0.0, ..Default::default() });
        let mut rng = SimRng::seed_from_u64(5);
        let n = 100_000;
        let draws: Vec<f64> = (0..n)
            .map(|_| env.sample_next(&[0.0; 4], 0, &mut rng).unwrap()[3])
            .collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let sigma2 = 1e-4;
        assert!(mean.abs() < 3.0 * (sigma2 / n as f64).sqrt());
        // Var of the sample variance for a normal is 2σ⁴/(n-1).
        assert!((var - sigma2).abs() < 3.0 * (2.0 * sigma2 * sigma2 / (n - 1) as f64).sqrt());
    }
}
