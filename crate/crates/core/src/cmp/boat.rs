use super::{scale, Environment, Interval, Labeling};
use crate::{Error, Real, Result, SimRng};

/// Heading inputs in degrees.
pub const BOAT_DIRECTIONS: [f64; 12] =
    [-100.0, -90.0, -75.0, -60.0, -45.0, -30.0, -15.0, 0.0, 15.0, 45.0, 75.0, 90.0];

#[derive(Clone, Debug, PartialEq)]
pub struct BoatParams<T> {
    pub current_force: T,
    pub inertia: T,
    pub max_speed: T,
    pub desired_speed: T,
    pub gain: T,
    /// Standard deviation of the current disturbance.
    pub noise_std: T,
    /// `y0` is uniform on this interval; `x0 = 0` and the other states start at 0.
    pub initial_y: (T, T),
    pub feature_bounds: [(T, T); 6],
}

impl<T: Real> Default for BoatParams<T> {
    fn default() -> Self {
        let l = T::lit;
        Self {
            current_force: l(1.25),
            inertia: l(0.1),
            max_speed: l(2.5),
            desired_speed: l(1.75),
            gain: l(0.9),
            noise_std: l(0.5),
            initial_y: (l(60.0), l(100.0)),
            feature_bounds: [
                (l(0.0), l(200.0)),
                (l(0.0), l(200.0)),
                (l(-180.0), l(180.0)),
                (l(-45.0), l(45.0)),
                (l(0.0), l(2.5)),
                (l(-45.0), l(45.0)),
            ],
        }
    }
}

/// Boat crossing a river with a nonlinear current. State
/// `(x, y, heading, angular velocity, speed, rudder)`, angles in degrees.
#[derive(Clone, Debug, PartialEq)]
pub struct Boat<T> {
    pub params: BoatParams<T>,
}

impl<T: Real> Boat<T> {
    pub fn new(params: BoatParams<T>) -> Self {
        Self { params }
    }

    /// Labelling over `[t]`: `t` on the right bank `x ≥ 200` with
    /// `y ∈ [y_lo, y_hi]`. The objective uses `[95, 105]`.
    pub fn labeling(y_lo: T, y_hi: T) -> Result<Labeling<T>> {
        let inf = T::infinity();
        let lo = vec![T::lit(200.0), y_lo, -inf, -inf, -inf, -inf];
        let hi = vec![inf, y_hi, inf, inf, inf, inf];
        Labeling::new(6, vec!["t".into()], vec![vec![Interval::new(lo, hi)?]])
    }

    /// Current displacement `E(x, η)`.
    pub fn current(&self, x: T, eta: T) -> T {
        let r = x / T::lit(50.0) - (x / T::lit(100.0)).powi(2);
        self.params.current_force * r + eta
    }

    /// One transition with heading command `u` in degrees.
    pub fn step_direction(&self, s: &[T], u: T, rng: &mut SimRng) -> Result<Vec<T>> {
        if !BOAT_DIRECTIONS.iter().any(|&d| T::lit(d) == u) {
            return Err(Error::InvalidArgument(format!("boat direction {u} not in the input set")));
        }
        if s.len() != 6 {
            return Err(Error::Shape(format!("boat state of length {}", s.len())));
        }
        let p = &self.params;
        let (x, y, delta, big_omega, v) = (s[0], s[1], s[2], s[3], s[4]);
        let limit = T::lit(45.0);
        let omega = (p.gain * (u - delta)).max(-limit).min(limit);
        let v = v + p.inertia * (p.desired_speed - v);
        let big_omega = big_omega + (omega - big_omega) * (v / p.max_speed);
        let delta = delta + p.inertia * big_omega;
        let bank = T::lit(200.0);
        let clamp = |z: T| z.max(T::zero()).min(bank);
        let x = clamp(x + v * delta.to_radians().cos());
        let eta = if p.noise_std > T::zero() {
            p.noise_std * T::standard_normal(rng)
        } else {
            T::zero()
        };
        let y = clamp(y - v * delta.to_radians().sin() - self.current(x, eta));
        Ok(vec![x, y, delta, big_omega, v, omega])
    }
}

impl<T: Real> Environment<T> for Boat<T> {
    fn state_dim(&self) -> usize {
        6
    }

    fn num_inputs(&self) -> usize {
        BOAT_DIRECTIONS.len()
    }

    fn input_label(&self, u: usize) -> String {
        BOAT_DIRECTIONS.get(u).map_or("?".into(), |d| d.to_string())
    }

    fn sample_initial(&self, rng: &mut SimRng) -> Vec<T> {
        let (lo, hi) = self.params.initial_y;
        let y = lo + (hi - lo) * T::unit_uniform(rng);
        vec![T::zero(), y, T::zero(), T::zero(), T::zero(), T::zero()]
    }

    fn sample_next(&self, s: &[T], u: usize, rng: &mut SimRng) -> Result<Vec<T>> {
        let d = BOAT_DIRECTIONS
            .get(u)
            .ok_or_else(|| Error::InvalidArgument(format!("boat input index {u}")))?;
        self.step_direction(s, T::lit(*d), rng)
    }

    fn features(&self, s: &[T], out: &mut Vec<T>) {
        out.extend(
            s.iter()
                .zip(&self.params.feature_bounds)
                .map(|(&x, &(lo, hi))| scale(x, lo, hi)),
        );
    }
}
