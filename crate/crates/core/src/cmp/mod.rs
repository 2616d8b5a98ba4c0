//! Black-box controlled Markov processes: the environment interface,
//! labelling functions with r-relaxation, and the concrete systems.

mod boat;
mod cartpole;
mod finite;
mod labeling;

pub use boat::{Boat, BoatParams, BOAT_DIRECTIONS};
pub use cartpole::{CartPole, CartPoleParams};
pub use finite::{chain_mdp, chain_mdp_from, random_finite_mdp, FiniteMdp, FiniteMdpEnv};
pub use labeling::{Interval, Labeling};

use crate::{Real, Result, SimRng};

/// A sampled CMP with a finite, indexed input set.
///
/// Implementations hold only configuration: `sample_next` depends on the
/// state, the input and the random stream, never on hidden mutable state.
pub trait Environment<T: Real>: Send + Sync {
    fn state_dim(&self) -> usize;

    fn num_inputs(&self) -> usize;

    fn input_label(&self, u: usize) -> String;

    /// Writes the valid-input mask `U(s)` into `mask` (length
    /// [`Environment::num_inputs`]). Default: every input is valid.
    fn valid_inputs(&self, _s: &[T], mask: &mut [bool]) {
        mask.fill(true);
    }

    fn sample_initial(&self, rng: &mut SimRng) -> Vec<T>;

    fn sample_next(&self, s: &[T], u: usize, rng: &mut SimRng) -> Result<Vec<T>>;

    /// Length of [`Environment::features`].
    fn feature_dim(&self) -> usize {
        self.state_dim()
    }

    /// Network input for a state, scaled to roughly `[-1, 1]`.
    fn features(&self, s: &[T], out: &mut Vec<T>);
}

/// Affine map of `x` from `[lo, hi]` onto `[-1, 1]`.
pub(crate) fn scale<T: Real>(x: T, lo: T, hi: T) -> T {
    let two = T::lit(2.0);
    two * (x - lo) / (hi - lo) - T::one()
}
