//! Learning finite-memory controllers for LTL objectives on black-box
//! stochastic systems.
//!
//! The pipeline: an LTL formula is reinterpreted over labelling letters, an
//! LDBA for it is composed with a sampled environment, an absorbing sink is
//! added that fires with probability `1 - zeta` on accepting transitions, and
//! the probability of reaching the sink is maximised with advantage
//! actor-critic. [`oracle`] holds exact finite-state solvers used to check all
//! of this on small instances.

pub mod automata;
pub mod cmp;
pub mod error;
pub mod guided;
pub mod product;
pub mod ltl;
pub mod oracle;
pub mod rl;
mod num;

pub use error::{Error, Result};
pub use num::Real;

/// Random generator used for every sampled quantity.
pub type SimRng = rand_chacha::ChaCha8Rng;

/// `f64` instantiations of the generic types.
pub type Product = product::AugmentedProduct<f64>;
pub type Labeling = cmp::Labeling<f64>;
pub type Interval = cmp::Interval<f64>;
pub type FiniteMdp = cmp::FiniteMdp<f64>;
pub type CartPole = cmp::CartPole<f64>;
pub type Boat = cmp::Boat<f64>;
pub type Mlp = rl::Mlp<f64>;
pub type Agent = rl::Agent<f64>;
pub type TrainConfig = rl::TrainConfig<f64>;
pub type Curriculum = guided::Curriculum<f64>;
