//! Exact and statistical checks: reachability and Büchi values on explicit
//! finite MDPs, closed forms for the countable chain, Hoeffding intervals,
//! Monte-Carlo satisfaction of learned controllers, and the conditional
//! accepting-visit diagnostic.

mod chain;
mod hoeffding;
mod mec;
mod monte_carlo;
mod value_iteration;
mod visits;

pub use chain::{chain_reach_closed_form, chain_reach_closed_form_from3};
pub use hoeffding::{hoeffding_eps, hoeffding_lower, HoeffdingResult};
pub use mec::{buchi_value, maximal_end_components, EndComponent};
pub use monte_carlo::{
    monte_carlo_satisfaction, ActorPolicy, McReport, ProductPolicy, SurrogateCheck, TrajectoryLog, TrajectoryRow,
};
pub use value_iteration::{max_reach, min_reach, reach_value_iteration, Objective, ValueVector};
pub use visits::{conditional_visits_estimate, VisitEstimate};
