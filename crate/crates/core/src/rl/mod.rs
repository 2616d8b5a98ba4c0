//! Advantage actor-critic on the augmented product.

mod a2c;
mod checkpoint;
mod mlp;

pub use a2c::{
    a2c_update, actor_greedy, actor_sample, batch_gradients, critic_estimate, episode_rng, masked_softmax,
    rollout, train, train_agent, Agent, EpisodeRecord, Losses, MetricsRow, Step, TrainConfig, TrainOutcome,
};
pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use mlp::{Adam, Mlp, Tape};
