//! Model-level oracles for the M/M/n waiting probability: the exact stationary
//! distribution of the birth-death chain and a discrete-event simulation.

mod birth_death;
mod simulation;

pub use birth_death::birth_death_wait_prob;
pub use simulation::{
    simulate_mmn, simulate_replications, SimConfig, SimEstimate, DEFAULT_BATCHES,
};
