//! Grover search driven by a two-state Markov chain that picks the ideal
//! operator `G` or the noisy operator `G'` at every step.
//!
//! The chain is carried by a walker qubit (`|g>` = ideal, `|g'>` = noisy)
//! that is entangled with the register. Each step is a Kraus map on
//! walker ⊗ system; the system state is the walker marginal.

mod analytic;
mod channel;
mod evolve;
mod oracle;
mod params;

pub use analytic::{perfect_memory_analytic, perfect_memory_first_max, FirstMaximum};
pub use channel::{
    initial_joint_density, initial_joint_state, transition_superoperator, transition_weights, Branch,
    JointState, WalkerChannel, WalkerTerm,
};
pub use evolve::{
    default_check, evolve_with_operators, markov_evolve, run_channels, EvolutionTrace, EvolveOptions,
    StepRecord,
};
pub use oracle::{history_oracle, history_weights, MAX_HISTORY_STEPS};
pub use params::{conditional_probs, ConditionalProbs, MarkovNoiseParams};

