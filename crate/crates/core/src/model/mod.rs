//! DP instances, the exact Bellman reference solver and instance generators.

pub mod bellman;
pub mod generate;
pub mod instance;

pub use bellman::{
    bellman_solve, check_primal_feasibility, compute_rho, optimal_action_set, rollout, Policy,
    PolicyTrace, PrimalVerdict, TraceStep, ValueTable,
};
pub use generate::{gen_adversarial_pair, gen_random_instance, AdversarialPair, RandomParams};
pub use instance::{validate_instance, DpInstance, RawInstance, Transition, INSTANCE_SCHEMA};
