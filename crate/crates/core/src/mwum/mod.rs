//! Multiplicative weights: the experts algorithm, its regret audit, and the
//! linear-feasibility driver.

pub mod feasibility;
pub mod generic;
pub mod regret;
pub mod transcript;
pub mod weights;

pub use feasibility::{
    compute_config, compute_config_variant, prescribed_rounds, run_feasibility, ApproxOracle,
    Average, DenseAverage, FeasibilityConfig, FeasibilityOutcome, OracleAnswer, RunOptions,
    Variant,
};
pub use generic::mw_run_generic;
pub use regret::{regret_audit, RegretVerdict, REGRET_TOLERANCE};
pub use transcript::{Chosen, RoundRecord, Transcript, TranscriptPoint};
pub use weights::{mw_update, CostVector, WeightState};
