//! Lagrangian oracle for the dual LP of a DP instance.

pub mod adapter;
pub mod average;
pub mod context;
pub mod ledger;
pub mod qmf;
pub mod scan;

pub use adapter::{oracle_for_mwum, DpOracle, THRESHOLD_TOLERANCE};
pub use average::{accumulate, check_dual_feasibility, AveragedSolution, DualVerdict, LambdaEntry};
pub use context::{eval_f, residuals, SigmaContext, SimplexVertex, BUDGET};
pub use ledger::{ceil_log2_inv, ceil_sqrt, qmf_run_cost, LedgerSegment, QueryLedger};
pub use qmf::{quantize_index, simulated_qmf, OracleStrategy, OracleVerdict, QmfSampler};
#[cfg(feature = "parallel")]
pub use scan::exact_argmax_par;
pub use scan::{exact_argmax, exact_argmax_seq};
