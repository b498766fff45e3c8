//! Binary search on σ, complementary-slackness extraction and policy
//! construction on top of the dual oracle.

pub mod config;
pub mod extract;
pub mod pipeline;
pub mod search;

pub use config::{SolveConfig, StrategyKind};
pub use extract::{extract_action, extract_from_values, lambda_at_s0};
pub use pipeline::{
    iteration_bound_report, planned_probes, planned_rounds, solve_dp, solve_policy, IterationBound,
    PolicyOutcome, SigmaBound, SolveReport, REPORT_SCHEMA,
};
pub use search::{
    binary_search_sigma, feasibility_at_sigma, Probe, ProbeOptions, ProbeSummary, SearchResult,
};
