use mwdp_core::model::{bellman_solve, validate_instance, DpInstance, RawInstance};
use mwdp_core::oracle::{exact_argmax, QueryLedger, SigmaContext};
use mwdp_core::solver::{
    extract_from_values, feasibility_at_sigma, iteration_bound_report, solve_dp, solve_policy,
    ProbeOptions, SolveConfig,
};
use mwdp_core::Error;

fn i1() -> DpInstance {
    validate_instance(&RawInstance::from_table(
        2,
        2,
        2,
        0,
        false,
        &[(0, 1), (1, 2), (1, 1), (0, 2)],
    ))
    .unwrap()
}

#[test]
fn i1_exact_solve_picks_action_one() {
    let report = solve_dp(&i1(), &SolveConfig::exact()).unwrap();
    assert_eq!(report.sigma_bar, 4);
    assert_eq!(report.action, 1);
    assert_eq!(report.rho, 4);
    assert_eq!(report.delta_used, 0.25);
    assert!(report.certified);
    assert_eq!(report.ledger.qmf_runs, 0);
}

#[test]
fn i1_policy_collects_full_reward() {
    let outcome = solve_policy(&i1(), &SolveConfig::exact()).unwrap();
    let actions: Vec<usize> = outcome.trace.steps.iter().map(|s| s.action).collect();
    assert_eq!(actions, vec![1, 1]);
    assert_eq!(outcome.trace.cumulative_reward(), 4);
}

#[test]
fn rho_one_needs_no_bisection() {
    let inst = validate_instance(&RawInstance::from_table(
        1,
        2,
        1,
        0,
        false,
        &[(0, 1), (0, 1)],
    ))
    .unwrap();
    let report = solve_dp(&inst, &SolveConfig::exact()).unwrap();
    assert_eq!(report.rho, 1);
    assert_eq!(report.sigma_bar, 1);
    assert_eq!(report.bisection_steps, 0);
}

#[test]
fn all_ones_reward_reaches_horizon() {
    let inst = validate_instance(&RawInstance::from_table(
        2,
        2,
        3,
        0,
        false,
        &[(1, 1), (0, 1), (0, 1), (1, 1)],
    ))
    .unwrap();
    let report = solve_dp(&inst, &SolveConfig::exact()).unwrap();
    assert_eq!(report.sigma_bar, 3);
}

#[test]
fn optimum_probe_is_feasible_on_i1() {
    let inst = i1();
    let probe =
        feasibility_at_sigma(&inst, 4, 4, 0.25, &mut None, ProbeOptions::default()).unwrap();
    assert!(probe.is_feasible());
    let lambda = probe.average().unwrap().lambda();
    let mass: f64 = lambda
        .iter()
        .map(|e| e.value * inst.reward(e.t, e.s, e.a) as f64)
        .sum();
    assert!((mass - 4.0).abs() < 1e-9);
}

#[test]
fn sigma_outside_range_is_an_error() {
    let inst = i1();
    let err = feasibility_at_sigma(&inst, 5, 4, 0.25, &mut None, ProbeOptions::default());
    assert!(matches!(err, Err(Error::SigmaOutOfRange { .. })));
    assert!(SigmaContext::new(&inst, 0.5, 4).is_err());
}

#[test]
fn extraction_thresholds() {
    assert_eq!(extract_from_values(&[0.1, 0.9]).unwrap(), 1);
    assert_eq!(extract_from_values(&[0.5, 0.5]).unwrap(), 0);
    assert_eq!(extract_from_values(&[0.25, 0.0]).unwrap(), 0);
    assert!(matches!(
        extract_from_values(&[0.1, 0.1]),
        Err(Error::ExtractionBelowThreshold { .. })
    ));
}

#[test]
fn qmf_runs_are_reproducible_per_seed() {
    let inst = i1();
    let a = solve_dp(&inst, &SolveConfig::qmf(11)).unwrap();
    let b = solve_dp(&inst, &SolveConfig::qmf(11)).unwrap();
    assert_eq!(a.sigma_bar, b.sigma_bar);
    assert_eq!(a.lambda_s0, b.lambda_s0);
    assert_eq!(a.ledger, b.ledger);
    assert!(a.ledger.qmf_runs > 0);
}

#[test]
fn iteration_bound_matches_i1_shape() {
    let bound = iteration_bound_report(&i1(), &SolveConfig::exact()).unwrap();
    assert_eq!(bound.rho, 4);
    assert_eq!(bound.num_constraints, 4);
    assert_eq!(bound.num_vertices, 8);
    assert_eq!(bound.planned_probes, 3);
    assert_eq!(bound.per_sigma.len(), 4);
}

#[test]
fn uniform_weights_tie_to_first_vertex() {
    let inst = i1();
    let ctx = SigmaContext::new(&inst, 1.0, 4).unwrap();
    let w = vec![0.25; ctx.num_constraints()];
    let mut ledger = QueryLedger::default();
    let (v, f) = exact_argmax(&ctx, &w, &mut ledger);
    assert_eq!(v.key(), (0, 0, 0));
    assert!((f - 0.25).abs() < 1e-12);
    assert_eq!(ledger.scan_evaluations, ctx.num_vertices() as u64);
}

#[test]
fn bellman_i1_value() {
    let (table, policy) = bellman_solve(&i1());
    assert_eq!(table.get(0, 0), 4);
    assert_eq!(policy.action(0, 0), 1);
}
