//! A quick self-check suite: each check re-derives a property from first
//! principles on seeded inputs and reports pass or fail.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::encoders::{
    brute_force_msc, brute_force_tsp, decode_msc, decode_tsp, encode_msc, encode_tsp,
    gen_msc_instance, gen_tsp_graph, MscSolution,
};
use crate::error::Result;
use crate::model::{
    bellman_solve, check_primal_feasibility, gen_random_instance, rollout, validate_instance,
    DpInstance, PrimalVerdict, RandomParams, RawInstance,
};
use crate::mwum::{mw_run_generic, regret_audit};
use crate::oracle::{eval_f, exact_argmax, residuals, QueryLedger, SigmaContext};
use crate::solver::{solve_dp, SolveConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyCheck {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Best cumulative reward over every action sequence from the initial state.
pub fn enumerate_best(inst: &DpInstance) -> i64 {
    fn go(inst: &DpInstance, s: usize, t: usize) -> i64 {
        if t == inst.horizon() {
            return 0;
        }
        (0..inst.num_actions())
            .map(|a| {
                let tr = inst.step(t, s, a);
                tr.reward + go(inst, tr.next, t + 1)
            })
            .max()
            .unwrap_or(0)
    }
    go(inst, inst.initial_state(), 0)
}

fn random_suite(seed: u64, count: usize) -> Result<Vec<DpInstance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            gen_random_instance(&RandomParams {
                num_states: rng.gen_range(1..=5),
                num_actions: rng.gen_range(1..=3),
                horizon: rng.gen_range(1..=4),
                reward_max: rng.gen_range(1..=2),
                time_dependent: rng.gen_bool(0.5),
                seed: rng.gen(),
            })
        })
        .collect()
}

fn check(name: &'static str, failures: Vec<String>, total: usize) -> VerifyCheck {
    VerifyCheck {
        name,
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{total}/{total}")
        } else {
            format!(
                "{}/{total}: {}",
                total - failures.len(),
                failures.join("; ")
            )
        },
    }
}

pub fn run_verify_suite(seed: u64) -> Result<Vec<VerifyCheck>> {
    let suite = random_suite(seed, 20)?;
    let mut out = Vec::new();

    let fails = suite
        .iter()
        .enumerate()
        .filter(|(_, inst)| {
            let (table, _) = bellman_solve(inst);
            table.get(inst.initial_state(), 0) != enumerate_best(inst)
        })
        .map(|(i, _)| format!("instance {i}"))
        .collect();
    out.push(check("bellman_vs_enumeration", fails, suite.len()));

    let mut fails = Vec::new();
    for (i, inst) in suite.iter().enumerate() {
        let (table, _) = bellman_solve(inst);
        let horizon = inst.horizon() as i64;
        let top = inst.reward_bound();
        for t in 0..inst.horizon() {
            for s in 0..inst.num_states() {
                let v = table.get(s, t);
                let left = horizon - t as i64;
                if v < left || v > left * top {
                    fails.push(format!("instance {i} v({s},{t})={v}"));
                }
            }
        }
        if check_primal_feasibility(inst, &table)? != PrimalVerdict::Pass {
            fails.push(format!("instance {i} primal"));
        }
    }
    out.push(check("value_bounds_and_primal", fails, suite.len()));

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut fails = Vec::new();
    for trial in 0..20 {
        let n = rng.gen_range(1..=16);
        let eps = [0.1, 0.25, 0.5][trial % 3];
        let rounds = rng.gen_range(1..=200);
        let mut stream = ChaCha8Rng::seed_from_u64(rng.gen());
        let transcript = mw_run_generic(
            n,
            eps,
            |_, _| (0..n).map(|_| stream.gen_range(-1.0..=1.0)).collect(),
            rounds,
        )?;
        let verdict = regret_audit(&transcript, eps, n);
        if !verdict.pass {
            fails.push(format!("trial {trial} margin {}", verdict.worst_margin));
        }
    }
    out.push(check("regret_bound", fails, 20));

    let mut fails = Vec::new();
    let mut samples = 0;
    for (i, inst) in suite.iter().enumerate().take(10) {
        let rho = inst.horizon() as u64 * inst.reward_bound() as u64;
        let sigma = rng.gen_range(1..=rho) as f64;
        let ctx = SigmaContext::new(inst, sigma, rho)?;
        let raw: Vec<f64> = (0..ctx.num_constraints())
            .map(|_| rng.gen::<f64>())
            .collect();
        let total: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let (best, best_f) = exact_argmax(&ctx, &w, &mut QueryLedger::default());
        for v in ctx.vertices() {
            samples += 1;
            let f = eval_f(&ctx, &w, v)?;
            let dot: f64 = residuals(&ctx, v)?.iter().map(|&(c, r)| w[c] * r).sum();
            if (f - dot).abs() > 1e-12 {
                fails.push(format!("instance {i} vertex {:?}", v.key()));
            }
            if f > best_f || (f == best_f && v.key() < best.key()) {
                fails.push(format!("instance {i} argmax beaten by {:?}", v.key()));
            }
        }
    }
    out.push(check("eval_f_cross_derivation", fails, samples));

    let i1 = validate_instance(&RawInstance::from_table(
        2,
        2,
        2,
        0,
        false,
        &[(0, 1), (1, 2), (1, 1), (0, 2)],
    ))?;
    let mut fails = Vec::new();
    let report = solve_dp(&i1, &SolveConfig::exact())?;
    if report.sigma_bar != 4 || report.action != 1 {
        fails.push(format!(
            "sigma_bar {} action {}",
            report.sigma_bar, report.action
        ));
    }
    let qmf = solve_dp(&i1, &SolveConfig::qmf(seed))?;
    let (runs, queries) = qmf.ledger.closed_form();
    if runs != qmf.ledger.qmf_runs || queries != qmf.ledger.modeled_queries {
        fails.push("ledger totals differ from closed form".into());
    }
    out.push(check("end_to_end_and_ledger", fails, 2));

    let mut fails = Vec::new();
    let mut total = 0;
    for n in 3..=6 {
        for k in 0..3 {
            total += 1;
            let g = gen_tsp_graph(n, 5, k % 2 == 0, seed.wrapping_add(100 * n as u64 + k))?;
            let enc = encode_tsp(&g)?;
            let (_, policy) = bellman_solve(&enc.instance);
            let (_, cost) = decode_tsp(&rollout(&enc.instance, &policy), &enc, &g)?;
            let best = brute_force_tsp(&g)?;
            if cost != best {
                fails.push(format!("n={n} graph {k}: {cost} vs {best}"));
            }
        }
    }
    out.push(check("tsp_encoder", fails, total));

    let mut fails = Vec::new();
    for k in 0..10u64 {
        let inst = gen_msc_instance(
            rng.gen_range(1..=6),
            rng.gen_range(1..=5),
            0.4,
            seed.wrapping_add(k),
        )?;
        let enc = encode_msc(&inst)?;
        let (_, policy) = bellman_solve(&enc.instance);
        let got = match decode_msc(&rollout(&enc.instance, &policy), &enc, &inst)? {
            MscSolution::Cover { size, .. } => Some(size),
            MscSolution::NoCover => None,
        };
        let best = brute_force_msc(&inst)?;
        if got != best {
            fails.push(format!("instance {k}: {got:?} vs {best:?}"));
        }
    }
    out.push(check("msc_encoder", fails, 10));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        let checks = run_verify_suite(1).unwrap();
        assert_eq!(checks.len(), 7);
        for c in &checks {
            assert!(c.pass, "{}: {}", c.name, c.detail);
        }
    }
}
