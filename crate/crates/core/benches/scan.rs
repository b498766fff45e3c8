use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use mwdp_core::encoders::{brute_force_tsp, gen_tsp_graph};
use mwdp_core::model::{gen_random_instance, RandomParams};
use mwdp_core::oracle::{exact_argmax_seq, SigmaContext};

fn scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_argmax");
    for &(states, actions, horizon) in &[(8, 3, 4), (64, 4, 8), (256, 8, 16)] {
        let inst = gen_random_instance(&RandomParams {
            num_states: states,
            num_actions: actions,
            horizon,
            reward_max: 3,
            time_dependent: true,
            seed: 7,
        })
        .unwrap();
        let rho = horizon as u64 * 3;
        let ctx = SigmaContext::new(&inst, rho as f64 / 2.0, rho).unwrap();
        let n = ctx.num_constraints();
        let w: Vec<f64> = (0..n).map(|i| (1 + i % 13) as f64).collect();
        let total: f64 = w.iter().sum();
        let w: Vec<f64> = w.into_iter().map(|x| x / total).collect();
        let label = ctx.num_vertices();

        group.bench_with_input(BenchmarkId::new("seq", label), &w, |b, w| {
            b.iter(|| black_box(exact_argmax_seq(&ctx, w)))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("par", label), &w, |b, w| {
            b.iter(|| black_box(mwdp_core::oracle::exact_argmax_par(&ctx, w)))
        });
    }
    group.finish();
}

fn brute_force(c: &mut Criterion) {
    let mut group = c.benchmark_group("brute_force_tsp");
    group.sample_size(10);
    for n in [7, 9] {
        let g = gen_tsp_graph(n, 5, true, 3).unwrap();
        let perms: u64 = (1..n as u64).product();
        let tour = |code: u64| {
            let mut rest: Vec<usize> = (2..=n).collect();
            let mut order = vec![1];
            let mut c = code;
            for k in (1..=rest.len()).rev() {
                let f: u64 = (1..k as u64).product();
                order.push(rest.remove((c / f) as usize));
                c %= f;
            }
            order.push(1);
            Some(g.tour_cost(&order))
        };
        group.bench_function(BenchmarkId::new("seq", n), |b| {
            b.iter(|| black_box(mwdp_core::parallel::min_seq(perms, tour)))
        });
        #[cfg(feature = "parallel")]
        group.bench_function(BenchmarkId::new("par", n), |b| {
            b.iter(|| black_box(mwdp_core::parallel::min_par(perms, tour)))
        });
        group.bench_function(BenchmarkId::new("library", n), |b| {
            b.iter(|| black_box(brute_force_tsp(&g).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, scan, brute_force);
criterion_main!(benches);
