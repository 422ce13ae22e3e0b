//! Acceptance suite: end-to-end checks of the solver stack, one test per
//! criterion, each printing a single `[acceptance] ... PASS/FAIL` line
//! (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Tolerances are pinned here and nowhere else. Statistical checks use
//! fixed seeds, so every run sees the same numbers.

use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qubo_admm::admm::{
    build_step_qubo, solve, update_lambda, update_z, AdmmParams, PostprocessMode,
};
use qubo_admm::problem::{ConstrainedProblem, LinearConstraint};
use qubo_admm::qkp::{self, QkpInstance};
use qubo_admm::samplers::{
    boltzmann_postprocess, brute_force_sample, simulated_annealing_sample, BruteForceSampler,
    SaParams, SaSampler, Sampler,
};
use qubo_admm::{BitVector, QuboMatrix};

fn report(name: &str, pass: bool, detail: &str) {
    println!(
        "[acceptance] {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{name}: {detail}");
}

/// Ten instances per cell, skipping degenerate optima per the generation
/// policy; seed slots are spaced so retries cannot collide.
fn cell_instances(n: usize, delta: f64, base_seed: u64) -> Vec<(QkpInstance, i64)> {
    (0..10)
        .map(|k| {
            let (inst, _skipped) =
                qkp::generate_nondegenerate(n, delta, base_seed + 1000 * k).unwrap();
            let (_, opt) = qkp::brute_force_opt(&inst).unwrap();
            (inst, opt)
        })
        .collect()
}

/// Runs the solver on one instance and returns (found profit, feasible).
fn run_admm(inst: &QkpInstance, params: &AdmmParams, sampler: &dyn Sampler) -> (f64, bool) {
    let p = qkp::to_problem(inst);
    let result = solve(&p, params, sampler).unwrap();
    match result.best_feasible {
        Some((x, value)) => {
            assert!(
                inst.load(&x) <= inst.capacity,
                "reported incumbent violates the knapsack constraint"
            );
            assert_eq!(value, -(inst.profit(&x) as f64));
            (-value, true)
        }
        None => (0.0, false),
    }
}

#[test]
fn criterion_1_exact_sampler_reaches_every_optimum() {
    let mut detail = String::new();
    let mut pass = true;
    for (d, delta) in [0.2, 0.6, 1.0].into_iter().enumerate() {
        let started = Instant::now();
        let instances = cell_instances(16, delta, 10_000 * (d as u64 + 1));
        let opt: Vec<f64> = instances.iter().map(|(_, o)| *o as f64).collect();
        let found: Vec<f64> = instances
            .iter()
            .map(|(inst, _)| run_admm(inst, &AdmmParams::default(), &BruteForceSampler).0)
            .collect();
        let mape = qkp::mape(&opt, &found).unwrap();
        let elapsed = started.elapsed().as_secs_f64();
        detail.push_str(&format!(
            "delta {delta}: mape {mape:.1e} in {elapsed:.1}s; "
        ));
        pass &= mape == 0.0 && elapsed < 60.0;
    }
    report(
        "exact-sampler optimality (n=16, 10 instances/cell, <60s/cell)",
        pass,
        detail.trim_end_matches("; "),
    );
}

#[test]
fn criterion_2_sa_with_boltzmann_postprocess_accuracy_and_feasibility() {
    let started = Instant::now();
    let sampler = SaSampler::new(SaParams::default());
    let params = AdmmParams {
        postprocess: PostprocessMode::Boltzmann { beta: 10.0 },
        ..Default::default()
    };
    let mut detail = String::new();
    let mut pass = true;
    for (d, delta) in [0.2, 0.6, 1.0].into_iter().enumerate() {
        let instances = cell_instances(16, delta, 20_000 * (d as u64 + 1));
        let opt: Vec<f64> = instances.iter().map(|(_, o)| *o as f64).collect();
        let mut found = Vec::new();
        let mut feasible = 0;
        for (inst, _) in &instances {
            let (profit, ok) = run_admm(inst, &params, &sampler);
            found.push(profit);
            feasible += ok as usize;
        }
        let rate = feasible as f64 / instances.len() as f64;
        let mape = qkp::mape(&opt, &found).unwrap();
        detail.push_str(&format!(
            "delta {delta}: mape {mape:.4}, feasible {rate:.2}; "
        ));
        pass &= rate == 1.0;
        if delta == 1.0 {
            pass &= mape <= 0.05;
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    detail.push_str(&format!("total {elapsed:.0}s"));
    pass &= elapsed < 600.0;
    report(
        "SA sampler + boltzmann-10 postprocess (n=16, mape<=0.05 at delta=1, all feasible, <10min)",
        pass,
        &detail,
    );
}

#[test]
fn criterion_3_denser_instances_are_not_harder() {
    let sampler = SaSampler::new(SaParams::default());
    let mut cell_mape = [0.0f64; 2];
    for (d, delta) in [0.2, 1.0].into_iter().enumerate() {
        let instances = cell_instances(16, delta, 30_000 * (d as u64 + 1));
        let mut opt = Vec::new();
        let mut found = Vec::new();
        for seed in 0..3u64 {
            let params = AdmmParams {
                seed: 900 + seed * 7919,
                postprocess: PostprocessMode::Boltzmann { beta: 10.0 },
                ..Default::default()
            };
            for (inst, o) in &instances {
                opt.push(*o as f64);
                found.push(run_admm(inst, &params, &sampler).0);
            }
        }
        cell_mape[d] = qkp::mape(&opt, &found).unwrap();
    }
    let pass = cell_mape[1] <= cell_mape[0] + 0.02;
    report(
        "density trend (10 instances x 3 seeds, mape(1.0) <= mape(0.2) + 0.02)",
        pass,
        &format!(
            "mape at delta 0.2: {:.4}, at delta 1.0: {:.4}",
            cell_mape[0], cell_mape[1]
        ),
    );
}

#[test]
fn criterion_4_step_qubo_matches_the_augmented_cost_exhaustively() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce55);
    let mut unif = |lo: f64, hi: f64| {
        lo + (hi - lo) * ((rng.next_u64() >> 11) as f64) * (1.0 / (1u64 << 53) as f64)
    };
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let n = 3 + (case % 8); // 3..=10
        let mut objective = QuboMatrix::zero(n);
        for i in 0..n {
            for j in i..n {
                if unif(0.0, 1.0) < 0.5 {
                    objective.add_term(i, j, unif(-4.0, 4.0)).unwrap();
                }
            }
        }
        objective.add_offset(unif(-1.0, 1.0));
        let m = 1 + (case % 3);
        let ineqs: Vec<LinearConstraint> = (0..m)
            .map(|_| {
                let coeffs: Vec<i64> = (0..n).map(|_| unif(-6.0, 9.0) as i64).collect();
                LinearConstraint::inequality_le(coeffs, unif(-4.0, 12.0) as i64)
            })
            .collect();
        let gamma = unif(1.0, 100.0);
        let p = ConstrainedProblem::with_gamma(objective.clone(), vec![], ineqs.clone(), gamma)
            .unwrap();
        let z: Vec<f64> = (0..m).map(|_| unif(-5.0, 5.0)).collect();
        let lambda: Vec<f64> = (0..m).map(|_| unif(-2.0, 2.0)).collect();
        let rho = unif(0.01, 2.0);
        let q = build_step_qubo(&p, &z, &lambda, rho).unwrap();
        let theta: f64 = gamma * z.iter().filter(|&&zm| zm > 0.0).count() as f64;

        for mask in 0u64..(1 << n) {
            let x = BitVector::from_mask(mask, n);
            let mut direct = objective.energy(&x).unwrap() + theta;
            for (k, c) in ineqs.iter().enumerate() {
                let d = c.residual(&x) as f64 - z[k];
                direct += lambda[k] * d + rho / 2.0 * d * d;
            }
            let via_qubo = q.energy(&x).unwrap() + theta;
            worst = worst.max((via_qubo - direct).abs());
        }
    }
    report(
        "augmented-cost faithfulness (100 problems, n<=10, exhaustive, 1e-9)",
        worst <= 1e-9,
        &format!("worst absolute gap {worst:.2e}"),
    );
}

#[test]
fn criterion_5_update_rule_invariants_over_randomized_iterations() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed5);
    let mut draw = move |range: u64| -> u64 {
        // Fresh word per call; range is tiny so modulo bias is irrelevant.
        rng.next_u64() % range
    };

    // (i) and (ii): z sign and multiplier stationarity over raw update steps.
    let mut steps = 0u32;
    for _ in 0..1200 {
        let n = 2 + draw(8) as usize;
        let coeffs: Vec<i64> = (0..n).map(|_| draw(17) as i64 - 8).collect();
        let bound = draw(21) as i64 - 10;
        let ineqs = vec![LinearConstraint::inequality_le(coeffs, bound)];
        let x = BitVector::from_mask(draw(1 << n as u64), n);
        let lambda0 = vec![draw(100) as f64 / 10.0 - 5.0];
        let z = update_z(&x, &ineqs);
        assert!(z[0] <= 0.0, "z must stay non-positive");
        let lambda = update_lambda(&lambda0, 0.1, &x, &z, &ineqs);
        if ineqs[0].residual(&x) <= 0 {
            assert_eq!(
                lambda[0], lambda0[0],
                "feasible x_cost must leave lambda fixed"
            );
        }
        steps += 1;
    }

    // (iii): incumbent merit is non-increasing across every solve history.
    let sampler = SaSampler::new(SaParams {
        num_reads: 20,
        sweeps: 5,
        ..Default::default()
    });
    let mut iterations = 0usize;
    let mut case = 0u64;
    while iterations < 1000 {
        assert!(case < 500, "randomized solves yield too few iterations");
        let n = 5 + (case % 4) as usize;
        let inst = qkp::generate(n, 0.6, 77_000 + case);
        let p = qkp::to_problem(&inst);
        let params = AdmmParams {
            t_max: 15,
            t_conv: 15,
            epsilon: 1e-12, // keep the loop running to collect history
            seed: case,
            ..Default::default()
        };
        let result = solve(&p, &params, &sampler).unwrap();
        iterations += result.iterations;
        let merits: Vec<f64> = result
            .history
            .iter()
            .filter_map(|r| r.incumbent_e_ineq)
            .collect();
        for w in merits.windows(2) {
            assert!(w[1] <= w[0], "incumbent merit rose within a solve");
        }
        case += 1;
    }
    report(
        "update-rule invariants (z<=0, stationary lambda, monotone incumbent, >=1000 iterations)",
        steps >= 1000 && iterations >= 1000,
        &format!("{steps} update steps, {iterations} solve iterations checked"),
    );
}

#[test]
fn criterion_6_slack_baseline_cost_and_equivalence() {
    // Variable-count law on ten n = 16 instances.
    let mut count_ok = true;
    let mut extra_bits_total = 0usize;
    for k in 0..10u64 {
        let inst = qkp::generate(16, 0.6, 60_000 + 1000 * k);
        let p = qkp::to_problem(&inst);
        let enc = p.slack_encode(1.0).unwrap();
        // Independent recount: all weights positive, so R = capacity.
        let r = inst.capacity;
        let expected_bits = if r > 0 {
            (64 - r.leading_zeros()) as usize
        } else {
            0
        };
        count_ok &= enc.total_vars() == 16 + expected_bits;
        count_ok &= enc.slack_bits == vec![expected_bits];
        if r >= 1 {
            count_ok &= enc.total_vars() > 16;
        }
        extra_bits_total += expected_bits;
    }

    // Optimum recovery by enumerating the slack-encoded QUBO at n <= 10.
    let mut recover_ok = true;
    for (n, seed) in [(8usize, 61_001u64), (9, 61_002), (10, 61_003)] {
        let (inst, _) = qkp::generate_nondegenerate(n, 0.8, seed).unwrap();
        let (_, opt) = qkp::brute_force_opt(&inst).unwrap();
        let p = qkp::to_problem(&inst);
        let profit_range: i64 = inst.profits.iter().map(|&(_, _, v)| v).sum();
        let enc = p.slack_encode((profit_range + 1) as f64).unwrap();
        let s = brute_force_sample(enc.problem.objective()).unwrap();
        let best = &s.records()[0].x;
        let restricted = BitVector::from_bits(best.bits()[..n].to_vec()).unwrap();
        recover_ok &= inst.load(&restricted) <= inst.capacity;
        recover_ok &= inst.profit(&restricted) == opt;
    }
    report(
        "slack baseline (exact bit counts; enumeration over slack QUBO recovers optima)",
        count_ok && recover_ok,
        &format!(
            "mean extra bits per n=16 instance: {:.1}",
            extra_bits_total as f64 / 10.0
        ),
    );
}

#[test]
fn criterion_7_sampler_fidelity() {
    // (a) Gibbs postprocessing vs the exact Boltzmann distribution on a
    // fixed suite of 2-variable QUBOs.
    let mut rng = ChaCha8Rng::seed_from_u64(0x7_f1de);
    let mut worst_tv: f64 = 0.0;
    for case in 0..20u64 {
        let mut q = QuboMatrix::zero(2);
        for (i, j) in [(0, 0), (1, 1), (0, 1)] {
            let v = (rng.next_u64() % 17) as f64 / 2.0 - 4.0;
            if v != 0.0 {
                q.add_term(i, j, v).unwrap();
            }
        }
        let beta = 1.0;
        let scale = q.max_abs_term().max(1.0);
        let input = simulated_annealing_sample(
            &q,
            &SaParams {
                num_reads: 4000,
                sweeps: 10,
                seed: case,
                ..Default::default()
            },
        )
        .unwrap();
        let out = boltzmann_postprocess(&q, &input, beta, 80).unwrap();

        let weights: Vec<f64> = (0..4)
            .map(|m| {
                let e = q.energy(&BitVector::from_mask(m, 2)).unwrap();
                (-beta * e / scale).exp()
            })
            .collect();
        let z: f64 = weights.iter().sum();
        let mut tv = 0.0;
        for m in 0..4u64 {
            let x = BitVector::from_mask(m, 2);
            let empirical = out
                .records()
                .iter()
                .find(|r| r.x == x)
                .map_or(0.0, |r| r.occurrences as f64)
                / out.total_reads() as f64;
            tv += (empirical - weights[m as usize] / z).abs();
        }
        worst_tv = worst_tv.max(tv / 2.0);
    }

    // (b) SA hit rate against the enumerated optimum on a 12-variable QUBO.
    let mut q = QuboMatrix::zero(12);
    let mut state = 0xc0ffee_u64;
    let mut next = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((state >> 33) as i64 % 9 - 4) as f64
    };
    for i in 0..12 {
        for j in i..12 {
            let v = next();
            if v != 0.0 {
                q.add_term(i, j, v).unwrap();
            }
        }
    }
    let exact_min = brute_force_sample(&q).unwrap().records()[0].energy;
    let mut hits = 0;
    for trial in 0..100u64 {
        let s = simulated_annealing_sample(
            &q,
            &SaParams {
                seed: trial * 7919,
                ..Default::default()
            },
        )
        .unwrap();
        hits += (s.records()[0].energy == exact_min) as u32;
    }

    report(
        "sampler fidelity (gibbs TV <= 0.05 on 2-var suite; SA >= 95/100 hits at n=12)",
        worst_tv <= 0.05 && hits >= 95,
        &format!("worst TV {worst_tv:.3}, SA hits {hits}/100"),
    );
}

#[test]
fn criterion_8_timing_structure_of_the_loop() {
    // The hardware numbers this artifact replaces are out of reach by
    // design; what must survive the sampler swap is the shape of the time
    // budget: sampling dominates, and the per-solve bookkeeping (QUBO
    // construction, selection, updates) grows with n. No absolute times are
    // asserted.
    let sampler = SaSampler::new(SaParams::default());
    let params = AdmmParams {
        postprocess: PostprocessMode::Boltzmann { beta: 10.0 },
        t_max: 8,
        t_conv: 8,
        epsilon: 1e-12, // fixed iteration count: timings comparable across n
        ..Default::default()
    };
    let mut rows = Vec::new();
    for n in [8usize, 16, 24] {
        let inst = qkp::generate(n, 1.0, 88_000 + n as u64);
        let p = qkp::to_problem(&inst);
        let result = solve(&p, &params, &sampler).unwrap();
        rows.push((n, result.iterations, result.timings));
    }
    let mut pass = true;
    let mut detail = String::new();
    let mut per_iter = Vec::new();
    for (n, iterations, t) in &rows {
        let frac = t.sampler.as_secs_f64() / t.total.as_secs_f64();
        let bookkeeping = t.bookkeeping.as_secs_f64() / *iterations as f64;
        detail.push_str(&format!(
            "n={n}: total {:.2}s over {iterations} iters, sampler {:.0}%, postprocess {:.1}ms/iter, bookkeeping {:.3}ms/iter; ",
            t.total.as_secs_f64(),
            100.0 * frac,
            1e3 * t.postprocess.as_secs_f64() / *iterations as f64,
            1e3 * bookkeeping,
        ));
        pass &= frac > 0.5;
        pass &= t.postprocess.as_secs_f64() > 0.0;
        per_iter.push(bookkeeping);
    }
    // Iteration counts differ across n (stops are data-dependent), so the
    // growth claim is per iteration of the loop.
    for w in per_iter.windows(2) {
        pass &= w[1] > w[0];
    }
    report(
        "timing structure (sampler dominates; bookkeeping grows with n; no absolute bounds)",
        pass,
        detail.trim_end_matches("; "),
    );
}
