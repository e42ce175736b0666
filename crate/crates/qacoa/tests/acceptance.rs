//! Acceptance suite: one test per shipping criterion, each printing a
//! single [PASS]/[FAIL] line with the measured numbers. Tolerances are
//! pinned here on purpose; loosening them is a behavior change.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! lines for passing criteria too.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qacoa::chaos::{gle, invariant_density_check, phase_space_lle};
use qacoa::diagnostics::{
    control_noise_moment, cost_landscape_lle_samples, eta_sweep, linear_fit, quantile,
    NOISE_DELTA,
};
use qacoa::runner::{
    aggregate_to_csv, preset, run, InstanceSource, RunConfig, RunRecord, SchemeKind,
    SpsaSettings,
};
use qacoa::sat::{random_instance, Clause, CostDiagonal, SatInstance};
use qacoa::schemes::{angle_jacobian, angles, SchemeSpec};
use qacoa::simulator::{
    evaluate, evaluate_schedule, initial_state, layer_angle_gradient, misassignment_rate,
};
use qacoa::spsa::{optimize, SpsaConfig};

fn pass(id: u32, detail: &str) {
    println!("[PASS] criterion {id:02}: {detail}");
}

fn fail(id: u32, detail: &str) -> String {
    format!("[FAIL] criterion {id:02}: {detail}")
}

/// 1. CostDiagonal equals per-bitstring clause evaluation exactly.
#[test]
fn criterion_01_exact_oracle_equivalence() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    for _ in 0..100 {
        let k = rng.random_range(2..=3usize);
        let n = rng.random_range(k.max(2)..=10usize);
        let alpha = rng.random_range(0.5..4.0);
        let inst = random_instance(n, k, alpha, &mut rng).expect("valid instance");
        let diag = CostDiagonal::build(&inst).expect("diagonal");
        for x in 0..(1usize << n) {
            let direct = inst.violated_count(x);
            assert_eq!(
                diag.energies[x],
                direct,
                "{}",
                fail(1, &format!("energy mismatch at x={x}, N={n}, K={k}"))
            );
        }
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 10.0, "{}", fail(1, "runtime over 10 s"));
    pass(1, &format!("100 instances, dual-route diagonal exact, {dt:.2?}"));
}

/// 2. Adjoint layer-angle gradients and chain-rule seed gradients match
///    central finite differences at step 1e-6 within 1e-5 relative.
#[test]
fn criterion_02_gradient_correctness() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    let h = 1e-6;
    let tol = 1e-5;
    let mut worst: f64 = 0.0;
    for case in 0..50 {
        let k = rng.random_range(2..=3usize);
        let n = rng.random_range(k.max(2)..=6usize);
        let alpha = rng.random_range(0.8..3.5);
        let inst = random_instance(n, k, alpha, &mut rng).expect("valid instance");
        let diag = CostDiagonal::build(&inst).expect("diagonal");
        let p = rng.random_range(1..=5usize);
        let c = rng.random_range(1..=3u64);
        let spec = match case % 4 {
            0 => SchemeSpec::Standard { p },
            1 => SchemeSpec::PureChaotic { p, c },
            2 => SchemeSpec::DelayedHybrid {
                p,
                p_t: rng.random_range(1..=p),
                c,
            },
            _ => SchemeSpec::IteratedHybrid {
                p,
                t: rng.random_range(1..=p),
                c,
            },
        };
        let theta: Vec<f64> = (0..spec.n_theta())
            .map(|_| rng.random_range(0.02..0.98))
            .collect();

        // layer-angle gradients against schedule-level differences
        let sched = angles(&spec, &theta).expect("schedule");
        let (gf, gg) = layer_angle_gradient(&sched, &diag).expect("gradient");
        for m in 0..p {
            for (grads, is_f) in [(&gf, true), (&gg, false)] {
                let mut plus = sched.clone();
                let mut minus = sched.clone();
                if is_f {
                    plus.f[m] += h;
                    minus.f[m] -= h;
                } else {
                    plus.g[m] += h;
                    minus.g[m] -= h;
                }
                let fd = (evaluate_schedule(&plus, &diag).unwrap().f_value
                    - evaluate_schedule(&minus, &diag).unwrap().f_value)
                    / (2.0 * h);
                let rel = (grads[m] - fd).abs() / fd.abs().max(1.0);
                worst = worst.max(rel);
                assert!(
                    rel <= tol,
                    "{}",
                    fail(2, &format!("layer gradient rel err {rel:.2e} at case {case}"))
                );
            }
        }

        // chain-rule gradients against seed-parameter differences
        let jac = angle_jacobian(&spec, &theta).expect("jacobian");
        let grad_theta = jac.pull_back(&gf, &gg);
        for i in 0..theta.len() {
            let mut plus = theta.clone();
            let mut minus = theta.clone();
            plus[i] += h;
            minus[i] -= h;
            let fd = (evaluate(&spec, &plus, &diag).unwrap().f_value
                - evaluate(&spec, &minus, &diag).unwrap().f_value)
                / (2.0 * h);
            let rel = (grad_theta[i] - fd).abs() / fd.abs().max(1.0);
            worst = worst.max(rel);
            assert!(
                rel <= tol,
                "{}",
                fail(2, &format!("chain-rule rel err {rel:.2e} at case {case}, {}", spec.label()))
            );
        }
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 60.0, "{}", fail(2, "runtime over 1 min"));
    pass(2, &format!("50 cases, worst rel err {worst:.2e}, {dt:.2?}"));
}

/// 3. Phase-space LLE at c=100, p=50 concentrates at c ln 2 = 69.31.
#[test]
fn criterion_03_gle_constant() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1003);
    let target = gle(100);
    let mut hits = 0;
    for _ in 0..100 {
        let theta: f64 = rng.random();
        let lle = phase_space_lle(theta, 50, 100).expect("lle");
        if (lle / target - 1.0).abs() <= 0.05 {
            hits += 1;
        }
    }
    let dt = t0.elapsed();
    assert!(hits >= 95, "{}", fail(3, &format!("only {hits}/100 within 5% of {target:.2}")));
    assert!(dt.as_secs_f64() < 5.0, "{}", fail(3, "runtime over 5 s"));
    pass(3, &format!("{hits}/100 samples within 5% of c ln 2 = {target:.2}, {dt:.2?}"));
}

/// 4. Cost-landscape LLE components approach c ln 2 by p = 8 at c=100.
#[test]
fn criterion_04_cost_landscape_lle() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1004);
    // hard-region 3-SAT instance near the critical density
    let inst = random_instance(6, 3, 4.26, &mut rng).expect("valid instance");
    let diag = CostDiagonal::build(&inst).expect("diagonal");
    let target = gle(100);
    let reports = cost_landscape_lle_samples(&diag, 100, 8, 20, 1040).expect("spectra");
    let mut hits = 0;
    for report in &reports {
        let last = report.cost_lle.last().expect("depth 8 present");
        if last
            .iter()
            .all(|&v| v.is_finite() && (v / target - 1.0).abs() <= 0.10)
        {
            hits += 1;
        }
    }
    let dt = t0.elapsed();
    assert!(hits >= 16, "{}", fail(4, &format!("only {hits}/20 theta within 10%")));
    assert!(dt.as_secs_f64() < 120.0, "{}", fail(4, "runtime over 2 min"));
    pass(4, &format!("{hits}/20 theta with both components within 10% of {target:.2}, {dt:.2?}"));
}

/// 5. Median linearizability window decays at the ergodic rate -c ln 2.
#[test]
fn criterion_05_eta_decay() {
    let t0 = Instant::now();
    let depths: Vec<usize> = (2..=8).collect();
    let sweep = eta_sweep(10, &depths, 10_000, 1005).expect("sweep");
    let expected = -gle(10);
    let dev = (sweep.slope / expected - 1.0).abs();
    let dt = t0.elapsed();
    assert!(
        dev <= 0.10,
        "{}",
        fail(5, &format!("slope {:.4} vs {expected:.4}, dev {:.1}%", sweep.slope, dev * 100.0))
    );
    assert!(dt.as_secs_f64() < 30.0, "{}", fail(5, "runtime over 30 s"));
    pass(5, &format!("ln-median slope {:.4} vs -c ln 2 = {expected:.4} ({:.1}% off), {dt:.2?}", sweep.slope, dev * 100.0));
}

/// 6. A long orbit is arcsine distributed.
#[test]
fn criterion_06_invariant_density() {
    let t0 = Instant::now();
    let check = invariant_density_check(1_000_000, 1000, 1006).expect("orbit");
    let dt = t0.elapsed();
    assert!(
        check.ks_statistic < 0.01,
        "{}",
        fail(6, &format!("KS = {:.4}", check.ks_statistic))
    );
    assert!(dt.as_secs_f64() < 5.0, "{}", fail(6, "runtime over 5 s"));
    pass(6, &format!("KS = {:.5} over 1e6 iterates, {dt:.2?}", check.ks_statistic));
}

/// 7. Control-noise moment: exactly zero at p=1 and exponential growth
///    in depth with a clean linear log fit.
#[test]
fn criterion_07_control_noise() {
    let t0 = Instant::now();
    let depths: Vec<usize> = (1..=12).collect();
    let nm = control_noise_moment(1, &depths, NOISE_DELTA, 2000, 1007).expect("moments");
    assert!(nm.all_zero[0], "{}", fail(7, "zeta at p=1 not exactly zero"));
    assert_eq!(nm.mean[0], [0.0, 0.0], "{}", fail(7, "zeta at p=1 not exactly zero"));
    for comp in 0..2 {
        let xs: Vec<f64> = nm.depths[1..].iter().map(|&p| p as f64).collect();
        let ys: Vec<f64> = nm.mean_normalized[1..]
            .iter()
            .map(|m| m[comp].ln())
            .collect();
        let fit = linear_fit(&xs, &ys).expect("fit");
        assert!(
            fit.slope > 0.0 && fit.r_squared >= 0.95,
            "{}",
            fail(7, &format!("component {comp}: slope {:.3}, r^2 {:.3}", fit.slope, fit.r_squared))
        );
        if comp == 0 {
            let dt = t0.elapsed();
            pass(7, &format!(
                "zeta(p=1) = 0 exact; log-mean growth slope {:.3}/layer, r^2 = {:.4}, {dt:.2?}",
                fit.slope, fit.r_squared
            ));
        }
    }
    assert!(t0.elapsed().as_secs_f64() < 60.0, "{}", fail(7, "runtime over 1 min"));
}

/// 8. Zero angles leave the uniform state: F = M 2^-K.
#[test]
fn criterion_08_zero_angle_expectation() {
    let mut rng = ChaCha8Rng::seed_from_u64(1008);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let k = rng.random_range(2..=3usize);
        let n = rng.random_range(k.max(2)..=10usize);
        let alpha = rng.random_range(0.5..4.0);
        let inst = random_instance(n, k, alpha, &mut rng).expect("valid instance");
        let diag = CostDiagonal::build(&inst).expect("diagonal");
        let spec = SchemeSpec::Standard { p: 3 };
        let f = evaluate(&spec, &vec![0.0; spec.n_theta()], &diag)
            .expect("uniform state")
            .f_value;
        let exact = inst.m() as f64 / (1u64 << inst.k) as f64;
        worst = worst.max((f - exact).abs());
    }
    assert!(worst <= 1e-10, "{}", fail(8, &format!("worst |F - M 2^-K| = {worst:.2e}")));
    pass(8, &format!("50 instances, worst |F - M 2^-K| = {worst:.2e}"));
}

/// 9. Misassignment rate: direct sum equals the distance-partition
///    form, and the uniform state with a single optimum gives 1/2.
#[test]
fn criterion_09_misassignment_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(1009);
    let mut worst: f64 = 0.0;
    for _ in 0..30 {
        let k = rng.random_range(2..=3usize);
        let n = rng.random_range(k.max(2)..=8usize);
        let alpha = rng.random_range(0.8..3.5);
        let inst = random_instance(n, k, alpha, &mut rng).expect("valid instance");
        let diag = CostDiagonal::build(&inst).expect("diagonal");
        // random normalized state
        let mut state = initial_state(n);
        let mut norm = 0.0;
        for a in state.amps.iter_mut() {
            *a = num_complex::Complex64::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            norm += a.norm_sqr();
        }
        let scale = norm.sqrt();
        for a in state.amps.iter_mut() {
            *a /= scale;
        }
        let direct = misassignment_rate(&state, &diag);
        // partition form: sum over distance classes of d/N times the
        // probability mass of the class
        let dist = diag.distances_to_solution();
        let max_d = *dist.iter().max().unwrap() as usize;
        let mut partition = 0.0;
        for d in 0..=max_d {
            let mass: f64 = state
                .amps
                .iter()
                .zip(dist)
                .filter(|&(_, &dd)| dd as usize == d)
                .map(|(a, _)| a.norm_sqr())
                .sum();
            partition += d as f64 / n as f64 * mass;
        }
        worst = worst.max((direct - partition).abs());
    }
    assert!(worst <= 1e-12, "{}", fail(9, &format!("worst partition gap {worst:.2e}")));

    // single-solution instance: clauses (x_i) pin every variable true
    let n = 6;
    let clauses: Vec<Clause> = (0..n)
        .map(|v| Clause::new(vec![v], vec![1]).expect("unit clause"))
        .collect();
    let inst = SatInstance::new(n, 1, clauses).expect("single-solution instance");
    let diag = CostDiagonal::build(&inst).expect("diagonal");
    assert_eq!(diag.solutions.len(), 1);
    let uniform = initial_state(n);
    let mis = misassignment_rate(&uniform, &diag);
    assert!(
        (mis - 0.5).abs() <= 1e-12,
        "{}",
        fail(9, &format!("uniform single-solution h/N = {mis}"))
    );
    pass(9, &format!("partition gap <= {worst:.2e}; uniform single-solution h/N = {mis}"));
}

/// 10. Exact scheme reductions: bitwise-equal schedules and
///     matched-seed SPSA traces.
#[test]
fn criterion_10_scheme_reductions() {
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let p = 6;
    for _ in 0..20 {
        let theta: Vec<f64> = (0..2 * p).map(|_| rng.random()).collect();
        let c = rng.random_range(1..=50u64);
        let std_sched = angles(&SchemeSpec::Standard { p }, &theta).unwrap();
        let it1 = angles(&SchemeSpec::IteratedHybrid { p, t: 1, c }, &theta).unwrap();
        assert_eq!(std_sched, it1, "{}", fail(10, "IteratedHybrid(T=1) != Standard"));
        let dh = angles(&SchemeSpec::DelayedHybrid { p, p_t: p, c }, &theta).unwrap();
        assert_eq!(std_sched, dh, "{}", fail(10, "DelayedHybrid(p_t=p) != Standard"));
        let pair = [theta[0], theta[1]];
        let pc1 = angles(&SchemeSpec::PureChaotic { p: 1, c }, &pair).unwrap();
        let std1 = angles(&SchemeSpec::Standard { p: 1 }, &pair).unwrap();
        assert_eq!(pc1, std1, "{}", fail(10, "PureChaotic(p=1) != Standard(p=1)"));
    }

    let inst = random_instance(4, 2, 2.0, &mut rng).expect("valid instance");
    let diag = CostDiagonal::build(&inst).expect("diagonal");
    let cfg = SpsaConfig::new(50, 77);
    let pairs: [(SchemeSpec, SchemeSpec); 3] = [
        (
            SchemeSpec::Standard { p: 3 },
            SchemeSpec::IteratedHybrid { p: 3, t: 1, c: 9 },
        ),
        (
            SchemeSpec::Standard { p: 3 },
            SchemeSpec::DelayedHybrid { p: 3, p_t: 3, c: 9 },
        ),
        (
            SchemeSpec::Standard { p: 1 },
            SchemeSpec::PureChaotic { p: 1, c: 9 },
        ),
    ];
    for (a, b) in &pairs {
        let ta = optimize(a, &diag, &cfg).unwrap().to_json().unwrap();
        let tb = optimize(b, &diag, &cfg).unwrap().to_json().unwrap();
        assert_eq!(ta, tb, "{}", fail(10, &format!("trace mismatch {} vs {}", a.label(), b.label())));
    }
    pass(10, "schedules bitwise equal and matched-seed SPSA traces identical");
}

// shared setup for the two statistical criteria
fn fig2_style_config(p: usize, seed: u64) -> RunConfig {
    RunConfig {
        seed,
        source: InstanceSource::Generate {
            n_vars: 5,
            k: 3,
            alpha: 4.2,
            count: 3,
            seed: None,
        },
        schemes: vec![SchemeKind::Standard, SchemeKind::PureChaotic],
        p: vec![p],
        c: vec![1, 5, 100],
        restarts: 20,
        checkpoints: Some(vec![1000]),
        parallelism: None,
        attach_lle: false,
        spsa: SpsaSettings {
            j_max: 1000,
            ..SpsaSettings::default()
        },
    }
}

fn final_ars<'a>(
    records: &'a [RunRecord],
    instance_id: &str,
    scheme: &str,
    c: u64,
) -> Vec<f64> {
    let mut ars: Vec<f64> = records
        .iter()
        .filter(|r| r.instance_id == instance_id && r.scheme == scheme && r.c == c)
        .map(|r| r.checkpoints.last().expect("final checkpoint").best_ar)
        .collect();
    ars.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite AR"));
    ars
}

/// 11. At p=4 larger map speeds do not lose to c=1, and the chaotic
///     scheme is competitive with the standard one (median inside the
///     standard IQR). Soft criterion: 2 of 3 instances.
#[test]
fn criterion_11_map_speed_ordering() {
    let t0 = Instant::now();
    let cfg = fig2_style_config(4, 2011);
    let out = run(&cfg).expect("sweep");
    assert_eq!(out.n_failed, 0);
    let ids: Vec<String> = {
        let mut v: Vec<String> = out.records.iter().map(|r| r.instance_id.clone()).collect();
        v.sort();
        v.dedup();
        v
    };
    let mut passing = 0;
    let mut notes = Vec::new();
    for id in &ids {
        let med = |c: u64| {
            let ars = final_ars(&out.records, id, "pure-chaotic", c);
            quantile(&ars, 0.5).expect("median")
        };
        let std_ars = final_ars(&out.records, id, "standard", 0);
        let q1 = quantile(&std_ars, 0.25).unwrap();
        let q3 = quantile(&std_ars, 0.75).unwrap();
        let (m1, m5, m100) = (med(1), med(5), med(100));
        let ordering = m5 >= m1 && m100 >= m1;
        let competitive = m100 >= q1 && m100 <= q3;
        if ordering && competitive {
            passing += 1;
        }
        notes.push(format!(
            "{id}: med c1/c5/c100 = {m1:.3}/{m5:.3}/{m100:.3}, std IQR [{q1:.3}, {q3:.3}]{}",
            if ordering && competitive { "" } else { " <-miss" }
        ));
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 1800.0, "{}", fail(11, "runtime over 30 min"));
    assert!(
        passing >= 2,
        "{}",
        fail(11, &format!("{passing}/3 instances; {}", notes.join("; ")))
    );
    pass(11, &format!("{passing}/3 instances ({}), {dt:.2?}", notes.join("; ")));
}

/// 12. At p=20 the standard scheme has overtaken the chaotic one in
///     mean AR at j=1000. Soft criterion: 2 of 3 instances.
///
/// Known failure, kept as pinned rather than tuned to pass. With
/// uniform random starts, the crossover this asserts shows up clearly
/// at p=8..12 with this budget (standard wins 6/6 and 5/6 instances),
/// and at p=20 once the budget reaches roughly 2500 iterations. At
/// exactly p=20 and j=1000, 40-parameter SPSA has not yet pulled ahead
/// of the chaotic schemes, whose best-of-j sampling acts as a strong
/// random-search baseline on 5-variable instances; standard trails by
/// about 0.02 AR across instances and seeds.
#[test]
fn criterion_12_trainability_crossover() {
    let t0 = Instant::now();
    let cfg = fig2_style_config(20, 2012);
    let out = run(&cfg).expect("sweep");
    assert_eq!(out.n_failed, 0);
    let ids: Vec<String> = {
        let mut v: Vec<String> = out.records.iter().map(|r| r.instance_id.clone()).collect();
        v.sort();
        v.dedup();
        v
    };
    let mut passing = 0;
    let mut notes = Vec::new();
    for id in &ids {
        let std_ars = final_ars(&out.records, id, "standard", 0);
        let std_mean = std_ars.iter().sum::<f64>() / std_ars.len() as f64;
        // pooled over all map speeds
        let mut chaotic = Vec::new();
        for c in [1, 5, 100] {
            chaotic.extend(final_ars(&out.records, id, "pure-chaotic", c));
        }
        let cha_mean = chaotic.iter().sum::<f64>() / chaotic.len() as f64;
        if std_mean > cha_mean {
            passing += 1;
        }
        notes.push(format!(
            "{id}: std {std_mean:.3} vs chaotic {cha_mean:.3}{}",
            if std_mean > cha_mean { "" } else { " <-miss" }
        ));
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 1800.0, "{}", fail(12, "runtime over 30 min"));
    assert!(
        passing >= 2,
        "{}",
        fail(12, &format!("{passing}/3 instances; {}", notes.join("; ")))
    );
    pass(12, &format!("{passing}/3 instances ({}), {dt:.2?}", notes.join("; ")));
}

/// 13. Rerunning a preset-shaped config with identical settings gives
///     byte-identical aggregate CSVs, regardless of thread count.
#[test]
fn criterion_13_determinism() {
    // preset scaled down so the criterion runs in seconds; both runs
    // still share one identical config
    let mut cfg = preset("fig2-small").expect("preset");
    cfg.source = InstanceSource::Generate {
        n_vars: 5,
        k: 3,
        alpha: 4.2,
        count: 2,
        seed: None,
    };
    cfg.restarts = 2;
    cfg.p = vec![4];
    cfg.spsa.j_max = 80;
    let a = run(&cfg).expect("first run");
    let b = run(&cfg).expect("second run");
    let mut serial = cfg.clone();
    serial.parallelism = Some(1);
    let c = run(&serial).expect("serial run");
    let csv_a = aggregate_to_csv(&a.aggregate).unwrap();
    let csv_b = aggregate_to_csv(&b.aggregate).unwrap();
    let csv_c = aggregate_to_csv(&c.aggregate).unwrap();
    assert_eq!(csv_a, csv_b, "{}", fail(13, "rerun CSV differs"));
    assert_eq!(csv_a, csv_c, "{}", fail(13, "thread count changed the CSV"));
    let ja = serde_json::to_string(&a.records).unwrap();
    let jc = serde_json::to_string(&c.records).unwrap();
    assert_eq!(ja, jc, "{}", fail(13, "records differ across thread counts"));
    pass(13, &format!("byte-identical aggregates over {} rows, including across thread counts", a.aggregate.len()));
}
