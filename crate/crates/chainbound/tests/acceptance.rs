//! Acceptance suite: one test per criterion, each printing a pass line on
//! completion. Run with `cargo test --test acceptance -- --nocapture` to see
//! the per-criterion lines; tolerances are pinned in the assertions.

mod common;

use chainbound::harness::{membership_reports, SlopeFit};
use chainbound::instances::{
    BaseChain, ChainParams, DistanceBoundedInstance, FirstOrder, GeometricChainParams, Instance,
    ScaledInstance,
};
use chainbound::numdiff;
use chainbound::optimizers::{
    agd_strongly_convex, gradient_descent, prox_agd, prox_agd_bound, run_until_stationary,
    AlgorithmSpec, RunOptions,
};
use chainbound::rng::Rng;
use chainbound::scalar::norm;
use chainbound::scaling::{
    plan, plan_convex_distance, plan_convex_value, plan_distance_bounded, predicted_lower_bound,
    PlanFamily, ProblemClassSpec, SmoothnessConstants,
};
use chainbound::upsilon::{grad_cap_on_unit, upsilon_value, UpsilonParams};
use chainbound::verifiers::{
    check_zero_chain, convex_floor_bound, convex_min_grad_dense, convex_min_grad_exact,
    disc_tight_point, nonconvex_grad_floor_search, suboptimality_resistance_demo,
};

/// Criterion 1: on x in [-3, 3] (step 1e-3) and r in {1, 2, 10, 100}:
/// Upsilon' < -1 on [0.1, 0.9] and (-inf, -0.1], Upsilon >= 0 with its zero
/// at x = 1, Upsilon(0) <= 10, and closed form vs quadrature <= 1e-9.
#[test]
fn criterion_1_upsilon_property_suite() {
    for r in [1.0, 2.0, 10.0, 100.0] {
        let params = UpsilonParams::new(r).unwrap();
        assert_eq!(
            upsilon_value(1.0, &params),
            0.0,
            "minimum not exactly 0 at x=1, r={r}"
        );
        assert!(upsilon_value(0.0, &params) <= 10.0, "Upsilon_{r}(0) > 10");
        for k in 0..=6000i64 {
            let x = (k - 3000) as f64 / 1000.0;
            let v = upsilon_value(x, &params);
            assert!(v >= 0.0, "Upsilon_{r}({x}) = {v} < 0");
            let d = chainbound::upsilon::upsilon_deriv(x, &params, 1).unwrap();
            if (0.1..=0.9).contains(&x) || x <= -0.1 {
                assert!(d < -1.0, "Upsilon_{r}'({x}) = {d} >= -1");
            }
            // closed form against the defining integral
            let quad = common::upsilon_by_quadrature(x, r);
            let scale = v.abs().max(1e-6);
            assert!(
                (v - quad).abs() / scale <= 1e-9,
                "r={r}, x={x}: closed {v} vs quadrature {quad}"
            );
        }
    }
    println!("criterion 1 (upsilon property suite): PASS");
}

/// Criterion 2: for T in {2, 5, 20, 100}, alpha in {1, 1/T}: exact floor
/// matches the dense least-squares oracle to 1e-10 relative and strictly
/// exceeds (T - 1 + 1/alpha)^{-3/2}.
#[test]
fn criterion_2_convex_gradient_floor() {
    for t in [2usize, 5, 20, 100] {
        for alpha in [1.0, 1.0 / t as f64] {
            let exact = convex_min_grad_exact(t, alpha).unwrap();
            let dense = convex_min_grad_dense(t, alpha).unwrap();
            let rel = (exact - dense).abs() / exact;
            assert!(rel <= 1e-10, "T={t}, alpha={alpha}: rel err {rel}");
            let bound = convex_floor_bound(t, alpha);
            assert!(exact > bound, "T={t}, alpha={alpha}: {exact} <= {bound}");
        }
    }
    println!("criterion 2 (convex gradient floor): PASS");
}

/// Criterion 3: for (T, mu, r) in {50, 200} x {0.25, 0.04, 0.01} x {1, 10}:
/// the multi-start measured minimum of ||grad fbar_T|| over
/// {x_T = x_{T+1} = 0} and the explicit tight point both land in
/// [mu^{3/4}/4 - 1e-6, (27 + sqrt(3) G) mu^{3/4}].
#[test]
fn criterion_3_nonconvex_gradient_sandwich() {
    for t in [50usize, 200] {
        for mu in [0.25f64, 0.04, 0.01] {
            for r in [1.0, 10.0] {
                let floor = mu.powf(0.75) / 4.0 - 1e-6;
                let params = ChainParams::nonconvex(t, mu, r).unwrap();
                let cap =
                    (27.0 + 3.0f64.sqrt() * grad_cap_on_unit(&params.upsilon())) * mu.powf(0.75);
                let search = nonconvex_grad_floor_search(t, mu, r, 6, 2024).unwrap();
                assert!(
                    search.measured >= floor && search.measured <= cap,
                    "search T={t} mu={mu} r={r}: {} not in [{floor}, {cap}]",
                    search.measured
                );
                let (_, tight) = disc_tight_point(t, mu, r).unwrap();
                assert!(
                    tight >= floor && tight <= cap,
                    "tight point T={t} mu={mu} r={r}: {tight} not in [{floor}, {cap}]"
                );
                // the explicit construction can only sit above the search min
                assert!(tight + 1e-9 >= search.measured);
            }
        }
    }
    println!("criterion 3 (nonconvex gradient sandwich): PASS");
}

/// Criterion 4: exact-zero support checks on all instance families; GD and
/// AGD from 0 obey the one-coordinate-per-query law bit-exactly at T = 100.
#[test]
fn criterion_4_zero_chain_zero_respecting() {
    let mut rng = Rng::new(404);
    let convex = ChainParams::convex(100, 1.0).unwrap();
    let nonconvex = ChainParams::nonconvex(100, 0.04, 1.0).unwrap();
    let families: Vec<(&str, Instance<f64>)> = vec![
        ("convex", Instance::ConvexChain(convex)),
        ("nonconvex", Instance::NonconvexChain(nonconvex)),
        (
            "distance-bounded",
            Instance::DistanceBounded(
                DistanceBoundedInstance::new(
                    ScaledInstance::new(BaseChain::Nonconvex(nonconvex), 0.5, 1.5).unwrap(),
                    0.25,
                    1.0,
                )
                .unwrap(),
            ),
        ),
        (
            "geometric",
            Instance::GeometricChain(GeometricChainParams::new(100, 0.8, 1.1, 0.5).unwrap()),
        ),
    ];
    for (name, inst) in &families {
        let report = check_zero_chain(inst, *name, 128, &mut rng);
        assert!(report.passed, "{name}: {report:?}");
    }

    for (name, inst) in &families[..2] {
        let dim = inst.dim();
        let opts = RunOptions::to_budget(dim).recorded();
        let gd = gradient_descent(inst, 0.05, &vec![0.0; dim], opts).unwrap();
        let agd = agd_strongly_convex(inst, 0.04, 40.0, &vec![0.0; dim], opts).unwrap();
        for trace in [&gd, &agd] {
            for q in &trace.queries {
                for (j0, &xj) in q.point.iter().enumerate() {
                    if j0 + 1 >= q.index {
                        assert_eq!(
                            xj,
                            0.0,
                            "{name}: query {} nonzero at 1-based coordinate {}",
                            q.index,
                            j0 + 1
                        );
                    }
                }
            }
        }
    }
    println!("criterion 4 (zero-chain / zero-respecting suite): PASS");
}

/// Criterion 5: lower-bound validity at desk scale. Convex family: GD and
/// prox-AGD dominate the prediction on every row and the predicted slope is
/// 1.00 +- 0.01. p = 2 family: GD dominates, predicted slope 12/7 +- 0.01.
/// General family (p = 3): predicted slope 8/5 +- 0.01.
#[test]
fn criterion_5_lower_bound_validity() {
    // convex family, delta = 1, L1 = 4
    let convex_grid = [0.04, 0.02, 0.01, 0.005];
    let mut predicted = Vec::new();
    for &eps in &convex_grid {
        let spec = ProblemClassSpec::with_delta(1, 1.0, vec![4.0], eps).unwrap();
        let plan = plan_convex_value(&spec).unwrap();
        let inst = plan.instance().unwrap();
        let gd = run_until_stationary(
            &AlgorithmSpec::Gd { step: 0.25 },
            &inst,
            eps,
            10_000_000,
            false,
        )
        .unwrap();
        let pa = run_until_stationary(
            &AlgorithmSpec::ProxAgd { delta: 1.0, l: 4.0 },
            &inst,
            eps,
            10_000_000,
            false,
        )
        .unwrap();
        let t_gd = gd.t_eps.expect("GD terminated") as f64;
        let t_pa = pa.t_eps.expect("prox-AGD terminated") as f64;
        assert!(
            t_gd > plan.predicted_t,
            "eps {eps}: GD {t_gd} <= {}",
            plan.predicted_t
        );
        assert!(
            t_pa > plan.predicted_t,
            "eps {eps}: prox-AGD {t_pa} <= {}",
            plan.predicted_t
        );
        predicted.push(plan.predicted_t);
    }
    let fit = SlopeFit::over_grid(&convex_grid, &predicted).unwrap();
    assert!(
        (fit.slope - 1.0).abs() <= 0.01,
        "convex predicted slope {}",
        fit.slope
    );

    // p = 2 family, L1 = L2 = 1, delta = 1; empirical constants
    let p2_grid = [0.05, 0.025, 0.0125, 0.00625];
    let mut predicted = Vec::new();
    for &eps in &p2_grid {
        let spec = ProblemClassSpec::with_delta(2, 1.0, vec![1.0, 1.0], eps).unwrap();
        let p = plan(PlanFamily::NonconvexP2, &spec).unwrap();
        let inst = p.instance().unwrap();
        let gd = run_until_stationary(
            &AlgorithmSpec::Gd { step: 1.0 },
            &inst,
            eps,
            10_000_000,
            false,
        )
        .unwrap();
        let t_gd = gd.t_eps.expect("GD terminated") as f64;
        assert!(
            t_gd > p.predicted_t,
            "eps {eps}: GD {t_gd} <= {}",
            p.predicted_t
        );
        predicted.push(p.predicted_t);
    }
    let fit = SlopeFit::over_grid(&p2_grid, &predicted).unwrap();
    let twelve_sevenths = 12.0 / 7.0;
    assert!(
        (fit.slope - twelve_sevenths).abs() <= 0.01,
        "p2 predicted slope {} vs {twelve_sevenths}",
        fit.slope
    );

    // general family, p = 3, all constants 1: predicted slope only
    let consts = SmoothnessConstants::empirical(&[1.0f64, 1.0, 1.0]).unwrap();
    let mut points = Vec::new();
    for &eps in &p2_grid {
        let spec = ProblemClassSpec::with_delta(3, 1.0, vec![1.0; 3], eps).unwrap();
        let v = predicted_lower_bound(&spec, &consts, PlanFamily::NonconvexGeneral).unwrap();
        points.push(((1.0 / eps).ln(), v.ln()));
    }
    let fit = SlopeFit::fit(&points).unwrap();
    assert!(
        (fit.slope - 1.6).abs() <= 0.01,
        "general predicted slope {}",
        fit.slope
    );

    println!("criterion 5 (lower-bound validity at desk scale): PASS");
}

/// Criterion 6: prox-AGD on the scaled convex chain (delta = 1, L = 4)
/// terminates within 1 + 5 sqrt(L delta)/eps log_+(25 L delta / eps^2)
/// oracle calls for eps in {0.1, 0.05, 0.02}.
#[test]
fn criterion_6_prox_agd_upper_bound() {
    for eps in [0.1f64, 0.05, 0.02] {
        let spec = ProblemClassSpec::with_delta(1, 1.0, vec![4.0], eps).unwrap();
        let inst = plan_convex_value(&spec).unwrap().instance().unwrap();
        let bound = prox_agd_bound(4.0, 1.0, eps);
        let trace = prox_agd(&inst, 1.0, 4.0, eps, 10_000_000, false).unwrap();
        let t = trace.t_eps.unwrap() as f64;
        assert!(t <= bound, "eps {eps}: {t} oracle calls > bound {bound}");
    }
    println!("criterion 6 (prox-AGD upper bound): PASS");
}

/// Criterion 7: geometric chain with delta = 1, L1 = 4, eps = 0.25, T = 30:
/// GD from 0 reaches no eps-suboptimal iterate within 30 steps.
#[test]
fn criterion_7_suboptimality_resistance() {
    let report =
        suboptimality_resistance_demo(4.0, 1.0, 0.25, 30, &AlgorithmSpec::Gd { step: 0.25 }, 64)
            .unwrap();
    assert!(report.passed, "{report:?}");
    println!("criterion 7 (suboptimality resistance): PASS");
}

/// Criterion 8: every emitted plan's sampled Lipschitz estimates stay below
/// the class constants for q in {1, 2}, the value gap stays below delta (or
/// the minimizer norm below D, including the negative bump probe).
#[test]
fn criterion_8_membership_soundness() {
    let mut plans = vec![
        plan_convex_value(&ProblemClassSpec::with_delta(1, 1.0, vec![4.0], 0.01).unwrap()).unwrap(),
        plan_convex_distance(&ProblemClassSpec::with_distance(1, 1.0, vec![4.0], 0.01).unwrap())
            .unwrap(),
        plan(
            PlanFamily::NonconvexP2,
            &ProblemClassSpec::with_delta(2, 1.0, vec![1.0, 1.0], 0.01).unwrap(),
        )
        .unwrap(),
        plan(
            PlanFamily::NonconvexGeneral,
            &ProblemClassSpec::with_delta(3, 1.0, vec![1.0; 3], 0.01).unwrap(),
        )
        .unwrap(),
    ];
    // a desk-scale non-convex plan that does not fall back: small enough eps
    // that the chain's own value gap fits inside delta
    let nc = plan(
        PlanFamily::NonconvexP2,
        &ProblemClassSpec::with_delta(2, 1.0, vec![1.0, 1.0], 1e-4).unwrap(),
    )
    .unwrap();
    assert!(
        !nc.fell_back,
        "expected an honest non-convex plan at eps = 1e-4"
    );
    plans.push(nc);
    // distance-bounded family
    let spec = ProblemClassSpec::with_distance(2, 1.0, vec![1.0, 1.0], 1e-8).unwrap();
    let halved_consts = SmoothnessConstants::empirical(&spec.halved().lipschitz).unwrap();
    let (dist_plan, _) = plan_distance_bounded(&spec, &halved_consts).unwrap();
    plans.push(dist_plan);

    for p in &plans {
        let reports = membership_reports(p, 64, 8).unwrap();
        for r in &reports {
            assert!(
                r.passed,
                "{} [{}]: measured {} vs bound {}",
                r.claim,
                p.family.as_str(),
                r.measured,
                r.bound
            );
        }
    }
    println!("criterion 8 (membership soundness): PASS");
}

/// Criterion 9: analytic gradients match central finite differences to
/// relative error 1e-6 at 100 random points per family.
#[test]
fn criterion_9_gradient_correctness() {
    let nonconvex = ChainParams::nonconvex(12, 0.25, 2.0).unwrap();
    let families: Vec<(&str, Instance<f64>, f64)> = vec![
        (
            "convex",
            Instance::ConvexChain(ChainParams::convex(10, 0.5).unwrap()),
            2.0,
        ),
        ("nonconvex", Instance::NonconvexChain(nonconvex), 2.0),
        (
            "scaled",
            Instance::Scaled(
                ScaledInstance::new(BaseChain::Nonconvex(nonconvex), 0.5, 1.2).unwrap(),
            ),
            2.0,
        ),
        (
            "distance-bounded",
            Instance::DistanceBounded(
                DistanceBoundedInstance::new(
                    ScaledInstance::new(BaseChain::Nonconvex(nonconvex), 0.5, 1.2).unwrap(),
                    0.3,
                    1.0,
                )
                .unwrap(),
            ),
            1.2,
        ),
        (
            "geometric",
            Instance::GeometricChain(GeometricChainParams::new(10, 0.8, 1.1, 0.6).unwrap()),
            2.0,
        ),
    ];
    let mut rng = Rng::new(909);
    for (name, inst, radius) in &families {
        let dim = inst.dim();
        for trial in 0..100 {
            let x: Vec<f64> = if *name == "distance-bounded" && trial % 2 == 0 {
                // half the probes exercise the bump's support region
                let mut x: Vec<f64> = (0..dim).map(|_| rng.range(-0.05, 0.05)).collect();
                x[dim - 1] = 0.8 + rng.range(-0.1, 0.1);
                x
            } else {
                (0..dim).map(|_| rng.range(-radius, *radius)).collect()
            };
            let (_, g) = FirstOrder::value_grad(inst, &x);
            let fd = numdiff::gradient(|y| FirstOrder::value_grad(inst, y).0, &x, 1e-6);
            let diff: f64 = g
                .iter()
                .zip(&fd)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let scale = norm(&g).max(1.0);
            assert!(
                diff / scale <= 1e-6,
                "{name} trial {trial}: gradient deviates by {} at {x:?}",
                diff / scale
            );
        }
    }
    println!("criterion 9 (gradient correctness): PASS");
}
