//! Exact-zero support structure: zero-chain checks across every instance
//! family, the support-growth law for zero-respecting runs started at 0,
//! and orthogonal equivariance of gradient descent.

mod common;

use chainbound::instances::{
    BaseChain, ChainParams, DistanceBoundedInstance, FirstOrder, GeometricChainParams, Instance,
    ScaledInstance,
};
use chainbound::optimizers::{agd_strongly_convex, gradient_descent, IterateTrace, RunOptions};
use chainbound::rng::Rng;
use chainbound::verifiers::check_zero_chain;

fn families() -> Vec<(&'static str, Instance<f64>)> {
    let convex = ChainParams::convex(24, 0.5).unwrap();
    let nonconvex = ChainParams::nonconvex(24, 0.04, 2.0).unwrap();
    let scaled = ScaledInstance::new(BaseChain::Nonconvex(nonconvex), 0.7, 1.4).unwrap();
    let distance = DistanceBoundedInstance::new(
        ScaledInstance::new(BaseChain::Nonconvex(nonconvex), 0.7, 1.4).unwrap(),
        0.3,
        1.0,
    )
    .unwrap();
    let geometric = GeometricChainParams::new(24, 0.8, 1.1, 0.5).unwrap();
    vec![
        ("convex-chain", Instance::ConvexChain(convex)),
        ("nonconvex-chain", Instance::NonconvexChain(nonconvex)),
        ("scaled-nonconvex", Instance::Scaled(scaled)),
        ("distance-bounded", Instance::DistanceBounded(distance)),
        ("geometric-chain", Instance::GeometricChain(geometric)),
    ]
}

#[test]
fn every_family_is_a_first_order_zero_chain() {
    let mut rng = Rng::new(99);
    for (name, inst) in families() {
        let report = check_zero_chain(&inst, name, 128, &mut rng);
        assert!(report.passed, "{name}: {report:?}");
        assert_eq!(report.measured, 0.0, "{name} leaked a nonzero coordinate");
    }
}

/// supp(x^(t)) must stay inside the union of earlier gradient supports.
fn assert_zero_respecting(trace: &IterateTrace<f64>, label: &str) {
    let mut seen = vec![false; trace.queries[0].point.len()];
    for q in &trace.queries {
        for (j, &xj) in q.point.iter().enumerate() {
            if xj != 0.0 {
                assert!(
                    seen[j],
                    "{label}: query {} touches coordinate {} before any gradient revealed it",
                    q.index, j
                );
            }
        }
        for (slot, &gj) in seen.iter_mut().zip(&q.gradient) {
            if gj != 0.0 {
                *slot = true;
            }
        }
    }
}

/// On a zero-chain from x0 = 0, query t has literal zeros at 1-based
/// coordinates j >= t.
fn assert_support_prefix(trace: &IterateTrace<f64>, label: &str) {
    for q in &trace.queries {
        for (j0, &xj) in q.point.iter().enumerate() {
            if j0 + 1 >= q.index {
                assert_eq!(
                    xj,
                    0.0,
                    "{label}: query {} has nonzero coordinate {} (1-based {})",
                    q.index,
                    j0,
                    j0 + 1
                );
            }
        }
    }
}

#[test]
fn gd_and_agd_are_zero_respecting_on_chains() {
    for (name, inst) in families() {
        let dim = inst.dim();
        let x0 = vec![0.0; dim];
        let opts = RunOptions::to_budget(dim + 5).recorded();
        let gd = gradient_descent(&inst, 0.05, &x0, opts).unwrap();
        assert_zero_respecting(&gd, &format!("gd/{name}"));
        assert_support_prefix(&gd, &format!("gd/{name}"));

        let agd = agd_strongly_convex(&inst, 0.04, 40.0, &x0, opts).unwrap();
        assert_zero_respecting(&agd, &format!("agd/{name}"));
        assert_support_prefix(&agd, &format!("agd/{name}"));
    }
}

#[test]
fn accumulated_support_grows_one_coordinate_per_query() {
    let inst = Instance::ConvexChain(ChainParams::convex(40, 1.0).unwrap());
    let trace = gradient_descent(
        &inst,
        0.25,
        &vec![0.0; 40],
        RunOptions::to_budget(30).recorded(),
    )
    .unwrap();
    for (i, support) in trace.supports.iter().enumerate() {
        assert!(
            support.len() <= i + 1,
            "support {support:?} after query {}",
            i + 1
        );
    }
}

struct Rotated<'a> {
    base: &'a Instance<f64>,
    u: Vec<Vec<f64>>,
}

impl FirstOrder<f64> for Rotated<'_> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn value_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
        // f_U(x) = f(U^T x), grad f_U(x) = U grad f(U^T x)
        let inner = common::matvec_t(&self.u, x);
        let (v, g) = FirstOrder::value_grad(self.base, &inner);
        (v, common::matvec(&self.u, &g))
    }
}

#[test]
fn gd_trace_is_orthogonally_equivariant() {
    let dim = 7;
    let base = Instance::NonconvexChain(ChainParams::nonconvex(dim - 1, 0.25, 1.0).unwrap());
    let mut rng = Rng::new(5);
    let u = common::random_orthogonal(dim, &mut rng);
    let rotated = Rotated {
        base: &base,
        u: u.clone(),
    };

    let opts = RunOptions::to_budget(60).recorded();
    let plain = gradient_descent(&base, 0.02, &vec![0.0; dim], opts).unwrap();
    let turned = gradient_descent(&rotated, 0.02, &vec![0.0; dim], opts).unwrap();

    for (a, b) in plain.queries.iter().zip(&turned.queries) {
        let mapped = common::matvec(&u, &a.point);
        let diff: f64 = mapped
            .iter()
            .zip(&b.point)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        let scale = mapped.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
        assert!(
            diff / scale < 1e-9,
            "query {}: rotated trace deviates by {diff}",
            a.index
        );
    }
}
