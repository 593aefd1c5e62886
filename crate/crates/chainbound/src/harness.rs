//! Experiment orchestration: configs, plan emission, verification suites,
//! single runs, complexity sweeps with log-log slope fits, and the flat-file
//! outputs (plan.json, trace.csv, report.json, sweep.csv) the CLI writes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::Error;
use crate::instances::{ChainParams, FirstOrder, Instance};
use crate::optimizers::{run_until_stationary, AlgorithmSpec, IterateTrace, TraceSummary};
use crate::rng::Rng;
use crate::scalar::norm;
use crate::scaling::{plan, PlanFamily, ProblemClassSpec, ScalingPlan};
use crate::verifiers::{
    check_zero_chain, convex_floor_bound, convex_min_grad_dense, convex_min_grad_exact,
    disc_tight_point, lipschitz_estimate, nonconvex_grad_floor_search,
    suboptimality_resistance_demo, VerificationReport,
};

/// Parameters for the verification suite.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub t: usize,
    pub mu: f64,
    pub r: f64,
    #[serde(default = "default_trials")]
    pub zero_chain_trials: usize,
    #[serde(default = "default_restarts")]
    pub floor_restarts: usize,
}

fn default_trials() -> usize {
    64
}

fn default_restarts() -> usize {
    6
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            t: 50,
            mu: 0.04,
            r: 1.0,
            zero_chain_trials: default_trials(),
            floor_restarts: default_restarts(),
        }
    }
}

/// One JSON document configures every subcommand; CLI flags override fields.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub family: Option<PlanFamily>,
    /// Problem class; `epsilon` inside it is used by make-instance and run.
    #[serde(default)]
    pub class: Option<ProblemClassSpec<f64>>,
    /// Strictly decreasing positive grid for sweeps.
    #[serde(default)]
    pub epsilon_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub algorithm: Option<AlgorithmSpec>,
    #[serde(default)]
    pub budget: Option<usize>,
    /// Output directory for artifacts; the CLI --out flag overrides it.
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub verify: Option<VerifyConfig>,
}

fn default_seed() -> u64 {
    0
}

fn default_workers() -> usize {
    1
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: default_seed(),
            workers: default_workers(),
            family: None,
            class: None,
            epsilon_grid: None,
            algorithm: None,
            budget: None,
            out_dir: None,
            verify: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::invalid(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if let Some(class) = &self.class {
            class.validate()?;
        }
        if let Some(grid) = &self.epsilon_grid {
            if grid.iter().any(|&e| !(e > 0.0)) {
                return Err(Error::invalid("epsilon grid entries must be positive"));
            }
            if grid.windows(2).any(|w| w[1] >= w[0]) {
                return Err(Error::invalid("epsilon grid must be strictly decreasing"));
            }
        }
        if self.workers == 0 {
            return Err(Error::invalid("workers must be >= 1"));
        }
        Ok(())
    }

    fn family_or_err(&self) -> Result<PlanFamily, Error> {
        self.family
            .ok_or_else(|| Error::invalid("config needs a family"))
    }

    fn class_or_err(&self) -> Result<&ProblemClassSpec<f64>, Error> {
        self.class
            .as_ref()
            .ok_or_else(|| Error::invalid("config needs a problem class"))
    }

    fn spec_at(&self, eps: f64) -> Result<ProblemClassSpec<f64>, Error> {
        let mut spec = self.class_or_err()?.clone();
        spec.epsilon = eps;
        spec.validate()?;
        Ok(spec)
    }
}

/// Budget for one run: the configured budget, else 10x the predicted lower
/// bound (at least 1000), capped at 1e7 oracle calls.
pub fn default_budget(plan: &ScalingPlan<f64>, configured: Option<usize>) -> usize {
    if let Some(b) = configured {
        return b;
    }
    let scale = plan.predicted_t.max(plan.t as f64).ceil() as usize;
    (10 * scale.max(100)).clamp(1000, 10_000_000)
}

/// Default step size 1/L1 for gradient descent on a planned instance.
fn default_algorithm(plan: &ScalingPlan<f64>) -> AlgorithmSpec {
    AlgorithmSpec::Gd {
        step: 1.0 / plan.spec.lipschitz[0],
    }
}

/// Emitted plan document: the plan (with its spec and constants embedded)
/// plus the concrete instance descriptor.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlanDocument {
    pub plan: ScalingPlan<f64>,
    pub instance: Instance<f64>,
}

/// Plan the configured family and serialize plan + instance descriptor.
pub fn cmd_make_instance(config: &ExperimentConfig) -> Result<PlanDocument, Error> {
    let family = config.family_or_err()?;
    let spec = config.class_or_err()?;
    let plan = plan(family, spec)?;
    let instance = plan.instance()?;
    Ok(PlanDocument { plan, instance })
}

/// Straight-line fit of log T against log(1/eps).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// (log(1/eps), log T) pairs that entered the fit.
    pub points: Vec<(f64, f64)>,
}

impl SlopeFit {
    pub fn fit(points: &[(f64, f64)]) -> Result<Self, Error> {
        if points.len() < 3 {
            return Err(Error::invalid("slope fit needs at least 3 points"));
        }
        let n = points.len() as f64;
        let sx: f64 = points.iter().map(|p| p.0).sum();
        let sy: f64 = points.iter().map(|p| p.1).sum();
        let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
        let denom = n * sxx - sx * sx;
        if denom.abs() < 1e-30 {
            return Err(Error::invalid("degenerate abscissae in slope fit"));
        }
        let slope = (n * sxy - sx * sy) / denom;
        let intercept = (sy - slope * sx) / n;
        let mean_y = sy / n;
        let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
        let ss_res: f64 = points
            .iter()
            .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
            .sum();
        let r_squared = if ss_tot > 0.0 {
            1.0 - ss_res / ss_tot
        } else {
            1.0
        };
        Ok(SlopeFit {
            slope,
            intercept,
            r_squared,
            points: points.to_vec(),
        })
    }

    /// Fit measured or predicted counts over an epsilon grid.
    pub fn over_grid(eps: &[f64], counts: &[f64]) -> Result<Self, Error> {
        let points: Vec<(f64, f64)> = eps
            .iter()
            .zip(counts)
            .filter(|(_, &c)| c > 0.0 && c.is_finite())
            .map(|(&e, &c)| ((1.0 / e).ln(), c.ln()))
            .collect();
        Self::fit(&points)
    }
}

/// One sweep row.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub t_predicted: f64,
    pub t_measured: Option<usize>,
    /// "ok", "exhausted", or "error: ..."
    pub status: String,
}

/// Sweep outcome: rows ordered by the epsilon grid plus slope fits.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub predicted_fit: Option<SlopeFit>,
    /// Reported without a pass threshold; upper-bound behavior is
    /// algorithm-dependent.
    pub measured_fit: Option<SlopeFit>,
}

impl SweepOutput {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "epsilon,t_predicted,t_measured,status")?;
        for row in &self.rows {
            let measured = row
                .t_measured
                .map(|t| t.to_string())
                .unwrap_or_else(|| "".to_string());
            writeln!(
                w,
                "{},{},{},{}",
                row.epsilon, row.t_predicted, measured, row.status
            )?;
        }
        Ok(())
    }
}

fn sweep_one(config: &ExperimentConfig, family: PlanFamily, eps: f64) -> SweepRow {
    let spec = match config.spec_at(eps) {
        Ok(s) => s,
        Err(e) => {
            return SweepRow {
                epsilon: eps,
                t_predicted: f64::NAN,
                t_measured: None,
                status: format!("error: {e}"),
            }
        }
    };
    let plan = match plan(family, &spec) {
        Ok(p) => p,
        Err(e) => {
            return SweepRow {
                epsilon: eps,
                t_predicted: f64::NAN,
                t_measured: None,
                status: format!("error: {e}"),
            }
        }
    };
    let instance = match plan.instance() {
        Ok(i) => i,
        Err(e) => {
            return SweepRow {
                epsilon: eps,
                t_predicted: plan.predicted_t,
                t_measured: None,
                status: format!("error: {e}"),
            }
        }
    };
    let algo = config.algorithm.unwrap_or_else(|| default_algorithm(&plan));
    let budget = default_budget(&plan, config.budget);
    match run_until_stationary(&algo, &instance, eps, budget, false) {
        Ok(trace) => match trace.t_eps {
            Some(t) => SweepRow {
                epsilon: eps,
                t_predicted: plan.predicted_t,
                t_measured: Some(t),
                status: "ok".to_string(),
            },
            None => SweepRow {
                epsilon: eps,
                t_predicted: plan.predicted_t,
                t_measured: None,
                status: "exhausted".to_string(),
            },
        },
        Err(e) => SweepRow {
            epsilon: eps,
            t_predicted: plan.predicted_t,
            t_measured: None,
            status: format!("error: {e}"),
        },
    }
}

/// For each epsilon in the grid: plan, run the configured algorithm from 0,
/// record the first stationary query index and the predicted bound; then fit
/// slopes of log T against log(1/eps). Rows run concurrently up to
/// `workers`; output order follows the grid.
pub fn cmd_complexity_sweep(config: &ExperimentConfig) -> Result<SweepOutput, Error> {
    config.validate()?;
    let family = config.family_or_err()?;
    // default grid: four geometric (factor 2) points down to the class
    // epsilon, which keeps the slope fit well conditioned
    let grid = match (&config.epsilon_grid, &config.class) {
        (Some(grid), _) => grid.clone(),
        (None, Some(class)) => (0..4)
            .rev()
            .map(|k| class.epsilon * f64::powi(2.0, k))
            .collect(),
        (None, None) => return Err(Error::invalid("sweep needs an epsilon grid or a class")),
    };
    if grid.len() < 4 {
        return Err(Error::invalid("sweep needs at least 4 epsilon values"));
    }

    let n = grid.len();
    let results: Mutex<Vec<Option<SweepRow>>> = Mutex::new(vec![None; n]);
    let next = AtomicUsize::new(0);
    let workers = config.workers.min(n);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let row = sweep_one(config, family, grid[i]);
                results
                    .lock()
                    .expect("sweep worker poisoned")
                    .insert_row(i, row);
            });
        }
    });
    let rows: Vec<SweepRow> = results
        .into_inner()
        .expect("sweep results poisoned")
        .into_iter()
        .map(|r| r.expect("all rows computed"))
        .collect();

    let ok_rows: Vec<&SweepRow> = rows.iter().filter(|r| r.status == "ok").collect();
    let predicted_fit = SlopeFit::over_grid(
        &ok_rows.iter().map(|r| r.epsilon).collect::<Vec<_>>(),
        &ok_rows.iter().map(|r| r.t_predicted).collect::<Vec<_>>(),
    )
    .ok();
    let measured_fit = SlopeFit::over_grid(
        &ok_rows.iter().map(|r| r.epsilon).collect::<Vec<_>>(),
        &ok_rows
            .iter()
            .map(|r| r.t_measured.unwrap_or(0) as f64)
            .collect::<Vec<_>>(),
    )
    .ok();
    Ok(SweepOutput {
        rows,
        predicted_fit,
        measured_fit,
    })
}

trait InsertRow {
    fn insert_row(&mut self, i: usize, row: SweepRow);
}

impl InsertRow for Vec<Option<SweepRow>> {
    fn insert_row(&mut self, i: usize, row: SweepRow) {
        self[i] = Some(row);
    }
}

/// Single optimizer run on the configured planned instance.
pub fn cmd_run(config: &ExperimentConfig) -> Result<(IterateTrace<f64>, TraceSummary), Error> {
    config.validate()?;
    let family = config.family_or_err()?;
    let spec = config.class_or_err()?;
    let plan = plan(family, spec)?;
    let instance = plan.instance()?;
    let algo = config.algorithm.unwrap_or_else(|| default_algorithm(&plan));
    let budget = default_budget(&plan, config.budget);
    let trace = run_until_stationary(&algo, &instance, spec.epsilon, budget, false)
        .map_err(|e| Error::invalid(format!("run failed: {e}")))?;
    let summary = trace.summary();
    Ok((trace, summary))
}

/// Sampled membership checks for an emitted plan: order-1 and order-2
/// Lipschitz estimates against the class constants, the value-gap or
/// minimizer-norm budget, and the plan's gradient floor above epsilon.
pub fn membership_reports(
    plan: &ScalingPlan<f64>,
    samples: usize,
    seed: u64,
) -> Result<Vec<VerificationReport>, Error> {
    let instance = plan.instance()?;
    let spec = &plan.spec;
    let mut rng = Rng::new(seed);
    let mut reports = Vec::new();
    let radius = plan.sigma.max(plan.dist_bound.unwrap_or(0.0)).max(1e-6);

    for order in 1..=2u32 {
        if order as usize > spec.p {
            break;
        }
        let est = lipschitz_estimate(&instance, order, samples, radius, &mut rng);
        let bound = spec.lipschitz[order as usize - 1];
        reports.push(
            VerificationReport::new(
                format!(
                    "membership-lipschitz-order-{order}({})",
                    plan.family.as_str()
                ),
                bound,
                est,
                0.0,
                est <= bound * (1.0 + 1e-6),
            )
            .with("samples", json!(samples)),
        );
    }

    match plan.family {
        PlanFamily::ConvexValue | PlanFamily::NonconvexP2 | PlanFamily::NonconvexGeneral => {
            let delta = spec.delta.unwrap_or(f64::INFINITY);
            // best value found by a short monotone descent from 0; inf f = 0
            // at the rescaled all-ones point, so f(0) - best_found <= f(0) - inf
            let dim = instance.dim();
            let (f0, _) = FirstOrder::value_grad(&instance, &vec![0.0; dim]);
            let mut x = vec![0.0; dim];
            let mut best = f0;
            let mut step = 1.0 / spec.lipschitz[0];
            for _ in 0..2000 {
                let (_, g) = FirstOrder::value_grad(&instance, &x);
                let cand: Vec<f64> = x.iter().zip(&g).map(|(&xi, &gi)| xi - step * gi).collect();
                let (fc, _) = FirstOrder::value_grad(&instance, &cand);
                if fc.is_finite() && fc < best {
                    best = fc;
                    x = cand;
                    step *= 1.2;
                } else {
                    step *= 0.5;
                    if step < 1e-16 {
                        break;
                    }
                }
            }
            let measured = f0 - best;
            reports.push(VerificationReport::new(
                format!("membership-value-gap({})", plan.family.as_str()),
                delta,
                measured,
                0.0,
                measured <= delta * (1.0 + 1e-9),
            ));
        }
        PlanFamily::ConvexDistance => {
            let d = plan.dist_bound.unwrap_or(f64::INFINITY);
            let measured = plan.sigma * (plan.t as f64).sqrt();
            reports.push(VerificationReport::new(
                "membership-minimizer-norm(convex-distance)",
                d,
                measured,
                0.0,
                measured <= d * (1.0 + 1e-9),
            ));
        }
        PlanFamily::DistanceBounded => {
            let d = plan.dist_bound.unwrap_or(f64::INFINITY);
            let dim = instance.dim();
            let mut probe = vec![0.0; dim];
            probe[dim - 1] = 0.8 * d;
            let (at_bump, _) = FirstOrder::value_grad(&instance, &probe);
            reports.push(VerificationReport::new(
                "membership-bump-negative(distance-bounded)",
                0.0,
                at_bump,
                0.0,
                at_bump < 0.0,
            ));
            // local descent from the bump center stays in the well, so the
            // minimizer it finds must obey the norm bound
            let mut x = probe;
            let step = 0.5 / spec.lipschitz[0];
            for _ in 0..500 {
                let (_, g) = FirstOrder::value_grad(&instance, &x);
                for (xi, gi) in x.iter_mut().zip(&g) {
                    *xi -= step * gi;
                }
            }
            let measured = norm(&x);
            reports.push(VerificationReport::new(
                "membership-minimizer-norm(distance-bounded)",
                d,
                measured,
                0.0,
                measured <= d * (1.0 + 1e-9),
            ));
        }
    }

    // gradient floor above epsilon
    match plan.family {
        PlanFamily::ConvexValue | PlanFamily::ConvexDistance => {
            let floor = plan.lambda * plan.sigma * convex_min_grad_exact(plan.t, plan.alpha)?;
            reports.push(VerificationReport::new(
                format!("gradient-floor({})", plan.family.as_str()),
                spec.epsilon,
                floor,
                0.0,
                floor > spec.epsilon,
            ));
        }
        PlanFamily::NonconvexP2 | PlanFamily::NonconvexGeneral | PlanFamily::DistanceBounded => {
            // multi-start floor search on the unscaled chain, capped at a
            // desk-scale dimension
            let t_search = plan.t.min(200);
            let search = nonconvex_grad_floor_search(t_search, plan.mu, plan.r, 4, seed)?;
            let floor = plan.lambda * plan.sigma * search.measured;
            reports.push(
                VerificationReport::new(
                    format!("gradient-floor({})", plan.family.as_str()),
                    spec.epsilon,
                    floor,
                    1e-9,
                    floor > spec.epsilon * (1.0 - 1e-6),
                )
                .with("searched_t", json!(t_search)),
            );
        }
    }

    Ok(reports)
}

/// Full verification suite: lemma oracles at the configured (T, mu, r), the
/// negative-control fixture, and, when a class is configured, membership of
/// the planned instance.
pub fn cmd_verify(config: &ExperimentConfig) -> Result<Vec<VerificationReport>, Error> {
    config.validate()?;
    let vc = config.verify.clone().unwrap_or_default();
    let mut rng = Rng::new(config.seed);
    let mut reports = Vec::new();

    // zero-chain checks across families
    let convex = Instance::ConvexChain(ChainParams::convex(vc.t, 1.0)?);
    reports.push(check_zero_chain(
        &convex,
        "zero-chain(convex)",
        vc.zero_chain_trials,
        &mut rng,
    ));
    let nonconvex = Instance::NonconvexChain(ChainParams::nonconvex(vc.t, vc.mu, vc.r)?);
    reports.push(check_zero_chain(
        &nonconvex,
        "zero-chain(nonconvex)",
        vc.zero_chain_trials,
        &mut rng,
    ));

    // negative control: the checker must flag a non-chain fixture
    struct Control;
    impl FirstOrder<f64> for Control {
        fn dim(&self) -> usize {
            8
        }
        fn value_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
            let mut g = x.to_vec();
            g[7] += 1.0;
            (0.5 * crate::scalar::norm_sq(x) + x[7], g)
        }
    }
    let control = check_zero_chain(&Control, "zero-chain(negative-control)", 16, &mut rng);
    reports.push(
        VerificationReport::new(
            "negative-control-detected",
            1.0,
            if control.passed { 0.0 } else { 1.0 },
            0.0,
            !control.passed,
        )
        .with(
            "control_report",
            serde_json::to_value(&control).unwrap_or(json!(null)),
        ),
    );

    // convex floor: closed form vs dense least squares and the lemma bound
    for &(t, alpha) in &[
        (vc.t.min(200), 1.0),
        (vc.t.min(200), 1.0 / vc.t.min(200) as f64),
    ] {
        let exact = convex_min_grad_exact(t, alpha)?;
        let dense = convex_min_grad_dense(t, alpha)?;
        let rel = (exact - dense).abs() / exact;
        reports.push(
            VerificationReport::new(
                format!("convex-floor-dense-agreement(T={t},alpha={alpha})"),
                1e-10,
                rel,
                0.0,
                rel <= 1e-10,
            )
            .with("exact", json!(exact))
            .with("dense", json!(dense)),
        );
        reports.push(VerificationReport::new(
            format!("convex-floor-lower-bound(T={t},alpha={alpha})"),
            convex_floor_bound(t, alpha),
            exact,
            0.0,
            exact > convex_floor_bound(t, alpha),
        ));
    }

    // non-convex gradient floor sandwich
    let search = nonconvex_grad_floor_search(vc.t, vc.mu, vc.r, vc.floor_restarts, config.seed)?;
    let cap = search.report.metadata["upper_cap"]
        .as_f64()
        .unwrap_or(f64::INFINITY);
    reports.push(search.report.clone());
    if vc.mu >= 1.0 / (vc.t as f64 * vc.t as f64) {
        let (_, tight_norm) = disc_tight_point(vc.t, vc.mu, vc.r)?;
        reports.push(
            VerificationReport::new(
                format!("disc-tight-upper(T={},mu={},r={})", vc.t, vc.mu, vc.r),
                cap,
                tight_norm,
                0.0,
                tight_norm <= cap && tight_norm + 1e-9 >= search.measured,
            )
            .with("search_min", json!(search.measured)),
        );
    }

    // suboptimality resistance at fixed small scale
    reports.push(suboptimality_resistance_demo(
        4.0,
        1.0,
        0.25,
        30,
        &AlgorithmSpec::Gd { step: 0.25 },
        64,
    )?);

    // membership of the configured plan, when a class is present
    if config.family.is_some() && config.class.is_some() {
        let p = plan(config.family_or_err()?, config.class_or_err()?)?;
        reports.extend(membership_reports(&p, 64, config.seed)?);
    }

    Ok(reports)
}

/// Run one named lemma oracle.
pub fn cmd_lemma(config: &ExperimentConfig, name: &str) -> Result<Vec<VerificationReport>, Error> {
    let vc = config.verify.clone().unwrap_or_default();
    let mut rng = Rng::new(config.seed);
    match name {
        "zero-chain" => {
            let nonconvex = Instance::NonconvexChain(ChainParams::nonconvex(vc.t, vc.mu, vc.r)?);
            Ok(vec![check_zero_chain(
                &nonconvex,
                format!("zero-chain(nonconvex,T={})", vc.t),
                vc.zero_chain_trials,
                &mut rng,
            )])
        }
        "convex-floor" => {
            let alpha = 1.0 / vc.t as f64;
            let exact = convex_min_grad_exact(vc.t, alpha)?;
            Ok(vec![VerificationReport::new(
                format!("convex-floor(T={},alpha={alpha})", vc.t),
                convex_floor_bound(vc.t, alpha),
                exact,
                0.0,
                exact > convex_floor_bound(vc.t, alpha),
            )])
        }
        "nonconvex-floor" => {
            let search =
                nonconvex_grad_floor_search(vc.t, vc.mu, vc.r, vc.floor_restarts, config.seed)?;
            Ok(vec![search.report])
        }
        "disc-tight" => {
            let (_, norm) = disc_tight_point(vc.t, vc.mu, vc.r)?;
            let search =
                nonconvex_grad_floor_search(vc.t, vc.mu, vc.r, vc.floor_restarts, config.seed)?;
            let cap = search.report.metadata["upper_cap"].as_f64().unwrap_or(f64::INFINITY);
            Ok(vec![VerificationReport::new(
                format!("disc-tight(T={},mu={},r={})", vc.t, vc.mu, vc.r),
                cap,
                norm,
                0.0,
                norm <= cap,
            )])
        }
        "suboptimality" => Ok(vec![suboptimality_resistance_demo(
            4.0,
            1.0,
            0.25,
            30,
            &AlgorithmSpec::Gd { step: 0.25 },
            64,
        )?]),
        other => Err(Error::invalid(format!(
            "unknown lemma '{other}'; expected zero-chain, convex-floor, nonconvex-floor, disc-tight or suboptimality"
        ))),
    }
}

/// Write pretty JSON to out_dir/name.
pub fn write_json<S: Serialize>(out_dir: &Path, name: &str, value: &S) -> Result<PathBuf, Error> {
    fs::create_dir_all(out_dir)
        .map_err(|e| Error::invalid(format!("create {}: {e}", out_dir.display())))?;
    let path = out_dir.join(name);
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::invalid(format!("serialize {name}: {e}")))?;
    fs::write(&path, text + "\n").map_err(|e| Error::invalid(format!("write {name}: {e}")))?;
    Ok(path)
}
