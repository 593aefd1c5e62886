//! Reference first-order methods (gradient descent, Nesterov's constant
//! momentum scheme, proximally regularized AGD) driven through a counting
//! oracle that records every query and the time-to-stationarity index.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instances::FirstOrder;
use crate::scalar::{norm, norm_sq, Real};

/// One first-order oracle query with full vectors retained.
#[derive(Clone, Debug)]
pub struct FirstOrderOracleQuery<T> {
    pub index: usize,
    pub point: Vec<T>,
    pub value: T,
    pub gradient: Vec<T>,
}

/// Scalar record of one query, enough for the CSV export.
#[derive(Clone, Copy, Debug)]
pub struct QueryRow<T> {
    pub t: usize,
    pub value: T,
    pub grad_norm: T,
    /// Number of nonzero coordinates of the query point.
    pub support_size: usize,
}

/// Ordered record of one run.
#[derive(Clone, Debug)]
pub struct IterateTrace<T> {
    pub rows: Vec<QueryRow<T>>,
    /// Full queries; populated only when recording was requested.
    pub queries: Vec<FirstOrderOracleQuery<T>>,
    /// Accumulated gradient support after each query; populated only when
    /// full recording was requested.
    pub supports: Vec<Vec<usize>>,
    /// Accumulated gradient support size after each query.
    pub support_sizes: Vec<usize>,
    /// Minimal query index t with ||grad f(x^(t))|| <= eps, when one was hit.
    pub t_eps: Option<usize>,
    pub best_grad_norm: Option<T>,
}

impl<T> IterateTrace<T> {
    fn empty() -> Self {
        IterateTrace {
            rows: Vec::new(),
            queries: Vec::new(),
            supports: Vec::new(),
            support_sizes: Vec::new(),
            t_eps: None,
            best_grad_norm: None,
        }
    }
}

impl<T: Real> IterateTrace<T> {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn final_value(&self) -> Option<T> {
        self.rows.last().map(|r| r.value)
    }

    /// CSV with columns (t, f, grad_norm, support_size).
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,f,grad_norm,support_size")?;
        for row in &self.rows {
            writeln!(
                w,
                "{},{},{},{}",
                row.t, row.value, row.grad_norm, row.support_size
            )?;
        }
        Ok(())
    }

    pub fn summary(&self) -> TraceSummary {
        TraceSummary {
            queries: self.rows.len(),
            t_eps: self.t_eps,
            best_grad_norm: self.best_grad_norm.and_then(|x| x.to_f64()),
            final_value: self.final_value().and_then(|x| x.to_f64()),
        }
    }
}

/// JSON-facing run summary.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceSummary {
    pub queries: usize,
    pub t_eps: Option<usize>,
    pub best_grad_norm: Option<f64>,
    pub final_value: Option<f64>,
}

#[derive(Debug, Error)]
pub enum RunError<T: Real> {
    #[error("non-finite value or gradient at query {index}")]
    NonFinite { index: usize },

    #[error("budget exhausted before stationarity; best gradient norm {best_grad_norm}")]
    BudgetExhausted {
        best_grad_norm: T,
        trace: Box<IterateTrace<T>>,
    },

    #[error("invalid run parameter: {0}")]
    Invalid(String),
}

/// Stopping and recording policy for one run.
#[derive(Clone, Copy, Debug)]
pub struct RunOptions<T> {
    /// Stationarity target on the true objective; None runs to budget.
    pub eps: Option<T>,
    /// Maximum number of oracle queries.
    pub budget: usize,
    /// Retain full query vectors and per-step support sets.
    pub record_full: bool,
}

impl<T: Real> RunOptions<T> {
    pub fn to_budget(budget: usize) -> Self {
        RunOptions {
            eps: None,
            budget,
            record_full: false,
        }
    }

    pub fn until_stationary(eps: T, budget: usize) -> Self {
        RunOptions {
            eps: Some(eps),
            budget,
            record_full: false,
        }
    }

    pub fn recorded(mut self) -> Self {
        self.record_full = true;
        self
    }
}

/// Counting first-order oracle. Every algorithm below talks to the instance
/// only through `query`, so oracle-complexity accounting is uniform.
struct Oracle<'a, T: Real> {
    f: &'a dyn FirstOrder<T>,
    opts: RunOptions<T>,
    trace: IterateTrace<T>,
    acc: Vec<bool>,
    acc_count: usize,
    stopped: bool,
}

impl<'a, T: Real> Oracle<'a, T> {
    fn new(f: &'a dyn FirstOrder<T>, opts: RunOptions<T>) -> Result<Self, RunError<T>> {
        if opts.budget < 1 {
            return Err(RunError::Invalid("budget must be >= 1".into()));
        }
        Ok(Oracle {
            f,
            opts,
            trace: IterateTrace::empty(),
            acc: vec![false; f.dim()],
            acc_count: 0,
            stopped: false,
        })
    }

    fn active(&self) -> bool {
        !self.stopped
    }

    fn query(&mut self, x: &[T]) -> Result<(T, Vec<T>), RunError<T>> {
        let index = self.trace.rows.len() + 1;
        let (value, grad) = self.f.value_grad(x);
        if !value.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(RunError::NonFinite { index });
        }
        let grad_norm = norm(&grad);
        for (slot, &g) in self.acc.iter_mut().zip(&grad) {
            if !*slot && g != T::zero() {
                *slot = true;
                self.acc_count += 1;
            }
        }
        self.trace.rows.push(QueryRow {
            t: index,
            value,
            grad_norm,
            support_size: x.iter().filter(|&&v| v != T::zero()).count(),
        });
        self.trace.support_sizes.push(self.acc_count);
        if self.opts.record_full {
            self.trace.queries.push(FirstOrderOracleQuery {
                index,
                point: x.to_vec(),
                value,
                gradient: grad.clone(),
            });
            self.trace.supports.push(
                self.acc
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(|(i, _)| i)
                    .collect(),
            );
        }
        if self.trace.best_grad_norm.is_none_or(|b| grad_norm < b) {
            self.trace.best_grad_norm = Some(grad_norm);
        }
        if self.trace.t_eps.is_none() && self.opts.eps.is_some_and(|e| grad_norm <= e) {
            self.trace.t_eps = Some(index);
        }
        if self.trace.t_eps.is_some() || index >= self.opts.budget {
            self.stopped = true;
        }
        Ok((value, grad))
    }

    fn finish(self) -> IterateTrace<T> {
        self.trace
    }
}

fn check_start<T: Real>(f: &dyn FirstOrder<T>, x0: &[T]) -> Result<(), RunError<T>> {
    if x0.len() != f.dim() {
        return Err(RunError::Invalid(format!(
            "start point has dimension {}, instance wants {}",
            x0.len(),
            f.dim()
        )));
    }
    Ok(())
}

/// Plain gradient descent x_{t+1} = x_t - step * grad f(x_t).
pub fn gradient_descent<T: Real>(
    f: &dyn FirstOrder<T>,
    step: T,
    x0: &[T],
    opts: RunOptions<T>,
) -> Result<IterateTrace<T>, RunError<T>> {
    if !(step > T::zero()) {
        return Err(RunError::Invalid(format!("step = {step} must be positive")));
    }
    check_start(f, x0)?;
    let mut o = Oracle::new(f, opts)?;
    let mut x = x0.to_vec();
    let (_, mut g) = o.query(&x)?;
    while o.active() {
        for (xi, gi) in x.iter_mut().zip(&g) {
            *xi -= step * *gi;
        }
        let (_, g_next) = o.query(&x)?;
        g = g_next;
    }
    Ok(o.finish())
}

/// Maps a true oracle response (point, value, gradient) to the surrogate
/// objective the scheme optimizes (identity for plain AGD, ridge-added for
/// prox-AGD).
type Surrogate<'a, T> = &'a dyn Fn(&[T], T, Vec<T>) -> (T, Vec<T>);

/// Shared AGD loop. One oracle query per iteration at the extrapolated
/// point; a descent-lemma certificate enforces f(x_t) <= f(x_1) without
/// extra queries, falling back to a plain gradient step when it cannot.
/// When `probe_every` is set, every k-th iterate is also queried so
/// stationarity on the true objective is tested at the x-sequence too.
fn agd_loop<T: Real>(
    o: &mut Oracle<T>,
    sc: T,
    l: T,
    x0: &[T],
    surrogate: Surrogate<T>,
    probe_every: Option<usize>,
) -> Result<(), RunError<T>> {
    let two = T::of(2.0);
    let kappa = (l.sqrt() - sc.sqrt()) / (l.sqrt() + sc.sqrt());
    let mut x_prev = x0.to_vec();
    let mut y = x0.to_vec();
    let (v, g) = o.query(&y)?;
    let (f_start, mut gy) = surrogate(&y, v, g);
    let mut fy = f_start;
    let mut iter = 0usize;
    while o.active() {
        iter += 1;
        let certificate = fy - norm_sq(&gy) / (two * l);
        if certificate <= f_start {
            let x_next: Vec<T> = y.iter().zip(&gy).map(|(&yi, &gi)| yi - gi / l).collect();
            for ((yi, &xn), &xp) in y.iter_mut().zip(&x_next).zip(&x_prev) {
                *yi = xn + kappa * (xn - xp);
            }
            x_prev = x_next;
        } else {
            let (v, g) = o.query(&x_prev)?;
            if !o.active() {
                break;
            }
            let (_, gx) = surrogate(&x_prev, v, g);
            for (xi, gi) in x_prev.iter_mut().zip(&gx) {
                *xi -= *gi / l;
            }
            y.copy_from_slice(&x_prev);
        }
        if probe_every.is_some_and(|k| iter.is_multiple_of(k)) {
            o.query(&x_prev)?;
            if !o.active() {
                break;
            }
        }
        let (v, g) = o.query(&y)?;
        let (fv, gv) = surrogate(&y, v, g);
        fy = fv;
        gy = gv;
    }
    Ok(())
}

/// Nesterov's constant-momentum scheme for sc-strongly-convex f with
/// l-Lipschitz gradient: gradient steps of size 1/l at the extrapolated
/// point, momentum (sqrt(l) - sqrt(sc)) / (sqrt(l) + sqrt(sc)).
pub fn agd_strongly_convex<T: Real>(
    f: &dyn FirstOrder<T>,
    sc: T,
    l: T,
    x0: &[T],
    opts: RunOptions<T>,
) -> Result<IterateTrace<T>, RunError<T>> {
    if !(sc > T::zero()) || !(l >= sc) {
        return Err(RunError::Invalid(format!(
            "need 0 < sc <= l, got sc = {sc}, l = {l}"
        )));
    }
    check_start(f, x0)?;
    let mut o = Oracle::new(f, opts)?;
    agd_loop(&mut o, sc, l, x0, &|_, v, g| (v, g), None)?;
    Ok(o.finish())
}

/// Iteration bound from the regularized-AGD analysis:
/// 1 + 5 sqrt(l * delta) / eps * log_+(25 l delta / eps^2).
pub fn prox_agd_bound(l: f64, delta: f64, eps: f64) -> f64 {
    1.0 + 5.0 * (l * delta).sqrt() / eps * (25.0 * l * delta / (eps * eps)).ln().max(0.0)
}

fn prox_agd_run<T: Real>(
    f: &dyn FirstOrder<T>,
    delta: T,
    l: T,
    eps: T,
    budget: usize,
    record_full: bool,
) -> Result<IterateTrace<T>, RunError<T>> {
    if !(delta > T::zero()) || !(l > T::zero()) || !(eps > T::zero()) {
        return Err(RunError::Invalid("delta, l, eps must be positive".into()));
    }
    let sc = eps * eps / (T::of(3.0) * delta);
    let l_reg = l + sc;
    let opts = RunOptions {
        eps: Some(eps),
        budget,
        record_full,
    };
    let mut o = Oracle::new(f, opts)?;
    let x0 = vec![T::zero(); f.dim()];
    let half = T::of(0.5);
    let surrogate = move |x: &[T], v: T, mut g: Vec<T>| {
        for (gi, &xi) in g.iter_mut().zip(x) {
            *gi += sc * xi;
        }
        (v + sc * half * norm_sq(x), g)
    };
    agd_loop(&mut o, sc, l_reg, &x0, &surrogate, Some(8))?;
    Ok(o.finish())
}

/// AGD on f(x) + (sigma/2)||x||^2 with sigma = eps^2 / (3 delta), started at
/// 0, stopping as soon as a queried point of the *original* f is
/// eps-stationary. Errors with the best gradient norm seen if the budget
/// runs out first.
pub fn prox_agd<T: Real>(
    f: &dyn FirstOrder<T>,
    delta: T,
    l: T,
    eps: T,
    budget: usize,
    record_full: bool,
) -> Result<IterateTrace<T>, RunError<T>> {
    let trace = prox_agd_run(f, delta, l, eps, budget, record_full)?;
    if trace.t_eps.is_none() {
        let best = trace.best_grad_norm.unwrap_or_else(T::infinity);
        return Err(RunError::BudgetExhausted {
            best_grad_norm: best,
            trace: Box::new(trace),
        });
    }
    Ok(trace)
}

/// Algorithm selection for the harness and the generic runner.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AlgorithmSpec {
    Gd { step: f64 },
    Agd { sc: f64, l: f64 },
    ProxAgd { delta: f64, l: f64 },
}

/// Drive any conforming algorithm from x0 = 0 until the first query with
/// ||grad f|| <= eps, the budget, whichever comes first. Exhaustion is
/// recorded in the trace (t_eps = None), not raised.
pub fn run_until_stationary<T: Real>(
    algorithm: &AlgorithmSpec,
    f: &dyn FirstOrder<T>,
    eps: T,
    budget: usize,
    record_full: bool,
) -> Result<IterateTrace<T>, RunError<T>> {
    let x0 = vec![T::zero(); f.dim()];
    let opts = RunOptions {
        eps: Some(eps),
        budget,
        record_full,
    };
    match *algorithm {
        AlgorithmSpec::Gd { step } => gradient_descent(f, T::of(step), &x0, opts),
        AlgorithmSpec::Agd { sc, l } => agd_strongly_convex(f, T::of(sc), T::of(l), &x0, opts),
        AlgorithmSpec::ProxAgd { delta, l } => {
            prox_agd_run(f, T::of(delta), T::of(l), eps, budget, record_full)
        }
    }
}

/// Drive an algorithm from x0 = 0 for a fixed query budget with no
/// stationarity stop; used when the quantity under study is the value
/// sequence rather than gradient norms.
pub fn run_to_budget<T: Real>(
    algorithm: &AlgorithmSpec,
    f: &dyn FirstOrder<T>,
    budget: usize,
    record_full: bool,
) -> Result<IterateTrace<T>, RunError<T>> {
    let x0 = vec![T::zero(); f.dim()];
    let opts = RunOptions {
        eps: None,
        budget,
        record_full,
    };
    match *algorithm {
        AlgorithmSpec::Gd { step } => gradient_descent(f, T::of(step), &x0, opts),
        AlgorithmSpec::Agd { sc, l } => agd_strongly_convex(f, T::of(sc), T::of(l), &x0, opts),
        AlgorithmSpec::ProxAgd { .. } => Err(RunError::Invalid(
            "prox-agd needs a stationarity target".into(),
        )),
    }
}
