//! Numeric oracles certifying the chain constructions: exact-zero chain
//! checks, the exact convex gradient floor and its dense least-squares
//! cross-check, the non-convex gradient floor search with its matching
//! upper construction, sampled Lipschitz estimation, and the
//! suboptimality-resistance demonstration.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::Error;
use crate::instances::{nonconvex_chain_value_grad, ChainParams, FirstOrder, GeometricChainParams};
use crate::optimizers::AlgorithmSpec;
use crate::rng::Rng;
use crate::scalar::{norm, norm_sq, Real};
use crate::upsilon::{grad_cap_on_unit, upsilon_deriv};

/// Per-claim numeric certificate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claim: String,
    pub bound: f64,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(default)]
    pub metadata: BTreeMap<String, serde_json::Value>,
}

impl VerificationReport {
    pub fn new(
        claim: impl Into<String>,
        bound: f64,
        measured: f64,
        tolerance: f64,
        passed: bool,
    ) -> Self {
        VerificationReport {
            claim: claim.into(),
            bound,
            measured,
            tolerance,
            passed,
            metadata: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: serde_json::Value) -> Self {
        self.metadata.insert(key.to_string(), value);
        self
    }
}

/// Zero-chain check (first-order): for random i and random x supported on
/// the first i-1 coordinates, gradient coordinates i+1..dim must be literal
/// zeros. Failures are reported, not thrown.
pub fn check_zero_chain(
    f: &dyn FirstOrder<f64>,
    claim: impl Into<String>,
    trials: usize,
    rng: &mut Rng,
) -> VerificationReport {
    let dim = f.dim();
    let mut worst = 0.0f64;
    let mut violations = 0usize;
    for _ in 0..trials.max(1) {
        let i = 1 + rng.below(dim); // 1-based prefix index
        let mut x = vec![0.0; dim];
        for slot in x.iter_mut().take(i - 1) {
            *slot = rng.range(-2.0, 2.0);
        }
        let (_, g) = f.value_grad(&x);
        for &gj in g.iter().skip(i) {
            if gj != 0.0 {
                violations += 1;
                worst = worst.max(gj.abs());
            }
        }
    }
    VerificationReport::new(claim, 0.0, worst, 0.0, violations == 0)
        .with("trials", json!(trials))
        .with("dim", json!(dim))
        .with("violations", json!(violations))
}

/// Exact minimum of ||grad fbar_{T,alpha}|| over {x : x_T = 0}: the norm of
/// the projection of alpha e^1 onto the nullspace of the chain matrix with
/// its last column removed, which reduces to
/// 1 / sqrt(sum_{i=1..T} (i - 1 + 1/alpha)^2).
pub fn convex_min_grad_exact<T: Real>(t: usize, alpha: T) -> Result<T, Error> {
    if t < 1 {
        return Err(Error::invalid("T must be >= 1"));
    }
    if !(alpha > T::zero() && alpha <= T::one()) {
        return Err(Error::invalid(format!("alpha = {alpha} must be in (0, 1]")));
    }
    let inv_alpha = T::one() / alpha;
    let mut sum = T::zero();
    for i in 1..=t {
        let z = T::of_usize(i - 1) + inv_alpha;
        sum += z * z;
    }
    Ok(T::one() / sum.sqrt())
}

/// Lower bound (T - 1 + 1/alpha)^{-3/2} that the exact floor strictly
/// exceeds for T >= 2.
pub fn convex_floor_bound<T: Real>(t: usize, alpha: T) -> T {
    (T::of_usize(t - 1) + T::one() / alpha).powf(T::of(-1.5))
}

/// In-place dense Cholesky solve of the SPD system a x = b.
#[allow(clippy::needless_range_loop)]
fn cholesky_solve<T: Real>(a: &mut [Vec<T>], b: &mut [T]) -> Result<(), Error> {
    let n = b.len();
    for j in 0..n {
        let mut d = a[j][j];
        for k in 0..j {
            d -= a[j][k] * a[j][k];
        }
        if !(d > T::zero()) {
            return Err(Error::invalid("matrix not positive definite"));
        }
        let d = d.sqrt();
        a[j][j] = d;
        for i in j + 1..n {
            let mut s = a[i][j];
            for k in 0..j {
                s -= a[i][k] * a[j][k];
            }
            a[i][j] = s / d;
        }
    }
    // forward substitution L y = b
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= a[i][k] * b[k];
        }
        b[i] = s / a[i][i];
    }
    // back substitution L^T x = y
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= a[k][i] * b[k];
        }
        b[i] = s / a[i][i];
    }
    Ok(())
}

/// Dense least-squares cross-check for `convex_min_grad_exact`: builds the
/// chain matrix minus its last column, solves the normal equations by
/// Cholesky, and returns the residual norm. O(T^3), capped at T = 200.
pub fn convex_min_grad_dense<T: Real>(t: usize, alpha: T) -> Result<T, Error> {
    if t > 200 {
        return Err(Error::invalid("dense cross-check capped at T = 200"));
    }
    if t < 1 {
        return Err(Error::invalid("T must be >= 1"));
    }
    if !(alpha > T::zero() && alpha <= T::one()) {
        return Err(Error::invalid(format!("alpha = {alpha} must be in (0, 1]")));
    }
    if t == 1 {
        // no free variables: the only feasible point is x = 0
        return Ok(alpha);
    }
    let n = t - 1;
    // chain matrix rows: [1+alpha, -1], [-1, 2, -1], ..., [-1, 1]; drop last column
    let mut m = vec![vec![T::zero(); n]; t];
    m[0][0] = T::one() + alpha;
    if n > 1 {
        m[0][1] = -T::one();
    }
    for i in 1..t - 1 {
        m[i][i - 1] = -T::one();
        if i < n {
            m[i][i] = T::of(2.0);
        }
        if i + 1 < n {
            m[i][i + 1] = -T::one();
        }
    }
    m[t - 1][n - 1] = -T::one();

    let mut a = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = T::zero();
            for row in m.iter() {
                s += row[i] * row[j];
            }
            a[i][j] = s;
            a[j][i] = s;
        }
    }
    let mut rhs: Vec<T> = (0..n).map(|j| alpha * m[0][j]).collect();
    cholesky_solve(&mut a, &mut rhs)?;
    let mut resid_sq = T::zero();
    for (i, row) in m.iter().enumerate() {
        let mut s = T::zero();
        for (j, &vj) in rhs.iter().enumerate() {
            s += row[j] * vj;
        }
        if i == 0 {
            s -= alpha;
        }
        resid_sq += s * s;
    }
    Ok(resid_sq.sqrt())
}

/// Explicit near-minimal-gradient point from the transition-profile
/// construction: chain entries descend from 1 to 0 over 2m+1 links with
/// m = ceil(1 / (3 sqrt(mu))), exactly zero beyond. Requires
/// mu in [T^{-2}, 1]; for T <= 8 the origin itself certifies the bound.
/// Returns the point (with x_T = x_{T+1} = 0) and ||grad fbar_T|| there,
/// evaluated on the chain with first-link weight sqrt(mu) and scale r.
pub fn disc_tight_point<T: Real>(t: usize, mu: T, r: T) -> Result<(Vec<T>, T), Error> {
    let t_real = T::of_usize(t);
    if !(mu >= T::one() / (t_real * t_real) && mu <= T::one()) {
        return Err(Error::invalid(format!(
            "mu = {mu} outside [T^-2, 1] for T = {t}"
        )));
    }
    let params = ChainParams::nonconvex(t, mu, r)?;
    let x = if t <= 8 {
        vec![T::zero(); t + 1]
    } else {
        let m_real = T::one() / (T::of(3.0) * mu.sqrt());
        let m = m_real.ceil().to_usize().expect("m fits usize").max(1);
        let denom = T::of_usize(2 * m * (m + 1));
        let mut x = vec![T::zero(); t + 1];
        for n in 1..=t + 1 {
            x[n - 1] = if n <= m + 1 {
                T::one() - T::of_usize(n * (n - 1)) / denom
            } else if n <= 2 * m + 1 {
                T::of_usize((2 * m + 2 - n) * (2 * m + 1 - n)) / denom
            } else {
                T::zero()
            };
        }
        debug_assert!(x.iter().all(|&v| v >= T::zero() && v <= T::one()));
        debug_assert_eq!(x[t - 1], T::zero());
        x
    };
    let (_, g) = nonconvex_chain_value_grad(&x, &params)?;
    Ok((x, norm(&g)))
}

/// Hessian-vector product of the non-convex chain at x: the constant chain
/// tridiagonal plus the diagonal mu Upsilon''(x_i) on the first T entries.
fn chain_hvp(x: &[f64], w: &[f64], params: &ChainParams<f64>, out: &mut [f64]) {
    let t = params.t;
    let mu = params.mu;
    let sqrt_mu = mu.sqrt();
    let ups = params.upsilon();
    out[0] =
        (sqrt_mu + 1.0) * w[0] - w[1] + mu * upsilon_deriv(x[0], &ups, 2).expect("order 2") * w[0];
    for i in 1..t {
        out[i] = 2.0 * w[i] - w[i - 1] - w[i + 1]
            + mu * upsilon_deriv(x[i], &ups, 2).expect("order 2") * w[i];
    }
    out[t] = w[t] - w[t - 1];
}

struct ReducedGradNormSq<'a> {
    params: &'a ChainParams<f64>,
}

impl ReducedGradNormSq<'_> {
    fn embed(&self, y: &[f64]) -> Vec<f64> {
        let t = self.params.t;
        let mut x = vec![0.0; t + 1];
        x[..t - 1].copy_from_slice(y);
        x
    }

    /// Phi(y) = ||grad fbar(x(y))||^2 over the free coordinates 1..T-1.
    fn value(&self, y: &[f64]) -> f64 {
        let x = self.embed(y);
        let (_, g) = nonconvex_chain_value_grad(&x, self.params).expect("dim");
        norm_sq(&g)
    }

    /// grad Phi = 2 (H g) restricted to the free coordinates.
    fn value_grad(&self, y: &[f64]) -> (f64, Vec<f64>) {
        let t = self.params.t;
        let x = self.embed(y);
        let (_, g) = nonconvex_chain_value_grad(&x, self.params).expect("dim");
        let mut hg = vec![0.0; t + 1];
        chain_hvp(&x, &g, self.params, &mut hg);
        let grad = hg[..t - 1].iter().map(|&v| 2.0 * v).collect();
        (norm_sq(&g), grad)
    }
}

/// Monotone adaptive-step gradient descent on Phi; returns (y, Phi(y)).
fn descend(obj: &ReducedGradNormSq, y0: Vec<f64>, max_iter: usize) -> (Vec<f64>, f64) {
    let mut y = y0;
    let mut phi = obj.value(&y);
    let mut step = 1e-2;
    for _ in 0..max_iter {
        let (_, g) = obj.value_grad(&y);
        let gnorm_sq = norm_sq(&g);
        if gnorm_sq <= (1e-14 * phi.max(1e-30)).powi(2) || step < 1e-16 {
            break;
        }
        let cand: Vec<f64> = y.iter().zip(&g).map(|(&yi, &gi)| yi - step * gi).collect();
        let phi_cand = obj.value(&cand);
        if phi_cand < phi {
            y = cand;
            phi = phi_cand;
            step *= 1.3;
        } else {
            step *= 0.5;
        }
    }
    (y, phi)
}

/// Transition profile seed with prescribed half-length m (same shape the
/// tight construction uses), valid when 2m+1 <= T.
fn transition_seed(t: usize, m: usize) -> Vec<f64> {
    let denom = (2 * m * (m + 1)) as f64;
    (1..=t - 1)
        .map(|n| {
            if n <= m + 1 {
                1.0 - (n * (n - 1)) as f64 / denom
            } else if n <= 2 * m + 1 {
                ((2 * m + 2 - n) * (2 * m + 1 - n)) as f64 / denom
            } else {
                0.0
            }
        })
        .collect()
}

/// Outcome of the multi-start gradient-floor minimization.
#[derive(Clone, Debug)]
pub struct FloorSearch {
    /// Smallest ||grad fbar_T|| found over {x : x_T = x_{T+1} = 0}.
    pub measured: f64,
    /// Transition half-length of the best seed, when a profile seed won.
    pub best_m: Option<usize>,
    /// Argmin embedded in R^{T+1}.
    pub argmin: Vec<f64>,
    pub report: VerificationReport,
}

/// Minimize ||grad fbar_T|| over {x : x_T = x_{T+1} = 0} by multi-start
/// local descent seeded with random points plus transition profiles of
/// varying half-length, and check the measured minimum against the
/// mu^{3/4}/4 floor and the (27 + sqrt(3) G) mu^{3/4} cap.
pub fn nonconvex_grad_floor_search(
    t: usize,
    mu: f64,
    r: f64,
    restarts: usize,
    seed: u64,
) -> Result<FloorSearch, Error> {
    let params = ChainParams::nonconvex(t, mu, r)?;
    let floor = mu.powf(0.75) / 4.0;
    let g_cap = grad_cap_on_unit(&params.upsilon());
    let upper = (27.0 + 3.0f64.sqrt() * g_cap) * mu.powf(0.75);

    if t == 1 {
        // the only feasible point is the origin
        let x = vec![0.0; 2];
        let (_, g) = nonconvex_chain_value_grad(&x, &params)?;
        let measured = norm(&g);
        let report = VerificationReport::new(
            format!("nonconvex-grad-floor(T=1,mu={mu},r={r})"),
            floor,
            measured,
            1e-6,
            measured >= floor - 1e-6,
        );
        return Ok(FloorSearch {
            measured,
            best_m: None,
            argmin: x,
            report,
        });
    }

    let obj = ReducedGradNormSq { params: &params };
    let mut rng = Rng::new(seed);
    let mut best_phi = f64::INFINITY;
    let mut best_y: Vec<f64> = vec![0.0; t - 1];
    let mut best_m = None;

    let consider = |seed_y: Vec<f64>,
                    m: Option<usize>,
                    best_phi: &mut f64,
                    best_y: &mut Vec<f64>,
                    best_m: &mut Option<usize>| {
        let (y, phi) = descend(&obj, seed_y, 3000);
        if phi < *best_phi {
            *best_phi = phi;
            *best_y = y;
            *best_m = m;
        }
    };

    // origin
    consider(
        vec![0.0; t - 1],
        None,
        &mut best_phi,
        &mut best_y,
        &mut best_m,
    );
    // transition profiles, including the tight construction's own m
    let m_tight = (1.0 / (3.0 * mu.sqrt())).ceil() as usize;
    let mut ms: Vec<usize> = vec![m_tight.max(1)];
    let mut m = 1usize;
    while 2 * m < t {
        ms.push(m);
        m = (m * 2).max(m + 1);
    }
    ms.sort_unstable();
    ms.dedup();
    for &m in &ms {
        if 2 * m < t {
            consider(
                transition_seed(t, m),
                Some(m),
                &mut best_phi,
                &mut best_y,
                &mut best_m,
            );
        }
    }
    // random restarts
    for _ in 0..restarts {
        let y: Vec<f64> = (0..t - 1).map(|_| rng.range(-0.3, 1.3)).collect();
        consider(y, None, &mut best_phi, &mut best_y, &mut best_m);
    }

    let measured = best_phi.sqrt();
    let passed = measured.is_finite() && measured >= floor - 1e-6;
    let report = VerificationReport::new(
        format!("nonconvex-grad-floor(T={t},mu={mu},r={r})"),
        floor,
        measured,
        1e-6,
        passed,
    )
    .with("upper_cap", json!(upper))
    .with("grad_cap_G", json!(g_cap))
    .with("zeta_ratio", json!(measured / mu.powf(0.75)))
    .with("best_m", json!(best_m))
    .with("restarts", json!(restarts));

    Ok(FloorSearch {
        measured,
        best_m,
        argmin: obj.embed(&best_y),
        report,
    })
}

/// Sampled lower estimate of the Lipschitz constant of the order-th
/// derivative (order 1: gradient, order 2: directional second derivative),
/// comparing directional derivative differences over random points,
/// directions and offsets. Pass criteria should test estimate <= constant.
pub fn lipschitz_estimate(
    f: &dyn FirstOrder<f64>,
    order: u32,
    samples: usize,
    radius: f64,
    rng: &mut Rng,
) -> f64 {
    assert!(
        order == 1 || order == 2,
        "sampled estimate supports orders 1 and 2"
    );
    assert!(samples >= 2, "need at least two samples");
    let dim = f.dim();
    let mut best = 0.0f64;
    for _ in 0..samples {
        let x: Vec<f64> = (0..dim).map(|_| rng.range(-radius, radius)).collect();
        let v = rng.unit_vector(dim);
        let offset = radius * 10.0f64.powf(rng.range(-3.0, -0.3));
        match order {
            1 => {
                let (_, g0) = f.value_grad(&x);
                let xt: Vec<f64> = x
                    .iter()
                    .zip(&v)
                    .map(|(&xi, &vi)| xi + offset * vi)
                    .collect();
                let (_, g1) = f.value_grad(&xt);
                let diff: f64 = g0
                    .iter()
                    .zip(&g1)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                best = best.max(diff / offset);
            }
            _ => {
                // second directional derivative via central difference of
                // t -> v' grad f(x + t v)
                let h = f64::EPSILON.powf(1.0 / 3.0) * radius.max(1.0);
                let dir_second = |s: f64| {
                    let eval = |tt: f64| {
                        let xt: Vec<f64> =
                            x.iter().zip(&v).map(|(&xi, &vi)| xi + tt * vi).collect();
                        let (_, g) = f.value_grad(&xt);
                        g.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>()
                    };
                    (eval(s + h) - eval(s - h)) / (2.0 * h)
                };
                let d0 = dir_second(0.0);
                let d1 = dir_second(offset);
                best = best.max((d1 - d0).abs() / offset);
            }
        }
    }
    best
}

/// Parameters the resistance construction derives from (L1, Delta, eps).
pub fn geometric_chain_for(
    l1: f64,
    delta: f64,
    eps: f64,
    t: usize,
) -> Result<GeometricChainParams<f64>, Error> {
    if !(eps > 0.0 && eps < delta) {
        return Err(Error::invalid(format!(
            "need 0 < eps = {eps} < delta = {delta}"
        )));
    }
    let beta = 1.0 - (eps / delta).sqrt();
    let lambda = l1 / (2.0 * (1.0 + 2.0 * beta + beta * beta));
    let s = (delta / lambda).sqrt();
    GeometricChainParams::new(t, lambda, s, beta)
}

/// Run a zero-respecting algorithm from 0 on the geometric chain built for
/// (L1, Delta, eps) and confirm no iterate within T steps is
/// eps-suboptimal (inf f = 0).
pub fn suboptimality_resistance_demo(
    l1: f64,
    delta: f64,
    eps: f64,
    t: usize,
    algorithm: &AlgorithmSpec,
    budget: usize,
) -> Result<VerificationReport, Error> {
    let params = geometric_chain_for(l1, delta, eps, t)?;
    let inst = crate::instances::Instance::GeometricChain(params);
    // no stationarity stop: we watch function values, not gradients
    let trace = crate::optimizers::run_to_budget(algorithm, &inst, budget.max(t), false)
        .map_err(|e| Error::invalid(format!("run failed: {e}")))?;
    let within: Vec<f64> = trace.rows.iter().take(t).map(|r| r.value).collect();
    let measured = within.iter().cloned().fold(f64::INFINITY, f64::min);
    let passed = measured > eps;
    Ok(VerificationReport::new(
        format!("suboptimality-resistance(L1={l1},delta={delta},eps={eps},T={t})"),
        eps,
        measured,
        0.0,
        passed,
    )
    .with("beta", json!(params.beta))
    .with("lambda", json!(params.lambda))
    .with("s", json!(params.s))
    .with("steps_checked", json!(within.len())))
}
