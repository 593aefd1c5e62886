//! The hard instance families: the convex quadratic chain, the non-convex
//! chain, scaled variants, the distance-bounded variant with a planted bump,
//! and the geometric chain. All gradients are hand-coded stencils so the
//! zero-support structure is bit-exact; cost is O(dim) per evaluation.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::scalar::{norm_sq, Real};
use crate::upsilon::{upsilon_deriv, upsilon_value, UpsilonParams};

/// Dimensionless hard-instance parameters. The convex chain reads (T, alpha)
/// and lives on R^T; the non-convex chain reads (T, mu, r), has first-link
/// weight sqrt(mu), and lives on R^{T+1}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainParams<T> {
    pub t: usize,
    pub alpha: T,
    pub mu: T,
    pub r: T,
}

impl<T: Real> ChainParams<T> {
    pub fn new(t: usize, alpha: T, mu: T, r: T) -> Result<Self, Error> {
        if t < 1 {
            return Err(Error::invalid("chain length T must be >= 1"));
        }
        if !(alpha > T::zero() && alpha <= T::one()) {
            return Err(Error::invalid(format!("alpha = {alpha} must be in (0, 1]")));
        }
        if !(mu > T::zero() && mu <= T::one()) {
            return Err(Error::invalid(format!("mu = {mu} must be in (0, 1]")));
        }
        if !(r >= T::one()) {
            return Err(Error::invalid(format!("r = {r} must be >= 1")));
        }
        Ok(ChainParams { t, alpha, mu, r })
    }

    /// Convex chain parameters (mu, r unused and set to 1).
    pub fn convex(t: usize, alpha: T) -> Result<Self, Error> {
        Self::new(t, alpha, T::one(), T::one())
    }

    /// Non-convex chain parameters; the first-link weight is sqrt(mu).
    pub fn nonconvex(t: usize, mu: T, r: T) -> Result<Self, Error> {
        Self::new(t, mu.sqrt().min(T::one()), mu, r)
    }

    pub fn upsilon(&self) -> UpsilonParams<T> {
        UpsilonParams::new(self.r).expect("validated at construction")
    }
}

fn check_dim<T>(x: &[T], expected: usize) -> Result<(), Error> {
    if x.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: x.len(),
        });
    }
    Ok(())
}

/// Convex chain f(x) = (alpha/2)(x_1 - 1)^2 + (1/2) sum (x_i - x_{i+1})^2
/// on R^T, with its tridiagonal-stencil gradient.
pub fn convex_chain_value_grad<T: Real>(
    x: &[T],
    params: &ChainParams<T>,
) -> Result<(T, Vec<T>), Error> {
    let t = params.t;
    check_dim(x, t)?;
    let alpha = params.alpha;
    let half = T::of(0.5);

    let mut value = alpha * half * (x[0] - T::one()) * (x[0] - T::one());
    let mut grad = vec![T::zero(); t];
    grad[0] = alpha * (x[0] - T::one());
    for i in 0..t.saturating_sub(1) {
        let d = x[i] - x[i + 1];
        value += half * d * d;
        grad[i] += d;
        grad[i + 1] -= d;
    }
    Ok((value, grad))
}

/// Non-convex chain
/// f(x) = (sqrt(mu)/2)(x_1 - 1)^2 + (1/2) sum_{i<=T} (x_{i+1} - x_i)^2
///        + mu sum_{i<=T} Upsilon_r(x_i)
/// on R^{T+1}. The last coordinate carries no Upsilon term.
pub fn nonconvex_chain_value_grad<T: Real>(
    x: &[T],
    params: &ChainParams<T>,
) -> Result<(T, Vec<T>), Error> {
    let t = params.t;
    check_dim(x, t + 1)?;
    let mu = params.mu;
    let sqrt_mu = mu.sqrt();
    let ups = params.upsilon();
    let half = T::of(0.5);

    let mut value = sqrt_mu * half * (x[0] - T::one()) * (x[0] - T::one());
    let mut grad = vec![T::zero(); t + 1];
    grad[0] = sqrt_mu * (x[0] - T::one());
    for i in 0..t {
        let d = x[i + 1] - x[i];
        value += half * d * d;
        grad[i] -= d;
        grad[i + 1] += d;
        value += mu * upsilon_value(x[i], &ups);
        grad[i] += mu * upsilon_deriv(x[i], &ups, 1).expect("order 1");
    }
    Ok((value, grad))
}

/// Which unscaled chain a scaled instance wraps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BaseChain<T> {
    Convex(ChainParams<T>),
    Nonconvex(ChainParams<T>),
}

impl<T: Real> BaseChain<T> {
    pub fn dim(&self) -> usize {
        match self {
            BaseChain::Convex(p) => p.t,
            BaseChain::Nonconvex(p) => p.t + 1,
        }
    }

    pub fn value_grad(&self, x: &[T]) -> Result<(T, Vec<T>), Error> {
        match self {
            BaseChain::Convex(p) => convex_chain_value_grad(x, p),
            BaseChain::Nonconvex(p) => nonconvex_chain_value_grad(x, p),
        }
    }
}

/// f(x) = lambda sigma^2 fbar(x / sigma): lambda controls derivative
/// magnitudes, sigma the coordinate scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledInstance<T> {
    pub base: BaseChain<T>,
    pub lambda: T,
    pub sigma: T,
}

impl<T: Real> ScaledInstance<T> {
    pub fn new(base: BaseChain<T>, lambda: T, sigma: T) -> Result<Self, Error> {
        if !(lambda > T::zero()) || !(sigma > T::zero()) {
            return Err(Error::invalid(format!(
                "scaling lambda = {lambda}, sigma = {sigma} must be positive"
            )));
        }
        Ok(ScaledInstance {
            base,
            lambda,
            sigma,
        })
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }
}

/// value = lambda sigma^2 base(x/sigma); gradient = lambda sigma base_grad(x/sigma).
pub fn scaled_value_grad<T: Real>(x: &[T], inst: &ScaledInstance<T>) -> Result<(T, Vec<T>), Error> {
    check_dim(x, inst.dim())?;
    let scaled: Vec<T> = x.iter().map(|&v| v / inst.sigma).collect();
    let (value, mut grad) = inst.base.value_grad(&scaled)?;
    let vs = inst.lambda * inst.sigma * inst.sigma;
    let gs = inst.lambda * inst.sigma;
    for g in grad.iter_mut() {
        *g *= gs;
    }
    Ok((value * vs, grad))
}

/// Smooth compactly supported bump centered at 0.8 e^(d) (last coordinate):
/// h(x) = phi(1 - (25/2) ||x - 0.8 e^(d)||^2), phi(t) = e exp(-1/[2t-1]_+^2).
/// The positive-part guard is taken before the exponential, so value and
/// gradient are literal zeros outside {||x - 0.8 e^(d)|| < 1/5}.
pub fn bump_value_grad<T: Real>(x: &[T]) -> (T, Vec<T>) {
    let d = x.len();
    let mut dist_sq = T::zero();
    for (i, &xi) in x.iter().enumerate() {
        let c = if i + 1 == d { xi - T::of(0.8) } else { xi };
        dist_sq += c * c;
    }
    let t = T::one() - T::of(12.5) * dist_sq;
    let s = T::of(2.0) * t - T::one();
    if s <= T::zero() {
        return (T::zero(), vec![T::zero(); d]);
    }
    let phi = T::of(1.0).exp() * (-T::one() / (s * s)).exp();
    // dphi/dt = phi * 4 / s^3; d(dist_sq)/dx_i = 2 (x - c)_i; dt/d(dist_sq) = -12.5
    let chain = phi * T::of(4.0) / (s * s * s) * T::of(-25.0);
    let grad = x
        .iter()
        .enumerate()
        .map(|(i, &xi)| {
            let c = if i + 1 == d { xi - T::of(0.8) } else { xi };
            chain * c
        })
        .collect();
    (phi, grad)
}

/// Scaled non-convex chain on the first T+1 coordinates of R^{T+2}, minus a
/// bump of depth lambda_tilde at radius scale D hiding a sharp global
/// minimum near 0.8 D e^(T+2).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceBoundedInstance<T> {
    pub inner: ScaledInstance<T>,
    pub lambda_tilde: T,
    pub dist_bound: T,
}

impl<T: Real> DistanceBoundedInstance<T> {
    pub fn new(inner: ScaledInstance<T>, lambda_tilde: T, dist_bound: T) -> Result<Self, Error> {
        if !matches!(inner.base, BaseChain::Nonconvex(_)) {
            return Err(Error::invalid(
                "distance-bounded instance wraps a non-convex chain",
            ));
        }
        if !(lambda_tilde > T::zero()) || !(dist_bound > T::zero()) {
            return Err(Error::invalid("lambda_tilde and D must be positive"));
        }
        Ok(DistanceBoundedInstance {
            inner,
            lambda_tilde,
            dist_bound,
        })
    }

    pub fn dim(&self) -> usize {
        self.inner.dim() + 1
    }
}

pub fn distance_bounded_value_grad<T: Real>(
    x: &[T],
    inst: &DistanceBoundedInstance<T>,
) -> Result<(T, Vec<T>), Error> {
    let dim = inst.dim();
    check_dim(x, dim)?;
    let (inner_value, inner_grad) = scaled_value_grad(&x[..dim - 1], &inst.inner)?;
    let scaled: Vec<T> = x.iter().map(|&v| v / inst.dist_bound).collect();
    let (bump, bump_grad) = bump_value_grad(&scaled);
    let mut grad = vec![T::zero(); dim];
    grad[..dim - 1].copy_from_slice(&inner_grad);
    let gs = inst.lambda_tilde / inst.dist_bound;
    for (g, bg) in grad.iter_mut().zip(bump_grad) {
        *g -= gs * bg;
    }
    Ok((inner_value - inst.lambda_tilde * bump, grad))
}

/// Geometric chain f(x) = lambda [(s - beta x_1)^2 + sum (x_i - beta x_{i+1})^2]
/// on R^T: a bounded-gap convex quadratic on which any fixed value improvement
/// can be delayed arbitrarily long.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometricChainParams<T> {
    pub t: usize,
    pub lambda: T,
    pub s: T,
    pub beta: T,
}

impl<T: Real> GeometricChainParams<T> {
    pub fn new(t: usize, lambda: T, s: T, beta: T) -> Result<Self, Error> {
        if t < 1 {
            return Err(Error::invalid("geometric chain length T must be >= 1"));
        }
        if !(lambda > T::zero()) {
            return Err(Error::invalid("lambda must be positive"));
        }
        if !(beta > T::zero() && beta < T::one()) {
            return Err(Error::invalid(format!("beta = {beta} must be in (0, 1)")));
        }
        Ok(GeometricChainParams { t, lambda, s, beta })
    }
}

pub fn geometric_chain_value_grad<T: Real>(
    x: &[T],
    params: &GeometricChainParams<T>,
) -> Result<(T, Vec<T>), Error> {
    let t = params.t;
    check_dim(x, t)?;
    let (lambda, s, beta) = (params.lambda, params.s, params.beta);
    let two = T::of(2.0);

    let r0 = s - beta * x[0];
    let mut value = r0 * r0;
    let mut grad = vec![T::zero(); t];
    grad[0] = -two * beta * r0;
    for i in 0..t - 1 {
        let ri = x[i] - beta * x[i + 1];
        value += ri * ri;
        grad[i] += two * ri;
        grad[i + 1] -= two * beta * ri;
    }
    for g in grad.iter_mut() {
        *g *= lambda;
    }
    Ok((value * lambda, grad))
}

/// First-order oracle surface shared by all instance families.
pub trait FirstOrder<T: Real>: Sync {
    fn dim(&self) -> usize;
    /// Value and gradient at x; x.len() must equal dim().
    fn value_grad(&self, x: &[T]) -> (T, Vec<T>);
}

/// Any of the hard instance families, with a serializable descriptor form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Instance<T> {
    ConvexChain(ChainParams<T>),
    NonconvexChain(ChainParams<T>),
    Scaled(ScaledInstance<T>),
    DistanceBounded(DistanceBoundedInstance<T>),
    GeometricChain(GeometricChainParams<T>),
}

impl<T: Real> Instance<T> {
    pub fn dim(&self) -> usize {
        match self {
            Instance::ConvexChain(p) => p.t,
            Instance::NonconvexChain(p) => p.t + 1,
            Instance::Scaled(s) => s.dim(),
            Instance::DistanceBounded(d) => d.dim(),
            Instance::GeometricChain(p) => p.t,
        }
    }

    pub fn value_grad(&self, x: &[T]) -> Result<(T, Vec<T>), Error> {
        match self {
            Instance::ConvexChain(p) => convex_chain_value_grad(x, p),
            Instance::NonconvexChain(p) => nonconvex_chain_value_grad(x, p),
            Instance::Scaled(s) => scaled_value_grad(x, s),
            Instance::DistanceBounded(d) => distance_bounded_value_grad(x, d),
            Instance::GeometricChain(p) => geometric_chain_value_grad(x, p),
        }
    }
}

impl<T: Real> FirstOrder<T> for Instance<T> {
    fn dim(&self) -> usize {
        Instance::dim(self)
    }

    fn value_grad(&self, x: &[T]) -> (T, Vec<T>) {
        Instance::value_grad(self, x).expect("dimension checked by caller")
    }
}

/// f plus a (sc/2)||x||^2 ridge. Adds strong convexity while preserving
/// exact-zero gradient support.
pub struct Ridged<'a, T: Real> {
    pub base: &'a dyn FirstOrder<T>,
    pub sc: T,
}

impl<'a, T: Real> FirstOrder<T> for Ridged<'a, T> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn value_grad(&self, x: &[T]) -> (T, Vec<T>) {
        let (v, mut g) = self.base.value_grad(x);
        for (gi, &xi) in g.iter_mut().zip(x) {
            *gi += self.sc * xi;
        }
        (v + self.sc * T::of(0.5) * norm_sq(x), g)
    }
}
