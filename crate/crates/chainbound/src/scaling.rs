//! Turn a problem-class description (smoothness order, value gap or
//! minimizer-norm bound, Lipschitz constants, target accuracy) into a fully
//! instantiated hard instance plus the predicted iteration lower bound.
//!
//! The unpinned analytic smoothness constants of the chain and of the bump
//! are replaced by cached empirical estimates; plans expose the constants
//! they used so callers can substitute their own.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::instances::{
    bump_value_grad, distance_bounded_value_grad, BaseChain, ChainParams, DistanceBoundedInstance,
    Instance, ScaledInstance,
};
use crate::numdiff;
use crate::rng::Rng;
use crate::scalar::Real;
use crate::upsilon::empirical_ell;
use crate::verifiers::convex_min_grad_exact;

/// Target function class: highest Lipschitz order p, either a value gap
/// (delta) or a minimizer-norm bound (dist_bound), the constants L_1..L_p,
/// and the stationarity target epsilon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemClassSpec<T> {
    pub p: usize,
    #[serde(default = "none_t")]
    pub delta: Option<T>,
    #[serde(default = "none_t", rename = "d")]
    pub dist_bound: Option<T>,
    pub lipschitz: Vec<T>,
    pub epsilon: T,
}

fn none_t<T>() -> Option<T> {
    None
}

impl<T: Real> ProblemClassSpec<T> {
    pub fn with_delta(p: usize, delta: T, lipschitz: Vec<T>, epsilon: T) -> Result<Self, Error> {
        let spec = ProblemClassSpec {
            p,
            delta: Some(delta),
            dist_bound: None,
            lipschitz,
            epsilon,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_distance(p: usize, d: T, lipschitz: Vec<T>, epsilon: T) -> Result<Self, Error> {
        let spec = ProblemClassSpec {
            p,
            delta: None,
            dist_bound: Some(d),
            lipschitz,
            epsilon,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.p < 1 {
            return Err(Error::invalid("p must be >= 1"));
        }
        match (self.delta, self.dist_bound) {
            (Some(d), None) if d > T::zero() => {}
            (None, Some(d)) if d > T::zero() => {}
            _ => {
                return Err(Error::invalid(
                    "exactly one of delta / d must be set, and positive",
                ))
            }
        }
        if self.lipschitz.len() != self.p {
            return Err(Error::invalid(format!(
                "expected {} Lipschitz constants, got {}",
                self.p,
                self.lipschitz.len()
            )));
        }
        if self.lipschitz.iter().any(|&l| !(l > T::zero())) {
            return Err(Error::invalid("Lipschitz constants must be positive"));
        }
        if !(self.epsilon > T::zero()) {
            return Err(Error::invalid("epsilon must be positive"));
        }
        Ok(())
    }

    /// Accuracy hypothesis eps^{q-1} <= L_1^q / L_q for q in 2..=p: the
    /// regime where order-q regularized methods beat plain gradient descent.
    fn check_epsilon_hypothesis(&self) -> Result<(), Error> {
        let l1 = self.lipschitz[0];
        for q in 2..=self.p {
            let lq = self.lipschitz[q - 1];
            let lhs = self.epsilon.powi(q as i32 - 1);
            let rhs = l1.powi(q as i32) / lq;
            if lhs > rhs * (T::one() + T::of(1e-12)) {
                return Err(Error::infeasible(format!(
                    "hypothesis violated at q = {q}: eps^{} = {lhs} > L1^{q}/L{q} = {rhs}",
                    q - 1
                )));
            }
        }
        Ok(())
    }

    fn delta_or_err(&self) -> Result<T, Error> {
        self.delta
            .ok_or_else(|| Error::invalid("this planner needs a value gap (delta)"))
    }

    fn distance_or_err(&self) -> Result<T, Error> {
        self.dist_bound
            .ok_or_else(|| Error::invalid("this planner needs a minimizer-norm bound (d)"))
    }

    /// Copy with every Lipschitz constant halved; the distance-bounded
    /// planner budgets half the class smoothness to the chain and half to
    /// the bump.
    pub fn halved(&self) -> Self {
        let mut s = self.clone();
        for l in s.lipschitz.iter_mut() {
            *l /= T::of(2.0);
        }
        s
    }
}

/// Smoothness constants feeding the planners. `ell` are the empirical
/// constants of the unscaled chain, `ell_hat` the adjusted constants
/// (ell_hat_1 = 2 ell_1, ell_hat_q = max(ell_q, 4^{q-1} (2 ell_1)^q)),
/// `l_hat` the class constants divided by ell_hat, and `ell_tilde` the
/// empirical constants of the bump.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessConstants<T> {
    pub ell: Vec<T>,
    pub ell_hat: Vec<T>,
    pub l_hat: Vec<T>,
    pub ell_tilde: Vec<T>,
}

impl<T: Real> SmoothnessConstants<T> {
    pub fn from_ell(lipschitz: &[T], ell: &[T], ell_tilde: &[T]) -> Result<Self, Error> {
        let p = lipschitz.len();
        if ell.len() != p || ell_tilde.len() != p {
            return Err(Error::invalid("constant vectors must have length p"));
        }
        let two_ell1 = T::of(2.0) * ell[0];
        let ell_hat: Vec<T> = (1..=p)
            .map(|q| {
                if q == 1 {
                    two_ell1
                } else {
                    ell[q - 1].max(T::of(4.0).powi(q as i32 - 1) * two_ell1.powi(q as i32))
                }
            })
            .collect();
        let l_hat = lipschitz
            .iter()
            .zip(&ell_hat)
            .map(|(&l, &eh)| l / eh)
            .collect();
        Ok(SmoothnessConstants {
            ell: ell.to_vec(),
            ell_hat,
            l_hat,
            ell_tilde: ell_tilde.to_vec(),
        })
    }

    /// Cached empirical constants for the given class constants.
    pub fn empirical(lipschitz: &[T]) -> Result<Self, Error> {
        let p = lipschitz.len();
        let ell: Vec<T> = (1..=p)
            .map(|q| empirical_ell(q).map(T::of))
            .collect::<Result<_, _>>()?;
        let ell_tilde: Vec<T> = (1..=p)
            .map(|q| empirical_bump_ell(q).map(T::of))
            .collect::<Result<_, _>>()?;
        Self::from_ell(lipschitz, &ell, &ell_tilde)
    }
}

/// Instance family a plan instantiates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanFamily {
    ConvexValue,
    ConvexDistance,
    NonconvexP2,
    NonconvexGeneral,
    DistanceBounded,
}

impl PlanFamily {
    pub fn as_str(&self) -> &'static str {
        match self {
            PlanFamily::ConvexValue => "convex-value",
            PlanFamily::ConvexDistance => "convex-distance",
            PlanFamily::NonconvexP2 => "nonconvex-p2",
            PlanFamily::NonconvexGeneral => "nonconvex-general",
            PlanFamily::DistanceBounded => "distance-bounded",
        }
    }
}

impl std::str::FromStr for PlanFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "convex-value" => Ok(PlanFamily::ConvexValue),
            "convex-distance" => Ok(PlanFamily::ConvexDistance),
            "nonconvex-p2" => Ok(PlanFamily::NonconvexP2),
            "nonconvex-general" => Ok(PlanFamily::NonconvexGeneral),
            "distance-bounded" => Ok(PlanFamily::DistanceBounded),
            _ => Err(Error::invalid(format!("unknown family '{s}'"))),
        }
    }
}

/// Full instantiation of a hard instance for one problem class, plus the
/// un-floored predicted lower bound for the requested family.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalingPlan<T> {
    /// Family actually instantiated (differs from `requested` only when the
    /// value-gap case split sent a non-convex request to the convex plan).
    pub family: PlanFamily,
    pub requested: PlanFamily,
    pub lambda: T,
    pub sigma: T,
    pub mu: T,
    pub r: T,
    pub alpha: T,
    pub t: usize,
    /// Un-floored lower-bound expression for the requested family.
    pub predicted_t: T,
    pub qstar: Option<usize>,
    pub fell_back: bool,
    pub lambda_tilde: Option<T>,
    pub dist_bound: Option<T>,
    pub spec: ProblemClassSpec<T>,
    pub constants: SmoothnessConstants<T>,
}

impl<T: Real> ScalingPlan<T> {
    /// Build the instance this plan describes.
    pub fn instance(&self) -> Result<Instance<T>, Error> {
        match self.family {
            PlanFamily::ConvexValue | PlanFamily::ConvexDistance => {
                let params = ChainParams::convex(self.t, self.alpha)?;
                Ok(Instance::Scaled(ScaledInstance::new(
                    BaseChain::Convex(params),
                    self.lambda,
                    self.sigma,
                )?))
            }
            PlanFamily::NonconvexP2 | PlanFamily::NonconvexGeneral => {
                let params = ChainParams::nonconvex(self.t, self.mu, self.r)?;
                Ok(Instance::Scaled(ScaledInstance::new(
                    BaseChain::Nonconvex(params),
                    self.lambda,
                    self.sigma,
                )?))
            }
            PlanFamily::DistanceBounded => {
                let params = ChainParams::nonconvex(self.t, self.mu, self.r)?;
                let inner =
                    ScaledInstance::new(BaseChain::Nonconvex(params), self.lambda, self.sigma)?;
                let lt = self
                    .lambda_tilde
                    .ok_or_else(|| Error::invalid("distance plan missing lambda_tilde"))?;
                let d = self
                    .dist_bound
                    .ok_or_else(|| Error::invalid("distance plan missing d"))?;
                Ok(Instance::DistanceBounded(DistanceBoundedInstance::new(
                    inner, lt, d,
                )?))
            }
        }
    }
}

/// Floor after snapping values within 1e-12 relative of an integer, so
/// formula evaluations like 2/(4*0.01) floor to 50 rather than 49.
pub fn floor_dust<T: Real>(x: T) -> T {
    let nearest = x.round();
    if (x - nearest).abs() <= T::of(1e-12) * x.abs().max(T::one()) {
        nearest
    } else {
        x.floor()
    }
}

fn usize_floor<T: Real>(x: T) -> Result<usize, Error> {
    let f = floor_dust(x);
    if !(f >= T::one()) {
        return Err(Error::infeasible(format!(
            "T = floor({x}) < 1: target accuracy trivially achievable at this scale"
        )));
    }
    f.to_usize()
        .ok_or_else(|| Error::infeasible(format!("T = {f} does not fit usize")))
}

/// Re-check of the large-gradient condition lambda mu^{3/4} sigma >= 4 eps.
fn check_gradient_condition<T: Real>(lambda: T, mu: T, sigma: T, eps: T) -> Result<(), Error> {
    let lhs = lambda * mu.powf(T::of(0.75)) * sigma;
    if lhs < T::of(4.0) * eps * (T::one() - T::of(1e-9)) {
        return Err(Error::infeasible(format!(
            "gradient condition failed: lambda mu^3/4 sigma = {lhs} < 4 eps"
        )));
    }
    Ok(())
}

/// Convex plan for the value-gap class: T = floor(sqrt(L1 Delta)/(4 eps)),
/// alpha = 1/T, lambda = L1/4, sigma = (T - 1 + 1/alpha)^{3/2} eps / lambda.
pub fn plan_convex_value<T: Real>(spec: &ProblemClassSpec<T>) -> Result<ScalingPlan<T>, Error> {
    spec.validate()?;
    let delta = spec.delta_or_err()?;
    let l1 = spec.lipschitz[0];
    let eps = spec.epsilon;
    let predicted = (l1 * delta).sqrt() / (T::of(4.0) * eps);
    let t = usize_floor(predicted)?;
    let alpha = T::one() / T::of_usize(t);
    let lambda = l1 / T::of(4.0);
    let sigma = (T::of_usize(t - 1) + T::one() / alpha).powf(T::of(1.5)) * eps / lambda;

    let gap = lambda * sigma * sigma * alpha / T::of(2.0);
    if gap > delta * (T::one() + T::of(1e-9)) {
        return Err(Error::infeasible(format!(
            "value gap {gap} exceeds delta {delta}"
        )));
    }
    let floor = lambda * sigma * convex_min_grad_exact(t, alpha)?;
    if !(floor > eps) {
        return Err(Error::infeasible(format!(
            "gradient floor {floor} does not exceed eps"
        )));
    }

    Ok(ScalingPlan {
        family: PlanFamily::ConvexValue,
        requested: PlanFamily::ConvexValue,
        lambda,
        sigma,
        mu: T::one(),
        r: T::one(),
        alpha,
        t,
        predicted_t: predicted,
        qstar: None,
        fell_back: false,
        lambda_tilde: None,
        dist_bound: None,
        spec: spec.clone(),
        constants: SmoothnessConstants::empirical(&spec.lipschitz)?,
    })
}

/// Convex plan for the minimizer-norm class: alpha = 1,
/// T = floor(sqrt(L1 D)/2 eps^{-1/2}), sigma chosen so ||x*|| = sigma sqrt(T) <= D.
pub fn plan_convex_distance<T: Real>(spec: &ProblemClassSpec<T>) -> Result<ScalingPlan<T>, Error> {
    spec.validate()?;
    let d = spec.distance_or_err()?;
    let l1 = spec.lipschitz[0];
    let eps = spec.epsilon;
    let predicted = (l1 * d).sqrt() / (T::of(2.0) * eps.sqrt());
    let t = usize_floor(predicted)?;
    let alpha = T::one();
    let lambda = l1 / T::of(4.0);
    let sigma = (T::of_usize(t - 1) + T::one()).powf(T::of(1.5)) * eps / lambda;

    let minimizer_norm = sigma * T::of_usize(t).sqrt();
    if minimizer_norm > d * (T::one() + T::of(1e-9)) {
        return Err(Error::infeasible(format!(
            "minimizer norm {minimizer_norm} exceeds D = {d}"
        )));
    }
    let floor = lambda * sigma * convex_min_grad_exact(t, alpha)?;
    if !(floor > eps) {
        return Err(Error::infeasible(format!(
            "gradient floor {floor} does not exceed eps"
        )));
    }

    Ok(ScalingPlan {
        family: PlanFamily::ConvexDistance,
        requested: PlanFamily::ConvexDistance,
        lambda,
        sigma,
        mu: T::one(),
        r: T::one(),
        alpha,
        t,
        predicted_t: predicted,
        qstar: None,
        fell_back: false,
        lambda_tilde: None,
        dist_bound: Some(d),
        spec: spec.clone(),
        constants: SmoothnessConstants::empirical(&spec.lipschitz)?,
    })
}

/// Scale selection shared by the two non-convex planners.
struct NonconvexScales<T> {
    lambda: T,
    sigma: T,
    mu: T,
    r: T,
    qstar: Option<usize>,
}

fn p2_scales<T: Real>(
    consts: &SmoothnessConstants<T>,
    eps: T,
) -> Result<NonconvexScales<T>, Error> {
    let l1h = consts.l_hat[0];
    let l2h = consts.l_hat[1];
    let lambda = l1h;
    let sigma = (T::of(4.0) * l1h.powf(T::of(-0.25)) * l2h.powf(T::of(-0.75)) * eps)
        .powf(T::of(4.0) / T::of(7.0));
    let mu = l2h * sigma / lambda;
    if mu > T::one() * (T::one() + T::of(1e-12)) {
        return Err(Error::infeasible(format!(
            "mu = {mu} > 1; epsilon too large for this class"
        )));
    }
    check_gradient_condition(lambda, mu, sigma, eps)?;
    Ok(NonconvexScales {
        lambda,
        sigma,
        mu: mu.min(T::one()),
        r: T::one(),
        qstar: None,
    })
}

fn general_scales<T: Real>(
    consts: &SmoothnessConstants<T>,
    p: usize,
    eps: T,
) -> Result<NonconvexScales<T>, Error> {
    let l1h = consts.l_hat[0];
    // argmin over q in {2..p} of (Lhat_q / Lhat_1)^{1/(q-1)}, ties to smaller q
    let mut qstar = 2usize;
    let mut best = (consts.l_hat[1] / l1h).powf(T::one() / T::of_usize(1));
    for q in 3..=p {
        let cand = (consts.l_hat[q - 1] / l1h).powf(T::one() / T::of_usize(q - 1));
        if cand < best {
            best = cand;
            qstar = q;
        }
    }
    let lqh = consts.l_hat[qstar - 1];
    let qm1 = T::of_usize(qstar - 1);
    let lambda = l1h;
    let mu_bar = l1h * (lqh / l1h).powf(T::of(2.0) / qm1);
    let r_bar = (l1h / lqh).powf(T::one() / qm1);
    let sigma = (T::of(4.0) / l1h * (lqh / l1h).powf(-T::of(1.5) / qm1) * eps).powf(T::of(0.4));
    let mu = mu_bar * sigma * sigma / lambda;
    let r = r_bar / sigma;
    if mu > T::one() * (T::one() + T::of(1e-12)) {
        return Err(Error::infeasible(format!(
            "mu = {mu} > 1; epsilon too large for this class"
        )));
    }
    if r < T::one() * (T::one() - T::of(1e-12)) {
        return Err(Error::infeasible(format!(
            "r = {r} < 1; epsilon too large for this class"
        )));
    }
    // membership guard: r_bar^{3-q} mu_bar <= Lhat_q for all q
    for q in 1..=p {
        let lhs = r_bar.powi(3 - q as i32) * mu_bar;
        if lhs > consts.l_hat[q - 1] * (T::one() + T::of(1e-9)) {
            return Err(Error::infeasible(format!(
                "smoothness bar missed at q = {q}: {lhs} > {}",
                consts.l_hat[q - 1]
            )));
        }
    }
    check_gradient_condition(lambda, mu, sigma, eps)?;
    Ok(NonconvexScales {
        lambda,
        sigma,
        mu: mu.min(T::one()),
        r: r.max(T::one()),
        qstar: Some(qstar),
    })
}

fn finish_nonconvex<T: Real>(
    spec: &ProblemClassSpec<T>,
    consts: &SmoothnessConstants<T>,
    requested: PlanFamily,
    scales: NonconvexScales<T>,
) -> Result<ScalingPlan<T>, Error> {
    let delta = spec.delta_or_err()?;
    let predicted = predicted_lower_bound(spec, consts, requested)?;
    let NonconvexScales {
        lambda,
        sigma,
        mu,
        r,
        qstar,
    } = scales;
    let chain_gap = lambda * mu.sqrt() * sigma * sigma;
    if chain_gap > delta {
        // proof's case split: the convex bound dominates here
        let mut plan = plan_convex_value(spec)?;
        plan.requested = requested;
        plan.fell_back = true;
        plan.predicted_t = predicted;
        plan.qstar = qstar;
        plan.constants = consts.clone();
        return Ok(plan);
    }
    let t_expr = (delta - chain_gap / T::of(2.0)) / (T::of(10.0) * lambda * mu * sigma * sigma);
    let t = usize_floor(t_expr)?;
    Ok(ScalingPlan {
        family: requested,
        requested,
        lambda,
        sigma,
        mu,
        r,
        alpha: mu.sqrt(),
        t,
        predicted_t: predicted,
        qstar,
        fell_back: false,
        lambda_tilde: None,
        dist_bound: None,
        spec: spec.clone(),
        constants: consts.clone(),
    })
}

/// Non-convex plan for p = 2 (Lipschitz gradient and Hessian): r = 1,
/// lambda = Lhat_1, sigma = (4 Lhat_1^{-1/4} Lhat_2^{-3/4} eps)^{4/7},
/// mu = Lhat_2 sigma / lambda. Falls back to the convex plan when the
/// chain's own value gap would exceed delta.
pub fn plan_nonconvex_p2<T: Real>(
    spec: &ProblemClassSpec<T>,
    consts: &SmoothnessConstants<T>,
) -> Result<ScalingPlan<T>, Error> {
    spec.validate()?;
    if spec.p != 2 {
        return Err(Error::invalid(format!(
            "p2 planner needs p = 2, got p = {}",
            spec.p
        )));
    }
    spec.check_epsilon_hypothesis()?;
    let scales = p2_scales(consts, spec.epsilon)?;
    finish_nonconvex(spec, consts, PlanFamily::NonconvexP2, scales)
}

/// Non-convex plan for p >= 3: the minimizing order qstar fixes
/// epsilon-free bar parameters mu_bar and r_bar, then sigma scales as
/// eps^{2/5}. Same convex fallback as the p = 2 plan.
pub fn plan_nonconvex_general<T: Real>(
    spec: &ProblemClassSpec<T>,
    consts: &SmoothnessConstants<T>,
) -> Result<ScalingPlan<T>, Error> {
    spec.validate()?;
    if spec.p < 3 {
        return Err(Error::invalid(format!(
            "general planner needs p >= 3, got p = {}; p = 1 is the classical gradient-descent regime",
            spec.p
        )));
    }
    spec.check_epsilon_hypothesis()?;
    let scales = general_scales(consts, spec.p, spec.epsilon)?;
    finish_nonconvex(spec, consts, PlanFamily::NonconvexGeneral, scales)
}

/// Distance-bounded plan: non-convex scales with every L_q halved, bump
/// depth lambda_tilde = min_q L_q D^{q+1} / (2 ell_tilde_q), and T chosen
/// so the planted minimum makes f(0.8 D e^(T+2)) < 0.
pub fn plan_distance_bounded<T: Real>(
    spec: &ProblemClassSpec<T>,
    consts_halved: &SmoothnessConstants<T>,
) -> Result<(ScalingPlan<T>, DistanceBoundedInstance<T>), Error> {
    spec.validate()?;
    let d = spec.distance_or_err()?;
    if spec.p < 2 {
        return Err(Error::invalid("distance-bounded planner needs p >= 2"));
    }
    let halved = spec.halved();
    halved.check_epsilon_hypothesis()?;
    let eps = spec.epsilon;
    let scales = if spec.p == 2 {
        p2_scales(consts_halved, eps)?
    } else {
        general_scales(consts_halved, spec.p, eps)?
    };
    let NonconvexScales {
        lambda,
        sigma,
        mu,
        r,
        qstar,
    } = scales;

    let mut lambda_tilde = T::infinity();
    for q in 1..=spec.p {
        let cand = spec.lipschitz[q - 1] * d.powi(q as i32 + 1)
            / (T::of(2.0) * consts_halved.ell_tilde[q - 1]);
        lambda_tilde = lambda_tilde.min(cand);
    }

    let chain_gap = lambda * mu.sqrt() * sigma * sigma;
    let t_expr =
        (lambda_tilde - chain_gap / T::of(2.0)) / (T::of(10.0) * lambda * mu * sigma * sigma);
    let t = usize_floor(t_expr)?;

    let params = ChainParams::nonconvex(t, mu, r)?;
    let inner = ScaledInstance::new(BaseChain::Nonconvex(params), lambda, sigma)?;
    let instance = DistanceBoundedInstance::new(inner, lambda_tilde, d)?;

    // planted minimum must be visible: f(0.8 D e^(T+2)) < 0
    let mut probe = vec![T::zero(); t + 2];
    probe[t + 1] = T::of(0.8) * d;
    let (at_bump, _) = distance_bounded_value_grad(&probe, &instance)?;
    if !(at_bump < T::zero()) {
        return Err(Error::infeasible(format!(
            "bump not deep enough: f(0.8 D e) = {at_bump} >= 0"
        )));
    }

    let mut spec_for_bound = spec.clone();
    spec_for_bound.delta = Some(lambda_tilde);
    spec_for_bound.dist_bound = None;
    let predicted = predicted_lower_bound(
        &spec_for_bound,
        consts_halved,
        if spec.p == 2 {
            PlanFamily::NonconvexP2
        } else {
            PlanFamily::NonconvexGeneral
        },
    )?;

    let plan = ScalingPlan {
        family: PlanFamily::DistanceBounded,
        requested: PlanFamily::DistanceBounded,
        lambda,
        sigma,
        mu,
        r,
        alpha: mu.sqrt(),
        t,
        predicted_t: predicted,
        qstar,
        fell_back: false,
        lambda_tilde: Some(lambda_tilde),
        dist_bound: Some(d),
        spec: spec.clone(),
        constants: consts_halved.clone(),
    };
    Ok((plan, instance))
}

/// Closed-form lower-bound expression for the requested family, using the
/// supplied constants and the proof's explicit prefactors
/// 1/(20 4^{8/5}) and 1/(20 4^{12/7}).
pub fn predicted_lower_bound<T: Real>(
    spec: &ProblemClassSpec<T>,
    consts: &SmoothnessConstants<T>,
    family: PlanFamily,
) -> Result<T, Error> {
    spec.validate()?;
    let eps = spec.epsilon;
    match family {
        PlanFamily::ConvexValue => {
            let delta = spec.delta_or_err()?;
            Ok((spec.lipschitz[0] * delta).sqrt() / (T::of(4.0) * eps))
        }
        PlanFamily::ConvexDistance => {
            let d = spec.distance_or_err()?;
            Ok((spec.lipschitz[0] * d).sqrt() / (T::of(2.0) * eps.sqrt()))
        }
        PlanFamily::NonconvexP2 => {
            let delta = spec.delta_or_err()?;
            if spec.p < 2 {
                return Err(Error::invalid("p2 bound needs p >= 2"));
            }
            let c = T::of(20.0) * T::of(4.0).powf(T::of(12.0) / T::of(7.0));
            Ok(delta
                * consts.l_hat[0].powf(T::of(3.0) / T::of(7.0))
                * consts.l_hat[1].powf(T::of(2.0) / T::of(7.0))
                / (c * eps.powf(T::of(12.0) / T::of(7.0))))
        }
        PlanFamily::NonconvexGeneral => {
            let delta = spec.delta_or_err()?;
            if spec.p < 2 {
                return Err(Error::invalid("general bound needs p >= 2"));
            }
            let l1h = consts.l_hat[0];
            let mut best = T::infinity();
            for q in 2..=spec.p {
                let ratio = (consts.l_hat[q - 1] / l1h)
                    .powf(T::of(2.0) / (T::of(5.0) * T::of_usize(q - 1)));
                best = best.min(ratio);
            }
            let c = T::of(20.0) * T::of(4.0).powf(T::of(1.6));
            Ok(delta * l1h.powf(T::of(0.6)) * best / (c * eps.powf(T::of(1.6))))
        }
        PlanFamily::DistanceBounded => {
            // delta replaced by the bump depth, constants already halved
            let mut inner_spec = spec.clone();
            if inner_spec.delta.is_none() {
                let d = spec.distance_or_err()?;
                let mut lt = T::infinity();
                for q in 1..=spec.p {
                    lt = lt.min(
                        spec.lipschitz[q - 1] * d.powi(q as i32 + 1)
                            / (T::of(2.0) * consts.ell_tilde[q - 1]),
                    );
                }
                inner_spec.delta = Some(lt);
                inner_spec.dist_bound = None;
            }
            let fam = if spec.p == 2 {
                PlanFamily::NonconvexP2
            } else {
                PlanFamily::NonconvexGeneral
            };
            predicted_lower_bound(&inner_spec, consts, fam)
        }
    }
}

/// Plan the requested family with empirical constants.
pub fn plan(family: PlanFamily, spec: &ProblemClassSpec<f64>) -> Result<ScalingPlan<f64>, Error> {
    match family {
        PlanFamily::ConvexValue => plan_convex_value(spec),
        PlanFamily::ConvexDistance => plan_convex_distance(spec),
        PlanFamily::NonconvexP2 => {
            let consts = SmoothnessConstants::empirical(&spec.lipschitz)?;
            plan_nonconvex_p2(spec, &consts)
        }
        PlanFamily::NonconvexGeneral => {
            let consts = SmoothnessConstants::empirical(&spec.lipschitz)?;
            plan_nonconvex_general(spec, &consts)
        }
        PlanFamily::DistanceBounded => {
            let halved = spec.halved();
            let consts = SmoothnessConstants::empirical(&halved.lipschitz)?;
            plan_distance_bounded(spec, &consts).map(|(p, _)| p)
        }
    }
}

/// Empirical Lipschitz constant of the q-th derivative of the bump, by
/// maximizing finite-difference (q+1)-th derivatives of 1D projections
/// t -> h(p + t v) over sampled lines through the support ball. Exploits
/// the analytic bump gradient: the (q+1)-th derivative of the projection
/// is the q-th difference of t -> v' grad h(p + t v).
pub fn empirical_bump_ell(q: usize) -> Result<f64, Error> {
    const MAX_ORDER: usize = 8;
    static CACHE: OnceLock<Vec<f64>> = OnceLock::new();
    if q == 0 || q > MAX_ORDER {
        return Err(Error::invalid(format!(
            "empirical bump constant available for 1 <= q <= {MAX_ORDER}, got {q}"
        )));
    }
    let cache = CACHE.get_or_init(|| {
        let dim = 3usize;
        let center = {
            let mut c = vec![0.0; dim];
            c[dim - 1] = 0.8;
            c
        };
        let mut rng = Rng::new(0xb0a5_e11a);
        let mut lines = Vec::new();
        for _ in 0..300 {
            // point near the support ball of radius 1/5 around the center
            let dir = rng.unit_vector(dim);
            let rad = 0.25 * rng.uniform();
            let p: Vec<f64> = center
                .iter()
                .zip(&dir)
                .map(|(&c, &d)| c + rad * d)
                .collect();
            let v = rng.unit_vector(dim);
            lines.push((p, v));
        }
        (1..=MAX_ORDER)
            .map(|q| {
                let mut best = 0.0f64;
                let h = f64::EPSILON.powf(1.0 / (q as f64 + 3.0)) * 0.25;
                for (p, v) in &lines {
                    let dir_grad = |t: f64| {
                        let x: Vec<f64> = p.iter().zip(v).map(|(&pi, &vi)| pi + t * vi).collect();
                        let (_, g) = bump_value_grad(&x);
                        g.iter().zip(v).map(|(a, b)| a * b).sum::<f64>()
                    };
                    for k in 0..=80 {
                        let t = -0.3 + 0.6 * k as f64 / 80.0;
                        let d = numdiff::central_diff_k(dir_grad, t, q as u32, h).abs();
                        if d > best {
                            best = d;
                        }
                    }
                }
                best
            })
            .collect()
    });
    Ok(cache[q - 1])
}
