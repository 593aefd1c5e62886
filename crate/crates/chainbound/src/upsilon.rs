//! The scalar non-convexity Upsilon_r: value, analytic first and second
//! derivatives, and numeric Lipschitz estimation of higher derivatives.
//!
//! Upsilon_r(x) = 120 * integral_1^x t^2 (t-1) / (1 + (t/r)^2) dt, r >= 1.
//! The integrand is rational, so the value has an exact antiderivative
//! (polynomial + log + arctangent). Evaluating that antiderivative naively
//! loses all precision once r >> |x| (the three groups are O(r^2) and cancel
//! to O(1)), so for r >= 2*max(|x|,1) we instead expand about r = infinity:
//! Upsilon_inf(x) = 30x^4 - 40x^3 + 10 minus a fast-converging correction
//! series in 1/r^2. Both routes are exact rearrangements of the same
//! integral and are cross-checked against adaptive quadrature in tests.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::numdiff;
use crate::scalar::Real;

/// Scale parameter of Upsilon_r.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpsilonParams<T> {
    r: T,
}

impl<T: Real> UpsilonParams<T> {
    pub fn new(r: T) -> Result<Self, Error> {
        if !(r >= T::one()) || !r.is_finite() {
            return Err(Error::invalid(format!(
                "upsilon scale r = {r} must be >= 1"
            )));
        }
        Ok(UpsilonParams { r })
    }

    pub fn r(&self) -> T {
        self.r
    }
}

/// Upsilon_r(x), anchored so that Upsilon_r(1) = 0 exactly.
pub fn upsilon_value<T: Real>(x: T, params: &UpsilonParams<T>) -> T {
    let r = params.r;
    if x.abs().max(T::one()) * T::of(2.0) <= r {
        value_large_r(x, r)
    } else {
        value_closed_form(x, r)
    }
}

/// Closed-form antiderivative, grouped so each term vanishes at x = 1:
///   120 [ r^2 (x-1)^2 / 2
///         - (r^4/2) ln(1 + (x^2-1)/(1+r^2))
///         + r^3 (atan(x/r) - atan(1/r)) ]
/// with the atan difference computed as atan2((x-1)/r, 1 + x/r^2).
fn value_closed_form<T: Real>(x: T, r: T) -> T {
    let half = T::of(0.5);
    let r2 = r * r;
    let poly = r2 * (x - T::one()) * (x - T::one()) * half;
    let log_term = -(r2 * r2) * half * ((x * x - T::one()) / (T::one() + r2)).ln_1p();
    let atan_term = r2 * r * T::atan2((x - T::one()) / r, T::one() + x / r2);
    T::of(120.0) * (poly + log_term + atan_term)
}

/// Expansion about r = infinity:
///   Upsilon_r(x) = 30x^4 - 40x^3 + 10
///                  - 120 sum_{k>=0} (-1)^k r^{-(2+2k)} I_{4+2k}(x),
/// where I_n(x) = (x^{n+2}-1)/(n+2) - (x^{n+1}-1)/(n+1). Converges at
/// ratio (max(|x|,1)/r)^2 <= 1/4 in this branch.
fn value_large_r<T: Real>(x: T, r: T) -> T {
    let lead = T::of(30.0) * x.powi(4) - T::of(40.0) * x.powi(3) + T::of(10.0);
    let inv_r2 = T::one() / (r * r);
    let mut correction = T::zero();
    let mut scale = inv_r2;
    let mut sign = T::one();
    // x^{n+1} with n = 4 at the first term
    let mut x_pow = x.powi(5);
    for k in 0..60 {
        let n = 4 + 2 * k;
        let i_hi = (x_pow * x - T::one()) / T::of((n + 2) as f64);
        let i_lo = (x_pow - T::one()) / T::of((n + 1) as f64);
        let term = sign * scale * (i_hi - i_lo);
        correction += term;
        if term.abs() <= correction.abs().max(T::one()) * T::epsilon() {
            break;
        }
        scale *= inv_r2;
        sign = -sign;
        x_pow = x_pow * x * x;
    }
    lead - T::of(120.0) * correction
}

/// Analytic derivative of Upsilon_r. Order 1 is the displayed rational
/// expression 120 x^2 (x-1) / (1 + (x/r)^2); order 2 is its quotient-rule
/// derivative. Higher orders are not provided analytically.
pub fn upsilon_deriv<T: Real>(x: T, params: &UpsilonParams<T>, order: u32) -> Result<T, Error> {
    let r = params.r;
    let w = x / r;
    let den = T::one() + w * w;
    match order {
        1 => Ok(T::of(120.0) * x * x * (x - T::one()) / den),
        2 => {
            let num = T::of(3.0) * x * x - T::of(2.0) * x + x.powi(4) / (r * r);
            Ok(T::of(120.0) * num / (den * den))
        }
        _ => Err(Error::UnsupportedOrder(order)),
    }
}

/// q-th derivative of Upsilon_r for any q >= 1: analytic for q <= 2,
/// nested central differences of the second derivative beyond that,
/// with step eps^{1/(q+2)} scaled by max(1, |x|).
pub fn upsilon_deriv_numeric<T: Real>(x: T, params: &UpsilonParams<T>, order: u32) -> T {
    match order {
        1 | 2 => upsilon_deriv(x, params, order).expect("analytic order"),
        q => {
            let h = numdiff::default_step(q, x);
            numdiff::central_diff_k(
                |t| upsilon_deriv(t, params, 2).expect("analytic order"),
                x,
                q - 2,
                h,
            )
        }
    }
}

/// Uniform sampling grid.
#[derive(Clone, Copy, Debug)]
pub struct GridSpec<T> {
    pub lo: T,
    pub hi: T,
    pub points: usize,
}

impl<T: Real> GridSpec<T> {
    /// Default grid for Lipschitz estimation: [-2r, 2r] sampled densely.
    pub fn covering(params: &UpsilonParams<T>, points: usize) -> Self {
        let r = params.r;
        GridSpec {
            lo: -T::of(2.0) * r,
            hi: T::of(2.0) * r,
            points,
        }
    }

    pub fn step(&self) -> T {
        (self.hi - self.lo) / T::of_usize(self.points.max(2) - 1)
    }
}

/// Grid-maximization estimate of a Lipschitz constant.
#[derive(Clone, Copy, Debug)]
pub struct LipschitzEstimate<T> {
    /// Lower bound on the true constant (a sampled supremum).
    pub value: T,
    /// Grid resolution the supremum was taken over.
    pub grid_step: T,
}

/// Estimate the Lipschitz constant of the q-th derivative of Upsilon_r by
/// maximizing |Upsilon^(q+1)| over the grid. The grid must cover at least
/// [-2r, 2r]; the rational structure keeps the supremum at moderate |x|.
pub fn upsilon_lipschitz_estimate<T: Real>(
    params: &UpsilonParams<T>,
    order: u32,
    grid: &GridSpec<T>,
) -> Result<LipschitzEstimate<T>, Error> {
    if grid.points == 0 {
        return Err(Error::EmptyGrid);
    }
    if order == 0 {
        return Err(Error::invalid("lipschitz order must be >= 1"));
    }
    let two_r = T::of(2.0) * params.r;
    if grid.lo > -two_r || grid.hi < two_r {
        return Err(Error::invalid(format!(
            "grid [{}, {}] must cover [-2r, 2r] = [{}, {}]",
            grid.lo, grid.hi, -two_r, two_r
        )));
    }
    let step = grid.step();
    let mut best = T::zero();
    for k in 0..grid.points {
        let x = grid.lo + step * T::of_usize(k);
        let d = upsilon_deriv_numeric(x, params, order + 1).abs();
        if d > best {
            best = d;
        }
    }
    Ok(LipschitzEstimate {
        value: best,
        grid_step: step,
    })
}

/// max over z in [0, 1] of |Upsilon_r'(z)|, by grid maximization. This is
/// the constant G entering the tightness certificate of the gradient floor.
pub fn grad_cap_on_unit<T: Real>(params: &UpsilonParams<T>) -> T {
    let n = 20_000usize;
    let mut best = T::zero();
    for k in 0..=n {
        let z = T::of_usize(k) / T::of_usize(n);
        let d = upsilon_deriv(z, params, 1).expect("order 1").abs();
        if d > best {
            best = d;
        }
    }
    best
}

/// Largest derivative order with a cached empirical smoothness constant.
pub const MAX_EMPIRICAL_ORDER: usize = 8;

/// Empirical smoothness constant ell_q of the unscaled chain: the sampled
/// Lipschitz constant of the q-th derivative of Upsilon_1, floored at 4 for
/// q = 1 so it also covers the quadratic links. Cached after first use;
/// the scaling planners consume these in place of the unpinned analytic
/// constants.
pub fn empirical_ell(q: usize) -> Result<f64, Error> {
    static CACHE: OnceLock<Vec<f64>> = OnceLock::new();
    if q == 0 || q > MAX_EMPIRICAL_ORDER {
        return Err(Error::invalid(format!(
            "empirical ell available for 1 <= q <= {MAX_EMPIRICAL_ORDER}, got {q}"
        )));
    }
    let cache = CACHE.get_or_init(|| {
        let params = UpsilonParams::new(1.0f64).expect("r = 1");
        let grid = GridSpec::covering(&params, 200_001);
        (1..=MAX_EMPIRICAL_ORDER)
            .map(|q| {
                let est = upsilon_lipschitz_estimate(&params, q as u32, &grid)
                    .expect("default grid")
                    .value;
                if q == 1 {
                    est.max(4.0)
                } else {
                    est
                }
            })
            .collect()
    });
    Ok(cache[q - 1])
}
