//! Central finite differences used for derivative cross-checks and for
//! numeric Lipschitz estimation beyond the analytically available orders.

use crate::scalar::Real;

/// First central difference (f(x+h) - f(x-h)) / 2h.
pub fn central_diff<T: Real, F: Fn(T) -> T>(f: F, x: T, h: T) -> T {
    (f(x + h) - f(x - h)) / (T::of(2.0) * h)
}

/// k-th order central difference approximation of the k-th derivative,
/// h^{-k} sum_j (-1)^j C(k,j) f(x + (k/2 - j) h).
pub fn central_diff_k<T: Real, F: Fn(T) -> T>(f: F, x: T, k: u32, h: T) -> T {
    let mut acc = T::zero();
    let mut coeff = 1.0f64; // C(k, 0)
    for j in 0..=k {
        let offset = T::of(k as f64 / 2.0 - j as f64) * h;
        let sign = if j % 2 == 0 { T::one() } else { -T::one() };
        acc += sign * T::of(coeff) * f(x + offset);
        coeff = coeff * (k - j) as f64 / (j + 1) as f64;
    }
    acc / h.powi(k as i32)
}

/// Step size for estimating a derivative of the given total order,
/// eps^{1/(order+2)} scaled by max(1, |x|).
pub fn default_step<T: Real>(order: u32, x: T) -> T {
    T::epsilon().powf(T::one() / T::of((order + 2) as f64)) * T::one().max(x.abs())
}

/// Gradient by per-coordinate central differences.
pub fn gradient<T: Real, F: Fn(&[T]) -> T>(f: F, x: &[T], step_scale: T) -> Vec<T> {
    let mut xp = x.to_vec();
    let mut g = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let h = step_scale * T::one().max(x[i].abs());
        let xi = x[i];
        xp[i] = xi + h;
        let fp = f(&xp);
        xp[i] = xi - h;
        let fm = f(&xp);
        xp[i] = xi;
        g.push((fp - fm) / (T::of(2.0) * h));
    }
    g
}
