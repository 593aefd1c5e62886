use core::fmt::{Debug, Display};
use core::iter::Sum;
use core::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar for the core math, implemented for f32 and f64.
pub trait Real:
    Float
    + FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lift an f64 literal into this scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable")
    }

    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count not representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Euclidean norm.
pub fn norm<T: Real>(v: &[T]) -> T {
    v.iter().map(|&x| x * x).sum::<T>().sqrt()
}

/// Squared Euclidean norm.
pub fn norm_sq<T: Real>(v: &[T]) -> T {
    v.iter().map(|&x| x * x).sum::<T>()
}

/// Indices of nonzero coordinates. Exact comparison against 0.0 on purpose:
/// the chain constructions and first-order updates preserve literal zeros,
/// and the support bookkeeping relies on that.
pub fn support<T: Real>(v: &[T]) -> Vec<usize> {
    v.iter()
        .enumerate()
        .filter(|(_, &x)| x != T::zero())
        .map(|(i, _)| i)
        .collect()
}
