//! Scalar abstraction shared by the analytic modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the lattice, Lévy, min-ID and score machinery is generic over.
///
/// Implemented for `f32` and `f64`. Frailty sampling and quadrature are `f64` only.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal into `Self`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Compensated (Neumaier) summation.
pub fn neumaier_sum<T: Scalar>(values: impl IntoIterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp = comp + ((sum - t) + v);
        } else {
            comp = comp + ((v - t) + sum);
        }
        sum = t;
    }
    sum + comp
}

/// Pairwise summation; deterministic for a fixed input order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 64;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// `(-1)^n` as a scalar.
pub fn sign_pow<T: Scalar>(n: usize) -> T {
    if n.is_multiple_of(2) {
        T::one()
    } else {
        -T::one()
    }
}

/// `ln(1+g) - g`, accurate for small `|g|`.
pub fn log1p_minus<T: Scalar>(g: T) -> T {
    if g.abs() < T::lit(1e-3) {
        let mut pow = g;
        let mut acc = T::zero();
        for k in 2..12 {
            pow = pow * g;
            acc = acc + sign_pow::<T>(k + 1) * pow / T::from_usize_lossy(k);
        }
        acc
    } else {
        g.ln_1p() - g
    }
}
