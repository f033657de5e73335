//! Scalar abstraction shared by the numeric kernels.
//!
//! Everything that only needs field arithmetic and elementary functions is
//! written against [`Real`], so the same code runs in `f32`, `f64` or in
//! double-double precision ([`twofloat::TwoFloat`]) when a residual has to be
//! resolved below the `f64` rounding floor.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumCast};
use twofloat::TwoFloat;

/// Floating point scalar usable by the generic kernels.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        // NumCast, not FromPrimitive: twofloat's from_f64 truncates to an integer.
        <Self as NumCast>::from(x).expect("f64 literal representable")
    }

    /// Lossy conversion from a count.
    fn count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("count representable")
    }

    /// Unit roundoff. Use this instead of `Float::epsilon`, which twofloat
    /// defines as the smallest positive `f64`.
    fn unit_roundoff() -> Self {
        Self::epsilon()
    }

    /// Nearest `f64`, used for reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
impl Real for TwoFloat {
    fn unit_roundoff() -> Self {
        <TwoFloat as From<f64>>::from(f64::EPSILON * f64::EPSILON)
    }
}

/// Binomial coefficient as a float; exact for the dimensions used here.
pub fn binomial<T: Real>(n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    T::lit(acc.round())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial::<f64>(5, 2), 10.0);
        assert_eq!(binomial::<f64>(8, 0), 1.0);
        assert_eq!(binomial::<f64>(8, 8), 1.0);
        assert_eq!(binomial::<f64>(3, 4), 0.0);
        assert_eq!(binomial::<f64>(20, 10), 184756.0);
    }

    #[test]
    fn twofloat_literals_round_trip() {
        let x = TwoFloat::lit(0.1);
        assert_eq!(x.as_f64(), 0.1);
        assert_eq!(TwoFloat::count(7).as_f64(), 7.0);
        let u = TwoFloat::unit_roundoff();
        assert!(u.as_f64() > 1e-33 && u.as_f64() < 1e-30);
    }
}
