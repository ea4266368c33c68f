//! Scalar abstraction shared by the geometric code.
//!
//! Geometry is written once against [`Scalar`] and instantiated with `f64`
//! (or `f32`) for placements involving irrational scale factors, and with
//! [`Rational`](crate::Rational) where every coordinate is rational so that
//! orientation and area tests are exact.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive};

/// Number type usable as a coordinate.
pub trait Scalar: Signed + Copy + PartialOrd + Debug + Send + Sync + 'static {
    /// `true` for types whose arithmetic never rounds.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;

    /// Best representable approximation of `v`; exact types reject
    /// non-finite input.
    fn from_f64(v: f64) -> Option<Self>;

    fn to_f64(self) -> f64;

    /// Whether a non-negative quantity such as an area is significant.
    /// Exact types compare against zero, floating types against `tol`.
    fn exceeds(self, tol: f64) -> bool {
        if Self::EXACT {
            self > Self::zero()
        } else {
            self.to_f64() > tol
        }
    }

    /// Equality up to `tol` for floats, exact equality otherwise.
    fn near(self, other: Self, tol: f64) -> bool {
        if Self::EXACT {
            self == other
        } else {
            (self - other).abs().to_f64() <= tol
        }
    }

    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }
}

macro_rules! impl_float_scalar {
    ($f:ty) => {
        impl Scalar for $f {
            const EXACT: bool = false;

            fn from_i64(v: i64) -> Self {
                v as $f
            }

            fn from_f64(v: f64) -> Option<Self> {
                Some(v as $f)
            }

            fn to_f64(self) -> f64 {
                self as f64
            }
        }
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

impl Scalar for Ratio<i64> {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(v)
    }

    fn from_f64(v: f64) -> Option<Self> {
        Ratio::approximate_float(v)
    }

    fn to_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Scalar for Ratio<i128> {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(v as i128)
    }

    fn from_f64(v: f64) -> Option<Self> {
        Ratio::approximate_float(v)
    }

    fn to_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn exact_types_compare_without_tolerance() {
        let tiny = Rational::new(1, 1_000_000_000_000);
        assert!(tiny.exceeds(1.0));
        assert!(!Rational::from_i64(0).exceeds(0.0));
        assert!(!1e-12f64.exceeds(1e-9));
        assert!(Rational::new(1, 3).near(Rational::new(2, 6), 0.5));
        assert!(!Rational::new(1, 3).near(Rational::new(1, 4), 0.5));
    }

    #[test]
    fn half_is_exact() {
        assert_eq!(Rational::half() + Rational::half(), Rational::from_i64(1));
        assert_eq!(f32::half(), 0.5);
    }
}
