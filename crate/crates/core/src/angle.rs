//! Angles stored as exact rational multiples of π.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::Rational;

/// `coeff · π`, always in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "(i64, i64)", from = "(i64, i64)")]
pub struct PiAngle(Rational);

impl PiAngle {
    pub const ZERO: PiAngle = PiAngle(Rational::new_raw(0, 1));
    pub const PI: PiAngle = PiAngle(Rational::new_raw(1, 1));

    /// `(numer/denom)·π`. Panics if `denom == 0`.
    pub fn new(numer: i64, denom: i64) -> Self {
        PiAngle(Rational::new(numer, denom))
    }

    pub fn from_coeff(coeff: Rational) -> Self {
        PiAngle(coeff)
    }

    /// `2π/q`, the angle a vertex of valence `q` contributes to each tile.
    pub fn full_turn_over(q: i64) -> Self {
        PiAngle::new(2, q)
    }

    pub fn coeff(self) -> Rational {
        self.0
    }

    pub fn numer(self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(self) -> i64 {
        *self.0.denom()
    }

    pub fn radians(self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN) * std::f64::consts::PI
    }

    pub fn abs(self) -> Self {
        PiAngle(self.0.abs())
    }

    pub fn is_zero(self) -> bool {
        self.0.is_zero()
    }

    pub fn signum(self) -> i32 {
        if self.0.is_positive() {
            1
        } else if self.0.is_negative() {
            -1
        } else {
            0
        }
    }
}

impl From<(i64, i64)> for PiAngle {
    fn from((n, d): (i64, i64)) -> Self {
        PiAngle::new(n, d)
    }
}

impl From<PiAngle> for (i64, i64) {
    fn from(a: PiAngle) -> Self {
        (a.numer(), a.denom())
    }
}

impl Add for PiAngle {
    type Output = PiAngle;
    fn add(self, rhs: PiAngle) -> PiAngle {
        PiAngle(self.0 + rhs.0)
    }
}

impl Sub for PiAngle {
    type Output = PiAngle;
    fn sub(self, rhs: PiAngle) -> PiAngle {
        PiAngle(self.0 - rhs.0)
    }
}

impl Neg for PiAngle {
    type Output = PiAngle;
    fn neg(self) -> PiAngle {
        PiAngle(-self.0)
    }
}

impl Mul<Rational> for PiAngle {
    type Output = PiAngle;
    fn mul(self, rhs: Rational) -> PiAngle {
        PiAngle(self.0 * rhs)
    }
}

impl Mul<i64> for PiAngle {
    type Output = PiAngle;
    fn mul(self, rhs: i64) -> PiAngle {
        PiAngle(self.0 * rhs)
    }
}

impl std::iter::Sum for PiAngle {
    fn sum<I: Iterator<Item = PiAngle>>(iter: I) -> PiAngle {
        iter.fold(PiAngle::ZERO, |a, b| a + b)
    }
}

/// Prints as `p/q π`, `p π` for integers, `0` for zero.
impl fmt::Display for PiAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_zero() {
            write!(f, "0")
        } else if *self.0.denom() == 1 {
            write!(f, "{} π", self.0.numer())
        } else {
            write!(f, "{}/{} π", self.0.numer(), self.0.denom())
        }
    }
}
