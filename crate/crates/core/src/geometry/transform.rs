use serde::{Deserialize, Serialize};

use super::point::Point;
use crate::scalar::Scalar;

/// `p ↦ M·p + t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Affine<T: Scalar> {
    pub m: [[T; 2]; 2],
    pub t: [T; 2],
}

impl<T: Scalar> Affine<T> {
    pub fn identity() -> Self {
        Self::linear(T::one(), T::zero(), T::zero(), T::one())
    }

    /// Row-major linear part `[[a, b], [c, d]]`.
    pub fn linear(a: T, b: T, c: T, d: T) -> Self {
        Affine { m: [[a, b], [c, d]], t: [T::zero(), T::zero()] }
    }

    pub fn scale(s: T) -> Self {
        Self::linear(s, T::zero(), T::zero(), s)
    }

    pub fn translation(x: T, y: T) -> Self {
        Affine { t: [x, y], ..Self::identity() }
    }

    /// Rotation by `k` quarter turns, exact in any scalar type.
    pub fn quarter_turns(k: i32) -> Self {
        let (o, z) = (T::one(), T::zero());
        match k.rem_euclid(4) {
            0 => Self::linear(o, z, z, o),
            1 => Self::linear(z, -o, o, z),
            2 => Self::linear(-o, z, z, -o),
            _ => Self::linear(z, o, -o, z),
        }
    }

    /// Reflection across the x axis.
    pub fn flip_y() -> Self {
        Self::linear(T::one(), T::zero(), T::zero(), -T::one())
    }

    pub fn then_translate(mut self, x: T, y: T) -> Self {
        self.t = [self.t[0] + x, self.t[1] + y];
        self
    }

    pub fn apply(&self, p: Point<T>) -> Point<T> {
        Point::new(
            self.m[0][0] * p.x + self.m[0][1] * p.y + self.t[0],
            self.m[1][0] * p.x + self.m[1][1] * p.y + self.t[1],
        )
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let a = &self.m;
        let b = &other.m;
        let m = [
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ];
        let t = self.apply(Point::new(other.t[0], other.t[1]));
        Affine { m, t: [t.x, t.y] }
    }

    pub fn det(&self) -> T {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d == T::zero() {
            return None;
        }
        let m = [
            [self.m[1][1] / d, -self.m[0][1] / d],
            [-self.m[1][0] / d, self.m[0][0] / d],
        ];
        let lin = Affine { m, t: [T::zero(), T::zero()] };
        let t = lin.apply(Point::new(self.t[0], self.t[1]));
        Some(Affine { m, t: [-t.x, -t.y] })
    }

    pub fn to_f64(&self) -> Affine<f64> {
        Affine {
            m: [
                [self.m[0][0].to_f64(), self.m[0][1].to_f64()],
                [self.m[1][0].to_f64(), self.m[1][1].to_f64()],
            ],
            t: [self.t[0].to_f64(), self.t[1].to_f64()],
        }
    }
}

impl Affine<f64> {
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::linear(c, -s, s, c)
    }
}

/// Rigid motion `p ↦ R(rotation)·F·p + translation`, where `F` flips the
/// y axis when `reflected` is set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Isometry {
    pub rotation: f64,
    pub translation: [f64; 2],
    pub reflected: bool,
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry { rotation: 0.0, translation: [0.0, 0.0], reflected: false };

    pub fn new(rotation: f64, translation: [f64; 2], reflected: bool) -> Self {
        Isometry { rotation, translation, reflected }
    }

    pub fn degrees(deg: f64, translation: [f64; 2], reflected: bool) -> Self {
        Isometry::new(deg.to_radians(), translation, reflected)
    }

    pub fn apply(&self, p: Point<f64>) -> Point<f64> {
        self.to_affine().apply(p)
    }

    pub fn to_affine(&self) -> Affine<f64> {
        let r = Affine::rotation(self.rotation);
        let lin = if self.reflected { r.compose(&Affine::flip_y()) } else { r };
        lin.then_translate(self.translation[0], self.translation[1])
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        let rot_other = if self.reflected { -other.rotation } else { other.rotation };
        let t = self.apply(Point::new(other.translation[0], other.translation[1]));
        Isometry {
            rotation: normalize_angle(self.rotation + rot_other),
            translation: [t.x, t.y],
            reflected: self.reflected != other.reflected,
        }
    }

    pub fn inverse(&self) -> Isometry {
        let rotation = if self.reflected { self.rotation } else { -self.rotation };
        let lin = Isometry { rotation: normalize_angle(rotation), translation: [0.0, 0.0], reflected: self.reflected };
        let t = lin.apply(Point::new(self.translation[0], self.translation[1]));
        Isometry { translation: [-t.x, -t.y], ..lin }
    }

    /// Recovers the isometry part of a similarity, returning it with the
    /// scale factor.
    pub fn from_similarity(a: &Affine<f64>) -> (Isometry, f64) {
        let det = a.det();
        let reflected = det < 0.0;
        let s = det.abs().sqrt();
        let rotation = a.m[1][0].atan2(a.m[0][0]);
        (Isometry { rotation: normalize_angle(rotation), translation: a.t, reflected }, s)
    }
}

fn normalize_angle(a: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let r = a.rem_euclid(two_pi);
    if (two_pi - r).abs() < 1e-15 { 0.0 } else { r }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use proptest::prelude::*;

    fn close(a: Point<f64>, b: Point<f64>) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn exact_affine_inverse() {
        let a = Affine::<Rational>::quarter_turns(1)
            .compose(&Affine::scale(Rational::new(1, 2)))
            .then_translate(Rational::new(3, 1), Rational::new(-1, 7));
        let id = a.compose(&a.inverse().unwrap());
        assert_eq!(id, Affine::identity());
    }

    #[test]
    fn similarity_roundtrip() {
        let iso = Isometry::degrees(135.0, [2.0, -1.0], true);
        let (back, s) = Isometry::from_similarity(&iso.to_affine().compose(&Affine::scale(3.0)));
        assert!((s - 3.0).abs() < 1e-12);
        assert!((back.rotation - iso.rotation).abs() < 1e-12);
        assert_eq!(back.reflected, iso.reflected);
    }

    fn iso_strategy() -> impl Strategy<Value = Isometry> {
        (-7.0f64..7.0, -10.0f64..10.0, -10.0f64..10.0, any::<bool>())
            .prop_map(|(r, x, y, f)| Isometry::new(r, [x, y], f))
    }

    proptest! {
        #[test]
        fn composition_is_associative(a in iso_strategy(), b in iso_strategy(), c in iso_strategy(), x in -5.0f64..5.0, y in -5.0f64..5.0) {
            let p = Point::new(x, y);
            let l = a.compose(&b).compose(&c).apply(p);
            let r = a.compose(&b.compose(&c)).apply(p);
            prop_assert!(close(l, r));
            prop_assert!(close(l, a.apply(b.apply(c.apply(p)))));
        }

        #[test]
        fn inverse_cancels(a in iso_strategy(), x in -5.0f64..5.0, y in -5.0f64..5.0) {
            let p = Point::new(x, y);
            prop_assert!(close(a.compose(&a.inverse()).apply(p), p));
            prop_assert!(close(a.inverse().compose(&a).apply(p), p));
        }
    }
}
