//! Equilateral pentagon whose angles satisfy 2A+E = B+C+2D = B+C+E = 2π.
//!
//! The three relations force E = 2D, A = π−D and B+C = 2π−2D, leaving
//! the two unknowns D and d = B−C, which are fixed by requiring the five
//! unit edges to close up.

use std::f64::consts::PI;

use serde::Serialize;

use super::point::Point;
use super::polygon::Polygon;
use super::GeometryError;
use crate::angle::PiAngle;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LivioPentagon {
    /// Interior angles A, B, C, D, E in radians, in boundary order.
    pub angles: [f64; 5],
    /// Unit-edge vertices; vertex `k` carries angle `k`, vertex 0 at the origin.
    pub vertices: [Point<f64>; 5],
    pub closure_residual: f64,
}

impl LivioPentagon {
    pub fn polygon(&self) -> Polygon<f64> {
        Polygon::new(self.vertices.to_vec())
    }

    pub fn d(&self) -> f64 {
        self.angles[3]
    }

    pub fn b_minus_c(&self) -> f64 {
        self.angles[1] - self.angles[2]
    }
}

/// Angles from the two free parameters.
pub fn angles_from(d_angle: f64, split: f64) -> [f64; 5] {
    [PI - d_angle, PI - d_angle + split / 2.0, PI - d_angle - split / 2.0, d_angle, 2.0 * d_angle]
}

/// Vertices of the equilateral polygon with the given interior angles,
/// plus the gap between the last vertex and the first.
pub fn trace_unit_edges(angles: &[f64]) -> (Vec<Point<f64>>, f64) {
    let mut pts = vec![Point::origin()];
    let mut heading = 0.0;
    for (k, a) in angles.iter().enumerate() {
        if k > 0 {
            heading += PI - a;
        }
        let last = *pts.last().unwrap();
        pts.push(last + Point::from_polar(1.0, heading));
    }
    let end = pts.pop().unwrap();
    (pts, end.norm())
}

fn residual(x: [f64; 2]) -> [f64; 2] {
    let (dd, s) = (x[0], x[1]);
    let u = dd - s / 2.0;
    [1.0 + u.cos() + (2.0 * dd).cos(), u.sin() + (2.0 * dd).sin() - 2.0 * dd.sin()]
}

fn jacobian(x: [f64; 2]) -> [[f64; 2]; 2] {
    let (dd, s) = (x[0], x[1]);
    let u = dd - s / 2.0;
    [
        [-u.sin() - 2.0 * (2.0 * dd).sin(), u.sin() / 2.0],
        [u.cos() + 2.0 * (2.0 * dd).cos() - 2.0 * dd.cos(), -u.cos() / 2.0],
    ]
}

fn newton(mut x: [f64; 2], tol: f64) -> Option<[f64; 2]> {
    for _ in 0..100 {
        let f = residual(x);
        if f[0].hypot(f[1]) < tol * 1e-3 {
            return Some(x);
        }
        let j = jacobian(x);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-14 {
            return None;
        }
        let dx = (j[1][1] * f[0] - j[0][1] * f[1]) / det;
        let dy = (j[0][0] * f[1] - j[1][0] * f[0]) / det;
        x = [x[0] - dx, x[1] - dy];
    }
    let f = residual(x);
    (f[0].hypot(f[1]) < tol).then_some(x)
}

fn acceptable(a: &[f64; 5]) -> bool {
    let eps = 1e-6;
    a.iter().all(|&v| v > eps && v < 2.0 * PI - eps && (v - PI).abs() > eps)
        && a.iter().any(|&v| v > PI)
}

/// Finds the non-convex solution by Newton iteration from a grid of
/// starting points over (D, B−C).
pub fn solve_livio_pentagon(tol: f64) -> Result<LivioPentagon, GeometryError> {
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(GeometryError::BadTolerance(tol));
    }
    let mut found: Vec<[f64; 2]> = Vec::new();
    let mut best_residual = f64::INFINITY;
    for i in 1..40 {
        for j in -40..=40 {
            let seed = [PI * i as f64 / 40.0, 2.0 * PI * j as f64 / 40.0];
            let f = residual(seed);
            best_residual = best_residual.min(f[0].hypot(f[1]));
            let Some(x) = newton(seed, tol) else { continue };
            let a = angles_from(x[0], x[1]);
            if !acceptable(&a) {
                continue;
            }
            let (pts, _) = trace_unit_edges(&a);
            if !Polygon::new(pts).is_simple() {
                continue;
            }
            if !found.iter().any(|y| (y[0] - x[0]).abs() < 1e-7 && (y[1] - x[1]).abs() < 1e-7) {
                found.push(x);
            }
        }
    }
    let x = match found.as_slice() {
        [x] => *x,
        [] => return Err(GeometryError::Numeric { residual: best_residual }),
        _ => return Err(GeometryError::Ambiguous(found.len())),
    };
    let angles = angles_from(x[0], x[1]);
    let (pts, closure_residual) = trace_unit_edges(&angles);
    Ok(LivioPentagon {
        angles,
        vertices: [pts[0], pts[1], pts[2], pts[3], pts[4]],
        closure_residual,
    })
}

/// The three sums 2A+E, B+C+2D, B+C+E; each must equal 2π.
pub fn livio_sums(a: [PiAngle; 5]) -> [PiAngle; 3] {
    let [aa, b, c, d, e] = a;
    [aa * 2 + e, b + c + d * 2, b + c + e]
}

pub fn satisfies_livio(a: [PiAngle; 5]) -> bool {
    livio_sums(a).iter().all(|&s| s == PiAngle::new(2, 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_pentagon_fails_first_relation() {
        let r = PiAngle::new(3, 5);
        let sums = livio_sums([r; 5]);
        assert_eq!(sums[0], PiAngle::new(9, 5));
        assert!(!satisfies_livio([r; 5]));
    }

    #[test]
    fn solution_is_reflex_and_closed() {
        let p = solve_livio_pentagon(1e-9).unwrap();
        assert!(p.closure_residual < 1e-9);
        assert!(p.angles.iter().any(|&a| a > PI));
        assert!((p.angles.iter().sum::<f64>() - 3.0 * PI).abs() < 1e-12);
        assert!(p.polygon().is_simple());
        let (_, gap) = trace_unit_edges(&p.angles);
        assert!(gap < 1e-9);
    }

    #[test]
    fn tolerance_is_checked() {
        assert!(solve_livio_pentagon(0.1).is_err());
        assert!(solve_livio_pentagon(0.0).is_err());
    }
}
