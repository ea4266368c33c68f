use serde::{Deserialize, Serialize};

use super::point::{orient, Point};
use super::transform::Affine;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Polygon<T: Scalar> {
    pub vertices: Vec<Point<T>>,
}

impl<T: Scalar> Polygon<T> {
    pub fn new(vertices: Vec<Point<T>>) -> Self {
        Polygon { vertices }
    }

    pub fn from_ints(coords: &[(i64, i64)]) -> Self {
        Polygon::new(coords.iter().map(|&(x, y)| Point::from_ints(x, y)).collect())
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point<T>, Point<T>)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Twice the signed area.
    pub fn area2(&self) -> T {
        self.edges().fold(T::zero(), |acc, (a, b)| acc + a.cross(b))
    }

    pub fn area(&self) -> T {
        self.area2() * T::half()
    }

    pub fn reversed(&self) -> Self {
        let mut v = self.vertices.clone();
        v.reverse();
        Polygon::new(v)
    }

    pub fn to_ccw(&self) -> Self {
        if self.area2() < T::zero() {
            self.reversed()
        } else {
            self.clone()
        }
    }

    pub fn transformed(&self, a: &Affine<T>) -> Self {
        let mut out = Polygon::new(self.vertices.iter().map(|&p| a.apply(p)).collect());
        if a.det() < T::zero() {
            out.vertices.reverse();
        }
        out
    }

    pub fn to_f64(&self) -> Polygon<f64> {
        Polygon::new(self.vertices.iter().map(|p| p.to_f64()).collect())
    }

    pub fn bbox(&self) -> (Point<T>, Point<T>) {
        let mut lo = self.vertices[0];
        let mut hi = lo;
        for p in &self.vertices[1..] {
            if p.x < lo.x {
                lo.x = p.x;
            }
            if p.y < lo.y {
                lo.y = p.y;
            }
            if p.x > hi.x {
                hi.x = p.x;
            }
            if p.y > hi.y {
                hi.y = p.y;
            }
        }
        (lo, hi)
    }

    /// Area centroid; falls back to the vertex mean for zero area.
    pub fn centroid(&self) -> Point<T> {
        let a2 = self.area2();
        if a2 == T::zero() {
            let n = T::from_i64(self.len() as i64);
            let s = self.vertices.iter().fold(Point::origin(), |acc, &p| acc + p);
            return Point::new(s.x / n, s.y / n);
        }
        let mut cx = T::zero();
        let mut cy = T::zero();
        for (a, b) in self.edges() {
            let c = a.cross(b);
            cx = cx + (a.x + b.x) * c;
            cy = cy + (a.y + b.y) * c;
        }
        let three = T::from_i64(3);
        Point::new(cx / (three * a2), cy / (three * a2))
    }

    /// Winding-number containment; boundary points count as outside.
    pub fn contains_strict(&self, p: Point<T>) -> bool {
        let mut wn = 0i32;
        for (a, b) in self.edges() {
            let o = orient(a, b, p);
            if o == T::zero() && on_segment(a, b, p) {
                return false;
            }
            if a.y <= p.y {
                if b.y > p.y && o > T::zero() {
                    wn += 1;
                }
            } else if b.y <= p.y && o < T::zero() {
                wn -= 1;
            }
        }
        wn != 0
    }

    /// Inside or on the boundary, with `tol` slack on the boundary test
    /// for floating types.
    pub fn covers(&self, p: Point<T>, tol: f64) -> bool {
        if self.contains_strict(p) {
            return true;
        }
        self.edges().any(|(a, b)| near_segment(a, b, p, tol))
    }

    /// Non-adjacent edges never meet and adjacent edges meet only at
    /// their shared vertex.
    pub fn is_simple(&self) -> bool {
        let n = self.len();
        if n < 3 {
            return false;
        }
        for i in 0..n {
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
            for j in i + 1..n {
                let (c, d) = (self.vertices[j], self.vertices[(j + 1) % n]);
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    // Folding back onto the previous edge.
                    let shared = if j == i + 1 { b } else { a };
                    let (p, q) = if j == i + 1 { (a, d) } else { (b, c) };
                    if orient(p, shared, q) == T::zero() && (p - shared).dot(q - shared) > T::zero() {
                        return false;
                    }
                } else if segments_touch(a, b, c, d) {
                    return false;
                }
            }
        }
        true
    }

    /// Ear-clipping triangulation of a simple polygon. Collinear vertices
    /// are dropped first since they carry no area.
    pub fn triangulate(&self) -> Vec<[Point<T>; 3]> {
        let poly = self.to_ccw();
        let mut v: Vec<Point<T>> = poly.vertices.clone();
        drop_collinear(&mut v);
        let mut out = Vec::with_capacity(v.len().saturating_sub(2));
        let mut guard = 0;
        while v.len() > 3 && guard < 10_000 {
            guard += 1;
            let n = v.len();
            let mut clipped = false;
            for i in 0..n {
                let (a, b, c) = (v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
                if orient(a, b, c) <= T::zero() {
                    continue;
                }
                let blocked = v.iter().enumerate().any(|(k, &p)| {
                    k != i && k != (i + n - 1) % n && k != (i + 1) % n && p != a && p != b && p != c
                        && in_triangle_closed(a, b, c, p)
                });
                if !blocked {
                    out.push([a, b, c]);
                    v.remove(i);
                    drop_collinear(&mut v);
                    clipped = true;
                    break;
                }
            }
            if !clipped {
                break;
            }
        }
        if v.len() == 3 && orient(v[0], v[1], v[2]) > T::zero() {
            out.push([v[0], v[1], v[2]]);
        }
        out
    }

    /// Some point strictly inside the polygon: the centroid when that
    /// works, else the centroid of an ear.
    pub fn interior_point(&self) -> Point<T> {
        let c = self.centroid();
        if self.contains_strict(c) {
            return c;
        }
        let tris = self.triangulate();
        let best = tris
            .iter()
            .max_by(|x, y| {
                orient(x[0], x[1], x[2]).partial_cmp(&orient(y[0], y[1], y[2])).unwrap_or(std::cmp::Ordering::Equal)
            })
            .copied()
            .unwrap_or([c, c, c]);
        let three = T::from_i64(3);
        let s = best[0] + best[1] + best[2];
        Point::new(s.x / three, s.y / three)
    }
}

fn drop_collinear<T: Scalar>(v: &mut Vec<Point<T>>) {
    let mut changed = true;
    while changed && v.len() > 3 {
        changed = false;
        let n = v.len();
        for i in 0..n {
            let (a, b, c) = (v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
            let collinear = if T::EXACT {
                orient(a, b, c) == T::zero()
            } else {
                let scale = ((c - a).norm2().to_f64()).max(1e-300);
                orient(a, b, c).to_f64().abs() <= 1e-12 * scale
            };
            if collinear || a == b {
                v.remove(i);
                changed = true;
                break;
            }
        }
    }
}

pub(crate) fn on_segment<T: Scalar>(a: Point<T>, b: Point<T>, p: Point<T>) -> bool {
    let lo_x = if a.x < b.x { a.x } else { b.x };
    let hi_x = if a.x < b.x { b.x } else { a.x };
    let lo_y = if a.y < b.y { a.y } else { b.y };
    let hi_y = if a.y < b.y { b.y } else { a.y };
    p.x >= lo_x && p.x <= hi_x && p.y >= lo_y && p.y <= hi_y
}

/// Distance from `p` to segment `ab` is at most `tol` (exactly zero for
/// exact scalars).
pub(crate) fn near_segment<T: Scalar>(a: Point<T>, b: Point<T>, p: Point<T>, tol: f64) -> bool {
    if T::EXACT {
        return orient(a, b, p) == T::zero() && on_segment(a, b, p);
    }
    let (a, b, p) = (a.to_f64(), b.to_f64(), p.to_f64());
    let ab = b - a;
    let l2 = ab.norm2();
    let t = if l2 > 0.0 { ((p - a).dot(ab) / l2).clamp(0.0, 1.0) } else { 0.0 };
    (a + ab * t - p).norm() <= tol
}

fn segments_touch<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>, d: Point<T>) -> bool {
    let z = T::zero();
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > z && d2 < z) || (d1 < z && d2 > z)) && ((d3 > z && d4 < z) || (d3 < z && d4 > z)) {
        return true;
    }
    (d1 == z && on_segment(c, d, a))
        || (d2 == z && on_segment(c, d, b))
        || (d3 == z && on_segment(a, b, c))
        || (d4 == z && on_segment(a, b, d))
}

fn in_triangle_closed<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>, p: Point<T>) -> bool {
    let z = T::zero();
    orient(a, b, p) >= z && orient(b, c, p) >= z && orient(c, a, p) >= z
}

/// A labelled polygon.
#[derive(Clone, Debug, PartialEq)]
pub struct Tile<T: Scalar> {
    pub label: String,
    pub polygon: Polygon<T>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct PolygonPatch<T: Scalar> {
    pub tiles: Vec<Tile<T>>,
}

impl<T: Scalar> PolygonPatch<T> {
    pub fn new() -> Self {
        PolygonPatch { tiles: Vec::new() }
    }

    pub fn push(&mut self, label: impl Into<String>, polygon: Polygon<T>) {
        self.tiles.push(Tile { label: label.into(), polygon });
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn transformed(&self, a: &Affine<T>) -> Self {
        PolygonPatch {
            tiles: self
                .tiles
                .iter()
                .map(|t| Tile { label: t.label.clone(), polygon: t.polygon.transformed(a) })
                .collect(),
        }
    }

    pub fn total_area(&self) -> T {
        self.tiles.iter().fold(T::zero(), |acc, t| acc + t.polygon.area().abs())
    }

    pub fn to_f64(&self) -> PolygonPatch<f64> {
        PolygonPatch {
            tiles: self
                .tiles
                .iter()
                .map(|t| Tile { label: t.label.clone(), polygon: t.polygon.to_f64() })
                .collect(),
        }
    }

    pub fn to_json(&self) -> PatchJson {
        PatchJson {
            tiles: self
                .tiles
                .iter()
                .map(|t| TileJson {
                    label: t.label.clone(),
                    vertices: t.polygon.vertices.iter().map(|&p| p.into()).collect(),
                })
                .collect(),
        }
    }
}

/// Interchange form: `{"tiles":[{"label":..,"vertices":[[x,y],..]},..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatchJson {
    pub tiles: Vec<TileJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TileJson {
    pub label: String,
    pub vertices: Vec<[f64; 2]>,
}

impl PatchJson {
    pub fn to_patch<T: Scalar>(&self) -> PolygonPatch<T> {
        let mut p = PolygonPatch::new();
        for t in &self.tiles {
            p.push(t.label.clone(), Polygon::new(t.vertices.iter().map(|&v| Point::from(v)).collect()));
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn triangulation_preserves_area() {
        let l = Polygon::<Rational>::from_ints(&[(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]);
        let tris = l.triangulate();
        assert_eq!(tris.len(), 4);
        let sum = tris.iter().fold(Rational::from_integer(0), |s, t| s + orient(t[0], t[1], t[2]));
        assert_eq!(sum, l.area2());
    }

    #[test]
    fn collinear_vertices_are_tolerated() {
        let sq = Polygon::<Rational>::from_ints(&[(0, 0), (1, 0), (2, 0), (2, 2), (0, 2)]);
        assert!(sq.is_simple());
        assert_eq!(sq.triangulate().len(), 2);
    }

    #[test]
    fn bowtie_is_not_simple() {
        let bow = Polygon::<f64>::from_ints(&[(0, 0), (1, 1), (1, 0), (0, 1)]);
        assert!(!bow.is_simple());
    }

    #[test]
    fn interior_point_of_nonconvex() {
        let c = Polygon::<f64>::from_ints(&[(0, 0), (3, 0), (3, 3), (2, 3), (2, 1), (1, 1), (1, 3), (0, 3)]);
        assert!(c.contains_strict(c.interior_point()));
    }
}
