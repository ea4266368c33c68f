//! Patch checking: overlaps by triangle clipping, holes by boundary
//! cancellation.

use std::collections::{BTreeMap, HashMap};

use super::point::{orient, Point};
use super::polygon::{near_segment, Polygon, PolygonPatch};
use super::GeometryError;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum PatchVerdict {
    Valid,
    /// Lexicographically smallest pair of tile indices whose interiors meet.
    Overlap(usize, usize),
    /// A point inside an uncovered hole.
    Gap(Point<f64>),
    /// The tiles form this many separate pieces.
    Disconnected(usize),
    /// Tile index sticking out of the declared region.
    OutsideRegion(usize),
}

impl PatchVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, PatchVerdict::Valid)
    }
}

pub fn validate_patch<T: Scalar>(patch: &PolygonPatch<T>, tol: f64) -> Result<PatchVerdict, GeometryError> {
    check(patch, None, tol)
}

/// Like [`validate_patch`], but the tiles must also exactly cover `region`.
pub fn validate_patch_in_region<T: Scalar>(
    patch: &PolygonPatch<T>,
    region: &Polygon<T>,
    tol: f64,
) -> Result<PatchVerdict, GeometryError> {
    check(patch, Some(region), tol)
}

fn check<T: Scalar>(patch: &PolygonPatch<T>, region: Option<&Polygon<T>>, tol: f64) -> Result<PatchVerdict, GeometryError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(GeometryError::BadTolerance(tol));
    }
    if patch.is_empty() {
        return Err(GeometryError::EmptyPatch);
    }
    let polys: Vec<Polygon<T>> = patch
        .tiles
        .iter()
        .enumerate()
        .map(|(i, t)| checked_ccw(&t.polygon, tol).map_err(|reason| GeometryError::Degenerate { index: i, reason }))
        .collect::<Result<_, _>>()?;
    let region = match region {
        Some(r) => Some(checked_ccw(r, tol).map_err(|reason| GeometryError::Degenerate { index: usize::MAX, reason })?),
        None => None,
    };
    let snap = if T::EXACT { 0.0 } else { tol.sqrt().clamp(1e-9, 1e-3) };

    if let Some((i, j)) = first_overlap(&polys, tol) {
        return Ok(PatchVerdict::Overlap(i, j));
    }

    if let Some(r) = &region {
        for (i, p) in polys.iter().enumerate() {
            let inside = p.vertices.iter().all(|&v| r.covers(v, snap)) && r.covers(p.interior_point(), snap);
            if !inside {
                return Ok(PatchVerdict::OutsideRegion(i));
            }
        }
    }

    let cycles = leftover_cycles(&polys, region.as_ref(), snap);
    let mut positive = 0;
    let mut first_hole = None;
    for c in &cycles {
        let a = c.area2();
        if a < T::zero() {
            if first_hole.is_none() {
                first_hole = Some(c.reversed());
            }
        } else {
            positive += 1;
        }
    }
    if let Some(h) = first_hole {
        return Ok(PatchVerdict::Gap(h.interior_point().to_f64()));
    }
    if region.is_some() {
        if let Some(c) = cycles.first() {
            return Ok(PatchVerdict::Gap(c.interior_point().to_f64()));
        }
    } else if positive > 1 {
        return Ok(PatchVerdict::Disconnected(positive));
    }
    Ok(PatchVerdict::Valid)
}

fn checked_ccw<T: Scalar>(p: &Polygon<T>, tol: f64) -> Result<Polygon<T>, String> {
    let n = p.len();
    if n < 3 {
        return Err(format!("{n} vertices"));
    }
    for i in 0..n {
        let (a, b) = (p.vertices[i], p.vertices[(i + 1) % n]);
        if (b - a).norm2().to_f64().sqrt() <= if T::EXACT { 0.0 } else { tol } {
            return Err(format!("duplicate vertex {i}"));
        }
    }
    if !p.area().abs().exceeds(tol) {
        return Err("zero area".into());
    }
    if !p.is_simple() {
        return Err("self-intersecting".into());
    }
    Ok(p.to_ccw())
}

fn first_overlap<T: Scalar>(polys: &[Polygon<T>], tol: f64) -> Option<(usize, usize)> {
    let tris: Vec<Vec<[Point<T>; 3]>> = polys.iter().map(|p| p.triangulate()).collect();
    let boxes: Vec<[f64; 4]> = polys
        .iter()
        .map(|p| {
            let (lo, hi) = p.bbox();
            [lo.x.to_f64(), lo.y.to_f64(), hi.x.to_f64(), hi.y.to_f64()]
        })
        .collect();
    let mut order: Vec<usize> = (0..polys.len()).collect();
    order.sort_by(|&a, &b| boxes[a][0].total_cmp(&boxes[b][0]).then(a.cmp(&b)));
    let slack = if T::EXACT { 0.0 } else { tol };
    let mut best: Option<(usize, usize)> = None;
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if boxes[j][0] > boxes[i][2] + slack {
                break;
            }
            if boxes[j][1] > boxes[i][3] + slack || boxes[i][1] > boxes[j][3] + slack {
                continue;
            }
            let pair = (i.min(j), i.max(j));
            if best.is_some_and(|b| b <= pair) {
                continue;
            }
            let mut area = T::zero();
            for a in &tris[i] {
                for b in &tris[j] {
                    area = area + clipped_area(a, b);
                }
            }
            if area.exceeds(tol) {
                best = Some(pair);
            }
        }
    }
    best
}

/// Area of the intersection of two counterclockwise triangles.
fn clipped_area<T: Scalar>(a: &[Point<T>; 3], b: &[Point<T>; 3]) -> T {
    let mut poly: Vec<Point<T>> = a.to_vec();
    for e in 0..3 {
        let (p, q) = (b[e], b[(e + 1) % 3]);
        let mut next = Vec::with_capacity(poly.len() + 2);
        for k in 0..poly.len() {
            let (s, t) = (poly[k], poly[(k + 1) % poly.len()]);
            let ds = orient(p, q, s);
            let dt = orient(p, q, t);
            let z = T::zero();
            if ds >= z {
                next.push(s);
            }
            if (ds > z && dt < z) || (ds < z && dt > z) {
                let u = ds / (ds - dt);
                next.push(s + (t - s) * u);
            }
        }
        poly = next;
        if poly.len() < 3 {
            return T::zero();
        }
    }
    Polygon::new(poly).area().abs()
}

/// Canonical vertex identifiers, merging points closer than `snap`.
struct VertexIndex<T: Scalar> {
    reps: Vec<Point<T>>,
    snap: f64,
    grid: HashMap<(i64, i64), Vec<usize>>,
}

impl<T: Scalar> VertexIndex<T> {
    fn build(mut pts: Vec<Point<T>>, snap: f64) -> Self {
        pts.sort_by(|a, b| a.lex_cmp(b));
        let mut idx = VertexIndex { reps: Vec::new(), snap, grid: HashMap::new() };
        for p in pts {
            if idx.find(p).is_none() {
                let id = idx.reps.len();
                idx.reps.push(p);
                if !T::EXACT {
                    idx.grid.entry(idx.cell(p)).or_default().push(id);
                }
            }
        }
        idx
    }

    fn cell(&self, p: Point<T>) -> (i64, i64) {
        let s = self.snap.max(1e-12);
        ((p.x.to_f64() / s).floor() as i64, (p.y.to_f64() / s).floor() as i64)
    }

    fn find(&self, p: Point<T>) -> Option<usize> {
        if T::EXACT {
            return self.reps.binary_search_by(|r| r.lex_cmp(&p)).ok();
        }
        let (cx, cy) = self.cell(p);
        let mut best: Option<(f64, usize)> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.grid.get(&(cx + dx, cy + dy)) {
                    for &id in ids {
                        let d = (self.reps[id] - p).to_f64().norm();
                        if d <= self.snap && best.is_none_or(|(bd, bid)| (d, id) < (bd, bid)) {
                            best = Some((d, id));
                        }
                    }
                }
            }
        }
        best.map(|(_, id)| id)
    }

    fn id(&self, p: Point<T>) -> usize {
        self.find(p).expect("vertex was indexed")
    }
}

/// Directed boundary segments that survive cancellation, traced into
/// closed cycles.
fn leftover_cycles<T: Scalar>(polys: &[Polygon<T>], region: Option<&Polygon<T>>, snap: f64) -> Vec<Polygon<T>> {
    let mut loops: Vec<Polygon<T>> = polys.to_vec();
    if let Some(r) = region {
        loops.push(r.reversed());
    }
    let all: Vec<Point<T>> = loops.iter().flat_map(|p| p.vertices.iter().copied()).collect();
    let index = VertexIndex::build(all, snap);
    let mut by_x: Vec<usize> = (0..index.reps.len()).collect();
    by_x.sort_by(|&a, &b| index.reps[a].x.to_f64().total_cmp(&index.reps[b].x.to_f64()));
    let xs: Vec<f64> = by_x.iter().map(|&i| index.reps[i].x.to_f64()).collect();

    let mut net: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    for lp in &loops {
        for (a, b) in lp.edges() {
            let (ia, ib) = (index.id(a), index.id(b));
            if ia == ib {
                continue;
            }
            let (lo, hi) = if a.x.to_f64() < b.x.to_f64() { (a.x.to_f64(), b.x.to_f64()) } else { (b.x.to_f64(), a.x.to_f64()) };
            let start = xs.partition_point(|&x| x < lo - snap - 1e-12);
            let end = xs.partition_point(|&x| x <= hi + snap + 1e-12);
            let dir = b - a;
            let mut inner: Vec<(T, usize)> = by_x[start..end]
                .iter()
                .copied()
                .filter(|&k| k != ia && k != ib && near_segment(a, b, index.reps[k], snap))
                .map(|k| ((index.reps[k] - a).dot(dir), k))
                .collect();
            inner.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal).then(x.1.cmp(&y.1)));
            let mut prev = ia;
            for k in inner.into_iter().map(|(_, k)| k).chain(std::iter::once(ib)) {
                if prev < k {
                    *net.entry((prev, k)).or_default() += 1;
                } else {
                    *net.entry((k, prev)).or_default() -= 1;
                }
                prev = k;
            }
        }
    }

    let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut remaining = 0usize;
    for (&(u, v), &c) in &net {
        let (from, to) = if c > 0 { (u, v) } else { (v, u) };
        for _ in 0..c.unsigned_abs() {
            out.entry(from).or_default().push(to);
            remaining += 1;
        }
    }

    let mut cycles = Vec::new();
    while remaining > 0 {
        let (&start, _) = out.iter().find(|(_, v)| !v.is_empty()).expect("edge left");
        let first = out.get_mut(&start).unwrap().remove(0);
        remaining -= 1;
        let mut ids = vec![start];
        let (mut prev, mut cur) = (start, first);
        while cur != start {
            ids.push(cur);
            let din = (index.reps[cur] - index.reps[prev]).to_f64();
            let Some(nexts) = out.get_mut(&cur).filter(|v| !v.is_empty()) else { break };
            let pick = (0..nexts.len())
                .max_by(|&x, &y| {
                    let tx = turn(din, (index.reps[nexts[x]] - index.reps[cur]).to_f64());
                    let ty = turn(din, (index.reps[nexts[y]] - index.reps[cur]).to_f64());
                    tx.total_cmp(&ty).then(y.cmp(&x))
                })
                .unwrap();
            let nxt = nexts.remove(pick);
            remaining -= 1;
            prev = cur;
            cur = nxt;
        }
        cycles.push(Polygon::new(ids.into_iter().map(|i| index.reps[i]).collect()));
    }
    cycles
}

fn turn(din: Point<f64>, dout: Point<f64>) -> f64 {
    din.cross(dout).atan2(din.dot(dout))
}
