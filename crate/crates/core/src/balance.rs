//! Combinatorial imbalance of tiles and configurations.
//!
//! A tile whose corners have valences `q₁..qₙ` has imbalance
//! `Σ 2π/qᵢ − (n−2)π`. A configuration is a planar map that is a
//! topological disk. Its imbalance uses the same formula over its
//! boundary vertices, where the angle at a boundary vertex is the share of
//! the vertex held by the configuration's tiles, `cᵥ·2π/qᵥ`. Everything
//! is an exact rational multiple of π.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Point, Polygon};
use crate::search::pool;
use crate::{PiAngle, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BalanceError {
    #[error("a polygon needs at least 3 corners, got {0}")]
    TooFewCorners(usize),
    #[error("valence {0} is below the minimum {1}")]
    BadValence(u32, u32),
    #[error("not a disk: {0}")]
    Topology(String),
    #[error("vertex {0} lies on the boundary but has no declared valence")]
    MissingValence(usize),
    #[error("vertex {vertex} has {tiles} tiles but declared valence {valence}")]
    ValenceTooSmall { vertex: usize, tiles: u32, valence: u32 },
    #[error("radius {0} exceeds the limit {1}")]
    RadiusTooLarge(f64, f64),
}

/// Which valence a boundary vertex gets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ValenceMode {
    /// The declared valence, i.e. the count in the surrounding tiling.
    Ambient,
    /// Counted within the configuration alone, where the outside is one
    /// more face: `cᵥ + 1` on the boundary, `cᵥ` inside.
    Patch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Curvature {
    Flat,
    Elliptic,
    Hyperbolic,
}

/// `Σ 2π/qᵢ − (n−2)π`.
pub fn tile_imbalance(valences: &[u32]) -> Result<PiAngle, BalanceError> {
    if valences.len() < 3 {
        return Err(BalanceError::TooFewCorners(valences.len()));
    }
    let mut sum = PiAngle::ZERO;
    for &q in valences {
        if q < 2 {
            return Err(BalanceError::BadValence(q, 2));
        }
        sum = sum + PiAngle::full_turn_over(q as i64);
    }
    Ok(sum - PiAngle::PI * (valences.len() as i64 - 2))
}

/// Imbalance of a tile with `n` corners of valence `q` each.
pub fn classify_vertex_uniform(n: u32, q: u32) -> Result<(Curvature, PiAngle), BalanceError> {
    if n < 3 {
        return Err(BalanceError::TooFewCorners(n as usize));
    }
    if q < 3 {
        return Err(BalanceError::BadValence(q, 3));
    }
    let k = tile_imbalance(&vec![q; n as usize])?;
    let c = match k.signum() {
        0 => Curvature::Flat,
        s if s > 0 => Curvature::Elliptic,
        _ => Curvature::Hyperbolic,
    };
    Ok((c, k))
}

/// A planar map given by its faces, each a cycle of vertex ids.
#[derive(Clone, Debug, PartialEq)]
pub struct MapConfiguration {
    valences: Vec<Option<u32>>,
    faces: Vec<Vec<usize>>,
    edges: BTreeMap<(usize, usize), u8>,
    corners: Vec<u32>,
    boundary: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapJson {
    /// Declared valence per vertex; `null` where unknown.
    pub vertices: Vec<Option<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[usize; 2]>>,
    pub faces: Vec<Vec<usize>>,
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl MapConfiguration {
    /// Builds the map and checks it is a disk: every edge borders one or
    /// two faces, the faces are connected, `v − e + f = 1`, and the
    /// boundary is one simple cycle.
    pub fn new(valences: Vec<Option<u32>>, faces: Vec<Vec<usize>>) -> Result<Self, BalanceError> {
        let topo = |s: String| BalanceError::Topology(s);
        let v = valences.len();
        if faces.is_empty() {
            return Err(topo("no faces".into()));
        }
        let mut edges: BTreeMap<(usize, usize), u8> = BTreeMap::new();
        let mut corners = vec![0u32; v];
        for (fi, f) in faces.iter().enumerate() {
            if f.len() < 3 {
                return Err(BalanceError::TooFewCorners(f.len()));
            }
            let distinct: BTreeSet<_> = f.iter().collect();
            if distinct.len() != f.len() {
                return Err(topo(format!("face {fi} repeats a vertex")));
            }
            for (i, &a) in f.iter().enumerate() {
                if a >= v {
                    return Err(topo(format!("face {fi} uses unknown vertex {a}")));
                }
                corners[a] += 1;
                *edges.entry(edge_key(a, f[(i + 1) % f.len()])).or_default() += 1;
            }
        }
        if let Some((e, _)) = edges.iter().find(|(_, &c)| c > 2) {
            return Err(topo(format!("edge {e:?} borders more than two faces")));
        }
        if let Some(i) = corners.iter().position(|&c| c == 0) {
            return Err(topo(format!("vertex {i} is in no face")));
        }
        // Faces connected through shared edges.
        let mut by_edge: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (fi, f) in faces.iter().enumerate() {
            for (i, &a) in f.iter().enumerate() {
                by_edge.entry(edge_key(a, f[(i + 1) % f.len()])).or_default().push(fi);
            }
        }
        let mut seen = vec![false; faces.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(fi) = stack.pop() {
            let f = &faces[fi];
            for (i, &a) in f.iter().enumerate() {
                for &g in &by_edge[&edge_key(a, f[(i + 1) % f.len()])] {
                    if !seen[g] {
                        seen[g] = true;
                        stack.push(g);
                    }
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(topo("faces are not connected".into()));
        }
        let chi = v as i64 - edges.len() as i64 + faces.len() as i64;
        if chi != 1 {
            return Err(topo(format!("v - e + f = {chi}")));
        }
        let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (&(a, b), _) in edges.iter().filter(|(_, &c)| c == 1) {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        if let Some((x, _)) = adj.iter().find(|(_, n)| n.len() != 2) {
            return Err(topo(format!("boundary pinches at vertex {x}")));
        }
        let start = *adj.keys().next().ok_or_else(|| topo("no boundary".into()))?;
        let mut boundary = vec![start];
        let (mut prev, mut cur) = (start, adj[&start][0]);
        while cur != start {
            boundary.push(cur);
            let n = &adj[&cur];
            let next = if n[0] == prev { n[1] } else { n[0] };
            prev = cur;
            cur = next;
        }
        if boundary.len() != adj.len() {
            return Err(topo("boundary has several cycles".into()));
        }
        Ok(MapConfiguration { valences, faces, edges, corners, boundary })
    }

    pub fn from_json(j: &MapJson) -> Result<Self, BalanceError> {
        let c = MapConfiguration::new(j.vertices.clone(), j.faces.clone())?;
        if let Some(edges) = &j.edges {
            let given: BTreeSet<_> = edges.iter().map(|e| edge_key(e[0], e[1])).collect();
            let derived: BTreeSet<_> = c.edges.keys().copied().collect();
            if given != derived {
                return Err(BalanceError::Topology("edge list disagrees with faces".into()));
            }
        }
        Ok(c)
    }

    pub fn to_json(&self) -> MapJson {
        MapJson {
            vertices: self.valences.clone(),
            edges: Some(self.edges.keys().map(|&(a, b)| [a, b]).collect()),
            faces: self.faces.clone(),
        }
    }

    /// `(v, e, f)`.
    pub fn counts(&self) -> (usize, usize, usize) {
        (self.valences.len(), self.edges.len(), self.faces.len())
    }

    pub fn euler(&self) -> i64 {
        let (v, e, f) = self.counts();
        v as i64 - e as i64 + f as i64
    }

    /// Boundary vertices in cyclic order.
    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    fn is_boundary(&self) -> Vec<bool> {
        let mut b = vec![false; self.valences.len()];
        for &x in &self.boundary {
            b[x] = true;
        }
        b
    }

    /// Valence used for tile angles at vertex `x`.
    fn valence(&self, x: usize, boundary: bool, mode: ValenceMode) -> Result<u32, BalanceError> {
        let c = self.corners[x];
        let q = match (mode, boundary) {
            (ValenceMode::Patch, _) | (ValenceMode::Ambient, false) => self.valences[x].unwrap_or(c),
            (ValenceMode::Ambient, true) => self.valences[x].ok_or(BalanceError::MissingValence(x))?,
        };
        let q = if mode == ValenceMode::Patch && boundary { c + 1 } else { q };
        if q < c {
            return Err(BalanceError::ValenceTooSmall { vertex: x, tiles: c, valence: q });
        }
        Ok(q)
    }

    fn tile_valences(&self, mode: ValenceMode) -> Result<Vec<Vec<u32>>, BalanceError> {
        let b = self.is_boundary();
        self.faces.iter().map(|f| f.iter().map(|&x| self.valence(x, b[x], mode)).collect()).collect()
    }
}

/// `Σ cᵥ·2π/qᵥ − (n−2)π` over the `n` boundary vertices.
pub fn configuration_imbalance(c: &MapConfiguration, mode: ValenceMode) -> Result<PiAngle, BalanceError> {
    let mut sum = PiAngle::ZERO;
    for &x in &c.boundary {
        let q = c.valence(x, true, mode)?;
        sum = sum + PiAngle::full_turn_over(q as i64) * (c.corners[x] as i64);
    }
    Ok(sum - PiAngle::PI * (c.boundary.len() as i64 - 2))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaReport {
    /// Configuration imbalance.
    pub lhs: PiAngle,
    /// Sum of tile imbalances.
    pub rhs: PiAngle,
    pub equal: bool,
    /// `|K − 2π| < πn`.
    pub bound_ok: bool,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub boundary: usize,
}

pub fn verify_lemma(c: &MapConfiguration, mode: ValenceMode) -> Result<LemmaReport, BalanceError> {
    let lhs = configuration_imbalance(c, mode)?;
    let mut rhs = PiAngle::ZERO;
    for q in c.tile_valences(mode)? {
        rhs = rhs + tile_imbalance(&q)?;
    }
    let n = c.boundary.len() as i64;
    let d = (lhs - PiAngle::PI * 2).coeff();
    let bound_ok = d > Rational::from_integer(-n) && d < Rational::from_integer(n);
    let (vertices, edges, faces) = c.counts();
    Ok(LemmaReport { lhs, rhs, equal: lhs == rhs, bound_ok, vertices, edges, faces, boundary: c.boundary.len() })
}

/// The shipped periodic tessellations, all with unit edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tessellation {
    Square,
    Hexagon,
    OctagonSquare,
}

impl Tessellation {
    pub fn parse(s: &str) -> Option<Tessellation> {
        match s {
            "square" => Some(Tessellation::Square),
            "hexagon" | "hex" => Some(Tessellation::Hexagon),
            "octagon-square" | "octagon_square" | "4.8.8" => Some(Tessellation::OctagonSquare),
            _ => None,
        }
    }

    /// Every tile within distance `r` of `center`, together with any tile
    /// the index window happens to cover; callers filter.
    fn tiles_near(self, center: Point<f64>, r: f64) -> Vec<Polygon<f64>> {
        let mut out = Vec::new();
        match self {
            Tessellation::Square => {
                let (x0, x1) = ((center.x - r).floor() as i64 - 1, (center.x + r).ceil() as i64 + 1);
                let (y0, y1) = ((center.y - r).floor() as i64 - 1, (center.y + r).ceil() as i64 + 1);
                for j in y0..=y1 {
                    for i in x0..=x1 {
                        out.push(Polygon::<f64>::from_ints(&[(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)]));
                    }
                }
            }
            Tessellation::Hexagon => {
                let s3 = 3f64.sqrt();
                let m = (r / 1.5).ceil() as i64 + 2;
                let jc = (center.y / 1.5).round() as i64;
                for j in jc - m..=jc + m {
                    let y = 1.5 * j as f64;
                    let ic = ((center.x - s3 / 2.0 * j as f64) / s3).round() as i64;
                    let mi = (r / s3).ceil() as i64 + 2;
                    for i in ic - mi..=ic + mi {
                        let x = s3 * i as f64 + s3 / 2.0 * j as f64;
                        out.push(regular(Point::new(x, y), 6, 1.0, 30.0));
                    }
                }
            }
            Tessellation::OctagonSquare => {
                let p = 1.0 + 2f64.sqrt();
                let m = (r / p).ceil() as i64 + 2;
                let (ic, jc) = ((center.x / p).round() as i64, (center.y / p).round() as i64);
                for j in jc - m..=jc + m {
                    for i in ic - m..=ic + m {
                        let (x, y) = (p * i as f64, p * j as f64);
                        out.push(regular(Point::new(x, y), 8, 1.0, 22.5));
                        out.push(regular(Point::new(x + p / 2.0, y + p / 2.0), 4, 1.0, 0.0));
                    }
                }
            }
        }
        out
    }
}

/// Regular `n`-gon with unit-length sides scaled by `edge`, first vertex
/// at angle `phase` degrees.
fn regular(c: Point<f64>, n: usize, edge: f64, phase: f64) -> Polygon<f64> {
    let radius = edge / (2.0 * (std::f64::consts::PI / n as f64).sin());
    Polygon::new(
        (0..n)
            .map(|k| {
                let a = (phase + 360.0 * k as f64 / n as f64).to_radians();
                Point::new(c.x + radius * a.cos(), c.y + radius * a.sin())
            })
            .collect(),
    )
}

fn dist_to_polygon(p: &Polygon<f64>, c: Point<f64>) -> f64 {
    if p.contains_strict(c) {
        return 0.0;
    }
    p.edges()
        .map(|(a, b)| {
            let d = b - a;
            let t = ((c - a).dot(d) / d.dot(d)).clamp(0.0, 1.0);
            (Point::new(a.x + t * d.x, a.y + t * d.y) - c).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Largest radius the disk generators accept.
pub const MAX_RADIUS: f64 = 400.0;

/// Slack when deciding whether a tile's closure meets the disk.
const MEET_TOL: f64 = 1e-9;

fn vertex_key(p: Point<f64>) -> (i64, i64) {
    ((p.x * 1e6).round() as i64, (p.y * 1e6).round() as i64)
}

/// The configuration of tiles whose closure meets the closed disk, with
/// valences declared from the surrounding tessellation.
pub fn configuration_in_disk(t: Tessellation, center: Point<f64>, r: f64) -> Result<(MapConfiguration, Vec<Polygon<f64>>), BalanceError> {
    if !(0.0..=MAX_RADIUS).contains(&r) {
        return Err(BalanceError::RadiusTooLarge(r, MAX_RADIUS));
    }
    let all = t.tiles_near(center, r + 4.0);
    let mut ambient: BTreeMap<(i64, i64), u32> = BTreeMap::new();
    for p in &all {
        for &v in &p.vertices {
            *ambient.entry(vertex_key(v)).or_default() += 1;
        }
    }
    let chosen: Vec<Polygon<f64>> = all.into_iter().filter(|p| dist_to_polygon(p, center) <= r + MEET_TOL).collect();
    let mut ids: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    let mut valences = Vec::new();
    let mut faces = Vec::new();
    for p in &chosen {
        let mut f = Vec::new();
        for &v in &p.vertices {
            let k = vertex_key(v);
            let id = *ids.entry(k).or_insert_with(|| {
                valences.push(Some(ambient[&k]));
                valences.len() - 1
            });
            f.push(id);
        }
        faces.push(f);
    }
    Ok((MapConfiguration::new(valences, faces)?, chosen))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesEntry {
    pub radius: f64,
    pub tiles: usize,
    pub imbalance: PiAngle,
    /// `|K_r| / N_r` in radians per tile.
    pub ratio: f64,
}

/// `|K_r|/N_r` for the configurations `C(r)` around the origin, with
/// ambient valences.
pub fn average_imbalance_series(t: Tessellation, radii: &[f64], jobs: usize) -> Result<Vec<SeriesEntry>, BalanceError> {
    let entry = |&r: &f64| -> Result<SeriesEntry, BalanceError> {
        let (c, _) = configuration_in_disk(t, Point::new(0.0, 0.0), r)?;
        let k = configuration_imbalance(&c, ValenceMode::Ambient)?;
        let n = c.faces.len();
        Ok(SeriesEntry { radius: r, tiles: n, imbalance: k, ratio: k.abs().radians() / n as f64 })
    };
    pool(jobs.max(1)).install(|| radii.par_iter().map(entry).collect())
}

/// Octagons and squares: a 4×4 block of octagons, the nine squares
/// between them, and ten squares on the rim (all edge squares except
/// the three along the top, plus the lower-left corner square).
pub fn octagon_square_figure() -> MapConfiguration {
    let p = 1.0 + 2f64.sqrt();
    let mut tiles = Vec::new();
    for j in 0..4 {
        for i in 0..4 {
            tiles.push(regular(Point::new(p * i as f64, p * j as f64), 8, 1.0, 22.5));
        }
    }
    let mut squares: Vec<(i64, i64)> = (0..3).flat_map(|j| (0..3).map(move |i| (i, j))).collect();
    squares.extend((0..3).map(|i| (i, -1)));
    squares.extend((0..3).map(|j| (-1, j)));
    squares.extend((0..3).map(|j| (3, j)));
    squares.push((-1, -1));
    for (i, j) in squares {
        tiles.push(regular(Point::new(p * (i as f64 + 0.5), p * (j as f64 + 0.5)), 4, 1.0, 0.0));
    }
    let mut ids: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    let mut faces = Vec::new();
    for t in &tiles {
        let f: Vec<usize> = t.vertices.iter().map(|&v| {
            let n = ids.len();
            *ids.entry(vertex_key(v)).or_insert(n)
        }).collect();
        faces.push(f);
    }
    MapConfiguration::new(vec![Some(3); ids.len()], faces).expect("fixture is a disk")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pi(n: i64, d: i64) -> PiAngle {
        PiAngle::new(n, d)
    }

    #[test]
    fn tile_examples() {
        assert_eq!(tile_imbalance(&[3; 8]).unwrap(), pi(-2, 3));
        assert_eq!(tile_imbalance(&[3; 4]).unwrap(), pi(2, 3));
        assert_eq!(tile_imbalance(&[4; 4]).unwrap(), PiAngle::ZERO);
        assert_eq!(tile_imbalance(&[3; 8]).unwrap().to_string(), "-2/3 π");
        assert!(tile_imbalance(&[3, 3]).is_err());
        assert!(tile_imbalance(&[3, 1, 3]).is_err());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_vertex_uniform(4, 4).unwrap(), (Curvature::Flat, PiAngle::ZERO));
        assert_eq!(classify_vertex_uniform(7, 3).unwrap(), (Curvature::Hyperbolic, pi(-1, 3)));
        assert_eq!(classify_vertex_uniform(3, 6).unwrap().0, Curvature::Flat);
        assert_eq!(classify_vertex_uniform(3, 3).unwrap().0, Curvature::Elliptic);
        assert!(classify_vertex_uniform(2, 3).is_err());
    }

    #[test]
    fn single_tiles() {
        let sq = MapConfiguration::new(vec![Some(3); 4], vec![vec![0, 1, 2, 3]]).unwrap();
        assert_eq!(configuration_imbalance(&sq, ValenceMode::Ambient).unwrap(), pi(2, 3));
        let hex = MapConfiguration::new(vec![Some(3); 6], vec![(0..6).collect()]).unwrap();
        let r = verify_lemma(&hex, ValenceMode::Ambient).unwrap();
        assert_eq!((r.lhs, r.rhs), (PiAngle::ZERO, PiAngle::ZERO));
    }

    fn grid(n: usize) -> MapConfiguration {
        let id = |i: usize, j: usize| j * (n + 1) + i;
        let mut faces = Vec::new();
        for j in 0..n {
            for i in 0..n {
                faces.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        MapConfiguration::new(vec![Some(4); (n + 1) * (n + 1)], faces).unwrap()
    }

    #[test]
    fn square_grids_are_balanced() {
        for n in 1..=3 {
            let r = verify_lemma(&grid(n), ValenceMode::Ambient).unwrap();
            assert!(r.equal && r.bound_ok);
            assert_eq!(r.lhs, PiAngle::ZERO);
        }
    }

    #[test]
    fn patch_mode_identity_holds() {
        let r = verify_lemma(&grid(3), ValenceMode::Patch).unwrap();
        assert!(r.equal && r.bound_ok);
        // Corners 4·π, edge midpoints 8·4π/3, minus 10π.
        assert_eq!(r.lhs, pi(4, 1) + pi(32, 3) - pi(10, 1));
    }

    #[test]
    fn figure_counts() {
        let c = octagon_square_figure();
        assert_eq!(c.counts(), (91, 125, 35));
        assert_eq!(c.euler(), 1);
        let r = verify_lemma(&c, ValenceMode::Ambient).unwrap();
        assert!(r.equal && r.bound_ok);
        // 16 octagons and 19 squares.
        assert_eq!(r.rhs, pi(-2, 3) * 16 + pi(2, 3) * 19);
    }

    #[test]
    fn topology_errors() {
        // Two squares sharing only a vertex.
        let pinch = MapConfiguration::new(vec![Some(4); 7], vec![vec![0, 1, 2, 3], vec![2, 4, 5, 6]]);
        assert!(matches!(pinch, Err(BalanceError::Topology(_))));
        // An annulus of four squares around a hole.
        let ring = MapConfiguration::new(vec![Some(4); 12], vec![
            vec![0, 1, 5, 4], vec![1, 2, 6, 5], vec![2, 3, 7, 6], vec![4, 5, 9, 8],
            vec![6, 7, 11, 10], vec![8, 9, 10, 11],
        ]);
        assert!(ring.is_err());
        let missing = MapConfiguration::new(vec![None; 4], vec![vec![0, 1, 2, 3]]).unwrap();
        assert_eq!(configuration_imbalance(&missing, ValenceMode::Ambient), Err(BalanceError::MissingValence(0)));
    }

    #[test]
    fn json_round_trip() {
        let c = octagon_square_figure();
        let j = serde_json::to_string(&c.to_json()).unwrap();
        let back = MapConfiguration::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn series_shapes() {
        let s = average_imbalance_series(Tessellation::OctagonSquare, &[5.0, 10.0, 20.0], 1).unwrap();
        assert!(s[0].ratio > s[1].ratio && s[1].ratio > s[2].ratio);
        // Every tile of the square and hexagon grids is balanced.
        for t in [Tessellation::Square, Tessellation::Hexagon] {
            for e in average_imbalance_series(t, &[3.0, 10.0, 12.5], 1).unwrap() {
                assert_eq!((e.imbalance, e.ratio), (PiAngle::ZERO, 0.0));
            }
        }
        assert!(average_imbalance_series(Tessellation::Square, &[1e6], 1).is_err());
    }

    #[test]
    fn series_independent_of_workers() {
        let radii = [4.0, 7.0, 9.5];
        let a = average_imbalance_series(Tessellation::OctagonSquare, &radii, 1).unwrap();
        let b = average_imbalance_series(Tessellation::OctagonSquare, &radii, 4).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn tile_formula_matches_float(q in proptest::collection::vec(2u32..12, 3..10)) {
            let k = tile_imbalance(&q).unwrap();
            let f: f64 = q.iter().map(|&x| 2.0 * std::f64::consts::PI / x as f64).sum::<f64>() - (q.len() as f64 - 2.0) * std::f64::consts::PI;
            prop_assert!((k.radians() - f).abs() < 1e-9);
        }

        #[test]
        fn flat_iff_euclidean(n in 3u32..20, q in 3u32..20) {
            let (c, _) = classify_vertex_uniform(n, q).unwrap();
            prop_assert_eq!(c == Curvature::Flat, (n - 2) * (q - 2) == 4);
        }

        #[test]
        fn lemma_on_disks(t in 0usize..3, cx in -5.0f64..5.0, cy in -5.0f64..5.0, r in 0.0f64..6.0) {
            let t = [Tessellation::Square, Tessellation::Hexagon, Tessellation::OctagonSquare][t];
            if let Ok((c, _)) = configuration_in_disk(t, Point::new(cx, cy), r) {
                prop_assert_eq!(c.euler(), 1);
                let rep = verify_lemma(&c, ValenceMode::Ambient).unwrap();
                prop_assert!(rep.equal && rep.bound_ok);
            }
        }
    }
}
