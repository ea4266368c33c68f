//! Substitution tilings: prototiles, subdivision rules, expansion and
//! bookkeeping.
//!
//! A rule lists, for each prototile, the children that tile its
//! inflated copy. Each child is stored as an affine map from the child's
//! own frame into the parent's *uninflated* frame, so it already includes
//! the contraction. Expanding `n` levels composes these maps down to the
//! leaves and then applies the inflation `n` times, which yields unit
//! tiles covering the seed inflated by `λⁿ`.

mod library;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{validate_patch, validate_patch_in_region, Affine, Isometry, PatchVerdict, Point, Polygon, PolygonPatch};
use crate::search::pool;
use crate::{Rational, Scalar};

pub use library::{library, system_by_name, SYSTEM_NAMES};

/// Largest patch `expand` will build.
pub const MAX_TILES: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SubstitutionError {
    #[error("unknown prototile {0:?}")]
    UnknownPrototile(String),
    #[error("unknown system {0:?}")]
    UnknownSystem(String),
    #[error("expansion would produce {tiles} tiles (limit {limit})")]
    Budget { tiles: u128, limit: u64 },
    #[error("inflation is not invertible")]
    Singular,
    #[error("malformed system: {0}")]
    Malformed(String),
    #[error("geometry: {0}")]
    Geometry(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prototile<T: Scalar> {
    pub name: String,
    pub polygon: Polygon<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Child<T: Scalar> {
    pub tile: usize,
    pub map: Affine<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubstitutionSystem<T: Scalar> {
    pub name: String,
    pub prototiles: Vec<Prototile<T>>,
    /// Linear expansion factor.
    pub scale: f64,
    /// Inflation map; `scale · I` except for rules that also rotate.
    pub inflation: Affine<T>,
    pub rules: Vec<Vec<Child<T>>>,
    /// Maps the working coordinates to the plane, for rendering.
    pub frame: Affine<f64>,
}

/// `M[i][j]` counts type-`i` children in the rule for type `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubstitutionMatrix {
    pub names: Vec<String>,
    pub entries: Vec<Vec<u64>>,
}

impl SubstitutionMatrix {
    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn apply(&self, v: &[u128]) -> Vec<u128> {
        (0..self.size()).map(|i| (0..self.size()).map(|j| self.entries[i][j] as u128 * v[j]).sum()).collect()
    }

    /// `Mⁿ·e_seed`.
    pub fn counts(&self, seed: usize, n: u32) -> Vec<u128> {
        let mut v = vec![0u128; self.size()];
        v[seed] = 1;
        for _ in 0..n {
            v = self.apply(&v);
        }
        v
    }

    /// Perron eigenvector direction, by power iteration.
    pub fn perron(&self) -> (f64, Vec<f64>) {
        let n = self.size();
        let mut v = vec![1.0; n];
        let mut lambda = 0.0;
        for _ in 0..500 {
            let w: Vec<f64> = (0..n).map(|i| (0..n).map(|j| self.entries[i][j] as f64 * v[j]).sum()).collect();
            let norm: f64 = w.iter().sum();
            lambda = norm / v.iter().sum::<f64>();
            v = w.iter().map(|x| x / norm).collect();
        }
        (lambda, v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RuleVerdict {
    Valid,
    Tiling(PatchVerdict),
    Area { expected: f64, got: f64 },
}

impl RuleVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, RuleVerdict::Valid)
    }
}

impl<T: Scalar> SubstitutionSystem<T> {
    pub fn index_of(&self, name: &str) -> Result<usize, SubstitutionError> {
        self.prototiles.iter().position(|p| p.name == name).ok_or_else(|| SubstitutionError::UnknownPrototile(name.into()))
    }

    pub fn matrix(&self) -> SubstitutionMatrix {
        let k = self.prototiles.len();
        let mut entries = vec![vec![0u64; k]; k];
        for (j, rule) in self.rules.iter().enumerate() {
            for c in rule {
                entries[c.tile][j] += 1;
            }
        }
        SubstitutionMatrix { names: self.prototiles.iter().map(|p| p.name.clone()).collect(), entries }
    }

    /// Whether any child map reverses orientation.
    pub fn uses_reflections(&self) -> bool {
        self.rules.iter().flatten().any(|c| c.map.det() < T::zero())
    }

    fn inflation_power(&self, n: u32) -> Affine<T> {
        (0..n).fold(Affine::identity(), |a, _| self.inflation.compose(&a))
    }

    /// Leaves after `n` levels as (prototile, map into the seed frame).
    fn leaves(&self, seed: usize, n: u32, jobs: usize) -> Vec<(usize, Affine<T>)> {
        let step = |level: Vec<(usize, Affine<T>)>| -> Vec<(usize, Affine<T>)> {
            level
                .par_iter()
                .flat_map_iter(|(t, a)| self.rules[*t].iter().map(move |c| (c.tile, a.compose(&c.map))))
                .collect()
        };
        pool(jobs.max(1)).install(|| {
            let mut level = vec![(seed, Affine::identity())];
            for _ in 0..n {
                level = step(level);
            }
            level
        })
    }

    /// Expands `seed` by `n` levels; tiles are at unit size and appear
    /// depth-first in rule order.
    pub fn expand(&self, seed: &str, n: u32, jobs: usize) -> Result<PolygonPatch<T>, SubstitutionError> {
        let s = self.index_of(seed)?;
        let total: u128 = self.matrix().counts(s, n).iter().sum();
        if total > MAX_TILES as u128 {
            return Err(SubstitutionError::Budget { tiles: total, limit: MAX_TILES });
        }
        let big = self.inflation_power(n);
        let mut patch = PolygonPatch::new();
        for (t, a) in self.leaves(s, n, jobs) {
            let p = &self.prototiles[t];
            patch.push(p.name.clone(), p.polygon.transformed(&big.compose(&a)));
        }
        Ok(patch)
    }

    /// One level of subdivision of prototile `j`, with the parent region.
    pub fn rule_patch(&self, j: usize) -> (PolygonPatch<T>, Polygon<T>) {
        let mut patch = PolygonPatch::new();
        for c in &self.rules[j] {
            let p = &self.prototiles[c.tile];
            patch.push(p.name.clone(), p.polygon.transformed(&self.inflation.compose(&c.map)));
        }
        (patch, self.prototiles[j].polygon.transformed(&self.inflation))
    }

    /// Checks that each rule's children exactly tile the inflated parent.
    pub fn validate_rule(&self, tol: f64) -> Result<Vec<(String, RuleVerdict)>, SubstitutionError> {
        let mut out = Vec::new();
        for j in 0..self.prototiles.len() {
            let (patch, region) = self.rule_patch(j);
            let verdict = validate_patch_in_region(&patch, &region, tol).map_err(|e| SubstitutionError::Geometry(e.to_string()))?;
            let expected = region.area();
            let got = patch.total_area();
            let area_ok = if T::EXACT { expected == got } else { !(expected - got).exceeds(tol * expected.to_f64().abs().max(1.0)) };
            let v = if !verdict.is_valid() {
                RuleVerdict::Tiling(verdict)
            } else if !area_ok {
                RuleVerdict::Area { expected: expected.to_f64(), got: got.to_f64() }
            } else {
                RuleVerdict::Valid
            };
            out.push((self.prototiles[j].name.clone(), v));
        }
        Ok(out)
    }

    /// The system in plane coordinates.
    pub fn to_plane(&self) -> SubstitutionSystem<f64> {
        let f = self.frame;
        let finv = f.inverse().expect("frame is invertible");
        let conj = |a: &Affine<T>| f.compose(&a.to_f64()).compose(&finv);
        SubstitutionSystem {
            name: self.name.clone(),
            prototiles: self
                .prototiles
                .iter()
                .map(|p| Prototile { name: p.name.clone(), polygon: p.polygon.to_f64().transformed(&f) })
                .collect(),
            scale: self.scale,
            inflation: conj(&self.inflation),
            rules: self.rules.iter().map(|r| r.iter().map(|c| Child { tile: c.tile, map: conj(&c.map) }).collect()).collect(),
            frame: Affine::identity(),
        }
    }

    pub fn to_json(&self) -> SystemJson {
        let plane = self.to_plane();
        let rules = plane
            .rules
            .iter()
            .zip(&plane.prototiles)
            .map(|(rule, p)| {
                let children = rule
                    .iter()
                    .map(|c| {
                        let (iso, _) = Isometry::from_similarity(&plane.inflation.compose(&c.map));
                        ChildJson {
                            tile: plane.prototiles[c.tile].name.clone(),
                            rotation: round9(iso.rotation.to_degrees()),
                            reflect: iso.reflected,
                            translation: [round9(iso.translation[0]), round9(iso.translation[1])],
                        }
                    })
                    .collect();
                (p.name.clone(), children)
            })
            .collect();
        let inflation = (plane.inflation != Affine::scale(plane.scale)).then_some(plane.inflation.m);
        SystemJson {
            name: self.name.clone(),
            scale: self.scale,
            inflation,
            prototiles: plane
                .prototiles
                .iter()
                .map(|p| PrototileJson { name: p.name.clone(), vertices: p.polygon.vertices.iter().map(|v| [v.x, v.y]).collect() })
                .collect(),
            rules,
        }
    }
}

fn round9(x: f64) -> f64 {
    let r = (x * 1e9).round() / 1e9;
    if r == 0.0 { 0.0 } else { r }
}

/// Diameter of a patch: largest distance between two vertices.
pub fn diameter<T: Scalar>(patch: &PolygonPatch<T>) -> f64 {
    let pts: Vec<Point<f64>> = patch.tiles.iter().flat_map(|t| t.polygon.vertices.iter().map(|v| v.to_f64())).collect();
    let hull = convex_hull(pts);
    let mut best: f64 = 0.0;
    for (i, a) in hull.iter().enumerate() {
        for b in &hull[i + 1..] {
            best = best.max((*a - *b).norm());
        }
    }
    best
}

fn convex_hull(mut pts: Vec<Point<f64>>) -> Vec<Point<f64>> {
    pts.sort_by(|a, b| a.lex_cmp(b));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Point<f64>> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && crate::geometry::orient(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point<f64>> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && crate::geometry::orient(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Counts tiles per prototile; every label must name a prototile.
pub fn census<T: Scalar, U: Scalar>(system: &SubstitutionSystem<U>, patch: &PolygonPatch<T>) -> Result<BTreeMap<String, u64>, SubstitutionError> {
    let mut out: BTreeMap<String, u64> = system.prototiles.iter().map(|p| (p.name.clone(), 0)).collect();
    for t in &patch.tiles {
        *out.get_mut(&t.label).ok_or_else(|| SubstitutionError::UnknownPrototile(t.label.clone()))? += 1;
    }
    Ok(out)
}

/// A shipped system in its native scalar.
#[derive(Clone, Debug)]
pub enum AnySystem {
    Exact(SubstitutionSystem<Rational>),
    Float(SubstitutionSystem<f64>),
}

impl AnySystem {
    pub fn name(&self) -> &str {
        match self {
            AnySystem::Exact(s) => &s.name,
            AnySystem::Float(s) => &s.name,
        }
    }

    pub fn prototile_names(&self) -> Vec<String> {
        match self {
            AnySystem::Exact(s) => s.prototiles.iter().map(|p| p.name.clone()).collect(),
            AnySystem::Float(s) => s.prototiles.iter().map(|p| p.name.clone()).collect(),
        }
    }

    pub fn matrix(&self) -> SubstitutionMatrix {
        match self {
            AnySystem::Exact(s) => s.matrix(),
            AnySystem::Float(s) => s.matrix(),
        }
    }

    pub fn scale(&self) -> f64 {
        match self {
            AnySystem::Exact(s) => s.scale,
            AnySystem::Float(s) => s.scale,
        }
    }

    pub fn uses_reflections(&self) -> bool {
        match self {
            AnySystem::Exact(s) => s.uses_reflections(),
            AnySystem::Float(s) => s.uses_reflections(),
        }
    }

    /// Expansion drawn in the plane.
    pub fn expand_plane(&self, seed: &str, n: u32, jobs: usize) -> Result<PolygonPatch<f64>, SubstitutionError> {
        match self {
            AnySystem::Exact(s) => Ok(s.expand(seed, n, jobs)?.to_f64().transformed(&s.frame)),
            AnySystem::Float(s) => Ok(s.expand(seed, n, jobs)?.transformed(&s.frame)),
        }
    }

    /// Expansion followed by a validity check in the native scalar.
    pub fn expand_checked(&self, seed: &str, n: u32, jobs: usize, tol: f64) -> Result<(PolygonPatch<f64>, PatchVerdict), SubstitutionError> {
        let geo = |e: crate::geometry::GeometryError| SubstitutionError::Geometry(e.to_string());
        match self {
            AnySystem::Exact(s) => {
                let p = s.expand(seed, n, jobs)?;
                let v = validate_patch(&p, tol).map_err(geo)?;
                Ok((p.to_f64().transformed(&s.frame), v))
            }
            AnySystem::Float(s) => {
                let p = s.expand(seed, n, jobs)?;
                let v = validate_patch(&p, tol).map_err(geo)?;
                Ok((p.transformed(&s.frame), v))
            }
        }
    }

    pub fn validate_rule(&self, tol: f64) -> Result<Vec<(String, RuleVerdict)>, SubstitutionError> {
        match self {
            AnySystem::Exact(s) => s.validate_rule(tol),
            AnySystem::Float(s) => s.validate_rule(tol),
        }
    }

    pub fn census(&self, patch: &PolygonPatch<f64>) -> Result<BTreeMap<String, u64>, SubstitutionError> {
        match self {
            AnySystem::Exact(s) => census(s, patch),
            AnySystem::Float(s) => census(s, patch),
        }
    }

    pub fn to_json(&self) -> SystemJson {
        match self {
            AnySystem::Exact(s) => s.to_json(),
            AnySystem::Float(s) => s.to_json(),
        }
    }
}

/// System JSON, in plane coordinates. Each child is placed by
/// `translation + R(rotation°)·F` (F flips y when `reflect`) in the
/// inflated parent.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SystemJson {
    pub name: String,
    pub scale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inflation: Option<[[f64; 2]; 2]>,
    pub prototiles: Vec<PrototileJson>,
    pub rules: BTreeMap<String, Vec<ChildJson>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PrototileJson {
    pub name: String,
    pub vertices: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChildJson {
    pub tile: String,
    pub rotation: f64,
    #[serde(default)]
    pub reflect: bool,
    pub translation: [f64; 2],
}

impl SystemJson {
    pub fn to_system(&self) -> Result<SubstitutionSystem<f64>, SubstitutionError> {
        if !(self.scale > 1.0) {
            return Err(SubstitutionError::Malformed(format!("scale {} must exceed 1", self.scale)));
        }
        let inflation = match self.inflation {
            Some(m) => Affine { m, t: [0.0, 0.0] },
            None => Affine::scale(self.scale),
        };
        let inv = inflation.inverse().ok_or(SubstitutionError::Singular)?;
        let prototiles: Vec<Prototile<f64>> = self
            .prototiles
            .iter()
            .map(|p| Prototile { name: p.name.clone(), polygon: Polygon::new(p.vertices.iter().map(|v| Point::new(v[0], v[1])).collect()).to_ccw() })
            .collect();
        let index = |n: &str| prototiles.iter().position(|p| p.name == n).ok_or_else(|| SubstitutionError::UnknownPrototile(n.into()));
        let mut rules = vec![Vec::new(); prototiles.len()];
        for (parent, children) in &self.rules {
            let j = index(parent)?;
            for c in children {
                let iso = Isometry::degrees(c.rotation, c.translation, c.reflect).to_affine();
                rules[j].push(Child { tile: index(&c.tile)?, map: inv.compose(&iso) });
            }
        }
        if let Some(j) = rules.iter().position(Vec::is_empty) {
            return Err(SubstitutionError::Malformed(format!("no rule for {}", prototiles[j].name)));
        }
        Ok(SubstitutionSystem { name: self.name.clone(), prototiles, scale: self.scale, inflation, rules, frame: Affine::identity() })
    }
}
