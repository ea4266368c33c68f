//! Decorated polyominoes and polyhexes.
//!
//! A tile is a finite edge-connected set of lattice cells. Its boundary
//! edges are flat or bulge `in` or `out`. Neighboring copies must mate
//! `in` with `out` and `flat` with `flat`. Hex cells use axial
//! coordinates.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Point, Polygon, PolygonPatch};
use crate::search::{collect_in_order, first_in_order, BranchEnd, Merged, Meter};
use crate::SearchConfig;

pub type Cell = (i64, i64);

/// Default largest domain area, in cells.
pub const DEFAULT_DOMAIN_AREA: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyformError {
    #[error("tile has no cells")]
    Empty,
    #[error("cells are not edge-connected")]
    Disconnected,
    #[error("direction {0} out of range")]
    BadDirection(u8),
    #[error("edge {dir} of cell {cell:?} is not a boundary edge")]
    NotBoundary { cell: Cell, dir: u8 },
    #[error("unknown lattice {0:?}")]
    UnknownLattice(String),
    #[error("bad argument: {0}")]
    BadArgument(String),
    #[error("search budget of {budget} nodes exhausted")]
    ResourceLimit { budget: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lattice {
    Square,
    Hex,
}

const SQUARE_DIRS: [Cell; 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];
const HEX_DIRS: [Cell; 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];
const SQUARE_TOUCH: [Cell; 8] = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];

impl Lattice {
    pub fn dirs(self) -> &'static [Cell] {
        match self {
            Lattice::Square => &SQUARE_DIRS,
            Lattice::Hex => &HEX_DIRS,
        }
    }

    pub fn n_dirs(self) -> u8 {
        self.dirs().len() as u8
    }

    pub fn opposite(self, d: u8) -> u8 {
        (d + self.n_dirs() / 2) % self.n_dirs()
    }

    pub fn step(self, c: Cell, d: u8) -> Cell {
        let v = self.dirs()[d as usize];
        (c.0 + v.0, c.1 + v.1)
    }

    /// Cells sharing an edge or a corner with a cell.
    fn touching(self) -> &'static [Cell] {
        match self {
            Lattice::Square => &SQUARE_TOUCH,
            Lattice::Hex => &HEX_DIRS,
        }
    }

    /// One rotation step counterclockwise: 90° or 60°.
    fn rotate(self, c: Cell) -> Cell {
        match self {
            Lattice::Square => (-c.1, c.0),
            Lattice::Hex => (-c.1, c.0 + c.1),
        }
    }

    /// Mirror fixing direction 0.
    fn reflect(self, c: Cell) -> Cell {
        match self {
            Lattice::Square => (c.0, -c.1),
            Lattice::Hex => (c.0 + c.1, -c.1),
        }
    }

    fn transform(self, c: Cell, rotation: u8, reflected: bool) -> Cell {
        let mut c = if reflected { self.reflect(c) } else { c };
        for _ in 0..rotation {
            c = self.rotate(c);
        }
        c
    }

    fn transform_dir(self, d: u8, rotation: u8, reflected: bool) -> u8 {
        let n = self.n_dirs();
        let d = if reflected { (n - d) % n } else { d };
        (d + rotation) % n
    }

    pub fn center(self, c: Cell) -> Point<f64> {
        match self {
            Lattice::Square => Point::new(c.0 as f64 + 0.5, c.1 as f64 + 0.5),
            Lattice::Hex => Point::new(3f64.sqrt() * (c.0 as f64 + c.1 as f64 / 2.0), 1.5 * c.1 as f64),
        }
    }

    pub fn cell_polygon(self, c: Cell) -> Polygon<f64> {
        let o = self.center(c);
        match self {
            Lattice::Square => Polygon::new(vec![
                Point::new(o.x - 0.5, o.y - 0.5),
                Point::new(o.x + 0.5, o.y - 0.5),
                Point::new(o.x + 0.5, o.y + 0.5),
                Point::new(o.x - 0.5, o.y + 0.5),
            ]),
            Lattice::Hex => Polygon::new(
                (0..6)
                    .map(|k| {
                        let a = (30.0 + 60.0 * k as f64).to_radians();
                        Point::new(o.x + a.cos(), o.y + a.sin())
                    })
                    .collect(),
            ),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Dec {
    #[default]
    Flat,
    In,
    Out,
}

impl Dec {
    pub fn mates(self, o: Dec) -> bool {
        matches!((self, o), (Dec::Flat, Dec::Flat) | (Dec::In, Dec::Out) | (Dec::Out, Dec::In))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecoratedPolyform {
    pub lattice: Lattice,
    cells: BTreeSet<Cell>,
    /// Non-flat boundary edges.
    edges: BTreeMap<(Cell, u8), Dec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyformJson {
    pub lattice: Lattice,
    pub cells: Vec<[i64; 2]>,
    #[serde(default)]
    pub edges: Vec<EdgeJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeJson {
    pub cell: [i64; 2],
    pub dir: u8,
    pub dec: Dec,
}

impl DecoratedPolyform {
    pub fn new(lattice: Lattice, cells: &[Cell], edges: &[(Cell, u8, Dec)]) -> Result<Self, PolyformError> {
        let cells: BTreeSet<Cell> = cells.iter().copied().collect();
        let first = *cells.iter().next().ok_or(PolyformError::Empty)?;
        let mut seen = BTreeSet::from([first]);
        let mut stack = vec![first];
        while let Some(c) = stack.pop() {
            for d in 0..lattice.n_dirs() {
                let n = lattice.step(c, d);
                if cells.contains(&n) && seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        if seen.len() != cells.len() {
            return Err(PolyformError::Disconnected);
        }
        let mut map = BTreeMap::new();
        for &(cell, dir, dec) in edges {
            if dir >= lattice.n_dirs() {
                return Err(PolyformError::BadDirection(dir));
            }
            if !cells.contains(&cell) || cells.contains(&lattice.step(cell, dir)) {
                return Err(PolyformError::NotBoundary { cell, dir });
            }
            if dec != Dec::Flat {
                map.insert((cell, dir), dec);
            } else {
                map.remove(&(cell, dir));
            }
        }
        Ok(DecoratedPolyform { lattice, cells, edges: map })
    }

    pub fn from_json(j: &PolyformJson) -> Result<Self, PolyformError> {
        let cells: Vec<Cell> = j.cells.iter().map(|c| (c[0], c[1])).collect();
        let edges: Vec<(Cell, u8, Dec)> = j.edges.iter().map(|e| ((e.cell[0], e.cell[1]), e.dir, e.dec)).collect();
        DecoratedPolyform::new(j.lattice, &cells, &edges)
    }

    pub fn to_json(&self) -> PolyformJson {
        PolyformJson {
            lattice: self.lattice,
            cells: self.cells.iter().map(|c| [c.0, c.1]).collect(),
            edges: self.edges.iter().map(|(&(c, d), &dec)| EdgeJson { cell: [c.0, c.1], dir: d, dec }).collect(),
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.cells.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn dec(&self, cell: Cell, dir: u8) -> Dec {
        self.edges.get(&(cell, dir)).copied().unwrap_or_default()
    }

    pub fn boundary_edges(&self) -> Vec<(Cell, u8)> {
        let mut out = Vec::new();
        for &c in &self.cells {
            for d in 0..self.lattice.n_dirs() {
                if !self.cells.contains(&self.lattice.step(c, d)) {
                    out.push((c, d));
                }
            }
        }
        out
    }

    /// Image under a point-group element, not yet normalized.
    pub fn transformed(&self, rotation: u8, reflected: bool) -> DecoratedPolyform {
        let l = self.lattice;
        DecoratedPolyform {
            lattice: l,
            cells: self.cells.iter().map(|&c| l.transform(c, rotation, reflected)).collect(),
            edges: self
                .edges
                .iter()
                .map(|(&(c, d), &dec)| ((l.transform(c, rotation, reflected), l.transform_dir(d, rotation, reflected)), dec))
                .collect(),
        }
    }

    pub fn translated(&self, by: Cell) -> DecoratedPolyform {
        let t = |c: Cell| (c.0 + by.0, c.1 + by.1);
        DecoratedPolyform {
            lattice: self.lattice,
            cells: self.cells.iter().map(|&c| t(c)).collect(),
            edges: self.edges.iter().map(|(&(c, d), &dec)| ((t(c), d), dec)).collect(),
        }
    }

    fn normalized(&self) -> DecoratedPolyform {
        let m = *self.cells.iter().next().expect("nonempty");
        self.translated((-m.0, -m.1))
    }

    /// Distinct orientations, translated so the least cell is the origin.
    pub fn orientations(&self, allow_reflections: bool) -> Vec<Orientation> {
        let mut out: Vec<Orientation> = Vec::new();
        for reflected in [false, true] {
            if reflected && !allow_reflections {
                continue;
            }
            for rotation in 0..self.lattice.n_dirs() {
                let shape = self.transformed(rotation, reflected).normalized();
                if !out.iter().any(|o| o.shape == shape) {
                    out.push(Orientation { rotation, reflected, shape });
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Orientation {
    pub rotation: u8,
    pub reflected: bool,
    pub shape: DecoratedPolyform,
}

/// Counts of boundary edges by decoration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeCensus {
    pub inward: usize,
    pub outward: usize,
    pub flat: usize,
}

pub fn edge_census(t: &DecoratedPolyform) -> EdgeCensus {
    let mut c = EdgeCensus { inward: 0, outward: 0, flat: 0 };
    for (cell, d) in t.boundary_edges() {
        match t.dec(cell, d) {
            Dec::In => c.inward += 1,
            Dec::Out => c.outward += 1,
            Dec::Flat => c.flat += 1,
        }
    }
    c
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CensusVerdict {
    /// Every copy leaves at least `deficit` edges of the surplus kind
    /// unmatched, and they can only sit on the boundary of a patch.
    NoTilingProved { deficit: usize, surplus: Dec },
    Inconclusive,
}

/// In a patch of N copies each interior mated pair uses one `in` and one
/// `out` edge, so an excess of either kind forces `excess·N` unmatched
/// edges onto a boundary that grows only linearly in the radius.
pub fn census_nontiler(t: &DecoratedPolyform) -> CensusVerdict {
    let c = edge_census(t);
    if c.inward > c.outward {
        CensusVerdict::NoTilingProved { deficit: c.inward - c.outward, surplus: Dec::In }
    } else if c.outward > c.inward {
        CensusVerdict::NoTilingProved { deficit: c.outward - c.inward, surplus: Dec::Out }
    } else {
        CensusVerdict::Inconclusive
    }
}

/// A copy of the tile: orientation applied, then translated by `offset`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlacedCopy {
    pub rotation: u8,
    pub reflected: bool,
    pub offset: Cell,
    pub cells: Vec<Cell>,
}

struct Placed<'a> {
    orient: usize,
    offset: Cell,
    shape: &'a DecoratedPolyform,
}

impl Placed<'_> {
    fn dec(&self, actual: Cell, d: u8) -> Dec {
        self.shape.dec((actual.0 - self.offset.0, actual.1 - self.offset.1), d)
    }

    fn has(&self, actual: Cell) -> bool {
        self.shape.cells.contains(&(actual.0 - self.offset.0, actual.1 - self.offset.1))
    }

    fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.shape.cells.iter().map(move |c| (c.0 + self.offset.0, c.1 + self.offset.1))
    }

    fn export(&self, orients: &[Orientation]) -> PlacedCopy {
        let o = &orients[self.orient];
        PlacedCopy { rotation: o.rotation, reflected: o.reflected, offset: self.offset, cells: self.cells().collect() }
    }
}

/// A periodic tiling: the copies tile the torus `Z² / ⟨v₁, v₂⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FundamentalDomain {
    pub vectors: [Cell; 2],
    pub copies: Vec<PlacedCopy>,
    /// Copies in the domain, i.e. transitivity classes under the period
    /// lattice; an upper bound on the isohedral number.
    pub orbit_count: usize,
}

/// Sublattice with basis `(a, 0), (b, c)`, `0 ≤ b < a`.
#[derive(Clone, Copy, Debug)]
struct Torus {
    a: i64,
    b: i64,
    c: i64,
}

impl Torus {
    fn area(&self) -> usize {
        (self.a * self.c) as usize
    }

    fn reduce(&self, p: Cell) -> (usize, Cell) {
        let k = p.1.div_euclid(self.c);
        let y = p.1 - k * self.c;
        let x = (p.0 - k * self.b).rem_euclid(self.a);
        ((y * self.a + x) as usize, (x, y))
    }

    fn in_lattice(&self, v: Cell) -> bool {
        v.1 % self.c == 0 && (v.0 - v.1 / self.c * self.b) % self.a == 0
    }
}

fn tori(area: usize) -> Vec<Torus> {
    let mut out = Vec::new();
    for a in 1..=area as i64 {
        if area as i64 % a != 0 {
            continue;
        }
        let c = area as i64 / a;
        for b in 0..a {
            out.push(Torus { a, b, c });
        }
    }
    out
}

fn torus_cover<'a>(orients: &'a [Orientation], t: Torus, meter: &mut Meter) -> BranchEnd<Vec<Placed<'a>>> {
    let lat = orients[0].shape.lattice;
    let mut occ: Vec<Option<(usize, Cell)>> = vec![None; t.area()];
    let mut placed: Vec<Placed<'a>> = Vec::new();
    // Explicit stack of (target, candidate index) frames.
    let candidates: Vec<(usize, Cell)> =
        orients.iter().enumerate().flat_map(|(i, o)| o.shape.cells.iter().map(move |&c| (i, c))).collect();
    let mut frames: Vec<usize> = vec![0];
    loop {
        let Some(target) = occ.iter().position(Option::is_none) else {
            return BranchEnd::Found(placed);
        };
        let tcell = ((target % t.a as usize) as i64, (target / t.a as usize) as i64);
        let start = *frames.last().expect("frame");
        let mut advanced = false;
        for k in start..candidates.len() {
            if !meter.tick() {
                return BranchEnd::Stopped;
            }
            let (oi, anchor) = candidates[k];
            let p = Placed { orient: oi, offset: (tcell.0 - anchor.0, tcell.1 - anchor.1), shape: &orients[oi].shape };
            if try_place_torus(&p, &placed, t, lat, &mut occ) {
                *frames.last_mut().expect("frame") = k + 1;
                placed.push(p);
                frames.push(0);
                advanced = true;
                break;
            }
        }
        if !advanced {
            frames.pop();
            match placed.pop() {
                None => return BranchEnd::Exhausted,
                Some(p) => {
                    for c in p.cells() {
                        occ[t.reduce(c).0] = None;
                    }
                }
            }
        }
    }
}

fn try_place_torus(p: &Placed, placed: &[Placed], t: Torus, lat: Lattice, occ: &mut [Option<(usize, Cell)>]) -> bool {
    let id = placed.len();
    let mut idx = Vec::with_capacity(p.shape.cells.len());
    for c in p.cells() {
        let (i, _) = t.reduce(c);
        if occ[i].is_some() || idx.contains(&i) {
            return false;
        }
        idx.push(i);
    }
    for (c, &i) in p.cells().zip(&idx) {
        occ[i] = Some((id, c));
    }
    let ok = p.cells().all(|c| {
        (0..lat.n_dirs()).all(|d| {
            let y = lat.step(c, d);
            if p.has(y) {
                return true;
            }
            match occ[t.reduce(y).0] {
                None => true,
                Some((owner, actual)) => {
                    let other = if owner == id { p.dec(actual, lat.opposite(d)) } else { placed[owner].dec(actual, lat.opposite(d)) };
                    p.dec(c, d).mates(other)
                }
            }
        })
    });
    if !ok {
        for &i in &idx {
            occ[i] = None;
        }
    }
    ok
}

/// Smallest torus, by area then basis, that the tile covers exactly.
pub fn fundamental_domain_search(
    t: &DecoratedPolyform,
    max_area: usize,
    allow_reflections: bool,
    cfg: SearchConfig,
) -> Result<Option<FundamentalDomain>, PolyformError> {
    if max_area < t.len() {
        return Err(PolyformError::BadArgument(format!("max area {max_area} is below the tile size {}", t.len())));
    }
    let orients = t.orientations(allow_reflections);
    let all: Vec<Torus> = (1..=max_area / t.len()).flat_map(|k| tori(k * t.len())).collect();
    let merged = first_in_order(all.len(), cfg, |i, m| match torus_cover(&orients, all[i], m) {
        BranchEnd::Found(p) => BranchEnd::Found(p.iter().map(|x| x.export(&orients)).collect::<Vec<_>>()),
        BranchEnd::Exhausted => BranchEnd::Exhausted,
        BranchEnd::Stopped => BranchEnd::Stopped,
    });
    let winner = match merged {
        Merged::Found(copies, _) => copies,
        Merged::Exhausted(_) => return Ok(None),
        Merged::Limit(_) => return Err(PolyformError::ResourceLimit { budget: cfg.budget }),
    };
    // Recover which torus won: the first one this cover fits.
    let area: usize = winner.iter().map(|c| c.cells.len()).sum();
    let torus = all
        .iter()
        .filter(|tt| tt.area() == area)
        .find(|tt| check_domain_cover(t, tt, &winner))
        .copied()
        .expect("cover fits its torus");
    Ok(Some(FundamentalDomain { vectors: [(torus.a, 0), (torus.b, torus.c)], orbit_count: winner.len(), copies: winner }))
}

fn check_domain_cover(t: &DecoratedPolyform, torus: &Torus, copies: &[PlacedCopy]) -> bool {
    domain_is_valid(t, &FundamentalDomain { vectors: [(torus.a, 0), (torus.b, torus.c)], copies: copies.to_vec(), orbit_count: copies.len() })
}

/// Independent check that a domain's copies are images of `t`, cover the
/// torus exactly once, and mate on every edge after wraparound.
pub fn domain_is_valid(t: &DecoratedPolyform, d: &FundamentalDomain) -> bool {
    let [(a, z), (b, c)] = d.vectors;
    if z != 0 || a <= 0 || c <= 0 {
        return false;
    }
    let torus = Torus { a, b: b.rem_euclid(a), c };
    let lat = t.lattice;
    let shapes: Vec<DecoratedPolyform> =
        d.copies.iter().map(|p| t.transformed(p.rotation, p.reflected).normalized().translated(p.offset)).collect();
    let mut owner: BTreeMap<usize, (usize, Cell)> = BTreeMap::new();
    for (i, (s, p)) in shapes.iter().zip(&d.copies).enumerate() {
        let cells: Vec<Cell> = s.cells().collect();
        if cells != p.cells {
            return false;
        }
        for c in cells {
            if owner.insert(torus.reduce(c).0, (i, c)).is_some() {
                return false;
            }
        }
    }
    if owner.len() != torus.area() {
        return false;
    }
    for s in &shapes {
        for (c, dir) in s.boundary_edges() {
            let y = lat.step(c, dir);
            let (j, actual) = owner[&torus.reduce(y).0];
            let shift = (y.0 - actual.0, y.1 - actual.1);
            if !torus.in_lattice(shift) || !s.dec(c, dir).mates(shapes[j].dec(actual, lat.opposite(dir))) {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Heesch {
    Finite(usize),
    Periodic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoronaResult {
    pub heesch: Heesch,
    /// Deepest witness found: ring 0 is the central copy.
    pub rings: Vec<Vec<PlacedCopy>>,
    pub domain: Option<FundamentalDomain>,
    /// Set when a search ran out of budget; the level is then a lower bound.
    pub limits_hit: bool,
}

impl CoronaResult {
    /// Witness for `level`: the first `level + 1` rings of the deepest one.
    pub fn witness(&self, level: usize) -> Option<&[Vec<PlacedCopy>]> {
        (level < self.rings.len()).then(|| &self.rings[..=level])
    }
}

/// Heesch search. A periodic tiling found by the domain search (areas up
/// to [`DEFAULT_DOMAIN_AREA`]) ends it early.
pub fn corona_search(t: &DecoratedPolyform, max_level: usize, allow_reflections: bool, cfg: SearchConfig) -> Result<CoronaResult, PolyformError> {
    if max_level == 0 {
        return Err(PolyformError::BadArgument("max level must be at least 1".into()));
    }
    let area = DEFAULT_DOMAIN_AREA.max(t.len());
    match fundamental_domain_search(t, area, allow_reflections, cfg) {
        Ok(Some(d)) => {
            return Ok(CoronaResult { heesch: Heesch::Periodic, rings: Vec::new(), domain: Some(d), limits_hit: false });
        }
        Ok(None) => {}
        Err(PolyformError::ResourceLimit { .. }) => {
            let mut r = corona_levels(t, max_level, allow_reflections, cfg)?;
            r.limits_hit = true;
            return Ok(r);
        }
        Err(e) => return Err(e),
    }
    corona_levels(t, max_level, allow_reflections, cfg)
}

struct Plane<'a> {
    lat: Lattice,
    orients: &'a [Orientation],
    occ: HashMap<Cell, usize>,
    placed: Vec<Placed<'a>>,
    ring_of: Vec<usize>,
    best_level: usize,
    best: Vec<(PlacedCopy, usize)>,
    max_level: usize,
}

enum Walk {
    Done,
    Stop,
    Continue,
}

impl<'a> Plane<'a> {
    fn new(orients: &'a [Orientation], max_level: usize) -> Self {
        let mut p = Plane {
            lat: orients[0].shape.lattice,
            orients,
            occ: HashMap::new(),
            placed: Vec::new(),
            ring_of: Vec::new(),
            best_level: 0,
            best: Vec::new(),
            max_level,
        };
        let center = Placed { orient: 0, offset: (0, 0), shape: &orients[0].shape };
        let ok = p.place(center, 0);
        debug_assert!(ok);
        p.best = vec![(p.placed[0].export(orients), 0)];
        p
    }

    fn place(&mut self, p: Placed<'a>, ring: usize) -> bool {
        if p.cells().any(|c| self.occ.contains_key(&c)) {
            return false;
        }
        for c in p.cells() {
            for d in 0..self.lat.n_dirs() {
                let y = self.lat.step(c, d);
                if p.has(y) {
                    continue;
                }
                if let Some(&o) = self.occ.get(&y) {
                    if !p.dec(c, d).mates(self.placed[o].dec(y, self.lat.opposite(d))) {
                        return false;
                    }
                }
            }
        }
        let id = self.placed.len();
        for c in p.cells() {
            self.occ.insert(c, id);
        }
        self.placed.push(p);
        self.ring_of.push(ring);
        true
    }

    fn unplace(&mut self) {
        let p = self.placed.pop().expect("placed");
        self.ring_of.pop();
        for c in p.cells() {
            self.occ.remove(&c);
        }
    }

    /// Uncovered cells touching copies of rings below `ring`, sorted.
    fn surround(&self, ring: usize) -> Vec<Cell> {
        let mut out = BTreeSet::new();
        for (p, &r) in self.placed.iter().zip(&self.ring_of) {
            if r >= ring {
                continue;
            }
            for c in p.cells() {
                for v in self.lat.touching() {
                    let y = (c.0 + v.0, c.1 + v.1);
                    if !self.occ.contains_key(&y) {
                        out.insert(y);
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    /// Uncovered cells enclosed by the patch, in row order.
    fn first_hole(&self) -> Option<Cell> {
        let (mut x0, mut x1, mut y0, mut y1) = (i64::MAX, i64::MIN, i64::MAX, i64::MIN);
        for c in self.occ.keys() {
            x0 = x0.min(c.0 - 1);
            x1 = x1.max(c.0 + 1);
            y0 = y0.min(c.1 - 1);
            y1 = y1.max(c.1 + 1);
        }
        let inside = |c: Cell| c.0 >= x0 && c.0 <= x1 && c.1 >= y0 && c.1 <= y1;
        let mut outside = BTreeSet::from([(x0, y0)]);
        let mut stack = vec![(x0, y0)];
        while let Some(c) = stack.pop() {
            for d in 0..self.lat.n_dirs() {
                let y = self.lat.step(c, d);
                if inside(y) && !self.occ.contains_key(&y) && outside.insert(y) {
                    stack.push(y);
                }
            }
        }
        (y0..=y1).flat_map(|y| (x0..=x1).map(move |x| (x, y))).find(|c| !self.occ.contains_key(c) && !outside.contains(c))
    }

    fn target(&self, surround: &[Cell]) -> Option<Cell> {
        surround.iter().copied().find(|c| !self.occ.contains_key(c)).or_else(|| self.first_hole())
    }

    fn candidates(&self, target: Cell) -> Vec<Placed<'a>> {
        let mut v = Vec::new();
        for (oi, o) in self.orients.iter().enumerate() {
            for &a in &o.shape.cells {
                v.push(Placed { orient: oi, offset: (target.0 - a.0, target.1 - a.1), shape: &o.shape });
            }
        }
        v
    }

    fn record(&mut self, level: usize) {
        if level > self.best_level {
            self.best_level = level;
            self.best = self.placed.iter().zip(&self.ring_of).map(|(p, &r)| (p.export(self.orients), r)).collect();
        }
    }

    fn ring_dfs(&mut self, ring: usize, surround: &[Cell], meter: &mut Meter) -> Walk {
        let Some(target) = self.target(surround) else {
            self.record(ring);
            if ring == self.max_level {
                return Walk::Done;
            }
            let next = self.surround(ring + 1);
            return self.ring_dfs(ring + 1, &next, meter);
        };
        for p in self.candidates(target) {
            if !meter.tick() {
                return Walk::Stop;
            }
            if self.place(p, ring) {
                let w = self.ring_dfs(ring, surround, meter);
                self.unplace();
                if !matches!(w, Walk::Continue) {
                    return w;
                }
            }
        }
        Walk::Continue
    }

    fn rings(&self) -> Vec<Vec<PlacedCopy>> {
        let mut rings = vec![Vec::new(); self.best_level + 1];
        for (c, r) in &self.best {
            if *r <= self.best_level {
                rings[*r].push(c.clone());
            }
        }
        rings
    }
}

struct BranchBest {
    level: usize,
    rings: Vec<Vec<PlacedCopy>>,
}

/// Ring-by-ring search for the largest complete corona, without the
/// periodicity shortcut.
pub fn corona_levels(t: &DecoratedPolyform, max_level: usize, allow_reflections: bool, cfg: SearchConfig) -> Result<CoronaResult, PolyformError> {
    if max_level == 0 {
        return Err(PolyformError::BadArgument("max level must be at least 1".into()));
    }
    let orients = t.orientations(allow_reflections);
    let root = Plane::new(&orients, max_level);
    let first_surround = root.surround(1);
    let first = root.candidates(first_surround[0]);

    if cfg.jobs > 1 {
        let run = |i: usize, m: &mut Meter| -> Option<Vec<BranchBest>> {
            let mut plane = Plane::new(&orients, max_level);
            let cand = &first[i];
            let p = Placed { orient: cand.orient, offset: cand.offset, shape: cand.shape };
            if !m.tick() {
                return None;
            }
            if plane.place(p, 1) {
                if let Walk::Stop = plane.ring_dfs(1, &first_surround, m) {
                    return None;
                }
            }
            Some(vec![BranchBest { level: plane.best_level, rings: plane.rings() }])
        };
        if let Ok(branches) = collect_in_order(first.len(), cfg, run) {
            let mut best = BranchBest { level: 0, rings: root.rings() };
            for b in branches {
                if b.level > best.level {
                    best = b;
                }
            }
            return Ok(CoronaResult { heesch: Heesch::Finite(best.level), rings: best.rings, domain: None, limits_hit: false });
        }
    }

    // Sequential order defines the answer; the parallel path above agrees
    // with it whenever it finishes within budget.
    let out = std::sync::Mutex::new(None);
    let _ = collect_in_order(1, cfg.with_jobs(1), |_, m| {
        let mut plane = Plane::new(&orients, max_level);
        let stopped = matches!(plane.ring_dfs(1, &first_surround, m), Walk::Stop);
        *out.lock().expect("lock") = Some((plane.best_level, plane.rings(), stopped));
        Some(Vec::<()>::new())
    });
    let (level, rings, stopped) = out.into_inner().expect("lock").expect("ran");
    Ok(CoronaResult { heesch: Heesch::Finite(level), rings, domain: None, limits_hit: stopped })
}

/// Independent check of a corona witness: copies are images of `t`,
/// disjoint, mated on shared edges, and each ring covers every cell
/// touching the rings inside it.
pub fn corona_is_valid(t: &DecoratedPolyform, rings: &[Vec<PlacedCopy>]) -> bool {
    let lat = t.lattice;
    let mut owner: HashMap<Cell, (usize, DecoratedPolyform)> = HashMap::new();
    let mut shapes = Vec::new();
    for ring in rings {
        for p in ring {
            let s = t.transformed(p.rotation, p.reflected).normalized().translated(p.offset);
            if s.cells().collect::<Vec<_>>() != p.cells {
                return false;
            }
            for c in s.cells() {
                if owner.insert(c, (shapes.len(), s.clone())).is_some() {
                    return false;
                }
            }
            shapes.push(s);
        }
    }
    for s in &shapes {
        for (c, d) in s.boundary_edges() {
            if let Some((_, o)) = owner.get(&lat.step(c, d)) {
                if !s.dec(c, d).mates(o.dec(lat.step(c, d), lat.opposite(d))) {
                    return false;
                }
            }
        }
    }
    let mut inner: BTreeSet<Cell> = BTreeSet::new();
    for (k, ring) in rings.iter().enumerate() {
        if k > 0 {
            let cover: BTreeSet<Cell> = ring.iter().flat_map(|p| p.cells.iter().copied()).collect();
            for c in &inner {
                for v in lat.touching() {
                    let y = (c.0 + v.0, c.1 + v.1);
                    if !inner.contains(&y) && !cover.contains(&y) {
                        return false;
                    }
                }
            }
        }
        inner.extend(ring.iter().flat_map(|p| p.cells.iter().copied()));
    }
    true
}

/// Copies drawn as cell polygons, labelled by group index.
pub fn copies_patch(lattice: Lattice, groups: &[Vec<PlacedCopy>], prefix: &str) -> PolygonPatch<f64> {
    let mut patch = PolygonPatch::new();
    for (g, copies) in groups.iter().enumerate() {
        for c in copies {
            for &cell in &c.cells {
                patch.push(format!("{prefix}{g}"), lattice.cell_polygon(cell));
            }
        }
    }
    patch
}

/// The edge counts of Mann's first tile, on a three-hexagon cluster:
/// seven edges bulge in, four out, one is flat.
pub fn mann_census_fixture() -> DecoratedPolyform {
    let cells = [(0, 0), (1, 0), (0, 1)];
    let base = DecoratedPolyform::new(Lattice::Hex, &cells, &[]).expect("connected");
    let boundary = base.boundary_edges();
    let decs: Vec<(Cell, u8, Dec)> = boundary
        .iter()
        .enumerate()
        .map(|(i, &(c, d))| (c, d, if i < 7 { Dec::In } else if i < 11 { Dec::Out } else { Dec::Flat }))
        .collect();
    DecoratedPolyform::new(Lattice::Hex, &cells, &decs).expect("boundary edges")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hex1(decs: &[(u8, Dec)]) -> DecoratedPolyform {
        let e: Vec<_> = decs.iter().map(|&(d, x)| ((0, 0), d, x)).collect();
        DecoratedPolyform::new(Lattice::Hex, &[(0, 0)], &e).unwrap()
    }

    #[test]
    fn censuses() {
        assert_eq!(edge_census(&hex1(&[])), EdgeCensus { inward: 0, outward: 0, flat: 6 });
        let m = mann_census_fixture();
        assert_eq!(edge_census(&m), EdgeCensus { inward: 7, outward: 4, flat: 1 });
        assert_eq!(census_nontiler(&m), CensusVerdict::NoTilingProved { deficit: 3, surplus: Dec::In });
        for o in m.orientations(true) {
            assert_eq!(edge_census(&o.shape), edge_census(&m));
        }
        assert_eq!(census_nontiler(&hex1(&[(0, Dec::In), (3, Dec::Out)])), CensusVerdict::Inconclusive);
        assert_eq!(census_nontiler(&hex1(&[])), CensusVerdict::Inconclusive);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(DecoratedPolyform::new(Lattice::Square, &[], &[]), Err(PolyformError::Empty));
        assert_eq!(DecoratedPolyform::new(Lattice::Square, &[(0, 0), (2, 0)], &[]), Err(PolyformError::Disconnected));
        let inner = DecoratedPolyform::new(Lattice::Square, &[(0, 0), (1, 0)], &[((0, 0), 0, Dec::In)]);
        assert!(matches!(inner, Err(PolyformError::NotBoundary { .. })));
        assert!(matches!(DecoratedPolyform::new(Lattice::Square, &[(0, 0)], &[((0, 0), 4, Dec::In)]), Err(PolyformError::BadDirection(4))));
    }

    #[test]
    fn orientation_counts() {
        let domino = DecoratedPolyform::new(Lattice::Square, &[(0, 0), (1, 0)], &[]).unwrap();
        assert_eq!(domino.orientations(true).len(), 2);
        let l = DecoratedPolyform::new(Lattice::Square, &[(0, 0), (1, 0), (0, 1)], &[]).unwrap();
        assert_eq!(l.orientations(false).len(), 4);
        assert_eq!(hex1(&[]).orientations(true).len(), 1);
        assert_eq!(hex1(&[(0, Dec::In)]).orientations(false).len(), 6);
    }

    #[test]
    fn domains() {
        let cfg = SearchConfig::default();
        let domino = DecoratedPolyform::new(Lattice::Square, &[(0, 0), (1, 0)], &[]).unwrap();
        let d = fundamental_domain_search(&domino, 4, true, cfg).unwrap().unwrap();
        assert_eq!((d.copies.len(), d.orbit_count), (1, 1));
        assert!(domain_is_valid(&domino, &d));
        let d = fundamental_domain_search(&hex1(&[]), 4, true, cfg).unwrap().unwrap();
        assert_eq!(d.copies.len(), 1);
        let l = DecoratedPolyform::new(Lattice::Square, &[(0, 0), (1, 0), (0, 1)], &[]).unwrap();
        let d = fundamental_domain_search(&l, 6, false, cfg).unwrap().unwrap();
        assert!(d.copies.len() <= 2 && domain_is_valid(&l, &d));
        assert!(fundamental_domain_search(&mann_census_fixture(), 12, true, cfg).unwrap().is_none());
    }

    #[test]
    fn coronas() {
        let cfg = SearchConfig::default();
        let plain = corona_levels(&hex1(&[]), 2, true, cfg).unwrap();
        assert_eq!(plain.heesch, Heesch::Finite(2));
        assert!(corona_is_valid(&hex1(&[]), &plain.rings));
        assert_eq!(plain.rings[1].len(), 6);
        assert_eq!(plain.rings[2].len(), 12);
        let all_in = hex1(&[(0, Dec::In), (1, Dec::In), (2, Dec::In), (3, Dec::In), (4, Dec::In), (5, Dec::In)]);
        assert_eq!(corona_search(&all_in, 1, true, cfg).unwrap().heesch, Heesch::Finite(0));
        let rows = hex1(&[(0, Dec::In), (3, Dec::Out)]);
        let r = corona_search(&rows, 2, false, cfg).unwrap();
        assert_eq!(r.heesch, Heesch::Periodic);
        assert_eq!(r.domain.unwrap().copies.len(), 1);
    }

    #[test]
    fn corona_witnesses_nest() {
        let t = DecoratedPolyform::new(Lattice::Square, &[(0, 0), (1, 0), (0, 1)], &[]).unwrap();
        let r = corona_levels(&t, 2, false, SearchConfig::default()).unwrap();
        assert_eq!(r.heesch, Heesch::Finite(2));
        for k in 0..=2 {
            assert!(corona_is_valid(&t, r.witness(k).unwrap()));
        }
    }

    #[test]
    fn corona_workers_agree() {
        let t = hex1(&[(0, Dec::In), (1, Dec::Out)]);
        let a = corona_levels(&t, 2, false, SearchConfig::default()).unwrap();
        let b = corona_levels(&t, 2, false, SearchConfig::default().with_jobs(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn budget_is_reported() {
        let t = hex1(&[(0, Dec::In), (1, Dec::Out)]);
        let r = corona_levels(&t, 3, false, SearchConfig::default().with_budget(5)).unwrap();
        assert!(r.limits_hit);
        let l = DecoratedPolyform::new(Lattice::Square, &[(0, 0), (1, 0), (0, 1)], &[]).unwrap();
        assert!(matches!(fundamental_domain_search(&l, 6, false, SearchConfig::default().with_budget(3)), Err(PolyformError::ResourceLimit { .. })));
    }

    #[test]
    fn json_round_trip() {
        let m = mann_census_fixture();
        let s = serde_json::to_string(&m.to_json()).unwrap();
        assert!(s.contains("\"lattice\":\"hex\""));
        let back = DecoratedPolyform::from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back, m);
    }

    fn decorated() -> impl Strategy<Value = DecoratedPolyform> {
        let shapes: Vec<(Lattice, Vec<Cell>)> = vec![
            (Lattice::Hex, vec![(0, 0)]),
            (Lattice::Hex, vec![(0, 0), (1, 0)]),
            (Lattice::Square, vec![(0, 0)]),
            (Lattice::Square, vec![(0, 0), (1, 0)]),
            (Lattice::Square, vec![(0, 0), (1, 0), (0, 1)]),
        ];
        (0..shapes.len(), proptest::collection::vec(0u8..3, 12)).prop_map(move |(i, d)| {
            let (lat, cells) = shapes[i].clone();
            let base = DecoratedPolyform::new(lat, &cells, &[]).unwrap();
            let e: Vec<_> = base
                .boundary_edges()
                .into_iter()
                .zip(d)
                .map(|((c, dir), x)| (c, dir, [Dec::Flat, Dec::In, Dec::Out][x as usize]))
                .collect();
            DecoratedPolyform::new(lat, &cells, &e).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn census_and_domain_exclusive(t in decorated()) {
            let d = fundamental_domain_search(&t, 6, true, SearchConfig::default()).unwrap();
            if let Some(d) = &d {
                prop_assert!(domain_is_valid(&t, d));
            }
            if matches!(census_nontiler(&t), CensusVerdict::NoTilingProved { .. }) {
                prop_assert!(d.is_none());
            }
        }

        #[test]
        fn census_invariant(t in decorated(), r in 0u8..6, m in any::<bool>()) {
            let r = r % t.lattice.n_dirs();
            prop_assert_eq!(edge_census(&t.transformed(r, m)), edge_census(&t));
        }
    }
}
