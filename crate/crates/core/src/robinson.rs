//! Robinson's six tiles, encoded as edge labels.
//!
//! Every tile carries bumps and nicks on its edges. Crosses bump out on
//! all four sides; passing tiles ("arms") bump on one side only. Besides
//! the central arrows, tiles carry side lines running close to one edge:
//! a line crossing an edge does so at offset `Low` (left/bottom half) or
//! `High` (right/top half), and neighbors must agree on it. A cross's two
//! side lines form its elbow. An arm may carry a side line parallel to
//! its arrow (either offset) and one perpendicular to it, which always
//! sits on the nick side of the arm.
//!
//! Corner markings are flattened into a parity token per edge: a tile at
//! parity `(px, py)` shows `(px, py)` east and north and `(1-px, py)`,
//! `(px, 1-py)` west and south, so parity alternates along rows and
//! columns. Only parity `(0, 0)` admits the cornered cross, which gives
//! the corner rule: each 2×2 window holds exactly one cornered tile.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Point, Polygon, PolygonPatch};
use crate::search::SearchConfig;
use crate::wang::{enumerate_rectangle, GridPlacement, WangError, WangTile, WangTileSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RobinsonError {
    #[error("expected {expected} elbow choices, got {got}")]
    BadChoices { expected: usize, got: usize },
    #[error("level must be at least 1")]
    BadLevel,
    #[error("patch is not block structured: {0}")]
    Structure(String),
    #[error("patch has unassigned cells")]
    Incomplete,
    #[error(transparent)]
    Wang(#[from] WangError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dir {
    N,
    E,
    S,
    W,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::N, Dir::E, Dir::S, Dir::W];

    pub fn delta(self) -> (i64, i64) {
        match self {
            Dir::N => (0, 1),
            Dir::E => (1, 0),
            Dir::S => (0, -1),
            Dir::W => (-1, 0),
        }
    }

    pub fn opposite(self) -> Dir {
        match self {
            Dir::N => Dir::S,
            Dir::E => Dir::W,
            Dir::S => Dir::N,
            Dir::W => Dir::E,
        }
    }

    pub fn horizontal(self) -> bool {
        matches!(self, Dir::E | Dir::W)
    }

    /// Quarter turn counterclockwise.
    fn turn(self) -> Dir {
        match self {
            Dir::N => Dir::W,
            Dir::W => Dir::S,
            Dir::S => Dir::E,
            Dir::E => Dir::N,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Offset {
    Low,
    High,
}

impl Offset {
    fn flip(self) -> Offset {
        match self {
            Offset::Low => Offset::High,
            Offset::High => Offset::Low,
        }
    }

    fn of_sign(positive: bool) -> Offset {
        if positive { Offset::High } else { Offset::Low }
    }
}

/// Elbow quadrant of a cross, as signs of (x, y).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Elbow {
    NE,
    NW,
    SE,
    SW,
}

impl Elbow {
    pub const ALL: [Elbow; 4] = [Elbow::NE, Elbow::NW, Elbow::SE, Elbow::SW];

    pub fn signs(self) -> (bool, bool) {
        match self {
            Elbow::NE => (true, true),
            Elbow::NW => (false, true),
            Elbow::SE => (true, false),
            Elbow::SW => (false, false),
        }
    }

    pub fn from_signs(east: bool, north: bool) -> Elbow {
        match (east, north) {
            (true, true) => Elbow::NE,
            (false, true) => Elbow::NW,
            (true, false) => Elbow::SE,
            (false, false) => Elbow::SW,
        }
    }

    pub fn opposite(self) -> Elbow {
        let (e, n) = self.signs();
        Elbow::from_signs(!e, !n)
    }

    fn horizontal_exit(self) -> Dir {
        if self.signs().0 { Dir::E } else { Dir::W }
    }

    fn vertical_exit(self) -> Dir {
        if self.signs().1 { Dir::N } else { Dir::S }
    }
}

/// The six base tiles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BaseTile {
    Cross,
    ArmPlain,
    ArmParallel,
    ArmPerpendicular,
    ArmBoth,
    CorneredCross,
}

/// An oriented Robinson tile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RobinsonTile {
    Cross { cornered: bool, elbow: Elbow },
    /// `parallel` is the offset of the side line along the arrow;
    /// `perpendicular` marks the crossing line on the nick side.
    Arm { bump: Dir, parallel: Option<Offset>, perpendicular: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Contact {
    Bump,
    Nick,
}

/// Everything a tile shows on one side, before parity is added.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeLabel {
    pub contact: Contact,
    pub offset: Option<Offset>,
}

impl RobinsonTile {
    pub fn is_cornered(self) -> bool {
        matches!(self, RobinsonTile::Cross { cornered: true, .. })
    }

    pub fn is_cross(self) -> bool {
        matches!(self, RobinsonTile::Cross { .. })
    }

    pub fn base(self) -> BaseTile {
        match self {
            RobinsonTile::Cross { cornered: true, .. } => BaseTile::CorneredCross,
            RobinsonTile::Cross { .. } => BaseTile::Cross,
            RobinsonTile::Arm { parallel: None, perpendicular: false, .. } => BaseTile::ArmPlain,
            RobinsonTile::Arm { parallel: Some(_), perpendicular: false, .. } => BaseTile::ArmParallel,
            RobinsonTile::Arm { parallel: None, perpendicular: true, .. } => BaseTile::ArmPerpendicular,
            RobinsonTile::Arm { .. } => BaseTile::ArmBoth,
        }
    }

    /// Offset at which a side line crosses side `d`, if any.
    pub fn line_on(self, d: Dir) -> Option<Offset> {
        match self {
            RobinsonTile::Cross { elbow, .. } => {
                let (e, n) = elbow.signs();
                if d == elbow.horizontal_exit() {
                    Some(Offset::of_sign(n))
                } else if d == elbow.vertical_exit() {
                    Some(Offset::of_sign(e))
                } else {
                    None
                }
            }
            RobinsonTile::Arm { bump, parallel, perpendicular } => {
                if d.horizontal() == bump.horizontal() {
                    // Lines crossing this side run along the arrow.
                    parallel
                } else if perpendicular {
                    // The crossing line sits toward the nick end of the arrow.
                    let nick_positive = matches!(bump.opposite(), Dir::N | Dir::E);
                    Some(Offset::of_sign(nick_positive))
                } else {
                    None
                }
            }
        }
    }

    pub fn edge(self, d: Dir) -> EdgeLabel {
        let contact = match self {
            RobinsonTile::Cross { .. } => Contact::Bump,
            RobinsonTile::Arm { bump, .. } if bump == d => Contact::Bump,
            RobinsonTile::Arm { .. } => Contact::Nick,
        };
        EdgeLabel { contact, offset: self.line_on(d) }
    }

    /// Quarter turn counterclockwise.
    pub fn rotated(self) -> RobinsonTile {
        match self {
            RobinsonTile::Cross { cornered, elbow } => {
                let (e, n) = elbow.signs();
                // (x, y) -> (-y, x)
                RobinsonTile::Cross { cornered, elbow: Elbow::from_signs(!n, e) }
            }
            RobinsonTile::Arm { bump, parallel, perpendicular } => {
                // A line along the arrow at offset o sits on the side that
                // the rotation carries to the opposite offset exactly when
                // the new arrow is vertical.
                let parallel = parallel.map(|o| if bump.horizontal() { o.flip() } else { o });
                RobinsonTile::Arm { bump: bump.turn(), parallel, perpendicular }
            }
        }
    }

    /// Mirror image across the vertical axis.
    pub fn mirrored(self) -> RobinsonTile {
        match self {
            RobinsonTile::Cross { cornered, elbow } => {
                let (e, n) = elbow.signs();
                RobinsonTile::Cross { cornered, elbow: Elbow::from_signs(!e, n) }
            }
            RobinsonTile::Arm { bump, parallel, perpendicular } => {
                let bump = match bump {
                    Dir::E => Dir::W,
                    Dir::W => Dir::E,
                    d => d,
                };
                let parallel = parallel.map(|o| if bump.horizontal() { o } else { o.flip() });
                RobinsonTile::Arm { bump, parallel, perpendicular }
            }
        }
    }

    /// Canonical representative of each base tile.
    pub fn canonical(base: BaseTile) -> RobinsonTile {
        let arm = |parallel, perpendicular| RobinsonTile::Arm { bump: Dir::E, parallel, perpendicular };
        match base {
            BaseTile::Cross => RobinsonTile::Cross { cornered: false, elbow: Elbow::NE },
            BaseTile::CorneredCross => RobinsonTile::Cross { cornered: true, elbow: Elbow::NE },
            BaseTile::ArmPlain => arm(None, false),
            BaseTile::ArmParallel => arm(Some(Offset::High), false),
            BaseTile::ArmPerpendicular => arm(None, true),
            BaseTile::ArmBoth => arm(Some(Offset::High), true),
        }
    }

    /// Quarter turns and reflection taking the canonical tile to this one.
    pub fn orientation(self) -> (u8, bool) {
        let c = RobinsonTile::canonical(self.base());
        for mirrored in [false, true] {
            let mut t = if mirrored { c.mirrored() } else { c };
            for r in 0..4u8 {
                if t == self {
                    return (r, mirrored);
                }
                t = t.rotated();
            }
        }
        unreachable!("every tile is an image of its base tile")
    }

    pub fn short_name(self) -> String {
        match self {
            RobinsonTile::Cross { cornered, elbow } => format!("{}{:?}", if cornered { "K" } else { "X" }, elbow),
            RobinsonTile::Arm { bump, parallel, perpendicular } => {
                let p = match parallel {
                    None => "",
                    Some(Offset::Low) => "l",
                    Some(Offset::High) => "h",
                };
                format!("A{:?}{p}{}", bump, if perpendicular { "p" } else { "" })
            }
        }
    }
}

/// Number of distinct oriented tiles (6 base tiles under the dihedral group).
pub const ORIENTED_TILE_COUNT: usize = 32;

/// Orbits of the six base tiles under rotation and reflection, deduplicated.
pub fn oriented_tiles() -> Vec<RobinsonTile> {
    let bases = [
        BaseTile::Cross,
        BaseTile::ArmPlain,
        BaseTile::ArmParallel,
        BaseTile::ArmPerpendicular,
        BaseTile::ArmBoth,
        BaseTile::CorneredCross,
    ];
    let mut out: Vec<RobinsonTile> = Vec::new();
    for b in bases {
        let c = RobinsonTile::canonical(b);
        for start in [c, c.mirrored()] {
            let mut t = start;
            for _ in 0..4 {
                if !out.contains(&t) {
                    out.push(t);
                }
                t = t.rotated();
            }
        }
    }
    out
}

/// A tile placed with its parity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlacedTile {
    pub tile: RobinsonTile,
    pub parity: (u8, u8),
}

impl PlacedTile {
    pub fn name(&self) -> String {
        format!("{}@{}{}", self.tile.short_name(), self.parity.0, self.parity.1)
    }

    fn parity_token(&self, d: Dir) -> (u8, u8) {
        let (px, py) = self.parity;
        match d {
            Dir::E | Dir::N => (px, py),
            Dir::W => (1 - px, py),
            Dir::S => (px, 1 - py),
        }
    }

    /// Wang label for side `d`. Contact becomes the direction the bump
    /// points across the edge, so equal labels mean bump meets nick.
    pub fn wang_label(&self, d: Dir) -> String {
        let e = self.tile.edge(d);
        let arrow = match (d, e.contact) {
            (Dir::E, Contact::Bump) | (Dir::W, Contact::Nick) => ">",
            (Dir::W, Contact::Bump) | (Dir::E, Contact::Nick) => "<",
            (Dir::N, Contact::Bump) | (Dir::S, Contact::Nick) => "^",
            (Dir::S, Contact::Bump) | (Dir::N, Contact::Nick) => "v",
        };
        let off = match e.offset {
            None => "-",
            Some(Offset::Low) => "l",
            Some(Offset::High) => "h",
        };
        let (a, b) = self.parity_token(d);
        format!("{arrow}{off}{a}{b}")
    }
}

/// Oriented tiles at every admissible parity: cornered crosses only at
/// (0,0), everything else at the other three.
pub fn placed_tiles() -> Vec<PlacedTile> {
    let mut out = Vec::new();
    for t in oriented_tiles() {
        let parities: &[(u8, u8)] = if t.is_cornered() { &[(0, 0)] } else { &[(1, 0), (0, 1), (1, 1)] };
        for &parity in parities {
            out.push(PlacedTile { tile: t, parity });
        }
    }
    out
}

pub const FLAT_TILE_COUNT: usize = 88;

/// The flattened Wang set, one Wang tile per placed tile, in the order
/// of [`placed_tiles`].
pub fn wang_tileset() -> WangTileSet {
    let tiles = placed_tiles()
        .iter()
        .map(|p| {
            WangTile::new(&p.name(), &p.wang_label(Dir::N), &p.wang_label(Dir::E), &p.wang_label(Dir::S), &p.wang_label(Dir::W))
        })
        .collect();
    WangTileSet::new(tiles).expect("distinct names")
}

/// Grid of placed tiles; row 0 is the bottom row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RobinsonPatch {
    pub width: usize,
    pub height: usize,
    cells: Vec<Option<PlacedTile>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Component {
    Contact,
    Offset,
    Rail,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub cell: (usize, usize),
    pub side: Dir,
    pub component: Component,
}

/// Patch JSON: `{"width":w,"height":h,"cells":[[tile,parity],..]}` with
/// cells row-major from the bottom row.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PatchJson {
    pub width: usize,
    pub height: usize,
    pub cells: Vec<Option<CellJson>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellJson {
    pub base: BaseTile,
    pub rotation: u8,
    pub reflected: bool,
    pub tile: RobinsonTile,
    pub parity: (u8, u8),
}

impl RobinsonPatch {
    pub fn new(width: usize, height: usize) -> Self {
        RobinsonPatch { width, height, cells: vec![None; width * height] }
    }

    pub fn get(&self, x: usize, y: usize) -> Option<PlacedTile> {
        self.cells[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, t: PlacedTile) {
        self.cells[y * self.width + x] = Some(t);
    }

    pub fn tile(&self, x: usize, y: usize) -> RobinsonTile {
        self.get(x, y).expect("assigned").tile
    }

    pub fn sub(&self, x0: usize, y0: usize, w: usize, h: usize) -> RobinsonPatch {
        let mut p = RobinsonPatch::new(w, h);
        for y in 0..h {
            for x in 0..w {
                p.cells[y * w + x] = self.get(x0 + x, y0 + y);
            }
        }
        p
    }

    pub fn to_json(&self) -> PatchJson {
        PatchJson {
            width: self.width,
            height: self.height,
            cells: self
                .cells
                .iter()
                .map(|c| {
                    c.map(|p| {
                        let (rotation, reflected) = p.tile.orientation();
                        CellJson { base: p.tile.base(), rotation, reflected, tile: p.tile, parity: p.parity }
                    })
                })
                .collect(),
        }
    }

    pub fn from_json(j: &PatchJson) -> Result<RobinsonPatch, RobinsonError> {
        if j.cells.len() != j.width * j.height {
            return Err(RobinsonError::Structure(format!("{} cells for a {}x{} patch", j.cells.len(), j.width, j.height)));
        }
        let admissible = placed_tiles();
        let mut p = RobinsonPatch::new(j.width, j.height);
        for (i, c) in j.cells.iter().enumerate() {
            let Some(c) = c else { continue };
            let placed = PlacedTile { tile: c.tile, parity: c.parity };
            if !admissible.contains(&placed) || c.tile.base() != c.base || c.tile.orientation() != (c.rotation, c.reflected) {
                return Err(RobinsonError::Structure(format!("cell {i} is not a Robinson tile")));
            }
            p.cells[i] = Some(placed);
        }
        Ok(p)
    }

    /// Unit squares labelled by base tile, for rendering.
    pub fn to_polygon_patch(&self) -> PolygonPatch<f64> {
        let mut out = PolygonPatch::new();
        for y in 0..self.height {
            for x in 0..self.width {
                if let Some(t) = self.get(x, y) {
                    let (x, y) = (x as f64, y as f64);
                    let sq = Polygon::new(vec![Point::new(x, y), Point::new(x + 1.0, y), Point::new(x + 1.0, y + 1.0), Point::new(x, y + 1.0)]);
                    out.push(format!("{:?}", t.tile.base()), sq);
                }
            }
        }
        out
    }

    pub fn from_placement(set: &WangTileSet, g: &GridPlacement) -> RobinsonPatch {
        let placed = placed_tiles();
        let by_name: BTreeMap<String, PlacedTile> = placed.iter().map(|p| (p.name(), *p)).collect();
        let mut p = RobinsonPatch::new(g.width, g.height);
        for y in 0..g.height {
            for x in 0..g.width {
                if let Some(t) = g.get(x, y) {
                    p.set(x, y, by_name[set.name(t)]);
                }
            }
        }
        p
    }

    /// Text grid, top row first, one short name per cell.
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        for y in (0..self.height).rev() {
            let row: Vec<String> = (0..self.width).map(|x| self.get(x, y).map_or(".".into(), |p| p.tile.short_name())).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }
}

impl fmt::Display for RobinsonPatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_text())
    }
}

/// Checks every interior edge: bump against nick, equal side-line
/// offsets, equal parity tokens. Reports the first failure in row-major
/// order, east edge before north edge.
pub fn validate(patch: &RobinsonPatch) -> Result<(), Violation> {
    for y in 0..patch.height {
        for x in 0..patch.width {
            let Some(a) = patch.get(x, y) else { continue };
            for (d, nx, ny) in [(Dir::E, x + 1, y), (Dir::N, x, y + 1)] {
                if nx >= patch.width || ny >= patch.height {
                    continue;
                }
                let Some(b) = patch.get(nx, ny) else { continue };
                let (ea, eb) = (a.tile.edge(d), b.tile.edge(d.opposite()));
                let component = if ea.contact == eb.contact {
                    Some(Component::Contact)
                } else if ea.offset != eb.offset {
                    Some(Component::Offset)
                } else if a.parity_token(d) != b.parity_token(d.opposite()) {
                    Some(Component::Rail)
                } else {
                    None
                };
                if let Some(component) = component {
                    return Err(Violation { cell: (x, y), side: d, component });
                }
            }
        }
    }
    Ok(())
}

/// Block of level `k`: side `2^(k+1) − 1`.
pub fn block_side(k: u32) -> usize {
    (1usize << (k + 1)) - 1
}

/// Builds the level-`k` block whose central cross has elbow
/// `choices[k-1]`. Every sub-block's central elbow points toward the
/// center of its parent, so earlier entries do not change the patch.
pub fn generate_block(k: u32, choices: &[Elbow]) -> Result<RobinsonPatch, RobinsonError> {
    if k == 0 {
        return Err(RobinsonError::BadLevel);
    }
    if choices.len() != k as usize {
        return Err(RobinsonError::BadChoices { expected: k as usize, got: choices.len() });
    }
    let side = block_side(k);
    let mut tiles: Vec<Option<RobinsonTile>> = vec![None; side * side];
    fill_block(&mut tiles, side, 0, 0, k, choices[k as usize - 1]);
    let mut p = RobinsonPatch::new(side, side);
    for y in 0..side {
        for x in 0..side {
            let t = tiles[y * side + x].expect("block fully covered");
            let parity = ((x % 2) as u8, (y % 2) as u8);
            p.set(x, y, PlacedTile { tile: t, parity });
        }
    }
    Ok(p)
}

fn fill_block(tiles: &mut [Option<RobinsonTile>], stride: usize, x0: usize, y0: usize, k: u32, elbow: Elbow) {
    if k == 0 {
        tiles[y0 * stride + x0] = Some(RobinsonTile::Cross { cornered: true, elbow });
        return;
    }
    let m = (1usize << k) - 1;
    let half = 1usize << k;
    for (qx, qy, inward) in [(0, 0, Elbow::NE), (half, 0, Elbow::NW), (0, half, Elbow::SE), (half, half, Elbow::SW)] {
        fill_block(tiles, stride, x0 + qx, y0 + qy, k - 1, inward);
    }
    tiles[(y0 + m) * stride + x0 + m] = Some(RobinsonTile::Cross { cornered: false, elbow });

    // Sub-block centers sit at m' and m' + 2^k along each axis; their
    // elbow lines cross the middle row and column there.
    let sub = (1usize << (k - 1)) - 1;
    let (ex, ny) = elbow.signs();
    for i in 0..2 * m + 1 {
        if i == m {
            continue;
        }
        let away_pos = i > m;
        // Middle column, cell (m, i).
        let bump = if away_pos { Dir::N } else { Dir::S };
        let crossing = i == sub || i == sub + half;
        let parallel = (ny == away_pos).then_some(Offset::of_sign(ex));
        tiles[(y0 + i) * stride + x0 + m] = Some(RobinsonTile::Arm { bump, parallel, perpendicular: crossing });
        // Middle row, cell (i, m).
        let bump = if away_pos { Dir::E } else { Dir::W };
        let parallel = (ex == away_pos).then_some(Offset::of_sign(ny));
        tiles[(y0 + m) * stride + x0 + i] = Some(RobinsonTile::Arm { bump, parallel, perpendicular: crossing });
    }
}

/// Exhaustively fills a 3×3 window whose south-west cell holds a
/// cornered cross with its elbow pointing into the window. With
/// `allow_cornered` false every cornered tile is removed from the set
/// instead (and nothing is pinned).
pub fn verify_forcing_3x3(allow_cornered: bool, cfg: SearchConfig) -> Result<Vec<RobinsonPatch>, RobinsonError> {
    let placed = placed_tiles();
    let full = wang_tileset();
    let (set, seed) = if allow_cornered {
        let corner = PlacedTile { tile: RobinsonTile::Cross { cornered: true, elbow: Elbow::NE }, parity: (0, 0) };
        let mut seed = GridPlacement::empty(1, 1);
        seed.pin(0, 0, full.index_of(&corner.name()).expect("present"));
        (full, Some(seed))
    } else {
        let tiles = placed
            .iter()
            .filter(|p| !p.tile.is_cornered())
            .map(|p| WangTile::new(&p.name(), &p.wang_label(Dir::N), &p.wang_label(Dir::E), &p.wang_label(Dir::S), &p.wang_label(Dir::W)))
            .collect();
        (WangTileSet::new(tiles)?, None)
    };
    let all = enumerate_rectangle(&set, 3, 3, seed.as_ref(), cfg)?;
    Ok(all.iter().map(|g| RobinsonPatch::from_placement(&set, g)).collect())
}

/// A square of the hierarchy: lower-left corner cell and side length
/// (distance between corner cell centers).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct MarkedSquare {
    pub corner: (usize, usize),
    pub side: usize,
}

impl MarkedSquare {
    pub fn center(&self) -> (f64, f64) {
        let h = self.side as f64 / 2.0;
        (self.corner.0 as f64 + h, self.corner.1 as f64 + h)
    }

    pub fn touches(&self, o: &MarkedSquare) -> bool {
        let (ax, ay, bx, by) = (self.corner.0, self.corner.1, o.corner.0, o.corner.1);
        ax <= bx + o.side && bx <= ax + self.side && ay <= by + o.side && by <= ay + self.side
    }
}

/// Outlines of marked squares through the centers of their corner cells.
pub fn square_outlines(squares: &BTreeMap<usize, Vec<MarkedSquare>>) -> Vec<Polygon<f64>> {
    squares
        .values()
        .flatten()
        .map(|s| {
            let (x, y, d) = (s.corner.0 as f64 + 0.5, s.corner.1 as f64 + 0.5, s.side as f64);
            Polygon::new(vec![Point::new(x, y), Point::new(x + d, y), Point::new(x + d, y + d), Point::new(x, y + d)])
        })
        .collect()
}

/// Traces the squares drawn by side lines between crosses. Squares are
/// reported per side length; lines leaving the patch are ignored.
pub fn square_hierarchy(patch: &RobinsonPatch) -> Result<BTreeMap<usize, Vec<MarkedSquare>>, RobinsonError> {
    let n = patch.width;
    if patch.height != n || !(n + 1).is_power_of_two() || n < 3 {
        return Err(RobinsonError::Structure(format!("{}x{} is not a block", patch.width, patch.height)));
    }
    if patch.cells.iter().any(Option::is_none) {
        return Err(RobinsonError::Incomplete);
    }
    let mut out: BTreeMap<usize, Vec<MarkedSquare>> = BTreeMap::new();
    for y in 0..n {
        for x in 0..n {
            if patch.tile(x, y) != (RobinsonTile::Cross { cornered: patch.tile(x, y).is_cornered(), elbow: Elbow::NE }) {
                continue;
            }
            let Some(east) = follow(patch, (x, y), Dir::E, Offset::High)? else { continue };
            let Some(north) = follow(patch, (x, y), Dir::N, Offset::High)? else { continue };
            let side = east - x;
            if north - y != side {
                return Err(RobinsonError::Structure(format!("unequal sides at ({x},{y})")));
            }
            let expect = |cx: usize, cy: usize, e: Elbow| matches!(patch.tile(cx, cy), RobinsonTile::Cross { elbow, .. } if elbow == e);
            if !expect(east, y, Elbow::NW) || !expect(x, north, Elbow::SE) {
                return Err(RobinsonError::Structure(format!("open corner at ({x},{y})")));
            }
            let top = follow(patch, (x, north), Dir::E, Offset::Low)?;
            let right = follow(patch, (east, y), Dir::N, Offset::Low)?;
            if top != Some(east) || right != Some(north) || !expect(east, north, Elbow::SW) {
                return Err(RobinsonError::Structure(format!("square at ({x},{y}) does not close")));
            }
            out.entry(side).or_default().push(MarkedSquare { corner: (x, y), side });
        }
    }
    for (side, squares) in &out {
        for (i, a) in squares.iter().enumerate() {
            if squares[i + 1..].iter().any(|b| a.touches(b)) {
                return Err(RobinsonError::Structure(format!("overlapping squares of side {side}")));
            }
        }
    }
    Ok(out)
}

/// Walks from a cross along the side line leaving it in direction `d`
/// until the next cross. Returns that cross's coordinate along the walk,
/// or `None` if the line runs off the patch.
fn follow(patch: &RobinsonPatch, start: (usize, usize), d: Dir, offset: Offset) -> Result<Option<usize>, RobinsonError> {
    let (dx, dy) = d.delta();
    let (mut x, mut y) = (start.0 as i64, start.1 as i64);
    if patch.tile(start.0, start.1).line_on(d) != Some(offset) {
        return Err(RobinsonError::Structure(format!("cross at {start:?} has no line {d:?}")));
    }
    loop {
        x += dx;
        y += dy;
        if x < 0 || y < 0 || x >= patch.width as i64 || y >= patch.height as i64 {
            return Ok(None);
        }
        let t = patch.tile(x as usize, y as usize);
        if t.line_on(d.opposite()) != Some(offset) {
            return Err(RobinsonError::Structure(format!("line broken at ({x},{y})")));
        }
        if t.is_cross() {
            return Ok(Some(if d.horizontal() { x as usize } else { y as usize }));
        }
    }
}
