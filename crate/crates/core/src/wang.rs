//! Wang tiles on the square lattice: rectangle and torus solvers and the
//! two-sided semi-decision driver.
//!
//! Rows are numbered upward: row 0 is the bottom row. A tile's north edge
//! meets the south edge of the tile above it.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::search::{collect_in_order, first_in_order, BranchEnd, Merged, Meter, SearchConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WangError {
    #[error("tile set is empty")]
    Empty,
    #[error("duplicate tile name {0:?}")]
    DuplicateName(String),
    #[error("unknown tile name {0:?}")]
    UnknownTile(String),
    #[error("bad dimensions {0}x{1}")]
    BadSize(usize, usize),
    #[error("seed does not fit: {0}")]
    BadSeed(String),
    #[error("search budget of {budget} nodes exceeded")]
    ResourceLimit { budget: u64 },
    #[error("malformed placement: {0}")]
    Malformed(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WangTile {
    pub name: String,
    #[serde(rename = "n")]
    pub north: String,
    #[serde(rename = "e")]
    pub east: String,
    #[serde(rename = "s")]
    pub south: String,
    #[serde(rename = "w")]
    pub west: String,
}

impl WangTile {
    pub fn new(name: &str, north: &str, east: &str, south: &str, west: &str) -> Self {
        WangTile { name: name.into(), north: north.into(), east: east.into(), south: south.into(), west: west.into() }
    }
}

const N: usize = 0;
const E: usize = 1;
const S: usize = 2;
const W: usize = 3;

/// A tile set with interned edge labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WangTileSet {
    tiles: Vec<WangTile>,
    labels: Vec<String>,
    edges: Vec<[u32; 4]>,
    by_name: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct TileSetJson {
    tiles: Vec<WangTile>,
}

impl WangTileSet {
    pub fn new(tiles: Vec<WangTile>) -> Result<Self, WangError> {
        if tiles.is_empty() {
            return Err(WangError::Empty);
        }
        let mut labels: Vec<String> = Vec::new();
        let mut label_ids: HashMap<String, u32> = HashMap::new();
        let mut by_name = HashMap::new();
        let mut edges = Vec::with_capacity(tiles.len());
        for (i, t) in tiles.iter().enumerate() {
            if by_name.insert(t.name.clone(), i).is_some() {
                return Err(WangError::DuplicateName(t.name.clone()));
            }
            let mut id = |l: &String| {
                *label_ids.entry(l.clone()).or_insert_with(|| {
                    labels.push(l.clone());
                    (labels.len() - 1) as u32
                })
            };
            edges.push([id(&t.north), id(&t.east), id(&t.south), id(&t.west)]);
        }
        Ok(WangTileSet { tiles, labels, edges, by_name })
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let j: TileSetJson = serde_json::from_str(text)?;
        WangTileSet::new(j.tiles).map_err(serde::de::Error::custom)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&TileSetJson { tiles: self.tiles.clone() }).expect("serializable")
    }

    pub fn tiles(&self) -> &[WangTile] {
        &self.tiles
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    /// The label alphabet, in order of first appearance.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.tiles[i].name
    }

    pub fn fits_east(&self, left: usize, right: usize) -> bool {
        self.edges[left][E] == self.edges[right][W]
    }

    pub fn fits_north(&self, below: usize, above: usize) -> bool {
        self.edges[below][N] == self.edges[above][S]
    }
}

/// A (partial) assignment of tiles to the cells of a `width × height`
/// rectangle, stored row-major from the bottom row.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GridPlacement {
    pub width: usize,
    pub height: usize,
    cells: Vec<Option<usize>>,
    pinned: Vec<bool>,
}

/// `{"width":w,"height":h,"rows":[[name|null,..],..],"pinned":[[col,row],..]}`
/// with `rows[0]` the bottom row.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlacementJson {
    pub width: usize,
    pub height: usize,
    pub rows: Vec<Vec<Option<String>>>,
    #[serde(default)]
    pub pinned: Vec<[usize; 2]>,
}

impl GridPlacement {
    pub fn empty(width: usize, height: usize) -> Self {
        GridPlacement { width, height, cells: vec![None; width * height], pinned: vec![false; width * height] }
    }

    pub fn get(&self, col: usize, row: usize) -> Option<usize> {
        self.cells[row * self.width + col]
    }

    pub fn set(&mut self, col: usize, row: usize, tile: usize) {
        self.cells[row * self.width + col] = Some(tile);
    }

    pub fn pin(&mut self, col: usize, row: usize, tile: usize) {
        self.set(col, row, tile);
        self.pinned[row * self.width + col] = true;
    }

    pub fn is_pinned(&self, col: usize, row: usize) -> bool {
        self.pinned[row * self.width + col]
    }

    pub fn is_complete(&self) -> bool {
        self.cells.iter().all(Option::is_some)
    }

    pub fn row(&self, r: usize) -> &[Option<usize>] {
        &self.cells[r * self.width..(r + 1) * self.width]
    }

    /// Row `r` as tile names joined by `sep`, `.` for empty cells.
    pub fn row_names(&self, set: &WangTileSet, r: usize, sep: &str) -> String {
        self.row(r).iter().map(|c| c.map_or(".", |t| set.name(t))).collect::<Vec<_>>().join(sep)
    }

    pub fn to_json(&self, set: &WangTileSet) -> PlacementJson {
        PlacementJson {
            width: self.width,
            height: self.height,
            rows: (0..self.height).map(|r| self.row(r).iter().map(|c| c.map(|t| set.name(t).to_string())).collect()).collect(),
            pinned: (0..self.height)
                .flat_map(|r| (0..self.width).map(move |c| (c, r)))
                .filter(|&(c, r)| self.is_pinned(c, r))
                .map(|(c, r)| [c, r])
                .collect(),
        }
    }

    pub fn from_json(j: &PlacementJson, set: &WangTileSet) -> Result<Self, WangError> {
        if j.rows.len() != j.height || j.rows.iter().any(|r| r.len() != j.width) {
            return Err(WangError::Malformed("rows do not match width/height".into()));
        }
        let mut p = GridPlacement::empty(j.width, j.height);
        for (r, row) in j.rows.iter().enumerate() {
            for (c, name) in row.iter().enumerate() {
                if let Some(n) = name {
                    let t = set.index_of(n).ok_or_else(|| WangError::UnknownTile(n.clone()))?;
                    p.set(c, r, t);
                }
            }
        }
        for &[c, r] in &j.pinned {
            if c >= j.width || r >= j.height {
                return Err(WangError::Malformed(format!("pinned cell ({c},{r}) outside grid")));
            }
            match p.get(c, r) {
                Some(t) => p.pin(c, r, t),
                None => return Err(WangError::Malformed(format!("pinned cell ({c},{r}) is empty"))),
            }
        }
        Ok(p)
    }

    /// Tiles the `width × height` rectangle with copies of this (torus)
    /// domain.
    pub fn periodic_extension(&self, width: usize, height: usize) -> GridPlacement {
        let mut p = GridPlacement::empty(width, height);
        for r in 0..height {
            for c in 0..width {
                if let Some(t) = self.get(c % self.width, r % self.height) {
                    p.set(c, r, t);
                }
            }
        }
        p
    }
}

/// First adjacency failure found by [`check_placement`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub cell: (usize, usize),
    pub neighbor: (usize, usize),
}

/// Independent re-check of every adjacency in a complete placement.
/// An empty cell is reported as a mismatch with itself.
pub fn check_placement(set: &WangTileSet, p: &GridPlacement, torus: bool) -> Result<(), Mismatch> {
    check_cells(set, p, torus, true)
}

fn check_cells(set: &WangTileSet, p: &GridPlacement, torus: bool, complete: bool) -> Result<(), Mismatch> {
    let (w, h) = (p.width, p.height);
    for r in 0..h {
        for c in 0..w {
            let Some(t) = p.get(c, r) else {
                if complete {
                    return Err(Mismatch { cell: (c, r), neighbor: (c, r) });
                }
                continue;
            };
            if c + 1 < w || torus {
                let nc = (c + 1) % w;
                if let Some(u) = p.get(nc, r) {
                    if set.tiles[t].east != set.tiles[u].west {
                        return Err(Mismatch { cell: (c, r), neighbor: (nc, r) });
                    }
                }
            }
            if r + 1 < h || torus {
                let nr = (r + 1) % h;
                if let Some(u) = p.get(c, nr) {
                    if set.tiles[t].north != set.tiles[u].south {
                        return Err(Mismatch { cell: (c, r), neighbor: (c, nr) });
                    }
                }
            }
        }
    }
    Ok(())
}

/// Candidate tiles keyed by required (west, south) labels, either of
/// which may be unconstrained.
struct Candidates {
    stride: usize,
    lists: Vec<Vec<usize>>,
    singles: Vec<Vec<usize>>,
}

impl Candidates {
    fn new(set: &WangTileSet) -> Self {
        let stride = set.labels.len() + 1;
        let mut lists = vec![Vec::new(); stride * stride];
        for (t, e) in set.edges.iter().enumerate() {
            let (w, s) = (e[W] as usize + 1, e[S] as usize + 1);
            for key in [w * stride + s, w * stride, s, 0] {
                lists[key].push(t);
            }
        }
        Candidates { stride, lists, singles: (0..set.len()).map(|t| vec![t]).collect() }
    }

    fn get(&self, west: Option<u32>, south: Option<u32>) -> &[usize] {
        let w = west.map_or(0, |l| l as usize + 1);
        let s = south.map_or(0, |l| l as usize + 1);
        &self.lists[w * self.stride + s]
    }
}

struct Grid<'a> {
    set: &'a WangTileSet,
    cand: &'a Candidates,
    w: usize,
    h: usize,
    torus: bool,
    fixed: Vec<Option<usize>>,
}

impl Grid<'_> {
    fn options(&self, grid: &[usize], i: usize) -> &[usize] {
        if let Some(t) = self.fixed[i] {
            return &self.cand.singles[t];
        }
        let (c, r) = (i % self.w, i / self.w);
        let west = (c > 0).then(|| self.set.edges[grid[i - 1]][E]);
        let south = (r > 0).then(|| self.set.edges[grid[i - self.w]][N]);
        self.cand.get(west, south)
    }

    fn fits(&self, grid: &[usize], i: usize, t: usize) -> bool {
        let e = &self.set.edges;
        let (c, r) = (i % self.w, i / self.w);
        if self.fixed[i].is_some() {
            if c > 0 && e[grid[i - 1]][E] != e[t][W] {
                return false;
            }
            if r > 0 && e[grid[i - self.w]][N] != e[t][S] {
                return false;
            }
        }
        if self.torus {
            let at = |j: usize| if j == i { t } else { grid[j] };
            if c == self.w - 1 && e[t][E] != e[at(i + 1 - self.w)][W] {
                return false;
            }
            if r == self.h - 1 && e[t][N] != e[at(c)][S] {
                return false;
            }
        }
        true
    }

    /// Depth-first search in row-major order from cell `start`, with
    /// cells before `start` already filled in `grid`. `on_solution`
    /// returns `true` to keep enumerating.
    fn dfs(&self, grid: &mut [usize], start: usize, meter: &mut Meter, mut on_solution: impl FnMut(&[usize]) -> bool) -> Option<bool> {
        let n = self.w * self.h;
        if start == n {
            return Some(on_solution(grid));
        }
        let mut pos = vec![0usize; n];
        let mut i = start;
        loop {
            let opts = self.options(grid, i);
            let mut placed = false;
            while pos[i] < opts.len() {
                let t = opts[pos[i]];
                pos[i] += 1;
                if self.fits(grid, i, t) {
                    if !meter.tick() {
                        return None;
                    }
                    grid[i] = t;
                    placed = true;
                    break;
                }
            }
            if placed {
                if i + 1 == n {
                    if !on_solution(grid) {
                        return Some(true);
                    }
                    continue;
                }
                i += 1;
                pos[i] = 0;
                continue;
            }
            grid[i] = usize::MAX;
            if i == start {
                return Some(false);
            }
            i -= 1;
        }
    }
}

fn prepare<'a>(
    set: &'a WangTileSet,
    cand: &'a Candidates,
    w: usize,
    h: usize,
    torus: bool,
    seed: Option<&GridPlacement>,
    cfg: &SearchConfig,
) -> Result<(Grid<'a>, Vec<usize>, usize), WangError> {
    if w == 0 || h == 0 {
        return Err(WangError::BadSize(w, h));
    }
    if (w as u64).saturating_mul(h as u64) > cfg.budget {
        return Err(WangError::ResourceLimit { budget: cfg.budget });
    }
    let mut fixed = vec![None; w * h];
    if let Some(s) = seed {
        if s.width > w || s.height > h {
            return Err(WangError::BadSeed(format!("{}x{} seed in {w}x{h} grid", s.width, s.height)));
        }
        for r in 0..s.height {
            for c in 0..s.width {
                if let Some(t) = s.get(c, r) {
                    if t >= set.len() {
                        return Err(WangError::BadSeed(format!("tile index {t}")));
                    }
                    fixed[r * w + c] = Some(t);
                }
            }
        }
        if check_cells(set, s, false, false).is_err() {
            return Err(WangError::BadSeed("seed cells do not match each other".into()));
        }
    }
    let grid = Grid { set, cand, w, h, torus, fixed };
    // Leading pinned cells are placed up front; the first free cell is
    // the branching point.
    let mut cells = vec![usize::MAX; w * h];
    let mut first = 0;
    while first < w * h {
        match grid.fixed[first] {
            Some(t) if grid.fits(&cells, first, t) || first == 0 => {
                cells[first] = t;
                first += 1;
            }
            _ => break,
        }
    }
    Ok((grid, cells, first))
}

fn branch_options(grid: &Grid, cells: &[usize], first: usize) -> Vec<usize> {
    if first == grid.w * grid.h {
        return vec![usize::MAX];
    }
    if grid.fixed[first].is_some() {
        // A leading pinned cell failed to fit: no branches.
        return Vec::new();
    }
    grid.options(cells, first).iter().copied().filter(|&t| grid.fits(cells, first, t)).collect()
}

fn find_first(set: &WangTileSet, w: usize, h: usize, torus: bool, seed: Option<&GridPlacement>, cfg: SearchConfig) -> Result<Option<GridPlacement>, WangError> {
    let cand = Candidates::new(set);
    let (grid, cells, first) = prepare(set, &cand, w, h, torus, seed, &cfg)?;
    let branches = branch_options(&grid, &cells, first);
    let merged = first_in_order(branches.len(), cfg, |b, meter| {
        let mut g = cells.clone();
        let start = if branches[b] == usize::MAX {
            first
        } else {
            g[first] = branches[b];
            if !meter.tick() {
                return BranchEnd::Stopped;
            }
            first + 1
        };
        let mut hit = None;
        match grid.dfs(&mut g, start, meter, |sol| {
            hit = Some(sol.to_vec());
            false
        }) {
            None => BranchEnd::Stopped,
            Some(_) => hit.map_or(BranchEnd::Exhausted, BranchEnd::Found),
        }
    });
    match merged {
        Merged::Found(cells_found, _) => Ok(Some(to_placement(&grid, &cells_found))),
        Merged::Exhausted(_) => Ok(None),
        Merged::Limit(_) => Err(WangError::ResourceLimit { budget: cfg.budget }),
    }
}

fn to_placement(grid: &Grid, cells: &[usize]) -> GridPlacement {
    let mut p = GridPlacement::empty(grid.w, grid.h);
    for (i, &t) in cells.iter().enumerate() {
        if grid.fixed[i].is_some() {
            p.pin(i % grid.w, i / grid.w, t);
        } else {
            p.set(i % grid.w, i / grid.w, t);
        }
    }
    p
}

/// First valid filling of the rectangle in lexicographic (row, column,
/// tile index) order, honoring pinned seed cells.
pub fn solve_rectangle(set: &WangTileSet, width: usize, height: usize, seed: Option<&GridPlacement>, cfg: SearchConfig) -> Result<Option<GridPlacement>, WangError> {
    find_first(set, width, height, false, seed, cfg)
}

/// A filling that also matches across the wrap-around edges.
pub fn solve_torus(set: &WangTileSet, width: usize, height: usize, cfg: SearchConfig) -> Result<Option<GridPlacement>, WangError> {
    find_first(set, width, height, true, None, cfg)
}

/// Every valid filling, in canonical order.
pub fn enumerate_rectangle(set: &WangTileSet, width: usize, height: usize, seed: Option<&GridPlacement>, cfg: SearchConfig) -> Result<Vec<GridPlacement>, WangError> {
    let cand = Candidates::new(set);
    let (grid, cells, first) = prepare(set, &cand, width, height, false, seed, &cfg)?;
    let branches = branch_options(&grid, &cells, first);
    let found = collect_in_order(branches.len(), cfg, |b, meter| {
        let mut g = cells.clone();
        let start = if branches[b] == usize::MAX {
            first
        } else {
            g[first] = branches[b];
            first + 1
        };
        let mut out = Vec::new();
        grid.dfs(&mut g, start, meter, |sol| {
            out.push(sol.to_vec());
            true
        })?;
        Some(out)
    });
    match found {
        Ok(all) => Ok(all.iter().map(|c| to_placement(&grid, c)).collect()),
        Err(_) => Err(WangError::ResourceLimit { budget: cfg.budget }),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TilingVerdict {
    /// A torus domain; the set tiles the plane periodically with the two
    /// translation vectors.
    TilesWithPeriod { domain: GridPlacement, vectors: [[i64; 2]; 2] },
    /// No filling of a `width × height` rectangle exists.
    NoTiling { witness: (usize, usize) },
    /// Neither side settled; `limits_hit` searches ran out of budget.
    Unknown { limits_hit: usize },
}

/// Interleaves torus and rectangle searches over all sizes up to
/// `max_size`. Sizes are visited in stages of increasing
/// `max(width, height)`, ordered by (area, width) within a stage; each
/// stage runs its torus searches before its rectangle searches.
pub fn decide_up_to(set: &WangTileSet, max_size: usize, cfg: SearchConfig) -> Result<TilingVerdict, WangError> {
    if max_size == 0 {
        return Err(WangError::BadSize(0, 0));
    }
    let mut limits_hit = 0;
    for s in 1..=max_size {
        let mut sizes: Vec<(usize, usize)> = (1..=s).flat_map(|a| [(a, s), (s, a)]).collect();
        sizes.sort_by_key(|&(w, h)| (w * h, w));
        sizes.dedup();
        for &(w, h) in &sizes {
            match solve_torus(set, w, h, cfg) {
                Ok(Some(domain)) => {
                    return Ok(TilingVerdict::TilesWithPeriod { domain, vectors: [[w as i64, 0], [0, h as i64]] })
                }
                Ok(None) => {}
                Err(WangError::ResourceLimit { .. }) => limits_hit += 1,
                Err(e) => return Err(e),
            }
        }
        for &(w, h) in &sizes {
            match solve_rectangle(set, w, h, None, cfg) {
                Ok(Some(_)) => {}
                Ok(None) => return Ok(TilingVerdict::NoTiling { witness: (w, h) }),
                Err(WangError::ResourceLimit { .. }) => limits_hit += 1,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(TilingVerdict::Unknown { limits_hit })
}

/// Tile counts per name in a placement.
pub fn census(set: &WangTileSet, p: &GridPlacement) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for t in p.cells.iter().flatten() {
        *m.entry(set.name(*t).to_string()).or_insert(0) += 1;
    }
    m
}
