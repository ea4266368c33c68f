//! Binary Turing machines and their compilation into Wang tiles.
//!
//! The compiled set lays the run out row by row above a pinned seed row:
//! the top edges of row `t` spell the tape at time `t`, with the head
//! cell marked `(state,symbol)`. Moves travel sideways as edge labels
//! between an action tile and the merge tile that receives the head.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::search::SearchConfig;
use crate::wang::{solve_rectangle, GridPlacement, WangError, WangTile, WangTileSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MachineError {
    #[error("no transition for ({0}, {1})")]
    MissingTransition(String, u8),
    #[error("malformed machine: {0}")]
    Malformed(String),
    #[error("state {0:?} is halted")]
    Halted(String),
    #[error(transparent)]
    Wang(#[from] WangError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    L,
    R,
}

impl Move {
    pub fn delta(self) -> i64 {
        match self {
            Move::L => -1,
            Move::R => 1,
        }
    }
}

/// Successor state: an index into `states`, or `None` for halt.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub write: u8,
    pub mv: Move,
    pub next: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TuringMachine {
    pub states: Vec<String>,
    pub halt: String,
    delta: Vec<[Option<Transition>; 2]>,
}

/// `{"states":[..],"start":..,"halt":"H","delta":{"A,0":"0RB",..}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MachineJson {
    pub states: Vec<String>,
    #[serde(default)]
    pub start: Option<String>,
    #[serde(default = "default_halt")]
    pub halt: String,
    pub delta: BTreeMap<String, String>,
}

fn default_halt() -> String {
    "H".into()
}

impl TuringMachine {
    /// `table` maps `(state, symbol)` to entries like `"0RB"`. The first
    /// state is the start state.
    pub fn new(states: &[&str], halt: &str, table: &[(&str, u8, &str)]) -> Result<Self, MachineError> {
        let mut delta = BTreeMap::new();
        for (q, s, v) in table {
            delta.insert(format!("{q},{s}"), v.to_string());
        }
        TuringMachine::from_json(&MachineJson {
            states: states.iter().map(|s| s.to_string()).collect(),
            start: None,
            halt: halt.into(),
            delta,
        })
    }

    pub fn from_json(j: &MachineJson) -> Result<Self, MachineError> {
        let mut states = j.states.clone();
        if states.is_empty() {
            return Err(MachineError::Malformed("no states".into()));
        }
        if let Some(start) = &j.start {
            let pos = states.iter().position(|s| s == start).ok_or_else(|| MachineError::Malformed(format!("unknown start {start}")))?;
            let s = states.remove(pos);
            states.insert(0, s);
        }
        let index: HashMap<&str, usize> = states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        if index.len() != states.len() {
            return Err(MachineError::Malformed("duplicate state".into()));
        }
        if index.contains_key(j.halt.as_str()) {
            return Err(MachineError::Malformed("halt state listed among working states".into()));
        }
        let mut delta = vec![[None, None]; states.len()];
        for (k, v) in &j.delta {
            let (q, s) = k.split_once(',').ok_or_else(|| MachineError::Malformed(format!("bad key {k:?}")))?;
            let qi = *index.get(q.trim()).ok_or_else(|| MachineError::Malformed(format!("bad key {k:?}")))?;
            let si: usize = match s.trim() {
                "0" => 0,
                "1" => 1,
                _ => return Err(MachineError::Malformed(format!("bad symbol in {k:?}"))),
            };
            delta[qi][si] = Some(parse_entry(v, &index, &j.halt)?);
        }
        let m = TuringMachine { states, halt: j.halt.clone(), delta };
        for (q, row) in m.delta.iter().enumerate() {
            for (s, t) in row.iter().enumerate() {
                if t.is_none() {
                    return Err(MachineError::MissingTransition(m.states[q].clone(), s as u8));
                }
            }
        }
        Ok(m)
    }

    pub fn to_json(&self) -> MachineJson {
        let mut delta = BTreeMap::new();
        for (q, row) in self.delta.iter().enumerate() {
            for (s, t) in row.iter().enumerate() {
                if let Some(t) = t {
                    let next = t.next.map_or(self.halt.as_str(), |n| self.states[n].as_str());
                    delta.insert(format!("{},{s}", self.states[q]), format!("{}{:?}{next}", t.write, t.mv));
                }
            }
        }
        MachineJson { states: self.states.clone(), start: Some(self.states[0].clone()), halt: self.halt.clone(), delta }
    }

    pub fn transition(&self, state: usize, symbol: u8) -> Transition {
        self.delta[state][symbol as usize].expect("transitions are total")
    }

    pub fn start(&self) -> MachineConfiguration {
        MachineConfiguration { time: 0, state: self.states[0].clone(), head: 0, tape: BTreeMap::new() }
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    /// The example machine: φ(A,0)=0RB, φ(B,0)=1LA, φ(C,0)=1RB,
    /// φ(A,1)=1RB, φ(B,1)=0RC, φ(C,1)=0LH.
    pub fn sample() -> Self {
        TuringMachine::new(
            &["A", "B", "C"],
            "H",
            &[("A", 0, "0RB"), ("B", 0, "1LA"), ("C", 0, "1RB"), ("A", 1, "1RB"), ("B", 1, "0RC"), ("C", 1, "0LH")],
        )
        .expect("well formed")
    }
}

fn parse_entry(v: &str, index: &HashMap<&str, usize>, halt: &str) -> Result<Transition, MachineError> {
    let bad = || MachineError::Malformed(format!("bad entry {v:?}"));
    let mut chars = v.chars();
    let write = match chars.next() {
        Some('0') => 0,
        Some('1') => 1,
        _ => return Err(bad()),
    };
    let mv = match chars.next() {
        Some('L') => Move::L,
        Some('R') => Move::R,
        _ => return Err(bad()),
    };
    let next: String = chars.collect();
    let next = if next == halt { None } else { Some(*index.get(next.as_str()).ok_or_else(bad)?) };
    Ok(Transition { write, mv, next })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineConfiguration {
    pub time: u64,
    pub state: String,
    pub head: i64,
    /// Nonzero cells only.
    pub tape: BTreeMap<i64, u8>,
}

impl MachineConfiguration {
    pub fn read(&self, cell: i64) -> u8 {
        self.tape.get(&cell).copied().unwrap_or(0)
    }

    fn write(&mut self, cell: i64, s: u8) {
        if s == 0 {
            self.tape.remove(&cell);
        } else {
            self.tape.insert(cell, s);
        }
    }
}

impl fmt::Display for MachineConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = self.tape.keys().next().copied().unwrap_or(0).min(self.head);
        let hi = self.tape.keys().last().copied().unwrap_or(0).max(self.head);
        write!(f, "t={} {} @{} ", self.time, self.state, self.head)?;
        for c in lo..=hi {
            if c == self.head {
                write!(f, "[{}]", self.read(c))?;
            } else {
                write!(f, "{}", self.read(c))?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Running(MachineConfiguration),
    Halted(MachineConfiguration),
}

pub fn step(m: &TuringMachine, c: &MachineConfiguration) -> Result<Step, MachineError> {
    let q = m.state_index(&c.state).ok_or_else(|| MachineError::Halted(c.state.clone()))?;
    let t = m.delta[q][c.read(c.head) as usize].ok_or_else(|| MachineError::MissingTransition(c.state.clone(), c.read(c.head)))?;
    let mut next = c.clone();
    next.write(c.head, t.write);
    next.head += t.mv.delta();
    next.time += 1;
    match t.next {
        Some(n) => {
            next.state = m.states[n].clone();
            Ok(Step::Running(next))
        }
        None => {
            next.state = m.halt.clone();
            Ok(Step::Halted(next))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunResult {
    HaltedAt(u64, MachineConfiguration),
    Running(MachineConfiguration),
}

/// Steps from the start configuration at most `max_steps` times.
pub fn run(m: &TuringMachine, max_steps: u64) -> Result<RunResult, MachineError> {
    let mut c = m.start();
    for _ in 0..max_steps {
        match step(m, &c)? {
            Step::Running(n) => c = n,
            Step::Halted(n) => return Ok(RunResult::HaltedAt(n.time, n)),
        }
    }
    Ok(RunResult::Running(c))
}

/// All configurations for times `0..=max_steps`, stopping at halt.
pub fn trace(m: &TuringMachine, max_steps: u64) -> Result<Vec<MachineConfiguration>, MachineError> {
    let mut out = vec![m.start()];
    for _ in 0..max_steps {
        match step(m, out.last().unwrap())? {
            Step::Running(n) => out.push(n),
            Step::Halted(n) => {
                out.push(n);
                break;
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    West,
    East,
}

/// What each compiled tile means.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TileRole {
    Filler,
    /// Passive tape cell carrying symbol `s`.
    Tape(u8),
    /// Executes φ(q, s).
    Action { state: String, symbol: u8 },
    /// Receives the head from `from` and presents `(state, symbol)` above.
    Head { state: String, symbol: u8, from: Side },
    /// Receives the halt state: nothing can sit above it.
    Halt { symbol: u8, from: Side },
    Boundary(Side),
    /// The seed tile presenting `(start, 0)`.
    Seed,
    /// Seed row cells beside the seed tile, presenting `0`.
    SeedFlank,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompiledTiles {
    pub tileset: WangTileSet,
    pub roles: Vec<TileRole>,
    pub machine: TuringMachine,
}

const NEUTRAL: &str = "-";
const BLANK: &str = "_";
const LEFT_WALL: &str = "|L";
const RIGHT_WALL: &str = "R|";

fn head_label(q: &str, s: u8) -> String {
    format!("({q},{s})")
}

/// Horizontal label carrying state `q` across an edge towards `towards`.
fn carry_label(q: &str, towards: Side) -> String {
    match towards {
        Side::East => format!("{q}>"),
        Side::West => format!("<{q}"),
    }
}

/// Number of tiles `compile` produces for a binary machine with
/// `states` working states: filler, 2 tape, 2 action per state, 4 merge
/// per state plus 4 halting merges, 2 boundary, seed and seed flank.
pub fn compiled_size(states: usize) -> usize {
    11 + 6 * states
}

pub fn compile(m: &TuringMachine) -> CompiledTiles {
    let mut tiles = Vec::new();
    let mut roles = Vec::new();
    let mut add = |t: WangTile, r: TileRole| {
        tiles.push(t);
        roles.push(r);
    };
    add(WangTile::new("filler", BLANK, BLANK, BLANK, BLANK), TileRole::Filler);
    for s in 0..2u8 {
        let l = s.to_string();
        add(WangTile::new(&format!("tape{s}"), &l, NEUTRAL, &l, NEUTRAL), TileRole::Tape(s));
    }
    for (qi, q) in m.states.iter().enumerate() {
        for s in 0..2u8 {
            let t = m.transition(qi, s);
            let next = t.next.map_or(m.halt.as_str(), |n| m.states[n].as_str());
            let (east, west) = match t.mv {
                Move::R => (carry_label(next, Side::East), NEUTRAL.to_string()),
                Move::L => (NEUTRAL.to_string(), carry_label(next, Side::West)),
            };
            add(
                WangTile::new(&format!("act{q}{s}"), &t.write.to_string(), &east, &head_label(q, s), &west),
                TileRole::Action { state: q.clone(), symbol: s },
            );
        }
    }
    let receivers: Vec<(String, bool)> = m.states.iter().map(|q| (q.clone(), false)).chain([(m.halt.clone(), true)]).collect();
    for (q, halting) in &receivers {
        for s in 0..2u8 {
            for from in [Side::West, Side::East] {
                let (east, west) = match from {
                    Side::West => (NEUTRAL.to_string(), carry_label(q, Side::East)),
                    Side::East => (carry_label(q, Side::West), NEUTRAL.to_string()),
                };
                let tag = if from == Side::West { "w" } else { "e" };
                let role = if *halting {
                    TileRole::Halt { symbol: s, from }
                } else {
                    TileRole::Head { state: q.clone(), symbol: s, from }
                };
                add(WangTile::new(&format!("get{q}{s}{tag}"), &head_label(q, s), &east, &s.to_string(), &west), role);
            }
        }
    }
    add(WangTile::new("wallL", LEFT_WALL, NEUTRAL, LEFT_WALL, "|"), TileRole::Boundary(Side::West));
    add(WangTile::new("wallR", RIGHT_WALL, "|", RIGHT_WALL, NEUTRAL), TileRole::Boundary(Side::East));
    add(WangTile::new("seed", &head_label(&m.states[0], 0), NEUTRAL, BLANK, NEUTRAL), TileRole::Seed);
    add(WangTile::new("flank", "0", NEUTRAL, BLANK, NEUTRAL), TileRole::SeedFlank);
    CompiledTiles { tileset: WangTileSet::new(tiles).expect("distinct names"), roles, machine: m.clone() }
}

/// One decoded row: the configuration spelled by the row's top edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodedRow {
    pub state: String,
    pub head: i64,
    pub tape: BTreeMap<i64, u8>,
    pub heads_seen: usize,
}

impl CompiledTiles {
    /// Width of the rectangle used for `rows` rows above the seed.
    pub fn width_for(rows: usize) -> usize {
        2 * rows + 3
    }

    pub fn index(&self, name: &str) -> usize {
        self.tileset.index_of(name).expect("compiled tile")
    }

    /// The pinned seed row for a `(2·rows+3) × (rows+1)` rectangle.
    pub fn seed(&self, rows: usize) -> GridPlacement {
        let w = Self::width_for(rows);
        let mut p = GridPlacement::empty(w, 1);
        p.pin(0, 0, self.index("wallL"));
        p.pin(w - 1, 0, self.index("wallR"));
        for c in 1..w - 1 {
            p.pin(c, 0, self.index("flank"));
        }
        p.pin(rows + 1, 0, self.index("seed"));
        p
    }

    /// First completion of `rows` rows above the seed, if any.
    pub fn complete(&self, rows: usize, cfg: SearchConfig) -> Result<Option<GridPlacement>, MachineError> {
        let seed = self.seed(rows);
        Ok(solve_rectangle(&self.tileset, Self::width_for(rows), rows + 1, Some(&seed), cfg)?)
    }

    /// Reads the configuration from the top edges of row `r`. Cell
    /// indices are relative to the seed column.
    pub fn decode_row(&self, p: &GridPlacement, r: usize) -> Option<DecodedRow> {
        let origin = (p.width / 2) as i64;
        let mut out = DecodedRow { state: String::new(), head: 0, tape: BTreeMap::new(), heads_seen: 0 };
        for c in 0..p.width {
            let t = p.get(c, r)?;
            let cell = c as i64 - origin;
            let (sym, head) = match &self.roles[t] {
                TileRole::Tape(s) => (*s, None),
                TileRole::Action { .. } => (self.tileset.tiles()[t].north.parse().ok()?, None),
                TileRole::Head { state, symbol, .. } => (*symbol, Some(state.clone())),
                TileRole::Halt { symbol, .. } => (*symbol, Some(self.machine.halt.clone())),
                TileRole::Seed => (0, Some(self.machine.states[0].clone())),
                TileRole::SeedFlank => (0, None),
                TileRole::Boundary(_) | TileRole::Filler => continue,
            };
            if sym != 0 {
                out.tape.insert(cell, sym);
            }
            if let Some(q) = head {
                out.state = q;
                out.head = cell;
                out.heads_seen += 1;
            }
        }
        Some(out)
    }
}

impl DecodedRow {
    pub fn matches(&self, c: &MachineConfiguration) -> bool {
        self.heads_seen == 1 && self.state == c.state && self.head == c.head && self.tape == c.tape
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_step() -> TuringMachine {
        TuringMachine::new(&["A"], "H", &[("A", 0, "1RH"), ("A", 1, "1RH")]).unwrap()
    }

    #[test]
    fn sample_first_steps() {
        let m = TuringMachine::sample();
        let Step::Running(c1) = step(&m, &m.start()).unwrap() else { panic!() };
        assert_eq!((c1.state.as_str(), c1.head, c1.tape.len()), ("B", 1, 0));
        let tr = trace(&m, 6).unwrap();
        let c6 = &tr[6];
        assert_eq!((c6.state.as_str(), c6.head), ("A", 2));
        assert_eq!((0..4).map(|i| c6.read(i)).collect::<Vec<_>>(), vec![0, 0, 1, 1]);
    }

    #[test]
    fn one_step_halt() {
        let m = one_step();
        let Step::Halted(c) = step(&m, &m.start()).unwrap() else { panic!() };
        assert_eq!(c.read(0), 1);
        assert!(matches!(run(&m, 10).unwrap(), RunResult::HaltedAt(1, _)));
        assert!(step(&m, &c).is_err());
    }

    #[test]
    fn self_loop_runs() {
        let m = TuringMachine::new(&["A"], "H", &[("A", 0, "0RA"), ("A", 1, "0RA")]).unwrap();
        assert!(matches!(run(&m, 100).unwrap(), RunResult::Running(_)));
    }

    #[test]
    fn malformed_machines() {
        assert!(matches!(TuringMachine::new(&["A"], "H", &[("A", 0, "1RH")]), Err(MachineError::MissingTransition(..))));
        assert!(TuringMachine::new(&["A"], "H", &[("A", 0, "2RH"), ("A", 1, "1RH")]).is_err());
        assert!(TuringMachine::new(&["A"], "H", &[("A", 0, "1RZ"), ("A", 1, "1RH")]).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let m = TuringMachine::sample();
        assert_eq!(TuringMachine::from_json(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn size_formula() {
        for m in [TuringMachine::sample(), one_step()] {
            let c = compile(&m);
            assert_eq!(c.tileset.len(), compiled_size(m.states.len()));
            assert_eq!(c.roles.len(), c.tileset.len());
            assert_eq!(c.roles.iter().filter(|r| **r == TileRole::Seed).count(), 1);
        }
    }

    #[test]
    fn sample_rows_follow_the_run() {
        let m = TuringMachine::sample();
        let c = compile(&m);
        let p = c.complete(8, SearchConfig::default()).unwrap().unwrap();
        let tr = trace(&m, 8).unwrap();
        for (r, conf) in tr.iter().enumerate() {
            assert!(c.decode_row(&p, r).unwrap().matches(conf), "row {r}");
        }
    }

    #[test]
    fn halt_blocks_the_next_row() {
        let c = compile(&one_step());
        let p = c.complete(1, SearchConfig::default()).unwrap().unwrap();
        assert!(matches!(c.roles[p.get(2, 1).unwrap()], TileRole::Halt { .. } | TileRole::Action { .. }));
        assert_eq!(c.complete(2, SearchConfig::default()).unwrap(), None);
    }

    #[test]
    fn filler_tiles_the_torus() {
        let c = compile(&TuringMachine::sample());
        let t = crate::wang::solve_torus(&c.tileset, 3, 3, SearchConfig::default()).unwrap().unwrap();
        assert!((0..3).all(|r| t.row(r).iter().all(|&x| x == Some(0))));
    }
}
