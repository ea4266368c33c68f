use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use tessella::balance::{self, MapConfiguration, MapJson, Tessellation, ValenceMode};
use tessella::geometry::{render_svg, render_svg_with_overlay, PatchJson, PolygonPatch, SvgStyle};
use tessella::machine::{self, MachineJson, RunResult, TuringMachine};
use tessella::polyform::{self, CensusVerdict, DecoratedPolyform, Heesch, PolyformError, PolyformJson};
use tessella::robinson::{self, Elbow, RobinsonPatch};
use tessella::substitution::{self, AnySystem, SubstitutionError, SystemJson};
use tessella::wang::{self, GridPlacement, PlacementJson, TilingVerdict, WangError, WangTileSet};
use tessella::{SearchConfig, DEFAULT_BUDGET};

// Output goes through these so a closed pipe ends quietly.
macro_rules! print {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = write!(std::io::stdout(), $($t)*);
    }};
}

macro_rules! println {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

const OK: u8 = 0;
const NEGATIVE: u8 = 1;
const UNKNOWN: u8 = 2;
const USAGE: u8 = 64;

/// Environment variable overriding the default search budget.
const BUDGET_ENV: &str = "TESSELLA_BUDGET";

#[derive(Parser)]
#[command(name = "tessella", version, about = "Tilings: Wang tiles, Turing machines, Robinson tiles, substitutions, imbalance and polyforms")]
struct Cli {
    /// Worker threads for searches; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: u64,
    /// Search node budget (default from TESSELLA_BUDGET, else 10^7).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    budget: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Wang tile searches.
    #[command(subcommand)]
    Wang(WangCmd),
    /// Turing machines and their tile encoding.
    #[command(subcommand)]
    Tm(TmCmd),
    /// Robinson's tiles.
    #[command(subcommand)]
    Robinson(RobinsonCmd),
    /// Substitution systems.
    #[command(subcommand)]
    Subst(SubstCmd),
    /// Imbalance of tiles and configurations.
    #[command(subcommand)]
    Balance(BalanceCmd),
    /// Decorated polyominoes and polyhexes.
    #[command(subcommand)]
    Poly(PolyCmd),
    /// Render a polygon patch JSON file to SVG.
    Render(RenderArgs),
}

#[derive(Subcommand)]
enum WangCmd {
    /// Fill a rectangle, optionally around a seed placement.
    Solve {
        tiles: PathBuf,
        #[arg(long, value_parser = parse_size)]
        size: (usize, usize),
        #[arg(long)]
        seed: Option<PathBuf>,
    },
    /// Fill a torus (periodic boundary).
    Torus {
        tiles: PathBuf,
        #[arg(long, value_parser = parse_size)]
        size: (usize, usize),
    },
    /// Search tori and rectangles up to a size for a periodic tiling or a
    /// proof of no tiling.
    Decide {
        tiles: PathBuf,
        #[arg(long, default_value_t = 6)]
        max: usize,
    },
}

#[derive(Subcommand)]
enum TmCmd {
    /// Simulate a machine.
    Run {
        machine: PathBuf,
        #[arg(long)]
        steps: u64,
    },
    /// Compile a machine to Wang tiles; with --rows, complete that many
    /// rows above the seed and decode them.
    Compile {
        machine: PathBuf,
        #[arg(long)]
        rows: Option<usize>,
    },
}

#[derive(Subcommand)]
enum RobinsonCmd {
    /// Generate a block of side 2^(k+1)-1.
    Block {
        #[arg(long)]
        level: u32,
        /// Comma-separated central elbows, innermost level first.
        #[arg(long, value_delimiter = ',', value_parser = parse_elbow)]
        elbows: Vec<Elbow>,
        /// Also write an SVG with the marked squares.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Print the text grid instead of JSON.
        #[arg(long)]
        text: bool,
    },
    /// Enumerate 3x3 windows around a cornered cross.
    Force {
        /// Remove cornered tiles from the set.
        #[arg(long)]
        no_cornered: bool,
    },
    /// Validate a patch JSON file.
    Check { patch: PathBuf },
}

#[derive(Subcommand)]
enum SubstCmd {
    /// Expand a prototile.
    Expand {
        /// Shipped system name or a system JSON file.
        system: String,
        #[arg(long)]
        seed: Option<String>,
        #[arg(long)]
        levels: u32,
        /// Print only the tile census.
        #[arg(long)]
        census: bool,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Check that every rule tiles its inflated prototile.
    Validate {
        system: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Ambient,
    Patch,
}

#[derive(Subcommand)]
enum BalanceCmd {
    /// Imbalance of one tile from its corner valences.
    Tile {
        #[arg(long, value_delimiter = ',', required = true)]
        valences: Vec<u32>,
    },
    /// Compare a configuration's imbalance with the sum over its tiles.
    /// The map is a JSON file or `octagon-square` for the built-in figure.
    Lemma {
        map: String,
        #[arg(long, value_enum, default_value = "ambient")]
        mode: Mode,
    },
    /// Average imbalance of disk configurations around the origin.
    Series {
        #[arg(long, value_parser = parse_tessellation)]
        tessellation: Tessellation,
        #[arg(long, value_delimiter = ',', required = true)]
        radii: Vec<f64>,
    },
    /// Sign of the imbalance for n corners of valence q.
    Classify {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        q: u32,
    },
}

#[derive(Subcommand)]
enum PolyCmd {
    /// Edge census and the counting argument.
    Census { tile: PathBuf },
    /// Heesch search.
    Corona {
        tile: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_level: usize,
        #[arg(long)]
        reflections: bool,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Periodic domain search.
    Domain {
        tile: PathBuf,
        #[arg(long, default_value_t = polyform::DEFAULT_DOMAIN_AREA)]
        max_area: usize,
        #[arg(long)]
        reflections: bool,
    },
}

#[derive(Args)]
struct RenderArgs {
    /// Patch JSON: {"tiles":[{"label","vertices"}]}.
    patch: PathBuf,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once('x').ok_or("expected WxH")?;
    let w: usize = w.parse().map_err(|e| format!("{e}"))?;
    let h: usize = h.parse().map_err(|e| format!("{e}"))?;
    if w == 0 || h == 0 {
        return Err("sizes must be positive".into());
    }
    Ok((w, h))
}

fn parse_elbow(s: &str) -> Result<Elbow, String> {
    match s.to_ascii_uppercase().as_str() {
        "NE" => Ok(Elbow::NE),
        "NW" => Ok(Elbow::NW),
        "SE" => Ok(Elbow::SE),
        "SW" => Ok(Elbow::SW),
        _ => Err(format!("unknown elbow {s:?}")),
    }
}

fn parse_tessellation(s: &str) -> Result<Tessellation, String> {
    Tessellation::parse(s).ok_or_else(|| format!("unknown tessellation {s:?} (square, hexagon, octagon-square)"))
}

/// A failure mapped to an exit code.
struct Fail(u8, String);

impl Fail {
    fn usage(e: impl Display) -> Fail {
        Fail(USAGE, e.to_string())
    }
}

type Out = Result<u8, Fail>;

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::usage(format!("{}: {e}", path.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Fail> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| Fail::usage(format!("{}: malformed JSON: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Fail> {
    fs::write(path, text).map_err(|e| Fail(UNKNOWN, format!("{}: {e}", path.display())))
}

fn print_json(v: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn wang_fail(e: WangError) -> Fail {
    match e {
        WangError::ResourceLimit { .. } => Fail(UNKNOWN, e.to_string()),
        _ => Fail::usage(e),
    }
}

fn load_tiles(path: &Path) -> Result<WangTileSet, Fail> {
    let text = read(path)?;
    WangTileSet::from_json(&text).map_err(|e| Fail::usage(format!("{}: malformed JSON: {e}", path.display())))
}

fn found_placement(set: &WangTileSet, p: Option<GridPlacement>) -> Out {
    match p {
        Some(p) => {
            print_json(&p.to_json(set));
            Ok(OK)
        }
        None => {
            println!("no tiling");
            Ok(NEGATIVE)
        }
    }
}

fn wang_cmd(cmd: WangCmd, cfg: SearchConfig) -> Out {
    match cmd {
        WangCmd::Solve { tiles, size, seed } => {
            let set = load_tiles(&tiles)?;
            let seed = match seed {
                Some(path) => {
                    let j: PlacementJson = read_json(&path)?;
                    Some(GridPlacement::from_json(&j, &set).map_err(Fail::usage)?)
                }
                None => None,
            };
            let p = wang::solve_rectangle(&set, size.0, size.1, seed.as_ref(), cfg).map_err(wang_fail)?;
            found_placement(&set, p)
        }
        WangCmd::Torus { tiles, size } => {
            let set = load_tiles(&tiles)?;
            let p = wang::solve_torus(&set, size.0, size.1, cfg).map_err(wang_fail)?;
            found_placement(&set, p)
        }
        WangCmd::Decide { tiles, max } => {
            let set = load_tiles(&tiles)?;
            match wang::decide_up_to(&set, max, cfg).map_err(wang_fail)? {
                TilingVerdict::TilesWithPeriod { domain, vectors } => {
                    print_json(&json!({"verdict": "tiles_with_period", "vectors": vectors, "domain": domain.to_json(&set)}));
                    Ok(OK)
                }
                TilingVerdict::NoTiling { witness } => {
                    print_json(&json!({"verdict": "no_tiling", "witness": [witness.0, witness.1]}));
                    Ok(NEGATIVE)
                }
                TilingVerdict::Unknown { limits_hit } => {
                    print_json(&json!({"verdict": "unknown", "limits_hit": limits_hit}));
                    Ok(UNKNOWN)
                }
            }
        }
    }
}

fn load_machine(path: &Path) -> Result<TuringMachine, Fail> {
    let j: MachineJson = read_json(path)?;
    TuringMachine::from_json(&j).map_err(Fail::usage)
}

fn tm_cmd(cmd: TmCmd, cfg: SearchConfig) -> Out {
    match cmd {
        TmCmd::Run { machine, steps } => {
            let m = load_machine(&machine)?;
            match machine::run(&m, steps).map_err(Fail::usage)? {
                RunResult::Running(c) => {
                    println!("running");
                    println!("{c}");
                }
                RunResult::HaltedAt(t, c) => {
                    println!("halted {t}");
                    println!("{c}");
                }
            }
            Ok(OK)
        }
        TmCmd::Compile { machine, rows } => {
            let m = load_machine(&machine)?;
            let compiled = machine::compile(&m);
            let Some(rows) = rows else {
                println!("{}", compiled.tileset.to_json());
                return Ok(OK);
            };
            match compiled.complete(rows, cfg).map_err(|e| Fail(UNKNOWN, e.to_string()))? {
                Some(p) => {
                    for r in 1..=rows {
                        match compiled.decode_row(&p, r) {
                            Some(d) => {
                                let tape: String = (-(rows as i64)..=rows as i64).map(|c| d.tape.get(&c).copied().unwrap_or(0).to_string()).collect();
                                println!("row {r}: {} @{} {tape}", d.state, d.head);
                            }
                            None => println!("row {r}: undecodable"),
                        }
                    }
                    Ok(OK)
                }
                None => {
                    println!("no completion of {rows} rows");
                    Ok(NEGATIVE)
                }
            }
        }
    }
}

fn robinson_cmd(cmd: RobinsonCmd, cfg: SearchConfig) -> Out {
    match cmd {
        RobinsonCmd::Block { level, elbows, svg, text } => {
            let elbows = if elbows.is_empty() { vec![Elbow::NE; level as usize] } else { elbows };
            let b = robinson::generate_block(level, &elbows).map_err(Fail::usage)?;
            if let Some(path) = svg {
                let squares = robinson::square_hierarchy(&b).map_err(|e| Fail(UNKNOWN, e.to_string()))?;
                let style = SvgStyle::default()
                    .with("CorneredCross", "#e0a040")
                    .with("Cross", "#f0d080")
                    .with("ArmPlain", "#d8d8d8")
                    .with("ArmParallel", "#c0d8f0")
                    .with("ArmPerpendicular", "#c8f0c0")
                    .with("ArmBoth", "#e8c8f0");
                let out = render_svg_with_overlay(&b.to_polygon_patch(), &style, &robinson::square_outlines(&squares))
                    .map_err(|e| Fail(UNKNOWN, e.to_string()))?;
                write(&path, &out)?;
            }
            if text {
                print!("{}", b.render_text());
            } else {
                print_json(&b.to_json());
            }
            Ok(OK)
        }
        RobinsonCmd::Force { no_cornered } => {
            let found = robinson::verify_forcing_3x3(!no_cornered, cfg).map_err(|e| match e {
                robinson::RobinsonError::Wang(WangError::ResourceLimit { .. }) => Fail(UNKNOWN, e.to_string()),
                e => Fail::usage(e),
            })?;
            println!("{} completions", found.len());
            for p in &found {
                println!();
                print!("{}", p.render_text());
            }
            Ok(if found.is_empty() { NEGATIVE } else { OK })
        }
        RobinsonCmd::Check { patch } => {
            let j: robinson::PatchJson = read_json(&patch)?;
            let p = RobinsonPatch::from_json(&j).map_err(Fail::usage)?;
            match robinson::validate(&p) {
                Ok(()) => {
                    println!("valid");
                    Ok(OK)
                }
                Err(v) => {
                    println!("invalid: cell ({}, {}) side {:?} component {:?}", v.cell.0, v.cell.1, v.side, v.component);
                    Ok(NEGATIVE)
                }
            }
        }
    }
}

fn load_system(name: &str) -> Result<AnySystem, Fail> {
    match substitution::system_by_name(name) {
        Ok(s) => Ok(s),
        Err(_) if Path::new(name).exists() => {
            let j: SystemJson = read_json(Path::new(name))?;
            Ok(AnySystem::Float(j.to_system().map_err(Fail::usage)?))
        }
        Err(e) => Err(Fail::usage(format!("{e}; shipped systems: {}", substitution::SYSTEM_NAMES.join(", ")))),
    }
}

fn subst_fail(e: SubstitutionError) -> Fail {
    match e {
        SubstitutionError::Budget { .. } => Fail(UNKNOWN, e.to_string()),
        e => Fail::usage(e),
    }
}

fn subst_cmd(cmd: SubstCmd, cfg: SearchConfig) -> Out {
    match cmd {
        SubstCmd::Expand { system, seed, levels, census, svg } => {
            let s = load_system(&system)?;
            let seed = seed.unwrap_or_else(|| s.prototile_names()[0].clone());
            let patch = s.expand_plane(&seed, levels, cfg.jobs).map_err(subst_fail)?;
            if let Some(path) = svg {
                write(&path, &render_svg(&patch, &SvgStyle::default()).map_err(|e| Fail(UNKNOWN, e.to_string()))?)?;
            }
            if census {
                print_json(&s.census(&patch).map_err(subst_fail)?);
            } else {
                print_json(&patch.to_json());
            }
            Ok(OK)
        }
        SubstCmd::Validate { system, tol } => {
            let s = load_system(&system)?;
            let verdicts = s.validate_rule(tol).map_err(subst_fail)?;
            let mut all = true;
            for (name, v) in &verdicts {
                all &= v.is_valid();
                println!("{name}: {v:?}");
            }
            Ok(if all { OK } else { NEGATIVE })
        }
    }
}

fn balance_fail(e: balance::BalanceError) -> Fail {
    match e {
        balance::BalanceError::RadiusTooLarge(..) => Fail(UNKNOWN, e.to_string()),
        e => Fail::usage(e),
    }
}

fn balance_cmd(cmd: BalanceCmd, cfg: SearchConfig) -> Out {
    match cmd {
        BalanceCmd::Tile { valences } => {
            println!("{}", balance::tile_imbalance(&valences).map_err(Fail::usage)?);
            Ok(OK)
        }
        BalanceCmd::Lemma { map, mode } => {
            let c = if map == "octagon-square" {
                balance::octagon_square_figure()
            } else {
                let j: MapJson = read_json(Path::new(&map))?;
                MapConfiguration::from_json(&j).map_err(Fail::usage)?
            };
            let mode = match mode {
                Mode::Ambient => ValenceMode::Ambient,
                Mode::Patch => ValenceMode::Patch,
            };
            let r = balance::verify_lemma(&c, mode).map_err(Fail::usage)?;
            println!("v={} e={} f={} euler={}", r.vertices, r.edges, r.faces, c.euler());
            println!("configuration: {}", r.lhs);
            println!("sum of tiles: {}", r.rhs);
            println!("equal: {}", r.equal);
            println!("bound |K-2π| < π·{}: {}", r.boundary, r.bound_ok);
            Ok(if r.equal && r.bound_ok { OK } else { NEGATIVE })
        }
        BalanceCmd::Series { tessellation, radii } => {
            for e in balance::average_imbalance_series(tessellation, &radii, cfg.jobs).map_err(balance_fail)? {
                println!("r={} N={} K={} |K|/N={:.6}", e.radius, e.tiles, e.imbalance, e.ratio);
            }
            Ok(OK)
        }
        BalanceCmd::Classify { n, q } => {
            let (c, k) = balance::classify_vertex_uniform(n, q).map_err(Fail::usage)?;
            println!("{} {k}", format!("{c:?}").to_lowercase());
            Ok(OK)
        }
    }
}

fn load_tile(path: &Path) -> Result<DecoratedPolyform, Fail> {
    let j: PolyformJson = read_json(path)?;
    DecoratedPolyform::from_json(&j).map_err(Fail::usage)
}

fn poly_fail(e: PolyformError) -> Fail {
    match e {
        PolyformError::ResourceLimit { .. } => Fail(UNKNOWN, e.to_string()),
        e => Fail::usage(e),
    }
}

fn poly_cmd(cmd: PolyCmd, cfg: SearchConfig) -> Out {
    match cmd {
        PolyCmd::Census { tile } => {
            let t = load_tile(&tile)?;
            let c = polyform::edge_census(&t);
            let v = polyform::census_nontiler(&t);
            print_json(&json!({"census": c, "verdict": v}));
            Ok(match v {
                CensusVerdict::NoTilingProved { .. } => NEGATIVE,
                CensusVerdict::Inconclusive => OK,
            })
        }
        PolyCmd::Corona { tile, max_level, reflections, svg } => {
            let t = load_tile(&tile)?;
            let r = polyform::corona_search(&t, max_level, reflections, cfg).map_err(poly_fail)?;
            if let Some(path) = svg {
                let groups = match &r.domain {
                    Some(d) => vec![d.copies.clone()],
                    None => r.rings.clone(),
                };
                let patch = polyform::copies_patch(t.lattice, &groups, "ring");
                write(&path, &render_svg(&patch, &SvgStyle::default()).map_err(|e| Fail(UNKNOWN, e.to_string()))?)?;
            }
            print_json(&r);
            Ok(if r.limits_hit && r.heesch != Heesch::Periodic { UNKNOWN } else { OK })
        }
        PolyCmd::Domain { tile, max_area, reflections } => {
            let t = load_tile(&tile)?;
            match polyform::fundamental_domain_search(&t, max_area, reflections, cfg).map_err(poly_fail)? {
                Some(d) => {
                    print_json(&d);
                    Ok(OK)
                }
                None => {
                    println!("no domain up to area {max_area}");
                    Ok(NEGATIVE)
                }
            }
        }
    }
}

fn render_cmd(a: RenderArgs) -> Out {
    let j: PatchJson = read_json(&a.patch)?;
    let patch: PolygonPatch<f64> = j.to_patch();
    let svg = render_svg(&patch, &SvgStyle::default()).map_err(Fail::usage)?;
    match a.out {
        Some(path) => write(&path, &svg)?,
        None => print!("{svg}"),
    }
    Ok(OK)
}

fn budget(flag: Option<u64>) -> Result<u64, Fail> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var(BUDGET_ENV) {
        Ok(v) => match v.parse::<u64>() {
            Ok(b) if b > 0 => Ok(b),
            _ => Err(Fail::usage(format!("{BUDGET_ENV}={v:?} is not a positive integer"))),
        },
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn dispatch(cli: Cli) -> Out {
    let cfg = SearchConfig::default().with_budget(budget(cli.budget)?).with_jobs(cli.jobs as usize);
    match cli.command {
        Command::Wang(c) => wang_cmd(c, cfg),
        Command::Tm(c) => tm_cmd(c, cfg),
        Command::Robinson(c) => robinson_cmd(c, cfg),
        Command::Subst(c) => subst_cmd(c, cfg),
        Command::Balance(c) => balance_cmd(c, cfg),
        Command::Poly(c) => poly_cmd(c, cfg),
        Command::Render(a) => render_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
