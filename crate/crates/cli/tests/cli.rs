use std::path::PathBuf;
use std::process::{Command, Output};

use tessella::balance;
use tessella::machine::{self, RunResult, TuringMachine};
use tessella::polyform::{self, DecoratedPolyform, PolyformJson};
use tessella::robinson;
use tessella::substitution;
use tessella::wang::{self, WangTileSet};
use tessella::SearchConfig;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn tessella(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tessella"))
        .args(args)
        .env_remove("TESSELLA_BUDGET")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf8")
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).unwrap() + "\n"
}

#[test]
fn balance_tile_octagon() {
    let o = tessella(&["balance", "tile", "--valences", "3,3,3,3,3,3,3,3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "-2/3 π");
    let lib = balance::tile_imbalance(&[3; 8]).unwrap();
    assert_eq!(stdout(&o).trim(), lib.to_string());
}

#[test]
fn tm_run_sample() {
    let o = tessella(&["tm", "run", &fixture("sample.json"), "--steps", "1000"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("running"));
    match machine::run(&TuringMachine::sample(), 1000).unwrap() {
        RunResult::Running(c) => assert_eq!(text, format!("running\n{c}\n")),
        RunResult::HaltedAt(..) => panic!("sample halts"),
    }
}

#[test]
fn tm_run_halting() {
    let o = tessella(&["tm", "run", &fixture("halt1.json"), "--steps", "10"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("halted 1\n"));
}

#[test]
fn wang_torus_mismatch_is_negative() {
    let o = tessella(&["wang", "torus", &fixture("mismatch.json"), "--size", "1x1"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn wang_torus_matches_library() {
    let o = tessella(&["wang", "torus", &fixture("dimer.json"), "--size", "2x1"]);
    assert_eq!(code(&o), 0);
    let set = WangTileSet::from_json(&std::fs::read_to_string(fixture("dimer.json")).unwrap()).unwrap();
    let p = wang::solve_torus(&set, 2, 1, SearchConfig::default()).unwrap().unwrap();
    assert_eq!(stdout(&o), pretty(&p.to_json(&set)));
}

#[test]
fn wang_decide_periodic() {
    let o = tessella(&["wang", "decide", &fixture("dimer.json"), "--max", "3"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "tiles_with_period");
}

#[test]
fn wang_decide_no_tiling() {
    let o = tessella(&["wang", "decide", &fixture("mismatch.json"), "--max", "2"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn wang_solve_rectangle() {
    let o = tessella(&["wang", "solve", &fixture("dimer.json"), "--size", "4x2"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn tm_compile_rows() {
    let o = tessella(&["tm", "compile", &fixture("sample.json"), "--rows", "4"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 4);
    assert!(!text.contains("undecodable"));
    let o = tessella(&["tm", "compile", &fixture("halt1.json"), "--rows", "2"]);
    assert_eq!(code(&o), 1);
    let o = tessella(&["tm", "compile", &fixture("halt1.json")]);
    assert_eq!(code(&o), 0);
    let set = WangTileSet::from_json(&stdout(&o)).unwrap();
    assert_eq!(set.len(), machine::compiled_size(1));
}

#[test]
fn robinson_force_and_check() {
    let o = tessella(&["robinson", "force"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("4 completions"));
    let o = tessella(&["robinson", "force", "--no-cornered"]);
    assert_eq!(code(&o), 1);

    let o = tessella(&["robinson", "block", "--level", "2", "--elbows", "sw,ne"]);
    assert_eq!(code(&o), 0);
    let lib = robinson::generate_block(2, &[robinson::Elbow::SW, robinson::Elbow::NE]).unwrap();
    assert_eq!(stdout(&o), pretty(&lib.to_json()));
    let path = tmp("block2.json");
    std::fs::write(&path, stdout(&o)).unwrap();
    let o = tessella(&["robinson", "check", path.to_str().unwrap()]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "valid"));
}

#[test]
fn robinson_block_svg() {
    let path = tmp("block1.svg");
    let o = tessella(&["robinson", "block", "--level", "1", "--text", "--svg", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 3);
    assert!(std::fs::read_to_string(&path).unwrap().contains("<svg"));
}

#[test]
fn subst_census_matches_library() {
    for name in ["chair", "sphinx", "penrose"] {
        let o = tessella(&["subst", "expand", name, "--levels", "3", "--census"]);
        assert_eq!(code(&o), 0, "{name}");
        let s = substitution::system_by_name(name).unwrap();
        let seed = s.prototile_names()[0].clone();
        let patch = s.expand_plane(&seed, 3, 1).unwrap();
        assert_eq!(stdout(&o), pretty(&s.census(&patch).unwrap()), "{name}");
    }
}

#[test]
fn subst_validate_all_shipped() {
    for name in substitution::SYSTEM_NAMES {
        let o = tessella(&["subst", "validate", name]);
        assert_eq!(code(&o), 0, "{name}: {}", stdout(&o));
    }
    let o = tessella(&["subst", "validate", "nonesuch"]);
    assert_eq!(code(&o), 64);
}

#[test]
fn subst_json_system_roundtrip() {
    let s = substitution::system_by_name("chair").unwrap();
    let path = tmp("chair_system.json");
    std::fs::write(&path, serde_json::to_string(&s.to_json()).unwrap()).unwrap();
    let a = tessella(&["subst", "expand", path.to_str().unwrap(), "--levels", "2", "--census"]);
    let b = tessella(&["subst", "expand", "chair", "--levels", "2", "--census"]);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn balance_lemma_and_series() {
    let o = tessella(&["balance", "lemma", "octagon-square"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("v=91 e=125 f=35 euler=1\n"), "{text}");
    assert!(text.contains("equal: true"));

    let o = tessella(&["balance", "series", "--tessellation", "octagon-square", "--radii", "5,10"]);
    assert_eq!(code(&o), 0);
    let lib = balance::average_imbalance_series(balance::Tessellation::OctagonSquare, &[5.0, 10.0], 1).unwrap();
    let want: String = lib
        .iter()
        .map(|e| format!("r={} N={} K={} |K|/N={:.6}\n", e.radius, e.tiles, e.imbalance, e.ratio))
        .collect();
    assert_eq!(stdout(&o), want);

    let o = tessella(&["balance", "classify", "--n", "4", "--q", "4"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "flat 0"));
}

#[test]
fn poly_commands() {
    let o = tessella(&["poly", "census", &fixture("mann.json")]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let j: PolyformJson = serde_json::from_str(&std::fs::read_to_string(fixture("mann.json")).unwrap()).unwrap();
    let t = DecoratedPolyform::from_json(&j).unwrap();
    assert_eq!(v["verdict"], serde_json::to_value(polyform::census_nontiler(&t)).unwrap());

    let o = tessella(&["poly", "census", &fixture("rows_hex.json")]);
    assert_eq!(code(&o), 0);

    let o = tessella(&["poly", "domain", &fixture("domino.json")]);
    assert_eq!(code(&o), 0);

    let o = tessella(&["poly", "corona", &fixture("rows_hex.json")]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["heesch"], "periodic");
}

#[test]
fn render_writes_svg() {
    let s = substitution::system_by_name("chair").unwrap();
    let patch = s.expand_plane("chair", 1, 1).unwrap();
    let path = tmp("chair1.json");
    std::fs::write(&path, serde_json::to_string(&patch.to_json()).unwrap()).unwrap();
    let out = tmp("chair1.svg");
    let o = tessella(&["render", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let svg = std::fs::read_to_string(out).unwrap();
    assert_eq!(svg.matches("<path").count(), 4);
}

#[test]
fn malformed_json_reports_position() {
    let o = tessella(&["tm", "run", &fixture("broken.json"), "--steps", "1"]);
    assert_eq!(code(&o), 64);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line") && err.contains("column"), "{err}");
}

#[test]
fn usage_errors() {
    for args in [
        &["frobnicate"][..],
        &["wang", "torus", "x.json", "--size", "0x1"],
        &["balance", "tile", "--valences", "3", "--bogus"],
        &["--jobs", "0", "balance", "tile", "--valences", "3"],
        &["wang", "torus", "/nonexistent.json", "--size", "1x1"],
    ] {
        assert_eq!(code(&tessella(args)), 64, "{args:?}");
    }
}

#[test]
fn budget_limit_is_unknown() {
    let o = tessella(&["--budget", "1", "robinson", "force"]);
    assert_eq!(code(&o), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_tessella"))
        .args(["robinson", "force"])
        .env("TESSELLA_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn help_on_every_subcommand() {
    let paths: &[&[&str]] = &[
        &[],
        &["wang"], &["wang", "solve"], &["wang", "torus"], &["wang", "decide"],
        &["tm"], &["tm", "run"], &["tm", "compile"],
        &["robinson"], &["robinson", "block"], &["robinson", "force"], &["robinson", "check"],
        &["subst"], &["subst", "expand"], &["subst", "validate"],
        &["balance"], &["balance", "tile"], &["balance", "lemma"], &["balance", "series"], &["balance", "classify"],
        &["poly"], &["poly", "census"], &["poly", "corona"], &["poly", "domain"],
        &["render"],
    ];
    for p in paths {
        let mut args = p.to_vec();
        args.push("--help");
        let o = tessella(&args);
        assert_eq!(code(&o), 0, "{p:?}");
        assert!(stdout(&o).contains("Usage:"), "{p:?}");
    }
}

#[test]
fn output_independent_of_jobs() {
    let mann = fixture("mann.json");
    let rows = fixture("rows_hex.json");
    let domino = fixture("domino.json");
    let dimer = fixture("dimer.json");
    let sample = fixture("sample.json");
    let cases: &[&[&str]] = &[
        &["robinson", "force"],
        &["subst", "expand", "pinwheel", "--levels", "3"],
        &["subst", "expand", "gold", "--levels", "4"],
        &["balance", "series", "--tessellation", "octagon-square", "--radii", "5,10,20"],
        &["poly", "corona", &rows],
        &["poly", "corona", &mann, "--max-level", "1"],
        &["poly", "domain", &domino],
        &["wang", "decide", &dimer, "--max", "4"],
        &["tm", "compile", &sample, "--rows", "6"],
    ];
    for c in cases {
        let mut one = vec!["--jobs", "1"];
        one.extend_from_slice(c);
        let mut eight = vec!["--jobs", "8"];
        eight.extend_from_slice(c);
        let (a, b) = (tessella(&one), tessella(&eight));
        assert_eq!(code(&a), code(&b), "{c:?}");
        assert_eq!(a.stdout, b.stdout, "{c:?}");
    }
}
