use proptest::prelude::*;

use tessella::balance::{self, Curvature, Tessellation, ValenceMode};
use tessella::geometry::{solve_livio_pentagon, validate_patch, Isometry, Point, PolygonPatch};
use tessella::machine::{self, RunResult, TuringMachine};
use tessella::polyform::{self, CensusVerdict, Dec, DecoratedPolyform, Heesch, Lattice};
use tessella::robinson::{self, Elbow};
use tessella::substitution;
use tessella::wang::{self, WangTile, WangTileSet};
use tessella::{PiAngle, SearchConfig};

fn cfg() -> SearchConfig {
    SearchConfig::default()
}

fn wang_set() -> impl Strategy<Value = WangTileSet> {
    let colour = prop_oneof![Just("a"), Just("b"), Just("c")];
    proptest::collection::vec([colour.clone(), colour.clone(), colour.clone(), colour], 1..5).prop_map(|tiles| {
        let tiles = tiles.iter().enumerate().map(|(i, [n, e, s, w])| WangTile::new(&format!("t{i}"), n, e, s, w)).collect();
        WangTileSet::new(tiles).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wang_torus_extends_to_the_plane(set in wang_set(), w in 1usize..4, h in 1usize..4) {
        if let Some(t) = wang::solve_torus(&set, w, h, cfg()).unwrap() {
            prop_assert!(wang::check_placement(&set, &t, true).is_ok());
            let ext = t.periodic_extension(2 * w + 1, 2 * h + 1);
            prop_assert!(wang::check_placement(&set, &ext, false).is_ok());
            let r = wang::solve_rectangle(&set, 2 * w + 1, 2 * h + 1, None, cfg()).unwrap();
            prop_assert!(r.is_some_and(|r| wang::check_placement(&set, &r, false).is_ok()));
        }
    }

    #[test]
    fn wang_no_square_means_no_larger_rectangle(set in wang_set(), n in 1usize..4) {
        let sq = wang::solve_rectangle(&set, n, n, None, cfg()).unwrap();
        match sq {
            Some(p) => prop_assert!(wang::check_placement(&set, &p, false).is_ok()),
            None => {
                for (w, h) in [(n + 1, n), (n, n + 1), (n + 1, n + 1)] {
                    prop_assert!(wang::solve_rectangle(&set, w, h, None, cfg()).unwrap().is_none());
                }
            }
        }
    }

    #[test]
    fn wang_results_ignore_worker_count(set in wang_set()) {
        let one = wang::enumerate_rectangle(&set, 3, 2, None, cfg()).unwrap();
        let many = wang::enumerate_rectangle(&set, 3, 2, None, cfg().with_jobs(4)).unwrap();
        prop_assert_eq!(&one, &many);
        for p in &one {
            prop_assert!(wang::check_placement(&set, p, false).is_ok());
        }
        let a = wang::decide_up_to(&set, 3, cfg()).unwrap();
        let b = wang::decide_up_to(&set, 3, cfg().with_jobs(4)).unwrap();
        prop_assert_eq!(a, b);
    }
}

fn entry() -> impl Strategy<Value = String> {
    (0u8..2, prop_oneof![Just('L'), Just('R')], prop_oneof![Just("A"), Just("B"), Just("H")])
        .prop_map(|(w, m, q)| format!("{w}{m}{q}"))
}

fn small_machine() -> impl Strategy<Value = TuringMachine> {
    proptest::collection::vec(entry(), 4).prop_map(|e| {
        TuringMachine::new(&["A", "B"], "H", &[("A", 0, &e[0]), ("A", 1, &e[1]), ("B", 0, &e[2]), ("B", 1, &e[3])]).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn compiled_rows_follow_the_machine(m in small_machine(), n in 1usize..8) {
        let c = machine::compile(&m);
        prop_assert_eq!(c.tileset.len(), machine::compiled_size(2));
        let runs = match machine::run(&m, n as u64).unwrap() {
            RunResult::Running(_) => true,
            RunResult::HaltedAt(t, _) => t as usize >= n,
        };
        let p = c.complete(n, cfg()).unwrap();
        prop_assert_eq!(p.is_some(), runs);
        if let Some(p) = p {
            let tr = machine::trace(&m, n as u64).unwrap();
            for (r, conf) in tr.iter().enumerate().take(n + 1) {
                let row = c.decode_row(&p, r).unwrap();
                prop_assert_eq!(row.heads_seen, 1);
                prop_assert!(row.matches(conf));
            }
        }
    }
}

fn elbow() -> impl Strategy<Value = Elbow> {
    prop_oneof![Just(Elbow::NE), Just(Elbow::NW), Just(Elbow::SE), Just(Elbow::SW)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn robinson_quadrants_are_blocks(k in 2u32..5, choices in proptest::collection::vec(elbow(), 4)) {
        let choices = &choices[..k as usize];
        let b = robinson::generate_block(k, choices).unwrap();
        let side = robinson::block_side(k - 1);
        let half = side + 1;
        for (qx, qy, inward) in [(0, 0, Elbow::NE), (half, 0, Elbow::NW), (0, half, Elbow::SE), (half, half, Elbow::SW)] {
            let mut sub_choices = choices[..k as usize - 1].to_vec();
            *sub_choices.last_mut().unwrap() = inward;
            let sub = robinson::generate_block(k - 1, &sub_choices).unwrap();
            prop_assert_eq!(b.sub(qx, qy, side, side), sub);
        }
    }

    #[test]
    fn robinson_corner_rule(k in 1u32..5, choices in proptest::collection::vec(elbow(), 4)) {
        let b = robinson::generate_block(k, &choices[..k as usize]).unwrap();
        prop_assert!(robinson::validate(&b).is_ok());
        for y in 0..b.height - 1 {
            for x in 0..b.width - 1 {
                let n = [(0, 0), (1, 0), (0, 1), (1, 1)].iter().filter(|(dx, dy)| b.tile(x + dx, y + dy).is_cornered()).count();
                prop_assert_eq!(n, 1);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn substitution_area_scales(i in 0usize..8, n in 0u32..4) {
        let s = substitution::system_by_name(substitution::SYSTEM_NAMES[i]).unwrap();
        for seed in s.prototile_names() {
            let base = s.expand_plane(&seed, 0, 1).unwrap().total_area();
            let area = s.expand_plane(&seed, n, 1).unwrap().total_area();
            let want = base * s.scale().powi(2 * n as i32);
            prop_assert!((area / want - 1.0).abs() < 1e-6, "{} {seed} n={n}: {area} vs {want}", s.name());
        }
    }

    #[test]
    fn validation_ignores_order_and_isometry(
        i in 0usize..8,
        perm_seed in any::<u64>(),
        deg in 0.0f64..360.0,
        tx in -10.0f64..10.0,
        ty in -10.0f64..10.0,
        reflected in any::<bool>(),
        nudge in any::<bool>(),
    ) {
        let s = substitution::system_by_name(substitution::SYSTEM_NAMES[i]).unwrap();
        let seed = s.prototile_names()[0].clone();
        let mut patch = s.expand_plane(&seed, 2, 1).unwrap();
        if nudge {
            let shift = tessella::geometry::Affine::translation(0.3, 0.1);
            patch.tiles[0].polygon = patch.tiles[0].polygon.transformed(&shift);
        }
        let base = validate_patch(&patch, 1e-9).unwrap();
        let mut shuffled = patch.clone();
        let len = shuffled.tiles.len();
        for k in (1..len).rev() {
            let j = (perm_seed.wrapping_mul(6364136223846793005).wrapping_add(k as u64) % (k as u64 + 1)) as usize;
            shuffled.tiles.swap(k, j);
        }
        let moved: PolygonPatch<f64> = shuffled.transformed(&Isometry::degrees(deg, [tx, ty], reflected).to_affine());
        let other = validate_patch(&moved, 1e-9).unwrap();
        prop_assert_eq!(base.is_valid(), other.is_valid());
        prop_assert_eq!(base.is_valid(), !nudge);
        prop_assert_eq!(std::mem::discriminant(&base), std::mem::discriminant(&other));
    }
}

#[test]
fn livio_reruns_agree() {
    let a = solve_livio_pentagon(1e-9).unwrap();
    let b = solve_livio_pentagon(1e-9).unwrap();
    for k in 0..5 {
        assert!((a.angles[k] - b.angles[k]).abs() < 1e-9);
    }
}

fn tessellation() -> impl Strategy<Value = Tessellation> {
    prop_oneof![Just(Tessellation::Square), Just(Tessellation::Hexagon), Just(Tessellation::OctagonSquare)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn disk_configurations_balance(t in tessellation(), x in -8.0f64..8.0, y in -8.0f64..8.0, r in 0.0f64..6.0) {
        let (c, _) = balance::configuration_in_disk(t, Point::new(x, y), r).unwrap();
        prop_assert_eq!(c.euler(), 1);
        for mode in [ValenceMode::Ambient, ValenceMode::Patch] {
            let rep = balance::verify_lemma(&c, mode).unwrap();
            prop_assert!(rep.equal);
            prop_assert!(rep.bound_ok);
        }
    }

    #[test]
    fn flat_exactly_when_euclidean(n in 3u32..13, q in 3u32..13) {
        let (c, k) = balance::classify_vertex_uniform(n, q).unwrap();
        prop_assert_eq!(c == Curvature::Flat, (n - 2) * (q - 2) == 4);
        prop_assert_eq!(c == Curvature::Flat, k.is_zero());
    }

    #[test]
    fn copies_of_a_turn_fraction_sum_exactly(n in 1i64..50, q in 1i64..50) {
        let sum: PiAngle = (0..n).map(|_| PiAngle::full_turn_over(q)).sum();
        prop_assert_eq!(sum, PiAngle::new(2 * n, q));
    }
}

fn decorated() -> impl Strategy<Value = DecoratedPolyform> {
    let lattice = prop_oneof![Just(Lattice::Square), Just(Lattice::Hex)];
    (lattice, proptest::collection::vec(0u8..6, 0..3), proptest::collection::vec(0u8..3, 24)).prop_map(|(lat, steps, decs)| {
        let mut cells = vec![(0i64, 0i64)];
        for s in steps {
            let from = *cells.last().unwrap();
            let next = lat.step(from, s % lat.n_dirs());
            if !cells.contains(&next) {
                cells.push(next);
            }
        }
        let bare = DecoratedPolyform::new(lat, &cells, &[]).unwrap();
        let edges: Vec<_> = bare
            .boundary_edges()
            .into_iter()
            .zip(decs)
            .map(|((c, d), k)| (c, d, [Dec::Flat, Dec::In, Dec::Out][k as usize]))
            .collect();
        DecoratedPolyform::new(lat, &cells, &edges).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn census_proof_excludes_periodic_domain(t in decorated()) {
        let proved = matches!(polyform::census_nontiler(&t), CensusVerdict::NoTilingProved { .. });
        let domain = polyform::fundamental_domain_search(&t, 8, true, cfg()).unwrap();
        if let Some(d) = &domain {
            prop_assert!(polyform::domain_is_valid(&t, d));
        }
        prop_assert!(!(proved && domain.is_some()));
    }

    #[test]
    fn corona_witnesses_nest(t in decorated()) {
        let r = polyform::corona_search(&t, 2, false, cfg().with_budget(200_000)).unwrap();
        if r.heesch == Heesch::Periodic {
            let d = r.domain.as_ref().unwrap();
            prop_assert!(polyform::domain_is_valid(&t, d));
        } else {
            for level in 0..r.rings.len() {
                let w = r.witness(level).unwrap();
                prop_assert!(polyform::corona_is_valid(&t, w));
                if level > 0 {
                    prop_assert_eq!(r.witness(level - 1).unwrap(), &w[..level]);
                }
            }
        }
    }
}

#[test]
fn balanced_edges_never_prove() {
    let t = DecoratedPolyform::new(Lattice::Square, &[(0, 0)], &[((0, 0), 0, Dec::In), ((0, 0), 2, Dec::Out)]).unwrap();
    assert_eq!(polyform::census_nontiler(&t), CensusVerdict::Inconclusive);
}
