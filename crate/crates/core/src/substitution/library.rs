//! Shipped rules.
//!
//! Chair, dimer, half-hex and sphinx are exact. The last two live on the
//! triangular lattice, in coordinates `(a, b) ↦ a·(1,0) + b·(½, √3/2)`,
//! where their rules become rational. The rest are in floating point.

use super::{AnySystem, Child, Prototile, SubstitutionError, SubstitutionSystem};
use crate::geometry::{Affine, Isometry, Point, Polygon};
use crate::Rational;

pub const SYSTEM_NAMES: [&str; 8] = ["chair", "dimer", "halfhex", "sphinx", "pinwheel", "gold", "silver", "penrose"];

pub fn library() -> Vec<AnySystem> {
    SYSTEM_NAMES.iter().map(|n| system_by_name(n).expect("shipped")).collect()
}

pub fn system_by_name(name: &str) -> Result<AnySystem, SubstitutionError> {
    Ok(match name {
        "chair" => AnySystem::Exact(chair()),
        "dimer" => AnySystem::Exact(dimer()),
        "halfhex" => AnySystem::Exact(halfhex()),
        "sphinx" => AnySystem::Exact(sphinx()),
        "pinwheel" => AnySystem::Float(pinwheel()),
        "gold" => AnySystem::Float(gold()),
        "silver" => AnySystem::Float(silver()),
        "penrose" => AnySystem::Float(penrose()),
        _ => return Err(SubstitutionError::UnknownSystem(name.into())),
    })
}

fn q(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// Child placed by `x ↦ lin·x + t` inside the parent inflated by 2.
fn square_child(tile: usize, lin: Affine<Rational>, t: (i64, i64)) -> Child<Rational> {
    let half = Affine::scale(Rational::new(1, 2));
    Child { tile, map: half.compose(&lin.then_translate(q(t.0), q(t.1))) }
}

fn exact_system(name: &str, tiles: Vec<(&str, &[(i64, i64)])>, rules: Vec<Vec<Child<Rational>>>, frame: Affine<f64>) -> SubstitutionSystem<Rational> {
    SubstitutionSystem {
        name: name.into(),
        prototiles: tiles.into_iter().map(|(n, v)| Prototile { name: n.into(), polygon: Polygon::from_ints(v) }).collect(),
        scale: 2.0,
        inflation: Affine::scale(q(2)),
        rules,
        frame,
    }
}

pub fn chair() -> SubstitutionSystem<Rational> {
    let r = Affine::quarter_turns;
    let f = Affine::flip_y;
    let rule = vec![
        square_child(0, r(0), (0, 0)),
        square_child(0, r(1), (4, 0)),
        square_child(0, r(0), (1, 1)),
        square_child(0, f(), (0, 4)),
    ];
    exact_system("chair", vec![("chair", &[(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])], vec![rule], Affine::identity())
}

pub fn dimer() -> SubstitutionSystem<Rational> {
    let r = Affine::quarter_turns;
    let rule = vec![
        square_child(0, r(0), (0, 0)),
        square_child(0, r(0), (0, 1)),
        square_child(0, r(1), (3, 0)),
        square_child(0, r(1), (4, 0)),
    ];
    exact_system("dimer", vec![("dimer", &[(0, 0), (2, 0), (2, 1), (0, 1)])], vec![rule], Affine::identity())
}

fn lattice_frame() -> Affine<f64> {
    Affine::linear(1.0, 0.5, 0.0, 3f64.sqrt() / 2.0)
}

/// Rotation by `k·60°` in lattice coordinates, optionally after the
/// reflection `y ↦ −y`.
fn hex_turn(k: u32, reflect: bool) -> Affine<Rational> {
    let r60 = Affine::linear(q(0), q(-1), q(1), q(1));
    let mut a = if reflect { Affine::linear(q(1), q(1), q(0), q(-1)) } else { Affine::identity() };
    for _ in 0..k % 6 {
        a = r60.compose(&a);
    }
    a
}

pub fn halfhex() -> SubstitutionSystem<Rational> {
    let rule = vec![
        square_child(0, hex_turn(1, true), (0, 0)),
        square_child(0, hex_turn(0, false), (1, 0)),
        square_child(0, hex_turn(2, false), (4, 0)),
        square_child(0, hex_turn(0, true), (0, 2)),
    ];
    exact_system("halfhex", vec![("halfhex", &[(0, 0), (2, 0), (1, 1), (0, 1)])], vec![rule], lattice_frame())
}

pub fn sphinx() -> SubstitutionSystem<Rational> {
    let rule = vec![
        square_child(0, hex_turn(3, true), (3, 0)),
        square_child(0, hex_turn(0, true), (1, 2)),
        square_child(0, hex_turn(3, true), (6, 0)),
        square_child(0, hex_turn(4, false), (0, 4)),
    ];
    exact_system("sphinx", vec![("sphinx", &[(0, 0), (3, 0), (2, 1), (1, 1), (0, 2)])], vec![rule], lattice_frame())
}

type FloatChild = (usize, f64, bool, [f64; 2]);

fn float_system(name: &str, scale: f64, inflation: Affine<f64>, tiles: Vec<(&str, Vec<[f64; 2]>)>, rules: Vec<Vec<FloatChild>>) -> SubstitutionSystem<f64> {
    let inv = inflation.inverse().expect("invertible inflation");
    SubstitutionSystem {
        name: name.into(),
        prototiles: tiles
            .into_iter()
            .map(|(n, v)| Prototile { name: n.into(), polygon: Polygon::new(v.into_iter().map(|p| Point::new(p[0], p[1])).collect()) })
            .collect(),
        scale,
        inflation,
        rules: rules
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|(tile, deg, refl, t)| Child { tile, map: inv.compose(&Isometry::degrees(deg, t, refl).to_affine()) })
                    .collect()
            })
            .collect(),
        frame: Affine::identity(),
    }
}

/// Isosceles triangle with the given apex angle (degrees) and legs,
/// base on the x axis from the origin.
fn tri_apex(apex: f64, leg: f64) -> Vec<[f64; 2]> {
    let h = (apex / 2.0).to_radians();
    let b = 2.0 * leg * h.sin();
    vec![[0.0, 0.0], [b, 0.0], [b / 2.0, leg * h.cos()]]
}

/// Conway's pinwheel: the 1-2-√5 right triangle, inflated by a √5
/// similarity that also rotates.
pub fn pinwheel() -> SubstitutionSystem<f64> {
    let s = Affine::linear(2.0, -1.0, 1.0, 2.0);
    let rule = vec![
        (0, 0.0, true, [0.0, 1.0]),
        (0, 270.0, true, [0.0, 2.0]),
        (0, 0.0, false, [0.0, 1.0]),
        (0, 0.0, true, [2.0, 2.0]),
        (0, 180.0, false, [2.0, 2.0]),
    ];
    float_system("pinwheel", 5f64.sqrt(), s, vec![("pinwheel", vec![[0.0, 0.0], [2.0, 0.0], [0.0, 1.0]])], vec![rule])
}

const PHI: f64 = 1.618_033_988_749_895;

/// Golden triangles: the 36° triangle with legs φ and the 108° gnomon
/// with legs 1, both with a side of length 1 in common.
pub fn gold() -> SubstitutionSystem<f64> {
    let top = [72f64.to_radians().cos(), 72f64.to_radians().sin()];
    let acute = vec![(0, 72.0, true, [0.0, 0.0]), (0, 36.0, true, top), (1, 72.0, true, top)];
    let gnomon = vec![(0, 108.0, false, [PHI, 0.0]), (1, 144.0, false, [PHI + 1.0, 0.0])];
    float_system("gold", PHI, Affine::scale(PHI), vec![("acute", tri_apex(36.0, PHI)), ("gnomon", tri_apex(108.0, 1.0))], vec![acute, gnomon])
}

/// Silver pair: the right isosceles triangle with unit legs and the 45°
/// rhomb with unit sides, inflated by 1 + √2.
pub fn silver() -> SubstitutionSystem<f64> {
    let r2 = 2f64.sqrt();
    let s = 1.0 / r2;
    let lambda = 1.0 + r2;
    let t = vec![
        (0, 0.0, false, [0.0, 0.0]),
        (1, 0.0, true, [s, s]),
        (0, 135.0, false, [2.0 + r2, 0.0]),
        (1, 90.0, false, [lambda, 0.0]),
        (0, 45.0, true, [s, s]),
    ];
    let r = vec![
        (0, 0.0, false, [0.0, 0.0]),
        (1, 0.0, true, [s, s]),
        (0, 45.0, false, [lambda, 0.0]),
        (1, 90.0, false, [lambda, 0.0]),
        (0, 45.0, true, [s, s]),
        (0, 0.0, true, [1.0 + s, 1.0 + s]),
        (1, 0.0, false, [lambda, 1.0]),
    ];
    float_system(
        "silver",
        lambda,
        Affine::scale(lambda),
        vec![("triangle", vec![[0.0, 0.0], [r2, 0.0], [s, s]]), ("rhomb", vec![[0.0, 0.0], [1.0, 0.0], [1.0 + s, s], [s, s]])],
        vec![t, r],
    )
}

/// Penrose rhombs, each cut along a diagonal into two mirror halves with
/// unit legs: the thin half has a 36° apex, the fat half 108°.
pub fn penrose() -> SubstitutionSystem<f64> {
    let (c36, s36) = (36f64.to_radians().cos(), 36f64.to_radians().sin());
    let thin = vec![(0, 72.0, true, [0.0, 0.0]), (1, 108.0, false, [1.0, 0.0])];
    let fat = vec![(1, 0.0, false, [0.0, 0.0]), (0, 36.0, true, [c36, s36]), (1, 144.0, false, [PHI + 1.0, 0.0])];
    float_system("penrose", PHI, Affine::scale(PHI), vec![("thin", tri_apex(36.0, 1.0)), ("fat", tri_apex(108.0, 1.0))], vec![thin, fat])
}
