//! Bundled example games.

use crate::error::{Error, Result};
use crate::format::game_from_json;
use crate::game::Game;

pub const GAMMA1_JSON: &str = include_str!("../corpus/gamma1.json");
pub const PSI_JSON: &str = include_str!("../corpus/psi.json");
pub const PHI_JSON: &str = include_str!("../corpus/phi.json");

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 4] = ["gamma1", "psi", "gamma2c", "phi"];

/// Two-by-two game in which both players get 1 at (a1, b1) and 0 elsewhere.
pub fn gamma1() -> Game {
    game_from_json(GAMMA1_JSON).expect("bundled game is valid")
}

/// Two-by-two game where b1 strictly dominates b2 and a1 weakly dominates a2.
pub fn psi() -> Game {
    game_from_json(PSI_JSON).expect("bundled game is valid")
}

/// Bidding game between players U and T with bids 10, 15 and 20.
pub fn phi() -> Game {
    game_from_json(PHI_JSON).expect("bundled game is valid")
}

/// Three-by-three extension of [`gamma1`] by a weakly dominated third
/// action per player, parameterized by `c = (c1, c2)` with both positive.
pub fn gamma2c(c1: f64, c2: f64) -> Result<Game> {
    if !(c1 > 0.0 && c2 > 0.0 && c1.is_finite() && c2.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "gamma2c needs positive finite c, got ({}, {})",
            c1, c2
        )));
    }
    let low = (-7.0 - c1, -7.0 - c2);
    let table = [
        [(1.0, 1.0), (0.0, 0.0), low],
        [(0.0, 0.0), (0.0, 0.0), (-7.0, -7.0)],
        [low, (-7.0, -7.0), (-7.0, -7.0)],
    ];
    Game::from_fn(
        vec!["P1".into(), "P2".into()],
        vec![
            vec!["a1".into(), "a2".into(), "a3".into()],
            vec!["b1".into(), "b2".into(), "b3".into()],
        ],
        |p| {
            let (x, y) = table[p[0]][p[1]];
            vec![x, y]
        },
    )
}

/// Looks up a corpus game by name; `c` is used only by `gamma2c`.
pub fn by_name(name: &str, c: (f64, f64)) -> Result<Game> {
    match name {
        "gamma1" => Ok(gamma1()),
        "psi" => Ok(psi()),
        "phi" => Ok(phi()),
        "gamma2c" => gamma2c(c.0, c.1),
        _ => Err(Error::InvalidArgument(format!(
            "unknown corpus game {:?} (known: {})",
            name,
            NAMES.join(", ")
        ))),
    }
}

/// One-line description of each corpus game.
pub fn describe(name: &str) -> Option<&'static str> {
    match name {
        "gamma1" => Some("2x2 game with equilibria (a1,b1) and (a2,b2)"),
        "psi" => Some("2x2 game with a continuum of equilibria where P2 plays b1"),
        "gamma2c" => Some("3x3 game parameterized by --c1 and --c2"),
        "phi" => Some("3x3 bidding game between U and T"),
        _ => None,
    }
}
