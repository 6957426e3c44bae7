//! The two small games shipped with the crate.
//!
//! `hand`: an observer (`obs`) watches an opponent (`opp`) who is either
//! `lefty` or `righty`. Both can `serve`; only a lefty can `swingL` (to `s1`,
//! labeled `leftHit`) and only a righty can `swingR` (to `s2`, `rightHit`).
//!
//! `mix`: as `hand`, but the opponent may swing either way again from `s1`,
//! so a left swing followed by a right swing is compatible with no capacity.

use crate::gamespec::load_game;
use crate::model::GameStructure;

pub const HAND_GAME: &str = include_str!("../fixtures/hand.game");
pub const MIX_GAME: &str = include_str!("../fixtures/mix.game");

pub fn hand() -> GameStructure {
    load_game(HAND_GAME).expect("hand fixture is valid")
}

pub fn mix() -> GameStructure {
    load_game(MIX_GAME).expect("mix fixture is valid")
}
