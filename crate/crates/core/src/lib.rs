//! Finite normal-form games with tools for equilibrium refinement:
//! Nash enumeration, perfect and proper checks, payoff-monotonicity tests,
//! quantal response equilibria, spline control-cost games and empirical
//! equilibrium membership.

pub mod ccost;
pub mod corpus;
pub mod empirical;
pub mod error;
pub mod format;
pub mod game;
pub mod monotone;
pub mod nash;
pub mod orders;
pub mod qre;
pub mod refine;

mod lp;
mod search;

pub use error::{Error, Result};
pub use game::{
    best_responses, expected_utility, nash_defect, weak_dominance, Dominance, DominanceReport,
    Game, MixedProfile,
};
