//! Model checking and game simulation for the probabilistic modal μ-calculus
//! with independent product and coproduct.
//!
//! * [`formula`]: syntax, parsing, normal forms, negation.
//! * [`plts`]: finite probabilistic labeled transition systems.
//! * [`denotational`]: fixed-point semantics over `[0,1]`.
//! * [`arena`]: compilation of (formula, model, environment) into a
//!   stochastic meta-parity game arena.
//! * [`game`]: strategies, Markov branching plays, cylinder probabilities and
//!   Monte Carlo estimation of game values.
//! * [`random`]: seeded generators for formulas.

pub mod arena;
pub mod denotational;
pub mod formula;
pub mod game;
mod hash;
pub mod plts;
pub mod random;

pub use arena::Arena;
pub use denotational::{eval, Env, FixpointConfig, Valuation};
pub use formula::{Formula, Label, VarName};
pub use plts::Plts;
