//! Cylindrical algebraic decomposition over exact rational arithmetic, with
//! a reduced projection operator for problems that carry equational
//! constraints and incremental add/remove of constraints.

pub mod engine;
pub mod error;
pub mod formula;
pub mod lifting;
pub mod poly;
pub mod projection;
pub mod realalg;

pub use error::PolyError;
pub use poly::{Polynomial, Rational, Variable};
