//! Script front end for the eqcad solver: an SMT-LIB style parser, the
//! script driver, and the operator bench.

pub mod bench;
pub mod gen;
pub mod parse;
pub mod run;
pub mod script;

pub use parse::{parse, ParseError};
pub use run::{run, run_text, Mode, RunOptions};
pub use script::Script;
