use thiserror::Error;

use crate::poly::Variable;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("polynomial has degree 0 in {var}")]
    DegenerateDegree { var: Variable },
    #[error("polynomial has degree {degree} in {var}, need at least 2")]
    DegreeTooLow { var: Variable, degree: usize },
    #[error("parse error at offset {position}: expected {expected}")]
    Parse { position: usize, expected: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
}
