use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("polynomials live in different rings ({left} vs {right} variables)")]
    SymbolMismatch { left: usize, right: usize },
    #[error("variable {0} does not occur in either polynomial")]
    VariableAbsent(usize),
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("relations are inconsistent: {0}")]
    InconsistentRelations(String),
    #[error("cannot parse polynomial at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}
