use thiserror::Error;

/// Failures of the symbolic core.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("index `{index}` occurs {count} times in term `{term}`")]
    IndexArity {
        index: String,
        count: usize,
        term: String,
    },
    #[error("coefficient `{0}` is not invertible")]
    NotInvertible(String),
    #[error("a term may carry at most one loop integral: `{0}`")]
    DoubleIntegral(String),
    #[error("cannot evaluate `{0}` numerically")]
    NotNumeric(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiracError {
    #[error("gamma5 trace requested at symbolic dimension d; only four-dimensional gamma5 traces are supported")]
    Gamma5AtSymbolicDimension,
    #[error("unknown slot `{0}`")]
    UnknownSlot(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoopError {
    #[error("tensor reduction of numerator rank {0} is not supported")]
    UnsupportedReduction(usize),
    #[error("integral not in table: {0}")]
    NotInTable(String),
    #[error("only integrals at vanishing external momentum can be evaluated")]
    NonZeroExternalMomentum,
    #[error("term carries no loop integral: `{0}`")]
    MissingIntegral(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("invalid model: {0}")]
    Model(String),
    #[error("renormalization incomplete; unabsorbed divergent terms:\n  {}", .0.join("\n  "))]
    RenormalizationIncomplete(Vec<String>),
    #[error("action is not reducible as a BF theory: {0}")]
    NotReducible(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unexpected tensor structure in action term `{0}`")]
    Structure(String),
    #[error(transparent)]
    Dirac(#[from] DiracError),
    #[error(transparent)]
    Loop(#[from] LoopError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Dirac(#[from] DiracError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
