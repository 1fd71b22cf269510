use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid domain: {0}")]
    Validation(String),
    #[error("point {0} lies outside the domain")]
    OutsideDomain(String),
    #[error("more than {0} shortest paths")]
    PathExplosion(usize),
    #[error("solver did not converge: {0}")]
    NoConvergence(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("no canonical relabeling: {0}")]
    NotCanonical(String),
    #[error("degenerate farthest point: {0}")]
    DegenerateFarthest(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("domain not in general position ({0} violations); use force to override")]
    GeneralPositionViolated(usize),
    #[error("combinatorial budget of {0} tuples exceeded")]
    CombinatorialBudgetExceeded(u64),
    #[error("no progress after {0} iterations")]
    NoProgress(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
