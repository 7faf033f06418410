use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("weight at index {0} is zero")]
    ZeroWeight(i64),
    #[error("{0} tail is empty")]
    EmptyTail(&'static str),
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("weights are not of class C (found {0})")]
    NotClassC(String),
    #[error("classification is on the boundary: {0}")]
    Boundary(String),
    #[error("no hyperbolic splitting exists (class {0})")]
    NoSplitting(String),
    #[error("trajectory needs at least two points, found {0}")]
    TooShort(usize),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("trajectory window must {0}")]
    BadWindow(String),
    #[error("perturbation exceeds budget: {bound} > {budget}")]
    BudgetExceeded { bound: f64, budget: f64 },
    #[error("iteration did not converge: {0}")]
    NonConvergence(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
