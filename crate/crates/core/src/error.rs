use thiserror::Error;

/// Every failure the library reports.
///
/// The variants are grouped by [`ErrorClass`], which the command-line front
/// end maps onto its exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("gamma pole at non-positive integer {0}")]
    Pole(String),
    #[error("argument {0} lies on the branch cut [1, inf)")]
    CutPoint(String),
    #[error("degree violation in f_{k}: degree {found} exceeds {allowed}")]
    Degree { k: usize, found: usize, allowed: usize },
    #[error("repeated characteristic root: |lambda_{0} - lambda_{1}| below tolerance")]
    RepeatedRoot(usize, usize),
    #[error("vanishing denominator in the exponent formula for root {0}")]
    VanishingDenominator(usize),
    #[error("direction eta = {eta} is not admissible: collides with theta_({j},{l})")]
    Inadmissible { eta: f64, j: usize, l: usize },
    #[error("no directed walk with {edges} edges starts at lambda_{j}")]
    NoPath { j: usize, edges: usize },
    #[error("truncation plan infeasible: {0}")]
    PlanInfeasible(String),
    #[error("missing connection coefficient K_({0},{1})")]
    MissingK(usize, usize),
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("zero leading coefficient f_0 at descent point {0}")]
    ZeroF0(String),
    #[error("evaluation point outside the series disk: {0}")]
    ValidityRadius(String),

    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("ill-conditioned system (condition estimate {0:e})")]
    IllConditioned(f64),
    #[error("insufficient anchors: {needed} unknowns, {given} anchors")]
    InsufficientAnchors { needed: usize, given: usize },

    #[error("internal error: {0}")]
    Internal(String),
}

/// Coarse classification used for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Parse,
    Domain,
    Convergence,
    Internal,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            Parse(_) => ErrorClass::Parse,
            Convergence(_) | IllConditioned(_) => ErrorClass::Convergence,
            Internal(_) => ErrorClass::Internal,
            _ => ErrorClass::Domain,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
