use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point {re}+{im}i lies outside the open unit disc")]
    Domain { re: f64, im: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("quadrature did not converge (estimated error {estimate:e}, tolerance {tolerance:e})")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("non-finite integrand value at node r={r}, theta={theta}")]
    Evaluation { r: f64, theta: f64 },

    #[error("angular mode {k} aliases on a grid of {n_theta} angles")]
    Aliasing { k: i64, n_theta: usize },

    #[error("degenerate derivative at {re}+{im}i (|d phi| = {modulus:e})")]
    DegenerateDerivative { re: f64, im: f64, modulus: f64 },

    #[error("Jacobian vanishes at {re}+{im}i")]
    DegenerateSymbol { re: f64, im: f64 },

    #[error("Gram matrix is numerically singular in angular mode {mode}; lower the bidegree")]
    Conditioning { mode: i64 },

    #[error("constants ledger is missing `{0}`")]
    IncompleteLedger(&'static str),

    #[error("tuning failed: {0}")]
    Tuning(String),

    #[error("linear algebra failure: {0}")]
    Numerical(String),

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
