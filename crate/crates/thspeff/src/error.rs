use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid ensemble spec: {0}")]
    InvalidSpec(String),

    #[error("eigensolver did not converge within {0} implicit-shift iterations")]
    EigenNoConvergence(usize),

    #[error("factorization failed: matrix not positive definite at pivot {0}")]
    NotPositiveDefinite(usize),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("quadrature did not reach tolerance (requested {requested:e}, achieved {achieved:e})")]
    Quadrature { requested: f64, achieved: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("moment order {order} exceeds table limit {l_max}")]
    MomentOrder { order: usize, l_max: usize },

    #[error("capacity curve is non-monotone near gamma = {0}")]
    NonMonotone(f64),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
