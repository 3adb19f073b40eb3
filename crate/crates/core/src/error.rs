use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M†| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("trace is {trace}, expected 1")]
    NotNormalized { trace: f64 },

    #[error("unphysical state: minimum eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("correlation vector {v:?} lies outside the tetrahedron of Bell-diagonal states")]
    OutsideTetrahedron { v: [f64; 3] },

    #[error("unphysical parameters: {0}")]
    Unphysical(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("factor is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("degenerate facet: {0}")]
    DegenerateFacet(String),

    #[error("no sign change on bracket [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("objective is not monotone on the bracket near {at}")]
    NonMonotone { at: f64 },

    #[error("unknown state family '{0}'")]
    UnknownFamily(String),

    #[error("unknown verification suite '{0}'")]
    UnknownSuite(String),
}
