use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("point at infinity (south pole has no finite stereographic image)")]
    PointAtInfinity,

    #[error("singular evaluation: {0}")]
    Singular(String),

    #[error("configuration is {found}, expected {expected} (w = {w}, w_cri = {w_cri})")]
    Phase {
        expected: &'static str,
        found: &'static str,
        w: f64,
        w_cri: f64,
    },

    #[error("root selection failed: {0}")]
    NoRoot(String),

    #[error("{what} did not converge (achieved {achieved:e})")]
    Convergence { what: String, achieved: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
