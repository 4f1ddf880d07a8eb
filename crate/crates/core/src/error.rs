use thiserror::Error;

/// Errors raised by the chessboard computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the requested function.
    #[error("domain error: {0}")]
    Domain(String),

    /// The derivative jumps at integer abscissae; the caller has to pick a side.
    #[error("normalized length derivative at integer t = {0} needs an explicit side")]
    OneSided(f64),

    /// No explicit geodesic/metric formula is known for this index.
    #[error("beta = {beta} is outside the closed-form regime ({hint})")]
    UnsupportedRegime { beta: f64, hint: &'static str },

    /// The direction is not inside the cones where the metric is determined.
    #[error("direction ({x}, {y}) lies outside the cones (2k+1)|y| <= |x| with k = {kc}")]
    OutOfCoverage { x: f64, y: f64, kc: u32 },

    /// The shortest-path oracle would need more nodes than allowed.
    #[error("oracle graph needs {nodes} nodes, cap is {cap}")]
    Resource { nodes: usize, cap: usize },

    /// A bound that must hold by construction was violated.
    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
