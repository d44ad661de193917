use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Both relay links (or the one an allocation depends on) have zero gain.
    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    #[error("no crossing of the ANC and TDBC tradeoff curves on (0, 2/3) at E = {energy}")]
    NoCrossing { energy: f64 },

    #[error("degenerate linearization: nu2 - mu2 = {slope_gap:e}")]
    DegenerateLinearization { slope_gap: f64 },

    /// Finite-difference gradients are undefined on the boundary of the feasible set.
    #[error("point lies on the boundary of the feasible set: {0}")]
    BoundaryPoint(String),

    #[error("root finding failed: {0}")]
    RootFinding(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
