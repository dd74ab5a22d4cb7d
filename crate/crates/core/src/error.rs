use thiserror::Error;

/// Errors raised by the flow, inversion and geometry routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("{op}: argument outside the domain ({detail})")]
    Domain { op: &'static str, detail: String },

    #[error("{0}: singular point at the origin")]
    Singular(&'static str),

    #[error("{0}: argument lies on a branch cut")]
    BranchCut(&'static str),

    #[error("{0}: non-finite value")]
    NonFinite(&'static str),

    #[error("{op}: no convergence after {iterations} iterations")]
    NoConvergence { op: &'static str, iterations: usize },

    #[error("{op}: left the principal branch ({detail})")]
    OffBranch { op: &'static str, detail: String },

    #[error("contour encloses {winding:.3} solutions instead of one")]
    Containment { winding: f64 },

    #[error("characteristic blew up at t = {t}")]
    BlowUp { t: f64 },

    #[error("{op}: no sign change in [{lo}, {hi}]")]
    Bracket { op: &'static str, lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, FlowError>;

pub(crate) fn domain<T>(op: &'static str, detail: impl Into<String>) -> Result<T> {
    Err(FlowError::Domain {
        op,
        detail: detail.into(),
    })
}
