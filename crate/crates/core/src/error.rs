use thiserror::Error;

/// Errors raised by field evaluation and every verification routine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("argument error: {0}")]
    Argument(String),

    /// A jet component became non-finite, or an explicit checked operation
    /// left its domain (division by zero, log of a non-positive value, ...).
    #[error("singular evaluation at {point:?}: {what}")]
    Singular { point: Vec<f64>, what: String },

    #[error("degenerate metric at {point:?} (det = {det:e})")]
    Degenerate { point: Vec<f64>, det: f64 },

    #[error("domain violation at {point:?}: {what}")]
    Domain { point: Vec<f64>, what: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("not horizontally conformal at {point:?}: anisotropy {residual:e}")]
    NotHorizontallyConformal { point: Vec<f64>, residual: f64 },

    #[error("evaluation failed on stencil point {point:?}: {source}")]
    Stencil {
        point: Vec<f64>,
        #[source]
        source: Box<GeomError>,
    },
}

impl GeomError {
    pub(crate) fn singular(point: &[f64], what: impl Into<String>) -> Self {
        GeomError::Singular {
            point: point.to_vec(),
            what: what.into(),
        }
    }

    pub(crate) fn domain(point: &[f64], what: impl Into<String>) -> Self {
        GeomError::Domain {
            point: point.to_vec(),
            what: what.into(),
        }
    }

    /// True for errors caused by the evaluation point rather than by the
    /// caller's arguments.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            GeomError::Singular { .. }
                | GeomError::Degenerate { .. }
                | GeomError::Domain { .. }
                | GeomError::Stencil { .. }
        )
    }
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;
