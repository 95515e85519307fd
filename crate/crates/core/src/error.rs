use thiserror::Error;

/// Errors produced by the solvers and the scaling analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical breakdown: non-positive pivot {value:e} at row {pivot}")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("shift {shift} collides with an eigenvalue (pivot {pivot} = {value:e})")]
    ShiftCollision { shift: f64, pivot: usize, value: f64 },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    EigenNotConverged { iterations: usize, residual: f64 },

    #[error("self-consistent field did not converge after {iterations} iterations (last E_tot = {last_energy})")]
    ScfNotConverged {
        iterations: usize,
        last_energy: f64,
        last: Box<crate::scf::EnergyBreakdown>,
    },

    #[error("solve failed at coupling {coupling}, size {size}: {source}")]
    AtPoint {
        coupling: f64,
        size: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("delta undefined: values {0} and {1} must be nonzero with the same sign")]
    UndefinedDelta(f64, f64),

    #[error("gamma has a pole: delta_H = delta_dH = {0}")]
    GammaPole(f64),

    #[error("no crossing in [{lo}, {hi}]: {}", difference_range(samples))]
    NoCrossing {
        lo: f64,
        hi: f64,
        samples: Vec<(f64, Option<f64>)>,
    },

    #[error("degenerate sequence in extrapolation tableau at column {column}")]
    DegenerateSequence { column: usize },

    #[error("collapse residual undefined: {0}")]
    CollapseUndefined(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Wraps a solver failure with the grid point that produced it.
    pub fn at_point(self, coupling: f64, size: usize) -> Self {
        match self {
            e @ Error::AtPoint { .. } => e,
            e => Error::AtPoint {
                coupling,
                size,
                source: Box::new(e),
            },
        }
    }

    /// Strips any grid-point context.
    pub fn root_cause(&self) -> &Error {
        match self {
            Error::AtPoint { source, .. } => source.root_cause(),
            e => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

fn difference_range(samples: &[(f64, Option<f64>)]) -> String {
    let defined: Vec<f64> = samples.iter().filter_map(|s| s.1).collect();
    if defined.is_empty() {
        return format!("gamma undefined at all {} samples", samples.len());
    }
    let lo = defined.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = defined.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    format!("curve difference stays in [{lo:.3e}, {hi:.3e}] over {} of {} samples", defined.len(), samples.len())
}
