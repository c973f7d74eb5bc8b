use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid {name} = {value}: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("index {index} out of range for cutoff {cutoff}")]
    IndexOutOfRange { index: usize, cutoff: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("degenerate denominator {value:e} at phi = {phi}")]
    DegenerateDenominator { value: f64, phi: f64 },

    #[error("non-finite value in {0}")]
    Overflow(&'static str),

    #[error("malformed state spec `{spec}`: {reason}")]
    StateSpec { spec: String, reason: String },
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            reason,
        }
    }
}

/// Numerical conditions that do not invalidate a result but must be reported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Warning {
    /// Probability mass beyond the cutoff of a constructed state.
    TailMass(f64),
    /// Mass dropped by a channel because the output cutoff was too small.
    DiscardedMass(f64),
    /// Estimated quadrature error of a phase distribution.
    QuadratureError(f64),
}

impl Warning {
    pub const TAIL_MASS_LIMIT: f64 = 1e-8;
    pub const DISCARDED_MASS_LIMIT: f64 = 1e-6;
    pub const QUADRATURE_LIMIT: f64 = 1e-6;
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::TailMass(m) => write!(f, "tail_mass={m:.3e} exceeds {:.0e}", Self::TAIL_MASS_LIMIT),
            Warning::DiscardedMass(m) => {
                write!(f, "discarded_mass={m:.3e} exceeds {:.0e}", Self::DISCARDED_MASS_LIMIT)
            }
            Warning::QuadratureError(e) => {
                write!(f, "quad_error={e:.3e} exceeds {:.0e}", Self::QUADRATURE_LIMIT)
            }
        }
    }
}
