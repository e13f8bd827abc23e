use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong in the laboratory.
///
/// The variants are grouped by the category the command line reports them
/// under; see [`Error::category`].
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its documented range.
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    /// Two fields that must share a grid do not.
    GridMismatch,
    /// A sample is NaN or infinite where a finite field was required.
    NonFinite { index: usize },
    /// `phi_x` dropped to or below the validity margin.
    InvalidDiffeo { min_phi_x: f64, at: f64 },
    /// Per-point inversion did not converge.
    InversionFailed { target: f64, iterations: usize },
    /// The flow map stopped being a diffeomorphism during time stepping.
    Breakdown { t: f64, min_phi_x: f64, at: f64 },
    /// Non-finite values appeared during time stepping.
    BlowUp { t: f64 },
    /// A feature is narrower than the grid can represent.
    UnderResolved {
        half_width: f64,
        spacing: f64,
        min_points: f64,
    },
    /// A probe specification violates one of its geometric requirements.
    ProbeSpec(&'static str),
}

/// Coarse error classes, used for exit codes by the driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Breakdown,
    BlowUp,
    UnderResolution,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidParameter { .. }
            | Error::GridMismatch
            | Error::NonFinite { .. }
            | Error::ProbeSpec(_) => ErrorCategory::Config,
            Error::InvalidDiffeo { .. } | Error::Breakdown { .. } => ErrorCategory::Breakdown,
            Error::InversionFailed { .. } => ErrorCategory::UnderResolution,
            Error::BlowUp { .. } => ErrorCategory::BlowUp,
            Error::UnderResolved { .. } => ErrorCategory::UnderResolution,
        }
    }

    pub(crate) fn param(name: &'static str, value: f64, expected: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            expected,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter {
                name,
                value,
                expected,
            } => write!(f, "parameter `{name}` = {value} is out of range (expected {expected})"),
            Error::GridMismatch => write!(f, "fields live on different grids"),
            Error::NonFinite { index } => write!(f, "non-finite sample at index {index}"),
            Error::InvalidDiffeo { min_phi_x, at } => write!(
                f,
                "not a diffeomorphism: min phi_x = {min_phi_x:e} at x = {at}"
            ),
            Error::InversionFailed { target, iterations } => write!(
                f,
                "inversion did not converge at x = {target} after {iterations} iterations \
                 (insufficient resolution?)"
            ),
            Error::Breakdown { t, min_phi_x, at } => write!(
                f,
                "Lagrangian breakdown at t = {t}: min phi_x = {min_phi_x:e} at x = {at}"
            ),
            Error::BlowUp { t } => write!(f, "blow-up: non-finite values at t = {t}"),
            Error::UnderResolved {
                half_width,
                spacing,
                min_points,
            } => write!(
                f,
                "feature of half-width {half_width} is under-resolved on spacing {spacing} \
                 (need at least {min_points} points); increase n_points"
            ),
            Error::ProbeSpec(msg) => write!(f, "invalid probe specification: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
