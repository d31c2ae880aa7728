use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A search space must contain at least one element.
    #[error("search space must be non-empty")]
    EmptySearchSpace,

    /// The marked count must satisfy `t <= n`.
    #[error("invalid instance: {marked} marked out of {total} elements")]
    InvalidInstance { total: u64, marked: u64 },

    /// An index fell outside `[0, n)`.
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: u64, dim: u64 },

    /// A state failed the normalization check.
    #[error("state is not normalized: squared norm {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    /// The dimension is not a power of two where one is required.
    #[error("dimension {dim} is not a power of two")]
    NotPowerOfTwo { dim: u64 },

    /// The dimension exceeds what the dense simulator supports.
    #[error("dimension {dim} exceeds the dense-simulation limit {max}")]
    DimensionTooLarge { dim: u64, max: u64 },

    /// An operation needs at least one marked element.
    #[error("operation requires at least one marked element")]
    NoMarkedElements,

    /// A scan or schedule range was empty.
    #[error("empty range: [{lo}, {hi}]")]
    EmptyRange { lo: u64, hi: u64 },

    /// A failure tolerance must lie strictly between 0 and 1.
    #[error("failure tolerance must satisfy 0 < eps < 1, got {eps}")]
    InvalidTolerance { eps: f64 },

    /// A run-count parameter must be at least 1.
    #[error("run count must be at least 1")]
    ZeroRunCount,

    /// A schedule was applied to an instance it was not built for.
    #[error(
        "schedule built for instance ({expected_total}, {expected_marked}) \
             applied to ({got_total}, {got_marked})"
    )]
    ScheduleMismatch {
        expected_total: u64,
        expected_marked: u64,
        got_total: u64,
        got_marked: u64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
