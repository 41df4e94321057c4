//! Crate-wide error type.

/// Which end of a search interval an extremum landed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lower,
    Upper,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Lower => f.write_str("lower"),
            Side::Upper => f.write_str("upper"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation outside the representable range of sampled data.
    #[error("range error: {0}")]
    Range(String),

    /// Shape/state combination with no supported closed form.
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    /// The requested bound state does not exist at this coupling.
    /// Carries the bracketing evidence gathered during the search.
    #[error(
        "no bound state with {nodes} nodes at coupling v={v} \
         (searched E in [{e_lo}, {e_hi}], r_max={r_max}, node counts {count_lo}..{count_hi})"
    )]
    NoBoundState {
        v: f64,
        nodes: usize,
        e_lo: f64,
        e_hi: f64,
        r_max: f64,
        count_lo: usize,
        count_hi: usize,
    },

    /// Integration blow-up or non-finite intermediate.
    #[error("numerical instability: {0}")]
    NumericalInstability(String),

    /// A bracketing search ran out of room before finding its target.
    #[error("unbounded search: {0}")]
    UnboundedSearch(String),

    /// A 1-D maximization attained its best value at the search boundary;
    /// the value is untrusted and the caller should widen the interval.
    #[error("boundary maximum at {side} end (param {param})")]
    BoundaryMaximum { param: f64, side: Side },

    /// Dual of [`Error::BoundaryMaximum`] for minimizations.
    #[error("boundary minimum at {side} end (param {param})")]
    BoundaryMinimum { param: f64, side: Side },

    /// A sampled curve could only be computed at part of the requested grid.
    #[error("partial curve: {} of {} grid points failed (first failure at v={})",
            failed.len(), failed.len() + computed.len(),
            failed.first().map(|p| p.0).unwrap_or(f64::NAN))]
    PartialCurve {
        /// Successfully computed samples `(v, F, F')`.
        computed: Vec<(f64, f64, f64)>,
        /// Failed couplings with the failure text.
        failed: Vec<(f64, String)>,
    },

    /// Convexity of the transformation is indefinite; no bound certificate.
    #[error("no convexity certificate: {0}")]
    NoCertificate(String),

    /// Basis potential unusable for the requested transformation.
    #[error("basis unsuitable: {0}")]
    BasisUnsuitable(String),

    /// Tangential potential construction failed.
    #[error("tangency error: {0}")]
    Tangency(String),

    /// An inversion iterate could not be solved.
    #[error("iterate {iteration} unsolvable: {source}")]
    IterateUnsolvable {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    /// A structural invariant of the data was violated.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// Malformed text input (CSV, grid spec, shape spec).
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }
}
