use alloc::string::String;
use core::fmt;

/// Errors raised by the renormalization core.
///
/// Variants are grouped by the layer that raises them; the CLI maps them
/// onto process exit codes (see [`Error::is_resource`] and
/// [`Error::is_numerical`]).
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A graph violates the Feynman graph invariants.
    InvalidGraph(String),
    /// Input outside an operation's domain (non-1PI graph, t <= 0, n = 1, ...).
    Domain(String),
    /// A generator label is unknown to the Hopf algebra or character.
    UnknownGenerator(String),
    /// A universe of graphs is not closed under the required coproducts.
    IncompleteUniverse(String),
    /// An enumeration or summation bound was exceeded.
    Resource(String),
    /// Inversion of the zero series.
    DivisionByZero,
    /// Evaluation at z = 0 of a series with a pole of the given order.
    Pole { order: u32 },
    /// A coefficient was requested beyond the known truncation order.
    Precision { requested: i32, known: i32 },
    /// Characters with different truncations were combined.
    Alignment { left: usize, right: usize },
    /// The backend cannot provide what the operation needs.
    UnsupportedBackend(String),
    /// A mode sum changed by more than the allowed bound under cutoff doubling.
    Convergence { label: String, at_cutoff: f64, at_double: f64 },
    /// Diagonal Green's function outside the convergent half plane.
    Divergent { cutoff: u32, at_cutoff: f64, at_double: f64 },
    /// Not enough subtraction terms to isolate the poles.
    PoleInstability(String),
    /// More heat-kernel coefficients were requested than are available.
    Capability(String),
    /// Counterterms depend on the scale, so the beta function is undefined.
    Locality { label: String, deviation: f64 },
    /// Spectrum unsuitable for fractional powers.
    Spectrum(String),
    /// Density weights do not match.
    WeightMismatch { expected: f64, found: f64 },
    /// Broken internal invariant.
    Internal(String),
}

impl Error {
    /// Resource and bound errors (CLI exit code 2).
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource(_) | Error::IncompleteUniverse(_))
    }

    /// Numerical tolerance failures (CLI exit code 1).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Convergence { .. }
                | Error::Divergent { .. }
                | Error::PoleInstability(_)
                | Error::Locality { .. }
                | Error::Spectrum(_)
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidGraph(msg) => write!(f, "invalid graph: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::UnknownGenerator(label) => write!(f, "unknown generator {label}"),
            Error::IncompleteUniverse(msg) => write!(f, "universe not closed: {msg}"),
            Error::Resource(msg) => write!(f, "resource bound exceeded: {msg}"),
            Error::DivisionByZero => write!(f, "division by the zero series"),
            Error::Pole { order } => write!(f, "series has a pole of order {order} at z = 0"),
            Error::Precision { requested, known } => {
                write!(f, "coefficient of z^{requested} unknown (series known through z^{known})")
            }
            Error::Alignment { left, right } => {
                write!(f, "truncation mismatch: {left} vs {right} terms")
            }
            Error::UnsupportedBackend(msg) => write!(f, "unsupported backend: {msg}"),
            Error::Convergence { label, at_cutoff, at_double } => write!(
                f,
                "mode sum for {label} unstable under cutoff doubling ({at_cutoff:e} vs {at_double:e})"
            ),
            Error::Divergent { cutoff, at_cutoff, at_double } => write!(
                f,
                "diagonal Green's function diverges: {at_cutoff:e} at cutoff {cutoff}, {at_double:e} at {}",
                2 * cutoff
            ),
            Error::PoleInstability(msg) => write!(f, "pole extraction unstable: {msg}"),
            Error::Capability(msg) => write!(f, "capability exceeded: {msg}"),
            Error::Locality { label, deviation } => write!(
                f,
                "counterterm of {label} depends on the scale (deviation {deviation:e}); beta undefined"
            ),
            Error::Spectrum(msg) => write!(f, "spectrum error: {msg}"),
            Error::WeightMismatch { expected, found } => {
                write!(f, "density weight mismatch: expected {expected}, found {found}")
            }
            Error::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
