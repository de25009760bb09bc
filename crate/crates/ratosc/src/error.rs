use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation argument violated a documented precondition.
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The quantization condition produced roots violating the expected
    /// structure (count, realness, sign, or distinctness). This signals a
    /// broken assumption, never a condition to be papered over.
    #[error("quantization failure for (n={n}, s={s}, g={g}): {detail}")]
    QuantizationFailure {
        n: usize,
        s: usize,
        g: f64,
        detail: String,
    },

    /// Node counting found a root of the polynomial factor that is zero or
    /// repeated within tolerance, so the node count is ill-defined.
    #[error("degenerate node: root of q(t) at t = {t:.6e} is zero or repeated within tolerance")]
    DegenerateNode { t: f64 },

    /// A generated state disagrees with the nu = 2(i-1)+s node law.
    #[error(
        "node law violated for (n={n}, i={i}, s={s}): counted {found} nodes, expected {expected}"
    )]
    NodeLawViolation {
        n: usize,
        i: usize,
        s: usize,
        found: usize,
        expected: usize,
    },

    /// Cholesky factorization of the overlap matrix broke down: the matrix is
    /// not numerically positive definite at the reported pivot. The leading
    /// block of size `largest_usable` did factor, so retrying with that basis
    /// size succeeds.
    #[error(
        "overlap matrix numerically indefinite at pivot {pivot}; largest usable basis size is {largest_usable}"
    )]
    IllConditioned { pivot: usize, largest_usable: usize },

    /// An eigenvalue solver failed to converge or returned an inconsistent
    /// result.
    #[error("eigensolver failure: {0}")]
    Solver(String),

    /// A computed quantity left the representable range of f64.
    #[error("{what} overflows f64 at index {at}")]
    Range { what: &'static str, at: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand used by constructors all over the crate.
    pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}
