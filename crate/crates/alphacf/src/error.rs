use thiserror::Error;

/// Errors produced by map evaluation, symbolic manipulation, and the
/// numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The map was evaluated at `x = 0`, where `1/x` is undefined.
    #[error("zero argument: the map is undefined at x = 0")]
    ZeroArgument,

    /// An argument fell outside the interval of definition by more than
    /// the domain tolerance.
    #[error("argument {value} outside the domain [{lo}, {hi}]")]
    OutOfDomain { value: f64, lo: f64, hi: f64 },

    /// The jump transformation was evaluated too close to a partition
    /// breakpoint to decide the return time.
    #[error("argument {value} within tolerance of breakpoint c_{index}")]
    Breakpoint { value: f64, index: usize },

    /// The requested digit labels a cylinder that is empty for this
    /// parameter value.
    #[error("cylinder for digit ({j}, {sign}) is empty at alpha = {alpha}")]
    EmptyCylinder { j: u64, sign: char, alpha: f64 },

    /// A by-excess evaluation ran into a non-positive denominator,
    /// which cannot happen for well-formed sequences.
    #[error("divergent remainder: denominator {denom} <= 0 during evaluation")]
    DivergentRemainder { denom: f64 },

    /// The reflection algorithm needs a semicolon-form sequence with a
    /// usable remainder; the supplied tokens ran out first.
    #[error("reflection pattern exhausted: sequence lacks a remainder or enough depth")]
    PatternExhausted,

    /// No closed-form density is available for this parameter value.
    #[error("no closed form available at alpha = {alpha}")]
    UnsupportedAlpha { alpha: f64 },

    /// An orbit landed exactly on 0 and was abandoned.
    #[error("orbit hit zero exactly after {steps} steps")]
    OrbitHitZero { steps: usize },

    /// Adaptive quadrature could not reach the requested tolerance
    /// within its subdivision budget.
    #[error("quadrature failed to reach tolerance (best error estimate {estimate})")]
    QuadratureFailure { estimate: f64 },

    /// Rejection sampling accepted too small a fraction of proposals.
    #[error("rejection sampling starved: acceptance ratio {ratio} below 1%")]
    RejectionStarvation { ratio: f64 },

    /// A sequence literal could not be parsed.
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
