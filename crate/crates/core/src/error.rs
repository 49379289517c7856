use thiserror::Error;

/// Errors produced by the walk construction and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite coin angle at x = {x}")]
    NonFiniteAngle { x: i64 },

    #[error("lattice of {num_sites} sites is too small for a walk hopping {hops} sites per step")]
    LatticeTooSmall { num_sites: usize, hops: usize },

    #[error("band gap closed (max |d0| = {max_abs_d0})")]
    GapClosed { max_abs_d0: f64 },

    #[error("k resolution insufficient: phase step {step} exceeds pi/2")]
    ResolutionInsufficient { step: f64 },

    #[error("accumulated winding {winding} is not an integer")]
    NonIntegerWinding { winding: f64 },

    #[error("coin profile violates theta(-x) = theta(x); PT check rejected")]
    ParityViolated,

    #[error("no sublattice structure (diagonal blocks {diagonal}, off-diagonal blocks {off_diagonal})")]
    NoSublatticeStructure { diagonal: f64, off_diagonal: f64 },

    #[error("sublattice split needs an even number of sites under periodic boundary, got {0}")]
    OddPeriodicLattice(usize),

    #[error("{num_sites} sites exceeds the configured eigensolver maximum of {max_sites}")]
    TooManySites { num_sites: usize, max_sites: usize },

    #[error("eigensolver did not converge for {0}")]
    EigenNonConvergence(String),

    #[error("no bulk state with positive quasi-energy")]
    NoBulkStates,

    #[error("state is not localized")]
    NotLocalized,

    #[error("localization fit unreliable (R^2 = {r_squared:.3})")]
    UnreliableFit { r_squared: f64 },

    #[error("exceptional-point bracket invalid: {0}")]
    BadBracket(String),

    #[error("indicator is not monotone on the bracket; sign changes in {brackets:?}")]
    MultipleExceptionalPoints { brackets: Vec<(f64, f64)> },

    #[error("evolution window of {requested} sites exceeds the cap of {cap}")]
    WindowCapExceeded { requested: usize, cap: usize },

    #[error("delta_nu must be 1, 2 or 3, got {0}")]
    DeltaNuOutOfRange(i64),

    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
