use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("coin operator is not unitary (max |U†U - I| = {deviation:e})")]
    NonUnitary { deviation: f64 },

    #[error("invalid coin density matrix: {0}")]
    InvalidDensity(String),

    #[error("Kraus generators violate completeness (max |ΣG†G - I| = {deviation:e})")]
    IncompleteChannel { deviation: f64 },

    #[error("invalid walk specification: {0}")]
    InvalidSpec(String),

    #[error("initial walker state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("shift by {shift} would leave the lattice window [{lo}, {hi}]")]
    WindowOverflow { shift: i64, lo: i64, hi: i64 },

    #[error("lattice window of {size} sites exceeds the cap of {cap}")]
    WindowTooLarge { size: usize, cap: usize },

    #[error("negative probability {value:e} at site {site}")]
    NegativeProbability { site: i64, value: f64 },

    #[error("phi grid must be a power of two >= 64, got {0}")]
    InvalidGrid(usize),

    #[error("phi grid of {m} points is too coarse, need more than {required}")]
    GridTooCoarse { m: usize, required: usize },

    #[error("asymptotic characteristic function has imaginary part {imag:e}")]
    NonRealH { imag: f64 },

    #[error("asymptotic characteristic function is constant")]
    ConstantH,

    #[error("{0}")]
    Domain(String),

    #[error("phase is undefined for amplitude C = {c:e}")]
    PhaseUndefined { c: f64 },

    #[error("no resonance family for chi = {0}")]
    InvalidChi(f64),

    #[error("decay probability {0} is outside [0, 1]")]
    GammaOutOfRange(f64),

    #[error("need at least {need} distinct points, got {got}")]
    InsufficientPoints { got: usize, need: usize },

    #[error("coin is not maximally mixed (max |ρ_c - I/2| = {deviation:e})")]
    NotAtResonance { deviation: f64 },
}
