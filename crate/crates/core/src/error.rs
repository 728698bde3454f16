use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "mode window too wide: {modes} modes around resonant index {resonant} would include non-positive indices"
    )]
    WindowTooWide { modes: usize, resonant: u64 },

    #[error(
        "spectral window captures probability mass {captured:.9}, outside [1 - {tolerance:e}, 1]; widen the mode window or the cavity"
    )]
    Consistency { captured: f64, tolerance: f64 },

    #[error("step size {dt} violates the stability guard dt*max|detuning| = {product:.4} > {limit}")]
    StepTooLarge { dt: f64, product: f64, limit: f64 },

    #[error("norm drifted by {drift:e} (limit {limit:e}); retry with dt <= {suggested_dt:e}")]
    NormDrift { drift: f64, limit: f64, suggested_dt: f64 },

    #[error("trace drifted by {drift:e} (limit {limit:e}); retry with dt <= {suggested_dt:e}")]
    TraceDrift { drift: f64, limit: f64, suggested_dt: f64 },

    #[error("two-excitation state with {modes} modes needs {bytes} bytes, above the {limit} byte budget")]
    MemoryBound { modes: usize, bytes: usize, limit: usize },

    #[error("initial state is degenerate: norm {norm:e} before normalization")]
    DegenerateState { norm: f64 },

    #[error("profiles are not sampled on a common grid: {0}")]
    GridMismatch(String),

    #[error("mirror extraction needs the atom at the cavity centre (z_A = {atom}, L/2 = {centre})")]
    AtomNotCentred { atom: f64, centre: f64 },

    #[error("signal windows differ: [{a_start}, {a_end}] vs [{b_start}, {b_end}]")]
    WindowMismatch { a_start: f64, a_end: f64, b_start: f64, b_end: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
