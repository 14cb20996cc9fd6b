use thiserror::Error;

/// Everything that can go wrong in the library. Variants carry enough
/// context to be printed straight to a terminal.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid primary wave: {0}")]
    InvalidWave(String),

    #[error("singular frequency: first component of j + mu vanishes ({0:e})")]
    SingularFrequency(f64),

    #[error("residual F is singular at ({x}, {y})")]
    SingularPoint { x: f64, y: f64 },

    #[error("no sign change found for F(., {y}); bracket reached [{lo}, {hi}]")]
    BracketFailure { y: f64, lo: f64, hi: f64 },

    #[error("no resonant point at y = {y} (gap of the minus branch at the kink ordinate)")]
    NoRoot { y: f64 },

    #[error("wrong branch for y = {y}: plus needs y > 0, minus needs y < 0")]
    WrongBranch { y: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("lattice collision: n k + mu = 0 at harmonic n = {n}")]
    LatticeCollision { n: i64 },

    #[error("mu = ({mu1}, {mu2}) is not resonant (|F| = {residual:e})")]
    NotResonant { mu1: f64, mu2: f64, residual: f64 },

    #[error("pole membership ambiguous: spectral gap {gap:e} is below {threshold:e}")]
    Ambiguous { gap: f64, threshold: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("eigensolver failed to converge on a {0}x{0} matrix")]
    Eigen(usize),

    #[error("isolation failure: {count} eigenvalues within {radius:e} of i*w")]
    Isolation { count: usize, radius: f64 },

    #[error("near the exceptional set: gap {gap:e} below threshold {threshold:e}")]
    NearExceptional { gap: f64, threshold: f64 },

    #[error("time step too large: dt * |T| = {0} exceeds the RK4 stability bound")]
    Stability(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
