//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid degree/order: l = {l}, m = {m} (need |m| <= l)")]
    InvalidDegreeOrder { l: i64, m: i64 },

    #[error("argument out of range: {name} = {value}")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("squeeze modulus must satisfy |eta| <= 1, got {modulus}")]
    SqueezeModulus { modulus: f64 },

    #[error("unscaled operator is singular at |eta| = 1")]
    SingularParameter,

    #[error("ladder application annihilated the state (norm {norm:e} before renormalization)")]
    DegenerateResult { norm: f64 },

    #[error("no convergence: tail mass {tail:e} at l_max = {l_max}, the largest tested truncation")]
    NoConvergence { l_max: usize, tail: f64 },

    #[error("truncation inadequate at l_max = {l_max}: tail mass {tail:e} >= {tol:e}")]
    Truncation { l_max: usize, tail: f64, tol: f64 },

    #[error("grid band limit {supported} below state band limit {requested}")]
    BandLimit { supported: usize, requested: usize },

    #[error("squeeze ratio undefined: var(Ly) = {var_ly:e} is numerically zero")]
    UndefinedRatio { var_ly: f64 },

    #[error("bad revival fraction {m}/{n}: need m >= 1, n >= 2, gcd(m, n) = 1")]
    BadFraction { m: u32, n: u32 },

    #[error("packet count mismatch: expected {expected} lobes, detected {detected}")]
    PacketCountMismatch { expected: usize, detected: usize },

    #[error("azimuthal profile is ring-like; no discrete packets to count")]
    RingProfile,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed file: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
