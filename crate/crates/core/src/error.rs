use thiserror::Error;

/// Errors raised across the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid quantizer config: {0}")]
    InvalidConfig(String),
    #[error("rejected non-finite sample value")]
    NonFiniteSample,
    #[error("empty sample sequence")]
    EmptyInput,
    #[error("bin index {index} out of range [{min}, {max}]")]
    IndexOutOfRange { index: i64, min: i64, max: i64 },
    #[error("distribution not normalized: sum = {sum}")]
    NotNormalized { sum: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("symplectic eigenvalue {0} < 1 is unphysical")]
    UnphysicalEigenvalue(f64),
    #[error("energy bound a_lim = {a_lim} smaller than sampling range N = {range}")]
    EnergyBoundTooSmall { a_lim: f64, range: f64 },
    #[error("no shot-noise clearance: LO-on variance {v_on} <= electronic variance {v_elec}")]
    NoShotNoiseClearance { v_on: f64, v_elec: f64 },
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("abort: no certifiable randomness (rate = {rate} bits/sample)")]
    NoCertifiableRandomness { rate: f64 },
    #[error("extractor input/spec length mismatch: {0}")]
    LengthMismatch(String),
    #[error("partial final block of {got} bits (block size {expected})")]
    PartialBlock { got: usize, expected: usize },
    #[error("mismatched quantizer configs between quadratures")]
    ConfigMismatch,
    #[error("seed stream exhausted")]
    SeedExhausted,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
