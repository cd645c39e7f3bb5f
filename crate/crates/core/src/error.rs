use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cutoff {cutoff} Hz must be below the Nyquist frequency {nyquist} Hz")]
    CutoffAboveNyquist { cutoff: f64, nyquist: f64 },
    #[error("cannot resample from {native} Hz up to {requested} Hz")]
    Upsampling { native: f64, requested: f64 },
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("time is not strictly increasing at sample {index}")]
    NonMonotonicTime { index: usize },
    #[error("channel `{channel}` has {got} samples, expected {expected}")]
    ChannelLength {
        channel: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("contact pressure must be positive, got {0} MPa")]
    NonPositivePressure(f64),
    #[error("normal force must be positive, got {0} N")]
    NonPositiveNormalForce(f64),
    #[error("malformed pressure table: {0}")]
    MalformedTable(&'static str),
    #[error("fit window has no spread in the regressor")]
    DegenerateWindow,
    #[error("design matrix is rank deficient")]
    RankDeficient,
    #[error("no samples left after selection")]
    EmptyDataset,
    #[error("glide run has neither altitude nor slope angle")]
    MissingElevation,
    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}
