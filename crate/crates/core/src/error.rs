use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown law `{0}`")]
    UnknownLaw(String),
    #[error("parameter out of domain for {law}: {reason}")]
    ParamDomain { law: String, reason: String },
    #[error("order {requested} exceeds cap {cap} for {what}")]
    OrderTooLarge {
        what: &'static str,
        requested: usize,
        cap: usize,
    },
    #[error("insufficient order: need {need}, have {have}")]
    InsufficientOrder { need: usize, have: usize },
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("unsupported representation: {0}")]
    Unsupported(String),
    #[error("partition is crossing")]
    Crossing,
    #[error("series error: {0}")]
    Series(String),
    #[error("evaluation point must be off the real axis (Im z = {0})")]
    RealArgument(f64),
    #[error("Im z = {im} below grid resolution guard {guard}")]
    BelowGridResolution { im: f64, guard: f64 },
    #[error("Cauchy transform vanished; representation is corrupt")]
    ZeroCauchy,
    #[error("free multiplicative convolution of two point masses at zero")]
    BothDeltaZero,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("not representable in regular form: {0}")]
    NotRegularForm(String),
    #[error("input is not symmetric: odd cumulant {index} = {value}")]
    NotSymmetric { index: usize, value: f64 },
    #[error("degenerate measure: {0}")]
    Degenerate(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
