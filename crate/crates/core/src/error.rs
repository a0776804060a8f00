use thiserror::Error;

/// Errors raised by the rumour-lab library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid stifling distribution: {0}")]
    Distribution(String),

    #[error("cannot parse distribution spec `{spec}`: {reason}")]
    DistributionSpec { spec: String, reason: String },

    #[error("invalid initial condition: {0}")]
    InitialCondition(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("the variance of R is infinite")]
    InfiniteVariance,

    #[error("the mean of R must be infinite for this experiment")]
    FiniteMean,

    #[error("CLT hypotheses violated: w0 = 0 and x0 <= 1/(1+mu)")]
    CltHypotheses,

    #[error("the exact oracle needs a bounded-support law; truncate it first (e.g. with `truncate`)")]
    UnboundedSupport,

    #[error("oracle state space of {states} states exceeds the cap of {cap}")]
    StateSpace { states: usize, cap: usize },

    #[error("stochastic order violated: P(low >= {at}) > P(high >= {at})")]
    StochasticOrder { at: u64 },

    #[error("{0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
