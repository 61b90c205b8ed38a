use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function pole at {0}")]
    GammaPole(f64),

    #[error("parameter {name} = {value} is a nonpositive integer")]
    ParameterPole { name: &'static str, value: f64 },

    #[error("series did not converge within {terms} terms")]
    SeriesNonConvergence { terms: usize },

    #[error("quadrature stopped at estimated error {estimate:e}, target was {target:e}")]
    QuadratureTolerance { estimate: f64, target: f64 },

    #[error("invalid argument: {0}")]
    Domain(String),

    #[error("c = {c} lies within {guard:e} of an integer; connection formula unavailable")]
    IntegerC { c: f64, guard: f64 },

    #[error("connection formula lost accuracy: estimated relative error {relative_error:e}")]
    Cancellation { relative_error: f64 },

    #[error("asymptotic series terms grow before order {order}")]
    AsymptoticDivergence { order: usize },

    #[error("{what} requires {region}")]
    Region { what: String, region: String },

    #[error("methods disagree: {first} vs {second} exceeds budget {budget:e}")]
    Disagreement { first: f64, second: f64, budget: f64 },

    #[error("denominator indistinguishable from zero")]
    ZeroDenominator,
}

impl Error {
    pub fn region(what: impl Into<String>, region: impl Into<String>) -> Self {
        Error::Region {
            what: what.into(),
            region: region.into(),
        }
    }
}
