use thiserror::Error;

/// Errors raised by the pricing library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside the domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("{name} = {value} overflows double precision")]
    Overflow { name: &'static str, value: f64 },

    #[error("singular point: {0}")]
    Singular(&'static str),

    #[error("ill-conditioned: {0}")]
    IllConditioned(&'static str),

    #[error("quadrature did not converge: error estimate {estimate:e} after {panels} panels")]
    NoConvergence { estimate: f64, panels: usize },

    #[error("integrand produced a non-finite value")]
    NonFinite,

    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require(cond: bool, name: &'static str, value: f64, expected: &'static str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            expected,
        })
    }
}
