use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("log-gamma pole at z = {re} + {im}i")]
    Pole { re: f64, im: f64 },
    #[error("outside principal branch: {0}")]
    Branch(String),
    #[error("outside Hamiltonian domain: {0}")]
    Domain(String),
    #[error("empty counting region: E = {energy} does not exceed the corner value {corner}")]
    EmptyRegion { energy: f64, corner: f64 },
    #[error("contour is not single-valued: {0}")]
    NonMonotone(String),
    #[error("degenerate spectrum: {0}")]
    Degenerate(String),
    #[error("zero scan missed zeros near t = {checkpoint}: found {found}, smooth estimate {estimate:.3}")]
    MissedZero {
        checkpoint: f64,
        found: usize,
        estimate: f64,
    },
    #[error("E = {energy} lies within tolerance of the zero at {zero}")]
    Ambiguous { energy: f64, zero: f64 },
    #[error("shooting found {found} levels, expected {expected}")]
    MissedLevel { expected: usize, found: usize },
    #[error("grid error: {0}")]
    Grid(String),
    #[error("non-finite result in {0}")]
    NonFinite(&'static str),
}

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Argument(msg()))
    }
}
