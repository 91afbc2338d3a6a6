use thiserror::Error;

use crate::trajectory::Regime;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid oscillator parameters: {0}")]
    InvalidParams(String),

    /// `omega0 == gamma > 0`: the mode frequency vanishes and every kick
    /// matrix divides by it.
    #[error("critical damping (omega0 = gamma = {0}) has no closed-form trajectory")]
    CriticalDamping(f64),

    #[error("undamped free motion (omega0 = gamma = 0) is not supported")]
    DegenerateOscillator,

    #[error("operation requires the {expected:?} regime, parameters are in {found:?}")]
    WrongRegime { expected: Regime, found: Regime },

    #[error("time {0} lies before the first kick")]
    PreKickTime(f64),

    #[error("reference frame (mu, nu) = (0, 0) is not admissible")]
    ZeroFrame,

    #[error("scale factor must be nonzero")]
    ZeroScale,

    #[error("empty grid: {0}")]
    EmptyGrid(&'static str),

    #[error("ODE integration failed at t = {t}: step size {h:e} underflowed")]
    StepUnderflow { t: f64, h: f64 },

    #[error("ODE integration exceeded {0} steps")]
    TooManySteps(usize),

    #[error("quadrature on [{a}, {b}] did not converge (estimated error {error:e})")]
    QuadratureNonConvergence { a: f64, b: f64, error: f64 },

    #[error("contract violated: {0}")]
    ContractViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
