//! Closed-form and numerically verified dynamics of a Caldirola-Kanai damped
//! oscillator whose frequency receives δ-function kicks.
//!
//! Everything physical follows from the complex classical trajectory ε(t)
//! ([`trajectory`]): the Gaussian state's quadrature moments and squeezing
//! ([`moments`]), its symplectic and optical tomograms ([`tomography`]). The
//! [`oracle`] module integrates the same equation numerically and is used to
//! check every closed form. [`cli`] drives scenario files from the command
//! line.

pub mod cli;
pub mod error;
pub mod moments;
pub mod oracle;
pub mod tomography;
pub mod trajectory;

pub use error::{Error, Result};
pub use moments::{CoherentLabel, FirstMoments, SecondMoments};
pub use tomography::{FrameParams, GaussianSlice, GaussianState, OpticalAngle};
pub use trajectory::{OscillatorParams, Regime, TrajectoryPoint, TransferMatrix};
