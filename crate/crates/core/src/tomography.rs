//! Symplectic and optical tomograms of the Gaussian state.
//!
//! The symplectic tomogram w(X, μ, ν) is the probability density of the
//! observable X = μq + νp. For a Gaussian state it is the normal density with
//! mean μ⟨q⟩ + ν⟨p⟩ and variance μ²σ_qq + ν²σ_pp + 2μνσ_qp. The optical
//! tomogram is the slice μ = cos θ, ν = sin θ.

use std::f64::consts::{E, FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::moments::{FirstMoments, SecondMoments};
use crate::oracle::quadrature;

/// Reference frame (μ, ν) of the measured quadrature; never (0, 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameParams {
    mu: f64,
    nu: f64,
}

impl FrameParams {
    pub fn new(mu: f64, nu: f64) -> Result<Self> {
        if mu == 0.0 && nu == 0.0 {
            return Err(Error::ZeroFrame);
        }
        if !(mu.is_finite() && nu.is_finite()) {
            return Err(Error::InvalidParams(format!("frame ({mu}, {nu}) is not finite")));
        }
        Ok(Self { mu, nu })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if lambda == 0.0 {
            return Err(Error::ZeroScale);
        }
        Self::new(lambda * self.mu, lambda * self.nu)
    }
}

/// Homodyne angle θ, i.e. the frame (cos θ, sin θ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalAngle(pub f64);

impl OpticalAngle {
    pub fn frame(&self) -> FrameParams {
        let (s, c) = self.0.sin_cos();
        FrameParams { mu: c, nu: s }
    }
}

impl From<OpticalAngle> for FrameParams {
    fn from(theta: OpticalAngle) -> Self {
        theta.frame()
    }
}

/// First and second moments of one Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    pub first: FirstMoments,
    pub second: SecondMoments,
}

impl GaussianState {
    pub fn coherent(first: FirstMoments) -> Self {
        Self { first, second: SecondMoments::COHERENT }
    }
}

/// One-dimensional tomogram at fixed frame and time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSlice {
    pub mean: f64,
    pub variance: f64,
}

impl GaussianSlice {
    /// Differential entropy ½ ln(2πe σ_X).
    pub fn entropy(&self) -> f64 {
        0.5 * (2.0 * PI * E * self.variance).ln()
    }
}

pub fn slice(state: &GaussianState, frame: FrameParams) -> GaussianSlice {
    let (mu, nu) = (frame.mu, frame.nu);
    let FirstMoments { mean_q, mean_p } = state.first;
    let SecondMoments { sigma_qq, sigma_pp, sigma_qp } = state.second;
    GaussianSlice {
        mean: mu * mean_q + nu * mean_p,
        variance: mu * mu * sigma_qq + nu * nu * sigma_pp + 2.0 * mu * nu * sigma_qp,
    }
}

/// (2πσ_X)^{−1/2} exp(−(X − X̄)²/(2σ_X)).
pub fn tomogram_value(slice: &GaussianSlice, x: f64) -> f64 {
    let d = x - slice.mean;
    (-(d * d) / (2.0 * slice.variance)).exp() / (2.0 * PI * slice.variance).sqrt()
}

pub fn symplectic_tomogram(state: &GaussianState, frame: FrameParams, x: f64) -> f64 {
    tomogram_value(&slice(state, frame), x)
}

pub fn optical_tomogram(state: &GaussianState, theta: OpticalAngle, x: f64) -> f64 {
    symplectic_tomogram(state, theta.frame(), x)
}

/// Half-width of the integration window, in standard deviations.
pub const WINDOW_SIGMAS: f64 = 12.0;
pub const QUADRATURE_REL_TOL: f64 = 1e-9;

/// |∫ w dX − 1| by adaptive quadrature over mean ± 12σ.
pub fn normalization_defect(slice: &GaussianSlice) -> Result<f64> {
    let half = WINDOW_SIGMAS * slice.variance.sqrt();
    let total =
        quadrature(|x| tomogram_value(slice, x), slice.mean - half, slice.mean + half, QUADRATURE_REL_TOL)?;
    Ok((total - 1.0).abs())
}

/// −∫ w ln w dX by adaptive quadrature over mean ± 12σ.
pub fn entropy_by_quadrature(slice: &GaussianSlice) -> Result<f64> {
    let half = WINDOW_SIGMAS * slice.variance.sqrt();
    let integrand = |x: f64| {
        let w = tomogram_value(slice, x);
        if w > 0.0 {
            -w * w.ln()
        } else {
            0.0
        }
    };
    quadrature(integrand, slice.mean - half, slice.mean + half, QUADRATURE_REL_TOL)
}

/// |w(λX, λμ, λν) − |λ|⁻¹ w(X, μ, ν)|.
pub fn homogeneity_residual(state: &GaussianState, frame: FrameParams, lambda: f64, x: f64) -> Result<f64> {
    let scaled = frame.scaled(lambda)?;
    let lhs = symplectic_tomogram(state, scaled, lambda * x);
    let rhs = symplectic_tomogram(state, frame, x) / lambda.abs();
    Ok((lhs - rhs).abs())
}

/// Slack below ln(πe) still counted as satisfying the entropic inequality.
pub const ENTROPIC_SLACK: f64 = 1e-9;
/// Allowed disagreement between the analytic and quadrature entropy sums.
pub const ENTROPY_CROSSCHECK_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropicReport {
    /// S(θ) + S(θ + π/2), analytic.
    pub sum: f64,
    /// The same sum by quadrature of −w ln w.
    pub sum_quadrature: f64,
    /// ln(πe).
    pub bound: f64,
    pub satisfied: bool,
}

/// Entropic uncertainty check S(θ) + S(θ + π/2) ≥ ln(πe) for the optical
/// tomogram. Fails with [`Error::ContractViolation`] if the analytic and
/// quadrature sums disagree by more than 1e-6.
pub fn entropic_check(state: &GaussianState, theta: OpticalAngle) -> Result<EntropicReport> {
    let a = slice(state, theta.frame());
    let b = slice(state, OpticalAngle(theta.0 + FRAC_PI_2).frame());
    let sum = a.entropy() + b.entropy();
    let sum_quadrature = entropy_by_quadrature(&a)? + entropy_by_quadrature(&b)?;
    if (sum - sum_quadrature).abs() > ENTROPY_CROSSCHECK_TOL {
        return Err(Error::ContractViolation(format!(
            "entropy sum {sum} disagrees with quadrature {sum_quadrature}"
        )));
    }
    let bound = (PI * E).ln();
    Ok(EntropicReport { sum, sum_quadrature, bound, satisfied: sum >= bound - ENTROPIC_SLACK })
}

/// Row-per-frame matrix of tomogram values on `xs`.
pub fn tomogram_grid(state: &GaussianState, frames: &[FrameParams], xs: &[f64]) -> Result<Vec<Vec<f64>>> {
    if frames.is_empty() {
        return Err(Error::EmptyGrid("frames"));
    }
    if xs.is_empty() {
        return Err(Error::EmptyGrid("X grid"));
    }
    Ok(frames
        .iter()
        .map(|&f| {
            let s = slice(state, f);
            xs.iter().map(|&x| tomogram_value(&s, x)).collect()
        })
        .collect())
}
