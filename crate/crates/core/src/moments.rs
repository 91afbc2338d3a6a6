//! Quadrature moments and squeezing of the Gaussian state carried by ε(t).
//!
//! Units: the quadratures are scaled so the initial coherent state has
//! σ_qq = σ_pp = 1/2. In these units the canonical pair satisfies
//! d⟨q⟩/dt = Ω e^{−2γt} ⟨p⟩, which is the plain Caldirola-Kanai relation
//! q' = p e^{−2γt} when Ω = 1.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::oracle::minimize_k2_numeric;
use crate::trajectory::{
    classify_regime, effective_frequency, epsilon_closed, OscillatorParams, Regime, TrajectoryPoint,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstMoments {
    pub mean_q: f64,
    pub mean_p: f64,
}

/// Covariance block of (q, p); `sigma_qp` is the signed symmetrized covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondMoments {
    pub sigma_qq: f64,
    pub sigma_pp: f64,
    pub sigma_qp: f64,
}

impl SecondMoments {
    /// Coherent state at t = 0.
    pub const COHERENT: SecondMoments = SecondMoments { sigma_qq: 0.5, sigma_pp: 0.5, sigma_qp: 0.0 };

    /// σ_qq σ_pp − σ_qp²; exactly 1/4 for the pure states produced here.
    pub fn determinant(&self) -> f64 {
        self.sigma_qq * self.sigma_pp - self.sigma_qp * self.sigma_qp
    }

    /// |det − 1/4|.
    pub fn uncertainty_defect(&self) -> f64 {
        (self.determinant() - 0.25).abs()
    }
}

/// Complex amplitude α labelling the displaced state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoherentLabel(pub Complex64);

impl CoherentLabel {
    pub fn new(re: f64, im: f64) -> Self {
        Self(Complex64::new(re, im))
    }
}

/// σ_qq = |ε|²/2, σ_pp = e^{4γt}|ε'|²/(2Ω²), σ_qp = e^{2γt} Re(ε'ε*)/(2Ω).
pub fn second_moments(point: &TrajectoryPoint, gamma: f64, omega_eff: f64) -> SecondMoments {
    let grow = (2.0 * gamma * point.t).exp();
    SecondMoments {
        sigma_qq: 0.5 * point.eps.norm_sqr(),
        sigma_pp: 0.5 * (grow * point.eps_dot.norm() / omega_eff).powi(2),
        sigma_qp: 0.5 * grow * (point.eps_dot * point.eps.conj()).re / omega_eff,
    }
}

/// The unsigned covariance ½√(e^{4γt}|εε'|²/Ω² − 1), when the radicand is
/// non-negative. Equal to |σ_qp| on valid trajectories.
pub fn covariance_magnitude(point: &TrajectoryPoint, gamma: f64, omega_eff: f64) -> Option<f64> {
    let grow = (2.0 * gamma * point.t).exp();
    let radicand = (grow * point.eps.norm() * point.eps_dot.norm() / omega_eff).powi(2) - 1.0;
    (radicand >= 0.0).then(|| 0.5 * radicand.sqrt())
}

/// ⟨q⟩ = (αε* + α*ε)/√2 and ⟨p⟩ = √2 e^{2γt} Re(α ε'*)/Ω.
pub fn first_moments(
    point: &TrajectoryPoint,
    alpha: CoherentLabel,
    gamma: f64,
    omega_eff: f64,
) -> FirstMoments {
    let a = alpha.0;
    let q = (a * point.eps.conj() + a.conj() * point.eps) / SQRT_2;
    debug_assert!(q.im.abs() <= 1e-12 * q.norm().max(1.0));
    let grow = (2.0 * gamma * point.t).exp();
    FirstMoments { mean_q: q.re, mean_p: SQRT_2 * grow * (a * point.eps_dot.conj()).re / omega_eff }
}

const MEAN_DYNAMICS_STEP: f64 = 1e-4;
const MEAN_DYNAMICS_TOL: f64 = 1e-6;

/// |d⟨q⟩/dt − Ω e^{−2γt}⟨p⟩| at `t`, with the derivative taken by central
/// differences along the closed-form trajectory.
///
/// Fails with [`Error::ContractViolation`] when the defect exceeds 1e-6
/// (relative to the size of the terms), and with [`Error::InvalidParams`]
/// when the difference stencil would straddle a kick.
pub fn mean_dynamics_defect(params: &OscillatorParams, alpha: CoherentLabel, t: f64) -> Result<f64> {
    let h = MEAN_DYNAMICS_STEP;
    if params.kick_times().iter().any(|&tk| (t - tk).abs() <= h) {
        return Err(Error::InvalidParams(format!("t = {t} is within {h} of a kick")));
    }
    let omega = effective_frequency(params)?;
    let g = params.gamma();
    let mean_q =
        |s: f64| -> Result<f64> { Ok(first_moments(&epsilon_closed(params, s)?, alpha, g, omega).mean_q) };
    let dq = (mean_q(t + h)? - mean_q(t - h)?) / (2.0 * h);
    let here = first_moments(&epsilon_closed(params, t)?, alpha, g, omega);
    let rhs = omega * (-2.0 * g * t).exp() * here.mean_p;
    let defect = (dq - rhs).abs();
    if defect > MEAN_DYNAMICS_TOL * rhs.abs().max(1.0) {
        return Err(Error::ContractViolation(format!(
            "d<q>/dt = {dq} but Omega e^(-2 gamma t) <p> = {rhs} at t = {t}"
        )));
    }
    Ok(defect)
}

/// |ε(t)|² = σ_qq(t)/σ_qq(0). Values below one mean position squeezing.
pub fn squeezing_coefficient(point: &TrajectoryPoint) -> f64 {
    point.eps.norm_sqr()
}

fn require_regime(params: &OscillatorParams, expected: Regime) -> Result<f64> {
    let found = classify_regime(params)?;
    if found != expected {
        return Err(Error::WrongRegime { expected, found });
    }
    effective_frequency(params)
}

fn require_post_kick(t: f64) -> Result<()> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::PreKickTime(t));
    }
    Ok(())
}

/// Position dispersion after a kick at t = 0, weak damping:
/// (e^{−2γt}/2)[1 + (2κ+γ)² sin²Ωt/Ω² + (2κ+γ) sin 2Ωt/Ω].
pub fn dispersion_weak_closed(params: &OscillatorParams, t: f64) -> Result<f64> {
    let omega = require_regime(params, Regime::WeakDamping)?;
    require_post_kick(t)?;
    let b = (2.0 * params.kappa() + params.gamma()) / omega;
    let s = (omega * t).sin();
    let bracket = 1.0 + b * b * s * s + b * (2.0 * omega * t).sin();
    Ok(0.5 * (-2.0 * params.gamma() * t).exp() * bracket)
}

/// The bracket of the strong-damping dispersion,
/// cosh 2Ωt + b²(cosh 2Ωt − 1)/2 + b sinh 2Ωt with b = (2κ+γ)/Ω.
pub fn strong_dispersion_bracket(params: &OscillatorParams, t: f64) -> Result<f64> {
    let omega = require_regime(params, Regime::StrongDamping)?;
    require_post_kick(t)?;
    let b = (2.0 * params.kappa() + params.gamma()) / omega;
    let x = 2.0 * omega * t;
    // cosh x − 1 = 2 sinh²(x/2), exact near t = 0
    let cosh_m1 = 2.0 * (0.5 * x).sinh().powi(2);
    Ok(x.cosh() + 0.5 * b * b * cosh_m1 + b * x.sinh())
}

/// Position dispersion after a kick at t = 0, strong damping:
/// (e^{−2γt}/2) × [`strong_dispersion_bracket`].
pub fn dispersion_strong_closed(params: &OscillatorParams, t: f64) -> Result<f64> {
    let bracket = strong_dispersion_bracket(params, t)?;
    Ok(0.5 * (-2.0 * params.gamma() * t).exp() * bracket)
}

/// Squeezing coefficient after a kick on a free particle:
/// [1 + (κ/γ)u]² + u²/4 with u = 1 − e^{−2γt}.
pub fn k2_free_closed(params: &OscillatorParams, t: f64) -> Result<f64> {
    require_regime(params, Regime::FreeParticle)?;
    require_post_kick(t)?;
    let g = params.gamma();
    let u = -(-2.0 * g * t).exp_m1();
    Ok((1.0 + params.kappa() / g * u).powi(2) + 0.25 * u * u)
}

/// An alternative free-particle squeezing expression,
/// 1 + (κ²/γ²)u² + 2κ/(γu). Kept for comparison only: it diverges as
/// t → 0⁺ and is not |ε(t)|² of the free-particle trajectory.
pub fn k2_free_singular_form(params: &OscillatorParams, t: f64) -> Result<f64> {
    require_regime(params, Regime::FreeParticle)?;
    require_post_kick(t)?;
    let (g, k) = (params.gamma(), params.kappa());
    let u = -(-2.0 * g * t).exp_m1();
    Ok(1.0 + (k / g).powi(2) * u * u + 2.0 * k / (g * u))
}

/// Lower-limit expression for weak-damping squeezing and its numerical
/// counterpart on the n-th pseudo-period `[(n−1)π/Ω, nπ/Ω]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingBound {
    pub period_index: u32,
    /// Minimum of the oscillating bracket over a pseudo-period.
    pub bracket_min: f64,
    /// `bracket_min` times the closed-form decay factor.
    pub closed_form: f64,
    pub t_star: f64,
    pub numeric: f64,
    /// (closed_form − numeric)/numeric.
    pub relative_deviation: f64,
}

/// With a = κ + γ/2 and r = √(a² + Ω²):
///
/// ```text
/// k² = [1 + 2a²/Ω² − 2|a| r/Ω²] · exp[(γ/Ω) arccos(Ω/r) − (πγ/Ω)(2n − 1)]
/// ```
///
/// The first factor is evaluated as the algebraically equal Ω²/(r + |a|)²,
/// which does not cancel for |a| ≫ Ω.
pub fn min_squeezing_weak(params: &OscillatorParams, period_index: u32) -> Result<SqueezingBound> {
    let omega = require_regime(params, Regime::WeakDamping)?;
    if period_index == 0 {
        return Err(Error::InvalidParams("pseudo-period index starts at 1".into()));
    }
    let g = params.gamma();
    let a = (params.kappa() + 0.5 * g).abs();
    let r = a.hypot(omega);
    let bracket_min = (omega / (r + a)).powi(2);
    let n = f64::from(period_index);
    let exponent = g / omega * (omega / r).acos() - PI * g / omega * (2.0 * n - 1.0);
    let closed_form = bracket_min * exponent.exp();

    let period = PI / omega;
    let single = OscillatorParams::new(params.omega0(), g, params.kappa())?;
    let (t_star, numeric) = minimize_k2_numeric(&single, (n - 1.0) * period, n * period)?;
    Ok(SqueezingBound {
        period_index,
        bracket_min,
        closed_form,
        t_star,
        numeric,
        relative_deviation: (closed_form - numeric) / numeric,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::epsilon_post_kick;
    use std::f64::consts::FRAC_PI_2;

    fn params(w0: f64, g: f64, k: f64) -> OscillatorParams {
        OscillatorParams::new(w0, g, k).unwrap()
    }

    #[test]
    fn coherent_initial_moments() {
        let p = params(1.0, 0.3, 2.0);
        let om = effective_frequency(&p).unwrap();
        let pt = epsilon_closed(&p, 0.0).unwrap();
        let m = second_moments(&pt, 0.3, om);
        assert!((m.sigma_qq - 0.5).abs() < 1e-15);
        assert!((m.sigma_pp - 0.5).abs() < 1e-15);
        assert!(m.sigma_qp.abs() < 1e-15);
    }

    #[test]
    fn undamped_kick_dispersion_at_quarter_period() {
        let p = params(1.0, 0.0, 1.0);
        let pt = epsilon_closed(&p, FRAC_PI_2).unwrap();
        let m = second_moments(&pt, 0.0, 1.0);
        assert!((m.sigma_qq - 2.5).abs() < 1e-14);
        assert!((dispersion_weak_closed(&p, FRAC_PI_2).unwrap() - 2.5).abs() < 1e-14);
    }

    #[test]
    fn covariance_matches_unsigned_form() {
        for (w0, g, k, t) in [(1.0, 0.2, 1.0, 0.7), (0.5, 2.0, -0.3, 1.1), (0.0, 0.5, 1.0, 2.0)] {
            let p = params(w0, g, k);
            let om = effective_frequency(&p).unwrap();
            let pt = epsilon_closed(&p, t).unwrap();
            let m = second_moments(&pt, g, om);
            let mag = covariance_magnitude(&pt, g, om).unwrap();
            assert!((m.sigma_qp.abs() - mag).abs() < 1e-10);
            assert!((m.determinant() - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn first_moment_examples() {
        let p = params(1.0, 0.2, 1.0);
        let om = effective_frequency(&p).unwrap();
        let pt = epsilon_closed(&p, 0.0).unwrap();
        assert_eq!(
            first_moments(&pt, CoherentLabel::default(), 0.2, om),
            FirstMoments { mean_q: 0.0, mean_p: 0.0 }
        );
        let m = first_moments(&pt, CoherentLabel::new(0.0, 1.0), 0.2, om);
        assert!(m.mean_q.abs() < 1e-15);
        assert!((m.mean_p - SQRT_2).abs() < 1e-15);
        let m = first_moments(&pt, CoherentLabel::new(1.0, 0.0), 0.2, om);
        assert!((m.mean_q - SQRT_2).abs() < 1e-15);
        assert!(m.mean_p.abs() < 1e-15);
    }

    #[test]
    fn mean_dynamics_consistent() {
        for (w0, g, k) in [(1.0, 0.0, 1.0), (1.0, 0.3, -0.5), (0.5, 2.0, 0.5), (0.0, 0.5, 1.0)] {
            let p = params(w0, g, k);
            for &t in &[-0.7, 0.4, 1.3, 3.0] {
                let d = mean_dynamics_defect(&p, CoherentLabel::new(0.8, -0.4), t).unwrap();
                assert!(d < 1e-6, "{w0} {g} {k} {t}: {d}");
            }
        }
        let p = params(1.0, 0.3, 1.0);
        assert!(matches!(
            mean_dynamics_defect(&p, CoherentLabel::new(1.0, 0.0), 0.0),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn squeezing_flat_without_kick_or_damping() {
        let p = params(1.0, 0.0, 0.0);
        for &t in &[0.0, 0.9, 2.2, 10.0] {
            assert!((squeezing_coefficient(&epsilon_closed(&p, t).unwrap()) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn free_particle_never_squeezes() {
        let p = params(0.0, 0.5, 1.0);
        let k2 = squeezing_coefficient(&epsilon_closed(&p, 1.0).unwrap());
        assert!(k2 > 1.0);
        assert!((k2_free_closed(&p, 1.0).unwrap() - k2).abs() < 1e-12);
        assert_eq!(k2_free_closed(&p, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn singular_free_form_diverges_at_origin() {
        let p = params(0.0, 0.5, 1.0);
        assert!(k2_free_singular_form(&p, 1e-9).unwrap() > 1e8);
        assert!((k2_free_closed(&p, 1e-9).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn closed_dispersions_start_at_half() {
        assert!((dispersion_weak_closed(&params(1.0, 0.2, 3.0), 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((dispersion_strong_closed(&params(0.5, 2.0, 3.0), 0.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn closed_dispersions_match_trajectory() {
        let p = params(1.0, 0.2, 2.0);
        let d = dispersion_weak_closed(&p, 1.0).unwrap();
        assert!((d - 0.5 * epsilon_closed(&p, 1.0).unwrap().eps.norm_sqr()).abs() < 1e-12);

        let p = params(0.5, 2.0, 0.5);
        let d = dispersion_strong_closed(&p, 1.0).unwrap();
        assert!((d - 0.5 * epsilon_post_kick(&p, 1.0).unwrap().eps.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn regime_guards() {
        let weak = params(1.0, 0.2, 1.0);
        assert!(matches!(dispersion_strong_closed(&weak, 1.0), Err(Error::WrongRegime { .. })));
        assert!(matches!(k2_free_closed(&weak, 1.0), Err(Error::WrongRegime { .. })));
        assert!(matches!(min_squeezing_weak(&params(0.5, 2.0, 1.0), 1), Err(Error::WrongRegime { .. })));
        assert!(matches!(dispersion_weak_closed(&weak, -1.0), Err(Error::PreKickTime(_))));
    }

    #[test]
    fn lower_limit_undamped() {
        let b = min_squeezing_weak(&params(1.0, 0.0, 1.0), 1).unwrap();
        let expect = 3.0 - 2.0 * 2f64.sqrt();
        assert!((b.closed_form - expect).abs() < 1e-15);
        assert!((b.numeric - expect).abs() < 1e-12);

        let none = min_squeezing_weak(&params(1.0, 0.0, 0.0), 1).unwrap();
        assert!((none.closed_form - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lower_limit_factor_matches_expanded_arrangement() {
        for (k, g) in [(1.0, 0.0), (2.0, 0.1), (0.3, 0.5), (7.0, 0.2)] {
            let p = params(1.0, g, k);
            let om = effective_frequency(&p).unwrap();
            let a: f64 = k + g / 2.0;
            let expanded = 1.0 + 2.0 * a * a / (om * om) - 2.0 * a / (om * om) * (a * a + om * om).sqrt();
            let b = min_squeezing_weak(&p, 1).unwrap();
            assert!((b.bracket_min - expanded).abs() < 1e-12, "{k} {g}");
        }
    }
}
