//! Dormand-Prince 5(4) integration of the kicked trajectory equation.
//!
//! The complex equation is integrated as the real system
//! y = (Re ε, Im ε, Re ε', Im ε'). Kicks are exact jumps ε' ← ε' + 2κε applied
//! between integration segments; the δ-function is never smoothed.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::trajectory::{effective_frequency, OscillatorParams, TrajectoryPoint};

/// Error control is `abs_tol + rel_tol·|y|`. For the trajectory system |y| is
/// taken per complex pair (|ε|, |ε'|), which never vanish on a trajectory with
/// nonzero Wronskian, so `abs_tol = 0` (pure relative control) is allowed and
/// is the default: in the damped regimes ε' decays like e^{−2γt} and any fixed
/// absolute floor eventually swamps it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 0.0, max_step: 0.5, max_steps: 1_000_000 }
    }
}

impl IntegratorConfig {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self { rel_tol, abs_tol, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol >= 0.0 && self.max_step > 0.0) {
            return Err(Error::InvalidParams(format!(
                "need rel_tol > 0, abs_tol >= 0, max_step > 0: {self:?}"
            )));
        }
        Ok(())
    }
}

// Dormand & Prince (1980) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
// B minus the embedded 4th-order weights.
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

/// Adaptive embedded Runge-Kutta stepper for `y' = f(t, y)` in `N` dimensions.
pub struct Dopri5<'a, const N: usize> {
    rhs: &'a dyn Fn(f64, &[f64; N]) -> [f64; N],
    cfg: IntegratorConfig,
    paired: bool,
    h: f64,
    steps: usize,
}

impl<'a, const N: usize> Dopri5<'a, N> {
    pub fn new(rhs: &'a dyn Fn(f64, &[f64; N]) -> [f64; N], cfg: IntegratorConfig) -> Result<Self> {
        cfg.validate()?;
        let h = cfg.max_step.min(1e-2);
        Ok(Self { rhs, cfg, paired: false, h, steps: 0 })
    }

    /// Measures components (0, 1), (2, 3), ... by the modulus of the pair,
    /// i.e. treats the state as N/2 complex numbers.
    pub fn complex_pairs(mut self) -> Self {
        assert!(N.is_multiple_of(2), "complex pairing needs an even dimension");
        self.paired = true;
        self
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    fn trial(&self, t: f64, y: &[f64; N], h: f64) -> ([f64; N], f64) {
        let mut k = [[0.0; N]; 7];
        for s in 0..7 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k[s] = (self.rhs)(t + C[s] * h, &ys);
        }
        let mut y_new = *y;
        let mut err = [0.0; N];
        for i in 0..N {
            let mut incr = 0.0;
            for s in 0..7 {
                incr += B[s] * k[s][i];
                err[i] += E[s] * k[s][i];
            }
            y_new[i] += h * incr;
        }
        let magnitude = |v: &[f64; N], i: usize| {
            if self.paired {
                let j = i - i % 2;
                v[j].hypot(v[j + 1])
            } else {
                v[i].abs()
            }
        };
        let mut err_sq = 0.0;
        for (i, e) in err.iter().enumerate() {
            let scale = self.cfg.abs_tol + self.cfg.rel_tol * magnitude(y, i).max(magnitude(&y_new, i));
            err_sq += (h * e / scale).powi(2);
        }
        (y_new, (err_sq / N as f64).sqrt())
    }

    /// Advances `y` from `t0` to exactly `t1` (either direction).
    pub fn integrate(&mut self, t0: f64, y: &mut [f64; N], t1: f64) -> Result<()> {
        let dir = if t1 >= t0 { 1.0 } else { -1.0 };
        let mut t = t0;
        while (t1 - t) * dir > 0.0 {
            if self.steps >= self.cfg.max_steps {
                return Err(Error::TooManySteps(self.cfg.max_steps));
            }
            let remaining = (t1 - t).abs();
            let mut h = self.h.min(self.cfg.max_step);
            let last = h >= remaining;
            if last {
                h = remaining;
            }
            if h <= 1e-14 * t.abs().max(1.0) && !last {
                return Err(Error::StepUnderflow { t, h });
            }
            let (y_new, err) = self.trial(t, y, dir * h);
            self.steps += 1;
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                *y = y_new;
                t = if last { t1 } else { t + dir * h };
                // A clipped final step says nothing about the natural step size.
                if !last || factor < 1.0 {
                    self.h = h * factor;
                }
            } else {
                self.h = h * factor.min(1.0);
            }
        }
        Ok(())
    }
}

fn pack(eps: Complex64, eps_dot: Complex64) -> [f64; 4] {
    [eps.re, eps.im, eps_dot.re, eps_dot.im]
}

fn unpack(t: f64, y: &[f64; 4]) -> TrajectoryPoint {
    TrajectoryPoint { t, eps: Complex64::new(y[0], y[1]), eps_dot: Complex64::new(y[2], y[3]) }
}

/// ε(t_end), ε'(t_end) by numerical integration from ε(0) = 1, ε'(0) = iΩ.
///
/// A kick at exactly `t_end` is not applied (left limit), matching the
/// closed-form evaluators.
pub fn integrate_ode(
    params: &OscillatorParams,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<TrajectoryPoint> {
    let mut out = integrate_ode_series(params, &[t_end], cfg)?;
    Ok(out.pop().expect("one output per requested time"))
}

/// Integrates once and reports the state at every time in `times`.
///
/// Negative times are reached by integrating backwards from the origin; kicks
/// are all at t >= 0 so that branch never crosses one.
pub fn integrate_ode_series(
    params: &OscillatorParams,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<TrajectoryPoint>> {
    if let Some(bad) = times.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidParams(format!("output time must be finite, got {bad}")));
    }
    let omega = effective_frequency(params)?;
    let (g, w0sq, kappa) = (params.gamma(), params.omega0().powi(2), params.kappa());
    let rhs = move |_t: f64, y: &[f64; 4]| -> [f64; 4] {
        [y[2], y[3], -2.0 * g * y[2] - w0sq * y[0], -2.0 * g * y[3] - w0sq * y[1]]
    };
    let y0 = pack(Complex64::new(1.0, 0.0), Complex64::new(0.0, omega));

    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&i, &j| times[i].total_cmp(&times[j]));
    let mut out = vec![unpack(0.0, &y0); times.len()];

    // Backward branch, latest-first.
    let mut stepper = Dopri5::new(&rhs, *cfg)?.complex_pairs();
    let (mut t, mut y) = (0.0, y0);
    for &i in order.iter().rev().filter(|&&i| times[i] < 0.0) {
        stepper.integrate(t, &mut y, times[i])?;
        t = times[i];
        out[i] = unpack(t, &y);
    }

    // Forward branch interleaving outputs and kicks; outputs at a kick
    // instant are taken before the jump.
    let mut stepper = Dopri5::new(&rhs, *cfg)?.complex_pairs();
    let (mut t, mut y) = (0.0, y0);
    let mut kicks = params.kick_times().iter().copied().peekable();
    for &i in order.iter().filter(|&&i| times[i] >= 0.0) {
        let target = times[i];
        while let Some(&tk) = kicks.peek() {
            if tk >= target {
                break;
            }
            stepper.integrate(t, &mut y, tk)?;
            t = tk;
            y[2] += 2.0 * kappa * y[0];
            y[3] += 2.0 * kappa * y[1];
            kicks.next();
        }
        stepper.integrate(t, &mut y, target)?;
        t = target;
        out[i] = unpack(t, &y);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::{epsilon_closed, wronskian};
    use std::f64::consts::PI;

    #[test]
    fn full_period_returns_to_start() {
        let p = OscillatorParams::new(1.0, 0.0, 0.0).unwrap();
        let pt = integrate_ode(&p, 2.0 * PI, &IntegratorConfig::default()).unwrap();
        assert!((pt.eps - Complex64::new(1.0, 0.0)).norm() < 1e-9, "{}", pt.eps);
    }

    #[test]
    fn exponential_decay_reference() {
        // y' = −y, y(0) = 1.
        let rhs = |_t: f64, y: &[f64; 1]| [-y[0]];
        let mut s = Dopri5::new(&rhs, IntegratorConfig::with_tolerances(1e-10, 1e-12)).unwrap();
        let mut y = [1.0];
        s.integrate(0.0, &mut y, 3.0).unwrap();
        assert!((y[0] - (-3.0f64).exp()).abs() < 1e-11);
        s.integrate(3.0, &mut y, 0.0).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn weak_kick_matches_closed_form() {
        let p = OscillatorParams::new(1.0, 0.2, 1.0).unwrap();
        let pt = integrate_ode(&p, 1.0, &IntegratorConfig::default()).unwrap();
        let cf = epsilon_closed(&p, 1.0).unwrap();
        assert!((pt.eps - cf.eps).norm() < 1e-8);
        assert!((pt.eps_dot - cf.eps_dot).norm() < 1e-8);
        let w = wronskian(&pt, 0.2);
        let om = (1.0f64 - 0.04).sqrt();
        assert!((w - Complex64::new(0.0, 2.0 * om)).norm() < 1e-7);
    }

    #[test]
    fn series_hits_kick_instants_from_the_left() {
        let p = OscillatorParams::with_kicks(1.0, 0.1, 0.5, vec![0.0, 1.0]).unwrap();
        let cfg = IntegratorConfig::default();
        let pts = integrate_ode_series(&p, &[1.0, 0.0, -0.5, 2.0], &cfg).unwrap();
        for pt in &pts {
            let cf = epsilon_closed(&p, pt.t).unwrap();
            assert!((pt.eps - cf.eps).norm() < 1e-9, "t = {}", pt.t);
            assert!((pt.eps_dot - cf.eps_dot).norm() < 1e-9, "t = {}", pt.t);
        }
        assert_eq!(pts[1].eps_dot, Complex64::new(0.0, (0.99f64).sqrt()));
    }

    #[test]
    fn rejects_bad_config() {
        let p = OscillatorParams::new(1.0, 0.1, 0.5).unwrap();
        let cfg = IntegratorConfig { rel_tol: 0.0, ..Default::default() };
        assert!(integrate_ode(&p, 1.0, &cfg).is_err());
        let cfg = IntegratorConfig { abs_tol: -1.0, ..Default::default() };
        assert!(integrate_ode(&p, 1.0, &cfg).is_err());
    }

    #[test]
    fn reports_step_budget_exhaustion() {
        let p = OscillatorParams::new(1.0, 0.1, 0.5).unwrap();
        let cfg = IntegratorConfig { max_steps: 3, ..Default::default() };
        assert_eq!(integrate_ode(&p, 50.0, &cfg), Err(Error::TooManySteps(3)));
    }
}
