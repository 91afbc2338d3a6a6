//! Closed form against oracle, plus every module invariant, for one scenario.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::Result;
use crate::moments::{
    dispersion_strong_closed, dispersion_weak_closed, first_moments, k2_free_closed, mean_dynamics_defect,
    min_squeezing_weak, second_moments, strong_dispersion_bracket,
};
use crate::oracle::{integrate_ode_series, IntegratorConfig};
use crate::tomography::{
    entropic_check, homogeneity_residual, normalization_defect, slice, GaussianState, OpticalAngle,
};
use crate::trajectory::{
    effective_frequency, transfer_matrix, wronskian, KickedTrajectory, OscillatorParams, Regime,
    TrajectoryPoint,
};

use super::scenario::Scenario;

pub const ORACLE_TOL: f64 = 1e-7;
pub const WRONSKIAN_CLOSED_TOL: f64 = 1e-9;
pub const WRONSKIAN_ORACLE_TOL: f64 = 1e-7;
pub const UNCERTAINTY_TOL: f64 = 1e-10;
pub const UNIMODULAR_TOL: f64 = 1e-14;
pub const COEFFICIENT_TOL: f64 = 1e-12;
pub const NORMALIZATION_TOL: f64 = 1e-6;
pub const HOMOGENEITY_TOL: f64 = 1e-12;
pub const ENTROPIC_TOL: f64 = 1e-9;
pub const MEAN_DYNAMICS_TOL: f64 = 1e-6;
pub const IDENTITY_TOL: f64 = 1e-12;
pub const UNDAMPED_BOUND_TOL: f64 = 1e-6;
pub const THETA_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Reported for reference, not judged.
    Info,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub scenario: String,
    pub name: &'static str,
    /// Worst value observed; for `>=` checks, the smallest margin.
    pub value: f64,
    pub tolerance: Option<f64>,
    pub status: Status,
    pub note: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| c.status == Status::Fail).count()
    }

    pub fn table(&self) -> String {
        let w = self.checks.iter().map(|c| c.scenario.len()).max().unwrap_or(8).max(8);
        let mut out = String::new();
        let _ = writeln!(out, "{:<w$}  {:<28}  {:>11}  {:>9}  status", "scenario", "check", "worst", "tol");
        for c in &self.checks {
            let tol = c.tolerance.map(|t| format!("{t:.1e}")).unwrap_or_else(|| "-".into());
            let status = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Info => "info",
            };
            let _ =
                write!(out, "{:<w$}  {:<28}  {:>11.3e}  {:>9}  {status}", c.scenario, c.name, c.value, tol);
            if !c.note.is_empty() {
                let _ = write!(out, "  {}", c.note);
            }
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "{} checks, {} failed: {}",
            self.checks.len(),
            self.failures(),
            if self.passed() { "PASS" } else { "FAIL" }
        );
        out
    }
}

struct Recorder<'a> {
    scenario: &'a str,
    checks: Vec<Check>,
}

impl Recorder<'_> {
    /// Records `value <= tol`. An error while computing the value fails the
    /// check and keeps its message.
    fn at_most(&mut self, name: &'static str, tol: f64, value: Result<f64>) {
        self.push(name, Some(tol), value, |v| v <= tol);
    }

    /// Records `value >= -tol`, i.e. a margin that must not go negative.
    fn margin(&mut self, name: &'static str, tol: f64, value: Result<f64>) {
        self.push(name, Some(tol), value, |v| v >= -tol);
    }

    fn info(&mut self, name: &'static str, value: Result<f64>, note: String) {
        let (value, note) = match value {
            Ok(v) => (v, note),
            Err(e) => (f64::NAN, e.to_string()),
        };
        self.checks.push(Check {
            scenario: self.scenario.to_string(),
            name,
            value,
            tolerance: None,
            status: Status::Info,
            note,
        });
    }

    fn push(&mut self, name: &'static str, tol: Option<f64>, value: Result<f64>, ok: impl Fn(f64) -> bool) {
        let (value, status, note) = match value {
            Ok(v) if ok(v) => (v, Status::Pass, String::new()),
            Ok(v) => (v, Status::Fail, String::new()),
            Err(e) => (f64::NAN, Status::Fail, e.to_string()),
        };
        self.checks.push(Check {
            scenario: self.scenario.to_string(),
            name,
            value,
            tolerance: tol,
            status,
            note,
        });
    }
}

fn max_of(values: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    values.into_iter().try_fold(0.0f64, |acc, v| Ok(acc.max(v?)))
}

fn min_of(values: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    values.into_iter().try_fold(f64::INFINITY, |acc, v| Ok(acc.min(v?)))
}

fn state_at(params: &OscillatorParams, s: &Scenario, pt: &TrajectoryPoint, omega: f64) -> GaussianState {
    GaussianState {
        first: first_moments(pt, s.alpha, params.gamma(), omega),
        second: second_moments(pt, params.gamma(), omega),
    }
}

pub fn verify_scenario(s: &Scenario) -> Report {
    let mut rec = Recorder { scenario: &s.name, checks: Vec::new() };
    if let Err(e) = run_checks(s, &mut rec) {
        rec.push("setup", None, Err(e), |_| false);
    }
    Report { checks: rec.checks }
}

fn run_checks(s: &Scenario, rec: &mut Recorder<'_>) -> Result<()> {
    let p = &s.params;
    let g = p.gamma();
    let omega = effective_frequency(p)?;
    let regime = p.regime()?;
    let times = s.time.points();
    let traj = KickedTrajectory::new(p)?;
    let closed: Vec<TrajectoryPoint> = crate::trajectory::trajectory_series(p, &times)?;
    let w_target = Complex64::new(0.0, 2.0 * omega);

    let oracle = integrate_ode_series(p, &times, &IntegratorConfig::default());
    rec.at_most(
        "closed vs oracle |d eps|",
        ORACLE_TOL,
        oracle
            .as_ref()
            .map_err(Clone::clone)
            .map(|o| o.iter().zip(&closed).map(|(a, b)| (a.eps - b.eps).norm()).fold(0.0, f64::max)),
    );
    rec.at_most(
        "wronskian (closed form)",
        WRONSKIAN_CLOSED_TOL,
        Ok(closed.iter().map(|pt| (wronskian(pt, g) - w_target).norm()).fold(0.0, f64::max)),
    );
    rec.at_most(
        "wronskian (oracle)",
        WRONSKIAN_ORACLE_TOL,
        oracle
            .as_ref()
            .map_err(Clone::clone)
            .map(|o| o.iter().map(|pt| (wronskian(pt, g) - w_target).norm()).fold(0.0, f64::max)),
    );
    rec.at_most(
        "uncertainty det - 1/4",
        UNCERTAINTY_TOL,
        Ok(closed.iter().map(|pt| second_moments(pt, g, omega).uncertainty_defect()).fold(0.0, f64::max)),
    );

    let t = transfer_matrix(p)?;
    let composed =
        p.kick_times().iter().fold(crate::trajectory::TransferMatrix::identity(), |acc, _| acc * t);
    rec.at_most(
        "transfer matrix |det - 1|",
        UNIMODULAR_TOL,
        Ok((t.det() - 1.0).norm().max((composed.det() - 1.0).norm())),
    );
    rec.at_most(
        "coefficient vs explicit",
        COEFFICIENT_TOL,
        Ok(closed
            .iter()
            .map(|pt| {
                let c = traj.at(pt.t);
                (c.eps - pt.eps).norm() / pt.eps.norm().max(1.0)
            })
            .fold(0.0, f64::max)),
    );

    let states: Vec<GaussianState> = closed.iter().map(|pt| state_at(p, s, pt, omega)).collect();
    rec.at_most(
        "tomogram normalization",
        NORMALIZATION_TOL,
        max_of(
            states
                .iter()
                .flat_map(|st| s.frames.iter().map(move |f| normalization_defect(&slice(st, f.params())))),
        ),
    );
    rec.at_most(
        "tomogram homogeneity",
        HOMOGENEITY_TOL,
        max_of(states.iter().flat_map(|st| {
            s.frames.iter().flat_map(move |f| {
                let centre = slice(st, f.params()).mean;
                [-2.0, 0.5, 3.0]
                    .into_iter()
                    .map(move |lambda| homogeneity_residual(st, f.params(), lambda, centre + 0.3))
            })
        })),
    );
    rec.margin(
        "entropic sum - ln(pi e)",
        ENTROPIC_TOL,
        min_of(states.iter().flat_map(|st| {
            (0..THETA_POINTS).map(move |k| {
                let theta = OpticalAngle(PI * k as f64 / THETA_POINTS as f64);
                entropic_check(st, theta).map(|r| r.sum - r.bound)
            })
        })),
    );
    rec.at_most(
        "mean dynamics",
        MEAN_DYNAMICS_TOL,
        max_of(
            times
                .iter()
                .filter(|&&t| p.kick_times().iter().all(|&tk| (t - tk).abs() > 2e-4))
                .map(|&t| mean_dynamics_defect(p, s.alpha, t)),
        ),
    );

    if p.is_single_kick_at_origin() {
        regime_checks(s, regime, &closed, rec)?;
    }
    Ok(())
}

fn regime_checks(
    s: &Scenario,
    regime: Regime,
    closed: &[TrajectoryPoint],
    rec: &mut Recorder<'_>,
) -> Result<()> {
    let p = &s.params;
    let post: Vec<&TrajectoryPoint> = closed.iter().filter(|pt| pt.t >= 0.0).collect();
    let rel =
        |closed_form: f64, pt: &TrajectoryPoint| (closed_form - pt.eps.norm_sqr()).abs() / pt.eps.norm_sqr();
    match regime {
        Regime::WeakDamping => {
            rec.at_most(
                "weak dispersion identity",
                IDENTITY_TOL,
                max_of(post.iter().map(|pt| dispersion_weak_closed(p, pt.t).map(|d| rel(2.0 * d, pt)))),
            );
            let bound = min_squeezing_weak(p, 1);
            if p.gamma() == 0.0 && p.kappa() != 0.0 {
                rec.at_most(
                    "undamped squeezing bound",
                    UNDAMPED_BOUND_TOL,
                    bound.map(|b| (b.closed_form - b.numeric).abs()),
                );
            } else {
                let note = match &bound {
                    Ok(b) => format!(
                        "closed {:.6e} numeric {:.6e} at t = {:.6}",
                        b.closed_form, b.numeric, b.t_star
                    ),
                    Err(_) => String::new(),
                };
                rec.info("squeezing bound rel. dev.", bound.map(|b| b.relative_deviation), note);
            }
        }
        Regime::StrongDamping => {
            rec.at_most(
                "strong dispersion identity",
                IDENTITY_TOL,
                max_of(post.iter().map(|pt| dispersion_strong_closed(p, pt.t).map(|d| rel(2.0 * d, pt)))),
            );
            // bracket >= 1 holds whenever the kicked drift 2κ + γ is non-negative
            if 2.0 * p.kappa() + p.gamma() >= 0.0 {
                rec.margin(
                    "strong bracket - 1",
                    0.0,
                    min_of(post.iter().map(|pt| strong_dispersion_bracket(p, pt.t).map(|b| b - 1.0))),
                );
            }
        }
        Regime::FreeParticle => {
            rec.at_most(
                "free squeezing identity",
                IDENTITY_TOL,
                max_of(post.iter().map(|pt| k2_free_closed(p, pt.t).map(|k| rel(k, pt)))),
            );
            if p.kappa() >= 0.0 {
                let positive: Vec<_> = post.iter().filter(|pt| pt.t > 0.0).collect();
                if !positive.is_empty() {
                    rec.margin(
                        "free k2 - 1 (t > 0)",
                        0.0,
                        min_of(positive.iter().map(|pt| k2_free_closed(p, pt.t).map(|k| k - 1.0))),
                    );
                }
            }
        }
    }
    Ok(())
}

/// Scenarios run by `verify` when no config file is given.
pub fn default_matrix() -> Vec<Scenario> {
    let base = |name: &str, body: &str| {
        let text = format!(
            "{body}\nstate.alpha = 0.4, -0.3\nframes.theta = 0, {FRAC_PI_2}\nframes.mu = 1\nframes.nu = 2\n"
        );
        Scenario::parse(name, &text).expect("built-in scenario parses")
    };
    vec![
        base("undamped", "params.omega0 = 1\nparams.gamma = 0\nparams.kappa = 0"),
        base("undamped-kick", "params.omega0 = 1\nparams.gamma = 0\nparams.kappa = 1"),
        base("weak", "params.omega0 = 1\nparams.gamma = 0.3\nparams.kappa = 0.7\ntime.t_start = -2"),
        base(
            "weak-multikick",
            "params.omega0 = 1.5\nparams.gamma = 0.2\nparams.kappa = -0.6\nparams.kick_times = 0, 2.5, 5",
        ),
        base(
            "strong",
            "params.omega0 = 0.5\nparams.gamma = 2\nparams.kappa = 1\ntime.t_end = 2\ntime.n_points = 101",
        ),
        base("free", "params.omega0 = 0\nparams.gamma = 0.5\nparams.kappa = 1"),
    ]
}

pub fn verify_all(scenarios: &[Scenario]) -> Report {
    Report { checks: scenarios.iter().flat_map(|s| verify_scenario(s).checks).collect() }
}
