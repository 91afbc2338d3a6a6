//! CSV artifacts. Every file starts with two `#` lines: the scenario name and
//! hash, then the column names. Floats are written with 17 significant digits.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::Result;
use crate::moments::{
    dispersion_strong_closed, dispersion_weak_closed, first_moments, k2_free_closed, min_squeezing_weak,
    second_moments, squeezing_coefficient, strong_dispersion_bracket,
};
use crate::tomography::{normalization_defect, slice, tomogram_value, GaussianState};
use crate::trajectory::{effective_frequency, trajectory_series, wronskian, Regime};

use super::scenario::{Artifact, Scenario};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

struct Csv {
    out: String,
}

impl Csv {
    fn new(scenario: &Scenario, artifact: Artifact, columns: &[String]) -> Self {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# kicktomo {} scenario={} hash={}",
            artifact.name(),
            scenario.name,
            scenario.hash()
        );
        let _ = writeln!(out, "# {}", columns.join(","));
        Self { out }
    }

    /// `None` cells are left empty.
    fn row(&mut self, cells: impl IntoIterator<Item = Option<f64>>) {
        let line: Vec<String> = cells.into_iter().map(|c| c.map(fmt_f64).unwrap_or_default()).collect();
        self.out.push_str(&line.join(","));
        self.out.push('\n');
    }
}

fn cols(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

pub fn render(scenario: &Scenario, artifact: Artifact) -> Result<String> {
    match artifact {
        Artifact::Trajectory => trajectory_csv(scenario),
        Artifact::Moments => moments_csv(scenario),
        Artifact::Tomogram => tomogram_csv(scenario),
        Artifact::Squeezing => squeezing_csv(scenario),
    }
}

pub fn trajectory_csv(s: &Scenario) -> Result<String> {
    let p = &s.params;
    let omega = effective_frequency(p)?;
    let target = Complex64::new(0.0, 2.0 * omega);
    let mut csv = Csv::new(
        s,
        Artifact::Trajectory,
        &cols(&["t", "re_eps", "im_eps", "re_eps_dot", "im_eps_dot", "wronskian_defect"]),
    );
    for pt in trajectory_series(p, &s.time.points())? {
        let w = (wronskian(&pt, p.gamma()) - target).norm();
        csv.row([pt.t, pt.eps.re, pt.eps.im, pt.eps_dot.re, pt.eps_dot.im, w].map(Some));
    }
    Ok(csv.out)
}

pub fn moments_csv(s: &Scenario) -> Result<String> {
    let p = &s.params;
    let omega = effective_frequency(p)?;
    let mut csv = Csv::new(
        s,
        Artifact::Moments,
        &cols(&["t", "sigma_qq", "sigma_pp", "sigma_qp", "mean_q", "mean_p", "uncertainty_defect"]),
    );
    for pt in trajectory_series(p, &s.time.points())? {
        let m2 = second_moments(&pt, p.gamma(), omega);
        let m1 = first_moments(&pt, s.alpha, p.gamma(), omega);
        csv.row(
            [pt.t, m2.sigma_qq, m2.sigma_pp, m2.sigma_qp, m1.mean_q, m1.mean_p, m2.uncertainty_defect()]
                .map(Some),
        );
    }
    Ok(csv.out)
}

/// One row per (t, frame): t, μ, ν, normalization defect, then w at each X.
pub fn tomogram_csv(s: &Scenario) -> Result<String> {
    let p = &s.params;
    let omega = effective_frequency(p)?;
    let xs = s.x_grid.points();
    let mut columns = cols(&["t", "mu", "nu", "normalization_defect"]);
    columns.extend(xs.iter().map(|x| format!("w[x={}]", fmt_f64(*x))));
    let mut csv = Csv::new(s, Artifact::Tomogram, &columns);
    for pt in trajectory_series(p, &s.time.points())? {
        let state = GaussianState {
            first: first_moments(&pt, s.alpha, p.gamma(), omega),
            second: second_moments(&pt, p.gamma(), omega),
        };
        for frame in &s.frames {
            let f = frame.params();
            let sl = slice(&state, f);
            let head = [pt.t, f.mu(), f.nu(), normalization_defect(&sl)?];
            csv.row(head.into_iter().chain(xs.iter().map(|&x| tomogram_value(&sl, x))).map(Some));
        }
    }
    Ok(csv.out)
}

/// t and k² = |ε|², plus the regime's closed forms for a single kick at the
/// origin (cells before the kick are empty):
///
/// * weak damping: `k2_closed`, and for the pseudo-period containing t the
///   lower-limit expression `bound_closed` next to the numerically found
///   minimum `bound_numeric`;
/// * strong damping: `k2_closed` and the dispersion `bracket`;
/// * free particle: `k2_closed`.
pub fn squeezing_csv(s: &Scenario) -> Result<String> {
    let p = &s.params;
    let regime = p.regime()?;
    let closed = p.is_single_kick_at_origin();
    let omega = effective_frequency(p)?;
    let mut columns = cols(&["t", "k2"]);
    if closed {
        columns.push("k2_closed".into());
        match regime {
            Regime::WeakDamping => columns.extend(cols(&["period", "bound_closed", "bound_numeric"])),
            Regime::StrongDamping => columns.push("bracket".into()),
            Regime::FreeParticle => {}
        }
    }
    let mut csv = Csv::new(s, Artifact::Squeezing, &columns);
    let mut bounds = HashMap::new();
    for pt in trajectory_series(p, &s.time.points())? {
        let t = pt.t;
        let mut row = vec![Some(t), Some(squeezing_coefficient(&pt))];
        if closed {
            let post = t >= 0.0;
            match regime {
                Regime::WeakDamping => {
                    row.push(post.then(|| dispersion_weak_closed(p, t)).transpose()?.map(|d| 2.0 * d));
                    if post {
                        let n = (omega * t / std::f64::consts::PI).floor() as u32 + 1;
                        let b = match bounds.entry(n) {
                            Entry::Occupied(e) => *e.get(),
                            Entry::Vacant(e) => *e.insert(min_squeezing_weak(p, n)?),
                        };
                        row.extend([Some(f64::from(n)), Some(b.closed_form), Some(b.numeric)]);
                    } else {
                        row.extend([None, None, None]);
                    }
                }
                Regime::StrongDamping => {
                    row.push(post.then(|| dispersion_strong_closed(p, t)).transpose()?.map(|d| 2.0 * d));
                    row.push(post.then(|| strong_dispersion_bracket(p, t)).transpose()?);
                }
                Regime::FreeParticle => {
                    row.push(post.then(|| k2_free_closed(p, t)).transpose()?);
                }
            }
        }
        csv.row(row);
    }
    Ok(csv.out)
}
