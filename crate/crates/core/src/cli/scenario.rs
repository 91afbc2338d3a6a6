//! Scenario files: flat `key = value` text with dotted sections.
//!
//! ```text
//! # weak damping, one kick at the origin
//! params.omega0 = 1.0
//! params.gamma = 0.2
//! params.kappa = 1.0
//! params.kick_times = 0
//! state.alpha = 0.5, -0.25
//! time.t_start = 0
//! time.t_end = 10
//! time.n_points = 201
//! frames.theta = 0, 0.7853981633974483
//! frames.mu = 1
//! frames.nu = 2
//! x_grid.x_min = -5
//! x_grid.x_max = 5
//! x_grid.n_points = 101
//! outputs = trajectory, moments
//! ```
//!
//! Only the three `params.*` scalars are required. Blank lines and `#`
//! comments are ignored; unknown and repeated keys are errors.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::moments::CoherentLabel;
use crate::tomography::{FrameParams, OpticalAngle};
use crate::trajectory::OscillatorParams;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    /// 1-based line in the scenario file, if the problem is local to one line.
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "line {n}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

impl From<Error> for ConfigError {
    fn from(e: Error) -> Self {
        Self { line: None, message: e.to_string() }
    }
}

fn err(line: Option<usize>, message: impl Into<String>) -> ConfigError {
    ConfigError { line, message: message.into() }
}

/// Uniform grid of `n_points` from `start` to `end` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub n_points: usize,
}

impl Grid {
    fn validate(&self, what: &str) -> Result<(), ConfigError> {
        if !(self.start.is_finite() && self.end.is_finite()) {
            return Err(err(None, format!("{what}: bounds must be finite")));
        }
        if self.n_points == 0 {
            return Err(err(None, format!("{what}: n_points must be at least 1")));
        }
        if self.n_points > 1 && self.end <= self.start {
            return Err(err(None, format!("{what}: need start < end for more than one point")));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        if self.n_points == 1 {
            return vec![self.start];
        }
        let step = (self.end - self.start) / (self.n_points - 1) as f64;
        (0..self.n_points)
            .map(|i| if i + 1 == self.n_points { self.end } else { self.start + i as f64 * step })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Frame {
    Optical(OpticalAngle),
    Symplectic(FrameParams),
}

impl Frame {
    pub fn params(&self) -> FrameParams {
        match *self {
            Frame::Optical(theta) => theta.frame(),
            Frame::Symplectic(f) => f,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Artifact {
    Trajectory,
    Moments,
    Tomogram,
    Squeezing,
}

impl Artifact {
    pub const ALL: [Artifact; 4] =
        [Artifact::Trajectory, Artifact::Moments, Artifact::Tomogram, Artifact::Squeezing];

    pub fn name(&self) -> &'static str {
        match self {
            Artifact::Trajectory => "trajectory",
            Artifact::Moments => "moments",
            Artifact::Tomogram => "tomogram",
            Artifact::Squeezing => "squeezing",
        }
    }
}

impl FromStr for Artifact {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Artifact::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| format!("unknown output `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub params: OscillatorParams,
    pub alpha: CoherentLabel,
    pub time: Grid,
    pub frames: Vec<Frame>,
    pub x_grid: Grid,
    /// Artifacts that `verify --out` writes next to its report.
    pub outputs: Vec<Artifact>,
    hash: String,
}

const KEYS: [&str; 15] = [
    "params.omega0",
    "params.gamma",
    "params.kappa",
    "params.kick_times",
    "state.alpha",
    "time.t_start",
    "time.t_end",
    "time.n_points",
    "frames.theta",
    "frames.mu",
    "frames.nu",
    "x_grid.x_min",
    "x_grid.x_max",
    "x_grid.n_points",
    "outputs",
];

struct Entries {
    map: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(Some(n), format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(err(Some(n), format!("unknown key `{key}`")));
            }
            // Normalize list spacing so the scenario hash ignores formatting.
            let value = value.split(',').map(str::trim).collect::<Vec<_>>().join(",");
            if value.is_empty() {
                return Err(err(Some(n), format!("`{key}` has no value")));
            }
            if let Some((first, _)) = map.insert(key.to_string(), (n, value)) {
                return Err(err(Some(n), format!("`{key}` already set on line {first}")));
            }
        }
        Ok(Self { map })
    }

    fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, (_, v)) in &self.map {
            h.update(format!("{k}={v}\n").as_bytes());
        }
        h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    fn scalar<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.map.get(key) {
            None => Ok(None),
            Some((n, v)) => {
                v.parse().map(Some).map_err(|_| err(Some(*n), format!("`{key}`: cannot parse `{v}`")))
            }
        }
    }

    fn required(&self, key: &str) -> Result<f64, ConfigError> {
        self.scalar(key)?.ok_or_else(|| err(None, format!("missing required key `{key}`")))
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, ConfigError> {
        match self.map.get(key) {
            None => Ok(None),
            Some((n, v)) => v
                .split(',')
                .map(|item| {
                    item.parse().map_err(|_| err(Some(*n), format!("`{key}`: cannot parse `{item}`")))
                })
                .collect::<Result<Vec<T>, _>>()
                .map(Some),
        }
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.map.get(key).map(|(n, _)| *n)
    }
}

impl Scenario {
    /// Parses scenario text; `name` labels the scenario in reports.
    pub fn parse(name: &str, text: &str) -> Result<Self, ConfigError> {
        let e = Entries::parse(text)?;
        let kicks = e.list::<f64>("params.kick_times")?.unwrap_or_else(|| vec![0.0]);
        let params = OscillatorParams::with_kicks(
            e.required("params.omega0")?,
            e.required("params.gamma")?,
            e.required("params.kappa")?,
            kicks,
        )?;
        params.regime()?;

        let alpha = match e.list::<f64>("state.alpha")? {
            None => CoherentLabel::default(),
            Some(v) if v.len() == 2 => CoherentLabel::new(v[0], v[1]),
            Some(_) => {
                return Err(err(e.line("state.alpha"), "`state.alpha` takes `re, im`"));
            }
        };

        let time = Grid {
            start: e.scalar("time.t_start")?.unwrap_or(0.0),
            end: e.scalar("time.t_end")?.unwrap_or(10.0),
            n_points: e.scalar("time.n_points")?.unwrap_or(201),
        };
        time.validate("time grid")?;
        let x_grid = Grid {
            start: e.scalar("x_grid.x_min")?.unwrap_or(-5.0),
            end: e.scalar("x_grid.x_max")?.unwrap_or(5.0),
            n_points: e.scalar("x_grid.n_points")?.unwrap_or(101),
        };
        x_grid.validate("x grid")?;

        let thetas = e.list::<f64>("frames.theta")?;
        let mus = e.list::<f64>("frames.mu")?;
        let nus = e.list::<f64>("frames.nu")?;
        let mut frames = Vec::new();
        for th in thetas.iter().flatten() {
            if !th.is_finite() {
                return Err(err(e.line("frames.theta"), "angles must be finite"));
            }
            frames.push(Frame::Optical(OpticalAngle(*th)));
        }
        match (mus, nus) {
            (None, None) => {}
            (Some(m), Some(n)) if m.len() == n.len() => {
                for (mu, nu) in m.into_iter().zip(n) {
                    frames.push(Frame::Symplectic(FrameParams::new(mu, nu)?));
                }
            }
            _ => {
                return Err(err(
                    None,
                    "`frames.mu` and `frames.nu` must be given together with equal lengths",
                ));
            }
        }
        if frames.is_empty() {
            frames = vec![Frame::Optical(OpticalAngle(0.0)), Frame::Optical(OpticalAngle(FRAC_PI_2))];
        }

        let mut outputs = match e.list::<String>("outputs")? {
            None => Artifact::ALL.to_vec(),
            Some(names) => names
                .iter()
                .map(|s| s.parse().map_err(|m| err(e.line("outputs"), m)))
                .collect::<Result<Vec<Artifact>, _>>()?,
        };
        outputs.sort();
        outputs.dedup();

        Ok(Self { name: name.to_string(), params, alpha, time, frames, x_grid, outputs, hash: e.hash() })
    }

    /// First 16 hex digits of SHA-256 over the sorted, whitespace-normalized
    /// `key=value` lines.
    pub fn hash(&self) -> &str {
        &self.hash
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = "params.omega0 = 1\nparams.gamma = 0.2\nparams.kappa = 1\n";

    #[test]
    fn defaults() {
        let s = Scenario::parse("basic", BASIC).unwrap();
        assert_eq!(s.params.kick_times(), &[0.0]);
        assert_eq!(s.alpha, CoherentLabel::default());
        assert_eq!(s.time.points().len(), 201);
        assert_eq!(*s.time.points().last().unwrap(), 10.0);
        assert_eq!(s.frames.len(), 2);
        assert_eq!(s.outputs, Artifact::ALL.to_vec());
        assert_eq!(s.hash().len(), 16);
    }

    #[test]
    fn full_file() {
        let text = "\
# comment
params.omega0 = 1.0
params.gamma = 0.2   # trailing comment
params.kappa = -0.5
params.kick_times = 0, 2.5
state.alpha = 0.5, -0.25
time.t_start = -1
time.t_end = 4
time.n_points = 11
frames.theta = 0, 0.7853981633974483
frames.mu = 1, 0.5
frames.nu = 2, 0
x_grid.x_min = -3
x_grid.x_max = 3
x_grid.n_points = 7
outputs = squeezing, trajectory
";
        let s = Scenario::parse("full", text).unwrap();
        assert_eq!(s.params.kick_times(), &[0.0, 2.5]);
        assert_eq!(s.alpha, CoherentLabel::new(0.5, -0.25));
        assert_eq!(s.time.points(), vec![-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0]);
        assert_eq!(s.frames.len(), 4);
        assert_eq!(s.frames[2].params(), FrameParams::new(1.0, 2.0).unwrap());
        assert_eq!(s.x_grid.points().len(), 7);
        assert_eq!(s.outputs, vec![Artifact::Trajectory, Artifact::Squeezing]);
    }

    #[test]
    fn hash_ignores_order_spacing_and_comments() {
        let a = Scenario::parse("a", "params.omega0=1\nparams.gamma=0.2\nparams.kappa=1\nframes.theta=0,1")
            .unwrap();
        let b = Scenario::parse(
            "b",
            "# x\nparams.kappa = 1\n\nframes.theta = 0 , 1\nparams.gamma = 0.2\nparams.omega0 = 1\n",
        )
        .unwrap();
        assert_eq!(a.hash(), b.hash());
        let c = Scenario::parse("c", "params.omega0=1\nparams.gamma=0.2\nparams.kappa=2").unwrap();
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn rejects_bad_input() {
        let cases = [
            ("params.omega0 = 1\nparams.gamma = 0.2", "missing"),
            ("params.omega = 1", "unknown key"),
            ("params.omega0 = 1\nparams.omega0 = 2", "already set"),
            ("params.omega0 = x", "cannot parse"),
            ("params.omega0 1", "expected"),
            ("params.omega0 =", "no value"),
        ];
        for (text, needle) in cases {
            let e = Scenario::parse("bad", text).unwrap_err();
            assert!(e.to_string().contains(needle), "{text:?} gave {e}");
        }
        let bad_tail = [
            "time.n_points = 0",
            "time.t_start = 5\ntime.t_end = 1",
            "state.alpha = 1",
            "frames.mu = 1",
            "frames.mu = 0\nframes.nu = 0",
            "outputs = movie",
            "params.kick_times = 2, 1",
        ];
        for tail in bad_tail {
            assert!(Scenario::parse("bad", &format!("{BASIC}{tail}")).is_err(), "{tail}");
        }
    }

    #[test]
    fn critical_damping_is_a_config_error() {
        let e = Scenario::parse("crit", "params.omega0 = 1\nparams.gamma = 1\nparams.kappa = 0").unwrap_err();
        assert!(e.to_string().contains("critical"), "{e}");
    }

    #[test]
    fn single_point_grid() {
        let s =
            Scenario::parse("one", &format!("{BASIC}time.t_start = 2\ntime.t_end = 2\ntime.n_points = 1"))
                .unwrap();
        assert_eq!(s.time.points(), vec![2.0]);
    }
}
