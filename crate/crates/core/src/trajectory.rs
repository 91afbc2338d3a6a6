//! Complex classical trajectory of the kicked Caldirola-Kanai oscillator.
//!
//! The trajectory solves
//!
//! ```text
//! ε'' + 2γ ε' + ω²(t) ε = 0,    ω²(t) = ω0² − 2κ Σ_k δ(t − t_k),
//! ```
//!
//! starting from the coherent-state data ε(0) = 1, ε'(0) = iΩ, where Ω is the
//! regime's effective frequency. Between kicks ε is a combination of two
//! exponential modes; each kick keeps ε continuous and shifts ε' by 2κε.
//!
//! Two evaluation routes are provided. [`epsilon_closed`] uses explicit
//! trajectory-space formulas when there is a single kick at the origin, and
//! [`KickedTrajectory`] propagates mode coefficients through arbitrary kick
//! sequences with [`TransferMatrix`].
//!
//! At a kick instant `t_k` the trajectory is reported with its left limit
//! (the kick has not yet acted); [`KickedTrajectory::limit`] gives either side.

use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Physical configuration with m = ħ = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorParams {
    omega0: f64,
    gamma: f64,
    kappa: f64,
    kick_times: Vec<f64>,
}

impl OscillatorParams {
    /// Single kick of strength `kappa` at t = 0.
    pub fn new(omega0: f64, gamma: f64, kappa: f64) -> Result<Self> {
        Self::with_kicks(omega0, gamma, kappa, vec![0.0])
    }

    /// `kick_times` must be finite, non-negative and strictly increasing. An
    /// empty list means no kick at all.
    pub fn with_kicks(omega0: f64, gamma: f64, kappa: f64, kick_times: Vec<f64>) -> Result<Self> {
        if !omega0.is_finite() || omega0 < 0.0 {
            return Err(Error::InvalidParams(format!("omega0 must be finite and >= 0, got {omega0}")));
        }
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::InvalidParams(format!("gamma must be finite and >= 0, got {gamma}")));
        }
        if !kappa.is_finite() {
            return Err(Error::InvalidParams(format!("kappa must be finite, got {kappa}")));
        }
        if let Some(bad) = kick_times.iter().find(|t| !t.is_finite() || **t < 0.0) {
            return Err(Error::InvalidParams(format!("kick times must be finite and >= 0, got {bad}")));
        }
        if kick_times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParams("kick times must be strictly increasing".into()));
        }
        Ok(Self { omega0, gamma, kappa, kick_times })
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn kick_times(&self) -> &[f64] {
        &self.kick_times
    }

    /// True for the configuration the explicit single-kick formulas describe.
    pub fn is_single_kick_at_origin(&self) -> bool {
        self.kick_times == [0.0]
    }

    pub fn regime(&self) -> Result<Regime> {
        classify_regime(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `omega0 > gamma >= 0`: oscillating modes e^{(−γ ± iΩ)t}.
    WeakDamping,
    /// `gamma > omega0 > 0`: real modes e^{(±Ω − γ)t}.
    StrongDamping,
    /// `omega0 = 0, gamma > 0`: modes 1 and e^{−2γt}.
    FreeParticle,
}

pub fn classify_regime(params: &OscillatorParams) -> Result<Regime> {
    let (w0, g) = (params.omega0, params.gamma);
    if w0 == 0.0 && g == 0.0 {
        Err(Error::DegenerateOscillator)
    } else if w0 == g {
        Err(Error::CriticalDamping(g))
    } else if w0 == 0.0 {
        Ok(Regime::FreeParticle)
    } else if w0 > g {
        Ok(Regime::WeakDamping)
    } else {
        Ok(Regime::StrongDamping)
    }
}

/// Ω used by every moment formula: √(ω0² − γ²) (weak), √(γ² − ω0²) (strong),
/// γ (free particle). In each case the initial data satisfy ε'(0) = iΩ.
pub fn effective_frequency(params: &OscillatorParams) -> Result<f64> {
    let (w0, g) = (params.omega0, params.gamma);
    Ok(match classify_regime(params)? {
        Regime::WeakDamping => ((w0 - g) * (w0 + g)).sqrt(),
        Regime::StrongDamping => ((g - w0) * (g + w0)).sqrt(),
        Regime::FreeParticle => g,
    })
}

/// ε(t) and ε'(t) at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub eps: Complex64,
    pub eps_dot: Complex64,
}

/// e^{2γt}(ε'ε* − ε'*ε). Equals 2iΩ on every valid trajectory.
pub fn wronskian(point: &TrajectoryPoint, gamma: f64) -> Complex64 {
    let TrajectoryPoint { t, eps, eps_dot } = *point;
    (eps_dot * eps.conj() - eps_dot.conj() * eps) * (2.0 * gamma * t).exp()
}

/// Coefficients (A, B) of the two modes, relative to some time origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoefficients {
    pub a: Complex64,
    pub b: Complex64,
}

/// 2×2 complex map from pre-kick to post-kick mode coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix(pub [[Complex64; 2]; 2]);

impl TransferMatrix {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self([[one, zero], [zero, one]])
    }

    /// The kick matrix ((1 + d, d), (−d, 1 − d)); unimodular for every d.
    fn kick(d: Complex64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self([[one + d, d], [-d, one - d]])
    }

    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn apply(&self, c: ModeCoefficients) -> ModeCoefficients {
        let m = &self.0;
        ModeCoefficients { a: m[0][0] * c.a + m[0][1] * c.b, b: m[1][0] * c.a + m[1][1] * c.b }
    }
}

impl Mul for TransferMatrix {
    type Output = TransferMatrix;

    fn mul(self, rhs: TransferMatrix) -> TransferMatrix {
        let (l, r) = (&self.0, &rhs.0);
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = l[i][0] * r[0][j] + l[i][1] * r[1][j];
            }
        }
        TransferMatrix(out)
    }
}

/// Kick matrix for a kick acting at the origin of the coefficient frame.
///
/// weak: d = −iκ/Ω, strong: d = κ/Ω, free: d = κ/γ.
pub fn transfer_matrix(params: &OscillatorParams) -> Result<TransferMatrix> {
    let basis = ModeBasis::new(params)?;
    Ok(basis.kick_matrix(params.kappa))
}

/// The pair of exponential modes e^{λ1 τ}, e^{λ2 τ} of one regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeBasis {
    regime: Regime,
    gamma: f64,
    omega: f64,
}

impl ModeBasis {
    pub fn new(params: &OscillatorParams) -> Result<Self> {
        Ok(Self {
            regime: classify_regime(params)?,
            gamma: params.gamma,
            omega: effective_frequency(params)?,
        })
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Exponents (λ1, λ2).
    pub fn rates(&self) -> (Complex64, Complex64) {
        let (g, w) = (self.gamma, self.omega);
        match self.regime {
            Regime::WeakDamping => (Complex64::new(-g, w), Complex64::new(-g, -w)),
            Regime::StrongDamping => (Complex64::new(w - g, 0.0), Complex64::new(-g - w, 0.0)),
            Regime::FreeParticle => (Complex64::new(0.0, 0.0), Complex64::new(-2.0 * g, 0.0)),
        }
    }

    pub fn kick_matrix(&self, kappa: f64) -> TransferMatrix {
        let d = match self.regime {
            Regime::WeakDamping => Complex64::new(0.0, -kappa / self.omega),
            Regime::StrongDamping => Complex64::new(kappa / self.omega, 0.0),
            Regime::FreeParticle => Complex64::new(kappa / self.gamma, 0.0),
        };
        TransferMatrix::kick(d)
    }

    /// Coefficients at origin 0 of the branch with ε(0) = 1, ε'(0) = iΩ.
    ///
    /// weak: (1 − iγ/2Ω, iγ/2Ω); strong: ((1 + i + γ/Ω)/2, (1 − i − γ/Ω)/2);
    /// free: (1 + i/2, −i/2).
    pub fn initial_coefficients(&self) -> ModeCoefficients {
        let (g, w) = (self.gamma, self.omega);
        match self.regime {
            Regime::WeakDamping => ModeCoefficients {
                a: Complex64::new(1.0, -g / (2.0 * w)),
                b: Complex64::new(0.0, g / (2.0 * w)),
            },
            Regime::StrongDamping => ModeCoefficients {
                a: Complex64::new(1.0 + g / w, 1.0) * 0.5,
                b: Complex64::new(1.0 - g / w, -1.0) * 0.5,
            },
            Regime::FreeParticle => {
                ModeCoefficients { a: Complex64::new(1.0, 0.5), b: Complex64::new(0.0, -0.5) }
            }
        }
    }

    /// Re-expresses coefficients relative to an origin shifted by `dt`.
    pub fn shift(&self, c: ModeCoefficients, dt: f64) -> ModeCoefficients {
        let (l1, l2) = self.rates();
        ModeCoefficients { a: c.a * (l1 * dt).exp(), b: c.b * (l2 * dt).exp() }
    }

    /// (ε, ε') at `tau` time units after the coefficients' origin.
    pub fn eval(&self, c: ModeCoefficients, tau: f64) -> (Complex64, Complex64) {
        let (l1, l2) = self.rates();
        let m1 = c.a * (l1 * tau).exp();
        let m2 = c.b * (l2 * tau).exp();
        (m1 + m2, l1 * m1 + l2 * m2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Before,
    After,
}

/// Trajectory through an arbitrary kick sequence, held as mode coefficients
/// per inter-kick segment.
#[derive(Debug, Clone)]
pub struct KickedTrajectory {
    basis: ModeBasis,
    /// `segments[0]` has origin 0 and holds the pre-kick branch;
    /// `segments[k + 1]` starts at `kick_times[k]`, with the kick applied.
    segments: Vec<(f64, ModeCoefficients)>,
}

impl KickedTrajectory {
    pub fn new(params: &OscillatorParams) -> Result<Self> {
        let basis = ModeBasis::new(params)?;
        let kick = basis.kick_matrix(params.kappa);
        let mut segments = Vec::with_capacity(params.kick_times.len() + 1);
        let (mut origin, mut coeffs) = (0.0, basis.initial_coefficients());
        segments.push((origin, coeffs));
        for &tk in &params.kick_times {
            coeffs = kick.apply(basis.shift(coeffs, tk - origin));
            origin = tk;
            segments.push((origin, coeffs));
        }
        Ok(Self { basis, segments })
    }

    pub fn basis(&self) -> &ModeBasis {
        &self.basis
    }

    /// Segment origins and coefficients, pre-kick segment first.
    pub fn segments(&self) -> &[(f64, ModeCoefficients)] {
        &self.segments
    }

    /// Value at `t`, with the left limit at kick instants.
    pub fn at(&self, t: f64) -> TrajectoryPoint {
        self.limit(t, Side::Before)
    }

    pub fn limit(&self, t: f64, side: Side) -> TrajectoryPoint {
        let idx = match side {
            Side::Before => self.segments[1..].partition_point(|(tk, _)| *tk < t),
            Side::After => self.segments[1..].partition_point(|(tk, _)| *tk <= t),
        };
        let (origin, coeffs) = self.segments[idx];
        let (eps, eps_dot) = self.basis.eval(coeffs, t - origin);
        TrajectoryPoint { t, eps, eps_dot }
    }
}

/// Explicit trajectory-space branches for a single kick at the origin.
///
/// Every branch has the same shape before and after the kick; the kick only
/// replaces the drift coefficient `c = γ` by `c = γ + 2κ`.
mod branch {
    use super::*;

    /// e^{−γt}[e^{iΩt} + (c/Ω) sin Ωt]
    pub fn weak(gamma: f64, omega: f64, c: f64, t: f64) -> (Complex64, Complex64) {
        let decay = (-gamma * t).exp();
        let (s, co) = (omega * t).sin_cos();
        let phase = Complex64::new(co, s);
        let eps = (phase + c / omega * s) * decay;
        let eps_dot = -gamma * eps + (I * omega * phase + c * co) * decay;
        (eps, eps_dot)
    }

    /// e^{−γt}[cosh Ωt + sinh Ωt (i + c/Ω)]
    pub fn strong(gamma: f64, omega: f64, c: f64, t: f64) -> (Complex64, Complex64) {
        let decay = (-gamma * t).exp();
        let (sh, ch) = ((omega * t).sinh(), (omega * t).cosh());
        let drift = Complex64::new(c / omega, 1.0);
        let eps = (ch + sh * drift) * decay;
        let eps_dot = -gamma * eps + (omega * sh + omega * ch * drift) * decay;
        (eps, eps_dot)
    }

    /// 1 + (κ/γ)(1 − e^{−2γt}) + (i/2)(1 − e^{−2γt})
    pub fn free(gamma: f64, kappa: f64, t: f64) -> (Complex64, Complex64) {
        let decay = (-2.0 * gamma * t).exp();
        let u = -(-2.0 * gamma * t).exp_m1();
        let drift = Complex64::new(kappa / gamma, 0.5);
        (1.0 + drift * u, drift * (2.0 * gamma * decay))
    }
}

fn explicit_branch(basis: &ModeBasis, kappa: f64, post_kick: bool, t: f64) -> (Complex64, Complex64) {
    let (g, w) = (basis.gamma, basis.omega);
    let k = if post_kick { kappa } else { 0.0 };
    match basis.regime {
        Regime::WeakDamping => branch::weak(g, w, g + 2.0 * k, t),
        Regime::StrongDamping => branch::strong(g, w, g + 2.0 * k, t),
        Regime::FreeParticle => branch::free(g, k, t),
    }
}

/// ε(t) in closed form.
///
/// For a single kick at the origin this evaluates the explicit branch formulas
/// (left limit at t = 0); any other kick sequence goes through
/// [`KickedTrajectory`].
pub fn epsilon_closed(params: &OscillatorParams, t: f64) -> Result<TrajectoryPoint> {
    if params.is_single_kick_at_origin() || params.kick_times.is_empty() {
        let basis = ModeBasis::new(params)?;
        let post = !params.kick_times.is_empty() && t > 0.0;
        let (eps, eps_dot) = explicit_branch(&basis, params.kappa, post, t);
        Ok(TrajectoryPoint { t, eps, eps_dot })
    } else {
        Ok(KickedTrajectory::new(params)?.at(t))
    }
}

/// Right limit ε(0⁺) / ε'(0⁺) style evaluation of the explicit branches:
/// the post-kick branch evaluated at any `t`, for a single kick at the origin.
pub fn epsilon_post_kick(params: &OscillatorParams, t: f64) -> Result<TrajectoryPoint> {
    if !params.is_single_kick_at_origin() {
        return Err(Error::InvalidParams("explicit post-kick branch requires a single kick at t = 0".into()));
    }
    let basis = ModeBasis::new(params)?;
    let (eps, eps_dot) = explicit_branch(&basis, params.kappa, true, t);
    Ok(TrajectoryPoint { t, eps, eps_dot })
}

/// Element-wise [`epsilon_closed`] over `t_grid`.
pub fn trajectory_series(params: &OscillatorParams, t_grid: &[f64]) -> Result<Vec<TrajectoryPoint>> {
    if params.is_single_kick_at_origin() || params.kick_times.is_empty() {
        t_grid.iter().map(|&t| epsilon_closed(params, t)).collect()
    } else {
        let traj = KickedTrajectory::new(params)?;
        Ok(t_grid.iter().map(|&t| traj.at(t)).collect())
    }
}
