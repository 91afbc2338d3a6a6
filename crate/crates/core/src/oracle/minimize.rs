use crate::error::{Error, Result};
use crate::trajectory::{KickedTrajectory, OscillatorParams};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a local minimum of `f` on `[a, b]`, stopping
/// once the bracket is narrower than `x_tol`. Returns `(x_min, f_min)`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, x_tol: f64) -> (f64, f64) {
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a) > x_tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (a + b);
    let candidates = [(x1, f1), (x2, f2), (mid, f(mid))];
    candidates.into_iter().min_by(|p, q| p.1.total_cmp(&q.1)).expect("three candidates")
}

/// Global minimum of `f` on `[lo, hi]`: a uniform scan over `n` points picks
/// the best basin, golden-section refines it.
pub fn scan_then_refine(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize, x_tol: f64) -> (f64, f64) {
    let n = n.max(3);
    let dt = (hi - lo) / (n - 1) as f64;
    let grid = |i: usize| if i + 1 == n { hi } else { lo + i as f64 * dt };
    let (best, _) =
        (0..n).map(|i| (i, f(grid(i)))).min_by(|p, q| p.1.total_cmp(&q.1)).expect("non-empty grid");
    let a = grid(best.saturating_sub(1));
    let b = grid((best + 1).min(n - 1));
    let refined = golden_section(&f, a, b, x_tol);
    let at_grid = (grid(best), f(grid(best)));
    if at_grid.1 < refined.1 {
        at_grid
    } else {
        refined
    }
}

pub const SCAN_POINTS: usize = 1024;
pub const TIME_TOL: f64 = 1e-11;

/// Global minimizer `(t_star, k2_min)` of |ε(t)|² on `[t_lo, t_hi]`.
pub fn minimize_k2_numeric(params: &OscillatorParams, t_lo: f64, t_hi: f64) -> Result<(f64, f64)> {
    if t_lo >= t_hi || !t_lo.is_finite() || !t_hi.is_finite() {
        return Err(Error::InvalidParams(format!("need finite t_lo < t_hi, got [{t_lo}, {t_hi}]")));
    }
    let traj = KickedTrajectory::new(params)?;
    let k2 = |t: f64| traj.at(t).eps.norm_sqr();
    Ok(scan_then_refine(k2, t_lo, t_hi, SCAN_POINTS, TIME_TOL))
}
