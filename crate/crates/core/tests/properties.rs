use std::f64::consts::PI;

use kicktomo::moments::{first_moments, second_moments};
use kicktomo::oracle::{integrate_ode, minimize_k2_numeric, IntegratorConfig};
use kicktomo::tomography::{entropic_check, homogeneity_residual, slice, symplectic_tomogram, GaussianState};
use kicktomo::trajectory::{
    effective_frequency, epsilon_closed, transfer_matrix, wronskian, KickedTrajectory, Side,
};
use kicktomo::{CoherentLabel, FrameParams, OpticalAngle, OscillatorParams};
use num_complex::Complex64;
use proptest::prelude::*;

fn weak() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.5..2.0f64, 0.0..0.9f64, -2.0..2.0f64).prop_map(|(w, f, k)| (w, f * w, k))
}

fn strong() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.2..2.0f64, 1.1..2.5f64, -2.0..2.0f64).prop_map(|(w, f, k)| (w, (f * w).min(5.0), k))
}

fn free() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.1..3.0f64, -2.0..2.0f64).prop_map(|(g, k)| (0.0, g, k))
}

fn any_regime() -> impl Strategy<Value = (f64, f64, f64)> {
    prop_oneof![weak(), strong(), free()]
}

fn params((w, g, k): (f64, f64, f64)) -> OscillatorParams {
    OscillatorParams::new(w, g, k).unwrap()
}

fn state(p: &OscillatorParams, alpha: CoherentLabel, t: f64) -> GaussianState {
    let omega = effective_frequency(p).unwrap();
    let pt = epsilon_closed(p, t).unwrap();
    GaussianState {
        first: first_moments(&pt, alpha, p.gamma(), omega),
        second: second_moments(&pt, p.gamma(), omega),
    }
}

fn frame() -> impl Strategy<Value = FrameParams> {
    (-3.0..3.0f64, -3.0..3.0f64)
        .prop_filter("not the zero frame", |(m, n)| m.hypot(*n) > 1e-3)
        .prop_map(|(m, n)| FrameParams::new(m, n).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn kick_matrices_are_unimodular(p in any_regime()) {
        let m = transfer_matrix(&params(p)).unwrap();
        prop_assert!((m.det() - 1.0).norm() < 1e-14, "{:?}", m.det());
    }
}

proptest! {
    #[test]
    fn kicks_at_one_instant_add(p in any_regime(), k2 in -2.0..2.0f64) {
        let (w, g, k1) = p;
        let a = transfer_matrix(&params((w, g, k1))).unwrap();
        let b = transfer_matrix(&params((w, g, k2))).unwrap();
        let ab = transfer_matrix(&params((w, g, k1 + k2))).unwrap();
        let prod = a * b;
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((prod.0[i][j] - ab.0[i][j]).norm() < 1e-12 * (1.0 + ab.0[i][j].norm()));
            }
        }
    }

    #[test]
    fn zero_kick_is_identity(p in any_regime(), t in -2.0..10.0f64) {
        let (w, g, _) = p;
        let m = transfer_matrix(&params((w, g, 0.0))).unwrap();
        prop_assert_eq!(m, kicktomo::TransferMatrix::identity());
        let kicked = epsilon_closed(&params((w, g, 0.0)), t).unwrap();
        let plain = epsilon_closed(&OscillatorParams::with_kicks(w, g, 0.0, vec![]).unwrap(), t).unwrap();
        prop_assert!((kicked.eps - plain.eps).norm() <= 1e-15 * plain.eps.norm().max(1.0));
    }

    /// The roundoff in e^{2γt}(ε'ε* − c.c.) scales with the size of the terms,
    /// e^{2γt}|ε||ε'|, which grows like e^{2Ωt} under strong damping.
    #[test]
    fn wronskian_is_conserved(p in any_regime(), t in -1.0..10.0f64) {
        let p = params(p);
        let omega = effective_frequency(&p).unwrap();
        let pt = epsilon_closed(&p, t).unwrap();
        let scale = (2.0 * p.gamma() * t).exp() * pt.eps.norm() * pt.eps_dot.norm();
        let defect = (wronskian(&pt, p.gamma()) - Complex64::new(0.0, 2.0 * omega)).norm();
        prop_assert!(defect <= 1e-13 * scale.max(1.0), "defect {defect:e}, scale {scale:e}");
    }

    #[test]
    fn wronskian_is_conserved_absolutely_without_hyperbolic_growth(
        p in prop_oneof![weak(), free()],
        t in 0.0..10.0f64,
    ) {
        let p = params(p);
        let omega = effective_frequency(&p).unwrap();
        let pt = epsilon_closed(&p, t).unwrap();
        prop_assert!((wronskian(&pt, p.gamma()) - Complex64::new(0.0, 2.0 * omega)).norm() < 1e-9);
    }

    #[test]
    fn uncertainty_is_saturated(p in any_regime(), t in -1.0..10.0f64) {
        let p = params(p);
        let omega = effective_frequency(&p).unwrap();
        let m = second_moments(&epsilon_closed(&p, t).unwrap(), p.gamma(), omega);
        prop_assert!(m.sigma_qq > 0.0 && m.sigma_pp > 0.0);
        prop_assert!(m.uncertainty_defect() <= 1e-13 * (m.sigma_qq * m.sigma_pp).max(1.0));
    }

    #[test]
    fn tomogram_is_positive_and_homogeneous(
        p in any_regime(),
        t in 0.0..3.0f64,
        (ar, ai) in (-2.0..2.0f64, -2.0..2.0f64),
        f in frame(),
        lambda in prop_oneof![-5.0..-0.1f64, 0.1..5.0f64],
        x in -5.0..5.0f64,
    ) {
        let p = params(p);
        let st = state(&p, CoherentLabel::new(ar, ai), t);
        prop_assert!(slice(&st, f).variance > 0.0);
        let w = symplectic_tomogram(&st, f, x);
        prop_assert!(w >= 0.0 && w.is_finite());
        let r = homogeneity_residual(&st, f, lambda, x).unwrap();
        prop_assert!(r <= 1e-12 * (w / lambda.abs()).max(1.0), "{r:e}");
    }

    #[test]
    fn entropic_inequality_holds(
        p in prop_oneof![weak(), free()],
        t in 0.0..10.0f64,
        theta in 0.0..PI,
    ) {
        let p = params(p);
        let st = state(&p, CoherentLabel::new(0.3, -0.1), t);
        let r = entropic_check(&st, OpticalAngle(theta)).unwrap();
        prop_assert!(r.satisfied, "{r:?}");
    }

    #[test]
    fn weak_kick_limit_is_continuous(p in prop_oneof![weak(), free()], t in 0.0..10.0f64) {
        let (w, g, _) = p;
        let base = epsilon_closed(&params((w, g, 0.0)), t).unwrap();
        for kappa in [1e-4, -1e-6, 1e-8] {
            let pt = epsilon_closed(&params((w, g, kappa)), t).unwrap();
            // |dε/dκ| stays below 2t/Ω for these regimes
            let omega = effective_frequency(&params((w, g, 0.0))).unwrap();
            prop_assert!((pt.eps - base.eps).norm() <= kappa.abs() * (2.0 * t / omega + 1.0));
        }
    }

    #[test]
    fn coefficient_and_explicit_forms_agree(p in any_regime(), t in -1.0..10.0f64) {
        let p = params(p);
        let coeff = KickedTrajectory::new(&p).unwrap().at(t);
        let explicit = epsilon_closed(&p, t).unwrap();
        prop_assert!((coeff.eps - explicit.eps).norm() <= 1e-12 * explicit.eps.norm().max(1.0));
        prop_assert!((coeff.eps_dot - explicit.eps_dot).norm() <= 1e-12 * explicit.eps_dot.norm().max(1.0));
    }

    #[test]
    fn kicks_jump_only_the_derivative(
        p in any_regime(),
        times in proptest::collection::btree_set(0u32..400, 1..5),
    ) {
        let (w, g, k) = p;
        let kicks: Vec<f64> = times.into_iter().map(|i| f64::from(i) * 0.01).collect();
        let par = OscillatorParams::with_kicks(w, g, k, kicks.clone()).unwrap();
        let traj = KickedTrajectory::new(&par).unwrap();
        for tk in kicks {
            let before = traj.limit(tk, Side::Before);
            let after = traj.limit(tk, Side::After);
            let size = before.eps.norm().max(before.eps_dot.norm()).max(1.0);
            prop_assert!((after.eps - before.eps).norm() <= 1e-12 * size);
            prop_assert!((after.eps_dot - before.eps_dot - 2.0 * k * before.eps).norm() <= 1e-12 * size);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn minimizer_is_not_beaten_by_sampling(p in prop_oneof![weak(), free()], seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let p = params(p);
        let (t_star, k2_min) = minimize_k2_numeric(&p, 0.0, 10.0).unwrap();
        prop_assert!((0.0..=10.0).contains(&t_star));
        let traj = KickedTrajectory::new(&p).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10_000 {
            let t = rng.gen_range(0.0..10.0);
            let k2 = traj.at(t).eps.norm_sqr();
            prop_assert!(k2_min <= k2 + 1e-12 * k2, "k2({t}) = {k2} < {k2_min}");
        }
    }

    #[test]
    fn tighter_integrator_tolerance_is_not_worse(p in any_regime(), t in 1.0..5.0f64) {
        let p = params(p);
        let exact = epsilon_closed(&p, t).unwrap();
        let err = |rel: f64| {
            let pt = integrate_ode(&p, t, &IntegratorConfig::with_tolerances(rel, 0.0)).unwrap();
            (pt.eps - exact.eps).norm() / exact.eps.norm()
        };
        let (loose, tight) = (err(1e-6), err(1e-10));
        prop_assert!(tight <= loose.max(1e-12), "1e-10: {tight:e}, 1e-6: {loose:e}");
        prop_assert!(tight < 1e-8);
    }
}
