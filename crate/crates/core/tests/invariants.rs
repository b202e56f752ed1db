use impulse_cd::kzm::{ImpulseWindow, SwitchingFunction};
use impulse_cd::lz::{lz_cost_analytic, lz_impulse_window};
use impulse_cd::protocol::{cost_report, simulate, ControlMode, Protocol};
use impulse_cd::tfim::{tfim_impulse_window, SpinModel, TruncationRange};
use impulse_cd::{LzParams, MomentumModel, TfimParams};
use proptest::prelude::*;

fn lz(tau: f64) -> LzParams {
    LzParams::new(1.0, -10.0, tau).unwrap()
}

#[test]
fn full_control_tracks_ground_state_at_all_times() {
    for tau in [1.0, 5.0, 10.0, 25.0] {
        let trace = simulate(&lz(tau), &Protocol::new(ControlMode::Full)).unwrap().trace;
        assert!(trace.min_fidelity() >= 1.0 - 1e-6, "tau = {tau}: {}", trace.min_fidelity());
    }
}

#[test]
fn slow_uncontrolled_ramp_dips_and_revives() {
    let trace = simulate(&lz(25.0), &Protocol::new(ControlMode::Uncontrolled)).unwrap().trace;
    assert!(trace.min_fidelity() < trace.final_fidelity() - 0.01);
}

#[test]
fn impulse_fidelity_is_frozen_inside_the_window() {
    let p = lz(5.0);
    let r = simulate(&p, &Protocol::new(ControlMode::Impulse)).unwrap();
    let inside: Vec<f64> = r
        .trace
        .times
        .iter()
        .zip(&r.trace.fidelity)
        .filter(|(t, _)| **t > r.window.t_minus + 0.05 && **t < r.window.t_plus - 0.05)
        .map(|(_, f)| *f)
        .collect();
    assert!(!inside.is_empty());
    let spread = inside.iter().cloned().fold(f64::MIN, f64::max) - inside.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 1e-3, "{spread}");
}

#[test]
fn truncated_spin_control_cost_is_below_exact() {
    let p = TfimParams::new(6, 1.0, 0.01, 2.0).unwrap();
    let proto = Protocol::new(ControlMode::Full);
    let mut previous = f64::INFINITY;
    for m in (1..=3).rev() {
        let model = SpinModel::new(p, TruncationRange::new(m, 6).unwrap()).unwrap();
        let c = cost_report(&model, &proto).unwrap();
        let applied = c.cost - c.delta_e;
        assert!(applied <= previous + 1e-12);
        assert!(c.delta_e >= -1e-12);
        previous = applied;
        if m == 3 {
            assert!(c.delta_e.abs() < 1e-12 * c.cost);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn switching_is_bounded(m in 1.0f64..1000.0, tau in 0.1f64..50.0, frac in 0.0f64..1.0, t in -10.0f64..60.0) {
        let sw = SwitchingFunction::new(m, ImpulseWindow::symmetric(tau, 0.5 * tau * frac)).unwrap();
        let (s, c) = (sw.value(t), sw.complement(t));
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert!((s + c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lz_cost_scales_inversely_with_quench_time(tau in 0.1f64..100.0, g0 in -50.0f64..-0.1) {
        let a = LzParams::new(1.0, g0, tau).unwrap();
        let b = LzParams::new(1.0, g0, 2.0 * tau).unwrap();
        prop_assert!((lz_cost_analytic(&a) - 2.0 * lz_cost_analytic(&b)).abs() < 1e-12 * lz_cost_analytic(&a));
        let w = lz_impulse_window(&a);
        prop_assert!((w.t_minus + w.t_plus - tau).abs() < 1e-9 * tau);
        prop_assert!(0.0 <= w.t_minus && w.t_minus <= 0.5 * tau);
    }

    #[test]
    fn lz_savings_bounded_and_bound_attained(tau in 0.2f64..40.0) {
        let c = cost_report(&lz(tau), &Protocol::new(ControlMode::Impulse)).unwrap();
        prop_assert!(c.delta_e >= 0.0 && c.delta_e <= c.cost);
        prop_assert!((0.0..=1.0).contains(&c.ratio));
        let lb = c.lower_bound.unwrap();
        prop_assert!((lb - c.cost).abs() <= 1e-8 * c.cost);
    }

    #[test]
    fn tfim_window_is_symmetric_and_ratio_bounded(half_n in 2usize..10, tau in 0.6f64..40.0, g0 in 0.0f64..0.9) {
        let p = TfimParams::new(2 * half_n, 1.0, g0, tau).unwrap();
        let w = tfim_impulse_window(&p).unwrap();
        prop_assert!((w.t_minus + w.t_plus - tau).abs() < 1e-9 * tau);
        let c = cost_report(&MomentumModel::new(p), &Protocol::new(ControlMode::Impulse)).unwrap();
        prop_assert!((0.0..=1.0).contains(&c.ratio));
        let a = c.analytic.unwrap();
        prop_assert!((a.cost - c.cost).abs() < 1e-8 * c.cost);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn evolution_preserves_norm_and_bounds_fidelity(tau in 0.5f64..8.0, mode_ix in 0usize..3) {
        let mode = [ControlMode::Uncontrolled, ControlMode::Full, ControlMode::Impulse][mode_ix];
        let trace = simulate(&lz(tau), &Protocol::new(mode).with_samples(50)).unwrap().trace;
        prop_assert!(trace.max_norm_drift() < 1e-8);
        prop_assert!(trace.fidelity.iter().all(|f| *f <= 1.0 + 1e-8 && *f >= 0.0));
    }
}
