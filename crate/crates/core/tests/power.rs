use rand::Rng;
use secalign::fading::{sample_state, FadingParams};
use secalign::power::verify::esa_cj_violations;
use secalign::power::{
    closed_form_p1, dual_search, dual_search_with, esa_case_policy, esa_cj_case_policy,
    esa_cj_kkt_residual, esa_cj_lagrangian, grid_oracle, solve_p1q2, solve_p2q1, CjBranch,
    DualScheme, DualSearchConfig, DualVars, EffectiveState, EsaKktPolicy, GridScheme,
};
use secalign::sampling::stream_rng;
use secalign::{ergodic_region_with, rates_esa_cj, Exec, PowerBudget, PowerDecision, Scheme};

#[test]
fn closed_form_grows_without_bound_as_price_vanishes() {
    let s = EffectiveState::new(2.0, 1.0, 1.0, 1.0).unwrap();
    let mut last = 0.0;
    for k in 0..12 {
        let lambda = 0.9 * 10f64.powi(-k);
        let p = closed_form_p1(&s, lambda).unwrap();
        assert!(p > last, "{p} after {last}");
        last = p;
        if k == 11 {
            // For large P the condition reduces to (1/g − 1/h)/P² ≈ λ.
            let asymptote = ((1.0 / s.g1 - 1.0 / s.h1) / lambda).sqrt();
            assert!((p / asymptote - 1.0).abs() < 1e-3, "{p} vs {asymptote}");
        }
    }
}

#[test]
fn transmit_jam_root_matches_a_fine_grid() {
    let s = EffectiveState::new(5.0, 0.1, 1.0, 4.0).unwrap();
    let duals = DualVars::new(0.05, 0.05).unwrap();
    let (p1, q2) = solve_p1q2(&s, &duals).unwrap().expect("root exists");
    assert!(p1 > 0.0 && q2 > 0.0);
    let d = PowerDecision::new(p1, 0.0, 0.0, q2);
    let v = esa_cj_violations(&s, &d, &duals, 1e-9);
    assert!(v.is_empty(), "{v:?}");
    let root_value = esa_cj_lagrangian(&s, &d, &duals);

    // 400 x 400 grid over (P1, Q2) in [0, 1/λ].
    let n = 400;
    let step = 20.0 / (n - 1) as f64;
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (i as f64 * step, j as f64 * step);
            let value = esa_cj_lagrangian(&s, &PowerDecision::new(x, 0.0, 0.0, y), &duals);
            if value > best.0 {
                best = (value, x, y);
            }
        }
    }
    assert!(root_value >= best.0 - 1e-12, "{root_value} < {}", best.0);
    assert!(
        (best.1 - p1).abs() <= step && (best.2 - q2).abs() <= step,
        "grid argmax {best:?}, root ({p1}, {q2})"
    );
}

#[test]
fn jamming_root_needs_price_below_eavesdropper_gain() {
    let s = EffectiveState::new(5.0, 0.1, 1.0, 4.0).unwrap();
    assert_eq!(
        solve_p1q2(&s, &DualVars::new(0.05, 4.0).unwrap()).unwrap(),
        None
    );
    assert_eq!(
        solve_p1q2(&s, &DualVars::new(0.05, 7.0).unwrap()).unwrap(),
        None
    );
}

#[test]
fn symmetric_grid_argmax_is_near_the_common_root() {
    let s = EffectiveState::new(3.0, 3.0, 1.0, 1.0).unwrap();
    let duals = DualVars::new(0.1, 0.1).unwrap();
    let root = (2.5 + (2.5f64 * 2.5 + 4.0 * 0.6 * 1.9).sqrt()) / 1.2;
    let r = grid_oracle(&s, &duals, GridScheme::Esa, 10.0, 201).unwrap();
    let step = 10.0 / 200.0;
    assert!(
        (r.decision.p1 - root).abs() <= step && (r.decision.p2 - root).abs() <= step,
        "{r:?}"
    );
    let tree = esa_case_policy(&s, &duals).unwrap();
    assert!((tree.p1 - root).abs() < 1e-9 && (tree.p2 - root).abs() < 1e-9);
}

#[test]
fn splitting_grid_prefers_pure_decisions() {
    let params = FadingParams::symmetric(1.0, 1.5).unwrap();
    let mut rng = stream_rng(31, 0);
    let (n, grid_max) = (11, 5.0);
    let step = grid_max / (n - 1) as f64;
    for _ in 0..40 {
        let s = EffectiveState::from_channel(&sample_state(&params, &mut rng));
        let duals =
            DualVars::new(rng.random_range(0.05..1.0), rng.random_range(0.05..1.0)).unwrap();
        let best = grid_oracle(&s, &duals, GridScheme::EsaCjSplit, grid_max, n).unwrap();
        let d = best.decision;
        assert!(
            d.p1.min(d.q1) <= step && d.p2.min(d.q2) <= step,
            "{s:?} {duals:?}: {d:?}"
        );
        // The pure grid is a subset and must not be beaten by more than rounding.
        let pure = grid_oracle(&s, &duals, GridScheme::EsaCj, grid_max, n).unwrap();
        assert!(pure.value <= best.value + 1e-12);
    }
}

#[test]
fn esa_output_has_zero_jamming_residuals() {
    let params = FadingParams::symmetric(1.0, 0.75).unwrap();
    let mut rng = stream_rng(32, 0);
    for _ in 0..2000 {
        let s = EffectiveState::from_channel(&sample_state(&params, &mut rng));
        let duals =
            DualVars::new(rng.random_range(0.01..2.0), rng.random_range(0.01..2.0)).unwrap();
        let out = esa_case_policy(&s, &duals).unwrap();
        let res = esa_cj_kkt_residual(&s, &PowerDecision::transmit(out.p1, out.p2), &duals);
        if out.p1 > 0.0 {
            assert!(res[0].abs() <= 1e-8, "{res:?}");
        }
        if out.p2 > 0.0 {
            assert!(res[1].abs() <= 1e-8, "{res:?}");
        }
    }
}

#[test]
fn both_weak_choice_maximizes_instantaneous_sum_rate() {
    let params = FadingParams::symmetric(1.0, 1.5).unwrap();
    let mut rng = stream_rng(33, 0);
    let mut contested = 0;
    for _ in 0..20_000 {
        let s = EffectiveState::from_channel(&sample_state(&params, &mut rng));
        let duals = DualVars::new(
            10f64.powf(rng.random_range(-2.5..0.0)),
            10f64.powf(rng.random_range(-2.5..0.0)),
        )
        .unwrap();
        let out = esa_cj_case_policy(&s, &duals).unwrap();
        if out.branch != CjBranch::BothWeak('d') {
            continue;
        }
        let (Some((p1, q2)), Some((p2, q1))) = (
            solve_p1q2(&s, &duals).unwrap(),
            solve_p2q1(&s, &duals).unwrap(),
        ) else {
            continue;
        };
        contested += 1;
        let channel = s.to_channel();
        let chosen = rates_esa_cj(&channel, &out.decision).rsum;
        for d in [
            PowerDecision::new(p1, 0.0, 0.0, q2),
            PowerDecision::new(0.0, p2, q1, 0.0),
        ] {
            assert!(chosen >= rates_esa_cj(&channel, &d).rsum, "{s:?} {duals:?}");
        }
    }
    assert!(contested > 0, "no contested states drawn");
}

#[test]
fn realized_power_falls_as_the_price_rises() {
    let params = FadingParams::symmetric(1.0, 0.75).unwrap();
    let mut last = f64::INFINITY;
    for k in 0..12 {
        let lambda1 = 0.01 * 1.6f64.powi(k);
        let policy = EsaKktPolicy {
            duals: DualVars::new(lambda1, 0.2).unwrap(),
        };
        let est =
            ergodic_region_with(Scheme::Esa, &policy, &params, 5000, 7, Exec::default()).unwrap();
        assert!(
            est.power_mean[0] <= last * (1.0 + 1e-12),
            "λ1={lambda1}: {} after {last}",
            est.power_mean[0]
        );
        last = est.power_mean[0];
    }
}

#[test]
fn extreme_budgets() {
    let params = FadingParams::symmetric(1.0, 0.75).unwrap();
    let rich = dual_search(
        &params,
        &PowerBudget::symmetric(1e6).unwrap(),
        DualScheme::Esa,
        4000,
        5,
        1e-3,
    )
    .unwrap();
    assert!(
        rich.duals.lambda1 < 1e-5 && rich.duals.lambda2 < 1e-5,
        "{rich:?}"
    );
    let poor = dual_search(
        &params,
        &PowerBudget::symmetric(1e-6).unwrap(),
        DualScheme::Esa,
        4000,
        5,
        1e-3,
    )
    .unwrap();
    assert!(
        poor.duals.lambda1 > 1.0 && poor.duals.lambda2 > 1.0,
        "{poor:?}"
    );
    assert!(poor.realized.iter().all(|p| *p <= 1.01e-6));
}

#[test]
fn dual_search_is_thread_independent() {
    let params = FadingParams::symmetric(1.0, 1.5).unwrap();
    let budget = PowerBudget::new(3.0, 20.0).unwrap();
    let run = |exec| {
        let config = DualSearchConfig {
            n: 6000,
            exec,
            ..DualSearchConfig::default()
        };
        dual_search_with(&params, &budget, DualScheme::EsaCj, &config, 12).unwrap()
    };
    assert_eq!(run(Exec::Sequential), run(Exec::Parallel));
}
