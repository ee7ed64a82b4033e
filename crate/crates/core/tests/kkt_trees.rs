use rand::Rng;
use secalign::fading::{sample_state, FadingParams};
use secalign::power::verify::{esa_cj_violations, esa_violations};
use secalign::power::{
    esa_case_policy, esa_cj_case_policy, esa_cj_kkt_points, esa_cj_lagrangian, esa_kkt_points,
    esa_lagrangian, grid_oracle, DualVars, EffectiveState, GridScheme,
};
use secalign::sampling::{stream_rng, SimRng};

fn random_duals(rng: &mut SimRng) -> DualVars {
    let l1 = 10f64.powf(rng.random_range(-2.0..0.5));
    let l2 = 10f64.powf(rng.random_range(-2.0..0.5));
    DualVars::new(l1, l2).unwrap()
}

fn cases(n_states: usize, n_duals: usize, seed: u64) -> Vec<(EffectiveState, DualVars)> {
    let params = FadingParams::symmetric(1.0, 0.75).unwrap();
    let mut rng = stream_rng(seed, 0);
    let mut out = Vec::new();
    for _ in 0..n_states {
        let s = EffectiveState::from_channel(&sample_state(&params, &mut rng));
        for _ in 0..n_duals {
            out.push((s, random_duals(&mut rng)));
        }
    }
    out
}

#[test]
fn esa_tree_outputs_are_kkt_points() {
    for (s, d) in cases(2000, 5, 11) {
        let out = esa_case_policy(&s, &d).unwrap();
        let v = esa_violations(&s, out.p1, out.p2, &d, 1e-8);
        assert!(v.is_empty(), "{s:?} {d:?} -> {out:?}: {v:?}");
    }
}

#[test]
fn cj_tree_outputs_are_kkt_points() {
    for (s, d) in cases(2000, 5, 12) {
        let out = esa_cj_case_policy(&s, &d).unwrap();
        let v = esa_cj_violations(&s, &out.decision, &d, 1e-8);
        assert!(v.is_empty(), "{s:?} {d:?} -> {out:?}: {v:?}");
    }
}

#[test]
fn unique_kkt_point_beats_the_grid() {
    let mut checked = 0;
    for (s, d) in cases(150, 2, 13) {
        let grid_max = 1.0 / d.min();
        let esa = esa_case_policy(&s, &d).unwrap();
        if esa_kkt_points(&s, &d).unwrap().len() == 1 {
            let value = esa_lagrangian(&s, esa.p1, esa.p2, &d);
            let grid = grid_oracle(&s, &d, GridScheme::Esa, grid_max, 120).unwrap();
            assert!(
                value >= grid.value - 1e-9,
                "{s:?} {d:?}: {value} < {}",
                grid.value
            );
            checked += 1;
        }
        let cj = esa_cj_case_policy(&s, &d).unwrap();
        if esa_cj_kkt_points(&s, &d).unwrap().len() == 1 {
            let value = esa_cj_lagrangian(&s, &cj.decision, &d);
            let grid = grid_oracle(&s, &d, GridScheme::EsaCj, grid_max, 60).unwrap();
            assert!(
                value >= grid.value - 1e-9,
                "{s:?} {d:?}: {value} < {}",
                grid.value
            );
        }
    }
    assert!(checked > 100);
}
