use num_complex::Complex64;
use proptest::prelude::*;
use secalign::fading::{
    esa_partner, sample_state, sba_expand, simulate_repetition, ChannelState, FadingParams,
};
use secalign::pairing::{
    ergodic_pairing_demo, match_stream, PairingReport, QuantizedState, Quantizer,
};
use secalign::sampling::{stream_rng, Moments};

fn gain() -> impl Strategy<Value = Complex64> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn state() -> impl Strategy<Value = ChannelState> {
    (gain(), gain(), gain(), gain()).prop_map(|(a, b, c, d)| ChannelState::new(a, b, c, d))
}

#[test]
fn squared_gain_means_match_variances() {
    let params = FadingParams::new(1.0, 2.0, 0.75, 0.3).unwrap();
    let mut rng = stream_rng(42, 0);
    let mut m = [
        Moments::default(),
        Moments::default(),
        Moments::default(),
        Moments::default(),
    ];
    for _ in 0..1_000_000 {
        let g = sample_state(&params, &mut rng).power_gains();
        for (acc, v) in m.iter_mut().zip([g.h1, g.h2, g.g1, g.g2]) {
            acc.push(v);
        }
    }
    for (acc, var) in m.iter().zip(params.variances()) {
        // |h|² is exponential with mean var, so its standard deviation is var too.
        assert!(
            (acc.mean - var).abs() <= 3.0 * acc.stderr(),
            "{} vs {var}",
            acc.mean
        );
        assert!(
            (acc.mean - var).abs() <= 0.01 * var.max(1.0),
            "{} vs {var}",
            acc.mean
        );
    }
}

#[test]
fn eavesdropper_difference_carries_no_symbol() {
    let params = FadingParams::symmetric(1.0, 1.0).unwrap();
    let mut rng = stream_rng(5, 1);
    let zero = [Complex64::new(0.0, 0.0); 4];
    for _ in 0..1000 {
        let s = sample_state(&params, &mut rng);
        // With zero noise each symbol alone must vanish from Z1 − Z2.
        let only1 =
            simulate_repetition(&s, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), zero);
        let only2 =
            simulate_repetition(&s, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), zero);
        assert_eq!(only1.z_diff, Complex64::new(0.0, 0.0));
        assert_eq!(only2.z_diff, Complex64::new(0.0, 0.0));
    }
}

proptest! {
    #[test]
    fn partner_is_an_involution(s in state()) {
        let p = esa_partner(&s);
        prop_assert_eq!(esa_partner(&p), s);
        prop_assert_eq!((p.g1, p.g2, p.h1), (s.g1, s.g2, s.h1));
    }

    #[test]
    fn repetition_identities(
        s in state(), x1 in gain(), x2 in gain(),
        n1 in gain(), n2 in gain(), n3 in gain(), n4 in gain(),
    ) {
        let out = simulate_repetition(&s, x1, x2, [n1, n2, n3, n4]);
        let tol = 1e-12;
        prop_assert!((out.y_sum - (2.0 * s.h1 * x1 + n1 + n2)).norm() <= tol);
        prop_assert!((out.y_diff - (2.0 * s.h2 * x2 + n1 - n2)).norm() <= tol);
        prop_assert!((out.z_sum - (2.0 * (s.g1 * x1 + s.g2 * x2) + n3 + n4)).norm() <= tol);
        prop_assert!((out.z_diff - (n3 - n4)).norm() <= tol);
    }

    #[test]
    fn sba_eavesdropper_rows_have_equal_entries(odd in state(), even in state()) {
        let m = sba_expand(odd, even).eve_matrix();
        prop_assert_eq!(m[0][0], m[0][1]);
        prop_assert_eq!(m[1][0], m[1][1]);
    }
}

/// Quadratic-time version of the greedy matcher: for each free instant, scan
/// forward for the first free instant in the partner cell.
fn brute_force_pairs(cells: &[QuantizedState], phase_bins: u32) -> Vec<(usize, usize)> {
    let mut used = vec![false; cells.len()];
    let mut pairs = Vec::new();
    for t in 0..cells.len() {
        if used[t] {
            continue;
        }
        used[t] = true;
        let want = cells[t].partner(phase_bins);
        if let Some(u) = (t + 1..cells.len()).find(|&u| !used[u] && cells[u] == want) {
            used[u] = true;
            pairs.push((t, u));
        }
    }
    pairs
}

#[test]
fn matcher_agrees_with_brute_force() {
    let params = FadingParams::symmetric(1.0, 0.75).unwrap();
    for (m, b) in [(1, 2), (2, 2), (2, 4), (3, 3)] {
        let q = Quantizer::for_params(&params, m, b).unwrap();
        let mut rng = stream_rng(9, (m * 10 + b) as u64);
        let cells: Vec<QuantizedState> = (0..3000)
            .map(|_| q.quantize(&sample_state(&params, &mut rng)))
            .collect();
        let fast: PairingReport = match_stream(&cells, b);
        assert_eq!(fast.pairs, brute_force_pairs(&cells, b), "M={m} B={b}");
        for &(t, u) in &fast.pairs {
            assert!(u > t);
            assert_eq!(cells[u], cells[t].partner(b));
        }
    }
}

#[test]
fn small_alphabet_pairs_almost_everything() {
    let params = FadingParams::symmetric(1.0, 0.75).unwrap();
    let q = Quantizer::for_params(&params, 2, 2).unwrap();
    let report = ergodic_pairing_demo(100_000, &params, &q, &mut stream_rng(3, 0)).unwrap();
    assert!(
        report.match_fraction() >= 0.9,
        "{}",
        report.match_fraction()
    );
    assert_eq!(report.unmatched + 2 * report.pairs.len(), report.stream_len);
}

#[test]
fn default_alphabet_runs() {
    let params = FadingParams::symmetric(1.0, 0.75).unwrap();
    let q = Quantizer::for_params(&params, 4, 4).unwrap();
    let report = ergodic_pairing_demo(20_000, &params, &q, &mut stream_rng(4, 0)).unwrap();
    assert!(report.match_fraction() > 0.5, "{}", report.match_fraction());
    assert!(report.max_wait() as f64 >= report.mean_wait());
    assert!(ergodic_pairing_demo(0, &params, &q, &mut stream_rng(4, 0)).is_err());
}
