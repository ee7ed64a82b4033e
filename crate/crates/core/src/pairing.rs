//! Quantized ergodic pairing: finds, for each instant, a later instant whose
//! quantized state is the ESA partner of the current one.

use std::collections::HashMap;
use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fading::{sample_state, ChannelState, FadingParams};
use crate::sampling::SimRng;

/// Bin grid for magnitudes and phases. Magnitude caps are per gain, in the
/// order h1, h2, g1, g2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantizer {
    mag_bins: u32,
    phase_bins: u32,
    mag_caps: [f64; 4],
}

impl Quantizer {
    pub fn new(mag_bins: u32, phase_bins: u32, mag_caps: [f64; 4]) -> Result<Self> {
        if mag_bins == 0 || phase_bins == 0 {
            return Err(Error::InvalidArgument(format!(
                "bin counts must be >= 1, got mag_bins={mag_bins}, phase_bins={phase_bins}"
            )));
        }
        if let Some(c) = mag_caps.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "magnitude cap must be > 0, got {c}"
            )));
        }
        Ok(Self {
            mag_bins,
            phase_bins,
            mag_caps,
        })
    }

    /// Magnitude caps of three standard deviations, `3·√var` per gain.
    pub fn for_params(params: &FadingParams, mag_bins: u32, phase_bins: u32) -> Result<Self> {
        Self::new(
            mag_bins,
            phase_bins,
            params.variances().map(|v| 3.0 * v.sqrt()),
        )
    }

    pub fn mag_bins(&self) -> u32 {
        self.mag_bins
    }

    pub fn phase_bins(&self) -> u32 {
        self.phase_bins
    }

    pub fn quantize(&self, state: &ChannelState) -> QuantizedState {
        let gains = state.gains();
        let mut bins = [GainBin { mag: 0, phase: 0 }; 4];
        for (i, g) in gains.iter().enumerate() {
            bins[i] = quantize_gain(*g, self.mag_bins, self.phase_bins, self.mag_caps[i]);
        }
        QuantizedState { bins }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GainBin {
    pub mag: u32,
    pub phase: u32,
}

/// Bin indices of h1, h2, g1, g2 in that order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuantizedState {
    pub bins: [GainBin; 4],
}

impl QuantizedState {
    /// The cell a partner instant must fall into: h2's phase rotated by half
    /// a turn (⌊B/2⌋ bins), everything else unchanged.
    pub fn partner(&self, phase_bins: u32) -> QuantizedState {
        let mut bins = self.bins;
        bins[1].phase = (bins[1].phase + phase_bins / 2) % phase_bins;
        QuantizedState { bins }
    }
}

/// Uniform bins over `[0, mag_cap]` (overflow goes to the top bin) and over
/// `[0, 2π)` for the phase.
pub fn quantize_gain(g: Complex64, mag_bins: u32, phase_bins: u32, mag_cap: f64) -> GainBin {
    let mag = ((g.norm() / mag_cap * mag_bins as f64) as u32).min(mag_bins - 1);
    let mut phase = g.arg();
    if phase < 0.0 {
        phase += TAU;
    }
    let phase = ((phase / TAU * phase_bins as f64) as u32).min(phase_bins - 1);
    GainBin { mag, phase }
}

pub fn quantize(
    state: &ChannelState,
    mag_bins: u32,
    phase_bins: u32,
    mag_cap: f64,
) -> Result<QuantizedState> {
    Ok(Quantizer::new(mag_bins, phase_bins, [mag_cap; 4])?.quantize(state))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairingReport {
    pub stream_len: usize,
    pub pairs: Vec<(usize, usize)>,
    /// Instants left without a partner at the end of the stream.
    pub unmatched: usize,
}

impl PairingReport {
    /// Share of instants that ended up in a pair.
    pub fn match_fraction(&self) -> f64 {
        if self.stream_len == 0 {
            return 0.0;
        }
        2.0 * self.pairs.len() as f64 / self.stream_len as f64
    }

    pub fn mean_wait(&self) -> f64 {
        if self.pairs.is_empty() {
            return 0.0;
        }
        self.pairs.iter().map(|(a, b)| (b - a) as f64).sum::<f64>() / self.pairs.len() as f64
    }

    pub fn max_wait(&self) -> usize {
        self.pairs.iter().map(|(a, b)| b - a).max().unwrap_or(0)
    }
}

/// Greedy matching over a quantized stream.
///
/// Instants are scanned in order; an instant that is still free is paired
/// with the earliest later free instant falling into its partner cell.
pub fn match_stream(cells: &[QuantizedState], phase_bins: u32) -> PairingReport {
    let n = cells.len();
    let mut by_cell: HashMap<QuantizedState, Vec<usize>> = HashMap::new();
    for (t, c) in cells.iter().enumerate() {
        by_cell.entry(*c).or_default().push(t);
    }
    // Per-cell cursor into its (ascending) index list; everything before the
    // cursor is either used or already in the past.
    let mut cursor: HashMap<QuantizedState, usize> = HashMap::new();
    let mut used = vec![false; n];
    let mut pairs = Vec::new();
    for t in 0..n {
        if used[t] {
            continue;
        }
        used[t] = true;
        let want = cells[t].partner(phase_bins);
        let Some(list) = by_cell.get(&want) else {
            continue;
        };
        let pos = cursor.entry(want).or_insert(0);
        while *pos < list.len() && (list[*pos] <= t || used[list[*pos]]) {
            *pos += 1;
        }
        if let Some(&u) = list.get(*pos) {
            used[u] = true;
            *pos += 1;
            pairs.push((t, u));
        }
    }
    let unmatched = n - 2 * pairs.len();
    PairingReport {
        stream_len: n,
        pairs,
        unmatched,
    }
}

/// Samples `n` states and pairs them greedily on the quantizer's alphabet.
pub fn ergodic_pairing_demo(
    n: usize,
    params: &FadingParams,
    quantizer: &Quantizer,
    rng: &mut SimRng,
) -> Result<PairingReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("stream length must be >= 1".into()));
    }
    let cells: Vec<QuantizedState> = (0..n)
        .map(|_| quantizer.quantize(&sample_state(params, rng)))
        .collect();
    Ok(match_stream(&cells, quantizer.phase_bins))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::stream_rng;
    use std::f64::consts::PI;

    fn polar(r: f64, phase: f64) -> Complex64 {
        Complex64::from_polar(r, phase)
    }

    #[test]
    fn phase_bins() {
        assert_eq!(quantize_gain(polar(1.0, 0.0), 1, 4, 2.0).phase, 0);
        assert_eq!(quantize_gain(polar(1.0, PI), 1, 4, 2.0).phase, 2);
        assert_eq!(quantize_gain(polar(1.0, TAU - 1e-9), 1, 4, 2.0).phase, 3);
        assert_eq!(quantize_gain(polar(1.0, -1e-9), 1, 4, 2.0).phase, 3);
    }

    #[test]
    fn magnitude_overflow_clamps() {
        assert_eq!(quantize_gain(polar(3.0, 0.5), 5, 4, 2.0).mag, 4);
        assert_eq!(quantize_gain(polar(0.0, 0.0), 5, 4, 2.0).mag, 0);
        assert_eq!(quantize_gain(polar(0.5, 0.0), 4, 4, 2.0).mag, 1);
    }

    #[test]
    fn rejects_bad_quantizer() {
        assert!(Quantizer::new(0, 4, [1.0; 4]).is_err());
        assert!(Quantizer::new(4, 0, [1.0; 4]).is_err());
        assert!(Quantizer::new(4, 4, [1.0, 0.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn single_bin_pairs_consecutive_instants() {
        let params = FadingParams::symmetric(1.0, 0.75).unwrap();
        let q = Quantizer::for_params(&params, 1, 1).unwrap();
        let report = ergodic_pairing_demo(1000, &params, &q, &mut stream_rng(1, 0)).unwrap();
        assert_eq!(report.match_fraction(), 1.0);
        assert!(report.pairs.iter().all(|(a, b)| b - a == 1));
        assert_eq!(report.unmatched, 0);
    }

    #[test]
    fn lone_instant_is_unmatched() {
        let params = FadingParams::symmetric(1.0, 1.0).unwrap();
        let q = Quantizer::for_params(&params, 1, 1).unwrap();
        let report = ergodic_pairing_demo(1, &params, &q, &mut stream_rng(1, 0)).unwrap();
        assert_eq!(report.match_fraction(), 0.0);
        assert_eq!(report.unmatched, 1);
    }

    #[test]
    fn partner_cell_rotates_h2_only() {
        let s = ChannelState::new(
            polar(0.5, 0.3),
            polar(0.5, 0.3),
            polar(0.5, 0.3),
            polar(0.5, 0.3),
        );
        let q = Quantizer::new(2, 4, [2.0; 4]).unwrap().quantize(&s);
        let p = q.partner(4);
        assert_eq!(p.bins[0], q.bins[0]);
        assert_eq!(p.bins[1].phase, 2);
        assert_eq!(p.bins[2..], q.bins[2..]);
    }
}
