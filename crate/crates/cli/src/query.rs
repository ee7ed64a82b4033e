//! Single-state queries: rates at given powers, or the power-control
//! decision at given multipliers, printed as a plain report.
//!
//! Literals are comma-separated `key=value` lists, for example
//! `h1=1+0.5i,h2=0.3,g1=-0.2i,g2=1`. Parse errors name the flag and the
//! 1-based column where the problem starts.

use std::fmt::Write as _;
use std::str::FromStr;

use anyhow::{anyhow, bail, Result};
use num_complex::Complex64;
use secalign::power::baseline::{baseline_region, gs_cj_baseline_policy};
use secalign::power::verify::{esa_cj_violations, esa_violations};
use secalign::power::{
    esa_case_policy, esa_cj_case_policy, esa_cj_kkt_residual, esa_cj_lagrangian, esa_kkt_residual,
    esa_lagrangian, DualVars, EffectiveState,
};
use secalign::{
    rates_esa, rates_esa_cj, rates_gs_cj, rates_sba, sba_expand, ChannelState, PowerDecision,
    RateTriple, Scheme,
};

use crate::table::fmt_g12;

/// Tolerance used for the KKT check in the report.
const CHECK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Default)]
pub struct QueryArgs {
    pub scheme: Option<String>,
    /// Complex gains of the (odd-slot) state.
    pub state: Option<String>,
    /// Complex gains of the even slot, for SBA.
    pub even: Option<String>,
    /// Effective gains `2|·|²`, for power control.
    pub effective: Option<String>,
    pub duals: Option<String>,
    pub powers: Option<String>,
}

/// Splits `text` into `key=value` pairs, checking keys against `allowed`.
/// Returns the values in the order of `allowed`, each with its column.
fn fields<'a>(
    flag: &str,
    text: &'a str,
    allowed: &[&str],
    required: &[&str],
) -> Result<Vec<Option<(&'a str, usize)>>> {
    let mut out: Vec<Option<(&str, usize)>> = vec![None; allowed.len()];
    let mut offset = 0;
    for item in text.split(',') {
        let col = offset + 1 + (item.len() - item.trim_start().len());
        offset += item.len() + 1;
        let item = item.trim();
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| anyhow!("{flag}, column {col}: expected key=value, found '{item}'"))?;
        let key = key.trim();
        let slot = allowed.iter().position(|k| *k == key).ok_or_else(|| {
            anyhow!(
                "{flag}, column {col}: unknown key '{key}' (expected one of {})",
                allowed.join(", ")
            )
        })?;
        if out[slot].is_some() {
            bail!("{flag}, column {col}: key '{key}' given twice");
        }
        let value_col =
            col + item.find('=').unwrap_or(0) + 1 + (value.len() - value.trim_start().len());
        out[slot] = Some((value.trim(), value_col));
    }
    for key in required {
        let slot = allowed
            .iter()
            .position(|k| k == key)
            .expect("required key is allowed");
        if out[slot].is_none() {
            bail!("{flag}: missing key '{key}'");
        }
    }
    Ok(out)
}

fn number<T: FromStr>(flag: &str, (value, col): (&str, usize)) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| anyhow!("{flag}, column {col}: cannot parse '{value}' as a number"))
}

const GAIN_KEYS: [&str; 4] = ["h1", "h2", "g1", "g2"];

pub fn parse_state(flag: &str, text: &str) -> Result<ChannelState> {
    let f = fields(flag, text, &GAIN_KEYS, &GAIN_KEYS)?;
    let mut z = [Complex64::default(); 4];
    for (slot, v) in z.iter_mut().zip(f) {
        let parsed: Complex64 = number(flag, v.expect("required"))?;
        if !(parsed.re.is_finite() && parsed.im.is_finite()) {
            bail!(
                "{flag}, column {}: gain must be finite",
                v.expect("required").1
            );
        }
        *slot = parsed;
    }
    Ok(ChannelState::new(z[0], z[1], z[2], z[3]))
}

pub fn parse_effective(flag: &str, text: &str) -> Result<EffectiveState> {
    let f = fields(flag, text, &GAIN_KEYS, &GAIN_KEYS)?;
    let mut x = [0.0; 4];
    for (slot, v) in x.iter_mut().zip(f) {
        *slot = number(flag, v.expect("required"))?;
    }
    Ok(EffectiveState::new(x[0], x[1], x[2], x[3])?)
}

pub fn parse_duals(flag: &str, text: &str) -> Result<DualVars> {
    let f = fields(flag, text, &["l1", "l2"], &["l1", "l2"])?;
    let l1 = number(flag, f[0].expect("required"))?;
    let l2 = number(flag, f[1].expect("required"))?;
    Ok(DualVars::new(l1, l2)?)
}

pub fn parse_powers(flag: &str, text: &str) -> Result<PowerDecision> {
    let f = fields(flag, text, &["p1", "p2", "q1", "q2"], &["p1", "p2"])?;
    let mut x = [0.0; 4];
    for (slot, v) in x.iter_mut().zip(f) {
        if let Some(v) = v {
            *slot = number(flag, v)?;
        }
    }
    let d = PowerDecision::new(x[0], x[1], x[2], x[3]);
    d.validate()?;
    Ok(d)
}

fn write_rates(out: &mut String, r: &RateTriple) {
    let _ = writeln!(out, "r1_bits: {}", fmt_g12(r.r1));
    let _ = writeln!(out, "r2_bits: {}", fmt_g12(r.r2));
    let _ = writeln!(out, "rsum_bits: {}", fmt_g12(r.rsum));
}

fn write_decision(out: &mut String, d: &PowerDecision) {
    let _ = writeln!(
        out,
        "powers: p1={} p2={} q1={} q2={}",
        fmt_g12(d.p1),
        fmt_g12(d.p2),
        fmt_g12(d.q1),
        fmt_g12(d.q2)
    );
}

fn write_check(out: &mut String, violations: &[String]) {
    if violations.is_empty() {
        let _ = writeln!(out, "kkt_check: ok");
    }
    for v in violations {
        let _ = writeln!(out, "kkt_check: {v}");
    }
}

fn write_effective(out: &mut String, s: &EffectiveState) {
    let _ = writeln!(
        out,
        "effective: h1={} h2={} g1={} g2={}",
        fmt_g12(s.h1),
        fmt_g12(s.h2),
        fmt_g12(s.g1),
        fmt_g12(s.g2)
    );
}

/// Builds the whole report; nothing is printed until it succeeds.
pub fn query(args: &QueryArgs) -> Result<String> {
    let scheme: Scheme = args
        .scheme
        .as_deref()
        .ok_or_else(|| anyhow!("--scheme is required"))?
        .parse()?;
    let state = args
        .state
        .as_deref()
        .map(|t| parse_state("--state", t))
        .transpose()?;
    let even = args
        .even
        .as_deref()
        .map(|t| parse_state("--even", t))
        .transpose()?;
    let effective = args
        .effective
        .as_deref()
        .map(|t| parse_effective("--effective", t))
        .transpose()?;
    let duals = args
        .duals
        .as_deref()
        .map(|t| parse_duals("--duals", t))
        .transpose()?;
    let powers = args
        .powers
        .as_deref()
        .map(|t| parse_powers("--powers", t))
        .transpose()?;

    if state.is_some() && effective.is_some() {
        bail!("give either --state or --effective, not both");
    }
    if even.is_some() && scheme != Scheme::Sba {
        bail!("--even only applies to sba");
    }
    // Complex gains for rate evaluation; an effective literal maps to real gains.
    let channel = state.or_else(|| effective.map(|e| e.to_channel()));
    let channel = channel.ok_or_else(|| anyhow!("give --state or --effective"))?;

    let mut out = String::new();
    let _ = writeln!(out, "scheme: {scheme}");
    let _ = writeln!(out, "state: {channel}");
    match (powers, duals) {
        (Some(_), Some(_)) => bail!("give either --powers or --duals, not both"),
        (None, None) => bail!("give --powers to evaluate rates or --duals to run power control"),
        (Some(d), None) => {
            if !scheme.allows_jamming() && (d.q1 != 0.0 || d.q2 != 0.0) {
                bail!("scheme {scheme} does not use jamming powers q1, q2");
            }
            write_decision(&mut out, &d);
            let rates = match scheme {
                Scheme::GsCj => rates_gs_cj(&channel, &d),
                Scheme::Esa => rates_esa(&channel, d.p1, d.p2),
                Scheme::EsaCj => rates_esa_cj(&channel, &d),
                Scheme::Sba => {
                    let even = even.ok_or_else(|| anyhow!("sba needs the even slot in --even"))?;
                    let block = sba_expand(channel, even);
                    let _ = writeln!(out, "even: {even}");
                    let _ = writeln!(out, "eve_det: {}", block.det());
                    rates_sba(&block, d.p1, d.p2)
                }
            };
            write_rates(&mut out, &rates);
        }
        (None, Some(duals)) => {
            let _ = writeln!(
                out,
                "duals: l1={} l2={}",
                fmt_g12(duals.lambda1),
                fmt_g12(duals.lambda2)
            );
            let eff = effective.unwrap_or_else(|| EffectiveState::from_channel(&channel));
            match scheme {
                Scheme::Esa => {
                    write_effective(&mut out, &eff);
                    let dec = esa_case_policy(&eff, &duals)?;
                    let _ = writeln!(out, "branch: {}", dec.case);
                    let _ = writeln!(out, "fallback: {}", dec.fallback);
                    write_decision(&mut out, &PowerDecision::transmit(dec.p1, dec.p2));
                    let (r1, r2) = esa_kkt_residual(&eff, dec.p1, dec.p2, &duals);
                    let _ = writeln!(out, "residuals: p1={} p2={}", fmt_g12(r1), fmt_g12(r2));
                    let lag = esa_lagrangian(&eff, dec.p1, dec.p2, &duals);
                    let _ = writeln!(out, "lagrangian_nats: {}", fmt_g12(lag));
                    write_rates(&mut out, &rates_esa(&channel, dec.p1, dec.p2));
                    write_check(
                        &mut out,
                        &esa_violations(&eff, dec.p1, dec.p2, &duals, CHECK_TOL),
                    );
                }
                Scheme::EsaCj => {
                    write_effective(&mut out, &eff);
                    let dec = esa_cj_case_policy(&eff, &duals)?;
                    let _ = writeln!(out, "branch: {}", dec.branch);
                    let _ = writeln!(out, "fallback: {}", dec.fallback);
                    write_decision(&mut out, &dec.decision);
                    let r = esa_cj_kkt_residual(&eff, &dec.decision, &duals);
                    let _ = writeln!(
                        out,
                        "residuals: p1={} p2={} q1={} q2={}",
                        fmt_g12(r[0]),
                        fmt_g12(r[1]),
                        fmt_g12(r[2]),
                        fmt_g12(r[3])
                    );
                    let lag = esa_cj_lagrangian(&eff, &dec.decision, &duals);
                    let _ = writeln!(out, "lagrangian_nats: {}", fmt_g12(lag));
                    write_rates(&mut out, &rates_esa_cj(&channel, &dec.decision));
                    write_check(
                        &mut out,
                        &esa_cj_violations(&eff, &dec.decision, &duals, CHECK_TOL),
                    );
                }
                Scheme::GsCj => {
                    let d = gs_cj_baseline_policy(&channel, &duals);
                    let _ = writeln!(
                        out,
                        "branch: {:?} (approximate baseline)",
                        baseline_region(&channel)
                    );
                    write_decision(&mut out, &d);
                    write_rates(&mut out, &rates_gs_cj(&channel, &d));
                }
                Scheme::Sba => bail!("power control by multipliers is not defined for sba"),
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(scheme: &str) -> QueryArgs {
        QueryArgs {
            scheme: Some(scheme.into()),
            ..QueryArgs::default()
        }
    }

    #[test]
    fn unit_gains_esa_rate() {
        let a = QueryArgs {
            state: Some("h1=1,h2=1,g1=1,g2=1".into()),
            powers: Some("p1=1,p2=1".into()),
            ..args("esa")
        };
        let report = query(&a).unwrap();
        // ½·log2(9/5), computed independently.
        let expected = 0.5 * (9.0f64 / 5.0).log2();
        let line = report
            .lines()
            .find(|l| l.starts_with("rsum_bits: "))
            .unwrap();
        let got: f64 = line["rsum_bits: ".len()..].parse().unwrap();
        assert!((got - expected).abs() < 1e-11, "{got}");
    }

    #[test]
    fn weak_state_takes_first_branch() {
        let a = QueryArgs {
            effective: Some("h1=0.5,h2=0.5,g1=1,g2=1".into()),
            duals: Some("l1=1,l2=1".into()),
            ..args("esa")
        };
        let report = query(&a).unwrap();
        assert!(report.contains("branch: A.1\n"), "{report}");
        assert!(report.contains("powers: p1=0 p2=0 q1=0 q2=0\n"));
        assert!(report.contains("kkt_check: ok\n"));
    }

    #[test]
    fn errors_carry_columns() {
        let e = parse_state("--state", "h1=1,h2=zz,g1=1,g2=1")
            .unwrap_err()
            .to_string();
        assert!(e.contains("column 9"), "{e}");
        let e = parse_state("--state", "h1=1, h3=1")
            .unwrap_err()
            .to_string();
        assert!(e.contains("column 7") && e.contains("unknown key"), "{e}");
        let e = parse_duals("--duals", "l1=1").unwrap_err().to_string();
        assert!(e.contains("missing key 'l2'"), "{e}");
        let e = parse_powers("--powers", "p1=1,p2").unwrap_err().to_string();
        assert!(e.contains("column 6"), "{e}");
    }

    #[test]
    fn complex_literals() {
        let s = parse_state("--state", "h1=1+0.5i,h2=-2i,g1=0.25,g2=3-1i").unwrap();
        assert_eq!(s.h1, Complex64::new(1.0, 0.5));
        assert_eq!(s.h2, Complex64::new(0.0, -2.0));
        assert_eq!(s.g2, Complex64::new(3.0, -1.0));
    }

    #[test]
    fn jamming_powers_rejected_without_jamming() {
        let a = QueryArgs {
            state: Some("h1=1,h2=1,g1=1,g2=1".into()),
            powers: Some("p1=1,p2=1,q1=0.5".into()),
            ..args("esa")
        };
        assert!(query(&a).is_err());
    }
}
