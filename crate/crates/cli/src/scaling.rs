//! The `dof` subcommand: sum rate on a grid of large powers, the fitted
//! slope against `log2 P`, and the GS/CJ saturation bound.

use std::fmt::Write as _;

use anyhow::Result;
use secalign::dof::{estimate_dof_top, gs_cj_upper_bound, sum_rate_curve};
use secalign::experiment::PolicyChoice;
use secalign::{derive_seed, Exec, FadingParams, Scheme};

use crate::config::ExperimentConfig;
use crate::table::{fmt_g12, Table};

pub const DOF_HEADER: [&str; 7] = [
    "var_g",
    "scheme",
    "policy",
    "power",
    "rsum_bits",
    "stderr",
    "n",
];

/// Index used to derive the bound's seed, away from the scheme indices.
const BOUND_STREAM: u64 = 0xB0;

pub struct DofReport {
    pub csv: String,
    /// One line per series (slope) and per GS/CJ bound.
    pub summary: String,
}

/// Schemes run by default: the two alignment schemes and GS/CJ.
pub const DEFAULT_SCHEMES: [Scheme; 3] = [Scheme::Sba, Scheme::Esa, Scheme::GsCj];

pub fn run_dof(config: &ExperimentConfig, exec: Exec) -> Result<DofReport> {
    config.validate()?;
    let schemes: Vec<Scheme> = match &config.schemes {
        Some(s) => s.clone(),
        None => DEFAULT_SCHEMES.to_vec(),
    };
    let powers: Vec<f64> = config
        .dof_power_exponents
        .iter()
        .map(|e| 10f64.powf(*e))
        .collect();
    let mut table = Table::new(&DOF_HEADER);
    let mut summary = String::new();
    for (gi, &var_g) in config.var_g.iter().enumerate() {
        let params = FadingParams::symmetric(config.var_h, var_g)?;
        let family = derive_seed(config.seed, gi as u64);
        for &scheme in &schemes {
            let stream = Scheme::ALL
                .iter()
                .position(|s| *s == scheme)
                .expect("listed") as u64;
            let policy = PolicyChoice::for_dof(scheme, config.dual_samples);
            let curve = sum_rate_curve(
                scheme,
                &params,
                &powers,
                policy,
                config.samples,
                derive_seed(family, stream),
                exec,
            )?;
            for p in &curve.points {
                table.row(&[
                    fmt_g12(var_g),
                    scheme.name().to_string(),
                    policy.name().to_string(),
                    fmt_g12(p.power),
                    fmt_g12(p.rsum),
                    fmt_g12(p.stderr),
                    p.n.to_string(),
                ]);
            }
            let slope = estimate_dof_top(&curve, config.dof_window)?;
            let _ = writeln!(
                summary,
                "var_g={var_g} {scheme}/{policy}: slope {}",
                fmt_g12(slope)
            );
            if scheme == Scheme::GsCj {
                let bound = gs_cj_upper_bound(
                    &params,
                    config.samples,
                    derive_seed(family, BOUND_STREAM),
                    exec,
                )?;
                let limit = bound.mean + 3.0 * bound.stderr;
                let below = curve.points.iter().all(|p| p.rsum <= limit);
                let _ = writeln!(
                    summary,
                    "var_g={var_g} gs-cj bound {} (stderr {}), all points below bound + 3 stderr: {below}",
                    fmt_g12(bound.mean),
                    fmt_g12(bound.stderr)
                );
            }
        }
    }
    Ok(DofReport {
        csv: table.finish(),
        summary,
    })
}
