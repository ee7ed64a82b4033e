//! Figure data: sum rate against average SNR for several scheme and policy
//! pairs, one CSV row per (var_g, SNR, series).

use anyhow::{bail, Result};
use secalign::experiment::{evaluate_point, PointSpec, PolicyChoice};
use secalign::{derive_seed, Exec, FadingParams, PowerBudget, Scheme};

use crate::config::ExperimentConfig;
use crate::table::{fmt_g12, sanitize, Table};

pub const FIGURE_HEADER: [&str; 8] = [
    "snr_db",
    "var_g",
    "scheme",
    "policy",
    "rsum_bits",
    "stderr",
    "n",
    "status",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Series {
    pub scheme: Scheme,
    pub policy: PolicyChoice,
}

pub fn figure1_series(config: &ExperimentConfig) -> Vec<Series> {
    let inner = config.inner_samples;
    let dual_samples = config.dual_samples;
    vec![
        Series {
            scheme: Scheme::Sba,
            policy: PolicyChoice::Rudimentary { inner },
        },
        Series {
            scheme: Scheme::Esa,
            policy: PolicyChoice::Rudimentary { inner },
        },
        Series {
            scheme: Scheme::GsCj,
            policy: PolicyChoice::Baseline { dual_samples },
        },
    ]
}

pub fn figure2_series(config: &ExperimentConfig) -> Vec<Series> {
    let dual_samples = config.dual_samples;
    vec![
        Series {
            scheme: Scheme::Esa,
            policy: PolicyChoice::Constant,
        },
        Series {
            scheme: Scheme::Esa,
            policy: PolicyChoice::KktDual { dual_samples },
        },
        Series {
            scheme: Scheme::EsaCj,
            policy: PolicyChoice::KktDual { dual_samples },
        },
        Series {
            scheme: Scheme::GsCj,
            policy: PolicyChoice::Baseline { dual_samples },
        },
    ]
}

pub fn run_figure1(config: &ExperimentConfig, exec: Exec) -> Result<String> {
    run_series(config, &figure1_series(config), exec)
}

pub fn run_figure2(config: &ExperimentConfig, exec: Exec) -> Result<String> {
    run_series(config, &figure2_series(config), exec)
}

/// Evaluates every series on the config grid. A point that fails (for
/// example a dual search that does not converge) becomes a `failed:` row
/// and the run continues.
///
/// All series at one grid point share a seed, so they see the same fading
/// draws. The seed is `derive_seed(seed, var_g_index << 32 | snr_index)`.
pub fn run_series(config: &ExperimentConfig, series: &[Series], exec: Exec) -> Result<String> {
    config.validate()?;
    let series: Vec<&Series> = series.iter().filter(|s| config.wants(s.scheme)).collect();
    if series.is_empty() {
        bail!("none of the requested schemes belongs to this figure");
    }
    let mut table = Table::new(&FIGURE_HEADER);
    for (gi, &var_g) in config.var_g.iter().enumerate() {
        let params = FadingParams::symmetric(config.var_h, var_g)?;
        for (si, &snr_db) in config.snr_db.iter().enumerate() {
            let budget = PowerBudget::from_snr_db(snr_db)?;
            let seed = derive_seed(config.seed, ((gi as u64) << 32) | si as u64);
            for s in &series {
                let spec = PointSpec {
                    scheme: s.scheme,
                    policy: s.policy,
                    params,
                    budget,
                    n: config.samples,
                    seed,
                };
                let (rsum, stderr, n, status) = match evaluate_point(&spec, exec) {
                    Ok(r) => {
                        let status = if s.scheme == Scheme::GsCj {
                            "approximate"
                        } else {
                            "ok"
                        };
                        (
                            r.estimate.mean.rsum,
                            r.estimate.stderr.rsum,
                            r.estimate.n,
                            status.to_string(),
                        )
                    }
                    Err(e) => {
                        log::warn!(
                            "{} / {} at {snr_db} dB, var_g {var_g}: {e}",
                            s.scheme,
                            s.policy
                        );
                        (
                            f64::NAN,
                            f64::NAN,
                            0,
                            format!("failed:{}", sanitize(&e.to_string())),
                        )
                    }
                };
                table.row(&[
                    fmt_g12(snr_db),
                    fmt_g12(var_g),
                    s.scheme.name().to_string(),
                    s.policy.name().to_string(),
                    fmt_g12(rsum),
                    fmt_g12(stderr),
                    n.to_string(),
                    status,
                ]);
            }
        }
    }
    Ok(table.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Command;

    fn small(command: Command) -> ExperimentConfig {
        let mut c = ExperimentConfig::defaults(command);
        c.samples = 200;
        c.inner_samples = 20;
        c.dual_samples = 300;
        c.snr_db = vec![0.0, 30.0];
        c.var_g = vec![0.75];
        c
    }

    #[test]
    fn figure1_has_one_row_per_series_and_point() {
        let csv = run_figure1(&small(Command::Figure1), Exec::Sequential).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], FIGURE_HEADER.join(","));
        assert_eq!(lines.len(), 1 + 2 * 3);
        assert!(lines[1].starts_with("0,0.75,sba,rudimentary,"));
        assert!(lines
            .iter()
            .filter(|l| l.contains(",gs-cj,"))
            .all(|l| l.ends_with(",approximate")));
    }

    #[test]
    fn scheme_filter_applies() {
        let mut c = small(Command::Figure2);
        c.schemes = Some(vec![Scheme::Esa]);
        let csv = run_figure2(&c, Exec::Sequential).unwrap();
        assert_eq!(csv.lines().count(), 1 + 2 * 2);
        c.schemes = Some(vec![Scheme::Sba]);
        assert!(run_figure2(&c, Exec::Sequential).is_err());
    }
}
