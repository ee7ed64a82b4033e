//! Experiment configuration.
//!
//! Values are resolved in three layers: built-in defaults, then an optional
//! TOML file (`--config`), then command-line flags. Later layers win.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use secalign::Scheme;
use serde::Deserialize;

/// Keys accepted in a config file. All are optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub inner_samples: Option<usize>,
    pub dual_samples: Option<usize>,
    pub var_h: Option<f64>,
    pub var_g: Option<Vec<f64>>,
    pub snr_db: Option<Vec<f64>>,
    pub schemes: Option<Vec<String>>,
    pub out: Option<PathBuf>,
    pub dof_power_exponents: Option<Vec<f64>>,
    pub dof_window: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Flag values; `None` leaves the lower layers in place.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub out: Option<PathBuf>,
    pub snr_db: Option<Vec<f64>>,
    pub schemes: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Figure1,
    Figure2,
    Dof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Monte Carlo samples per grid point.
    pub samples: usize,
    /// Even-slot samples for the SBA on/off decision.
    pub inner_samples: usize,
    /// Frozen-batch size for multiplier searches.
    pub dual_samples: usize,
    pub var_h: f64,
    /// Eavesdropper variances; one curve family per value.
    pub var_g: Vec<f64>,
    /// Average SNR `½(P̄1 + P̄2)` in dB.
    pub snr_db: Vec<f64>,
    /// Restricts the schemes run; `None` runs all of the command's series.
    pub schemes: Option<Vec<Scheme>>,
    pub out: Option<PathBuf>,
    pub dof_power_exponents: Vec<f64>,
    pub dof_window: usize,
}

impl ExperimentConfig {
    pub fn defaults(command: Command) -> Self {
        let dof = command == Command::Dof;
        Self {
            seed: 1,
            samples: if dof { 100_000 } else { 20_000 },
            inner_samples: 1000,
            dual_samples: 20_000,
            var_h: 1.0,
            var_g: if dof { vec![1.0] } else { vec![0.75, 1.5] },
            snr_db: (0..=6).map(|i| 10.0 * i as f64).collect(),
            schemes: None,
            out: None,
            dof_power_exponents: vec![3.0, 4.0, 5.0, 6.0],
            dof_window: 4,
        }
    }

    pub fn resolve(command: Command, file: Option<&FileConfig>, flags: &Overrides) -> Result<Self> {
        let mut c = Self::defaults(command);
        if let Some(f) = file {
            macro_rules! take {
                ($($field:ident),*) => { $( if let Some(v) = f.$field.clone() { c.$field = v; } )* };
            }
            take!(
                seed,
                samples,
                inner_samples,
                dual_samples,
                var_h,
                var_g,
                snr_db,
                dof_power_exponents,
                dof_window
            );
            if let Some(v) = &f.out {
                c.out = Some(v.clone());
            }
            if let Some(v) = &f.schemes {
                c.schemes = Some(parse_schemes(v)?);
            }
        }
        if let Some(v) = flags.seed {
            c.seed = v;
        }
        if let Some(v) = flags.samples {
            c.samples = v;
        }
        if let Some(v) = &flags.out {
            c.out = Some(v.clone());
        }
        if let Some(v) = &flags.snr_db {
            c.snr_db = v.clone();
        }
        if let Some(v) = &flags.schemes {
            c.schemes = Some(parse_schemes(v)?);
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 2 {
            bail!("samples must be >= 2, got {}", self.samples);
        }
        if self.inner_samples == 0 || self.dual_samples == 0 {
            bail!("inner_samples and dual_samples must be >= 1");
        }
        if !(self.var_h > 0.0 && self.var_h.is_finite()) {
            bail!("var_h must be finite and > 0, got {}", self.var_h);
        }
        if self.var_g.is_empty() || self.var_g.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            bail!(
                "var_g must be a nonempty list of finite values > 0, got {:?}",
                self.var_g
            );
        }
        if self.snr_db.is_empty() || self.snr_db.iter().any(|v| !v.is_finite()) {
            bail!(
                "snr_db must be a nonempty list of finite values, got {:?}",
                self.snr_db
            );
        }
        if self.dof_power_exponents.is_empty()
            || self.dof_power_exponents.windows(2).any(|w| !(w[1] > w[0]))
        {
            bail!(
                "dof_power_exponents must be strictly increasing, got {:?}",
                self.dof_power_exponents
            );
        }
        if self.dof_window < 3 || self.dof_window > self.dof_power_exponents.len() {
            bail!(
                "dof_window must be between 3 and the number of powers ({}), got {}",
                self.dof_power_exponents.len(),
                self.dof_window
            );
        }
        Ok(())
    }

    pub fn wants(&self, scheme: Scheme) -> bool {
        self.schemes.as_ref().is_none_or(|s| s.contains(&scheme))
    }
}

pub fn parse_schemes(names: &[String]) -> Result<Vec<Scheme>> {
    let schemes = names
        .iter()
        .map(|n| n.parse::<Scheme>().map_err(anyhow::Error::from))
        .collect::<Result<Vec<_>>>()?;
    if schemes.is_empty() {
        bail!("scheme list is empty");
    }
    Ok(schemes)
}

/// Parses `"0,10,20"` into numbers.
pub fn parse_number_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .with_context(|| format!("'{}' is not a number", t.trim()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beat_defaults() {
        let file: FileConfig = toml::from_str("seed = 5\nsamples = 300\nvar_g = [0.5]").unwrap();
        let flags = Overrides {
            samples: Some(400),
            ..Overrides::default()
        };
        let c = ExperimentConfig::resolve(Command::Figure1, Some(&file), &flags).unwrap();
        assert_eq!(c.seed, 5);
        assert_eq!(c.samples, 400);
        assert_eq!(c.var_g, vec![0.5]);
        assert_eq!(c.inner_samples, 1000);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("sead = 5").is_err());
    }

    #[test]
    fn invalid_values_are_rejected() {
        let flags = Overrides {
            snr_db: Some(vec![]),
            ..Overrides::default()
        };
        assert!(ExperimentConfig::resolve(Command::Figure2, None, &flags).is_err());
        let flags = Overrides {
            schemes: Some(vec!["esa".into(), "nope".into()]),
            ..Overrides::default()
        };
        assert!(ExperimentConfig::resolve(Command::Figure2, None, &flags).is_err());
        let file: FileConfig = toml::from_str("var_g = [0.75, -1.0]").unwrap();
        assert!(
            ExperimentConfig::resolve(Command::Figure1, Some(&file), &Overrides::default())
                .is_err()
        );
    }

    #[test]
    fn number_lists() {
        assert_eq!(
            parse_number_list("0, 10,20").unwrap(),
            vec![0.0, 10.0, 20.0]
        );
        assert!(parse_number_list("0,x").is_err());
    }
}
