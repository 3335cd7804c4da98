//! Tracker configuration and its flat `key = value` file format.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{MscfError, Result};

/// Rule for the center-exclusion radius d_min of the distance-weight matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DMinMode {
    /// Half the target diagonal, measured in feature cells.
    HalfDiagonal,
    /// Fixed radius in feature cells.
    Fixed(f64),
}

impl DMinMode {
    pub fn radius(&self, target_cells: (usize, usize)) -> f64 {
        match self {
            DMinMode::HalfDiagonal => {
                0.5 * ((target_cells.0 as f64).hypot(target_cells.1 as f64))
            }
            DMinMode::Fixed(v) => *v,
        }
    }

    fn to_config_value(self) -> String {
        match self {
            DMinMode::HalfDiagonal => "half_diagonal".to_string(),
            DMinMode::Fixed(v) => format!("fixed:{v}"),
        }
    }

    fn parse(s: &str) -> Option<DMinMode> {
        if s == "half_diagonal" {
            Some(DMinMode::HalfDiagonal)
        } else if let Some(v) = s.strip_prefix("fixed:") {
            v.trim().parse::<f64>().ok().map(DMinMode::Fixed)
        } else {
            None
        }
    }
}

/// All tracker hyperparameters. Defaults are the reference parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct MscfConfig {
    /// Filter ridge weight λ1.
    pub lambda1: f64,
    /// Ideal-label attraction weight λ2.
    pub lambda2: f64,
    /// Temporal label consistency weight φ.
    pub phi: f64,
    /// Initial ADMM penalty μ0.
    pub mu0: f64,
    /// Penalty ceiling.
    pub mu_max: f64,
    /// Penalty growth factor β.
    pub beta: f64,
    /// Fixed ADMM iteration count.
    pub admm_iters: usize,
    /// Pedestal suppression coefficient θ.
    pub theta: f64,
    /// Distance-weight numerator ν.
    pub nu: f64,
    /// Distance-decay coefficient δ.
    pub delta: f64,
    /// Pedestal arm length as a multiple of the target extent.
    pub pedestal_ratio: f64,
    /// Pedestal altitude relative to the unit Gaussian peak.
    pub pedestal_altitude: f64,
    /// Feature-model interpolation rate.
    pub learning_rate: f64,
    /// Filter/label retraining cadence in frames.
    pub train_interval: usize,
    /// Feature cell size in pixels.
    pub cell_size: usize,
    /// Search region size as a multiple of the target box.
    pub search_padding: f64,
    /// Gaussian label width factor (σ = factor · √(target cell area)).
    pub output_sigma_factor: f64,
    /// Center-exclusion rule for sub-peak scoring.
    pub d_min_mode: DMinMode,
    /// When false, ψ is forced to 0 everywhere (label adaptation off).
    pub mtf_enabled: bool,
}

impl Default for MscfConfig {
    fn default() -> Self {
        MscfConfig {
            lambda1: 20.0,
            lambda2: 840.0,
            phi: 1.0,
            mu0: 0.1,
            mu_max: 10000.0,
            beta: 10.0,
            admm_iters: 3,
            theta: 0.044,
            nu: 1.0,
            delta: 0.01,
            pedestal_ratio: 2.5,
            pedestal_altitude: 0.1,
            learning_rate: 0.0158,
            train_interval: 2,
            cell_size: 4,
            search_padding: 4.0,
            output_sigma_factor: 1.0 / 16.0,
            d_min_mode: DMinMode::HalfDiagonal,
            mtf_enabled: true,
        }
    }
}

/// Key order used when serializing; also the set of accepted keys.
const KEYS: &[&str] = &[
    "lambda1",
    "lambda2",
    "phi",
    "mu0",
    "mu_max",
    "beta",
    "admm_iters",
    "theta",
    "nu",
    "delta",
    "pedestal_ratio",
    "pedestal_altitude",
    "learning_rate",
    "train_interval",
    "cell_size",
    "search_padding",
    "output_sigma_factor",
    "d_min_mode",
    "mtf_enabled",
];

impl MscfConfig {
    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("phi", self.phi),
            ("theta", self.theta),
            ("delta", self.delta),
            ("nu", self.nu),
        ];
        for (name, v) in nonneg {
            if !v.is_finite() || v < 0.0 {
                return Err(MscfError::config(format!("{name} must be >= 0 (got {v})")));
            }
        }
        if !(self.mu0 > 0.0 && self.mu0 <= self.mu_max) {
            return Err(MscfError::config(format!(
                "require 0 < mu0 <= mu_max (got mu0={}, mu_max={})",
                self.mu0, self.mu_max
            )));
        }
        if self.beta <= 1.0 {
            return Err(MscfError::config(format!("beta must be > 1 (got {})", self.beta)));
        }
        if self.admm_iters == 0 {
            return Err(MscfError::config("admm_iters must be >= 1"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(MscfError::config(format!(
                "learning_rate must lie in (0, 1] (got {})",
                self.learning_rate
            )));
        }
        if self.train_interval == 0 {
            return Err(MscfError::config("train_interval must be >= 1"));
        }
        if self.cell_size == 0 {
            return Err(MscfError::config("cell_size must be >= 1"));
        }
        if !(self.search_padding >= 1.0) {
            return Err(MscfError::config(format!(
                "search_padding must be >= 1 (got {})",
                self.search_padding
            )));
        }
        if !(self.output_sigma_factor > 0.0) {
            return Err(MscfError::config("output_sigma_factor must be > 0"));
        }
        if self.theta > 1.0 {
            // ψ ≤ 1, so θ ≤ 1 keeps the pedestal weight (1 − θψ) non-negative.
            return Err(MscfError::config(format!("theta must be <= 1 (got {})", self.theta)));
        }
        if let DMinMode::Fixed(v) = self.d_min_mode {
            if !v.is_finite() || v < 0.0 {
                return Err(MscfError::config(format!("fixed d_min must be >= 0 (got {v})")));
            }
        }
        if !self.pedestal_altitude.is_finite() || self.pedestal_altitude < 0.0 {
            return Err(MscfError::config("pedestal_altitude must be >= 0"));
        }
        if !self.pedestal_ratio.is_finite() || self.pedestal_ratio <= 0.0 {
            return Err(MscfError::config("pedestal_ratio must be > 0"));
        }
        Ok(())
    }

    fn set_key(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        let bad = |msg: String| MscfError::Parse { line, msg };
        let parse_f64 = |v: &str| -> Result<f64> {
            v.parse::<f64>()
                .map_err(|_| bad(format!("expected a number for `{key}`, got `{v}`")))
        };
        let parse_usize = |v: &str| -> Result<usize> {
            v.parse::<usize>()
                .map_err(|_| bad(format!("expected a count for `{key}`, got `{v}`")))
        };
        match key {
            "lambda1" => self.lambda1 = parse_f64(value)?,
            "lambda2" => self.lambda2 = parse_f64(value)?,
            "phi" => self.phi = parse_f64(value)?,
            "mu0" => self.mu0 = parse_f64(value)?,
            "mu_max" => self.mu_max = parse_f64(value)?,
            "beta" => self.beta = parse_f64(value)?,
            "admm_iters" => self.admm_iters = parse_usize(value)?,
            "theta" => self.theta = parse_f64(value)?,
            "nu" => self.nu = parse_f64(value)?,
            "delta" => self.delta = parse_f64(value)?,
            "pedestal_ratio" => self.pedestal_ratio = parse_f64(value)?,
            "pedestal_altitude" => self.pedestal_altitude = parse_f64(value)?,
            "learning_rate" => self.learning_rate = parse_f64(value)?,
            "train_interval" => self.train_interval = parse_usize(value)?,
            "cell_size" => self.cell_size = parse_usize(value)?,
            "search_padding" => self.search_padding = parse_f64(value)?,
            "output_sigma_factor" => self.output_sigma_factor = parse_f64(value)?,
            "d_min_mode" => {
                self.d_min_mode = DMinMode::parse(value).ok_or_else(|| {
                    bad(format!(
                        "d_min_mode must be `half_diagonal` or `fixed:<radius>`, got `{value}`"
                    ))
                })?
            }
            "mtf_enabled" => {
                self.mtf_enabled = value.parse::<bool>().map_err(|_| {
                    bad(format!("expected true/false for `mtf_enabled`, got `{value}`"))
                })?
            }
            // The reference parameter list carries gamma values that no
            // equation consumes; accept and ignore them so those config
            // files still load.
            "gamma" | "gamma_max" => {
                log::warn!("config key `{key}` is accepted but unused; ignoring value {value}");
            }
            _ => {
                return Err(bad(format!("unknown config key `{key}`")));
            }
        }
        Ok(())
    }

    /// Parses the flat `key = value` format. `#` starts a comment; blank
    /// lines are skipped; unknown keys are an error.
    pub fn from_config_str(text: &str) -> Result<MscfConfig> {
        let mut cfg = MscfConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| MscfError::Parse {
                line: line_no,
                msg: format!("expected `key = value`, got `{line}`"),
            })?;
            cfg.set_key(key.trim(), value.trim(), line_no)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<MscfConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| MscfError::io(path, e))?;
        MscfConfig::from_config_str(&text)
    }

    /// Serializes to the config file format. Parsing the result reproduces
    /// the value exactly (f64 Display round-trips).
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        for &key in KEYS {
            let value = match key {
                "lambda1" => self.lambda1.to_string(),
                "lambda2" => self.lambda2.to_string(),
                "phi" => self.phi.to_string(),
                "mu0" => self.mu0.to_string(),
                "mu_max" => self.mu_max.to_string(),
                "beta" => self.beta.to_string(),
                "admm_iters" => self.admm_iters.to_string(),
                "theta" => self.theta.to_string(),
                "nu" => self.nu.to_string(),
                "delta" => self.delta.to_string(),
                "pedestal_ratio" => self.pedestal_ratio.to_string(),
                "pedestal_altitude" => self.pedestal_altitude.to_string(),
                "learning_rate" => self.learning_rate.to_string(),
                "train_interval" => self.train_interval.to_string(),
                "cell_size" => self.cell_size.to_string(),
                "search_padding" => self.search_padding.to_string(),
                "output_sigma_factor" => self.output_sigma_factor.to_string(),
                "d_min_mode" => self.d_min_mode.to_config_value(),
                "mtf_enabled" => self.mtf_enabled.to_string(),
                _ => unreachable!(),
            };
            let _ = writeln!(out, "{key} = {value}");
        }
        out
    }

    /// Applies `MSCF_<KEY>` overrides from an environment snapshot.
    pub fn apply_env_overrides<I>(&mut self, vars: I) -> Result<()>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        for (name, value) in vars {
            if let Some(key) = name.strip_prefix("MSCF_") {
                let key = key.to_ascii_lowercase();
                if KEYS.contains(&key.as_str()) || key == "gamma" || key == "gamma_max" {
                    self.set_key(&key, value.trim(), 0)?;
                }
            }
        }
        self.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_values() {
        let c = MscfConfig::default();
        assert_eq!(c.lambda1, 20.0);
        assert_eq!(c.lambda2, 840.0);
        assert_eq!(c.phi, 1.0);
        assert_eq!(c.mu0, 0.1);
        assert_eq!(c.mu_max, 10000.0);
        assert_eq!(c.beta, 10.0);
        assert_eq!(c.admm_iters, 3);
        assert_eq!(c.theta, 0.044);
        assert_eq!(c.nu, 1.0);
        assert_eq!(c.delta, 0.01);
        assert_eq!(c.pedestal_ratio, 2.5);
        assert_eq!(c.learning_rate, 0.0158);
        assert_eq!(c.train_interval, 2);
        assert_eq!(c.cell_size, 4);
        assert_eq!(c.output_sigma_factor, 0.0625);
        c.validate().unwrap();
    }

    #[test]
    fn round_trips_through_config_format() {
        let c = MscfConfig::default();
        let text = c.to_config_string();
        let back = MscfConfig::from_config_str(&text).unwrap();
        assert_eq!(c, back);

        let mut odd = MscfConfig::default();
        odd.learning_rate = 0.013_713_000_000_001;
        odd.d_min_mode = DMinMode::Fixed(3.25);
        odd.mtf_enabled = false;
        let back = MscfConfig::from_config_str(&odd.to_config_string()).unwrap();
        assert_eq!(odd, back);
    }

    #[test]
    fn unknown_key_is_an_error() {
        let err = MscfConfig::from_config_str("lambda_one = 3\n").unwrap_err();
        assert!(matches!(err, MscfError::Parse { line: 1, .. }));
    }

    #[test]
    fn gamma_keys_are_ignored() {
        let c = MscfConfig::from_config_str("gamma = 27\ngamma_max = 10000\nlambda1 = 21\n").unwrap();
        assert_eq!(c.lambda1, 21.0);
    }

    #[test]
    fn comments_and_blanks_are_skipped() {
        let c = MscfConfig::from_config_str("# header\n\nlambda2 = 800 # trailing\n").unwrap();
        assert_eq!(c.lambda2, 800.0);
    }

    #[test]
    fn env_overrides_apply() {
        let mut c = MscfConfig::default();
        let vars = vec![
            ("MSCF_LAMBDA1".to_string(), "5".to_string()),
            ("MSCF_TRAIN_INTERVAL".to_string(), "3".to_string()),
            ("UNRELATED".to_string(), "x".to_string()),
            ("MSCF_NOT_A_KEY".to_string(), "1".to_string()),
        ];
        c.apply_env_overrides(vars).unwrap();
        assert_eq!(c.lambda1, 5.0);
        assert_eq!(c.train_interval, 3);
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(MscfConfig::from_config_str("beta = 1.0\n").is_err());
        assert!(MscfConfig::from_config_str("learning_rate = 0\n").is_err());
        assert!(MscfConfig::from_config_str("mu0 = 20000\n").is_err());
        assert!(MscfConfig::from_config_str("admm_iters = 0\n").is_err());
    }
}
