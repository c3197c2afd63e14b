//! Flat `key = value` experiment configuration.

use std::path::{Path, PathBuf};

use crate::baselines::TimeEvolvedMode;
use crate::policy::GrpoConfig;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub fcidump: PathBuf,
    /// Excitation amplitudes; MP2 doubles are used when absent.
    pub amps: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    /// Circuits per iteration.
    pub m: usize,
    pub n_shots: u64,
    pub n_iter: usize,
    /// Circuit length `L`.
    pub length: usize,
    /// `None` means the full sector dimension.
    pub d_max: Option<usize>,
    pub pool_threshold: f64,
    pub d_model: usize,
    pub n_heads: usize,
    pub n_layers: usize,
    pub d_ff: usize,
    pub repetition_penalty: f64,
    pub grpo: GrpoConfig,
    pub te_mode: TimeEvolvedMode,
    pub te_dt: f64,
    pub trotter_steps: usize,
    pub sqdrift_excitations: usize,
    pub sqdrift_randomizations: usize,
    /// Budget for baselines; `None` means `m · n_shots · n_iter`.
    pub baseline_shots: Option<u64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            fcidump: PathBuf::new(),
            amps: None,
            out: PathBuf::from("out"),
            seed: 0,
            m: 10,
            n_shots: 100_000,
            n_iter: 100,
            length: 10,
            d_max: None,
            pool_threshold: crate::pool::DEFAULT_THRESHOLD,
            d_model: 128,
            n_heads: 4,
            n_layers: 4,
            d_ff: 512,
            repetition_penalty: 1.2,
            grpo: GrpoConfig::default(),
            te_mode: TimeEvolvedMode::Single,
            te_dt: 1.0,
            trotter_steps: 1,
            sqdrift_excitations: 10,
            sqdrift_randomizations: 500,
            baseline_shots: None,
        }
    }
}

/// Keys accepted by [`ExperimentConfig::set`].
pub const KEYS: &[&str] = &[
    "fcidump", "amps", "out", "seed", "m", "n_shots", "n_iter", "length", "d_max", "pool_threshold", "d_model", "n_heads",
    "n_layers", "d_ff", "repetition_penalty", "clip_eps", "updates_per_batch", "learning_rate", "weight_decay",
    "sigma_floor", "te_mode", "te_dt", "trotter_steps", "sqdrift_excitations", "sqdrift_randomizations", "baseline_shots",
];

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    // Accept 1e5 style integers.
    v.parse::<T>().or_else(|_| {
        let f: f64 = v.parse().map_err(|_| Error::Config(format!("{key}: cannot parse '{v}'")))?;
        if f.fract() == 0.0 && f >= 0.0 {
            format!("{f:.0}").parse::<T>().map_err(|_| Error::Config(format!("{key}: cannot parse '{v}'")))
        } else {
            Err(Error::Config(format!("{key}: cannot parse '{v}'")))
        }
    })
}

impl ExperimentConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "fcidump" => self.fcidump = PathBuf::from(v),
            "amps" => self.amps = if v.is_empty() || v == "none" { None } else { Some(PathBuf::from(v)) },
            "out" => self.out = PathBuf::from(v),
            "seed" => self.seed = num(key, v)?,
            "m" => self.m = num(key, v)?,
            "n_shots" => self.n_shots = num(key, v)?,
            "n_iter" => self.n_iter = num(key, v)?,
            "length" => self.length = num(key, v)?,
            "d_max" => self.d_max = if v == "full" { None } else { Some(num(key, v)?) },
            "pool_threshold" => self.pool_threshold = num(key, v)?,
            "d_model" => self.d_model = num(key, v)?,
            "n_heads" => self.n_heads = num(key, v)?,
            "n_layers" => self.n_layers = num(key, v)?,
            "d_ff" => self.d_ff = num(key, v)?,
            "repetition_penalty" => self.repetition_penalty = num(key, v)?,
            "clip_eps" => self.grpo.clip_eps = num(key, v)?,
            "updates_per_batch" => self.grpo.updates_per_batch = num(key, v)?,
            "learning_rate" => self.grpo.learning_rate = num(key, v)?,
            "weight_decay" => self.grpo.weight_decay = num(key, v)?,
            "sigma_floor" => self.grpo.sigma_floor = num(key, v)?,
            "te_mode" => {
                self.te_mode = match v {
                    "single" => TimeEvolvedMode::Single,
                    "multiple" => TimeEvolvedMode::Multiple,
                    _ => return Err(Error::Config(format!("te_mode must be single or multiple, got '{v}'"))),
                }
            }
            "te_dt" => self.te_dt = num(key, v)?,
            "trotter_steps" => self.trotter_steps = num(key, v)?,
            "sqdrift_excitations" => self.sqdrift_excitations = num(key, v)?,
            "sqdrift_randomizations" => self.sqdrift_randomizations = num(key, v)?,
            "baseline_shots" => self.baseline_shots = Some(num(key, v)?),
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            self.set(k, v).map_err(|e| Error::Config(format!("line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let mut c = Self::default();
        c.apply_text(&std::fs::read_to_string(path)?)?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::Config("m must be at least 2".into()));
        }
        if self.length == 0 {
            return Err(Error::Config("length must be at least 1".into()));
        }
        if self.d_max == Some(0) {
            return Err(Error::Config("d_max must be at least 1".into()));
        }
        if !(self.grpo.clip_eps > 0.0 && self.grpo.clip_eps < 1.0) {
            return Err(Error::Config("clip_eps must lie in (0, 1)".into()));
        }
        if self.grpo.updates_per_batch == 0 {
            return Err(Error::Config("updates_per_batch must be at least 1".into()));
        }
        Ok(())
    }

    pub fn baseline_budget(&self) -> u64 {
        self.baseline_shots.unwrap_or(self.m as u64 * self.n_shots * self.n_iter as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_override() {
        let mut c = ExperimentConfig::default();
        c.apply_text("# demo\nfcidump = a.fcidump\nn_shots = 1e4 # shots\nd_max=170\nlearning_rate=1e-4\nte_mode=multiple\n")
            .unwrap();
        assert_eq!(c.fcidump, PathBuf::from("a.fcidump"));
        assert_eq!(c.n_shots, 10_000);
        assert_eq!(c.d_max, Some(170));
        assert_eq!(c.grpo.learning_rate, 1e-4);
        assert_eq!(c.te_mode, TimeEvolvedMode::Multiple);
        assert!(c.apply_text("bogus = 1").is_err());
        assert!(c.apply_text("m 3").is_err());
        assert!(c.apply_text("m = 2.5").is_err());
        c.m = 1;
        assert!(c.validate().is_err());
        for k in KEYS {
            assert!(!k.is_empty());
        }
    }
}
