//! Run configuration (TOML). Every table rejects unknown keys.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{Hooks, Scheme, StepperConfig};
use crate::kernel::{KernelError, KernelProfile};
use crate::presets::Preset;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("grid.n must be even, got {0}")]
    RejectedOddN(usize),
    #[error("invalid config value: {0}")]
    InvalidValue(String),
    #[error("missing config key: {0}")]
    Missing(&'static str),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub time: TimeConfig,
    pub kernel: KernelConfig,
    pub init: InitConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_end: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default = "default_dt_max")]
    pub dt_max: f64,
    #[serde(default = "default_sample_every")]
    pub sample_every: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    PowerLaw,
    LogWeak,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub family: FamilyName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub override_weak: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresetName {
    OrszagTang,
    RandomBand,
    SingleMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitConfig {
    pub preset: PresetName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default)]
    pub snapshots: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: default_dir(), snapshots: false }
    }
}

fn default_cfl() -> f64 {
    0.5
}
fn default_dt_max() -> f64 {
    0.01
}
fn default_sample_every() -> u64 {
    10
}
fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::InvalidValue(m));
        let n = self.grid.n;
        if n % 2 != 0 {
            return Err(ConfigError::RejectedOddN(n));
        }
        if n < 32 {
            return bad(format!("grid.n must be at least 32, got {n}"));
        }
        let t = &self.time;
        if !(t.t_end.is_finite() && t.t_end >= 0.0) {
            return bad(format!("time.t_end must be finite and non-negative, got {}", t.t_end));
        }
        if !(t.cfl > 0.0 && t.cfl <= 1.0) {
            return bad(format!("time.cfl must lie in (0, 1], got {}", t.cfl));
        }
        if !(t.dt_max > 0.0 && t.dt_max.is_finite()) {
            return bad(format!("time.dt_max must be positive, got {}", t.dt_max));
        }
        if t.sample_every == 0 {
            return bad("time.sample_every must be at least 1".into());
        }
        self.check_kernel_keys()?;
        self.check_init_keys()?;
        self.profile()?;
        Ok(())
    }

    fn check_kernel_keys(&self) -> Result<(), ConfigError> {
        let k = &self.kernel;
        let present = [
            ("alpha", k.alpha.is_some()),
            ("eps1", k.eps1.is_some()),
            ("eps2", k.eps2.is_some()),
            ("radii", k.radii.is_some()),
            ("values", k.values.is_some()),
        ];
        let allowed: &[&str] = match k.family {
            FamilyName::PowerLaw => &["alpha"],
            FamilyName::LogWeak => &["eps1", "eps2"],
            FamilyName::Tabulated => &["radii", "values"],
        };
        for (name, is_set) in present {
            if is_set && !allowed.contains(&name) {
                return Err(ConfigError::InvalidValue(format!("kernel.{name} does not apply to this family")));
            }
        }
        Ok(())
    }

    fn check_init_keys(&self) -> Result<(), ConfigError> {
        let i = &self.init;
        let present = [
            ("amplitude", i.amplitude.is_some()),
            ("beta", i.beta.is_some()),
            ("k_min", i.k_min.is_some()),
            ("k_max", i.k_max.is_some()),
            ("seed", i.seed.is_some()),
        ];
        let allowed: &[&str] = match i.preset {
            PresetName::OrszagTang => &["beta"],
            PresetName::RandomBand => &["amplitude", "k_min", "k_max", "seed"],
            PresetName::SingleMode => &["amplitude"],
        };
        for (name, is_set) in present {
            if is_set && !allowed.contains(&name) {
                return Err(ConfigError::InvalidValue(format!("init.{name} does not apply to this preset")));
            }
        }
        if i.preset == PresetName::RandomBand && i.seed.is_none() {
            return Err(ConfigError::Missing("init.seed"));
        }
        Ok(())
    }

    pub fn profile(&self) -> Result<KernelProfile, ConfigError> {
        let k = &self.kernel;
        let p = match k.family {
            FamilyName::PowerLaw => {
                KernelProfile::power_law(k.alpha.ok_or(ConfigError::Missing("kernel.alpha"))?, k.override_weak)?
            }
            FamilyName::LogWeak => KernelProfile::log_weak(
                k.eps1.ok_or(ConfigError::Missing("kernel.eps1"))?,
                k.eps2.ok_or(ConfigError::Missing("kernel.eps2"))?,
                k.override_weak,
            )?,
            FamilyName::Tabulated => KernelProfile::tabulated(
                k.radii.clone().ok_or(ConfigError::Missing("kernel.radii"))?,
                k.values.clone().ok_or(ConfigError::Missing("kernel.values"))?,
                k.override_weak,
            )?,
        };
        Ok(p)
    }

    pub fn preset(&self) -> Result<Preset, ConfigError> {
        let i = &self.init;
        Ok(match i.preset {
            PresetName::OrszagTang => Preset::OrszagTang { beta: i.beta.unwrap_or(0.5) },
            PresetName::SingleMode => Preset::SingleMode { amplitude: i.amplitude.unwrap_or(1.0) },
            PresetName::RandomBand => Preset::RandomBand {
                amplitude: i.amplitude.unwrap_or(1.0),
                k_min: i.k_min.unwrap_or(2.0),
                k_max: i.k_max.unwrap_or(8.0),
                seed: i.seed.ok_or(ConfigError::Missing("init.seed"))?,
            },
        })
    }

    pub fn stepper_config(&self) -> StepperConfig {
        StepperConfig { cfl: self.time.cfl, dt_max: self.time.dt_max, scheme: Scheme::IfRk4, hooks: Hooks::default() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[grid]
n = 64
[time]
t_end = 1.0
[kernel]
family = "power_law"
alpha = 0.5
[init]
preset = "orszag_tang"
"#;

    pub const FULL: &str = r#"
[grid]
n = 128

[time]
t_end = 2.0
cfl = 0.4
dt_max = 0.005
sample_every = 5

[kernel]
family = "log_weak"
eps1 = 1.0
eps2 = 1.0
override_weak = false

[init]
preset = "random_band"
amplitude = 1.0
k_min = 2.0
k_max = 8.0
seed = 42

[output]
dir = "runs/lw"
snapshots = true
"#;

    #[test]
    fn minimal_file_gets_defaults() {
        let c = parse_config_str(MINIMAL).unwrap();
        assert_eq!(c.time.cfl, 0.5);
        assert_eq!(c.time.dt_max, 0.01);
        assert_eq!(c.time.sample_every, 10);
        assert!(!c.kernel.override_weak);
        assert_eq!(c.output, OutputConfig::default());
        assert_eq!(c.preset().unwrap(), Preset::OrszagTang { beta: 0.5 });
    }

    #[test]
    fn full_example_round_trips() {
        let c = parse_config_str(FULL).unwrap();
        let again = parse_config_str(&c.to_toml()).unwrap();
        assert_eq!(c, again);
        assert_eq!(again.preset().unwrap(), Preset::RandomBand { amplitude: 1.0, k_min: 2.0, k_max: 8.0, seed: 42 });
    }

    #[test]
    fn odd_n_is_rejected() {
        let text = MINIMAL.replace("n = 64", "n = 33");
        assert!(matches!(parse_config_str(&text), Err(ConfigError::RejectedOddN(33))));
    }

    #[test]
    fn strictness() {
        assert!(matches!(parse_config_str(&MINIMAL.replace("alpha", "alpah")), Err(ConfigError::Parse(_))));
        assert!(matches!(
            parse_config_str(&MINIMAL.replace("t_end = 1.0", "t_end = 1.0\ncfll = 0.3")),
            Err(ConfigError::Parse(_))
        ));
        assert!(matches!(parse_config_str(&MINIMAL.replace("n = 64", "n = \"64\"")), Err(ConfigError::Parse(_))));
        assert!(matches!(
            parse_config_str(&MINIMAL.replace("alpha = 0.5", "")),
            Err(ConfigError::Missing("kernel.alpha"))
        ));
        assert!(matches!(
            parse_config_str(&MINIMAL.replace("alpha = 0.5", "alpha = 0.5\neps1 = 1.0")),
            Err(ConfigError::InvalidValue(_))
        ));
        assert!(matches!(parse_config_str(&FULL.replace("seed = 42", "")), Err(ConfigError::Missing("init.seed"))));
        assert!(matches!(parse_config_str(&MINIMAL.replace("n = 64", "n = 16")), Err(ConfigError::InvalidValue(_))));
        assert!(matches!(parse_config_str(&MINIMAL.replace("[grid]\nn = 64", "")), Err(ConfigError::Parse(_))));
    }
}
