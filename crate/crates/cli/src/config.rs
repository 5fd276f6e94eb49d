use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use texbank_core::fixed_res::FdEstimator;
use texbank_core::gabor::{BankParams, EnergyNorm, Envelope};
use texbank_core::image::Channel;

use crate::error::{CliError, Result};

/// Feature extractors that can appear in `fusion`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extractor {
    Gabor,
    Fd,
    Gmrf,
    Glcm,
    Rlm,
}

impl fmt::Display for Extractor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Extractor::Gabor => "gabor",
            Extractor::Fd => "fd",
            Extractor::Gmrf => "gmrf",
            Extractor::Glcm => "glcm",
            Extractor::Rlm => "rlm",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BankSection {
    pub orientation_count: usize,
    /// Octaves.
    pub frequency_bandwidth: f64,
    /// Degrees.
    pub orientation_bandwidth_deg: f64,
    pub envelope: Envelope,
    /// Energy exponent k: 1 for mean magnitude, 2 for mean square.
    pub energy_norm: u32,
}

impl Default for BankSection {
    fn default() -> Self {
        let p = BankParams::default();
        Self {
            orientation_count: p.orientation_count,
            frequency_bandwidth: p.frequency_bandwidth,
            orientation_bandwidth_deg: p.orientation_bandwidth_deg,
            envelope: p.envelope,
            energy_norm: 1,
        }
    }
}

impl BankSection {
    pub fn params(&self) -> BankParams {
        BankParams {
            orientation_count: self.orientation_count,
            frequency_bandwidth: self.frequency_bandwidth,
            orientation_bandwidth_deg: self.orientation_bandwidth_deg,
            envelope: self.envelope,
        }
    }

    pub fn norm(&self) -> Result<EnergyNorm> {
        EnergyNorm::try_from(self.energy_norm).map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FixedResSection {
    pub glcm_levels: usize,
    pub glcm_distance: usize,
    pub rlm_levels: usize,
    pub fd: bool,
    pub fd_estimator: FdEstimator,
}

impl Default for FixedResSection {
    fn default() -> Self {
        Self { glcm_levels: 64, glcm_distance: 1, rlm_levels: 16, fd: true, fd_estimator: FdEstimator::default() }
    }
}

/// Extraction settings. Every field is optional in the JSON file; the
/// defaults are the blue channel, a four-orientation one-octave bank with
/// 45° orientation bandwidth, circular envelope and k = 1, Gabor features only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub channel: Channel,
    pub bank: BankSection,
    pub fixed_res: FixedResSection,
    pub fusion: Vec<Extractor>,
    /// Directory of 8-bit PNG masks named `<image stem>.png`, nonzero = keep.
    /// Relative paths are taken from the config file's directory.
    pub mask_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            channel: Channel::Blue,
            bank: BankSection::default(),
            fixed_res: FixedResSection::default(),
            fusion: vec![Extractor::Gabor],
            mask_dir: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut config: RunConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if let Some(dir) = config.mask_dir.as_mut() {
            if dir.is_relative() {
                *dir = path.parent().unwrap_or(Path::new(".")).join(&*dir);
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.fusion.is_empty() {
            return Err(CliError::Config("fusion list is empty".into()));
        }
        for (i, e) in self.fusion.iter().enumerate() {
            if self.fusion[..i].contains(e) {
                return Err(CliError::Config(format!("extractor `{e}` listed twice in fusion")));
            }
        }
        if self.fusion.contains(&Extractor::Fd) && !self.fixed_res.fd {
            return Err(CliError::Config("fusion uses `fd` but fixed_res.fd is false".into()));
        }
        self.bank.norm()?;
        if self.fixed_res.glcm_levels < 2 || self.fixed_res.rlm_levels < 2 {
            return Err(CliError::Config("quantization needs at least 2 gray levels".into()));
        }
        if self.fixed_res.glcm_levels > u16::MAX as usize || self.fixed_res.rlm_levels > u16::MAX as usize {
            return Err(CliError::Config("too many gray levels".into()));
        }
        if self.fixed_res.glcm_distance == 0 {
            return Err(CliError::Config("glcm_distance must be positive".into()));
        }
        Ok(())
    }
}
