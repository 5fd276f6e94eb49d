use std::path::Path;

use serde::Serialize;
use texbank_core::gabor::{plan_bank, BankConfig};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterEntry {
    pub index: usize,
    pub frequency_cycles_per_width: f64,
    pub frequency_cycles_per_pixel: f64,
    pub orientation_deg: f64,
    pub orientation_rad: f64,
    pub sigma_x: f64,
    pub sigma_y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BankDump {
    pub image_width: usize,
    pub orientation_count: usize,
    pub candidate_count: usize,
    pub envelope: texbank_core::gabor::Envelope,
    /// Frequency-major.
    pub filters: Vec<FilterEntry>,
}

impl From<&BankConfig<f64>> for BankDump {
    fn from(bank: &BankConfig<f64>) -> Self {
        let filters = bank
            .filters
            .iter()
            .enumerate()
            .map(|(index, f)| {
                let (_, o) = bank.grid_position(index);
                FilterEntry {
                    index,
                    frequency_cycles_per_width: f.frequency * bank.image_width as f64,
                    frequency_cycles_per_pixel: f.frequency,
                    orientation_deg: bank.orientation_degrees(o),
                    orientation_rad: f.orientation,
                    sigma_x: f.sigma_x,
                    sigma_y: f.sigma_y,
                }
            })
            .collect();
        Self {
            image_width: bank.image_width,
            orientation_count: bank.orientation_count,
            candidate_count: bank.candidate_count,
            envelope: bank.envelope,
            filters,
        }
    }
}

pub fn cmd_bank_dump(config: &RunConfig, nc: usize, out: &Path) -> Result<BankDump> {
    let bank: BankConfig<f64> = plan_bank(nc, &config.bank.params()).map_err(|e| CliError::Config(e.to_string()))?;
    let dump = BankDump::from(&bank);
    let json = serde_json::to_string_pretty(&dump).map_err(|e| CliError::Data(e.to_string()))?;
    std::fs::write(out, json + "\n").map_err(|e| CliError::io(out, e))?;
    Ok(dump)
}
