use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use texbank_core::classify::{LabeledDataset, Sample};
use texbank_core::fixed_res::{
    fractal_dimension_with, glcm_features, gmrf_features, quantize, rlm_features, Direction,
};
use texbank_core::gabor::{plan_bank, GaborFilterer};
use texbank_core::image::{
    apply_mask, extract_channel, load_image, load_mask, mask_raw, pad_to_pow2, subtract_mean, BinaryMask, GrayImage,
};
use texbank_core::{fuse, FeatureVector};

use crate::config::{Extractor, RunConfig};
use crate::error::{CliError, Result};
use crate::manifest::{sample_id, Manifest};

pub const ID_COLUMNS: [&str; 3] = ["id", "label", "case_id"];

/// Feature extraction for one configuration. Gabor filterers are planned
/// once per padded image side and shared between threads.
pub struct FeaturePipeline {
    config: RunConfig,
    filterers: Mutex<HashMap<usize, Arc<GaborFilterer<f64>>>>,
}

impl FeaturePipeline {
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { config, filterers: Mutex::new(HashMap::new()) })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    fn filterer(&self, side: usize) -> Result<Arc<GaborFilterer<f64>>> {
        if let Some(f) = self.filterers.lock().unwrap().get(&side) {
            return Ok(f.clone());
        }
        let bank = plan_bank(side, &self.config.bank.params())?;
        let f = Arc::new(GaborFilterer::new(bank));
        Ok(self.filterers.lock().unwrap().entry(side).or_insert(f).clone())
    }

    /// Fused features of one gray image, in `fusion` order.
    pub fn features(&self, gray: &GrayImage<f64>, mask: Option<&BinaryMask>) -> Result<FeatureVector<f64>> {
        let raw = match mask {
            Some(m) => mask_raw(gray, m)?,
            None => gray.clone(),
        };
        let fr = &self.config.fixed_res;
        let mut parts = Vec::with_capacity(self.config.fusion.len());
        for extractor in &self.config.fusion {
            let part = match extractor {
                Extractor::Gabor => {
                    let centered = match mask {
                        Some(m) => apply_mask(gray, m)?,
                        None => subtract_mean(gray),
                    };
                    let padded = pad_to_pow2(&centered);
                    self.filterer(padded.width())?.features(&padded, self.config.bank.norm()?)?
                }
                Extractor::Fd => FeatureVector::single("fd", fractal_dimension_with(&raw, fr.fd_estimator)?)?,
                Extractor::Gmrf => gmrf_features(&raw)?,
                Extractor::Glcm => glcm_features(&quantize(&raw, fr.glcm_levels)?, fr.glcm_distance, &Direction::ALL)?,
                Extractor::Rlm => rlm_features(&quantize(&raw, fr.rlm_levels)?, &Direction::ALL)?,
            };
            parts.push(part);
        }
        Ok(fuse(&parts)?)
    }

    /// Loads `path`, picks the configured channel and applies the mask
    /// `<mask_dir>/<id>.png` when a mask directory is configured.
    pub fn extract_file(&self, path: &Path, id: &str) -> Result<FeatureVector<f64>> {
        let rgb = load_image(path)?;
        let gray: GrayImage<f64> = extract_channel(&rgb, self.config.channel);
        let mask = match &self.config.mask_dir {
            Some(dir) => Some(load_mask(mask_path(dir, id))?),
            None => None,
        };
        self.features(&gray, mask.as_ref())
    }
}

pub fn mask_path(dir: &Path, id: &str) -> PathBuf {
    dir.join(format!("{id}.png"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub id: String,
    pub label: String,
    pub case_id: String,
    pub values: Vec<f64>,
}

/// Feature CSV contents: `id,label,case_id` followed by one column per feature.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub names: Vec<String>,
    pub rows: Vec<FeatureRow>,
}

impl FeatureTable {
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| CliError::csv(path, e))?;
        let header = ID_COLUMNS.iter().copied().chain(self.names.iter().map(String::as_str));
        w.write_record(header).map_err(|e| CliError::csv(path, e))?;
        for row in &self.rows {
            let mut record = vec![row.id.clone(), row.label.clone(), row.case_id.clone()];
            record.extend(row.values.iter().map(|&v| format_sig(v, 12)));
            w.write_record(&record).map_err(|e| CliError::csv(path, e))?;
        }
        w.flush().map_err(|e| CliError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let schema = |msg: String| CliError::Core(texbank_core::TexError::Schema(format!("{}: {msg}", path.display())));
        let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::csv(path, e))?;
        let header = reader.headers().map_err(|e| CliError::csv(path, e))?.clone();
        if header.len() < 4 || header.iter().take(3).ne(ID_COLUMNS) {
            return Err(schema("header must be id,label,case_id followed by feature columns".into()));
        }
        let names: Vec<String> = header.iter().skip(3).map(String::from).collect();
        let mut rows = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(|e| CliError::csv(path, e))?;
            let values = record
                .iter()
                .skip(3)
                .zip(&names)
                .map(|(field, name)| match field.trim().parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => Err(schema(format!("row {}: column {name}: bad value `{field}`", line + 1))),
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(FeatureRow {
                id: record[0].to_string(),
                label: record[1].to_string(),
                case_id: record[2].to_string(),
                values,
            });
        }
        Ok(Self { names, rows })
    }

    pub fn into_dataset(self) -> Result<LabeledDataset<f64>> {
        let samples = self
            .rows
            .into_iter()
            .map(|r| Sample { id: r.id, case_id: r.case_id, label: r.label, values: r.values })
            .collect();
        Ok(LabeledDataset::new(self.names, samples)?)
    }
}

/// Runs extraction over the manifest on `jobs` worker threads (all logical
/// cores when `None`). Rows come back in manifest order. Nothing is written
/// unless every sample succeeds.
pub fn cmd_extract(manifest: &Path, config: &RunConfig, out: &Path, jobs: Option<usize>) -> Result<FeatureTable> {
    let manifest = Manifest::load(manifest)?;
    let table = extract_manifest(&manifest, config, jobs)?;
    table.write(out)?;
    Ok(table)
}

pub fn extract_manifest(manifest: &Manifest, config: &RunConfig, jobs: Option<usize>) -> Result<FeatureTable> {
    if manifest.is_empty() {
        return Err(CliError::Data("manifest has no rows".into()));
    }
    let pipeline = FeaturePipeline::new(config.clone())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("worker pool: {e}")))?;
    let vectors: Vec<(String, FeatureVector<f64>)> = pool.install(|| {
        manifest
            .rows
            .par_iter()
            .map(|row| {
                let id = sample_id(&row.path);
                let fv = pipeline.extract_file(&manifest.resolve(row), &id).map_err(|e| e.for_sample(&id))?;
                Ok((id, fv))
            })
            .collect::<Result<_>>()
    })?;

    let names = vectors[0].1.names().to_vec();
    let mut rows = Vec::with_capacity(vectors.len());
    for ((id, fv), row) in vectors.into_iter().zip(&manifest.rows) {
        if fv.names() != names.as_slice() {
            return Err(CliError::Data(format!(
                "sample {id}: feature columns differ from the first sample (images must share one padded side)"
            )));
        }
        let (_, values) = fv.into_parts();
        rows.push(FeatureRow { id, label: row.label.clone(), case_id: row.case_id.clone(), values });
    }
    Ok(FeatureTable { names, rows })
}

/// `%.{digits}g`-style formatting: shortest of fixed or exponent notation,
/// trailing zeros removed.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
