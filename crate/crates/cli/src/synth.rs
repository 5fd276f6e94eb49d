use std::path::Path;

use rayon::prelude::*;
use texbank_core::image::GrayImage;
use texbank_core::synth::{four_class_corpus, SynthKind, SynthSpec};

use crate::error::{CliError, Result};
use crate::manifest::{Manifest, ManifestRow};

#[derive(Debug, Clone, PartialEq)]
pub enum SynthRequest {
    /// Four-orientation grating corpus.
    Corpus { seed: u64, per_class: usize, side: usize },
    /// One image of any generator kind.
    Single(SynthSpec),
}

pub fn kind_name(kind: &SynthKind) -> &'static str {
    match kind {
        SynthKind::Grating { .. } => "grating",
        SynthKind::Fbm { .. } => "fbm",
        SynthKind::GrfTexture { .. } => "grf",
        SynthKind::Noise => "noise",
    }
}

/// 8-bit pixels. Gratings and fBm are already in intensity units and are
/// clamped; GMRF textures and noise are min-max stretched first.
pub fn to_bytes(img: &GrayImage<f64>, stretch: bool) -> Vec<u8> {
    let (lo, hi) = img.min_max();
    let (offset, scale) = if stretch && hi > lo { (lo, 255.0 / (hi - lo)) } else if stretch { (lo, 0.0) } else { (0.0, 1.0) };
    img.values().iter().map(|&v| ((v - offset) * scale).round().clamp(0.0, 255.0) as u8).collect()
}

pub fn write_png(path: &Path, img: &GrayImage<f64>, stretch: bool) -> Result<()> {
    let buf = image::GrayImage::from_raw(img.width() as u32, img.height() as u32, to_bytes(img, stretch))
        .ok_or_else(|| CliError::Data("image buffer size mismatch".into()))?;
    buf.save_with_format(path, image::ImageFormat::Png).map_err(|e| match e {
        image::ImageError::IoError(source) => CliError::io(path, source),
        other => CliError::Data(format!("{}: {other}", path.display())),
    })
}

/// Writes PNGs plus `manifest.csv` into `out_dir`. Output depends only on
/// the request.
pub fn cmd_synth(request: &SynthRequest, out_dir: &Path) -> Result<Manifest> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let rows: Vec<ManifestRow> = match request {
        SynthRequest::Corpus { seed, per_class, side } => {
            let items = four_class_corpus(*seed, *per_class, *side)?;
            items
                .par_iter()
                .map(|item| {
                    let file = format!("{}.png", item.id);
                    write_png(&out_dir.join(&file), &item.image()?, false)?;
                    Ok(ManifestRow { path: file, label: item.label.clone(), case_id: item.case_id.clone() })
                })
                .collect::<Result<_>>()?
        }
        SynthRequest::Single(spec) => {
            let name = kind_name(&spec.kind);
            let stretch = matches!(spec.kind, SynthKind::GrfTexture { .. } | SynthKind::Noise);
            let file = format!("{name}.png");
            write_png(&out_dir.join(&file), &spec.generate()?, stretch)?;
            vec![ManifestRow { path: file, label: name.into(), case_id: format!("{name}_case0") }]
        }
    };
    let manifest = Manifest::new(rows, out_dir)?;
    manifest.write(&out_dir.join("manifest.csv"))?;
    Ok(manifest)
}
