//! Seeded synthetic textures with known ground truth: DFT-bin gratings,
//! fractional Brownian surfaces, second-order GMRF fields and white noise.
//!
//! Every generator is a pure function of its [`SynthSpec`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TexError};
use crate::fft::{signed_frequency, Fft2};
use crate::gabor::{plan_bank, BankConfig, BankParams};
use crate::image::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SynthKind {
    /// `127.5 · (1 + cos(2π (kx·x + ky·y) / side + phase))` plus Gaussian noise,
    /// with `(kx, ky)` the DFT bin nearest to `frequency · (cos θ, sin θ)`.
    Grating {
        /// Cycles/image-width.
        frequency: f64,
        /// Radians.
        orientation: f64,
        /// Radians.
        phase: f64,
        /// Standard deviation of additive noise, intensity units.
        noise_sigma: f64,
    },
    /// Fractional Brownian surface with Hurst exponent in (0, 1), scaled to [0, 255].
    Fbm { hurst: f64 },
    /// Second-order GMRF with horizontal, vertical, main- and anti-diagonal
    /// interactions and unit conditional variance.
    GrfTexture { interactions: [f64; 4] },
    /// Independent standard normal pixels.
    Noise,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    #[serde(flatten)]
    pub kind: SynthKind,
    pub side: usize,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(kind: SynthKind, side: usize, seed: u64) -> Self {
        Self { kind, side, seed }
    }

    pub fn generate(&self) -> Result<GrayImage<f64>> {
        if !self.side.is_power_of_two() || self.side < 2 {
            return Err(TexError::Domain(format!("side {} must be a power of two", self.side)));
        }
        match self.kind {
            SynthKind::Grating { .. } => grating(self),
            SynthKind::Fbm { .. } => fbm_surface(self),
            SynthKind::GrfTexture { .. } => grf_texture(self),
            SynthKind::Noise => noise(self),
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Nearest DFT bin to a grating of `frequency` cycles/image-width at `orientation`.
pub fn snapped_bin(frequency: f64, orientation: f64) -> (i64, i64) {
    let (s, c) = orientation.sin_cos();
    ((frequency * c).round() as i64, (frequency * s).round() as i64)
}

pub fn grating(spec: &SynthSpec) -> Result<GrayImage<f64>> {
    let SynthKind::Grating { frequency, orientation, phase, noise_sigma } = spec.kind else {
        return Err(TexError::Domain("grating() needs a grating spec".into()));
    };
    let side = spec.side;
    if !(frequency >= 0.0 && frequency < side as f64 / 2.0) {
        return Err(TexError::Domain(format!("grating frequency {frequency} outside [0, {})", side / 2)));
    }
    let (kx, ky) = snapped_bin(frequency, orientation);
    let mut noise_rng = rng(spec.seed);
    let step = std::f64::consts::TAU / side as f64;
    GrayImage::from_fn(side, side, |x, y| {
        let arg = step * (kx * x as i64 + ky * y as i64).rem_euclid(side as i64) as f64 + phase;
        let clean = 127.5 * (1.0 + arg.cos());
        if noise_sigma > 0.0 {
            clean + noise_sigma * noise_rng.sample::<f64, _>(StandardNormal)
        } else {
            clean
        }
    })
}

/// Real part of the synthesized fBm field (before normalization) and the
/// largest imaginary magnitude left by the inverse transform.
pub fn fbm_field(hurst: f64, side: usize, seed: u64) -> Result<(Vec<f64>, f64)> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(TexError::Domain(format!("Hurst exponent {hurst} outside (0, 1)")));
    }
    // the transform of real white noise is a Hermitian complex Gaussian spectrum
    let mut r = rng(seed);
    let white: Vec<f64> = (0..side * side).map(|_| r.sample(StandardNormal)).collect();
    let fft = Fft2::<f64>::new(side, side);
    let mut spectrum = fft.forward_real(&white);
    for v in 0..side {
        let fv = signed_frequency::<f64>(v, side) * side as f64;
        for u in 0..side {
            let fu = signed_frequency::<f64>(u, side) * side as f64;
            let radial = fu.hypot(fv);
            let amplitude = if radial == 0.0 { 0.0 } else { radial.powf(-(hurst + 1.0)) };
            spectrum[v * side + u] *= amplitude;
        }
    }
    fft.inverse(&mut spectrum);
    let residue = spectrum.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    Ok((spectrum.iter().map(|c| c.re).collect(), residue))
}

/// Spectral synthesis with amplitude ∝ f^−(H+1), min-max scaled to [0, 255].
/// Its fractal dimension is 3 − H.
pub fn fbm_surface(spec: &SynthSpec) -> Result<GrayImage<f64>> {
    let SynthKind::Fbm { hurst } = spec.kind else {
        return Err(TexError::Domain("fbm_surface() needs an fbm spec".into()));
    };
    let (field, _) = fbm_field(hurst, spec.side, spec.seed)?;
    let (lo, hi) = field.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    GrayImage::new(spec.side, spec.side, field.iter().map(|&v| 255.0 * (v - lo) / span).collect())
}

/// Periodic GMRF drawn exactly by shaping white noise with the inverse
/// square root of `1 − 2 Σ β_r cos(ω·r)`.
pub fn grf_texture(spec: &SynthSpec) -> Result<GrayImage<f64>> {
    let SynthKind::GrfTexture { interactions } = spec.kind else {
        return Err(TexError::Domain("grf_texture() needs a grf_texture spec".into()));
    };
    if interactions.iter().map(|b| b.abs()).sum::<f64>() >= 0.5 {
        return Err(TexError::Domain("interaction magnitudes must sum below 0.5".into()));
    }
    let side = spec.side;
    let mut r = rng(spec.seed);
    let white: Vec<f64> = (0..side * side).map(|_| r.sample(StandardNormal)).collect();
    let fft = Fft2::<f64>::new(side, side);
    let mut spectrum = fft.forward_real(&white);
    let [bh, bv, bd1, bd2] = interactions;
    let tau = std::f64::consts::TAU;
    for v in 0..side {
        let wy = tau * v as f64 / side as f64;
        for u in 0..side {
            let wx = tau * u as f64 / side as f64;
            let s = 1.0 - 2.0 * (bh * wx.cos() + bv * wy.cos() + bd1 * (wx + wy).cos() + bd2 * (wx - wy).cos());
            spectrum[v * side + u] *= Complex::new(1.0 / s.sqrt(), 0.0);
        }
    }
    fft.inverse(&mut spectrum);
    GrayImage::new(side, side, spectrum.iter().map(|c| c.re).collect())
}

pub fn noise(spec: &SynthSpec) -> Result<GrayImage<f64>> {
    let mut r = rng(spec.seed);
    GrayImage::from_fn(spec.side, spec.side, |_, _| r.sample(StandardNormal))
}

/// One labelled image of the four-orientation corpus, generated on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusItem {
    pub id: String,
    pub label: String,
    pub case_id: String,
    pub spec: SynthSpec,
}

impl CorpusItem {
    pub fn image(&self) -> Result<GrayImage<f64>> {
        self.spec.generate()
    }
}

pub const CORPUS_NOISE_SIGMA: f64 = 20.0;
pub const CORPUS_ORIENTATIONS_DEG: [u32; 4] = [0, 45, 90, 135];

/// Mid-bank radial frequency (cycles/image-width) used by the corpus.
pub fn corpus_frequency(side: usize) -> Result<f64> {
    let bank: BankConfig<f64> = plan_bank(side, &BankParams::default())?;
    Ok(bank.radial_frequencies[(bank.radial_frequencies.len() - 1) / 2])
}

/// Four classes of noisy gratings, one per orientation in
/// [`CORPUS_ORIENTATIONS_DEG`], at the mid-bank frequency with a random
/// phase per image. Four consecutive images share a case identifier.
pub fn four_class_corpus(seed: u64, per_class: usize, side: usize) -> Result<Vec<CorpusItem>> {
    if per_class < 4 {
        return Err(TexError::Domain(format!("need at least 4 images per class, got {per_class}")));
    }
    let frequency = corpus_frequency(side)?;
    let mut r = rng(seed);
    let mut items = Vec::with_capacity(4 * per_class);
    for deg in CORPUS_ORIENTATIONS_DEG {
        let label = format!("orient{deg:03}");
        for j in 0..per_class {
            let phase = r.random_range(0.0..std::f64::consts::TAU);
            let noise_seed: u64 = r.random();
            items.push(CorpusItem {
                id: format!("{label}_{j:03}"),
                case_id: format!("{label}_case{}", j / 4),
                label: label.clone(),
                spec: SynthSpec::new(
                    SynthKind::Grating {
                        frequency,
                        orientation: f64::from(deg).to_radians(),
                        phase,
                        noise_sigma: CORPUS_NOISE_SIGMA,
                    },
                    side,
                    noise_seed,
                ),
            });
        }
    }
    Ok(items)
}
