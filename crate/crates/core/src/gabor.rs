//! Dyadic Gabor filter bank: envelope design, analytic spatial and
//! frequency responses, frequency-domain filtering and energy signatures.
//!
//! Radial frequencies are quoted in cycles/image-width in [`BankConfig`] and
//! in cycles/pixel in [`GaborFilterSpec`]. Filtering multiplies the image
//! spectrum by the two-lobe Gaussian transfer function sampled on the DFT
//! grid, so borders wrap around.

use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TexError};
use crate::features::FeatureVector;
use crate::fft::{signed_frequency, Fft2};
use crate::image::ZeroMeanImage;
use crate::scalar::Real;

/// Which envelope the bank uses once bandwidths have fixed both sigmas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Envelope {
    /// Separate along-wave and across-wave sigmas.
    Elliptic,
    /// Circular, both sigmas set to the frequency-bandwidth sigma.
    #[default]
    CircularFrequency,
    /// Circular, both sigmas set to the orientation-bandwidth sigma.
    CircularOrientation,
}

impl Envelope {
    pub fn is_circular(self) -> bool {
        !matches!(self, Envelope::Elliptic)
    }

    fn resolve<T: Real>(self, sigma_x: T, sigma_y: T) -> (T, T) {
        match self {
            Envelope::Elliptic => (sigma_x, sigma_y),
            Envelope::CircularFrequency => (sigma_x, sigma_x),
            Envelope::CircularOrientation => (sigma_y, sigma_y),
        }
    }
}

/// Exponent of the energy signature: mean absolute value or mean square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyNorm {
    #[default]
    L1,
    L2,
}

impl EnergyNorm {
    pub fn exponent(self) -> u32 {
        match self {
            EnergyNorm::L1 => 1,
            EnergyNorm::L2 => 2,
        }
    }
}

impl TryFrom<u32> for EnergyNorm {
    type Error = TexError;

    fn try_from(k: u32) -> Result<Self> {
        match k {
            1 => Ok(EnergyNorm::L1),
            2 => Ok(EnergyNorm::L2),
            _ => Err(TexError::Domain(format!("energy exponent must be 1 or 2, got {k}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaborFilterSpec<T> {
    /// Radial center frequency, cycles/pixel.
    pub frequency: T,
    /// Orientation of the wave vector, radians in `[0, π)`.
    pub orientation: T,
    pub sigma_x: T,
    pub sigma_y: T,
    /// Frequency bandwidth, octaves.
    pub frequency_bandwidth: T,
    /// Orientation bandwidth, radians.
    pub orientation_bandwidth: T,
}

impl<T: Real> GaborFilterSpec<T> {
    pub fn new(
        frequency: T,
        orientation: T,
        sigma_x: T,
        sigma_y: T,
        frequency_bandwidth: T,
        orientation_bandwidth: T,
    ) -> Result<Self> {
        if !(frequency > T::zero() && frequency < T::lit(0.5)) {
            return Err(TexError::Domain(format!("center frequency {frequency} outside (0, 0.5) cycles/pixel")));
        }
        if !(sigma_x > T::zero() && sigma_y > T::zero()) {
            return Err(TexError::Domain("envelope sigmas must be positive".into()));
        }
        if !(orientation >= T::zero() && orientation < T::PI()) {
            return Err(TexError::Domain(format!("orientation {orientation} outside [0, π)")));
        }
        Ok(Self { frequency, orientation, sigma_x, sigma_y, frequency_bandwidth, orientation_bandwidth })
    }

    /// Builds a filter whose sigmas follow from its bandwidths.
    pub fn from_bandwidths(
        frequency: T,
        orientation: T,
        frequency_bandwidth: T,
        orientation_bandwidth: T,
        envelope: Envelope,
    ) -> Result<Self> {
        let (sx, sy) = compute_envelope_sigmas(frequency, frequency_bandwidth, orientation_bandwidth)?;
        let (sigma_x, sigma_y) = envelope.resolve(sx, sy);
        Self::new(frequency, orientation, sigma_x, sigma_y, frequency_bandwidth, orientation_bandwidth)
    }

    /// Rotates a point (or frequency) into the filter frame.
    #[inline]
    fn rotate(&self, a: T, b: T) -> (T, T) {
        let (s, c) = self.orientation.sin_cos();
        (a * c + b * s, -a * s + b * c)
    }
}

/// Envelope sigmas (pixels) that put the -6 dB contour at the requested
/// frequency bandwidth (octaves) and orientation bandwidth (radians).
pub fn compute_envelope_sigmas<T: Real>(
    frequency: T,
    frequency_bandwidth: T,
    orientation_bandwidth: T,
) -> Result<(T, T)> {
    if !(frequency > T::zero()) {
        return Err(TexError::Domain(format!("center frequency must be positive, got {frequency}")));
    }
    if !(frequency_bandwidth > T::zero()) {
        return Err(TexError::Domain(format!("frequency bandwidth must be positive, got {frequency_bandwidth}")));
    }
    if !(orientation_bandwidth > T::zero() && orientation_bandwidth < T::PI()) {
        return Err(TexError::Domain(format!("orientation bandwidth {orientation_bandwidth} outside (0, π)")));
    }
    let two = T::lit(2.0);
    let root_ln2 = T::LN_2().sqrt();
    let denom = two.sqrt() * T::PI() * frequency;
    let octave = two.powf(frequency_bandwidth);
    let sigma_x = root_ln2 * (octave + T::one()) / (denom * (octave - T::one()));
    let sigma_y = root_ln2 / (denom * (orientation_bandwidth / two).tan());
    Ok((sigma_x, sigma_y))
}

/// Real, even-symmetric impulse response at pixel offset `(x, y)`.
pub fn spatial_impulse_response<T: Real>(spec: &GaborFilterSpec<T>, x: T, y: T) -> T {
    let (xr, yr) = spec.rotate(x, y);
    let (sx, sy) = (spec.sigma_x, spec.sigma_y);
    let half = T::lit(0.5);
    let norm = T::one() / (T::TAU() * sx * sy);
    norm * (-half * (xr * xr / (sx * sx) + yr * yr / (sy * sy))).exp() * (T::TAU() * spec.frequency * xr).cos()
}

/// Two-lobe Gaussian transfer function at frequency `(u, v)` cycles/pixel.
///
/// Peak gain is one, twice the continuous transform of
/// [`spatial_impulse_response`], whose cosine splits its energy between the
/// two lobes.
pub fn frequency_response<T: Real>(spec: &GaborFilterSpec<T>, u: T, v: T) -> T {
    let (ur, vr) = spec.rotate(u, v);
    let k = -T::lit(2.0) * T::PI() * T::PI();
    let (sx2, sy2) = (spec.sigma_x * spec.sigma_x, spec.sigma_y * spec.sigma_y);
    let f0 = spec.frequency;
    let lobe = |d: T| (k * (d * d * sx2 + vr * vr * sy2)).exp();
    lobe(ur - f0) + lobe(ur + f0)
}

/// Transfer function sampled on an `n × n` DFT grid, row-major by `(v, u)`.
///
/// The Nyquist index stands for both +½ and −½ cycles/pixel, so its value is
/// the average over those aliases. That keeps the sampled response
/// Hermitian-symmetric and the filtered image exactly real.
pub fn transfer_grid<T: Real>(spec: &GaborFilterSpec<T>, n: usize) -> Vec<T> {
    let half = T::lit(0.5);
    let aliases = |k: usize| -> ([T; 2], usize) {
        if n.is_multiple_of(2) && 2 * k == n {
            ([-half, half], 2)
        } else {
            let f = signed_frequency::<T>(k, n);
            ([f, f], 1)
        }
    };
    let mut grid = Vec::with_capacity(n * n);
    for kv in 0..n {
        let (vs, nv) = aliases(kv);
        for ku in 0..n {
            let (us, nu) = aliases(ku);
            let mut acc = T::zero();
            for &v in &vs[..nv] {
                for &u in &us[..nu] {
                    acc = acc + frequency_response(spec, u, v);
                }
            }
            grid.push(acc / T::from_count(nu * nv));
        }
    }
    grid
}

/// Impulse response sampled on a periodic `n × n` grid with the origin at
/// index `(0, 0)` and signed offsets beyond `n / 2`.
pub fn sample_impulse_response<T: Real>(spec: &GaborFilterSpec<T>, n: usize) -> Vec<T> {
    let offset = |k: usize| {
        if 2 * k < n {
            T::from_count(k)
        } else {
            T::from_count(k) - T::from_count(n)
        }
    };
    let mut out = Vec::with_capacity(n * n);
    for y in 0..n {
        for x in 0..n {
            out.push(spatial_impulse_response(spec, offset(x), offset(y)));
        }
    }
    out
}

/// Parameters for [`plan_bank`]; defaults are one-octave, 45° filters at
/// four orientations with a circular envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BankParams {
    pub orientation_count: usize,
    /// Octaves.
    pub frequency_bandwidth: f64,
    /// Degrees.
    pub orientation_bandwidth_deg: f64,
    pub envelope: Envelope,
}

impl Default for BankParams {
    fn default() -> Self {
        Self {
            orientation_count: 4,
            frequency_bandwidth: 1.0,
            orientation_bandwidth_deg: 45.0,
            envelope: Envelope::CircularFrequency,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BankConfig<T> {
    pub image_width: usize,
    pub orientation_count: usize,
    /// Radians, ascending from 0 in steps of π/A.
    pub orientations: Vec<T>,
    /// Cycles/image-width, one octave apart.
    pub radial_frequencies: Vec<T>,
    /// Frequency-major: `filters[f * orientation_count + o]`.
    pub filters: Vec<GaborFilterSpec<T>>,
    pub circular: bool,
    pub envelope: Envelope,
    /// Dyadic candidates before low-frequency and passband exclusions.
    pub candidate_count: usize,
}

impl<T: Real> BankConfig<T> {
    pub fn len(&self) -> usize {
        self.filters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.filters.is_empty()
    }

    /// `(frequency index, orientation index)` of filter `i`.
    pub fn grid_position(&self, i: usize) -> (usize, usize) {
        (i / self.orientation_count, i % self.orientation_count)
    }

    pub fn filter_index(&self, frequency_index: usize, orientation_index: usize) -> usize {
        frequency_index * self.orientation_count + orientation_index
    }

    pub fn orientation_degrees(&self, orientation_index: usize) -> f64 {
        orientation_index as f64 * 180.0 / self.orientation_count as f64
    }

    pub fn feature_names(&self) -> Vec<String> {
        (0..self.filters.len())
            .map(|i| {
                let (f, o) = self.grid_position(i);
                format!("gabor_f{f}_o{}", self.orientation_degrees(o))
            })
            .collect()
    }
}

/// Lays out the dyadic bank for images `image_width` pixels wide.
///
/// Candidates sit at `2^k·√2` cycles/image-width for
/// `k = 0 … log2(N/2) − 1`. The two lowest are dropped as too coarse for
/// texture and anything above `(N/4)·√2` is dropped so the passband stays
/// inside the image.
pub fn plan_bank<T: Real>(image_width: usize, params: &BankParams) -> Result<BankConfig<T>> {
    if !image_width.is_power_of_two() || image_width < 16 {
        return Err(TexError::Config(format!("image width {image_width} must be a power of two >= 16")));
    }
    let a = params.orientation_count;
    if a == 0 {
        return Err(TexError::Config("orientation count must be at least 1".into()));
    }
    let levels = (image_width / 2).trailing_zeros() as usize;
    let ceiling = image_width / 4;
    let retained: Vec<usize> = (0..levels).filter(|&k| k >= 2 && (1usize << k) <= ceiling).collect();
    if retained.is_empty() {
        return Err(TexError::Config(format!("no radial frequency retained for width {image_width}")));
    }

    let sqrt2 = T::SQRT_2();
    let width = T::from_count(image_width);
    let radial_frequencies: Vec<T> = retained.iter().map(|&k| T::from_count(1 << k) * sqrt2).collect();
    let orientations: Vec<T> = (0..a).map(|o| T::PI() * T::from_count(o) / T::from_count(a)).collect();
    let bandwidth = T::lit(params.frequency_bandwidth);
    let angular = T::lit(params.orientation_bandwidth_deg.to_radians());

    let mut filters = Vec::with_capacity(radial_frequencies.len() * a);
    for &f in &radial_frequencies {
        for &theta in &orientations {
            filters.push(GaborFilterSpec::from_bandwidths(f / width, theta, bandwidth, angular, params.envelope)?);
        }
    }
    Ok(BankConfig {
        image_width,
        orientation_count: a,
        orientations,
        radial_frequencies,
        filters,
        circular: params.envelope.is_circular(),
        envelope: params.envelope,
        candidate_count: a * levels,
    })
}

/// Rectified output of one filter, `|I_f(x, y)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnitudeResponse<T> {
    pub width: usize,
    pub height: usize,
    pub values: Vec<T>,
    pub source_filter: Option<usize>,
}

/// Filters a square power-of-two image with a single filter.
pub fn apply_filter<T: Real>(img: &ZeroMeanImage<T>, spec: &GaborFilterSpec<T>) -> Result<MagnitudeResponse<T>> {
    let n = check_square_pow2(img)?;
    let fft = Fft2::new(n, n);
    let spectrum = fft.forward_real(img.values());
    Ok(filter_spectrum(&fft, &spectrum, &transfer_grid(spec, n), None))
}

fn check_square_pow2<T: Real>(img: &ZeroMeanImage<T>) -> Result<usize> {
    let (w, h) = (img.width(), img.height());
    if w != h || !w.is_power_of_two() {
        return Err(TexError::Size(format!("filtering needs a square power-of-two image, got {w}x{h}")));
    }
    Ok(w)
}

fn filter_spectrum<T: Real>(
    fft: &Fft2<T>,
    spectrum: &[Complex<T>],
    grid: &[T],
    source_filter: Option<usize>,
) -> MagnitudeResponse<T> {
    let mut buf: Vec<Complex<T>> = spectrum.iter().zip(grid).map(|(&c, &h)| c * h).collect();
    fft.inverse(&mut buf);
    MagnitudeResponse {
        width: fft.width(),
        height: fft.height(),
        values: buf.iter().map(|c| c.re.abs()).collect(),
        source_filter,
    }
}

/// Mean of `|I_f|^k` over the response grid, `k` in {1, 2}.
pub fn energy_signature<T: Real>(resp: &MagnitudeResponse<T>, k: u32) -> Result<T> {
    let norm = EnergyNorm::try_from(k)?;
    Ok(energy(&resp.values, norm))
}

fn energy<T: Real>(values: &[T], norm: EnergyNorm) -> T {
    let total: T = match norm {
        EnergyNorm::L1 => values.iter().map(|v| v.abs()).sum(),
        EnergyNorm::L2 => values.iter().map(|&v| v * v).sum(),
    };
    total / T::from_count(values.len())
}

/// A bank with its transform plans and sampled transfer functions, ready to
/// filter any number of images. Immutable, so it can be shared across threads.
#[derive(Debug, Clone)]
pub struct GaborFilterer<T: Real> {
    bank: BankConfig<T>,
    fft: Fft2<T>,
    grids: Vec<Vec<T>>,
}

impl<T: Real> GaborFilterer<T> {
    pub fn new(bank: BankConfig<T>) -> Self {
        let n = bank.image_width;
        let grids = bank.filters.iter().map(|f| transfer_grid(f, n)).collect();
        Self { fft: Fft2::new(n, n), bank, grids }
    }

    pub fn bank(&self) -> &BankConfig<T> {
        &self.bank
    }

    pub fn transfer(&self, index: usize) -> &[T] {
        &self.grids[index]
    }

    fn spectrum(&self, img: &ZeroMeanImage<T>) -> Result<Vec<Complex<T>>> {
        let n = check_square_pow2(img)?;
        if n != self.bank.image_width {
            return Err(TexError::Size(format!(
                "image side {n} does not match bank width {}",
                self.bank.image_width
            )));
        }
        Ok(self.fft.forward_real(img.values()))
    }

    pub fn response(&self, img: &ZeroMeanImage<T>, index: usize) -> Result<MagnitudeResponse<T>> {
        let spectrum = self.spectrum(img)?;
        Ok(filter_spectrum(&self.fft, &spectrum, &self.grids[index], Some(index)))
    }

    /// Magnitude responses of every filter, in bank order.
    pub fn responses(&self, img: &ZeroMeanImage<T>) -> Result<Vec<MagnitudeResponse<T>>> {
        let spectrum = self.spectrum(img)?;
        Ok(self
            .grids
            .iter()
            .enumerate()
            .map(|(i, g)| filter_spectrum(&self.fft, &spectrum, g, Some(i)))
            .collect())
    }

    /// Energy of every filter output, in bank order.
    pub fn energies(&self, img: &ZeroMeanImage<T>, norm: EnergyNorm) -> Result<Vec<T>> {
        let spectrum = self.spectrum(img)?;
        Ok(self
            .grids
            .iter()
            .map(|g| energy(&filter_spectrum(&self.fft, &spectrum, g, None).values, norm))
            .collect())
    }

    pub fn features(&self, img: &ZeroMeanImage<T>, norm: EnergyNorm) -> Result<FeatureVector<T>> {
        FeatureVector::new(self.bank.feature_names(), self.energies(img, norm)?)
    }
}

/// One energy per bank filter, frequency-major, named `gabor_f{i}_o{deg}`.
pub fn gabor_features<T: Real>(img: &ZeroMeanImage<T>, bank: &BankConfig<T>, norm: EnergyNorm) -> Result<FeatureVector<T>> {
    GaborFilterer::new(bank.clone()).features(img, norm)
}
