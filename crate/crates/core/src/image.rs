//! Image loading and the single-channel preprocessing applied before any
//! feature extraction: channel selection, mean removal, power-of-two padding
//! and optional binary masks.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TexError};
use crate::scalar::Real;

/// Decoded 8-bit RGB raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(TexError::Size(format!("empty image {width}x{height}")));
        }
        if pixels.len() != width * height {
            return Err(TexError::Size(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        Ok(Self { width, height, pixels })
    }

    pub fn from_pixel(width: usize, height: usize, pixel: [u8; 3]) -> Result<Self> {
        Self::new(width, height, vec![pixel; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        self.pixels[y * self.width + x]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Red,
    Green,
    #[default]
    Blue,
}

impl Channel {
    fn index(self) -> usize {
        match self {
            Channel::Red => 0,
            Channel::Green => 1,
            Channel::Blue => 2,
        }
    }
}

impl FromStr for Channel {
    type Err = TexError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "red" | "r" => Ok(Channel::Red),
            "green" | "g" => Ok(Channel::Green),
            "blue" | "b" => Ok(Channel::Blue),
            other => Err(TexError::Config(format!("unknown channel `{other}`"))),
        }
    }
}

/// Real-valued single-channel image, row-major (`values[y * width + x]`).
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage<T> {
    width: usize,
    height: usize,
    values: Vec<T>,
}

impl<T: Real> GrayImage<T> {
    pub fn new(width: usize, height: usize, values: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(TexError::Size(format!("empty image {width}x{height}")));
        }
        if values.len() != width * height {
            return Err(TexError::Size(format!(
                "{} values for a {width}x{height} image",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(TexError::Domain("non-finite intensity".into()));
        }
        Ok(Self { width, height, values })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        Self::new(width, height, values)
    }

    pub fn constant(width: usize, height: usize, value: T) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_square(&self) -> bool {
        self.width == self.height
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.values[y * self.width + x]
    }

    pub fn mean(&self) -> T {
        self.values.iter().copied().sum::<T>() / T::from_count(self.values.len())
    }

    pub fn min_max(&self) -> (T, T) {
        self.values
            .iter()
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Converts every intensity to another scalar type.
    pub fn cast<U: Real>(&self) -> GrayImage<U> {
        GrayImage {
            width: self.width,
            height: self.height,
            values: self.values.iter().map(|v| U::lit(v.to_f64_lossy())).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Self::new(self.width, self.height, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Rotates by a quarter turn: the pixel at `(x, y)` moves to `(y, width - 1 - x)`.
    pub fn rotate_quarter(&self) -> Self {
        let (w, h) = (self.width, self.height);
        let mut values = vec![T::zero(); w * h];
        // output is h wide and w tall
        for y in 0..h {
            for x in 0..w {
                values[(w - 1 - x) * h + y] = self.values[y * w + x];
            }
        }
        Self { width: h, height: w, values }
    }
}

/// A [`GrayImage`] whose arithmetic mean has been removed.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroMeanImage<T> {
    image: GrayImage<T>,
    removed_mean: T,
}

impl<T: Real> ZeroMeanImage<T> {
    pub fn image(&self) -> &GrayImage<T> {
        &self.image
    }

    pub fn into_image(self) -> GrayImage<T> {
        self.image
    }

    pub fn removed_mean(&self) -> T {
        self.removed_mean
    }

    pub fn width(&self) -> usize {
        self.image.width
    }

    pub fn height(&self) -> usize {
        self.image.height
    }

    pub fn values(&self) -> &[T] {
        &self.image.values
    }

    pub fn rotate_quarter(&self) -> Self {
        Self { image: self.image.rotate_quarter(), removed_mean: self.removed_mean }
    }
}

/// Binary keep-mask; `true` marks pixels that take part in extraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    keep: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, keep: Vec<bool>) -> Result<Self> {
        if keep.len() != width * height || keep.is_empty() {
            return Err(TexError::Size(format!("mask of {} cells for {width}x{height}", keep.len())));
        }
        Ok(Self { width, height, keep })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn keep(&self) -> &[bool] {
        &self.keep
    }

    pub fn kept_count(&self) -> usize {
        self.keep.iter().filter(|&&k| k).count()
    }
}

fn decode_error(path: &Path, err: ::image::ImageError) -> TexError {
    match err {
        ::image::ImageError::IoError(source) => TexError::Io { path: path.to_path_buf(), source },
        other => TexError::Format { path: path.to_path_buf(), message: other.to_string() },
    }
}

/// Decodes a PNG, TIFF or BMP file into 8-bit RGB.
pub fn load_image(path: impl AsRef<Path>) -> Result<RgbImage> {
    let path = path.as_ref();
    let decoded = ::image::ImageReader::open(path)
        .map_err(|source| TexError::Io { path: path.to_path_buf(), source })?
        .with_guessed_format()
        .map_err(|source| TexError::Io { path: path.to_path_buf(), source })?
        .decode()
        .map_err(|e| decode_error(path, e))?
        .into_rgb8();
    let (w, h) = decoded.dimensions();
    let pixels = decoded.pixels().map(|p| p.0).collect();
    RgbImage::new(w as usize, h as usize, pixels)
}

/// Loads an 8-bit mask image; any nonzero luma keeps the pixel.
pub fn load_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    let path = path.as_ref();
    let decoded = ::image::ImageReader::open(path)
        .map_err(|source| TexError::Io { path: path.to_path_buf(), source })?
        .with_guessed_format()
        .map_err(|source| TexError::Io { path: path.to_path_buf(), source })?
        .decode()
        .map_err(|e| decode_error(path, e))?
        .into_luma8();
    let (w, h) = decoded.dimensions();
    BinaryMask::new(w as usize, h as usize, decoded.pixels().map(|p| p.0[0] != 0).collect())
}

pub fn extract_channel<T: Real>(img: &RgbImage, channel: Channel) -> GrayImage<T> {
    let c = channel.index();
    GrayImage {
        width: img.width,
        height: img.height,
        values: img.pixels.iter().map(|p| T::from_u8(p[c]).unwrap()).collect(),
    }
}

pub fn subtract_mean<T: Real>(img: &GrayImage<T>) -> ZeroMeanImage<T> {
    let mean = img.mean();
    let mut values: Vec<T> = img.values.iter().map(|&v| v - mean).collect();
    // second pass removes the rounding residue of the first
    let residue = values.iter().copied().sum::<T>() / T::from_count(values.len());
    values.iter_mut().for_each(|v| *v = *v - residue);
    ZeroMeanImage {
        image: GrayImage { width: img.width, height: img.height, values },
        removed_mean: mean + residue,
    }
}

/// Embeds the image top-left in a zero-filled square whose side is the next
/// power of two, then re-centers so the padded image is again zero-mean.
pub fn pad_to_pow2<T: Real>(img: &ZeroMeanImage<T>) -> ZeroMeanImage<T> {
    let (w, h) = (img.width(), img.height());
    let side = w.max(h).next_power_of_two();
    if w == side && h == side {
        return img.clone();
    }
    let mut values = vec![T::zero(); side * side];
    for y in 0..h {
        values[y * side..y * side + w].copy_from_slice(&img.image.values[y * w..(y + 1) * w]);
    }
    let padded = GrayImage { width: side, height: side, values };
    let recentered = subtract_mean(&padded);
    ZeroMeanImage {
        removed_mean: img.removed_mean + recentered.removed_mean,
        image: recentered.image,
    }
}

/// Zeroes pixels outside the mask and removes the mean of the kept pixels.
///
/// Kept pixels sum to zero afterwards, so the whole image is zero-mean too.
pub fn apply_mask<T: Real>(img: &GrayImage<T>, mask: &BinaryMask) -> Result<ZeroMeanImage<T>> {
    if mask.width != img.width || mask.height != img.height {
        return Err(TexError::Size(format!(
            "mask {}x{} does not match image {}x{}",
            mask.width, mask.height, img.width, img.height
        )));
    }
    let kept = mask.kept_count();
    if kept == 0 {
        return Err(TexError::Degenerate("mask keeps no pixels".into()));
    }
    let kept_mean = img
        .values
        .iter()
        .zip(&mask.keep)
        .filter(|(_, &k)| k)
        .map(|(&v, _)| v)
        .sum::<T>()
        / T::from_count(kept);
    let values = img
        .values
        .iter()
        .zip(&mask.keep)
        .map(|(&v, &k)| if k { v - kept_mean } else { T::zero() })
        .collect();
    Ok(ZeroMeanImage {
        image: GrayImage { width: img.width, height: img.height, values },
        removed_mean: kept_mean,
    })
}

/// Masked raw intensities: pixels outside the mask set to zero, others untouched.
pub fn mask_raw<T: Real>(img: &GrayImage<T>, mask: &BinaryMask) -> Result<GrayImage<T>> {
    if mask.width != img.width || mask.height != img.height {
        return Err(TexError::Size("mask does not match image".into()));
    }
    let values = img.values.iter().zip(&mask.keep).map(|(&v, &k)| if k { v } else { T::zero() }).collect();
    GrayImage::new(img.width, img.height, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gray(w: usize, h: usize, values: Vec<f64>) -> GrayImage<f64> {
        GrayImage::new(w, h, values).unwrap()
    }

    #[test]
    fn channel_extraction_picks_component() {
        let img = RgbImage::from_pixel(3, 2, [10, 20, 30]).unwrap();
        let blue: GrayImage<f64> = extract_channel(&img, Channel::Blue);
        let red: GrayImage<f64> = extract_channel(&img, Channel::Red);
        assert!(blue.values().iter().all(|&v| v == 30.0));
        assert!(red.values().iter().all(|&v| v == 10.0));
        assert_eq!((blue.width(), blue.height()), (3, 2));

        let mixed = RgbImage::new(2, 1, vec![[1, 2, 3], [4, 5, 6]]).unwrap();
        let b: GrayImage<f32> = extract_channel(&mixed, Channel::Blue);
        assert_eq!(b.values(), &[3.0, 6.0]);
    }

    #[test]
    fn subtract_mean_cases() {
        let z = subtract_mean(&GrayImage::constant(4, 4, 7.0).unwrap());
        assert_eq!(z.removed_mean(), 7.0);
        assert!(z.values().iter().all(|&v| v == 0.0));

        let z = subtract_mean(&gray(2, 2, vec![0.0, 10.0, 10.0, 0.0]));
        assert_eq!(z.values(), &[-5.0, 5.0, 5.0, -5.0]);
        assert_eq!(z.removed_mean(), 5.0);
    }

    #[test]
    fn subtract_mean_idempotent() {
        let img = gray(3, 3, (0..9).map(|i| (i * i) as f64 * 0.37).collect());
        let once = subtract_mean(&img);
        let twice = subtract_mean(once.image());
        for (a, b) in once.values().iter().zip(twice.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(twice.removed_mean().abs() < 1e-12);
    }

    #[test]
    fn padding_sizes_and_mean() {
        let z = subtract_mean(&GrayImage::constant(512, 512, 3.0).unwrap());
        let p = pad_to_pow2(&z);
        assert_eq!(p, z);

        let img = GrayImage::from_fn(500, 480, |x, y| ((x * 7 + y * 3) % 256) as f64).unwrap();
        let p = pad_to_pow2(&subtract_mean(&img));
        assert_eq!((p.width(), p.height()), (512, 512));
        assert!(p.image().mean().abs() < 1e-9);

        let p = pad_to_pow2(&subtract_mean(&gray(3, 3, (0..9).map(f64::from).collect())));
        assert_eq!((p.width(), p.height()), (4, 4));
        assert!(p.image().mean().abs() < 1e-12);
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = load_image("/nonexistent/definitely/not/here.png").unwrap_err();
        assert!(matches!(err, TexError::Io { .. }), "{err:?}");
    }

    #[test]
    fn garbage_is_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.png");
        std::fs::write(&path, b"definitely not an image").unwrap();
        let err = load_image(&path).unwrap_err();
        assert!(matches!(err, TexError::Format { .. }), "{err:?}");
    }

    #[test]
    fn png_round_trip_blue() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("blue.png");
        ::image::RgbImage::from_pixel(2, 2, ::image::Rgb([0, 0, 255])).save(&path).unwrap();
        let img = load_image(&path).unwrap();
        assert_eq!((img.width(), img.height()), (2, 2));
        assert!(img.pixels().iter().all(|&p| p == [0, 0, 255]));
    }

    #[test]
    fn tiff_and_bmp_dimensions() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["big.tiff", "small.bmp"] {
            let path = dir.path().join(name);
            ::image::RgbImage::from_fn(512, 512, |x, y| ::image::Rgb([x as u8, y as u8, 7]))
                .save(&path)
                .unwrap();
            let img = load_image(&path).unwrap();
            assert_eq!((img.width(), img.height()), (512, 512));
            assert_eq!(img.pixel(3, 5), [3, 5, 7]);
        }
    }

    #[test]
    fn mask_zeroes_outside_and_centers_inside() {
        let img = gray(2, 2, vec![1.0, 3.0, 100.0, 200.0]);
        let mask = BinaryMask::new(2, 2, vec![true, true, false, false]).unwrap();
        let z = apply_mask(&img, &mask).unwrap();
        assert_eq!(z.values(), &[-1.0, 1.0, 0.0, 0.0]);
        assert_eq!(z.removed_mean(), 2.0);
        let none = BinaryMask::new(2, 2, vec![false; 4]).unwrap();
        assert!(matches!(apply_mask(&img, &none), Err(TexError::Degenerate(_))));
    }

    #[test]
    fn quarter_rotation_four_times_is_identity() {
        let img = GrayImage::from_fn(5, 3, |x, y| (x * 10 + y) as f64).unwrap();
        let r = img.rotate_quarter();
        assert_eq!((r.width(), r.height()), (3, 5));
        assert_eq!(r.rotate_quarter().rotate_quarter().rotate_quarter(), img);
    }

    #[test]
    fn non_finite_rejected() {
        assert!(GrayImage::new(1, 1, vec![f64::NAN]).is_err());
        assert!(GrayImage::<f64>::new(0, 3, vec![]).is_err());
    }
}
