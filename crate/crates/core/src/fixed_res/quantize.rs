use crate::error::{Result, TexError};
use crate::image::GrayImage;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedImage {
    width: usize,
    height: usize,
    levels: usize,
    values: Vec<u16>,
}

impl QuantizedImage {
    pub fn new(width: usize, height: usize, levels: usize, values: Vec<u16>) -> Result<Self> {
        if levels < 2 || levels > u16::MAX as usize + 1 {
            return Err(TexError::Domain(format!("level count {levels} out of range")));
        }
        if width == 0 || height == 0 || values.len() != width * height {
            return Err(TexError::Size(format!("{} levels for a {width}x{height} image", values.len())));
        }
        if values.iter().any(|&v| v as usize >= levels) {
            return Err(TexError::Domain(format!("value outside [0, {levels})")));
        }
        Ok(Self { width, height, levels, values })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn values(&self) -> &[u16] {
        &self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.values[y * self.width + x]
    }
}

/// Linear min-max binning into `levels` gray levels; constant images map to level 0.
pub fn quantize<T: Real>(img: &GrayImage<T>, levels: usize) -> Result<QuantizedImage> {
    if levels < 2 {
        return Err(TexError::Domain(format!("need at least 2 gray levels, got {levels}")));
    }
    let (lo, hi) = img.min_max();
    let range = hi - lo;
    let g = T::from_count(levels);
    let top = (levels - 1) as u16;
    let values = img
        .values()
        .iter()
        .map(|&v| {
            if range <= T::zero() {
                0
            } else {
                let bin = ((v - lo) / range * g).floor().to_usize().unwrap_or(0);
                (bin as u16).min(top)
            }
        })
        .collect();
    QuantizedImage::new(img.width(), img.height(), levels, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_maps_to_zero() {
        let q = quantize(&GrayImage::constant(4, 4, 9.0).unwrap(), 8).unwrap();
        assert!(q.values().iter().all(|&v| v == 0));
    }

    #[test]
    fn two_bins_split_at_midpoint() {
        let img = GrayImage::from_fn(256, 1, |x, _| x as f64).unwrap();
        let q = quantize(&img, 2).unwrap();
        assert!(q.values()[..128].iter().all(|&v| v == 0));
        assert!(q.values()[128..].iter().all(|&v| v == 1));
    }

    #[test]
    fn four_bins_hand_binned() {
        let img = GrayImage::new(4, 1, vec![0.0, 85.0, 170.0, 255.0]).unwrap();
        assert_eq!(quantize(&img, 4).unwrap().values(), &[0, 1, 2, 3]);
    }

    #[test]
    fn rejects_single_level() {
        let img = GrayImage::constant(2, 2, 1.0).unwrap();
        assert!(matches!(quantize(&img, 1), Err(TexError::Domain(_))));
    }
}
