use serde::{Deserialize, Serialize};

use crate::error::{Result, TexError};
use crate::image::GrayImage;
use crate::scalar::Real;

/// Fractal-dimension estimator for a gray-level intensity surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FdEstimator {
    /// Slope of the log increment variogram over dyadic lags `1 … side/4`.
    /// For a self-affine surface `E[(ΔI)²] ∝ d^{2H}` and `FD = 3 − H`.
    #[default]
    Variogram,
    /// Differential box counting over box sizes `2 … side/4`.
    /// Biased low on rough surfaces; kept for comparison.
    BoxCounting,
}

/// Fractal dimension with the default estimator, clamped to `[2, 3]`.
pub fn fractal_dimension<T: Real>(img: &GrayImage<T>) -> Result<T> {
    fractal_dimension_with(img, FdEstimator::default())
}

pub fn fractal_dimension_with<T: Real>(img: &GrayImage<T>, estimator: FdEstimator) -> Result<T> {
    if !img.is_square() {
        return Err(TexError::Size(format!(
            "fractal dimension needs a square image, got {}x{}",
            img.width(),
            img.height()
        )));
    }
    let side = img.width();
    if side < 8 {
        return Err(TexError::Size(format!("fractal dimension needs side >= 8, got {side}")));
    }
    let (lo, hi) = img.min_max();
    if hi - lo <= T::zero() {
        // flat surface
        return Ok(T::lit(2.0));
    }
    let fd = match estimator {
        FdEstimator::Variogram => variogram_dimension(img, lo, hi)?,
        FdEstimator::BoxCounting => box_counting_dimension(img, lo, hi)?,
    };
    Ok(fd.max(T::lit(2.0)).min(T::lit(3.0)))
}

fn dyadic_scales(first: usize, last: usize) -> Vec<usize> {
    std::iter::successors(Some(first), |&s| Some(s * 2)).take_while(|&s| s <= last).collect()
}

fn variogram_dimension<T: Real>(img: &GrayImage<T>, lo: T, hi: T) -> Result<T> {
    let side = img.width();
    let lags = dyadic_scales(1, side / 4);
    if lags.len() < 3 {
        return Err(TexError::Degenerate(format!("only {} lags for side {side}", lags.len())));
    }
    // normalise the range to one for conditioning
    let scale = T::one() / (hi - lo);
    let mut points = Vec::with_capacity(lags.len());
    for &d in &lags {
        let mut horizontal = T::zero();
        let mut vertical = T::zero();
        for y in 0..side {
            for x in 0..side - d {
                let diff = (img.get(x + d, y) - img.get(x, y)) * scale;
                horizontal = horizontal + diff * diff;
                let diff = (img.get(y, x + d) - img.get(y, x)) * scale;
                vertical = vertical + diff * diff;
            }
        }
        let pairs = T::from_count(side * (side - d));
        let v = horizontal / pairs + vertical / pairs;
        if v <= T::zero() {
            return Err(TexError::Degenerate(format!("zero increment variance at lag {d}")));
        }
        points.push((T::from_count(d).ln(), v.ln()));
    }
    Ok(T::lit(3.0) - least_squares_slope(&points) / T::lit(2.0))
}

fn box_counting_dimension<T: Real>(img: &GrayImage<T>, lo: T, hi: T) -> Result<T> {
    let side = img.width();
    let sizes = dyadic_scales(2, side / 4);
    if sizes.len() < 3 {
        return Err(TexError::Degenerate(format!("only {} box sizes for side {side}", sizes.len())));
    }
    let range = hi - lo;
    let mut points = Vec::with_capacity(sizes.len());
    for &s in &sizes {
        let h = T::from_count(s) * range / T::from_count(side);
        let blocks = side / s;
        let mut total = T::zero();
        for by in 0..blocks {
            for bx in 0..blocks {
                let (mut bmin, mut bmax) = (T::infinity(), T::neg_infinity());
                for y in by * s..(by + 1) * s {
                    for x in bx * s..(bx + 1) * s {
                        let v = img.get(x, y) - lo;
                        bmin = bmin.min(v);
                        bmax = bmax.max(v);
                    }
                }
                total = total + (bmax / h).ceil() - (bmin / h).ceil() + T::one();
            }
        }
        points.push(((T::one() / T::from_count(s)).ln(), total.ln()));
    }
    Ok(least_squares_slope(&points))
}

fn least_squares_slope<T: Real>(points: &[(T, T)]) -> T {
    let n = T::from_count(points.len());
    let mx = points.iter().map(|p| p.0).sum::<T>() / n;
    let my = points.iter().map(|p| p.1).sum::<T>() / n;
    let sxy: T = points.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: T = points.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
