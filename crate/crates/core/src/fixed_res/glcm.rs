use super::{Direction, QuantizedImage};
use crate::error::{Result, TexError};
use crate::features::FeatureVector;
use crate::scalar::Real;

pub const GLCM_FEATURES: [&str; 6] = [
    "glcm_contrast",
    "glcm_correlation",
    "glcm_asm",
    "glcm_homogeneity",
    "glcm_entropy",
    "glcm_dissimilarity",
];

/// Symmetric, normalized gray-level co-occurrence matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Glcm<T> {
    levels: usize,
    pair_count: u64,
    probabilities: Vec<T>,
}

impl<T: Real> Glcm<T> {
    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Ordered pairs counted, both orders of every unordered pair included.
    pub fn pair_count(&self) -> u64 {
        self.pair_count
    }

    #[inline]
    pub fn p(&self, i: usize, j: usize) -> T {
        self.probabilities[i * self.levels + j]
    }

    pub fn probabilities(&self) -> &[T] {
        &self.probabilities
    }
}

/// Accumulates every pixel pair at `distance` along each direction, in both orders.
pub fn glcm<T: Real>(img: &QuantizedImage, distance: usize, directions: &[Direction]) -> Result<Glcm<T>> {
    if distance == 0 {
        return Err(TexError::Domain("co-occurrence distance must be >= 1".into()));
    }
    let g = img.levels();
    let (w, h) = (img.width() as isize, img.height() as isize);
    let d = distance as isize;
    let mut counts = vec![0u64; g * g];
    for &dir in directions {
        let (dx, dy) = dir.step();
        let (dx, dy) = (dx * d, dy * d);
        for y in 0..h {
            let ny = y + dy;
            if ny < 0 || ny >= h {
                continue;
            }
            for x in 0..w {
                let nx = x + dx;
                if nx < 0 || nx >= w {
                    continue;
                }
                let a = img.get(x as usize, y as usize) as usize;
                let b = img.get(nx as usize, ny as usize) as usize;
                counts[a * g + b] += 1;
                counts[b * g + a] += 1;
            }
        }
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(TexError::Size(format!(
            "no pixel pairs at distance {distance} in a {}x{} image",
            img.width(),
            img.height()
        )));
    }
    let denom = T::from_u64(total).unwrap();
    Ok(Glcm {
        levels: g,
        pair_count: total,
        probabilities: counts.iter().map(|&c| T::from_u64(c).unwrap() / denom).collect(),
    })
}

/// Contrast, correlation, angular second moment, homogeneity, entropy
/// (natural log) and dissimilarity of the pooled co-occurrence matrix.
///
/// Correlation is reported as 1 when the marginal variance is zero.
pub fn glcm_features<T: Real>(img: &QuantizedImage, distance: usize, directions: &[Direction]) -> Result<FeatureVector<T>> {
    let m = glcm::<T>(img, distance, directions)?;
    let g = m.levels;
    let mut mean = T::zero();
    for i in 0..g {
        for j in 0..g {
            mean = mean + T::from_count(i) * m.p(i, j);
        }
    }
    let (mut contrast, mut asm, mut homogeneity, mut entropy, mut dissimilarity, mut variance, mut covariance) =
        (T::zero(), T::zero(), T::zero(), T::zero(), T::zero(), T::zero(), T::zero());
    for i in 0..g {
        for j in 0..g {
            let p = m.p(i, j);
            if p == T::zero() {
                continue;
            }
            let (fi, fj) = (T::from_count(i), T::from_count(j));
            let diff = fi - fj;
            contrast = contrast + diff * diff * p;
            dissimilarity = dissimilarity + diff.abs() * p;
            homogeneity = homogeneity + p / (T::one() + diff * diff);
            asm = asm + p * p;
            entropy = entropy - p * p.ln();
            variance = variance + (fi - mean) * (fi - mean) * p;
            covariance = covariance + (fi - mean) * (fj - mean) * p;
        }
    }
    let correlation = if variance > T::zero() { covariance / variance } else { T::one() };
    FeatureVector::new(
        GLCM_FEATURES.iter().map(|s| s.to_string()).collect(),
        vec![contrast, correlation, asm, homogeneity, entropy, dissimilarity],
    )
}
