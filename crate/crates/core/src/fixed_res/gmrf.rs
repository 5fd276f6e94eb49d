use crate::error::{Result, TexError};
use crate::features::FeatureVector;
use crate::image::GrayImage;
use crate::scalar::Real;

pub const GMRF_FEATURES: [&str; 5] = ["gmrf_h", "gmrf_v", "gmrf_d1", "gmrf_d2", "gmrf_var"];

/// Neighbour offsets of the second-order neighbourhood; each pairs with its mirror.
const PAIRS: [(isize, isize); 4] = [(1, 0), (0, 1), (1, 1), (1, -1)];

/// Least-squares fit of a second-order Gaussian Markov random field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmrfFit<T> {
    /// Horizontal, vertical, main-diagonal and anti-diagonal interactions.
    pub interactions: [T; 4],
    pub residual_variance: T,
    /// Asymptotic standard errors of `interactions`.
    ///
    /// Every neighbour product enters the normal equations twice (once from
    /// each end of the pair), which doubles the variance relative to the
    /// ordinary regression formula; the factor is included here.
    pub standard_errors: [T; 4],
    pub sample_count: usize,
}

pub fn gmrf_fit<T: Real>(img: &GrayImage<T>) -> Result<GmrfFit<T>> {
    let (w, h) = (img.width(), img.height());
    if w < 5 || h < 5 {
        return Err(TexError::Size(format!("GMRF fit needs at least 5x5, got {w}x{h}")));
    }
    let mean = img.mean();
    let at = |x: usize, y: usize| img.get(x, y) - mean;

    let mut normal = [[T::zero(); 4]; 4];
    let mut rhs = [T::zero(); 4];
    let mut yy = T::zero();
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let mut q = [T::zero(); 4];
            for (slot, &(dx, dy)) in q.iter_mut().zip(&PAIRS) {
                let fwd = at((x as isize + dx) as usize, (y as isize + dy) as usize);
                let back = at((x as isize - dx) as usize, (y as isize - dy) as usize);
                *slot = fwd + back;
            }
            let t = at(x, y);
            for i in 0..4 {
                rhs[i] = rhs[i] + q[i] * t;
                for j in 0..4 {
                    normal[i][j] = normal[i][j] + q[i] * q[j];
                }
            }
            yy = yy + t * t;
        }
    }
    let n = (w - 2) * (h - 2);
    let inverse = invert_spd(normal)?;
    let mut beta = [T::zero(); 4];
    for i in 0..4 {
        beta[i] = (0..4).map(|j| inverse[i][j] * rhs[j]).sum();
    }
    // RSS = y'y - beta' Q'y at the least-squares solution
    let explained: T = (0..4).map(|i| beta[i] * rhs[i]).sum();
    let dof = n.saturating_sub(4).max(1);
    let residual_variance = ((yy - explained) / T::from_count(dof)).max(T::zero());
    let mut standard_errors = [T::zero(); 4];
    for i in 0..4 {
        standard_errors[i] = (T::lit(2.0) * residual_variance * inverse[i][i]).sqrt();
    }
    Ok(GmrfFit { interactions: beta, residual_variance, standard_errors, sample_count: n })
}

/// Four interaction parameters plus residual variance.
pub fn gmrf_features<T: Real>(img: &GrayImage<T>) -> Result<FeatureVector<T>> {
    let fit = gmrf_fit(img)?;
    let mut values = fit.interactions.to_vec();
    values.push(fit.residual_variance);
    FeatureVector::new(GMRF_FEATURES.iter().map(|s| s.to_string()).collect(), values)
}

/// Gauss-Jordan inverse with partial pivoting; rank deficiency is reported
/// relative to the matrix scale.
fn invert_spd<T: Real>(m: [[T; 4]; 4]) -> Result<[[T; 4]; 4]> {
    let scale = (0..4).map(|i| m[i][i].abs()).fold(T::zero(), T::max);
    if !(scale > T::zero()) {
        return Err(TexError::Singular("zero neighbour variance".into()));
    }
    let tol = scale * T::epsilon() * T::lit(1e3);
    let mut a = m;
    let mut inv = [[T::zero(); 4]; 4];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = T::one();
    }
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&r, &s| a[r][col].abs().partial_cmp(&a[s][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col].abs() <= tol {
            return Err(TexError::Singular("rank-deficient normal equations".into()));
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for j in 0..4 {
            a[col][j] = a[col][j] / p;
            inv[col][j] = inv[col][j] / p;
        }
        for r in 0..4 {
            if r != col {
                let f = a[r][col];
                for j in 0..4 {
                    a[r][j] = a[r][j] - f * a[col][j];
                    inv[r][j] = inv[r][j] - f * inv[col][j];
                }
            }
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_image_is_singular() {
        let img = GrayImage::constant(16, 16, 4.0).unwrap();
        assert!(matches!(gmrf_fit(&img), Err(TexError::Singular(_))));
    }

    #[test]
    fn too_small_is_size_error() {
        let img = GrayImage::from_fn(4, 8, |x, y| (x + y) as f64).unwrap();
        assert!(matches!(gmrf_fit(&img), Err(TexError::Size(_))));
    }

    #[test]
    fn feature_names_and_count() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let img = GrayImage::from_fn(9, 9, |_, _| rng.random::<f64>()).unwrap();
        let f = gmrf_features(&img).unwrap();
        assert_eq!(f.names(), GMRF_FEATURES.map(String::from).as_slice());
        assert!(f.values()[4] >= 0.0);
    }

    #[test]
    fn inverse_of_known_matrix() {
        let m = [[4.0, 1.0, 0.0, 0.0], [1.0, 3.0, 0.0, 0.0], [0.0, 0.0, 2.0, 0.5], [0.0, 0.0, 0.5, 1.0]];
        let inv = invert_spd(m).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let v: f64 = (0..4).map(|k| m[i][k] * inv[k][j]).sum();
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }
}
