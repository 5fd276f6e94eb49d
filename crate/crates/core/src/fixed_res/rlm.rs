use super::{Direction, QuantizedImage};
use crate::error::Result;
use crate::features::FeatureVector;
use crate::scalar::Real;

pub const RLM_FEATURES: [&str; 5] = ["rlm_sre", "rlm_lre", "rlm_gln", "rlm_rln", "rlm_rp"];

/// Counts of maximal constant-level runs, indexed by level and run length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunLengthMatrix {
    levels: usize,
    max_run: usize,
    counts: Vec<u64>,
}

impl RunLengthMatrix {
    fn zeros(levels: usize, max_run: usize) -> Self {
        Self { levels, max_run, counts: vec![0; levels * max_run] }
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn max_run(&self) -> usize {
        self.max_run
    }

    /// Runs of `level` with exactly `length` pixels (`length >= 1`).
    pub fn count(&self, level: usize, length: usize) -> u64 {
        self.counts[level * self.max_run + length - 1]
    }

    pub fn run_count(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Σ length × count; equals the pixel count for a single direction.
    pub fn weighted_run_sum(&self) -> u64 {
        self.counts
            .chunks_exact(self.max_run)
            .flat_map(|row| row.iter().enumerate().map(|(r, &c)| (r as u64 + 1) * c))
            .sum()
    }

    fn add(&mut self, other: &RunLengthMatrix) {
        self.counts.iter_mut().zip(&other.counts).for_each(|(a, b)| *a += b);
    }
}

pub fn run_length_matrix(img: &QuantizedImage, direction: Direction) -> RunLengthMatrix {
    let (w, h) = (img.width() as isize, img.height() as isize);
    let max_run = img.width().max(img.height());
    let mut m = RunLengthMatrix::zeros(img.levels(), max_run);
    let (dx, dy) = direction.step();
    let inside = |x: isize, y: isize| x >= 0 && x < w && y >= 0 && y < h;
    for y0 in 0..h {
        for x0 in 0..w {
            // lines start at pixels whose predecessor falls outside
            if inside(x0 - dx, y0 - dy) {
                continue;
            }
            let (mut x, mut y) = (x0, y0);
            let mut level = img.get(x as usize, y as usize);
            let mut run = 0usize;
            while inside(x, y) {
                let v = img.get(x as usize, y as usize);
                if v == level {
                    run += 1;
                } else {
                    m.counts[level as usize * max_run + run - 1] += 1;
                    level = v;
                    run = 1;
                }
                x += dx;
                y += dy;
            }
            m.counts[level as usize * max_run + run - 1] += 1;
        }
    }
    m
}

/// Short-run emphasis, long-run emphasis, gray-level nonuniformity,
/// run-length nonuniformity and run percentage of the direction-summed matrix.
pub fn rlm_features<T: Real>(img: &QuantizedImage, directions: &[Direction]) -> Result<FeatureVector<T>> {
    let mut total = RunLengthMatrix::zeros(img.levels(), img.width().max(img.height()));
    for &dir in directions {
        total.add(&run_length_matrix(img, dir));
    }
    let runs = T::from_u64(total.run_count()).unwrap();
    let pixels = T::from_count(img.width() * img.height() * directions.len());
    let (mut sre, mut lre) = (T::zero(), T::zero());
    let mut per_length = vec![T::zero(); total.max_run];
    let mut gln = T::zero();
    for level in 0..total.levels {
        let mut level_runs = T::zero();
        for len in 1..=total.max_run {
            let c = total.count(level, len);
            if c == 0 {
                continue;
            }
            let c = T::from_u64(c).unwrap();
            let r = T::from_count(len);
            sre = sre + c / (r * r);
            lre = lre + c * r * r;
            level_runs = level_runs + c;
            per_length[len - 1] = per_length[len - 1] + c;
        }
        gln = gln + level_runs * level_runs;
    }
    let rln: T = per_length.iter().map(|&c| c * c).sum();
    FeatureVector::new(
        RLM_FEATURES.iter().map(|s| s.to_string()).collect(),
        vec![sre / runs, lre / runs, gln / runs, rln / runs, runs / pixels],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn checkerboard(n: usize) -> QuantizedImage {
        QuantizedImage::new(n, n, 2, (0..n * n).map(|i| ((i % n + i / n) % 2) as u16).collect()).unwrap()
    }

    #[test]
    fn constant_rows_are_single_runs() {
        let img = QuantizedImage::new(6, 6, 4, vec![2; 36]).unwrap();
        let m = run_length_matrix(&img, Direction::Deg0);
        assert_eq!(m.count(2, 6), 6);
        assert_eq!(m.run_count(), 6);
        let f = rlm_features::<f64>(&img, &[Direction::Deg0]).unwrap();
        assert_eq!(f.get("rlm_lre"), Some(36.0));
        assert_eq!(f.get("rlm_sre"), Some(1.0 / 36.0));
    }

    #[test]
    fn checkerboard_all_unit_runs() {
        let f = rlm_features::<f64>(&checkerboard(4), &[Direction::Deg0]).unwrap();
        assert_eq!(f.get("rlm_sre"), Some(1.0));
        assert_eq!(f.get("rlm_lre"), Some(1.0));
        assert_eq!(f.get("rlm_rp"), Some(1.0));
        // 8 runs per level, 16 runs of length one
        assert_eq!(f.get("rlm_gln"), Some(8.0));
        assert_eq!(f.get("rlm_rln"), Some(16.0));
    }

    #[test]
    fn checkerboard_diagonals_are_long() {
        let m = run_length_matrix(&checkerboard(4), Direction::Deg135);
        // main diagonals have constant color: lengths 1,2,3,4,3,2,1
        assert_eq!(m.count(0, 4), 1);
        assert_eq!(m.run_count(), 7);
        assert_eq!(m.weighted_run_sum(), 16);
    }

    #[test]
    fn pixel_conservation_on_rectangle() {
        let img = QuantizedImage::new(7, 3, 3, (0..21).map(|i| ((i * 5 + i / 4) % 3) as u16).collect()).unwrap();
        for dir in Direction::ALL {
            assert_eq!(run_length_matrix(&img, dir).weighted_run_sum(), 21, "{dir:?}");
        }
    }
}
