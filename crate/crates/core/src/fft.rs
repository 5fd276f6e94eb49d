//! Two-dimensional complex DFT over row-major buffers.
//!
//! Plans are created once and shared immutably, so one [`Fft2`] can serve
//! any number of threads. Scratch space is allocated per call.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::scalar::Real;

#[derive(Clone)]
pub struct Fft2<T: Real> {
    width: usize,
    height: usize,
    row_forward: Arc<dyn Fft<T>>,
    row_inverse: Arc<dyn Fft<T>>,
    col_forward: Arc<dyn Fft<T>>,
    col_inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> std::fmt::Debug for Fft2<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2").field("width", &self.width).field("height", &self.height).finish()
    }
}

impl<T: Real> Fft2<T> {
    pub fn new(width: usize, height: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            width,
            height,
            row_forward: planner.plan_fft_forward(width),
            row_inverse: planner.plan_fft_inverse(width),
            col_forward: planner.plan_fft_forward(height),
            col_inverse: planner.plan_fft_inverse(height),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Unnormalized forward transform, in place.
    pub fn forward(&self, buf: &mut [Complex<T>]) {
        self.run(buf, &self.row_forward, &self.col_forward);
    }

    /// Inverse transform including the `1 / (width * height)` factor, in place.
    pub fn inverse(&self, buf: &mut [Complex<T>]) {
        self.run(buf, &self.row_inverse, &self.col_inverse);
        let scale = T::one() / T::from_count(self.width * self.height);
        buf.iter_mut().for_each(|c| *c = *c * scale);
    }

    /// Forward transform of a real row-major image.
    pub fn forward_real(&self, values: &[T]) -> Vec<Complex<T>> {
        let mut buf: Vec<Complex<T>> = values.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.forward(&mut buf);
        buf
    }

    fn run(&self, buf: &mut [Complex<T>], rows: &Arc<dyn Fft<T>>, cols: &Arc<dyn Fft<T>>) {
        let (w, h) = (self.width, self.height);
        assert_eq!(buf.len(), w * h, "buffer does not match transform size");
        let mut scratch = vec![Complex::default(); rows.get_inplace_scratch_len().max(cols.get_inplace_scratch_len())];
        for row in buf.chunks_exact_mut(w) {
            rows.process_with_scratch(row, &mut scratch);
        }
        let mut transposed = transpose(w, h, buf);
        for col in transposed.chunks_exact_mut(h) {
            cols.process_with_scratch(col, &mut scratch);
        }
        // transpose back into the caller's layout
        for (x, col) in transposed.chunks_exact(h).enumerate() {
            for (y, &c) in col.iter().enumerate() {
                buf[y * w + x] = c;
            }
        }
    }
}

fn transpose<T: Copy + Default>(width: usize, height: usize, m: &[T]) -> Vec<T> {
    let mut out = vec![T::default(); m.len()];
    for y in 0..height {
        for x in 0..width {
            out[x * height + y] = m[y * width + x];
        }
    }
    out
}

/// Signed frequency of DFT index `k` on an `n`-point grid, in cycles/sample.
#[inline]
pub fn signed_frequency<T: Real>(k: usize, n: usize) -> T {
    if 2 * k < n {
        T::from_count(k) / T::from_count(n)
    } else {
        (T::from_count(k) - T::from_count(n)) / T::from_count(n)
    }
}
