//! Fixed-resolution texture signatures computed on the full-resolution image:
//! fractal dimension, GMRF interaction parameters, co-occurrence statistics
//! and run-length statistics.

mod fractal;
mod glcm;
mod gmrf;
mod quantize;
mod rlm;

pub use fractal::{fractal_dimension, fractal_dimension_with, FdEstimator};
pub use glcm::{glcm, glcm_features, Glcm, GLCM_FEATURES};
pub use gmrf::{gmrf_features, gmrf_fit, GmrfFit, GMRF_FEATURES};
pub use quantize::{quantize, QuantizedImage};
pub use rlm::{rlm_features, run_length_matrix, RunLengthMatrix, RLM_FEATURES};

use serde::{Deserialize, Serialize};

/// Pixel-pair / run direction. Rows grow downwards, so 45° steps up and right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "0")]
    Deg0,
    #[serde(rename = "45")]
    Deg45,
    #[serde(rename = "90")]
    Deg90,
    #[serde(rename = "135")]
    Deg135,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Deg0, Direction::Deg45, Direction::Deg90, Direction::Deg135];

    /// Unit step `(dx, dy)`.
    pub fn step(self) -> (isize, isize) {
        match self {
            Direction::Deg0 => (1, 0),
            Direction::Deg45 => (1, -1),
            Direction::Deg90 => (0, -1),
            Direction::Deg135 => (-1, -1),
        }
    }
}
