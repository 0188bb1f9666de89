//! Histogram of oriented gradients over a 32×32 glyph.
//!
//! Gradients are plain central differences with replicated borders. Each
//! pixel inside a complete cell votes its gradient magnitude into the two
//! orientation bins nearest its angle (or one bin with hard binning). Partial
//! cells at the right/bottom edge are dropped, so the default 3-pixel cells
//! give a 10×10 grid and a 900-value descriptor.

use ndarray::{Array2, Array3, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::{NormalizedGlyph, GLYPH_SIDE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Binning {
    /// Linear interpolation between the two nearest bin centers.
    Interpolated,
    /// Whole vote to the bin containing the angle.
    Hard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Min–max over the whole flattened descriptor.
    Global,
    /// Min–max within each cell histogram.
    PerCell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HogConfig {
    pub cell_size: usize,
    pub num_bins: usize,
    /// Orientations over 0°–360° instead of 0°–180°.
    pub signed: bool,
    pub binning: Binning,
    pub normalization: Normalization,
}

impl Default for HogConfig {
    fn default() -> Self {
        HogConfig {
            cell_size: 3,
            num_bins: 9,
            signed: false,
            binning: Binning::Interpolated,
            normalization: Normalization::Global,
        }
    }
}

impl HogConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cell_size == 0 || self.cell_size > GLYPH_SIDE {
            return Err(Error::InvalidConfig(format!(
                "cell_size must be in 1..={GLYPH_SIDE}, got {}",
                self.cell_size
            )));
        }
        if self.num_bins < 2 {
            return Err(Error::InvalidConfig(format!(
                "num_bins must be at least 2, got {}",
                self.num_bins
            )));
        }
        Ok(())
    }

    /// Complete cells along each side of the glyph.
    pub fn cells_per_side(&self) -> usize {
        GLYPH_SIDE / self.cell_size
    }

    /// Descriptor length for a 32×32 glyph.
    pub fn feature_len(&self) -> usize {
        let c = self.cells_per_side();
        c * c * self.num_bins
    }

    fn range_degrees(&self) -> f64 {
        if self.signed {
            360.0
        } else {
            180.0
        }
    }
}

/// Central-difference gradients of an arbitrary real image, borders replicated.
pub fn gradients_of(img: ArrayView2<f64>) -> (Array2<f64>, Array2<f64>) {
    let (h, w) = img.dim();
    let mut gx = Array2::zeros((h, w));
    let mut gy = Array2::zeros((h, w));
    for r in 0..h {
        for c in 0..w {
            let left = img[[r, c.saturating_sub(1)]];
            let right = img[[r, (c + 1).min(w - 1)]];
            let up = img[[r.saturating_sub(1), c]];
            let down = img[[(r + 1).min(h - 1), c]];
            gx[[r, c]] = right - left;
            gy[[r, c]] = down - up;
        }
    }
    (gx, gy)
}

pub fn glyph_array(glyph: &NormalizedGlyph) -> Array2<f64> {
    Array2::from_shape_vec((GLYPH_SIDE, GLYPH_SIDE), glyph.to_f64())
        .expect("glyph is 32x32")
}

pub fn gradients(glyph: &NormalizedGlyph) -> (Array2<f64>, Array2<f64>) {
    gradients_of(glyph_array(glyph).view())
}

/// Orientation of a gradient in degrees, folded to the configured range.
fn orientation(gx: f64, gy: f64, cfg: &HogConfig) -> f64 {
    let range = cfg.range_degrees();
    let mut theta = gy.atan2(gx).to_degrees();
    if !cfg.signed {
        theta = theta.rem_euclid(180.0);
    } else {
        theta = theta.rem_euclid(360.0);
    }
    if theta >= range {
        theta -= range;
    }
    theta
}

/// Per-cell orientation histograms, shape `(cells_y, cells_x, num_bins)`.
pub fn cell_histograms(gx: &Array2<f64>, gy: &Array2<f64>, cfg: &HogConfig) -> Array3<f64> {
    let cells = cfg.cells_per_side();
    let (h, w) = gx.dim();
    let cells_y = (h / cfg.cell_size).min(cells);
    let cells_x = (w / cfg.cell_size).min(cells);
    let bins = cfg.num_bins;
    let bin_width = cfg.range_degrees() / bins as f64;
    let mut hist = Array3::zeros((cells_y, cells_x, bins));

    for r in 0..cells_y * cfg.cell_size {
        for c in 0..cells_x * cfg.cell_size {
            let (dx, dy) = (gx[[r, c]], gy[[r, c]]);
            let mag = dx.hypot(dy);
            if mag == 0.0 {
                continue;
            }
            let theta = orientation(dx, dy, cfg);
            let (cy, cx) = (r / cfg.cell_size, c / cfg.cell_size);
            match cfg.binning {
                Binning::Hard => {
                    let b = ((theta / bin_width) as usize).min(bins - 1);
                    hist[[cy, cx, b]] += mag;
                }
                Binning::Interpolated => {
                    let pos = theta / bin_width - 0.5;
                    let lo = pos.floor();
                    let frac = pos - lo;
                    let b0 = (lo as i64).rem_euclid(bins as i64) as usize;
                    let b1 = (b0 + 1) % bins;
                    hist[[cy, cx, b0]] += (1.0 - frac) * mag;
                    hist[[cy, cx, b1]] += frac * mag;
                }
            }
        }
    }
    hist
}

fn min_max_scale(values: &mut [f64]) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        values.iter_mut().for_each(|v| *v = 0.0);
        return;
    }
    let span = hi - lo;
    values.iter_mut().for_each(|v| *v = (*v - lo) / span);
}

/// Flatten `(cell_y, cell_x, bin)` in row-major order and min–max scale to [0, 1].
pub fn normalize_features(hist: &Array3<f64>, cfg: &HogConfig) -> Vec<f64> {
    let mut values: Vec<f64> = hist.iter().copied().collect();
    match cfg.normalization {
        Normalization::Global => min_max_scale(&mut values),
        Normalization::PerCell => {
            for cell in values.chunks_mut(hist.dim().2.max(1)) {
                min_max_scale(cell);
            }
        }
    }
    values
}

/// HOG descriptor of a binary glyph.
pub fn extract(glyph: &NormalizedGlyph, cfg: &HogConfig) -> Vec<f64> {
    extract_intensity(glyph_array(glyph).view(), cfg)
}

/// HOG descriptor of a real-valued 32×32 image (grayscale path).
pub fn extract_intensity(img: ArrayView2<f64>, cfg: &HogConfig) -> Vec<f64> {
    let (gx, gy) = gradients_of(img);
    let hist = cell_histograms(&gx, &gy, cfg);
    normalize_features(&hist, cfg)
}
