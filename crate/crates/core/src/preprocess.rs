//! Scan normalization: Otsu binarization, glyph cropping and resampling to a
//! fixed 32×32 binary grid.
//!
//! Every stage is a pure function over owned buffers. The stages compose in
//! [`preprocess_pipeline`]:
//!
//! ```
//! use lpdpl::preprocess::{preprocess_pipeline, GrayImage, GLYPH_SIDE};
//!
//! // dark stroke on a light page
//! let mut data = vec![230u8; 20 * 20];
//! for r in 4..16 {
//!     data[r * 20 + 9] = 20;
//!     data[r * 20 + 10] = 20;
//! }
//! let scan = GrayImage::new(20, 20, data).unwrap();
//! let glyph = preprocess_pipeline(&scan).unwrap();
//! assert_eq!(glyph.data().len(), GLYPH_SIDE * GLYPH_SIDE);
//! ```

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Side length of a normalized glyph.
pub const GLYPH_SIDE: usize = 32;

/// 8-bit grayscale raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidConfig(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                actual: data.len(),
                context: "gray image buffer",
            });
        }
        Ok(GrayImage {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.data[row * self.width + col]
    }
}

/// Binary raster, row-major, 1 = ink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidConfig(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                actual: data.len(),
                context: "binary image buffer",
            });
        }
        if data.iter().any(|&v| v > 1) {
            return Err(Error::InvalidConfig(
                "binary image values must be 0 or 1".into(),
            ));
        }
        Ok(BinaryImage {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.data[row * self.width + col]
    }

    pub fn foreground_count(&self) -> usize {
        self.data.iter().filter(|&&v| v == 1).count()
    }

    /// Re-encode as a {0, 255} grayscale image with ink dark on a white page.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .map(|&v| if v == 1 { 0 } else { 255 })
                .collect(),
        }
    }
}

/// 32×32 binary glyph, row-major, 1 = ink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedGlyph {
    data: Vec<u8>,
}

impl NormalizedGlyph {
    pub fn new(data: Vec<u8>) -> Result<Self> {
        if data.len() != GLYPH_SIDE * GLYPH_SIDE {
            return Err(Error::DimensionMismatch {
                expected: GLYPH_SIDE * GLYPH_SIDE,
                actual: data.len(),
                context: "normalized glyph",
            });
        }
        if data.iter().any(|&v| v > 1) {
            return Err(Error::InvalidConfig(
                "glyph values must be 0 or 1".into(),
            ));
        }
        Ok(NormalizedGlyph { data })
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.data[row * GLYPH_SIDE + col]
    }

    /// Pixel values as reals in {0, 1}.
    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(|&v| f64::from(v)).collect()
    }
}

impl From<NormalizedGlyph> for BinaryImage {
    fn from(g: NormalizedGlyph) -> Self {
        BinaryImage {
            width: GLYPH_SIDE,
            height: GLYPH_SIDE,
            data: g.data,
        }
    }
}

/// Between-class variance for a split, kept as the exact fraction
/// `(N*S0 - N0*S)^2 / (N0*N1)`, which is proportional to `w0*w1*(mu0-mu1)^2`.
#[derive(Clone, Copy)]
struct SplitScore {
    num: u128,
    den: u128,
}

impl SplitScore {
    fn zero() -> Self {
        SplitScore { num: 0, den: 1 }
    }

    fn cmp(&self, other: &Self) -> Ordering {
        // compare num/den against other.num/other.den without overflow
        let (qa, ra) = (self.num / self.den, self.num % self.den);
        let (qb, rb) = (other.num / other.den, other.num % other.den);
        match qa.cmp(&qb) {
            Ordering::Equal => {}
            ord => return ord,
        }
        // remainders are below their denominators (< 2^64), so products fit
        (ra * other.den).cmp(&(rb * self.den))
    }
}

/// Global Otsu threshold over the 256-bin histogram.
///
/// Pixels `<= t` form the dark class. Among thresholds with maximal
/// between-class variance the lowest wins. A single-level image returns
/// that level.
pub fn otsu_threshold(img: &GrayImage) -> u8 {
    let mut hist = [0u64; 256];
    for &v in img.data() {
        hist[v as usize] += 1;
    }
    let occupied = hist.iter().filter(|&&c| c > 0).count();
    if occupied <= 1 {
        return img.data()[0];
    }

    let total = img.data().len() as u128;
    let total_sum: u128 = hist
        .iter()
        .enumerate()
        .map(|(v, &c)| v as u128 * c as u128)
        .sum();

    let mut best_t = 0u8;
    let mut best = SplitScore::zero();
    let mut n0: u128 = 0;
    let mut s0: u128 = 0;
    for t in 0..=255usize {
        n0 += hist[t] as u128;
        s0 += t as u128 * hist[t] as u128;
        let n1 = total - n0;
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let diff = (total * s0).abs_diff(n0 * total_sum);
        let score = SplitScore {
            num: diff * diff,
            den: n0 * n1,
        };
        if score.cmp(&best) == Ordering::Greater {
            best = score;
            best_t = t as u8;
        }
    }
    best_t
}

/// Split at `threshold` and mark the minority side as ink.
///
/// Pixels `<= threshold` are dark, the rest bright. When both sides hold the
/// same number of pixels the dark side is ink.
pub fn binarize(img: &GrayImage, threshold: u8) -> BinaryImage {
    let dark = img.data().iter().filter(|&&v| v <= threshold).count();
    let bright = img.data().len() - dark;
    let ink_is_dark = dark <= bright;
    let data = img
        .data()
        .iter()
        .map(|&v| {
            let is_dark = v <= threshold;
            u8::from(is_dark == ink_is_dark)
        })
        .collect();
    BinaryImage {
        width: img.width(),
        height: img.height(),
        data,
    }
}

/// Inclusive bounding box of the foreground: `(row_min, row_max, col_min, col_max)`.
pub fn foreground_bounds(img: &BinaryImage) -> Option<(usize, usize, usize, usize)> {
    let mut bounds: Option<(usize, usize, usize, usize)> = None;
    for r in 0..img.height() {
        for c in 0..img.width() {
            if img.get(r, c) == 1 {
                bounds = Some(match bounds {
                    None => (r, r, c, c),
                    Some((r0, r1, c0, c1)) => (r0.min(r), r1.max(r), c0.min(c), c1.max(c)),
                });
            }
        }
    }
    bounds
}

/// Tight crop around the foreground, padded to a square with background so
/// the glyph sits centered. An odd padding puts the extra row/column at the
/// bottom/right.
pub fn crop_to_bounding_box(img: &BinaryImage) -> Result<BinaryImage> {
    let (r0, r1, c0, c1) = foreground_bounds(img).ok_or(Error::EmptyGlyph(None))?;
    let h = r1 - r0 + 1;
    let w = c1 - c0 + 1;
    let side = h.max(w);
    let top = (side - h) / 2;
    let left = (side - w) / 2;

    let mut data = vec![0u8; side * side];
    for r in 0..h {
        for c in 0..w {
            data[(top + r) * side + left + c] = img.get(r0 + r, c0 + c);
        }
    }
    Ok(BinaryImage {
        width: side,
        height: side,
        data,
    })
}

/// Source index sampled by output index `i` when resampling `src_len` pixels
/// onto `dst_len`: the source pixel containing the output pixel center.
pub fn nearest_index(i: usize, src_len: usize, dst_len: usize) -> usize {
    ((2 * i + 1) * src_len) / (2 * dst_len)
}

fn resample<T: Copy>(data: &[T], width: usize, height: usize, out_w: usize, out_h: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(out_w * out_h);
    for r in 0..out_h {
        let sr = nearest_index(r, height, out_h);
        for c in 0..out_w {
            let sc = nearest_index(c, width, out_w);
            out.push(data[sr * width + sc]);
        }
    }
    out
}

/// Nearest-neighbor resample of a square binary image to 32×32.
pub fn resize_to_32(img: &BinaryImage) -> Result<NormalizedGlyph> {
    if img.width() != img.height() {
        return Err(Error::InvalidConfig(format!(
            "resize expects a square image, got {}x{}",
            img.width(),
            img.height()
        )));
    }
    Ok(NormalizedGlyph {
        data: resample(img.data(), img.width(), img.height(), GLYPH_SIDE, GLYPH_SIDE),
    })
}

/// Nearest-neighbor resample of a grayscale image to an arbitrary size.
pub fn resize_gray(img: &GrayImage, out_w: usize, out_h: usize) -> GrayImage {
    GrayImage {
        width: out_w,
        height: out_h,
        data: resample(img.data(), img.width(), img.height(), out_w, out_h),
    }
}

/// Otsu → binarize → crop → resize.
pub fn preprocess_pipeline(img: &GrayImage) -> Result<NormalizedGlyph> {
    let t = otsu_threshold(img);
    let bin = binarize(img, t);
    let cropped = crop_to_bounding_box(&bin)?;
    resize_to_32(&cropped)
}
