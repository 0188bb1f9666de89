//! Image → feature vector configuration shared by corpus loading, training
//! and image classification.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hog::{self, HogConfig};
use crate::preprocess::{self, GrayImage, GLYPH_SIDE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PreprocessMode {
    /// Otsu, binarize, crop, resize to 32×32.
    #[default]
    Pipeline,
    /// Resize to 32×32, then Otsu and binarize; no cropping.
    ResizeBinarize,
    /// Resize to 32×32 and keep intensities scaled to [0, 1].
    Grayscale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    #[default]
    Hog,
    /// The 1024 values of the normalized 32×32 image.
    RawPixels,
    /// Vectors supplied directly; images cannot be featurized.
    Precomputed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FeatureConfig {
    #[serde(default)]
    pub preprocess: PreprocessMode,
    #[serde(default)]
    pub kind: FeatureKind,
    #[serde(default)]
    pub hog: HogConfig,
}

impl FeatureConfig {
    pub fn precomputed() -> Self {
        FeatureConfig {
            kind: FeatureKind::Precomputed,
            ..FeatureConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.hog.validate()
    }

    /// Feature length produced for any input image, `None` for precomputed vectors.
    pub fn feature_len(&self) -> Option<usize> {
        match self.kind {
            FeatureKind::Hog => Some(self.hog.feature_len()),
            FeatureKind::RawPixels => Some(GLYPH_SIDE * GLYPH_SIDE),
            FeatureKind::Precomputed => None,
        }
    }

    /// Normalized 32×32 image as reals.
    pub fn normalize(&self, img: &GrayImage) -> Result<Array2<f64>> {
        let values = match self.preprocess {
            PreprocessMode::Pipeline => preprocess::preprocess_pipeline(img)?.to_f64(),
            PreprocessMode::ResizeBinarize => {
                let small = preprocess::resize_gray(img, GLYPH_SIDE, GLYPH_SIDE);
                let t = preprocess::otsu_threshold(&small);
                let bin = preprocess::binarize(&small, t);
                if bin.foreground_count() == 0 {
                    return Err(Error::EmptyGlyph(None));
                }
                bin.data().iter().map(|&v| f64::from(v)).collect()
            }
            PreprocessMode::Grayscale => preprocess::resize_gray(img, GLYPH_SIDE, GLYPH_SIDE)
                .data()
                .iter()
                .map(|&v| f64::from(v) / 255.0)
                .collect(),
        };
        Ok(Array2::from_shape_vec((GLYPH_SIDE, GLYPH_SIDE), values).expect("32x32"))
    }

    pub fn extract(&self, img: &GrayImage) -> Result<Vec<f64>> {
        let norm = self.normalize(img)?;
        match self.kind {
            FeatureKind::Hog => Ok(hog::extract_intensity(norm.view(), &self.hog)),
            FeatureKind::RawPixels => Ok(norm.iter().copied().collect()),
            FeatureKind::Precomputed => Err(Error::InvalidConfig(
                "model was trained on precomputed vectors; images cannot be featurized".into(),
            )),
        }
    }
}
