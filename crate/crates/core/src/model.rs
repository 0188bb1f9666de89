use crate::dpl::{ClassModel, Hyperparameters};
use crate::error::{Error, Result};
use crate::features::FeatureConfig;

/// Bank of per-class dictionary pairs plus the settings that produced it.
/// Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    class_names: Vec<String>,
    hyperparameters: Hyperparameters,
    features: FeatureConfig,
    classes: Vec<ClassModel>,
}

impl TrainedModel {
    pub fn new(
        class_names: Vec<String>,
        hyperparameters: Hyperparameters,
        features: FeatureConfig,
        classes: Vec<ClassModel>,
    ) -> Result<Self> {
        let q = class_names.len();
        if classes.len() != q {
            return Err(Error::DimensionMismatch {
                expected: q,
                actual: classes.len(),
                context: "class models vs class names",
            });
        }
        let first = classes
            .first()
            .ok_or_else(|| Error::InvalidConfig("model needs at least one class".into()))?;
        let (m, n) = first.p.dim();
        for c in &classes {
            if c.p.dim() != (m, n) {
                return Err(Error::DimensionMismatch { expected: m * n, actual: c.p.len(), context: "analysis dictionary shape" });
            }
            if c.d.dim() != (n, m) {
                return Err(Error::DimensionMismatch { expected: n * m, actual: c.d.len(), context: "synthesis dictionary shape" });
            }
            if c.w.dim() != (q, m) {
                return Err(Error::DimensionMismatch { expected: q * m, actual: c.w.len(), context: "classifier shape" });
            }
        }
        if let Some(len) = features.feature_len() {
            if len != n {
                return Err(Error::DimensionMismatch {
                    expected: len,
                    actual: n,
                    context: "feature length of pipeline vs dictionaries",
                });
            }
        }
        Ok(TrainedModel {
            class_names,
            hyperparameters,
            features,
            classes,
        })
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn hyperparameters(&self) -> &Hyperparameters {
        &self.hyperparameters
    }

    pub fn features(&self) -> &FeatureConfig {
        &self.features
    }

    pub fn classes(&self) -> &[ClassModel] {
        &self.classes
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// Feature length n.
    pub fn feature_len(&self) -> usize {
        self.classes[0].p.ncols()
    }

    /// Atoms per class m.
    pub fn atoms(&self) -> usize {
        self.classes[0].p.nrows()
    }

    pub fn max_atom_norm(&self) -> f64 {
        self.classes.iter().map(ClassModel::max_atom_norm).fold(0.0, f64::max)
    }
}
