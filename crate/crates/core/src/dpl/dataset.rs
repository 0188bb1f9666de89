use ndarray::{Array2, Axis};

use crate::error::{Error, Result};
use crate::features::FeatureConfig;

/// Feature columns grouped by class, with optional writer/repetition
/// metadata per column.
///
/// Columns keep their insertion order; the per-class matrix `X_i` lists the
/// class's columns in that order.
#[derive(Debug, Clone)]
pub struct ClassPartitionedDataset {
    features: Array2<f64>,
    labels: Vec<usize>,
    class_names: Vec<String>,
    subjects: Vec<Option<String>>,
    repetitions: Vec<Option<u32>>,
    by_class: Vec<Vec<usize>>,
    feature_config: FeatureConfig,
    extraction_ms: Option<f64>,
}

impl ClassPartitionedDataset {
    /// `features` is n × N with one sample per column; `labels[j]` is the
    /// 0-based class of column j. Every class must own at least one column.
    pub fn new(features: Array2<f64>, labels: Vec<usize>, class_names: Vec<String>) -> Result<Self> {
        let total = features.ncols();
        if labels.len() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                actual: labels.len(),
                context: "labels per column",
            });
        }
        if features.nrows() == 0 {
            return Err(Error::InvalidConfig("feature length must be positive".into()));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("features must be finite".into()));
        }
        let q = class_names.len();
        let mut by_class = vec![Vec::new(); q];
        for (j, &l) in labels.iter().enumerate() {
            if l >= q {
                return Err(Error::InvalidConfig(format!(
                    "label {l} out of range for {q} classes"
                )));
            }
            by_class[l].push(j);
        }
        if let Some(i) = by_class.iter().position(|c| c.is_empty()) {
            return Err(Error::EmptyClass {
                class: class_names[i].clone(),
            });
        }
        Ok(ClassPartitionedDataset {
            features,
            labels,
            class_names,
            subjects: vec![None; total],
            repetitions: vec![None; total],
            by_class,
            feature_config: FeatureConfig::precomputed(),
            extraction_ms: None,
        })
    }

    pub fn with_subjects(mut self, subjects: Vec<Option<String>>) -> Result<Self> {
        if subjects.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: subjects.len(),
                context: "subject ids per column",
            });
        }
        self.subjects = subjects;
        Ok(self)
    }

    pub fn with_repetitions(mut self, repetitions: Vec<Option<u32>>) -> Result<Self> {
        if repetitions.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: repetitions.len(),
                context: "repetition indices per column",
            });
        }
        self.repetitions = repetitions;
        Ok(self)
    }

    pub fn with_feature_config(mut self, cfg: FeatureConfig) -> Self {
        self.feature_config = cfg;
        self
    }

    pub fn with_extraction_ms(mut self, ms: Option<f64>) -> Self {
        self.extraction_ms = ms;
        self
    }

    /// Feature length n.
    pub fn feature_len(&self) -> usize {
        self.features.nrows()
    }

    /// Total number of columns.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of classes Q.
    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn subjects(&self) -> &[Option<String>] {
        &self.subjects
    }

    pub fn repetitions(&self) -> &[Option<u32>] {
        &self.repetitions
    }

    pub fn feature_config(&self) -> &FeatureConfig {
        &self.feature_config
    }

    /// Mean per-image feature extraction time recorded at load, if measured.
    pub fn extraction_ms(&self) -> Option<f64> {
        self.extraction_ms
    }

    /// Column indices of class `i`, in dataset order.
    pub fn class_columns(&self, i: usize) -> &[usize] {
        &self.by_class[i]
    }

    /// Sample count k_i of class `i`.
    pub fn class_len(&self, i: usize) -> usize {
        self.by_class[i].len()
    }

    /// X_i: n × k_i.
    pub fn class_matrix(&self, i: usize) -> Array2<f64> {
        self.features.select(Axis(1), &self.by_class[i])
    }

    /// X̄_i: every column not in class `i`, in dataset order.
    pub fn complement_matrix(&self, i: usize) -> Array2<f64> {
        let cols: Vec<usize> = (0..self.len()).filter(|&j| self.labels[j] != i).collect();
        self.features.select(Axis(1), &cols)
    }

    pub fn column(&self, j: usize) -> ndarray::ArrayView1<'_, f64> {
        self.features.column(j)
    }

    /// Dataset restricted to `cols`, keeping all class names. Fails if a
    /// class ends up without columns.
    pub fn subset(&self, cols: &[usize]) -> Result<Self> {
        let features = self.features.select(Axis(1), cols);
        let labels = cols.iter().map(|&j| self.labels[j]).collect();
        let out = ClassPartitionedDataset::new(features, labels, self.class_names.clone())?
            .with_subjects(cols.iter().map(|&j| self.subjects[j].clone()).collect())?
            .with_repetitions(cols.iter().map(|&j| self.repetitions[j]).collect())?
            .with_feature_config(self.feature_config)
            .with_extraction_ms(self.extraction_ms);
        Ok(out)
    }

    /// Columns of `self` followed by the columns of `other`. Both sides must
    /// share class names and feature length; the feature config and
    /// extraction time of `self` are kept.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.class_names != other.class_names {
            return Err(Error::InvalidConfig(
                "cannot join datasets with different class lists".into(),
            ));
        }
        if self.feature_len() != other.feature_len() {
            return Err(Error::DimensionMismatch {
                expected: self.feature_len(),
                actual: other.feature_len(),
                context: "feature length of joined dataset",
            });
        }
        let features = ndarray::concatenate(Axis(1), &[self.features.view(), other.features.view()])
            .expect("row counts checked");
        let labels = self.labels.iter().chain(&other.labels).copied().collect();
        let subjects = self.subjects.iter().chain(&other.subjects).cloned().collect();
        let repetitions = self.repetitions.iter().chain(&other.repetitions).copied().collect();
        Ok(ClassPartitionedDataset::new(features, labels, self.class_names.clone())?
            .with_subjects(subjects)?
            .with_repetitions(repetitions)?
            .with_feature_config(self.feature_config)
            .with_extraction_ms(self.extraction_ms))
    }
}
