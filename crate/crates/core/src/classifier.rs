//! Residual-plus-label classification.
//!
//! For a test vector `x` the score of class `i` is
//! `‖x − D_i P_i x‖² + w·‖h_i − W_i P_i x‖²` with `h_i` the one-hot vector
//! of class `i` and `w` the label weight (1 by default). The predicted class
//! is the lowest score, ties going to the lower index.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::TrainedModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassScore {
    pub class_index: usize,
    /// ‖x − D_i P_i x‖².
    pub residual: f64,
    /// Weighted label term.
    pub label_error: f64,
    /// `residual + label_error`.
    pub total: f64,
}

/// Scoring rule over a borrowed model.
#[derive(Debug, Clone, Copy)]
pub struct Classifier<'a> {
    model: &'a TrainedModel,
    label_weight: f64,
}

impl<'a> Classifier<'a> {
    pub fn new(model: &'a TrainedModel) -> Self {
        Classifier {
            model,
            label_weight: 1.0,
        }
    }

    /// Weight on the label term; 0 scores by reconstruction residual alone.
    pub fn with_label_weight(mut self, weight: f64) -> Self {
        self.label_weight = weight;
        self
    }

    pub fn model(&self) -> &TrainedModel {
        self.model
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.model.feature_len() {
            return Err(Error::DimensionMismatch {
                expected: self.model.feature_len(),
                actual: len,
                context: "test vector length",
            });
        }
        Ok(())
    }

    /// Score of class `i` given the precomputed code `P_i x`.
    fn score_from_code(&self, x: ArrayView1<f64>, code: &Array1<f64>, i: usize) -> ClassScore {
        let class = &self.model.classes()[i];
        let recon = class.d.dot(code);
        let residual: f64 = x.iter().zip(recon.iter()).map(|(a, b)| (a - b).powi(2)).sum();
        let pred = class.w.dot(code);
        let label: f64 = pred
            .iter()
            .enumerate()
            .map(|(r, v)| {
                let target = if r == i { 1.0 } else { 0.0 };
                (target - v).powi(2)
            })
            .sum();
        let label_error = self.label_weight * label;
        ClassScore {
            class_index: i,
            residual,
            label_error,
            total: residual + label_error,
        }
    }

    pub fn score(&self, x: ArrayView1<f64>, i: usize) -> Result<ClassScore> {
        self.check_len(x.len())?;
        if i >= self.model.num_classes() {
            return Err(Error::InvalidConfig(format!(
                "class index {i} out of range for {} classes",
                self.model.num_classes()
            )));
        }
        let code = self.model.classes()[i].p.dot(&x);
        Ok(self.score_from_code(x, &code, i))
    }

    /// Scores of every class, in class order.
    pub fn scores(&self, x: ArrayView1<f64>) -> Result<Vec<ClassScore>> {
        self.check_len(x.len())?;
        Ok((0..self.model.num_classes())
            .map(|i| {
                let code = self.model.classes()[i].p.dot(&x);
                self.score_from_code(x, &code, i)
            })
            .collect())
    }

    /// Lowest-total class and its score.
    pub fn classify_with_score(&self, x: ArrayView1<f64>) -> Result<ClassScore> {
        let scores = self.scores(x)?;
        Ok(argmin(&scores))
    }

    pub fn classify(&self, x: ArrayView1<f64>) -> Result<usize> {
        Ok(self.classify_with_score(x)?.class_index)
    }

    /// Column-wise [`Classifier::classify`]; columns are independent and
    /// scored in parallel.
    pub fn classify_batch(&self, x: ArrayView2<f64>) -> Result<Vec<usize>> {
        if x.ncols() == 0 {
            return Ok(Vec::new());
        }
        self.check_len(x.nrows())?;
        (0..x.ncols())
            .into_par_iter()
            .map(|j| self.classify(x.column(j)))
            .collect()
    }
}

/// Lowest total; first index wins ties.
pub fn argmin(scores: &[ClassScore]) -> ClassScore {
    let mut best = scores[0];
    for s in &scores[1..] {
        if s.total < best.total {
            best = *s;
        }
    }
    best
}

pub fn score(x: ArrayView1<f64>, model: &TrainedModel, i: usize) -> Result<ClassScore> {
    Classifier::new(model).score(x, i)
}

pub fn classify(x: ArrayView1<f64>, model: &TrainedModel) -> Result<usize> {
    Classifier::new(model).classify(x)
}

pub fn classify_batch(x: ArrayView2<f64>, model: &TrainedModel) -> Result<Vec<usize>> {
    Classifier::new(model).classify_batch(x)
}

/// Codes `P_i x` for every class, the only model-dependent quantity the
/// scores need besides `D_i` and `W_i`.
pub fn codes(x: ArrayView1<f64>, model: &TrainedModel) -> Vec<Array1<f64>> {
    model.classes().iter().map(|c| c.p.dot(&x)).collect()
}

/// Scores from precomputed codes.
pub fn scores_from_codes(
    x: ArrayView1<f64>,
    codes: &[Array1<f64>],
    model: &TrainedModel,
) -> Vec<ClassScore> {
    let c = Classifier::new(model);
    codes
        .iter()
        .enumerate()
        .map(|(i, code)| c.score_from_code(x, code, i))
        .collect()
}

/// Q × Q confusion counts: rows are targets, columns outputs.
pub fn confusion(targets: &[usize], outputs: &[usize], num_classes: usize) -> Array2<u64> {
    let mut m = Array2::zeros((num_classes, num_classes));
    for (&t, &o) in targets.iter().zip(outputs) {
        m[[t, o]] += 1;
    }
    m
}
