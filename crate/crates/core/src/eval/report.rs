use std::fmt::Write as _;

use ndarray::Array2;
use serde::Serialize;

use crate::error::{Error, Result};

use super::Scheme;

/// Outcome of one fold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldResult {
    /// Position in the plan.
    pub index: usize,
    pub name: String,
    pub train_size: usize,
    pub test_size: usize,
    pub correct: usize,
    /// Outer iterations run before stopping.
    pub iterations: usize,
    pub final_objective: f64,
    /// Test targets and outputs, in test-column order.
    #[serde(skip)]
    pub targets: Vec<usize>,
    #[serde(skip)]
    pub outputs: Vec<usize>,
    /// Wall-clock training time.
    pub train_ms: f64,
    /// Mean wall-clock time of one classify call.
    pub classify_ms_per_image: f64,
}

impl FoldResult {
    pub fn accuracy(&self) -> f64 {
        if self.test_size == 0 {
            return 0.0;
        }
        self.correct as f64 / self.test_size as f64
    }
}

/// Aggregated cross-validation outcome.
///
/// Folds may be added in any order; aggregates depend only on the set of
/// folds.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub scheme: Scheme,
    pub class_names: Vec<String>,
    folds: Vec<FoldResult>,
    confusion: Array2<u64>,
    /// Mean feature extraction time per image recorded when the corpus was
    /// loaded.
    pub extraction_ms_per_image: Option<f64>,
    pub note: Option<String>,
}

impl EvalReport {
    pub fn new(scheme: Scheme, class_names: Vec<String>) -> Self {
        let q = class_names.len();
        EvalReport {
            scheme,
            class_names,
            folds: Vec::new(),
            confusion: Array2::zeros((q, q)),
            extraction_ms_per_image: None,
            note: None,
        }
    }

    pub fn add_fold(&mut self, fold: FoldResult) {
        for (&t, &o) in fold.targets.iter().zip(&fold.outputs) {
            self.confusion[[t, o]] += 1;
        }
        let at = self.folds.partition_point(|f| f.index < fold.index);
        self.folds.insert(at, fold);
    }

    /// Folds ordered by plan position.
    pub fn folds(&self) -> &[FoldResult] {
        &self.folds
    }

    /// Counts with targets as rows and outputs as columns.
    pub fn confusion(&self) -> &Array2<u64> {
        &self.confusion
    }

    pub fn total_tested(&self) -> u64 {
        self.confusion.sum()
    }

    fn require_folds(&self) -> Result<()> {
        if self.folds.is_empty() || self.total_tested() == 0 {
            return Err(Error::EmptyReport);
        }
        Ok(())
    }

    /// trace(confusion) / total; the headline figure.
    pub fn pooled_accuracy(&self) -> Result<f64> {
        self.require_folds()?;
        let correct: u64 = self.confusion.diag().sum();
        Ok(correct as f64 / self.total_tested() as f64)
    }

    /// Unweighted mean of the per-fold accuracies.
    pub fn mean_fold_accuracy(&self) -> Result<f64> {
        self.require_folds()?;
        let sum: f64 = self.folds.iter().map(FoldResult::accuracy).sum();
        Ok(sum / self.folds.len() as f64)
    }

    /// Mean classify time per test image across all folds.
    pub fn classify_ms_per_image(&self) -> Result<f64> {
        self.require_folds()?;
        let total: f64 = self
            .folds
            .iter()
            .map(|f| f.classify_ms_per_image * f.test_size as f64)
            .sum();
        Ok(total / self.total_tested() as f64)
    }

    /// Off-diagonal class pair with the most confusions in either
    /// direction, as (class a, class b, count) with a < b.
    pub fn most_confused_pair(&self) -> Option<(usize, usize, u64)> {
        let q = self.class_names.len();
        let mut best: Option<(usize, usize, u64)> = None;
        for a in 0..q {
            for b in a + 1..q {
                let c = self.confusion[[a, b]] + self.confusion[[b, a]];
                if c > 0 && best.is_none_or(|(_, _, bc)| c > bc) {
                    best = Some((a, b, c));
                }
            }
        }
        best
    }

    /// `metric,value` rows: scheme, folds, tested, pooled and mean accuracy.
    pub fn summary_csv(&self) -> Result<String> {
        let mut s = String::from("metric,value\n");
        writeln!(s, "scheme,{}", self.scheme).unwrap();
        writeln!(s, "folds,{}", self.folds.len()).unwrap();
        writeln!(s, "tested,{}", self.total_tested()).unwrap();
        writeln!(s, "pooled_accuracy,{}", self.pooled_accuracy()?).unwrap();
        writeln!(s, "mean_fold_accuracy,{}", self.mean_fold_accuracy()?).unwrap();
        Ok(s)
    }

    /// Header row of output classes; each following row starts with the
    /// target class.
    pub fn confusion_csv(&self) -> String {
        let mut s = String::from("target\\output");
        for name in &self.class_names {
            write!(s, ",{}", csv_field(name)).unwrap();
        }
        s.push('\n');
        for (t, name) in self.class_names.iter().enumerate() {
            s.push_str(&csv_field(name));
            for o in 0..self.class_names.len() {
                write!(s, ",{}", self.confusion[[t, o]]).unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn folds_csv(&self) -> String {
        let mut s = String::from("fold,name,train_size,test_size,correct,accuracy,iterations,final_objective\n");
        for f in &self.folds {
            writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                f.index + 1,
                csv_field(&f.name),
                f.train_size,
                f.test_size,
                f.correct,
                f.accuracy(),
                f.iterations,
                f.final_objective
            )
            .unwrap();
        }
        s
    }

    /// Everything above plus timings, as JSON.
    pub fn summary_json(&self) -> Result<serde_json::Value> {
        let most = self.most_confused_pair().map(|(a, b, c)| {
            serde_json::json!({
                "a": self.class_names[a],
                "b": self.class_names[b],
                "count": c,
            })
        });
        Ok(serde_json::json!({
            "scheme": self.scheme,
            "classes": self.class_names,
            "folds": self.folds,
            "tested": self.total_tested(),
            "pooled_accuracy": self.pooled_accuracy()?,
            "mean_fold_accuracy": self.mean_fold_accuracy()?,
            "confusion": self.confusion.outer_iter().map(|r| r.to_vec()).collect::<Vec<_>>(),
            "most_confused_pair": most,
            "timing": {
                "extraction_ms_per_image": self.extraction_ms_per_image,
                "classify_ms_per_image": self.classify_ms_per_image()?,
            },
            "note": self.note,
        }))
    }
}

/// Quotes a field when it holds a comma, quote or newline.
pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
