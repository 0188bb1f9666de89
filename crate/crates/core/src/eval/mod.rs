//! Cross-validation, parameter sweeps and timing.

mod folds;
mod report;
mod sweep;

use std::time::Instant;

use rayon::prelude::*;

use crate::classifier::Classifier;
use crate::dpl::{self, ClassPartitionedDataset, Hyperparameters};
use crate::error::Result;

pub use folds::{make_folds, Fold, FoldPlan, Scheme};
pub(crate) use report::csv_field;
pub use report::{EvalReport, FoldResult};
pub use sweep::{dict_size_study, logspace, sweep, Grid, GridAxis, Param, SweepRow, SweepTable};

/// Classifier settings applied to every fold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    /// Weight of the label term in the class score; 0 scores by
    /// reconstruction residual alone.
    pub label_weight: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { label_weight: 1.0 }
    }
}

/// Train and test every fold of `plan` with default classifier settings.
pub fn run_cv(
    dataset: &ClassPartitionedDataset,
    plan: &FoldPlan,
    hp: &Hyperparameters,
    seed: u64,
) -> Result<EvalReport> {
    run_cv_with(dataset, plan, hp, seed, &EvalOptions::default())
}

pub fn run_cv_with(
    dataset: &ClassPartitionedDataset,
    plan: &FoldPlan,
    hp: &Hyperparameters,
    seed: u64,
    opts: &EvalOptions,
) -> Result<EvalReport> {
    hp.validate()?;
    plan.check(dataset.len())?;
    let mut report = EvalReport::new(plan.scheme, dataset.class_names().to_vec());
    report.extraction_ms_per_image = dataset.extraction_ms();
    report.note = plan.note.clone();
    for (index, fold) in plan.folds.iter().enumerate() {
        let result = run_fold(dataset, index, fold, hp, seed, opts)?;
        log::info!(
            "fold {}/{} ({}): accuracy {:.4}",
            index + 1,
            plan.len(),
            fold.name,
            result.accuracy()
        );
        report.add_fold(result);
    }
    Ok(report)
}

fn run_fold(
    dataset: &ClassPartitionedDataset,
    index: usize,
    fold: &Fold,
    hp: &Hyperparameters,
    seed: u64,
    opts: &EvalOptions,
) -> Result<FoldResult> {
    let train_set = dataset.subset(&fold.train)?;
    let started = Instant::now();
    let (model, out) = dpl::train(&train_set, hp, seed)?;
    let train_ms = started.elapsed().as_secs_f64() * 1e3;

    let classifier = Classifier::new(&model).with_label_weight(opts.label_weight);
    let timed: Vec<(usize, f64)> = fold
        .test
        .par_iter()
        .map(|&j| {
            let t = Instant::now();
            let label = classifier.classify(dataset.column(j))?;
            Ok((label, t.elapsed().as_secs_f64() * 1e3))
        })
        .collect::<Result<_>>()?;
    let outputs: Vec<usize> = timed.iter().map(|&(l, _)| l).collect();
    let targets: Vec<usize> = fold.test.iter().map(|&j| dataset.labels()[j]).collect();
    let classify_ms = if timed.is_empty() {
        0.0
    } else {
        timed.iter().map(|&(_, ms)| ms).sum::<f64>() / timed.len() as f64
    };
    let correct = targets.iter().zip(&outputs).filter(|(t, o)| t == o).count();
    Ok(FoldResult {
        index,
        name: fold.name.clone(),
        train_size: fold.train.len(),
        test_size: fold.test.len(),
        correct,
        iterations: out.iterations(),
        final_objective: *out.trace.last().expect("trace is never empty"),
        targets,
        outputs,
        train_ms,
        classify_ms_per_image: classify_ms,
    })
}
