use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dpl::ClassPartitionedDataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Stratified k-fold.
    Conventional,
    /// One fold per repetition index.
    WithinSubject,
    /// Leave one subject out.
    BetweenSubject,
    /// Fixed train/test split.
    Holdout,
    /// Test on the training set.
    Resubstitution,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Conventional => "conventional",
            Scheme::WithinSubject => "within_subject",
            Scheme::BetweenSubject => "between_subject",
            Scheme::Holdout => "holdout",
            Scheme::Resubstitution => "resubstitution",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conventional" => Ok(Scheme::Conventional),
            "within" | "within_subject" => Ok(Scheme::WithinSubject),
            "between" | "between_subject" => Ok(Scheme::BetweenSubject),
            "holdout" => Ok(Scheme::Holdout),
            "resubstitution" => Ok(Scheme::Resubstitution),
            other => Err(Error::InvalidConfig(format!("unknown scheme {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    /// Subject id, repetition index or fold number.
    pub name: String,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub scheme: Scheme,
    pub folds: Vec<Fold>,
    /// How the plan was derived when that is not obvious from the scheme.
    pub note: Option<String>,
}

impl FoldPlan {
    /// Every column trains and tests.
    pub fn resubstitution(total: usize) -> Self {
        let all: Vec<usize> = (0..total).collect();
        FoldPlan {
            scheme: Scheme::Resubstitution,
            folds: vec![Fold {
                name: "all".into(),
                train: all.clone(),
                test: all,
            }],
            note: None,
        }
    }

    /// Columns `0..train_len` train, `train_len..total` test.
    pub fn holdout(train_len: usize, total: usize) -> Self {
        FoldPlan {
            scheme: Scheme::Holdout,
            folds: vec![Fold {
                name: "holdout".into(),
                train: (0..train_len).collect(),
                test: (train_len..total).collect(),
            }],
            note: None,
        }
    }

    pub fn len(&self) -> usize {
        self.folds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.folds.is_empty()
    }

    /// Checks indices against a dataset of `total` columns and that no
    /// fold mixes a column into both sides (resubstitution excepted).
    pub fn check(&self, total: usize) -> Result<()> {
        for f in &self.folds {
            if let Some(&j) = f.train.iter().chain(&f.test).find(|&&j| j >= total) {
                return Err(Error::InvalidConfig(format!(
                    "fold {} references column {j} of a {total}-column dataset",
                    f.name
                )));
            }
            if self.scheme != Scheme::Resubstitution {
                let train: BTreeSet<usize> = f.train.iter().copied().collect();
                if f.test.iter().any(|j| train.contains(j)) {
                    return Err(Error::InvalidConfig(format!(
                        "fold {} shares columns between train and test",
                        f.name
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Build a fold plan.
///
/// `k` is the fold count for the conventional scheme and is ignored by the
/// grouped schemes, whose fold count follows from the metadata.
pub fn make_folds(
    dataset: &ClassPartitionedDataset,
    scheme: Scheme,
    k: usize,
    seed: u64,
) -> Result<FoldPlan> {
    match scheme {
        Scheme::Conventional => conventional(dataset, k, seed),
        Scheme::BetweenSubject => between_subject(dataset),
        Scheme::WithinSubject => within_subject(dataset, seed),
        Scheme::Resubstitution => Ok(FoldPlan::resubstitution(dataset.len())),
        Scheme::Holdout => Err(Error::InvalidConfig(
            "holdout plans come from a separate test set, see FoldPlan::holdout".into(),
        )),
    }
}

fn complement(total: usize, test: &[usize]) -> Vec<usize> {
    let mut mask = vec![false; total];
    for &j in test {
        mask[j] = true;
    }
    (0..total).filter(|&j| !mask[j]).collect()
}

fn conventional(dataset: &ClassPartitionedDataset, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::InvalidConfig(format!("conventional CV needs k >= 2, got {k}")));
    }
    if k > dataset.len() {
        return Err(Error::InvalidConfig(format!(
            "{k} folds requested for {} samples",
            dataset.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Deal each shuffled class round-robin, continuing where the previous
    // class stopped so small classes do not all land in the first folds.
    let mut tests = vec![Vec::new(); k];
    let mut pos = 0usize;
    for i in 0..dataset.num_classes() {
        let mut cols = dataset.class_columns(i).to_vec();
        cols.shuffle(&mut rng);
        for j in cols {
            tests[pos % k].push(j);
            pos += 1;
        }
    }
    let folds = tests
        .into_iter()
        .enumerate()
        .map(|(f, mut test)| {
            test.sort_unstable();
            Fold {
                name: (f + 1).to_string(),
                train: complement(dataset.len(), &test),
                test,
            }
        })
        .collect();
    Ok(FoldPlan {
        scheme: Scheme::Conventional,
        folds,
        note: None,
    })
}

fn subjects_of<'a>(dataset: &'a ClassPartitionedDataset, scheme: &'static str) -> Result<Vec<&'a str>> {
    dataset
        .subjects()
        .iter()
        .enumerate()
        .map(|(j, s)| {
            s.as_deref().ok_or_else(|| Error::MissingMetadata {
                scheme,
                what: format!("column {j} has no subject id"),
            })
        })
        .collect()
}

fn grouped(dataset: &ClassPartitionedDataset, groups: impl IntoIterator<Item = (String, Vec<usize>)>) -> Vec<Fold> {
    groups
        .into_iter()
        .map(|(name, test)| Fold {
            name,
            train: complement(dataset.len(), &test),
            test,
        })
        .collect()
}

fn between_subject(dataset: &ClassPartitionedDataset) -> Result<FoldPlan> {
    let subjects = subjects_of(dataset, "between_subject")?;
    let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (j, s) in subjects.into_iter().enumerate() {
        groups.entry(s.to_string()).or_default().push(j);
    }
    Ok(FoldPlan {
        scheme: Scheme::BetweenSubject,
        folds: grouped(dataset, groups),
        note: None,
    })
}

fn within_subject(dataset: &ClassPartitionedDataset, seed: u64) -> Result<FoldPlan> {
    let subjects = subjects_of(dataset, "within_subject")?;
    let recorded = dataset.repetitions().iter().all(Option::is_some);
    let mut reps = vec![0u32; dataset.len()];
    let note = if recorded {
        for (j, r) in dataset.repetitions().iter().enumerate() {
            reps[j] = r.expect("checked above");
        }
        None
    } else {
        // Ordinal of each sample among its (subject, class) group after a
        // seeded shuffle.
        let mut groups: BTreeMap<(&str, usize), Vec<usize>> = BTreeMap::new();
        for (j, s) in subjects.iter().enumerate() {
            groups.entry((s, dataset.labels()[j])).or_default().push(j);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for cols in groups.values_mut() {
            cols.shuffle(&mut rng);
            for (ord, &j) in cols.iter().enumerate() {
                reps[j] = ord as u32 + 1;
            }
        }
        Some(format!(
            "repetition order not recorded; repetition index = per-subject, per-class ordinal after shuffling with seed {seed}"
        ))
    };
    let mut by_rep: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (j, &r) in reps.iter().enumerate() {
        by_rep.entry(r).or_default().push(j);
    }
    let folds = grouped(
        dataset,
        by_rep.into_iter().map(|(r, cols)| (r.to_string(), cols)),
    );
    Ok(FoldPlan {
        scheme: Scheme::WithinSubject,
        folds,
        note,
    })
}
