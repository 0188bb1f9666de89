use ndarray::{Array2, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::updates::{class_objective_gram, label_matrix, update_a, update_d, update_w, AdmmState, PSolver};
use super::{ClassModel, ClassPartitionedDataset, Hyperparameters};
use crate::error::{Error, Result};
use crate::model::TrainedModel;

/// Fixed data of one class's sub-problem.
#[derive(Debug, Clone)]
pub struct ClassProblem {
    /// X_i, n × k_i.
    pub x: Array2<f64>,
    /// X̄_i X̄_iᵀ, n × n.
    pub complement_gram: Array2<f64>,
    /// H_i, Q × k_i.
    pub h: Array2<f64>,
}

impl ClassProblem {
    pub fn new(x: Array2<f64>, complement_gram: Array2<f64>, h: Array2<f64>) -> Result<Self> {
        let n = x.nrows();
        if complement_gram.dim() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: complement_gram.nrows(),
                context: "complement gram size",
            });
        }
        if h.ncols() != x.ncols() {
            return Err(Error::DimensionMismatch {
                expected: x.ncols(),
                actual: h.ncols(),
                context: "label columns vs samples",
            });
        }
        if x.ncols() == 0 {
            return Err(Error::InvalidConfig("class problem has no samples".into()));
        }
        Ok(ClassProblem {
            x,
            complement_gram,
            h,
        })
    }

    /// All class problems of a dataset. Complement grams are formed as the
    /// full gram minus the class gram.
    pub fn from_dataset(dataset: &ClassPartitionedDataset) -> Vec<ClassProblem> {
        let q = dataset.num_classes();
        let all = dataset.features();
        let total_gram = all.dot(&all.t());
        (0..q)
            .into_par_iter()
            .map(|i| {
                let x = dataset.class_matrix(i);
                let complement_gram = &total_gram - &x.dot(&x.t());
                let h = label_matrix(i, q, x.ncols());
                ClassProblem {
                    x,
                    complement_gram,
                    h,
                }
            })
            .collect()
    }

    fn objective(&self, state: &ClassState, hp: &Hyperparameters) -> f64 {
        class_objective_gram(
            self.x.view(),
            self.complement_gram.view(),
            self.h.view(),
            &state.model,
            state.a.view(),
            hp,
        )
    }
}

/// Iterate of one class: dictionaries, codes and ADMM splitting variables.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassState {
    pub model: ClassModel,
    pub a: Array2<f64>,
    pub admm: AdmmState,
}

fn class_rng(seed: u64, class: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(class as u64);
    rng
}

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_simple_fn((rows, cols), || StandardNormal.sample(rng))
}

/// Random start for one class: Gaussian P and D (D with unit columns),
/// then A from the code update with W = 0 and W from the classifier update.
pub fn init_class(
    problem: &ClassProblem,
    hp: &Hyperparameters,
    seed: u64,
    class: usize,
) -> Result<ClassState> {
    let n = problem.x.nrows();
    let q = problem.h.nrows();
    let mut rng = class_rng(seed, class);
    let p = gaussian(&mut rng, hp.m, n);
    let mut d = gaussian(&mut rng, n, hp.m);
    for mut col in d.columns_mut() {
        let norm = col.dot(&col).sqrt();
        if norm > 0.0 {
            col.mapv_inplace(|v| v / norm);
        }
    }
    let w0 = Array2::zeros((q, hp.m));
    let a = update_a(problem.x.view(), d.view(), w0.view(), p.view(), problem.h.view(), hp)?;
    let w = update_w(a.view(), problem.h.view(), hp)?;
    let admm = AdmmState::from_dictionary(&d);
    Ok(ClassState {
        model: ClassModel { p, d, w },
        a,
        admm,
    })
}

/// Initial state of every class of a dataset.
pub fn init(dataset: &ClassPartitionedDataset, hp: &Hyperparameters, seed: u64) -> Result<Vec<ClassState>> {
    hp.validate()?;
    let problems = ClassProblem::from_dataset(dataset);
    problems
        .par_iter()
        .enumerate()
        .map(|(i, p)| init_class(p, hp, seed, i))
        .collect()
}

fn step(problem: &ClassProblem, solver: &PSolver, state: &mut ClassState, hp: &Hyperparameters) -> Result<()> {
    let x: ArrayView2<f64> = problem.x.view();
    let h = problem.h.view();
    state.a = update_a(x, state.model.d.view(), state.model.w.view(), state.model.p.view(), h, hp)?;
    state.model.p = solver.solve(x, state.a.view());
    state.model.w = update_w(state.a.view(), h, hp)?;
    let admm = std::mem::replace(&mut state.admm, AdmmState::zeros(0, 0));
    let (d, admm) = update_d(x, state.a.view(), hp, admm)?;
    state.model.d = d;
    state.admm = admm;
    Ok(())
}

/// Result of a training run.
#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub states: Vec<ClassState>,
    /// Objective after initialization, then after every outer iteration.
    pub trace: Vec<f64>,
}

impl TrainOutput {
    pub fn iterations(&self) -> usize {
        self.trace.len() - 1
    }

    pub fn models(&self) -> Vec<ClassModel> {
        self.states.iter().map(|s| s.model.clone()).collect()
    }
}

/// Alternating minimization over independent class problems.
pub fn train_problems(problems: &[ClassProblem], hp: &Hyperparameters, seed: u64) -> Result<TrainOutput> {
    hp.validate()?;
    if problems.len() < 2 {
        return Err(Error::InvalidConfig(format!(
            "training needs at least 2 classes, got {}",
            problems.len()
        )));
    }
    let mut states: Vec<ClassState> = problems
        .par_iter()
        .enumerate()
        .map(|(i, p)| init_class(p, hp, seed, i))
        .collect::<Result<_>>()?;
    let total = |states: &[ClassState]| -> f64 {
        let parts: Vec<f64> = problems
            .par_iter()
            .zip(states.par_iter())
            .map(|(p, s)| p.objective(s, hp))
            .collect();
        parts.iter().sum()
    };
    let mut trace = vec![total(&states)];
    if hp.outer_iters == 0 {
        return Ok(TrainOutput { states, trace });
    }

    let solvers: Vec<PSolver> = problems
        .par_iter()
        .map(|p| PSolver::new(p.x.view(), p.complement_gram.view(), hp))
        .collect::<Result<_>>()?;

    for t in 0..hp.outer_iters {
        problems
            .par_iter()
            .zip(solvers.par_iter())
            .zip(states.par_iter_mut())
            .try_for_each(|((p, solver), s)| step(p, solver, s, hp))?;
        let current = total(&states);
        let previous = *trace.last().expect("trace starts non-empty");
        trace.push(current);
        log::debug!("outer iteration {}: objective {current:.6e}", t + 1);
        let decrease = (previous - current) / previous.abs().max(f64::MIN_POSITIVE);
        if decrease < hp.tol {
            break;
        }
    }
    Ok(TrainOutput { states, trace })
}

/// Train every class of `dataset`; returns the model and the objective trace.
pub fn train(
    dataset: &ClassPartitionedDataset,
    hp: &Hyperparameters,
    seed: u64,
) -> Result<(TrainedModel, TrainOutput)> {
    let problems = ClassProblem::from_dataset(dataset);
    let out = train_problems(&problems, hp, seed)?;
    let model = TrainedModel::new(
        dataset.class_names().to_vec(),
        *hp,
        *dataset.feature_config(),
        out.models(),
    )?;
    Ok((model, out))
}
