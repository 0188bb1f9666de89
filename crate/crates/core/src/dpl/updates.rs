use ndarray::{Array2, ArrayView2, Axis};

use super::{ClassModel, ClassPartitionedDataset, CodeUpdate, Hyperparameters};
use crate::error::{Error, Result};
use crate::linalg::{add_diagonal, fro2, SpdFactor};

fn check_dims(expected: usize, actual: usize, context: &'static str) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch {
            expected,
            actual,
            context,
        });
    }
    Ok(())
}

/// H_i: Q × k with row `class` all ones.
pub fn label_matrix(class: usize, num_classes: usize, k: usize) -> Array2<f64> {
    let mut h = Array2::zeros((num_classes, k));
    h.row_mut(class).fill(1.0);
    h
}

/// Code update: the minimizer of
/// `‖X − DA‖² + λ2‖H − WA‖² + λ3‖PX − A‖²` over A.
pub fn update_a(
    x: ArrayView2<f64>,
    d: ArrayView2<f64>,
    w: ArrayView2<f64>,
    p: ArrayView2<f64>,
    h: ArrayView2<f64>,
    hp: &Hyperparameters,
) -> Result<Array2<f64>> {
    let m = d.ncols();
    check_dims(x.nrows(), d.nrows(), "rows of D vs feature length")?;
    check_dims(m, w.ncols(), "columns of W vs atoms")?;
    check_dims(m, p.nrows(), "rows of P vs atoms")?;
    check_dims(x.nrows(), p.ncols(), "columns of P vs feature length")?;
    check_dims(x.ncols(), h.ncols(), "columns of H vs samples")?;
    check_dims(w.nrows(), h.nrows(), "rows of H vs rows of W")?;

    let wtw = w.t().dot(&w);
    let label_weight = match hp.code_update {
        CodeUpdate::Corrected => hp.lambda2,
        CodeUpdate::Printed => 1.0,
    };
    let lhs = add_diagonal(d.t().dot(&d) + &(wtw * label_weight), hp.lambda3);
    let rhs = d.t().dot(&x) + &(w.t().dot(&h) * hp.lambda2) + &(p.dot(&x) * hp.lambda3);
    let factor = SpdFactor::new(&lhs, "code update")?;
    Ok(factor.solve_left(&rhs))
}

/// Cached factorization of `λ3 X Xᵀ + λ1 X̄ X̄ᵀ + γ I`, which stays fixed
/// for a class over the whole training run.
#[derive(Debug, Clone)]
pub struct PSolver {
    factor: SpdFactor,
    lambda3: f64,
}

impl PSolver {
    /// `complement_gram` is `X̄ X̄ᵀ`.
    pub fn new(x: ArrayView2<f64>, complement_gram: ArrayView2<f64>, hp: &Hyperparameters) -> Result<Self> {
        check_dims(x.nrows(), complement_gram.nrows(), "complement gram size")?;
        let sys = add_diagonal(
            x.dot(&x.t()) * hp.lambda3 + &(&complement_gram * hp.lambda1),
            hp.gamma,
        );
        Ok(PSolver {
            factor: SpdFactor::new(&sys, "analysis dictionary update")?,
            lambda3: hp.lambda3,
        })
    }

    /// `λ3 A Xᵀ (λ3 X Xᵀ + λ1 X̄ X̄ᵀ + γ I)⁻¹`.
    pub fn solve(&self, x: ArrayView2<f64>, a: ArrayView2<f64>) -> Array2<f64> {
        let rhs = a.dot(&x.t()) * self.lambda3;
        self.factor.solve_right(&rhs)
    }
}

/// Analysis dictionary update: the minimizer of
/// `λ1‖P X̄‖² + λ3‖PX − A‖² + γ‖P‖²` over P.
pub fn update_p(
    x: ArrayView2<f64>,
    x_bar: ArrayView2<f64>,
    a: ArrayView2<f64>,
    hp: &Hyperparameters,
) -> Result<Array2<f64>> {
    check_dims(x.nrows(), x_bar.nrows(), "rows of X̄ vs feature length")?;
    check_dims(x.ncols(), a.ncols(), "columns of A vs samples")?;
    let gram = x_bar.dot(&x_bar.t());
    Ok(PSolver::new(x, gram.view(), hp)?.solve(x, a))
}

/// Classifier update `W = H Aᵀ (A Aᵀ + γ I)⁻¹`, the minimizer of
/// `‖H − WA‖² + γ‖W‖²`.
pub fn update_w(a: ArrayView2<f64>, h: ArrayView2<f64>, hp: &Hyperparameters) -> Result<Array2<f64>> {
    check_dims(a.ncols(), h.ncols(), "columns of H vs samples")?;
    let gram = add_diagonal(a.dot(&a.t()), hp.gamma);
    let factor = SpdFactor::new(&gram, "classifier update")?;
    Ok(factor.solve_right(&h.dot(&a.t())))
}

/// Scale every column with norm above 1 back onto the unit sphere.
pub fn project_columns(m: &mut Array2<f64>) {
    for mut col in m.axis_iter_mut(Axis(1)) {
        let norm = col.dot(&col).sqrt();
        if norm > 1.0 {
            col.mapv_inplace(|v| v / norm);
        }
    }
}

/// Splitting variables carried between dictionary updates.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmmState {
    /// Feasible copy of the dictionary, n × m.
    pub s: Array2<f64>,
    /// Scaled dual, n × m.
    pub t: Array2<f64>,
    /// Iterations run by the last update.
    pub iterations: usize,
}

impl AdmmState {
    pub fn zeros(n: usize, m: usize) -> Self {
        AdmmState {
            s: Array2::zeros((n, m)),
            t: Array2::zeros((n, m)),
            iterations: 0,
        }
    }

    /// Warm start from a feasible dictionary with zero dual.
    pub fn from_dictionary(d: &Array2<f64>) -> Self {
        let mut s = d.clone();
        project_columns(&mut s);
        AdmmState {
            t: Array2::zeros(d.raw_dim()),
            s,
            iterations: 0,
        }
    }
}

/// Dictionary update by ADMM on `min ‖X − DA‖²` s.t. unit-ball columns.
///
/// Returns the feasible iterate `S`.
pub fn update_d(
    x: ArrayView2<f64>,
    a: ArrayView2<f64>,
    hp: &Hyperparameters,
    mut state: AdmmState,
) -> Result<(Array2<f64>, AdmmState)> {
    let (n, m) = (x.nrows(), a.nrows());
    check_dims(x.ncols(), a.ncols(), "columns of A vs samples")?;
    check_dims(n, state.s.nrows(), "ADMM state rows")?;
    check_dims(m, state.s.ncols(), "ADMM state columns")?;

    let rho = hp.rho;
    let inv = SpdFactor::new(&add_diagonal(a.dot(&a.t()), rho), "dictionary update")?.inverse();
    let xat = x.dot(&a.t());

    state.iterations = 0;
    for _ in 0..hp.admm_iters {
        let rhs = &xat + &((&state.s - &state.t) * rho);
        let d = rhs.dot(&inv);
        let mut s = &d + &state.t;
        project_columns(&mut s);
        state.t = &state.t + &d - &s;
        let moved = fro2(&(&s - &state.s)).sqrt() * rho;
        state.s = s;
        state.iterations += 1;

        // primal gap ‖D − S‖ and dual change ρ‖S − S_prev‖, both relative to ‖D‖
        let gap = fro2(&(&d - &state.s)).sqrt();
        let scale = fro2(&d).sqrt();
        if scale == 0.0 {
            if gap == 0.0 && moved == 0.0 {
                break;
            }
        } else if gap <= hp.admm_tol * scale && moved <= hp.admm_tol * scale {
            break;
        }
    }
    Ok((state.s.clone(), state))
}

/// One class's term of the relaxed objective, with an explicit X̄.
#[allow(clippy::too_many_arguments)]
pub fn class_objective(
    x: ArrayView2<f64>,
    x_bar: ArrayView2<f64>,
    h: ArrayView2<f64>,
    model: &ClassModel,
    a: ArrayView2<f64>,
    hp: &Hyperparameters,
) -> f64 {
    let reconstruction = fro2(&(&x - &model.d.dot(&a)));
    let suppression = fro2(&model.p.dot(&x_bar));
    let label = fro2(&(&h - &model.w.dot(&a)));
    let coding = fro2(&(&model.p.dot(&x) - &a));
    reconstruction + hp.lambda1 * suppression + hp.lambda2 * label + hp.lambda3 * coding
}

/// Same as [`class_objective`] with `‖P X̄‖²` evaluated as `tr(P G Pᵀ)`,
/// `G = X̄ X̄ᵀ`.
pub(crate) fn class_objective_gram(
    x: ArrayView2<f64>,
    complement_gram: ArrayView2<f64>,
    h: ArrayView2<f64>,
    model: &ClassModel,
    a: ArrayView2<f64>,
    hp: &Hyperparameters,
) -> f64 {
    let reconstruction = fro2(&(&x - &model.d.dot(&a)));
    let pg = model.p.dot(&complement_gram);
    let suppression: f64 = pg.iter().zip(model.p.iter()).map(|(u, v)| u * v).sum();
    let label = fro2(&(&h - &model.w.dot(&a)));
    let coding = fro2(&(&model.p.dot(&x) - &a));
    reconstruction + hp.lambda1 * suppression.max(0.0) + hp.lambda2 * label + hp.lambda3 * coding
}

/// Full relaxed objective summed over classes.
pub fn objective(
    dataset: &ClassPartitionedDataset,
    labels: &[Array2<f64>],
    models: &[ClassModel],
    codes: &[Array2<f64>],
    hp: &Hyperparameters,
) -> Result<f64> {
    let q = dataset.num_classes();
    check_dims(q, labels.len(), "label matrices per class")?;
    check_dims(q, models.len(), "models per class")?;
    check_dims(q, codes.len(), "code matrices per class")?;
    Ok((0..q)
        .map(|i| {
            let x = dataset.class_matrix(i);
            let x_bar = dataset.complement_matrix(i);
            class_objective(x.view(), x_bar.view(), labels[i].view(), &models[i], codes[i].view(), hp)
        })
        .sum())
}
