//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use lpdpl::dpl::{ClassPartitionedDataset, Hyperparameters};
use lpdpl::features::FeatureConfig;
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.sample::<f64, _>(StandardNormal))
}

pub fn fro2(a: &Array2<f64>) -> f64 {
    a.iter().map(|v| v * v).sum()
}

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("data")
}

// ---------------------------------------------------------------------------
// Synthetic corpora

/// Orthonormal basis of R^dim from Gram–Schmidt on Gaussian vectors.
pub fn random_orthonormal(rng: &mut ChaCha8Rng, dim: usize) -> Array2<f64> {
    let mut q: Array2<f64> = Array2::zeros((dim, dim));
    let mut j = 0;
    while j < dim {
        let mut v: Array1<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        for k in 0..j {
            let proj = q.column(k).dot(&v);
            v = &v - &(&q.column(k) * proj);
        }
        let norm = v.dot(&v).sqrt();
        if norm > 1e-8 {
            q.column_mut(j).assign(&(v / norm));
            j += 1;
        }
    }
    q
}

/// `classes` classes of `per_class` samples, each class spanning its own
/// `dim / classes`-dimensional block of a random rotation of R^dim, so the
/// class subspaces are mutually orthogonal. The first coordinate of every
/// sample is a fixed prototype offset and the rest are standard normal, so
/// each class sits on an affine slice of its subspace.
pub fn orthogonal_subspaces(seed: u64, dim: usize, classes: usize, per_class: usize) -> ClassPartitionedDataset {
    let mut rng = rng(seed);
    let basis = random_orthonormal(&mut rng, dim);
    let block = dim / classes;
    let mut x = Array2::zeros((dim, classes * per_class));
    let mut labels = Vec::new();
    for c in 0..classes {
        for s in 0..per_class {
            let coeffs: Vec<f64> = (0..block)
                .map(|b| if b == 0 { 2.0 } else { rng.sample::<f64, _>(StandardNormal) })
                .collect();
            let mut col = Array1::zeros(dim);
            for (b, w) in coeffs.iter().enumerate() {
                col = col + &(&basis.column(c * block + b) * *w);
            }
            x.column_mut(c * per_class + s).assign(&col);
            labels.push(c);
        }
    }
    let names = (0..classes).map(|c| format!("c{c}")).collect();
    ClassPartitionedDataset::new(x, labels, names).unwrap()
}

/// Default hyperparameters scaled down for small synthetic problems.
pub fn small_hp(m: usize) -> Hyperparameters {
    Hyperparameters {
        m,
        ..Hyperparameters::default()
    }
}

// ---------------------------------------------------------------------------
// Real corpus

pub fn mnist_manifest_text() -> String {
    format!(
        "layout = \"csv_flat\"\nroot = {:?}\n[csv]\nfile = \"mnist_5k.csv.gz\"\nwidth = 28\nheight = 28\nlabel_column = -1\n",
        data_dir().display().to_string()
    )
}

pub fn mnist_manifest() -> lpdpl::datasets::CorpusManifest {
    lpdpl::datasets::CorpusManifest::from_toml(&mnist_manifest_text(), &data_dir()).unwrap()
}

pub fn load_mnist(features: &FeatureConfig) -> lpdpl::datasets::LoadedCorpus {
    lpdpl::datasets::load_corpus_with(&mnist_manifest(), features).unwrap()
}

/// First `per_class` columns of each class followed by the next
/// `test_per_class`, as (train, test) column lists.
pub fn per_class_split(d: &ClassPartitionedDataset, per_class: usize, test_per_class: usize) -> (Vec<usize>, Vec<usize>) {
    let mut train = Vec::new();
    let mut test = Vec::new();
    for i in 0..d.num_classes() {
        let cols = d.class_columns(i);
        train.extend_from_slice(&cols[..per_class]);
        test.extend_from_slice(&cols[per_class..per_class + test_per_class]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

// ---------------------------------------------------------------------------
// Sub-problem oracles

/// A random small instance of one class's sub-problems.
#[derive(Debug, Clone)]
pub struct Instance {
    pub x: Array2<f64>,
    pub x_bar: Array2<f64>,
    pub h: Array2<f64>,
    pub p: Array2<f64>,
    pub d: Array2<f64>,
    pub w: Array2<f64>,
    pub a: Array2<f64>,
    pub hp: Hyperparameters,
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let (a, b) = (lo.log10(), hi.log10());
    10f64.powf(rng.random_range(a..=b))
}

pub fn random_instance(seed: u64) -> Instance {
    let mut r = rng(seed);
    let n = r.random_range(2..=8);
    let m = r.random_range(1..=6);
    let k = r.random_range(1..=10);
    let kb = r.random_range(1..=10);
    let q = r.random_range(2..=4);
    let class = r.random_range(0..q);
    let hp = Hyperparameters {
        m,
        lambda1: log_uniform(&mut r, 1e-3, 10.0),
        lambda2: log_uniform(&mut r, 1e-3, 10.0),
        lambda3: log_uniform(&mut r, 1e-3, 10.0),
        gamma: log_uniform(&mut r, 1e-4, 1e-1),
        rho: log_uniform(&mut r, 0.1, 10.0),
        ..Hyperparameters::default()
    };
    let mut h = Array2::zeros((q, k));
    h.row_mut(class).fill(1.0);
    let mut d = gaussian(&mut r, n, m);
    for mut c in d.columns_mut() {
        let norm = c.dot(&c).sqrt();
        c.mapv_inplace(|v| v / norm);
    }
    Instance {
        x: gaussian(&mut r, n, k),
        x_bar: gaussian(&mut r, n, kb),
        p: gaussian(&mut r, m, n),
        w: gaussian(&mut r, q, m),
        a: gaussian(&mut r, m, k),
        h,
        d,
        hp,
    }
}

/// ‖X − DA‖² + λ2‖H − WA‖² + λ3‖PX − A‖² as a function of A.
pub fn f_a(i: &Instance, a: &Array2<f64>) -> f64 {
    fro2(&(&i.x - &i.d.dot(a)))
        + i.hp.lambda2 * fro2(&(&i.h - &i.w.dot(a)))
        + i.hp.lambda3 * fro2(&(&i.p.dot(&i.x) - a))
}

/// λ3‖PX − A‖² + λ1‖PX̄‖² + γ‖P‖² as a function of P.
pub fn f_p(i: &Instance, p: &Array2<f64>) -> f64 {
    i.hp.lambda3 * fro2(&(&p.dot(&i.x) - &i.a)) + i.hp.lambda1 * fro2(&p.dot(&i.x_bar)) + i.hp.gamma * fro2(p)
}

/// ‖H − WA‖² + γ‖W‖² as a function of W.
pub fn f_w(i: &Instance, w: &Array2<f64>) -> f64 {
    fro2(&(&i.h - &w.dot(&i.a))) + i.hp.gamma * fro2(w)
}

/// ‖X − DA‖² as a function of D.
pub fn f_d(i: &Instance, d: &Array2<f64>) -> f64 {
    fro2(&(&i.x - &d.dot(&i.a)))
}

/// Central-difference gradient of `f` at `z`.
pub fn fd_gradient(f: impl Fn(&Array2<f64>) -> f64, z: &Array2<f64>, step: f64) -> Array2<f64> {
    let mut g = Array2::zeros(z.raw_dim());
    let mut probe = z.clone();
    for idx in 0..z.len() {
        let (r, c) = (idx / z.ncols(), idx % z.ncols());
        let orig = probe[[r, c]];
        probe[[r, c]] = orig + step;
        let up = f(&probe);
        probe[[r, c]] = orig - step;
        let down = f(&probe);
        probe[[r, c]] = orig;
        g[[r, c]] = (up - down) / (2.0 * step);
    }
    g
}

/// Minimizes a convex quadratic `f` by conjugate gradients. The gradient
/// and Hessian products come from central differences, which are exact up
/// to rounding for quadratics, so the oracle never sees a closed form.
pub fn cg_minimize(f: impl Fn(&Array2<f64>) -> f64, start: &Array2<f64>) -> Array2<f64> {
    let grad = |z: &Array2<f64>| fd_gradient(&f, z, 1e-3);
    let mut z = start.clone();
    let mut fz = f(&z);
    let mut g = grad(&z);
    let mut dir = g.mapv(|v| -v);
    for _ in 0..4 * z.len() + 20 {
        let gg = fro2(&g);
        let dn = fro2(&dir).sqrt();
        if gg == 0.0 || dn == 0.0 {
            break;
        }
        // Hessian-vector product along the unit direction:
        // ∇f(z + u) − ∇f(z) = H·u for a quadratic.
        let unit = &dir / dn;
        let hu = &grad(&(&z + &unit)) - &g;
        let curv: f64 = unit.iter().zip(hu.iter()).map(|(a, b)| a * b).sum();
        if !(curv > 0.0) {
            break;
        }
        let slope: f64 = g.iter().zip(unit.iter()).map(|(a, b)| a * b).sum();
        let candidate = &z + &(&unit * (-slope / curv));
        let fc = f(&candidate);
        // Finite-difference noise takes over once the optimum is reached.
        if !(fc < fz) {
            break;
        }
        z = candidate;
        fz = fc;
        let g_new = grad(&z);
        let beta = fro2(&g_new) / gg;
        dir = &g_new.mapv(|v| -v) + &(&dir * beta);
        g = g_new;
    }
    z
}

fn project_unit_columns(m: &mut Array2<f64>) {
    for mut c in m.columns_mut() {
        let norm = c.dot(&c).sqrt();
        if norm > 1.0 {
            c.mapv_inplace(|v| v / norm);
        }
    }
}

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
fn spectral_norm(s: &Array2<f64>) -> f64 {
    let mut v = Array1::from_elem(s.nrows(), 1.0);
    let mut lambda = 0.0;
    for _ in 0..500 {
        let w = s.dot(&v);
        let norm = w.dot(&w).sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        lambda = norm / v.dot(&v).sqrt();
        v = w / norm;
    }
    lambda
}

/// Projected gradient descent for ‖X − DA‖² over unit-ball columns.
pub fn projected_gradient_d(i: &Instance, start: &Array2<f64>, iters: usize) -> Array2<f64> {
    let aat = i.a.dot(&i.a.t());
    let xat = i.x.dot(&i.a.t());
    let lip = 2.0 * spectral_norm(&aat) * 1.01 + 1e-12;
    let mut d = start.clone();
    project_unit_columns(&mut d);
    for _ in 0..iters {
        let grad = (&d.dot(&aat) - &xat) * 2.0;
        d = &d - &(grad / lip);
        project_unit_columns(&mut d);
    }
    d
}

pub fn relative_gap(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(1e-12)
}

// ---------------------------------------------------------------------------
// HOG oracle

/// Per-pixel voting HOG written independently of the library: each pixel
/// votes into every bin with a triangular kernel of one bin width around
/// the bin center, measured circularly over 0°–180°.
pub fn hog_oracle(img: &[f64], side: usize, cell: usize, bins: usize) -> Vec<f64> {
    let cells = side / cell;
    let at = |r: isize, c: isize| {
        let r = r.clamp(0, side as isize - 1) as usize;
        let c = c.clamp(0, side as isize - 1) as usize;
        img[r * side + c]
    };
    let width = 180.0 / bins as f64;
    let mut hist = vec![0.0; cells * cells * bins];
    for r in 0..cells * cell {
        for c in 0..cells * cell {
            let (ri, ci) = (r as isize, c as isize);
            let gx = at(ri, ci + 1) - at(ri, ci - 1);
            let gy = at(ri + 1, ci) - at(ri - 1, ci);
            let mag = (gx * gx + gy * gy).sqrt();
            if mag == 0.0 {
                continue;
            }
            let theta = gy.atan2(gx).to_degrees().rem_euclid(180.0);
            let base = ((r / cell) * cells + c / cell) * bins;
            for b in 0..bins {
                let center = (b as f64 + 0.5) * width;
                let mut dist = (theta - center).abs();
                dist = dist.min(180.0 - dist);
                let weight = (1.0 - dist / width).max(0.0);
                hist[base + b] += weight * mag;
            }
        }
    }
    let lo = hist.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = hist.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        hist.iter().map(|v| (v - lo) / (hi - lo)).collect()
    } else {
        vec![0.0; hist.len()]
    }
}
