//! Command-line front end: `train`, `eval`, `classify`, `sweep`, `inspect`.

mod plot;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::classifier::Classifier;
use crate::datasets::{self, CorpusManifest, LoadedCorpus};
use crate::dpl::{self, ClassPartitionedDataset, CodeUpdate, Hyperparameters};
use crate::error::{Error, Result};
use crate::eval::{self, csv_field, EvalOptions, FoldPlan, Grid, GridAxis, Scheme};
use crate::features::{FeatureConfig, FeatureKind, PreprocessMode};

#[derive(Debug, Parser)]
#[command(name = "lpdpl", version, about = "Handwritten number classification with labeled projective dictionary pairs")]
pub struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train on a corpus; writes model.bin and trace.csv.
    Train(TrainArgs),
    /// Cross-validate; writes summary.csv, confusion.csv, folds.csv and summary.json.
    Eval(EvalArgs),
    /// Label images with a trained model; prints path,label,score.
    Classify(ClassifyArgs),
    /// Cross-validate over a parameter grid; writes sweep.csv.
    Sweep(SweepArgs),
    /// Describe a model file or a corpus manifest.
    Inspect(InspectArgs),
}

#[derive(Debug, Clone, Args)]
pub struct HyperArgs {
    /// Atoms per class dictionary.
    #[arg(long, default_value_t = 340)]
    pub m: usize,
    #[arg(long, default_value_t = 1e-2)]
    pub lambda1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda2: f64,
    #[arg(long, default_value_t = 1e-1)]
    pub lambda3: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    /// Outer iterations.
    #[arg(long, default_value_t = 10)]
    pub iters: usize,
    /// ADMM iterations per dictionary update.
    #[arg(long, default_value_t = 20)]
    pub admm_iters: usize,
    /// Relative objective decrease below which training stops.
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    /// Use the unweighted WᵀW code-update inverse.
    #[arg(long)]
    pub compat_eq7: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl HyperArgs {
    pub fn hyperparameters(&self) -> Hyperparameters {
        Hyperparameters {
            m: self.m,
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            lambda3: self.lambda3,
            gamma: self.gamma,
            rho: self.rho,
            outer_iters: self.iters,
            admm_iters: self.admm_iters,
            tol: self.tol,
            code_update: if self.compat_eq7 { CodeUpdate::Printed } else { CodeUpdate::Corrected },
            ..Hyperparameters::default()
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FeatureArg {
    Hog,
    Raw,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PreprocessArg {
    Pipeline,
    ResizeBinarize,
    Grayscale,
}

#[derive(Debug, Clone, Args)]
pub struct CorpusArgs {
    /// Corpus manifest (TOML).
    #[arg(long)]
    pub manifest: PathBuf,
    /// Override the manifest's feature kind.
    #[arg(long, value_enum)]
    pub features: Option<FeatureArg>,
    /// Override the manifest's preprocessing.
    #[arg(long, value_enum)]
    pub preprocess: Option<PreprocessArg>,
}

impl CorpusArgs {
    fn feature_config(&self, manifest: &CorpusManifest) -> FeatureConfig {
        let mut cfg = manifest.features;
        match self.features {
            Some(FeatureArg::Hog) => cfg.kind = FeatureKind::Hog,
            Some(FeatureArg::Raw) => cfg.kind = FeatureKind::RawPixels,
            None => {}
        }
        match self.preprocess {
            Some(PreprocessArg::Pipeline) => cfg.preprocess = PreprocessMode::Pipeline,
            Some(PreprocessArg::ResizeBinarize) => cfg.preprocess = PreprocessMode::ResizeBinarize,
            Some(PreprocessArg::Grayscale) => cfg.preprocess = PreprocessMode::Grayscale,
            None => {}
        }
        cfg
    }

    fn load(&self, path: &Path) -> Result<LoadedCorpus> {
        let manifest = CorpusManifest::from_path(path)?;
        let cfg = self.feature_config(&manifest);
        let corpus = datasets::load_corpus_with(&manifest, &cfg)?;
        if !corpus.rejects.is_empty() {
            eprintln!(
                "{}: skipped {} empty glyph(s): {}",
                path.display(),
                corpus.rejects.len(),
                corpus.rejects.join(", ")
            );
        }
        log::info!(
            "{}: {} samples, {} classes, n = {}",
            path.display(),
            corpus.dataset.len(),
            corpus.dataset.num_classes(),
            corpus.dataset.feature_len()
        );
        Ok(corpus)
    }
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub hyper: HyperArgs,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Also write trace.png.
    #[arg(long)]
    pub plot: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SchemeArg {
    Conventional,
    Within,
    Between,
    Holdout,
    Resubstitution,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Scheme {
        match s {
            SchemeArg::Conventional => Scheme::Conventional,
            SchemeArg::Within => Scheme::WithinSubject,
            SchemeArg::Between => Scheme::BetweenSubject,
            SchemeArg::Holdout => Scheme::Holdout,
            SchemeArg::Resubstitution => Scheme::Resubstitution,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct PlanArgs {
    /// Fold scheme; defaults to holdout when --test-manifest is given and
    /// conventional otherwise.
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    /// Folds for the conventional scheme.
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    /// Separate test corpus for the holdout scheme.
    #[arg(long)]
    pub test_manifest: Option<PathBuf>,
    /// Score by reconstruction residual only, without the label term.
    #[arg(long)]
    pub residual_only: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub plan: PlanArgs,
    #[command(flatten)]
    pub hyper: HyperArgs,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub plan: PlanArgs,
    #[command(flatten)]
    pub hyper: HyperArgs,
    /// Grid axis, `param=lo:hi:steps` (log spaced) or `param=v1,v2,...`;
    /// give twice for a two-dimensional grid.
    #[arg(long, required = true)]
    pub grid: Vec<String>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Also write sweep.png.
    #[arg(long)]
    pub plot: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    /// Model file written by `train`.
    #[arg(long)]
    pub model: PathBuf,
    /// Weight of the label term in the class score.
    #[arg(long, default_value_t = 1.0)]
    pub label_weight: f64,
    /// Images to label.
    #[arg(required = true)]
    pub images: Vec<PathBuf>,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct InspectArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

/// Parse arguments, run, and map the outcome to an exit code.
pub fn main() -> std::process::ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::ExitCode::FAILURE
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(Error::InvalidConfig("--workers must be at least 1".into()));
        }
        // Fails only if a pool already exists, as in repeated in-process runs.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    match cli.command {
        Command::Train(a) => cmd_train(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Classify(a) => cmd_classify(&a, &mut std::io::stdout().lock()),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Inspect(a) => cmd_inspect(&a, &mut std::io::stdout().lock()),
    }
}

fn create_dir(out: &Path) -> Result<()> {
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn cmd_train(a: &TrainArgs) -> Result<()> {
    let hp = a.hyper.hyperparameters();
    hp.validate()?;
    let corpus = a.corpus.load(&a.corpus.manifest)?;
    create_dir(&a.out)?;
    let (model, out) = dpl::train(&corpus.dataset, &hp, a.hyper.seed)?;
    let model_path = a.out.join("model.bin");
    datasets::save_model(&model, &model_path)?;
    let mut trace = String::from("iteration,objective\n");
    for (t, v) in out.trace.iter().enumerate() {
        writeln!(trace, "{t},{v}").unwrap();
    }
    write_file(&a.out.join("trace.csv"), trace)?;
    if a.plot {
        let points: Vec<(f64, f64)> = out.trace.iter().enumerate().map(|(t, &v)| (t as f64, v)).collect();
        plot::line_chart(&points, false).save(a.out.join("trace.png")).map_err(plot_err)?;
    }
    eprintln!(
        "trained {} classes, {} iterations, objective {:.6e} -> {}",
        model.num_classes(),
        out.iterations(),
        out.trace.last().unwrap(),
        model_path.display()
    );
    Ok(())
}

fn plot_err(e: image::ImageError) -> Error {
    Error::InvalidConfig(format!("cannot write plot: {e}"))
}

/// Loads the corpus (and test corpus) and builds the fold plan.
fn prepare(corpus: &CorpusArgs, plan: &PlanArgs, seed: u64) -> Result<(ClassPartitionedDataset, FoldPlan)> {
    let scheme: Scheme = match (plan.scheme, &plan.test_manifest) {
        (Some(s), _) => s.into(),
        (None, Some(_)) => Scheme::Holdout,
        (None, None) => Scheme::Conventional,
    };
    let train = corpus.load(&corpus.manifest)?.dataset;
    match (scheme, &plan.test_manifest) {
        (Scheme::Holdout, Some(test_path)) => {
            let test = corpus.load(test_path)?.dataset;
            let joined = train.concat(&test).map_err(|e| match e {
                Error::InvalidConfig(m) => Error::InvalidConfig(format!("{}: {m}", test_path.display())),
                other => other,
            })?;
            let plan = FoldPlan::holdout(train.len(), joined.len());
            Ok((joined, plan))
        }
        (Scheme::Holdout, None) => Err(Error::InvalidConfig("holdout scheme needs --test-manifest".into())),
        (_, Some(_)) => Err(Error::InvalidConfig("--test-manifest is only used by the holdout scheme".into())),
        (s, None) => {
            let plan = eval::make_folds(&train, s, plan.folds, seed)?;
            Ok((train, plan))
        }
    }
}

fn eval_options(plan: &PlanArgs) -> EvalOptions {
    EvalOptions {
        label_weight: if plan.residual_only { 0.0 } else { 1.0 },
    }
}

pub fn cmd_eval(a: &EvalArgs) -> Result<()> {
    let hp = a.hyper.hyperparameters();
    hp.validate()?;
    create_dir(&a.out)?;
    let (dataset, plan) = prepare(&a.corpus, &a.plan, a.hyper.seed)?;
    let report = eval::run_cv_with(&dataset, &plan, &hp, a.hyper.seed, &eval_options(&a.plan))?;
    write_file(&a.out.join("summary.csv"), report.summary_csv()?)?;
    write_file(&a.out.join("confusion.csv"), report.confusion_csv())?;
    write_file(&a.out.join("folds.csv"), report.folds_csv())?;
    let json = serde_json::to_string_pretty(&report.summary_json()?).expect("json values serialize");
    write_file(&a.out.join("summary.json"), json + "\n")?;
    eprintln!(
        "{} folds, pooled accuracy {:.4}, mean fold accuracy {:.4}",
        report.folds().len(),
        report.pooled_accuracy()?,
        report.mean_fold_accuracy()?
    );
    Ok(())
}

pub fn cmd_sweep(a: &SweepArgs) -> Result<()> {
    let hp = a.hyper.hyperparameters();
    hp.validate()?;
    let axes = a.grid.iter().map(|g| g.parse::<GridAxis>()).collect::<Result<Vec<_>>>()?;
    let grid = Grid::new(axes)?;
    create_dir(&a.out)?;
    let (dataset, plan) = prepare(&a.corpus, &a.plan, a.hyper.seed)?;
    let table = eval::sweep(&dataset, &plan, &hp, &grid, a.hyper.seed, &eval_options(&a.plan))?;
    write_file(&a.out.join("sweep.csv"), table.to_csv())?;
    if let Some(m) = table.to_matrix_csv() {
        write_file(&a.out.join("sweep_matrix.csv"), m)?;
    }
    if a.plot {
        let img = if table.params.len() == 1 {
            let pts: Vec<(f64, f64)> = table.rows.iter().map(|r| (r.values[0], r.pooled_accuracy)).collect();
            let log_x = table.params[0] != eval::Param::M;
            plot::line_chart(&pts, log_x)
        } else {
            let cols = grid.axes()[1].values.len();
            let cells: Vec<f64> = table.rows.iter().map(|r| r.pooled_accuracy).collect();
            plot::heatmap(&cells, cols)
        };
        img.save(a.out.join("sweep.png")).map_err(plot_err)?;
    }
    if let Some(best) = table.best() {
        eprintln!("best {:?} -> accuracy {:.4}", best.values, best.pooled_accuracy);
    }
    Ok(())
}

/// Labels every image; lines come out in argument order.
pub fn cmd_classify(a: &ClassifyArgs, out: &mut impl std::io::Write) -> Result<()> {
    let model = datasets::load_model(&a.model)?;
    let classifier = Classifier::new(&model).with_label_weight(a.label_weight);
    let lines: Vec<String> = a
        .images
        .par_iter()
        .map(|path| {
            let img = datasets::decode_image(path)?;
            let x = model.features().extract(&img).map_err(|e| match e {
                Error::EmptyGlyph(_) => Error::EmptyGlyph(Some(path.display().to_string())),
                other => other,
            })?;
            let s = classifier.classify_with_score(ndarray::ArrayView1::from(&x))?;
            Ok(format!(
                "{},{},{}",
                csv_field(&path.display().to_string()),
                csv_field(&model.class_names()[s.class_index]),
                s.total
            ))
        })
        .collect::<Result<_>>()?;
    for l in lines {
        writeln!(out, "{l}").map_err(|e| Error::io("<stdout>", e))?;
    }
    Ok(())
}

pub fn cmd_inspect(a: &InspectArgs, out: &mut impl std::io::Write) -> Result<()> {
    let mut s = String::new();
    if let Some(path) = &a.model {
        let m = datasets::load_model(path)?;
        let hp = m.hyperparameters();
        writeln!(s, "model {}", path.display()).unwrap();
        writeln!(s, "classes {} [{}]", m.num_classes(), m.class_names().join(", ")).unwrap();
        writeln!(s, "feature_len {}", m.feature_len()).unwrap();
        writeln!(s, "atoms {}", m.atoms()).unwrap();
        writeln!(s, "features {:?}", m.features()).unwrap();
        writeln!(
            s,
            "lambda1 {} lambda2 {} lambda3 {} gamma {} rho {} iters {} code_update {:?}",
            hp.lambda1, hp.lambda2, hp.lambda3, hp.gamma, hp.rho, hp.outer_iters, hp.code_update
        )
        .unwrap();
        writeln!(s, "max_atom_norm {}", m.max_atom_norm()).unwrap();
    }
    if let Some(path) = &a.manifest {
        let m = CorpusManifest::from_path(path)?;
        writeln!(s, "manifest {}", path.display()).unwrap();
        writeln!(s, "layout {:?}", m.layout).unwrap();
        writeln!(s, "records {}", m.records.len()).unwrap();
        writeln!(s, "features {:?}", m.features).unwrap();
        for (name, count) in datasets::class_counts(&m) {
            writeln!(s, "class {name} {count}").unwrap();
        }
        let subjects = m.records.iter().filter(|r| r.subject.is_some()).count();
        let reps = m.records.iter().filter(|r| r.repetition.is_some()).count();
        writeln!(s, "with_subject {subjects}").unwrap();
        writeln!(s, "with_repetition {reps}").unwrap();
    }
    out.write_all(s.as_bytes()).map_err(|e| Error::io("<stdout>", e))
}
