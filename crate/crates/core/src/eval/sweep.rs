use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::dpl::{ClassPartitionedDataset, Hyperparameters};
use crate::error::{Error, Result};

use super::{run_cv_with, EvalOptions, FoldPlan};

/// A hyperparameter that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    Lambda1,
    Lambda2,
    Lambda3,
    Gamma,
    Rho,
    M,
}

impl Param {
    pub fn as_str(&self) -> &'static str {
        match self {
            Param::Lambda1 => "lambda1",
            Param::Lambda2 => "lambda2",
            Param::Lambda3 => "lambda3",
            Param::Gamma => "gamma",
            Param::Rho => "rho",
            Param::M => "m",
        }
    }

    /// Copy of `hp` with this parameter set to `value`; `m` is rounded.
    pub fn apply(&self, hp: &Hyperparameters, value: f64) -> Hyperparameters {
        let mut out = *hp;
        match self {
            Param::Lambda1 => out.lambda1 = value,
            Param::Lambda2 => out.lambda2 = value,
            Param::Lambda3 => out.lambda3 = value,
            Param::Gamma => out.gamma = value,
            Param::Rho => out.rho = value,
            Param::M => out.m = value.round().max(0.0) as usize,
        }
        out
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lambda1" => Ok(Param::Lambda1),
            "lambda2" => Ok(Param::Lambda2),
            "lambda3" => Ok(Param::Lambda3),
            "gamma" => Ok(Param::Gamma),
            "rho" => Ok(Param::Rho),
            "m" => Ok(Param::M),
            other => Err(Error::InvalidConfig(format!("unknown sweep parameter {other:?}"))),
        }
    }
}

/// `steps` log-spaced values from `lo` to `hi`, endpoints exact.
pub fn logspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            let mut v: Vec<f64> = (0..steps)
                .map(|i| 10f64.powf(a + (b - a) * i as f64 / (steps - 1) as f64))
                .collect();
            v[0] = lo;
            v[steps - 1] = hi;
            v
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridAxis {
    pub param: Param,
    pub values: Vec<f64>,
}

impl FromStr for GridAxis {
    type Err = Error;

    /// `param=lo:hi:steps` (log spaced) or `param=v1,v2,...`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("bad grid spec {s:?}, expected param=lo:hi:steps or param=v1,v2"));
        let (name, spec) = s.split_once('=').ok_or_else(bad)?;
        let param: Param = name.trim().parse()?;
        let values = if spec.contains(':') {
            let parts: Vec<&str> = spec.split(':').collect();
            if parts.len() != 3 {
                return Err(bad());
            }
            let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
            let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
            let steps: usize = parts[2].trim().parse().map_err(|_| bad())?;
            if !(lo > 0.0 && hi > 0.0) || steps == 0 {
                return Err(Error::InvalidConfig(format!(
                    "log grid {s:?} needs positive bounds and at least one step"
                )));
            }
            logspace(lo, hi, steps)
        } else {
            spec.split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?
        };
        if values.is_empty() {
            return Err(bad());
        }
        Ok(GridAxis { param, values })
    }
}

/// One or two axes; points are visited with the first axis outermost.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    axes: Vec<GridAxis>,
}

impl Grid {
    pub fn new(axes: Vec<GridAxis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::InvalidConfig(format!(
                "a sweep grid has one or two axes, got {}",
                axes.len()
            )));
        }
        if axes.len() == 2 && axes[0].param == axes[1].param {
            return Err(Error::InvalidConfig(format!("parameter {} swept twice", axes[0].param)));
        }
        if axes.iter().any(|a| a.values.is_empty()) {
            return Err(Error::InvalidConfig("grid axis without values".into()));
        }
        Ok(Grid { axes })
    }

    pub fn axes(&self) -> &[GridAxis] {
        &self.axes
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        match self.axes.as_slice() {
            [a] => a.values.iter().map(|&v| vec![v]).collect(),
            [a, b] => a
                .values
                .iter()
                .flat_map(|&u| b.values.iter().map(move |&v| vec![u, v]))
                .collect(),
            _ => unreachable!("axis count checked in Grid::new"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Parameter values in axis order.
    pub values: Vec<f64>,
    pub pooled_accuracy: f64,
    pub mean_fold_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub params: Vec<Param>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// One row per grid point.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for p in &self.params {
            write!(s, "{p},").unwrap();
        }
        s.push_str("pooled_accuracy,mean_fold_accuracy\n");
        for r in &self.rows {
            for v in &r.values {
                write!(s, "{v},").unwrap();
            }
            writeln!(s, "{},{}", r.pooled_accuracy, r.mean_fold_accuracy).unwrap();
        }
        s
    }

    /// For two-axis sweeps: pooled accuracy with first-axis values as rows
    /// and second-axis values as columns.
    pub fn to_matrix_csv(&self) -> Option<String> {
        if self.params.len() != 2 {
            return None;
        }
        let mut cols: Vec<f64> = Vec::new();
        let mut rows: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !rows.contains(&r.values[0]) {
                rows.push(r.values[0]);
            }
            if !cols.contains(&r.values[1]) {
                cols.push(r.values[1]);
            }
        }
        let mut s = format!("{}\\{}", self.params[0], self.params[1]);
        for c in &cols {
            write!(s, ",{c}").unwrap();
        }
        s.push('\n');
        for rv in &rows {
            write!(s, "{rv}").unwrap();
            for cv in &cols {
                let cell = self
                    .rows
                    .iter()
                    .find(|r| r.values[0] == *rv && r.values[1] == *cv)
                    .map(|r| r.pooled_accuracy.to_string())
                    .unwrap_or_default();
                write!(s, ",{cell}").unwrap();
            }
            s.push('\n');
        }
        Some(s)
    }

    /// Row with the highest pooled accuracy, first on ties.
    pub fn best(&self) -> Option<&SweepRow> {
        self.rows.iter().fold(None, |best: Option<&SweepRow>, r| match best {
            Some(b) if b.pooled_accuracy >= r.pooled_accuracy => Some(b),
            _ => Some(r),
        })
    }
}

/// Run `plan` at every grid point, the other parameters fixed at `hp`.
pub fn sweep(
    dataset: &ClassPartitionedDataset,
    plan: &FoldPlan,
    hp: &Hyperparameters,
    grid: &Grid,
    seed: u64,
    opts: &EvalOptions,
) -> Result<SweepTable> {
    let params: Vec<Param> = grid.axes().iter().map(|a| a.param).collect();
    let mut rows = Vec::new();
    for point in grid.points() {
        let mut cfg = *hp;
        for (p, &v) in params.iter().zip(&point) {
            cfg = p.apply(&cfg, v);
        }
        let report = run_cv_with(dataset, plan, &cfg, seed, opts)?;
        let row = SweepRow {
            values: point,
            pooled_accuracy: report.pooled_accuracy()?,
            mean_fold_accuracy: report.mean_fold_accuracy()?,
        };
        log::info!("sweep {:?}: accuracy {:.4}", row.values, row.pooled_accuracy);
        rows.push(row);
    }
    Ok(SweepTable { params, rows })
}

/// Accuracy as a function of the number of atoms.
pub fn dict_size_study(
    dataset: &ClassPartitionedDataset,
    plan: &FoldPlan,
    m_values: &[usize],
    hp: &Hyperparameters,
    seed: u64,
) -> Result<SweepTable> {
    let axis = GridAxis {
        param: Param::M,
        values: m_values.iter().map(|&m| m as f64).collect(),
    };
    sweep(dataset, plan, hp, &Grid::new(vec![axis])?, seed, &EvalOptions::default())
}
