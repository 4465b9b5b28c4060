//! Seed-averaged cross-validation and the report file schema shared with
//! external harnesses.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::folds::{complement, protocol_folds, Protocol};
use super::metrics::{binary_metrics, regression_metrics};
use crate::error::{Error, Result};
use crate::featureset::{write_atomic, Dataset};
use crate::ml::{FittedModel, ModelKind, ModelSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Classify,
    Regress,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Classify => "classify",
            Task::Regress => "regress",
        }
    }

    pub fn of(kind: ModelKind) -> Task {
        if kind.is_regression() {
            Task::Regress
        } else {
            Task::Classify
        }
    }
}

impl std::str::FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classify" => Ok(Task::Classify),
            "regress" => Ok(Task::Regress),
            _ => Err(Error::InvalidArgument(format!("unknown task {s:?}; expected classify or regress"))),
        }
    }
}

pub const METRIC_NAMES: [&str; 7] = ["accuracy", "precision", "recall", "specificity", "f1", "rmse", "mae"];

/// Metrics of one run in `METRIC_NAMES` order; the fields that do not
/// apply to the task, or are undefined, are `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricValues(pub [Option<f64>; 7]);

impl MetricValues {
    pub fn get(&self, name: &str) -> Option<f64> {
        METRIC_NAMES.iter().position(|m| *m == name).and_then(|i| self.0[i])
    }

    pub fn accuracy(&self) -> Option<f64> {
        self.0[0]
    }

    pub fn rmse(&self) -> Option<f64> {
        self.0[5]
    }

    /// Mean over the runs that define each metric.
    pub fn mean(runs: &[MetricValues]) -> MetricValues {
        MetricValues(std::array::from_fn(|i| {
            let present: Vec<f64> = runs.iter().filter_map(|r| r.0[i]).collect();
            crate::util::mean(&present)
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub seed: u64,
    pub metrics: MetricValues,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldPrediction {
    pub seed: u64,
    pub fold: usize,
    pub id: String,
    pub truth: f64,
    pub prediction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub protocol: String,
    pub model: String,
    pub task: Task,
    pub runs: Vec<RunResult>,
    pub predictions: Vec<FoldPrediction>,
}

fn pooled_metrics(task: Task, truth: &[f64], pred: &[f64]) -> Result<MetricValues> {
    let mut m = MetricValues::default();
    match task {
        Task::Classify => {
            let t: Vec<u8> = truth.iter().map(|&v| v as u8).collect();
            let p: Vec<u8> = pred.iter().map(|&v| v as u8).collect();
            let b = binary_metrics(&t, &p)?;
            m.0[..5].copy_from_slice(&[Some(b.accuracy), b.precision, b.recall, b.specificity, b.f1]);
        }
        Task::Regress => {
            let r = regression_metrics(truth, pred)?;
            m.0[5] = Some(r.rmse);
            m.0[6] = Some(r.mae);
        }
    }
    Ok(m)
}

/// Run the protocol once per seed. Every fold refits imputation,
/// selection, scaling and the model on its training part only; metrics
/// are computed on the pooled out-of-fold predictions of each run.
pub fn cross_validate(data: &Dataset, spec: &ModelSpec, protocol: Protocol, seeds: &[u64]) -> Result<CvReport> {
    if seeds.is_empty() {
        return Err(Error::InvalidArgument("at least one seed is required".into()));
    }
    let task = Task::of(spec.kind);
    let truth: Vec<f64> = match task {
        Task::Classify => data.binary_labels()?.iter().map(|&v| v as f64).collect(),
        Task::Regress => data.mmse_targets()?,
    };
    let labels = data.binary_labels().ok();
    let n = data.len();
    let mut runs = Vec::with_capacity(seeds.len());
    let mut predictions = Vec::new();
    for &seed in seeds {
        let folds = protocol_folds(protocol, labels.as_deref(), n, seed)?;
        let fold_preds: Vec<Vec<(usize, f64)>> = folds
            .par_iter()
            .map(|test| {
                let train = complement(test, n);
                let model = FittedModel::fit(data, &train, spec, seed)?;
                Ok(test.iter().map(|&i| (i, model.predict_row(&data.rows[i]))).collect())
            })
            .collect::<Result<_>>()?;
        let mut pred = vec![f64::NAN; n];
        for (fold, fp) in fold_preds.iter().enumerate() {
            for &(i, p) in fp {
                pred[i] = p;
                predictions.push(FoldPrediction {
                    seed,
                    fold,
                    id: data.ids[i].clone(),
                    truth: truth[i],
                    prediction: p,
                });
            }
        }
        runs.push(RunResult {
            seed,
            metrics: pooled_metrics(task, &truth, &pred)?,
        });
    }
    Ok(CvReport {
        protocol: protocol.to_string(),
        model: spec.describe(),
        task,
        runs,
        predictions,
    })
}

const REPORT_FIXED: [&str; 5] = ["protocol", "model", "task", "run", "seed"];
const PREDICTION_HEADER: [&str; 5] = ["seed", "fold", "id", "truth", "prediction"];
pub const MEAN_RUN: &str = "mean";

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

fn parse_opt(s: &str, what: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse::<f64>()
        .map(Some)
        .map_err(|_| Error::data(format!("{what}: {s:?} is not a number")))
}

impl CvReport {
    pub fn mean(&self) -> MetricValues {
        MetricValues::mean(&self.runs.iter().map(|r| r.metrics).collect::<Vec<_>>())
    }

    pub fn seeds(&self) -> Vec<u64> {
        self.runs.iter().map(|r| r.seed).collect()
    }

    /// One row per run, then a row whose `run` column is `mean`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(REPORT_FIXED.iter().chain(&METRIC_NAMES))?;
        let mut row = |run: String, seed: String, m: &MetricValues| -> Result<()> {
            let mut rec = vec![self.protocol.clone(), self.model.clone(), self.task.as_str().to_string(), run, seed];
            rec.extend(m.0.iter().map(|v| fmt_opt(*v)));
            w.write_record(&rec)?;
            Ok(())
        };
        for (i, r) in self.runs.iter().enumerate() {
            row(i.to_string(), r.seed.to_string(), &r.metrics)?;
        }
        row(MEAN_RUN.to_string(), String::new(), &self.mean())?;
        w.flush()?;
        Ok(())
    }

    /// Parse a report written by [`CvReport::write_csv`] or by any tool
    /// following the same schema. Predictions are not part of this file.
    pub fn read_csv<R: Read>(input: R) -> Result<CvReport> {
        let mut r = csv::Reader::from_reader(input);
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        let expected: Vec<&str> = REPORT_FIXED.iter().chain(&METRIC_NAMES).copied().collect();
        if header != expected {
            return Err(Error::data(format!(
                "report header {header:?} does not match the expected {expected:?}"
            )));
        }
        let mut report: Option<CvReport> = None;
        let mut mean_row: Option<MetricValues> = None;
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            let ctx = format!("report row {}", line + 1);
            let mut m = MetricValues::default();
            for (i, name) in METRIC_NAMES.iter().enumerate() {
                m.0[i] = parse_opt(&rec[5 + i], &format!("{ctx} {name}"))?;
            }
            let task: Task = rec[2].parse()?;
            let rep = report.get_or_insert_with(|| CvReport {
                protocol: rec[0].to_string(),
                model: rec[1].to_string(),
                task,
                runs: Vec::new(),
                predictions: Vec::new(),
            });
            if rep.protocol != rec[0] || rep.model != rec[1] || rep.task != task {
                return Err(Error::data(format!("{ctx}: mixes protocols, models or tasks")));
            }
            if &rec[3] == MEAN_RUN {
                mean_row = Some(m);
                continue;
            }
            let seed = rec[4]
                .parse::<u64>()
                .map_err(|_| Error::data(format!("{ctx}: seed {:?} is not an integer", &rec[4])))?;
            rep.runs.push(RunResult { seed, metrics: m });
        }
        let report = report.ok_or_else(|| Error::data("report has no rows"))?;
        if report.runs.is_empty() {
            return Err(Error::data("report has no per-run rows"));
        }
        if let Some(stated) = mean_row {
            let computed = report.mean();
            for (i, name) in METRIC_NAMES.iter().enumerate() {
                let agree = match (stated.0[i], computed.0[i]) {
                    (Some(a), Some(b)) => (a - b).abs() <= 1e-9 * a.abs().max(1.0),
                    (None, None) => true,
                    _ => false,
                };
                if !agree {
                    return Err(Error::data(format!("report mean row disagrees with the runs on {name}")));
                }
            }
        }
        Ok(report)
    }

    pub fn write_predictions_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(PREDICTION_HEADER)?;
        for p in &self.predictions {
            w.write_record([
                p.seed.to_string(),
                p.fold.to_string(),
                p.id.clone(),
                p.truth.to_string(),
                p.prediction.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_predictions_csv<R: Read>(input: R) -> Result<Vec<FoldPrediction>> {
        let mut r = csv::Reader::from_reader(input);
        if r.headers()?.iter().ne(PREDICTION_HEADER) {
            return Err(Error::data("prediction file header must be seed,fold,id,truth,prediction"));
        }
        let mut out = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let num = |i: usize| -> Result<f64> {
                rec[i].parse().map_err(|_| Error::data(format!("bad number {:?} in predictions", &rec[i])))
            };
            out.push(FoldPrediction {
                seed: num(0)? as u64,
                fold: num(1)? as usize,
                id: rec[2].to_string(),
                truth: num(3)?,
                prediction: num(4)?,
            });
        }
        Ok(out)
    }

    /// Write `<stem>.csv` and `<stem>.predictions.csv` next to each other.
    pub fn save(&self, report: &Path, predictions: &Path) -> Result<()> {
        write_atomic(report, |f| self.write_csv(f))?;
        write_atomic(predictions, |f| self.write_predictions_csv(f))
    }
}

impl fmt::Display for CvReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} | {} | {} | seeds {:?}", self.model, self.protocol, self.task.as_str(), self.seeds())?;
        let mean = self.mean();
        for (name, v) in METRIC_NAMES.iter().zip(mean.0) {
            if let Some(v) = v {
                writeln!(f, "  {name:<12} {v:.4}")?;
            }
        }
        Ok(())
    }
}

pub const GRID_K: [Option<usize>; 6] = [Some(10), Some(25), Some(35), Some(50), Some(80), None];
pub const GRID_ALPHA: [f64; 4] = [1.0, 10.0, 12.0, 100.0];

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub entries: Vec<(ModelSpec, CvReport)>,
    pub best: usize,
}

impl GridResult {
    pub fn best_spec(&self) -> &ModelSpec {
        &self.entries[self.best].0
    }

    pub fn best_report(&self) -> &CvReport {
        &self.entries[self.best].1
    }
}

/// Candidate specs: every `k` (dropping those above the feature count)
/// crossed with every alpha for ridge.
pub fn grid_specs(base: &ModelSpec, n_features: usize) -> Vec<ModelSpec> {
    let alphas: Vec<f64> = if base.kind == ModelKind::Ridge {
        GRID_ALPHA.to_vec()
    } else {
        vec![base.alpha]
    };
    let mut out = Vec::new();
    for k in GRID_K.iter().filter(|k| k.map_or(true, |k| k <= n_features)) {
        for &alpha in &alphas {
            out.push(ModelSpec {
                k_features: *k,
                alpha,
                ..base.clone()
            });
        }
    }
    out
}

/// Cross-validate every grid point. The best entry has the highest mean
/// accuracy (classification) or lowest mean RMSE (regression); earlier
/// grid points win ties.
pub fn grid_search(data: &Dataset, base: &ModelSpec, protocol: Protocol, seeds: &[u64]) -> Result<GridResult> {
    let specs = grid_specs(base, data.n_features());
    let mut entries = Vec::with_capacity(specs.len());
    for spec in specs {
        let report = cross_validate(data, &spec, protocol, seeds)?;
        entries.push((spec, report));
    }
    let score = |r: &CvReport| match r.task {
        Task::Classify => r.mean().accuracy().unwrap_or(f64::NEG_INFINITY),
        Task::Regress => -r.mean().rmse().unwrap_or(f64::INFINITY),
    };
    let mut best = 0;
    for (i, (_, r)) in entries.iter().enumerate() {
        if score(r) > score(&entries[best].1) {
            best = i;
        }
    }
    Ok(GridResult { entries, best })
}
