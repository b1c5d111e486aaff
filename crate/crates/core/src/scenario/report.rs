use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ambiguity::SearchReport;
use crate::error::Result;
use crate::geometry::{Lrp, Point2, Pose};

/// First step counted as converged in the aggregate metrics.
pub const CONVERGED_FROM_STEP: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub run: usize,
    /// 1-based.
    pub step: usize,
    pub truth: Pose,
    pub lut: Option<Point2>,
    pub amcl: Option<Pose>,
    pub err_lut: Option<f64>,
    pub err_amcl: Option<f64>,
    pub n_particles: usize,
    /// Some reflector was not detected, or AMCL found no consistent particle.
    pub degraded: bool,
}

/// Mean and population standard deviation over runs at one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub step: usize,
    pub lut_mean: Option<f64>,
    pub lut_std: Option<f64>,
    pub amcl_mean: Option<f64>,
    pub amcl_std: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub runs: usize,
    pub steps: usize,
    pub lut_mean_error: Option<f64>,
    pub amcl_mean_error: Option<f64>,
    /// Means over steps >= `converged_from_step`.
    pub lut_mean_error_converged: Option<f64>,
    pub amcl_mean_error_converged: Option<f64>,
    pub converged_from_step: usize,
    /// First step from which the mean AMCL error stays within
    /// `convergence_threshold`.
    pub amcl_convergence_step: Option<usize>,
    pub convergence_threshold: f64,
    pub lut_entries: Option<usize>,
    pub degraded_steps: usize,
    pub layout: Vec<Lrp>,
    pub radar_height: f64,
    pub search: Option<SearchReport>,
    pub per_step: Vec<StepStats>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub records: Vec<StepRecord>,
    pub summary: Summary,
}

fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    // Shifted by the first value so that identical inputs give exactly 0.
    let n = values.len() as f64;
    let v0 = values[0];
    let m = values.iter().map(|v| v - v0).sum::<f64>() / n;
    let var = values.iter().map(|v| (v - v0 - m).powi(2)).sum::<f64>() / n;
    Some((v0 + m, var.sqrt()))
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = values.collect();
    mean_std(&v).map(|(m, _)| m)
}

/// Per-step statistics for steps 1..=n_steps.
pub fn step_stats(records: &[StepRecord], n_steps: usize) -> Vec<StepStats> {
    (1..=n_steps)
        .map(|step| {
            let at: Vec<&StepRecord> = records.iter().filter(|r| r.step == step).collect();
            let lut: Vec<f64> = at.iter().filter_map(|r| r.err_lut).collect();
            let amcl: Vec<f64> = at.iter().filter_map(|r| r.err_amcl).collect();
            let (lm, ls) = mean_std(&lut).unzip();
            let (am, as_) = mean_std(&amcl).unzip();
            StepStats {
                step,
                lut_mean: lm,
                lut_std: ls,
                amcl_mean: am,
                amcl_std: as_,
            }
        })
        .collect()
}

pub struct SummaryInputs<'a> {
    pub runs: usize,
    pub steps: usize,
    pub threshold: f64,
    pub lut_entries: Option<usize>,
    pub layout: &'a [Lrp],
    pub radar_height: f64,
    pub search: Option<SearchReport>,
}

pub fn summarize(records: &[StepRecord], inp: SummaryInputs<'_>) -> Summary {
    let per_step = step_stats(records, inp.steps);
    let convergence = {
        let means: Vec<Option<f64>> = per_step.iter().map(|s| s.amcl_mean).collect();
        if means.iter().any(Option::is_none) || means.is_empty() {
            None
        } else {
            let mut first = None;
            for (i, m) in means.iter().enumerate().rev() {
                if m.unwrap() <= inp.threshold {
                    first = Some(i + 1);
                } else {
                    break;
                }
            }
            first
        }
    };
    let converged = |r: &&StepRecord| r.step >= CONVERGED_FROM_STEP;
    Summary {
        runs: inp.runs,
        steps: inp.steps,
        lut_mean_error: mean(records.iter().filter_map(|r| r.err_lut)),
        amcl_mean_error: mean(records.iter().filter_map(|r| r.err_amcl)),
        lut_mean_error_converged: mean(records.iter().filter(converged).filter_map(|r| r.err_lut)),
        amcl_mean_error_converged: mean(records.iter().filter(converged).filter_map(|r| r.err_amcl)),
        converged_from_step: CONVERGED_FROM_STEP,
        amcl_convergence_step: convergence,
        convergence_threshold: inp.threshold,
        lut_entries: inp.lut_entries,
        degraded_steps: records.iter().filter(|r| r.degraded).count(),
        layout: inp.layout.to_vec(),
        radar_height: inp.radar_height,
        search: inp.search,
        per_step,
    }
}

#[derive(Serialize)]
struct CsvRow {
    run: usize,
    step: usize,
    true_x: f64,
    true_y: f64,
    est_x_lut: Option<f64>,
    est_y_lut: Option<f64>,
    err_lut: Option<f64>,
    est_x_amcl: Option<f64>,
    est_y_amcl: Option<f64>,
    err_amcl: Option<f64>,
    n_particles: usize,
    degraded: bool,
}

/// Header of `steps.csv`.
pub const CSV_HEADER: &str =
    "run,step,true_x,true_y,est_x_lut,est_y_lut,err_lut,est_x_amcl,est_y_amcl,err_amcl,n_particles,degraded";

/// Writes `steps.csv` and `summary.json` into `dir`, creating it if needed.
pub fn emit_report(report: &Report, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(dir.join("steps.csv"))?;
    w.write_record(CSV_HEADER.split(','))?;
    for r in &report.records {
        w.serialize(CsvRow {
            run: r.run,
            step: r.step,
            true_x: r.truth.x,
            true_y: r.truth.y,
            est_x_lut: r.lut.map(|p| p.x),
            est_y_lut: r.lut.map(|p| p.y),
            err_lut: r.err_lut,
            est_x_amcl: r.amcl.map(|p| p.x),
            est_y_amcl: r.amcl.map(|p| p.y),
            err_amcl: r.err_amcl,
            n_particles: r.n_particles,
            degraded: r.degraded,
        })?;
    }
    w.flush()?;
    let text = serde_json::to_string_pretty(&report.summary)?;
    std::fs::write(dir.join("summary.json"), text + "\n")?;
    Ok(())
}
