//! CSV and JSON readers/writers for datasets, per-round outcomes and
//! comparison results.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;

use super::compare::CompareReport;
use crate::error::{Error, Result};
use crate::phased::PhasedOutcome;
use crate::regressor::{LabeledExample, StepOutcome};

/// Writes `x_1,…,x_d,y` rows.
pub fn write_dataset<W: Write>(out: W, examples: &[LabeledExample]) -> Result<()> {
    let d = examples.first().map_or(0, |e| e.x.len());
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=d).map(|i| format!("x_{i}")).collect();
    header.push("y".into());
    w.write_record(&header)?;
    for e in examples {
        let mut row: Vec<String> = e.x.iter().map(f64::to_string).collect();
        row.push(e.y.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a dataset written by [`write_dataset`]; the last column is the label.
/// Every example is validated (finite, inside the unit ball, label in [0, 1]).
pub fn read_dataset<R: Read>(input: R) -> Result<Vec<LabeledExample>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    let width = headers.len();
    if width < 2 || headers.get(width - 1) != Some("y") {
        return Err(Error::Format(format!(
            "expected header x_1,…,x_d,y; got {:?}",
            headers.iter().collect::<Vec<_>>()
        )));
    }
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let vals = rec
            .iter()
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::Format(format!("row {}: {e}", line + 1)))?;
        let (x, y) = vals.split_at(width - 1);
        out.push(LabeledExample::new(x.to_vec(), y[0])?);
    }
    Ok(out)
}

pub fn read_dataset_file(path: &Path) -> Result<Vec<LabeledExample>> {
    read_dataset(File::open(path)?)
}

pub fn write_dataset_file(path: &Path, examples: &[LabeledExample]) -> Result<()> {
    write_dataset(BufWriter::new(File::create(path)?), examples)
}

#[derive(Debug, Clone, Serialize)]
struct OutcomeRow {
    t: usize,
    y: f64,
    prediction: f64,
    loss: f64,
    cum_loss: f64,
    n_centers: usize,
    rho_t: usize,
    epsilon_t: f64,
    new_center: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    phase: Option<usize>,
}

fn write_rows<W: Write>(
    out: W,
    stream: &[LabeledExample],
    rows: impl Iterator<Item = (Option<usize>, StepOutcome)>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut cum = 0.0;
    let mut centers = 0;
    for (i, ((phase, o), ex)) in rows.zip(stream).enumerate() {
        cum += o.loss;
        if o.new_center_created {
            centers += 1;
        }
        w.serialize(OutcomeRow {
            t: i + 1,
            y: ex.y,
            prediction: o.prediction,
            loss: o.loss,
            cum_loss: cum,
            n_centers: centers,
            rho_t: o.effective_rank_used,
            epsilon_t: o.radius_used,
            new_center: o.new_center_created,
            phase,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// One row per round of a fixed-metric run.
pub fn write_outcomes<W: Write>(out: W, stream: &[LabeledExample], outcomes: &[StepOutcome]) -> Result<()> {
    check_len(stream.len(), outcomes.len())?;
    write_rows(out, stream, outcomes.iter().map(|o| (None, o.clone())))
}

/// Same as [`write_outcomes`] plus a `phase` column; `n_centers` counts the
/// centers of the current phase only.
pub fn write_phased_outcomes<W: Write>(
    out: W,
    stream: &[LabeledExample],
    outcomes: &[PhasedOutcome],
) -> Result<()> {
    check_len(stream.len(), outcomes.len())?;
    let mut w = csv::Writer::from_writer(out);
    let mut cum = 0.0;
    let mut centers = 0;
    let mut current = 0;
    for (i, (po, ex)) in outcomes.iter().zip(stream).enumerate() {
        let o = &po.outcome;
        if po.phase != current {
            current = po.phase;
            centers = 0;
        }
        cum += o.loss;
        centers += o.new_center_created as usize;
        w.serialize(OutcomeRow {
            t: i + 1,
            y: ex.y,
            prediction: o.prediction,
            loss: o.loss,
            cum_loss: cum,
            n_centers: centers,
            rho_t: o.effective_rank_used,
            epsilon_t: o.radius_used,
            new_center: o.new_center_created,
            phase: Some(po.phase),
        })?;
    }
    w.flush()?;
    Ok(())
}

fn check_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Alignment(format!("{a} examples vs {b} outcomes")));
    }
    Ok(())
}

/// Per-(seed, mode) rows: seed, mode, final_regret, slope, n_centers, final_rho, angle_deg.
pub fn write_compare_csv<W: Write>(out: W, report: &CompareReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["seed", "mode", "final_regret", "slope", "n_centers", "final_rho", "angle_deg"])?;
    for r in &report.records {
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        w.write_record([
            r.seed.to_string(),
            r.mode.name().to_string(),
            r.final_regret.to_string(),
            opt(r.slope),
            r.n_centers.to_string(),
            r.final_rho.to_string(),
            opt(r.principal_angle_deg),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}
