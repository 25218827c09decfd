//! Flat-file formats: graph, support, basis and plan JSON; signal and
//! sample-value CSV; the per-vertex schedule table.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::{QualificationReport, SamplingPlan};
use crate::spectral::JointSignal;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let f = File::open(path)?;
    Ok(serde_json::from_reader(BufReader::new(f))?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Plan file: the samples plus derived projections and the qualification
/// verdict. Projections are recomputed and checked on load.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanFile {
    #[serde(rename = "T")]
    pub t: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub samples: Vec<(usize, usize)>,
    pub s_t: Vec<usize>,
    pub s_g: Vec<usize>,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "K_T")]
    pub k_t: usize,
    #[serde(rename = "K_G")]
    pub k_g: usize,
    pub qualified: bool,
    pub critical: bool,
}

impl PlanFile {
    pub fn new(plan: &SamplingPlan, report: &QualificationReport) -> Self {
        Self {
            t: plan.times(),
            n: plan.vertices(),
            samples: plan.samples().to_vec(),
            s_t: plan.proj_t(),
            s_g: plan.proj_g(),
            k: report.k,
            k_t: report.k_t,
            k_g: report.k_g,
            qualified: report.qualified,
            critical: report.critical,
        }
    }

    pub fn plan(&self) -> Result<SamplingPlan> {
        let plan = SamplingPlan::new(self.t, self.n, self.samples.iter().copied())?;
        if plan.len() != self.samples.len() {
            return Err(Error::Malformed("plan lists a sample twice".into()));
        }
        if plan.proj_t() != self.s_t || plan.proj_g() != self.s_g {
            return Err(Error::Malformed(
                "plan projections disagree with its samples".into(),
            ));
        }
        Ok(plan)
    }
}

/// Basis override: row-major nested arrays, either full (`T x T`,
/// `N x N`) or already restricted to the support (`T x K_T`, `N x K_G`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisFile {
    pub u_t: Vec<Vec<f64>>,
    pub u_g: Vec<Vec<f64>>,
}

impl BasisFile {
    pub fn from_matrices(u_t: &DMatrix<f64>, u_g: &DMatrix<f64>) -> Self {
        Self {
            u_t: rows(u_t),
            u_g: rows(u_g),
        }
    }

    pub fn time(&self) -> Result<DMatrix<f64>> {
        matrix(&self.u_t, "u_t")
    }

    pub fn graph(&self) -> Result<DMatrix<f64>> {
        matrix(&self.u_g, "u_g")
    }
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn matrix(rows: &[Vec<f64>], name: &str) -> Result<DMatrix<f64>> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Malformed(format!("{name} is not a non-empty rectangular matrix")));
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Malformed(format!("cannot parse {what} {s:?}")))
}

fn parse_usize(s: &str, what: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::Malformed(format!("cannot parse {what} {s:?}")))
}

/// Signal CSV: `N` rows of `T` values, no header.
pub fn read_signal(path: &Path) -> Result<JointSignal> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_path(path)?;
    let mut data: Vec<Vec<f64>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        data.push(rec.iter().map(|s| parse_f64(s, "signal value")).collect::<Result<_>>()?);
    }
    let m = matrix(&data, "signal")?;
    JointSignal::new(m)
}

pub fn write_signal(path: &Path, x: &JointSignal) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for row in x.matrix().row_iter() {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Sample values CSV with header `t,v,value`, one row per sample in plan
/// order.
pub fn write_samples(path: &Path, plan: &SamplingPlan, values: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "v", "value"])?;
    for (&(t, v), x) in plan.samples().iter().zip(values) {
        w.write_record([t.to_string(), v.to_string(), x.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_samples(path: &Path) -> Result<Vec<(usize, usize, f64)>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() != 3 {
            return Err(Error::Malformed(format!("expected 3 fields, got {}", rec.len())));
        }
        out.push((
            parse_usize(&rec[0], "time index")?,
            parse_usize(&rec[1], "vertex index")?,
            parse_f64(&rec[2], "sample value")?,
        ));
    }
    Ok(out)
}

/// Matches sample rows against the plan and returns the values in plan
/// order.
pub fn values_for_plan(rows: &[(usize, usize, f64)], plan: &SamplingPlan) -> Result<Vec<f64>> {
    if rows.len() != plan.len() {
        return Err(Error::Malformed(format!(
            "{} sample rows for a plan of {} samples",
            rows.len(),
            plan.len()
        )));
    }
    rows.iter()
        .zip(plan.samples())
        .map(|(&(t, v, x), &p)| {
            if (t, v) == p {
                Ok(x)
            } else {
                Err(Error::Malformed(format!(
                    "sample ({t}, {v}) where the plan expects {p:?}"
                )))
            }
        })
        .collect()
}

/// Per-vertex schedule: `vertex,count,time_slots` with slots `;`-separated.
pub fn write_schedule(path: &Path, plan: &SamplingPlan) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["vertex", "count", "time_slots"])?;
    for (v, slots) in plan.schedule() {
        let joined: Vec<String> = slots.iter().map(|t| t.to_string()).collect();
        w.write_record([v.to_string(), slots.len().to_string(), joined.join(";")])?;
    }
    w.flush()?;
    Ok(())
}
