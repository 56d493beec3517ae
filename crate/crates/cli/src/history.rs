//! The per-iteration history CSV.

use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use supg_recovery::adapt::IterationRecord;

pub const VERSION_LINE: &str = "# supg-adapt history v1";

pub const HEADER: [&str; 17] = [
    "iter",
    "n_elements",
    "dof",
    "h_max",
    "h_min",
    "eta",
    "phi",
    "osc",
    "jump_estimator",
    "err_supg",
    "err_eps_triple",
    "eff1",
    "eff2",
    "flags",
    "c_obs_residual",
    "c_obs_trace",
    "c_obs_explicit",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub iter: usize,
    pub n_elements: usize,
    pub dof: usize,
    pub h_max: f64,
    pub h_min: f64,
    pub eta: f64,
    pub phi: f64,
    pub osc: f64,
    pub jump_estimator: f64,
    pub err_supg: Option<f64>,
    pub err_eps_triple: Option<f64>,
    pub eff1: Option<f64>,
    pub eff2: Option<f64>,
    pub flags: String,
    pub c_obs_residual: f64,
    pub c_obs_trace: f64,
    pub c_obs_explicit: f64,
}

impl From<&IterationRecord> for Row {
    fn from(r: &IterationRecord) -> Self {
        Row {
            iter: r.iteration,
            n_elements: r.n_elements,
            dof: r.dof,
            h_max: r.h_max,
            h_min: r.h_min,
            eta: r.eta,
            phi: r.phi,
            osc: r.osc,
            jump_estimator: r.jump_estimator,
            err_supg: r.errors.map(|e| e.supg),
            err_eps_triple: r.errors.map(|e| e.eps_triple),
            eff1: r.eff1(),
            eff2: r.eff2(),
            flags: r.flags(),
            c_obs_residual: r.constants.residual,
            c_obs_trace: r.constants.trace,
            c_obs_explicit: r.constants.explicit,
        }
    }
}

pub fn to_string(records: &[IterationRecord]) -> Result<String> {
    let mut buf = Vec::new();
    writeln!(buf, "{VERSION_LINE}")?;
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        if records.is_empty() {
            w.write_record(HEADER)?;
        }
        for r in records {
            w.serialize(Row::from(r))?;
        }
        w.flush()?;
    }
    Ok(String::from_utf8(buf)?)
}

pub fn parse(text: &str) -> Result<Vec<Row>> {
    let Some((first, rest)) = text.split_once('\n') else {
        bail!("empty history");
    };
    if first.trim_end() != VERSION_LINE {
        bail!("missing or unsupported version line (expected '{VERSION_LINE}')");
    }
    let mut reader = csv::Reader::from_reader(rest.as_bytes());
    let header: Vec<String> = reader.headers().context("reading header")?.iter().map(str::to_string).collect();
    if header != HEADER {
        bail!("unexpected columns: {}", header.join(","));
    }
    let rows = reader
        .deserialize()
        .enumerate()
        .map(|(i, r)| r.with_context(|| format!("row {}", i + 1)))
        .collect::<Result<Vec<Row>>>()?;
    if rows.is_empty() {
        bail!("history has no iterations");
    }
    Ok(rows)
}

pub fn read(path: &Path) -> Result<Vec<Row>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text).with_context(|| format!("malformed history {}", path.display()))
}
