//! Summary table over one or more history files.

use std::path::{Path, PathBuf};

use anyhow::Result;

use crate::history::{self, Row};

pub const COLUMNS: [&str; 16] = [
    "run", "epsilon", "k", "elements", "dof", "h_max", "h_min", "eta", "eff1", "eff2", "c_res_min", "c_res_max",
    "c_trace_min", "c_trace_max", "c_expl_min", "c_expl_max",
];

fn epsilon_from_meta(history: &Path) -> Option<f64> {
    let meta = history.parent()?.join("meta.json");
    let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(meta).ok()?).ok()?;
    value["problem"]["epsilon"].as_f64()
}

fn num(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.4e}"))
}

fn extremes(rows: &[Row], f: impl Fn(&Row) -> f64) -> (f64, f64) {
    rows.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

pub fn summary_line(path: &Path, rows: &[Row]) -> Vec<String> {
    let last = rows.last().expect("parsed histories are nonempty");
    let (rl, rh) = extremes(rows, |r| r.c_obs_residual);
    let (tl, th) = extremes(rows, |r| r.c_obs_trace);
    let (el, eh) = extremes(rows, |r| r.c_obs_explicit);
    vec![
        path.display().to_string(),
        num(epsilon_from_meta(path)),
        last.iter.to_string(),
        last.n_elements.to_string(),
        last.dof.to_string(),
        num(Some(last.h_max)),
        num(Some(last.h_min)),
        num(Some(last.eta)),
        num(last.eff1),
        num(last.eff2),
        num(Some(rl)),
        num(Some(rh)),
        num(Some(tl)),
        num(Some(th)),
        num(Some(el)),
        num(Some(eh)),
    ]
}

/// Reads every history first so that a malformed file produces no partial table.
pub fn render(paths: &[PathBuf]) -> Result<String> {
    let mut table = vec![COLUMNS.iter().map(|s| s.to_string()).collect::<Vec<_>>()];
    for p in paths {
        let rows = history::read(p)?;
        table.push(summary_line(p, &rows));
    }
    let widths: Vec<usize> = (0..COLUMNS.len()).map(|c| table.iter().map(|r| r[c].len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in &table {
        let cells: Vec<String> = row.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    Ok(out)
}
