use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{set_path, ExperimentConfig, SweepGrid};
use crate::error::CliError;
use crate::run::run_experiment;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub cell: usize,
    pub params: Vec<(String, Value)>,
    pub status: Option<String>,
    pub iterations: Option<usize>,
    pub final_dist_to_solution: Option<f64>,
    pub certificate_violations: Option<usize>,
    pub error: Option<String>,
}

fn run_cell(base: &Value, out: &Path, cell: usize, params: Vec<(String, Value)>) -> SweepRow {
    let mut row = SweepRow {
        cell,
        params,
        status: None,
        iterations: None,
        final_dist_to_solution: None,
        certificate_violations: None,
        error: None,
    };
    let mut v = base.clone();
    let dir = out.join(format!("cell_{cell:03}"));
    let result = row
        .params
        .iter()
        .try_for_each(|(p, x)| set_path(&mut v, p, x.clone()))
        .and_then(|_| {
            set_path(
                &mut v,
                "output_dir",
                Value::String(dir.to_string_lossy().into_owned()),
            )
        })
        .and_then(|_| ExperimentConfig::from_value(v))
        .and_then(|cfg| run_experiment(&cfg));
    match result {
        Ok(o) => {
            row.status = serde_json::to_value(o.summary.status)
                .ok()
                .and_then(|s| s.as_str().map(String::from));
            row.iterations = Some(o.summary.diagnostics.iterations);
            row.final_dist_to_solution = o.summary.diagnostics.final_dist_to_solution;
            row.certificate_violations = Some(o.summary.certificate_violations());
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Runs every grid cell concurrently, each in `out/cell_NNN`, and writes
/// `sweep.csv` and `sweep.json` with rows in grid order. Cell failures are
/// recorded in their rows.
pub fn sweep(
    base: &ExperimentConfig,
    grid: &SweepGrid,
    out: &Path,
) -> Result<Vec<SweepRow>, CliError> {
    base.validate()?;
    let base_value = serde_json::to_value(base)?;
    let cells = grid.cells();
    let rows: Vec<SweepRow> = cells
        .into_par_iter()
        .enumerate()
        .map(|(i, params)| run_cell(&base_value, out, i, params))
        .collect();
    fs::create_dir_all(out)?;
    fs::write(out.join("sweep.csv"), sweep_csv(grid, &rows))?;
    fs::write(out.join("sweep.json"), serde_json::to_string_pretty(&rows)?)?;
    Ok(rows)
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(ToString::to_string).unwrap_or_default()
}

fn sweep_csv(grid: &SweepGrid, rows: &[SweepRow]) -> String {
    let mut out = String::from("cell");
    for a in &grid.axes {
        let _ = write!(out, ",{}", a.path);
    }
    out.push_str(",status,iterations,final_dist_to_solution,certificate_violations,error\n");
    for r in rows {
        let _ = write!(out, "{}", r.cell);
        for (_, v) in &r.params {
            let _ = write!(out, ",{}", v.to_string().replace(',', ";"));
        }
        let dist = r
            .final_dist_to_solution
            .map(|d| format!("{d:e}"))
            .unwrap_or_default();
        let err = opt(&r.error).replace([',', '\n'], ";");
        let _ = writeln!(
            out,
            ",{},{},{dist},{},{err}",
            opt(&r.status),
            opt(&r.iterations),
            opt(&r.certificate_violations)
        );
    }
    out
}
