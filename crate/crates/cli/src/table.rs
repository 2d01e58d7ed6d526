//! CSV output shared by all subcommands.

use std::fs;
use std::path::Path;

use jsspt_metrics::ResultRecord;

use crate::error::CliError;
use crate::experiment::{BenchSummary, CellAggregate, Heatmap};

fn f6(v: f64) -> String {
    format!("{v:.6}")
}

fn opt6(v: Option<f64>) -> String {
    v.map(f6).unwrap_or_default()
}

pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
    w.write_record(header).map_err(|e| CliError::io(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_records(path: &Path, records: &[ResultRecord]) -> Result<(), CliError> {
    let rows: Vec<Vec<String>> = records.iter().map(|r| r.csv_fields()).collect();
    write_table(path, &ResultRecord::HEADER, &rows)
}

pub fn read_records(path: &Path) -> Result<Vec<ResultRecord>, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::io(path, e))?;
    let header = r.headers().map_err(|e| CliError::io(path, e))?.clone();
    if header.iter().ne(ResultRecord::HEADER.iter().copied()) {
        return Err(CliError::Io(format!("{}: not a results table", path.display())));
    }
    r.records()
        .map(|row| {
            let row = row.map_err(|e| CliError::io(path, e))?;
            let fields: Vec<&str> = row.iter().collect();
            Ok(ResultRecord::from_csv_fields(&fields)?)
        })
        .collect()
}

pub const SUMMARY_HEADER: [&str; 9] = [
    "rank",
    "solver",
    "instances",
    "rpi_best_mean",
    "rpi_best_ci95",
    "rpi_global_mean",
    "rpi_global_ci95",
    "win_rate_vs_global",
    "global_best",
];

pub fn summary_rows(summary: &BenchSummary) -> Vec<Vec<String>> {
    summary
        .solvers
        .iter()
        .enumerate()
        .map(|(i, s)| {
            vec![
                (i + 1).to_string(),
                s.solver.clone(),
                s.instances.to_string(),
                f6(s.rpi_best_mean),
                opt6(s.rpi_best_ci),
                f6(s.rpi_global_mean),
                opt6(s.rpi_global_ci),
                f6(s.win_rate_vs_global),
                summary.global_best.clone(),
            ]
        })
        .collect()
}

pub const CELL_HEADER: [&str; 7] = [
    "size",
    "cell",
    "instances",
    "mean_tau",
    "mean_makespan_a",
    "mean_makespan_b",
    "mean_rpi",
];

pub fn cell_rows(cells: &[CellAggregate]) -> Vec<Vec<String>> {
    cells
        .iter()
        .map(|c| {
            vec![
                c.size.clone(),
                c.cell.clone(),
                c.instances.to_string(),
                opt6(c.mean_tau),
                f6(c.mean_makespan_a),
                f6(c.mean_makespan_b),
                f6(c.mean_rpi),
            ]
        })
        .collect()
}

/// Header and rows of the heatmap: one row per tau level, one column per rho.
pub fn heatmap_table(map: &Heatmap) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header = vec!["tau".to_string()];
    header.extend(map.rho.iter().map(|r| format!("rho_{r:.1}")));
    let rows = map
        .tau
        .iter()
        .zip(&map.mean)
        .map(|(t, row)| {
            let mut out = vec![format!("{t:.1}")];
            out.extend(row.iter().map(|v| opt6(*v)));
            out
        })
        .collect();
    (header, rows)
}
