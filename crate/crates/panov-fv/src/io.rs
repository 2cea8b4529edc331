//! Artifact formats: solution CSV, run report JSON, convergence tables.

use std::fmt::Write as _;
use std::fs::File;
use std::path::Path;

use panov_fv_core::experiments::ConvergenceTable;
use panov_fv_core::Field;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::config(path.display().to_string(), format!("{other:?}")),
    }
}

/// Writes `x[,y],u[,beta]`, one row per cell in storage order.
pub fn write_solution_csv(path: &Path, u: &Field, beta: Option<&Field>) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    let grid = u.grid();
    let mut header = vec!["x"];
    if grid.dim() == 2 {
        header.push("y");
    }
    header.push("u");
    if beta.is_some() {
        header.push("beta");
    }
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for (k, &v) in u.values().iter().enumerate() {
        let p = grid.center_of(k);
        let mut row = vec![fmt_f64(p.x)];
        if grid.dim() == 2 {
            row.push(fmt_f64(p.y));
        }
        row.push(fmt_f64(v));
        if let Some(b) = beta {
            row.push(fmt_f64(b.values()[k]));
        }
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

#[derive(Debug, Deserialize)]
struct StepRow {
    breakpoint: f64,
    value: f64,
}

/// Reads a `breakpoint,value` table (with that header).
pub fn read_step_table(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let mut breakpoints = Vec::new();
    let mut values = Vec::new();
    for row in r.deserialize::<StepRow>() {
        let row = row.map_err(|e| CliError::config(path.display().to_string(), e.to_string()))?;
        breakpoints.push(row.breakpoint);
        values.push(row.value);
    }
    Ok((breakpoints, values))
}

/// Summary of a single run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    #[serde(rename = "M")]
    pub mesh: usize,
    pub dx: f64,
    pub dt: f64,
    pub lambda: f64,
    pub t_end: f64,
    pub l1_error: Option<f64>,
    pub tv_u: f64,
    pub tv_beta: f64,
    pub entropy_violation: f64,
    pub conservation_defect: f64,
    pub problem: String,
    pub dim: usize,
    pub steps: usize,
    /// Whether the last step was shortened to land on `t_end`.
    pub clamped: bool,
    pub entropy_steps_checked: usize,
}

impl Report {
    /// `t_end l1_error tv_u tv_beta entropy_violation`.
    pub fn summary_line(&self) -> String {
        let e = self
            .l1_error
            .map_or_else(|| "NA".to_string(), |e| format!("{e:e}"));
        format!(
            "{} {} {} {} {:e}",
            self.t_end, e, self.tv_u, self.tv_beta, self.entropy_violation
        )
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

/// Columns `M,e,tv_u,tv_beta,eoc`; `eoc` on row `k` compares it with row `k − 1`.
pub fn write_table_csv(path: &Path, table: &ConvergenceTable) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["M", "e", "tv_u", "tv_beta", "eoc"])
        .map_err(|e| csv_err(path, e))?;
    for (k, r) in table.rows.iter().enumerate() {
        let e = r.l1_error.map(fmt_f64).unwrap_or_default();
        let eoc = match row_eoc(table, k) {
            Some(v) if v == f64::INFINITY => "inf".into(),
            Some(v) => fmt_f64(v),
            None => String::new(),
        };
        w.write_record([
            r.mesh.to_string(),
            e,
            fmt_f64(r.tv_u),
            fmt_f64(r.tv_beta),
            eoc,
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn row_eoc(table: &ConvergenceTable, row: usize) -> Option<f64> {
    row.checked_sub(1).and_then(|k| table.eoc.get(k)).copied()
}

/// Aligned plain-text layout of a convergence table.
pub fn format_table(table: &ConvergenceTable) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} ({}D), t = {}", table.name, table.dim, table.t_end);
    let _ = writeln!(
        out,
        "{:>6}  {:>12}  {:>8}  {:>12}  {:>12}",
        "M", "e", "EOC", "TV(u)", "TV(beta)"
    );
    for (k, r) in table.rows.iter().enumerate() {
        let e = r
            .l1_error
            .map_or_else(|| "-".to_string(), |e| format!("{e:.4e}"));
        let eoc = match row_eoc(table, k) {
            None => "-".to_string(),
            Some(v) if v == f64::INFINITY => "resolved".to_string(),
            Some(v) => format!("{v:.4}"),
        };
        let _ = writeln!(
            out,
            "{:>6}  {:>12}  {:>8}  {:>12.6}  {:>12.4e}",
            r.mesh, e, eoc, r.tv_u, r.tv_beta
        );
    }
    out
}
