//! The `run`, `convergence` and `invariants` subcommands.

use std::io::Write;
use std::path::Path;

use panov_fv_core::diagnostics::Monitor;
use panov_fv_core::experiments::ConvergenceTable;
use panov_fv_core::Solver;

use crate::config::{OutputKind, RunConfig};
use crate::convergence::run_convergence;
use crate::error::CliError;
use crate::invariants::{run_suite, SuiteOptions, SuiteReport};
use crate::io::{format_table, write_json, write_solution_csv, write_table_csv, Report};

/// Entropy checks are spread over at most this many steps of a run.
const ENTROPY_CHECKS: usize = 32;

fn out_dir(cfg: &RunConfig) -> Result<Option<&Path>, CliError> {
    match cfg.out_dir.as_deref() {
        None => Ok(None),
        Some(d) => {
            std::fs::create_dir_all(d).map_err(|e| CliError::io(d, e))?;
            Ok(Some(d))
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::io("<stdout>", e))
}

/// One solve at `cfg.mesh()`; prints the summary line.
pub fn cmd_run(cfg: &RunConfig, out: &mut dyn Write) -> Result<Report, CliError> {
    let exp = cfg.experiment()?;
    let config = cfg.solver_config(&exp);
    let mesh = cfg.mesh();
    let (model, u0) = exp.setup(mesh, cfg.dim)?;
    let solver = Solver::new(&model, &u0, &config)?;
    let stride = solver.step_count(0.0).div_ceil(ENTROPY_CHECKS).max(1);
    let mut monitor = Monitor::new(&solver).entropy_stride(stride);
    let summary = solver.run(u0, &mut monitor)?;
    let diag = monitor.finish()?;
    let case = exp.summarize(mesh, &solver, summary);
    let report = Report {
        mesh,
        dx: case.dx,
        dt: case.dt,
        lambda: case.lambda,
        t_end: case.t_end,
        l1_error: case.l1_error,
        tv_u: case.tv_u,
        tv_beta: case.tv_beta,
        entropy_violation: diag.entropy_violation,
        conservation_defect: diag.conservation_defect,
        problem: cfg.problem_name().to_string(),
        dim: cfg.dim,
        steps: case.steps,
        clamped: case.clamped,
        entropy_steps_checked: diag.entropy_steps_checked,
    };
    if let Some(dir) = out_dir(cfg)? {
        if cfg.outputs.contains(&OutputKind::SolutionCsv) {
            write_solution_csv(&dir.join("solution.csv"), &case.field, Some(&case.beta))?;
        }
        if cfg.outputs.contains(&OutputKind::ReportJson) {
            write_json(&dir.join("report.json"), &report)?;
        }
    }
    emit(out, &format!("{}\n", report.summary_line()))?;
    Ok(report)
}

/// Every mesh level of the problem; prints the table and the smallest order.
pub fn cmd_convergence(cfg: &RunConfig, out: &mut dyn Write) -> Result<ConvergenceTable, CliError> {
    let exp = cfg.experiment()?;
    let config = cfg.solver_config(&exp);
    exp.spec
        .validate()
        .map_err(|e| CliError::config("t_end", e.to_string()))?;
    let table = run_convergence(&exp, cfg.dim, &config)?;
    let text = format_table(&table);
    if let Some(dir) = out_dir(cfg)? {
        if cfg.outputs.contains(&OutputKind::TableCsv) {
            write_table_csv(&dir.join("table.csv"), &table)?;
            std::fs::write(dir.join("table.txt"), &text)
                .map_err(|e| CliError::io(dir.join("table.txt"), e))?;
        }
    }
    let min = match table.min_eoc() {
        None => "n/a".to_string(),
        Some(v) if v == f64::INFINITY => "resolved".to_string(),
        Some(v) => format!("{v:.4}"),
    };
    emit(out, &format!("{text}min_eoc {min}\n"))?;
    Ok(table)
}

/// The randomized invariant suite; a failure becomes [`CliError::Property`].
pub fn cmd_invariants(opts: &SuiteOptions, out: &mut dyn Write) -> Result<SuiteReport, CliError> {
    for (k, g) in opts.g_names.iter().enumerate() {
        if panov_fv_core::GComponent::builtin(g).is_none() {
            return Err(CliError::config(
                format!("g[{k}]"),
                format!("unknown builtin g `{g}`"),
            ));
        }
    }
    if opts.g_names.is_empty() {
        return Err(CliError::config("g", "need at least one g component"));
    }
    if !(4..=crate::invariants::MAX_CELLS).contains(&opts.cells) {
        return Err(CliError::config(
            "mesh",
            format!("cells per axis must lie in 4..=32, got {}", opts.cells),
        ));
    }
    let report = run_suite(opts)?;
    emit(out, &report.render())?;
    if report.passed() {
        Ok(report)
    } else {
        let failed: Vec<&str> = report
            .stats
            .iter()
            .filter(|s| s.failures > 0)
            .map(|s| s.property.name())
            .collect();
        Err(CliError::Property(failed.join(", ")))
    }
}
