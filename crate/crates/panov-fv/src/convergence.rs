//! Mesh levels of a convergence study solved on worker threads.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use panov_fv_core::experiments::{ConvergenceRow, ConvergenceTable, Experiment};
use panov_fv_core::solver::Silent;
use panov_fv_core::{Result, SolverConfig};

pub const THREADS_ENV: &str = "PANOV_FV_THREADS";

/// Workers for `jobs` independent tasks: `PANOV_FV_THREADS` if set, else the
/// available parallelism, never more than `jobs`.
pub fn worker_count(jobs: usize) -> usize {
    let cap = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| thread::available_parallelism().map_or(1, |n| n.get()));
    cap.min(jobs).max(1)
}

/// Every mesh level of `exp.spec.meshes`, rows in mesh order.
pub fn run_convergence(
    exp: &Experiment,
    dim: usize,
    config: &SolverConfig,
) -> Result<ConvergenceTable> {
    exp.spec.validate()?;
    let meshes = &exp.spec.meshes;
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<ConvergenceRow>>>> = Mutex::new(vec![None; meshes.len()]);
    thread::scope(|s| {
        for _ in 0..worker_count(meshes.len()) {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&m) = meshes.get(k) else { break };
                let row = exp
                    .run_case_with(m, dim, config, &mut Silent)
                    .map(|c| c.row());
                slots.lock().unwrap()[k] = Some(row);
            });
        }
    });
    let rows = slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every level ran"))
        .collect::<Result<Vec<_>>>()?;
    ConvergenceTable::assemble(exp.spec.name.as_str(), dim, config.t_end, rows)
}
