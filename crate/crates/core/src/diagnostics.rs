//! Discrete functionals of scheme states.
//!
//! The discrete adapted entropy inequality checked by [`entropy_residual`] is
//!
//! ```text
//!     |u_i^{n+1} − k_i| ≤ |u_i^n − k_i| − λ (P_{i+1/2} − P_{i−1/2})
//!     P_{i+1/2} = Ā(u_i ∨ k_i, u_{i+1} ∨ k_{i+1}) − Ā(u_i ∧ k_i, u_{i+1} ∧ k_{i+1})
//! ```
//!
//! with `k = k_α` the steady state at level `α`. Because `β(x, ·)` is
//! increasing, `β(x, u ∨ k_α(x)) = β(x, u) ∨ α`, so `P` is evaluated directly
//! on `β`-values and boundary ghosts are handled exactly as in the scheme.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::flux::godunov_scalar_flux;
use crate::grid::{Axis, Field, Point};
use crate::solver::{BoundsEstimate, Observer, Solver, StepOutcome};

/// Number of uniformly spaced levels in `[ᾱ₋, ᾱ₊]` used for entropy checks.
pub const ALPHA_SAMPLES: usize = 33;

pub fn tv_1d(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// `Δy Σ |a_ij − a_{i−1,j}| + Δx Σ |a_ij − a_{i,j−1}|`.
pub fn tv_2d(field: &Field) -> f64 {
    let grid = field.grid();
    let (nx, ny) = (grid.nx(), grid.ny());
    let v = field.values();
    let mut along_x = 0.0;
    for j in 0..ny {
        along_x += tv_1d(&v[j * nx..(j + 1) * nx]);
    }
    let mut along_y = 0.0;
    for j in 1..ny {
        for i in 0..nx {
            along_y += (v[j * nx + i] - v[(j - 1) * nx + i]).abs();
        }
    }
    grid.dy() * along_x + grid.dx() * along_y
}

/// [`tv_1d`] for 1D fields, [`tv_2d`] for 2D fields.
pub fn total_variation(field: &Field) -> f64 {
    if field.grid().dim() == 1 {
        tv_1d(field.values())
    } else {
        tv_2d(field)
    }
}

/// [`total_variation`] including the wrap-around differences of a periodic grid.
pub fn periodic_total_variation(field: &Field) -> f64 {
    let grid = field.grid();
    let (nx, ny) = (grid.nx(), grid.ny());
    let v = field.values();
    let mut along_x = 0.0;
    let mut along_y = 0.0;
    for j in 0..ny {
        let row = &v[j * nx..(j + 1) * nx];
        along_x += tv_1d(row) + (row[0] - row[nx - 1]).abs();
        if ny > 1 {
            let below = if j == 0 { ny - 1 } else { j - 1 };
            for i in 0..nx {
                along_y += (v[j * nx + i] - v[below * nx + i]).abs();
            }
        }
    }
    if grid.dim() == 1 {
        along_x
    } else {
        grid.dy() * along_x + grid.dx() * along_y
    }
}

pub fn l1_distance(f: &Field, g: &Field) -> Result<f64> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    let sum: f64 = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok(sum * f.grid().cell_volume())
}

/// L1 distance to a point function sampled at cell centres.
pub fn l1_to_fn(f: &Field, exact: impl Fn(Point) -> f64) -> f64 {
    let grid = f.grid();
    let sum: f64 = f
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| (v - exact(grid.center_of(k))).abs())
        .sum();
    sum * grid.cell_volume()
}

/// `count` uniformly spaced levels spanning `[ᾱ₋, ᾱ₊]`, endpoints included.
pub fn alpha_samples(bounds: &BoundsEstimate, count: usize) -> Vec<f64> {
    let (lo, hi) = (bounds.alpha_minus, bounds.alpha_plus);
    if count < 2 || hi <= lo {
        return alloc::vec![lo, hi];
    }
    (0..count)
        .map(|k| {
            if k + 1 == count {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (count - 1) as f64
            }
        })
        .collect()
}

/// Largest positive residual of the discrete entropy inequality for one
/// directional sweep `before → after`, over all cells and the given levels.
pub fn entropy_residual(
    solver: &Solver<'_>,
    axis: Axis,
    before: &Field,
    after: &Field,
    dt: f64,
    alphas: &[f64],
) -> Result<f64> {
    let grid = solver.grid();
    if before.grid() != grid || after.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let g = solver.model().component(axis);
    let lambda = solver.lambda(axis, dt);
    let beta = solver.beta_values(before.values());
    let (old, new) = (before.values(), after.values());
    let mut worst: f64 = 0.0;
    for &alpha in alphas {
        let k = solver.k_alpha_cells(alpha)?;
        let p = |bl: f64, br: f64| {
            godunov_scalar_flux(g, bl.max(alpha), br.max(alpha))
                - godunov_scalar_flux(g, bl.min(alpha), br.min(alpha))
        };
        for l in 0..grid.line_count(axis) {
            let line = grid.grid_line(axis, l);
            let (ghost_lo, ghost_hi) = solver.ghost_betas(axis, l, line, &beta);
            let mut p_left = p(ghost_lo, beta[line.at(0)]);
            for s in 0..line.len {
                let idx = line.at(s);
                let right = if s + 1 < line.len {
                    beta[line.at(s + 1)]
                } else {
                    ghost_hi
                };
                let p_right = p(beta[idx], right);
                let residual = (new[idx] - k[idx]).abs() - (old[idx] - k[idx]).abs()
                    + lambda * (p_right - p_left);
                worst = worst.max(residual);
                p_left = p_right;
            }
        }
    }
    Ok(worst)
}

/// [`entropy_residual`] over every sweep of one step (both half-steps in 2D).
pub fn step_entropy_residual(
    solver: &Solver<'_>,
    before: &Field,
    outcome: &StepOutcome,
    alphas: &[f64],
) -> Result<f64> {
    match &outcome.half {
        None => entropy_residual(solver, Axis::X, before, &outcome.next, outcome.dt, alphas),
        Some(half) => Ok(
            entropy_residual(solver, Axis::X, before, half, outcome.dt, alphas)?.max(
                entropy_residual(solver, Axis::Y, half, &outcome.next, outcome.dt, alphas)?,
            ),
        ),
    }
}

/// Relative mismatch between the change of total mass and the boundary fluxes.
pub fn conservation_defect(before: &Field, outcome: &StepOutcome) -> f64 {
    let vol = before.grid().cell_volume();
    let mut change = 0.0;
    let mut scale = outcome.boundary_mass_change.abs();
    for (a, b) in before.values().iter().zip(outcome.next.values()) {
        change += (b - a) * vol;
        scale += a.abs().max(b.abs()) * vol;
    }
    if scale == 0.0 {
        return 0.0;
    }
    (change - outcome.boundary_mass_change).abs() / scale
}

/// `ν(u, σ)`: largest L1 distance between snapshots at most `σ` apart in time.
pub fn time_continuity(snapshots: &[(f64, Field)], sigma: f64) -> Result<f64> {
    if snapshots.windows(2).any(|w| w[1].0 < w[0].0) {
        return Err(Error::Invalid("snapshots must be sorted by time".into()));
    }
    let mut worst: f64 = 0.0;
    for (a, (ta, fa)) in snapshots.iter().enumerate() {
        for (_, fb) in snapshots[a + 1..]
            .iter()
            .take_while(|(tb, _)| tb - ta <= sigma)
        {
            worst = worst.max(l1_distance(fa, fb)?);
        }
    }
    Ok(worst)
}

/// Experimental orders of convergence for consecutive `(h, error)` levels,
/// `log(e_k / e_{k+1}) / log(h_k / h_{k+1})`.
///
/// An exactly resolved finer level (`e_{k+1} = 0`) yields `+∞`.
pub fn eoc(levels: &[(f64, f64)]) -> Result<Vec<f64>> {
    if levels.len() < 2 {
        return Err(Error::Invalid("EOC needs at least two mesh levels".into()));
    }
    if let Some((index, &(_, value))) = levels.iter().enumerate().find(|(_, (_, e))| !(*e >= 0.0)) {
        return Err(Error::NonPositiveError { index, value });
    }
    Ok(levels
        .windows(2)
        .map(|w| {
            let ((h0, e0), (h1, e1)) = (w[0], w[1]);
            if e1 == 0.0 {
                f64::INFINITY
            } else if e0 == 0.0 {
                f64::NEG_INFINITY
            } else {
                libm::log(e0 / e1) / libm::log(h0 / h1)
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiagnosticsReport {
    /// `(time, TV(u))` after every recorded step.
    pub tv_u: Vec<(f64, f64)>,
    pub tv_beta: Vec<(f64, f64)>,
    pub l1_error: Option<f64>,
    pub entropy_violation: f64,
    pub conservation_defect: f64,
    pub nu: Option<f64>,
    /// Largest relative increase of TV(β) over any sweep; 0 when TVD held.
    pub tvd_excess: f64,
    pub max_abs_u: f64,
    /// `Σ |u^{n+1} − u^n| · volume` per step.
    pub step_variation: Vec<f64>,
    pub entropy_steps_checked: usize,
}

/// Observer that accumulates a [`DiagnosticsReport`] while a solver runs.
pub struct Monitor<'s, 'm> {
    solver: &'s Solver<'m>,
    alphas: Vec<f64>,
    entropy_stride: usize,
    snapshots: Option<Vec<(f64, Field)>>,
    pub report: DiagnosticsReport,
    error: Option<Error>,
}

impl<'s, 'm> Monitor<'s, 'm> {
    pub fn new(solver: &'s Solver<'m>) -> Self {
        Monitor {
            solver,
            alphas: alpha_samples(solver.bounds(), ALPHA_SAMPLES),
            entropy_stride: 1,
            snapshots: None,
            report: DiagnosticsReport::default(),
            error: None,
        }
    }

    /// Check the entropy inequality only on every `stride`-th step.
    pub fn entropy_stride(mut self, stride: usize) -> Self {
        self.entropy_stride = stride.max(1);
        self
    }

    /// Keep every full-step state (plus the initial one) for [`time_continuity`].
    pub fn keep_snapshots(mut self, initial: &Field) -> Self {
        self.snapshots = Some(alloc::vec![(initial.time(), initial.clone())]);
        self
    }

    pub fn snapshots(&self) -> Option<&[(f64, Field)]> {
        self.snapshots.as_deref()
    }

    pub fn finish(mut self) -> Result<DiagnosticsReport> {
        if let Some(e) = self.error {
            return Err(e);
        }
        if let Some(s) = &self.snapshots {
            let sigma = libm::sqrt(self.solver.dt());
            self.report.nu = Some(time_continuity(s, sigma)?);
        }
        Ok(self.report)
    }

    fn record_tv(&mut self, before: &Field, after: &Field) {
        let tb_before = total_variation(&self.solver.beta_field(before));
        let tb_after = total_variation(&self.solver.beta_field(after));
        if tb_after > tb_before {
            let rel = (tb_after - tb_before) / tb_before.max(f64::MIN_POSITIVE);
            self.report.tvd_excess = self.report.tvd_excess.max(rel);
        }
    }
}

impl Observer for Monitor<'_, '_> {
    fn observe(&mut self, _step: usize, time: f64, field: &Field) {
        self.report.tv_u.push((time, total_variation(field)));
        self.report
            .tv_beta
            .push((time, total_variation(&self.solver.beta_field(field))));
        self.report.max_abs_u = self.report.max_abs_u.max(field.max_abs());
    }

    fn on_step(&mut self, step: usize, before: &Field, outcome: &StepOutcome) {
        if self.report.tv_u.is_empty() {
            self.report.max_abs_u = before.max_abs();
        }
        match &outcome.half {
            Some(half) => {
                self.record_tv(before, half);
                self.record_tv(half, &outcome.next);
                self.report.max_abs_u = self.report.max_abs_u.max(half.max_abs());
            }
            None => self.record_tv(before, &outcome.next),
        }
        self.report.conservation_defect = self
            .report
            .conservation_defect
            .max(conservation_defect(before, outcome));
        self.report
            .step_variation
            .push(l1_distance(before, &outcome.next).unwrap_or(f64::NAN));
        if (step - 1).is_multiple_of(self.entropy_stride) && self.error.is_none() {
            match step_entropy_residual(self.solver, before, outcome, &self.alphas) {
                Ok(r) => {
                    self.report.entropy_violation = self.report.entropy_violation.max(r);
                    self.report.entropy_steps_checked += 1;
                }
                Err(e) => self.error = Some(e),
            }
        }
        if let Some(s) = &mut self.snapshots {
            s.push((outcome.next.time(), outcome.next.clone()));
        }
        self.observe(step, outcome.next.time(), &outcome.next);
    }
}
