//! Godunov marching schemes.
//!
//! One space dimension:
//!
//! ```text
//!     u_i^{n+1} = u_i^n − λ (F_{i+1/2} − F_{i−1/2}),   F_{i+1/2} = ḡ(β_i^n, β_{i+1}^n)
//! ```
//!
//! Two space dimensions use dimension splitting with a fixed sweep order: an
//! `x`-sweep with `g_1` produces `u^{n+1/2}`, `β` is recomputed cellwise, and a
//! `y`-sweep with `g_2` produces `u^{n+1}`.
//!
//! Stability requires `λ_axis · L_g(axis) · L_β ≤ 1/2` on every axis, with
//! the constants taken on the a-priori bound `|u| ≤ M` of the initial data.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::flux::{cfl_constants, godunov_scalar_flux, BetaMap, CflConstants, FluxModel};
use crate::grid::{Axis, BoundaryPolicy, Field, Grid, Line, Point};

/// Relative slack on the CFL bound to absorb rounding in `Δt = λ·Δx`.
const CFL_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStepRule {
    /// `Δt` is this fraction, in `(0, 1]`, of the largest step allowed by the CFL bound.
    CflFraction(f64),
    /// Fixed ratio `λ = Δt/Δx`. Not checked until a step is taken.
    Lambda(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub step: TimeStepRule,
    pub boundary: BoundaryPolicy,
    pub t_end: f64,
}

impl SolverConfig {
    pub fn new(t_end: f64) -> Self {
        SolverConfig {
            step: TimeStepRule::CflFraction(1.0),
            boundary: BoundaryPolicy::Outflow,
            t_end,
        }
    }

    pub fn with_cfl_fraction(mut self, fraction: f64) -> Self {
        self.step = TimeStepRule::CflFraction(fraction);
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.step = TimeStepRule::Lambda(lambda);
        self
    }

    pub fn with_boundary(mut self, boundary: BoundaryPolicy) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::Invalid(format!(
                "t_end must be finite and >= 0, got {}",
                self.t_end
            )));
        }
        match self.step {
            TimeStepRule::CflFraction(f) if !(f > 0.0 && f <= 1.0) => {
                return Err(Error::Invalid(format!(
                    "cfl_fraction must lie in (0, 1], got {f}"
                )));
            }
            TimeStepRule::Lambda(l) if !(l.is_finite() && l > 0.0) => {
                return Err(Error::Invalid(format!("lambda must be positive, got {l}")));
            }
            _ => {}
        }
        self.boundary.validate()
    }
}

/// Range of `β` over the initial data and the resulting bound on `|u|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsEstimate {
    pub alpha_minus: f64,
    pub alpha_plus: f64,
    /// `max |k_{ᾱ±}(x)|` over cells; every scheme state satisfies `|u| ≤ m_bound`.
    pub m_bound: f64,
}

impl BoundsEstimate {
    pub fn merge(self, other: BoundsEstimate) -> BoundsEstimate {
        BoundsEstimate {
            alpha_minus: self.alpha_minus.min(other.alpha_minus),
            alpha_plus: self.alpha_plus.max(other.alpha_plus),
            m_bound: self.m_bound.max(other.m_bound),
        }
    }
}

pub fn estimate_bounds(model: &FluxModel, u0: &Field) -> Result<BoundsEstimate> {
    let grid = u0.grid();
    let beta = model.beta();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (k, &u) in u0.values().iter().enumerate() {
        let b = beta.eval(grid.center_of(k), u);
        lo = lo.min(b);
        hi = hi.max(b);
    }
    bounds_for_range(beta, grid.centers(), lo, hi)
}

fn bounds_for_range(
    beta: &BetaMap,
    points: impl Iterator<Item = Point>,
    alpha_minus: f64,
    alpha_plus: f64,
) -> Result<BoundsEstimate> {
    let mut m_bound: f64 = 0.0;
    for p in points {
        m_bound = m_bound
            .max(beta.k_alpha(p, alpha_plus)?.abs())
            .max(beta.k_alpha(p, alpha_minus)?.abs());
    }
    Ok(BoundsEstimate {
        alpha_minus,
        alpha_plus,
        m_bound,
    })
}

/// Largest `Δt` with `λ_axis · L_g(axis) · L_β ≤ cfl_fraction / 2` on every axis,
/// capped at `t_end`. A flux with zero Lipschitz constant on every axis is
/// constant in time, so the whole interval is one step.
pub fn select_dt(
    model: &FluxModel,
    grid: &Grid,
    bounds: &BoundsEstimate,
    cfl_fraction: f64,
    t_end: f64,
) -> Result<f64> {
    if !(cfl_fraction > 0.0 && cfl_fraction <= 1.0) {
        return Err(Error::Invalid(format!(
            "cfl_fraction must lie in (0, 1], got {cfl_fraction}"
        )));
    }
    let constants = cfl_constants(model, grid, bounds.m_bound);
    Ok(stable_dt(&constants, grid, cfl_fraction, t_end))
}

fn stable_dt(constants: &CflConstants, grid: &Grid, cfl_fraction: f64, t_end: f64) -> f64 {
    let mut dt = f64::INFINITY;
    for &axis in grid.axes() {
        let product = constants.product(axis);
        if product > 0.0 {
            dt = dt.min(cfl_fraction * 0.5 * grid.spacing(axis) / product);
        }
    }
    if !dt.is_finite() {
        return t_end;
    }
    if t_end > 0.0 {
        dt.min(t_end)
    } else {
        dt
    }
}

/// Observer hook invoked by [`Solver::run`] after every full step.
pub trait Observer {
    fn observe(&mut self, step: usize, time: f64, field: &Field);

    /// Sees the state before the step and the full outcome (including the
    /// intermediate state in 2D). Defaults to [`Observer::observe`].
    fn on_step(&mut self, step: usize, _before: &Field, outcome: &StepOutcome) {
        self.observe(step, outcome.next.time(), &outcome.next);
    }
}

impl<F: FnMut(usize, f64, &Field)> Observer for F {
    fn observe(&mut self, step: usize, time: f64, field: &Field) {
        self(step, time, field)
    }
}

/// Observer that ignores everything.
pub struct Silent;

impl Observer for Silent {
    fn observe(&mut self, _: usize, _: f64, _: &Field) {}
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    /// `u^{n+1/2}` after the `x`-sweep (2D only).
    pub half: Option<Field>,
    pub next: Field,
    pub dt: f64,
    /// Change of `Σ u · cell volume` implied by the fluxes through the domain boundary.
    pub boundary_mass_change: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub field: Field,
    pub steps: usize,
    /// Nominal step from the time-step rule.
    pub dt: f64,
    pub last_dt: f64,
    /// Whether the final step was shortened to land on `t_end`.
    pub clamped: bool,
}

enum CellBeta {
    Affine { a: f64, r: Vec<f64> },
    General { centers: Vec<Point> },
}

/// A flux model discretised on a grid with fixed boundary handling and time step.
pub struct Solver<'m> {
    model: &'m FluxModel,
    grid: Grid,
    boundary: BoundaryPolicy,
    bounds: BoundsEstimate,
    constants: CflConstants,
    dt: f64,
    t_end: f64,
    cells: CellBeta,
    /// Dirichlet ghost `β` per axis and line, `(low, high)`.
    ghosts: [Vec<(f64, f64)>; 2],
}

impl<'m> Solver<'m> {
    /// Bounds are taken from `u0` (and any Dirichlet ghost data).
    pub fn new(model: &'m FluxModel, u0: &Field, config: &SolverConfig) -> Result<Self> {
        config.validate()?;
        let mut bounds = estimate_bounds(model, u0)?;
        if let Some(ghost) = dirichlet_bounds(model, u0.grid(), &config.boundary)? {
            bounds = bounds.merge(ghost);
        }
        Self::with_bounds(model, u0.grid().clone(), config, bounds)
    }

    pub fn with_bounds(
        model: &'m FluxModel,
        grid: Grid,
        config: &SolverConfig,
        bounds: BoundsEstimate,
    ) -> Result<Self> {
        config.validate()?;
        if model.dim() != grid.dim() {
            return Err(Error::Invalid(format!(
                "flux has {} components but the grid is {}-dimensional",
                model.dim(),
                grid.dim()
            )));
        }
        let constants = cfl_constants(model, &grid, bounds.m_bound);
        let dt = match config.step {
            TimeStepRule::CflFraction(f) => stable_dt(&constants, &grid, f, config.t_end),
            TimeStepRule::Lambda(l) => l * grid.dx(),
        };
        let cells = match model.beta() {
            BetaMap::Affine(b) => CellBeta::Affine {
                a: b.a,
                r: grid.centers().map(|p| (b.r)(p)).collect(),
            },
            BetaMap::Monotone(_) => CellBeta::General {
                centers: grid.centers().collect(),
            },
        };
        if let Some((k, _)) = match &cells {
            CellBeta::Affine { r, .. } => r.iter().enumerate().find(|(_, v)| !v.is_finite()),
            CellBeta::General { .. } => None,
        } {
            return Err(Error::NonFiniteSample {
                index: k,
                value: f64::NAN,
            });
        }
        let ghosts = [
            dirichlet_ghosts(model.beta(), &grid, &config.boundary, Axis::X),
            dirichlet_ghosts(model.beta(), &grid, &config.boundary, Axis::Y),
        ];
        Ok(Solver {
            model,
            grid,
            boundary: config.boundary,
            bounds,
            constants,
            dt,
            t_end: config.t_end,
            cells,
            ghosts,
        })
    }

    pub fn model(&self) -> &FluxModel {
        self.model
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn boundary(&self) -> &BoundaryPolicy {
        &self.boundary
    }

    pub fn bounds(&self) -> &BoundsEstimate {
        &self.bounds
    }

    pub fn constants(&self) -> &CflConstants {
        &self.constants
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn lambda(&self, axis: Axis, dt: f64) -> f64 {
        dt / self.grid.spacing(axis)
    }

    /// `β(x_c, u_c)` for every cell.
    pub fn beta_values(&self, u: &[f64]) -> Vec<f64> {
        match &self.cells {
            CellBeta::Affine { a, r } => u.iter().zip(r).map(|(&u, &r)| a * u + r).collect(),
            CellBeta::General { centers } => {
                let beta = self.model.beta();
                u.iter()
                    .zip(centers)
                    .map(|(&u, &p)| beta.eval(p, u))
                    .collect()
            }
        }
    }

    pub fn beta_field(&self, field: &Field) -> Field {
        Field::from_parts(
            field.grid().clone(),
            self.beta_values(field.values()),
            field.time(),
        )
    }

    /// Ghost `β` values `(low, high)` for one grid line, given the cell `β` values.
    pub fn ghost_betas(
        &self,
        axis: Axis,
        line_index: usize,
        line: Line,
        beta: &[f64],
    ) -> (f64, f64) {
        let first = beta[line.at(0)];
        let last = beta[line.at(line.len - 1)];
        match self.boundary {
            BoundaryPolicy::Outflow => (first, last),
            BoundaryPolicy::Periodic => (last, first),
            BoundaryPolicy::Dirichlet { .. } => self.ghosts[axis.index()][line_index],
        }
    }

    /// `k_α` at every cell centre.
    pub fn k_alpha_cells(&self, alpha: f64) -> Result<Vec<f64>> {
        match &self.cells {
            CellBeta::Affine { a, r } => Ok(r.iter().map(|&r| (alpha - r) / a).collect()),
            CellBeta::General { centers } => centers
                .iter()
                .map(|&p| self.model.beta().k_alpha(p, alpha))
                .collect(),
        }
    }

    pub fn check_cfl(&self, axis: Axis, dt: f64) -> Result<()> {
        let product = self.lambda(axis, dt) * self.constants.product(axis);
        if product > 0.5 * (1.0 + CFL_SLACK) {
            return Err(Error::CflViolation { axis, product });
        }
        Ok(())
    }

    /// One directional sweep of the scheme. Returns the updated values and
    /// the mass change implied by the boundary fluxes.
    pub fn sweep(&self, axis: Axis, u: &[f64], dt: f64) -> Result<(Vec<f64>, f64)> {
        self.check_cfl(axis, dt)?;
        let g = self.model.component(axis);
        let lambda = self.lambda(axis, dt);
        let beta = self.beta_values(u);
        let mut out = u.to_vec();
        let mut net = 0.0;
        for l in 0..self.grid.line_count(axis) {
            let line = self.grid.grid_line(axis, l);
            let (ghost_lo, ghost_hi) = self.ghost_betas(axis, l, line, &beta);
            let mut f_left = godunov_scalar_flux(g, ghost_lo, beta[line.at(0)]);
            let f_low = f_left;
            for k in 0..line.len {
                let idx = line.at(k);
                let right = if k + 1 < line.len {
                    beta[line.at(k + 1)]
                } else {
                    ghost_hi
                };
                let f_right = godunov_scalar_flux(g, beta[idx], right);
                out[idx] = u[idx] - lambda * (f_right - f_left);
                f_left = f_right;
            }
            net += f_left - f_low;
        }
        Ok((out, -lambda * self.grid.cell_volume() * net))
    }

    /// Advances `field` by `dt` (one sweep in 1D, `x` then `y` in 2D).
    pub fn advance(&self, field: &Field, dt: f64) -> Result<StepOutcome> {
        if field.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let t = field.time();
        if self.grid.dim() == 1 {
            let (next, mass) = self.sweep(Axis::X, field.values(), dt)?;
            return Ok(StepOutcome {
                half: None,
                next: Field::from_parts(self.grid.clone(), next, t + dt),
                dt,
                boundary_mass_change: mass,
            });
        }
        // Both sweeps are checked before anything is computed.
        self.check_cfl(Axis::Y, dt)?;
        let (half, mass_x) = self.sweep(Axis::X, field.values(), dt)?;
        let (next, mass_y) = self.sweep(Axis::Y, &half, dt)?;
        Ok(StepOutcome {
            half: Some(Field::from_parts(self.grid.clone(), half, t + 0.5 * dt)),
            next: Field::from_parts(self.grid.clone(), next, t + dt),
            dt,
            boundary_mass_change: mass_x + mass_y,
        })
    }

    pub fn step_1d(&self, field: &Field, dt: f64) -> Result<Field> {
        if self.grid.dim() != 1 {
            return Err(Error::Invalid("step_1d on a 2D grid".into()));
        }
        Ok(self.advance(field, dt)?.next)
    }

    pub fn step_2d(&self, field: &Field, dt: f64) -> Result<Field> {
        if self.grid.dim() != 2 {
            return Err(Error::Invalid("step_2d on a 1D grid".into()));
        }
        Ok(self.advance(field, dt)?.next)
    }

    /// Number of steps needed to go from `t0` to `t_end` with the nominal `Δt`.
    pub fn step_count(&self, t0: f64) -> usize {
        let span = self.t_end - t0;
        if span <= 0.0 {
            return 0;
        }
        let n = libm::ceil(span / self.dt - 1e-9);
        (n as usize).max(1)
    }

    /// Marches `u0` to `t_end`. The last step is shortened to land exactly on `t_end`.
    pub fn run(&self, u0: Field, observer: &mut dyn Observer) -> Result<RunSummary> {
        let t0 = u0.time();
        let n = self.step_count(t0);
        let mut field = u0;
        let mut last_dt = 0.0;
        for step in 1..=n {
            let t_prev = field.time();
            let t_next = if step == n {
                self.t_end
            } else {
                t0 + step as f64 * self.dt
            };
            let dt = t_next - t_prev;
            let mut outcome = self.advance(&field, dt)?;
            outcome.next = outcome.next.with_time(t_next);
            observer.on_step(step, &field, &outcome);
            field = outcome.next;
            last_dt = dt;
        }
        Ok(RunSummary {
            field,
            steps: n,
            dt: self.dt,
            last_dt,
            clamped: n > 0 && last_dt < self.dt * (1.0 - 1e-12),
        })
    }
}

/// Convenience wrapper: builds a [`Solver`] from `u0` and marches to `config.t_end`.
pub fn run(
    model: &FluxModel,
    u0: Field,
    config: &SolverConfig,
    observer: &mut dyn Observer,
) -> Result<Field> {
    let solver = Solver::new(model, &u0, config)?;
    Ok(solver.run(u0, observer)?.field)
}

fn ghost_points(grid: &Grid, axis: Axis, line: usize) -> (Point, Point) {
    match axis {
        Axis::X => (
            grid.center_signed(-1, line as isize),
            grid.center_signed(grid.nx() as isize, line as isize),
        ),
        Axis::Y => (
            grid.center_signed(line as isize, -1),
            grid.center_signed(line as isize, grid.ny() as isize),
        ),
    }
}

fn dirichlet_ghosts(
    beta: &BetaMap,
    grid: &Grid,
    policy: &BoundaryPolicy,
    axis: Axis,
) -> Vec<(f64, f64)> {
    let Some((lo, hi)) = policy.dirichlet_values(axis) else {
        return Vec::new();
    };
    if axis == Axis::Y && grid.dim() == 1 {
        return Vec::new();
    }
    (0..grid.line_count(axis))
        .map(|l| {
            let (pl, ph) = ghost_points(grid, axis, l);
            (beta.eval(pl, lo), beta.eval(ph, hi))
        })
        .collect()
}

fn dirichlet_bounds(
    model: &FluxModel,
    grid: &Grid,
    policy: &BoundaryPolicy,
) -> Result<Option<BoundsEstimate>> {
    if policy.dirichlet_values(Axis::X).is_none() {
        return Ok(None);
    }
    let mut points = Vec::new();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &axis in grid.axes() {
        let (ul, uh) = policy.dirichlet_values(axis).unwrap();
        for l in 0..grid.line_count(axis) {
            let (pl, ph) = ghost_points(grid, axis, l);
            for (p, u) in [(pl, ul), (ph, uh)] {
                let b = model.beta().eval(p, u);
                lo = lo.min(b);
                hi = hi.max(b);
                points.push(p);
            }
        }
    }
    let mut b = bounds_for_range(model.beta(), points.iter().copied(), lo, hi)?;
    // The ghost levels must also be bounded at interior cells.
    b = b.merge(bounds_for_range(model.beta(), grid.centers(), lo, hi)?);
    Ok(Some(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::GComponent;
    use crate::grid::sample_initial;
    use alloc::vec;

    fn burgers_identity() -> FluxModel {
        FluxModel::new(vec![GComponent::burgers()], BetaMap::identity()).unwrap()
    }

    #[test]
    fn bounds_examples() {
        let m = burgers_identity();
        let g = Grid::line(0.0, 4.0, 4).unwrap();
        let u0 = Field::new(g.clone(), vec![-1.0, 0.0, 3.0, 2.0], 0.0).unwrap();
        assert_eq!(
            estimate_bounds(&m, &u0).unwrap(),
            BoundsEstimate {
                alpha_minus: -1.0,
                alpha_plus: 3.0,
                m_bound: 3.0
            }
        );

        // Oracle: enumerate the two r levels by hand.
        let two = FluxModel::new(
            vec![GComponent::sine()],
            BetaMap::affine(1.0, |p| if p.x < 2.0 { 0.0 } else { 2.0 }),
        )
        .unwrap();
        let b = estimate_bounds(&two, &Field::constant(g.clone(), 2.0).unwrap()).unwrap();
        let m_oracle = [4.0_f64 - 0.0, 4.0 - 2.0, 2.0 - 0.0, 2.0 - 2.0]
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        assert_eq!(
            b,
            BoundsEstimate {
                alpha_minus: 2.0,
                alpha_plus: 4.0,
                m_bound: m_oracle
            }
        );

        let scaled =
            FluxModel::new(vec![GComponent::burgers()], BetaMap::affine(2.0, |_| 0.0)).unwrap();
        let b = estimate_bounds(&scaled, &Field::constant(g, 1.0).unwrap()).unwrap();
        assert_eq!(
            b,
            BoundsEstimate {
                alpha_minus: 2.0,
                alpha_plus: 2.0,
                m_bound: 1.0
            }
        );
    }

    #[test]
    fn select_dt_examples() {
        let g = Grid::line(0.0, 0.03 * 10.0, 10).unwrap();
        let sine = FluxModel::new(vec![GComponent::sine()], BetaMap::identity()).unwrap();
        let bounds = BoundsEstimate {
            alpha_minus: -1.0,
            alpha_plus: 1.0,
            m_bound: 1.0,
        };
        let dt = select_dt(&sine, &g, &bounds, 1.0, 10.0).unwrap();
        assert!((dt - 0.015).abs() < 1e-15);

        // Burgers along x with S = 6 binds over sin along y.
        let plane = Grid::plane([0.0; 2], [0.3, 0.3], [10, 10]).unwrap();
        let m = FluxModel::new(
            vec![GComponent::burgers(), GComponent::sine()],
            BetaMap::identity(),
        )
        .unwrap();
        let b6 = BoundsEstimate {
            alpha_minus: -6.0,
            alpha_plus: 6.0,
            m_bound: 6.0,
        };
        let dt = select_dt(&m, &plane, &b6, 1.0, 10.0).unwrap();
        assert!((dt - 0.03 / 12.0).abs() < 1e-15, "{dt}");

        let zero = FluxModel::new(vec![GComponent::zero()], BetaMap::identity()).unwrap();
        assert_eq!(select_dt(&zero, &g, &bounds, 1.0, 2.5).unwrap(), 2.5);
        assert!(select_dt(&zero, &g, &bounds, 1.5, 2.5).is_err());
    }

    #[test]
    fn burgers_step_by_hand() {
        let g = Grid::line(0.0, 6.0, 6).unwrap();
        let u0 = Field::new(g, vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0], 0.0).unwrap();
        let m = burgers_identity();
        let solver = Solver::new(&m, &u0, &SolverConfig::new(1.0).with_lambda(0.5)).unwrap();
        let next = solver.step_1d(&u0, 0.5).unwrap();
        // F = 0.5 left of the jump, ḡ(1, 0) = max g on [0, 1] = 0.5 at the jump, 0 right of it.
        assert_eq!(next.values(), &[1.0, 1.0, 1.0, 0.25, 0.0, 0.0]);
    }

    #[test]
    fn steady_and_constant_states_are_fixed_points() {
        let m = FluxModel::new(
            vec![GComponent::burgers(), GComponent::sine()],
            BetaMap::affine(1.0, |p| if p.x < 1.0 { 2.0 } else { -0.5 } + 0.1 * p.y),
        )
        .unwrap();
        let g = Grid::plane([0.0; 2], [2.0; 2], [8, 8]).unwrap();
        let k = sample_initial(&g, |p| m.beta().k_alpha(p, 0.7).unwrap()).unwrap();
        let s = Solver::new(&m, &k, &SolverConfig::new(1.0)).unwrap();
        let next = s.step_2d(&k, s.dt()).unwrap();
        for (a, b) in next.values().iter().zip(k.values()) {
            assert!((a - b).abs() <= 1e-15 * (1.0 + b.abs()));
        }

        let flat = FluxModel::new(
            vec![GComponent::sine(), GComponent::burgers()],
            BetaMap::affine(1.5, |_| 0.25),
        )
        .unwrap();
        let c = Field::constant(g, -0.8).unwrap();
        let s = Solver::new(&flat, &c, &SolverConfig::new(1.0)).unwrap();
        assert_eq!(s.step_2d(&c, s.dt()).unwrap().values(), c.values());
    }

    #[test]
    fn cfl_violation_refuses_to_step() {
        let g = Grid::line(0.0, 1.0, 10).unwrap();
        let u0 = sample_initial(&g, |p| p.x).unwrap();
        let m = burgers_identity();
        let s = Solver::new(&m, &u0, &SolverConfig::new(1.0).with_lambda(1.0)).unwrap();
        // M = 0.95, so λ·L_g·L_β = 0.95 > 1/2.
        assert!(matches!(
            s.step_1d(&u0, s.dt()),
            Err(Error::CflViolation { axis: Axis::X, .. })
        ));
    }

    #[test]
    fn run_lands_on_t_end() {
        let g = Grid::line(0.0, 1.0, 10).unwrap();
        let u0 = sample_initial(&g, |p| if p.x < 0.5 { 1.0 } else { 0.0 }).unwrap();
        let m = burgers_identity();
        let s = Solver::new(&m, &u0, &SolverConfig::new(0.33)).unwrap();
        let mut times = Vec::new();
        let summary = s
            .run(u0.clone(), &mut |_: usize, t: f64, _: &Field| times.push(t))
            .unwrap();
        assert_eq!(summary.field.time(), 0.33);
        assert_eq!(*times.last().unwrap(), 0.33);
        assert!(summary.clamped);
        assert_eq!(times.len(), summary.steps);

        let zero = Solver::new(&m, &u0, &SolverConfig::new(0.0)).unwrap();
        assert_eq!(zero.run(u0.clone(), &mut Silent).unwrap().field, u0);
    }

    #[test]
    fn dirichlet_ghosts_enter_bounds() {
        let g = Grid::line(0.0, 1.0, 4).unwrap();
        let u0 = Field::constant(g, 0.0).unwrap();
        let m = burgers_identity();
        let d = BoundaryPolicy::Dirichlet {
            left: 2.0,
            right: -3.0,
            bottom: 0.0,
            top: 0.0,
        };
        let s = Solver::new(&m, &u0, &SolverConfig::new(1.0).with_boundary(d)).unwrap();
        assert_eq!(s.bounds().m_bound, 3.0);
        let next = s.step_1d(&u0, s.dt()).unwrap();
        assert!(next.values()[0] > 0.0 && next.values()[3] < 0.0);
    }
}
