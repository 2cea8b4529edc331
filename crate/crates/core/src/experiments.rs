//! Benchmark problems whose flux has infinitely many spatial discontinuities
//! accumulating at a point, and a sequential convergence-study driver.
//!
//! Both problems use `β(x, y, u) = u + r(x)` on `[0, 6]²` with a staircase `r`
//! whose steps shrink geometrically towards an accumulation point.
//!
//! - `ex51`: `g_1(z) = z²/2`, `g_2 = sin`, `p = 4`, `q = 0.8`. At `t = 1` the
//!   solution alternates stationary shocks and rarefaction fans that exactly
//!   fill each step.
//! - `ex52`: `g_1` is `−z−1 | 0 | z` with a flat piece on `[−1, 0]`, `g_2 = sin`,
//!   `u0 = 2`. `β` is transported at unit speed, so by `t = 6` the inflow level
//!   `β = 4` has swept the domain and `u = 4 − r(x)`.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::diagnostics::{eoc, l1_to_fn, total_variation};
use crate::error::{Error, Result};
use crate::flux::{BetaMap, FluxModel, GComponent, SpatialFn};
use crate::grid::{sample_initial, Field, Grid, Point};
use crate::solver::{Observer, RunSummary, Silent, Solver, SolverConfig};

/// Plateau heights below this are dropped when generating a staircase.
pub const STAIRCASE_CUTOFF: f64 = 1e-14;

/// Which piece of an [`AccumulatingStep`] contains a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Piece {
    Left,
    /// 1-based plateau index `n`, i.e. `x ∈ [a_n, a_{n+1})`.
    Plateau(usize),
    Right,
}

/// Piecewise constant function with breakpoints `a_1 < a_2 < … → a_∞`.
///
/// Half-open convention: a breakpoint takes the value of the piece to its right.
#[derive(Debug, Clone, PartialEq)]
pub struct AccumulatingStep {
    breakpoints: Vec<f64>,
    plateaus: Vec<f64>,
    left: f64,
    right: f64,
    accumulation: f64,
}

impl AccumulatingStep {
    pub fn new(
        breakpoints: Vec<f64>,
        plateaus: Vec<f64>,
        left: f64,
        right: f64,
        accumulation: f64,
    ) -> Result<Self> {
        if breakpoints.len() != plateaus.len() + 1 {
            return Err(Error::Invalid(
                "need exactly one more breakpoint than plateaus".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Invalid(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        if breakpoints.last().is_some_and(|&b| b > accumulation) {
            return Err(Error::Invalid(
                "breakpoints must not exceed the accumulation point".into(),
            ));
        }
        Ok(AccumulatingStep {
            breakpoints,
            plateaus,
            left,
            right,
            accumulation,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn plateaus(&self) -> &[f64] {
        &self.plateaus
    }

    pub fn accumulation(&self) -> f64 {
        self.accumulation
    }

    /// `a_n`, 1-based.
    pub fn a(&self, n: usize) -> f64 {
        self.breakpoints[n - 1]
    }

    pub fn piece(&self, x: f64) -> Piece {
        let k = self.breakpoints.partition_point(|&b| b <= x);
        if k == 0 {
            Piece::Left
        } else if k >= self.breakpoints.len() {
            Piece::Right
        } else {
            Piece::Plateau(k)
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self.piece(x) {
            Piece::Left => self.left,
            Piece::Plateau(n) => self.plateaus[n - 1],
            Piece::Right => self.right,
        }
    }

    pub fn total_variation(&self) -> f64 {
        let mut levels = Vec::with_capacity(self.plateaus.len() + 2);
        levels.push(self.left);
        levels.extend_from_slice(&self.plateaus);
        levels.push(self.right);
        crate::diagnostics::tv_1d(&levels)
    }
}

/// Staircase of the first problem: `r = p` left of `a_1 = 1`, `p·q^{n−1}` on
/// `[a_n, a_{n+1})`, `0` beyond `a_∞`.
pub fn ex51_staircase(p: f64, q: f64) -> AccumulatingStep {
    let mut breakpoints = alloc::vec![1.0];
    let mut plateaus = Vec::new();
    let mut n = 1;
    loop {
        let height = p * libm::pow(q, (n - 1) as f64);
        if height < STAIRCASE_CUTOFF {
            break;
        }
        let width = if n % 2 == 1 {
            height - p * libm::pow(q, n as f64)
        } else {
            p * libm::pow(q, (n - 2) as f64) - height
        };
        plateaus.push(height);
        breakpoints.push(breakpoints[n - 1] + width);
        n += 1;
    }
    let a_inf = *breakpoints.last().unwrap();
    AccumulatingStep {
        breakpoints,
        plateaus,
        left: p,
        right: 0.0,
        accumulation: a_inf,
    }
}

/// Staircase of the second problem: `2` left of 1, `1 − (−0.8)^n` on
/// `[a_n, a_{n+1})` with `a_n = 5(1 − 0.8^n)`, `1` beyond 5.
pub fn ex52_staircase() -> AccumulatingStep {
    let mut breakpoints = alloc::vec![5.0 * (1.0 - 0.8)];
    let mut plateaus = Vec::new();
    let mut n = 1;
    loop {
        let r_n = 1.0 - libm::pow(-0.8, n as f64);
        let r_next = 1.0 - libm::pow(-0.8, (n + 1) as f64);
        plateaus.push(r_n);
        breakpoints.push(5.0 * (1.0 - libm::pow(0.8, (n + 1) as f64)));
        if (r_n - r_next).abs() < STAIRCASE_CUTOFF {
            break;
        }
        n += 1;
    }
    AccumulatingStep {
        breakpoints,
        plateaus,
        left: 2.0,
        right: 1.0,
        accumulation: 5.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentName {
    Ex51,
    Ex52,
    Steady,
    Custom,
}

impl ExperimentName {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentName::Ex51 => "ex51",
            ExperimentName::Ex52 => "ex52",
            ExperimentName::Steady => "steady",
            ExperimentName::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: ExperimentName,
    /// The square `[lo, hi]²` (or `[lo, hi]` in 1D).
    pub domain: [f64; 2],
    pub meshes: Vec<usize>,
    pub t_end: f64,
    pub cfl_fraction: f64,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0) {
            return Err(Error::Invalid(alloc::format!(
                "t_end must be positive, got {}",
                self.t_end
            )));
        }
        if self.meshes.is_empty() || self.meshes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid(
                "mesh list must be non-empty and strictly increasing".into(),
            ));
        }
        if !(self.domain[1] > self.domain[0]) {
            return Err(Error::Invalid("domain must have positive length".into()));
        }
        Ok(())
    }
}

/// A reference solution; `time = None` means valid at every time.
#[derive(Clone)]
pub struct ExactSolution {
    pub time: Option<f64>,
    pub eval: SpatialFn,
}

#[derive(Clone)]
pub struct Experiment {
    pub spec: ExperimentSpec,
    /// Two components (`x`, `y`).
    pub model: FluxModel,
    pub initial: SpatialFn,
    pub exact: Option<ExactSolution>,
}

impl fmt::Debug for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Experiment")
            .field("spec", &self.spec)
            .field("model", &self.model)
            .field("exact_time", &self.exact.as_ref().map(|e| e.time))
            .finish_non_exhaustive()
    }
}

const DEFAULT_MESHES: [usize; 4] = [50, 100, 200, 400];

pub fn make_ex51() -> Experiment {
    let (p, q) = (4.0, 0.8);
    let stairs = Arc::new(ex51_staircase(p, q));
    let r_stairs = stairs.clone();
    let mut model = FluxModel::new(
        alloc::vec![GComponent::burgers(), GComponent::sine()],
        BetaMap::affine(1.0, move |pt: Point| r_stairs.value(pt.x)),
    )
    .expect("builtin model is valid");
    if let BetaMap::Affine(b) = model.beta() {
        let mut b = b.clone();
        b.tv_r = Some(stairs.total_variation());
        model = FluxModel::new(model.components().to_vec(), BetaMap::Affine(b)).unwrap();
    }

    let s0 = stairs.clone();
    let initial = move |pt: Point| match s0.piece(pt.x) {
        Piece::Left | Piece::Plateau(1) => -p * q,
        Piece::Plateau(n) if n % 2 == 1 => -p * libm::pow(q, n as f64),
        Piece::Plateau(n) => -p * libm::pow(q, (n - 2) as f64),
        Piece::Right => 0.0,
    };
    let s1 = stairs.clone();
    let exact = move |pt: Point| {
        let x = pt.x;
        match s1.piece(x) {
            Piece::Left | Piece::Plateau(1) => -p * q,
            Piece::Plateau(n) if n % 2 == 1 => x - s1.a(n) - p * libm::pow(q, (n - 1) as f64),
            Piece::Plateau(n) => x - s1.a(n + 1) - p * libm::pow(q, (n - 1) as f64),
            Piece::Right => 0.0,
        }
    };
    Experiment {
        spec: ExperimentSpec {
            name: ExperimentName::Ex51,
            domain: [0.0, 6.0],
            meshes: DEFAULT_MESHES.to_vec(),
            t_end: 1.0,
            cfl_fraction: 1.0,
        },
        model,
        initial: Arc::new(initial),
        exact: Some(ExactSolution {
            time: Some(1.0),
            eval: Arc::new(exact),
        }),
    }
}

fn ex52_model(stairs: Arc<AccumulatingStep>) -> FluxModel {
    let tv = stairs.total_variation();
    let r = stairs.clone();
    let beta = match BetaMap::affine(1.0, move |pt: Point| r.value(pt.x)) {
        BetaMap::Affine(mut b) => {
            b.tv_r = Some(tv);
            BetaMap::Affine(b)
        }
        other => other,
    };
    FluxModel::new(
        alloc::vec![GComponent::plateau_ramp(), GComponent::sine()],
        beta,
    )
    .expect("builtin model is valid")
}

pub fn make_ex52() -> Experiment {
    let stairs = Arc::new(ex52_staircase());
    let model = ex52_model(stairs.clone());
    Experiment {
        spec: ExperimentSpec {
            name: ExperimentName::Ex52,
            domain: [0.0, 6.0],
            meshes: DEFAULT_MESHES.to_vec(),
            t_end: 6.0,
            cfl_fraction: 0.8,
        },
        model,
        initial: Arc::new(|_| 2.0),
        exact: Some(ExactSolution {
            time: Some(6.0),
            eval: Arc::new(move |pt: Point| 4.0 - stairs.value(pt.x)),
        }),
    }
}

/// The second problem's flux started from the steady state `k_3(x) = 3 − r(x)`.
pub fn make_steady() -> Experiment {
    let stairs = Arc::new(ex52_staircase());
    let model = ex52_model(stairs.clone());
    let k = Arc::new(move |pt: Point| 3.0 - stairs.value(pt.x));
    Experiment {
        spec: ExperimentSpec {
            name: ExperimentName::Steady,
            domain: [0.0, 6.0],
            meshes: DEFAULT_MESHES.to_vec(),
            t_end: 1.0,
            cfl_fraction: 1.0,
        },
        model,
        initial: k.clone(),
        exact: Some(ExactSolution {
            time: None,
            eval: k,
        }),
    }
}

/// Builtin experiment by name (`ex51`, `ex52`, `steady`).
pub fn builtin(name: &str) -> Option<Experiment> {
    match name {
        "ex51" => Some(make_ex51()),
        "ex52" => Some(make_ex52()),
        "steady" => Some(make_steady()),
        _ => None,
    }
}

/// Outcome of a single mesh level.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseResult {
    pub mesh: usize,
    pub dim: usize,
    pub dx: f64,
    pub dt: f64,
    pub lambda: f64,
    pub t_end: f64,
    pub steps: usize,
    pub clamped: bool,
    pub l1_error: Option<f64>,
    pub tv_u: f64,
    pub tv_beta: f64,
    pub field: Field,
    pub beta: Field,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub mesh: usize,
    pub dx: f64,
    pub dt: f64,
    pub l1_error: Option<f64>,
    pub tv_u: f64,
    pub tv_beta: f64,
}

impl CaseResult {
    pub fn row(&self) -> ConvergenceRow {
        ConvergenceRow {
            mesh: self.mesh,
            dx: self.dx,
            dt: self.dt,
            l1_error: self.l1_error,
            tv_u: self.tv_u,
            tv_beta: self.tv_beta,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub name: String,
    pub dim: usize,
    pub t_end: f64,
    pub rows: Vec<ConvergenceRow>,
    /// Orders between consecutive rows; empty when errors are unavailable.
    pub eoc: Vec<f64>,
}

impl ConvergenceTable {
    pub fn assemble(name: &str, dim: usize, t_end: f64, rows: Vec<ConvergenceRow>) -> Result<Self> {
        let levels: Option<Vec<(f64, f64)>> =
            rows.iter().map(|r| r.l1_error.map(|e| (r.dx, e))).collect();
        let eoc = match levels {
            Some(l) if l.len() >= 2 => eoc(&l)?,
            _ => Vec::new(),
        };
        Ok(ConvergenceTable {
            name: name.into(),
            dim,
            t_end,
            rows,
            eoc,
        })
    }

    pub fn min_eoc(&self) -> Option<f64> {
        self.eoc.iter().copied().reduce(f64::min)
    }
}

impl Experiment {
    pub fn grid(&self, mesh: usize, dim: usize) -> Result<Grid> {
        let [lo, hi] = self.spec.domain;
        match dim {
            1 => Grid::line(lo, hi - lo, mesh),
            2 => Grid::plane([lo, lo], [hi - lo, hi - lo], [mesh, mesh]),
            _ => Err(Error::Invalid(alloc::format!(
                "dimension must be 1 or 2, got {dim}"
            ))),
        }
    }

    pub fn initial_field(&self, grid: &Grid) -> Result<Field> {
        sample_initial(grid, |p| (self.initial)(p))
    }

    /// Checks that the data do not depend on `y`, sampling `y` across the domain.
    pub fn is_y_independent(&self, grid: &Grid) -> bool {
        let [lo, hi] = self.spec.domain;
        let ys: Vec<f64> = (0..=8).map(|k| lo + (hi - lo) * k as f64 / 8.0).collect();
        (0..grid.nx()).all(|i| {
            let x = grid.x_center(i);
            let at = |y: f64| Point::new(x, y);
            let (b0, b1, u) = (
                self.model.beta().eval(at(0.0), 0.0),
                self.model.beta().eval(at(0.0), 1.0),
                (self.initial)(at(0.0)),
            );
            ys.iter().all(|&y| {
                self.model.beta().eval(at(y), 0.0) == b0
                    && self.model.beta().eval(at(y), 1.0) == b1
                    && (self.initial)(at(y)) == u
            })
        })
    }

    pub fn model_for_dim(&self, dim: usize) -> FluxModel {
        if dim == 1 {
            self.model.restrict_to_x()
        } else {
            self.model.clone()
        }
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig::new(self.spec.t_end).with_cfl_fraction(self.spec.cfl_fraction)
    }

    /// Reference solution at time `t`, if one is known.
    pub fn reference_at(&self, t: f64) -> Option<SpatialFn> {
        if t == 0.0 {
            return Some(self.initial.clone());
        }
        self.exact
            .as_ref()
            .filter(|e| e.time.is_none_or(|te| te == t))
            .map(|e| e.eval.clone())
    }

    pub fn run_case(
        &self,
        mesh: usize,
        dim: usize,
        observer: &mut dyn Observer,
    ) -> Result<CaseResult> {
        self.run_case_with(mesh, dim, &self.solver_config(), observer)
    }

    pub fn run_case_with(
        &self,
        mesh: usize,
        dim: usize,
        config: &SolverConfig,
        observer: &mut dyn Observer,
    ) -> Result<CaseResult> {
        let (model, u0) = self.setup(mesh, dim)?;
        let solver = Solver::new(&model, &u0, config)?;
        let summary = solver.run(u0, observer)?;
        Ok(self.summarize(mesh, &solver, summary))
    }

    /// The flux restricted to `dim` and the sampled initial data.
    pub fn setup(&self, mesh: usize, dim: usize) -> Result<(FluxModel, Field)> {
        let grid = self.grid(mesh, dim)?;
        if dim == 1 && !self.is_y_independent(&grid) {
            return Err(Error::DimensionalityMismatch);
        }
        Ok((self.model_for_dim(dim), self.initial_field(&grid)?))
    }

    /// Errors and total variations of a finished run.
    pub fn summarize(&self, mesh: usize, solver: &Solver<'_>, summary: RunSummary) -> CaseResult {
        let grid = solver.grid();
        let field = summary.field;
        let beta = solver.beta_field(&field);
        let t_end = solver.t_end();
        let l1_error = self
            .reference_at(t_end)
            .map(|exact| l1_to_fn(&field, |p| exact(p)));
        CaseResult {
            mesh,
            dim: grid.dim(),
            dx: grid.dx(),
            dt: summary.dt,
            lambda: summary.dt / grid.dx(),
            t_end,
            steps: summary.steps,
            clamped: summary.clamped,
            l1_error,
            tv_u: total_variation(&field),
            tv_beta: total_variation(&beta),
            field,
            beta,
        }
    }
}

/// Runs every mesh level of the experiment in turn.
pub fn run_convergence(exp: &Experiment, dim: usize) -> Result<ConvergenceTable> {
    exp.spec.validate()?;
    let rows = exp
        .spec
        .meshes
        .iter()
        .map(|&m| exp.run_case(m, dim, &mut Silent).map(|c| c.row()))
        .collect::<Result<Vec<_>>>()?;
    ConvergenceTable::assemble(exp.spec.name.as_str(), dim, exp.spec.t_end, rows)
}

/// One mesh level of the experiment solved in 1D along `x` with `g_1` only.
pub fn run_1d_reference(exp: &Experiment, mesh: usize) -> Result<CaseResult> {
    exp.run_case(mesh, 1, &mut Silent)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ex51_data_values() {
        let e = make_ex51();
        let r = |x: f64| e.model.beta().eval(Point::new(x, 0.0), 0.0);
        assert_eq!(r(0.5), 4.0);
        assert_eq!((e.initial)(Point::new(0.5, 3.0)), -3.2);
        let a_inf = ex51_staircase(4.0, 0.8).accumulation();
        let exact = e.exact.unwrap();
        assert_eq!((exact.eval)(Point::new(a_inf + 1e-9, 1.0)), 0.0);
        assert_eq!(exact.time, Some(1.0));
    }

    #[test]
    fn ex51_first_cell_sample() {
        let e = make_ex51();
        let g = e.grid(6, 1).unwrap();
        assert_eq!(e.initial_field(&g).unwrap().values()[0], -3.2);
    }

    #[test]
    fn ex51_accumulation_point() {
        let s = ex51_staircase(4.0, 0.8);
        // a_∞ = 1 + Σ ã_n = 1 + 2 p (1 − q) / (1 − q²)
        let closed = 1.0 + 2.0 * 4.0 * 0.2 / (1.0 - 0.64);
        assert!(
            (s.accumulation() - closed).abs() < 1e-13,
            "{}",
            s.accumulation() - closed
        );
        assert!(s.plateaus().last().unwrap() >= &STAIRCASE_CUTOFF);
        assert_eq!(s.a(1), 1.0);
        assert!((s.a(2) - 1.8).abs() < 1e-15);
    }

    #[test]
    fn ex52_data_values() {
        let s = ex52_staircase();
        assert_eq!(s.value(0.5), 2.0);
        assert_eq!(s.value(5.5), 1.0);
        assert!((s.a(2) - 1.8).abs() < 1e-15);
        assert!((s.plateaus()[1] - 0.36).abs() < 1e-15);
        assert_eq!(s.value(s.a(2)), s.plateaus()[1]);
        let e = make_ex52();
        assert_eq!((e.initial)(Point::new(1.3, 4.0)), 2.0);
    }

    #[test]
    fn staircase_rejects_bad_breakpoints() {
        assert!(
            AccumulatingStep::new(alloc::vec![1.0, 1.0], alloc::vec![0.0], 0.0, 0.0, 2.0).is_err()
        );
        assert!(
            AccumulatingStep::new(alloc::vec![1.0, 2.0], alloc::vec![], 0.0, 0.0, 2.0).is_err()
        );
        assert!(
            AccumulatingStep::new(alloc::vec![1.0, 3.0], alloc::vec![0.0], 0.0, 0.0, 2.0).is_err()
        );
    }

    #[test]
    fn spec_validation() {
        let mut s = make_ex51().spec;
        assert!(s.validate().is_ok());
        s.meshes = alloc::vec![100, 50];
        assert!(s.validate().is_err());
    }

    #[test]
    fn steady_problem_has_zero_error() {
        let mut e = make_steady();
        e.spec.meshes = alloc::vec![8, 16];
        e.spec.t_end = 0.5;
        let t = run_convergence(&e, 2).unwrap();
        assert!(
            t.rows.iter().all(|r| r.l1_error == Some(0.0)),
            "{:?}",
            t.rows
        );
        assert_eq!(t.eoc, alloc::vec![f64::INFINITY]);
    }

    #[test]
    fn y_dependent_data_has_no_1d_reduction() {
        let mut e = make_ex52();
        e.initial = Arc::new(|p: Point| p.y);
        assert_eq!(
            run_1d_reference(&e, 8).unwrap_err(),
            Error::DimensionalityMismatch
        );
    }
}
