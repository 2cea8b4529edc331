//! Seeded randomized checks of the scheme's structural guarantees on small
//! grids: monotonicity, L1 contraction, TVD in `β`, the `|u| ≤ M` bound, the
//! discrete entropy inequality and conservation.

use std::fmt::Write as _;
use std::sync::Arc;

use panov_fv_core::diagnostics::{
    alpha_samples, conservation_defect, entropy_residual, l1_distance, periodic_total_variation,
    total_variation, ALPHA_SAMPLES,
};
use panov_fv_core::flux::MonotoneBeta;
use panov_fv_core::solver::{estimate_bounds, StepOutcome};
use panov_fv_core::{
    Axis, BetaMap, BoundaryPolicy, Field, FluxModel, GComponent, Grid, Point, Result, Solver,
    SolverConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Relative tolerance shared by every check.
pub const TOLERANCE: f64 = 1e-12;
pub const MAX_CELLS: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub trials: usize,
    /// Largest number of cells per axis (at most [`MAX_CELLS`]).
    pub cells: usize,
    pub steps: usize,
    /// Fixed `Δt/Δx` instead of the CFL-limited step.
    pub lambda: Option<f64>,
    /// `g` components to draw from.
    pub g_names: Vec<String>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 1,
            trials: 200,
            cells: 16,
            steps: 3,
            lambda: None,
            g_names: vec!["burgers".into(), "sin".into(), "ex52_g1".into()],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    Monotonicity,
    L1Contraction,
    TvdBeta,
    LinfBound,
    Entropy,
    Conservation,
}

impl Property {
    pub const ALL: [Property; 6] = [
        Property::Monotonicity,
        Property::L1Contraction,
        Property::TvdBeta,
        Property::LinfBound,
        Property::Entropy,
        Property::Conservation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Monotonicity => "monotonicity",
            Property::L1Contraction => "l1_contraction",
            Property::TvdBeta => "tvd_beta",
            Property::LinfBound => "linf_bound",
            Property::Entropy => "entropy",
            Property::Conservation => "conservation",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyStats {
    pub property: Property,
    pub checks: usize,
    pub failures: usize,
    /// Largest measured violation, scaled so that a value above [`TOLERANCE`] fails.
    pub worst: f64,
}

/// A failing instance, enough to replay it.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub property: Property,
    pub trial: usize,
    pub step: usize,
    pub alpha: Option<f64>,
    pub measure: f64,
    pub setup: String,
    pub before: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub options: SuiteOptions,
    pub stats: Vec<PropertyStats>,
    /// First failure of each property.
    pub witnesses: Vec<Witness>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.stats.iter().all(|s| s.failures == 0)
    }

    pub fn stats(&self, p: Property) -> &PropertyStats {
        self.stats
            .iter()
            .find(|s| s.property == p)
            .expect("all properties tracked")
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "seed {} trials {} cells<={}",
            self.options.seed, self.options.trials, self.options.cells
        );
        for s in &self.stats {
            let verdict = if s.failures == 0 { "PASS" } else { "FAIL" };
            let _ = writeln!(
                out,
                "{verdict} {:<15} checks {:>6} failures {:>4} worst {:.3e}",
                s.property.name(),
                s.checks,
                s.failures,
                s.worst
            );
        }
        for w in &self.witnesses {
            let _ = writeln!(
                out,
                "witness {} trial {} step {} alpha {:?} measure {:.3e} [{}] u = {:?}",
                w.property.name(),
                w.trial,
                w.step,
                w.alpha,
                w.measure,
                w.setup,
                w.before
            );
        }
        out
    }
}

struct Trial {
    grid: Grid,
    model: FluxModel,
    periodic: bool,
    setup: String,
    u: Vec<f64>,
    bump: Vec<f64>,
    v: Vec<f64>,
}

fn random_values(rng: &mut ChaCha8Rng, n: usize, jump_prob: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut cur = rng.gen_range(-2.0..2.0);
    for _ in 0..n {
        if rng.gen_bool(jump_prob) {
            cur = rng.gen_range(-2.0..2.0);
        }
        out.push(cur);
    }
    out
}

fn cell_lookup(values: Vec<f64>, grid: &Grid) -> impl Fn(Point) -> f64 + Send + Sync + 'static {
    let (nx, ny) = (grid.nx(), grid.ny());
    let (ox, oy, dx, dy) = (
        grid.origin(Axis::X),
        grid.origin(Axis::Y),
        grid.dx(),
        grid.dy(),
    );
    move |p: Point| {
        let i = (((p.x - ox) / dx).floor() as isize).clamp(0, nx as isize - 1) as usize;
        let j = if ny == 1 {
            0
        } else {
            (((p.y - oy) / dy).floor() as isize).clamp(0, ny as isize - 1) as usize
        };
        values[j * nx + i]
    }
}

fn draw_trial(rng: &mut ChaCha8Rng, opts: &SuiteOptions) -> Trial {
    let dim = if rng.gen_bool(0.5) { 1 } else { 2 };
    let cells = opts.cells.clamp(4, MAX_CELLS);
    let nx = rng.gen_range(4..=cells);
    let ny = if dim == 1 {
        1
    } else {
        rng.gen_range(4..=cells)
    };
    let h = rng.gen_range(0.05..0.5);
    let grid = if dim == 1 {
        Grid::line(0.0, h * nx as f64, nx).unwrap()
    } else {
        Grid::plane([0.0, 0.0], [h * nx as f64, h * ny as f64], [nx, ny]).unwrap()
    };
    let n = nx * ny;
    let pick = |rng: &mut ChaCha8Rng| opts.g_names[rng.gen_range(0..opts.g_names.len())].clone();
    let names: Vec<String> = (0..dim).map(|_| pick(rng)).collect();
    let gs = names
        .iter()
        .map(|g| GComponent::builtin(g).expect("validated g name"))
        .collect();
    let r = random_values(rng, n, 0.4);
    let cubic = dim == 1 && rng.gen_bool(0.3);
    let (beta, kind) = if cubic {
        let s = cell_lookup(r, &grid);
        let beta = MonotoneBeta {
            eval: Arc::new(move |p, u| u * u * u + u + s(p)),
            lower: Arc::new(|u| u * u * u + u - 2.0),
            upper: Arc::new(|u| u * u * u + u + 2.0),
            k3: 1.0,
            k1: Arc::new(|m| 3.0 * m * m + 1.0),
        };
        (BetaMap::Monotone(beta), "beta=u^3+u+s(x)".to_string())
    } else {
        let a = rng.gen_range(0.5..2.0);
        (
            BetaMap::affine(a, cell_lookup(r, &grid)),
            format!("beta={a:.3}u+r(x)"),
        )
    };
    let model = FluxModel::new(gs, beta).expect("valid random model");
    let periodic = rng.gen_bool(0.5);
    let u = random_values(rng, n, 0.6);
    let bump = (0..n)
        .map(|_| {
            if rng.gen_bool(0.5) {
                rng.gen_range(0.0..1.0)
            } else {
                0.0
            }
        })
        .collect();
    let v = random_values(rng, n, 0.6);
    let setup = format!(
        "{nx}x{ny} h={h:.3} g={names:?} {kind} {}",
        if periodic { "periodic" } else { "outflow" }
    );
    Trial {
        grid,
        model,
        periodic,
        setup,
        u,
        bump,
        v,
    }
}

struct Tally {
    stats: Vec<PropertyStats>,
    witnesses: Vec<Witness>,
}

impl Tally {
    fn record(&mut self, p: Property, measure: f64, witness: impl FnOnce() -> Witness) {
        let s = self.stats.iter_mut().find(|s| s.property == p).unwrap();
        s.checks += 1;
        s.worst = s.worst.max(measure);
        if !(measure <= TOLERANCE) {
            s.failures += 1;
            if !self.witnesses.iter().any(|w| w.property == p) {
                self.witnesses.push(witness());
            }
        }
    }
}

fn field(grid: &Grid, values: Vec<f64>) -> Field {
    Field::new(grid.clone(), values, 0.0).expect("finite random data")
}

/// States of one step in order: before, (half,) after.
fn chain<'a>(before: &'a Field, out: &'a StepOutcome) -> Vec<&'a Field> {
    let mut c = vec![before];
    c.extend(out.half.as_ref());
    c.push(&out.next);
    c
}

pub fn run_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut tally = Tally {
        stats: Property::ALL
            .iter()
            .map(|&p| PropertyStats {
                property: p,
                checks: 0,
                failures: 0,
                worst: 0.0,
            })
            .collect(),
        witnesses: Vec::new(),
    };
    for trial in 0..opts.trials {
        let t = draw_trial(&mut rng, opts);
        run_trial(trial, &t, opts, &mut tally)?;
    }
    Ok(SuiteReport {
        options: opts.clone(),
        stats: tally.stats,
        witnesses: tally.witnesses,
    })
}

fn run_trial(trial: usize, t: &Trial, opts: &SuiteOptions, tally: &mut Tally) -> Result<()> {
    let grid = &t.grid;
    let u0 = field(grid, t.u.clone());
    let w0 = field(grid, t.u.iter().zip(&t.bump).map(|(a, b)| a + b).collect());
    let v0 = field(grid, t.v.clone());
    let bounds = estimate_bounds(&t.model, &u0)?
        .merge(estimate_bounds(&t.model, &w0)?)
        .merge(estimate_bounds(&t.model, &v0)?);
    let config = |periodic: bool| {
        let mut c = SolverConfig::new(1.0);
        if let Some(l) = opts.lambda {
            c = c.with_lambda(l);
        }
        c.with_boundary(if periodic {
            BoundaryPolicy::Periodic
        } else {
            BoundaryPolicy::Outflow
        })
    };
    let solver = Solver::with_bounds(&t.model, grid.clone(), &config(t.periodic), bounds)?;
    // Contraction is a property of the conservative (periodic) closure.
    let periodic = Solver::with_bounds(&t.model, grid.clone(), &config(true), bounds)?;
    let alphas = alpha_samples(&bounds, ALPHA_SAMPLES);
    let tv = |f: &Field| {
        let b = solver.beta_field(f);
        if t.periodic {
            periodic_total_variation(&b)
        } else {
            total_variation(&b)
        }
    };
    let witness =
        |p: Property, step: usize, alpha: Option<f64>, measure: f64, before: &Field| Witness {
            property: p,
            trial,
            step,
            alpha,
            measure,
            setup: t.setup.clone(),
            before: before.values().to_vec(),
        };

    let (mut u, mut w, mut a, mut b) = (u0.clone(), w0, u0, v0);
    for step in 0..opts.steps {
        let dt = solver.dt();
        let out_u = solver.advance(&u, dt)?;
        let out_w = solver.advance(&w, dt)?;

        let mono = out_u
            .next
            .values()
            .iter()
            .zip(out_w.next.values())
            .map(|(x, y)| x - y)
            .fold(0.0_f64, f64::max)
            / (1.0 + w.max_abs());
        tally.record(Property::Monotonicity, mono, || {
            witness(Property::Monotonicity, step, None, mono, &u)
        });

        let (na, nb) = (
            periodic.advance(&a, dt)?.next,
            periodic.advance(&b, dt)?.next,
        );
        let before = l1_distance(&a, &b)?;
        let after = l1_distance(&na, &nb)?;
        let grow = (after - before).max(0.0) / before.max(f64::MIN_POSITIVE);
        let grow = if after - before <= 1e-15 { 0.0 } else { grow };
        tally.record(Property::L1Contraction, grow, || {
            witness(Property::L1Contraction, step, None, grow, &a)
        });

        let states = chain(&u, &out_u);
        for pair in states.windows(2) {
            let (t0, t1) = (tv(pair[0]), tv(pair[1]));
            let excess = if t1 - t0 <= 1e-14 {
                0.0
            } else {
                (t1 - t0) / t0.max(f64::MIN_POSITIVE)
            };
            tally.record(Property::TvdBeta, excess, || {
                witness(Property::TvdBeta, step, None, excess, pair[0])
            });
        }
        for f in &states[1..] {
            let over = (f.max_abs() - bounds.m_bound).max(0.0) / (1.0 + bounds.m_bound);
            tally.record(Property::LinfBound, over, || {
                witness(Property::LinfBound, step, None, over, &u)
            });
        }

        let scale = 1.0 + u.max_abs();
        let axes = grid.axes();
        for (pair, &axis) in states.windows(2).zip(axes) {
            let r = entropy_residual(&solver, axis, pair[0], pair[1], dt, &alphas)? / scale;
            let worst_alpha = || {
                alphas.iter().copied().max_by(|x, y| {
                    let rx = entropy_residual(&solver, axis, pair[0], pair[1], dt, &[*x])
                        .unwrap_or(f64::NAN);
                    let ry = entropy_residual(&solver, axis, pair[0], pair[1], dt, &[*y])
                        .unwrap_or(f64::NAN);
                    rx.total_cmp(&ry)
                })
            };
            tally.record(Property::Entropy, r, || {
                witness(Property::Entropy, step, worst_alpha(), r, pair[0])
            });
        }

        let defect = conservation_defect(&u, &out_u);
        tally.record(Property::Conservation, defect, || {
            witness(Property::Conservation, step, None, defect, &u)
        });

        u = out_u.next;
        w = out_w.next;
        a = na;
        b = nb;
    }
    Ok(())
}
