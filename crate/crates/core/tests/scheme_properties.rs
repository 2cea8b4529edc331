//! Structural guarantees of the scheme on small random problems.

use std::sync::Arc;

use panov_fv_core::diagnostics::{
    alpha_samples, l1_distance, periodic_total_variation, step_entropy_residual, total_variation,
    tv_1d, tv_2d, ALPHA_SAMPLES,
};
use panov_fv_core::flux::MonotoneBeta;
use panov_fv_core::solver::estimate_bounds;
use panov_fv_core::{
    BetaMap, BoundaryPolicy, Field, FluxModel, GComponent, Grid, Point, Solver, SolverConfig,
};
use proptest::prelude::*;

const H: f64 = 0.25;

#[derive(Debug, Clone)]
struct Case {
    nx: usize,
    ny: usize,
    gx: &'static str,
    gy: &'static str,
    r: Vec<f64>,
    u: Vec<f64>,
    v: Vec<f64>,
    periodic: bool,
}

impl Case {
    fn grid(&self) -> Grid {
        if self.ny == 1 {
            Grid::line(0.0, H * self.nx as f64, self.nx).unwrap()
        } else {
            Grid::plane(
                [0.0, 0.0],
                [H * self.nx as f64, H * self.ny as f64],
                [self.nx, self.ny],
            )
            .unwrap()
        }
    }

    fn cell_r(&self) -> impl Fn(Point) -> f64 + Send + Sync + 'static {
        let (r, nx, ny) = (self.r.clone(), self.nx, self.ny);
        move |p: Point| {
            let i = ((p.x / H).floor() as isize).clamp(0, nx as isize - 1) as usize;
            let j = ((p.y / H).floor() as isize).clamp(0, ny as isize - 1) as usize;
            r[j * nx + i]
        }
    }

    fn affine(&self, a: f64) -> FluxModel {
        let mut gs = vec![GComponent::builtin(self.gx).unwrap()];
        if self.ny > 1 {
            gs.push(GComponent::builtin(self.gy).unwrap());
        }
        FluxModel::new(gs, BetaMap::affine(a, self.cell_r())).unwrap()
    }

    /// `β(x, u) = u³ + u + s(x)` with `|s| ≤ 2`.
    fn cubic(&self) -> FluxModel {
        let s = self.cell_r();
        let beta = MonotoneBeta {
            eval: Arc::new(move |p, u| u * u * u + u + s(p)),
            lower: Arc::new(|u| u * u * u + u - 2.0),
            upper: Arc::new(|u| u * u * u + u + 2.0),
            k3: 1.0,
            k1: Arc::new(|m| 3.0 * m * m + 1.0),
        };
        FluxModel::new(
            vec![GComponent::builtin(self.gx).unwrap()],
            BetaMap::Monotone(beta),
        )
        .unwrap()
    }

    fn config(&self) -> SolverConfig {
        let c = SolverConfig::new(1.0).with_cfl_fraction(1.0);
        if self.periodic {
            c.with_boundary(BoundaryPolicy::Periodic)
        } else {
            c
        }
    }

    fn fields(&self) -> (Field, Field) {
        let g = self.grid();
        (
            Field::new(g.clone(), self.u.clone(), 0.0).unwrap(),
            Field::new(g, self.v.clone(), 0.0).unwrap(),
        )
    }

    /// Solver whose bounds cover both fields.
    fn solver<'m>(&self, model: &'m FluxModel, a: &Field, b: &Field) -> Solver<'m> {
        let bounds = estimate_bounds(model, a)
            .unwrap()
            .merge(estimate_bounds(model, b).unwrap());
        Solver::with_bounds(model, self.grid(), &self.config(), bounds).unwrap()
    }
}

fn case(max_dim: usize) -> impl Strategy<Value = Case> {
    let gs = prop::sample::select(vec!["burgers", "sin", "ex52_g1"]);
    (
        1..=max_dim,
        4usize..=12,
        4usize..=12,
        gs.clone(),
        gs,
        any::<bool>(),
    )
        .prop_flat_map(|(dim, nx, ny, gx, gy, periodic)| {
            let ny = if dim == 1 { 1 } else { ny };
            let n = nx * ny;
            let vals = |lo: f64, hi: f64| prop::collection::vec(lo..hi, n);
            (vals(-2.0, 2.0), vals(-2.0, 2.0), vals(-2.0, 2.0)).prop_map(move |(r, u, v)| Case {
                nx,
                ny,
                gx,
                gy,
                r,
                u,
                v,
                periodic,
            })
        })
}

fn scale(f: &Field) -> f64 {
    1.0 + f.max_abs()
}

fn check_monotone(c: &Case, model: &FluxModel) -> Result<(), TestCaseError> {
    let (v, _) = c.fields();
    let bump: Vec<f64> = c.v.iter().map(|d| d.abs()).collect();
    let w = Field::new(
        v.grid().clone(),
        v.values().iter().zip(&bump).map(|(a, b)| a + b).collect(),
        0.0,
    )
    .unwrap();
    let s = c.solver(model, &v, &w);
    let (sv, sw) = (
        s.advance(&v, s.dt()).unwrap().next,
        s.advance(&w, s.dt()).unwrap().next,
    );
    for (a, b) in sv.values().iter().zip(sw.values()) {
        prop_assert!(*a <= *b + 1e-12 * scale(&w), "{a} > {b}");
    }
    Ok(())
}

/// Contraction needs a conservative closure, so the data are taken periodic.
fn check_contraction(c: &Case, model: &FluxModel) -> Result<(), TestCaseError> {
    let c = &Case {
        periodic: true,
        ..c.clone()
    };
    let (u, v) = c.fields();
    let s = c.solver(model, &u, &v);
    let before = l1_distance(&u, &v).unwrap();
    let after = l1_distance(
        &s.advance(&u, s.dt()).unwrap().next,
        &s.advance(&v, s.dt()).unwrap().next,
    )
    .unwrap();
    prop_assert!(
        after <= before * (1.0 + 1e-12) + 1e-15,
        "{after} > {before}"
    );
    Ok(())
}

fn check_tvd(c: &Case, model: &FluxModel) -> Result<(), TestCaseError> {
    let (u, _) = c.fields();
    let s = Solver::new(model, &u, &c.config()).unwrap();
    let tvb = |f: &Field| {
        let b = s.beta_field(f);
        if c.periodic {
            periodic_total_variation(&b)
        } else {
            total_variation(&b)
        }
    };
    let mut field = u;
    for _ in 0..3 {
        let out = s.advance(&field, s.dt()).unwrap();
        let mut chain = vec![&field];
        chain.extend(out.half.as_ref());
        chain.push(&out.next);
        for w in chain.windows(2) {
            let (t0, t1) = (tvb(w[0]), tvb(w[1]));
            prop_assert!(t1 <= t0 * (1.0 + 1e-12) + 1e-14, "TV(β) grew {t0} -> {t1}");
        }
        field = out.next;
    }
    Ok(())
}

fn check_entropy_and_bounds(c: &Case, model: &FluxModel) -> Result<(), TestCaseError> {
    let (u, _) = c.fields();
    let s = Solver::new(model, &u, &c.config()).unwrap();
    let alphas = alpha_samples(s.bounds(), ALPHA_SAMPLES);
    let m = s.bounds().m_bound;
    let mut field = u;
    for _ in 0..3 {
        let out = s.advance(&field, s.dt()).unwrap();
        let residual = step_entropy_residual(&s, &field, &out, &alphas).unwrap();
        prop_assert!(
            residual <= 1e-12 * scale(&field),
            "entropy residual {residual}"
        );
        for f in out.half.iter().chain([&out.next]) {
            prop_assert!(f.max_abs() <= m + 1e-12, "|u| = {} > M = {m}", f.max_abs());
        }
        field = out.next;
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn monotone_affine(c in case(2)) { check_monotone(&c, &c.affine(1.0))?; }

    #[test]
    fn monotone_cubic(c in case(1)) { check_monotone(&c, &c.cubic())?; }

    #[test]
    fn l1_contraction_affine(c in case(2), a in 0.5..2.0f64) { check_contraction(&c, &c.affine(a))?; }

    #[test]
    fn l1_contraction_cubic(c in case(1)) { check_contraction(&c, &c.cubic())?; }

    #[test]
    fn tvd_in_beta_affine(c in case(2), a in 0.5..2.0f64) { check_tvd(&c, &c.affine(a))?; }

    #[test]
    fn tvd_in_beta_cubic(c in case(1)) { check_tvd(&c, &c.cubic())?; }

    #[test]
    fn entropy_and_linf_affine(c in case(2)) { check_entropy_and_bounds(&c, &c.affine(1.0))?; }

    #[test]
    fn entropy_and_linf_cubic(c in case(1)) { check_entropy_and_bounds(&c, &c.cubic())?; }

    #[test]
    fn conservation(c in case(2)) {
        let model = c.affine(1.0);
        let (u, _) = c.fields();
        let s = Solver::new(&model, &u, &c.config()).unwrap();
        let out = s.advance(&u, s.dt()).unwrap();
        let mass = |f: &Field| f.values().iter().sum::<f64>() * f.grid().cell_volume();
        let size = u.values().iter().map(|x| x.abs()).sum::<f64>() * u.grid().cell_volume() + 1.0;
        let expected = if c.periodic { 0.0 } else { out.boundary_mass_change };
        if c.periodic {
            prop_assert_eq!(out.boundary_mass_change, 0.0);
        }
        let defect = (mass(&out.next) - mass(&u) - expected).abs() / size;
        prop_assert!(defect <= 1e-12, "defect {defect}");
    }

    #[test]
    fn steady_states_are_fixed(c in case(2), alpha in -3.0..3.0f64, a in 0.5..2.0f64) {
        let model = c.affine(a);
        let grid = c.grid();
        let k = Field::new(grid.clone(), grid.centers().map(|p| model.beta().k_alpha(p, alpha).unwrap()).collect(), 0.0).unwrap();
        let s = Solver::new(&model, &k, &c.config()).unwrap();
        let mut f = k.clone();
        for _ in 0..10 {
            f = s.advance(&f, s.dt()).unwrap().next;
        }
        for (x, y) in f.values().iter().zip(k.values()) {
            prop_assert!((x - y).abs() <= 1e-12 * scale(&k));
        }
    }

    #[test]
    fn beta_marching_matches_recomputed_beta(c in case(2), a in 0.5..2.0f64) {
        // β^{new} = β^{old} − a λ (F_{+} − F_{−}) sweep by sweep.
        let model = c.affine(a);
        let (u, _) = c.fields();
        let s = Solver::new(&model, &u, &c.config()).unwrap();
        let out = s.advance(&u, s.dt()).unwrap();
        let b0 = s.beta_values(u.values());
        let mut chain = vec![&u];
        chain.extend(out.half.as_ref());
        chain.push(&out.next);
        for (w, axis) in chain.windows(2).zip(c.grid().axes()) {
            let (before, after) = (s.beta_values(w[0].values()), s.beta_values(w[1].values()));
            let (du, _) = s.sweep(*axis, w[0].values(), s.dt()).unwrap();
            for k in 0..before.len() {
                let marched = before[k] + a * (du[k] - w[0].values()[k]);
                prop_assert!((marched - after[k]).abs() <= 1e-12 * (1.0 + after[k].abs()));
            }
        }
        prop_assert_eq!(b0.len(), u.values().len());
    }

    #[test]
    fn k_alpha_round_trip(c in case(1), alpha in -20.0..20.0f64) {
        let affine = c.affine(1.7);
        let cubic = c.cubic();
        for p in c.grid().centers() {
            let k = affine.beta().k_alpha(p, alpha).unwrap();
            prop_assert!((affine.beta().eval(p, k) - alpha).abs() <= 4.0 * f64::EPSILON * (1.0 + alpha.abs()));
            let k = cubic.beta().k_alpha(p, alpha).unwrap();
            prop_assert!((cubic.beta().eval(p, k) - alpha).abs() <= 1e-12 * alpha.abs().max(1.0));
        }
    }

    #[test]
    fn beta_bounded_by_envelopes(c in case(1), u in -5.0..5.0f64, d in 1e-6..1.0f64) {
        let model = c.cubic();
        let BetaMap::Monotone(b) = model.beta() else { unreachable!() };
        for p in c.grid().centers() {
            let v = model.beta().eval(p, u);
            prop_assert!((b.lower)(u) <= v && v <= (b.upper)(u));
            prop_assert!(model.beta().eval(p, u + d) - v >= b.k3 * d * (1.0 - 1e-9));
        }
    }

    #[test]
    fn affine_beta_differences_are_r_differences(c in case(2), u in -5.0..5.0f64) {
        let model = c.affine(1.3);
        let BetaMap::Affine(b) = model.beta() else { unreachable!() };
        let grid = c.grid();
        let p0 = grid.center_of(0);
        for p in grid.centers() {
            let lhs = model.beta().eval(p, u) - model.beta().eval(p0, u);
            prop_assert!((lhs - ((b.r)(p) - (b.r)(p0))).abs() <= 1e-14 * (1.0 + u.abs()) * 8.0);
        }
    }

    #[test]
    fn l1_distance_is_a_metric(c in case(2), w in prop::collection::vec(-2.0..2.0f64, 144)) {
        let (u, v) = c.fields();
        let w = Field::new(u.grid().clone(), w[..u.values().len()].to_vec(), 0.0).unwrap();
        let d = |a: &Field, b: &Field| l1_distance(a, b).unwrap();
        prop_assert_eq!(d(&u, &u), 0.0);
        prop_assert_eq!(d(&u, &v), d(&v, &u));
        prop_assert!(d(&u, &w) <= d(&u, &v) + d(&v, &w) + 1e-14);
    }

    #[test]
    fn tv_2d_of_y_constant_field(row in prop::collection::vec(-3.0..3.0f64, 4..20), ny in 2usize..10) {
        let nx = row.len();
        let grid = Grid::plane([0.0, 0.0], [6.0, 6.0], [nx, ny]).unwrap();
        let values: Vec<f64> = (0..ny).flat_map(|_| row.iter().copied()).collect();
        let f = Field::new(grid, values, 0.0).unwrap();
        let expected = 6.0 * tv_1d(&row);
        prop_assert!((tv_2d(&f) - expected).abs() <= 1e-12 * (1.0 + expected));
    }
}

#[test]
fn step_variation_stays_bounded_on_both_examples() {
    use panov_fv_core::diagnostics::Monitor;
    use panov_fv_core::experiments::{make_ex51, make_ex52};
    for exp in [make_ex51(), make_ex52()] {
        for m in [50, 100] {
            let grid = exp.grid(m, 1).unwrap();
            let model = exp.model_for_dim(1);
            let u0 = exp.initial_field(&grid).unwrap();
            let s = Solver::new(&model, &u0, &exp.solver_config()).unwrap();
            let mut mon = Monitor::new(&s).entropy_stride(25);
            s.run(u0, &mut mon).unwrap();
            let report = mon.finish().unwrap();
            let first = report.step_variation[0];
            let worst = report.step_variation.iter().copied().fold(0.0, f64::max);
            assert!(
                worst <= 10.0 * first,
                "{:?} M={m}: {worst} vs {first}",
                exp.spec.name
            );
            assert!(report.entropy_violation <= 1e-12 * (1.0 + report.max_abs_u));
            assert!(report.tvd_excess <= 1e-12);
        }
    }
}

#[test]
fn time_continuity_modulus_scales_like_sqrt_dt() {
    use panov_fv_core::diagnostics::Monitor;
    use panov_fv_core::experiments::make_ex51;
    let exp = make_ex51();
    let mut ratios = Vec::new();
    for m in [50, 100, 200] {
        let grid = exp.grid(m, 1).unwrap();
        let model = exp.model_for_dim(1);
        let u0 = exp.initial_field(&grid).unwrap();
        let s = Solver::new(&model, &u0, &exp.solver_config()).unwrap();
        let mut mon = Monitor::new(&s)
            .entropy_stride(usize::MAX)
            .keep_snapshots(&u0);
        s.run(u0, &mut mon).unwrap();
        let nu = mon.finish().unwrap().nu.unwrap();
        ratios.push(nu / s.dt().sqrt());
    }
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(l, h), &r| (l.min(r), h.max(r)));
    assert!(hi <= 4.0 * lo && hi.is_finite(), "{ratios:?}");
}
