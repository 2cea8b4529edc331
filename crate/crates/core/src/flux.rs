//! Fluxes of the composite form `A_i(x, u) = g_i(β(x, u))`.
//!
//! The Godunov flux of a scalar `g` is an exact extremum over an interval:
//!
//! ```text
//!     ḡ(p, q) = min g on [p, q]   if p ≤ q
//!               max g on [q, p]   if p ≥ q
//! ```
//!
//! Each [`GComponent`] carries the interior local extrema of `g`, so the
//! extremum is the best of `g(p)`, `g(q)` and `g` at the critical points
//! inside the interval. No numerical optimisation is involved.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::grid::{Axis, Grid, Point};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type SpatialFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
pub type BetaFn = Arc<dyn Fn(Point, f64) -> f64 + Send + Sync>;

/// Interior local extrema of a `g` component. Between consecutive points
/// (and outside the extreme ones) `g` must be monotone.
#[derive(Debug, Clone, PartialEq)]
pub enum CriticalPoints {
    None,
    /// Sorted, deduplicated.
    Listed(Vec<f64>),
    /// `first + k·spacing` for all integers `k`; `g` is assumed to have
    /// period `2·spacing` so two consecutive points realise every extremum.
    Periodic {
        first: f64,
        spacing: f64,
    },
}

impl CriticalPoints {
    pub fn listed(mut points: Vec<f64>) -> Self {
        points.sort_by(f64::total_cmp);
        points.dedup();
        CriticalPoints::Listed(points)
    }

    /// Calls `visit` for critical points strictly inside `(lo, hi)`.
    #[inline]
    pub fn for_each_inside(&self, lo: f64, hi: f64, mut visit: impl FnMut(f64)) {
        match self {
            CriticalPoints::None => {}
            CriticalPoints::Listed(points) => {
                let start = points.partition_point(|&c| c <= lo);
                for &c in points[start..].iter().take_while(|&&c| c < hi) {
                    visit(c);
                }
            }
            CriticalPoints::Periodic { first, spacing } => {
                let mut k = libm::floor((lo - first) / spacing);
                let mut c = first + k * spacing;
                while c <= lo {
                    k += 1.0;
                    c = first + k * spacing;
                }
                for _ in 0..2 {
                    if c >= hi {
                        break;
                    }
                    visit(c);
                    k += 1.0;
                    c = first + k * spacing;
                }
            }
        }
    }
}

#[derive(Clone)]
pub enum Lipschitz {
    /// `M ↦` Lipschitz bound on `[−M, M]`.
    Bound(ScalarFn),
    /// Forward differences on 10⁴ uniform samples of `[−M, M]`, inflated by 5%.
    Sampled,
}

const LIPSCHITZ_SAMPLES: usize = 10_000;
const LIPSCHITZ_SAFETY: f64 = 1.05;

#[derive(Clone)]
pub struct GComponent {
    name: String,
    eval: ScalarFn,
    critical: CriticalPoints,
    lipschitz: Lipschitz,
}

impl fmt::Debug for GComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GComponent")
            .field("name", &self.name)
            .field("critical", &self.critical)
            .finish_non_exhaustive()
    }
}

impl GComponent {
    pub const BUILTIN_NAMES: &'static [&'static str] = &["burgers", "sin", "ex52_g1", "zero"];

    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        critical: CriticalPoints,
        lipschitz: Lipschitz,
    ) -> Self {
        GComponent {
            name: name.into(),
            eval: Arc::new(eval),
            critical,
            lipschitz,
        }
    }

    /// `g(z) = z²/2`.
    pub fn burgers() -> Self {
        GComponent::new(
            "burgers",
            |z| 0.5 * z * z,
            CriticalPoints::listed(alloc::vec![0.0]),
            Lipschitz::Bound(Arc::new(|m: f64| m.abs())),
        )
    }

    /// `g(z) = sin z`.
    pub fn sine() -> Self {
        GComponent::new(
            "sin",
            libm::sin,
            CriticalPoints::Periodic {
                first: core::f64::consts::FRAC_PI_2,
                spacing: core::f64::consts::PI,
            },
            Lipschitz::Bound(Arc::new(|_| 1.0)),
        )
    }

    /// `g(z) = −z − 1` for `z ≤ −1`, `0` on `[−1, 0]`, `z` for `z ≥ 0`.
    pub fn plateau_ramp() -> Self {
        GComponent::new(
            "ex52_g1",
            |z| {
                if z <= -1.0 {
                    -z - 1.0
                } else if z <= 0.0 {
                    0.0
                } else {
                    z
                }
            },
            CriticalPoints::listed(alloc::vec![-1.0, 0.0]),
            Lipschitz::Bound(Arc::new(|_| 1.0)),
        )
    }

    pub fn zero() -> Self {
        GComponent::new(
            "zero",
            |_| 0.0,
            CriticalPoints::None,
            Lipschitz::Bound(Arc::new(|_| 0.0)),
        )
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "burgers" => Some(Self::burgers()),
            "sin" => Some(Self::sine()),
            "ex52_g1" => Some(Self::plateau_ramp()),
            "zero" => Some(Self::zero()),
            _ => None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn eval(&self, z: f64) -> f64 {
        (self.eval)(z)
    }

    pub fn critical_points(&self) -> &CriticalPoints {
        &self.critical
    }

    pub fn lipschitz_on(&self, m: f64) -> f64 {
        match &self.lipschitz {
            Lipschitz::Bound(bound) => bound(m),
            Lipschitz::Sampled => sampled_lipschitz(|z| self.eval(z), m),
        }
    }
}

fn sampled_lipschitz(f: impl Fn(f64) -> f64, m: f64) -> f64 {
    let m = if m > 0.0 { m } else { f64::EPSILON };
    let h = 2.0 * m / LIPSCHITZ_SAMPLES as f64;
    let mut prev = f(-m);
    let mut best: f64 = 0.0;
    for k in 1..=LIPSCHITZ_SAMPLES {
        let next = f(-m + k as f64 * h);
        best = best.max((next - prev).abs() / h);
        prev = next;
    }
    best * LIPSCHITZ_SAFETY
}

/// Exact Godunov flux `ḡ(p, q)` of a scalar component.
#[inline]
pub fn godunov_scalar_flux(g: &GComponent, p: f64, q: f64) -> f64 {
    let (gp, gq) = (g.eval(p), g.eval(q));
    if p <= q {
        let mut best = gp.min(gq);
        g.critical
            .for_each_inside(p, q, |c| best = best.min(g.eval(c)));
        best
    } else {
        let mut best = gp.max(gq);
        g.critical
            .for_each_inside(q, p, |c| best = best.max(g.eval(c)));
        best
    }
}

/// `β(x, u) = a·u + r(x)`.
#[derive(Clone)]
pub struct AffineBeta {
    pub a: f64,
    pub r: SpatialFn,
    /// Total variation of `r`, when known in closed form.
    pub tv_r: Option<f64>,
}

/// A general strictly increasing `u ↦ β(x, u)` (one space dimension).
#[derive(Clone)]
pub struct MonotoneBeta {
    pub eval: BetaFn,
    /// Strictly increasing envelopes with `lower(u) ≤ β(x, u) ≤ upper(u)`.
    pub lower: ScalarFn,
    pub upper: ScalarFn,
    /// Uniform lower bound on `|β(x,u) − β(x,v)| / |u − v|`.
    pub k3: f64,
    /// `M ↦` Lipschitz bound of `β(x, ·)` on `[−M, M]`, uniform in `x`.
    pub k1: ScalarFn,
}

#[derive(Clone)]
pub enum BetaMap {
    Affine(AffineBeta),
    Monotone(MonotoneBeta),
}

impl fmt::Debug for BetaMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BetaMap::Affine(b) => f
                .debug_struct("Affine")
                .field("a", &b.a)
                .field("tv_r", &b.tv_r)
                .finish_non_exhaustive(),
            BetaMap::Monotone(b) => f
                .debug_struct("Monotone")
                .field("k3", &b.k3)
                .finish_non_exhaustive(),
        }
    }
}

impl BetaMap {
    pub fn affine(a: f64, r: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Self {
        BetaMap::Affine(AffineBeta {
            a,
            r: Arc::new(r),
            tv_r: None,
        })
    }

    pub fn identity() -> Self {
        BetaMap::affine(1.0, |_| 0.0)
    }

    pub fn is_affine(&self) -> bool {
        matches!(self, BetaMap::Affine(_))
    }

    #[inline]
    pub fn eval(&self, x: Point, u: f64) -> f64 {
        match self {
            BetaMap::Affine(b) => b.a * u + (b.r)(x),
            BetaMap::Monotone(b) => (b.eval)(x, u),
        }
    }

    /// The steady state `k_α(x)`, i.e. the `u` with `β(x, u) = α`.
    pub fn k_alpha(&self, x: Point, alpha: f64) -> Result<f64> {
        match self {
            BetaMap::Affine(b) => Ok((alpha - (b.r)(x)) / b.a),
            BetaMap::Monotone(b) => invert_monotone(b, x, alpha),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            BetaMap::Affine(b) if !(b.a.is_finite() && b.a > 0.0) => Err(Error::Invalid(format!(
                "affine beta needs a > 0, got {}",
                b.a
            ))),
            BetaMap::Monotone(b) if !(b.k3.is_finite() && b.k3 > 0.0) => Err(Error::Invalid(
                format!("monotone beta needs K3 > 0, got {}", b.k3),
            )),
            _ => Ok(()),
        }
    }
}

const MAX_BRACKET_DOUBLINGS: usize = 1024;

fn invert_monotone(b: &MonotoneBeta, x: Point, alpha: f64) -> Result<f64> {
    let fail = Error::BracketFailure { alpha };
    let mut hi = 1.0_f64;
    let mut n = 0;
    while (b.lower)(hi) < alpha {
        hi *= 2.0;
        n += 1;
        if n > MAX_BRACKET_DOUBLINGS || !hi.is_finite() {
            return Err(fail);
        }
    }
    let mut lo = -1.0_f64;
    n = 0;
    while (b.upper)(lo) > alpha {
        lo *= 2.0;
        n += 1;
        if n > MAX_BRACKET_DOUBLINGS || !lo.is_finite() {
            return Err(fail);
        }
    }
    let beta = |u: f64| (b.eval)(x, u);
    if !(beta(lo) <= alpha && alpha <= beta(hi)) {
        return Err(fail);
    }
    // Bisect until the bracket cannot shrink any further.
    loop {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if beta(mid) < alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if (beta(lo) - alpha).abs() <= (beta(hi) - alpha).abs() {
        lo
    } else {
        hi
    })
}

/// One `g` component per space dimension, composed with a shared `β`.
#[derive(Clone, Debug)]
pub struct FluxModel {
    components: Vec<GComponent>,
    beta: BetaMap,
}

impl FluxModel {
    pub fn new(components: Vec<GComponent>, beta: BetaMap) -> Result<Self> {
        if components.is_empty() || components.len() > 2 {
            return Err(Error::Invalid(format!(
                "flux needs one component per dimension (1 or 2), got {}",
                components.len()
            )));
        }
        if matches!(beta, BetaMap::Monotone(_)) && components.len() != 1 {
            return Err(Error::Invalid(
                "a general monotone beta is one-dimensional only".into(),
            ));
        }
        beta.validate()?;
        Ok(FluxModel { components, beta })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[GComponent] {
        &self.components
    }

    pub fn component(&self, axis: Axis) -> &GComponent {
        &self.components[axis.index()]
    }

    pub fn beta(&self) -> &BetaMap {
        &self.beta
    }

    /// `Ā(u, v, x_L, x_R) = ḡ_axis(β(x_L, u), β(x_R, v))`.
    pub fn numerical_interface_flux(
        &self,
        axis: Axis,
        u: f64,
        v: f64,
        xl: Point,
        xr: Point,
    ) -> f64 {
        godunov_scalar_flux(
            self.component(axis),
            self.beta.eval(xl, u),
            self.beta.eval(xr, v),
        )
    }

    /// The same `β` with only the `x` component.
    pub fn restrict_to_x(&self) -> FluxModel {
        FluxModel {
            components: alloc::vec![self.components[0].clone()],
            beta: self.beta.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CflConstants {
    /// `sup |β(x, u)|` over cell centres and `|u| ≤ M`.
    pub s: f64,
    pub l_beta: f64,
    /// Lipschitz bound of each `g` component on `[−S, S]`.
    pub l_g: Vec<f64>,
}

impl CflConstants {
    /// `L_g(axis) · L_β`; the CFL condition is `λ_axis · product ≤ 1/2`.
    pub fn product(&self, axis: Axis) -> f64 {
        self.l_g[axis.index()] * self.l_beta
    }
}

pub fn cfl_constants(model: &FluxModel, grid: &Grid, m_bound: f64) -> CflConstants {
    let (s, l_beta) = match model.beta() {
        BetaMap::Affine(b) => {
            let r_max = grid.centers().fold(0.0_f64, |m, p| m.max((b.r)(p).abs()));
            (b.a * m_bound + r_max, b.a)
        }
        BetaMap::Monotone(b) => {
            let s = grid.centers().fold(0.0_f64, |m, p| {
                m.max((b.eval)(p, m_bound).abs())
                    .max((b.eval)(p, -m_bound).abs())
            });
            (s, (b.k1)(m_bound))
        }
    };
    let l_g = model
        .components()
        .iter()
        .map(|g| g.lipschitz_on(s))
        .collect();
    CflConstants { s, l_beta, l_g }
}
