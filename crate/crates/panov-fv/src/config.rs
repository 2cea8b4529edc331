//! JSON run manifests.
//!
//! ```json
//! { "problem": "ex52", "mesh": 100, "dim": 2, "cfl_fraction": 0.8,
//!   "outputs": ["solution_csv", "report_json"], "out_dir": "out" }
//! ```
//!
//! A custom problem replaces the builtin name with an object:
//!
//! ```json
//! { "problem": { "g": ["burgers", "sin"], "a": 1.0,
//!                "r": { "table": "r.csv" }, "u0": { "constant": 0.5 },
//!                "domain": [0.0, 6.0], "t_end": 1.0 } }
//! ```
//!
//! Command-line flags override the file.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use panov_fv_core::experiments::{self, Experiment, ExperimentName, ExperimentSpec};
use panov_fv_core::flux::SpatialFn;
use panov_fv_core::{BetaMap, BoundaryPolicy, FluxModel, GComponent, Point, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::io::read_step_table;

pub const MIN_MESH: usize = 4;
pub const DEFAULT_MESH: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: Problem,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meshes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cfl_fraction: Option<f64>,
    /// Fixed `Δt/Δx`; excludes `cfl_fraction`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default)]
    pub boundary: BoundarySpec,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<OutputKind>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

fn default_dim() -> usize {
    2
}

fn default_outputs() -> Vec<OutputKind> {
    vec![
        OutputKind::SolutionCsv,
        OutputKind::ReportJson,
        OutputKind::TableCsv,
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Problem {
    Builtin(String),
    Custom(Box<CustomProblem>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomProblem {
    /// One builtin `g` name per axis.
    pub g: Vec<String>,
    #[serde(default = "one")]
    pub a: f64,
    pub r: Profile,
    pub u0: Profile,
    #[serde(default = "default_domain")]
    pub domain: [f64; 2],
    #[serde(default = "one")]
    pub t_end: f64,
}

fn one() -> f64 {
    1.0
}

fn default_domain() -> [f64; 2] {
    [0.0, 6.0]
}

/// A function of `x` alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    /// `r` or `u0` of a builtin problem.
    Builtin(String),
    Constant(f64),
    /// Two-column CSV `breakpoint,value`, half-open pieces `[b_k, b_{k+1})`;
    /// left of the first breakpoint the first value is used.
    Table(PathBuf),
    Steps {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    Riemann {
        at: f64,
        left: f64,
        right: f64,
    },
    /// The steady state `k_α` (initial data only).
    Steady(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundarySpec {
    #[default]
    Outflow,
    Periodic,
    Dirichlet {
        left: f64,
        right: f64,
        bottom: f64,
        top: f64,
    },
}

impl From<BoundarySpec> for BoundaryPolicy {
    fn from(b: BoundarySpec) -> Self {
        match b {
            BoundarySpec::Outflow => BoundaryPolicy::Outflow,
            BoundarySpec::Periodic => BoundaryPolicy::Periodic,
            BoundarySpec::Dirichlet {
                left,
                right,
                bottom,
                top,
            } => BoundaryPolicy::Dirichlet {
                left,
                right,
                bottom,
                top,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    SolutionCsv,
    ReportJson,
    TableCsv,
}

/// Flag values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub problem: Option<String>,
    pub mesh: Option<usize>,
    pub meshes: Option<Vec<usize>>,
    pub cfl_fraction: Option<f64>,
    pub lambda: Option<f64>,
    pub t_end: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub dim: Option<usize>,
}

impl RunConfig {
    pub fn builtin(name: &str) -> Self {
        RunConfig {
            problem: Problem::Builtin(name.into()),
            mesh: None,
            meshes: None,
            cfl_fraction: None,
            lambda: None,
            t_end: None,
            dim: default_dim(),
            boundary: BoundarySpec::default(),
            outputs: default_outputs(),
            seed: 0,
            out_dir: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::config("config", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg = Self::parse(&text)?;
        // Relative table paths are resolved against the manifest's directory.
        if let Some(dir) = path.parent() {
            cfg.rebase(dir);
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    fn rebase(&mut self, dir: &Path) {
        if let Problem::Custom(c) = &mut self.problem {
            for p in [&mut c.r, &mut c.u0] {
                if let Profile::Table(t) = p {
                    if t.is_relative() {
                        *t = dir.join(&*t);
                    }
                }
            }
        }
    }

    /// Starts from `base` (or a bare config when only flags are given).
    pub fn resolve(base: Option<RunConfig>, o: &Overrides) -> Result<Self, CliError> {
        let mut cfg = match (base, &o.problem) {
            (Some(mut c), Some(p)) => {
                c.problem = Problem::Builtin(p.clone());
                c
            }
            (Some(c), None) => c,
            (None, Some(p)) => RunConfig::builtin(p),
            (None, None) => {
                return Err(CliError::config(
                    "problem",
                    "no --problem and no --config given",
                ))
            }
        };
        macro_rules! set {
            ($($field:ident),*) => { $(if let Some(v) = &o.$field { cfg.$field = Some(v.clone()); })* };
        }
        set!(mesh, meshes, t_end, out_dir);
        if let Some(f) = o.cfl_fraction {
            cfg.cfl_fraction = Some(f);
            cfg.lambda = None;
        }
        if let Some(l) = o.lambda {
            cfg.lambda = Some(l);
            cfg.cfl_fraction = None;
        }
        if let Some(s) = o.seed {
            cfg.seed = s;
        }
        if let Some(d) = o.dim {
            cfg.dim = d;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(m) = self.mesh {
            if m < MIN_MESH {
                return Err(CliError::config(
                    "mesh",
                    format!("need at least {MIN_MESH} cells per axis, got {m}"),
                ));
            }
        }
        if let Some(ms) = &self.meshes {
            if ms.is_empty()
                || ms.iter().any(|&m| m < MIN_MESH)
                || ms.windows(2).any(|w| w[0] >= w[1])
            {
                return Err(CliError::config(
                    "meshes",
                    format!("need a strictly increasing list of sizes >= {MIN_MESH}, got {ms:?}"),
                ));
            }
        }
        if let Some(f) = self.cfl_fraction {
            if !(f > 0.0 && f <= 1.0) {
                return Err(CliError::config(
                    "cfl_fraction",
                    format!("must lie in (0, 1], got {f}"),
                ));
            }
        }
        if let Some(l) = self.lambda {
            if self.cfl_fraction.is_some() {
                return Err(CliError::config(
                    "lambda",
                    "give either lambda or cfl_fraction, not both",
                ));
            }
            if !(l.is_finite() && l > 0.0) {
                return Err(CliError::config(
                    "lambda",
                    format!("must be positive, got {l}"),
                ));
            }
        }
        if let Some(t) = self.t_end {
            if !(t.is_finite() && t >= 0.0) {
                return Err(CliError::config(
                    "t_end",
                    format!("must be finite and >= 0, got {t}"),
                ));
            }
        }
        if !(1..=2).contains(&self.dim) {
            return Err(CliError::config(
                "dim",
                format!("must be 1 or 2, got {}", self.dim),
            ));
        }
        match &self.problem {
            Problem::Builtin(name) if experiments::builtin(name).is_none() => {
                Err(CliError::config(
                    "problem",
                    format!("unknown builtin problem `{name}` (ex51, ex52, steady)"),
                ))
            }
            Problem::Custom(c) => c.validate(self.dim),
            _ => Ok(()),
        }
    }

    pub fn problem_name(&self) -> &str {
        match &self.problem {
            Problem::Builtin(n) => n,
            Problem::Custom(_) => "custom",
        }
    }

    pub fn mesh(&self) -> usize {
        self.mesh.unwrap_or(DEFAULT_MESH)
    }

    /// The experiment with this config's `t_end`, CFL fraction and mesh list applied.
    pub fn experiment(&self) -> Result<Experiment, CliError> {
        let mut exp = match &self.problem {
            Problem::Builtin(name) => experiments::builtin(name).ok_or_else(|| {
                CliError::config("problem", format!("unknown builtin problem `{name}`"))
            })?,
            Problem::Custom(c) => c.experiment()?,
        };
        if let Some(t) = self.t_end {
            exp.spec.t_end = t;
        }
        if let Some(f) = self.cfl_fraction {
            exp.spec.cfl_fraction = f;
        }
        if let Some(ms) = &self.meshes {
            exp.spec.meshes = ms.clone();
        }
        Ok(exp)
    }

    pub fn solver_config(&self, exp: &Experiment) -> SolverConfig {
        let c = exp.solver_config().with_boundary(self.boundary.into());
        match self.lambda {
            Some(l) => c.with_lambda(l),
            None => c,
        }
    }
}

impl CustomProblem {
    fn validate(&self, dim: usize) -> Result<(), CliError> {
        if self.g.len() < dim {
            return Err(CliError::config(
                "problem.g",
                format!("need {dim} flux components, got {}", self.g.len()),
            ));
        }
        if self.g.len() > 2 {
            return Err(CliError::config("problem.g", "at most two flux components"));
        }
        for (k, name) in self.g.iter().enumerate() {
            if GComponent::builtin(name).is_none() {
                return Err(CliError::config(
                    format!("problem.g[{k}]"),
                    format!(
                        "unknown builtin g `{name}` (one of {:?})",
                        GComponent::BUILTIN_NAMES
                    ),
                ));
            }
        }
        if !(self.a.is_finite() && self.a > 0.0) {
            return Err(CliError::config(
                "problem.a",
                format!("must be positive, got {}", self.a),
            ));
        }
        if !(self.domain[1] > self.domain[0]) {
            return Err(CliError::config("problem.domain", "need lo < hi"));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(CliError::config("problem.t_end", "must be finite and >= 0"));
        }
        if matches!(self.r, Profile::Steady(_)) {
            return Err(CliError::config(
                "problem.r",
                "`steady` is only meaningful for u0",
            ));
        }
        Ok(())
    }

    fn experiment(&self) -> Result<Experiment, CliError> {
        let mut gs: Vec<GComponent> = self
            .g
            .iter()
            .map(|n| GComponent::builtin(n).unwrap())
            .collect();
        if gs.len() == 1 {
            gs.push(GComponent::zero());
        }
        let r = profile_fn(&self.r, "problem.r", Role::R)?;
        let r_model = r.clone();
        let model = FluxModel::new(gs, BetaMap::affine(self.a, move |p: Point| r_model(p)))?;
        let initial = match self.u0 {
            Profile::Steady(alpha) => {
                let a = self.a;
                Arc::new(move |p: Point| (alpha - r(p)) / a) as SpatialFn
            }
            ref other => profile_fn(other, "problem.u0", Role::U0)?,
        };
        Ok(Experiment {
            spec: ExperimentSpec {
                name: ExperimentName::Custom,
                domain: self.domain,
                meshes: vec![50, 100, 200, 400],
                t_end: self.t_end,
                cfl_fraction: 1.0,
            },
            model,
            initial,
            exact: None,
        })
    }
}

#[derive(Clone, Copy)]
enum Role {
    R,
    U0,
}

fn profile_fn(p: &Profile, key: &str, role: Role) -> Result<SpatialFn, CliError> {
    Ok(match p {
        Profile::Builtin(name) => {
            let exp = experiments::builtin(name).ok_or_else(|| {
                CliError::config(key, format!("unknown builtin profile `{name}`"))
            })?;
            match role {
                Role::U0 => exp.initial,
                Role::R => match exp.model.beta() {
                    BetaMap::Affine(b) => b.r.clone(),
                    BetaMap::Monotone(_) => unreachable!("builtin problems are affine"),
                },
            }
        }
        Profile::Constant(c) => {
            let c = *c;
            Arc::new(move |_| c)
        }
        Profile::Table(path) => {
            let (breakpoints, values) = read_step_table(path)?;
            steps_fn(key, breakpoints, values)?
        }
        Profile::Steps {
            breakpoints,
            values,
        } => steps_fn(key, breakpoints.clone(), values.clone())?,
        Profile::Riemann { at, left, right } => {
            let (at, left, right) = (*at, *left, *right);
            Arc::new(move |p: Point| if p.x < at { left } else { right })
        }
        Profile::Steady(_) => {
            return Err(CliError::config(key, "`steady` is only meaningful for u0"))
        }
    })
}

fn steps_fn(key: &str, breakpoints: Vec<f64>, values: Vec<f64>) -> Result<SpatialFn, CliError> {
    if breakpoints.is_empty() || breakpoints.len() != values.len() {
        return Err(CliError::config(
            key,
            "need equally many (>= 1) breakpoints and values",
        ));
    }
    if breakpoints.iter().chain(&values).any(|v| !v.is_finite()) {
        return Err(CliError::config(
            key,
            "breakpoints and values must be finite",
        ));
    }
    let n = values.len();
    let last = breakpoints[n - 1];
    let step = experiments::AccumulatingStep::new(
        breakpoints,
        values[..n - 1].to_vec(),
        values[0],
        values[n - 1],
        last,
    )
    .map_err(|e| CliError::config(key, e.to_string()))?;
    Ok(Arc::new(move |p: Point| step.value(p.x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let base =
            RunConfig::parse(r#"{"problem": "ex51", "mesh": 50, "cfl_fraction": 0.5}"#).unwrap();
        let o = Overrides {
            mesh: Some(80),
            lambda: Some(0.1),
            ..Default::default()
        };
        let c = RunConfig::resolve(Some(base), &o).unwrap();
        assert_eq!(
            (c.mesh, c.lambda, c.cfl_fraction),
            (Some(80), Some(0.1), None)
        );
    }

    #[test]
    fn errors_name_the_key() {
        let bad = [
            (r#"{"problem": "ex51", "mesh": 3}"#, "mesh"),
            (r#"{"problem": "nope"}"#, "problem"),
            (
                r#"{"problem": "ex51", "cfl_fraction": 1.5}"#,
                "cfl_fraction",
            ),
            (r#"{"problem": "ex51", "dim": 3}"#, "dim"),
            (
                r#"{"problem": {"g": ["burgers", "cosh"], "r": {"constant": 0}, "u0": {"constant": 0}}}"#,
                "problem.g[1]",
            ),
        ];
        for (text, key) in bad {
            let err = RunConfig::parse(text)
                .and_then(|c| c.validate())
                .unwrap_err();
            match err {
                CliError::Config { key: k, .. } => assert_eq!(k, key, "{text}"),
                other => panic!("{other}"),
            }
        }
        let err = RunConfig::parse(r#"{"problem": "ex51", "mesh_size": 10}"#).unwrap_err();
        assert!(err.to_string().contains("mesh_size"), "{err}");
    }

    #[test]
    fn custom_steady_problem() {
        let c = RunConfig::parse(
            r#"{"problem": {"g": ["ex52_g1", "sin"], "r": {"builtin": "ex52"}, "u0": {"steady": 3.0}}}"#,
        )
        .unwrap();
        c.validate().unwrap();
        let exp = c.experiment().unwrap();
        assert_eq!((exp.initial)(Point::new(0.5, 0.0)), 1.0);
        assert_eq!(exp.model.beta().eval(Point::new(5.5, 0.0), 0.0), 1.0);
    }

    #[test]
    fn steps_use_half_open_pieces() {
        let f = steps_fn("r", vec![1.0, 2.0], vec![5.0, 7.0]).unwrap();
        let at = |x| f(Point::on_line(x));
        assert_eq!(
            (at(0.0), at(1.0), at(1.5), at(2.0), at(9.0)),
            (5.0, 5.0, 5.0, 7.0, 7.0)
        );
        assert!(steps_fn("r", vec![2.0, 1.0], vec![0.0, 0.0]).is_err());
    }
}
