//! Godunov-type finite volume schemes for scalar conservation laws
//!
//! ```text
//!     u_t + div A(x, u) = 0,      A_i(x, u) = g_i(β(x, u))
//! ```
//!
//! where `β(x, ·)` is strictly increasing and may jump (even infinitely often)
//! in `x`, while each `g_i` is a Lipschitz function of one variable. All of the
//! spatial roughness lives in `β`, so the numerical flux is the classical
//! Godunov flux of `g_i` applied to the `β`-values of the two neighbouring cells.
//!
//! The crate is `no_std` (it needs `alloc`) and does no IO. Modules:
//!
//! - [`flux`]: `g` components with exact Godunov fluxes, `β` maps, CFL constants
//! - [`grid`]: uniform cell-centred meshes, fields, boundary padding
//! - [`solver`]: bounds, time-step selection, 1D scheme, 2D dimension splitting
//! - [`diagnostics`]: total variation, L1 distances, discrete entropy residuals,
//!   time-continuity modulus, experimental order of convergence
//! - [`experiments`]: the two accumulating-discontinuity benchmark problems and
//!   a sequential convergence-study driver

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod flux;
pub mod grid;
pub mod solver;

pub use error::{Error, Result};
pub use flux::{BetaMap, CriticalPoints, FluxModel, GComponent, Lipschitz};
pub use grid::{Axis, BoundaryPolicy, Field, Grid, Point};
pub use solver::{BoundsEstimate, Solver, SolverConfig, TimeStepRule};
