//! Semi-discrete solver for the six-equation two-fluid flow model.
//!
//! The unknowns are the partial densities `r_i = rho_i alpha_i`, momenta `r_i v_i` and
//! total energies `r_i e_i` of two fluids sharing one pressure, sampled on a periodic
//! grid. Transport uses an upwind bracket of stencil width `eps`; the pressure enters
//! through a mollified gradient of support `eps^lambda`. The result is a system of
//! ODEs integrated with the classical RK4 method.
//!
//! Modules:
//! - [`grid`], [`state`], [`params`]: shared types.
//! - [`closure`]: the algebraic pressure / volume-fraction closure.
//! - [`kernel`], [`scheme`], [`integrate`]: the semi-discrete system and its integration.
//! - [`verify`]: weak residuals, convergence studies and conservation audits.
//! - [`driver`]: configuration, scenarios and CSV output.

// NaN-rejecting checks are written as `!(x > 0.0)`; per-equation loops index several arrays.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod closure;
pub mod driver;
pub mod error;
pub mod grid;
pub mod integrate;
pub mod kernel;
pub mod params;
pub mod scheme;
pub mod state;
pub mod verify;

pub use closure::{close_cell, ClosureResult, ClosureSensitivity};
pub use error::{ClosureError, Error, Result};
pub use grid::{Field, Grid};
pub use integrate::{run, RunFailure, Snapshot, Trajectory};
pub use kernel::MollifierKernel;
pub use params::{AlphaCoupling, FluidEos, KernelShape, SchemeParams};
pub use scheme::{Scheme, StateTendency};
pub use state::{CellConserved, MixtureState};
