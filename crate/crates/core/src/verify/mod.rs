//! Verification of trajectories: weak-form residuals, their behavior under stencil
//! refinement, and discrete conservation audits.

pub mod audit;
pub mod convergence;
pub mod residual;
pub mod testfn;

pub use audit::{conservation_audit, AuditReport, AuditRow, AuditThresholds};
pub use convergence::{convergence_study, ConvergenceRow, ConvergenceTable};
pub use residual::{weak_residual, weak_residuals, ResidualReport, EQUATION_NAMES};
pub use testfn::{default_test_functions, SpaceMode, TestFunction, TimeWindow};
