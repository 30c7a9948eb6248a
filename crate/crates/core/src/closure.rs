//! Per-cell algebraic closure: common pressure and volume fractions.
//!
//! With `A_i = (K_i - 1)(en_i - q_i^2 / (2 r_i))` and `B_i = K_i p_inf_i`, each
//! stiffened-gas law reads `p = A_i / alpha_i - B_i`. Requiring one pressure and
//! `alpha_1 + alpha_2 = 1` gives `A_1 / (p + B_1) + A_2 / (p + B_2) = 1`, a quadratic
//! in `p` with exactly one root satisfying `p + B_i > 0`.

use crate::error::{ClosureError, Result};
use crate::params::FluidEos;
use crate::state::{CellConserved, MixtureState};

/// Default tolerance of [`bisection_oracle`].
pub const ORACLE_TOL: f64 = 1e-12;

/// Relative tolerance to which the returned state satisfies both pressure laws.
pub const TOL_CLOSURE: f64 = 1e-10;

/// `(K_i - 1)` times the internal energy per unit mixture volume of each fluid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KineticDeficit {
    pub a1: f64,
    pub a2: f64,
}

impl KineticDeficit {
    pub fn is_physical(&self) -> bool {
        self.a1 > 0.0 && self.a2 > 0.0 && self.a1.is_finite() && self.a2.is_finite()
    }

    pub fn check(self) -> std::result::Result<Self, ClosureError> {
        if self.is_physical() {
            Ok(self)
        } else {
            Err(ClosureError::NonPhysical {
                a1: self.a1,
                a2: self.a2,
            })
        }
    }
}

pub fn kinetic_deficit(cell: &CellConserved, eos: &FluidEos) -> KineticDeficit {
    KineticDeficit {
        a1: (eos.k1 - 1.0) * (cell.en1 - 0.5 * cell.q1 * cell.q1 / cell.r1),
        a2: (eos.k2 - 1.0) * (cell.en2 - 0.5 * cell.q2 * cell.q2 / cell.r2),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureAlpha {
    pub p: f64,
    pub alpha1: f64,
}

impl PressureAlpha {
    pub fn alpha2(&self) -> f64 {
        1.0 - self.alpha1
    }
}

/// Positive root `y` of `y^2 + (d - a - a_other) y - a d = 0` with `y + d > 0`.
///
/// `y` is `p + B_i` for the fluid owning `a`, and `d = B_other - B_i`.
/// The discriminant is passed in precomputed; it equals
/// `(d + a - a_other)^2 + 4 a a_other` and is never negative.
fn shifted_root(a: f64, a_other: f64, d: f64, sqrt_disc: f64) -> f64 {
    let b = d - a - a_other;
    if b >= 0.0 {
        // b >= 0 implies d > 0, so the numerator is positive and nothing cancels.
        2.0 * a * d / (b + sqrt_disc)
    } else {
        0.5 * (sqrt_disc - b)
    }
}

/// Solves the compatibility relation for `(p, alpha_1)` given the kinetic deficits.
pub fn solve_pressure_alpha(a1: f64, a2: f64, eos: &FluidEos) -> std::result::Result<PressureAlpha, ClosureError> {
    let fail = ClosureError::NoAdmissibleRoot { a1, a2 };
    if !(a1 > 0.0 && a2 > 0.0 && a1.is_finite() && a2.is_finite()) {
        return Err(fail);
    }
    let (b1, b2) = (eos.b1(), eos.b2());
    let skew = b1 - b2 - a1 + a2;
    let sqrt_disc = (skew * skew + 4.0 * a1 * a2).sqrt();

    let y1 = shifted_root(a1, a2, b2 - b1, sqrt_disc);
    let y2 = shifted_root(a2, a1, b1 - b2, sqrt_disc);

    // Take the smaller fraction from its own branch; it carries the most relative precision.
    let s1 = a1 / y1;
    let s2 = a2 / y2;
    let alpha1 = if s1 <= s2 { s1 } else { 1.0 - s2 };
    // Subtract the smaller reference pressure to limit cancellation.
    let p = if b1 <= b2 { y1 - b1 } else { y2 - b2 };

    if y1 > 0.0 && y2 > 0.0 && alpha1 > 0.0 && alpha1 < 1.0 && p.is_finite() {
        Ok(PressureAlpha { p, alpha1 })
    } else {
        Err(fail)
    }
}

/// Bisection on `g(alpha) = A_1/alpha - B_1 - A_2/(1 - alpha) + B_2`, which decreases
/// strictly from `+inf` to `-inf` on `(0, 1)`.
///
/// Independent of [`solve_pressure_alpha`]; used to cross-check it.
pub fn bisection_oracle(a1: f64, a2: f64, eos: &FluidEos, tol: f64) -> PressureAlpha {
    let (b1, b2) = (eos.b1(), eos.b2());
    let g = |alpha: f64| a1 / alpha - b1 - a2 / (1.0 - alpha) + b2;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let alpha1 = 0.5 * (lo + hi);
    let p = if alpha1 >= 0.5 {
        a1 / alpha1 - b1
    } else {
        a2 / (1.0 - alpha1) - b2
    };
    PressureAlpha { p, alpha1 }
}

/// Everything derived from one cell's conserved values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureResult {
    pub p: f64,
    pub alpha1: f64,
    /// Always `1 - alpha1`.
    pub alpha2: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub v1: f64,
    pub v2: f64,
    pub e1: f64,
    pub e2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl ClosureResult {
    /// Stiffened-gas sound speeds of the two phases.
    pub fn sound_speeds(&self, eos: &FluidEos) -> (f64, f64) {
        (
            (eos.k1 * (self.p + eos.pinf1) / self.rho1).sqrt(),
            (eos.k2 * (self.p + eos.pinf2) / self.rho2).sqrt(),
        )
    }

    /// Relative mismatch of each pressure law `(K_i - 1)(rho_i e_i - rho_i v_i^2 / 2) - K_i p_inf_i`
    /// against `p`, scaled by `|p| + K_i p_inf_i`.
    pub fn state_law_residuals(&self, eos: &FluidEos) -> (f64, f64) {
        let law = |k: f64, pinf: f64, rho: f64, e: f64, v: f64| {
            let pi = (k - 1.0) * (rho * e - 0.5 * rho * v * v) - k * pinf;
            (pi - self.p).abs() / (self.p.abs() + k * pinf)
        };
        (
            law(eos.k1, eos.pinf1, self.rho1, self.e1, self.v1),
            law(eos.k2, eos.pinf2, self.rho2, self.e2, self.v2),
        )
    }
}

pub fn close_cell(
    cell: &CellConserved,
    eos: &FluidEos,
    r_min: f64,
) -> std::result::Result<ClosureResult, ClosureError> {
    for value in [cell.r1, cell.r2] {
        if !(value >= r_min) {
            return Err(ClosureError::BelowFloor { value, r_min });
        }
    }
    let deficit = kinetic_deficit(cell, eos).check()?;
    let PressureAlpha { p, alpha1 } = solve_pressure_alpha(deficit.a1, deficit.a2, eos)?;
    let alpha2 = 1.0 - alpha1;
    Ok(ClosureResult {
        p,
        alpha1,
        alpha2,
        rho1: cell.r1 / alpha1,
        rho2: cell.r2 / alpha2,
        v1: cell.q1 / cell.r1,
        v2: cell.q2 / cell.r2,
        e1: cell.en1 / cell.r1,
        e2: cell.en2 / cell.r2,
        a1: deficit.a1,
        a2: deficit.a2,
    })
}

/// Closes every cell, attaching the cell index to the first failure.
pub fn close_state(state: &MixtureState, eos: &FluidEos, r_min: f64) -> Result<Vec<ClosureResult>> {
    (0..state.n_cells())
        .map(|j| close_cell(&state.cell(j), eos, r_min).map_err(|e| e.at(j)))
        .collect()
}

/// Partial derivatives of `alpha_1` with respect to `(r1, r2, q1, q2, en1, en2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureSensitivity {
    pub dalpha1: [f64; 6],
}

impl ClosureSensitivity {
    pub fn d_r1(&self) -> f64 {
        self.dalpha1[0]
    }
    pub fn d_r2(&self) -> f64 {
        self.dalpha1[1]
    }
    pub fn d_q1(&self) -> f64 {
        self.dalpha1[2]
    }
    pub fn d_q2(&self) -> f64 {
        self.dalpha1[3]
    }
    pub fn d_en1(&self) -> f64 {
        self.dalpha1[4]
    }
    pub fn d_en2(&self) -> f64 {
        self.dalpha1[5]
    }
}

/// Implicit differentiation of `G(alpha_1; u) = A_1/alpha_1 - B_1 - A_2/alpha_2 + B_2 = 0`.
pub fn sensitivity_at(cell: &CellConserved, closed: &ClosureResult, eos: &FluidEos) -> ClosureSensitivity {
    let (al1, al2) = (closed.alpha1, closed.alpha2);
    // -dG/dalpha_1 = A_1/alpha_1^2 + A_2/alpha_2^2 = (p + B_1)/alpha_1 + (p + B_2)/alpha_2
    let stiffness = closed.a1 / (al1 * al1) + closed.a2 / (al2 * al2);
    let per_a1 = 1.0 / (al1 * stiffness);
    let per_a2 = -1.0 / (al2 * stiffness);

    let (g1, g2) = (eos.k1 - 1.0, eos.k2 - 1.0);
    let (v1, v2) = (cell.q1 / cell.r1, cell.q2 / cell.r2);
    ClosureSensitivity {
        dalpha1: [
            per_a1 * g1 * 0.5 * v1 * v1,
            per_a2 * g2 * 0.5 * v2 * v2,
            -per_a1 * g1 * v1,
            -per_a2 * g2 * v2,
            per_a1 * g1,
            per_a2 * g2,
        ],
    }
}

pub fn closure_sensitivity(
    cell: &CellConserved,
    eos: &FluidEos,
    r_min: f64,
) -> std::result::Result<ClosureSensitivity, ClosureError> {
    let closed = close_cell(cell, eos, r_min)?;
    Ok(sensitivity_at(cell, &closed, eos))
}
