//! Semi-discrete right-hand side of the two-fluid system.
//!
//! Transport uses the upwind bracket
//!
//! ```text
//! [V, v](x) = -(1/eps) { V(x-eps) v+(x-eps) - V(x) |v|(x) + V(x+eps) v-(x+eps) }
//! ```
//!
//! with `v+ = max(v, 0)`, `v- = max(-v, 0)`. Pressure enters only through the mollified
//! gradient `d/dx (p * phi_mu)` and the mollified fluxes `alpha_i v_i * phi_mu`. The
//! `p d(alpha_i)/dt` term of the energy equations is eliminated cell by cell through
//! the closure sensitivities, so the system is an explicit ODE.

use crate::closure::{close_state, sensitivity_at, ClosureResult};
use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::kernel::{make_kernel, mollified_gradient, MollifierKernel};
use crate::params::{AlphaCoupling, FluidEos, SchemeParams};
use crate::state::{ensure_valid, MixtureState};

/// Threshold on `|1 + p (F1 - F2)|` below which the coupling solve is refused.
pub const SINGULAR_COUPLING: f64 = 1e-12;

/// Evaluates `[V, v]_x` with a stencil offset of `eps / h` cells.
pub fn upwind_bracket(big_v: &Field, v: &Field, eps: f64, grid: &Grid) -> Result<Field> {
    let m = grid.cells_in(eps)?;
    for f in [big_v, v] {
        if f.len() != grid.n_cells() {
            return Err(Error::LengthMismatch {
                expected: grid.n_cells(),
                found: f.len(),
            });
        }
    }
    Ok(bracket_with_offset(big_v, v, m, eps))
}

pub(crate) fn bracket_with_offset(big_v: &Field, v: &Field, m: usize, eps: f64) -> Field {
    let n = v.len();
    let inv = 1.0 / eps;
    let out = (0..n)
        .map(|j| {
            let jm = (j + n - m % n) % n;
            let jp = (j + m) % n;
            let up = big_v[jm] * v[jm].max(0.0);
            let here = big_v[j] * v[j].abs();
            let down = big_v[jp] * (-v[jp]).max(0.0);
            -inv * (up - here + down)
        })
        .collect();
    Field::from_vec(out)
}

/// Time derivatives of the six unknowns, plus the eliminated `d(alpha_1)/dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateTendency {
    pub dr1: Field,
    pub dr2: Field,
    pub dq1: Field,
    pub dq2: Field,
    pub den1: Field,
    pub den2: Field,
    pub dalpha1: Field,
}

impl StateTendency {
    pub fn rates(&self) -> [&Field; 6] {
        [&self.dr1, &self.dr2, &self.dq1, &self.dq2, &self.den1, &self.den2]
    }

    /// `d(alpha_2)/dt`, identically `-d(alpha_1)/dt`.
    pub fn dalpha2(&self) -> Field {
        self.dalpha1.map(|v| -v)
    }

    pub fn all_finite(&self) -> bool {
        self.rates().iter().all(|f| f.all_finite()) && self.dalpha1.all_finite()
    }
}

/// Per-cell fields derived from a state, shared by the right-hand side and the verifier.
#[derive(Debug, Clone)]
pub struct Derived {
    pub closure: Vec<ClosureResult>,
    pub p: Field,
    pub alpha1: Field,
    pub alpha2: Field,
    pub v1: Field,
    pub v2: Field,
    /// `d/dx p_bar`
    pub dp_bar: Field,
    /// `d/dx overline(alpha_i v_i)`
    pub dav1_bar: Field,
    pub dav2_bar: Field,
}

/// A configured discretization: grid, materials, parameters and the prebuilt kernel.
#[derive(Debug, Clone)]
pub struct Scheme {
    grid: Grid,
    eos: FluidEos,
    params: SchemeParams,
    offset: usize,
    kernel: MollifierKernel,
}

impl Scheme {
    pub fn new(grid: Grid, eos: FluidEos, params: SchemeParams) -> Result<Self> {
        eos.validate()?;
        let offset = params.validate(&grid)?;
        let kernel = make_kernel(params.eps, params.lambda, &grid, params.kernel)?;
        Ok(Scheme {
            grid,
            eos,
            params,
            offset,
            kernel,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn eos(&self) -> &FluidEos {
        &self.eos
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn kernel(&self) -> &MollifierKernel {
        &self.kernel
    }

    /// Stencil offset `eps / h` in cells.
    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn bracket(&self, big_v: &Field, v: &Field) -> Field {
        bracket_with_offset(big_v, v, self.offset, self.params.eps)
    }

    pub fn derive(&self, state: &MixtureState) -> Result<Derived> {
        let closure = close_state(state, &self.eos, self.params.r_min)?;
        let col = |f: fn(&ClosureResult) -> f64| Field::from_vec(closure.iter().map(f).collect());
        let p = col(|c| c.p);
        let alpha1 = col(|c| c.alpha1);
        let alpha2 = col(|c| c.alpha2);
        let v1 = col(|c| c.v1);
        let v2 = col(|c| c.v2);
        let dp_bar = mollified_gradient(&p, &self.kernel);
        let dav1_bar = mollified_gradient(&alpha1.zip_map(&v1, |a, v| a * v), &self.kernel);
        let dav2_bar = mollified_gradient(&alpha2.zip_map(&v2, |a, v| a * v), &self.kernel);
        Ok(Derived {
            closure,
            p,
            alpha1,
            alpha2,
            v1,
            v2,
            dp_bar,
            dav1_bar,
            dav2_bar,
        })
    }

    /// Right-hand side with the configured coupling. In lagged mode `lagged_dalpha1`
    /// supplies `d(alpha_1)/dt`; `None` means zero.
    pub fn rhs_with(&self, state: &MixtureState, lagged_dalpha1: Option<&Field>) -> Result<StateTendency> {
        ensure_valid(state, &self.params)?;
        let d = self.derive(state)?;
        let n = state.n_cells();
        let (k1, k2) = (self.params.kappa1, self.params.kappa2);

        let br1 = self.bracket(&state.r1, &d.v1);
        let br2 = self.bracket(&state.r2, &d.v2);
        let bq1 = self.bracket(&state.q1, &d.v1);
        let bq2 = self.bracket(&state.q2, &d.v2);
        let be1 = self.bracket(&state.en1, &d.v1);
        let be2 = self.bracket(&state.en2, &d.v2);

        let mut out = StateTendency {
            dr1: Field::zeros(n),
            dr2: Field::zeros(n),
            dq1: Field::zeros(n),
            dq2: Field::zeros(n),
            den1: Field::zeros(n),
            den2: Field::zeros(n),
            dalpha1: Field::zeros(n),
        };

        for j in 0..n {
            let c = &d.closure[j];
            let gp = d.dp_bar[j];
            let dr1 = -br1[j] + k1;
            let dr2 = -br2[j] + k1;
            let dq1 = -bq1[j] - c.alpha1 * gp;
            let dq2 = -bq2[j] - c.alpha2 * gp;
            // energy tendencies without the p d(alpha_i)/dt term
            let b1 = -be1[j] - gp * c.alpha1 * c.v1 - c.p * d.dav1_bar[j] + k2;
            let b2 = -be2[j] - gp * c.alpha2 * c.v2 - c.p * d.dav2_bar[j] + k2;

            let dalpha1 = match self.params.coupling {
                AlphaCoupling::Exact => {
                    let s = sensitivity_at(&state.cell(j), c, &self.eos);
                    let c0 = s.d_r1() * dr1 + s.d_r2() * dr2 + s.d_q1() * dq1 + s.d_q2() * dq2;
                    let denominator = 1.0 + c.p * (s.d_en1() - s.d_en2());
                    if !(denominator.abs() >= SINGULAR_COUPLING) {
                        return Err(Error::SingularCoupling { cell: j, denominator });
                    }
                    (c0 + s.d_en1() * b1 + s.d_en2() * b2) / denominator
                }
                AlphaCoupling::Lagged => lagged_dalpha1.map_or(0.0, |f| f[j]),
            };

            out.dr1[j] = dr1;
            out.dr2[j] = dr2;
            out.dq1[j] = dq1;
            out.dq2[j] = dq2;
            out.den1[j] = b1 - c.p * dalpha1;
            out.den2[j] = b2 + c.p * dalpha1;
            out.dalpha1[j] = dalpha1;
        }
        Ok(out)
    }

    pub fn rhs(&self, state: &MixtureState) -> Result<StateTendency> {
        self.rhs_with(state, None)
    }
}

/// One-shot right-hand side; builds the kernel on every call.
pub fn rhs(state: &MixtureState, eos: &FluidEos, params: &SchemeParams) -> Result<StateTendency> {
    Scheme::new(state.grid, *eos, params.clone())?.rhs(state)
}
