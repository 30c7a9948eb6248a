//! The six unknowns of the two-fluid system on a periodic grid.

use std::fmt;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::params::SchemeParams;

/// One cell's partial densities, momenta and total energies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellConserved {
    pub r1: f64,
    pub r2: f64,
    pub q1: f64,
    pub q2: f64,
    pub en1: f64,
    pub en2: f64,
}

impl CellConserved {
    pub fn to_array(self) -> [f64; 6] {
        [self.r1, self.r2, self.q1, self.q2, self.en1, self.en2]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        CellConserved {
            r1: a[0],
            r2: a[1],
            q1: a[2],
            q2: a[3],
            en1: a[4],
            en2: a[5],
        }
    }

    /// The same cell with the fluids exchanged.
    pub fn swapped(self) -> Self {
        CellConserved {
            r1: self.r2,
            r2: self.r1,
            q1: self.q2,
            q2: self.q1,
            en1: self.en2,
            en2: self.en1,
        }
    }
}

/// `r_i = rho_i alpha_i`, `q_i = r_i v_i`, `en_i = r_i e_i` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureState {
    pub grid: Grid,
    pub r1: Field,
    pub r2: Field,
    pub q1: Field,
    pub q2: Field,
    pub en1: Field,
    pub en2: Field,
}

/// Names of the six fields, in storage order.
pub const FIELD_NAMES: [&str; 6] = ["r1", "r2", "q1", "q2", "en1", "en2"];

impl MixtureState {
    pub fn new(grid: Grid, fields: [Field; 6]) -> Result<Self> {
        for f in &fields {
            if f.len() != grid.n_cells() {
                return Err(Error::LengthMismatch {
                    expected: grid.n_cells(),
                    found: f.len(),
                });
            }
        }
        let [r1, r2, q1, q2, en1, en2] = fields;
        Ok(MixtureState {
            grid,
            r1,
            r2,
            q1,
            q2,
            en1,
            en2,
        })
    }

    pub fn uniform(grid: Grid, cell: CellConserved) -> Self {
        let n = grid.n_cells();
        let c = |v| Field::constant(n, v);
        MixtureState {
            grid,
            r1: c(cell.r1),
            r2: c(cell.r2),
            q1: c(cell.q1),
            q2: c(cell.q2),
            en1: c(cell.en1),
            en2: c(cell.en2),
        }
    }

    pub fn n_cells(&self) -> usize {
        self.grid.n_cells()
    }

    pub fn cell(&self, j: usize) -> CellConserved {
        CellConserved {
            r1: self.r1[j],
            r2: self.r2[j],
            q1: self.q1[j],
            q2: self.q2[j],
            en1: self.en1[j],
            en2: self.en2[j],
        }
    }

    pub fn set_cell(&mut self, j: usize, c: CellConserved) {
        self.r1[j] = c.r1;
        self.r2[j] = c.r2;
        self.q1[j] = c.q1;
        self.q2[j] = c.q2;
        self.en1[j] = c.en1;
        self.en2[j] = c.en2;
    }

    pub fn fields(&self) -> [&Field; 6] {
        [&self.r1, &self.r2, &self.q1, &self.q2, &self.en1, &self.en2]
    }

    pub fn fields_mut(&mut self) -> [&mut Field; 6] {
        [
            &mut self.r1,
            &mut self.r2,
            &mut self.q1,
            &mut self.q2,
            &mut self.en1,
            &mut self.en2,
        ]
    }

    /// `self += a * rates`, field by field.
    pub fn axpy(&mut self, a: f64, rates: [&Field; 6]) {
        for (f, d) in self.fields_mut().into_iter().zip(rates) {
            f.axpy(a, d);
        }
    }

    /// Raises partial densities below `r_min` to the floor; returns the number of clamped entries.
    pub fn clamp_densities(&mut self, r_min: f64) -> usize {
        let mut clamped = 0;
        for f in [&mut self.r1, &mut self.r2] {
            for v in f.values_mut() {
                if *v < r_min {
                    *v = r_min;
                    clamped += 1;
                }
            }
        }
        clamped
    }

    /// Spatial integrals `h * sum_j` of `(r1, r2, q1 + q2, en1 + en2)`.
    pub fn totals(&self) -> Totals {
        let h = self.grid.h();
        let mut momentum = 0.0;
        let mut energy = 0.0;
        for j in 0..self.n_cells() {
            momentum += self.q1[j] + self.q2[j];
            energy += self.en1[j] + self.en2[j];
        }
        Totals {
            mass1: h * self.r1.sum(),
            mass2: h * self.r2.sum(),
            momentum: h * momentum,
            energy: h * energy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Totals {
    pub mass1: f64,
    pub mass2: f64,
    pub momentum: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    BelowFloor {
        field: &'static str,
        cell: usize,
        value: f64,
    },
    NonFinite {
        field: &'static str,
        cell: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BelowFloor { field, cell, value } => {
                write!(f, "{field}[{cell}] = {value:e} below floor")
            }
            Violation::NonFinite { field, cell } => write!(f, "{field}[{cell}] is not finite"),
        }
    }
}

/// Lists every floor breach of `r1`, `r2` and every non-finite entry.
pub fn validate_state(state: &MixtureState, params: &SchemeParams) -> Vec<Violation> {
    let mut out = Vec::new();
    for (name, field) in FIELD_NAMES.iter().zip(state.fields()) {
        let is_density = name.starts_with('r');
        for (cell, &value) in field.iter().enumerate() {
            if !value.is_finite() {
                out.push(Violation::NonFinite { field: name, cell });
            } else if is_density && value < params.r_min {
                out.push(Violation::BelowFloor {
                    field: name,
                    cell,
                    value,
                });
            }
        }
    }
    out
}

pub(crate) fn ensure_valid(state: &MixtureState, params: &SchemeParams) -> Result<()> {
    let violations = validate_state(state, params);
    if violations.is_empty() {
        return Ok(());
    }
    let shown: Vec<String> = violations.iter().take(5).map(|v| v.to_string()).collect();
    Err(Error::InvalidState(format!(
        "{} violation(s): {}",
        violations.len(),
        shown.join("; ")
    )))
}
