//! Weak-form residuals of the six balance laws along a trajectory.
//!
//! For a conserved density `u` with flux `u v`, non-conservative part `N` and a test
//! function `psi` with `psi(., T) = 0`, the residual is
//!
//! ```text
//! R = - int_0^T int (u psi_t + u v psi_x) dx dt - int u(x, 0) psi(x, 0) dx + int_0^T int N psi dx dt,
//! ```
//!
//! which is `int int (u_t + (u v)_x + N) psi` for smooth `u`. A source `s` added to the
//! balance law therefore shows up as `+ int int s psi`. `N` is evaluated the way the
//! scheme evaluates it: `alpha_i dx(p_bar)` for momentum and
//! `p d(alpha_i)/dt + dx(p_bar) alpha_i v_i + p dx(bar(alpha_i v_i))` for energy, with
//! `d(alpha_1)/dt` taken from the snapshots.
//!
//! Space integrals use the trapezoidal rule on the periodic grid, time integrals the
//! trapezoidal rule over the snapshot times.

use crate::error::{Error, Result};
use crate::grid::Field;
use crate::integrate::{stable_dt_for, Snapshot, Trajectory};
use crate::params::KernelShape;
use crate::scheme::Scheme;
use crate::verify::testfn::TestFunction;

/// Largest admissible snapshot gap in units of the stable step.
pub const MAX_CADENCE_STEPS: f64 = 20.0;

pub const EQUATION_NAMES: [&str; 6] = ["mass1", "mass2", "mom1", "mom2", "en1", "en2"];

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub test_function: String,
    /// In the order of [`EQUATION_NAMES`].
    pub values: [f64; 6],
    pub eps: f64,
    pub n_cells: usize,
    pub lambda: f64,
    pub kernel: KernelShape,
}

impl ResidualReport {
    pub fn mass1(&self) -> f64 {
        self.values[0]
    }
    pub fn mass2(&self) -> f64 {
        self.values[1]
    }
    pub fn momentum1(&self) -> f64 {
        self.values[2]
    }
    pub fn momentum2(&self) -> f64 {
        self.values[3]
    }
    pub fn energy1(&self) -> f64 {
        self.values[4]
    }
    pub fn energy2(&self) -> f64 {
        self.values[5]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Per-snapshot fields entering the residual integrands.
struct Sampled {
    time: f64,
    density: [Field; 6],
    flux: [Field; 6],
    noncons: [Field; 6],
}

fn sample(scheme: &Scheme, snap: &Snapshot) -> Result<Sampled> {
    let s = &snap.state;
    let d = scheme.derive(s)?;
    let da1 = &snap.dalpha1;
    let n = s.n_cells();
    let mut noncons: [Field; 6] = std::array::from_fn(|_| Field::zeros(n));
    for j in 0..n {
        let (a1, a2, p, gp) = (d.alpha1[j], d.alpha2[j], d.p[j], d.dp_bar[j]);
        noncons[2][j] = a1 * gp;
        noncons[3][j] = a2 * gp;
        noncons[4][j] = p * da1[j] + gp * a1 * d.v1[j] + p * d.dav1_bar[j];
        noncons[5][j] = -p * da1[j] + gp * a2 * d.v2[j] + p * d.dav2_bar[j];
    }
    let flux = [
        s.r1.zip_map(&d.v1, |u, v| u * v),
        s.r2.zip_map(&d.v2, |u, v| u * v),
        s.q1.zip_map(&d.v1, |u, v| u * v),
        s.q2.zip_map(&d.v2, |u, v| u * v),
        s.en1.zip_map(&d.v1, |u, v| u * v),
        s.en2.zip_map(&d.v2, |u, v| u * v),
    ];
    Ok(Sampled {
        time: snap.time,
        density: [
            s.r1.clone(),
            s.r2.clone(),
            s.q1.clone(),
            s.q2.clone(),
            s.en1.clone(),
            s.en2.clone(),
        ],
        flux,
        noncons,
    })
}

/// Checks that consecutive snapshots are at most [`MAX_CADENCE_STEPS`] stable steps apart.
pub fn check_cadence(scheme: &Scheme, traj: &Trajectory) -> Result<()> {
    for pair in traj.snapshots.windows(2) {
        let gap = pair[1].time - pair[0].time;
        let limit = MAX_CADENCE_STEPS * stable_dt_for(scheme, &pair[0].state)?;
        if gap > limit * (1.0 + 1e-9) {
            return Err(Error::CadenceTooCoarse { gap, limit });
        }
    }
    Ok(())
}

/// Residuals of all six equations for each test function in `psis`.
pub fn weak_residuals(traj: &Trajectory, psis: &[TestFunction]) -> Result<Vec<ResidualReport>> {
    let (first, last) = match (traj.first(), traj.last()) {
        (Some(a), Some(b)) if b.time > a.time => (a, b),
        _ => {
            return Err(Error::InvalidParameter {
                name: "trajectory",
                reason: "needs at least two snapshots spanning a positive time".into(),
            })
        }
    };
    if first.time != 0.0 {
        return Err(Error::InvalidParameter {
            name: "trajectory",
            reason: format!("must start at t = 0, starts at {}", first.time),
        });
    }
    let t_end = last.time;
    let scheme = Scheme::new(traj.grid, traj.eos, traj.params.clone())?;
    check_cadence(&scheme, traj)?;

    let samples = traj
        .snapshots
        .iter()
        .map(|snap| sample(&scheme, snap))
        .collect::<Result<Vec<_>>>()?;

    let grid = traj.grid;
    let (h, length, n) = (grid.h(), grid.length(), grid.n_cells());
    let xs: Vec<f64> = (0..n).map(|j| grid.x(j)).collect();

    let reports = psis
        .iter()
        .map(|psi| {
            // space integral of the bulk integrand at each snapshot
            let bulk: Vec<[f64; 6]> = samples
                .iter()
                .map(|s| {
                    let mut acc = [0.0; 6];
                    for (j, &x) in xs.iter().enumerate() {
                        let ps = psi.eval(x, s.time, length, t_end);
                        for e in 0..6 {
                            acc[e] += -s.density[e][j] * ps.dt - s.flux[e][j] * ps.dx + s.noncons[e][j] * ps.value;
                        }
                    }
                    acc.map(|a| a * h)
                })
                .collect();

            let mut values = [0.0; 6];
            for k in 1..samples.len() {
                let dt = samples[k].time - samples[k - 1].time;
                for e in 0..6 {
                    values[e] += 0.5 * dt * (bulk[k][e] + bulk[k - 1][e]);
                }
            }
            let s0 = &samples[0];
            for (j, &x) in xs.iter().enumerate() {
                let ps = psi.eval(x, 0.0, length, t_end);
                for e in 0..6 {
                    values[e] -= h * s0.density[e][j] * ps.value;
                }
            }
            ResidualReport {
                test_function: psi.description.clone(),
                values,
                eps: traj.params.eps,
                n_cells: n,
                lambda: traj.params.lambda,
                kernel: traj.params.kernel,
            }
        })
        .collect();
    Ok(reports)
}

pub fn weak_residual(traj: &Trajectory, psi: &TestFunction) -> Result<ResidualReport> {
    Ok(weak_residuals(traj, std::slice::from_ref(psi))?.remove(0))
}
