//! Explicit time integration of the semi-discrete system.

use std::fmt;

use log::{debug, warn};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::params::{AlphaCoupling, FluidEos, SchemeParams};
use crate::scheme::{Scheme, StateTendency};
use crate::state::MixtureState;

/// Classical four-stage Runge-Kutta step for any state with an `axpy`-style update.
///
/// `rate` is evaluated at the four stage states; `k1` may be supplied precomputed.
/// Errors from stage `s` (1-based) are wrapped in [`Error::Stage`].
pub fn rk4_step<S, R>(
    y: &S,
    dt: f64,
    k1: Option<R>,
    mut rate: impl FnMut(&S) -> Result<R>,
    axpy: impl Fn(&mut S, f64, &R),
) -> Result<S>
where
    S: Clone,
{
    let stage = |s: usize| {
        move |e: Error| Error::Stage {
            stage: s,
            source: Box::new(e),
        }
    };
    let k1 = match k1 {
        Some(k) => k,
        None => rate(y).map_err(stage(1))?,
    };
    let mut y2 = y.clone();
    axpy(&mut y2, 0.5 * dt, &k1);
    let k2 = rate(&y2).map_err(stage(2))?;
    let mut y3 = y.clone();
    axpy(&mut y3, 0.5 * dt, &k2);
    let k3 = rate(&y3).map_err(stage(3))?;
    let mut y4 = y.clone();
    axpy(&mut y4, dt, &k3);
    let k4 = rate(&y4).map_err(stage(4))?;

    let mut out = y.clone();
    axpy(&mut out, dt / 6.0, &k1);
    axpy(&mut out, dt / 3.0, &k2);
    axpy(&mut out, dt / 3.0, &k3);
    axpy(&mut out, dt / 6.0, &k4);
    Ok(out)
}

fn apply(state: &mut MixtureState, a: f64, t: &StateTendency) {
    state.axpy(a, t.rates());
}

/// Largest signal speed `max_j (max_i |v_i| + max_i c_i)` with stiffened-gas sound speeds.
pub fn max_wave_speed(scheme: &Scheme, state: &MixtureState) -> Result<f64> {
    let d = scheme.derive(state)?;
    Ok(d.closure.iter().fold(0.0_f64, |m, c| {
        let (c1, c2) = c.sound_speeds(scheme.eos());
        m.max(c.v1.abs().max(c.v2.abs()) + c1.max(c2))
    }))
}

/// `cfl * eps / max wave speed`. With no signal at all the step falls back to `eps`.
pub fn stable_dt_for(scheme: &Scheme, state: &MixtureState) -> Result<f64> {
    let speed = max_wave_speed(scheme, state)?;
    let p = scheme.params();
    if speed > 0.0 && speed.is_finite() {
        Ok(p.cfl * p.eps / speed)
    } else {
        warn!("zero wave speed, using fallback step {}", p.eps);
        Ok(p.eps)
    }
}

pub fn stable_dt(state: &MixtureState, eos: &FluidEos, params: &SchemeParams) -> Result<f64> {
    stable_dt_for(&Scheme::new(state.grid, *eos, params.clone())?, state)
}

/// One RK4 step of the scheme. Densities that fall under the floor afterwards are
/// clamped and counted in the returned value.
pub fn step_rk4(
    scheme: &Scheme,
    state: &MixtureState,
    dt: f64,
    k1: Option<StateTendency>,
    lagged_dalpha1: Option<&Field>,
) -> Result<(MixtureState, usize)> {
    let mut next = rk4_step(state, dt, k1, |y| scheme.rhs_with(y, lagged_dalpha1), apply)?;
    let clamped = next.clamp_densities(scheme.params().r_min);
    if clamped > 0 {
        warn!("{clamped} partial density value(s) clamped to r_min");
    }
    Ok((next, clamped))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub state: MixtureState,
    /// `d(alpha_1)/dt` as used by the scheme at this state.
    pub dalpha1: Field,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunStats {
    pub steps: usize,
    pub clamped: usize,
    pub min_dt: f64,
    pub max_dt: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub grid: Grid,
    pub eos: FluidEos,
    pub params: SchemeParams,
    pub snapshots: Vec<Snapshot>,
    pub stats: RunStats,
}

impl Trajectory {
    pub fn new(grid: Grid, eos: FluidEos, params: SchemeParams) -> Self {
        Trajectory {
            grid,
            eos,
            params,
            snapshots: Vec::new(),
            stats: RunStats::default(),
        }
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.time).collect()
    }

    pub fn first(&self) -> Option<&Snapshot> {
        self.snapshots.first()
    }

    pub fn last(&self) -> Option<&Snapshot> {
        self.snapshots.last()
    }

    /// Snapshot whose time is closest to `time`; errors outside the recorded range.
    pub fn nearest(&self, time: f64) -> Result<&Snapshot> {
        let (start, end) = match (self.first(), self.last()) {
            (Some(a), Some(b)) => (a.time, b.time),
            _ => {
                return Err(Error::TimeOutOfRange {
                    time,
                    start: f64::NAN,
                    end: f64::NAN,
                })
            }
        };
        let slack = 1e-12 * end.abs().max(1.0);
        if !(time >= start - slack && time <= end + slack) {
            return Err(Error::TimeOutOfRange { time, start, end });
        }
        Ok(self
            .snapshots
            .iter()
            .min_by(|a, b| (a.time - time).abs().total_cmp(&(b.time - time).abs()))
            .expect("non-empty"))
    }
}

/// A run that stopped early; `partial` ends with the last good state.
#[derive(Debug)]
pub struct RunFailure {
    pub partial: Box<Trajectory>,
    pub error: Error,
}

impl fmt::Display for RunFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.partial.last().map_or(0.0, |s| s.time);
        write!(f, "run aborted after t = {t}: {}", self.error)
    }
}

impl std::error::Error for RunFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

impl From<RunFailure> for Error {
    fn from(f: RunFailure) -> Self {
        f.error
    }
}

/// Integrates from `t = 0` to `t_end`, recording a snapshot every `snapshot_every`
/// (steps are shortened to land on snapshot times) and at `t_end`.
pub fn run(
    scheme: &Scheme,
    initial: MixtureState,
    t_end: f64,
    snapshot_every: f64,
) -> std::result::Result<Trajectory, RunFailure> {
    let mut traj = Trajectory::new(*scheme.grid(), *scheme.eos(), scheme.params().clone());
    let fail = |traj: Trajectory, error: Error| RunFailure {
        partial: Box::new(traj),
        error,
    };
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(fail(
            traj,
            Error::InvalidParameter {
                name: "t_end",
                reason: format!("must be non-negative, got {t_end}"),
            },
        ));
    }
    if !(snapshot_every > 0.0) {
        return Err(fail(
            traj,
            Error::InvalidParameter {
                name: "snapshot_every",
                reason: format!("must be positive, got {snapshot_every}"),
            },
        ));
    }

    let lagged = scheme.params().coupling == AlphaCoupling::Lagged;
    let mut state = initial;
    let mut t = 0.0_f64;
    let mut lag: Option<Field> = None;
    let mut prev_alpha: Option<(Field, f64)> = None;
    let mut next_snap = 1_usize;
    traj.stats.min_dt = f64::INFINITY;

    let mut k1 = match scheme.rhs_with(&state, lag.as_ref()) {
        Ok(k) => k,
        Err(e) => return Err(fail(traj, e)),
    };
    traj.snapshots.push(Snapshot {
        time: 0.0,
        state: state.clone(),
        dalpha1: k1.dalpha1.clone(),
    });

    while t < t_end {
        let target = (next_snap as f64 * snapshot_every).min(t_end);
        let step = (|| -> Result<(MixtureState, usize, f64, bool)> {
            let dt_stable = stable_dt_for(scheme, &state)?;
            let remaining = target - t;
            let (dt, lands) = if dt_stable >= remaining * (1.0 - 1e-12) {
                (remaining, true)
            } else {
                (dt_stable, false)
            };
            let (next, clamped) = step_rk4(scheme, &state, dt, Some(k1.clone()), lag.as_ref())?;
            Ok((next, clamped, dt, lands))
        })();
        let (next, clamped, dt, lands) = match step {
            Ok(v) => v,
            Err(e) => {
                return Err(fail(
                    traj,
                    Error::StepFailed {
                        time: t,
                        source: Box::new(e),
                    },
                ))
            }
        };

        if lagged {
            let alpha_now = match scheme.derive(&state) {
                Ok(d) => d.alpha1,
                Err(e) => return Err(fail(traj, e)),
            };
            prev_alpha = Some((alpha_now, dt));
        }
        state = next;
        t = if lands { target } else { t + dt };
        traj.stats.steps += 1;
        traj.stats.clamped += clamped;
        traj.stats.min_dt = traj.stats.min_dt.min(dt);
        traj.stats.max_dt = traj.stats.max_dt.max(dt);

        if lagged {
            let d = match scheme.derive(&state) {
                Ok(d) => d,
                Err(e) => return Err(fail(traj, e)),
            };
            if let Some((old, dt_prev)) = &prev_alpha {
                lag = Some(d.alpha1.zip_map(old, |a, b| (a - b) / dt_prev));
            }
        }

        k1 = match scheme.rhs_with(&state, lag.as_ref()) {
            Ok(k) => k,
            Err(e) => {
                let err = Error::StepFailed {
                    time: t,
                    source: Box::new(e),
                };
                return Err(fail(traj, err));
            }
        };
        if lands {
            traj.snapshots.push(Snapshot {
                time: t,
                state: state.clone(),
                dalpha1: k1.dalpha1.clone(),
            });
            if target >= next_snap as f64 * snapshot_every {
                next_snap += 1;
            }
        }
    }
    if traj.stats.steps == 0 {
        traj.stats.min_dt = 0.0;
    }
    debug!(
        "run finished: {} steps, dt in [{:e}, {:e}]",
        traj.stats.steps, traj.stats.min_dt, traj.stats.max_dt
    );
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::CellConserved;

    fn eos() -> FluidEos {
        FluidEos {
            k1: 1.4,
            k2: 2.8,
            pinf1: 0.0,
            pinf2: 85.0,
        }
    }

    fn rest(n: usize) -> MixtureState {
        MixtureState::uniform(
            Grid::unit(n).unwrap(),
            CellConserved {
                r1: 0.05,
                r2: 0.7,
                q1: 0.0,
                q2: 0.0,
                en1: 2.5,
                en2: 120.0,
            },
        )
    }

    #[test]
    fn stable_dt_formula() {
        // Ideal gas at rest with c = sqrt(K p / rho) = 10: K = 2, rho = 0.02, p = 1
        // => A = alpha (p + B) and en = A / (K - 1).
        let eos = FluidEos::ideal(2.0);
        let cell = CellConserved {
            r1: 0.01,
            r2: 0.01,
            q1: 0.0,
            q2: 0.0,
            en1: 0.5,
            en2: 0.5,
        };
        let state = MixtureState::uniform(Grid::unit(100).unwrap(), cell);
        let params = SchemeParams::with_eps(0.01);
        let dt = stable_dt(&state, &eos, &params).unwrap();
        assert!((dt - 5e-4).abs() <= 1e-15, "{dt}");

        // doubling the sound speed (4x pressure at fixed density) halves dt
        let cell4 = CellConserved {
            en1: 2.0,
            en2: 2.0,
            ..cell
        };
        let state4 = MixtureState::uniform(Grid::unit(100).unwrap(), cell4);
        let dt4 = stable_dt(&state4, &eos, &params).unwrap();
        assert!((dt4 - 2.5e-4).abs() <= 1e-15);
    }

    #[test]
    fn rest_is_bit_exact_fixed_point() {
        let s = rest(64);
        let params = SchemeParams::with_eps(1.0 / 16.0).without_sources();
        let scheme = Scheme::new(s.grid, eos(), params).unwrap();
        let (next, clamped) = step_rk4(&scheme, &s, 1e-3, None, None).unwrap();
        assert_eq!(next, s);
        assert_eq!(clamped, 0);

        let traj = run(&scheme, s.clone(), 1.0, 0.25).unwrap();
        assert_eq!(traj.last().unwrap().state, s);
        assert_eq!(traj.times(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn zero_end_time_gives_one_snapshot() {
        let s = rest(32);
        let scheme = Scheme::new(s.grid, eos(), SchemeParams::with_eps(1.0 / 8.0)).unwrap();
        let traj = run(&scheme, s, 0.0, 0.1).unwrap();
        assert_eq!(traj.snapshots.len(), 1);
        assert_eq!(traj.stats.steps, 0);
    }

    /// y' = y^2, y(0) = 1 has y(t) = 1 / (1 - t); local error of RK4 is O(dt^5).
    #[test]
    fn rk4_local_error_order() {
        let exact = |t: f64| 1.0 / (1.0 - t);
        let err = |dt: f64| {
            let y = rk4_step(&1.0_f64, dt, None, |y| Ok(y * y), |y, a, k| *y += a * k).unwrap();
            (y - exact(dt)).abs()
        };
        let dts = [0.08, 0.04, 0.02, 0.01];
        for w in dts.windows(2) {
            let slope = (err(w[0]) / err(w[1])).log2();
            assert!((slope - 5.0).abs() < 0.25, "slope {slope}");
        }
    }

    #[test]
    fn stage_errors_are_tagged() {
        let mut calls = 0;
        let r = rk4_step(
            &1.0_f64,
            0.1,
            None,
            |y| {
                calls += 1;
                if calls == 3 {
                    Err(Error::InvalidState("boom".into()))
                } else {
                    Ok(*y)
                }
            },
            |y, a, k| *y += a * k,
        );
        assert!(matches!(r, Err(Error::Stage { stage: 3, .. })));
    }

    #[test]
    fn nearest_snapshot_lookup() {
        let s = rest(32);
        let scheme = Scheme::new(s.grid, eos(), SchemeParams::with_eps(1.0 / 8.0).without_sources()).unwrap();
        let traj = run(&scheme, s, 0.01, 0.004).unwrap();
        assert_eq!(traj.times(), vec![0.0, 0.004, 0.008, 0.01]);
        assert_eq!(traj.nearest(0.0045).unwrap().time, 0.004);
        assert!(traj.nearest(0.02).is_err());
    }
}
