//! Batch check of the discrete conservation properties of a trajectory.

use std::fmt::Write as _;

use crate::integrate::Trajectory;
use crate::state::{validate_state, Violation};

pub const AUDIT_HEADER: &str = "time,mass1_drift,mass2_drift,momentum,momentum_drift,energy_drift";

/// Drift limits for a passing audit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditThresholds {
    /// Relative drift of `mean(r_i) - kappa1 t`.
    pub mass: f64,
    /// Relative drift of total mixture momentum.
    pub momentum: f64,
}

impl AuditThresholds {
    /// Tighter mass bound without a source; with a source the bound absorbs the
    /// roundoff of accumulating `kappa1 t`.
    pub fn for_kappa1(kappa1: f64) -> Self {
        AuditThresholds {
            mass: if kappa1 == 0.0 { 1e-12 } else { 1e-10 },
            momentum: 1e-11,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditRow {
    pub time: f64,
    /// `(mean(r_i)(t) - kappa1 t - mean(r_i)(0)) / mean(r_i)(0)`.
    pub mass_drift: [f64; 2],
    /// `h sum (q_1 + q_2)`.
    pub momentum: f64,
    /// `(momentum(t) - momentum(0)) / momentum_scale`.
    pub momentum_drift: f64,
    /// `(E(t) - E(0) - 2 kappa2 L t) / E(0)` with `E = h sum (en_1 + en_2)`.
    pub energy_drift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub rows: Vec<AuditRow>,
    pub kappa1: f64,
    pub kappa2: f64,
    /// Normalization of momentum drift: the largest `h sum (|q_1| + |q_2|)` over the run,
    /// or the total mass when the mixture never moves.
    pub momentum_scale: f64,
    pub violations: Vec<(f64, Violation)>,
}

impl AuditReport {
    pub fn max_mass_drift(&self) -> [f64; 2] {
        let mut m = [0.0_f64; 2];
        for r in &self.rows {
            m[0] = m[0].max(r.mass_drift[0].abs());
            m[1] = m[1].max(r.mass_drift[1].abs());
        }
        m
    }

    pub fn max_momentum_drift(&self) -> f64 {
        self.rows.iter().fold(0.0_f64, |m, r| m.max(r.momentum_drift.abs()))
    }

    /// Momentum drift per unit time, over the whole run.
    pub fn momentum_drift_rate(&self) -> f64 {
        let span = self.rows.last().map_or(0.0, |r| r.time);
        if span > 0.0 {
            self.max_momentum_drift() / span
        } else {
            0.0
        }
    }

    pub fn max_energy_drift(&self) -> f64 {
        self.rows.iter().fold(0.0_f64, |m, r| m.max(r.energy_drift.abs()))
    }

    /// Descriptions of every breached threshold or invariant; empty when the audit passes.
    pub fn failures(&self, thresholds: &AuditThresholds) -> Vec<String> {
        let mut out = Vec::new();
        let mass = self.max_mass_drift();
        for (i, m) in mass.iter().enumerate() {
            if !(*m <= thresholds.mass) {
                out.push(format!("mass{} drift {m:e} exceeds {:e}", i + 1, thresholds.mass));
            }
        }
        let mom = self.max_momentum_drift();
        if !(mom <= thresholds.momentum) {
            out.push(format!("momentum drift {mom:e} exceeds {:e}", thresholds.momentum));
        }
        for (t, v) in &self.violations {
            out.push(format!("t = {t}: {v}"));
        }
        out
    }

    pub fn passes(&self, thresholds: &AuditThresholds) -> bool {
        self.failures(thresholds).is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{AUDIT_HEADER}");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.time, r.mass_drift[0], r.mass_drift[1], r.momentum, r.momentum_drift, r.energy_drift
            );
        }
        s
    }
}

/// Time series of mass, momentum and energy drift plus any invariant breaches.
pub fn conservation_audit(traj: &Trajectory) -> AuditReport {
    let (k1, k2) = (traj.params.kappa1, traj.params.kappa2);
    let mut report = AuditReport {
        rows: Vec::with_capacity(traj.snapshots.len()),
        kappa1: k1,
        kappa2: k2,
        momentum_scale: 0.0,
        violations: Vec::new(),
    };
    let Some(first) = traj.first() else {
        return report;
    };
    let h = traj.grid.h();
    let length = traj.grid.length();
    let m0 = [first.state.r1.mean(), first.state.r2.mean()];
    let t0 = first.state.totals();
    let mut scale = 0.0_f64;
    for snap in &traj.snapshots {
        let s = &snap.state;
        scale = scale.max(h * s.q1.iter().chain(s.q2.iter()).map(|q| q.abs()).sum::<f64>());
    }
    if scale == 0.0 {
        scale = t0.mass1 + t0.mass2;
    }
    report.momentum_scale = scale;

    for snap in &traj.snapshots {
        let s = &snap.state;
        let t = snap.time;
        let totals = s.totals();
        let mass_drift = [
            (s.r1.mean() - k1 * t - m0[0]) / m0[0],
            (s.r2.mean() - k1 * t - m0[1]) / m0[1],
        ];
        let energy0 = t0.energy;
        report.rows.push(AuditRow {
            time: t,
            mass_drift,
            momentum: totals.momentum,
            momentum_drift: (totals.momentum - t0.momentum) / scale,
            energy_drift: (totals.energy - energy0 - 2.0 * k2 * length * t) / energy0.abs(),
        });
        for v in validate_state(s, &traj.params) {
            report.violations.push((t, v));
        }
    }
    report
}
