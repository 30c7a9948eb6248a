//! Riemann data on the torus and the bundled scenario presets.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::closure::{close_cell, TOL_CLOSURE};
use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::kernel::{bump_taps, mollify_with_taps};
use crate::params::{FluidEos, DEFAULT_R_MIN};
use crate::state::{CellConserved, MixtureState};

/// One side of a Riemann problem in primitive variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimitiveSide {
    pub p: f64,
    pub alpha1: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub v1: f64,
    pub v2: f64,
}

impl PrimitiveSide {
    pub fn validate(&self, eos: &FluidEos) -> Result<()> {
        let bad = |msg: String| Err(Error::InconsistentPrimitive(msg));
        if !(self.alpha1 > 0.0 && self.alpha1 < 1.0) {
            return bad(format!("alpha1 = {} outside (0,1)", self.alpha1));
        }
        if !(self.rho1 > 0.0 && self.rho2 > 0.0) {
            return bad(format!("densities must be positive: {}, {}", self.rho1, self.rho2));
        }
        if !(self.p + eos.b1() > 0.0 && self.p + eos.b2() > 0.0) {
            return bad(format!("p + K_i pinf_i must be positive (p = {})", self.p));
        }
        if ![self.p, self.v1, self.v2].iter().all(|v| v.is_finite()) {
            return bad("non-finite primitive".into());
        }
        Ok(())
    }

    /// Specific total energies from the stiffened-gas laws.
    pub fn energies(&self, eos: &FluidEos) -> (f64, f64) {
        (
            (self.p + eos.b1()) / ((eos.k1 - 1.0) * self.rho1) + 0.5 * self.v1 * self.v1,
            (self.p + eos.b2()) / ((eos.k2 - 1.0) * self.rho2) + 0.5 * self.v2 * self.v2,
        )
    }

    pub fn to_conserved(&self, eos: &FluidEos) -> CellConserved {
        let (e1, e2) = self.energies(eos);
        let r1 = self.rho1 * self.alpha1;
        let r2 = self.rho2 * (1.0 - self.alpha1);
        CellConserved {
            r1,
            r2,
            q1: r1 * self.v1,
            q2: r2 * self.v2,
            en1: r1 * e1,
            en2: r2 * e2,
        }
    }

    fn lerp(a: &Self, b: &Self, theta: f64) -> Self {
        let mix = |x: f64, y: f64| theta * x + (1.0 - theta) * y;
        PrimitiveSide {
            p: mix(a.p, b.p),
            alpha1: mix(a.alpha1, b.alpha1),
            rho1: mix(a.rho1, b.rho1),
            rho2: mix(a.rho2, b.rho2),
            v1: mix(a.v1, b.v1),
            v2: mix(a.v2, b.v2),
        }
    }
}

/// Closes the conserved image of `side` and checks it returns the same `(p, alpha1)`.
fn recheck(side: &PrimitiveSide, eos: &FluidEos, label: &str) -> Result<()> {
    side.validate(eos)?;
    let cell = side.to_conserved(eos);
    let closed = close_cell(&cell, eos, DEFAULT_R_MIN.min(cell.r1.min(cell.r2)))
        .map_err(|e| Error::InconsistentPrimitive(format!("{label} side: {e}")))?;
    let dp = (closed.p - side.p).abs() / (side.p.abs() + eos.b1().min(eos.b2()));
    let da = (closed.alpha1 - side.alpha1).abs();
    if dp > 1e3 * TOL_CLOSURE || da > 1e3 * TOL_CLOSURE {
        return Err(Error::InconsistentPrimitive(format!(
            "{label} side does not close back onto itself (dp = {dp:e}, dalpha = {da:e})"
        )));
    }
    Ok(())
}

/// Left state on `[0.25 L, 0.75 L)`, right state elsewhere, each jump smoothed by a bump of
/// radius `smoothing_cells * h`. Primitives are blended, then converted exactly.
pub fn riemann_on_torus(
    left: &PrimitiveSide,
    right: &PrimitiveSide,
    grid: &Grid,
    eos: &FluidEos,
    smoothing_cells: usize,
) -> Result<MixtureState> {
    if smoothing_cells < 1 {
        return Err(Error::InvalidParameter {
            name: "smoothing_cells",
            reason: "must be at least 1".into(),
        });
    }
    recheck(left, eos, "left")?;
    recheck(right, eos, "right")?;

    let n = grid.n_cells();
    let length = grid.length();
    let indicator = Field::sample(grid, |x| {
        if x >= 0.25 * length && x < 0.75 * length {
            1.0
        } else {
            0.0
        }
    });
    let taps = bump_taps(smoothing_cells);
    let theta = mollify_with_taps(&indicator, &taps, smoothing_cells);

    let mut state = MixtureState::uniform(*grid, right.to_conserved(eos));
    for j in 0..n {
        let t = theta[j].clamp(0.0, 1.0);
        let cell = if t == 1.0 {
            left.to_conserved(eos)
        } else if t == 0.0 {
            right.to_conserved(eos)
        } else {
            PrimitiveSide::lerp(left, right, t).to_conserved(eos)
        };
        state.set_cell(j, cell);
    }
    Ok(state)
}

/// Stiffened-gas constants of a preset, in physical units.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct PresetEos {
    k1: f64,
    k2: f64,
    pinf1: f64,
    pinf2: f64,
    cv1: Option<f64>,
    cv2: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct PresetSide {
    p: f64,
    alpha1: f64,
    v1: f64,
    v2: f64,
    rho1: Option<f64>,
    rho2: Option<f64>,
    temperature: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct PresetEntry {
    description: String,
    source: String,
    length_scale: f64,
    pressure_scale: f64,
    density_scale: f64,
    t_end: f64,
    eos: PresetEos,
    left: PresetSide,
    right: PresetSide,
}

/// A scenario mapped onto the unit torus in scaled units.
#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: String,
    pub description: String,
    pub source: String,
    pub left: PrimitiveSide,
    pub right: PrimitiveSide,
    pub eos: FluidEos,
    /// Suggested end time, scaled.
    pub t_end: f64,
    /// Physical seconds per scaled time unit.
    pub time_scale: f64,
    pub length_scale: f64,
    pub pressure_scale: f64,
    pub density_scale: f64,
}

impl Preset {
    /// Scaled velocity unit.
    pub fn velocity_scale(&self) -> f64 {
        (self.pressure_scale / self.density_scale).sqrt()
    }
}

const PRESET_DATA: &str = include_str!("../../data/presets.toml");

fn preset_table() -> BTreeMap<String, PresetEntry> {
    toml::from_str(PRESET_DATA).expect("bundled preset file is valid")
}

pub fn preset_names() -> Vec<String> {
    // Keep the sanity preset first.
    let mut names: Vec<String> = preset_table().into_keys().collect();
    names.sort_by_key(|n| (n != "uniform-rest", n.clone()));
    names
}

impl PresetEntry {
    fn scale(&self, name: &str) -> Result<Preset> {
        let p0 = self.pressure_scale;
        let rho0 = self.density_scale;
        let u0 = (p0 / rho0).sqrt();
        let e = &self.eos;
        let eos = FluidEos::new(e.k1, e.k2, e.pinf1 / p0, e.pinf2 / p0)?;
        let side = |s: &PresetSide, label: &str| -> Result<PrimitiveSide> {
            let (rho1, rho2) = match (s.rho1, s.rho2, s.temperature) {
                (Some(a), Some(b), None) => (a, b),
                (None, None, Some(t)) => {
                    let (cv1, cv2) = e.cv1.zip(e.cv2).ok_or_else(|| {
                        Error::InconsistentPrimitive(format!(
                            "preset `{name}` {label}: temperature needs eos.cv1 and eos.cv2"
                        ))
                    })?;
                    (
                        (s.p + e.pinf1) / ((e.k1 - 1.0) * cv1 * t),
                        (s.p + e.pinf2) / ((e.k2 - 1.0) * cv2 * t),
                    )
                }
                _ => {
                    return Err(Error::InconsistentPrimitive(format!(
                        "preset `{name}` {label}: give either rho1 and rho2 or temperature"
                    )))
                }
            };
            Ok(PrimitiveSide {
                p: s.p / p0,
                alpha1: s.alpha1,
                rho1: rho1 / rho0,
                rho2: rho2 / rho0,
                v1: s.v1 / u0,
                v2: s.v2 / u0,
            })
        };
        let time_scale = self.length_scale / u0;
        Ok(Preset {
            name: name.to_string(),
            description: self.description.clone(),
            source: self.source.clone(),
            left: side(&self.left, "left")?,
            right: side(&self.right, "right")?,
            eos,
            t_end: self.t_end / time_scale,
            time_scale,
            length_scale: self.length_scale,
            pressure_scale: p0,
            density_scale: rho0,
        })
    }
}

/// Loads a bundled preset by name.
pub fn preset(name: &str) -> Result<Preset> {
    let table = preset_table();
    match table.get(name) {
        Some(entry) => entry.scale(name),
        None => Err(Error::UnknownPreset {
            name: name.to_string(),
            available: preset_names(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_rest_preset() {
        let p = preset("uniform-rest").unwrap();
        assert_eq!(p.left, p.right);
        assert_eq!((p.left.v1, p.left.v2), (0.0, 0.0));
    }

    #[test]
    fn toumi_preset_has_pressure_jump() {
        let p = preset("toumi").unwrap();
        assert_ne!(p.left, p.right);
        assert_eq!(p.left.p, 2.0);
        assert_eq!(p.right.p, 1.0);
        assert_eq!(p.eos.k2, 2.8);
        assert!(p.left.rho2 > 0.9 && p.left.rho2 < 1.1, "{}", p.left.rho2);
        assert!(p.source.contains("Toumi"));
    }

    #[test]
    fn unknown_preset_lists_choices() {
        let err = preset("no-such").unwrap_err().to_string();
        assert!(err.contains("uniform-rest") && err.contains("toumi"), "{err}");
    }

    #[test]
    fn degenerate_riemann_problem_is_uniform() {
        let p = preset("uniform-rest").unwrap();
        let grid = Grid::unit(64).unwrap();
        let s = riemann_on_torus(&p.left, &p.right, &grid, &p.eos, 3).unwrap();
        for j in 0..64 {
            assert_eq!(s.cell(j), s.cell(0));
            let c = close_cell(&s.cell(j), &p.eos, DEFAULT_R_MIN).unwrap();
            assert!((c.p - p.left.p).abs() <= 1e-10 * (1.0 + p.eos.b2()));
            assert!((c.alpha1 - p.left.alpha1).abs() <= 1e-10);
        }
    }

    #[test]
    fn plateaus_close_back_to_the_sides() {
        let p = preset("toumi").unwrap();
        let grid = Grid::unit(200).unwrap();
        let s = riemann_on_torus(&p.left, &p.right, &grid, &p.eos, 4).unwrap();
        for (j, side) in [(100, p.left), (0, p.right), (199, p.right), (60, p.left)] {
            let c = close_cell(&s.cell(j), &p.eos, DEFAULT_R_MIN).unwrap();
            assert!((c.p - side.p).abs() <= 1e-10 * side.p.abs().max(1.0), "{j}");
            assert!((c.alpha1 - side.alpha1).abs() <= 1e-10 * side.alpha1);
            assert!((c.v1 - side.v1).abs() <= 1e-10 && (c.v2 - side.v2).abs() <= 1e-10);
        }
    }

    #[test]
    fn mean_density_is_plateau_average() {
        let p = preset("toumi").unwrap();
        for n in [200usize, 400, 800] {
            let grid = Grid::unit(n).unwrap();
            let smoothing = 4;
            let s = riemann_on_torus(&p.left, &p.right, &grid, &p.eos, smoothing).unwrap();
            let l = p.left.to_conserved(&p.eos);
            let r = p.right.to_conserved(&p.eos);
            let avg1 = 0.5 * (l.r1 + r.r1);
            let avg2 = 0.5 * (l.r2 + r.r2);
            let bound = |a: f64, b: f64| 2.0 * (smoothing as f64 / n as f64) * (a - b).abs();
            assert!((s.r1.mean() - avg1).abs() <= bound(l.r1, r.r1));
            assert!((s.r2.mean() - avg2).abs() <= bound(l.r2, r.r2));
        }
    }

    #[test]
    fn bad_side_rejected() {
        let p = preset("toumi").unwrap();
        let mut bad = p.left;
        bad.alpha1 = 1.5;
        let grid = Grid::unit(64).unwrap();
        assert!(matches!(
            riemann_on_torus(&bad, &p.right, &grid, &p.eos, 2),
            Err(Error::InconsistentPrimitive(_))
        ));
        assert!(riemann_on_torus(&p.left, &p.right, &grid, &p.eos, 0).is_err());
    }
}
