//! Run configuration files.
//!
//! The format is flat TOML. Recognized keys:
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `scenario` | preset name, or `"custom"` with `left.*` / `right.*` | required |
//! | `eps` | stencil width | `4 / n_cells`, else `0.01` |
//! | `n_cells` | grid size | `round(4 / eps)` |
//! | `lambda` | mollifier exponent, in (0,1) | `0.5` |
//! | `kappa1`, `kappa2` | mass and energy sources | `eps^2` |
//! | `cfl` | step factor in (0,1] | `0.5` |
//! | `r_min` | partial-density floor | `1e-8` |
//! | `kernel` | `"bump"` or `"cosine"` | `"bump"` |
//! | `coupling` | `"exact"` or `"lagged"` | `"exact"` |
//! | `t_end` | final time (scaled) | preset value |
//! | `snapshot_every` | snapshot cadence | `t_end / 20` |
//! | `smoothing_cells` | half-width of the initial jump smoothing | `4` |
//! | `output_dir` | where `run` writes | `"out"` |
//! | `eos.k1`, `eos.k2`, `eos.pinf1`, `eos.pinf2` | stiffened-gas constants (scaled) | preset values |
//! | `left.*`, `right.*` | `p, alpha1, rho1, rho2, v1, v2` for `scenario = "custom"` | none |
//!
//! Unknown keys are rejected.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::driver::scenario::{preset, riemann_on_torus, PrimitiveSide};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::params::{AlphaCoupling, FluidEos, KernelShape, SchemeParams, DEFAULT_CFL, DEFAULT_LAMBDA, DEFAULT_R_MIN};
use crate::scheme::Scheme;
use crate::state::MixtureState;

pub const DEFAULT_EPS: f64 = 0.01;
/// Grid points per stencil width in production runs.
pub const DEFAULT_OFFSET: usize = 4;
pub const DEFAULT_SMOOTHING_CELLS: usize = 4;
pub const DEFAULT_SNAPSHOTS: usize = 20;

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEos {
    k1: Option<f64>,
    k2: Option<f64>,
    pinf1: Option<f64>,
    pinf2: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: Option<String>,
    eps: Option<f64>,
    n_cells: Option<usize>,
    lambda: Option<f64>,
    kappa1: Option<f64>,
    kappa2: Option<f64>,
    cfl: Option<f64>,
    r_min: Option<f64>,
    kernel: Option<KernelShape>,
    coupling: Option<AlphaCoupling>,
    t_end: Option<f64>,
    snapshot_every: Option<f64>,
    smoothing_cells: Option<usize>,
    output_dir: Option<PathBuf>,
    eos: Option<RawEos>,
    left: Option<PrimitiveSide>,
    right: Option<PrimitiveSide>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioSpec {
    Preset(String),
    Custom { left: PrimitiveSide, right: PrimitiveSide },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub eos: FluidEos,
    pub params: SchemeParams,
    pub scenario: ScenarioSpec,
    pub left: PrimitiveSide,
    pub right: PrimitiveSide,
    pub n_cells: usize,
    pub t_end: f64,
    pub snapshot_every: f64,
    pub smoothing_cells: usize,
    pub output_dir: PathBuf,
}

fn config_error(path: &Path, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

impl RunConfig {
    /// Parses and validates configuration text; `origin` is used in messages only.
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::resolve(raw, origin)
    }

    fn resolve(raw: RawConfig, origin: &Path) -> Result<Self> {
        let name = raw
            .scenario
            .clone()
            .ok_or_else(|| config_error(origin, "missing required key `scenario`"))?;

        let (scenario, mut eos, left, right, preset_t_end) = if name == "custom" {
            let (left, right) = raw
                .left
                .zip(raw.right)
                .ok_or_else(|| config_error(origin, "scenario \"custom\" needs `left` and `right` tables"))?;
            let e = raw
                .eos
                .and_then(|e| {
                    Some(FluidEos {
                        k1: e.k1?,
                        k2: e.k2?,
                        pinf1: e.pinf1?,
                        pinf2: e.pinf2?,
                    })
                })
                .ok_or_else(|| {
                    config_error(origin, "scenario \"custom\" needs eos.k1, eos.k2, eos.pinf1, eos.pinf2")
                })?;
            (ScenarioSpec::Custom { left, right }, e, left, right, None)
        } else {
            if raw.left.is_some() || raw.right.is_some() {
                return Err(config_error(
                    origin,
                    "`left` / `right` are only allowed with scenario \"custom\"",
                ));
            }
            let p = preset(&name)?;
            (ScenarioSpec::Preset(name), p.eos, p.left, p.right, Some(p.t_end))
        };
        if let Some(e) = raw.eos {
            eos.k1 = e.k1.unwrap_or(eos.k1);
            eos.k2 = e.k2.unwrap_or(eos.k2);
            eos.pinf1 = e.pinf1.unwrap_or(eos.pinf1);
            eos.pinf2 = e.pinf2.unwrap_or(eos.pinf2);
        }
        eos.validate()?;

        let (eps, n_cells) = match (raw.eps, raw.n_cells) {
            (Some(eps), Some(n)) => (eps, n),
            (Some(eps), None) => (eps, (DEFAULT_OFFSET as f64 / eps).round() as usize),
            (None, Some(n)) => (DEFAULT_OFFSET as f64 / n as f64, n),
            (None, None) => (DEFAULT_EPS, (DEFAULT_OFFSET as f64 / DEFAULT_EPS).round() as usize),
        };
        let params = SchemeParams {
            eps,
            lambda: raw.lambda.unwrap_or(DEFAULT_LAMBDA),
            kappa1: raw.kappa1.unwrap_or(eps * eps),
            kappa2: raw.kappa2.unwrap_or(eps * eps),
            cfl: raw.cfl.unwrap_or(DEFAULT_CFL),
            r_min: raw.r_min.unwrap_or(DEFAULT_R_MIN),
            kernel: raw.kernel.unwrap_or_default(),
            coupling: raw.coupling.unwrap_or_default(),
        };
        let grid = Grid::unit(n_cells)?;
        params.validate(&grid)?;
        crate::kernel::make_kernel(params.eps, params.lambda, &grid, params.kernel)?;

        let t_end = raw
            .t_end
            .or(preset_t_end)
            .ok_or_else(|| config_error(origin, "missing `t_end`"))?;
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "t_end",
                reason: format!("must be positive, got {t_end}"),
            });
        }
        let snapshot_every = raw.snapshot_every.unwrap_or(t_end / DEFAULT_SNAPSHOTS as f64);
        if !(snapshot_every > 0.0 && snapshot_every.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "snapshot_every",
                reason: format!("must be positive, got {snapshot_every}"),
            });
        }
        let smoothing_cells = raw.smoothing_cells.unwrap_or(DEFAULT_SMOOTHING_CELLS);
        if smoothing_cells < 1 {
            return Err(Error::InvalidParameter {
                name: "smoothing_cells",
                reason: "must be at least 1".into(),
            });
        }
        left.validate(&eos)?;
        right.validate(&eos)?;

        Ok(RunConfig {
            eos,
            params,
            scenario,
            left,
            right,
            n_cells,
            t_end,
            snapshot_every,
            smoothing_cells,
            output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from("out")),
        })
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::unit(self.n_cells)
    }

    pub fn scheme(&self) -> Result<Scheme> {
        Scheme::new(self.grid()?, self.eos, self.params.clone())
    }

    pub fn initial_state(&self) -> Result<MixtureState> {
        riemann_on_torus(&self.left, &self.right, &self.grid()?, &self.eos, self.smoothing_cells)
    }

    pub fn scenario_name(&self) -> &str {
        match &self.scenario {
            ScenarioSpec::Preset(name) => name,
            ScenarioSpec::Custom { .. } => "custom",
        }
    }

    /// The same configuration with another stencil width, on the matched grid
    /// (`DEFAULT_OFFSET` points per stencil width). Source terms follow `eps^2`.
    pub fn with_eps(&self, eps: f64) -> Self {
        let mut out = self.clone();
        out.params.eps = eps;
        out.params.kappa1 = if self.params.kappa1 == 0.0 { 0.0 } else { eps * eps };
        out.params.kappa2 = if self.params.kappa2 == 0.0 { 0.0 } else { eps * eps };
        out.n_cells = (DEFAULT_OFFSET as f64 / eps).round() as usize;
        out
    }

    /// The fully resolved configuration in the input format (re-loadable).
    pub fn to_toml(&self) -> String {
        let mut s = String::new();
        let f = |v: f64| format!("{v:?}");
        let _ = writeln!(s, "scenario = \"{}\"", self.scenario_name());
        let _ = writeln!(s, "eps = {}", f(self.params.eps));
        let _ = writeln!(s, "n_cells = {}", self.n_cells);
        let _ = writeln!(s, "lambda = {}", f(self.params.lambda));
        let _ = writeln!(s, "kappa1 = {}", f(self.params.kappa1));
        let _ = writeln!(s, "kappa2 = {}", f(self.params.kappa2));
        let _ = writeln!(s, "cfl = {}", f(self.params.cfl));
        let _ = writeln!(s, "r_min = {}", f(self.params.r_min));
        let _ = writeln!(s, "kernel = \"{}\"", self.params.kernel.name());
        let _ = writeln!(s, "coupling = \"{}\"", self.params.coupling.name());
        let _ = writeln!(s, "t_end = {}", f(self.t_end));
        let _ = writeln!(s, "snapshot_every = {}", f(self.snapshot_every));
        let _ = writeln!(s, "smoothing_cells = {}", self.smoothing_cells);
        let _ = writeln!(s, "output_dir = {:?}", self.output_dir.to_string_lossy());
        let _ = writeln!(s, "eos.k1 = {}", f(self.eos.k1));
        let _ = writeln!(s, "eos.k2 = {}", f(self.eos.k2));
        let _ = writeln!(s, "eos.pinf1 = {}", f(self.eos.pinf1));
        let _ = writeln!(s, "eos.pinf2 = {}", f(self.eos.pinf2));
        if let ScenarioSpec::Custom { left, right } = &self.scenario {
            for (label, side) in [("left", left), ("right", right)] {
                let _ = writeln!(s, "\n[{label}]");
                let _ = writeln!(s, "p = {}", f(side.p));
                let _ = writeln!(s, "alpha1 = {}", f(side.alpha1));
                let _ = writeln!(s, "rho1 = {}", f(side.rho1));
                let _ = writeln!(s, "rho2 = {}", f(side.rho2));
                let _ = writeln!(s, "v1 = {}", f(side.v1));
                let _ = writeln!(s, "v2 = {}", f(side.v2));
            }
        }
        s
    }
}

/// Reads and validates a configuration file.
pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    RunConfig::from_toml_str(&text, path)
}
