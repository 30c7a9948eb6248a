//! Material constants and scheme configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Stiffened-gas constants of the two fluids: `p = (K - 1) rho e_int - K p_inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluidEos {
    pub k1: f64,
    pub k2: f64,
    pub pinf1: f64,
    pub pinf2: f64,
}

impl FluidEos {
    pub fn new(k1: f64, k2: f64, pinf1: f64, pinf2: f64) -> Result<Self> {
        let eos = FluidEos { k1, k2, pinf1, pinf2 };
        eos.validate()?;
        Ok(eos)
    }

    /// Two ideal gases sharing exponent `k`.
    pub fn ideal(k: f64) -> Self {
        FluidEos {
            k1: k,
            k2: k,
            pinf1: 0.0,
            pinf2: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, k) in [("eos.k1", self.k1), ("eos.k2", self.k2)] {
            if !(k > 1.0 && k.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must exceed 1, got {k}"),
                });
            }
        }
        for (name, p) in [("eos.pinf1", self.pinf1), ("eos.pinf2", self.pinf2)] {
            if !(p >= 0.0 && p.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be non-negative, got {p}"),
                });
            }
        }
        Ok(())
    }

    /// `B_i = K_i p_inf_i`.
    pub fn b1(&self) -> f64 {
        self.k1 * self.pinf1
    }

    pub fn b2(&self) -> f64 {
        self.k2 * self.pinf2
    }

    /// The same constants with the fluids exchanged.
    pub fn swapped(&self) -> Self {
        FluidEos {
            k1: self.k2,
            k2: self.k1,
            pinf1: self.pinf2,
            pinf2: self.pinf1,
        }
    }
}

/// Shape of the mollifier before scaling to its support radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelShape {
    /// `C exp(-1 / (1 - x^2))` on `(-1, 1)`.
    #[default]
    Bump,
    /// `(1 + cos(pi x)) / 2` on `(-1, 1)`.
    Cosine,
}

impl KernelShape {
    pub fn name(&self) -> &'static str {
        match self {
            KernelShape::Bump => "bump",
            KernelShape::Cosine => "cosine",
        }
    }
}

/// How the `p d(alpha_i)/dt` term of the energy equations is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaCoupling {
    /// Per-cell elimination through the closure sensitivities.
    #[default]
    Exact,
    /// Backward difference of the volume fraction over the previous step.
    Lagged,
}

impl AlphaCoupling {
    pub fn name(&self) -> &'static str {
        match self {
            AlphaCoupling::Exact => "exact",
            AlphaCoupling::Lagged => "lagged",
        }
    }
}

pub const DEFAULT_LAMBDA: f64 = 0.5;
pub const DEFAULT_CFL: f64 = 0.5;
pub const DEFAULT_R_MIN: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    /// Stencil width of the upwind bracket.
    pub eps: f64,
    /// Mollifier support radius is `eps^lambda`.
    pub lambda: f64,
    /// Mass source.
    pub kappa1: f64,
    /// Energy source.
    pub kappa2: f64,
    pub cfl: f64,
    /// Positivity floor for the partial densities.
    pub r_min: f64,
    pub kernel: KernelShape,
    pub coupling: AlphaCoupling,
}

impl SchemeParams {
    /// Defaults for a given `eps`, with `kappa_i = eps^2`.
    pub fn with_eps(eps: f64) -> Self {
        SchemeParams {
            eps,
            lambda: DEFAULT_LAMBDA,
            kappa1: eps * eps,
            kappa2: eps * eps,
            cfl: DEFAULT_CFL,
            r_min: DEFAULT_R_MIN,
            kernel: KernelShape::Bump,
            coupling: AlphaCoupling::Exact,
        }
    }

    pub fn without_sources(mut self) -> Self {
        self.kappa1 = 0.0;
        self.kappa2 = 0.0;
        self
    }

    /// Mollifier support radius `eps^lambda`.
    pub fn mollifier_radius(&self) -> f64 {
        self.eps.powf(self.lambda)
    }

    /// Checks the parameter ranges and the stencil alignment on `grid`;
    /// returns the stencil offset in cells.
    pub fn validate(&self, grid: &Grid) -> Result<usize> {
        self.validate_ranges()?;
        grid.cells_in(self.eps)
    }

    pub fn validate_ranges(&self) -> Result<()> {
        let bad = |name: &'static str, reason: String| Err(Error::InvalidParameter { name, reason });
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad("eps", format!("must be positive, got {}", self.eps));
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return bad("lambda", format!("lambda must lie in (0,1), got {}", self.lambda));
        }
        if !(self.kappa1 >= 0.0 && self.kappa1.is_finite()) {
            return bad("kappa1", format!("must be non-negative, got {}", self.kappa1));
        }
        if !(self.kappa2 >= 0.0 && self.kappa2.is_finite()) {
            return bad("kappa2", format!("must be non-negative, got {}", self.kappa2));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return bad("cfl", format!("cfl must lie in (0,1], got {}", self.cfl));
        }
        if !(self.r_min > 0.0 && self.r_min.is_finite()) {
            return bad("r_min", format!("must be positive, got {}", self.r_min));
        }
        Ok(())
    }
}
