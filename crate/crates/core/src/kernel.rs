//! Discrete mollifier `phi_mu(x) = phi(x / mu) / mu` with `mu = eps^lambda`, and
//! periodic convolutions with it and with its derivative.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::params::KernelShape;

/// Unnormalized reference shape on `(-1, 1)` and its derivative.
fn shape_value(shape: KernelShape, y: f64) -> f64 {
    if y.abs() >= 1.0 {
        return 0.0;
    }
    match shape {
        KernelShape::Bump => (-1.0 / (1.0 - y * y)).exp(),
        KernelShape::Cosine => 0.5 * (1.0 + (std::f64::consts::PI * y).cos()),
    }
}

fn shape_derivative(shape: KernelShape, y: f64) -> f64 {
    if y.abs() >= 1.0 {
        return 0.0;
    }
    match shape {
        KernelShape::Bump => {
            let s = 1.0 - y * y;
            -2.0 * y / (s * s) * (-1.0 / s).exp()
        }
        KernelShape::Cosine => -0.5 * std::f64::consts::PI * (std::f64::consts::PI * y).sin(),
    }
}

/// `int_{-1}^{1}` of the unnormalized shape.
fn shape_mass(shape: KernelShape) -> f64 {
    static BUMP: OnceLock<f64> = OnceLock::new();
    match shape {
        // The bump is flat to all orders at +-1, so the trapezoidal rule converges
        // faster than any power of the step.
        KernelShape::Bump => *BUMP.get_or_init(|| {
            let n = 20_000;
            let dy = 2.0 / n as f64;
            (1..n).map(|k| shape_value(shape, -1.0 + k as f64 * dy)).sum::<f64>() * dy
        }),
        KernelShape::Cosine => 1.0,
    }
}

/// Evaluates the normalized reference shape `phi` (unit integral).
pub fn reference_phi(shape: KernelShape, y: f64) -> f64 {
    shape_value(shape, y) / shape_mass(shape)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MollifierKernel {
    half_width_cells: usize,
    radius: f64,
    shape: KernelShape,
    /// Offsets `-H..=H`, stored at index `k + H`.
    weights: Vec<f64>,
    dweights: Vec<f64>,
}

impl MollifierKernel {
    pub fn half_width_cells(&self) -> usize {
        self.half_width_cells
    }

    /// Support radius `eps^lambda`.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn shape(&self) -> KernelShape {
        self.shape
    }

    /// Weights for offsets `-H..=H`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Derivative weights for offsets `-H..=H`.
    pub fn dweights(&self) -> &[f64] {
        &self.dweights
    }
}

/// Builds the discrete kernel of radius `eps^lambda` on `grid`.
pub fn make_kernel(eps: f64, lambda: f64, grid: &Grid, shape: KernelShape) -> Result<MollifierKernel> {
    let radius = eps.powf(lambda);
    make_kernel_with_radius(radius, grid, shape)
}

pub fn make_kernel_with_radius(radius: f64, grid: &Grid, shape: KernelShape) -> Result<MollifierKernel> {
    let h = grid.h();
    let ratio = radius / h;
    if !(ratio >= 2.0 * (1.0 - 1e-12)) {
        return Err(Error::KernelUnderResolved { radius, h });
    }
    let half = (ratio - 1e-9).ceil() as usize;
    if 2 * half + 1 > grid.n_cells() {
        return Err(Error::InvalidParameter {
            name: "lambda",
            reason: format!("kernel support of {} cells exceeds the grid", 2 * half + 1),
        });
    }
    let mass = shape_mass(shape);
    let len = 2 * half + 1;
    let mut weights = vec![0.0; len];
    let mut dweights = vec![0.0; len];
    for k in 0..=half {
        let y = k as f64 * h / radius;
        // phi_mu(x) h and phi_mu'(x) h at x = k h
        let w = shape_value(shape, y) / mass / radius * h;
        let d = shape_derivative(shape, y) / mass / (radius * radius) * h;
        weights[half + k] = w;
        weights[half - k] = w;
        dweights[half + k] = d;
        dweights[half - k] = -d;
    }
    dweights[half] = 0.0;

    // Pairwise from the outside in keeps the weights exactly symmetric after scaling.
    let mut total = weights[half];
    for k in (1..=half).rev() {
        total += weights[half + k] + weights[half - k];
    }
    for w in &mut weights {
        *w /= total;
    }

    Ok(MollifierKernel {
        half_width_cells: half,
        radius,
        shape,
        weights,
        dweights,
    })
}

/// Periodic convolution with the kernel taps, pairing offsets `+k` and `-k`.
///
/// Even taps give `w_0 f[j] + sum_k w_k (f[j-k] + f[j+k])`; odd taps give
/// `sum_k d_k (f[j-k] - f[j+k])`, which is exactly zero on constants.
fn convolve(f: &Field, taps: &[f64], half: usize, odd: bool) -> Field {
    let n = f.len();
    let src = f.values();
    let centre = if odd { 0.0 } else { taps[half] };
    let out = (0..n)
        .map(|j| {
            let mut acc = centre * src[j];
            for k in 1..=half {
                let w = taps[half + k];
                let back = src[(j + n - k % n) % n];
                let fwd = src[(j + k) % n];
                acc += if odd { w * (back - fwd) } else { w * (back + fwd) };
            }
            acc
        })
        .collect();
    Field::from_vec(out)
}

/// Normalized bump taps for offsets `-half..=half` (support radius `half + 1` cells).
pub(crate) fn bump_taps(half: usize) -> Vec<f64> {
    let radius = (half + 1) as f64;
    let mut taps: Vec<f64> = (0..=2 * half)
        .map(|i| shape_value(KernelShape::Bump, (i as f64 - half as f64) / radius))
        .collect();
    let total: f64 = taps.iter().sum();
    for t in &mut taps {
        *t /= total;
    }
    taps
}

pub(crate) fn mollify_with_taps(f: &Field, taps: &[f64], half: usize) -> Field {
    convolve(f, taps, half, false)
}

/// Periodic convolution `f * phi_mu`.
pub fn mollify(f: &Field, kernel: &MollifierKernel) -> Field {
    convolve(f, &kernel.weights, kernel.half_width_cells, false)
}

/// `d/dx (f * phi_mu) = f * phi_mu'`.
pub fn mollified_gradient(f: &Field, kernel: &MollifierKernel) -> Field {
    convolve(f, &kernel.dweights, kernel.half_width_cells, true)
}
