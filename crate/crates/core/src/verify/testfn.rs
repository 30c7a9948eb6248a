//! Space-time test functions for the weak residual.

use std::f64::consts::PI;
use std::fmt;

/// Periodic spatial factor on the unit-length torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpaceMode {
    Constant,
    Cos(u32),
    Sin(u32),
}

impl SpaceMode {
    /// Value and x-derivative at `x` on a torus of length `length`.
    pub fn eval(&self, x: f64, length: f64) -> (f64, f64) {
        match *self {
            SpaceMode::Constant => (1.0, 0.0),
            SpaceMode::Cos(k) => {
                let w = 2.0 * PI * k as f64 / length;
                ((w * x).cos(), -w * (w * x).sin())
            }
            SpaceMode::Sin(k) => {
                let w = 2.0 * PI * k as f64 / length;
                ((w * x).sin(), w * (w * x).cos())
            }
        }
    }
}

impl fmt::Display for SpaceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceMode::Constant => write!(f, "1"),
            SpaceMode::Cos(k) => write!(f, "cos(2pi*{k}x)"),
            SpaceMode::Sin(k) => write!(f, "sin(2pi*{k}x)"),
        }
    }
}

/// Temporal factor on `[0, T]`; every window vanishes at `T` together with its derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeWindow {
    /// `cos^2(pi t / 2T)`: one at `t = 0`, so the initial-data term is exercised.
    Decay,
    /// `sin^2(pi t / T)`: zero at both ends.
    Bump,
}

impl TimeWindow {
    /// Value and t-derivative at `t` for final time `t_end`.
    pub fn eval(&self, t: f64, t_end: f64) -> (f64, f64) {
        match self {
            TimeWindow::Decay => {
                let w = PI / (2.0 * t_end);
                let c = (w * t).cos();
                (c * c, -w * (2.0 * w * t).sin())
            }
            TimeWindow::Bump => {
                let w = PI / t_end;
                let s = (w * t).sin();
                (s * s, w * (2.0 * w * t).sin())
            }
        }
    }
}

impl fmt::Display for TimeWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeWindow::Decay => write!(f, "cos^2(pi t/2T)"),
            TimeWindow::Bump => write!(f, "sin^2(pi t/T)"),
        }
    }
}

/// `psi(x, t) = sum_k c_k X_k(x) W_k(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    pub description: String,
    pub terms: Vec<(f64, SpaceMode, TimeWindow)>,
}

/// `(psi, d psi / dt, d psi / dx)` at one sample point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PsiSample {
    pub value: f64,
    pub dt: f64,
    pub dx: f64,
}

impl TestFunction {
    pub fn product(space: SpaceMode, window: TimeWindow) -> Self {
        TestFunction {
            description: format!("{space} * {window}"),
            terms: vec![(1.0, space, window)],
        }
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &TestFunction, b: f64) -> Self {
        let mut terms: Vec<_> = self.terms.iter().map(|&(c, s, w)| (a * c, s, w)).collect();
        terms.extend(other.terms.iter().map(|&(c, s, w)| (b * c, s, w)));
        TestFunction {
            description: format!("{a} * ({}) + {b} * ({})", self.description, other.description),
            terms,
        }
    }

    pub fn eval(&self, x: f64, t: f64, length: f64, t_end: f64) -> PsiSample {
        let mut out = PsiSample::default();
        for &(c, space, window) in &self.terms {
            let (xv, xd) = space.eval(x, length);
            let (tv, td) = window.eval(t, t_end);
            out.value += c * xv * tv;
            out.dt += c * xv * td;
            out.dx += c * xd * tv;
        }
        out
    }
}

/// The default family: `{cos, sin}(2 pi k x)` for `k = 1, 2, 3`, each with both windows.
pub fn default_test_functions() -> Vec<TestFunction> {
    let mut out = Vec::with_capacity(12);
    for window in [TimeWindow::Decay, TimeWindow::Bump] {
        for k in 1..=3 {
            out.push(TestFunction::product(SpaceMode::Cos(k), window));
            out.push(TestFunction::product(SpaceMode::Sin(k), window));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows_vanish_at_the_end() {
        for w in [TimeWindow::Decay, TimeWindow::Bump] {
            let (v, d) = w.eval(0.3, 0.3);
            assert!(v.abs() < 1e-30 && d.abs() < 1e-14, "{w}: {v} {d}");
        }
        assert_eq!(TimeWindow::Decay.eval(0.0, 1.0).0, 1.0);
    }

    #[test]
    fn derivatives_match_differences() {
        let psi = default_test_functions()[5].combine(0.5, &default_test_functions()[8], -2.0);
        let h = 1e-6;
        for &(x, t) in &[(0.1, 0.02), (0.77, 0.2), (0.5, 0.5)] {
            let s = psi.eval(x, t, 1.0, 0.6);
            let dx = (psi.eval(x + h, t, 1.0, 0.6).value - psi.eval(x - h, t, 1.0, 0.6).value) / (2.0 * h);
            let dt = (psi.eval(x, t + h, 1.0, 0.6).value - psi.eval(x, t - h, 1.0, 0.6).value) / (2.0 * h);
            assert!((s.dx - dx).abs() < 1e-6 * (1.0 + dx.abs()));
            assert!((s.dt - dt).abs() < 1e-6 * (1.0 + dt.abs()));
        }
    }

    #[test]
    fn default_family_size_and_periodicity() {
        let set = default_test_functions();
        assert_eq!(set.len(), 12);
        for psi in &set {
            let a = psi.eval(0.0, 0.1, 1.0, 1.0);
            let b = psi.eval(1.0, 0.1, 1.0, 1.0);
            assert!((a.value - b.value).abs() < 1e-14 && (a.dx - b.dx).abs() < 1e-12);
        }
    }
}
