//! Cross-checks the assembled right-hand side against a straight-line evaluation that
//! shares no code with the scheme beyond the kernel taps and the bisection closure.

#![allow(clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twofluid::closure::bisection_oracle;
use twofluid::driver::{preset, riemann_on_torus};
use twofluid::grid::{Field, Grid};
use twofluid::params::{AlphaCoupling, FluidEos};
use twofluid::{MixtureState, Scheme, SchemeParams};

struct Prim {
    p: Vec<f64>,
    a1: Vec<f64>,
    v1: Vec<f64>,
    v2: Vec<f64>,
}

fn primitives(s: &MixtureState, eos: &FluidEos) -> Prim {
    let n = s.n_cells();
    let mut out = Prim {
        p: vec![0.0; n],
        a1: vec![0.0; n],
        v1: vec![0.0; n],
        v2: vec![0.0; n],
    };
    for j in 0..n {
        let v1 = s.q1[j] / s.r1[j];
        let v2 = s.q2[j] / s.r2[j];
        let a1 = (eos.k1 - 1.0) * (s.en1[j] - 0.5 * s.r1[j] * v1 * v1);
        let a2 = (eos.k2 - 1.0) * (s.en2[j] - 0.5 * s.r2[j] * v2 * v2);
        let pa = bisection_oracle(a1, a2, eos, 1e-15);
        out.p[j] = pa.p;
        out.a1[j] = pa.alpha1;
        out.v1[j] = v1;
        out.v2[j] = v2;
    }
    out
}

fn bracket(big_v: &[f64], v: &[f64], m: usize, eps: f64) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|j| {
            let l = (j + n - m) % n;
            let r = (j + m) % n;
            -(big_v[l] * v[l].max(0.0) - big_v[j] * v[j].abs() + big_v[r] * (-v[r]).max(0.0)) / eps
        })
        .collect()
}

/// `sum_k d_k f[j - k]` over all offsets, no pairing.
fn gradient(f: &[f64], dweights: &[f64]) -> Vec<f64> {
    let n = f.len();
    let half = (dweights.len() - 1) / 2;
    (0..n)
        .map(|j| {
            (0..dweights.len())
                .map(|i| {
                    let k = i as isize - half as isize;
                    dweights[i] * f[(j as isize - k).rem_euclid(n as isize) as usize]
                })
                .sum()
        })
        .collect()
}

/// Rates with a prescribed `d(alpha_1)/dt` field.
fn rates(
    s: &MixtureState,
    eos: &FluidEos,
    params: &SchemeParams,
    dweights: &[f64],
    m: usize,
    dalpha: &[f64],
) -> [Vec<f64>; 6] {
    let pr = primitives(s, eos);
    let n = s.n_cells();
    let eps = params.eps;
    let a2: Vec<f64> = pr.a1.iter().map(|a| 1.0 - a).collect();
    let gp = gradient(&pr.p, dweights);
    let av1: Vec<f64> = (0..n).map(|j| pr.a1[j] * pr.v1[j]).collect();
    let av2: Vec<f64> = (0..n).map(|j| a2[j] * pr.v2[j]).collect();
    let gav1 = gradient(&av1, dweights);
    let gav2 = gradient(&av2, dweights);
    let b = |f: &Field, v: &[f64]| bracket(f.values(), v, m, eps);
    let (br1, br2) = (b(&s.r1, &pr.v1), b(&s.r2, &pr.v2));
    let (bq1, bq2) = (b(&s.q1, &pr.v1), b(&s.q2, &pr.v2));
    let (be1, be2) = (b(&s.en1, &pr.v1), b(&s.en2, &pr.v2));
    let mut out: [Vec<f64>; 6] = std::array::from_fn(|_| vec![0.0; n]);
    for j in 0..n {
        out[0][j] = -br1[j] + params.kappa1;
        out[1][j] = -br2[j] + params.kappa1;
        out[2][j] = -bq1[j] - pr.a1[j] * gp[j];
        out[3][j] = -bq2[j] - a2[j] * gp[j];
        out[4][j] = -be1[j] - pr.p[j] * dalpha[j] - gp[j] * pr.a1[j] * pr.v1[j] - pr.p[j] * gav1[j] + params.kappa2;
        out[5][j] = -be2[j] + pr.p[j] * dalpha[j] - gp[j] * a2[j] * pr.v2[j] - pr.p[j] * gav2[j] + params.kappa2;
    }
    out
}

/// `d(alpha_1)/dt` implied by rates `r`, by central differences of the bisection closure.
fn implied_dalpha(s: &MixtureState, eos: &FluidEos, r: &[Vec<f64>; 6]) -> Vec<f64> {
    let delta = 1e-6;
    (0..s.n_cells())
        .map(|j| {
            let alpha_at = |sign: f64| {
                let c = s.cell(j).to_array();
                let u: [f64; 6] = std::array::from_fn(|i| c[i] + sign * delta * r[i][j]);
                let a1 = (eos.k1 - 1.0) * (u[4] - 0.5 * u[2] * u[2] / u[0]);
                let a2 = (eos.k2 - 1.0) * (u[5] - 0.5 * u[3] * u[3] / u[1]);
                bisection_oracle(a1, a2, eos, 1e-15).alpha1
            };
            (alpha_at(1.0) - alpha_at(-1.0)) / (2.0 * delta)
        })
        .collect()
}

fn perturbed_toumi(n: usize, seed: u64) -> (MixtureState, FluidEos) {
    let p = preset("toumi").unwrap();
    let grid = Grid::unit(n).unwrap();
    let mut s = riemann_on_torus(&p.left, &p.right, &grid, &p.eos, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (c1, c2, ph) = (
        rng.gen_range(-0.5..0.5),
        rng.gen_range(-0.1..0.1),
        rng.gen_range(0.0..std::f64::consts::TAU),
    );
    for j in 0..n {
        let x = grid.x(j);
        let v1 = c1 * (2.0 * std::f64::consts::PI * x + ph).sin();
        let v2 = c2 * (4.0 * std::f64::consts::PI * x).cos();
        // add kinetic energy so the internal energy stays put
        s.en1[j] += 0.5 * s.r1[j] * v1 * v1;
        s.en2[j] += 0.5 * s.r2[j] * v2 * v2;
        s.q1[j] = s.r1[j] * v1;
        s.q2[j] = s.r2[j] * v2;
    }
    (s, p.eos)
}

#[test]
fn exact_coupling_matches_straight_line_assembly() {
    let n = 64;
    for seed in 0..3 {
        let (s, eos) = perturbed_toumi(n, seed);
        let params = SchemeParams::with_eps(1.0 / 16.0);
        let scheme = Scheme::new(s.grid, eos, params.clone()).unwrap();
        let got = scheme.rhs(&s).unwrap();

        let dw = scheme.kernel().dweights().to_vec();
        let m = 4;
        // The implied d(alpha_1)/dt is affine in the prescribed one; solve for the fixed point.
        let zero = vec![0.0; n];
        let one = vec![1.0; n];
        let f0 = implied_dalpha(&s, &eos, &rates(&s, &eos, &params, &dw, m, &zero));
        let f1 = implied_dalpha(&s, &eos, &rates(&s, &eos, &params, &dw, m, &one));
        let fixed: Vec<f64> = (0..n).map(|j| f0[j] / (1.0 - (f1[j] - f0[j]))).collect();
        let want = rates(&s, &eos, &params, &dw, m, &fixed);

        let scale = |f: &[f64]| f.iter().fold(0.0_f64, |a, b| a.max(b.abs())).max(1e-300);
        let da_scale = scale(&fixed);
        for j in 0..n {
            assert!(
                (got.dalpha1[j] - fixed[j]).abs() <= 1e-6 * da_scale,
                "seed {seed} cell {j}: {} vs {}",
                got.dalpha1[j],
                fixed[j]
            );
        }
        for (i, (g, w)) in got.rates().iter().zip(&want).enumerate() {
            let sc = scale(w);
            for j in 0..n {
                assert!(
                    (g[j] - w[j]).abs() <= 1e-6 * sc,
                    "seed {seed} eq {i} cell {j}: {} vs {}",
                    g[j],
                    w[j]
                );
            }
        }
    }
}

#[test]
fn lagged_coupling_uses_the_supplied_rate() {
    let n = 64;
    let (s, eos) = perturbed_toumi(n, 7);
    let mut params = SchemeParams::with_eps(1.0 / 16.0);
    params.coupling = AlphaCoupling::Lagged;
    let scheme = Scheme::new(s.grid, eos, params.clone()).unwrap();
    let lag: Vec<f64> = (0..n).map(|j| 0.01 * (j as f64 * 0.3).sin()).collect();
    let got = scheme.rhs_with(&s, Some(&Field::from_vec(lag.clone()))).unwrap();
    let want = rates(&s, &eos, &params, scheme.kernel().dweights(), 4, &lag);
    for (g, w) in got.rates().iter().zip(&want) {
        let sc = w.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
        for j in 0..n {
            assert!((g[j] - w[j]).abs() <= 1e-9 * sc);
        }
    }
    assert_eq!(got.dalpha1.values(), &lag[..]);
}
