//! Weak residuals as a function of the stencil width.

use std::fmt::Write as _;
use std::path::Path;

use log::{info, warn};

use crate::driver::config::RunConfig;
use crate::error::{Error, Result};
use crate::integrate::{run, stable_dt_for};
use crate::verify::residual::{weak_residuals, EQUATION_NAMES};
use crate::verify::testfn::TestFunction;

pub const CSV_HEADER: &str = "eps,n_cells,res_mass1,res_mass2,res_mom1,res_mom2,res_en1,res_en2";

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub eps: f64,
    pub n_cells: usize,
    /// Max over the test functions of `|R|`, per equation; the error text if the run failed.
    pub residuals: std::result::Result<[f64; 6], String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// `R(eps_{k+1}) / R(eps_k)` per equation for consecutive successful rows.
    pub fn decay_ratios(&self) -> Vec<[f64; 6]> {
        let ok: Vec<&[f64; 6]> = self.rows.iter().filter_map(|r| r.residuals.as_ref().ok()).collect();
        ok.windows(2)
            .map(|w| std::array::from_fn(|e| w[1][e] / w[0][e]))
            .collect()
    }

    /// Per equation: every row succeeded and the residual strictly decreases down the table.
    pub fn strictly_decreasing(&self) -> [bool; 6] {
        let all_ok = self.rows.iter().all(|r| r.residuals.is_ok());
        let ratios = self.decay_ratios();
        std::array::from_fn(|e| all_ok && ratios.iter().all(|r| r[e] < 1.0))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{CSV_HEADER}");
        for row in &self.rows {
            let values = row.residuals.clone().unwrap_or([f64::NAN; 6]);
            let cols: Vec<String> = values.iter().map(|v| format!("{v:.16e}")).collect();
            let _ = writeln!(s, "{:.16e},{},{}", row.eps, row.n_cells, cols.join(","));
        }
        s
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

fn study_one(config: &RunConfig, psis: &[TestFunction]) -> Result<[f64; 6]> {
    let scheme = config.scheme()?;
    let initial = config.initial_state()?;
    // One snapshot per initial stable step keeps the time quadrature well inside the cadence bound.
    let cadence = stable_dt_for(&scheme, &initial)?;
    let traj = run(&scheme, initial, config.t_end, cadence)?;
    let reports = weak_residuals(&traj, psis)?;
    let mut max = [0.0_f64; 6];
    for r in &reports {
        for e in 0..6 {
            max[e] = max[e].max(r.values[e].abs());
        }
    }
    Ok(max)
}

/// Runs `config` at each stencil width (on the matched grid of [`RunConfig::with_eps`]) and
/// tabulates the largest residual over `psis`. A failing entry is recorded and the rest continue.
pub fn convergence_study(config: &RunConfig, eps_list: &[f64], psis: &[TestFunction]) -> ConvergenceTable {
    let configs: Vec<RunConfig> = eps_list.iter().map(|&eps| config.with_eps(eps)).collect();
    let rows = std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|cfg| scope.spawn(move || study_one(cfg, psis)))
            .collect();
        handles
            .into_iter()
            .zip(&configs)
            .map(|(handle, cfg)| {
                let residuals = match handle.join() {
                    Ok(Ok(values)) => {
                        info!("eps = {}: {:?}", cfg.params.eps, values);
                        Ok(values)
                    }
                    Ok(Err(e)) => {
                        warn!("eps = {} failed: {e}", cfg.params.eps);
                        Err(e.to_string())
                    }
                    Err(_) => Err("worker panicked".to_string()),
                };
                ConvergenceRow {
                    eps: cfg.params.eps,
                    n_cells: cfg.n_cells,
                    residuals,
                }
            })
            .collect()
    });
    ConvergenceTable { rows }
}

/// Human-readable summary, one line per equation.
pub fn describe(table: &ConvergenceTable) -> String {
    let ratios = table.decay_ratios();
    let decreasing = table.strictly_decreasing();
    let mut s = String::new();
    for (e, name) in EQUATION_NAMES.iter().enumerate() {
        let r: Vec<String> = ratios.iter().map(|r| format!("{:.3}", r[e])).collect();
        let _ = writeln!(
            s,
            "{name}: ratios [{}] {}",
            r.join(", "),
            if decreasing[e] { "decreasing" } else { "NOT decreasing" }
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(eps: f64, v: [f64; 6]) -> ConvergenceRow {
        ConvergenceRow {
            eps,
            n_cells: 10,
            residuals: Ok(v),
        }
    }

    #[test]
    fn ratios_and_monotonicity() {
        let t = ConvergenceTable {
            rows: vec![
                row(0.02, [4.0; 6]),
                row(0.01, [2.0, 2.0, 2.0, 2.0, 2.0, 5.0]),
                row(0.005, [1.0; 6]),
            ],
        };
        let r = t.decay_ratios();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0][0], 0.5);
        let d = t.strictly_decreasing();
        assert!(d[0] && !d[5]);
        assert!(t.to_csv().starts_with(CSV_HEADER));
        assert_eq!(t.to_csv().lines().count(), 4);
    }

    #[test]
    fn failed_row_breaks_monotonicity() {
        let mut t = ConvergenceTable {
            rows: vec![row(0.02, [4.0; 6]), row(0.01, [2.0; 6])],
        };
        t.rows.push(ConvergenceRow {
            eps: 0.005,
            n_cells: 800,
            residuals: Err("boom".into()),
        });
        assert_eq!(t.strictly_decreasing(), [false; 6]);
        assert!(t.to_csv().contains("NaN"));
    }

    #[test]
    fn empty_eps_list_gives_empty_table() {
        let cfg = RunConfig::from_toml_str("scenario = \"uniform-rest\"\n", Path::new("x")).unwrap();
        let t = convergence_study(&cfg, &[], &[]);
        assert!(t.rows.is_empty());
        assert!(t.decay_ratios().is_empty());
    }
}
