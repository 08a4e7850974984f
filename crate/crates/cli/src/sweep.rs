//! Parallel theorem sweeps with deterministic row order.

use poincare_core::arith::gcd;
use poincare_core::poincare::{
    order_of_vanishing, theorem_m_range, theorem_n_max, verify_vanishing_bound, CertifyOptions,
    Theorem, VanishingReport,
};
use poincare_core::Result;
use rayon::prelude::*;

use crate::config::SweepConfig;
use crate::report::{Report, Row};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub k: u32,
    pub level: u64,
    pub m: u64,
}

/// Cells in report order: by weight, then level, then `m`.
pub fn cells(cfg: &SweepConfig) -> Result<Vec<Cell>> {
    let theorem = cfg.theorem();
    let mut out = Vec::new();
    for k in cfg.weights() {
        for &level in &cfg.levels {
            let ms: Vec<u64> = if theorem.has_explicit_range() {
                theorem_m_range(theorem, k, level)?
            } else {
                let m_max = cfg.m_max.unwrap_or(1);
                (1..=m_max).filter(|&m| gcd(m, level) == 1).collect()
            };
            out.extend(ms.into_iter().map(|m| Cell { k, level, m }));
        }
    }
    Ok(out)
}

pub fn options(cfg: &SweepConfig) -> CertifyOptions {
    CertifyOptions {
        precision: cfg.precision,
        max_precision: cfg.max_precision,
        target_radius: cfg.target_radius,
        max_truncation: cfg.max_truncation,
    }
}

pub fn run_cell(cfg: &SweepConfig, cell: Cell) -> Result<VanishingReport> {
    let opts = options(cfg);
    let theorem = cfg.theorem();
    match theorem {
        Theorem::PrimeLevel | Theorem::LargestPrime => verify_vanishing_bound(
            cell.k,
            cell.m,
            cell.level,
            cfg.epsilon.unwrap_or(0.5),
            cfg.window_slack.unwrap_or(1),
            &opts,
        ),
        _ => order_of_vanishing(
            cell.k,
            cell.m,
            cell.level,
            theorem_n_max(theorem, cell.level),
            &opts,
        ),
    }
}

/// Evaluates all cells on the rayon pool; rows keep the order of [`cells`].
pub fn run(cfg: &SweepConfig) -> Result<Report> {
    let cells = cells(cfg)?;
    let rows = cells
        .par_iter()
        .map(|&cell| run_cell(cfg, cell).map(|r| Row::from_report(&r)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Report::new(cfg.clone(), rows))
}
