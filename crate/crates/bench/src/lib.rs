//! Fixed workloads shared by the benchmarks.

use poincare_core::poincare::CoefficientQuery;

/// Moduli spanning prime, prime-power and highly composite cases.
pub const MODULI: [u64; 5] = [97, 210, 1024, 9973, 30030];

/// Bessel orders paired with arguments inside and at the transition region.
pub const BESSEL_CASES: [(u32, f64); 4] = [(11, 5.5), (39, 20.0), (59, 59.0), (127, 100.0)];

pub const PRECISIONS: [u32; 3] = [64, 128, 256];

pub fn coefficient_queries() -> Vec<CoefficientQuery> {
    [(12, 1, 1, 2), (24, 3, 1, 1), (40, 5, 3, 2), (60, 20, 1, 1)]
        .into_iter()
        .map(|(k, m, n_level, n)| CoefficientQuery::new(k, m, n_level, n).expect("valid query"))
        .collect()
}
