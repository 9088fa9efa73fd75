//! Shared fixtures for the criterion benchmarks.

use chaindecay::model::{truncate, TridiagonalHamiltonian};
use chaindecay::ChainModel;

/// The weak-coupling reference chain (eps0 = 1, V0 = 0.4).
pub fn reference_model() -> ChainModel {
    ChainModel::new(1.0, 0.4, 1.0).expect("valid reference model")
}

/// Truncation of the reference chain to `n` sites.
pub fn reference_chain(n: usize) -> TridiagonalHamiltonian {
    truncate(&reference_model(), n).expect("valid truncation")
}

/// Linear time grid `[0, t_max]` with `n` points.
pub fn time_grid(t_max: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect()
}
