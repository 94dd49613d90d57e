//! Benchmark fixtures.

use bpcu_core::experiments::{builtin, ExperimentKind, Problem};

/// Initial problem of a built-in experiment with `nx` cells in x.
pub fn problem(kind: ExperimentKind, nx: usize) -> Problem {
    let mut cfg = builtin(kind);
    cfg.set_nx(nx);
    cfg.build().expect("builtin experiment builds")
}
