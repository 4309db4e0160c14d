//! Experiment orchestration over the `f64` numeric core: seeded sufficiency
//! and necessity sweeps, batch lemma checks, and plot-data emission.
//!
//! Everything is reproducible by construction: each trial's randomness is a
//! pure function of `(master_seed, leg, n, trial)`, workers only change who
//! computes which key, and rows are sorted by key before serialization, so
//! output files are byte-identical for any worker count.

mod checks;
mod config;
mod convergence;
mod necessity;
mod plots;

pub use checks::{run_checks, CheckLine, ChecksOutcome};
pub use config::{
    BasisChoice, BasisKindChoice, ExperimentConfig, NecessitySettings, Thresholds,
};
pub use convergence::{run_convergence, ConvergenceOutcome, MedianRow};
pub use necessity::{
    calibrate_c, run_necessity, Calibration, CalibrationRow, NecessityOutcome, NecessityRow,
};
pub use plots::{emit_plot_data, PlotKind};

use std::path::Path;

use crate::error::{Error, Result};
use crate::roots::EmpiricalMeasure;
use crate::support::{Support, SupportKind};

/// Environment variable the CLI reads for the worker count.
pub const WORKERS_ENV: &str = "ZERODIST_WORKERS";

/// Comment prelude carried by every emitted file.
pub(crate) fn file_prelude(config_hash: &str) -> String {
    format!("# schema_version=1\n# config_hash={config_hash}\n")
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), f64> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, contents)?;
    Ok(())
}

/// Scoped rayon pool with an explicit thread count.
pub(crate) fn worker_pool(workers: usize) -> Result<rayon::ThreadPool, f64> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Run(format!("worker pool: {e}")))
}

pub(crate) fn projection_for(support: &Support<f64>) -> crate::metrics::Projection {
    match support.kind() {
        SupportKind::Interval { .. } => crate::metrics::Projection::RealPart,
        _ => crate::metrics::Projection::Angle,
    }
}

/// Linear-interpolation quantile of an unsorted sample.
pub(crate) fn quantile(values: &[f64], q: f64) -> f64 {
    debug_assert!(!values.is_empty());
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    v[lo] + frac * (v[hi] - v[lo])
}

pub(crate) fn median(values: &[f64]) -> f64 {
    quantile(values, 0.5)
}

/// Roots of one sampled polynomial as an empirical measure. Root solving
/// can fail on adversarial draws; callers treat `Err` as a failed trial.
/// Trimmed leading coefficients leave a deficit, which downstream mass
/// statistics count as escaped to infinity.
pub(crate) fn trial_measure(
    basis: &crate::basis::Basis<f64>,
    dist: &crate::ensemble::CoefficientDistribution<f64>,
    n: usize,
    seed: u64,
) -> Result<EmpiricalMeasure<f64>, f64> {
    let g = crate::ensemble::sample_g(basis, dist, n, seed)?;
    let rr = crate::roots::roots(g.zeta())?;
    crate::roots::zero_measure_with_deficit(&rr.roots, g.d_n())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_interpolate() {
        let v = [4.0, 1.0, 3.0, 2.0];
        assert_eq!(median(&v), 2.5);
        assert_eq!(quantile(&v, 0.25), 1.75);
        assert_eq!(quantile(&v, 0.75), 3.25);
        assert_eq!(quantile(&[7.0], 0.5), 7.0);
    }
}
