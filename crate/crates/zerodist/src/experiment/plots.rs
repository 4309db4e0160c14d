//! Plot-ready CSV exports. No rendering happens here; each kind writes a
//! flat table under `<output_dir>/plots/` for external tooling.

use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;

use super::{file_prelude, quantile, worker_pool, write_file, ExperimentConfig};
use crate::error::{Error, Result};
use crate::metrics::{LogPotential, EXTERIOR_MARGIN};
use crate::rng::child_seed;
use crate::roots::{roots, zero_measure_with_deficit};
use crate::support::equilibrium_oracle;
use crate::Cplx;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// Every found zero across the schedule, tagged by degree and trial.
    ZeroScatter,
    /// Potential gap of the pooled largest-degree zeros on a square grid.
    PotentialHeatmap,
    /// Quantile summaries per degree, read back from `results.json`.
    MetricVsN,
}

impl FromStr for PlotKind {
    type Err = Error<f64>;

    fn from_str(s: &str) -> Result<Self, f64> {
        match s {
            "zero_scatter" => Ok(PlotKind::ZeroScatter),
            "potential_heatmap" => Ok(PlotKind::PotentialHeatmap),
            "metric_vs_n" => Ok(PlotKind::MetricVsN),
            other => Err(Error::Config(format!(
                "unknown plot kind '{other}' (expected zero_scatter, potential_heatmap, \
                 or metric_vs_n)"
            ))),
        }
    }
}

const HEATMAP_SIDE: usize = 64;
const BOUNDARY_SAMPLES: usize = 512;

/// Writes one plot table and returns its path. Sampling kinds re-run the
/// convergence trials' seeds, so scatter and heatmap data match the metric
/// rows trial for trial.
pub fn emit_plot_data(
    cfg: &ExperimentConfig,
    kind: PlotKind,
    workers: usize,
) -> Result<PathBuf, f64> {
    cfg.validate()?;
    match kind {
        PlotKind::ZeroScatter => zero_scatter(cfg, workers),
        PlotKind::PotentialHeatmap => potential_heatmap(cfg, workers),
        PlotKind::MetricVsN => metric_vs_n(cfg),
    }
}

fn zero_scatter(cfg: &ExperimentConfig, workers: usize) -> Result<PathBuf, f64> {
    let basis = cfg.build_basis()?;
    let dist = cfg.distribution()?;
    let pool = worker_pool(workers)?;
    let keys: Vec<(usize, usize)> = cfg
        .schedule
        .iter()
        .flat_map(|&n| (0..cfg.trials).map(move |t| (n, t)))
        .collect();
    let mut chunks: Vec<((usize, usize), Vec<Cplx<f64>>)> = pool.install(|| {
        keys.par_iter()
            .filter_map(|&(n, trial)| {
                let seed = child_seed(cfg.master_seed, &[1, n as u64, trial as u64]);
                let g = crate::ensemble::sample_g(&basis, &dist, n, seed).ok()?;
                let rr = roots(g.zeta()).ok()?;
                Some(((n, trial), rr.roots))
            })
            .collect()
    });
    chunks.sort_by_key(|&(key, _)| key);

    let mut csv = file_prelude(&cfg.hash_hex());
    csv.push_str("re,im,n,trial\n");
    for ((n, trial), zs) in &chunks {
        for z in zs {
            csv.push_str(&format!("{},{},{n},{trial}\n", z.re, z.im));
        }
    }
    let path = cfg.output_dir.join("plots").join("zero_scatter.csv");
    write_file(&path, &csv)?;
    Ok(path)
}

fn potential_heatmap(cfg: &ExperimentConfig, workers: usize) -> Result<PathBuf, f64> {
    let basis = cfg.build_basis()?;
    let dist = cfg.distribution()?;
    let oracle = equilibrium_oracle(basis.support());
    let pool = worker_pool(workers)?;
    let n = *cfg.schedule.last().unwrap();
    let sampled: Vec<(Vec<Cplx<f64>>, usize)> = pool.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .filter_map(|trial| {
                let seed = child_seed(cfg.master_seed, &[1, n as u64, trial as u64]);
                let g = crate::ensemble::sample_g(&basis, &dist, n, seed).ok()?;
                let rr = roots(g.zeta()).ok()?;
                Some((rr.roots, g.d_n()))
            })
            .collect()
    });
    if sampled.is_empty() {
        return Err(Error::Run("no trial produced roots to pool".into()));
    }
    let mut pooled = Vec::new();
    let mut d_total = 0usize;
    for (zs, d) in sampled {
        pooled.extend(zs);
        d_total += d;
    }
    let emp = zero_measure_with_deficit(&pooled, d_total)?;

    let boundary: Vec<Cplx<f64>> = (0..BOUNDARY_SAMPLES)
        .map(|k| basis.support().boundary_point(k as f64 / BOUNDARY_SAMPLES as f64))
        .collect();
    let extent = boundary.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    let hw = extent + 1.0;

    let mut csv = file_prelude(&cfg.hash_hex());
    csv.push_str("re,im,gap\n");
    let step = 2.0 * hw / HEATMAP_SIDE as f64;
    for iy in 0..HEATMAP_SIDE {
        for ix in 0..HEATMAP_SIDE {
            let z = Cplx::new(-hw + (ix as f64 + 0.5) * step, -hw + (iy as f64 + 0.5) * step);
            let near = boundary.iter().any(|b| (z - b).norm() < EXTERIOR_MARGIN);
            if near {
                continue;
            }
            let gap = (emp.log_potential(z) - oracle.potential(z)).abs();
            if !gap.is_finite() {
                continue;
            }
            csv.push_str(&format!("{},{},{}\n", z.re, z.im, gap));
        }
    }
    let path = cfg.output_dir.join("plots").join("potential_heatmap.csv");
    write_file(&path, &csv)?;
    Ok(path)
}

const METRICS: [&str; 6] = ["discrepancy", "ks", "mass_r1", "mass_r2", "im_mean", "energy"];

fn metric_vs_n(cfg: &ExperimentConfig) -> Result<PathBuf, f64> {
    let results = cfg.output_dir.join("results.json");
    let text = std::fs::read_to_string(&results).map_err(|e| {
        Error::Config(format!(
            "metric_vs_n needs {} (run converge first): {e}",
            results.display()
        ))
    })?;
    let doc: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::Schema(format!("unreadable results.json: {e}")))?;
    let hash = cfg.hash_hex();
    if doc["config_hash"].as_str() != Some(hash.as_str()) {
        return Err(Error::Config(format!(
            "results.json was produced by config {} but the current config hashes to {hash}; \
             rerun converge",
            doc["config_hash"].as_str().unwrap_or("<missing>")
        )));
    }
    let rows = doc["rows"]
        .as_array()
        .ok_or_else(|| Error::Schema("results.json has no rows array".into()))?;

    let mut csv = file_prelude(&hash);
    csv.push('n');
    for m in METRICS {
        csv.push_str(&format!(",{m}_median,{m}_q25,{m}_q75"));
    }
    csv.push('\n');
    for &n in &cfg.schedule {
        csv.push_str(&n.to_string());
        for m in METRICS {
            let vals: Vec<f64> = rows
                .iter()
                .filter(|r| r["n"].as_u64() == Some(n as u64))
                .filter_map(|r| r[m].as_f64())
                .collect();
            if vals.is_empty() {
                return Err(Error::Schema(format!("results.json has no rows at n = {n}")));
            }
            csv.push_str(&format!(
                ",{},{},{}",
                quantile(&vals, 0.5),
                quantile(&vals, 0.25),
                quantile(&vals, 0.75)
            ));
        }
        csv.push('\n');
    }
    let path = cfg.output_dir.join("plots").join("metric_vs_n.csv");
    write_file(&path, &csv)?;
    Ok(path)
}
