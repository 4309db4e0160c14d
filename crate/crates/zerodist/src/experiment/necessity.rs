//! Necessity sweep: calibrate the dominance exponent from the basis, then
//! measure how often a dominant middle coefficient occurs and how often at
//! least half the zero mass escapes a fixed disk, with a light-tailed
//! control leg for contrast.

use rayon::prelude::*;
use serde_json::json;

use super::{file_prelude, worker_pool, write_file, ExperimentConfig};
use crate::basis::Basis;
use crate::ensemble::{
    dominance_event_b, dominance_event_frequency, dominance_window, make_distribution, sample_g,
};
use crate::error::{Error, Result};
use crate::metrics::{annulus_floor, mass_outside};
use crate::poly::log_sum_exp;
use crate::rng::child_seed;
use crate::roots::{roots, zero_measure_with_deficit};
use crate::Cplx;

/// One scheduled degree's worst-case calibration numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationRow {
    pub n: usize,
    /// Window index needing the largest exponent.
    pub j: usize,
    /// Circle radius certifying that index.
    pub rho: f64,
    pub c_needed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    /// Worst-case exponent over the schedule plus the configured safety.
    pub c: f64,
    pub rows: Vec<CalibrationRow>,
}

/// Smallest exponent making coefficient dominance force zeros outside the
/// escape disk, via the proof's inequality on candidate circles.
///
/// For each window index `j`, the best circle `|z| = rho` inside the
/// configured annulus must satisfy `e^{cn} min|p_j| > sum_i max|p_i|`; then
/// an `e^{cn}`-dominant `xi_j` makes `xi_j p_j` alone carry the boundary
/// winding, so exactly `j <= n/2` zeros stay inside `D_rho`.
pub fn calibrate_c(
    basis: &Basis<f64>,
    schedule: &[usize],
    settings: &super::NecessitySettings,
) -> Result<Calibration, f64> {
    let [lo, hi] = settings.rouche_annulus;
    let mut rows = Vec::new();
    let mut gross_cache: Vec<((usize, u64), f64)> = Vec::new();
    for &n in schedule {
        let mut worst: Option<CalibrationRow> = None;
        for j in dominance_window(n) {
            let rep = annulus_floor(basis.coeff_row(j), lo, hi, 6, 128)?;
            if !rep.pass {
                return Err(Error::Config(format!(
                    "calibration failed: basis element {j} has annulus floor ln {:.3} below \
                     threshold ln {:.3} (best circle {:.3}); widen rouche_annulus",
                    rep.ln_floor, rep.ln_threshold, rep.best_radius
                )));
            }
            let floor_ln = rep.ln_floor + basis.lead(j).ln();
            let rho = rep.best_radius;
            let key = (n, rho.to_bits());
            let gross = match gross_cache.iter().find(|(k, _)| *k == key) {
                Some(&(_, g)) => g,
                None => {
                    let g = gross_ln(basis, n, rho);
                    gross_cache.push((key, g));
                    g
                }
            };
            let c_needed = (gross - floor_ln) / n as f64;
            if worst.map_or(true, |w| c_needed > w.c_needed) {
                worst = Some(CalibrationRow { n, j, rho, c_needed });
            }
        }
        rows.push(worst.unwrap());
    }
    let c = rows.iter().map(|r| r.c_needed).fold(f64::NEG_INFINITY, f64::max)
        + settings.calibration_safety;
    Ok(Calibration { c, rows })
}

/// `ln sum_{i<=n} sup_theta |p_i(rho e^{i theta})|` over a 128-point angular
/// grid, in log domain since the suprema span hundreds of orders.
fn gross_ln(basis: &Basis<f64>, n: usize, rho: f64) -> f64 {
    let angles = 128;
    let sups: Vec<f64> = (0..=n)
        .map(|i| {
            let mut sup = f64::NEG_INFINITY;
            for a in 0..angles {
                let theta = 2.0 * std::f64::consts::PI * a as f64 / angles as f64;
                let z = Cplx::from_polar(rho, theta);
                sup = sup.max(crate::poly::scaled_horner(basis.coeff_row(i), z).0.ln_norm());
            }
            sup
        })
        .collect();
    log_sum_exp(&sups)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NecessityRow {
    pub distribution: String,
    pub n: usize,
    pub trials: usize,
    pub failed: usize,
    /// Dominance-event frequency from an independent coefficient-only run.
    pub freq_b: f64,
    /// Dominance events among the root-solved trials.
    pub b_count: usize,
    pub escape_count: usize,
    pub freq_escape: f64,
    /// Dominance events whose trial did not show the escape (must be 0).
    pub violations: usize,
    /// Dominance events whose solve failed, leaving the implication unchecked.
    pub b_unverified: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NecessityOutcome {
    pub calibration: Calibration,
    pub rows: Vec<NecessityRow>,
    /// Heavy leg reached the configured escape frequency at some degree.
    pub escape_seen: bool,
    /// Control leg saw no escape at all.
    pub control_clean: bool,
    /// No dominance event contradicted (or evaded) the implication.
    pub consistency_ok: bool,
    pub notes: Vec<String>,
    pub passed: bool,
}

struct TrialResult {
    b: bool,
    outcome: Option<bool>,
}

/// Runs the heavy leg and the gaussian control, writing `necessity.csv` /
/// `necessity.json` under the output directory.
pub fn run_necessity(cfg: &ExperimentConfig, workers: usize) -> Result<NecessityOutcome, f64> {
    cfg.validate()?;
    let dist = cfg.distribution()?;
    if dist.log_moment_finite() && dist.in_prob_condition() {
        return Err(Error::Config(format!(
            "necessity needs a heavy or intermediate distribution; '{}' satisfies \
             the sufficiency hypotheses",
            dist.name().as_str()
        )));
    }
    let basis = cfg.build_basis()?;
    let settings = &cfg.necessity;
    let calibration = calibrate_c(&basis, &cfg.schedule, settings)?;
    let control = make_distribution::<f64>("gaussian", None)?;
    let legs = [(0u64, &dist), (1u64, &control)];

    let pool = worker_pool(workers)?;
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    let mut total_failed = 0usize;
    for (leg, d) in legs {
        for &n in &cfg.schedule {
            let results: Vec<TrialResult> = pool.install(|| {
                (0..settings.trials)
                    .into_par_iter()
                    .map(|trial| {
                        let seed =
                            child_seed(cfg.master_seed, &[10 + leg, n as u64, trial as u64]);
                        let g = match sample_g(&basis, d, n, seed) {
                            Ok(g) => g,
                            Err(_) => return TrialResult { b: false, outcome: None },
                        };
                        let logs: Vec<f64> = g.log_xi().iter().map(|&(m, _)| m).collect();
                        let b = dominance_event_b(&logs, n, calibration.c);
                        let escaped = roots(g.zeta())
                            .and_then(|rr| zero_measure_with_deficit(&rr.roots, g.d_n()))
                            .map(|emp| mass_outside(&emp, settings.escape_radius) >= 0.5);
                        TrialResult { b, outcome: escaped.ok() }
                    })
                    .collect()
            });
            let failed = results.iter().filter(|t| t.outcome.is_none()).count();
            let solved = settings.trials - failed;
            let b_count = results.iter().filter(|t| t.b).count();
            let escape_count =
                results.iter().filter(|t| t.outcome == Some(true)).count();
            let violations = results
                .iter()
                .filter(|t| t.b && t.outcome == Some(false))
                .count();
            let b_unverified = results.iter().filter(|t| t.b && t.outcome.is_none()).count();
            let freq_b = dominance_event_frequency(
                d,
                n,
                calibration.c,
                settings.escape_radius,
                settings.trials,
                child_seed(cfg.master_seed, &[20 + leg, n as u64]),
            )
            .1;
            total_failed += failed;
            rows.push(NecessityRow {
                distribution: d.name().as_str().to_string(),
                n,
                trials: settings.trials,
                failed,
                freq_b,
                b_count,
                escape_count,
                freq_escape: if solved == 0 { 0.0 } else { escape_count as f64 / solved as f64 },
                violations,
                b_unverified,
            });
        }
    }
    let total = 2 * cfg.schedule.len() * settings.trials;
    if total_failed * 10 > total {
        return Err(Error::Run(format!(
            "{total_failed} of {total} trials failed; results would be unrepresentative"
        )));
    }
    if total_failed > 0 {
        notes.push(format!("{total_failed} of {total} trials failed in the root solver"));
    }

    let heavy = dist.name().as_str();
    let escape_seen = rows
        .iter()
        .any(|r| r.distribution == heavy && r.freq_escape > settings.escape_freq_threshold);
    let control_clean =
        rows.iter().filter(|r| r.distribution == "gaussian").all(|r| r.escape_count == 0);
    let consistency_ok = rows.iter().all(|r| r.violations == 0 && r.b_unverified == 0);
    let passed = escape_seen && control_clean && consistency_ok;
    let outcome = NecessityOutcome {
        calibration,
        rows,
        escape_seen,
        control_clean,
        consistency_ok,
        notes,
        passed,
    };
    write_outputs(cfg, &outcome)?;
    Ok(outcome)
}

fn write_outputs(cfg: &ExperimentConfig, out: &NecessityOutcome) -> Result<(), f64> {
    let hash = cfg.hash_hex();
    let mut csv = file_prelude(&hash);
    csv.push_str(
        "distribution,n,trials,failed,freq_b,b_count,escape_count,freq_escape,violations,b_unverified\n",
    );
    for r in &out.rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.distribution,
            r.n,
            r.trials,
            r.failed,
            r.freq_b,
            r.b_count,
            r.escape_count,
            r.freq_escape,
            r.violations,
            r.b_unverified
        ));
    }
    write_file(&cfg.output_dir.join("necessity.csv"), &csv)?;

    let config_value: serde_json::Value =
        serde_json::from_str(&cfg.canonical_json()).expect("config roundtrips");
    let doc = json!({
        "schema_version": 1,
        "config_hash": hash,
        "config": config_value,
        "calibration": {
            "c": out.calibration.c,
            "rows": out.calibration.rows.iter().map(|r| json!({
                "n": r.n, "j": r.j, "rho": r.rho, "c_needed": r.c_needed,
            })).collect::<Vec<_>>(),
        },
        "rows": out.rows.iter().map(|r| json!({
            "distribution": r.distribution, "n": r.n, "trials": r.trials,
            "failed": r.failed, "freq_b": r.freq_b, "b_count": r.b_count,
            "escape_count": r.escape_count, "freq_escape": r.freq_escape,
            "violations": r.violations, "b_unverified": r.b_unverified,
        })).collect::<Vec<_>>(),
        "escape_seen": out.escape_seen,
        "control_clean": out.control_clean,
        "consistency_ok": out.consistency_ok,
        "notes": out.notes,
        "passed": out.passed,
    });
    write_file(&cfg.output_dir.join("necessity.json"), &doc.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::config::tests::small_config;

    #[test]
    fn calibration_matches_direct_sums_on_circle_monomials() {
        let cfg = small_config();
        let basis = cfg.build_basis().unwrap();
        let settings = super::super::NecessitySettings::default();
        let cal = calibrate_c(&basis, &[8, 16], &settings).unwrap();
        assert_eq!(cal.rows.len(), 2);
        assert!(cal.c > 0.0);
        // circle monomials: floor over the annulus grid is j ln rho with the
        // largest grid radius, and the gross sum is a geometric series
        for row in &cal.rows {
            let [lo, hi] = settings.rouche_annulus;
            let rho_max = lo + 6.0 * (hi - lo) / 7.0;
            assert!((row.rho - rho_max).abs() < 1e-12, "rho = {}", row.rho);
            assert_eq!(row.j, row.n.div_ceil(4));
            let gross: f64 = (0..=row.n).map(|i| rho_max.powi(i as i32)).sum();
            let expect = (gross.ln() - row.j as f64 * rho_max.ln()) / row.n as f64;
            assert!((row.c_needed - expect).abs() < 1e-9, "{} vs {expect}", row.c_needed);
        }
        assert!(
            (cal.c
                - cal.rows.iter().map(|r| r.c_needed).fold(f64::NEG_INFINITY, f64::max)
                - settings.calibration_safety)
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn light_tails_are_rejected() {
        let mut cfg = small_config();
        cfg.output_dir = std::env::temp_dir().join("zerodist-nec-light");
        assert!(matches!(run_necessity(&cfg, 2), Err(Error::Config(_))));
    }

    #[test]
    fn heavy_run_escapes_and_control_stays_put() {
        let mut cfg = small_config();
        cfg.output_dir = std::env::temp_dir().join("zerodist-nec-heavy");
        cfg.distribution = "log_heavy".into();
        cfg.basis.degree_max = 16;
        cfg.schedule = vec![8, 16];
        cfg.necessity.trials = 60;
        let out = run_necessity(&cfg, 2).unwrap();
        assert_eq!(out.rows.len(), 4);
        assert!(out.consistency_ok, "rows: {:?}", out.rows);
        assert!(out.control_clean, "rows: {:?}", out.rows);
        assert!(out.escape_seen, "rows: {:?}", out.rows);
        assert_eq!(out.passed, true);
        let csv =
            std::fs::read_to_string(cfg.output_dir.join("necessity.csv")).unwrap();
        assert!(csv.starts_with("# schema_version=1\n"));
        assert_eq!(csv.lines().count(), 2 + 1 + 4);
        assert!(cfg.output_dir.join("necessity.json").exists());
    }
}
