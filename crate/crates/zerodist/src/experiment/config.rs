//! Run configuration: one file describes the support, basis, ensemble,
//! degree schedule, seeds, thresholds, and output location. The CLI can
//! override individual fields; the resolved struct is what gets hashed and
//! echoed into every output file.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::basis::{
    faber_basis, fekete_basis, lp_minimal_basis, orthonormal_basis, Basis,
};
use crate::ensemble::{make_distribution, CoefficientDistribution};
use crate::error::{Error, Result};
use crate::support::{
    build_support, default_node_count, reference_measure, Density, DiscretizedMeasure, Support,
    SupportSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKindChoice {
    Orthonormal,
    Fekete,
    Faber,
    LpMinimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisChoice {
    pub kind: BasisKindChoice,
    pub degree_max: usize,
    /// Norm exponent, `lp_minimal` only.
    #[serde(default)]
    pub p: Option<f64>,
}

/// Pass thresholds for `run_convergence`, applied to medians over trials at
/// the largest scheduled degree. Pilot-derived, not paper constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    pub median_ks: f64,
    pub median_discrepancy: f64,
    /// Applied to mass_outside at `mass_radii[0]`.
    pub median_mass: f64,
    /// Also require the KS medians to be nonincreasing along the schedule.
    pub ks_monotone: bool,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { median_ks: 0.08, median_discrepancy: 0.1, median_mass: 0.02, ks_monotone: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NecessitySettings {
    pub trials: usize,
    /// Escape events count mass outside this radius.
    pub escape_radius: f64,
    /// Candidate circles for the calibration live in this annulus; its inner
    /// radius must be at least `escape_radius` so the implication carries.
    pub rouche_annulus: [f64; 2],
    /// Added to the calibrated exponent so the domination is strict.
    pub calibration_safety: f64,
    /// The escape frequency must exceed this at some scheduled degree.
    pub escape_freq_threshold: f64,
}

impl Default for NecessitySettings {
    fn default() -> Self {
        NecessitySettings {
            trials: 500,
            escape_radius: 5.0,
            rouche_annulus: [5.0, 8.0],
            calibration_safety: 0.05,
            escape_freq_threshold: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub support: SupportSpec,
    #[serde(default = "default_density")]
    pub density: Density,
    pub basis: BasisChoice,
    /// Coefficient law name as accepted by the ensemble module.
    pub distribution: String,
    /// Tail scale override; law default when absent.
    #[serde(default)]
    pub s0: Option<f64>,
    /// Degrees to run, strictly increasing.
    pub schedule: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default = "default_mass_radii")]
    pub mass_radii: [f64; 2],
    pub output_dir: PathBuf,
    #[serde(default)]
    pub necessity: NecessitySettings,
}

fn default_density() -> Density {
    Density::EquilibriumDensity
}

fn default_mass_radii() -> [f64; 2] {
    [3.0, 5.0]
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, f64> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("bad config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), f64> {
        if self.schedule.is_empty() {
            return Err(Error::Config("schedule must list at least one degree".into()));
        }
        if self.schedule.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("schedule must be strictly increasing".into()));
        }
        let n_top = *self.schedule.last().unwrap();
        if n_top > self.basis.degree_max {
            return Err(Error::Config(format!(
                "schedule reaches degree {n_top} but the basis stops at {}",
                self.basis.degree_max
            )));
        }
        if self.schedule[0] < 4 {
            return Err(Error::Config("scheduled degrees must be at least 4".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        let t = &self.thresholds;
        if !(t.median_ks > 0.0 && t.median_discrepancy > 0.0 && t.median_mass > 0.0) {
            return Err(Error::Config("thresholds must be positive".into()));
        }
        if !(self.mass_radii[0] > 0.0 && self.mass_radii[1] >= self.mass_radii[0]) {
            return Err(Error::Config("mass radii must satisfy 0 < r1 <= r2".into()));
        }
        match (self.basis.kind, self.basis.p) {
            (BasisKindChoice::LpMinimal, None) => {
                return Err(Error::Config("lp_minimal basis needs the exponent p".into()));
            }
            (BasisKindChoice::LpMinimal, Some(p)) if !(p >= 1.0) => {
                return Err(Error::Config(format!("lp_minimal exponent must be >= 1, got {p}")));
            }
            _ => {}
        }
        let ns = &self.necessity;
        if ns.trials == 0 {
            return Err(Error::Config("necessity trials must be at least 1".into()));
        }
        if !(ns.escape_radius > 0.0) {
            return Err(Error::Config("escape radius must be positive".into()));
        }
        if !(ns.rouche_annulus[0] >= ns.escape_radius && ns.rouche_annulus[1] > ns.rouche_annulus[0])
        {
            return Err(Error::Config(
                "rouche annulus must satisfy escape_radius <= lo < hi".into(),
            ));
        }
        if !(ns.calibration_safety >= 0.0 && ns.escape_freq_threshold > 0.0) {
            return Err(Error::Config("necessity margins must be nonnegative".into()));
        }
        // constructibility: fail here, not mid-run
        build_support::<f64>(&self.support)?;
        self.distribution()?;
        Ok(())
    }

    /// Canonical serialized form; field order is struct order, so this is
    /// stable for hashing and echoing.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// FNV-1a over the sorted-key canonical form, as 16 hex digits.
    ///
    /// `output_dir` is excluded: like the worker count, where results land
    /// does not affect what they are, and two runs of the same experiment
    /// into different directories must agree on the hash.
    pub fn hash_hex(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        v.as_object_mut().unwrap().remove("output_dir");
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in v.to_string().into_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{h:016x}")
    }

    pub fn support(&self) -> Result<Support<f64>, f64> {
        build_support(&self.support)
    }

    pub fn distribution(&self) -> Result<CoefficientDistribution<f64>, f64> {
        make_distribution(&self.distribution, self.s0)
    }

    /// Quadrature rule the norm-bearing bases are built against.
    pub fn measure(&self) -> Result<DiscretizedMeasure<f64>, f64> {
        let sup = self.support()?;
        reference_measure(&sup, self.density, default_node_count(self.basis.degree_max))
    }

    pub fn build_basis(&self) -> Result<Basis<f64>, f64> {
        let sup = self.support()?;
        match self.basis.kind {
            BasisKindChoice::Orthonormal => orthonormal_basis(&self.measure()?, self.basis.degree_max),
            BasisKindChoice::Fekete => Ok(fekete_basis(&sup, self.basis.degree_max)),
            BasisKindChoice::Faber => Ok(faber_basis(&sup, self.basis.degree_max)),
            BasisKindChoice::LpMinimal => {
                lp_minimal_basis(&self.measure()?, self.basis.p.unwrap(), self.basis.degree_max)
            }
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            support: SupportSpec::Circle { radius: 1.0 },
            density: Density::EquilibriumDensity,
            basis: BasisChoice { kind: BasisKindChoice::Orthonormal, degree_max: 32, p: None },
            distribution: "gaussian".into(),
            s0: None,
            schedule: vec![8, 16, 32],
            trials: 6,
            master_seed: 424242,
            thresholds: Thresholds::default(),
            mass_radii: [3.0, 5.0],
            output_dir: PathBuf::from("/tmp/zerodist-test"),
            necessity: NecessitySettings::default(),
        }
    }

    #[test]
    fn roundtrip_and_hash_stability() {
        let cfg = small_config();
        let json = cfg.canonical_json();
        let back = ExperimentConfig::from_json(&json).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(cfg.hash_hex(), back.hash_hex());
        let mut other = cfg.clone();
        other.master_seed += 1;
        assert_ne!(cfg.hash_hex(), other.hash_hex());

        // moving the output elsewhere is the same experiment
        let mut moved = cfg.clone();
        moved.output_dir = PathBuf::from("/somewhere/else");
        assert_eq!(cfg.hash_hex(), moved.hash_hex());
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let mut c = small_config();
        c.schedule = vec![16, 8];
        assert!(c.validate().is_err());

        let mut c = small_config();
        c.schedule = vec![8, 64];
        assert!(c.validate().is_err(), "schedule beyond degree_max");

        let mut c = small_config();
        c.trials = 0;
        assert!(c.validate().is_err());

        let mut c = small_config();
        c.thresholds.median_ks = 0.0;
        assert!(c.validate().is_err());

        let mut c = small_config();
        c.distribution = "cauchy".into();
        assert!(c.validate().is_err());

        let mut c = small_config();
        c.necessity.rouche_annulus = [4.0, 8.0];
        assert!(c.validate().is_err(), "annulus below escape radius");

        let mut c = small_config();
        c.basis.kind = BasisKindChoice::LpMinimal;
        assert!(c.validate().is_err(), "missing p");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let mut v: serde_json::Value = serde_json::from_str(&small_config().canonical_json()).unwrap();
        v["surprise"] = serde_json::json!(1);
        assert!(ExperimentConfig::from_json(&v.to_string()).is_err());
    }

    #[test]
    fn builds_each_basis_kind() {
        for kind in [BasisKindChoice::Orthonormal, BasisKindChoice::Fekete, BasisKindChoice::Faber]
        {
            let mut c = small_config();
            c.basis = BasisChoice { kind, degree_max: 12, p: None };
            c.schedule = vec![8, 12];
            let b = c.build_basis().unwrap();
            assert_eq!(b.degree_max(), 12);
        }
        let mut c = small_config();
        c.basis = BasisChoice { kind: BasisKindChoice::LpMinimal, degree_max: 10, p: Some(2.0) };
        c.schedule = vec![8, 10];
        assert_eq!(c.build_basis().unwrap().degree_max(), 10);
    }
}
