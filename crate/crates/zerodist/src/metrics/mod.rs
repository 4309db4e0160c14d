//! Convergence metrics between empirical zero measures and the equilibrium
//! measure, plus empirical checkers for the analytic machinery behind the
//! limit theorems (Cartan sublevel estimate, annulus floor, deterministic
//! criterion).
//!
//! Weak convergence itself is not directly testable at finite `n`; the
//! crate reports three operational proxies side by side: the exterior
//! potential discrepancy (potentials determine measures), a boundary
//! projection Kolmogorov-Smirnov distance, and mass escape past fixed
//! radii. Thresholds on these are pilot-derived and live in run configs,
//! not here.

mod checks;

pub use checks::{
    annulus_floor, cartan_check, det_criterion_report, AnnulusReport, CartanReport,
    DetCriterionReport, Sequence,
};

use crate::error::{Error, Result};
use crate::num::{ln_norm, r, Cplx, Real};
use crate::roots::EmpiricalMeasure;
use crate::support::{EquilibriumOracle, SupportKind};

/// Default distance between the support hull and the exterior test grid.
pub const EXTERIOR_MARGIN: f64 = 0.2;
/// Points per exterior grid ring.
pub const GRID_RING_POINTS: usize = 128;

/// Common face of the empirical measure and the closed-form oracle.
pub trait LogPotential<R: Real> {
    /// `p_mu(z) = -integral log|z - x| dmu(x)`; `+inf` exactly at an atom.
    fn log_potential(&self, z: Cplx<R>) -> R;
}

impl<R: Real> LogPotential<R> for EmpiricalMeasure<R> {
    /// Escaped mass (a deficit against `count`) contributes nothing here:
    /// its true contribution sits far below representable range. Potential
    /// comparisons are only meaningful for deficit-free measures; radius
    /// statistics are the metric of record otherwise.
    fn log_potential(&self, z: Cplx<R>) -> R {
        if self.count() == 0 {
            return R::zero();
        }
        let mut acc = R::zero();
        for &p in self.points() {
            let l = ln_norm(z - p);
            if l == R::neg_infinity() {
                return R::infinity();
            }
            acc += l;
        }
        -acc / R::from_usize(self.count()).unwrap()
    }
}

impl<R: Real> LogPotential<R> for EquilibriumOracle<R> {
    fn log_potential(&self, z: Cplx<R>) -> R {
        self.potential(z)
    }
}

/// Pairwise logarithmic energy with its coincidence flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Energy<R: Real> {
    pub value: R,
    /// Two points coincided; `value` is the `+inf` sentinel.
    pub coincident: bool,
}

/// `-(2/(m(m-1))) sum_{i<j} log|z_i - z_j|` over the measure's points.
pub fn energy<R: Real>(emp: &EmpiricalMeasure<R>) -> Result<Energy<R>, R> {
    let pts = emp.points();
    let m = pts.len();
    if m < 2 {
        return Err(Error::Invalid("energy needs at least two points".into()));
    }
    let mut acc = R::zero();
    let mut coincident = false;
    for i in 0..m {
        for j in i + 1..m {
            let l = ln_norm(pts[i] - pts[j]);
            if l == R::neg_infinity() {
                coincident = true;
            } else {
                acc += l;
            }
        }
    }
    let value = if coincident {
        R::infinity()
    } else {
        -(r::<R>(2.0) * acc) / R::from_usize(m * (m - 1)).unwrap()
    };
    Ok(Energy { value, coincident })
}

/// Max potential gap over two boundary copies at distance `margin` and
/// `2 margin` outside the support, `per_ring` points each.
pub fn potential_discrepancy<R: Real>(
    emp: &EmpiricalMeasure<R>,
    oracle: &EquilibriumOracle<R>,
    margin: R,
    per_ring: usize,
) -> R {
    let sup = oracle.support();
    let mut worst = R::zero();
    for ring in [margin, margin + margin] {
        for z in sup.exterior_ring(ring, per_ring) {
            worst = worst.max((emp.log_potential(z) - oracle.potential(z)).abs());
        }
    }
    worst
}

/// Boundary projection used by [`boundary_ks`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    /// Polar angle, for circle and ellipse supports.
    Angle,
    /// Real part mapped affinely onto `[0, 1]`, for interval supports.
    RealPart,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryKs<R: Real> {
    pub ks: R,
    /// Mean `|Im z|`, reported for interval supports only: zeros approach
    /// the interval from the plane, so the projection alone cannot see the
    /// transverse spread.
    pub im_mean: Option<R>,
}

/// Kolmogorov-Smirnov distance between the projected points and the
/// oracle's boundary distribution. The angle projection fixes the branch
/// `arg z in [0, 2 pi)`; an empty point set scores 1.
pub fn boundary_ks<R: Real>(
    emp: &EmpiricalMeasure<R>,
    oracle: &EquilibriumOracle<R>,
    projection: Projection,
) -> BoundaryKs<R> {
    let sup = oracle.support();
    let im_mean = match sup.kind() {
        SupportKind::Interval { .. } => {
            let pts = emp.points();
            if pts.is_empty() {
                Some(R::zero())
            } else {
                let s: R = pts.iter().map(|z| z.im.abs()).sum();
                Some(s / R::from_usize(pts.len()).unwrap())
            }
        }
        _ => None,
    };
    let pts = emp.points();
    if pts.is_empty() {
        return BoundaryKs { ks: R::one(), im_mean };
    }
    let two_pi = R::PI() + R::PI();
    let mut ts: Vec<R> = match projection {
        Projection::Angle => pts
            .iter()
            .map(|z| {
                let mut t = z.arg() / two_pi;
                if t < R::zero() {
                    t += R::one();
                }
                t
            })
            .collect(),
        Projection::RealPart => {
            let SupportKind::Interval { a, b } = sup.kind() else {
                panic!("real_part projection requires an interval support");
            };
            pts.iter().map(|z| ((z.re - a) / (b - a)).max(R::zero()).min(R::one())).collect()
        }
    };
    ts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let m = R::from_usize(ts.len()).unwrap();
    let mut ks = R::zero();
    for (i, &t) in ts.iter().enumerate() {
        let f = oracle.boundary_cdf(t);
        let below = R::from_usize(i).unwrap() / m;
        let above = R::from_usize(i + 1).unwrap() / m;
        ks = ks.max(f - below).max(above - f);
    }
    BoundaryKs { ks, im_mean }
}

/// Fraction of mass at modulus above `radius`; deficit mass counts as
/// outside every radius.
pub fn mass_outside<R: Real>(emp: &EmpiricalMeasure<R>, radius: R) -> R {
    assert!(radius > R::zero());
    if emp.count() == 0 {
        return R::zero();
    }
    let outside = emp.points().iter().filter(|z| z.norm() > radius).count()
        + (emp.count() - emp.points().len());
    R::from_usize(outside).unwrap() / R::from_usize(emp.count()).unwrap()
}

/// One `(n, trial)` row of convergence metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow<R: Real> {
    pub n: usize,
    pub trial: usize,
    pub discrepancy: R,
    pub ks: R,
    pub mass_r1: R,
    pub mass_r2: R,
    /// 0 for supports without the companion statistic (circle, ellipse).
    pub im_mean: R,
    pub energy: R,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceReport<R: Real> {
    pub rows: Vec<ConvergenceRow<R>>,
}

impl<R: Real> ConvergenceReport<R> {
    pub const CSV_HEADER: &'static str = "n,trial,discrepancy,ks,mass_r1,mass_r2,im_mean,energy";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                row.n,
                row.trial,
                row.discrepancy,
                row.ks,
                row.mass_r1,
                row.mass_r2,
                row.im_mean,
                row.energy
            ));
        }
        out
    }

    pub fn to_json(&self, config_echo: &str) -> String {
        let mut out = format!("{{\"schema_version\":1,\"config\":{config_echo},\"rows\":[");
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!(
                "{{\"n\":{},\"trial\":{},\"discrepancy\":{},\"ks\":{},\"mass_r1\":{},\"mass_r2\":{},\"im_mean\":{},\"energy\":{}}}",
                row.n, row.trial, row.discrepancy, row.ks, row.mass_r1, row.mass_r2, row.im_mean,
                row.energy
            ));
        }
        out.push_str("]}");
        out
    }

    /// Every entry finite, and nonnegative except the energy column.
    pub fn validate(&self) -> Result<(), R> {
        for row in &self.rows {
            let nonneg = [row.discrepancy, row.ks, row.mass_r1, row.mass_r2, row.im_mean];
            if nonneg.iter().any(|v| !v.is_finite() || *v < R::zero()) || !row.energy.is_finite() {
                return Err(Error::Schema(format!(
                    "non-finite or negative metric at n = {}, trial = {}",
                    row.n, row.trial
                )));
            }
        }
        Ok(())
    }
}
