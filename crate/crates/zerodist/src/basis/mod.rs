//! The four asymptotically minimal basis families and their diagnostics.
//!
//! A [`Basis`] owns a triangular monomial coefficient array `a[n][k]` plus
//! two value caches: every `p_n` evaluated at the quadrature nodes of its
//! measure and at a dense boundary grid. The caches are filled during
//! construction by whatever stable scheme built the basis (orthogonalization
//! recurrence, Clenshaw, root products), never by re-expanding monomial
//! coefficients: on an interval, monomial evaluation loses a digit roughly
//! every two degrees and is unusable past degree ~40, while the cached
//! routes stay at working precision for every degree we support.

pub mod faber;
pub mod fekete;
pub mod lp;
pub mod orthonormal;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{r, Cplx, Real};
use crate::poly::horner;
use crate::support::{DiscretizedMeasure, Support};

pub use faber::faber_basis;
pub use fekete::{
    capacity_estimate, fekete_basis, fekete_points, pairwise_log_energy, DEFAULT_FEKETE_SEED,
};
pub use lp::lp_minimal_basis;
pub use orthonormal::orthonormal_basis;

/// Boundary grid resolution used for sup-norms and rescaling constants.
pub const BOUNDARY_GRID_POINTS: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisKind<R: Real> {
    Orthonormal,
    LpMinimal { p: R },
    Fekete,
    Faber,
}

impl<R: Real> BasisKind<R> {
    pub fn label(&self) -> &'static str {
        match self {
            BasisKind::Orthonormal => "orthonormal",
            BasisKind::LpMinimal { .. } => "lp_minimal",
            BasisKind::Fekete => "fekete",
            BasisKind::Faber => "faber",
        }
    }
}

/// A degree-graded polynomial family `p_0, ..., p_N` on a support.
#[derive(Debug, Clone)]
pub struct Basis<R: Real> {
    pub(crate) kind: BasisKind<R>,
    pub(crate) support: Support<R>,
    pub(crate) measure: DiscretizedMeasure<R>,
    pub(crate) degree_max: usize,
    /// `coeffs[n][k]` multiplies `z^k` in `p_n`; `coeffs[n].len() == n+1`.
    pub(crate) coeffs: Vec<Vec<Cplx<R>>>,
    /// Norm of each `p_n` under the family's own norm (1 after rescaling).
    pub(crate) norms: Vec<R>,
    /// `p_n` at the quadrature nodes, filled by the stable constructor.
    pub(crate) node_values: Vec<Vec<Cplx<R>>>,
    /// `p_n` on the dense boundary grid, same provenance.
    pub(crate) boundary_values: Vec<Vec<Cplx<R>>>,
}

impl<R: Real> Basis<R> {
    pub fn kind(&self) -> BasisKind<R> {
        self.kind
    }

    pub fn support(&self) -> &Support<R> {
        &self.support
    }

    pub fn measure(&self) -> &DiscretizedMeasure<R> {
        &self.measure
    }

    pub fn degree_max(&self) -> usize {
        self.degree_max
    }

    pub fn coeff_row(&self, n: usize) -> &[Cplx<R>] {
        &self.coeffs[n]
    }

    /// Leading coefficient `a[n][n]`, real positive by construction.
    pub fn lead(&self, n: usize) -> R {
        self.coeffs[n][n].re
    }

    pub fn norm(&self, n: usize) -> R {
        self.norms[n]
    }

    pub fn node_values(&self, n: usize) -> &[Cplx<R>] {
        &self.node_values[n]
    }

    pub fn boundary_values(&self, n: usize) -> &[Cplx<R>] {
        &self.boundary_values[n]
    }

    /// Sup of `|p_n|` over the cached boundary grid.
    pub fn boundary_sup(&self, n: usize) -> R {
        self.boundary_values[n].iter().map(|z| z.norm()).fold(R::zero(), R::max)
    }

    /// `L^p` norm of `p_n` against the basis measure, from cached values.
    /// `p = inf` takes the boundary sup.
    pub fn lp_norm(&self, n: usize, p: R) -> R {
        if p == R::infinity() {
            return self.boundary_sup(n);
        }
        lp_norm_of(&self.node_values[n], &self.measure.weights, p)
    }

    fn check_invariants(&self, value_check_limit: usize) -> Result<(), R> {
        if self.coeffs.len() != self.degree_max + 1 {
            return Err(Error::Schema("coefficient row count != degree_max + 1".into()));
        }
        for (n, row) in self.coeffs.iter().enumerate() {
            if row.len() != n + 1 {
                return Err(Error::Schema(format!("row {n} is not triangular")));
            }
            if row.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::Schema(format!("row {n} has non-finite entries")));
            }
            let lead = row[n];
            #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN lead must fail
            if !(lead.re > R::zero()) || lead.im.abs() > r::<R>(1e-9) * lead.re {
                return Err(Error::Schema(format!(
                    "leading coefficient of row {n} is not real positive"
                )));
            }
        }
        // Numeric invariants, on rows where coefficient evaluation is still
        // trustworthy (everywhere on a circle, low degrees elsewhere).
        let tol = r::<R>(if matches!(self.kind, BasisKind::Orthonormal) { 1e-6 } else { 1e-4 });
        match self.kind {
            BasisKind::Orthonormal => {
                let lim = value_check_limit.min(self.degree_max);
                for a in 0..=lim {
                    for b in 0..=a {
                        let g = self.measure.inner(&self.node_values[a], &self.node_values[b]);
                        let want = if a == b { R::one() } else { R::zero() };
                        let err = (g - Cplx::new(want, R::zero())).norm();
                        if err > tol {
                            return Err(Error::Schema(format!(
                                "gram deviation {err:e} at ({a},{b}) exceeds tolerance"
                            )));
                        }
                    }
                }
            }
            BasisKind::Fekete | BasisKind::Faber => {
                let lim = value_check_limit.min(self.degree_max);
                for n in 0..=lim {
                    let sup = self.boundary_sup(n);
                    if (sup - R::one()).abs() > tol {
                        return Err(Error::Schema(format!(
                            "sup-norm {sup} of row {n} deviates from 1"
                        )));
                    }
                }
            }
            BasisKind::LpMinimal { .. } => {}
        }
        Ok(())
    }

    /// Serializes kind, support, measure descriptor, and coefficients.
    pub fn to_json(&self) -> String {
        let pair = |c: &Cplx<R>| [c.re.to_f64().unwrap(), c.im.to_f64().unwrap()];
        let doc = BasisJson {
            schema_version: 1,
            kind: self.kind.label().to_string(),
            p: match self.kind {
                BasisKind::LpMinimal { p } => Some(p.to_f64().unwrap()),
                _ => None,
            },
            degree_max: self.degree_max,
            support: self.support.spec(),
            density: self.measure.density,
            node_count: self.measure.node_count(),
            coeffs: self.coeffs.iter().map(|row| row.iter().map(pair).collect()).collect(),
            norms: self.norms.iter().map(|x| x.to_f64().unwrap()).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("basis serialization cannot fail")
    }

    /// Rebuilds a basis from [`Basis::to_json`] output and validates it.
    ///
    /// Value caches are re-derived from the stored coefficients, so numeric
    /// invariants are only re-checked up to the degree where that is
    /// reliable (any degree on a circle, degree 20 otherwise).
    pub fn from_json(text: &str) -> Result<Self, R> {
        let doc: BasisJson =
            serde_json::from_str(text).map_err(|e| Error::Schema(format!("bad basis JSON: {e}")))?;
        if doc.schema_version != 1 {
            return Err(Error::Schema(format!(
                "unsupported schema_version {}",
                doc.schema_version
            )));
        }
        let kind = match (doc.kind.as_str(), doc.p) {
            ("orthonormal", _) => BasisKind::Orthonormal,
            ("lp_minimal", Some(p)) => BasisKind::LpMinimal { p: r(p) },
            ("lp_minimal", None) => {
                return Err(Error::Schema("lp_minimal basis without p".into()))
            }
            ("fekete", _) => BasisKind::Fekete,
            ("faber", _) => BasisKind::Faber,
            (other, _) => return Err(Error::Schema(format!("unknown basis kind {other:?}"))),
        };
        let support = crate::support::build_support(&doc.support)?;
        let measure = crate::support::reference_measure(&support, doc.density, doc.node_count)?;
        let coeffs: Vec<Vec<Cplx<R>>> = doc
            .coeffs
            .iter()
            .map(|row| row.iter().map(|&[re, im]| Cplx::new(r(re), r(im))).collect())
            .collect();
        let boundary = support.boundary_grid(BOUNDARY_GRID_POINTS);
        let node_values =
            coeffs.iter().map(|row| measure.nodes.iter().map(|&z| horner(row, z)).collect()).collect();
        let boundary_values =
            coeffs.iter().map(|row| boundary.iter().map(|&z| horner(row, z)).collect()).collect();
        let basis = Basis {
            kind,
            support,
            measure,
            degree_max: doc.degree_max,
            coeffs,
            norms: doc.norms.iter().map(|&x| r(x)).collect(),
            node_values,
            boundary_values,
        };
        let limit = match basis.support.kind() {
            crate::support::SupportKind::Circle { .. } => usize::MAX,
            _ => 20,
        };
        basis.check_invariants(limit)?;
        Ok(basis)
    }
}

#[derive(Serialize, Deserialize)]
struct BasisJson {
    schema_version: u32,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    degree_max: usize,
    support: crate::support::SupportSpec,
    density: crate::support::Density,
    node_count: usize,
    coeffs: Vec<Vec<[f64; 2]>>,
    norms: Vec<f64>,
}

pub(crate) fn lp_norm_of<R: Real>(values: &[Cplx<R>], weights: &[R], p: R) -> R {
    if p == R::infinity() {
        return values.iter().map(|z| z.norm()).fold(R::zero(), R::max);
    }
    let s: R = values.iter().zip(weights).map(|(z, &w)| w * z.norm().powf(p)).sum();
    s.powf(R::one() / p)
}

/// Near-leading window `i_n = floor(log10(n)^2)`, the default examined by
/// minimality reports.
pub fn default_window(n: usize) -> usize {
    if n < 2 {
        return 0;
    }
    let l = (n as f64).log10();
    (l * l).floor() as usize
}

/// Slope diagnostics certifying asymptotic minimality, per degree `n >= 1`.
#[derive(Debug, Clone)]
pub struct MinimalityReport<R: Real> {
    pub n_values: Vec<usize>,
    /// `(1/n) log a[n][n] + log capacity`.
    pub lead_slope: Vec<R>,
    /// `(1/n) log ||p_n||_{L^p(tau)}`.
    pub norm_slope: Vec<R>,
    /// `(1/n) log(||p_n|| / |a[n][n-i_n]|) - log capacity`; `+inf` when the
    /// windowed coefficient vanishes.
    pub near_lead_slope: Vec<R>,
    pub windows: Vec<usize>,
}

impl<R: Real> MinimalityReport<R> {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("# schema_version=1\nn,window,lead_slope,norm_slope,near_lead_slope\n");
        for (i, &n) in self.n_values.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                n, self.windows[i], self.lead_slope[i], self.norm_slope[i], self.near_lead_slope[i]
            ));
        }
        out
    }
}

/// Computes the three slope arrays for `n = 1..=degree_max`.
///
/// The norms are taken against `measure` with exponent `p` (`inf` for sup).
/// When `measure` shares the basis's own nodes the cached stable values are
/// used; otherwise rows are re-evaluated from coefficients, which is only
/// accurate on benign supports.
pub fn minimality_report<R: Real>(
    basis: &Basis<R>,
    measure: &DiscretizedMeasure<R>,
    p: R,
    i_n_override: Option<usize>,
) -> MinimalityReport<R> {
    assert!(basis.degree_max >= 8, "minimality report needs degree >= 8");
    let cap_log = basis.support.capacity().ln();
    let same_nodes = measure.node_count() == basis.measure.node_count()
        && measure
            .nodes
            .iter()
            .zip(&basis.measure.nodes)
            .all(|(a, b)| (a - b).norm() <= r(1e-12));
    let mut report = MinimalityReport {
        n_values: Vec::new(),
        lead_slope: Vec::new(),
        norm_slope: Vec::new(),
        near_lead_slope: Vec::new(),
        windows: Vec::new(),
    };
    for n in 1..=basis.degree_max {
        let nf = R::from_usize(n).unwrap();
        let norm = if same_nodes {
            basis.lp_norm(n, p)
        } else {
            let vals: Vec<Cplx<R>> =
                measure.nodes.iter().map(|&z| horner(&basis.coeffs[n], z)).collect();
            lp_norm_of(&vals, &measure.weights, p)
        };
        let i_n = i_n_override.unwrap_or_else(|| default_window(n)).min(n);
        let windowed = basis.coeffs[n][n - i_n].norm();
        let near = if windowed == R::zero() {
            R::infinity()
        } else {
            (norm.ln() - windowed.ln()) / nf - cap_log
        };
        report.n_values.push(n);
        report.lead_slope.push(basis.lead(n).ln() / nf + cap_log);
        report.norm_slope.push(norm.ln() / nf);
        report.near_lead_slope.push(near);
        report.windows.push(i_n);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows_grow_like_squared_log10() {
        assert_eq!(default_window(1), 0);
        assert_eq!(default_window(9), 0);
        assert_eq!(default_window(10), 1);
        assert_eq!(default_window(25), 1);
        assert_eq!(default_window(26), 2);
        assert_eq!(default_window(48), 2);
        assert_eq!(default_window(256), 5);
    }

    #[test]
    fn lp_norm_matches_hand_computation() {
        let values = vec![Cplx::new(3.0f64, 4.0), Cplx::new(1.0, 0.0)];
        let weights = vec![0.5, 0.5];
        assert!((lp_norm_of(&values, &weights, 2.0) - (13.0f64).sqrt()).abs() < 1e-13);
        assert_eq!(lp_norm_of(&values, &weights, f64::INFINITY), 5.0);
    }
}
