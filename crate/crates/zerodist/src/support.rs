//! Compact supports, reference measures, and equilibrium oracles.
//!
//! Three support kinds are built in: a circle of radius `rho` centered at the
//! origin, a real interval `[a, b]`, and an origin-centered ellipse with
//! semi-axes `alpha >= beta`. For each of these the logarithmic capacity and
//! the equilibrium measure have closed forms, which is what makes tight
//! end-to-end tests possible:
//!
//! * circle: capacity `rho`, equilibrium measure = uniform angle measure,
//!   potential `-log max(|z|, rho)`;
//! * interval: capacity `(b-a)/4`, arcsine equilibrium distribution,
//!   potential through the exterior Joukowski map;
//! * ellipse: capacity `(alpha+beta)/2`, equilibrium measure = pushforward of
//!   the uniform circle measure under `w -> aw + b/w` with `a=(alpha+beta)/2`,
//!   `b=(alpha-beta)/2`.
//!
//! Reference measures are discretized as quadrature rules with a recorded
//! exactness degree, so downstream Gram computations carry no quadrature
//! error by construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{r, Cplx, Real};

/// Serializable support descriptor, as it appears in config files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum SupportSpec {
    Circle { radius: f64 },
    Interval { a: f64, b: f64 },
    Ellipse { alpha: f64, beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SupportKind<R: Real> {
    /// `|z| = rho`, center 0.
    Circle { radius: R },
    /// `[a, b]` on the real axis, `a < b`.
    Interval { a: R, b: R },
    /// `x^2/alpha^2 + y^2/beta^2 = 1`, `alpha >= beta > 0`.
    Ellipse { alpha: R, beta: R },
}

/// A compact planar set with its capacity and hull-interior flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support<R: Real> {
    kind: SupportKind<R>,
    capacity: R,
    interior_flag: bool,
}

/// Validates a descriptor and fills in the closed-form capacity.
pub fn build_support<R: Real>(spec: &SupportSpec) -> Result<Support<R>, R> {
    match *spec {
        SupportSpec::Circle { radius } => {
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(Error::Invalid(format!("circle radius must be positive, got {radius}")));
            }
            Ok(Support {
                kind: SupportKind::Circle { radius: r(radius) },
                capacity: r(radius),
                interior_flag: true,
            })
        }
        SupportSpec::Interval { a, b } => {
            if !(a < b && a.is_finite() && b.is_finite()) {
                return Err(Error::Invalid(format!("interval needs a < b, got [{a}, {b}]")));
            }
            Ok(Support {
                kind: SupportKind::Interval { a: r(a), b: r(b) },
                capacity: r((b - a) / 4.0),
                interior_flag: false,
            })
        }
        SupportSpec::Ellipse { alpha, beta } => {
            if !(alpha >= beta && beta > 0.0 && alpha.is_finite()) {
                return Err(Error::Invalid(format!(
                    "ellipse needs alpha >= beta > 0, got ({alpha}, {beta})"
                )));
            }
            Ok(Support {
                kind: SupportKind::Ellipse { alpha: r(alpha), beta: r(beta) },
                capacity: r((alpha + beta) / 2.0),
                interior_flag: true,
            })
        }
    }
}

impl<R: Real> Support<R> {
    pub fn kind(&self) -> SupportKind<R> {
        self.kind
    }

    pub fn capacity(&self) -> R {
        self.capacity
    }

    /// True iff the polynomially convex hull has nonempty interior.
    pub fn interior_flag(&self) -> bool {
        self.interior_flag
    }

    pub fn spec(&self) -> SupportSpec {
        let f = |x: R| x.to_f64().unwrap();
        match self.kind {
            SupportKind::Circle { radius } => SupportSpec::Circle { radius: f(radius) },
            SupportKind::Interval { a, b } => SupportSpec::Interval { a: f(a), b: f(b) },
            SupportKind::Ellipse { alpha, beta } => {
                SupportSpec::Ellipse { alpha: f(alpha), beta: f(beta) }
            }
        }
    }

    /// Boundary point at parameter `t` in `[0, 1)`: angle `2*pi*t` for circle
    /// and ellipse, affine position `a + t(b-a)` for the interval.
    pub fn boundary_point(&self, t: R) -> Cplx<R> {
        let two_pi = R::PI() * r(2.0);
        match self.kind {
            SupportKind::Circle { radius } => Cplx::from_polar(radius, two_pi * t),
            SupportKind::Interval { a, b } => Cplx::new(a + t * (b - a), R::zero()),
            SupportKind::Ellipse { alpha, beta } => {
                let th = two_pi * t;
                Cplx::new(alpha * th.cos(), beta * th.sin())
            }
        }
    }

    /// Dense boundary grid, equispaced in the parameter.
    pub fn boundary_grid(&self, count: usize) -> Vec<Cplx<R>> {
        (0..count)
            .map(|k| self.boundary_point(R::from_usize(k).unwrap() / R::from_usize(count).unwrap()))
            .collect()
    }

    /// A closed curve outside the support whose distance to it is at least
    /// `offset` everywhere: an enlarged circle, a confocal ellipse, or (for
    /// the interval) the confocal ellipse through `b + offset`.
    pub fn exterior_ring(&self, offset: R, count: usize) -> Vec<Cplx<R>> {
        let two_pi = R::PI() * r(2.0);
        let param: Vec<R> = (0..count)
            .map(|k| two_pi * R::from_usize(k).unwrap() / R::from_usize(count).unwrap())
            .collect();
        match self.kind {
            SupportKind::Circle { radius } => {
                let rr = radius + offset;
                param.iter().map(|&th| Cplx::from_polar(rr, th)).collect()
            }
            SupportKind::Ellipse { alpha, beta } => param
                .iter()
                .map(|&th| Cplx::new((alpha + offset) * th.cos(), (beta + offset) * th.sin()))
                .collect(),
            SupportKind::Interval { a, b } => {
                let mid = (a + b) / r(2.0);
                let half = (b - a) / r(2.0);
                let big = half + offset;
                let small = (big * big - half * half).sqrt();
                param
                    .iter()
                    .map(|&th| Cplx::new(mid + big * th.cos(), small * th.sin()))
                    .collect()
            }
        }
    }

    /// Test grid strictly inside the hull interior, on shrunken boundary
    /// copies scaled by `fractions`. Empty for supports with no interior.
    pub fn interior_grid(&self, fractions: &[R], per_ring: usize) -> Vec<Cplx<R>> {
        if !self.interior_flag {
            return Vec::new();
        }
        let mut out = Vec::with_capacity(fractions.len() * per_ring + 1);
        out.push(Cplx::new(R::zero(), R::zero()));
        for &f in fractions {
            for k in 0..per_ring {
                let t = R::from_usize(k).unwrap() / R::from_usize(per_ring).unwrap();
                let p = self.boundary_point(t);
                out.push(Cplx::new(p.re * f, p.im * f));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Density {
    EquilibriumDensity,
    UniformArclength,
}

/// Quadrature discretization of a reference measure on a support.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedMeasure<R: Real> {
    pub support: Support<R>,
    pub density: Density,
    pub nodes: Vec<Cplx<R>>,
    pub weights: Vec<R>,
    /// Products q*conj(r) with deg q + deg r up to this are integrated exactly.
    pub exactness_degree: usize,
}

impl<R: Real> DiscretizedMeasure<R> {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Weighted inner product sum w_i f_i conj(g_i).
    pub fn inner(&self, f: &[Cplx<R>], g: &[Cplx<R>]) -> Cplx<R> {
        let mut acc = Cplx::new(R::zero(), R::zero());
        for ((&fi, &gi), &wi) in f.iter().zip(g).zip(&self.weights) {
            acc += fi * gi.conj() * wi;
        }
        acc
    }

    /// CSV export: `node,weight` for real supports, `node_re,node_im,weight`
    /// otherwise.
    pub fn to_csv(&self) -> String {
        let real_nodes = matches!(self.support.kind(), SupportKind::Interval { .. });
        let mut out = String::from("# schema_version=1\n");
        if real_nodes {
            out.push_str("node,weight\n");
            for (z, w) in self.nodes.iter().zip(&self.weights) {
                out.push_str(&format!("{},{}\n", z.re, w));
            }
        } else {
            out.push_str("node_re,node_im,weight\n");
            for (z, w) in self.nodes.iter().zip(&self.weights) {
                out.push_str(&format!("{},{},{}\n", z.re, z.im, w));
            }
        }
        out
    }
}

/// Default node count for a basis of maximal degree `n`: enough for exact
/// Gram integrals up to degree `2n` on every support kind.
pub fn default_node_count(max_degree: usize) -> usize {
    4 * (max_degree + 1)
}

/// Builds the quadrature rule for `(support, density)`.
///
/// * circle: trapezoid rule on equispaced angles (both densities coincide);
/// * interval + equilibrium: Gauss-Chebyshev for the arcsine density;
/// * interval + uniform: Gauss-Legendre, normalized to a probability measure;
/// * ellipse + equilibrium: image of the circle rule under the Joukowski map.
///
/// Ellipse + uniform arclength would need elliptic integrals and is rejected.
pub fn reference_measure<R: Real>(
    support: &Support<R>,
    density: Density,
    node_count: usize,
) -> Result<DiscretizedMeasure<R>, R> {
    if node_count < 4 {
        return Err(Error::Invalid(format!("node_count must be at least 4, got {node_count}")));
    }
    let m = node_count;
    let mr = R::from_usize(m).unwrap();
    match (support.kind(), density) {
        (SupportKind::Circle { radius }, _) => {
            let two_pi = R::PI() * r(2.0);
            let nodes = (0..m)
                .map(|k| Cplx::from_polar(radius, two_pi * R::from_usize(k).unwrap() / mr))
                .collect();
            Ok(DiscretizedMeasure {
                support: *support,
                density,
                nodes,
                weights: vec![R::one() / mr; m],
                exactness_degree: m - 1,
            })
        }
        (SupportKind::Interval { a, b }, Density::EquilibriumDensity) => {
            let mid = (a + b) / r(2.0);
            let half = (b - a) / r(2.0);
            let nodes = (0..m)
                .map(|k| {
                    let th = R::PI() * (r::<R>(2.0) * R::from_usize(k).unwrap() + R::one())
                        / (r::<R>(2.0) * mr);
                    Cplx::new(mid + half * th.cos(), R::zero())
                })
                .collect();
            Ok(DiscretizedMeasure {
                support: *support,
                density,
                nodes,
                weights: vec![R::one() / mr; m],
                exactness_degree: 2 * m - 1,
            })
        }
        (SupportKind::Interval { a, b }, Density::UniformArclength) => {
            let (xs, ws) = gauss_legendre::<R>(m);
            let mid = (a + b) / r(2.0);
            let half = (b - a) / r(2.0);
            let nodes = xs.iter().map(|&x| Cplx::new(mid + half * x, R::zero())).collect();
            // Legendre weights sum to 2; the probability normalization is 1/2.
            let weights = ws.iter().map(|&w| w / r(2.0)).collect();
            Ok(DiscretizedMeasure {
                support: *support,
                density,
                nodes,
                weights,
                exactness_degree: 2 * m - 1,
            })
        }
        (SupportKind::Ellipse { alpha, beta }, Density::EquilibriumDensity) => {
            let two_pi = R::PI() * r(2.0);
            let nodes = (0..m)
                .map(|k| {
                    let th = two_pi * R::from_usize(k).unwrap() / mr;
                    Cplx::new(alpha * th.cos(), beta * th.sin())
                })
                .collect();
            Ok(DiscretizedMeasure {
                support: *support,
                density,
                nodes,
                weights: vec![R::one() / mr; m],
                exactness_degree: m - 1,
            })
        }
        (SupportKind::Ellipse { .. }, Density::UniformArclength) => Err(Error::Capability(
            "uniform arclength on an ellipse has no closed-form rule; use equilibrium_density"
                .into(),
        )),
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` (weights sum to 2), by
/// Newton iteration on the Legendre recurrence.
fn gauss_legendre<R: Real>(m: usize) -> (Vec<R>, Vec<R>) {
    let mut xs = vec![R::zero(); m];
    let mut ws = vec![R::zero(); m];
    let mf = R::from_usize(m).unwrap();
    for k in 0..m.div_ceil(2) {
        let kf = R::from_usize(k).unwrap();
        let mut x =
            (R::PI() * (kf + r(0.75)) / (mf + r(0.5))).cos();
        let mut dp = R::zero();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= r::<R>(1e-15) * (R::one() + x.abs()) {
                break;
            }
        }
        let w = r::<R>(2.0) / ((R::one() - x * x) * dp * dp);
        xs[k] = -x;
        ws[k] = w;
        xs[m - 1 - k] = x;
        ws[m - 1 - k] = w;
    }
    if m % 2 == 1 {
        xs[m / 2] = R::zero();
        let (_, d) = legendre_with_derivative(m, R::zero());
        ws[m / 2] = r::<R>(2.0) / (d * d);
    }
    (xs, ws)
}

fn legendre_with_derivative<R: Real>(m: usize, x: R) -> (R, R) {
    let mut p0 = R::one();
    let mut p1 = x;
    for j in 2..=m {
        let jf = R::from_usize(j).unwrap();
        let p2 = ((r::<R>(2.0) * jf - R::one()) * x * p1 - (jf - R::one()) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (R::one(), R::zero());
    }
    let d = R::from_usize(m).unwrap() * (x * p1 - p0) / (x * x - R::one());
    (p1, d)
}

/// Closed-form equilibrium potential and boundary distribution of a support.
#[derive(Debug, Clone, Copy)]
pub struct EquilibriumOracle<R: Real> {
    support: Support<R>,
}

/// Builds the oracle; all built-in kinds are covered.
pub fn equilibrium_oracle<R: Real>(support: &Support<R>) -> EquilibriumOracle<R> {
    EquilibriumOracle { support: *support }
}

impl<R: Real> EquilibriumOracle<R> {
    pub fn support(&self) -> &Support<R> {
        &self.support
    }

    /// Equilibrium potential `p(z) = -integral log|z-x| dmu(x)`.
    ///
    /// Equal to `-log capacity` on the hull, strictly smaller outside.
    pub fn potential(&self, z: Cplx<R>) -> R {
        let cap = self.support.capacity();
        match self.support.kind() {
            SupportKind::Circle { radius } => -z.norm().max(radius).ln(),
            SupportKind::Interval { a, b } => {
                let mid = (a + b) / r(2.0);
                let half = (b - a) / r(2.0);
                let u = (z - Cplx::new(mid, R::zero())) / Cplx::new(half, R::zero());
                -exterior_log_modulus(u * u - Cplx::new(R::one(), R::zero()), u) - cap.ln()
            }
            SupportKind::Ellipse { alpha, beta } => {
                let ah = (alpha + beta) / r(2.0);
                let bh = (alpha - beta) / r(2.0);
                // w solves z = ah*w + bh/w; the exterior branch has |w| >= 1.
                let disc = (z * z - Cplx::new(r::<R>(4.0) * ah * bh, R::zero())).sqrt();
                let w1 = (z + disc) / Cplx::new(r::<R>(2.0) * ah, R::zero());
                let w2 = (z - disc) / Cplx::new(r::<R>(2.0) * ah, R::zero());
                let wn = w1.norm().max(w2.norm());
                -wn.max(R::one()).ln() - ah.ln()
            }
        }
    }

    /// Equilibrium mass of the boundary arc from parameter 0 to `t`.
    pub fn boundary_cdf(&self, t: R) -> R {
        let t = t.min(R::one()).max(R::zero());
        match self.support.kind() {
            SupportKind::Circle { .. } => t,
            SupportKind::Interval { .. } => {
                // F(x) = (2/pi) arcsin sqrt((x-a)/(b-a)), t already affine.
                r::<R>(2.0) / R::PI() * t.sqrt().asin()
            }
            SupportKind::Ellipse { alpha, beta } => {
                let two_pi = R::PI() * r(2.0);
                let phi = two_pi * t;
                // Pre-image angle on the parameter circle: tan th = (alpha/beta) tan phi.
                let th = (alpha * phi.sin()).atan2(beta * phi.cos());
                let th = if th < R::zero() { th + two_pi } else { th };
                th / two_pi
            }
        }
    }
}

/// `log|u + sqrt(d)|` where `d = u^2 - 1`, taking the branch with modulus
/// at least 1 (the Green's function of the exterior of `[-1, 1]`).
fn exterior_log_modulus<R: Real>(d: Cplx<R>, u: Cplx<R>) -> R {
    let s = d.sqrt();
    let w1 = u + s;
    let w2 = u - s;
    w1.norm().max(w2.norm()).max(R::one()).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    type C = Cplx<f64>;

    fn circle(radius: f64) -> Support<f64> {
        build_support(&SupportSpec::Circle { radius }).unwrap()
    }

    fn interval(a: f64, b: f64) -> Support<f64> {
        build_support(&SupportSpec::Interval { a, b }).unwrap()
    }

    fn ellipse(alpha: f64, beta: f64) -> Support<f64> {
        build_support(&SupportSpec::Ellipse { alpha, beta }).unwrap()
    }

    #[test]
    fn capacities_match_closed_forms() {
        assert_eq!(circle(1.0).capacity(), 1.0);
        assert_eq!(interval(-2.0, 2.0).capacity(), 1.0);
        assert_eq!(interval(-1.0, 1.0).capacity(), 0.5);
        assert_eq!(ellipse(1.25, 0.75).capacity(), 1.0);
        assert!(circle(1.0).interior_flag());
        assert!(ellipse(1.0, 1.0).interior_flag());
        assert!(!interval(0.0, 1.0).interior_flag());
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(build_support::<f64>(&SupportSpec::Circle { radius: 0.0 }).is_err());
        assert!(build_support::<f64>(&SupportSpec::Interval { a: 1.0, b: 1.0 }).is_err());
        assert!(build_support::<f64>(&SupportSpec::Ellipse { alpha: 0.5, beta: 0.75 }).is_err());
    }

    #[test]
    fn circle_trapezoid_kills_laurent_monomials() {
        let m = reference_measure(&circle(1.0), Density::EquilibriumDensity, 64).unwrap();
        for k in -63i32..=63 {
            let mut acc = C::new(0.0, 0.0);
            for (z, w) in m.nodes.iter().zip(&m.weights) {
                acc += z.powi(k) * w;
            }
            let expect = if k == 0 { 1.0 } else { 0.0 };
            assert!((acc - C::new(expect, 0.0)).norm() < 1e-12, "k={k}: {acc}");
        }
    }

    #[test]
    fn chebyshev_orthogonality_under_arcsine_rule() {
        let m = reference_measure(&interval(-1.0, 1.0), Density::EquilibriumDensity, 32).unwrap();
        let t = |n: i32, x: f64| (f64::from(n) * x.acos()).cos();
        for a in 0..=15 {
            for b in 0..=15 {
                let mut acc = 0.0;
                for (z, w) in m.nodes.iter().zip(&m.weights) {
                    acc += t(a, z.re) * t(b, z.re) * w;
                }
                let expect = if a != b {
                    0.0
                } else if a == 0 {
                    1.0
                } else {
                    0.5
                };
                assert!((acc - expect).abs() < 1e-12, "T_{a} T_{b}: {acc}");
            }
        }
    }

    #[test]
    fn weights_sum_to_one() {
        let cases = [
            reference_measure(&circle(2.0), Density::UniformArclength, 17).unwrap(),
            reference_measure(&interval(-1.0, 3.0), Density::EquilibriumDensity, 21).unwrap(),
            reference_measure(&interval(-1.0, 3.0), Density::UniformArclength, 21).unwrap(),
            reference_measure(&ellipse(1.25, 0.75), Density::EquilibriumDensity, 40).unwrap(),
        ];
        for m in &cases {
            let s: f64 = m.weights.iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
            assert!(m.weights.iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn gauss_legendre_integrates_monomials() {
        let m = reference_measure(&interval(-1.0, 1.0), Density::UniformArclength, 8).unwrap();
        // Uniform probability measure on [-1,1]: E x^k = 1/(k+1) for even k.
        for k in 0..=15usize {
            let mut acc = 0.0;
            for (z, w) in m.nodes.iter().zip(&m.weights) {
                acc += z.re.powi(k as i32) * w;
            }
            let expect = if k % 2 == 0 { 1.0 / (k as f64 + 1.0) } else { 0.0 };
            assert!((acc - expect).abs() < 1e-13, "k={k}: {acc}");
        }
    }

    #[test]
    fn ellipse_uniform_arclength_is_rejected() {
        let e = ellipse(1.25, 0.75);
        assert!(matches!(
            reference_measure(&e, Density::UniformArclength, 16),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn gram_matches_double_resolution_reference() {
        // Moment property: Gram of {1..z^m} under the rule equals a 4x-node
        // reference, m = exactness_degree/2.
        let cases = [
            (circle(1.0), Density::EquilibriumDensity, 32),
            (interval(-1.0, 1.0), Density::EquilibriumDensity, 16),
            (interval(-1.0, 1.0), Density::UniformArclength, 16),
            (ellipse(1.25, 0.75), Density::EquilibriumDensity, 32),
        ];
        for (s, d, n) in cases {
            let coarse = reference_measure(&s, d, n).unwrap();
            let fine = reference_measure(&s, d, 4 * n).unwrap();
            let deg = coarse.exactness_degree / 2;
            let pw = |m: &DiscretizedMeasure<f64>, a: usize, b: usize| {
                let fa: Vec<C> = m.nodes.iter().map(|z| z.powu(a as u32)).collect();
                let fb: Vec<C> = m.nodes.iter().map(|z| z.powu(b as u32)).collect();
                m.inner(&fa, &fb)
            };
            for a in 0..=deg.min(12) {
                for b in 0..=deg.min(12) {
                    if a + b > coarse.exactness_degree {
                        continue;
                    }
                    let lhs = pw(&coarse, a, b);
                    let rhs = pw(&fine, a, b);
                    assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()), "{lhs} vs {rhs}");
                }
            }
        }
    }

    #[test]
    fn circle_oracle_potential_values() {
        let o = equilibrium_oracle(&circle(1.0));
        assert_relative_eq!(o.potential(C::new(2.0, 0.0)), -(2.0f64.ln()), epsilon = 1e-14);
        assert_eq!(o.potential(C::new(0.5, 0.0)), 0.0);
        assert_eq!(o.potential(C::new(0.0, 0.0)), 0.0);
    }

    #[test]
    fn interval_oracle_matches_numeric_integration() {
        // Independent oracle: integrate -log|z-x| against the arcsine density
        // with a dense midpoint rule in the angle variable.
        let o = equilibrium_oracle(&interval(-1.0, 1.0));
        let numeric = |z: C| {
            let m = 200_000;
            let mut acc = 0.0;
            for k in 0..m {
                let th = std::f64::consts::PI * (k as f64 + 0.5) / m as f64;
                acc += -(z - C::new(th.cos(), 0.0)).norm().ln();
            }
            acc / m as f64
        };
        for z in [C::new(2.0, 0.0), C::new(0.5, 1.5), C::new(-3.0, 0.25)] {
            assert_relative_eq!(o.potential(z), numeric(z), epsilon = 1e-9, max_relative = 1e-7);
        }
        // On the segment the integrand has a log singularity; the midpoint
        // rule converges like 1/m there, hence the looser tolerance.
        assert_relative_eq!(o.potential(C::new(0.3, 0.0)), numeric(C::new(0.3, 0.0)), epsilon = 1e-5);
        // On the set the potential equals -log cap = log 2.
        assert_relative_eq!(o.potential(C::new(0.25, 0.0)), 2.0f64.ln(), epsilon = 1e-12);
        // Known exterior value at 2, and monotonicity past the endpoint.
        assert_relative_eq!(
            o.potential(C::new(2.0, 0.0)),
            -((2.0 + 3.0f64.sqrt()) / 2.0).ln(),
            epsilon = 1e-12
        );
        assert!(o.potential(C::new(2.0, 0.0)) < o.potential(C::new(1.0, 0.0)));
    }

    #[test]
    fn ellipse_oracle_matches_pushforward_integration() {
        let e = ellipse(1.25, 0.75);
        let o = equilibrium_oracle(&e);
        let numeric = |z: C| {
            let m = 200_000;
            let mut acc = 0.0;
            for k in 0..m {
                let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / m as f64;
                let x = C::new(1.25 * th.cos(), 0.75 * th.sin());
                acc += -(z - x).norm().ln();
            }
            acc / m as f64
        };
        for z in [C::new(2.0, 0.5), C::new(0.0, 2.0), C::new(-1.6, 0.0)] {
            assert_relative_eq!(o.potential(z), numeric(z), epsilon = 1e-8, max_relative = 1e-6);
        }
        // Interior: constant at -log cap = 0.
        for z in [C::new(0.0, 0.0), C::new(0.5, 0.2), C::new(-0.9, 0.1)] {
            assert!((o.potential(z) - 0.0).abs() < 1e-9);
        }
    }

    #[test]
    fn oracle_respects_maximum_principle_on_exterior_grid() {
        for s in [circle(1.0), interval(-2.0, 2.0), ellipse(1.25, 0.75)] {
            let o = equilibrium_oracle(&s);
            let bound = -s.capacity().ln() + 1e-9;
            for ring in 1..=2 {
                for z in s.exterior_ring(0.2 * f64::from(ring), 100) {
                    assert!(o.potential(z) <= bound, "{s:?} at {z}");
                }
            }
        }
    }

    #[test]
    fn interior_identity_when_interior_nonempty() {
        for s in [circle(1.0), ellipse(1.25, 0.75)] {
            let o = equilibrium_oracle(&s);
            let c = -s.capacity().ln();
            for z in s.interior_grid(&[0.2, 0.5, 0.8], 16) {
                assert!((o.potential(z) - c).abs() < 1e-9, "{s:?} at {z}");
            }
        }
        assert!(interval(-1.0, 1.0).interior_grid(&[0.5], 8).is_empty());
    }

    #[test]
    fn boundary_cdfs_are_monotone_with_unit_range() {
        for s in [circle(1.0), interval(-1.0, 1.0), ellipse(1.25, 0.75)] {
            let o = equilibrium_oracle(&s);
            let mut prev = -1.0;
            for k in 0..=200 {
                let f = o.boundary_cdf(k as f64 / 200.0);
                assert!((0.0..=1.0 + 1e-12).contains(&f));
                assert!(f + 1e-12 >= prev, "{s:?} cdf not monotone at {k}");
                prev = f;
            }
            assert!(o.boundary_cdf(0.0).abs() < 1e-12);
        }
        // Interval arcsine value: F(1/2) = 1/2 by symmetry.
        let o = equilibrium_oracle(&interval(-1.0, 1.0));
        assert_relative_eq!(o.boundary_cdf(0.5), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn exterior_rings_keep_their_distance() {
        for s in [circle(1.0), interval(-2.0, 2.0), ellipse(1.25, 0.75)] {
            let boundary = s.boundary_grid(512);
            for z in s.exterior_ring(0.2, 64) {
                let d = boundary.iter().map(|b| (z - b).norm()).fold(f64::INFINITY, f64::min);
                assert!(d > 0.19, "{s:?}: ring point {z} too close ({d})");
            }
        }
    }

    #[test]
    fn measure_csv_round_shape() {
        let m = reference_measure(&interval(-1.0, 1.0), Density::EquilibriumDensity, 4).unwrap();
        let csv = m.to_csv();
        assert!(csv.starts_with("# schema_version=1\nnode,weight\n"));
        assert_eq!(csv.lines().count(), 2 + 4);
        let mc = reference_measure(&circle(1.0), Density::EquilibriumDensity, 4).unwrap();
        assert!(mc.to_csv().contains("node_re,node_im,weight"));
    }

    #[test]
    fn support_spec_round_trips_through_json() {
        for spec in [
            SupportSpec::Circle { radius: 2.5 },
            SupportSpec::Interval { a: -1.0, b: 3.0 },
            SupportSpec::Ellipse { alpha: 1.25, beta: 0.75 },
        ] {
            let s = serde_json::to_string(&spec).unwrap();
            let back: SupportSpec = serde_json::from_str(&s).unwrap();
            assert_eq!(spec, back);
        }
    }
}
