//! Faber polynomials for the built-in supports.
//!
//! Each built-in support has an exterior conformal map of Joukowski type
//! `psi(w) = c1 w + c0 + cm1 / w` (circle: `(rho, 0, 0)`; interval `[a,b]`:
//! `((b-a)/4, (a+b)/2, (b-a)/4)`; ellipse: `((alpha+beta)/2, 0,
//! (alpha-beta)/2)`). The Faber polynomials then satisfy the three-term
//! recurrence
//!
//! ```text
//! F_0 = 1,  F_1 = (z - c0)/c1,
//! F_2 = ((z - c0) F_1 - 2 cm1 F_0) / c1,
//! F_{n+1} = ((z - c0) F_n - cm1 F_{n-1}) / c1   (n >= 2),
//! ```
//!
//! with the factor 2 only at the first step (the constant Laurent mode is
//! counted twice there). On the support itself `F_n(psi(w)) = w^n +
//! (cm1/c1)^n w^{-n}` for `|w| = 1`, so raw values stay `O(1)` and the
//! recurrence is run directly at whatever points need values; no monomial
//! re-expansion is involved.

use crate::num::{r, Cplx, Real};
use crate::support::{reference_measure, Density, Support, SupportKind};

use super::{Basis, BasisKind, BOUNDARY_GRID_POINTS};

/// Laurent data `(c1, c0, cm1)` of the exterior map.
pub(crate) fn exterior_map<R: Real>(support: &Support<R>) -> (R, R, R) {
    match support.kind() {
        SupportKind::Circle { radius } => (radius, R::zero(), R::zero()),
        SupportKind::Interval { a, b } => {
            let cap = (b - a) / r(4.0);
            (cap, (a + b) / r(2.0), cap)
        }
        SupportKind::Ellipse { alpha, beta } => {
            ((alpha + beta) / r(2.0), R::zero(), (alpha - beta) / r(2.0))
        }
    }
}

/// Unnormalized Faber values `F_0..F_{n_max}` at `points`, one row per degree.
pub(crate) fn faber_raw_values<R: Real>(
    support: &Support<R>,
    n_max: usize,
    points: &[Cplx<R>],
) -> Vec<Vec<Cplx<R>>> {
    let (c1, c0, cm1) = exterior_map(support);
    let one = Cplx::new(R::one(), R::zero());
    let mut rows: Vec<Vec<Cplx<R>>> = Vec::with_capacity(n_max + 1);
    rows.push(vec![one; points.len()]);
    if n_max == 0 {
        return rows;
    }
    rows.push(points.iter().map(|&z| (z - Cplx::new(c0, R::zero())) / Cplx::new(c1, R::zero())).collect());
    for n in 1..n_max {
        let extra = if n == 1 { r(2.0) } else { R::one() };
        let row: Vec<Cplx<R>> = points
            .iter()
            .enumerate()
            .map(|(i, &z)| {
                ((z - Cplx::new(c0, R::zero())) * rows[n][i]
                    - Cplx::new(cm1 * extra, R::zero()) * rows[n - 1][i])
                    / Cplx::new(c1, R::zero())
            })
            .collect();
        rows.push(row);
    }
    rows
}

/// Unnormalized Faber monomial coefficient rows (same recurrence applied to
/// coefficient vectors).
pub(crate) fn faber_raw_coeffs<R: Real>(support: &Support<R>, n_max: usize) -> Vec<Vec<Cplx<R>>> {
    let (c1, c0, cm1) = exterior_map(support);
    let zero = Cplx::new(R::zero(), R::zero());
    let inv_c1 = Cplx::new(R::one() / c1, R::zero());
    let c0c = Cplx::new(c0, R::zero());
    let mut rows: Vec<Vec<Cplx<R>>> = Vec::with_capacity(n_max + 1);
    rows.push(vec![Cplx::new(R::one(), R::zero())]);
    if n_max == 0 {
        return rows;
    }
    rows.push(vec![-c0c * inv_c1, inv_c1]);
    for n in 1..n_max {
        let extra = if n == 1 { r(2.0) } else { R::one() };
        let mut row = vec![zero; n + 2];
        for k in 0..=n {
            let cur = rows[n][k];
            row[k + 1] += cur * inv_c1;
            row[k] -= c0c * cur * inv_c1;
        }
        for k in 0..n {
            row[k] -= Cplx::new(cm1 * extra, R::zero()) * rows[n - 1][k] * inv_c1;
        }
        rows.push(row);
    }
    rows
}

/// Faber basis rescaled to sup-norm 1 on the boundary grid.
pub fn faber_basis<R: Real>(support: &Support<R>, n_max: usize) -> Basis<R> {
    let measure = reference_measure(
        support,
        Density::EquilibriumDensity,
        crate::support::default_node_count(n_max),
    )
    .expect("equilibrium rule exists for every built-in support");
    let boundary = support.boundary_grid(BOUNDARY_GRID_POINTS);
    let raw_nodes = faber_raw_values(support, n_max, &measure.nodes);
    let raw_boundary = faber_raw_values(support, n_max, &boundary);
    let raw_coeffs = faber_raw_coeffs(support, n_max);

    let mut coeffs = Vec::with_capacity(n_max + 1);
    let mut node_values = Vec::with_capacity(n_max + 1);
    let mut boundary_values = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let sup = raw_boundary[n].iter().map(|z| z.norm()).fold(R::zero(), R::max);
        let g = Cplx::new(R::one() / sup, R::zero());
        coeffs.push(raw_coeffs[n].iter().map(|&c| c * g).collect::<Vec<_>>());
        node_values.push(raw_nodes[n].iter().map(|&v| v * g).collect::<Vec<_>>());
        boundary_values.push(raw_boundary[n].iter().map(|&v| v * g).collect::<Vec<_>>());
    }
    Basis {
        kind: BasisKind::Faber,
        support: *support,
        measure,
        degree_max: n_max,
        norms: vec![R::one(); n_max + 1],
        coeffs,
        node_values,
        boundary_values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::support::{build_support, SupportSpec};

    type C = Cplx<f64>;

    #[test]
    fn circle_faber_is_monomial() {
        let s = build_support::<f64>(&SupportSpec::Circle { radius: 1.0 }).unwrap();
        let b = faber_basis(&s, 16);
        for n in 0..=16usize {
            for k in 0..n {
                assert!(b.coeff_row(n)[k].norm() < 1e-12);
            }
            assert!((b.lead(n) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn interval_faber_is_chebyshev() {
        let s = build_support::<f64>(&SupportSpec::Interval { a: -2.0, b: 2.0 }).unwrap();
        let b = faber_basis(&s, 40);
        // Unnormalized F_n = 2 cos(n arccos(x/2)); sup-normalized rows are
        // cos(n arccos(x/2)).
        for n in [1usize, 2, 7, 23, 40] {
            for (z, v) in b.measure().nodes.iter().zip(b.node_values(n)) {
                let want = (n as f64 * (z.re / 2.0).acos()).cos();
                assert!((v - C::new(want, 0.0)).norm() < 1e-10, "n={n} at {}", z.re);
            }
            assert!((b.boundary_sup(n) - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn interval_faber_raw_values_factor_two() {
        // The first recurrence step needs the doubled cm1 term: on [-2, 2]
        // raw F_2(x) = x^2 - 2, not x^2 - 1.
        let s = build_support::<f64>(&SupportSpec::Interval { a: -2.0, b: 2.0 }).unwrap();
        let pts = [C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(2.0, 0.0)];
        let rows = faber_raw_values(&s, 3, &pts);
        assert!((rows[2][0] - C::new(-2.0, 0.0)).norm() < 1e-14);
        assert!((rows[2][1] - C::new(-1.0, 0.0)).norm() < 1e-14);
        assert!((rows[2][2] - C::new(2.0, 0.0)).norm() < 1e-14);
        // F_3(x) = x^3 - 3x.
        assert!((rows[3][1] - C::new(-2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn ellipse_faber_matches_laurent_identity() {
        // On the boundary z = psi(e^{i th}), F_n = w^n + q^n w^{-n} with
        // q = cm1/c1 = 0.25 for this ellipse.
        let s = build_support::<f64>(&SupportSpec::Ellipse { alpha: 1.25, beta: 0.75 }).unwrap();
        let m = 64usize;
        let pts: Vec<C> = (0..m)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                C::new(1.25 * th.cos(), 0.75 * th.sin())
            })
            .collect();
        let rows = faber_raw_values(&s, 32, &pts);
        for n in [1usize, 2, 5, 17, 32] {
            for (k, v) in rows[n].iter().enumerate() {
                let th = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                let w = C::from_polar(1.0, th);
                let want = w.powu(n as u32) + C::from_polar(0.25f64.powi(n as i32), -(th * n as f64));
                assert!((v - want).norm() < 1e-10, "n={n}, k={k}");
            }
        }
    }

    #[test]
    fn ellipse_lead_slope_is_small() {
        let s = build_support::<f64>(&SupportSpec::Ellipse { alpha: 1.25, beta: 0.75 }).unwrap();
        assert_eq!(s.capacity(), 1.0);
        let b = faber_basis(&s, 32);
        let slope = b.lead(32).ln() / 32.0 + s.capacity().ln();
        assert!(slope.abs() < 0.05, "lead slope {slope}");
    }

    #[test]
    fn coeff_rows_match_values_at_low_degree() {
        let s = build_support::<f64>(&SupportSpec::Interval { a: -1.0, b: 1.0 }).unwrap();
        let b = faber_basis(&s, 12);
        for n in 0..=12usize {
            for (z, v) in b.measure().nodes.iter().zip(b.node_values(n)) {
                let from_coeffs = crate::poly::horner(b.coeff_row(n), *z);
                assert!((from_coeffs - v).norm() < 1e-9, "n={n}");
            }
        }
    }
}
