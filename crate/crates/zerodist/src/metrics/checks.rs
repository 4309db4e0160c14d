//! Empirical checkers for the analytic machinery: the Cartan sublevel-area
//! estimate, the annulus modulus floor, and the two-condition deterministic
//! criterion for zero equidistribution. All polynomial moduli are handled in
//! log domain; the quantities these lemmas bound underflow `f64` long before
//! the interesting degrees (`0.2^256` is far below the smallest subnormal).

use crate::basis::{default_window, lp_norm_of, Basis};
use crate::error::{Error, Result};
use crate::num::{ln_norm, r, Cplx, Real};
use crate::poly::{horner, log_abs_poly_bound, scaled_horner};
use crate::rng::{tag, Stream};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartanReport<R: Real> {
    pub degree: usize,
    pub area_estimate: R,
    /// `25 pi e^2 h^2`, degree-free.
    pub bound: R,
    pub std_error: R,
    pub pass: bool,
}

/// Monte Carlo area of the sublevel set `{z : |p(z)/lead| <= h^degree}`
/// against the sublevel-area bound.
///
/// Every point of the sublevel set lies within `h` of a root, so sampling is
/// confined to the disk of radius `root_bound + h` with the Fujiwara root
/// bound `2 max_k |c_{d-k}/c_d|^{1/k}`. The pass margin treats the Monte
/// Carlo standard error as relative to the bound, which makes the
/// multiplicative form `bound (1 + 3 se_rel)` the same as `bound + 3 se`.
pub fn cartan_check<R: Real>(
    zeta: &[Cplx<R>],
    h: R,
    mc_samples: usize,
    seed: u64,
) -> Result<CartanReport<R>, R> {
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must be rejected too
    if !(h > R::zero()) {
        return Err(Error::Invalid(format!("cartan_check needs h > 0, got {h}")));
    }
    if mc_samples == 0 {
        return Err(Error::Invalid("cartan_check needs at least one sample".into()));
    }
    let (degree, ln_lead) = monic_view(zeta)?;

    let mut root_bound = R::zero();
    for k in 1..=degree {
        let c = zeta[degree - k];
        if c.norm() > R::zero() {
            root_bound = root_bound.max(((ln_norm(c) - ln_lead) / R::from_usize(k).unwrap()).exp());
        }
    }
    let radius = root_bound + root_bound + h;

    let st = Stream::new(seed).derive(tag::CARTAN_MC);
    let two_pi = R::PI() + R::PI();
    let level = R::from_usize(degree).unwrap() * h.ln();
    // Plain Horner unless the gross coefficient sum can overflow at the
    // sampling radius; the scaled route costs several times more per point.
    let log_abs: Vec<R> = zeta[..=degree].iter().map(|&c| ln_norm(c)).collect();
    let plain_ok = radius > R::zero()
        && log_abs_poly_bound(&log_abs, radius.ln().max(R::zero())) < R::max_value().ln() / r(2.0);
    let mut hits = 0usize;
    for k in 0..mc_samples {
        let u = r::<R>(st.uniform_open(2 * k as u64));
        let v = r::<R>(st.uniform_open(2 * k as u64 + 1));
        let z = Cplx::from_polar(radius * u.sqrt(), two_pi * v);
        let ln_p = if plain_ok {
            ln_norm(horner(&zeta[..=degree], z))
        } else {
            scaled_horner(zeta, z).0.ln_norm()
        };
        if ln_p - ln_lead <= level {
            hits += 1;
        }
    }
    let disk_area = R::PI() * radius * radius;
    let p_hat = R::from_usize(hits).unwrap() / R::from_usize(mc_samples).unwrap();
    let area_estimate = disk_area * p_hat;
    let std_error =
        disk_area * (p_hat * (R::one() - p_hat) / R::from_usize(mc_samples).unwrap()).sqrt();
    let bound = r::<R>(25.0) * R::PI() * R::E() * R::E() * h * h;
    let pass = area_estimate <= bound + r::<R>(3.0) * std_error;
    Ok(CartanReport { degree, area_estimate, bound, std_error, pass })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusReport<R: Real> {
    pub degree: usize,
    /// Radius whose angular minimum of `ln|p/lead|` is largest.
    pub best_radius: R,
    pub ln_floor: R,
    /// `degree * ln((r2 - r1)/5)`.
    pub ln_threshold: R,
    pub pass: bool,
}

/// Searches circles `|z| = rho` inside the annulus `(r1, r2)` for one on
/// which the monic-normalized modulus stays above the guaranteed floor.
///
/// Circles are a strict subset of the curves the floor is promised for, so
/// `pass` certifies a valid curve exists while a failure may be spurious for
/// adversarial root placements; callers log such cases rather than treat
/// them as violations.
pub fn annulus_floor<R: Real>(
    zeta: &[Cplx<R>],
    r1: R,
    r2: R,
    radial_steps: usize,
    angular_steps: usize,
) -> Result<AnnulusReport<R>, R> {
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must be rejected too
    if !(r1 > R::zero() && r2 > r1) {
        return Err(Error::Invalid(format!("annulus needs 0 < r1 < r2, got ({r1}, {r2})")));
    }
    if radial_steps == 0 || angular_steps == 0 {
        return Err(Error::Invalid("annulus grid needs at least one step each way".into()));
    }
    let (degree, ln_lead) = monic_view(zeta)?;

    let two_pi = R::PI() + R::PI();
    let mut best_radius = R::zero();
    let mut ln_floor = R::neg_infinity();
    for j in 0..radial_steps {
        let rho = r1 + R::from_usize(j + 1).unwrap() * (r2 - r1) / R::from_usize(radial_steps + 1).unwrap();
        let mut floor = R::infinity();
        for i in 0..angular_steps {
            let theta = two_pi * R::from_usize(i).unwrap() / R::from_usize(angular_steps).unwrap();
            let z = Cplx::from_polar(rho, theta);
            floor = floor.min(scaled_horner(zeta, z).0.ln_norm() - ln_lead);
        }
        if floor > ln_floor {
            ln_floor = floor;
            best_radius = rho;
        }
    }
    let ln_threshold = R::from_usize(degree).unwrap() * ((r2 - r1) / r::<R>(5.0)).ln();
    Ok(AnnulusReport { degree, best_radius, ln_floor, ln_threshold, pass: ln_floor >= ln_threshold })
}

/// Trailing-trimmed degree and `ln|lead|` of a coefficient vector.
fn monic_view<R: Real>(zeta: &[Cplx<R>]) -> Result<(usize, R), R> {
    if zeta.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::Invalid("non-finite coefficient".into()));
    }
    let degree = match zeta.iter().rposition(|c| c.norm() > R::zero()) {
        Some(d) if d >= 1 => d,
        _ => return Err(Error::Invalid("degree must be at least 1".into())),
    };
    Ok((degree, ln_norm(zeta[degree])))
}

/// The polynomial sequence a [`det_criterion_report`] examines.
pub enum Sequence<'a, R: Real> {
    /// The basis elements themselves; row `n` is the unit vector `e_n`.
    Own,
    /// Rows of coefficients in the basis; a row of length `m + 1` is the
    /// degree-`m` member `q_m = sum_k row[k] p_k`.
    Rows(&'a [Vec<Cplx<R>>]),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetCriterionReport<R: Real> {
    pub n_values: Vec<usize>,
    /// `(1/n) ln(||q_n||_p / |a|) - ln cap`; condition (i) wants this
    /// eventually `<= 0`. `-inf` when the near-leading coefficient vanishes.
    pub c1: Vec<R>,
    /// Interior-grid minimum of `(1/n) ln(|q_n(z)| / |a|) - ln cap`;
    /// condition (ii) wants this eventually `>= 0`. `None` when vacuous.
    pub c2: Vec<Option<R>>,
    /// `a = a_{n, n - i_n}` vanishes at this n (at or below the rounding
    /// level of its row): condition (i) cannot be certified there.
    pub zero_near_lead: Vec<bool>,
    /// The support has empty interior, so condition (ii) holds vacuously.
    pub vacuous_interior: bool,
}

/// Evaluates both convergence-criterion conditions per degree.
///
/// `i_n` overrides the near-leading offset for every n (default: the slow
/// window `floor(log10(n)^2)` clamped to n). The interior grid is supplied
/// by the caller and must be nonempty unless condition (ii) is vacuous.
pub fn det_criterion_report<R: Real>(
    basis: &Basis<R>,
    sequence: Sequence<'_, R>,
    p: R,
    i_n: Option<usize>,
    interior: &[Cplx<R>],
) -> Result<DetCriterionReport<R>, R> {
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must be rejected too
    if !(p > R::zero()) {
        return Err(Error::Invalid(format!("norm exponent must be positive, got {p}")));
    }
    let vacuous_interior = !basis.support().interior_flag();
    if !vacuous_interior && interior.is_empty() {
        return Err(Error::Invalid(
            "interior grid must be nonempty when the support has interior".into(),
        ));
    }
    let ln_cap = basis.support().capacity().ln();

    let mut report = DetCriterionReport {
        n_values: Vec::new(),
        c1: Vec::new(),
        c2: Vec::new(),
        zero_near_lead: Vec::new(),
        vacuous_interior,
    };
    let mut push = |n: usize, ln_norm_q: R, ln_a: Option<R>, interior_lns: &[R]| {
        let nr = R::from_usize(n).unwrap();
        report.n_values.push(n);
        match ln_a {
            None => {
                report.c1.push(R::neg_infinity());
                report.c2.push(None);
                report.zero_near_lead.push(true);
            }
            Some(ln_a) => {
                report.c1.push((ln_norm_q - ln_a) / nr - ln_cap);
                let c2 = interior_lns
                    .iter()
                    .map(|&l| (l - ln_a) / nr - ln_cap)
                    .fold(R::infinity(), R::min);
                report.c2.push(if vacuous_interior { None } else { Some(c2) });
                report.zero_near_lead.push(false);
            }
        }
    };

    match sequence {
        Sequence::Own => {
            for n in 1..=basis.degree_max() {
                let w = i_n.unwrap_or_else(|| default_window(n)).min(n);
                // a is the monomial coefficient of z^{n-w} in p_n, matching
                // the minimality report's near-lead convention.
                let ln_a = near_lead_ln(basis.coeff_row(n), n - w);
                let lns: Vec<R> = interior
                    .iter()
                    .map(|&z| scaled_horner(basis.coeff_row(n), z).0.ln_norm())
                    .collect();
                push(n, basis.lp_norm(n, p).ln(), ln_a, &lns);
            }
        }
        Sequence::Rows(rows) => {
            for row in rows {
                if row.len() < 2 {
                    return Err(Error::Invalid("sequence rows need degree >= 1".into()));
                }
                if row.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                    return Err(Error::Invalid("non-finite sequence coefficient".into()));
                }
                let n = row.len() - 1;
                if n > basis.degree_max() {
                    return Err(Error::Invalid(format!(
                        "row degree {n} exceeds basis degree_max {}",
                        basis.degree_max()
                    )));
                }
                let w = i_n.unwrap_or_else(|| default_window(n)).min(n);
                let mut mono = vec![Cplx::new(R::zero(), R::zero()); n + 1];
                for (k, &c) in row.iter().enumerate() {
                    for (mi, &bc) in mono.iter_mut().zip(basis.coeff_row(k)) {
                        *mi += c * bc;
                    }
                }
                let a = mono[n - w];
                let ln_a = if a.norm() > R::zero() { Some(ln_norm(a)) } else { None };

                // Node values of q are linear combinations of the cached
                // basis values, so the norm uses the same quadrature as
                // basis norms do.
                let ln_norm_q = if p == R::infinity() {
                    let m = basis.boundary_values(0).len();
                    let mut sup = R::zero();
                    for i in 0..m {
                        let mut v = Cplx::new(R::zero(), R::zero());
                        for (k, &c) in row.iter().enumerate() {
                            v += c * basis.boundary_values(k)[i];
                        }
                        sup = sup.max(v.norm());
                    }
                    sup.ln()
                } else {
                    let m = basis.measure().node_count();
                    let mut values = vec![Cplx::new(R::zero(), R::zero()); m];
                    for (k, &c) in row.iter().enumerate() {
                        for (vi, &bv) in values.iter_mut().zip(basis.node_values(k)) {
                            *vi += c * bv;
                        }
                    }
                    lp_norm_of(&values, &basis.measure().weights, p).ln()
                };

                let lns: Vec<R> =
                    interior.iter().map(|&z| scaled_horner(&mono, z).0.ln_norm()).collect();
                push(n, ln_norm_q, ln_a, &lns);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{make_distribution, near_leading_index, sample_g};
    use crate::poly::monic_from_roots;
    use crate::support::{build_support, reference_measure, Density, SupportSpec};

    type C = Cplx<f64>;

    fn unit_mono(degree: usize) -> Vec<C> {
        let mut z = vec![C::new(0.0, 0.0); degree + 1];
        z[degree] = C::new(1.0, 0.0);
        z
    }

    /// Standard complex gaussian via Box-Muller.
    fn gaussian_point(st: &Stream, k: u64) -> C {
        let u = st.uniform_open(2 * k);
        let v = st.uniform_open(2 * k + 1);
        C::from_polar((-u.ln()).sqrt(), 2.0 * std::f64::consts::PI * v)
    }

    #[test]
    fn cartan_on_pure_powers() {
        for n in [3usize, 17] {
            let rep = cartan_check(&unit_mono(n), 0.5, 40_000, 11).unwrap();
            // sublevel set is exactly the disk of radius 1/2
            assert!(rep.pass);
            assert!((rep.area_estimate - std::f64::consts::PI / 4.0).abs() < 0.05, "{rep:?}");
            assert!((rep.bound - 25.0 * std::f64::consts::PI * (1f64).exp().powi(2) * 0.25).abs() < 1e-9);
        }
    }

    #[test]
    fn cartan_large_h_passes_with_slack() {
        let roots: Vec<C> = (0..5).map(|k| C::from_polar(0.2 + 0.15 * k as f64, 1.1 * k as f64)).collect();
        let rep = cartan_check(&monic_from_roots(&roots), 10.0, 20_000, 5).unwrap();
        assert!(rep.pass);
        assert!(rep.area_estimate < 0.05 * rep.bound, "{rep:?}");
    }

    #[test]
    fn cartan_holds_on_random_monic_instances() {
        for &(degree, samples) in &[(5usize, 20_000usize), (20, 100_000), (50, 20_000)] {
            for inst in 0..100u64 {
                let st = Stream::new(901 + inst).derive(tag::CHECK_INSTANCES).derive(degree as u64);
                let roots: Vec<C> = (0..degree).map(|k| gaussian_point(&st, k as u64)).collect();
                let rep = cartan_check(&monic_from_roots(&roots), 0.3, samples, 77 + inst).unwrap();
                assert!(rep.pass, "degree {degree} instance {inst}: {rep:?}");
            }
        }
    }

    #[test]
    fn cartan_rejects_bad_inputs() {
        assert!(cartan_check(&unit_mono(3), 0.0, 100, 1).is_err());
        assert!(cartan_check(&[C::new(1.0, 0.0)], 0.5, 100, 1).is_err());
        assert!(cartan_check(&unit_mono(3), 0.5, 0, 1).is_err());
    }

    #[test]
    fn annulus_on_pure_powers() {
        let n = 12;
        let rep = annulus_floor(&unit_mono(n), 1.0, 2.0, 8, 64).unwrap();
        assert!(rep.pass);
        // outermost grid radius 1 + 8/9 wins; floor is n ln rho there
        let rho = 1.0 + 8.0 / 9.0;
        assert!((rep.best_radius - rho).abs() < 1e-12);
        assert!((rep.ln_floor - n as f64 * rho.ln()).abs() < 1e-9);
        assert!((rep.ln_threshold - n as f64 * 0.2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn annulus_clears_contained_roots() {
        // all roots in D_{r1}: the floor at rho is at least (rho - r1)^n
        for inst in 0..100u64 {
            let st = Stream::new(1744 + inst).derive(tag::CHECK_INSTANCES);
            let roots: Vec<C> = (0..15)
                .map(|k| {
                    let u = st.uniform_open(2 * k);
                    let v = st.uniform_open(2 * k + 1);
                    C::from_polar(3.0 * u.sqrt(), 2.0 * std::f64::consts::PI * v)
                })
                .collect();
            let rep = annulus_floor(&monic_from_roots(&roots), 4.0, 5.0, 6, 128).unwrap();
            assert!(rep.pass, "instance {inst}: {rep:?}");
        }
    }

    #[test]
    fn annulus_rejects_bad_grids() {
        assert!(annulus_floor(&unit_mono(3), 2.0, 1.0, 4, 16).is_err());
        assert!(annulus_floor(&unit_mono(3), 1.0, 2.0, 0, 16).is_err());
    }

    fn circle_monomials(n_max: usize) -> Basis<f64> {
        let sup = build_support(&SupportSpec::Circle { radius: 1.0 }).unwrap();
        let mu = reference_measure(&sup, Density::EquilibriumDensity, 4 * (n_max + 1)).unwrap();
        crate::basis::orthonormal_basis(&mu, n_max)
            .expect("monomials are already orthonormal on the unit circle")
    }

    #[test]
    fn monomials_satisfy_i_but_fail_ii() {
        let basis = circle_monomials(12);
        let interior: Vec<C> = (0..16)
            .map(|k| C::from_polar(0.8, 2.0 * std::f64::consts::PI * k as f64 / 16.0))
            .collect();
        let rep = det_criterion_report(&basis, Sequence::Own, 2.0, Some(0), &interior).unwrap();
        assert_eq!(rep.n_values, (1..=12).collect::<Vec<_>>());
        assert!(!rep.vacuous_interior);
        for (i, &n) in rep.n_values.iter().enumerate() {
            assert!(rep.c1[i].abs() < 1e-9, "c1 at n = {n}: {}", rep.c1[i]);
            let c2 = rep.c2[i].unwrap();
            assert!((c2 - 0.8f64.ln()).abs() < 1e-9, "c2 at n = {n}: {c2}");
            assert!(!rep.zero_near_lead[i]);
        }
    }

    #[test]
    fn interval_reports_vacuous_second_condition() {
        let sup = build_support(&SupportSpec::Interval { a: -1.0, b: 1.0 }).unwrap();
        let mu = reference_measure(&sup, Density::EquilibriumDensity, 64).unwrap();
        let basis = crate::basis::orthonormal_basis(&mu, 8).unwrap();
        let rep = det_criterion_report(&basis, Sequence::Own, 2.0, Some(0), &[]).unwrap();
        assert!(rep.vacuous_interior);
        assert!(rep.c2.iter().all(Option::is_none));
    }

    #[test]
    fn zero_near_leading_coefficient_is_flagged() {
        let basis = circle_monomials(8);
        // e_n rows have nothing at offset 2
        let rep =
            det_criterion_report(&basis, Sequence::Own, 2.0, Some(2), &[C::new(0.5, 0.0)]).unwrap();
        assert!(rep.zero_near_lead[4]);
        assert_eq!(rep.c1[4], f64::NEG_INFINITY);
        assert!(rep.c2[4].is_none());
    }

    #[test]
    fn gaussian_rows_clear_the_interior_floor() {
        let n = 128;
        let basis = circle_monomials(n);
        let interior = basis.support().interior_grid(&[0.4, 0.8], 16);
        assert!(!interior.is_empty());
        let dist = make_distribution::<f64>("gaussian", None).unwrap();
        let mut ok = 0;
        for trial in 0..50u64 {
            let g = sample_g(&basis, &dist, n, 6000 + trial).unwrap();
            let (j, _) = near_leading_index(g.zeta(), n).unwrap();
            let rows = vec![g.xi().to_vec()];
            let rep =
                det_criterion_report(&basis, Sequence::Rows(&rows), 2.0, Some(n - j), &interior)
                    .unwrap();
            assert_eq!(rep.n_values, vec![n]);
            if rep.c2[0].unwrap() >= -0.2 {
                ok += 1;
            }
        }
        assert!(ok >= 45, "only {ok} of 50 trials cleared the floor");
    }

    #[test]
    fn row_and_own_views_agree_on_basis_elements() {
        let basis = circle_monomials(10);
        let interior = [C::new(0.3, 0.2), C::new(-0.5, 0.1)];
        let own = det_criterion_report(&basis, Sequence::Own, 2.0, Some(0), &interior).unwrap();
        let mut rows = Vec::new();
        for n in 1..=10 {
            let mut row = vec![C::new(0.0, 0.0); n + 1];
            row[n] = C::new(1.0, 0.0);
            rows.push(row);
        }
        let via_rows =
            det_criterion_report(&basis, Sequence::Rows(&rows), 2.0, Some(0), &interior).unwrap();
        assert_eq!(own.n_values, via_rows.n_values);
        for i in 0..own.n_values.len() {
            assert!((own.c1[i] - via_rows.c1[i]).abs() < 1e-12);
            assert!((own.c2[i].unwrap() - via_rows.c2[i].unwrap()).abs() < 1e-12);
        }
    }
}
