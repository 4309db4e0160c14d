//! L^p-minimal monic polynomials, returned renormalized to unit norm.
//!
//! For finite p the monic minimizer of degree n is found by iteratively
//! reweighted least squares over the quadrature grid. The working
//! parameterization is the raw Faber family of the support, q = kappa (F_n +
//! sum_j d_j F_j): Faber values are O(1) on the support and the minimizer is
//! a small perturbation of F_n, so the combination never suffers the
//! exponential cancellation that monomial coordinates produce on an
//! interval. For p = infinity the interval case runs a Remez exchange in the
//! same coordinates; the circle case is the closed form z^n; the ellipse has
//! no Haar-system guarantee along its boundary and is rejected.

use crate::error::{Error, Result};
use crate::linalg::{solve_complex, solve_real};
use crate::num::{r, Cplx, Real};
use crate::support::{DiscretizedMeasure, SupportKind};

use super::faber::{faber_raw_coeffs, faber_raw_values};
use super::{lp_norm_of, Basis, BasisKind, BOUNDARY_GRID_POINTS};

const IRLS_MAX_ITERS: usize = 500;
const IRLS_REL_TOL: f64 = 1e-10;
const REMEZ_MAX_ITERS: usize = 100;
const REMEZ_GRID: usize = 8192;

/// Builds `p_0..p_{n_max}` with each `p_n = q_n / ||q_n||_{L^p(tau)}` for the
/// monic minimizer `q_n`.
pub fn lp_minimal_basis<R: Real>(
    measure: &DiscretizedMeasure<R>,
    p: R,
    n_max: usize,
) -> Result<Basis<R>, R> {
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must be rejected too
    if !(p >= R::one()) {
        return Err(Error::Invalid(format!(
            "p must be at least 1 (got {p}); minimizers below 1 are non-convex"
        )));
    }
    if p == R::infinity() {
        return sup_minimal_basis(measure, n_max);
    }
    if measure.exactness_degree < 2 * n_max {
        return Err(Error::Invalid(format!(
            "measure exactness degree {} too small for degree {n_max}",
            measure.exactness_degree
        )));
    }

    let support = measure.support;
    let boundary = support.boundary_grid(BOUNDARY_GRID_POINTS);
    let f_nodes = faber_raw_values(&support, n_max, &measure.nodes);
    let f_boundary = faber_raw_values(&support, n_max, &boundary);
    let f_coeffs = faber_raw_coeffs(&support, n_max);

    let mut basis = empty_basis(BasisKind::LpMinimal { p }, measure, n_max);
    push_constant_row(&mut basis, measure, boundary.len());

    for n in 1..=n_max {
        let d = irls_coefficients(measure, &f_nodes, n, p)
            .map_err(|e| annotate_degree(e, n))?;
        push_combination_row(&mut basis, measure, &f_nodes, &f_boundary, &f_coeffs, n, &d, p, None);
    }
    Ok(basis)
}

/// IRLS over the free coefficients d of `F_n + sum d_j F_j`.
fn irls_coefficients<R: Real>(
    measure: &DiscretizedMeasure<R>,
    f_nodes: &[Vec<Cplx<R>>],
    n: usize,
    p: R,
) -> Result<Vec<Cplx<R>>, R> {
    let m = measure.node_count();
    let zero = Cplx::new(R::zero(), R::zero());
    let objective = |vals: &[Cplx<R>]| -> R {
        vals.iter().zip(&measure.weights).map(|(v, &w)| w * v.norm().powf(p)).sum()
    };
    let combine = |d: &[Cplx<R>]| -> Vec<Cplx<R>> {
        (0..m)
            .map(|i| {
                let mut v = f_nodes[n][i];
                for (j, &dj) in d.iter().enumerate() {
                    v += dj * f_nodes[j][i];
                }
                v
            })
            .collect()
    };

    // Weighted least squares step: minimize sum u_i |F_n + sum d_j F_j|^2.
    let ls_step = |u: &[R]| -> Result<Vec<Cplx<R>>, R> {
        let mut a = vec![vec![zero; n]; n];
        let mut b = vec![zero; n];
        for (j, row_j) in f_nodes.iter().enumerate().take(n) {
            for (k, row_k) in f_nodes.iter().enumerate().take(n) {
                if k > j {
                    continue;
                }
                let mut s = zero;
                for i in 0..m {
                    s += row_j[i].conj() * row_k[i] * Cplx::new(u[i], R::zero());
                }
                a[j][k] = s;
                a[k][j] = s.conj();
            }
            let mut s = zero;
            for i in 0..m {
                s += row_j[i].conj() * f_nodes[n][i] * Cplx::new(u[i], R::zero());
            }
            b[j] = -s;
        }
        solve_complex(&mut a, &mut b)?;
        Ok(b)
    };

    // p = 2 start (plain weights), exact for p = 2.
    let mut d = ls_step(&measure.weights)?;
    let mut vals = combine(&d);
    let mut obj = objective(&vals);
    if p == r(2.0) {
        return Ok(d);
    }

    let scale2 = lp_norm_of(&vals, &measure.weights, r(2.0)).powi(2);
    let mut eps = scale2 * r(1e-4);
    let eps_floor = scale2 * r(1e-28) + R::min_positive_value();
    let alpha = R::one().min(r::<R>(2.0) / p);
    let mut best = (d.clone(), obj);
    for _iter in 0..IRLS_MAX_ITERS {
        let u: Vec<R> = vals
            .iter()
            .zip(&measure.weights)
            .map(|(v, &w)| {
                let q2 = v.norm_sqr() + eps;
                w * q2.powf((p - r(2.0)) / r(2.0))
            })
            .collect();
        let target = ls_step(&u)?;
        for (dj, &tj) in d.iter_mut().zip(&target) {
            *dj = *dj + (tj - *dj) * Cplx::new(alpha, R::zero());
        }
        vals = combine(&d);
        let new_obj = objective(&vals);
        if new_obj < best.1 {
            best = (d.clone(), new_obj);
        }
        let rel = (new_obj - obj).abs() / obj.max(R::min_positive_value());
        obj = new_obj;
        eps = (eps * r(0.1)).max(eps_floor);
        if rel <= r(IRLS_REL_TOL) && eps <= eps_floor * r(1.0 + 1e-9) {
            return Ok(d);
        }
    }
    Err(Error::IterationLimit {
        context: "IRLS for L^p minimal polynomial".into(),
        residual: obj,
        best: best.0,
    })
}

/// p = infinity: circle closed form or interval Remez.
fn sup_minimal_basis<R: Real>(
    measure: &DiscretizedMeasure<R>,
    n_max: usize,
) -> Result<Basis<R>, R> {
    let support = measure.support;
    match support.kind() {
        SupportKind::Circle { radius } => {
            let boundary = support.boundary_grid(BOUNDARY_GRID_POINTS);
            let mut basis =
                empty_basis(BasisKind::LpMinimal { p: R::infinity() }, measure, n_max);
            let zero = Cplx::new(R::zero(), R::zero());
            for n in 0..=n_max {
                // Monic minimizer z^n, norm radius^n, so p_n = (z/radius)^n.
                let mut row = vec![zero; n + 1];
                row[n] = Cplx::new(radius.powi(-(n as i32)), R::zero());
                basis.coeffs.push(row);
                basis
                    .node_values
                    .push(measure.nodes.iter().map(|&z| (z / radius).powu(n as u32)).collect());
                basis
                    .boundary_values
                    .push(boundary.iter().map(|&z| (z / radius).powu(n as u32)).collect());
                basis.norms.push(R::one());
            }
            Ok(basis)
        }
        SupportKind::Interval { .. } => remez_basis(measure, n_max),
        SupportKind::Ellipse { .. } => Err(Error::Capability(
            "sup-norm minimal polynomials are only built on circle and interval supports".into(),
        )),
    }
}

fn remez_basis<R: Real>(measure: &DiscretizedMeasure<R>, n_max: usize) -> Result<Basis<R>, R> {
    let support = measure.support;
    debug_assert!(matches!(support.kind(), SupportKind::Interval { .. }));
    let boundary = support.boundary_grid(BOUNDARY_GRID_POINTS);
    let f_nodes = faber_raw_values(&support, n_max, &measure.nodes);
    let f_boundary = faber_raw_values(&support, n_max, &boundary);
    let f_coeffs = faber_raw_coeffs(&support, n_max);

    let mut basis = empty_basis(BasisKind::LpMinimal { p: R::infinity() }, measure, n_max);
    push_constant_row(&mut basis, measure, boundary.len());
    for n in 1..=n_max {
        let (d, sup) = remez_coefficients(n).map_err(|e| annotate_degree(e, n))?;
        push_combination_row(
            &mut basis,
            measure,
            &f_nodes,
            &f_boundary,
            &f_coeffs,
            n,
            &d,
            R::infinity(),
            Some(sup),
        );
    }
    Ok(basis)
}

/// Remez exchange for the degree-n sup-norm minimizer in Faber coordinates.
///
/// On any interval the raw Faber polynomials become the cosine system in
/// the angle variable (`F_0 = 1`, `F_j = 2 cos(j th)`), so the exchange
/// runs entirely in `th` on `[0, pi]`: solve the levelled equations on an
/// (n+1)-point reference, locate the alternation extrema of the error on a
/// fine grid, polish each by golden section, and move the reference to the
/// polished positions. The continuous reference makes this the true minimax
/// solution instead of a grid-resolution approximation of it.
///
/// Returns the free coefficients d and the sup of the raw combination.
fn remez_coefficients<R: Real>(n: usize) -> Result<(Vec<Cplx<R>>, R), R> {
    let basis_at = |j: usize, th: R| -> R {
        if j == 0 {
            R::one()
        } else {
            r::<R>(2.0) * (R::from_usize(j).unwrap() * th).cos()
        }
    };
    let eval = |d: &[R], th: R| -> R {
        let mut v = basis_at(n, th);
        for (j, &dj) in d.iter().enumerate() {
            v += dj * basis_at(j, th);
        }
        v
    };
    let g = REMEZ_GRID + 1;
    let step = R::PI() / R::from_usize(REMEZ_GRID).unwrap();
    // Offset start so the exchange path is exercised even when the initial
    // solve is already close.
    let nf = R::from_usize(n).unwrap();
    let mut reference: Vec<R> = (0..=n)
        .map(|i| R::PI() * (R::from_usize(i).unwrap() + r(0.37)) / (nf + r(0.74)))
        .collect();
    let mut best: Option<(Vec<R>, R)> = None;
    for _iter in 0..REMEZ_MAX_ITERS {
        // Levelled interpolation e(th_i) = (-1)^i h.
        let mut a = vec![vec![R::zero(); n + 1]; n + 1];
        let mut rhs = vec![R::zero(); n + 1];
        for (i, &th) in reference.iter().enumerate() {
            for j in 0..n {
                a[i][j] = basis_at(j, th);
            }
            a[i][n] = if i % 2 == 0 { -R::one() } else { R::one() };
            rhs[i] = -basis_at(n, th);
        }
        solve_real(&mut a, &mut rhs)?;
        let d = rhs[..n].to_vec();
        let h = rhs[n].abs();

        // One polished extremum per sign segment of e on the fine grid.
        let e: Vec<R> = (0..g).map(|k| eval(&d, R::from_usize(k).unwrap() * step)).collect();
        let mut extrema: Vec<(R, R)> = Vec::new();
        let mut seg_start = 0usize;
        for k in 1..=g {
            let split = k == g || (e[k] >= R::zero()) != (e[seg_start] >= R::zero());
            if split {
                let arg = (seg_start..k)
                    .max_by(|&x, &y| e[x].abs().partial_cmp(&e[y].abs()).unwrap())
                    .unwrap();
                let af = R::from_usize(arg).unwrap();
                let th = golden_max(|t| eval(&d, t).abs(), (af - R::one()) * step, (af + R::one()) * step);
                extrema.push((th, eval(&d, th)));
                seg_start = k;
            }
        }
        let dev = extrema.iter().map(|&(_, v)| v.abs()).fold(R::zero(), R::max);
        if best.as_ref().is_none_or(|(_, bd)| dev < *bd) {
            best = Some((d.clone(), dev));
        }
        if extrema.len() > n && dev - h <= r::<R>(1e-13) * dev {
            return Ok((d.iter().map(|&x| Cplx::new(x, R::zero())).collect(), dev));
        }
        if extrema.len() < n + 1 {
            continue;
        }
        // Keep the n+1 consecutive extrema whose smallest amplitude is largest.
        let mut pick = 0usize;
        let mut pick_min = R::neg_infinity();
        for start in 0..=extrema.len() - (n + 1) {
            let window_min =
                (start..start + n + 1).map(|i| extrema[i].1.abs()).fold(R::infinity(), R::min);
            if window_min > pick_min {
                pick_min = window_min;
                pick = start;
            }
        }
        reference = extrema[pick..pick + n + 1].iter().map(|&(t, _)| t).collect();
    }
    let (bd, dev) = best.unwrap();
    Err(Error::IterationLimit {
        context: "Remez exchange for sup-norm minimal polynomial".into(),
        residual: dev,
        best: bd.iter().map(|&x| Cplx::new(x, R::zero())).collect(),
    })
}

/// Golden-section maximizer of `f` on `[lo, hi]` intersected with `[0, pi]`.
fn golden_max<R: Real>(f: impl Fn(R) -> R, lo: R, hi: R) -> R {
    let mut lo = lo.max(R::zero());
    let mut hi = hi.min(R::PI());
    let phi = r::<R>(0.618_033_988_749_894_9);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..48 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        x1
    } else {
        x2
    }
}

fn empty_basis<R: Real>(
    kind: BasisKind<R>,
    measure: &DiscretizedMeasure<R>,
    n_max: usize,
) -> Basis<R> {
    Basis {
        kind,
        support: measure.support,
        measure: measure.clone(),
        degree_max: n_max,
        coeffs: Vec::with_capacity(n_max + 1),
        norms: Vec::with_capacity(n_max + 1),
        node_values: Vec::with_capacity(n_max + 1),
        boundary_values: Vec::with_capacity(n_max + 1),
    }
}

fn push_constant_row<R: Real>(
    basis: &mut Basis<R>,
    measure: &DiscretizedMeasure<R>,
    boundary_len: usize,
) {
    let one = Cplx::new(R::one(), R::zero());
    basis.coeffs.push(vec![one]);
    basis.node_values.push(vec![one; measure.node_count()]);
    basis.boundary_values.push(vec![one; boundary_len]);
    basis.norms.push(R::one());
}

/// Assembles the normalized row `(F_n + sum d_j F_j) / ||...||_p` in all
/// three representations. The monic scale kappa cancels in the stored row.
#[allow(clippy::too_many_arguments)]
fn push_combination_row<R: Real>(
    basis: &mut Basis<R>,
    measure: &DiscretizedMeasure<R>,
    f_nodes: &[Vec<Cplx<R>>],
    f_boundary: &[Vec<Cplx<R>>],
    f_coeffs: &[Vec<Cplx<R>>],
    n: usize,
    d: &[Cplx<R>],
    p: R,
    norm_override: Option<R>,
) {
    let comb = |rows: &[Vec<Cplx<R>>], len: usize| -> Vec<Cplx<R>> {
        (0..len)
            .map(|i| {
                let mut v = rows[n][i];
                for (j, &dj) in d.iter().enumerate() {
                    v += dj * rows[j][i];
                }
                v
            })
            .collect()
    };
    let vals = comb(f_nodes, measure.node_count());
    let bvals = comb(f_boundary, f_boundary[0].len());
    let mut crow = vec![Cplx::new(R::zero(), R::zero()); n + 1];
    for (k, &c) in f_coeffs[n].iter().enumerate() {
        crow[k] = c;
    }
    for (j, &dj) in d.iter().enumerate() {
        for (k, &c) in f_coeffs[j].iter().enumerate() {
            crow[k] += dj * c;
        }
    }
    let norm = norm_override.unwrap_or_else(|| {
        if p == R::infinity() {
            bvals.iter().map(|z| z.norm()).fold(R::zero(), R::max)
        } else {
            lp_norm_of(&vals, &measure.weights, p)
        }
    });
    let inv = Cplx::new(R::one() / norm, R::zero());
    basis.coeffs.push(crow.iter().map(|&c| c * inv).collect());
    basis.node_values.push(vals.iter().map(|&v| v * inv).collect());
    basis.boundary_values.push(bvals.iter().map(|&v| v * inv).collect());
    basis.norms.push(R::one());
}

fn annotate_degree<R: Real>(e: Error<R>, n: usize) -> Error<R> {
    match e {
        Error::IterationLimit { context, residual, best } => Error::IterationLimit {
            context: format!("{context} (degree {n})"),
            residual,
            best,
        },
        other => other,
    }
}
