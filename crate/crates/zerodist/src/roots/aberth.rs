//! Aberth–Ehrlich simultaneous iteration, the primary root path.
//!
//! All polynomial values are carried as [`Scaled`] mantissa/exponent pairs,
//! so the solver survives iterates and coefficient spreads far beyond the
//! plain floating range; only the Newton correction `p/p'` (a length on the
//! root scale) is collapsed back to an ordinary complex number.

use crate::error::{Error, Result};
use crate::num::{ln_norm, r, Cplx, Real};
use crate::poly::{compensated_horner, log_abs_poly_bound, scaled_horner, Scaled};

pub(super) const MAX_SWEEPS: usize = 500;
const TOL: f64 = 1e-12;

pub(super) struct AberthOutcome<R: Real> {
    pub roots: Vec<Cplx<R>>,
    pub sweeps: usize,
}

/// Solves a deflated polynomial: `coeffs[0]` and the leading entry are both
/// nonzero and the degree is at least 1. Coefficients should be pre-scaled
/// to max modulus 1 by the caller.
pub(super) fn aberth<R: Real>(coeffs: &[Cplx<R>]) -> Result<AberthOutcome<R>, R> {
    let deg = coeffs.len() - 1;
    let tol = r::<R>(TOL);
    let radii = newton_polygon_radii(coeffs);
    // Equispaced angles with a fixed offset so no initial guess sits on a
    // symmetry axis of the common real-coefficient case.
    let mut z: Vec<Cplx<R>> = (0..deg)
        .map(|i| {
            let th = r::<R>(2.0) * R::PI() * R::from_usize(i).unwrap()
                / R::from_usize(deg).unwrap()
                + r(0.3);
            Cplx::from_polar(radii[i], th)
        })
        .collect();

    // A root is done when its correction is below tolerance or its residual
    // reaches the Horner rounding floor: past that point fixed precision
    // cannot improve it and the correction only jitters.
    let mut done = vec![false; deg];
    let abs_coeffs: Vec<Cplx<R>> =
        coeffs.iter().map(|c| Cplx::new(c.norm(), R::zero())).collect();
    let noise_gate = r::<R>(1e-6);
    let ln_noise = (R::epsilon() * R::from_usize(4 * (deg + 1)).unwrap()).ln();

    let mut max_corr = R::infinity();
    for sweep in 1..=MAX_SWEEPS {
        max_corr = R::zero();
        for i in 0..deg {
            if done[i] {
                continue;
            }
            let (p, d) = scaled_horner(coeffs, z[i]);
            if p.is_zero() {
                done[i] = true;
                continue;
            }
            if d.is_zero() {
                // Landed on a critical point; nudge off and retry next sweep.
                let nudge = Cplx::from_polar(r::<R>(1e-6) * (R::one() + z[i].norm()), spray(i));
                z[i] += nudge;
                max_corr = R::infinity();
                continue;
            }
            let newton = scaled_ratio(p, d, z[i]);
            let mut s = Cplx::new(R::zero(), R::zero());
            for j in 0..deg {
                if j == i {
                    continue;
                }
                let mut dz = z[i] - z[j];
                if dz.norm_sqr() == R::zero() {
                    dz = Cplx::from_polar(r::<R>(1e-12) * (R::one() + z[i].norm()), spray(i + j));
                }
                s += recip(dz);
            }
            let denom = Cplx::new(R::one(), R::zero()) - newton * s;
            let mut w = if denom.norm_sqr() == R::zero() { newton } else { newton / denom };
            // The repulsion term nearly cancels the Newton step when a far
            // iterate faces a tight cluster (s ~ k/z against p ~ c z^k), and
            // the quotient then teleports the iterate by many orders of
            // magnitude. Dampening to half the current scale keeps every
            // move on the root scale; converging steps are far smaller and
            // pass untouched.
            let cap = (R::one() + z[i].norm()) / r(2.0);
            if !w.re.is_finite() || !w.im.is_finite() {
                w = Cplx::from_polar(cap, spray(i));
            } else if w.norm() > cap {
                w = Cplx::from_polar(cap, w.arg());
            }
            z[i] -= w;
            let rel = w.norm() / (R::one() + z[i].norm());
            if rel < tol {
                done[i] = true;
                continue;
            }
            if rel < noise_gate {
                let pv = scaled_horner(coeffs, z[i]).0;
                let at_abs = Cplx::new(z[i].norm(), R::zero());
                let bound = scaled_horner(&abs_coeffs, at_abs).0;
                if pv.ln_norm() <= ln_noise + bound.ln_norm() {
                    done[i] = true;
                    continue;
                }
            }
            max_corr = max_corr.max(rel);
        }
        if done.iter().all(|&b| b) {
            return Ok(AberthOutcome { roots: z, sweeps: sweep });
        }
    }
    Err(Error::RootsUnconverged { sweeps: MAX_SWEEPS, max_correction: max_corr, best: z })
}

/// Collapses `num/den` to a plain complex number; falls back to a clamped
/// step in the correct direction if the true ratio overflows.
fn scaled_ratio<R: Real>(num: Scaled<R>, den: Scaled<R>, z: Cplx<R>) -> Cplx<R> {
    let m = num.mantissa / den.mantissa;
    let k = (num.exp2 - den.exp2).clamp(-2_000, 2_000) as i32;
    let out = m * Cplx::new(r::<R>(2.0).powi(k), R::zero());
    if out.re.is_finite() && out.im.is_finite() {
        out
    } else {
        Cplx::from_polar(r::<R>(1e8) * (R::one() + z.norm()), m.arg())
    }
}

/// Deterministic angle used to break exact symmetries.
fn spray<R: Real>(i: usize) -> R {
    r::<R>(2.399_963) * R::from_usize(i + 1).unwrap()
}

/// `1/dz` without the naive quotient's `|dz|^2`, which overflows for
/// `|dz| > 1e154` (silently zeroing the repulsion term) and underflows for
/// `|dz| < 1e-154`. The input is nonzero.
fn recip<R: Real>(dz: Cplx<R>) -> Cplx<R> {
    let m = dz.re.abs().max(dz.im.abs());
    let inv_m = R::one() / m;
    if !inv_m.is_finite() || inv_m == R::zero() {
        // |dz| at the very edge of the range; 1/dz rounds to 0 or inf anyway
        return Cplx::new(inv_m, R::zero());
    }
    let small = dz * inv_m;
    small.conj() / small.norm_sqr() * inv_m
}

/// Initial radii from the coefficient Newton polygon: each segment of the
/// upper convex hull of `(k, log|c_k|)` from `(i, u_i)` to `(j, u_j)`
/// contributes `j - i` roots of modulus `exp((u_i - u_j)/(j - i))`.
fn newton_polygon_radii<R: Real>(coeffs: &[Cplx<R>]) -> Vec<R> {
    let pts: Vec<(usize, R)> = coeffs
        .iter()
        .enumerate()
        .filter_map(|(k, c)| {
            let l = ln_norm(*c);
            (l > R::neg_infinity()).then_some((k, l))
        })
        .collect();
    let mut hull: Vec<(usize, R)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = R::from_usize(b.0 - a.0).unwrap() * (p.1 - a.1)
                - R::from_usize(p.0 - a.0).unwrap() * (b.1 - a.1);
            // b at or below the chord a-p: not an upper-hull vertex
            if cross >= R::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut radii = Vec::with_capacity(coeffs.len() - 1);
    for w in hull.windows(2) {
        let (i, ui) = w[0];
        let (j, uj) = w[1];
        let rad = ((ui - uj) / R::from_usize(j - i).unwrap()).exp();
        for _ in i..j {
            radii.push(rad);
        }
    }
    radii
}

/// Backward error of `z` as a root: `|p(z)| / sum_k |c_k| max(1,|z|)^k`,
/// evaluated by compensated Horner in range and in the log domain beyond it.
pub(super) fn backward_error<R: Real>(coeffs: &[Cplx<R>], log_abs: &[R], z: Cplx<R>) -> R {
    let t = z.norm().max(R::one()).ln();
    let ln_bound = log_abs_poly_bound(log_abs, t);
    let headroom = R::max_value().ln() / r(2.0);
    let ln_p = if R::from_usize(coeffs.len()).unwrap() * t < headroom {
        ln_norm(compensated_horner(coeffs, z))
    } else {
        scaled_horner(coeffs, z).0.ln_norm()
    };
    if ln_p == R::neg_infinity() {
        return R::zero();
    }
    (ln_p - ln_bound).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Cplx<f64>;

    fn solve(coeffs: &[C]) -> Vec<C> {
        aberth(coeffs).unwrap().roots
    }

    #[test]
    fn quadratic_z2_plus_1() {
        let roots = solve(&[C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0)]);
        assert_eq!(roots.len(), 2);
        let mut dist: Vec<f64> = roots.iter().map(|z| (z - C::new(0.0, 1.0)).norm()).collect();
        dist.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(dist[0] < 1e-12);
        let far = roots.iter().map(|z| (z - C::new(0.0, -1.0)).norm()).fold(f64::MAX, f64::min);
        assert!(far < 1e-12);
    }

    #[test]
    fn recovers_the_integers_one_to_ten() {
        let targets: Vec<C> = (1..=10).map(|k| C::new(k as f64, 0.0)).collect();
        let coeffs = crate::poly::monic_from_roots(&targets);
        // max-modulus scaling is the caller's job
        let m = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let scaled: Vec<C> = coeffs.iter().map(|c| c / m).collect();
        let roots = solve(&scaled);
        for t in &targets {
            let d = roots.iter().map(|z| (z - t).norm()).fold(f64::MAX, f64::min);
            assert!(d < 1e-6, "root {t} missed by {d:e}");
        }
    }

    #[test]
    fn extreme_magnitude_quadratic() {
        // eps z^2 + z + eps: roots near -1e6 and -1e-6
        let eps = 1e-6;
        let roots = solve(&[C::new(eps, 0.0), C::new(1.0, 0.0), C::new(eps, 0.0)]);
        let small = roots.iter().map(|z| (z - C::new(-1e-6, 0.0)).norm()).fold(f64::MAX, f64::min);
        let big = roots.iter().map(|z| (z - C::new(-1e6, 0.0)).norm()).fold(f64::MAX, f64::min);
        assert!(small / 1e-6 < 1e-3, "small root off by rel {:e}", small / 1e-6);
        assert!(big / 1e6 < 1e-3, "big root off by rel {:e}", big / 1e6);
    }

    #[test]
    fn wide_log_spread_coefficients_stay_convergent() {
        // |c_k| spans e^{-120}..e^{120}; Newton-polygon starts keep the
        // rings separated and the scaled evaluator avoids overflow.
        let coeffs: Vec<C> = (0..=40)
            .map(|k| C::from_polar((120.0 * (3.0 * k as f64).sin()).exp(), 0.7 * k as f64))
            .collect();
        let m = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let scaled: Vec<C> = coeffs.iter().map(|c| c / m).collect();
        let out = aberth(&scaled).unwrap();
        assert_eq!(out.roots.len(), 40);
        assert!(out.sweeps < MAX_SWEEPS);
        let log_abs: Vec<f64> = scaled.iter().map(|c| ln_norm(*c)).collect();
        for z in &out.roots {
            assert!(backward_error(&scaled, &log_abs, *z) <= 1e-8);
        }
    }

    #[test]
    fn backward_error_flags_a_non_root() {
        let coeffs = [C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0)];
        let log_abs: Vec<f64> = coeffs.iter().map(|c| ln_norm(*c)).collect();
        assert!(backward_error(&coeffs, &log_abs, C::new(0.5, 0.0)) > 1e-2);
        assert!(backward_error(&coeffs, &log_abs, C::new(0.0, 1.0)) <= 1e-12);
    }
}
