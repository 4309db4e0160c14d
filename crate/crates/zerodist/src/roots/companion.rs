//! Companion-matrix eigenvalue oracle, independent of the Aberth path.
//!
//! The monic companion matrix is already upper Hessenberg; after a
//! power-of-two balancing pass its eigenvalues are extracted by a shifted
//! complex QR iteration with Givens rotations. Kept deliberately separate
//! from the primary solver so the two routes share no numerics.

use crate::error::{Error, Result};
use crate::num::{r, Cplx, Real};

const MAX_DEGREE: usize = 64;

pub fn roots_companion<R: Real>(zeta: &[Cplx<R>]) -> Result<Vec<Cplx<R>>, R> {
    let czero = Cplx::new(R::zero(), R::zero());
    let deg = zeta
        .iter()
        .rposition(|c| *c != czero)
        .ok_or_else(|| Error::Invalid("all coefficients are zero".into()))?;
    if deg > MAX_DEGREE {
        return Err(Error::Capability(format!(
            "companion oracle handles degree <= {MAX_DEGREE}, got {deg}"
        )));
    }
    if deg == 0 {
        return Ok(vec![]);
    }
    let low = zeta.iter().position(|c| *c != czero).unwrap();
    let mut out = vec![czero; low];
    let core = &zeta[low..=deg];
    let d = deg - low;
    if d == 0 {
        return Ok(out);
    }
    let lead = core[d];
    let mut h = vec![vec![czero; d]; d];
    for (k, row) in h.iter_mut().enumerate() {
        row[d - 1] = -(core[k] / lead);
    }
    for k in 1..d {
        h[k][k - 1] = Cplx::new(R::one(), R::zero());
    }
    balance(&mut h);
    out.extend(hessenberg_qr(&mut h)?);
    Ok(out)
}

/// Diagonal similarity scaling by powers of two (preserves Hessenberg form
/// and introduces no rounding).
fn balance<R: Real>(h: &mut [Vec<Cplx<R>>]) {
    let n = h.len();
    let two = r::<R>(2.0);
    for _ in 0..8 {
        let mut changed = false;
        for i in 0..n {
            let mut col = R::zero();
            let mut row = R::zero();
            for j in 0..n {
                if j != i {
                    col += h[j][i].norm();
                    row += h[i][j].norm();
                }
            }
            if col == R::zero() || row == R::zero() {
                continue;
            }
            let before = col + row;
            let mut f = R::one();
            while col < row / two {
                col *= two;
                row /= two;
                f *= two;
            }
            while col > row * two {
                col /= two;
                row *= two;
                f /= two;
            }
            if col + row < r::<R>(0.95) * before {
                changed = true;
                let inv = R::one() / f;
                for j in 0..n {
                    h[i][j] *= inv;
                }
                for j in 0..n {
                    h[j][i] *= f;
                }
            }
        }
        if !changed {
            break;
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by explicit single-shift QR.
fn hessenberg_qr<R: Real>(h: &mut [Vec<Cplx<R>>]) -> Result<Vec<Cplx<R>>, R> {
    let n = h.len();
    let czero = Cplx::new(R::zero(), R::zero());
    let scale = h
        .iter()
        .flat_map(|row| row.iter())
        .map(|z| z.norm())
        .fold(R::zero(), R::max)
        .max(R::one());
    let mut eig: Vec<Cplx<R>> = Vec::with_capacity(n);
    let mut hi = n;
    let mut stall = 0usize;
    let mut total = 0usize;
    let budget = 40 * n + 100;
    while hi > 0 {
        // deflation: find the block bottom lo
        let mut lo = hi - 1;
        while lo > 0 {
            let s = h[lo - 1][lo - 1].norm() + h[lo][lo].norm();
            let thresh = R::epsilon() * if s > R::zero() { s } else { scale };
            if h[lo][lo - 1].norm() <= thresh {
                h[lo][lo - 1] = czero;
                break;
            }
            lo -= 1;
        }
        if lo == hi - 1 {
            eig.push(h[hi - 1][hi - 1]);
            hi -= 1;
            stall = 0;
            continue;
        }
        total += 1;
        stall += 1;
        if total > budget {
            return Err(Error::IterationLimit {
                context: "companion qr".into(),
                residual: h[hi - 1][hi - 2].norm(),
                best: eig,
            });
        }
        let shift = if stall.is_multiple_of(12) {
            // exceptional shift to break symmetric stagnation
            let b = h[hi - 1][hi - 2].norm()
                + if hi >= 3 { h[hi - 2][hi - 3].norm() } else { R::zero() };
            h[hi - 1][hi - 1] + Cplx::new(r::<R>(0.75) * b, r::<R>(0.33) * b)
        } else {
            wilkinson(
                h[hi - 2][hi - 2],
                h[hi - 2][hi - 1],
                h[hi - 1][hi - 2],
                h[hi - 1][hi - 1],
            )
        };
        for k in lo..hi {
            h[k][k] -= shift;
        }
        let mut rots: Vec<(R, Cplx<R>)> = Vec::with_capacity(hi - lo - 1);
        for k in lo..hi - 1 {
            let (c, s) = givens(h[k][k], h[k + 1][k]);
            // left-apply to rows k, k+1 over columns k..hi
            for j in k..hi {
                let x = h[k][j];
                let y = h[k + 1][j];
                h[k][j] = x * c + y * s;
                h[k + 1][j] = y * c - x * s.conj();
            }
            rots.push((c, s));
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let k = lo + idx;
            // right-apply the conjugate transpose to columns k, k+1
            let cc = Cplx::new(c, R::zero());
            for row in h.iter_mut().take((k + 2).min(hi)).skip(lo) {
                let x = row[k];
                let y = row[k + 1];
                row[k] = x * cc + y * s.conj();
                row[k + 1] = y * cc - x * s;
            }
        }
        for k in lo..hi {
            h[k][k] += shift;
        }
    }
    Ok(eig)
}

/// The eigenvalue of `[[a, b], [c, d]]` closer to `d`.
fn wilkinson<R: Real>(a: Cplx<R>, b: Cplx<R>, c: Cplx<R>, d: Cplx<R>) -> Cplx<R> {
    let half = Cplx::new(r::<R>(0.5), R::zero());
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - Cplx::new(r::<R>(4.0), R::zero()) * det).sqrt();
    let e1 = (tr + disc) * half;
    let e2 = (tr - disc) * half;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// Unitary `[[c, s], [-conj(s), c]]` with real `c` sending `(a, b)` to
/// `(r, 0)`.
fn givens<R: Real>(a: Cplx<R>, b: Cplx<R>) -> (R, Cplx<R>) {
    let na = a.norm();
    let nb = b.norm();
    if nb == R::zero() {
        return (R::one(), Cplx::new(R::zero(), R::zero()));
    }
    if na == R::zero() {
        return (R::zero(), b.conj() / nb);
    }
    let t = na.hypot(nb);
    (na / t, (a / na) * b.conj() / t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::matched_distance;

    type C = Cplx<f64>;

    #[test]
    fn quadratic_z2_plus_1() {
        let roots =
            roots_companion(&[C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0)]).unwrap();
        let want = [C::new(0.0, 1.0), C::new(0.0, -1.0)];
        assert!(matched_distance(&roots, &want) < 1e-10);
    }

    #[test]
    fn extreme_magnitude_quadratic() {
        let eps = 1e-6;
        let roots =
            roots_companion(&[C::new(eps, 0.0), C::new(1.0, 0.0), C::new(eps, 0.0)]).unwrap();
        let small = roots.iter().map(|z| (z - C::new(-1e-6, 0.0)).norm()).fold(f64::MAX, f64::min);
        let big = roots.iter().map(|z| (z - C::new(-1e6, 0.0)).norm()).fold(f64::MAX, f64::min);
        assert!(small / 1e-6 < 1e-3);
        assert!(big / 1e6 < 1e-3);
    }

    #[test]
    fn degree_cap_is_enforced() {
        let mut zeta = vec![C::new(0.0, 0.0); 66];
        zeta[0] = C::new(1.0, 0.0);
        zeta[65] = C::new(1.0, 0.0);
        assert!(matches!(roots_companion(&zeta), Err(Error::Capability(_))));
    }

    #[test]
    fn origin_roots_are_deflated_exactly() {
        // z^3 + z^2 = z^2 (z + 1)
        let zeta = [C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(1.0, 0.0)];
        let mut roots = roots_companion(&zeta).unwrap();
        roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((roots[0] - C::new(-1.0, 0.0)).norm() < 1e-12);
        assert_eq!(roots[1], C::new(0.0, 0.0));
        assert_eq!(roots[2], C::new(0.0, 0.0));
    }

    #[test]
    fn known_spectrum_degree_twelve() {
        let targets: Vec<C> = (0..12)
            .map(|k| C::from_polar(0.5 + 0.1 * k as f64, 0.5 * k as f64))
            .collect();
        let coeffs = crate::poly::monic_from_roots(&targets);
        let roots = roots_companion(&coeffs).unwrap();
        assert!(matched_distance(&roots, &targets) < 1e-8);
    }
}
