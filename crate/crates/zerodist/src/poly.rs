//! Polynomial evaluation kernels.
//!
//! Coefficient slices are always ordered low to high: `c[k]` multiplies
//! `z^k`. Three evaluators cover the regimes the crate meets:
//!
//! * [`horner`] / [`horner_with_derivative`]: the plain scheme;
//! * [`compensated_horner`]: carries a Kahan-style correction for the
//!   additions, used by residual checks;
//! * [`scaled_horner`]: tracks a base-2 exponent separately so values far
//!   outside the `f64` range (heavy-tailed coefficients, huge zeros) never
//!   overflow.

use crate::num::{r, Cplx, Real};

pub fn horner<R: Real>(coeffs: &[Cplx<R>], z: Cplx<R>) -> Cplx<R> {
    let mut acc = Cplx::new(R::zero(), R::zero());
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// Returns `(p(z), p'(z))`.
pub fn horner_with_derivative<R: Real>(coeffs: &[Cplx<R>], z: Cplx<R>) -> (Cplx<R>, Cplx<R>) {
    let zero = Cplx::new(R::zero(), R::zero());
    let (mut p, mut d) = (zero, zero);
    for &c in coeffs.iter().rev() {
        d = d * z + p;
        p = p * z + c;
    }
    (p, d)
}

/// Horner with a compensation accumulator for the addition errors. The
/// product errors stay uncompensated, which keeps the scheme cheap while
/// still tightening the bound enough for residual tests.
pub fn compensated_horner<R: Real>(coeffs: &[Cplx<R>], z: Cplx<R>) -> Cplx<R> {
    let zero = Cplx::new(R::zero(), R::zero());
    let (mut s, mut comp) = (zero, zero);
    for &c in coeffs.iter().rev() {
        let t = s * z;
        let sum = t + c;
        // TwoSum error term, componentwise.
        let err_re = (t.re - (sum.re - c.re)) + (c.re - (sum.re - t.re));
        let err_im = (t.im - (sum.im - c.im)) + (c.im - (sum.im - t.im));
        comp = comp * z + Cplx::new(err_re, err_im);
        s = sum;
    }
    s + comp
}

/// A complex value `mantissa * 2^exp2` with `|mantissa|` kept near 1.
#[derive(Debug, Clone, Copy)]
pub struct Scaled<R: Real> {
    pub mantissa: Cplx<R>,
    pub exp2: i64,
}

impl<R: Real> Scaled<R> {
    pub fn zero() -> Self {
        Scaled { mantissa: Cplx::new(R::zero(), R::zero()), exp2: 0 }
    }

    pub fn from_complex(z: Cplx<R>) -> Self {
        Scaled { mantissa: z, exp2: 0 }.renormalized()
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.norm_sqr() == R::zero()
    }

    /// Natural log of the modulus; `-inf` for zero.
    pub fn ln_norm(&self) -> R {
        if self.is_zero() {
            return R::neg_infinity();
        }
        self.mantissa.norm().ln() + R::from_i64(self.exp2).unwrap() * r(std::f64::consts::LN_2)
    }

    /// Collapses to a plain complex number; may overflow to infinity.
    pub fn to_complex(&self) -> Cplx<R> {
        self.mantissa * exp2_c(self.exp2)
    }

    fn renormalized(mut self) -> Self {
        let n = self.mantissa.norm();
        if n == R::zero() || !n.is_finite() {
            return self;
        }
        let k = n.log2().floor().to_i64().unwrap_or(0);
        if k.abs() > 64 {
            // Two half-steps: 2^{-k} alone overflows when the mantissa is
            // subnormal (k near -1074).
            let h = k / 2;
            self.mantissa = self.mantissa * exp2_c(-h) * exp2_c(h - k);
            self.exp2 += k;
        }
        self
    }

    fn mul(self, m: Cplx<R>, e: i64) -> Self {
        Scaled { mantissa: self.mantissa * m, exp2: self.exp2 + e }.renormalized()
    }

    fn add(self, other: Self) -> Self {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let shift = other.exp2 - self.exp2;
        // Beyond 600 bits the smaller addend is below resolution.
        if shift > 600 {
            return other;
        }
        if shift < -600 {
            return self;
        }
        Scaled {
            mantissa: self.mantissa + other.mantissa * exp2_c(shift),
            exp2: self.exp2,
        }
        .renormalized()
    }
}

fn exp2_c<R: Real>(k: i64) -> Cplx<R> {
    Cplx::new(r::<R>(2.0).powi(k as i32), R::zero())
}

/// Overflow-free Horner: evaluates `(p, p')` as scaled values. Coefficients
/// themselves must be finite, but `|z|` and `|p(z)|` may exceed the scalar
/// range by hundreds of orders of magnitude.
pub fn scaled_horner<R: Real>(coeffs: &[Cplx<R>], z: Cplx<R>) -> (Scaled<R>, Scaled<R>) {
    let zs = Scaled::from_complex(z);
    let (zm, ze) = (zs.mantissa, zs.exp2);
    let mut p = Scaled::zero();
    let mut d = Scaled::zero();
    for &c in coeffs.iter().rev() {
        d = d.mul(zm, ze).add(p);
        p = p.mul(zm, ze).add(Scaled::from_complex(c));
    }
    (p, d)
}

/// `log(sum exp(x_i))`, stable against overflow; `-inf` on an empty slice.
pub fn log_sum_exp<R: Real>(xs: &[R]) -> R {
    let m = xs.iter().cloned().fold(R::neg_infinity(), R::max);
    if !m.is_finite() {
        return m;
    }
    let s: R = xs.iter().map(|&x| (x - m).exp()).sum();
    m + s.ln()
}

/// `log sum_k exp(log_abs[k] + k*t)`: the log of `sum |c_k| e^{kt}`, used
/// for residual thresholds with `t = log max(1, |z|)`.
pub fn log_abs_poly_bound<R: Real>(log_abs: &[R], t: R) -> R {
    let terms: Vec<R> = log_abs
        .iter()
        .enumerate()
        .map(|(k, &la)| la + R::from_usize(k).unwrap() * t)
        .collect();
    log_sum_exp(&terms)
}

/// Coefficients of the derivative.
pub fn derivative<R: Real>(coeffs: &[Cplx<R>]) -> Vec<Cplx<R>> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * Cplx::new(R::from_usize(k).unwrap(), R::zero()))
        .collect()
}

/// Monic coefficients of `prod (z - root_i)`, low to high.
pub fn monic_from_roots<R: Real>(roots: &[Cplx<R>]) -> Vec<Cplx<R>> {
    let zero = Cplx::new(R::zero(), R::zero());
    let mut c = vec![zero; roots.len() + 1];
    c[0] = Cplx::new(R::one(), R::zero());
    for (i, &root) in roots.iter().enumerate() {
        // Multiply by (z - root): new[k] = old[k-1] - root*old[k].
        for k in (0..=i + 1).rev() {
            let prev = if k > 0 { c[k - 1] } else { zero };
            c[k] = prev - root * c[k];
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    type C = Cplx<f64>;

    #[test]
    fn horner_matches_power_sum() {
        let coeffs: Vec<C> =
            [3.0, -1.0, 0.5, 2.0, -0.25].iter().map(|&x| C::new(x, 0.1 * x)).collect();
        let z = C::new(0.7, -1.3);
        let direct: C =
            coeffs.iter().enumerate().map(|(k, &c)| c * z.powu(k as u32)).sum();
        assert!((horner(&coeffs, z) - direct).norm() < 1e-13);
        let (p, d) = horner_with_derivative(&coeffs, z);
        assert!((p - direct).norm() < 1e-13);
        let dd: C = coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * C::new(k as f64, 0.0) * z.powu(k as u32 - 1))
            .sum();
        assert!((d - dd).norm() < 1e-13);
    }

    #[test]
    fn compensated_agrees_and_is_exact_on_benign_input() {
        let coeffs: Vec<C> = (0..30).map(|k| C::new(1.0 / (k as f64 + 1.0), 0.0)).collect();
        let z = C::new(0.99, 0.01);
        let a = horner(&coeffs, z);
        let b = compensated_horner(&coeffs, z);
        assert!((a - b).norm() <= 1e-13 * a.norm());
    }

    #[test]
    fn scaled_horner_matches_plain_in_range() {
        let coeffs: Vec<C> = (0..12).map(|k| C::new((k as f64).sin() + 1.5, 0.3)).collect();
        for z in [C::new(2.0, 1.0), C::new(-0.5, 0.25), C::new(0.0, 0.0)] {
            let plain = horner(&coeffs, z);
            let (p, d) = scaled_horner(&coeffs, z);
            assert!((p.to_complex() - plain).norm() <= 1e-12 * (1.0 + plain.norm()));
            let (_, dplain) = horner_with_derivative(&coeffs, z);
            assert!((d.to_complex() - dplain).norm() <= 1e-12 * (1.0 + dplain.norm()));
        }
    }

    #[test]
    fn scaled_horner_survives_huge_arguments() {
        // p(z) = z^5 + 1 at |z| = 1e200: |p| = 1e1000, ln = 1000 ln 10.
        let mut coeffs = vec![C::new(0.0, 0.0); 6];
        coeffs[0] = C::new(1.0, 0.0);
        coeffs[5] = C::new(1.0, 0.0);
        let (p, d) = scaled_horner(&coeffs, C::new(1e200, 0.0));
        assert_relative_eq!(p.ln_norm(), 1000.0 * 10f64.ln(), max_relative = 1e-12);
        assert_relative_eq!(d.ln_norm(), (800.0 * 10f64.ln()) + 5f64.ln(), max_relative = 1e-12);
    }

    #[test]
    fn log_sum_exp_handles_spread_and_empty() {
        assert_eq!(log_sum_exp::<f64>(&[]), f64::NEG_INFINITY);
        assert_relative_eq!(log_sum_exp(&[0.0, 0.0]), 2f64.ln(), epsilon = 1e-14);
        assert_relative_eq!(log_sum_exp(&[1000.0, 0.0]), 1000.0, epsilon = 1e-12);
        let b = log_abs_poly_bound(&[0.0, 0.0, 0.0], 2.0);
        assert_relative_eq!(b, (1.0f64 + 2.0f64.exp() + 4.0f64.exp()).ln(), epsilon = 1e-12);
    }

    #[test]
    fn derivative_coefficients() {
        let coeffs: Vec<C> = [1.0, 2.0, 3.0].iter().map(|&x| C::new(x, 0.0)).collect();
        let d = derivative(&coeffs);
        assert_eq!(d.len(), 2);
        assert_eq!(d[0], C::new(2.0, 0.0));
        assert_eq!(d[1], C::new(6.0, 0.0));
    }

    #[test]
    fn monic_from_roots_vanishes_at_roots() {
        let roots = [C::new(1.0, 0.0), C::new(-2.0, 0.5), C::new(0.0, -1.0)];
        let coeffs = monic_from_roots(&roots);
        assert_eq!(coeffs.len(), 4);
        assert_eq!(coeffs[3], C::new(1.0, 0.0));
        for root in roots {
            assert!(horner(&coeffs, root).norm() < 1e-12);
        }
    }
}
