//! Root finding for coefficient arrays spanning extreme magnitude ranges,
//! plus the empirical zero measure they induce.
//!
//! [`roots`] is the production path (Aberth–Ehrlich); [`roots_companion`]
//! is an independent low-degree oracle used by cross-checks. Both accept
//! monomial coefficients ordered low to high.

mod aberth;
mod companion;

pub use companion::roots_companion;

use crate::error::{Error, Result};
use crate::num::{ln_norm, Cplx, Real};

/// Solver diagnostics; `residuals` are scale-free backward errors aligned
/// with the returned roots.
#[derive(Debug, Clone)]
pub struct RootDiagnostics<R: Real> {
    pub sweeps: usize,
    /// Natural log of the max coefficient modulus divided out before solving.
    pub rescale_log: R,
    pub origin_roots: usize,
    pub residuals: Vec<R>,
    pub max_residual: R,
}

impl<R: Real> RootDiagnostics<R> {
    pub fn to_json(&self) -> String {
        format!(
            "{{\"schema_version\":1,\"sweeps\":{},\"origin_roots\":{},\"rescale_log\":{},\"max_residual\":{:e}}}",
            self.sweeps, self.origin_roots, self.rescale_log, self.max_residual
        )
    }
}

#[derive(Debug, Clone)]
pub struct RootsResult<R: Real> {
    pub roots: Vec<Cplx<R>>,
    pub diagnostics: RootDiagnostics<R>,
}

/// All zeros of the polynomial with coefficients `zeta` (low to high).
///
/// Trailing zero coefficients are trimmed (the degree is the last nonzero
/// index), zeros at the origin are deflated exactly, and the remaining core
/// is rescaled by its max modulus before the Aberth iteration; the rescale
/// exponent is reported in the diagnostics. A nonzero constant has no roots
/// (valid empty result); the zero polynomial is a typed error, as is any
/// non-finite coefficient.
pub fn roots<R: Real>(zeta: &[Cplx<R>]) -> Result<RootsResult<R>, R> {
    let czero = Cplx::new(R::zero(), R::zero());
    if zeta.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::Invalid("coefficients must be finite".into()));
    }
    let deg = zeta
        .iter()
        .rposition(|c| *c != czero)
        .ok_or_else(|| Error::Invalid("all coefficients are zero".into()))?;
    let low = zeta.iter().position(|c| *c != czero).unwrap();
    let mut out = vec![czero; low];
    let mut residuals = vec![R::zero(); low];
    if deg == low {
        return Ok(RootsResult {
            roots: out,
            diagnostics: RootDiagnostics {
                sweeps: 0,
                rescale_log: R::zero(),
                origin_roots: low,
                residuals,
                max_residual: R::zero(),
            },
        });
    }
    let core = &zeta[low..=deg];
    let max_mod = core.iter().map(|c| c.norm()).fold(R::zero(), R::max);
    let scaled: Vec<Cplx<R>> = core.iter().map(|c| c / max_mod).collect();
    let solved = match aberth::aberth(&scaled) {
        Ok(s) => s,
        Err(Error::RootsUnconverged { sweeps, max_correction, mut best }) => {
            let mut all = out;
            all.append(&mut best);
            return Err(Error::RootsUnconverged { sweeps, max_correction, best: all });
        }
        Err(e) => return Err(e),
    };
    let log_abs: Vec<R> = scaled.iter().map(|c| ln_norm(*c)).collect();
    let mut max_residual = R::zero();
    for z in &solved.roots {
        let be = aberth::backward_error(&scaled, &log_abs, *z);
        max_residual = max_residual.max(be);
        residuals.push(be);
    }
    out.extend(solved.roots);
    Ok(RootsResult {
        roots: out,
        diagnostics: RootDiagnostics {
            sweeps: solved.sweeps,
            rescale_log: max_mod.ln(),
            origin_roots: low,
            residuals,
            max_residual,
        },
    })
}

/// Normalized zero counting measure: each point carries weight `1/count`.
///
/// `points.len() < count` is allowed only via
/// [`zero_measure_with_deficit`]; the missing mass stands for zeros pushed
/// beyond representable range, which every radius statistic counts as
/// escaped.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure<R: Real> {
    points: Vec<Cplx<R>>,
    count: usize,
}

impl<R: Real> EmpiricalMeasure<R> {
    pub fn points(&self) -> &[Cplx<R>] {
        &self.points
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Mass unaccounted for by `points`, as a fraction.
    pub fn deficit(&self) -> R {
        if self.count == 0 {
            return R::zero();
        }
        R::from_usize(self.count - self.points.len()).unwrap()
            / R::from_usize(self.count).unwrap()
    }
}

/// Wraps `d_n` roots as a probability measure; size mismatch is an error.
pub fn zero_measure<R: Real>(roots: &[Cplx<R>], d_n: usize) -> Result<EmpiricalMeasure<R>, R> {
    if roots.len() != d_n {
        return Err(Error::Invalid(format!(
            "zero measure needs exactly {d_n} roots, got {}",
            roots.len()
        )));
    }
    Ok(EmpiricalMeasure { points: roots.to_vec(), count: d_n })
}

/// As [`zero_measure`], but tolerates fewer roots than the normalizer for
/// samples whose top coefficients underflowed during materialization.
pub fn zero_measure_with_deficit<R: Real>(
    roots: &[Cplx<R>],
    d_n: usize,
) -> Result<EmpiricalMeasure<R>, R> {
    if roots.len() > d_n {
        return Err(Error::Invalid(format!(
            "normalizer {d_n} smaller than root count {}",
            roots.len()
        )));
    }
    Ok(EmpiricalMeasure { points: roots.to_vec(), count: d_n })
}

/// `re,im` CSV export, one root per line.
pub fn roots_to_csv<R: Real>(roots: &[Cplx<R>]) -> String {
    let mut out = String::from("re,im\n");
    for z in roots {
        out.push_str(&format!("{:e},{:e}\n", z.re, z.im));
    }
    out
}

/// Vieta consistency of a root multiset against its coefficients, carried
/// out in log-magnitude/argument form so extreme products survive.
#[derive(Debug, Clone, PartialEq)]
pub struct VietaReport<R: Real> {
    pub degree: usize,
    /// `|sum roots - (-zeta_{D-1}/zeta_D)|` relative to the summand scale.
    pub sum_rel_error: R,
    /// `| log|prod roots| - (log|zeta_0| - log|zeta_D|) |`.
    pub product_log_error: R,
    /// Angular distance between `arg prod roots` and `arg ((-1)^D zeta_0/zeta_D)`.
    pub product_arg_error: R,
    pub flagged: bool,
}

const VIETA_TOL: f64 = 1e-6;

pub fn vieta_check<R: Real>(zeta: &[Cplx<R>], roots: &[Cplx<R>]) -> VietaReport<R> {
    let czero = Cplx::new(R::zero(), R::zero());
    let deg = zeta.iter().rposition(|c| *c != czero).unwrap_or(0);
    debug_assert_eq!(roots.len(), deg, "roots must come from a solver run on zeta");
    if deg == 0 {
        return VietaReport {
            degree: 0,
            sum_rel_error: R::zero(),
            product_log_error: R::zero(),
            product_arg_error: R::zero(),
            flagged: false,
        };
    }
    let logs: Vec<R> = roots.iter().map(|z| ln_norm(*z)).collect();
    let args: Vec<R> = roots.iter().map(|z| z.arg()).collect();

    // sum check: factor out the largest root magnitude
    let m = logs.iter().cloned().fold(R::neg_infinity(), R::max);
    let lt = ln_norm(zeta[deg - 1]) - ln_norm(zeta[deg]);
    let at = (-zeta[deg - 1] / zeta[deg]).arg();
    let scale = m.max(lt);
    let sum_rel_error = if scale == R::neg_infinity() {
        R::zero()
    } else {
        let mut s = czero;
        let mut gross = R::zero();
        for (&l, &a) in logs.iter().zip(&args) {
            let w = (l - scale).exp();
            s += Cplx::from_polar(w, a);
            gross += w;
        }
        let target = if lt == R::neg_infinity() {
            czero
        } else {
            Cplx::from_polar((lt - scale).exp(), at)
        };
        let denom = gross.max(target.norm());
        (s - target).norm() / denom
    };

    // product check on (log-magnitude, argument)
    let log_prod: R = logs.iter().cloned().sum();
    let log_t = ln_norm(zeta[0]) - ln_norm(zeta[deg]);
    let (product_log_error, product_arg_error) = if log_prod == R::neg_infinity()
        && log_t == R::neg_infinity()
    {
        (R::zero(), R::zero())
    } else if log_prod == R::neg_infinity() || log_t == R::neg_infinity() {
        (R::infinity(), R::infinity())
    } else {
        let arg_prod: R = args.iter().cloned().sum();
        let arg_t = (zeta[0] / zeta[deg]).arg() + R::from_usize(deg).unwrap() * R::PI();
        ((log_prod - log_t).abs(), wrap_angle(arg_prod - arg_t).abs())
    };

    let tol = crate::num::r::<R>(VIETA_TOL);
    VietaReport {
        degree: deg,
        sum_rel_error,
        product_log_error,
        product_arg_error,
        flagged: sum_rel_error > tol || product_log_error > tol || product_arg_error > tol,
    }
}

fn wrap_angle<R: Real>(x: R) -> R {
    let tau = r2pi::<R>();
    let k = (x / tau).round();
    x - k * tau
}

fn r2pi<R: Real>() -> R {
    R::PI() + R::PI()
}

/// Largest distance in a greedy closest-pair matching of two equal-size
/// multisets. Pairs the globally nearest remaining points first; adequate
/// for the separated configurations the cross-checks exercise.
pub fn matched_distance<R: Real>(a: &[Cplx<R>], b: &[Cplx<R>]) -> R {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    let mut pairs: Vec<(R, usize, usize)> = Vec::with_capacity(n * n);
    for (i, za) in a.iter().enumerate() {
        for (j, zb) in b.iter().enumerate() {
            pairs.push(((za - zb).norm(), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut used_a = vec![false; n];
    let mut used_b = vec![false; n];
    let mut worst = R::zero();
    let mut left = n;
    for (d, i, j) in pairs {
        if used_a[i] || used_b[j] {
            continue;
        }
        used_a[i] = true;
        used_b[j] = true;
        worst = worst.max(d);
        left -= 1;
        if left == 0 {
            break;
        }
    }
    worst
}
