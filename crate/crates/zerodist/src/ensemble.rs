//! Random coefficient ensembles and the coefficient-level statistics that
//! separate the almost-sure from the in-probability convergence regime.
//!
//! Built-in laws cover three tail classes: light (`gaussian`, `log_light`,
//! `uniform_disk`, `two_point`), an intermediate law with infinite log-moment
//! but `n P(|xi| > e^n) -> 0`, and a heavy law violating both conditions. The
//! heavy tails produce magnitudes far beyond `f64` range, so every sample is
//! carried as `(log |xi|, arg xi)` and only materialized after a common
//! rescaling.

use crate::basis::Basis;
use crate::error::{Error, Result};
use crate::num::{r, Cplx, Real};
use crate::rng::{tag, Stream};

/// Built-in coefficient law names.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistName {
    Gaussian,
    UniformDisk,
    TwoPoint,
    LogLight,
    LogIntermediate,
    LogHeavy,
}

impl DistName {
    pub fn as_str(self) -> &'static str {
        match self {
            DistName::Gaussian => "gaussian",
            DistName::UniformDisk => "uniform_disk",
            DistName::TwoPoint => "two_point",
            DistName::LogLight => "log_light",
            DistName::LogIntermediate => "log_intermediate",
            DistName::LogHeavy => "log_heavy",
        }
    }
}

/// A coefficient law with its closed-form upper tail `T(s) = P(|xi| > e^s)`
/// and the two convergence-regime flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientDistribution<R: Real> {
    name: DistName,
    /// Knee of the `log_*` tails; `T(s) = 1` for `s <= s0`.
    s0: R,
    log_moment_finite: bool,
    in_prob_condition: bool,
}

/// Looks up a built-in law by name. `s0` overrides the tail knee of the
/// `log_intermediate` / `log_heavy` laws and is ignored by the others.
pub fn make_distribution<R: Real>(
    name: &str,
    s0_override: Option<f64>,
) -> Result<CoefficientDistribution<R>, R> {
    let s0 = s0_override.unwrap_or(3.0);
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must be rejected too
    if !(s0 > 1.0) {
        return Err(Error::Invalid(format!("s0 must exceed 1, got {s0}")));
    }
    let s0 = r::<R>(s0);
    let (name, log_moment_finite, in_prob_condition) = match name {
        "gaussian" => (DistName::Gaussian, true, true),
        "uniform_disk" => (DistName::UniformDisk, true, true),
        "two_point" => (DistName::TwoPoint, true, true),
        "log_light" => (DistName::LogLight, true, true),
        "log_intermediate" => (DistName::LogIntermediate, false, true),
        "log_heavy" => (DistName::LogHeavy, false, false),
        other => {
            return Err(Error::Invalid(format!(
                "unknown distribution '{other}' (expected one of gaussian, uniform_disk, \
                 two_point, log_light, log_intermediate, log_heavy)"
            )))
        }
    };
    Ok(CoefficientDistribution {
        name,
        s0,
        log_moment_finite,
        in_prob_condition,
    })
}

impl<R: Real> CoefficientDistribution<R> {
    pub fn name(&self) -> DistName {
        self.name
    }

    /// Whether `E log(1 + |xi|)` is finite (almost-sure regime).
    pub fn log_moment_finite(&self) -> bool {
        self.log_moment_finite
    }

    /// Whether `n P(|xi| > e^n) -> 0` (in-probability regime).
    pub fn in_prob_condition(&self) -> bool {
        self.in_prob_condition
    }

    /// Closed-form upper tail `T(s) = P(|xi| > e^s)`.
    pub fn tail(&self, s: R) -> R {
        let one = R::one();
        match self.name {
            // |xi|^2 is standard exponential.
            DistName::Gaussian | DistName::LogLight => (-(r::<R>(2.0) * s).exp()).exp(),
            DistName::UniformDisk => {
                if s >= R::zero() {
                    R::zero()
                } else {
                    one - (r::<R>(2.0) * s).exp()
                }
            }
            DistName::TwoPoint => {
                if s >= R::zero() {
                    R::zero()
                } else {
                    r(0.5)
                }
            }
            DistName::LogIntermediate => {
                if s <= self.s0 {
                    one
                } else {
                    (self.s0 * self.s0.ln() / (s * s.ln())).min(one)
                }
            }
            DistName::LogHeavy => {
                if s <= self.s0 {
                    one
                } else {
                    self.s0 / s
                }
            }
        }
    }

    /// Draws coefficient `j` from `stream` as `(log |xi_j|, arg xi_j)`.
    ///
    /// Exact zeros (only the `two_point` law produces them) come out as
    /// `log |xi| = -inf`. Each index consumes the two counter words `2j` and
    /// `2j + 1`, so draws are reproducible in any evaluation order.
    pub fn sample_log(&self, stream: &Stream, j: u64) -> (R, R) {
        let u = r::<R>(stream.uniform_open(2 * j));
        let v = stream.uniform_open(2 * j + 1);
        let phase = r::<R>(v) * r::<R>(2.0) * R::PI();
        match self.name {
            DistName::Gaussian | DistName::LogLight => (r::<R>(0.5) * (-u.ln()).ln(), phase),
            DistName::UniformDisk => (r::<R>(0.5) * u.ln(), phase),
            DistName::TwoPoint => {
                if u < r(0.5) {
                    (R::neg_infinity(), R::zero())
                } else {
                    (R::zero(), R::zero())
                }
            }
            DistName::LogIntermediate => (invert_s_log_s(self.s0 * self.s0.ln() / u, self.s0), phase),
            DistName::LogHeavy => (self.s0 / u, phase),
        }
    }
}

/// Solves `x log x = y` for `x >= s0` by Newton iteration (`y >= s0 log s0`).
fn invert_s_log_s<R: Real>(y: R, s0: R) -> R {
    let mut x = (y / y.ln().max(R::one())).max(s0);
    for _ in 0..64 {
        let f = x * x.ln() - y;
        let step = f / (x.ln() + R::one());
        x = (x - step).max(s0);
        if step.abs() <= r::<R>(1e-14) * (R::one() + x) {
            break;
        }
    }
    x
}

/// Above this max log-magnitude the sample is rescaled before materializing,
/// keeping every stored coefficient finite in double precision.
const RESCALE_THRESHOLD: f64 = 600.0;

/// A sampled `G_n = sum xi_j p_j` with its monomial coefficients.
///
/// `xi` and `zeta` hold the raw values times `e^{-scale_log}`; `scale_log`
/// is 0 unless some `log |xi_j|` exceeds the rescale threshold. Roots and
/// zero measures are invariant under that common scalar. The exact draws are
/// kept in `log_xi` so coefficient statistics never see the rescale.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomPolynomial<R: Real> {
    n: usize,
    log_xi: Vec<(R, R)>,
    scale_log: R,
    xi: Vec<Cplx<R>>,
    zeta: Vec<Cplx<R>>,
    d_n: usize,
}

/// Samples `G_n` on `basis` with i.i.d. coefficients from `dist`.
///
/// Deterministic given `seed`; coefficient `j` reads fixed counter positions
/// of the seed's coefficient stream, so results do not depend on evaluation
/// order or worker count.
pub fn sample_g<R: Real>(
    basis: &Basis<R>,
    dist: &CoefficientDistribution<R>,
    n: usize,
    seed: u64,
) -> Result<RandomPolynomial<R>, R> {
    if n > basis.degree_max() {
        return Err(Error::Invalid(format!(
            "degree {n} exceeds basis degree_max {}",
            basis.degree_max()
        )));
    }
    let stream = Stream::new(seed).derive(tag::COEFFICIENTS);
    let log_xi: Vec<(R, R)> = (0..=n).map(|j| dist.sample_log(&stream, j as u64)).collect();
    Ok(assemble(basis, n, log_xi))
}

/// Test-and-diagnostics constructor with explicitly forced coefficients.
pub fn with_coefficients<R: Real>(
    basis: &Basis<R>,
    n: usize,
    xi: &[Cplx<R>],
) -> Result<RandomPolynomial<R>, R> {
    if n > basis.degree_max() || xi.len() != n + 1 {
        return Err(Error::Invalid(format!(
            "need n <= degree_max and exactly n + 1 coefficients, got n = {n}, len = {}",
            xi.len()
        )));
    }
    let log_xi = xi.iter().map(|z| (z.norm().ln(), z.arg())).collect();
    Ok(assemble(basis, n, log_xi))
}

fn assemble<R: Real>(basis: &Basis<R>, n: usize, log_xi: Vec<(R, R)>) -> RandomPolynomial<R> {
    let max_log = log_xi.iter().map(|&(m, _)| m).fold(R::neg_infinity(), R::max);
    let scale_log = if max_log > r(RESCALE_THRESHOLD) { max_log } else { R::zero() };
    let xi: Vec<Cplx<R>> = log_xi
        .iter()
        .map(|&(m, phi)| Cplx::from_polar((m - scale_log).exp(), phi))
        .collect();
    let mut zeta = vec![Cplx::new(R::zero(), R::zero()); n + 1];
    for (j, &x) in xi.iter().enumerate() {
        if x == Cplx::new(R::zero(), R::zero()) {
            continue;
        }
        for (i, &a) in basis.coeff_row(j).iter().enumerate() {
            zeta[i] += x * a;
        }
    }
    // D_n from the exact draws: materialized trailing entries may underflow.
    let d_n = log_xi.iter().rposition(|&(m, _)| m > R::neg_infinity()).unwrap_or(0);
    RandomPolynomial {
        n,
        log_xi,
        scale_log,
        xi,
        zeta,
        d_n,
    }
}

impl<R: Real> RandomPolynomial<R> {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Coefficients in the basis, scaled by `e^{-scale_log}`.
    pub fn xi(&self) -> &[Cplx<R>] {
        &self.xi
    }

    /// Monomial coefficients, same scaling as `xi`.
    pub fn zeta(&self) -> &[Cplx<R>] {
        &self.zeta
    }

    /// Exact `(log |xi_j|, arg xi_j)` pairs, unscaled.
    pub fn log_xi(&self) -> &[(R, R)] {
        &self.log_xi
    }

    pub fn scale_log(&self) -> R {
        self.scale_log
    }

    /// `max { j : xi_j != 0 }`; 0 for the identically-zero sample.
    pub fn d_n(&self) -> usize {
        self.d_n
    }

    /// Recomputes the monomial coefficients from the stored `xi`; tests use
    /// this to pin the triangular accumulation.
    pub fn recompute_zeta(&self, basis: &Basis<R>) -> Vec<Cplx<R>> {
        let mut zeta = vec![Cplx::new(R::zero(), R::zero()); self.n + 1];
        for (j, &x) in self.xi.iter().enumerate() {
            for (i, &a) in basis.coeff_row(j).iter().enumerate() {
                zeta[i] += x * a;
            }
        }
        zeta
    }

    /// `L_n = max_{1 <= i <= n} (1/n) log |xi_i|`, from the exact draws.
    pub fn max_log_stat(&self) -> Result<R, R> {
        max_log_from(self.log_xi.iter().skip(1).map(|&(m, _)| m), self.n)
    }

    /// JSON export of the scaled coefficients as `(re, im)` pairs.
    pub fn xi_to_json(&self) -> String {
        let mut out = format!(
            "{{\"schema_version\":1,\"n\":{},\"scale_log\":{},\"xi\":[",
            self.n, self.scale_log
        );
        for (j, x) in self.xi.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format!("[{},{}]", x.re, x.im));
        }
        out.push_str("]}");
        out
    }
}

fn max_log_from<R: Real>(mags: impl Iterator<Item = R>, n: usize) -> Result<R, R> {
    let best = mags.fold(R::neg_infinity(), R::max);
    if best == R::neg_infinity() {
        return Err(Error::UndefinedStatistic(
            "max_log_stat needs a nonzero coefficient among xi_1..xi_n".into(),
        ));
    }
    Ok(best / R::from_usize(n).unwrap())
}

/// `L_n` from materialized coefficients `xi_0..xi_n` (indices `1..=n` enter).
pub fn max_log_stat<R: Real>(xi: &[Cplx<R>], n: usize) -> Result<R, R> {
    assert!(n >= 1 && xi.len() > n);
    max_log_from(
        xi[1..=n].iter().map(|z| if z.norm() == R::zero() { R::neg_infinity() } else { z.norm().ln() }),
        n,
    )
}

/// Argmax of `|zeta_j|` over the near-leading window, ties toward larger `j`.
///
/// The window is `{floor(n - log10^2 n), .., n}`; returns `(I_n, zeta value)`
/// with `I_n = n - argmax`.
pub fn near_leading_index<R: Real>(zeta: &[Cplx<R>], n: usize) -> Result<(usize, Cplx<R>), R> {
    assert!(n >= 2 && zeta.len() > n);
    let lg = (n as f64).log10();
    let bottom = (n as f64 - lg * lg).floor().max(0.0) as usize;
    let mut arg = None;
    let mut best = R::zero();
    for j in bottom..=n {
        let m = zeta[j].norm();
        if m > R::zero() && m >= best {
            best = m;
            arg = Some(j);
        }
    }
    match arg {
        Some(j) => Ok((n - j, zeta[j])),
        None => Err(Error::UndefinedStatistic(format!(
            "all coefficients in the window {bottom}..={n} are zero"
        ))),
    }
}

/// Index window `[ceil(n/4), floor(n/2)]` scanned by the dominance events.
pub fn dominance_window(n: usize) -> std::ops::RangeInclusive<usize> {
    n.div_ceil(4)..=n / 2
}

/// Event B on one vector of coefficient log-magnitudes: some window index
/// `j` has `|xi_j| >= e^{cn} |xi_i|` for every `i != j`. Scale-invariant,
/// so raw pre-rescale logs and rescaled ones give the same answer.
pub fn dominance_event_b<R: Real>(logs: &[R], n: usize, c: R) -> bool {
    assert!(n >= 4 && logs.len() > n);
    let nf = R::from_usize(n).unwrap();
    // Only the top entry can dominate the rest (checked against the
    // second-largest), except when c n <= 0 widens the field.
    let (mut top, mut top_j, mut second) = (R::neg_infinity(), 0usize, R::neg_infinity());
    for (j, &m) in logs.iter().enumerate().take(n + 1) {
        if m > top {
            second = top;
            top = m;
            top_j = j;
        } else if m > second {
            second = m;
        }
    }
    dominance_window(n).any(|j| {
        let rival = if j == top_j { second } else { top };
        logs[j] >= c * nf + rival
    })
}

/// Frequencies of the two dominance events over `trials` independent samples.
///
/// Event A: `|xi_{n/2}| >= e^{(c+1)n}` while every other `|xi_j| < e^n`.
/// Event B: some `j` in `[n/4, n/2]` has `|xi_j| >= e^{cn} |xi_i|` for all
/// `i != j`. Both are pure coefficient events, evaluated in the log domain;
/// `r_margin` is carried for report metadata only.
pub fn dominance_event_frequency<R: Real>(
    dist: &CoefficientDistribution<R>,
    n: usize,
    c: R,
    _r_margin: R,
    trials: usize,
    seed: u64,
) -> (R, R) {
    assert!(trials >= 1 && n >= 4);
    let half = n / 2;
    let nf = R::from_usize(n).unwrap();
    let mut count_a = 0usize;
    let mut count_b = 0usize;
    for t in 0..trials {
        let stream = Stream::new(seed).derive(t as u64).derive(tag::COEFFICIENTS);
        let logs: Vec<R> = (0..=n).map(|j| dist.sample_log(&stream, j as u64).0).collect();

        let a_hit = logs[half] >= (c + R::one()) * nf
            && logs.iter().enumerate().all(|(j, &m)| j == half || m < nf);
        if a_hit {
            count_a += 1;
        }
        if dominance_event_b(&logs, n, c) {
            count_b += 1;
        }
    }
    let tf = R::from_usize(trials).unwrap();
    (
        R::from_usize(count_a).unwrap() / tf,
        R::from_usize(count_b).unwrap() / tf,
    )
}

/// Counts `n <= n_max` with `(1/n) log |xi_n| > eps` along one sampled path.
pub fn spike_counter<R: Real>(
    dist: &CoefficientDistribution<R>,
    n_max: usize,
    eps: R,
    seed: u64,
) -> usize {
    assert!(eps > R::zero());
    let stream = Stream::new(seed).derive(tag::COEFFICIENTS);
    (1..=n_max)
        .filter(|&n| dist.sample_log(&stream, n as u64).0 > eps * R::from_usize(n).unwrap())
        .count()
}
