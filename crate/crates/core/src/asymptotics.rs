//! Closed-form `q -> 1` approximants for `Gamma_q` and tools for checking
//! their error terms against exact evaluations.
//!
//! Two regimes are covered. In the first, `q = e^{-2 pi n^{-a}}` and the
//! argument `1/2 -+ (n + n^a u)` runs off to infinity together with `q -> 1`;
//! the relative error decays like `e^{-2 pi n^a}`. In the second the argument
//! `1/2 +- x` is fixed and the relative error is `O((1-q) log^2(1-q))`.
//!
//! Magnitudes in the first regime reach `e^{pi n^{2-a}}`, well inside the
//! exponent range of [`Float`], but exact values are still compared in
//! log space.

use std::fmt;

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::precision::PrecisionSpec;
use crate::qgamma::{gamma_ref, ln_gamma_q_real, GammaRef};
use crate::qseries::SignedLog;
use crate::xcomplex::{XComplex, XReal};
use crate::QNome;

/// Below this `|cos pi(n^a u + n)|` the left approximant is a near-zero and
/// relative errors say nothing.
pub const COSINE_GUARD: f64 = 1e-3;

/// Smallest spread of `err_scale`, in decades, that [`fit_bigo_constant`]
/// accepts.
pub const MIN_SPAN_DECADES: f64 = 1.5;

/// Minimum least-squares slope of `ln(observed)` against `ln(err_scale)`.
pub const MIN_BIGO_SLOPE: f64 = 0.9;

fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// `q = e^{-2 pi n^{-a}}` with argument offset `n + n^a u`.
#[derive(Clone, Debug, PartialEq)]
pub struct Regime23 {
    pub a_exp: f64,
    pub n: u64,
    pub u: f64,
}

impl Regime23 {
    pub fn new(a_exp: f64, n: u64, u: f64) -> Result<Self> {
        if !(a_exp > 0.0 && a_exp < 0.5) {
            return Err(Error::Domain(format!("a_exp must lie in (0, 1/2), got {a_exp}")));
        }
        if n == 0 {
            return Err(Error::Domain("n must be positive".into()));
        }
        if !(u >= 0.0 && u.is_finite()) {
            return Err(Error::Domain(format!("u must be finite and non-negative, got {u}")));
        }
        Ok(Self { a_exp, n, u })
    }

    /// `n^a`
    pub fn n_pow(&self, prec: u32) -> Float {
        let n = Float::with_val(prec, self.n);
        n.pow(&Float::with_val(prec, self.a_exp))
    }

    /// `w = n + n^a u`
    pub fn offset(&self, prec: u32) -> Float {
        Float::with_val(prec, self.n_pow(prec) * self.u) + self.n
    }

    pub fn nome(&self, prec: u32) -> Result<QNome> {
        let tau = Float::with_val(prec, self.n_pow(prec).recip_ref());
        QNome::from_tau(&tau)
    }

    /// `1/2 - w`
    pub fn left_argument(&self, prec: u32) -> Float {
        0.5f64 - self.offset(prec)
    }

    /// `1/2 + w`
    pub fn right_argument(&self, prec: u32) -> Float {
        self.offset(prec) + 0.5f64
    }

    /// `e^{-2 pi n^a}`
    pub fn err_scale(&self, prec: u32) -> Float {
        (-(self.n_pow(prec) * pi(prec)) * 2u32).exp()
    }
}

/// Fixed offset `x` with `q` close to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Regime24 {
    x: f64,
    q: QNome,
}

impl Regime24 {
    pub fn new(x: f64, q: QNome) -> Result<Self> {
        if !(x > -0.5 && x.is_finite()) {
            return Err(Error::Domain(format!("x must exceed -1/2, got {x}")));
        }
        Ok(Self { x, q })
    }

    /// `q = e^{-2 pi tau}`
    pub fn from_tau(x: f64, tau: &Float) -> Result<Self> {
        Self::new(x, QNome::from_tau(tau)?)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn q(&self) -> &QNome {
        &self.q
    }

    pub fn tau(&self) -> Float {
        self.q.tau()
    }

    /// `q > 1 - exp(-2^{2x+1})`, the range where the error constant is
    /// uniform in `x`.
    pub fn is_uniform(&self) -> bool {
        let prec = self.q.prec();
        let ln_eps = Float::with_val(prec, self.q.one_minus_q().ln_ref());
        let limit = -(2f64.powf(2.0 * self.x + 1.0));
        ln_eps < limit
    }

    /// `(1-q) ln^2(1-q)`
    pub fn err_scale(&self) -> Float {
        let prec = self.q.prec();
        let eps = self.q.one_minus_q();
        let l = Float::with_val(prec, eps.ln_ref());
        Float::with_val(prec, l.square() * eps)
    }

    fn require_uniform(&self) -> Result<()> {
        if self.is_uniform() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "q = 1 - {:.3e} does not satisfy q > 1 - exp(-2^(2x+1)) at x = {}",
                self.q.one_minus_q().to_f64(),
                self.x
            )))
        }
    }
}

/// A closed-form main term and the size of its modeled error.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymEstimate {
    pub value: XReal,
    pub err_scale: XReal,
    /// Filled in after a fit over many regime points.
    pub fitted_c: Option<f64>,
}

impl AsymEstimate {
    fn new(value: Float, err_scale: Float) -> Self {
        Self { value, err_scale, fitted_c: None }
    }

    pub fn with_fit(mut self, c: f64) -> Self {
        self.fitted_c = Some(c);
        self
    }

    /// `|value / exact - 1|` for an exact value given as `sign * e^{ln_abs}`.
    pub fn relative_error(&self, exact: &SignedLog) -> Float {
        relative_error_log(&self.value, exact)
    }
}

/// `|approx / exact - 1|` with the exact value in log form.
pub fn relative_error_log(approx: &Float, exact: &SignedLog) -> Float {
    let prec = approx.prec().max(exact.ln_abs.prec());
    if exact.sign == 0 {
        return Float::with_val(prec, f64::INFINITY);
    }
    let ln_approx = Float::with_val(prec, approx.abs_ref()).ln();
    let ratio = (ln_approx - &exact.ln_abs).exp();
    let same = approx.is_sign_negative() == (exact.sign < 0);
    let ratio = if same { ratio } else { -ratio };
    (ratio - 1u32).abs()
}

/// `ln(1 - e^{-2 pi / n^a})`
fn ln_one_minus_q(na: &Float, prec: u32) -> Float {
    let e = Float::with_val(prec, -(pi(prec) * 2u32) / na).exp();
    Float::with_val(prec, -e).ln_1p()
}

/// Main term of `1 / Gamma_q(1/2 - n - n^a u)`:
/// `2 e^{pi n^{-a} w^2} cos(pi w) / (sqrt(n^a) e^{pi n^a/12 + pi n^{-a}/6} (1-q)^{w+1/2})`
/// with `w = n + n^a u`.
pub fn thm23_reciprocal_left(regime: &Regime23, prec: u32) -> Result<AsymEstimate> {
    let p = prec + 32;
    let na = regime.n_pow(p);
    let w = regime.offset(p);
    let c = Float::with_val(p, &w * pi(p)).cos();
    if Float::with_val(64, c.abs_ref()) < COSINE_GUARD {
        return Err(Error::Degenerate(format!(
            "|cos pi(n^a u + n)| = {:.2e} at n = {}, u = {}",
            c.to_f64().abs(),
            regime.n,
            regime.u
        )));
    }
    let pi_p = pi(p);
    let ln_num = Float::with_val(p, 2u32).ln()
        + Float::with_val(p, w.square_ref()) * &pi_p / &na
        + Float::with_val(p, c.abs_ref()).ln();
    let ln_den = Float::with_val(p, na.ln_ref()) / 2u32
        + Float::with_val(p, &na * &pi_p) / 12u32
        + Float::with_val(p, &pi_p / &na) / 6u32
        + Float::with_val(p, &w + 0.5f64) * ln_one_minus_q(&na, p);
    let mut value = (ln_num - ln_den).exp();
    if c.is_sign_negative() {
        value = -value;
    }
    Ok(AsymEstimate::new(Float::with_val(prec, value), Float::with_val(prec, regime.err_scale(p))))
}

/// Main term of `1 / Gamma_q(1/2 + n + n^a u)`:
/// `e^{pi n^a/12 - pi n^{-a}/12} / (sqrt(n^a) (1-q)^{1/2-w})`.
pub fn thm23_reciprocal_right(regime: &Regime23, prec: u32) -> AsymEstimate {
    let p = prec + 32;
    let na = regime.n_pow(p);
    let w = regime.offset(p);
    let pi_p = pi(p);
    let ln_value = Float::with_val(p, &na * &pi_p) / 12u32
        - Float::with_val(p, &pi_p / &na) / 12u32
        - Float::with_val(p, na.ln_ref()) / 2u32
        - Float::with_val(p, 0.5f64 - &w) * ln_one_minus_q(&na, p);
    AsymEstimate::new(Float::with_val(prec, ln_value.exp()), Float::with_val(prec, regime.err_scale(p)))
}

/// `ln |1/Gamma_q(z)|` and its sign for real `z`.
pub fn reciprocal_gamma_q_log(z: &Float, q: &QNome, spec: &PrecisionSpec) -> Result<SignedLog> {
    let g = ln_gamma_q_real(z, q, spec)?;
    Ok(SignedLog { ln_abs: -g.ln_abs, sign: g.sign })
}

/// Exact `1/Gamma_q` at the left argument of `regime`, in log form.
pub fn thm23_exact_left(regime: &Regime23, spec: &PrecisionSpec) -> Result<SignedLog> {
    let p = spec.work_bits() + 32;
    reciprocal_gamma_q_log(&regime.left_argument(p), &regime.nome(p)?, spec)
}

/// Exact `1/Gamma_q` at the right argument of `regime`, in log form.
pub fn thm23_exact_right(regime: &Regime23, spec: &PrecisionSpec) -> Result<SignedLog> {
    let p = spec.work_bits() + 32;
    reciprocal_gamma_q_log(&regime.right_argument(p), &regime.nome(p)?, spec)
}

/// `Gamma(x + 1/2)` as the approximant of `Gamma_q(x + 1/2)`.
pub fn thm24_gamma_half_plus(regime: &Regime24, spec: &PrecisionSpec) -> Result<AsymEstimate> {
    regime.require_uniform()?;
    let p = spec.work_bits();
    let z = XComplex::from_real(Float::with_val(p, regime.x) + 0.5f64);
    let g = gamma_ref(&GammaRef::new(z)?, spec)?;
    Ok(AsymEstimate::new(g.value.re, regime.err_scale()))
}

/// `1/Gamma(1/2 - x)` as the approximant of `1/Gamma_q(1/2 - x)`.
pub fn thm24_gamma_half_minus(regime: &Regime24, spec: &PrecisionSpec) -> Result<AsymEstimate> {
    regime.require_uniform()?;
    let half_minus = 0.5 - regime.x;
    if half_minus <= 0.0 && half_minus.fract() == 0.0 {
        return Err(Error::Domain(format!("1/Gamma(1/2 - x) vanishes at x = {}", regime.x)));
    }
    let p = spec.work_bits();
    let z = XComplex::from_real(0.5f64 - Float::with_val(p, regime.x));
    let g = gamma_ref(&GammaRef::new(z)?, spec)?;
    Ok(AsymEstimate::new(Float::with_val(p, g.value.re.recip_ref()), regime.err_scale()))
}

/// Outcome of an empirical check of an error term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Verified,
    Inconclusive,
    Failed,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Verified => "VERIFIED",
            Verdict::Inconclusive => "INCONCLUSIVE",
            Verdict::Failed => "FAILED",
        })
    }
}

/// Fit of observed errors against an `O(err_scale)` model.
#[derive(Clone, Debug, PartialEq)]
pub struct BigOFit {
    /// `max observed / err_scale`
    pub fitted_c: f64,
    /// Least-squares slope of `ln observed` on `ln err_scale`; `None` when
    /// fewer than two observations are nonzero.
    pub slope: Option<f64>,
    pub verdict: Verdict,
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Fits `observed <= C err_scale` over `(err_scale, observed)` points.
///
/// The claim is `VERIFIED` when the log-log slope is at least 0.9 and the
/// ratio `observed / err_scale` shows no growth as `err_scale` shrinks: it is
/// `INCONCLUSIVE` when the ratio increases at every step or ends more than
/// twice where it started, and `FAILED` when the slope is too shallow.
pub fn fit_bigo_constant(points: &[(f64, f64)]) -> Result<BigOFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!("{} points, need at least 3", points.len())));
    }
    if points.iter().any(|&(s, o)| !(s > 0.0 && s.is_finite()) || !(o >= 0.0 && o.is_finite())) {
        return Err(Error::InsufficientData("err_scale must be positive and errors finite".into()));
    }
    let (lo, hi) = points.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &(s, _)| (lo.min(s), hi.max(s)));
    let span = (hi / lo).log10();
    if span < MIN_SPAN_DECADES {
        return Err(Error::InsufficientData(format!(
            "err_scale spans {span:.2} decades, need {MIN_SPAN_DECADES}"
        )));
    }

    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
    let ratios: Vec<f64> = sorted.iter().map(|&(s, o)| o / s).collect();
    let fitted_c = ratios.iter().copied().fold(0.0, f64::max);

    let positive: Vec<(f64, f64)> = sorted.iter().filter(|p| p.1 > 0.0).map(|&(s, o)| (s.ln(), o.ln())).collect();
    if positive.len() < 2 {
        return Ok(BigOFit { fitted_c, slope: None, verdict: Verdict::Verified });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = positive.into_iter().unzip();
    let (slope, _) = least_squares(&xs, &ys);

    let growing = ratios.windows(2).all(|w| w[1] > w[0]);
    let drift = ratios[ratios.len() - 1] > 2.0 * ratios[0];
    let verdict = if slope < MIN_BIGO_SLOPE {
        Verdict::Failed
    } else if growing || drift {
        Verdict::Inconclusive
    } else {
        Verdict::Verified
    };
    Ok(BigOFit { fitted_c, slope: Some(slope), verdict })
}

/// Fit of `ln(relative error)` against `n^a` for an `O(e^{-2 pi n^a})` claim.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub verdict: Verdict,
}

/// Relative tolerance on the decay rate `-2 pi` for the `q -> 1` argument
/// regime.
pub const DECAY_SLOPE_TOLERANCE: f64 = 0.1;

/// Least-squares fit over `(s, relative error)` points; `VERIFIED` when the
/// slope lies within `tolerance` (relative) of `-2 pi`.
pub fn fit_exponential_decay(points: &[(f64, f64)], tolerance: f64) -> Result<DecayFit> {
    let usable: Vec<(f64, f64)> = points.iter().filter(|p| p.1 > 0.0 && p.1.is_finite()).copied().collect();
    if usable.len() < 2 {
        return Err(Error::InsufficientData(format!("{} usable points, need 2", usable.len())));
    }
    let xs: Vec<f64> = usable.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = usable.iter().map(|p| p.1.ln()).collect();
    let (slope, intercept) = least_squares(&xs, &ys);
    let target = -2.0 * std::f64::consts::PI;
    let verdict = if ((slope - target) / target).abs() <= tolerance {
        Verdict::Verified
    } else {
        Verdict::Failed
    };
    Ok(DecayFit { slope, intercept, verdict })
}
