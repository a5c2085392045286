//! The q-Gamma function `Gamma_q(z) = (q;q)_inf / (q^z;q)_inf (1-q)^{1-z}`,
//! its half-argument series and reflection forms, the classical Gamma
//! function used as the `q -> 1` reference, and the q-analogue of the Gamma
//! integral evaluated by quadrature.
//!
//! Values of `Gamma_q` range over hundreds of orders of magnitude in the
//! regimes of interest, so the products here run to relative accuracy and
//! bounds are reported as `|value| * relative error`.

use std::sync::OnceLock;

use rug::float::{Constant, Round};
use rug::ops::AssignRound;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::precision::{log2_abs, ErrorBound, PrecisionSpec, TruncatedValue, BOUND_BITS};
use crate::qseries::{
    euler_series, ln_qpoch_real_with, qbinomial_series_with, qpoch_infinite_relative, Accuracy, LogTailCoeffs,
    SignedLog,
};
use crate::quad::{integrate, DeMap};
use crate::theta::{theta_relative, LatticeParam, ThetaArg, ThetaKind};
use crate::xcomplex::XComplex;
use crate::QNome;

fn bits_for(n: u64) -> u32 {
    64 - n.leading_zeros()
}

fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// Relative error `remainder / |value|` as a float, `+inf` for a zero value.
fn rel_of(v: &TruncatedValue) -> Float {
    let abs = Float::with_val(BOUND_BITS, v.value.abs());
    let mut r = Float::new(BOUND_BITS);
    r.assign_round(&v.remainder.magnitude / &abs, Round::Up);
    r
}

/// Argument of `Gamma_q`: complex `z` with a real nome.
#[derive(Clone, Debug, PartialEq)]
pub struct QGammaArg {
    z: XComplex,
    q: QNome,
}

impl QGammaArg {
    pub fn new(z: XComplex, q: QNome) -> Self {
        Self { z, q }
    }

    pub fn real(z: f64, q: &QNome, prec: u32) -> Self {
        Self::new(XComplex::from_f64(prec, z, 0.0), q.clone())
    }

    pub fn z(&self) -> &XComplex {
        &self.z
    }

    pub fn q(&self) -> &QNome {
        &self.q
    }
}

/// `q^z` with enough bits for the exponent `z ln q`.
fn nome_power(q: &QNome, z: &XComplex, wb: u32) -> XComplex {
    if z.is_real() && z.re.is_integer() && z.re > 0 && z.re < u32::MAX {
        let n = z.re.to_u32_saturating().unwrap_or(0);
        if n == 1 {
            return XComplex::from_real(Float::with_val(wb.max(q.prec()), q.q()));
        }
    }
    let scale = Float::with_val(BOUND_BITS, z.abs() * q.log_q()).to_f64().abs();
    let p = wb + 16 + bits_for(scale.ceil() as u64);
    q.at_prec(p).pow(&z.with_prec(p))
}

/// Rejects `z` with `|1 - q^{z+m}| < 10 * target` for some integer `m >= 0`.
fn check_pole(z: &XComplex, q: &QNome, spec: &PrecisionSpec) -> Result<()> {
    let re = z.re.to_f64();
    let centre = -re;
    if centre < -1.5 {
        return Ok(());
    }
    let limit = Float::with_val(BOUND_BITS, spec.target_abs_err() * 10u32);
    let lo = (centre.floor() - 1.0).max(0.0) as u64;
    let hi = (centre.ceil() + 1.0).max(0.0) as u64;
    let p = spec.work_bits() + 16;
    for m in lo..=hi {
        let shifted = &z.with_prec(p) + &XComplex::from_f64(p, m as f64, 0.0);
        let d = (&XComplex::one(p) - &nome_power(q, &shifted, p)).abs();
        if d < limit {
            return Err(Error::Pole(format!(
                "|1 - q^(z+{m})| = {:.3e} is below 10 x target",
                d.to_f64()
            )));
        }
    }
    Ok(())
}

/// `(q;q)_inf` to relative accuracy.
fn qq_relative(q: &QNome, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    let a = XComplex::from_real(Float::with_val(spec.work_bits().max(q.prec()), q.q()));
    qpoch_infinite_relative(&a, q, spec)
}

/// `(1-q)^w = e^{w ln(1-q)}`.
fn one_minus_q_pow(q: &QNome, w: &XComplex, prec: u32) -> XComplex {
    let l = Float::with_val(prec, q.at_prec(prec).one_minus_q().ln_ref());
    w.with_prec(prec).scale(&l).exp()
}

fn finish(value: XComplex, rel: Float, spec: &PrecisionSpec, rigorous: bool) -> TruncatedValue {
    let wb = spec.work_bits();
    let abs = Float::with_val(BOUND_BITS, value.abs());
    let mut bound = Float::with_val(BOUND_BITS, &abs * &rel);
    bound += Float::with_val(BOUND_BITS, &abs) >> (wb - 3);
    let remainder = if rigorous { ErrorBound::rigorous(&bound) } else { ErrorBound::heuristic(&bound) };
    TruncatedValue { value: value.with_prec(wb), remainder, terms: 0 }
}

/// `Gamma_q(z) = (q;q)_inf / (q^z;q)_inf (1-q)^{1-z}`.
pub fn gamma_q(arg: &QGammaArg, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    let wb = spec.work_bits();
    check_pole(&arg.z, &arg.q, spec)?;
    let num = qq_relative(&arg.q, spec)?;
    let a = nome_power(&arg.q, &arg.z, wb);
    let den = qpoch_infinite_relative(&a, &arg.q, spec)?;
    let p = wb + 16;
    let exponent = &XComplex::one(p) - &arg.z.with_prec(p);
    let pow = one_minus_q_pow(&arg.q, &exponent, p);
    let value = &(&num.value.with_prec(p) / &den.value) * &pow;
    let mut rel = rel_of(&num);
    rel += rel_of(&den);
    let mut out = finish(value, rel, spec, true);
    out.terms = num.terms + den.terms;
    Ok(out)
}

/// `ln |Gamma_q(z)|` and the sign of `Gamma_q(z)` for real `z`, for
/// arguments whose values overflow any fixed exponent range of interest.
pub fn ln_gamma_q_real(z: &Float, q: &QNome, spec: &PrecisionSpec) -> Result<SignedLog> {
    let wb = spec.work_bits();
    let zc = XComplex::from_real_ref(z, z.prec().max(wb));
    check_pole(&zc, q, spec)?;
    let p = wb + 16;
    let num = qq_relative(q, spec)?;
    let ln_num = Float::with_val(p, num.value.re.abs_ref()).ln();
    let a = nome_power(q, &zc, wb);
    let den = ln_qpoch_real_with(&a.re, q, spec, None)?;
    if den.sign == 0 {
        return Err(Error::Pole("(q^z;q)_inf vanishes".into()));
    }
    let l1q = Float::with_val(p, q.at_prec(p).one_minus_q().ln_ref());
    let tail = Float::with_val(p, 1 - Float::with_val(p, z)) * l1q;
    let ln_abs = ln_num - Float::with_val(p, &den.ln_abs) + tail;
    Ok(SignedLog { ln_abs: Float::with_val(wb, &ln_abs), sign: den.sign })
}

/// `Gamma_q(z + 1/2) = (q;q)_inf (1-q)^{1/2-z} sum_k q^{k(z+1/2)} / (q;q)_k`
/// for `Re z > -1/2`.
pub fn gamma_q_half_series(z: &XComplex, q: &QNome, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    if !(z.re > -0.5) {
        return Err(Error::Divergence(format!(
            "Re z = {} is not above -1/2, |q^(z+1/2)| >= 1",
            z.re.to_f64()
        )));
    }
    let wb = spec.work_bits();
    let p = wb + 16;
    let shifted = &z.with_prec(p) + &XComplex::from_f64(p, 0.5, 0.0);
    let w = nome_power(q, &shifted, wb);
    let series = qbinomial_series_with(&XComplex::zero(wb), &w, q, spec, Accuracy::Relative)?;
    let num = qq_relative(q, spec)?;
    let exponent = &XComplex::from_f64(p, 0.5, 0.0) - &z.with_prec(p);
    let pow = one_minus_q_pow(q, &exponent, p);
    let value = &(&num.value.with_prec(p) * &series.value) * &pow;
    let mut rel = rel_of(&num);
    rel += rel_of(&series);
    let mut out = finish(value, rel, spec, true);
    out.terms = series.terms;
    Ok(out)
}

/// `theta_4(q^z; q^{1/2})`, i.e. `theta_4(z tau | tau)` with `tau = i t`,
/// `q = e^{-2 pi t}`.
fn theta4_of_nome_power(z: &XComplex, q: &QNome, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    let p = spec.work_bits() + 16;
    let t = q.at_prec(p).tau();
    let tau = XComplex::new(Float::new(p), t);
    let v = &z.with_prec(p) * &tau;
    let th = theta_relative(ThetaKind::Four, &ThetaArg::from_v(v), &LatticeParam::new(tau)?, spec)?;
    if th.value.abs() <= th.remainder.magnitude {
        return Err(Error::ZeroDivisor(format!(
            "theta_4 vanishes to working accuracy at z = {}",
            z
        )));
    }
    Ok(th)
}

/// `Gamma_q(1/2 + z) Gamma_q(1/2 - z) = (1-q)(q;q)_inf^3 / theta_4(q^z; q^{1/2})`.
pub fn gamma_q_reflection(z: &XComplex, q: &QNome, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    let wb = spec.work_bits();
    let p = wb + 16;
    let th = theta4_of_nome_power(z, q, spec)?;
    let qq = qq_relative(q, spec)?;
    let cube = {
        let c = qq.value.with_prec(p);
        &(&c * &c) * &c
    };
    let one_minus = Float::with_val(p, q.at_prec(p).one_minus_q());
    let value = &cube.scale(&one_minus) / &th.value.with_prec(p);
    let mut rel = rel_of(&qq) * 3u32;
    rel += rel_of(&th);
    Ok(finish(value, rel, spec, true))
}

/// `Gamma_q(1/2 - z) = (q;q)_inf^2 (1-q)^{z+1/2} / theta_4(q^z; q^{1/2})
/// sum_k q^{k(k-1)/2} (-q^{z+1/2})^k / (q;q)_k` for `Re z > -1/2`.
pub fn gamma_q_half_minus_series(z: &XComplex, q: &QNome, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    if !(z.re > -0.5) {
        return Err(Error::Domain(format!("Re z = {} is not above -1/2", z.re.to_f64())));
    }
    let wb = spec.work_bits();
    let p = wb + 16;
    let shifted = &z.with_prec(p) + &XComplex::from_f64(p, 0.5, 0.0);
    let w = nome_power(q, &shifted, wb);

    // the alternating sum can be far smaller than its terms; widen until its
    // bound is relatively small
    let mut inner = spec.clone();
    let euler = loop {
        let e = euler_series(&w, q, &inner)?;
        let lost = log2_abs(&e.remainder.magnitude) - log2_abs(&e.value.abs());
        let want = -(f64::from(wb - spec.guard_bits()));
        if lost <= want {
            break e;
        }
        let extra = (lost - want).ceil() as u32 + 4;
        if inner.work_bits() + extra > 16 * wb {
            return Err(Error::PrecisionUnreachable(
                "alternating series cancels below the working precision".into(),
            ));
        }
        inner = inner.refined(extra);
    };

    let th = theta4_of_nome_power(z, q, spec)?;
    let qq = qq_relative(q, spec)?;
    let sq = {
        let c = qq.value.with_prec(p);
        &c * &c
    };
    let pow = one_minus_q_pow(q, &shifted, p);
    let value = &(&(&sq * &pow) * &euler.value.with_prec(p)) / &th.value.with_prec(p);
    let mut rel = rel_of(&qq) * 2u32;
    rel += rel_of(&th);
    rel += rel_of(&euler);
    let mut out = finish(value, rel, spec, true);
    out.terms = euler.terms;
    Ok(out)
}

/// Argument of the classical Gamma function.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaRef {
    z: XComplex,
}

impl GammaRef {
    pub fn new(z: XComplex) -> Result<Self> {
        if z.is_real() && z.re.is_integer() && z.re <= 0 {
            return Err(Error::Pole(format!("Gamma has a pole at {}", z.re.to_f64())));
        }
        Ok(Self { z })
    }

    pub fn real(x: f64, prec: u32) -> Result<Self> {
        Self::new(XComplex::from_f64(prec, x, 0.0))
    }

    pub fn z(&self) -> &XComplex {
        &self.z
    }
}

const BERNOULLI_TERMS: usize = 256;

/// `B_2, B_4, ..., B_{2N}` from the tangent numbers `T_k`:
/// `B_{2k} = (-1)^{k-1} 2k T_k / (4^k (4^k - 1))`.
fn bernoulli_table() -> &'static [Rational] {
    static TABLE: OnceLock<Vec<Rational>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = BERNOULLI_TERMS;
        let mut t: Vec<Integer> = vec![Integer::new(); n + 1];
        t[1] = Integer::from(1);
        for k in 2..=n {
            t[k] = Integer::from(&t[k - 1] * (k as u32 - 1));
        }
        for k in 2..=n {
            for j in k..=n {
                let a = Integer::from(&t[j - 1] * (j as u32 - k as u32));
                let b = Integer::from(&t[j] * (j as u32 - k as u32 + 2));
                t[j] = a + b;
            }
        }
        (1..=n)
            .map(|k| {
                let four_k = Integer::from(1) << (2 * k as u32);
                let den = Integer::from(&four_k - 1u32) * &four_k;
                let num = Integer::from(&t[k] * (2 * k as u32));
                let r = Rational::from((num, den));
                if k % 2 == 0 {
                    -r
                } else {
                    r
                }
            })
            .collect()
    })
}

/// `B_{2k}` for `1 <= k <= 256`.
pub fn bernoulli_even(k: usize) -> Option<&'static Rational> {
    bernoulli_table().get(k.checked_sub(1)?)
}

/// Stirling series for `ln Gamma(w)` with `Re w` large.
fn ln_gamma_stirling(w: &XComplex, prec: u32) -> XComplex {
    let half = XComplex::from_f64(prec, 0.5, 0.0);
    let ln_w = w.ln();
    let ln_2pi = Float::with_val(prec, pi(prec) * 2u32).ln() / 2u32;
    let mut sum = &(&(w - &half) * &ln_w) - w;
    sum.re += &ln_2pi;
    let w_inv = w.recip();
    let w_inv2 = &w_inv * &w_inv;
    let mut power = w_inv;
    let cut = -(f64::from(prec) + 4.0);
    for (i, b) in bernoulli_table().iter().enumerate() {
        let k = (i + 1) as u32;
        let c = Float::with_val(prec, b) / (2 * k * (2 * k - 1));
        let term = power.scale(&c);
        sum += &term;
        if log2_abs(&term.abs()) < cut + log2_abs(&sum.abs()).max(0.0) {
            break;
        }
        power = &power * &w_inv2;
    }
    sum
}

/// Classical `Gamma(z)`: reflection for `Re z < 1/2`, upward shift, then the
/// Stirling series. Accurate to relative `2^-work_bits` up to rounding; the
/// bound is heuristic.
pub fn gamma_ref(arg: &GammaRef, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    let wb = spec.work_bits();
    let z = &arg.z;
    let mag = z.abs().to_f64();
    let p = wb + 40 + bits_for((mag + 1.0).ceil() as u64 * 8);
    let z = z.with_prec(p);
    let value = if z.re < 0.5 {
        // Gamma(z) = pi / (sin(pi z) Gamma(1 - z))
        let one_minus = &XComplex::one(p) - &z;
        let s = z.scale(&pi(p)).sin();
        if s.is_zero() {
            return Err(Error::Pole("sin(pi z) vanishes".into()));
        }
        let g = gamma_shifted(&one_minus, p);
        XComplex::from_real(pi(p)) / (&s * &g)
    } else {
        gamma_shifted(&z, p)
    };
    let abs = Float::with_val(BOUND_BITS, value.abs());
    let bound = abs >> (wb - 2);
    Ok(TruncatedValue { value: value.with_prec(wb), remainder: ErrorBound::heuristic(&bound), terms: 0 })
}

fn gamma_shifted(z: &XComplex, prec: u32) -> XComplex {
    let pf = f64::from(prec);
    let n = BERNOULLI_TERMS as f64;
    let r_min = (pf * std::f64::consts::LN_2 / (2.0 * std::f64::consts::PI) + 2.0)
        .max(1.1 * n / (std::f64::consts::PI * std::f64::consts::E) * 2f64.powf(pf / (2.0 * n)));
    let shift = (r_min - z.re.to_f64()).ceil().max(0.0) as u64;
    let mut w = z.clone();
    let mut prod = XComplex::one(prec);
    for _ in 0..shift {
        prod = &prod * &w;
        w.re += 1u32;
    }
    let lg = ln_gamma_stirling(&w, prec);
    &lg.exp() / &prod
}

/// `int_0^inf t^{x-1/2} / (-(1-q) t; q)_inf dt`, which equals
/// `pi / (cos(pi x) Gamma_q(1/2 - x))`.
///
/// The range is split at `T = 2 ln(1/(1-q))`: tanh-sinh on `[0, T]` absorbs
/// the algebraic singularity at zero, exp-sinh on `[T, inf)` the
/// super-algebraic decay. The integrand is evaluated in log space.
pub fn q_integral_representation(x: &Float, q: &QNome, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    if !(*x > -0.5) {
        return Err(Error::Domain(format!("x = {} is not above -1/2", x.to_f64())));
    }
    let wb = spec.work_bits();
    let p = wb + 16;
    let xh = Float::with_val(p, x - 0.5f64);
    if xh.is_integer() {
        return Err(Error::Domain("cos(pi x) vanishes at half-odd-integer x".into()));
    }
    let qp = q.at_prec(p);
    let one_minus = Float::with_val(p, qp.one_minus_q());
    let split = Float::with_val(p, one_minus.recip_ref()).ln() * 2u32;
    let inner = PrecisionSpec::bits(p)?.with_execution(spec.execution());
    let table = LogTailCoeffs::new(&qp, p as usize + 64, p + 8);

    let integrand = |t: &Float| -> Result<Float> {
        let lt = Float::with_val(p, t.ln_ref());
        let a = -Float::with_val(p, t * &one_minus);
        let den = ln_qpoch_real_with(&a, &qp, &inner, Some(&table))?;
        Ok((Float::with_val(p, &xh * lt) - den.ln_abs).exp())
    };

    let rel_bits = wb - spec.guard_bits();
    let first = integrate(
        &DeMap::TanhSinh { a: Float::new(p), b: split.clone() },
        integrand,
        p,
        rel_bits,
        12,
        spec.execution(),
    )?;
    let second = integrate(&DeMap::ExpSinh { a: split }, integrand, p, rel_bits, 12, spec.execution())?;
    let value = Float::with_val(p, &first.value + &second.value);
    let mut bound = Float::with_val(BOUND_BITS, &first.error_estimate);
    bound += &second.error_estimate;
    bound += Float::with_val(BOUND_BITS, value.abs_ref()) >> (wb - 2);
    Ok(TruncatedValue {
        value: XComplex::from_real(Float::with_val(wb, &value)),
        remainder: ErrorBound::heuristic(&bound),
        terms: first.evaluations + second.evaluations,
    })
}

/// `pi / (cos(pi x) Gamma_q(1/2 - x))`, the closed form of
/// [`q_integral_representation`].
pub fn q_integral_closed_form(x: &Float, q: &QNome, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    let wb = spec.work_bits();
    let p = wb + 16;
    let arg = QGammaArg::new(XComplex::from_real(Float::with_val(p, 0.5f64 - x)), q.clone());
    let g = gamma_q(&arg, spec)?;
    let c = Float::with_val(p, x * pi(p)).cos();
    let denom = g.value.with_prec(p).scale(&c);
    let value = &XComplex::from_real(pi(p)) / &denom;
    Ok(finish(value, rel_of(&g), spec, true))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_bernoulli_numbers() {
        assert_eq!(*bernoulli_even(1).unwrap(), Rational::from((1, 6)));
        assert_eq!(*bernoulli_even(2).unwrap(), Rational::from((-1, 30)));
        assert_eq!(*bernoulli_even(3).unwrap(), Rational::from((1, 42)));
        assert_eq!(*bernoulli_even(6).unwrap(), Rational::from((691, -2730)));
        assert!(bernoulli_even(0).is_none());
    }
}
