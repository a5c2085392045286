//! q-Pochhammer symbols, the q-binomial and Euler series, and the truncated
//! expansions of `1/(aq^n;q)_inf` and `(aq^n;q)_inf` with certified remainders.
//!
//! Infinite products are evaluated by one of three routes:
//!
//! * direct: `prod_{k<N} (1 - a q^k)` with `N` chosen from the geometric tail
//!   majorant `|log prod_{k>=N}(1 - a q^k)| <= |a| q^N / ((1-q)(1-|a| q^N))`;
//! * split: a direct prefix up to the first `M` with `|a| q^M <= 1/2`, then
//!   `log (b;q)_inf = -sum_n b^n / (n (1 - q^n))` for `b = a q^M`, which needs
//!   `O(bits)` terms however close `q` is to one;
//! * modular: `(q;q)_inf` through the eta transformation, see
//!   [`crate::theta::qq_infinity_fast`].
//!
//! Long prefixes are multiplied in fixed chunks that may run in parallel; the
//! chunk partials are combined in index order.

use rug::float::Round;
use rug::ops::{AssignRound, Pow};
use rug::Float;

use crate::error::{Error, Result};
use crate::par::{self, Execution, PRODUCT_CHUNK};
use crate::precision::{ln_abs, log2_abs, ErrorBound, PrecisionSpec, TruncatedValue, BOUND_BITS};
use crate::xcomplex::XComplex;

const LN_2: f64 = std::f64::consts::LN_2;

/// Above this nome the direct product is abandoned for the split or modular
/// route.
pub fn near_one_threshold(prec: u32) -> Float {
    Float::with_val(prec, 1) - Float::with_val(prec, Float::i_exp(1, -10))
}

#[derive(Clone, Debug, PartialEq)]
enum Defining {
    Value,
    OneMinus,
    Log,
}

/// Real nome `0 < q < 1`, kept together with `ln q` and `1 - q`.
///
/// The nome remembers which of the three quantities defined it, so raising
/// its precision extends that quantity exactly and recomputes the others.
#[derive(Clone, Debug, PartialEq)]
pub struct QNome {
    q: Float,
    log_q: Float,
    one_minus_q: Float,
    defining: Defining,
}

impl QNome {
    pub fn new(q: Float) -> Result<Self> {
        let prec = q.prec();
        if !(q > 0 && q < 1) {
            return Err(Error::Domain(format!("nome must lie in (0,1), got {}", q.to_f64())));
        }
        let log_q = Float::with_val(prec, q.ln_ref());
        let one_minus_q = Float::with_val(prec, 1 - &q);
        Ok(Self { q, log_q, one_minus_q, defining: Defining::Value })
    }

    /// Parses a decimal nome at `prec` bits.
    pub fn parse(text: &str, prec: u32) -> Result<Self> {
        let text = text.trim();
        if text.contains('/') {
            let r: rug::Rational =
                text.parse().map_err(|e| Error::Domain(format!("cannot parse nome {text:?}: {e}")))?;
            return Self::new(Float::with_val(prec, r));
        }
        let parsed =
            Float::parse(text).map_err(|e| Error::Domain(format!("cannot parse nome {text:?}: {e}")))?;
        Self::new(Float::with_val(prec, parsed))
    }

    pub fn from_f64(q: f64, prec: u32) -> Result<Self> {
        Self::new(Float::with_val(prec, q))
    }

    /// `q = 1 - eps`, with `1 - q` held exactly.
    pub fn from_one_minus(eps: Float) -> Result<Self> {
        let prec = eps.prec();
        if !(eps > 0 && eps < 1) {
            return Err(Error::Domain(format!("1 - q must lie in (0,1), got {}", eps.to_f64())));
        }
        let q = Float::with_val(prec, 1 - &eps);
        if q >= 1 {
            return Err(Error::Domain(format!(
                "1 - q = 2^{} is not representable at {prec} bits",
                log2_abs(&eps)
            )));
        }
        let log_q = Float::with_val(prec, -&eps).ln_1p();
        Ok(Self { q, log_q, one_minus_q: eps, defining: Defining::OneMinus })
    }

    /// `q = e^{log_q}`.
    pub fn from_log(log_q: Float) -> Result<Self> {
        let prec = log_q.prec();
        if !(log_q < 0) {
            return Err(Error::Domain(format!("log q must be negative, got {}", log_q.to_f64())));
        }
        let q = Float::with_val(prec, log_q.exp_ref());
        let one_minus_q = -Float::with_val(prec, log_q.exp_m1_ref());
        Ok(Self { q, log_q, one_minus_q, defining: Defining::Log })
    }

    /// `q = e^{-2 pi tau}` for `tau > 0`.
    pub fn from_tau(tau: &Float) -> Result<Self> {
        let prec = tau.prec();
        let pi = Float::with_val(prec, rug::float::Constant::Pi);
        Self::from_log(-Float::with_val(prec, tau * pi) * 2u32)
    }

    pub fn q(&self) -> &Float {
        &self.q
    }

    pub fn log_q(&self) -> &Float {
        &self.log_q
    }

    pub fn one_minus_q(&self) -> &Float {
        &self.one_minus_q
    }

    pub fn prec(&self) -> u32 {
        self.q.prec()
    }

    /// `tau` with `q = e^{-2 pi tau}`.
    pub fn tau(&self) -> Float {
        let prec = self.prec();
        let pi = Float::with_val(prec, rug::float::Constant::Pi);
        -Float::with_val(prec, &self.log_q / pi) / 2u32
    }

    pub fn as_complex(&self) -> XComplex {
        XComplex::from_real(self.q.clone())
    }

    /// Same nome at `prec` bits.
    pub fn at_prec(&self, prec: u32) -> QNome {
        if prec == self.prec() {
            return self.clone();
        }
        let rebuilt = match self.defining {
            Defining::Value => Self::new(Float::with_val(prec, &self.q)),
            Defining::OneMinus => Self::from_one_minus(Float::with_val(prec, &self.one_minus_q)),
            Defining::Log => Self::from_log(Float::with_val(prec, &self.log_q)),
        };
        rebuilt.expect("re-rounding a valid nome keeps it valid")
    }

    /// `q^x = e^{x ln q}` for complex `x`.
    pub fn pow(&self, x: &XComplex) -> XComplex {
        let prec = x.prec().max(self.prec());
        x.with_prec(prec).scale(&self.log_q).exp()
    }

    pub fn pow_real(&self, x: &Float) -> Float {
        let prec = x.prec().max(self.prec());
        Float::with_val(prec, x * &self.log_q).exp()
    }

    pub fn pow_u64(&self, n: u64, prec: u32) -> Float {
        let e = Float::with_val(prec, &self.log_q) * n;
        e.exp()
    }

    fn is_near_one(&self) -> bool {
        self.q > near_one_threshold(self.prec().max(64))
    }
}

/// Order of a q-shifted factorial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PochhammerOrder {
    Finite(u64),
    Infinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Accuracy {
    Absolute,
    Relative,
}

fn bits_for(n: u64) -> u32 {
    64 - n.leading_zeros()
}

/// `prod_{k=lo}^{hi-1} (1 - a q^k)` for real `a`, `q`.
fn block_real(a: &Float, q: &Float, lo: u64, hi: u64, prec: u32) -> Float {
    let mut w = Float::with_val(prec, a);
    if lo > 0 {
        let qp = XComplex::from_real_ref(q, prec).pow_u64(lo).re;
        w *= qp;
    }
    let q = Float::with_val(prec, q);
    let mut acc = Float::with_val(prec, 1);
    let mut factor = Float::new(prec);
    for _ in lo..hi {
        factor.assign_round(1 - &w, Round::Nearest);
        acc *= &factor;
        w *= &q;
    }
    acc
}

fn block_complex(a: &XComplex, q: &XComplex, lo: u64, hi: u64, prec: u32) -> XComplex {
    let q = q.with_prec(prec);
    let mut w = a.with_prec(prec);
    if lo > 0 {
        w = &w * &q.pow_u64(lo);
    }
    let one = XComplex::one(prec);
    let mut acc = one.clone();
    for _ in lo..hi {
        let factor = &one - &w;
        acc = &acc * &factor;
        w = &w * &q;
    }
    acc
}

/// `prod_{k=lo}^{hi-1} (1 - a q^k)` split into fixed chunks.
pub(crate) fn product_range(
    a: &XComplex,
    q: &XComplex,
    lo: u64,
    hi: u64,
    prec: u32,
    exec: Execution,
) -> XComplex {
    let ranges = par::chunk_ranges(lo, hi, PRODUCT_CHUNK);
    if a.is_real() && q.is_real() {
        let parts = par::map_slice(exec, &ranges, |&(l, h)| block_real(&a.re, &q.re, l, h, prec));
        let mut acc = Float::with_val(prec, 1);
        for p in &parts {
            acc *= p;
        }
        XComplex::from_real(acc)
    } else {
        let parts = par::map_slice(exec, &ranges, |&(l, h)| block_complex(a, q, l, h, prec));
        let mut acc = XComplex::one(prec);
        for p in &parts {
            acc = &acc * p;
        }
        acc
    }
}

/// First `N >= 0` with `ln|a| + N ln|q| <= goal_ln`.
fn first_index_below(ln_a: f64, ln_q: f64, goal_ln: f64) -> u64 {
    if ln_a <= goal_ln {
        return 0;
    }
    let n = ((goal_ln - ln_a) / ln_q).ceil();
    if n.is_finite() && n < 1.8e19 {
        n.max(0.0) as u64
    } else {
        u64::MAX
    }
}

/// `|a| |q|^N` evaluated at bound precision, rounded up.
fn tail_argument(abs_a: &Float, ln_abs_q: &Float, n: u64) -> Float {
    let mut e = Float::with_val(BOUND_BITS, ln_abs_q);
    e *= n;
    let mut x = Float::new(BOUND_BITS);
    x.assign_round(e.exp_ref(), Round::Up);
    x *= abs_a;
    x
}

fn rounding_allowance(value_abs: &Float, ops: u64, prec: u32) -> Float {
    let mut r = Float::with_val(BOUND_BITS, value_abs);
    r *= ops + 4;
    r >> (prec - 2)
}

/// Direct infinite product `prod_{k>=0} (1 - a q^k)` for `|q| < 1`.
pub(crate) fn qpoch_direct(
    a: &XComplex,
    q: &XComplex,
    spec: &PrecisionSpec,
    accuracy: Accuracy,
) -> Result<TruncatedValue> {
    let wb = spec.work_bits();
    if a.is_zero() {
        return Ok(TruncatedValue::exact(XComplex::one(wb)));
    }
    let abs_q = q.abs();
    if abs_q >= 1 {
        return Err(Error::Domain(format!("|q| = {} is not below one", abs_q.to_f64())));
    }
    let ln_abs_q_f = Float::with_val(BOUND_BITS.max(q.prec()), abs_q.ln_ref());
    let lq = ln_abs_q_f.to_f64();
    let abs_a = Float::with_val(BOUND_BITS, a.abs());
    let la = ln_abs(&abs_a);
    let one_minus_abs_q = -Float::with_val(BOUND_BITS, ln_abs_q_f.exp_m1_ref());
    let ln_gap = ln_abs(&one_minus_abs_q);

    let n0 = first_index_below(la, lq, -LN_2);
    let goal_for = |ln_p: f64| -> f64 {
        match accuracy {
            Accuracy::Absolute => spec.target_ln() - LN_2 - ln_p,
            Accuracy::Relative => spec.relative_target_ln() - LN_2,
        }
    };
    // L_N <= 2 x_N / (1-|q|) once x_N <= 1/2.
    let needed = |ln_p: f64| -> u64 {
        let eps = goal_for(ln_p).min(0.0);
        n0.max(first_index_below(la, lq, eps + ln_gap - LN_2))
    };

    let mut n = needed(0.0);
    let mut prec = wb + 8 + bits_for(n);
    let mut done = 0u64;
    let mut acc = XComplex::one(prec);
    loop {
        if n > spec.term_budget() {
            return Err(Error::PrecisionUnreachable(format!(
                "direct product needs {n} factors, budget is {}",
                spec.term_budget()
            )));
        }
        if wb + 8 + bits_for(n) > prec + 2 {
            prec = wb + 8 + bits_for(n);
            acc = XComplex::one(prec);
            done = 0;
        }
        let part = product_range(a, q, done, n, prec, spec.execution());
        acc = &acc * &part;
        done = n;

        let x = tail_argument(&abs_a, &ln_abs_q_f, n);
        let mut denom = Float::with_val(BOUND_BITS, 1 - &x);
        denom *= &one_minus_abs_q;
        let mut l = Float::new(BOUND_BITS);
        l.assign_round(&x / &denom, Round::Up);
        let mut tail_rel = Float::new(BOUND_BITS);
        tail_rel.assign_round(l.exp_m1_ref(), Round::Up);
        let abs_p = Float::with_val(BOUND_BITS, acc.abs());
        let satisfied = match accuracy {
            Accuracy::Absolute => {
                let b = Float::with_val(BOUND_BITS, &abs_p * &tail_rel);
                acc.is_zero() || b <= *spec.target_abs_err()
            }
            Accuracy::Relative => ln_abs(&tail_rel) <= spec.relative_target_ln(),
        };
        if satisfied {
            let mut bound = Float::with_val(BOUND_BITS, &abs_p * &tail_rel);
            bound += rounding_allowance(&abs_p, n, prec);
            bound += rounding_allowance(&abs_p, 0, wb);
            return Ok(TruncatedValue {
                value: acc.with_prec(wb),
                remainder: ErrorBound::rigorous(&bound),
                terms: n,
            });
        }
        let next = needed(ln_abs(&abs_p) + 0.5);
        n = next.max(n + 1 + n / 8);
    }
}

/// Prefix product plus logarithmic tail.
pub(crate) struct SplitProduct {
    pub prefix: XComplex,
    pub log_tail: XComplex,
    /// Upper bound on `|log tail - log_tail|`.
    pub tail_bound: Float,
    pub terms: u64,
    pub prec: u32,
}

impl SplitProduct {
    pub fn value(&self) -> XComplex {
        &self.prefix * &self.log_tail.exp()
    }

    /// Absolute error bound on [`SplitProduct::value`] of magnitude `abs_value`.
    pub fn bound(&self, abs_value: &Float, wb: u32) -> Float {
        let mut rel = Float::new(BOUND_BITS);
        rel.assign_round(self.tail_bound.exp_m1_ref(), Round::Up);
        let mut b = Float::with_val(BOUND_BITS, abs_value * &rel);
        b += rounding_allowance(abs_value, self.terms, self.prec);
        b += rounding_allowance(abs_value, 0, wb);
        b
    }
}

/// Coefficients `1 / (n (1 - q^n))` of the logarithmic tail series.
pub struct LogTailCoeffs {
    coeffs: Vec<Float>,
}

impl LogTailCoeffs {
    pub(crate) fn new(q: &QNome, count: usize, prec: u32) -> Self {
        let log_q = Float::with_val(prec, q.log_q());
        let coeffs = (1..=count as u64)
            .map(|n| Self::coeff(&log_q, n, prec))
            .collect();
        Self { coeffs }
    }

    fn coeff(log_q: &Float, n: u64, prec: u32) -> Float {
        let e = Float::with_val(prec, log_q * n);
        let one_minus = -e.exp_m1();
        (one_minus * n).recip()
    }

    /// `1/(n(1-q^n))` for `n >= 1`.
    fn get(&self, n: u64, log_q: &Float, prec: u32) -> Float {
        match self.coeffs.get(n as usize - 1) {
            Some(c) if c.prec() >= prec => c.clone(),
            _ => Self::coeff(log_q, n, prec),
        }
    }
}

/// Split evaluation of `(a;q)_inf` for a real nome.
pub(crate) fn qpoch_split(
    a: &XComplex,
    q: &QNome,
    spec: &PrecisionSpec,
    accuracy: Accuracy,
    table: Option<&LogTailCoeffs>,
) -> Result<SplitProduct> {
    let wb = spec.work_bits();
    let lq = q.log_q().to_f64();
    let abs_a = Float::with_val(BOUND_BITS, a.abs());
    let la = ln_abs(&abs_a);
    let m = if a.is_zero() { 0 } else { first_index_below(la, lq, -LN_2) };
    if m > spec.term_budget() {
        return Err(Error::PrecisionUnreachable(format!(
            "product prefix needs {m} factors, budget is {}",
            spec.term_budget()
        )));
    }
    let prec = wb + 8 + bits_for(m);
    let qc = q.at_prec(prec);
    let prefix = if m == 0 {
        XComplex::one(prec)
    } else {
        product_range(a, &qc.as_complex(), 0, m, prec, spec.execution())
    };
    let qm = qc.pow_u64(m, prec);
    let b = a.with_prec(prec).scale(&qm);
    let abs_b = Float::with_val(BOUND_BITS, b.abs());
    let lb = ln_abs(&abs_b);
    let ln_gap = ln_abs(q.one_minus_q());
    let ln_one_minus_b = (1.0 - abs_b.to_f64()).ln();
    let ln_prefix = ln_abs(&Float::with_val(BOUND_BITS, prefix.abs()));

    let mut sum = XComplex::zero(prec);
    let mut power = b.clone();
    let mut t = 0u64;
    let tail_ln = |t: u64| -> f64 {
        (t as f64 + 1.0) * lb - (t as f64 + 1.0).ln() - ln_gap - ln_one_minus_b
    };
    if !b.is_zero() {
        loop {
            let goal = match accuracy {
                Accuracy::Relative => spec.relative_target_ln() - LN_2,
                Accuracy::Absolute => {
                    spec.target_ln() - LN_2 - ln_prefix + sum.re.to_f64() - 0.1
                }
            };
            if tail_ln(t) <= goal.min(-LN_2) {
                break;
            }
            if t > spec.term_budget() {
                return Err(Error::PrecisionUnreachable("log tail series too long".into()));
            }
            t += 1;
            let c = table.map_or_else(
                || LogTailCoeffs::coeff(qc.log_q(), t, prec),
                |tab| tab.get(t, qc.log_q(), prec),
            );
            let term = power.scale(&c);
            sum -= &term;
            power = &power * &b;
        }
    }
    let tail_bound = if b.is_zero() {
        Float::new(BOUND_BITS)
    } else {
        let mut tb = Float::new(BOUND_BITS);
        tb.assign_round(tail_ln(t), Round::Up);
        tb.exp_round(Round::Up);
        tb
    };
    Ok(SplitProduct { prefix, log_tail: sum, tail_bound, terms: m + t, prec })
}

fn split_to_value(split: SplitProduct, spec: &PrecisionSpec) -> TruncatedValue {
    let v = split.value();
    let abs_v = Float::with_val(BOUND_BITS, v.abs());
    let bound = split.bound(&abs_v, spec.work_bits());
    TruncatedValue {
        value: v.with_prec(spec.work_bits()),
        remainder: ErrorBound::rigorous(&bound),
        terms: split.terms,
    }
}

fn is_the_nome(a: &XComplex, q: &QNome) -> bool {
    a.im.is_zero() && a.re == *q.q()
}

fn qpoch_routed(a: &XComplex, q: &QNome, spec: &PrecisionSpec, accuracy: Accuracy) -> Result<TruncatedValue> {
    let wb = spec.work_bits();
    if a.is_zero() {
        return Ok(TruncatedValue::exact(XComplex::one(wb)));
    }
    if q.is_near_one() {
        if is_the_nome(a, q) {
            return crate::theta::qq_infinity_fast(q, spec);
        }
        return Ok(split_to_value(qpoch_split(a, q, spec, accuracy, None)?, spec));
    }
    let qc = q.at_prec(wb.max(q.prec())).as_complex();
    qpoch_direct(a, &qc, spec, accuracy)
}

/// `prod_{k=0}^{n-1} (1 - a q^k)`; the empty product is one.
pub fn qpoch_finite(a: &XComplex, q: &QNome, n: u64, spec: &PrecisionSpec) -> XComplex {
    let wb = spec.work_bits();
    let prec = wb + 8 + bits_for(n);
    let qc = q.at_prec(prec).as_complex();
    product_range(a, &qc, 0, n, prec, spec.execution()).with_prec(wb)
}

/// `(a;q)_inf` to within `spec.target_abs_err()`.
///
/// For `q > 1 - 2^-10` the nome itself (`a = q`) is routed through the eta
/// transformation and any other `a` through the split route.
pub fn qpoch_infinite(a: &XComplex, q: &QNome, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    qpoch_routed(a, q, spec, Accuracy::Absolute)
}

/// `(a;q)_inf` to relative accuracy `2^-(work_bits - guard_bits)`, for
/// products whose magnitude is far from one.
pub fn qpoch_infinite_relative(a: &XComplex, q: &QNome, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    qpoch_routed(a, q, spec, Accuracy::Relative)
}

/// Direct product only, whatever the nome; fails once the factor count
/// exceeds the term budget.
pub fn qpoch_infinite_direct(a: &XComplex, q: &QNome, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    let qc = q.at_prec(spec.work_bits().max(q.prec())).as_complex();
    qpoch_direct(a, &qc, spec, Accuracy::Absolute)
}

/// Direct product only, to relative accuracy.
pub fn qpoch_infinite_direct_relative(a: &XComplex, q: &QNome, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    let qc = q.at_prec(spec.work_bits().max(q.prec())).as_complex();
    qpoch_direct(a, &qc, spec, Accuracy::Relative)
}

/// `(a;q)_inf` for a complex nome `|q| < 1`, by direct product.
pub fn qpoch_infinite_complex_nome(a: &XComplex, q: &XComplex, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    qpoch_direct(a, q, spec, Accuracy::Absolute)
}

/// `(a;q)_n` or `(a;q)_inf` by order.
pub fn qpoch(a: &XComplex, q: &QNome, order: PochhammerOrder, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    match order {
        PochhammerOrder::Finite(n) => Ok(TruncatedValue {
            value: qpoch_finite(a, q, n, spec),
            remainder: ErrorBound::heuristic(&rounding_allowance(&Float::with_val(BOUND_BITS, 1), n, spec.work_bits())),
            terms: n,
        }),
        PochhammerOrder::Infinite => qpoch_infinite(a, q, spec),
    }
}

/// `ln |(a;q)_inf|` and the sign of the product for real `a`, accurate to
/// relative precision. Zero products report sign `0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedLog {
    pub ln_abs: Float,
    pub sign: i8,
}

impl SignedLog {
    pub fn exp(&self) -> Float {
        let v = Float::with_val(self.ln_abs.prec(), self.ln_abs.exp_ref());
        match self.sign {
            0 => Float::new(self.ln_abs.prec()),
            s if s < 0 => -v,
            _ => v,
        }
    }
}

pub fn ln_qpoch_real(a: &Float, q: &QNome, spec: &PrecisionSpec) -> Result<SignedLog> {
    ln_qpoch_real_with(a, q, spec, None)
}

pub(crate) fn ln_qpoch_real_with(
    a: &Float,
    q: &QNome,
    spec: &PrecisionSpec,
    table: Option<&LogTailCoeffs>,
) -> Result<SignedLog> {
    let wb = spec.work_bits();
    let ac = XComplex::from_real_ref(a, a.prec().max(wb));
    let split = qpoch_split(&ac, q, spec, Accuracy::Relative, table)?;
    let p = &split.prefix.re;
    if p.is_zero() {
        return Ok(SignedLog { ln_abs: Float::with_val(wb, f64::NEG_INFINITY), sign: 0 });
    }
    let sign = if p.is_sign_negative() { -1 } else { 1 };
    let ln_abs = Float::with_val(split.prec, p.abs_ref()).ln() + &split.log_tail.re;
    Ok(SignedLog { ln_abs: Float::with_val(wb, &ln_abs), sign })
}

/// `(q;q)_0, ..., (q;q)_kmax`, built once and read-only afterwards.
#[derive(Clone, Debug)]
pub struct QFactorialTable {
    values: Vec<Float>,
}

impl QFactorialTable {
    pub fn new(q: &QNome, kmax: usize, prec: u32) -> Self {
        let qq = q.at_prec(prec);
        let mut values = Vec::with_capacity(kmax + 1);
        values.push(Float::with_val(prec, 1));
        // 1 - q^k = (1 - q)(1 + q + ... + q^{k-1}) avoids cancellation near q = 1.
        let mut geometric = Float::with_val(prec, 1);
        for k in 1..=kmax {
            if k > 1 {
                geometric *= qq.q();
                geometric += 1;
            }
            let factor = Float::with_val(prec, qq.one_minus_q() * &geometric);
            let next = Float::with_val(prec, &values[k - 1] * factor);
            values.push(next);
        }
        Self { values }
    }

    pub fn get(&self, k: usize) -> Option<&Float> {
        self.values.get(k)
    }

    pub fn max_index(&self) -> usize {
        self.values.len() - 1
    }
}

/// `|a| q^n / (1-q)`; the truncations below are certified while it stays
/// below one half.
pub fn lemma1_ratio(a: &XComplex, q: &QNome, n: u64, prec: u32) -> Float {
    let qn = q.pow_u64(n, prec);
    Float::with_val(prec, a.abs() * qn) / q.one_minus_q()
}

fn lemma1_setup(a: &XComplex, q: &QNome, n: u64, prec: u32) -> Result<XComplex> {
    if a.is_zero() {
        return Ok(XComplex::zero(prec));
    }
    let ratio = lemma1_ratio(a, q, n, prec);
    if !(ratio < 0.5) {
        return Err(Error::Domain(format!(
            "|a| q^n / (1-q) = {} is not below 1/2, the remainder bound is not certified",
            ratio.to_f64()
        )));
    }
    let qn = q.at_prec(prec).pow_u64(n, prec);
    Ok(a.with_prec(prec).scale(&qn))
}

/// `sum_{k<K} (a q^n)^k / (q;q)_k`, approximating `1/(a q^n; q)_inf`, with the
/// certified remainder `2 (|a| q^n)^K / (q;q)_K`.
pub fn lemma1_reciprocal(a: &XComplex, q: &QNome, n: u64, k: u64, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    let prec = spec.work_bits() + 16;
    let table = QFactorialTable::new(q, k as usize, prec);
    lemma1_reciprocal_with(a, q, n, k, spec, &table)
}

pub fn lemma1_reciprocal_with(
    a: &XComplex,
    q: &QNome,
    n: u64,
    k: u64,
    spec: &PrecisionSpec,
    table: &QFactorialTable,
) -> Result<TruncatedValue> {
    if k == 0 {
        return Err(Error::Domain("truncation order K must be positive".into()));
    }
    if table.max_index() < k as usize {
        return Err(Error::Domain("factorial table shorter than K".into()));
    }
    let prec = spec.work_bits() + 16;
    let b = lemma1_setup(a, q, n, prec)?;
    let mut sum = XComplex::zero(prec);
    let mut power = XComplex::one(prec);
    for j in 0..k as usize {
        let term = power.scale(&Float::with_val(prec, table.get(j).unwrap().recip_ref()));
        sum += &term;
        power = &power * &b;
    }
    let abs_b = b.abs();
    let mut bound = Float::with_val(prec, abs_b.pow(k as u32));
    bound *= 2u32;
    bound /= table.get(k as usize).unwrap();
    Ok(TruncatedValue {
        value: sum.with_prec(spec.work_bits()),
        remainder: ErrorBound::rigorous(&bound),
        terms: k,
    })
}

/// `sum_{k<K} q^{k(k-1)/2} (-a q^n)^k / (q;q)_k`, approximating `(a q^n; q)_inf`,
/// with the certified remainder `2 q^{K(K-1)/2} (|a| q^n)^K / (q;q)_K`.
pub fn lemma1_direct(a: &XComplex, q: &QNome, n: u64, k: u64, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    let prec = spec.work_bits() + 16;
    let table = QFactorialTable::new(q, k as usize, prec);
    lemma1_direct_with(a, q, n, k, spec, &table)
}

pub fn lemma1_direct_with(
    a: &XComplex,
    q: &QNome,
    n: u64,
    k: u64,
    spec: &PrecisionSpec,
    table: &QFactorialTable,
) -> Result<TruncatedValue> {
    if k == 0 {
        return Err(Error::Domain("truncation order K must be positive".into()));
    }
    if table.max_index() < k as usize {
        return Err(Error::Domain("factorial table shorter than K".into()));
    }
    let prec = spec.work_bits() + 16;
    let b = lemma1_setup(a, q, n, prec)?;
    let qq = q.at_prec(prec);
    let minus_b = -&b;
    let mut sum = XComplex::zero(prec);
    let mut power = XComplex::one(prec);
    // q^{j(j-1)/2}, advanced by q^j
    let mut gauss = Float::with_val(prec, 1);
    let mut qj = Float::with_val(prec, 1);
    for j in 0..k as usize {
        let w = Float::with_val(prec, &gauss / table.get(j).unwrap());
        sum += &power.scale(&w);
        power = &power * &minus_b;
        gauss *= &qj;
        qj *= qq.q();
    }
    let abs_b = b.abs();
    let mut bound = Float::with_val(prec, abs_b.pow(k as u32));
    bound *= &gauss;
    bound *= 2u32;
    bound /= table.get(k as usize).unwrap();
    Ok(TruncatedValue {
        value: sum.with_prec(spec.work_bits()),
        remainder: ErrorBound::rigorous(&bound),
        terms: k,
    })
}

/// Cap on the automatically chosen truncation order.
pub const LEMMA1_MAX_K: u64 = 1_000_000;

fn auto_order(a: &XComplex, q: &QNome, n: u64, spec: &PrecisionSpec, gaussian: bool) -> Result<u64> {
    let prec = spec.work_bits() + 16;
    let b = lemma1_setup(a, q, n, prec)?;
    if b.is_zero() {
        return Ok(1);
    }
    let lb = ln_abs(&b.abs());
    let lq = q.log_q().to_f64();
    let goal = spec.target_ln();
    // ln of the bound for order K, tracked incrementally in doubles.
    let mut ln_qfact = 0.0f64;
    let mut k = 0u64;
    loop {
        k += 1;
        if k > LEMMA1_MAX_K {
            return Err(Error::PrecisionUnreachable(format!(
                "no truncation order up to {LEMMA1_MAX_K} meets the target"
            )));
        }
        ln_qfact += (-(k as f64 * lq).exp_m1()).ln();
        let mut ln_bound = LN_2 + k as f64 * lb - ln_qfact;
        if gaussian {
            ln_bound += (k as f64) * (k as f64 - 1.0) / 2.0 * lq;
        }
        // doubles carry ~1e-12 relative slack; confirm near the threshold
        if ln_bound <= goal - 1e-6 {
            return Ok(k);
        }
    }
}

/// [`lemma1_reciprocal`] with the smallest `K` whose bound meets the target.
pub fn lemma1_reciprocal_auto(a: &XComplex, q: &QNome, n: u64, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    let k = auto_order(a, q, n, spec, false)?;
    lemma1_reciprocal(a, q, n, k, spec)
}

/// [`lemma1_direct`] with the smallest `K` whose bound meets the target.
pub fn lemma1_direct_auto(a: &XComplex, q: &QNome, n: u64, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    let k = auto_order(a, q, n, spec, true)?;
    lemma1_direct(a, q, n, k, spec)
}

/// Summation plan from a decreasing-ratio majorant: term count, log of the
/// largest majorant term, log of the tail bound.
struct SeriesPlan {
    terms: u64,
    ln_max_term: f64,
    ln_tail: f64,
    accuracy: Accuracy,
}

/// `ln_ratio(k)` bounds `ln |t_{k+1}/t_k|` for every later index as well.
fn plan_series(spec: &PrecisionSpec, accuracy: Accuracy, ln_ratio: impl Fn(u64) -> f64) -> Result<SeriesPlan> {
    let mut ln_t = 0.0f64; // ln of majorant term k
    let mut ln_max = 0.0f64;
    let mut k = 0u64;
    loop {
        let r_next = ln_ratio(k + 1);
        let ln_next = ln_t + ln_ratio(k);
        if r_next < 0.0 {
            let ln_tail = ln_next - (-r_next.exp_m1()).ln();
            let goal = match accuracy {
                Accuracy::Absolute => spec.target_ln() - LN_2,
                // relative to the largest term, a lower bound on the sum
                // scale when the terms share a sign
                Accuracy::Relative => spec.relative_target_ln() - LN_2 + ln_max,
            };
            if ln_tail <= goal {
                return Ok(SeriesPlan { terms: k + 1, ln_max_term: ln_max, ln_tail, accuracy });
            }
        }
        if k >= spec.term_budget() {
            return Err(Error::PrecisionUnreachable(format!(
                "series needs more than {} terms",
                spec.term_budget()
            )));
        }
        k += 1;
        ln_t = ln_next;
        ln_max = ln_max.max(ln_t);
    }
}

fn extra_bits(plan: &SeriesPlan) -> u32 {
    let growth = match plan.accuracy {
        Accuracy::Absolute => (plan.ln_max_term / LN_2).ceil().max(0.0) as u32,
        Accuracy::Relative => 0,
    };
    growth + bits_for(plan.terms) + 8
}

fn ln_one_minus_q_pow(lq: f64, k: u64) -> f64 {
    (-(k as f64 * lq).exp_m1()).ln()
}

/// `sum_k (a;q)_k / (q;q)_k z^k = (az;q)_inf / (z;q)_inf` for `|z| < 1`.
pub fn qbinomial_series(a: &XComplex, z: &XComplex, q: &QNome, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    qbinomial_series_with(a, z, q, spec, Accuracy::Absolute)
}

pub(crate) fn qbinomial_series_with(
    a: &XComplex,
    z: &XComplex,
    q: &QNome,
    spec: &PrecisionSpec,
    accuracy: Accuracy,
) -> Result<TruncatedValue> {
    let abs_z = z.abs();
    if !(abs_z < 1) {
        return Err(Error::Divergence(format!("|z| = {} is not below one", abs_z.to_f64())));
    }
    let lz = ln_abs(&abs_z);
    let la = ln_abs(&a.abs());
    let lq = q.log_q().to_f64();
    // |t_{k+1}/t_k| <= (1 + |a| q^k) |z| / (1 - q^{k+1}), decreasing in k.
    let plan = plan_series(spec, accuracy, |k| {
        let x = (la + k as f64 * lq).exp();
        x.ln_1p() + lz - ln_one_minus_q_pow(lq, k + 1)
    })?;
    let prec = spec.work_bits() + extra_bits(&plan);
    let qq = q.at_prec(prec);
    let a = a.with_prec(prec);
    let z = z.with_prec(prec);
    let one = XComplex::one(prec);
    let mut term = one.clone();
    let mut sum = one.clone();
    let mut aqk = a.clone();
    let mut geometric = Float::with_val(prec, 1);
    for k in 0..plan.terms - 1 {
        if k > 0 {
            geometric *= qq.q();
            geometric += 1;
        }
        // 1 - q^{k+1} = (1 - q)(1 + q + ... + q^k)
        let denom = Float::with_val(prec, qq.one_minus_q() * &geometric);
        let num = &one - &aqk;
        term = &(&term * &num) * &z;
        term = term.scale(&denom.recip());
        sum += &term;
        aqk = aqk.scale(qq.q());
    }
    let mut bound = Float::with_val(BOUND_BITS, plan.ln_tail).exp();
    bound += rounding_allowance(&Float::with_val(BOUND_BITS, plan.ln_max_term).exp(), plan.terms, prec);
    bound += rounding_allowance(&Float::with_val(BOUND_BITS, sum.abs()), 0, spec.work_bits());
    Ok(TruncatedValue {
        value: sum.with_prec(spec.work_bits()),
        remainder: ErrorBound::rigorous(&bound),
        terms: plan.terms,
    })
}

/// `(z;q)_inf = sum_k q^{k(k-1)/2} (-z)^k / (q;q)_k`, entire in `z`.
pub fn euler_series(z: &XComplex, q: &QNome, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    let wb = spec.work_bits();
    if z.is_zero() {
        return Ok(TruncatedValue::exact(XComplex::one(wb)));
    }
    let lz = ln_abs(&z.abs());
    let lq = q.log_q().to_f64();
    // |t_{k+1}/t_k| = q^k |z| / (1 - q^{k+1}), decreasing in k.
    let plan = plan_series(spec, Accuracy::Absolute, |k| k as f64 * lq + lz - ln_one_minus_q_pow(lq, k + 1))?;
    let prec = wb + extra_bits(&plan);
    let qq = q.at_prec(prec);
    let minus_z = -&z.with_prec(prec);
    let one = XComplex::one(prec);
    let mut term = one.clone();
    let mut sum = one;
    let mut qk = Float::with_val(prec, 1);
    let mut geometric = Float::with_val(prec, 1);
    for k in 0..plan.terms - 1 {
        if k > 0 {
            geometric *= qq.q();
            geometric += 1;
        }
        // 1 - q^{k+1} = (1 - q)(1 + q + ... + q^k)
        let denom = Float::with_val(prec, qq.one_minus_q() * &geometric);
        let w = Float::with_val(prec, &qk / &denom);
        term = (&term * &minus_z).scale(&w);
        sum += &term;
        qk *= qq.q();
    }
    let mut bound = Float::with_val(BOUND_BITS, plan.ln_tail).exp();
    bound += rounding_allowance(&Float::with_val(BOUND_BITS, plan.ln_max_term).exp(), plan.terms, prec);
    bound += rounding_allowance(&Float::with_val(BOUND_BITS, sum.abs()), 0, wb);
    Ok(TruncatedValue {
        value: sum.with_prec(wb),
        remainder: ErrorBound::rigorous(&bound),
        terms: plan.terms,
    })
}
