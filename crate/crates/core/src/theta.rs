//! Jacobi theta functions and the Dedekind eta function.
//!
//! Conventions: `q = e^{pi i tau}` and `z = e^{2 pi i v}`, so that
//! `theta_3(v|tau) = sum_k q^{k^2} z^k`. The product-style notation
//! `theta_j(z; q)` names the same functions through `z` and `q`.
//!
//! For lattices with `Im tau < 1` the modular transformation `tau -> -1/tau`
//! moves the evaluation to a lattice with fast Gaussian decay.

use rug::float::{Constant, Round};
use rug::ops::{AddAssignRound, AssignRound, MulAssignRound, Pow};
use rug::Float;

use crate::error::{Error, Result};
use crate::precision::{log2_abs, ErrorBound, PrecisionSpec, TruncatedValue, BOUND_BITS};
use crate::qseries::{qpoch_direct, Accuracy, QNome};
use crate::xcomplex::XComplex;

const LN_2: f64 = std::f64::consts::LN_2;

fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// `e^{pi i w}`.
fn exp_pi_i(w: &XComplex) -> XComplex {
    let p = w.prec();
    w.scale(&pi(p)).mul_i().exp()
}

/// Modular variable `tau` with `Im tau > 0`, carrying `q = e^{pi i tau}` and
/// the nome `q' = e^{-pi i / tau}` of the transformed lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeParam {
    tau: XComplex,
    nome: XComplex,
    nome_prime: XComplex,
}

impl LatticeParam {
    pub fn new(tau: XComplex) -> Result<Self> {
        if !(tau.im > 0) {
            return Err(Error::Domain(format!("Im tau must be positive, got {}", tau.im.to_f64())));
        }
        let nome = exp_pi_i(&tau);
        let tau_prime = -&tau.recip();
        let nome_prime = exp_pi_i(&tau_prime);
        Ok(Self { tau, nome, nome_prime })
    }

    /// `tau = i t`.
    pub fn imaginary(t: &Float) -> Result<Self> {
        Self::new(XComplex::new(Float::new(t.prec()), t.clone()))
    }

    pub fn tau(&self) -> &XComplex {
        &self.tau
    }

    pub fn nome(&self) -> &XComplex {
        &self.nome
    }

    pub fn nome_prime(&self) -> &XComplex {
        &self.nome_prime
    }

    pub fn prec(&self) -> u32 {
        self.tau.prec()
    }

    /// The lattice `-1/tau`.
    pub fn transformed(&self) -> LatticeParam {
        Self::new(-&self.tau.recip()).expect("-1/tau stays in the upper half plane")
    }

    pub fn at_prec(&self, prec: u32) -> LatticeParam {
        Self::new(self.tau.with_prec(prec)).expect("re-rounding keeps Im tau positive")
    }

    /// Whether the transformed lattice decays faster.
    pub fn prefers_modular(&self) -> bool {
        if !(self.tau.im < 1) {
            return false;
        }
        let tp = self.tau.recip();
        // Im(-1/tau) = Im tau / |tau|^2
        -Float::with_val(tp.prec(), &tp.im) > self.tau.im
    }
}

/// Theta argument `v`, with `z = e^{2 pi i v}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaArg {
    v: XComplex,
    z: XComplex,
}

impl ThetaArg {
    pub fn from_v(v: XComplex) -> Self {
        let z = exp_pi_i(&v.scale(&Float::with_val(v.prec(), 2)));
        Self { v, z }
    }

    /// From the multiplicative variable `z != 0`, with `v` on the principal
    /// branch of `ln z / (2 pi i)`.
    pub fn from_z(z: XComplex) -> Result<Self> {
        if z.is_zero() {
            return Err(Error::Domain("theta argument z must be nonzero".into()));
        }
        let p = z.prec();
        let ln = z.ln();
        let two_pi = pi(p) * 2u32;
        // ln z / (2 pi i) = -i ln z / (2 pi)
        let v = XComplex::new(
            Float::with_val(p, &ln.im / &two_pi),
            -Float::with_val(p, &ln.re / &two_pi),
        );
        Ok(Self { v, z })
    }

    pub fn v(&self) -> &XComplex {
        &self.v
    }

    pub fn z(&self) -> &XComplex {
        &self.z
    }

    pub fn at_prec(&self, prec: u32) -> ThetaArg {
        Self::from_v(self.v.with_prec(prec))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ThetaKind {
    One,
    Two,
    Three,
    Four,
}

impl ThetaKind {
    pub const ALL: [ThetaKind; 4] = [ThetaKind::One, ThetaKind::Two, ThetaKind::Three, ThetaKind::Four];

    pub fn from_index(j: u8) -> Result<Self> {
        match j {
            1 => Ok(Self::One),
            2 => Ok(Self::Two),
            3 => Ok(Self::Three),
            4 => Ok(Self::Four),
            _ => Err(Error::Domain(format!("theta index must be 1..4, got {j}"))),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Self::One => 1,
            Self::Two => 2,
            Self::Three => 3,
            Self::Four => 4,
        }
    }

    /// Function on the fast lattice that this one is expressed through under
    /// `tau -> -1/tau`.
    pub fn modular_partner(self) -> Self {
        match self {
            Self::One => Self::One,
            Self::Two => Self::Four,
            Self::Three => Self::Three,
            Self::Four => Self::Two,
        }
    }

    fn half_integer(self) -> bool {
        matches!(self, Self::One | Self::Two)
    }

    fn alternating(self) -> bool {
        matches!(self, Self::One | Self::Four)
    }
}

fn bits_for(n: u64) -> u32 {
    64 - n.leading_zeros()
}

/// Lattice sum with cutoff from the Gaussian majorant
/// `|q|^{m^2} e^{2 pi |m| |Im v|}`.
pub fn theta_series(kind: ThetaKind, arg: &ThetaArg, lattice: &LatticeParam, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    theta_series_with(kind, arg, lattice, spec, Accuracy::Absolute)
}

fn theta_series_with(
    kind: ThetaKind,
    arg: &ThetaArg,
    lattice: &LatticeParam,
    spec: &PrecisionSpec,
    accuracy: Accuracy,
) -> Result<TruncatedValue> {
    let wb = spec.work_bits();
    if kind == ThetaKind::One && arg.v.is_zero() {
        // odd function
        return Ok(TruncatedValue::exact(XComplex::zero(wb)));
    }
    let lambda = (pi(BOUND_BITS) * &lattice.tau.im).to_f64();
    let y = arg.v.im.to_f64().abs();
    let two_pi_y = 2.0 * std::f64::consts::PI * y;
    let m0 = if kind.half_integer() { 0.5 } else { 0.0 };
    let ln_f = |m: f64| -lambda * m * m + two_pi_y * m;
    let peak = two_pi_y / (2.0 * lambda);
    let ln_max = ln_f(peak).max(0.0);
    // largest actual term, -lambda m^2 - 2 pi m Im v over the lattice
    let im_v = arg.v.im.to_f64();
    let ln_term = |m: f64| -lambda * m * m - 2.0 * std::f64::consts::PI * im_v * m;
    let vertex = -std::f64::consts::PI * im_v / lambda - m0;
    let ln_lead = ln_term(vertex.floor() + m0).max(ln_term(vertex.ceil() + m0));
    let (goal, raise) = match accuracy {
        Accuracy::Absolute => (spec.target_ln() - LN_2, ln_max),
        Accuracy::Relative => (spec.relative_target_ln() - LN_2 + ln_lead, (ln_max - ln_lead).max(0.0)),
    };

    // N terms each way leaves |m| >= N + m0 on both sides.
    let mut n = 1u64;
    let ln_tail = loop {
        let m = n as f64 + m0;
        if m >= peak {
            let ln_rho = -lambda * (2.0 * m + 1.0) + two_pi_y;
            if ln_rho < 0.0 {
                let t = LN_2 + ln_f(m) - (-ln_rho.exp_m1()).ln();
                if t <= goal {
                    break t;
                }
            }
        }
        if 2 * n > spec.term_budget() {
            return Err(Error::PrecisionUnreachable(format!(
                "theta series needs more than {} terms",
                spec.term_budget()
            )));
        }
        n += 1;
    };

    let prec = wb + (raise / LN_2).ceil() as u32 + bits_for(2 * n) + 8;
    let tau = lattice.tau.with_prec(prec);
    let v = arg.v.with_prec(prec);
    let two = Float::with_val(prec, 2);
    let half = Float::with_val(prec, m0);

    // T(m) = e^{pi i (tau m^2 + 2 m v)}; ratios advance by q^2.
    let first_exp = &tau.scale(&Float::with_val(prec, &half * &half)) + &v.scale(&Float::with_val(prec, &half * &two));
    let first = exp_pi_i(&first_exp);
    let q2 = exp_pi_i(&tau.scale(&two));
    let mut up_ratio = exp_pi_i(&(&tau.scale(&Float::with_val(prec, 2.0 * m0 + 1.0)) + &v.scale(&two)));
    let mut down_ratio = exp_pi_i(&(&tau.scale(&Float::with_val(prec, 1.0 - 2.0 * m0)) - &v.scale(&two)));
    if kind.alternating() {
        up_ratio = -up_ratio;
        down_ratio = -down_ratio;
    }

    let mut sum = first.clone();
    let mut term = first.clone();
    for _ in 1..n {
        term = &term * &up_ratio;
        sum += &term;
        up_ratio = &up_ratio * &q2;
    }
    let mut term = first;
    for _ in 0..n {
        term = &term * &down_ratio;
        sum += &term;
        down_ratio = &down_ratio * &q2;
    }
    if kind == ThetaKind::One {
        // -i sum
        sum = -sum.mul_i();
    }

    let mut bound = Float::with_val(BOUND_BITS, ln_tail);
    bound.exp_round(Round::Up);
    let mut rounding = Float::with_val(BOUND_BITS, ln_max.max(ln_lead)).exp();
    rounding *= 2 * n + 4;
    rounding >>= prec - 2;
    bound += rounding;
    bound += Float::with_val(BOUND_BITS, sum.abs()) >> wb;
    Ok(TruncatedValue {
        value: sum.with_prec(wb),
        remainder: ErrorBound::rigorous(&bound),
        terms: 2 * n,
    })
}

/// Product of values with individual error bounds, times an exact prefactor.
fn combine_products(prefactor: &XComplex, parts: &[TruncatedValue], wb: u32) -> (XComplex, Float) {
    let prec = parts.iter().map(|p| p.value.prec()).max().unwrap_or(wb).max(prefactor.prec());
    let mut value = prefactor.with_prec(prec);
    for p in parts {
        value = &value * &p.value;
    }
    // prod (|x_i| + e_i) - prod |x_i| = sum_i e_i prod_{j<i} (|x_j| + e_j) prod_{j>i} |x_j|,
    // summed term by term so the bound carries no cancellation
    let abs: Vec<Float> = parts.iter().map(|p| Float::with_val_round(BOUND_BITS, p.value.abs(), Round::Up).0).collect();
    let mut err = Float::new(BOUND_BITS);
    let mut head = Float::with_val_round(BOUND_BITS, prefactor.abs(), Round::Up).0;
    for (i, p) in parts.iter().enumerate() {
        let mut term = Float::with_val(BOUND_BITS, &head);
        term.mul_assign_round(&p.remainder.magnitude, Round::Up);
        for a in &abs[i + 1..] {
            term.mul_assign_round(a, Round::Up);
        }
        err.add_assign_round(&term, Round::Up);
        let mut up = Float::new(BOUND_BITS);
        up.assign_round(&abs[i] + &p.remainder.magnitude, Round::Up);
        head.mul_assign_round(&up, Round::Up);
    }
    err += Float::with_val(BOUND_BITS, value.abs()) >> (wb - 2);
    (value.with_prec(wb), err)
}

/// Jacobi triple product with modulus `q^2`.
pub fn theta_product(kind: ThetaKind, arg: &ThetaArg, lattice: &LatticeParam, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    let wb = spec.work_bits();
    let mut extra = 8u32;
    loop {
        let inner = spec.refined(extra);
        let p = inner.work_bits();
        let tau = lattice.tau.with_prec(p);
        let v = arg.v.with_prec(p);
        let q = exp_pi_i(&tau);
        let q2 = &q * &q;
        let z = exp_pi_i(&v.scale(&Float::with_val(p, 2)));
        let zi = z.recip();
        let (a1, a2, prefactor) = match kind {
            ThetaKind::One | ThetaKind::Two => {
                let quarter = exp_pi_i(&tau.scale(&Float::with_val(p, 0.25)));
                let pv = v.scale(&pi(p));
                let trig = if kind == ThetaKind::One { pv.sin() } else { pv.cos() };
                let pre = (&quarter * &trig).scale(&Float::with_val(p, 2));
                let (b1, b2) = (&q2 * &z, &q2 * &zi);
                if kind == ThetaKind::One {
                    (b1, b2, pre)
                } else {
                    (-b1, -b2, pre)
                }
            }
            ThetaKind::Three => (-(&q * &z), -(&q * &zi), XComplex::one(p)),
            ThetaKind::Four => (&q * &z, &q * &zi, XComplex::one(p)),
        };
        let parts = [
            qpoch_direct(&q2, &q2, &inner, Accuracy::Absolute)?,
            qpoch_direct(&a1, &q2, &inner, Accuracy::Absolute)?,
            qpoch_direct(&a2, &q2, &inner, Accuracy::Absolute)?,
        ];
        let (value, err) = combine_products(&prefactor, &parts, wb);
        if err <= *spec.target_abs_err() || extra > 4 * wb {
            let terms = parts.iter().map(|p| p.terms).sum();
            return Ok(TruncatedValue { value, remainder: ErrorBound::rigorous(&err), terms });
        }
        let over = log2_abs(&err) - spec.target_log2();
        extra += over.ceil().max(1.0) as u32 + 2;
    }
}

/// `theta_j(v|tau)` evaluated on the lattice `-1/tau`:
/// `theta_j(v|tau) = c_j sqrt(tau'/i) e^{pi i v'^2/tau'} theta_k(v'|tau')` with
/// `tau' = -1/tau`, `v' = -v/tau`, `k` the modular partner of `j`, and
/// `c_1 = -i`, `c_j = 1` otherwise.
pub fn theta_modular(kind: ThetaKind, arg: &ThetaArg, lattice: &LatticeParam, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    theta_modular_with(kind, arg, lattice, spec, Accuracy::Absolute)
}

fn theta_modular_with(
    kind: ThetaKind,
    arg: &ThetaArg,
    lattice: &LatticeParam,
    spec: &PrecisionSpec,
    accuracy: Accuracy,
) -> Result<TruncatedValue> {
    let wb = spec.work_bits();
    let p = wb + 16;
    let tau = lattice.tau.with_prec(p);
    let tau_p = -&tau.recip();
    let v = arg.v.with_prec(p);
    let v_p = -&(&v / &tau);
    let mut prefactor = (&tau_p * &XComplex::i(p).recip()).sqrt();
    let phase = exp_pi_i(&(&(&v_p * &v_p) / &tau_p));
    prefactor = &prefactor * &phase;
    if kind == ThetaKind::One {
        prefactor = -prefactor.mul_i();
    }
    let scale_bits = match accuracy {
        Accuracy::Absolute => log2_abs(&prefactor.abs()).ceil().max(0.0) as u32,
        Accuracy::Relative => 0,
    };
    let inner_spec = spec.refined(scale_bits + 2);
    let inner = theta_series_with(
        kind.modular_partner(),
        &ThetaArg::from_v(v_p),
        &LatticeParam::new(tau_p)?,
        &inner_spec,
        accuracy,
    )?;
    let (value, err) = combine_products(&prefactor, std::slice::from_ref(&inner), wb);
    Ok(TruncatedValue { value, remainder: ErrorBound::rigorous(&err), terms: inner.terms })
}

/// `theta_j(v|tau)`, choosing the cheaper of the direct and modular routes.
pub fn theta(kind: ThetaKind, arg: &ThetaArg, lattice: &LatticeParam, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    if lattice.prefers_modular() {
        theta_modular(kind, arg, lattice, spec)
    } else {
        theta_series(kind, arg, lattice, spec)
    }
}

/// `theta_j(v|tau)` to relative accuracy `2^-(work_bits - guard_bits)` with
/// respect to its largest lattice term, for values far below one such as
/// `theta_4(0|it)` with small `t`. Cancellation below that scale (near zeros)
/// is not resolved.
pub fn theta_relative(kind: ThetaKind, arg: &ThetaArg, lattice: &LatticeParam, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    if lattice.prefers_modular() {
        theta_modular_with(kind, arg, lattice, spec, Accuracy::Relative)
    } else {
        theta_series_with(kind, arg, lattice, spec, Accuracy::Relative)
    }
}

/// `eta(tau) = e^{pi i tau/12} (q^2;q^2)_inf` by direct product.
pub fn eta_direct(lattice: &LatticeParam, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    let wb = spec.work_bits();
    let p = wb + 8;
    let tau = lattice.tau.with_prec(p);
    let q2 = exp_pi_i(&tau.scale(&Float::with_val(p, 2)));
    let pre = exp_pi_i(&tau.scale(&Float::with_val(p, 12).recip()));
    let prod = qpoch_direct(&q2, &q2, &spec.refined(2), Accuracy::Absolute)?;
    let terms = prod.terms;
    let (value, err) = combine_products(&pre, &[prod], wb);
    Ok(TruncatedValue { value, remainder: ErrorBound::rigorous(&err), terms })
}

/// `eta(tau) = sqrt(tau'/i) eta(tau')` with `tau' = -1/tau`.
pub fn eta_transformed(lattice: &LatticeParam, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    let wb = spec.work_bits();
    let p = wb + 16;
    let tau_p = -&lattice.tau.with_prec(p).recip();
    let pre = (&tau_p * &XComplex::i(p).recip()).sqrt();
    let scale_bits = log2_abs(&pre.abs()).ceil().max(0.0) as u32;
    let inner = eta_direct(&LatticeParam::new(tau_p)?, &spec.refined(scale_bits + 2))?;
    let terms = inner.terms;
    let (value, err) = combine_products(&pre, &[inner], wb);
    Ok(TruncatedValue { value, remainder: ErrorBound::rigorous(&err), terms })
}

/// `eta(tau)`, transforming first when `Im tau < 1`.
pub fn eta(lattice: &LatticeParam, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    if lattice.prefers_modular() {
        eta_transformed(lattice, spec)
    } else {
        eta_direct(lattice, spec)
    }
}

/// `(q;q)_inf` through the eta transformation. With `q = e^{-2 pi t}`,
///
/// `(q;q)_inf = sqrt(1/t) exp(pi/12 (t - 1/t)) prod_{k>=1} (1 - e^{-2 pi k/t})`,
///
/// exactly. The product has `O(t log(1/eps))` factors, so it is cheap
/// precisely when the direct product is slow. The result carries relative
/// accuracy `2^-(work_bits - guard_bits)`, which also meets the absolute
/// target since `(q;q)_inf < 1`.
pub fn qq_infinity_fast(q: &QNome, spec: &PrecisionSpec) -> Result<TruncatedValue> {
    let wb = spec.work_bits();
    let p0 = wb + 16;
    let t0 = q.at_prec(p0).tau();
    let t_inv0 = Float::with_val(p0, t0.recip_ref());
    // the exponent may be large; keep its absolute error well below 2^-wb
    let arg_bits = log2_abs(&t_inv0).max(log2_abs(&t0)).max(0.0).ceil() as u32;
    let p = p0 + arg_bits;
    let t = q.at_prec(p).tau();
    let t_inv = Float::with_val(p, t.recip_ref());
    let pi_p = pi(p);
    let mut expo = Float::with_val(p, &t - &t_inv);
    expo *= &pi_p;
    expo /= 12u32;
    let pre = Float::with_val(p, t_inv.sqrt_ref()) * expo.exp();

    // Q = e^{-2 pi / t}
    let big_q = Float::with_val(p, -(&t_inv * pi_p) * 2u32).exp();
    let inner = qpoch_direct(
        &XComplex::from_real(big_q.clone()),
        &XComplex::from_real(big_q),
        spec,
        Accuracy::Relative,
    )?;
    let value = inner.value.with_prec(p).scale(&pre);
    let abs_v = Float::with_val(BOUND_BITS, value.abs());
    let mut rel = Float::new(BOUND_BITS);
    rel.assign_round(spec.relative_target_ln(), Round::Up);
    rel.exp_round(Round::Up);
    let mut bound = Float::with_val(BOUND_BITS, &abs_v * &rel);
    bound += abs_v >> (wb - 2);
    Ok(TruncatedValue {
        value: value.with_prec(wb),
        remainder: ErrorBound::rigorous(&bound),
        terms: inner.terms,
    })
}

/// Parameters `q = e^{-2 pi / (gamma n^a)}`, `0 < a < 1`, `gamma > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Lemma2Regime {
    pub a_exp: f64,
    pub n: u64,
    pub gamma: f64,
}

impl Lemma2Regime {
    pub fn new(a_exp: f64, n: u64, gamma: f64) -> Result<Self> {
        if !(a_exp > 0.0 && a_exp < 1.0) {
            return Err(Error::Domain(format!("a_exp must lie in (0,1), got {a_exp}")));
        }
        if n == 0 {
            return Err(Error::Domain("n must be positive".into()));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
        }
        Ok(Self { a_exp, n, gamma })
    }

    /// `s = gamma n^a` at `prec` bits.
    pub fn scale(&self, prec: u32) -> Float {
        let n = Float::with_val(prec, self.n);
        let a = Float::with_val(prec, self.a_exp);
        Float::with_val(prec, n.pow(&a)) * self.gamma
    }

    /// The induced nome `e^{-2 pi / s}`.
    pub fn nome(&self, prec: u32) -> Result<QNome> {
        let s = self.scale(prec);
        QNome::from_tau(&Float::with_val(prec, s.recip_ref()))
    }
}

/// Main term of `(q;q)_inf` and its modeled relative error.
#[derive(Clone, Debug, PartialEq)]
pub struct Lemma2Estimate {
    /// `sqrt(s) exp(pi/12 (1/s - s))`
    pub value: Float,
    /// `exp(pi/12 (s - 1/s)) / sqrt(s)`, the reciprocal form
    pub reciprocal: Float,
    /// `e^{-2 pi s}`
    pub relerr_model: Float,
}

pub fn lemma2_estimate(regime: &Lemma2Regime, prec: u32) -> Lemma2Estimate {
    let s = regime.scale(prec);
    let pi_p = pi(prec);
    let s_inv = Float::with_val(prec, s.recip_ref());
    let expo = Float::with_val(prec, &s_inv - &s) * &pi_p / 12u32;
    let root = Float::with_val(prec, s.sqrt_ref());
    let value = Float::with_val(prec, expo.exp_ref()) * &root;
    let reciprocal = Float::with_val(prec, (-expo).exp() / &root);
    let relerr_model = Float::with_val(prec, -(s * pi_p) * 2u32).exp();
    Lemma2Estimate { value, reciprocal, relerr_model }
}
