//! Precision contract shared by every evaluation routine.
//!
//! A [`PrecisionSpec`] fixes the binary working precision, the absolute error
//! the caller asks for, and how many guard bits separate the two. Every public
//! operation takes one by reference; identical specs and inputs always give
//! bit-identical results, whether the parallel or sequential executor runs.

use rug::float::Round;
use rug::ops::AssignRound;
use rug::Float;

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::xcomplex::XComplex;

/// Precision used to store error magnitudes and targets.
pub(crate) const BOUND_BITS: u32 = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct PrecisionSpec {
    work_bits: u32,
    target_abs_err: Float,
    guard_bits: u32,
    term_budget: u64,
    execution: Execution,
}

impl PrecisionSpec {
    pub const MIN_WORK_BITS: u32 = 53;
    pub const DEFAULT_GUARD_BITS: u32 = 20;
    pub const DEFAULT_TERM_BUDGET: u64 = 1 << 24;

    /// Spec whose target is `2^-(work_bits - 20)`.
    pub fn bits(work_bits: u32) -> Result<Self> {
        Self::with_target_log2(
            work_bits,
            -(i64::from(work_bits) - i64::from(Self::DEFAULT_GUARD_BITS)),
            Self::DEFAULT_GUARD_BITS,
        )
    }

    /// Spec with an explicit absolute target given as a float.
    pub fn new(work_bits: u32, target_abs_err: f64, guard_bits: u32) -> Result<Self> {
        if !(target_abs_err.is_finite() && target_abs_err > 0.0) {
            return Err(Error::Config(format!(
                "target_abs_err must be a positive finite number, got {target_abs_err}"
            )));
        }
        Self::build(
            work_bits,
            Float::with_val(BOUND_BITS, target_abs_err),
            guard_bits,
        )
    }

    /// Spec with target `2^target_log2`.
    pub fn with_target_log2(work_bits: u32, target_log2: i64, guard_bits: u32) -> Result<Self> {
        let exp = i32::try_from(target_log2)
            .map_err(|_| Error::Config(format!("target exponent {target_log2} out of range")))?;
        Self::build(
            work_bits,
            Float::with_val(BOUND_BITS, Float::i_exp(1, exp)),
            guard_bits,
        )
    }

    fn build(work_bits: u32, target_abs_err: Float, guard_bits: u32) -> Result<Self> {
        if work_bits < Self::MIN_WORK_BITS {
            return Err(Error::Config(format!(
                "work_bits must be at least {}, got {work_bits}",
                Self::MIN_WORK_BITS
            )));
        }
        if guard_bits >= work_bits {
            return Err(Error::Config(format!(
                "guard_bits ({guard_bits}) must be smaller than work_bits ({work_bits})"
            )));
        }
        let floor_exp = -(i64::from(work_bits) - i64::from(guard_bits));
        let floor = Float::with_val(BOUND_BITS, Float::i_exp(1, floor_exp as i32));
        if target_abs_err < floor {
            return Err(Error::Config(format!(
                "target_abs_err {} is below 2^{floor_exp}, unreachable at {work_bits} working bits with {guard_bits} guard bits",
                target_abs_err.to_f64()
            )));
        }
        Ok(Self {
            work_bits,
            target_abs_err,
            guard_bits,
            term_budget: Self::DEFAULT_TERM_BUDGET,
            execution: Execution::default(),
        })
    }

    pub fn work_bits(&self) -> u32 {
        self.work_bits
    }

    pub fn guard_bits(&self) -> u32 {
        self.guard_bits
    }

    pub fn target_abs_err(&self) -> &Float {
        &self.target_abs_err
    }

    /// `log2` of the absolute target.
    pub fn target_log2(&self) -> f64 {
        log2_abs(&self.target_abs_err)
    }

    /// Natural log of the absolute target.
    pub fn target_ln(&self) -> f64 {
        self.target_log2() * std::f64::consts::LN_2
    }

    /// Relative accuracy goal used where absolute error is meaningless
    /// (values spanning many orders of magnitude).
    pub fn relative_target_ln(&self) -> f64 {
        -(f64::from(self.work_bits - self.guard_bits)) * std::f64::consts::LN_2
    }

    pub fn term_budget(&self) -> u64 {
        self.term_budget
    }

    pub fn execution(&self) -> Execution {
        self.execution
    }

    pub fn with_term_budget(mut self, budget: u64) -> Self {
        self.term_budget = budget;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    /// Same spec at `factor` times the working precision, with the target
    /// tightened accordingly. Used for reference evaluations.
    pub fn scaled(&self, factor: u32) -> Self {
        let work_bits = self.work_bits * factor.max(1);
        let mut out = Self::bits(work_bits).expect("scaling a valid spec stays valid");
        out.term_budget = self.term_budget;
        out.execution = self.execution;
        out
    }

    /// Adds `extra` bits of precision and tightens the target by `2^-extra`.
    pub fn refined(&self, extra: u32) -> Self {
        let mut out = self.clone();
        out.work_bits += extra;
        out.target_abs_err >>= extra;
        out
    }

    pub fn real<T>(&self, value: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.work_bits, value)
    }

    pub fn complex(&self, re: f64, im: f64) -> XComplex {
        XComplex::from_f64(self.work_bits, re, im)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.work_bits, rug::float::Constant::Pi)
    }

    /// Number of decimal digits this precision can honestly print.
    pub fn printable_digits(&self) -> usize {
        let digits = (f64::from(self.work_bits) * std::f64::consts::LOG10_2).floor() as i64 - 2;
        digits.max(1) as usize
    }
}

/// Runs `computation` under `spec`.
///
/// The computation only ever sees the spec it was given, so repeating the call
/// with an identical spec reproduces the result bit for bit.
pub fn with_precision<T>(
    spec: &PrecisionSpec,
    computation: impl FnOnce(&PrecisionSpec) -> Result<T>,
) -> Result<T> {
    computation(spec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundKind {
    Rigorous,
    Heuristic,
}

/// Absolute error bound attached to a computed value.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorBound {
    pub kind: BoundKind,
    pub magnitude: Float,
}

impl ErrorBound {
    pub fn rigorous(magnitude: &Float) -> Self {
        Self {
            kind: BoundKind::Rigorous,
            magnitude: round_up(magnitude),
        }
    }

    pub fn heuristic(magnitude: &Float) -> Self {
        Self {
            kind: BoundKind::Heuristic,
            magnitude: round_up(magnitude),
        }
    }

    pub fn zero() -> Self {
        Self {
            kind: BoundKind::Rigorous,
            magnitude: Float::new(BOUND_BITS),
        }
    }

    pub fn is_rigorous(&self) -> bool {
        self.kind == BoundKind::Rigorous
    }

    /// Sum of two bounds; rigorous only if both are.
    pub fn combine(&self, other: &ErrorBound) -> ErrorBound {
        let kind = if self.is_rigorous() && other.is_rigorous() {
            BoundKind::Rigorous
        } else {
            BoundKind::Heuristic
        };
        let mut magnitude = Float::new(BOUND_BITS);
        magnitude.assign_round(&self.magnitude + &other.magnitude, Round::Up);
        ErrorBound { kind, magnitude }
    }

    pub fn to_f64(&self) -> f64 {
        self.magnitude.to_f64_round(Round::Up)
    }
}

/// A computed value together with its error bound and the number of terms
/// or factors that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedValue {
    pub value: XComplex,
    pub remainder: ErrorBound,
    pub terms: u64,
}

impl TruncatedValue {
    pub fn exact(value: XComplex) -> Self {
        Self {
            value,
            remainder: ErrorBound::zero(),
            terms: 0,
        }
    }
}

pub(crate) fn round_up(x: &Float) -> Float {
    let mut out = Float::new(BOUND_BITS);
    out.assign_round(x.abs_ref(), Round::Up);
    out
}

/// `log2 |x|` as a double, `-inf` for zero. Works far outside the `f64`
/// exponent range.
pub fn log2_abs(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    if !x.is_finite() {
        return f64::INFINITY;
    }
    let (mant, exp) = x.to_f64_exp();
    mant.abs().log2() + f64::from(exp)
}

/// `ln |x|` as a double.
pub fn ln_abs(x: &Float) -> f64 {
    log2_abs(x) * std::f64::consts::LN_2
}
