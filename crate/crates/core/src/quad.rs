//! Double-exponential quadrature for positive integrands.
//!
//! `tanh-sinh` covers a finite interval with integrable endpoint
//! singularities, `exp-sinh` a half line with fast decay. Both use the
//! trapezoid rule in `u` on levels `h = 2^-l`, each level reusing the nodes of
//! the previous one; nodes of a level are evaluated through [`crate::par`].

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::precision::log2_abs;

#[derive(Clone, Debug)]
pub enum DeMap {
    /// `t = a + (b - a) / (1 + e^{-pi sinh u})`
    TanhSinh { a: Float, b: Float },
    /// `t = a + e^{(pi/2) sinh u}`
    ExpSinh { a: Float },
}

impl DeMap {
    /// Node `t(u)` and weight `dt/du`.
    fn node(&self, u: &Float, prec: u32) -> (Float, Float) {
        let pi = Float::with_val(prec, Constant::Pi);
        let (sh, ch) = Float::with_val(prec, u).sinh_cosh(Float::new(prec));
        match self {
            DeMap::TanhSinh { a, b } => {
                let s = Float::with_val(prec, &pi * &sh);
                let width = Float::with_val(prec, b - a);
                // sigma = 1/(1+e^{-s}), 1 - sigma = 1/(1+e^{s})
                let e = Float::with_val(prec, s.exp_ref());
                let sigma_c = Float::with_val(prec, Float::with_val(prec, &e + 1u32).recip_ref());
                let sigma = Float::with_val(prec, &e * &sigma_c);
                let t = Float::with_val(prec, &width * &sigma) + a;
                let w = Float::with_val(prec, &width * &pi) * ch * sigma * sigma_c;
                (t, w)
            }
            DeMap::ExpSinh { a } => {
                let half_pi = pi / 2u32;
                let e = Float::with_val(prec, &half_pi * &sh).exp();
                let t = Float::with_val(prec, &e + a);
                let w = half_pi * ch * e;
                (t, w)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct DeResult {
    pub value: Float,
    /// Difference between the last two levels.
    pub error_estimate: Float,
    pub evaluations: u64,
    pub level: u32,
}

/// Integrates `f` over the map's interval to relative accuracy `2^-rel_bits`.
pub fn integrate<F>(map: &DeMap, f: F, prec: u32, rel_bits: u32, max_level: u32, exec: Execution) -> Result<DeResult>
where
    F: Fn(&Float) -> Result<Float> + Sync + Send,
{
    let g = |u: f64| -> Result<Float> {
        let (t, w) = map.node(&Float::with_val(prec, u), prec);
        if w.is_zero() {
            return Ok(w);
        }
        Ok(f(&t)? * w)
    };

    // Truncate the u range where the transformed integrand is negligible
    // against the largest sample.
    let step = 0.25;
    let cut = -(f64::from(prec) + 8.0);
    let mut peak = log2_abs(&g(0.0)?);
    let mut evaluations = 1u64;
    let mut ends = [0.0f64; 2];
    for (side, dir) in [(0usize, -1.0f64), (1, 1.0)] {
        let mut u = 0.0;
        let mut quiet = 0;
        while quiet < 2 {
            u += dir * step;
            if u.abs() > 12.0 {
                return Err(Error::Quadrature("integrand does not decay within |u| <= 12".into()));
            }
            let v = log2_abs(&g(u)?);
            evaluations += 1;
            peak = peak.max(v);
            if v < peak + cut {
                quiet += 1;
            } else {
                quiet = 0;
            }
        }
        ends[side] = u;
    }
    let (lo, hi) = (ends[0], ends[1]);

    let sum_nodes = |h: f64, odd_only: bool| -> Result<Float> {
        let k_lo = (lo / h).floor() as i64;
        let k_hi = (hi / h).ceil() as i64;
        let ks: Vec<i64> = (k_lo..=k_hi).filter(|k| !odd_only || k.rem_euclid(2) == 1).collect();
        let vals = par::map_slice(exec, &ks, |&k| g(k as f64 * h));
        let mut acc = Float::new(prec);
        for v in vals {
            acc += v?;
        }
        Ok(acc)
    };

    let mut h = 1.0f64;
    let mut total = sum_nodes(h, false)?;
    evaluations += ((hi - lo) / h) as u64 + 1;
    let mut estimate = Float::with_val(prec, &total * h);
    for level in 1..=max_level {
        h /= 2.0;
        total += sum_nodes(h, true)?;
        evaluations += ((hi - lo) / (2.0 * h)) as u64 + 1;
        let next = Float::with_val(prec, &total * h);
        let diff = Float::with_val(prec, &next - &estimate).abs();
        estimate = next;
        let converged = level >= 3 && log2_abs(&diff) <= log2_abs(&estimate) - f64::from(rel_bits);
        if converged || level == max_level {
            if !converged {
                return Err(Error::Quadrature(format!(
                    "relative change 2^{:.1} after {level} levels",
                    log2_abs(&diff) - log2_abs(&estimate)
                )));
            }
            return Ok(DeResult { value: estimate, error_estimate: diff, evaluations, level });
        }
    }
    unreachable!("loop returns at max_level")
}
