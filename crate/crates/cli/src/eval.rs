//! Point evaluation of a single function.

use std::collections::BTreeMap;

use qgamma_core::qgamma::{gamma_q, gamma_ref, q_integral_representation, GammaRef, QGammaArg};
use qgamma_core::qseries::{
    lemma1_direct, lemma1_direct_auto, lemma1_reciprocal, lemma1_reciprocal_auto, qpoch, PochhammerOrder,
};
use qgamma_core::theta::{eta, qq_infinity_fast, theta, LatticeParam, ThetaArg, ThetaKind};
use qgamma_core::{BoundKind, PrecisionSpec, QNome, TruncatedValue, XComplex};
use std::str::FromStr;

use rug::{Float, Rational};
use serde::Serialize;

use crate::grid::split_complex;
use crate::CliError;

pub const FUNCTIONS: &[&str] = &[
    "qpoch",
    "qpoch_inf",
    "gamma_q",
    "gamma",
    "theta1",
    "theta2",
    "theta3",
    "theta4",
    "eta",
    "qq_inf_fast",
    "lemma1_recip",
    "lemma1_direct",
    "qintegral",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalOutput {
    pub schema_version: u32,
    pub function: String,
    pub precision_bits: u32,
    pub value: String,
    /// Decimal text; bounds often lie outside the `f64` range.
    pub bound: String,
    pub bound_kind: &'static str,
    pub terms: u64,
    pub formula: &'static str,
}

impl EvalOutput {
    pub fn to_text(&self) -> String {
        format!(
            "value   = {}\nbound   = {} ({})\nterms   = {}\nformula = {}\n",
            self.value, self.bound, self.bound_kind, self.terms, self.formula
        )
    }
}

struct Args {
    map: BTreeMap<String, String>,
    prec: u32,
}

impl Args {
    fn parse(items: &[String], allowed: &[&str], prec: u32) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for item in items {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("argument {item:?} is not key=value")))?;
            let k = k.trim();
            if !allowed.contains(&k) {
                return Err(CliError::Usage(format!("unexpected argument {k:?}; expected {}", allowed.join(", "))));
            }
            map.insert(k.to_string(), v.trim().to_string());
        }
        Ok(Self { map, prec })
    }

    fn text(&self, key: &str) -> Result<&str, CliError> {
        self.map.get(key).map(String::as_str).ok_or_else(|| CliError::Usage(format!("missing argument {key}")))
    }

    fn real(&self, key: &str) -> Result<Float, CliError> {
        let t = self.text(key)?;
        let bad = || CliError::Usage(format!("{key}: {t:?} is not a real number"));
        if t.contains('/') {
            let r = Rational::from_str(t).map_err(|_| bad())?;
            return Ok(Float::with_val(self.prec, r));
        }
        let v = Float::parse(t).map_err(|_| bad())?;
        Ok(Float::with_val(self.prec, v))
    }

    fn complex(&self, key: &str) -> Result<XComplex, CliError> {
        let t = self.text(key)?;
        if t.contains('/') {
            return Ok(XComplex::from_real(self.real(key)?));
        }
        let (re, im) = split_complex(t)?;
        let parse = |s: &str| -> Result<Float, CliError> {
            let v = Float::parse(s).map_err(|_| CliError::Usage(format!("{key}: bad number {s:?}")))?;
            Ok(Float::with_val(self.prec, v))
        };
        Ok(XComplex::new(parse(&re)?, parse(&im)?))
    }

    fn nome(&self) -> Result<QNome, CliError> {
        Ok(QNome::parse(self.text("q")?, self.prec)?)
    }

    fn int(&self, key: &str) -> Result<u64, CliError> {
        let t = self.text(key)?;
        t.parse().map_err(|_| CliError::Usage(format!("{key}: {t:?} is not a non-negative integer")))
    }

    fn has(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }
}

pub fn cmd_eval(function: &str, items: &[String], spec: &PrecisionSpec) -> Result<EvalOutput, CliError> {
    let prec = spec.work_bits() + 64;
    let parse = |allowed: &[&str]| Args::parse(items, allowed, prec);
    let (value, formula): (TruncatedValue, &'static str) = match function {
        "qpoch" => {
            let a = parse(&["a", "q", "n"])?;
            let (order, formula) = match a.text("n")? {
                "inf" => (PochhammerOrder::Infinite, "prod_{k>=0} (1 - a q^k)"),
                _ => (PochhammerOrder::Finite(a.int("n")?), "prod_{k<n} (1 - a q^k)"),
            };
            (qpoch(&a.complex("a")?, &a.nome()?, order, spec)?, formula)
        }
        "qpoch_inf" => {
            let a = parse(&["a", "q"])?;
            (qpoch(&a.complex("a")?, &a.nome()?, PochhammerOrder::Infinite, spec)?, "prod_{k>=0} (1 - a q^k)")
        }
        "gamma_q" => {
            let a = parse(&["z", "q"])?;
            let arg = QGammaArg::new(a.complex("z")?, a.nome()?);
            (gamma_q(&arg, spec)?, "(q;q)_inf / (q^z;q)_inf (1-q)^(1-z)")
        }
        "gamma" => {
            let a = parse(&["z"])?;
            (
                gamma_ref(&GammaRef::new(a.complex("z")?)?, spec)?,
                "Stirling series after an upward shift; reflection for Re z < 1/2",
            )
        }
        "theta1" | "theta2" | "theta3" | "theta4" => {
            let a = parse(&["v", "z", "tau"])?;
            let j = function.as_bytes()[5] - b'0';
            let arg = if a.has("z") { ThetaArg::from_z(a.complex("z")?)? } else { ThetaArg::from_v(a.complex("v")?) };
            let lattice = LatticeParam::new(a.complex("tau")?)?;
            let kind = ThetaKind::from_index(j)?;
            let formula = if lattice.prefers_modular() {
                "series on the lattice -1/tau, mapped back by the modular transformation"
            } else {
                "sum over k of (+-) q^{(k+c)^2} e^{(2k+2c) pi i v}"
            };
            (theta(kind, &arg, &lattice, spec)?, formula)
        }
        "eta" => {
            let a = parse(&["tau"])?;
            let lattice = LatticeParam::new(a.complex("tau")?)?;
            (eta(&lattice, spec)?, "e^{pi i tau/12} prod_{k>=1} (1 - e^{2 pi i k tau})")
        }
        "qq_inf_fast" => {
            let a = parse(&["q"])?;
            (
                qq_infinity_fast(&a.nome()?, spec)?,
                "sqrt(1/t) e^{pi/12 (t - 1/t)} prod_{k>=1} (1 - e^{-2 pi k/t}), q = e^{-2 pi t}",
            )
        }
        "lemma1_recip" | "lemma1_direct" => {
            let a = parse(&["a", "q", "n", "K"])?;
            let (az, q, n) = (a.complex("a")?, a.nome()?, a.int("n")?);
            let recip = function == "lemma1_recip";
            let v = match (recip, a.has("K")) {
                (true, true) => lemma1_reciprocal(&az, &q, n, a.int("K")?, spec)?,
                (true, false) => lemma1_reciprocal_auto(&az, &q, n, spec)?,
                (false, true) => lemma1_direct(&az, &q, n, a.int("K")?, spec)?,
                (false, false) => lemma1_direct_auto(&az, &q, n, spec)?,
            };
            let formula = if recip {
                "1/(a q^n;q)_inf as sum_{k<K} (a q^n)^k / (q;q)_k plus remainder"
            } else {
                "(a q^n;q)_inf as sum_{k<K} q^{k(k-1)/2} (-a q^n)^k / (q;q)_k plus remainder"
            };
            (v, formula)
        }
        "qintegral" => {
            let a = parse(&["x", "q"])?;
            (
                q_integral_representation(&a.real("x")?, &a.nome()?, spec)?,
                "int_0^inf t^(x-1/2) / (-(1-q)t;q)_inf dt by double-exponential quadrature",
            )
        }
        other => {
            return Err(CliError::Usage(format!("unknown function {other:?}; expected one of {}", FUNCTIONS.join(", "))))
        }
    };
    let digits = spec.printable_digits();
    Ok(EvalOutput {
        schema_version: crate::SCHEMA_VERSION,
        function: function.to_string(),
        precision_bits: spec.work_bits(),
        value: format!("{:.*}", digits, value.value),
        bound: value.remainder.magnitude.to_string_radix(10, Some(4)),
        bound_kind: match value.remainder.kind {
            BoundKind::Rigorous => "rigorous",
            BoundKind::Heuristic => "heuristic",
        },
        terms: value.terms,
        formula,
    })
}
