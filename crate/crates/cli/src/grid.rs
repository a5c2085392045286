//! Parameter grids: plain-text `key = values` lines.
//!
//! A value list is comma separated; each item is a number, a complex literal
//! (`i`, `2i`, `1+i`, `0.1-0.05i`), an inclusive integer range `a..b`, or a
//! stepped range `a..b:step`. `#` starts a comment.

use std::path::Path;

use qgamma_core::XComplex;

use crate::CliError;

const PRESETS: &[(&str, &str)] = &[
    ("lemma1", include_str!("../grids/lemma1.grid")),
    ("triple_product", include_str!("../grids/triple_product.grid")),
    ("modular", include_str!("../grids/modular.grid")),
    ("eta_transform", include_str!("../grids/eta_transform.grid")),
    ("lemma2", include_str!("../grids/lemma2.grid")),
    ("reflection", include_str!("../grids/reflection.grid")),
    ("functional_eq", include_str!("../grids/functional_eq.grid")),
    ("gosper_limit", include_str!("../grids/gosper_limit.grid")),
    ("thm23", include_str!("../grids/thm23.grid")),
    ("thm24", include_str!("../grids/thm24.grid")),
    ("qintegral", include_str!("../grids/qintegral.grid")),
];

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    entries: Vec<(String, Vec<String>)>,
}

impl Grid {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries: Vec<(String, Vec<String>)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, values) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("grid line {}: expected key = values", lineno + 1)))?;
            let key = key.trim().to_string();
            if entries.iter().any(|(k, _)| *k == key) {
                return Err(CliError::Usage(format!("grid line {}: duplicate key {key}", lineno + 1)));
            }
            let mut items = Vec::new();
            for item in values.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                items.extend(expand(item).map_err(|e| CliError::Usage(format!("grid line {}: {e}", lineno + 1)))?);
            }
            entries.push((key, items));
        }
        Ok(Self { entries })
    }

    pub fn preset(suite: &str) -> Result<Self, CliError> {
        let text = PRESETS
            .iter()
            .find(|(name, _)| *name == suite)
            .map(|(_, text)| *text)
            .ok_or_else(|| CliError::Usage(format!("no preset grid for {suite:?}")))?;
        Self::parse(text)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn raw(&self, key: &str) -> Result<&[String], CliError> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_slice())
            .ok_or_else(|| CliError::Usage(format!("grid has no key {key:?}")))
    }

    pub fn has(&self, key: &str) -> bool {
        self.entries.iter().any(|(k, _)| k == key)
    }

    pub fn reals(&self, key: &str) -> Result<Vec<f64>, CliError> {
        self.raw(key)?.iter().map(|s| parse_real(s)).collect()
    }

    pub fn ints(&self, key: &str) -> Result<Vec<u64>, CliError> {
        self.raw(key)?
            .iter()
            .map(|s| s.parse::<u64>().map_err(|_| CliError::Usage(format!("{key}: {s:?} is not a non-negative integer"))))
            .collect()
    }

    /// Replaces or adds keys from `key=values` items.
    pub fn with_overrides(mut self, items: &[String]) -> Result<Self, CliError> {
        let extra = Grid::parse(&items.join("\n"))?;
        for (k, v) in extra.entries {
            match self.entries.iter_mut().find(|(key, _)| *key == k) {
                Some(slot) => slot.1 = v,
                None => self.entries.push((k, v)),
            }
        }
        Ok(self)
    }

    pub fn complexes(&self, key: &str) -> Result<Vec<(f64, f64)>, CliError> {
        self.raw(key)?.iter().map(|s| parse_complex(s)).collect()
    }
}

/// Expands one list item into its values, keeping their text form.
pub fn expand(item: &str) -> Result<Vec<String>, String> {
    let Some((lo, rest)) = item.split_once("..") else {
        return Ok(vec![item.to_string()]);
    };
    let (hi, step) = match rest.split_once(':') {
        Some((hi, step)) => (hi, Some(step)),
        None => (rest, None),
    };
    match step {
        None => {
            let lo: i64 = lo.trim().parse().map_err(|_| format!("bad range start {lo:?}"))?;
            let hi: i64 = hi.trim().parse().map_err(|_| format!("bad range end {hi:?}"))?;
            if hi < lo {
                return Err(format!("empty range {item:?}"));
            }
            Ok((lo..=hi).map(|v| v.to_string()).collect())
        }
        Some(step) => {
            let lo: f64 = lo.trim().parse().map_err(|_| format!("bad range start {lo:?}"))?;
            let hi: f64 = hi.trim().parse().map_err(|_| format!("bad range end {hi:?}"))?;
            let step: f64 = step.trim().parse().map_err(|_| format!("bad step {step:?}"))?;
            if !step.is_finite() || step <= 0.0 || hi < lo {
                return Err(format!("empty range {item:?}"));
            }
            let count = ((hi - lo) / step + 1e-9).floor() as u64;
            Ok((0..=count).map(|k| format!("{}", lo + k as f64 * step)).collect())
        }
    }
}

pub fn parse_real(s: &str) -> Result<f64, CliError> {
    s.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("{s:?} is not a real number")))
}

/// `x`, `yi`, `x+yi`, `x-yi`, `i`, `-i`.
pub fn parse_complex(s: &str) -> Result<(f64, f64), CliError> {
    let (re, im) = split_complex(s)?;
    let bad = || CliError::Usage(format!("{s:?} is not a complex number"));
    Ok((re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?))
}

/// Splits a complex literal into decimal texts of its real and imaginary
/// parts, so callers can parse them at any precision.
pub fn split_complex(s: &str) -> Result<(String, String), CliError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CliError::Usage(format!("{s:?} is not a complex number"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok((t, "0".into()));
    };
    // the imaginary part starts at the last sign that is neither leading nor
    // part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1".to_string(),
        "-" => "-1".to_string(),
        other => other.trim_start_matches('+').to_string(),
    };
    if re.parse::<f64>().is_err() || im.parse::<f64>().is_err() {
        return Err(bad());
    }
    Ok((re.to_string(), im))
}

pub fn complex_at(prec: u32, z: (f64, f64)) -> XComplex {
    XComplex::from_f64(prec, z.0, z.1)
}
