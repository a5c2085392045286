//! Asymptotic tables: exact value, closed form and relative error at each
//! regime point.

use qgamma_core::asymptotics::{
    relative_error_log, thm23_exact_left, thm23_exact_right, thm23_reciprocal_left, thm23_reciprocal_right,
    thm24_gamma_half_minus, thm24_gamma_half_plus, Regime23, Regime24,
};
use qgamma_core::qgamma::{gamma_q, QGammaArg};
use qgamma_core::qseries::SignedLog;
use qgamma_core::theta::{lemma2_estimate, qq_infinity_fast, Lemma2Regime};
use qgamma_core::{Error, PrecisionSpec, QNome, XComplex};
use rug::Float;

use crate::grid::Grid;
use crate::CliError;

pub const THEOREMS: &[&str] = &["thm23", "thm24", "lemma2"];

const DEFAULT_THM23: &str = "a_exp = 0.25\nn = 16, 32, 64, 128\nu = 0\nside = left, right\n";
const DEFAULT_THM24: &str = "x = 0\nk = 6..14\nform = plus, minus\n";
const DEFAULT_LEMMA2: &str = "a_exp = 0.5\ngamma = 1\nn = 4, 8, 16, 32, 64\n";

/// Digits printed for exact values and approximants.
const VALUE_DIGITS: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> Result<String, CliError> {
        let io = |e: csv::Error| CliError::Io(e.to_string());
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
    }
}

struct Measured {
    exact: String,
    approx: String,
    relerr: f64,
    scale: f64,
}

fn header(params: &[&str]) -> Vec<String> {
    params
        .iter()
        .chain(&["exact", "approximant", "relative_error", "err_scale", "ratio", "status"])
        .map(|s| s.to_string())
        .collect()
}

fn row(params: Vec<String>, m: Result<Measured, Error>) -> Vec<String> {
    let mut out = params;
    match m {
        Ok(m) => out.extend([
            m.exact,
            m.approx,
            crate::report::num(m.relerr),
            crate::report::num(m.scale),
            crate::report::num(m.relerr / m.scale),
            "OK".into(),
        ]),
        Err(e) => {
            let status = if matches!(e, Error::Degenerate(_)) { "SKIPPED" } else { "ERROR" };
            out.extend(["", "", "", "", ""].map(String::from));
            out.push(status.into());
        }
    }
    out
}

fn show(x: &Float) -> String {
    x.to_string_radix(10, Some(VALUE_DIGITS))
}

fn show_log(v: &SignedLog) -> String {
    let p = v.ln_abs.prec();
    let mag = Float::with_val(p, v.ln_abs.exp_ref());
    show(&if v.sign < 0 { -mag } else { mag })
}

pub fn cmd_table(theorem: &str, overrides: &[String], spec: &PrecisionSpec) -> Result<Table, CliError> {
    let base = match theorem {
        "thm23" => DEFAULT_THM23,
        "thm24" => DEFAULT_THM24,
        "lemma2" => DEFAULT_LEMMA2,
        other => return Err(CliError::Usage(format!("unknown theorem {other:?}; expected one of {}", THEOREMS.join(", ")))),
    };
    let grid = Grid::parse(base)?.with_overrides(overrides)?;
    match theorem {
        "thm23" => thm23(&grid, spec),
        "thm24" => thm24(&grid, spec),
        _ => lemma2(&grid, spec),
    }
}

fn thm23(grid: &Grid, spec: &PrecisionSpec) -> Result<Table, CliError> {
    let exact_spec = spec.scaled(2);
    let p = exact_spec.work_bits();
    let sides = grid.raw("side")?;
    if let Some(bad) = sides.iter().find(|s| !matches!(s.as_str(), "left" | "right")) {
        return Err(CliError::Usage(format!("side must be left or right, got {bad:?}")));
    }
    let mut rows = Vec::new();
    for side in sides.iter() {
        for a in grid.reals("a_exp")? {
            for n in grid.ints("n")? {
                for u in grid.reals("u")? {
                    let m = (|| -> Result<Measured, Error> {
                        let r = Regime23::new(a, n, u)?;
                        let (est, exact) = if side == "left" {
                            (thm23_reciprocal_left(&r, p)?, thm23_exact_left(&r, &exact_spec)?)
                        } else {
                            (thm23_reciprocal_right(&r, p), thm23_exact_right(&r, &exact_spec)?)
                        };
                        Ok(Measured {
                            exact: show_log(&exact),
                            approx: show(&est.value),
                            relerr: relative_error_log(&est.value, &exact).to_f64(),
                            scale: est.err_scale.to_f64(),
                        })
                    })();
                    rows.push(row(vec![side.clone(), a.to_string(), n.to_string(), u.to_string()], m));
                }
            }
        }
    }
    Ok(Table { header: header(&["side", "a_exp", "n", "u"]), rows })
}

fn thm24(grid: &Grid, spec: &PrecisionSpec) -> Result<Table, CliError> {
    let p = spec.work_bits() + 64;
    let forms = grid.raw("form")?;
    if let Some(bad) = forms.iter().find(|s| !matches!(s.as_str(), "plus" | "minus")) {
        return Err(CliError::Usage(format!("form must be plus or minus, got {bad:?}")));
    }
    let mut points = Vec::new();
    for x in grid.reals("x")? {
        for k in grid.ints("k")? {
            let q = QNome::from_one_minus(Float::with_val(p, Float::i_exp(1, -(k as i32))))?;
            let r = Regime24::new(x, q)?;
            if !r.is_uniform() {
                return Err(CliError::Usage(format!(
                    "x={x} with q=1-2^-{k} lies outside the uniform range ln(1-q) < -2^(2x+1)"
                )));
            }
            points.push((x, k, r));
        }
    }
    let mut rows = Vec::new();
    for form in forms.iter() {
        for (x, k, r) in &points {
            let m = (|| -> Result<Measured, Error> {
                let plus = form == "plus";
                let est = if plus { thm24_gamma_half_plus(r, spec)? } else { thm24_gamma_half_minus(r, spec)? };
                let xf = Float::with_val(p, *x);
                let z = if plus { Float::with_val(p, &xf + 0.5f64) } else { 0.5f64 - xf };
                let g = gamma_q(&QGammaArg::new(XComplex::from_real(z), r.q().clone()), spec)?.value.re;
                let exact = if plus { g } else { Float::with_val(p, g.recip_ref()) };
                let relerr = (Float::with_val(p, &est.value / &exact) - 1u32).abs().to_f64();
                Ok(Measured { exact: show(&exact), approx: show(&est.value), relerr, scale: est.err_scale.to_f64() })
            })();
            rows.push(row(vec![form.clone(), x.to_string(), k.to_string()], m));
        }
    }
    Ok(Table { header: header(&["form", "x", "k"]), rows })
}

fn lemma2(grid: &Grid, spec: &PrecisionSpec) -> Result<Table, CliError> {
    let p = 2 * spec.work_bits();
    let exact_spec = spec.scaled(2);
    let mut rows = Vec::new();
    for a in grid.reals("a_exp")? {
        for g in grid.reals("gamma")? {
            for n in grid.ints("n")? {
                let m = (|| -> Result<Measured, Error> {
                    let r = Lemma2Regime::new(a, n, g)?;
                    let est = lemma2_estimate(&r, p);
                    let exact = qq_infinity_fast(&r.nome(p)?, &exact_spec)?.value.re;
                    let relerr = (Float::with_val(p, &exact / &est.value) - 1u32).abs().to_f64();
                    Ok(Measured {
                        exact: show(&exact),
                        approx: show(&est.value),
                        relerr,
                        scale: est.relerr_model.to_f64(),
                    })
                })();
                rows.push(row(vec![a.to_string(), g.to_string(), n.to_string()], m));
            }
        }
    }
    Ok(Table { header: header(&["a_exp", "gamma", "n"]), rows })
}

