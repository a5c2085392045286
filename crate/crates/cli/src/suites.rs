//! Verification suites. Each one walks its grid, evaluates an identity or an
//! asymptotic claim at every point, and reports residuals against bounds.
//!
//! Cases run through [`par::map_slice`], which returns results in grid
//! order, so reports do not depend on scheduling.

use qgamma_core::asymptotics::{
    fit_bigo_constant, fit_exponential_decay, relative_error_log, thm23_exact_left, thm23_exact_right,
    thm23_reciprocal_left, thm23_reciprocal_right, thm24_gamma_half_minus, thm24_gamma_half_plus, Regime23, Regime24,
    DECAY_SLOPE_TOLERANCE, MIN_BIGO_SLOPE,
};
use qgamma_core::par::{self, Execution};
use qgamma_core::qgamma::{
    gamma_q, gamma_q_half_minus_series, gamma_q_half_series, gamma_q_reflection, gamma_ref, q_integral_closed_form,
    q_integral_representation, GammaRef, QGammaArg,
};
use qgamma_core::qseries::{lemma1_direct, lemma1_ratio, lemma1_reciprocal, qpoch_finite, qpoch_infinite};
use qgamma_core::theta::{
    eta_direct, eta_transformed, lemma2_estimate, qq_infinity_fast, theta, theta_modular, theta_product, theta_series,
    LatticeParam, Lemma2Regime, ThetaArg, ThetaKind,
};
use qgamma_core::{Error, PrecisionSpec, QNome, XComplex};
use rug::float::Constant;
use rug::Float;

use crate::grid::{complex_at, Grid};
use crate::report::{Case, Fit, Status, SuiteReport};
use crate::CliError;

pub const SUITES: &[&str] = &[
    "lemma1",
    "triple_product",
    "modular",
    "eta_transform",
    "lemma2",
    "reflection",
    "functional_eq",
    "gosper_limit",
    "thm23",
    "thm24",
    "qintegral",
];

/// Tolerance on the `(q;q)_inf` main-term decay rate.
pub const LEMMA2_SLOPE_TOLERANCE: f64 = 0.05;

/// Worst allowed ratio of the largest error over a `u` sweep to the `u = 0`
/// error.
pub const UNIFORMITY_SPREAD: f64 = 3.0;

/// Relative agreement required of the classical Gamma anchors.
pub const CLASSICAL_RELERR: f64 = 1e-30;

pub fn run_suite(name: &str, grid: &Grid, spec: &PrecisionSpec) -> Result<SuiteReport, CliError> {
    let (cases, fits) = match name {
        "lemma1" => lemma1(grid, spec)?,
        "triple_product" => theta_pairs(grid, spec, false)?,
        "modular" => theta_pairs(grid, spec, true)?,
        "eta_transform" => eta_transform(grid, spec)?,
        "lemma2" => lemma2(grid, spec)?,
        "reflection" => reflection(grid, spec)?,
        "functional_eq" => functional_eq(grid, spec)?,
        "gosper_limit" => gosper_limit(grid, spec)?,
        "thm23" => thm23(grid, spec)?,
        "thm24" => thm24(grid, spec)?,
        "qintegral" => qintegral(grid, spec)?,
        other => return Err(CliError::Usage(format!("unknown suite {other:?}; expected one of {}", SUITES.join(", ")))),
    };
    Ok(SuiteReport::new(name, spec.work_bits(), cases, fits))
}

type Outcome = (Vec<Case>, Vec<Fit>);

fn parallel<I: Sync, T: Send>(items: &[I], f: impl Fn(&I) -> T + Sync + Send) -> Vec<T> {
    par::map_slice(Execution::Parallel, items, f)
}

fn near_one(k: u64, prec: u32) -> Result<QNome, CliError> {
    Ok(QNome::from_one_minus(Float::with_val(prec, Float::i_exp(1, -(k as i32))))?)
}

fn cfmt(z: (f64, f64)) -> String {
    match (z.0, z.1) {
        (re, 0.0) => format!("{re}"),
        (re, im) if im < 0.0 => format!("{re}{im}i"),
        (re, im) => format!("{re}+{im}i"),
    }
}

fn tol(spec: &PrecisionSpec) -> f64 {
    spec.target_abs_err().to_f64()
}

fn dist(a: &XComplex, b: &XComplex) -> f64 {
    (a - b).abs().to_f64()
}

fn rel(a: &XComplex, b: &XComplex) -> f64 {
    ((a - b).abs() / b.abs()).to_f64()
}

/// `2 target max(1, |reference|)`: the absolute target, scaled for values
/// above one since every route here works to relative precision.
fn scaled_tol(spec: &PrecisionSpec, reference: &XComplex) -> f64 {
    2.0 * tol(spec) * reference.abs().to_f64().max(1.0)
}

fn lemma1(grid: &Grid, spec: &PrecisionSpec) -> Result<Outcome, CliError> {
    let p = spec.work_bits();
    let oracle_spec = spec.scaled(4);
    let ks = grid.ints("K")?;
    let mut points = Vec::new();
    for a in grid.complexes("a")? {
        for q in grid.reals("q")? {
            for off in grid.ints("n_offset")? {
                points.push((a, q, off));
            }
        }
    }
    let results = parallel(&points, |&(a, q, off)| -> Vec<Case> {
        let inputs = |n: u64, k: u64| format!("a={} q={q} n={n} K={k}", cfmt(a));
        let run = || -> Result<Vec<Case>, Error> {
            let nq = QNome::from_f64(q, 4 * p)?;
            let az = complex_at(4 * p, a);
            let mut n0 = 0;
            while lemma1_ratio(&az, &nq, n0, p) >= 0.5 {
                n0 += 1;
            }
            let n = n0 + off;
            let b = az.scale(&nq.pow_u64(n, 4 * p));
            let exact = qpoch_infinite(&b, &nq, &oracle_spec)?.value;
            let exact_inv = exact.recip();
            let mut out = Vec::new();
            for &k in &ks {
                let r = lemma1_reciprocal(&az, &nq, n, k, spec)?;
                out.push(Case::check("reciprocal", inputs(n, k), dist(&r.value, &exact_inv), r.remainder.to_f64()));
                let d = lemma1_direct(&az, &nq, n, k, spec)?;
                out.push(Case::check("direct", inputs(n, k), dist(&d.value, &exact), d.remainder.to_f64()));
            }
            Ok(out)
        };
        run().unwrap_or_else(|e| vec![Case::errored("lemma1", inputs(off, 0), &e)])
    });
    Ok((results.into_iter().flatten().collect(), Vec::new()))
}

fn theta_grid(grid: &Grid) -> Result<Vec<((f64, f64), (f64, f64), ThetaKind)>, CliError> {
    let mut points = Vec::new();
    for im in grid.reals("tau_im")? {
        for re in grid.reals("tau_re")? {
            for v in grid.complexes("v")? {
                for kind in ThetaKind::ALL {
                    points.push(((re, im), v, kind));
                }
            }
        }
    }
    Ok(points)
}

/// Product form (`modular = false`) or transformed evaluation
/// (`modular = true`) against a direct evaluation.
fn theta_pairs(grid: &Grid, spec: &PrecisionSpec, modular: bool) -> Result<Outcome, CliError> {
    let p = spec.work_bits() + 64;
    let points = theta_grid(grid)?;
    let bound = 2.0 * tol(spec);
    let cases = parallel(&points, |&(tau, v, kind)| {
        let inputs = format!("j={} tau={} v={}", kind.index(), cfmt(tau), cfmt(v));
        let run = || -> Result<Case, Error> {
            let lattice = LatticeParam::new(complex_at(p, tau))?;
            let arg = ThetaArg::from_v(complex_at(p, v));
            let (group, a, b) = if modular {
                ("modular", theta_series(kind, &arg, &lattice, spec)?, theta_modular(kind, &arg, &lattice, spec)?)
            } else {
                ("product", theta(kind, &arg, &lattice, spec)?, theta_product(kind, &arg, &lattice, spec)?)
            };
            Ok(Case::check(group, inputs.clone(), dist(&a.value, &b.value), bound))
        };
        run().unwrap_or_else(|e| Case::errored("theta", inputs.clone(), &e))
    });
    Ok((cases, Vec::new()))
}

fn eta_transform(grid: &Grid, spec: &PrecisionSpec) -> Result<Outcome, CliError> {
    let p = spec.work_bits() + 64;
    let bound = 2.0 * tol(spec);
    let ts = grid.reals("t")?;
    let cases = parallel(&ts, |&t| {
        let inputs = format!("tau={t}i");
        let run = || -> Result<Case, Error> {
            let lattice = LatticeParam::imaginary(&Float::with_val(p, t))?;
            let a = eta_direct(&lattice, spec)?;
            let b = eta_transformed(&lattice, spec)?;
            Ok(Case::check("eta", inputs.clone(), dist(&a.value, &b.value), bound))
        };
        run().unwrap_or_else(|e| Case::errored("eta", inputs.clone(), &e))
    });
    Ok((cases, Vec::new()))
}

fn lemma2(grid: &Grid, spec: &PrecisionSpec) -> Result<Outcome, CliError> {
    let p = 2 * spec.work_bits();
    let exact_spec = spec.scaled(2);
    let mut points = Vec::new();
    for a in grid.reals("a_exp")? {
        for g in grid.reals("gamma")? {
            for n in grid.ints("n")? {
                points.push((a, g, n));
            }
        }
    }
    let rows = parallel(&points, |&(a, g, n)| -> Result<(f64, f64, f64), Error> {
        let r = Lemma2Regime::new(a, n, g)?;
        let est = lemma2_estimate(&r, p);
        let exact = qq_infinity_fast(&r.nome(p)?, &exact_spec)?.value.re;
        let relerr = (Float::with_val(p, &exact / &est.value) - 1u32).abs().to_f64();
        Ok((r.scale(64).to_f64(), relerr, est.relerr_model.to_f64()))
    });
    let mut cases = Vec::new();
    let mut pts = Vec::new();
    let mut ok_inputs = Vec::new();
    for (&(a, g, n), row) in points.iter().zip(&rows) {
        let inputs = format!("a_exp={a} gamma={g} n={n}");
        match row {
            Ok(v) => {
                pts.push(*v);
                ok_inputs.push(inputs);
            }
            Err(e) => cases.push(Case::errored("lemma2", inputs, e)),
        }
    }
    let c = pts.iter().map(|&(_, e, m)| e / m).fold(0.0, f64::max);
    for (inputs, &(_, relerr, model)) in ok_inputs.into_iter().zip(&pts) {
        cases.push(
            Case::with_status("lemma2", inputs, relerr, c * model, Status::Pass)
                .note(format!("ratio {:.4}", relerr / model)),
        );
    }
    let mut fits = Vec::new();
    let decay: Vec<(f64, f64)> = pts.iter().map(|&(s, e, _)| (s, e)).collect();
    match fit_exponential_decay(&decay, LEMMA2_SLOPE_TOLERANCE) {
        Ok(f) => fits.push(Fit {
            label: "decay".into(),
            fitted_c: Some(c),
            slope: Some(f.slope),
            criterion: format!("slope of ln(relerr) on gamma n^a within {LEMMA2_SLOPE_TOLERANCE} of -2pi"),
            verdict: f.verdict.into(),
        }),
        Err(e) => cases.push(Case::errored("decay", "fit".into(), &e)),
    }
    Ok((cases, fits))
}

fn gq(z: &XComplex, q: &QNome, spec: &PrecisionSpec) -> Result<XComplex, Error> {
    Ok(gamma_q(&QGammaArg::new(z.clone(), q.clone()), spec)?.value)
}

fn shifted(z: &XComplex, by: f64) -> XComplex {
    z + &XComplex::from_f64(z.prec(), by, 0.0)
}

fn reflection(grid: &Grid, spec: &PrecisionSpec) -> Result<Outcome, CliError> {
    let p = spec.work_bits() + 64;
    let mut points = Vec::new();
    for z in grid.complexes("z")? {
        for q in grid.reals("q")? {
            points.push(("theta", z, q));
        }
    }
    for z in grid.reals("series_z")? {
        for q in grid.reals("series_q")? {
            points.push(("series", (z, 0.0), q));
        }
    }
    let cases = parallel(&points, |&(group, z, q)| {
        let inputs = format!("z={} q={q}", cfmt(z));
        let run = || -> Result<Case, Error> {
            let nq = QNome::from_f64(q, p)?;
            let zc = complex_at(p, z);
            let minus = gq(&shifted(&-zc.clone(), 0.5), &nq, spec)?;
            if group == "theta" {
                let r = gamma_q_reflection(&zc, &nq, spec)?.value;
                let plus = gq(&shifted(&zc, 0.5), &nq, spec)?;
                let lhs = &plus * &minus;
                Ok(Case::check(group, inputs.clone(), dist(&lhs, &r), scaled_tol(spec, &r)))
            } else {
                let s = gamma_q_half_minus_series(&zc, &nq, spec)?.value;
                Ok(Case::check(group, inputs.clone(), dist(&s, &minus), scaled_tol(spec, &minus)))
            }
        };
        run().unwrap_or_else(|e| Case::errored(group, inputs.clone(), &e))
    });
    Ok((cases, Vec::new()))
}

fn functional_eq(grid: &Grid, spec: &PrecisionSpec) -> Result<Outcome, CliError> {
    let p = spec.work_bits() + 64;
    let mut points = Vec::new();
    for alpha in grid.complexes("alpha")? {
        for n in grid.ints("n")? {
            for q in grid.reals("q")? {
                points.push(("shift", alpha, n, q));
            }
        }
    }
    for z in grid.complexes("series_z")? {
        for q in grid.reals("q")? {
            points.push(("series", z, 0, q));
        }
    }
    let cases = parallel(&points, |&(group, z, n, q)| {
        let inputs = if group == "shift" { format!("alpha={} n={n} q={q}", cfmt(z)) } else { format!("z={} q={q}", cfmt(z)) };
        let run = || -> Result<Case, Error> {
            let nq = QNome::from_f64(q, p)?;
            let zc = complex_at(p, z);
            if group == "shift" {
                let g = gq(&zc, &nq, spec)?;
                let gn = gq(&shifted(&zc, n as f64), &nq, spec)?;
                let scale = Float::with_val(p, rug::ops::Pow::pow(nq.one_minus_q().clone(), n as u32));
                let lhs = &gn.scale(&scale) / &g;
                let rhs = qpoch_finite(&nq.pow(&zc), &nq, n, &spec.scaled(2));
                Ok(Case::check(group, inputs.clone(), dist(&lhs, &rhs), scaled_tol(spec, &rhs)))
            } else {
                let s = gamma_q_half_series(&zc, &nq, spec)?.value;
                let g = gq(&shifted(&zc, 0.5), &nq, spec)?;
                Ok(Case::check(group, inputs.clone(), dist(&s, &g), scaled_tol(spec, &g)))
            }
        };
        run().unwrap_or_else(|e| Case::errored(group, inputs.clone(), &e))
    });
    Ok((cases, Vec::new()))
}

fn gosper_limit(grid: &Grid, spec: &PrecisionSpec) -> Result<Outcome, CliError> {
    let p = spec.work_bits() + 64;
    let ks = grid.ints("k")?;
    let zs = grid.reals("z")?;
    let sequences = parallel(&zs, |&z| -> Result<Vec<f64>, Error> {
        let reference = gamma_ref(&GammaRef::real(z, p)?, spec)?.value;
        let zc = XComplex::from_f64(p, z, 0.0);
        ks.iter()
            .map(|&k| {
                let q = QNome::from_one_minus(Float::with_val(p, Float::i_exp(1, -(k as i32))))?;
                Ok(dist(&gq(&zc, &q, spec)?, &reference))
            })
            .collect()
    });
    let mut cases = Vec::new();
    for (&z, seq) in zs.iter().zip(sequences) {
        match seq {
            Ok(ds) => {
                let mut prev = f64::INFINITY;
                for (&k, &d) in ks.iter().zip(&ds) {
                    let status = if d < prev { Status::Pass } else { Status::Fail };
                    cases.push(Case::with_status("limit", format!("z={z} q=1-2^-{k}"), d, prev, status));
                    prev = d;
                }
                if let (Some(first), Some(last)) = (ds.first(), ds.last()) {
                    cases.push(Case::check("limit", format!("z={z} last/first"), last / first, 0.01));
                }
            }
            Err(e) => cases.push(Case::errored("limit", format!("z={z}"), &e)),
        }
    }

    // classical anchors
    let pi = Float::with_val(p, Constant::Pi);
    let anchor = |x: f64| gamma_ref(&GammaRef::real(x, p)?, spec).map(|g| g.value);
    match anchor(0.5) {
        Ok(g) => {
            let root = XComplex::from_real(Float::with_val(p, pi.sqrt_ref()));
            cases.push(Case::check("anchor", "Gamma(1/2)=sqrt(pi)".into(), rel(&g, &root), CLASSICAL_RELERR));
        }
        Err(e) => cases.push(Case::errored("anchor", "Gamma(1/2)".into(), &e)),
    }
    let mut factorial = Float::with_val(p, 1);
    for n in grid.ints("factorial_n")? {
        if n > 1 {
            factorial *= n - 1;
        }
        let expect = XComplex::from_real(factorial.clone());
        match anchor(n as f64) {
            Ok(g) => cases.push(Case::check("anchor", format!("Gamma({n})=({n}-1)!"), rel(&g, &expect), CLASSICAL_RELERR)),
            Err(e) => cases.push(Case::errored("anchor", format!("Gamma({n})"), &e)),
        }
    }
    for z in grid.reals("reflection_z")? {
        let inputs = format!("Gamma({z})Gamma({})sin(pi {z})/pi", 1.0 - z);
        let run = || -> Result<f64, Error> {
            let zc = XComplex::from_f64(p, z, 0.0);
            let a = gamma_ref(&GammaRef::new(zc.clone())?, spec)?.value;
            let b = gamma_ref(&GammaRef::new(&XComplex::one(p) - &zc)?, spec)?.value;
            let s = zc.scale(&pi).sin();
            let lhs = (&(&a * &b) * &s).scale(&Float::with_val(p, pi.recip_ref()));
            Ok(dist(&lhs, &XComplex::one(p)))
        };
        match run() {
            Ok(r) => cases.push(Case::check("anchor", inputs, r, CLASSICAL_RELERR)),
            Err(e) => cases.push(Case::errored("anchor", inputs, &e)),
        }
    }
    Ok((cases, Vec::new()))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

impl Side {
    fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// Relative error of one closed form against the exact log-space value,
/// with its modeled error scale.
fn thm23_point(side: Side, a: f64, n: u64, u: f64, spec: &PrecisionSpec) -> Result<(f64, f64), Error> {
    let r = Regime23::new(a, n, u)?;
    let exact_spec = spec.scaled(2);
    let p = exact_spec.work_bits();
    let (est, exact) = match side {
        Side::Left => (thm23_reciprocal_left(&r, p)?, thm23_exact_left(&r, &exact_spec)?),
        Side::Right => (thm23_reciprocal_right(&r, p), thm23_exact_right(&r, &exact_spec)?),
    };
    Ok((relative_error_log(&est.value, &exact).to_f64(), est.err_scale.to_f64()))
}

fn thm23(grid: &Grid, spec: &PrecisionSpec) -> Result<Outcome, CliError> {
    let a = *grid.reals("a_exp")?.first().ok_or_else(|| CliError::Usage("a_exp is empty".into()))?;
    let ns = grid.ints("n")?;
    let mut points = Vec::new();
    for u in grid.reals("decay_u")? {
        for side in [Side::Left, Side::Right] {
            for &n in &ns {
                points.push(("decay", side, n, u));
            }
        }
    }
    for n in grid.ints("probe_n")? {
        for side in [Side::Left, Side::Right] {
            for u in grid.reals("probe_u")? {
                points.push(("probe", side, n, u));
            }
        }
    }
    let results = parallel(&points, |&(_, side, n, u)| thm23_point(side, a, n, u, spec));

    let mut cases = Vec::new();
    let mut fits = Vec::new();
    let c_all = results.iter().flatten().map(|(e, s)| e / s).fold(0.0, f64::max);
    let mut series: Vec<((&str, Side, u64, f64), (f64, f64))> = Vec::new();
    for (&(group, side, n, u), res) in points.iter().zip(&results) {
        let inputs = format!("{} a_exp={a} n={n} u={u}", side.name());
        match res {
            Ok((relerr, scale)) => {
                cases.push(
                    Case::with_status(group, inputs, *relerr, c_all * scale, Status::Pass)
                        .note(format!("ratio {:.4}", relerr / scale)),
                );
                series.push(((group, side, n, u), (*relerr, *scale)));
            }
            Err(e) => cases.push(Case::errored(group, inputs, e)),
        }
    }

    for u in grid.reals("decay_u")? {
        for side in [Side::Left, Side::Right] {
            let pts: Vec<(f64, f64, f64)> = series
                .iter()
                .filter(|((g, s, _, uu), _)| *g == "decay" && *s == side && *uu == u)
                .map(|((_, _, n, _), (e, sc))| ((*n as f64).powf(a), *e, *sc))
                .collect();
            let label = format!("decay {} u={u}", side.name());
            let criterion = format!("slope of ln(relerr) on n^a within {DECAY_SLOPE_TOLERANCE} of -2pi");
            let decay: Vec<(f64, f64)> = pts.iter().map(|&(x, e, _)| (x, e)).collect();
            let c = pts.iter().map(|&(_, e, s)| e / s).fold(0.0, f64::max);
            match fit_exponential_decay(&decay, DECAY_SLOPE_TOLERANCE) {
                Ok(f) => fits.push(Fit { label, fitted_c: Some(c), slope: Some(f.slope), criterion, verdict: f.verdict.into() }),
                Err(_) => fits.push(Fit { label, fitted_c: None, slope: None, criterion, verdict: Status::Inconclusive }),
            }
        }
    }

    for n in grid.ints("probe_n")? {
        for side in [Side::Left, Side::Right] {
            let pts: Vec<(f64, f64)> = series
                .iter()
                .filter(|((g, s, nn, _), _)| *g == "probe" && *s == side && *nn == n)
                .map(|((_, _, _, u), (e, _))| (*u, *e))
                .collect();
            let label = format!("uniformity {} n={n}", side.name());
            let criterion = format!("max over u of relerr within {UNIFORMITY_SPREAD}x of u=0");
            let base = pts.iter().find(|(u, _)| *u == 0.0).map(|p| p.1);
            let worst = pts.iter().map(|p| p.1).fold(0.0, f64::max);
            let (spread, verdict) = match base {
                Some(b) if b > 0.0 => {
                    let s = worst / b;
                    (Some(s), if s <= UNIFORMITY_SPREAD { Status::Verified } else { Status::Failed })
                }
                _ => (None, Status::Inconclusive),
            };
            fits.push(Fit { label, fitted_c: spread, slope: None, criterion, verdict });
        }
    }
    Ok((cases, fits))
}

/// The `k` window for `x`: the grid's window, slid up to the first `k` that
/// satisfies the uniformity condition if it starts below it.
pub fn thm24_window(x: f64, ks: &[u64], prec: u32) -> Result<Vec<u64>, CliError> {
    let Some(&lo) = ks.iter().min() else {
        return Err(CliError::Usage("k is empty".into()));
    };
    let mut start = lo;
    while !Regime24::new(x, near_one(start, prec)?)?.is_uniform() {
        start += 1;
        if start > 200 {
            return Err(CliError::Usage(format!("no k <= 200 satisfies the uniformity condition at x={x}")));
        }
    }
    let mut window: Vec<u64> = ks.iter().map(|k| k + (start - lo)).collect();
    window.sort_unstable();
    window.dedup();
    Ok(window)
}

/// `(err_scale, relerr of Gamma(x+1/2), relerr of 1/Gamma(1/2-x))` at
/// `q = 1 - 2^-k`.
fn thm24_point(x: f64, k: u64, spec: &PrecisionSpec) -> Result<(f64, f64, f64), Error> {
    let p = spec.work_bits() + 64;
    let q = QNome::from_one_minus(Float::with_val(p, Float::i_exp(1, -(k as i32))))?;
    let r = Regime24::new(x, q.clone())?;
    let plus = thm24_gamma_half_plus(&r, spec)?;
    let minus = thm24_gamma_half_minus(&r, spec)?;
    let xf = Float::with_val(p, x);
    let gp = gq(&XComplex::from_real(Float::with_val(p, &xf + 0.5f64)), &q, spec)?;
    let gm = gq(&XComplex::from_real(0.5f64 - xf), &q, spec)?;
    let obs_plus = (Float::with_val(p, &gp.re / &plus.value) - 1u32).abs().to_f64();
    let obs_minus = (Float::with_val(p, gm.re.recip_ref()) / &minus.value - 1u32).abs().to_f64();
    Ok((plus.err_scale.to_f64(), obs_plus, obs_minus))
}

fn thm24(grid: &Grid, spec: &PrecisionSpec) -> Result<Outcome, CliError> {
    let p = spec.work_bits() + 64;
    let ks = grid.ints("k")?;
    let mut points = Vec::new();
    for x in grid.reals("x")? {
        for k in thm24_window(x, &ks, p)? {
            points.push((x, k));
        }
    }
    let results = parallel(&points, |&(x, k)| thm24_point(x, k, spec));

    let mut cases = Vec::new();
    let mut fits = Vec::new();
    for x in grid.reals("x")? {
        let mine: Vec<(u64, &Result<(f64, f64, f64), Error>)> =
            points.iter().zip(&results).filter(|((xx, _), _)| *xx == x).map(|((_, k), r)| (*k, r)).collect();
        let range = format!("k={}..{}", mine.first().map_or(0, |m| m.0), mine.last().map_or(0, |m| m.0));
        for (form, pick) in [("plus", 1usize), ("minus", 2)] {
            let ok: Vec<(u64, f64, f64)> = mine
                .iter()
                .filter_map(|(k, r)| r.as_ref().ok().map(|v| (*k, v.0, if pick == 1 { v.1 } else { v.2 })))
                .collect();
            let pts: Vec<(f64, f64)> = ok.iter().map(|&(_, s, o)| (s, o)).collect();
            let label = format!("{form} x={x} {range}");
            let criterion = format!("slope >= {MIN_BIGO_SLOPE}, ratio without growth");
            let c = match fit_bigo_constant(&pts) {
                Ok(f) => {
                    fits.push(Fit { label, fitted_c: Some(f.fitted_c), slope: f.slope, criterion, verdict: f.verdict.into() });
                    f.fitted_c
                }
                Err(e) => {
                    cases.push(Case::errored("fit", label.clone(), &e));
                    fits.push(Fit { label, fitted_c: None, slope: None, criterion, verdict: Status::Inconclusive });
                    f64::NAN
                }
            };
            for (k, s, o) in ok {
                cases.push(
                    Case::with_status(form, format!("x={x} q=1-2^-{k}"), o, c * s, Status::Pass)
                        .note(format!("ratio {:.4}", o / s)),
                );
            }
        }
        for (k, r) in &mine {
            if let Err(e) = r {
                cases.push(Case::errored("thm24", format!("x={x} q=1-2^-{k}"), e));
            }
        }
    }
    Ok((cases, fits))
}

fn qintegral(grid: &Grid, spec: &PrecisionSpec) -> Result<Outcome, CliError> {
    let p = spec.work_bits() + 64;
    let mut points = Vec::new();
    for x in grid.reals("x")? {
        for q in grid.reals("q")? {
            points.push((x, q));
        }
    }
    let cases = parallel(&points, |&(x, q)| {
        let inputs = format!("x={x} q={q}");
        let run = || -> Result<Case, Error> {
            let nq = QNome::from_f64(q, p)?;
            let xf = Float::with_val(p, x);
            let i = q_integral_representation(&xf, &nq, spec)?;
            let c = q_integral_closed_form(&xf, &nq, spec)?;
            let scale = c.value.abs().to_f64();
            let bound = (i.remainder.to_f64() + c.remainder.to_f64()) / scale;
            Ok(Case::check("integral", inputs.clone(), rel(&i.value, &c.value), bound).note(format!("{} evaluations", i.terms)))
        };
        run().unwrap_or_else(|e| Case::errored("integral", inputs.clone(), &e))
    });
    Ok((cases, Vec::new()))
}
