use qgamma_core::asymptotics::*;
use qgamma_core::qgamma::{gamma_q, QGammaArg};
use qgamma_core::{Error, PrecisionSpec, QNome, XComplex};
use rug::float::Constant;
use rug::Float;

fn spec() -> PrecisionSpec {
    PrecisionSpec::bits(256).unwrap()
}

fn near_one(k: i32) -> QNome {
    QNome::from_one_minus(Float::with_val(256, Float::i_exp(1, -k))).unwrap()
}

fn within(slope: f64, tol: f64) -> bool {
    let target = -2.0 * std::f64::consts::PI;
    ((slope - target) / target).abs() <= tol
}

#[test]
fn both_sides_decay_at_rate_two_pi() {
    let spec = spec();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for n in [16u64, 32, 64, 128] {
        let r = Regime23::new(0.25, n, 0.0).unwrap();
        let na = r.n_pow(64).to_f64();
        let l = thm23_reciprocal_left(&r, 256).unwrap();
        left.push((na, l.relative_error(&thm23_exact_left(&r, &spec).unwrap()).to_f64()));
        let rt = thm23_reciprocal_right(&r, 256);
        right.push((na, rt.relative_error(&thm23_exact_right(&r, &spec).unwrap()).to_f64()));
    }
    let fl = fit_exponential_decay(&left, DECAY_SLOPE_TOLERANCE).unwrap();
    let fr = fit_exponential_decay(&right, DECAY_SLOPE_TOLERANCE).unwrap();
    assert!(within(fl.slope, 0.1), "left slope {}", fl.slope);
    assert!(within(fr.slope, 0.1), "right slope {}", fr.slope);
    assert_eq!(fr.verdict, Verdict::Verified);
}

#[test]
fn errors_stay_uniform_in_u() {
    let spec = spec();
    let at = |u: f64| {
        let r = Regime23::new(0.25, 32, u).unwrap();
        let l = thm23_reciprocal_left(&r, 256).unwrap().relative_error(&thm23_exact_left(&r, &spec).unwrap());
        let rt = thm23_reciprocal_right(&r, 256).relative_error(&thm23_exact_right(&r, &spec).unwrap());
        (l.to_f64(), rt.to_f64())
    };
    let base = at(0.0);
    for u in [0.5, 1.0, 2.0, 5.0] {
        let e = at(u);
        assert!(e.0 <= 3.0 * base.0 && e.1 <= 3.0 * base.1, "u={u}: {e:?} vs {base:?}");
    }
}

#[test]
fn left_form_signs_and_degeneracy() {
    // u = 0: cos(pi n) = (-1)^n
    for n in [1u64, 2, 7] {
        let e = thm23_reciprocal_left(&Regime23::new(0.3, n, 0.0).unwrap(), 128).unwrap();
        assert_eq!(e.value.is_sign_negative(), n % 2 == 1);
    }
    // 16^{1/4} = 2, so u = 1/4 puts n^a u + n at 16.5
    let r = Regime23::new(0.25, 16, 0.25).unwrap();
    assert!(matches!(thm23_reciprocal_left(&r, 128), Err(Error::Degenerate(_))));
    assert!(thm23_reciprocal_right(&Regime23::new(0.01, 1, 0.0).unwrap(), 128).value > 0);
    assert!(Regime23::new(0.5, 4, 0.0).is_err());
    assert!(Regime23::new(0.25, 4, -1.0).is_err());
}

#[test]
fn fixed_argument_scaling() {
    let spec = PrecisionSpec::bits(128).unwrap();
    let root_pi = Float::with_val(128, Constant::Pi).sqrt();
    let mut pts = Vec::new();
    for k in 6..=14 {
        let q = near_one(k);
        let r = Regime24::new(0.0, q.clone()).unwrap();
        let plus = thm24_gamma_half_plus(&r, &spec).unwrap();
        let minus = thm24_gamma_half_minus(&r, &spec).unwrap();
        assert!(Float::with_val(128, &plus.value - &root_pi).abs().to_f64() < 1e-35);
        assert!((Float::with_val(128, &plus.value * &minus.value) - 1u32).abs().to_f64() < 1e-35);
        let g = gamma_q(&QGammaArg::new(XComplex::from_f64(128, 0.5, 0.0), q), &spec).unwrap();
        let obs = (Float::with_val(128, &g.value.re / &plus.value) - 1u32).abs().to_f64();
        pts.push((plus.err_scale.to_f64(), obs));
    }
    let fit = fit_bigo_constant(&pts).unwrap();
    assert_eq!(fit.verdict, Verdict::Verified, "{fit:?}");
    assert!(fit.slope.unwrap() >= 0.9);
    let e = thm24_gamma_half_plus(&Regime24::new(0.0, near_one(10)).unwrap(), &spec).unwrap().with_fit(fit.fitted_c);
    assert_eq!(e.fitted_c, Some(fit.fitted_c));
}

#[test]
fn uniformity_condition() {
    let spec = PrecisionSpec::bits(128).unwrap();
    // 2^{2(1.1)+1} = 9.19..., so 1 - q must lie below e^{-9.19} = 2^{-13.26}
    assert!(!Regime24::new(1.1, near_one(13)).unwrap().is_uniform());
    assert!(Regime24::new(1.1, near_one(14)).unwrap().is_uniform());
    let r = Regime24::new(1.1, near_one(10)).unwrap();
    assert!(matches!(thm24_gamma_half_plus(&r, &spec), Err(Error::Domain(_))));
    let r = Regime24::new(1.5, near_one(40)).unwrap();
    assert!(matches!(thm24_gamma_half_minus(&r, &spec), Err(Error::Domain(_))));
    assert!(Regime24::new(-0.5, near_one(10)).is_err());
    let t = Regime24::from_tau(0.0, &Float::with_val(128, 1e-4)).unwrap();
    assert!((t.tau().to_f64() - 1e-4).abs() < 1e-18);
}
