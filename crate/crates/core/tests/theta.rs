use qgamma_core::qseries::qpoch_infinite_direct_relative;
use qgamma_core::theta::*;
use qgamma_core::{PrecisionSpec, QNome, XComplex};
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

const P: u32 = 512;

/// Each term `e^{pi i (tau m^2 + 2 m v)}` computed from scratch.
fn brute_theta(j: u8, v: (f64, f64), tau: (f64, f64), range: i64) -> XComplex {
    let pi = Float::with_val(P, Constant::Pi);
    let v = XComplex::from_f64(P, v.0, v.1);
    let tau = XComplex::from_f64(P, tau.0, tau.1);
    let mut sum = XComplex::zero(P);
    for k in -range..=range {
        let m = if j <= 2 { k as f64 + 0.5 } else { k as f64 };
        let m = Float::with_val(P, m);
        let m2 = Float::with_val(P, &m * &m);
        let e = &tau.scale(&m2) + &v.scale(&Float::with_val(P, &m * 2u32));
        let mut term = e.scale(&pi).mul_i().exp();
        if (j == 1 || j == 4) && k % 2 != 0 {
            term = -term;
        }
        sum += &term;
    }
    if j == 1 {
        sum = -sum.mul_i();
    }
    sum
}

fn lattice(re: f64, im: f64) -> LatticeParam {
    LatticeParam::new(XComplex::from_f64(192, re, im)).unwrap()
}

fn arg(re: f64, im: f64) -> ThetaArg {
    ThetaArg::from_v(XComplex::from_f64(192, re, im))
}

fn spec() -> PrecisionSpec {
    PrecisionSpec::bits(128).unwrap()
}

#[test]
fn series_matches_brute_force() {
    let spec = spec();
    for &(tau, v) in &[((0.0, 1.0), (0.3, 0.1)), ((0.25, 0.8), (0.1, -0.2)), ((0.0, 3.0), (0.7, 0.0))] {
        for kind in ThetaKind::ALL {
            let got = theta_series(kind, &arg(v.0, v.1), &lattice(tau.0, tau.1), &spec).unwrap();
            let oracle = brute_theta(kind.index(), v, tau, 40);
            let d = (&got.value - &oracle).abs().to_f64();
            assert!(d <= got.remainder.to_f64(), "theta{} {tau:?} {v:?}: {d}", kind.index());
        }
    }
}

#[test]
fn special_values() {
    let spec = spec();
    let l = lattice(0.0, 1.0);
    assert!(theta(ThetaKind::One, &arg(0.0, 0.0), &l, &spec).unwrap().value.is_zero());
    let t2 = theta_product(ThetaKind::Two, &arg(0.5, 0.0), &l, &spec).unwrap();
    assert!(t2.value.abs().to_f64() < 1e-35);
    let t3 = theta(ThetaKind::Three, &arg(0.0, 0.0), &lattice(0.0, 40.0), &spec).unwrap();
    assert!((&t3.value - &XComplex::one(128)).abs().to_f64() < 1e-50);
    // theta_3(0|i) = pi^{1/4} / Gamma(3/4)
    let pi = Float::with_val(256, Constant::Pi);
    let g = Float::with_val(256, 0.75).gamma();
    let expect = Float::with_val(256, pi.sqrt().sqrt() / g);
    let got = theta(ThetaKind::Three, &arg(0.0, 0.0), &l, &spec).unwrap();
    assert!(Float::with_val(256, &got.value.re - &expect).abs().to_f64() < 1e-33);
}

#[test]
fn representations_agree_on_grid() {
    let spec = spec();
    let tol = 2.0 * spec.target_abs_err().to_f64();
    for im in [0.05, 0.3, 1.0, 3.0] {
        for re in [0.0, 0.2] {
            for v in [(0.0, 0.0), (0.3, 0.0), (0.1, 0.05), (-0.4, 0.02)] {
                let l = lattice(re, im);
                let a = arg(v.0, v.1);
                for kind in ThetaKind::ALL {
                    let s = theta_series(kind, &a, &l, &spec).unwrap();
                    let p = theta_product(kind, &a, &l, &spec).unwrap();
                    let m = theta_modular(kind, &a, &l, &spec).unwrap();
                    let dp = (&s.value - &p.value).abs().to_f64();
                    let dm = (&s.value - &m.value).abs().to_f64();
                    assert!(dp <= tol, "product theta{} tau={re}+{im}i v={v:?}: {dp}", kind.index());
                    assert!(dm <= tol, "modular theta{} tau={re}+{im}i v={v:?}: {dm}", kind.index());
                }
            }
        }
    }
}

#[test]
fn parity() {
    let spec = spec();
    let l = lattice(0.1, 0.7);
    let plus = arg(0.23, 0.04);
    let minus = arg(-0.23, -0.04);
    for kind in ThetaKind::ALL {
        let a = theta(kind, &plus, &l, &spec).unwrap().value;
        let b = theta(kind, &minus, &l, &spec).unwrap().value;
        let r = if kind == ThetaKind::One { (&a + &b).abs() } else { (&a - &b).abs() };
        assert!(r.to_f64() < 1e-32, "theta{}", kind.index());
    }
}

#[test]
fn eta_values_and_transformation() {
    let spec = spec();
    let pi = Float::with_val(256, Constant::Pi);
    // eta(i) = Gamma(1/4) / (2 pi^{3/4})
    let expect = Float::with_val(256, Float::with_val(256, 0.25).gamma() / (pi.clone().pow(0.75f64) * 2u32));
    let got = eta(&lattice(0.0, 1.0), &spec).unwrap();
    assert!(Float::with_val(256, &got.value.re - &expect).abs().to_f64() < 1e-33);

    let tol = 2.0 * spec.target_abs_err().to_f64();
    for t in [0.02, 0.1, 0.5, 1.0, 2.0, 7.0, 50.0] {
        let l = lattice(0.0, t);
        let direct = eta_direct(&l, &spec).unwrap();
        let transformed = eta_transformed(&l, &spec).unwrap();
        let d = (&direct.value - &transformed.value).abs().to_f64();
        assert!(d <= tol, "t={t}: {d}");
    }
    let two = eta(&lattice(0.0, 2.0), &spec).unwrap().value;
    let half = eta(&lattice(0.0, 0.5), &spec).unwrap().value;
    let ratio = (&half / &two).re.to_f64();
    assert!((ratio - 2f64.sqrt()).abs() < 1e-14);
}

#[test]
fn fast_nome_product() {
    let spec = PrecisionSpec::bits(192).unwrap();
    for q in [0.5, 0.9, 0.99, 0.999] {
        let nome = QNome::from_f64(q, 192).unwrap();
        let fast = qq_infinity_fast(&nome, &spec).unwrap();
        let direct = qpoch_infinite_direct_relative(&XComplex::from_real(nome.q().clone()), &nome, &spec).unwrap();
        let rel = (Float::with_val(192, &fast.value.re - &direct.value.re) / &direct.value.re).abs();
        assert!(rel.to_f64() < 1e-50, "q={q}: {}", rel.to_f64());
    }
    let nome = QNome::from_f64(0.999, 192).unwrap();
    assert!(qq_infinity_fast(&nome, &spec).unwrap().terms <= 64);
}

#[test]
fn lemma2_main_term() {
    let r = Lemma2Regime::new(0.3, 1, 1.0).unwrap();
    let e = lemma2_estimate(&r, 128);
    assert_eq!(e.value, 1);
    let r = Lemma2Regime::new(0.5, 16, 1.0).unwrap();
    let e = lemma2_estimate(&r, 256);
    let spec = PrecisionSpec::bits(256).unwrap();
    let exact = qq_infinity_fast(&r.nome(256).unwrap(), &spec).unwrap().value.re;
    let rel = (Float::with_val(256, &exact / &e.value) - 1u32).abs();
    let model = e.relerr_model.to_f64();
    assert!(rel.to_f64() <= 2.0 * model && rel.to_f64() >= 0.5 * model);
    let back = Float::with_val(256, &e.value * &e.reciprocal);
    assert!((back.to_f64() - 1.0).abs() < 1e-60);
    assert!(Lemma2Regime::new(1.0, 4, 1.0).is_err());
}

#[test]
fn modular_bound_follows_precision() {
    // theta_3(0.1 | 0.01i), far inside the modular route
    let (a, l) = (arg(0.1, 0.0), lattice(0.0, 0.01));
    let exact = brute_theta(3, (0.1, 0.0), (0.0, 0.01), 200);
    for bits in [128u32, 256, 384] {
        let s = PrecisionSpec::bits(bits).unwrap();
        let r = theta_modular(ThetaKind::Three, &a, &l, &s).unwrap();
        let target = s.target_abs_err().to_f64();
        assert!(r.remainder.to_f64() <= 4.0 * target, "{bits} bits: bound {}", r.remainder.to_f64());
        let err = (&r.value - &exact.with_prec(bits)).abs().to_f64();
        assert!(err <= r.remainder.to_f64(), "{bits} bits: error {err}");
    }
}
