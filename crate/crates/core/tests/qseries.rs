use proptest::prelude::*;
use qgamma_core::qseries::*;
use qgamma_core::{PrecisionSpec, QNome, XComplex};
use rug::Float;

/// Brute-force `prod_{k<count} (1 - a q^k)` in plain complex arithmetic.
fn brute_product(a: (f64, f64), q: f64, count: u64, prec: u32) -> (Float, Float) {
    brute_product_re(Float::with_val(prec, a.0), a.1, q, count, prec)
}

fn brute_product_re(re: Float, im: f64, q: f64, count: u64, prec: u32) -> (Float, Float) {
    let a = (re, im);
    let q = Float::with_val(prec, q);
    let mut wr = a.0;
    let mut wi = Float::with_val(prec, a.1);
    let mut pr = Float::with_val(prec, 1);
    let mut pi = Float::new(prec);
    for _ in 0..count {
        let fr = Float::with_val(prec, 1 - &wr);
        let fi = Float::with_val(prec, -&wi);
        let nr = Float::with_val(prec, &pr * &fr) - Float::with_val(prec, &pi * &fi);
        let ni = Float::with_val(prec, &pr * &fi) + Float::with_val(prec, &pi * &fr);
        pr = nr;
        pi = ni;
        wr *= &q;
        wi *= &q;
    }
    (pr, pi)
}

fn dist(v: &XComplex, o: &(Float, Float)) -> f64 {
    let dr = Float::with_val(600, &v.re - &o.0);
    let di = Float::with_val(600, &v.im - &o.1);
    Float::with_val(600, dr.hypot(&di)).to_f64()
}

fn spec128() -> PrecisionSpec {
    PrecisionSpec::bits(128).unwrap()
}

#[test]
fn finite_products() {
    let spec = spec128();
    let q = QNome::from_f64(0.5, 128).unwrap();
    let one = qpoch_finite(&spec.complex(0.7, 0.0), &q, 0, &spec);
    assert_eq!(one.re, 1);
    let v = qpoch_finite(&spec.complex(0.5, 0.0), &q, 2, &spec);
    assert_eq!(v.re, 0.375);
    let q9 = QNome::from_f64(0.9, 128).unwrap();
    assert!(qpoch_finite(&spec.complex(1.0, 0.0), &q9, 5, &spec).is_zero());
}

#[test]
fn infinite_product_matches_brute_force() {
    let spec = spec128();
    for (a, q, count) in [((0.5, 0.0), 0.5, 200u64), ((0.9, 0.0), 0.9, 2000), ((1.5, -0.5), 0.6, 600)] {
        let nome = QNome::from_f64(q, 128).unwrap();
        let got = qpoch_infinite(&spec.complex(a.0, a.1), &nome, &spec).unwrap();
        let oracle = brute_product(a, q, count, 512);
        let d = dist(&got.value, &oracle);
        assert!(d <= got.remainder.to_f64(), "a={a:?} q={q}: {d} > {}", got.remainder.to_f64());
        assert!(got.remainder.to_f64() <= spec.target_abs_err().to_f64());
    }
    let zero = qpoch_infinite(&spec.complex(0.0, 0.0), &QNome::from_f64(0.5, 128).unwrap(), &spec).unwrap();
    assert_eq!(zero.value.re, 1);
    assert!(zero.remainder.magnitude.is_zero());
}

#[test]
fn near_one_routes_agree_with_direct_product() {
    let spec = spec128();
    let q = QNome::from_f64(0.9995, 128).unwrap();
    for a in [(0.3, 0.0), (-1.0, 0.0), (0.2, 0.4)] {
        let routed = qpoch_infinite(&spec.complex(a.0, a.1), &q, &spec).unwrap();
        let direct = qpoch_infinite_direct(&spec.complex(a.0, a.1), &q, &spec).unwrap();
        let d = (&routed.value - &direct.value).abs().to_f64();
        assert!(d <= routed.remainder.to_f64() + direct.remainder.to_f64(), "a={a:?}: {d}");
    }
    let routed = qpoch_infinite(&XComplex::from_real(q.q().clone()), &q, &spec).unwrap();
    assert!(routed.terms <= 4, "modular route used {} factors", routed.terms);
    let direct = qpoch_infinite_direct_relative(&XComplex::from_real(q.q().clone()), &q, &spec).unwrap();
    let rel = (Float::with_val(128, &routed.value.re - &direct.value.re) / &direct.value.re).abs();
    assert!(rel.to_f64() < 1e-30, "{}", rel.to_f64());
}

#[test]
fn log_of_real_products() {
    let spec = spec128();
    let q = QNome::from_f64(0.99, 128).unwrap();
    for a in [0.4, -2.0, 150.0] {
        let a_f = Float::with_val(128, a);
        let lg = ln_qpoch_real(&a_f, &q, &spec).unwrap();
        let direct = qpoch_infinite_direct_relative(&spec.complex(a, 0.0), &q, &spec).unwrap();
        let expect_sign = if direct.value.re.is_sign_negative() { -1 } else { 1 };
        assert_eq!(lg.sign, expect_sign, "a={a}");
        let ln_direct = Float::with_val(128, direct.value.re.abs_ref()).ln();
        let d = Float::with_val(128, &lg.ln_abs - &ln_direct).abs().to_f64();
        assert!(d < 1e-30, "a={a}: {d}");
    }
}

#[test]
fn lemma1_examples() {
    let spec = spec128();
    let half = QNome::from_f64(0.5, 128).unwrap();
    let r = lemma1_reciprocal(&spec.complex(0.0, 0.0), &half, 2, 1, &spec).unwrap();
    assert_eq!(r.value.re, 1);
    assert!(r.remainder.magnitude.is_zero());
    assert!(r.remainder.is_rigorous());

    let r = lemma1_reciprocal(&spec.complex(1.0, 0.0), &half, 3, 5, &spec).unwrap();
    let oracle = brute_product((0.125, 0.0), 0.5, 300, 512);
    let inv = Float::with_val(512, oracle.0.recip_ref());
    let d = Float::with_val(512, &r.value.re - &inv).abs().to_f64();
    assert!(d <= r.remainder.to_f64());
    let expect = 2.0 * 0.125f64.powi(5) / (0.5 * 0.75 * 0.875 * 0.9375 * 0.96875);
    assert!((r.remainder.to_f64() / expect - 1.0).abs() < 1e-12);

    let err = lemma1_reciprocal(&spec.complex(1.0, 0.0), &half, 1, 3, &spec).unwrap_err();
    assert!(matches!(err, qgamma_core::Error::Domain(_)));

    let d4 = lemma1_direct(&spec.complex(1.0, 0.0), &half, 3, 4, &spec).unwrap();
    let dist = Float::with_val(512, &d4.value.re - &oracle.0).abs().to_f64();
    assert!(dist <= d4.remainder.to_f64());
    let d5 = lemma1_direct(&spec.complex(1.0, 0.0), &half, 3, 5, &spec).unwrap();
    assert!(d5.remainder.magnitude < d4.remainder.magnitude);
}

#[test]
fn lemma1_auto_order_meets_target() {
    let spec = spec128();
    let q = QNome::from_f64(0.9, 128).unwrap();
    let a = spec.complex(0.5, 0.5);
    let r = lemma1_reciprocal_auto(&a, &q, 60, &spec).unwrap();
    assert!(r.remainder.magnitude <= *spec.target_abs_err());
    let smaller = lemma1_reciprocal(&a, &q, 60, r.terms - 1, &spec).unwrap();
    assert!(smaller.remainder.magnitude > *spec.target_abs_err());
    let d = lemma1_direct_auto(&a, &q, 60, &spec).unwrap();
    let prod = &r.value * &d.value;
    assert!((&prod - &XComplex::one(128)).abs().to_f64() < 1e-30);
}

#[test]
fn series_match_products() {
    let spec = spec128();
    let q6 = QNome::from_f64(0.6, 128).unwrap();
    let s = qbinomial_series(&spec.complex(0.2, 0.0), &spec.complex(0.4, 0.0), &q6, &spec).unwrap();
    let az = Float::with_val(512, Float::with_val(512, 0.2) * 0.4);
    let num = brute_product_re(az, 0.0, 0.6, 400, 512);
    let den = brute_product((0.4, 0.0), 0.6, 400, 512);
    let ratio = Float::with_val(512, &num.0 / &den.0);
    let d = Float::with_val(512, &s.value.re - &ratio).abs().to_f64();
    assert!(d <= s.remainder.to_f64(), "{d} > {} ({} terms)", s.remainder.to_f64(), s.terms);

    let q = QNome::from_f64(0.99, 128).unwrap();
    let geo = qbinomial_series(&XComplex::from_real(q.q().clone()), &spec.complex(0.5, 0.2), &q, &spec).unwrap();
    let expect = (&XComplex::one(128) - &spec.complex(0.5, 0.2)).recip();
    assert!((&geo.value - &expect).abs().to_f64() < 1e-30);
    assert!(matches!(
        qbinomial_series(&spec.complex(0.1, 0.0), &spec.complex(1.0, 0.0), &q, &spec),
        Err(qgamma_core::Error::Divergence(_))
    ));

    for (z, qv, count) in [(0.5, 0.5, 300u64), (-1.0, 0.9, 3000), (3.0, 0.99, 30000)] {
        let nome = QNome::from_f64(qv, 128).unwrap();
        let e = euler_series(&spec.complex(z, 0.0), &nome, &spec).unwrap();
        let oracle = brute_product((z, 0.0), qv, count, 512);
        let d = Float::with_val(512, &e.value.re - &oracle.0).abs().to_f64();
        assert!(d <= spec.target_abs_err().to_f64(), "z={z} q={qv}: {d}");
    }
    assert_eq!(euler_series(&spec.complex(0.0, 0.0), &q, &spec).unwrap().value.re, 1);
}

#[test]
fn parallel_and_sequential_agree_bitwise() {
    use qgamma_core::Execution;
    let base = PrecisionSpec::bits(192).unwrap();
    let q = QNome::from_f64(0.9999, 192).unwrap();
    let a = base.complex(0.7, 0.1);
    let p = qpoch_infinite_direct(&a, &q, &base.clone().with_execution(Execution::Parallel)).unwrap();
    let s = qpoch_infinite_direct(&a, &q, &base.with_execution(Execution::Sequential)).unwrap();
    assert_eq!(p, s);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn splitting_identity(a in -2.0f64..2.0, q in 0.05f64..0.95, n in 0u64..30) {
        let spec = spec128();
        let nome = QNome::from_f64(q, 128).unwrap();
        let a = spec.complex(a, 0.0);
        let head = qpoch_finite(&a, &nome, n, &spec);
        let shifted = a.scale(&nome.pow_u64(n, 128));
        let tail = qpoch_infinite(&shifted, &nome, &spec).unwrap();
        let full = qpoch_infinite(&a, &nome, &spec).unwrap();
        let lhs = &head * &tail.value;
        let tol = full.remainder.to_f64() + head.abs().to_f64() * tail.remainder.to_f64() + 1e-35;
        prop_assert!((&lhs - &full.value).abs().to_f64() <= tol);
    }

    #[test]
    fn lemma1_bounds_hold(re in -2.0f64..2.0, im in -2.0f64..2.0, q in 0.2f64..0.95, k in 1u64..10) {
        let spec = spec128();
        let nome = QNome::from_f64(q, 128).unwrap();
        let a = spec.complex(re, im);
        let mut n = 1;
        while lemma1_ratio(&a, &nome, n, 128) >= 0.5 { n += 1; }
        let r = lemma1_reciprocal(&a, &nome, n, k, &spec).unwrap();
        let d = lemma1_direct(&a, &nome, n, k, &spec).unwrap();
        let b = a.scale(&nome.pow_u64(n, 128));
        let exact = qpoch_infinite(&b, &nome, &spec.scaled(4)).unwrap().value;
        prop_assert!((&(&r.value * &exact) - &XComplex::one(512)).abs().to_f64() <= r.remainder.to_f64() * exact.abs().to_f64() + 1e-30);
        prop_assert!((&d.value - &exact).abs().to_f64() <= d.remainder.to_f64() + 1e-35);
    }
}
