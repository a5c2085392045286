use proptest::prelude::*;
use qgamma_core::qgamma::*;
use qgamma_core::{Error, PrecisionSpec, QNome, XComplex};
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

fn spec() -> PrecisionSpec {
    PrecisionSpec::bits(128).unwrap()
}

fn nome(q: f64) -> QNome {
    QNome::from_f64(q, 192).unwrap()
}

fn gq(z: (f64, f64), q: &QNome, spec: &PrecisionSpec) -> XComplex {
    gqc(&XComplex::from_f64(192, z.0, z.1), q, spec)
}

fn gqc(z: &XComplex, q: &QNome, spec: &PrecisionSpec) -> XComplex {
    gamma_q(&QGammaArg::new(z.clone(), q.clone()), spec).unwrap().value
}

fn shift(z: &XComplex, by: f64) -> XComplex {
    z + &XComplex::from_f64(192, by, 0.0)
}

/// `[n]_q! = prod_{k=1}^{n-1} (1 - q^k)/(1 - q)`, i.e. `Gamma_q(n)`, in
/// exact rational arithmetic.
fn q_factorial(n: u32, q: (i32, u32)) -> Float {
    use rug::Rational;
    let q = Rational::from(q);
    let mut acc = Rational::from(1);
    let mut qk = Rational::from(1);
    for _ in 1..n {
        qk *= &q;
        let num = Rational::from(1) - &qk;
        let den = Rational::from(1) - &q;
        acc *= num / den;
    }
    Float::with_val(256, &acc)
}

fn tol(spec: &PrecisionSpec) -> f64 {
    spec.target_abs_err().to_f64()
}

fn rel(a: &XComplex, b: &XComplex) -> f64 {
    ((a - b).abs() / b.abs()).to_f64()
}

#[test]
fn integer_arguments_are_q_factorials() {
    let spec = spec();
    for (num, den) in [(1, 2), (9, 10), (99, 100)] {
        let q = QNome::parse(&format!("{num}/{den}"), 192).unwrap();
        for n in 1..=8u32 {
            let got = gamma_q(&QGammaArg::new(XComplex::from_f64(192, n.into(), 0.0), q.clone()), &spec).unwrap();
            let exact = XComplex::from_real(q_factorial(n, (num, den as u32)));
            let d = (&got.value - &exact).abs().to_f64();
            assert!(d <= got.remainder.to_f64(), "q={num}/{den} n={n}: {d}");
            assert!(rel(&got.value, &exact) < 2.0 * tol(&spec));
        }
    }
    let q = nome(0.7);
    assert_eq!(gq((1.0, 0.0), &q, &spec), XComplex::one(128));
}

#[test]
fn poles_are_reported() {
    let spec = spec();
    let q = nome(0.5);
    for z in [0.0, -1.0, -3.0] {
        let r = gamma_q(&QGammaArg::new(XComplex::from_f64(192, z, 0.0), q.clone()), &spec);
        assert!(matches!(r, Err(Error::Pole(_))), "z={z}");
    }
    assert!(matches!(GammaRef::real(-2.0, 128), Err(Error::Pole(_))));
}

#[test]
fn half_argument_series_agrees() {
    let spec = spec();
    for q in [0.3, 0.9, 0.999] {
        let q = nome(q);
        for z in [(0.0, 0.0), (0.7, 0.0), (-0.3, 0.2), (2.5, -1.0)] {
            let z = XComplex::from_f64(192, z.0, z.1);
            let s = gamma_q_half_series(&z, &q, &spec).unwrap();
            let p = gqc(&shift(&z, 0.5), &q, &spec);
            assert!(rel(&s.value, &p) < 2.0 * tol(&spec), "q={} z={z:?}", q.q().to_f64());
        }
    }
    let r = gamma_q_half_series(&XComplex::from_f64(128, -0.5, 0.0), &nome(0.5), &spec);
    assert!(matches!(r, Err(Error::Divergence(_))));
}

#[test]
fn reflection_formula_agrees() {
    let spec = spec();
    for q in [0.2, 0.8, 0.995] {
        let q = nome(q);
        for z in [(0.0, 0.0), (0.25, 0.0), (1.3, 0.0), (0.1, 0.3)] {
            let z = XComplex::from_f64(192, z.0, z.1);
            let r = gamma_q_reflection(&z, &q, &spec).unwrap();
            let a = gqc(&shift(&z, 0.5), &q, &spec);
            let b = gqc(&shift(&-z.clone(), 0.5), &q, &spec);
            assert!(rel(&r.value, &(&a * &b)) < 2.0 * tol(&spec), "q={} z={z:?}", q.q().to_f64());
        }
    }
}

#[test]
fn half_minus_series_agrees() {
    let spec = spec();
    for q in [0.4, 0.9, 0.99] {
        let q = nome(q);
        for z in [0.0, 0.3, 1.7, 4.2] {
            let zc = XComplex::from_f64(192, z, 0.0);
            let s = gamma_q_half_minus_series(&zc, &q, &spec).unwrap();
            let p = gqc(&shift(&-zc, 0.5), &q, &spec);
            assert!(rel(&s.value, &p) < 2.0 * tol(&spec), "q={} z={z}: {}", q.q().to_f64(), rel(&s.value, &p));
        }
    }
}

#[test]
fn log_gamma_matches_value() {
    let spec = spec();
    let q = nome(0.97);
    for z in [0.3, 2.0, 7.5, -0.5, -2.3] {
        let lg = ln_gamma_q_real(&Float::with_val(192, z), &q, &spec).unwrap();
        let v = gq((z, 0.0), &q, &spec);
        let sign = if v.re.is_sign_negative() { -1 } else { 1 };
        assert_eq!(lg.sign, sign, "z={z}");
        let d = (lg.ln_abs.to_f64() - v.abs().ln().to_f64()).abs();
        assert!(d < 1e-25, "z={z}: {d}");
    }
    // far past any f64 range
    let q = nome(1.0 - 1.0 / 4096.0);
    let lg = ln_gamma_q_real(&Float::with_val(192, -700.3), &q, &spec).unwrap();
    assert!(lg.ln_abs.is_finite());
}

#[test]
fn classical_gamma_reference() {
    let spec = PrecisionSpec::bits(256).unwrap();
    for x in [0.5, 1.0, 3.25, 10.0, 57.5, -0.5, -3.7] {
        let g = gamma_ref(&GammaRef::real(x, 256).unwrap(), &spec).unwrap();
        let oracle = Float::with_val(320, x).gamma();
        let d = (Float::with_val(320, &g.value.re - &oracle) / &oracle).abs().to_f64();
        assert!(d < 1e-70, "x={x}: {d}");
        assert!(g.value.im.is_zero());
    }
    // Gamma(z) Gamma(1-z) sin(pi z) = pi and Gamma(z+1) = z Gamma(z), off the real axis
    let pi = Float::with_val(256, Constant::Pi);
    for z in [(0.3, 0.7), (2.5, -4.0), (-1.2, 0.4)] {
        let zc = XComplex::from_f64(256, z.0, z.1);
        let g = gamma_ref(&GammaRef::new(zc.clone()).unwrap(), &spec).unwrap().value;
        let one_minus = &XComplex::one(256) - &zc;
        let h = gamma_ref(&GammaRef::new(one_minus).unwrap(), &spec).unwrap().value;
        let s = zc.scale(&pi).sin();
        let lhs = &(&g * &h) * &s;
        assert!(rel(&lhs, &XComplex::from_real(pi.clone())) < 1e-70, "z={z:?}");
        let mut zp = zc.clone();
        zp.re += 1u32;
        let next = gamma_ref(&GammaRef::new(zp).unwrap(), &spec).unwrap().value;
        assert!(rel(&next, &(&zc * &g)) < 1e-70, "z={z:?}");
    }
}

#[test]
fn q_gamma_tends_to_gamma() {
    let spec = spec();
    let g = Float::with_val(128, 2.3f64).gamma().to_f64();
    let mut prev = f64::INFINITY;
    for k in [6, 9, 12, 15] {
        let q = QNome::from_one_minus(Float::with_val(192, Float::i_exp(1, -k))).unwrap();
        let v = gq((2.3, 0.0), &q, &spec).re.to_f64();
        let d = (v - g).abs();
        assert!(d < prev);
        assert!(d < 2f64.powi(-k + 1), "k={k}: {d}");
        prev = d;
    }
}

#[test]
fn integral_representation() {
    let spec = PrecisionSpec::bits(96).unwrap();
    for q in [0.5, 0.9] {
        let q = nome(q);
        for x in [-0.3, 0.2, 1.3] {
            let x = Float::with_val(128, x);
            let i = q_integral_representation(&x, &q, &spec).unwrap();
            let c = q_integral_closed_form(&x, &q, &spec).unwrap();
            assert!(rel(&i.value, &c.value) < 4.0 * tol(&spec), "q={} x={}: {}", q.q().to_f64(), x.to_f64(), rel(&i.value, &c.value));
        }
    }
    let q = nome(0.5);
    for bad in [-0.5, 0.5, 1.5] {
        let r = q_integral_representation(&Float::with_val(64, bad), &q, &spec);
        assert!(matches!(r, Err(Error::Domain(_))), "x={bad}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn functional_equation(re in -2.5f64..4.0, im in -1.0f64..1.0, q in 0.1f64..0.98, n in 1u64..6) {
        prop_assume!(im.abs() > 0.05 || (re - re.round()).abs() > 0.05);
        let spec = spec();
        let q = nome(q);
        let z = XComplex::from_f64(192, re, im);
        let g = gqc(&z, &q, &spec);
        let gn = gqc(&shift(&z, n as f64), &q, &spec);
        // (1-q)^n Gamma_q(z+n) / Gamma_q(z) = (q^z;q)_n
        let scale = q.one_minus_q().clone().pow(n as u32);
        let lhs = &gn.scale(&Float::with_val(192, scale)) / &g;
        let rhs = qgamma_core::qseries::qpoch_finite(&q.pow(&z), &q, n, &PrecisionSpec::bits(192).unwrap());
        prop_assert!(rel(&lhs, &rhs) < 4.0 * tol(&spec));
    }
}

#[test]
fn gosper_limit_is_approached_monotonically() {
    let spec = spec();
    for z in [0.25, 0.5, 1.5, 2.7] {
        let g = gamma_ref(&GammaRef::real(z, 128).unwrap(), &spec).unwrap().value;
        let mut prev = f64::INFINITY;
        for k in 4..=12 {
            let q = QNome::from_one_minus(Float::with_val(192, Float::i_exp(1, -k))).unwrap();
            let d = (&gq((z, 0.0), &q, &spec) - &g).abs().to_f64();
            assert!(d < prev, "z={z} k={k}");
            prev = d;
        }
        assert!(prev < 1e-2);
    }
}

/// `1/Gamma(z) = z prod_{k<=N} (1 + z/k)(1 + 1/k)^{-z}`, with the `1/N`
/// tail removed by Richardson extrapolation over `N, 2N, 4N, 8N`.
fn euler_product_reciprocal(z: f64, n: u64) -> f64 {
    let partial = |n: u64| {
        let mut acc = Float::with_val(128, z);
        for k in 1..=n {
            let k = Float::with_val(128, k);
            let a = Float::with_val(128, z / &k) + 1u32;
            let b = (Float::with_val(128, k.recip_ref()) + 1u32).ln() * z;
            acc *= a * (-b).exp();
        }
        acc
    };
    let mut table: Vec<Float> = (0..4).map(|j| partial(n << j)).collect();
    for level in 1..4 {
        let f = Float::with_val(128, 1u32 << level);
        table = table
            .windows(2)
            .map(|w| Float::with_val(128, &w[1] * &f - &w[0]) / Float::with_val(128, &f - 1u32))
            .collect();
    }
    table[0].to_f64()
}

#[test]
fn reference_gamma_reproduces_euler_product() {
    let spec = spec();
    for z in [0.3, 1.0, 2.5, -0.7] {
        let g = gamma_ref(&GammaRef::real(z, 128).unwrap(), &spec).unwrap().value.re.to_f64();
        let p = euler_product_reciprocal(z, 500);
        assert!((g * p - 1.0).abs() < 1e-9, "z={z}: {}", g * p);
    }
    let five = gamma_ref(&GammaRef::real(5.0, 128).unwrap(), &spec).unwrap();
    assert!((five.value.re - 24u32).abs().to_f64() < 1e-33);
}
