//! Extended-precision complex scalar built on MPFR reals.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Constant;
use rug::Float;

/// Extended-precision real scalar.
pub type XReal = Float;

/// Complex number whose parts share one binary precision.
#[derive(Clone, Debug, PartialEq)]
pub struct XComplex {
    pub re: Float,
    pub im: Float,
}

impl XComplex {
    pub fn new(re: Float, im: Float) -> Self {
        Self { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Self::new(Float::new(prec), Float::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        Self::new(Float::with_val(prec, 1), Float::new(prec))
    }

    pub fn i(prec: u32) -> Self {
        Self::new(Float::new(prec), Float::with_val(prec, 1))
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        Self::new(Float::with_val(prec, re), Float::with_val(prec, im))
    }

    pub fn from_real(re: Float) -> Self {
        let prec = re.prec();
        Self::new(re, Float::new(prec))
    }

    pub fn from_real_ref(re: &Float, prec: u32) -> Self {
        Self::new(Float::with_val(prec, re), Float::new(prec))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    /// Copy rounded (or exactly extended) to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Self {
        Self::new(Float::with_val(prec, &self.re), Float::with_val(prec, &self.im))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), Float::with_val(self.im.prec(), -&self.im))
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    pub fn scale(&self, k: &Float) -> Self {
        let p = self.prec();
        Self::new(Float::with_val(p, &self.re * k), Float::with_val(p, &self.im * k))
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> Self {
        Self::new(Float::with_val(self.prec(), -&self.im), self.re.clone())
    }

    pub fn recip(&self) -> Self {
        let p = self.prec();
        let d = self.norm_sqr();
        Self::new(
            Float::with_val(p, &self.re / &d),
            Float::with_val(p, -Float::with_val(p, &self.im / &d)),
        )
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        let r = Float::with_val(p, self.re.exp_ref());
        let (s, c) = self.im.clone().sin_cos(Float::new(p));
        Self::new(r.clone() * c, r * s)
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        let p = self.prec();
        Self::new(Float::with_val(p, self.abs().ln()), self.arg())
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        if self.is_zero() {
            return Self::zero(p);
        }
        let r = self.abs();
        if !self.re.is_sign_negative() {
            let s = Float::with_val(p, (r + &self.re) / 2u32).sqrt();
            let im = Float::with_val(p, &self.im / &s) / 2u32;
            Self::new(s, im)
        } else {
            let s = Float::with_val(p, (r - &self.re) / 2u32).sqrt();
            let re = Float::with_val(p, self.im.abs_ref()) / &s / 2u32;
            let im = if self.im.is_sign_negative() && !self.im.is_zero() {
                -s
            } else {
                s
            };
            Self::new(re, im)
        }
    }

    pub fn sin(&self) -> Self {
        let p = self.prec();
        let (s, c) = self.re.clone().sin_cos(Float::new(p));
        let (sh, ch) = self.im.clone().sinh_cosh(Float::new(p));
        Self::new(s * ch, c * sh)
    }

    pub fn cos(&self) -> Self {
        let p = self.prec();
        let (s, c) = self.re.clone().sin_cos(Float::new(p));
        let (sh, ch) = self.im.clone().sinh_cosh(Float::new(p));
        Self::new(c * ch, -(s * sh))
    }

    /// Integer power by repeated squaring.
    pub fn pow_u64(&self, mut n: u64) -> Self {
        let p = self.prec();
        let mut result = Self::one(p);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// `e^{i pi x}` for a real multiple `x`.
    pub fn exp_i_pi(x: &Float) -> Self {
        let p = x.prec();
        let angle = Float::with_val(p, Constant::Pi) * x;
        let (s, c) = angle.sin_cos(Float::new(p));
        Self::new(c, s)
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Display for XComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision();
        let re = self.re.to_string_radix(10, digits);
        if self.im.is_zero() {
            write!(f, "{re}")
        } else {
            let im = self.im.to_string_radix(10, digits);
            if self.im.is_sign_negative() {
                write!(f, "{re}{im}i")
            } else {
                write!(f, "{re}+{im}i")
            }
        }
    }
}

impl<'a> Add<&'a XComplex> for &'a XComplex {
    type Output = XComplex;
    fn add(self, rhs: &XComplex) -> XComplex {
        let p = self.prec();
        XComplex::new(
            Float::with_val(p, &self.re + &rhs.re),
            Float::with_val(p, &self.im + &rhs.im),
        )
    }
}

impl<'a> Sub<&'a XComplex> for &'a XComplex {
    type Output = XComplex;
    fn sub(self, rhs: &XComplex) -> XComplex {
        let p = self.prec();
        XComplex::new(
            Float::with_val(p, &self.re - &rhs.re),
            Float::with_val(p, &self.im - &rhs.im),
        )
    }
}

impl<'a> Mul<&'a XComplex> for &'a XComplex {
    type Output = XComplex;
    fn mul(self, rhs: &XComplex) -> XComplex {
        let p = self.prec();
        if rhs.im.is_zero() {
            return XComplex::new(
                Float::with_val(p, &self.re * &rhs.re),
                Float::with_val(p, &self.im * &rhs.re),
            );
        }
        if self.im.is_zero() {
            return XComplex::new(
                Float::with_val(p, &self.re * &rhs.re),
                Float::with_val(p, &self.re * &rhs.im),
            );
        }
        let ac = Float::with_val(p, &self.re * &rhs.re);
        let bd = Float::with_val(p, &self.im * &rhs.im);
        let ad = Float::with_val(p, &self.re * &rhs.im);
        let bc = Float::with_val(p, &self.im * &rhs.re);
        XComplex::new(ac - bd, ad + bc)
    }
}

impl<'a> Div<&'a XComplex> for &'a XComplex {
    type Output = XComplex;
    fn div(self, rhs: &XComplex) -> XComplex {
        let p = self.prec();
        if rhs.im.is_zero() {
            return XComplex::new(
                Float::with_val(p, &self.re / &rhs.re),
                Float::with_val(p, &self.im / &rhs.re),
            );
        }
        let d = rhs.norm_sqr();
        let ac = Float::with_val(p, &self.re * &rhs.re);
        let bd = Float::with_val(p, &self.im * &rhs.im);
        let bc = Float::with_val(p, &self.im * &rhs.re);
        let ad = Float::with_val(p, &self.re * &rhs.im);
        XComplex::new((ac + bd) / &d, (bc - ad) / &d)
    }
}

impl Neg for &XComplex {
    type Output = XComplex;
    fn neg(self) -> XComplex {
        XComplex::new(
            Float::with_val(self.re.prec(), -&self.re),
            Float::with_val(self.im.prec(), -&self.im),
        )
    }
}

impl Neg for XComplex {
    type Output = XComplex;
    fn neg(self) -> XComplex {
        XComplex::new(-self.re, -self.im)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<XComplex> for XComplex {
            type Output = XComplex;
            fn $m(self, rhs: XComplex) -> XComplex { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a XComplex> for XComplex {
            type Output = XComplex;
            fn $m(self, rhs: &XComplex) -> XComplex { (&self).$m(rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl AddAssign<&XComplex> for XComplex {
    fn add_assign(&mut self, rhs: &XComplex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&XComplex> for XComplex {
    fn sub_assign(&mut self, rhs: &XComplex) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&XComplex> for XComplex {
    fn mul_assign(&mut self, rhs: &XComplex) {
        *self = &*self * rhs;
    }
}

impl MulAssign<&Float> for XComplex {
    fn mul_assign(&mut self, rhs: &Float) {
        self.re *= rhs;
        self.im *= rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &XComplex, b: (f64, f64), tol: f64) -> bool {
        let (re, im) = a.to_f64_pair();
        (re - b.0).abs() < tol && (im - b.1).abs() < tol
    }

    #[test]
    fn field_operations() {
        let a = XComplex::from_f64(128, 1.5, -2.0);
        let b = XComplex::from_f64(128, -0.25, 3.0);
        assert!(close(&(&a * &b), (5.625, 5.0), 1e-15));
        let q = &(&a * &b) / &b;
        assert!(close(&q, (1.5, -2.0), 1e-30));
        assert!(close(&a.recip(), (0.24, 0.32), 1e-15));
    }

    #[test]
    fn principal_branches() {
        let neg = XComplex::from_f64(128, -4.0, 0.0);
        assert!(close(&neg.sqrt(), (0.0, 2.0), 1e-30));
        let below = XComplex::from_f64(128, -4.0, -1e-30);
        assert!(below.sqrt().im.is_sign_negative());
        let z = XComplex::from_f64(128, 0.3, -1.7);
        let back = z.sqrt();
        assert!(close(&(&back * &back), (0.3, -1.7), 1e-30));
        assert!(close(&z.ln().exp(), (0.3, -1.7), 1e-30));
    }

    #[test]
    fn trig_and_powers() {
        let z = XComplex::from_f64(128, 0.7, 0.2);
        let s = z.sin();
        let c = z.cos();
        let one = &(&s * &s) + &(&c * &c);
        assert!(close(&one, (1.0, 0.0), 1e-30));
        let p = z.pow_u64(7);
        let mut direct = XComplex::one(128);
        for _ in 0..7 {
            direct = &direct * &z;
        }
        assert!(close(&(&p - &direct), (0.0, 0.0), 1e-30));
    }
}
