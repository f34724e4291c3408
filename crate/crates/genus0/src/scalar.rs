//! Scalar abstraction: the same symbolic data (cross-ratios, chord forms,
//! series coefficients) is evaluated over exact rationals, machine floats,
//! high-precision floats, or complex extensions of either.
//!
//! High-precision reals are MPFR-backed (`rug::Float`) with a thread-local
//! working precision, set in decimal digits. Internal working precision is
//! twice the requested digit count.

use std::cell::Cell;
use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rug::float::Round;
use rug::ops::Pow;
use rug::Float;

/// Exact rational scalars used by all symbolic layers.
pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// A field, with enough structure to evaluate cross-ratios and determinants.
pub trait Field: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn from_rat(r: &Rat) -> Self;
    fn from_i64(n: i64) -> Self {
        Self::from_rat(&rat_int(n))
    }
}

/// An ordered field with the analytic functions the quadrature layer needs.
pub trait Real: Field + PartialOrd {
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn sinh(&self) -> Self;
    fn cosh(&self) -> Self;
    fn atan2(&self, x: &Self) -> Self;
    fn pi() -> Self;
    fn powf(&self, e: &Self) -> Self {
        self.ln().mul(e).exp()
    }
    fn powi(&self, mut k: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }
}

impl Field for Rat {
    fn zero() -> Self {
        <Rat as Zero>::zero()
    }
    fn one() -> Self {
        Rat::from(BigInt::from(1))
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
}

impl Field for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn from_rat(r: &Rat) -> Self {
        r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn sinh(&self) -> Self {
        f64::sinh(*self)
    }
    fn cosh(&self) -> Self {
        f64::cosh(*self)
    }
    fn atan2(&self, x: &Self) -> Self {
        f64::atan2(*self, *x)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
}

thread_local! {
    static PREC_BITS: Cell<u32> = const { Cell::new(266) }; // ~80 decimal digits
}

/// Sets the thread-local working precision from a decimal digit request.
/// Working precision is twice the requested digits.
pub fn set_precision_digits(digits: u32) {
    let bits = ((2 * digits.max(10)) as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 8;
    PREC_BITS.with(|p| p.set(bits));
}

/// Current working precision in bits.
pub fn precision_bits() -> u32 {
    PREC_BITS.with(|p| p.get())
}

/// Runs `f` with the working precision set for `digits` decimal digits,
/// restoring the previous precision afterwards.
pub fn with_digits<T>(digits: u32, f: impl FnOnce() -> T) -> T {
    let old = precision_bits();
    set_precision_digits(digits);
    let out = f();
    PREC_BITS.with(|p| p.set(old));
    out
}

/// High-precision real number at the thread-local working precision.
#[derive(Clone, Debug)]
pub struct BigReal(pub Float);

impl BigReal {
    pub fn new(f: Float) -> Self {
        BigReal(f)
    }
    pub fn from_digits_str(s: &str) -> Self {
        let f = Float::with_val(precision_bits(), Float::parse(s).expect("parse float"));
        BigReal(f)
    }
}

impl PartialEq for BigReal {
    fn eq(&self, o: &Self) -> bool {
        self.0 == o.0
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&o.0)
    }
}

impl Field for BigReal {
    fn zero() -> Self {
        BigReal(Float::with_val(precision_bits(), 0))
    }
    fn one() -> Self {
        BigReal(Float::with_val(precision_bits(), 1))
    }
    fn add(&self, o: &Self) -> Self {
        BigReal(Float::with_val(precision_bits(), &self.0 + &o.0))
    }
    fn sub(&self, o: &Self) -> Self {
        BigReal(Float::with_val(precision_bits(), &self.0 - &o.0))
    }
    fn mul(&self, o: &Self) -> Self {
        BigReal(Float::with_val(precision_bits(), &self.0 * &o.0))
    }
    fn div(&self, o: &Self) -> Self {
        BigReal(Float::with_val(precision_bits(), &self.0 / &o.0))
    }
    fn neg(&self) -> Self {
        BigReal(Float::with_val(precision_bits(), -&self.0))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn from_rat(r: &Rat) -> Self {
        let num = rug::Integer::from_str_radix(&r.numer().to_string(), 10).unwrap();
        let den = rug::Integer::from_str_radix(&r.denom().to_string(), 10).unwrap();
        let q = rug::Rational::from((num, den));
        BigReal(Float::with_val(precision_bits(), q))
    }
}

impl Real for BigReal {
    fn from_f64(x: f64) -> Self {
        BigReal(Float::with_val(precision_bits(), x))
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64_round(Round::Nearest)
    }
    fn abs(&self) -> Self {
        BigReal(Float::with_val(precision_bits(), self.0.abs_ref()))
    }
    fn sqrt(&self) -> Self {
        BigReal(Float::with_val(precision_bits(), self.0.sqrt_ref()))
    }
    fn exp(&self) -> Self {
        BigReal(Float::with_val(precision_bits(), self.0.exp_ref()))
    }
    fn ln(&self) -> Self {
        BigReal(Float::with_val(precision_bits(), self.0.ln_ref()))
    }
    fn sin(&self) -> Self {
        BigReal(Float::with_val(precision_bits(), self.0.sin_ref()))
    }
    fn cos(&self) -> Self {
        BigReal(Float::with_val(precision_bits(), self.0.cos_ref()))
    }
    fn sinh(&self) -> Self {
        BigReal(Float::with_val(precision_bits(), self.0.sinh_ref()))
    }
    fn cosh(&self) -> Self {
        BigReal(Float::with_val(precision_bits(), self.0.cosh_ref()))
    }
    fn atan2(&self, x: &Self) -> Self {
        BigReal(Float::with_val(precision_bits(), self.0.atan2_ref(&x.0)))
    }
    fn pi() -> Self {
        BigReal(Float::with_val(
            precision_bits(),
            rug::float::Constant::Pi,
        ))
    }
    fn powf(&self, e: &Self) -> Self {
        if self.0.is_sign_positive() {
            BigReal(Float::with_val(precision_bits(), (&self.0).pow(&e.0)))
        } else {
            self.ln().mul(e).exp()
        }
    }
}

/// Complex numbers over any `Real` backend.
#[derive(Clone, Debug, PartialEq)]
pub struct Complex<T: Real> {
    pub re: T,
    pub im: T,
}

impl<T: Real> Complex<T> {
    pub fn new(re: T, im: T) -> Self {
        Complex { re, im }
    }
    pub fn from_real(re: T) -> Self {
        Complex {
            re,
            im: T::zero(),
        }
    }
    pub fn i() -> Self {
        Complex {
            re: T::zero(),
            im: T::one(),
        }
    }
    pub fn conj(&self) -> Self {
        Complex {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }
    pub fn norm_sqr(&self) -> T {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }
    pub fn abs(&self) -> T {
        self.norm_sqr().sqrt()
    }
    pub fn arg(&self) -> T {
        self.im.atan2(&self.re)
    }
    pub fn scale(&self, t: &T) -> Self {
        Complex {
            re: self.re.mul(t),
            im: self.im.mul(t),
        }
    }
    pub fn exp(&self) -> Self {
        let r = self.re.exp();
        Complex {
            re: r.mul(&self.im.cos()),
            im: r.mul(&self.im.sin()),
        }
    }
    pub fn ln(&self) -> Self {
        Complex {
            re: self.abs().ln(),
            im: self.arg(),
        }
    }
    pub fn powc(&self, e: &Self) -> Self {
        self.ln().mul(e).exp()
    }
    pub fn pow_real(&self, e: &T) -> Self {
        self.ln().scale(e).exp()
    }
    pub fn sin(&self) -> Self {
        // sin z = sin x cosh y + i cos x sinh y
        Complex {
            re: self.re.sin().mul(&self.im.cosh()),
            im: self.re.cos().mul(&self.im.sinh()),
        }
    }
    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        Complex {
            re: self.re.div(&n),
            im: self.im.neg().div(&n),
        }
    }
}

impl<T: Real> Field for Complex<T> {
    fn zero() -> Self {
        Complex {
            re: T::zero(),
            im: T::zero(),
        }
    }
    fn one() -> Self {
        Complex {
            re: T::one(),
            im: T::zero(),
        }
    }
    fn add(&self, o: &Self) -> Self {
        Complex {
            re: self.re.add(&o.re),
            im: self.im.add(&o.im),
        }
    }
    fn sub(&self, o: &Self) -> Self {
        Complex {
            re: self.re.sub(&o.re),
            im: self.im.sub(&o.im),
        }
    }
    fn mul(&self, o: &Self) -> Self {
        Complex {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }
    fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }
    fn neg(&self) -> Self {
        Complex {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn from_rat(r: &Rat) -> Self {
        Complex {
            re: T::from_rat(r),
            im: T::zero(),
        }
    }
}

/// Distance from an exact rational to the nearest integer.
pub fn rat_distance_to_integer(r: &Rat) -> Rat {
    let rounded = r.round();
    (r - rounded).abs()
}
