//! Scalars over the field `F = R, C` in two backings: exact rational pairs
//! (re, im) and binary64 float pairs. Exact scalars support exact equality,
//! conjugation and modulus-squared; float scalars carry no exactness claims.
//! The two backings are never mixed inside one matrix or algebra element;
//! mixed scalar arithmetic promotes to float.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// A scalar in `R` or `C`, exact or float backed. Real scalars are those
/// with vanishing imaginary part.
#[derive(Clone, PartialEq)]
pub enum Scalar {
    Exact(Rational, Rational),
    Float(f64, f64),
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(re, im) if im.is_zero() => write!(f, "{}", re),
            Scalar::Exact(re, im) => write!(f, "{}+{}i", re, im),
            Scalar::Float(re, im) if *im == 0.0 => write!(f, "{}", re),
            Scalar::Float(re, im) => write!(f, "{}+{}i", re, im),
        }
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(Rational::zero(), Rational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(Rational::one(), Rational::zero())
    }

    pub fn i() -> Self {
        Scalar::Exact(Rational::zero(), Rational::one())
    }

    pub fn from_rational(q: Rational) -> Self {
        Scalar::Exact(q, Rational::zero())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_rational(rat_int(n))
    }

    pub fn exact(re: Rational, im: Rational) -> Self {
        Scalar::Exact(re, im)
    }

    pub fn float(re: f64, im: f64) -> Self {
        Scalar::Float(re, im)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_, _))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(re, im) => re.is_zero() && im.is_zero(),
            Scalar::Float(re, im) => *re == 0.0 && *im == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact(re, im) => re.is_one() && im.is_zero(),
            Scalar::Float(re, im) => *re == 1.0 && *im == 0.0,
        }
    }

    pub fn is_real(&self) -> bool {
        match self {
            Scalar::Exact(_, im) => im.is_zero(),
            Scalar::Float(_, im) => *im == 0.0,
        }
    }

    /// Real part as an exact rational, if exact.
    pub fn re_exact(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(re, _) => Some(re),
            Scalar::Float(_, _) => None,
        }
    }

    pub fn to_float(&self) -> (f64, f64) {
        match self {
            Scalar::Exact(re, im) => (
                re.to_f64().unwrap_or(f64::NAN),
                im.to_f64().unwrap_or(f64::NAN),
            ),
            Scalar::Float(re, im) => (*re, *im),
        }
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact(re, im) => Scalar::Exact(re.clone(), -im.clone()),
            Scalar::Float(re, im) => Scalar::Float(*re, -im),
        }
    }

    /// |z|^2; exact for exact scalars.
    pub fn abs_sq(&self) -> Scalar {
        match self {
            Scalar::Exact(re, im) => Scalar::Exact(re * re + im * im, Rational::zero()),
            Scalar::Float(re, im) => Scalar::Float(re * re + im * im, 0.0),
        }
    }

    pub fn abs(&self) -> f64 {
        let (re, im) = self.to_float();
        re.hypot(im)
    }

    /// |z| as an exact rational when that is exact: real or purely
    /// imaginary exact scalars, and exact complex scalars whose modulus
    /// squared is a perfect rational square.
    pub fn abs_exact(&self) -> Option<Rational> {
        match self {
            Scalar::Exact(re, im) => {
                if im.is_zero() {
                    Some(re.abs())
                } else if re.is_zero() {
                    Some(im.abs())
                } else {
                    rational_nth_root(&(re * re + im * im), 2)
                }
            }
            Scalar::Float(_, _) => None,
        }
    }

    /// Exact unimodularity test: |z| = 1 decided exactly for exact scalars.
    /// Float scalars are tested to 1e-12.
    pub fn is_unimodular(&self) -> bool {
        match self {
            Scalar::Exact(_, _) => self.abs_sq() == Scalar::one(),
            Scalar::Float(_, _) => (self.abs() - 1.0).abs() < 1e-12,
        }
    }

    /// Multiplicative inverse of a unimodular scalar is its conjugate.
    pub fn unimodular_inv(&self) -> Scalar {
        debug_assert!(self.is_unimodular());
        self.conj()
    }

    pub fn mul_rational(&self, q: &Rational) -> Scalar {
        match self {
            Scalar::Exact(re, im) => Scalar::Exact(re * q, im * q),
            Scalar::Float(re, im) => {
                let f = q.to_f64().unwrap_or(f64::NAN);
                Scalar::Float(re * f, im * f)
            }
        }
    }

    /// Coerce to the float backing.
    pub fn as_float(&self) -> Scalar {
        let (re, im) = self.to_float();
        Scalar::Float(re, im)
    }
}

fn promote(a: &Scalar, b: &Scalar) -> (Scalar, Scalar) {
    match (a.is_exact(), b.is_exact()) {
        (true, true) | (false, false) => (a.clone(), b.clone()),
        (true, false) => (a.as_float(), b.clone()),
        (false, true) => (a.clone(), b.as_float()),
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match promote(self, rhs) {
            (Scalar::Exact(ar, ai), Scalar::Exact(br, bi)) => Scalar::Exact(ar + br, ai + bi),
            (Scalar::Float(ar, ai), Scalar::Float(br, bi)) => Scalar::Float(ar + br, ai + bi),
            _ => unreachable!(),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match promote(self, rhs) {
            (Scalar::Exact(ar, ai), Scalar::Exact(br, bi)) => {
                Scalar::Exact(&ar * &br - &ai * &bi, &ar * &bi + &ai * &br)
            }
            (Scalar::Float(ar, ai), Scalar::Float(br, bi)) => {
                Scalar::Float(ar * br - ai * bi, ar * bi + ai * br)
            }
            _ => unreachable!(),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(re, im) => Scalar::Exact(-re.clone(), -im.clone()),
            Scalar::Float(re, im) => Scalar::Float(-re, -im),
        }
    }
}

/// Exponent p in [1, ∞]: a rational p ≥ 1 or the ∞ marker. Irrational
/// exponents are unsupported so that dual exponents and interpolation
/// weights stay exact.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Exponent {
    Finite(Rational),
    Infinity,
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(q) => write!(f, "{}", q),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl Exponent {
    pub fn new(q: Rational) -> Result<Self> {
        if q < Rational::one() {
            return Err(Error::Domain(format!("exponent {} outside [1, inf]", q)));
        }
        Ok(Exponent::Finite(q))
    }

    pub fn from_int(n: i64) -> Result<Self> {
        Self::new(rat_int(n))
    }

    pub fn infinity() -> Self {
        Exponent::Infinity
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Exponent::Finite(q) => q.to_f64().unwrap_or(f64::NAN),
            Exponent::Infinity => f64::INFINITY,
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Exponent::Finite(q) => Some(q),
            Exponent::Infinity => None,
        }
    }
}

/// The dual exponent q with 1/p + 1/q = 1, with 1 ↔ ∞.
pub fn p_dual(p: &Exponent) -> Exponent {
    match p {
        Exponent::Infinity => Exponent::Finite(Rational::one()),
        Exponent::Finite(q) if q.is_one() => Exponent::Infinity,
        Exponent::Finite(q) => Exponent::Finite(q / (q - Rational::one())),
    }
}

/// Exact n-th root of a nonnegative rational, when one exists.
pub fn rational_nth_root(q: &Rational, n: u32) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    if q.is_zero() {
        return Some(Rational::zero());
    }
    let num = q.numer().nth_root(n);
    let den = q.denom().nth_root(n);
    let cand = Rational::new(num, den);
    let mut pow = Rational::one();
    for _ in 0..n {
        pow *= &cand;
    }
    if &pow == q {
        Some(cand)
    } else {
        None
    }
}

/// q^e for a rational exponent e = a/b: exact when the b-th root of q
/// exists as a rational.
pub fn rational_pow_exact(q: &Rational, e: &Rational) -> Option<Rational> {
    if q.is_zero() {
        return if e.is_zero() { None } else { Some(Rational::zero()) };
    }
    let a = e.numer();
    let b = e.denom().to_u32()?;
    let root = rational_nth_root(q, b)?;
    let exp_abs = a.abs().to_u32()?;
    let mut out = Rational::one();
    for _ in 0..exp_abs {
        out *= &root;
    }
    if a.is_negative() {
        out = out.recip();
    }
    Some(out)
}

pub fn rational_pow_f64(q: &Rational, e: &Rational) -> f64 {
    let base = q.to_f64().unwrap_or(f64::NAN);
    base.powf(e.to_f64().unwrap_or(f64::NAN))
}
