//! Scalar types and the algebraic traits the rest of the crate is written against.
//!
//! Everything that only needs `+`, `*` and `/` (the positive rational maps) is
//! generic over [`Semifield`], so the same code runs on exact rationals, big
//! floats and the max-plus semifield. Code that needs subtraction asks for
//! [`Field`].

mod bigc;
mod gauss;
mod poly;
mod rat;
mod trop;

pub use bigc::{default_precision, set_default_precision, BigC, BigReal, PrecisionGuard};
pub use gauss::{format_gauss, parse_gauss, GaussRat};
pub use poly::{det as poly_det, Poly};
pub use rat::{format_rat, parse_rat, rat, Rat};
pub use trop::{trop_arith, TropOp, TropVal};

use crate::error::{Error, Result};
use num_complex::Complex;
use num_traits::{Num, One, Zero};
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// A commutative semifield: the structure positive rational maps live in.
pub trait Semifield: Clone + Debug + PartialEq + Send + Sync {
    fn unit() -> Self;
    /// The absorbing element for `otimes`, or `-inf` in max-plus.
    fn null() -> Self;
    fn oplus(&self, rhs: &Self) -> Self;
    fn otimes(&self, rhs: &Self) -> Self;
    /// Division; the divisor must not be [`Semifield::is_null`].
    fn odiv(&self, rhs: &Self) -> Self;
    fn is_null(&self) -> bool;

    fn osum<I: IntoIterator<Item = Self>>(terms: I) -> Self {
        let mut it = terms.into_iter();
        match it.next() {
            None => Self::null(),
            Some(first) => it.fold(first, |acc, t| acc.oplus(&t)),
        }
    }

    fn oprod<I: IntoIterator<Item = Self>>(terms: I) -> Self {
        terms.into_iter().fold(Self::unit(), |acc, t| acc.otimes(&t))
    }

    fn orecip(&self) -> Self {
        Self::unit().odiv(self)
    }

    fn checked_odiv(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_null() {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.odiv(rhs))
        }
    }
}

/// A field of characteristic zero.
pub trait Field:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_i64(v: i64) -> Self;
    fn from_rat(r: &Rat) -> Self;
    /// `|re| + |im|`, embedded back into the field.
    fn abs_l1(&self) -> Self;
    /// Nearest `f64` to the real part.
    fn approx_f64(&self) -> f64;

    /// Whether `self` is zero up to the working accuracy of the type,
    /// measured against `scale`. Exact types demand exact zero.
    fn negligible(&self, _scale: &Self) -> bool {
        self.is_zero()
    }

    fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.clone() / rhs.clone())
        }
    }

    fn powi(&self, e: i32) -> Self {
        let mut base = if e < 0 { Self::one() / self.clone() } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            k >>= 1;
        }
        acc
    }
}

impl<T: Field> Semifield for T {
    fn unit() -> Self {
        T::one()
    }
    fn null() -> Self {
        T::zero()
    }
    fn oplus(&self, rhs: &Self) -> Self {
        self.clone() + rhs.clone()
    }
    fn otimes(&self, rhs: &Self) -> Self {
        self.clone() * rhs.clone()
    }
    fn odiv(&self, rhs: &Self) -> Self {
        self.clone() / rhs.clone()
    }
    fn is_null(&self) -> bool {
        self.is_zero()
    }
}

/// An ordered field with a (possibly partial) square root.
pub trait RealField: Field + Num + PartialOrd {
    /// Square root of a non-negative value; `None` when it does not exist in the type.
    fn sqrt_opt(&self) -> Option<Self>;
    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

/// A field containing `i`, presented as pairs over a real field.
pub trait ComplexField: Field {
    type Real: RealField;
    fn i() -> Self;
    fn from_parts(re: Self::Real, im: Self::Real) -> Self;
    fn re(&self) -> Self::Real;
    fn im(&self) -> Self::Real;
    fn conj(&self) -> Self {
        Self::from_parts(self.re(), -self.im())
    }
    fn from_real(r: Self::Real) -> Self {
        Self::from_parts(r, Self::Real::zero())
    }
    /// Principal square root, when it exists in the type.
    fn sqrt_opt(&self) -> Option<Self> {
        let (a, b) = (self.re(), self.im());
        let two = Self::Real::from_i64(2);
        if b.is_zero() {
            return if a >= Self::Real::zero() {
                a.sqrt_opt().map(Self::from_real)
            } else {
                (-a).sqrt_opt().map(|s| Self::from_parts(Self::Real::zero(), s))
            };
        }
        let r = (a.clone() * a.clone() + b.clone() * b.clone()).sqrt_opt()?;
        let x = ((r.clone() + a.clone()) / two.clone()).sqrt_opt()?;
        let y = ((r - a) / two).sqrt_opt()?;
        let y = if b < Self::Real::zero() { -y } else { y };
        Some(Self::from_parts(x, y))
    }
}

impl<R: RealField> Field for Complex<R> {
    fn from_i64(v: i64) -> Self {
        Complex::new(R::from_i64(v), R::zero())
    }
    fn from_rat(r: &Rat) -> Self {
        Complex::new(R::from_rat(r), R::zero())
    }
    fn abs_l1(&self) -> Self {
        Complex::new(RealField::abs(&self.re) + RealField::abs(&self.im), R::zero())
    }
    fn approx_f64(&self) -> f64 {
        self.re.approx_f64()
    }
    fn negligible(&self, scale: &Self) -> bool {
        let s = scale.abs_l1().re;
        let v = self.abs_l1().re;
        v.negligible(&s)
    }
}

impl<R: RealField> ComplexField for Complex<R> {
    type Real = R;
    fn i() -> Self {
        Complex::new(R::zero(), R::one())
    }
    fn from_parts(re: R, im: R) -> Self {
        Complex::new(re, im)
    }
    fn re(&self) -> R {
        self.re.clone()
    }
    fn im(&self) -> R {
        self.im.clone()
    }
}

macro_rules! float_field {
    ($t:ty, $eps:expr) => {
        impl Field for $t {
            fn from_i64(v: i64) -> Self {
                v as $t
            }
            fn from_rat(r: &Rat) -> Self {
                num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN) as $t
            }
            fn abs_l1(&self) -> Self {
                <$t>::abs(*self)
            }
            fn approx_f64(&self) -> f64 {
                *self as f64
            }
            fn negligible(&self, scale: &Self) -> bool {
                <$t>::abs(*self) <= $eps * <$t>::abs(*scale).max(<$t>::MIN_POSITIVE)
            }
        }
        impl RealField for $t {
            fn sqrt_opt(&self) -> Option<Self> {
                (*self >= 0.0).then(|| <$t>::sqrt(*self))
            }
        }
    };
}

float_field!(f64, 1e-9);
float_field!(f32, 1e-4);

/// `|a - b| / max(|a|, |b|)` as an `f64`, with `0` when both vanish.
pub fn relative_gap<F: Field>(a: &F, b: &F) -> f64 {
    let d = (a.clone() - b.clone()).abs_l1();
    let sa = a.abs_l1();
    let sb = b.abs_l1();
    let s = if sa.approx_f64() >= sb.approx_f64() { sa } else { sb };
    if s.is_zero() {
        return if d.is_zero() { 0.0 } else { f64::INFINITY };
    }
    (d / s).approx_f64().abs()
}

/// Residual of a sum of signed terms, scaled by its largest term.
pub fn relative_residual<F: Field>(terms: &[F]) -> f64 {
    let total = terms.iter().cloned().fold(F::zero(), |a, t| a + t);
    let mut scale = F::zero();
    let mut best = 0.0f64;
    for t in terms {
        let m = t.abs_l1();
        let v = m.approx_f64().abs();
        if v >= best {
            best = v;
            scale = m;
        }
    }
    if scale.is_zero() {
        return if total.is_zero() { 0.0 } else { f64::INFINITY };
    }
    (total.abs_l1() / scale).approx_f64().abs()
}

/// Text form used by the JSON and CSV layers.
pub trait ScalarText: Sized {
    fn to_text(&self) -> String;
    fn from_text(s: &str) -> Result<Self>;
}

impl ScalarText for f64 {
    fn to_text(&self) -> String {
        format!("{self:e}")
    }
    fn from_text(s: &str) -> Result<Self> {
        s.trim().parse().map_err(|_| Error::Parse(s.to_string()))
    }
}
