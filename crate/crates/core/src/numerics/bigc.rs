use super::{gauss::split_complex, Field, Rat, RealField, ScalarText};
use crate::error::{Error, Result};
use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_complex::Complex;
use num_traits::{Num, One, Zero};
use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

const MIN_PRECISION: usize = 64;
static DEFAULT_PRECISION: AtomicUsize = AtomicUsize::new(256);
const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

/// Precision in bits used for constants and conversions.
pub fn default_precision() -> usize {
    DEFAULT_PRECISION.load(AtomicOrdering::Relaxed)
}

/// Sets the process-wide working precision; values below 64 bits are rejected.
pub fn set_default_precision(bits: usize) -> Result<()> {
    if bits < MIN_PRECISION {
        return Err(Error::Config(format!("precision {bits} is below {MIN_PRECISION} bits")));
    }
    DEFAULT_PRECISION.store(bits, AtomicOrdering::Relaxed);
    Ok(())
}

/// Restores the previous working precision when dropped.
pub struct PrecisionGuard(usize);

impl PrecisionGuard {
    pub fn set(bits: usize) -> Result<Self> {
        let old = default_precision();
        set_default_precision(bits)?;
        Ok(PrecisionGuard(old))
    }
}

impl Drop for PrecisionGuard {
    fn drop(&mut self) {
        DEFAULT_PRECISION.store(self.0, AtomicOrdering::Relaxed);
    }
}

/// Arbitrary-precision binary float. Results carry the larger operand precision.
#[derive(Clone)]
pub struct BigReal {
    v: BigFloat,
    p: usize,
}

/// Arbitrary-precision complex number.
pub type BigC = Complex<BigReal>;

impl BigReal {
    fn wrap(v: BigFloat, p: usize) -> Self {
        BigReal { v, p }
    }

    pub fn precision(&self) -> usize {
        self.p
    }

    pub fn from_i64_prec(v: i64, p: usize) -> Self {
        Self::wrap(BigFloat::from_i64(v, p), p)
    }

    pub fn from_f64_prec(v: f64, p: usize) -> Self {
        Self::wrap(BigFloat::from_f64(v, p), p)
    }

    pub fn from_rat_prec(r: &Rat, p: usize) -> Self {
        let n = Self::parse_prec(&r.numer().to_string(), p).expect("integer literal");
        let d = Self::parse_prec(&r.denom().to_string(), p).expect("integer literal");
        n / d
    }

    /// Decimal or scientific notation, or an exact fraction `p/q`.
    pub fn parse_prec(s: &str, p: usize) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() {
            return Err(Error::Parse(s.to_string()));
        }
        if let Some((num, den)) = t.split_once('/') {
            let d = Self::parse_prec(den, p)?;
            if den.contains('/') || d.is_zero() {
                return Err(Error::Parse(s.to_string()));
            }
            return Ok(Self::parse_prec(num, p)? / d);
        }
        let v = CONSTS.with(|cc| BigFloat::parse(t, Radix::Dec, p, RM, &mut cc.borrow_mut()));
        if v.is_nan() || v.is_inf() {
            return Err(Error::Parse(s.to_string()));
        }
        Ok(Self::wrap(v, p))
    }

    /// Raises the working precision of a value; never lowers it.
    pub fn promote(&self, p: usize) -> Self {
        if p <= self.p {
            return self.clone();
        }
        let mut v = self.v.clone();
        v.set_precision(p, RM).expect("precision increase");
        Self::wrap(v, p)
    }

    pub fn sqrt(&self) -> Self {
        Self::wrap(self.v.sqrt(self.p, RM), self.p)
    }

    pub fn ln(&self) -> Self {
        let v = CONSTS.with(|cc| self.v.ln(self.p, RM, &mut cc.borrow_mut()));
        Self::wrap(v, self.p)
    }

    pub fn exp(&self) -> Self {
        let v = CONSTS.with(|cc| self.v.exp(self.p, RM, &mut cc.borrow_mut()));
        Self::wrap(v, self.p)
    }

    pub fn is_finite(&self) -> bool {
        !self.v.is_nan() && !self.v.is_inf()
    }

    pub fn is_negative(&self) -> bool {
        self.v.is_negative()
    }

    fn binop(&self, o: &Self, f: impl Fn(&BigFloat, &BigFloat, usize) -> BigFloat) -> Self {
        let p = self.p.max(o.p);
        Self::wrap(f(&self.v, &o.v, p), p)
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl PartialEq for BigReal {
    fn eq(&self, o: &Self) -> bool {
        self.v.cmp(&o.v) == Some(0)
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        self.v.cmp(&o.v).map(|c| c.cmp(&0))
    }
}

impl Add for BigReal {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.binop(&o, |a, b, p| a.add(b, p, RM))
    }
}

impl Sub for BigReal {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self.binop(&o, |a, b, p| a.sub(b, p, RM))
    }
}

impl Mul for BigReal {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        self.binop(&o, |a, b, p| a.mul(b, p, RM))
    }
}

impl Div for BigReal {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        self.binop(&o, |a, b, p| a.div(b, p, RM))
    }
}

impl Rem for BigReal {
    type Output = Self;
    fn rem(self, o: Self) -> Self {
        self.binop(&o, |a, b, _| a.rem(b))
    }
}

impl Neg for BigReal {
    type Output = Self;
    fn neg(self) -> Self {
        Self::wrap(self.v.neg(), self.p)
    }
}

impl Zero for BigReal {
    fn zero() -> Self {
        let p = default_precision();
        Self::wrap(BigFloat::new(p), p)
    }
    fn is_zero(&self) -> bool {
        self.v.is_zero()
    }
}

impl One for BigReal {
    fn one() -> Self {
        Self::from_i64_prec(1, default_precision())
    }
}

impl Num for BigReal {
    type FromStrRadixErr = Error;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self> {
        if radix != 10 {
            return Err(Error::Parse(format!("radix {radix} unsupported")));
        }
        Self::parse_prec(s, default_precision())
    }
}

impl Field for BigReal {
    fn from_i64(v: i64) -> Self {
        Self::from_i64_prec(v, default_precision())
    }
    fn from_rat(r: &Rat) -> Self {
        Self::from_rat_prec(r, default_precision())
    }
    fn abs_l1(&self) -> Self {
        RealField::abs(self)
    }
    fn approx_f64(&self) -> f64 {
        let Some((m, _, s, e, _)) = self.v.as_raw_parts() else {
            return f64::NAN;
        };
        let Some(&top) = m.last() else {
            return 0.0;
        };
        if top == 0 {
            return 0.0;
        }
        let word_bits = (std::mem::size_of_val(&top) * 8) as i32;
        let mag = (top as f64) * 2f64.powi(e.saturating_sub(word_bits).clamp(-1100, 1100));
        if s == Sign::Neg {
            -mag
        } else {
            mag
        }
    }
    fn negligible(&self, scale: &Self) -> bool {
        if self.is_zero() {
            return true;
        }
        let p = self.p.max(scale.p);
        let tol = BigReal::from_i64_prec(2, p).v.powi(p / 2, p, RM);
        let lhs = RealField::abs(self) * Self::wrap(tol, p);
        lhs <= RealField::abs(scale)
    }
}

impl RealField for BigReal {
    fn sqrt_opt(&self) -> Option<Self> {
        (!self.is_negative()).then(|| self.sqrt())
    }
}

impl ScalarText for BigReal {
    fn to_text(&self) -> String {
        self.to_string()
    }
    fn from_text(s: &str) -> Result<Self> {
        Self::parse_prec(s, default_precision())
    }
}

impl ScalarText for BigC {
    fn to_text(&self) -> String {
        if self.im.is_zero() {
            return self.re.to_string();
        }
        let sign = if self.im.is_negative() { "-" } else { "+" };
        format!("{}{}{}i", self.re, sign, RealField::abs(&self.im))
    }
    fn from_text(s: &str) -> Result<Self> {
        let (re, im) = split_complex(s)?;
        let p = default_precision();
        let parse = |t: &str| -> Result<BigReal> {
            match t {
                "" => Ok(BigReal::zero()),
                "+" => Ok(BigReal::one()),
                "-" => Ok(-BigReal::one()),
                _ => BigReal::parse_prec(t, p),
            }
        };
        Ok(Complex::new(parse(&re)?, parse(&im)?))
    }
}
