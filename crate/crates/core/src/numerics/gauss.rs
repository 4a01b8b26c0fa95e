use super::{format_rat, parse_rat, Rat, ScalarText};
use crate::error::{Error, Result};
use num_complex::Complex;
use num_traits::{Signed, Zero};

/// Exact Gaussian rational `a + b i`.
pub type GaussRat = Complex<Rat>;

/// Splits `"a+bi"` into real and imaginary text. A bare sign as imaginary
/// text stands for a unit coefficient; an empty real part means zero.
pub(crate) fn split_complex(s: &str) -> Result<(String, String)> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(Error::Parse(s.to_string()));
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok((t, String::new()));
    };
    let bytes = body.as_bytes();
    for k in (1..bytes.len()).rev() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            return Ok((body[..k].to_string(), body[k..].to_string()));
        }
    }
    let im = if body.is_empty() { "+".to_string() } else { body.to_string() };
    Ok((String::new(), im))
}

/// Parses `"a+bi"`, `"a-bi"`, `"a"`, `"bi"` or `"i"` with rational parts.
pub fn parse_gauss(s: &str) -> Result<GaussRat> {
    let (re, im) = split_complex(s)?;
    let part = |txt: &str| -> Result<Rat> {
        match txt {
            "" => Ok(Rat::zero()),
            "+" => Ok(Rat::from_integer(1.into())),
            "-" => Ok(Rat::from_integer((-1).into())),
            _ => parse_rat(txt),
        }
    };
    Ok(Complex::new(part(&re)?, part(&im)?))
}

/// Formats as `"a+bi"` with canonical rational parts; real values print without `i`.
pub fn format_gauss(z: &GaussRat) -> String {
    if z.im.is_zero() {
        return format_rat(&z.re);
    }
    let sign = if z.im.is_negative() { '-' } else { '+' };
    format!("{}{}{}i", format_rat(&z.re), sign, format_rat(&z.im.abs()))
}

impl ScalarText for GaussRat {
    fn to_text(&self) -> String {
        format_gauss(self)
    }
    fn from_text(s: &str) -> Result<Self> {
        parse_gauss(s)
    }
}
