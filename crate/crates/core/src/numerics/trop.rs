use super::{format_rat, parse_rat, Rat, ScalarText, Semifield};
use crate::error::{Error, Result};
use num_traits::Zero;
use std::cmp::Ordering;
use std::fmt;

/// Element of the max-plus semifield over the rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TropVal {
    NegInf,
    Fin(Rat),
}

impl TropVal {
    pub fn int(v: i64) -> Self {
        TropVal::Fin(Rat::from_integer(v.into()))
    }

    pub fn finite(&self) -> Option<&Rat> {
        match self {
            TropVal::Fin(r) => Some(r),
            TropVal::NegInf => None,
        }
    }
}

impl PartialOrd for TropVal {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for TropVal {
    fn cmp(&self, o: &Self) -> Ordering {
        match (self, o) {
            (TropVal::NegInf, TropVal::NegInf) => Ordering::Equal,
            (TropVal::NegInf, _) => Ordering::Less,
            (_, TropVal::NegInf) => Ordering::Greater,
            (TropVal::Fin(a), TropVal::Fin(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for TropVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Semifield for TropVal {
    fn unit() -> Self {
        TropVal::Fin(Rat::zero())
    }
    fn null() -> Self {
        TropVal::NegInf
    }
    fn oplus(&self, rhs: &Self) -> Self {
        self.max(rhs).clone()
    }
    fn otimes(&self, rhs: &Self) -> Self {
        match (self, rhs) {
            (TropVal::Fin(a), TropVal::Fin(b)) => TropVal::Fin(a + b),
            _ => TropVal::NegInf,
        }
    }
    fn odiv(&self, rhs: &Self) -> Self {
        match (self, rhs) {
            (TropVal::Fin(a), TropVal::Fin(b)) => TropVal::Fin(a - b),
            (TropVal::NegInf, TropVal::Fin(_)) => TropVal::NegInf,
            (_, TropVal::NegInf) => panic!("max-plus division by -inf"),
        }
    }
    fn is_null(&self) -> bool {
        matches!(self, TropVal::NegInf)
    }
    fn checked_odiv(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_null() {
            Err(Error::InfiniteOperand)
        } else {
            Ok(self.odiv(rhs))
        }
    }
}

impl ScalarText for TropVal {
    fn to_text(&self) -> String {
        match self {
            TropVal::NegInf => "-inf".into(),
            TropVal::Fin(r) => format_rat(r),
        }
    }
    fn from_text(s: &str) -> Result<Self> {
        match s.trim() {
            "-inf" | "-∞" => Ok(TropVal::NegInf),
            t => parse_rat(t).map(TropVal::Fin),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TropOp {
    Oplus,
    Otimes,
    Odiv,
}

/// One max-plus operation, with division by `-inf` reported as an error.
pub fn trop_arith(op: TropOp, a: &TropVal, b: &TropVal) -> Result<TropVal> {
    match op {
        TropOp::Oplus => Ok(a.oplus(b)),
        TropOp::Otimes => Ok(a.otimes(b)),
        TropOp::Odiv => a.checked_odiv(b),
    }
}
