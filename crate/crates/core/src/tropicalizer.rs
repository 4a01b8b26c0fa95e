//! Max-plus images of the R maps and the small-`eps` limit that connects them
//! to the rational maps.

use crate::crystal::{same_shape, CrystalElement};
use crate::error::{Error, Result};
use crate::numerics::{BigReal, Field, Semifield, TropVal};
use crate::tropical_r::{check_ybe, r_apply, RResult};
use serde::Serialize;

fn require_finite(x: &CrystalElement<TropVal>) -> Result<()> {
    match x.coords().iter().position(|v| v.finite().is_none()) {
        Some(k) => Err(Error::NonFiniteInput(format!("coordinate {k} is -inf"))),
        None => Ok(()),
    }
}

/// The piecewise-linear R obtained by running the positive formulas in max-plus.
pub fn trop_r(x: &CrystalElement<TropVal>, y: &CrystalElement<TropVal>) -> Result<RResult<TropVal>> {
    require_finite(x)?;
    require_finite(y)?;
    r_apply(x, y)
}

/// Braid relation in max-plus, compared exactly.
pub fn trop_ybe(x: &CrystalElement<TropVal>, y: &CrystalElement<TropVal>, z: &CrystalElement<TropVal>) -> Result<bool> {
    for e in [x, y, z] {
        require_finite(e)?;
    }
    Ok(check_ybe(x, y, z)?.equal)
}

/// Interval `[lo, hi]` containing `eps log f(e^{X/eps}) - f_trop(X)` in units
/// of `eps`, valid for every `eps > 0`. A sum of `m` monomials has
/// `[0, log m]`; the bounds propagate through products and quotients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapBound {
    pub lo: f64,
    pub hi: f64,
}

impl Semifield for GapBound {
    fn unit() -> Self {
        GapBound { lo: 0.0, hi: 0.0 }
    }
    fn null() -> Self {
        GapBound { lo: f64::INFINITY, hi: f64::NEG_INFINITY }
    }
    fn oplus(&self, rhs: &Self) -> Self {
        if self.is_null() {
            return *rhs;
        }
        if rhs.is_null() {
            return *self;
        }
        let m = self.hi.max(rhs.hi);
        GapBound { lo: self.lo.min(rhs.lo), hi: m + ((self.hi - m).exp() + (rhs.hi - m).exp()).ln() }
    }
    fn otimes(&self, rhs: &Self) -> Self {
        GapBound { lo: self.lo + rhs.lo, hi: self.hi + rhs.hi }
    }
    fn odiv(&self, rhs: &Self) -> Self {
        GapBound { lo: self.lo - rhs.hi, hi: self.hi - rhs.lo }
    }
    fn is_null(&self) -> bool {
        self.hi == f64::NEG_INFINITY
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct UdRow {
    pub epsilon: f64,
    /// Largest `|eps log R(e^{X/eps}) - R_trop(X)|` over all output coordinates.
    pub max_deviation: f64,
    /// Largest admissible deviation, `eps * max(|lo|, |hi|)`.
    pub bound: f64,
    pub within_bound: bool,
}

/// Compares the rational map at `e^{X/eps}` with the max-plus map at `X`.
pub fn ud_consistency(x: &CrystalElement<TropVal>, y: &CrystalElement<TropVal>, epsilons: &[f64]) -> Result<Vec<UdRow>> {
    same_shape(x, y)?;
    let trop = trop_r(x, y)?;
    let unit = |e: &CrystalElement<TropVal>| e.map(|_| GapBound::unit());
    let gaps = r_apply(&unit(x)?, &unit(y)?)?;
    let trop_out: Vec<&TropVal> = trop.x.coords().iter().chain(trop.y.coords()).collect();
    let gap_out: Vec<&GapBound> = gaps.x.coords().iter().chain(gaps.y.coords()).collect();
    let mut rows = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::NonFiniteInput(format!("eps = {eps}")));
        }
        let e = BigReal::from_f64_prec(eps, crate::numerics::default_precision());
        let lift = |el: &CrystalElement<TropVal>| {
            el.map(|v| (BigReal::from_rat(v.finite().expect("checked finite")) / e.clone()).exp())
        };
        let real = r_apply(&lift(x)?, &lift(y)?)?;
        let mut max_dev = 0.0f64;
        let mut bound = 0.0f64;
        let mut ok = true;
        for ((v, t), gap) in real.x.coords().iter().chain(real.y.coords()).zip(&trop_out).zip(&gap_out) {
            let t = t.finite().ok_or_else(|| Error::Internal("max-plus output is -inf".into()))?;
            let dev = ((e.clone() * v.ln()) - BigReal::from_rat(t)).approx_f64();
            // The bound is accumulated in f64; allow for its rounding.
            let slack = 1e-30 + 1e-12 * eps * (1.0 + gap.lo.abs() + gap.hi.abs());
            ok &= dev >= eps * gap.lo - slack && dev <= eps * gap.hi + slack;
            max_dev = max_dev.max(dev.abs());
            bound = bound.max(eps * gap.lo.abs().max(gap.hi.abs()));
        }
        rows.push(UdRow { epsilon: eps, max_deviation: max_dev, bound, within_bound: ok });
    }
    Ok(rows)
}
