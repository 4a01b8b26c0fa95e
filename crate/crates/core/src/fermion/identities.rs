use super::{eval_F, eval_f, FermionParams, TimeArray};
use crate::bilinear::terms_vanish;
use crate::error::{Error, Result};
use crate::numerics::{relative_residual, ComplexField, Field};

/// Signed terms of one identity; it holds when they sum to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck<C> {
    pub name: String,
    pub terms: Vec<C>,
}

impl<C: Field> IdentityCheck<C> {
    pub(crate) fn new(name: impl Into<String>, terms: Vec<C>) -> Self {
        IdentityCheck { name: name.into(), terms }
    }

    pub fn residual(&self) -> C {
        self.terms.iter().fold(C::zero(), |a, t| a + t.clone())
    }

    /// Residual relative to the largest term.
    pub fn relative(&self) -> f64 {
        relative_residual(&self.terms)
    }

    pub fn holds(&self) -> bool {
        terms_vanish(&self.terms)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ThreeTerm {
    Bl1,
    Bl2,
    Bl3,
    Bl4,
}

impl ThreeTerm {
    pub const ALL: [ThreeTerm; 4] = [ThreeTerm::Bl1, ThreeTerm::Bl2, ThreeTerm::Bl3, ThreeTerm::Bl4];

    pub fn name(self) -> &'static str {
        match self {
            ThreeTerm::Bl1 => "bl1",
            ThreeTerm::Bl2 => "bl2",
            ThreeTerm::Bl3 => "bl3",
            ThreeTerm::Bl4 => "bl4",
        }
    }

    /// Index shift `(dl1, dl2, dl)` of the second factor.
    fn shift(self) -> (i32, i32, i32) {
        match self {
            ThreeTerm::Bl1 => (-1, 1, 1),
            ThreeTerm::Bl2 => (-1, 0, 1),
            ThreeTerm::Bl3 => (-1, 0, 0),
            ThreeTerm::Bl4 => (0, 0, 0),
        }
    }
}

fn shift<C: Field>(x: &TimeArray<C>, us: &[&C]) -> TimeArray<C> {
    us.iter().fold(x.clone(), |acc, u| acc + TimeArray::eps((*u).clone()))
}

/// One of the cyclic three-term identities. The shifts are given by their
/// inverses `u_i = 1/b_i`; a zero `u_i` stands for `b_i = infinity`.
pub fn three_term<C: Field>(
    which: ThreeTerm,
    (l1, l2, l): (i32, i32, i32),
    x: &TimeArray<C>,
    y: &TimeArray<C>,
    u: &[C; 3],
    g: &FermionParams<C>,
) -> Result<IdentityCheck<C>> {
    let (d1, d2, d) = which.shift();
    let mut terms = Vec::with_capacity(3);
    for r in 0..3 {
        let (u1, u2, u3) = (&u[r], &u[(r + 1) % 3], &u[(r + 2) % 3]);
        let coef = if which == ThreeTerm::Bl4 {
            if u2.is_zero() || u3.is_zero() {
                return Err(Error::NonGenericInput("bl4 needs finite b".into()));
            }
            C::one() / u2.clone() - C::one() / u3.clone()
        } else {
            u2.clone() - u3.clone()
        };
        let a = eval_F(l1, l2, l, &shift(x, &[u2, u3]), y, g)?;
        let b = eval_F(l1 + d1, l2 + d2, l + d, &shift(x, &[u1]), y, g)?;
        terms.push(coef * a * b);
    }
    Ok(IdentityCheck::new(which.name(), terms))
}

/// The auxiliary two-shift identity linking `F_{0,1}`, `F_{0,0}` and `F_{-1,1;1}`.
pub fn blaux<C: Field>(x: &TimeArray<C>, y: &TimeArray<C>, u: &[C; 2], g: &FermionParams<C>) -> Result<IdentityCheck<C>> {
    let (u1, u2) = (&u[0], &u[1]);
    let f = |a, b, c, t: &TimeArray<C>| eval_F(a, b, c, t, y, g);
    let (x1, x2, x12) = (shift(x, &[u1]), shift(x, &[u2]), shift(x, &[u1, u2]));
    let terms = vec![
        f(0, 1, 0, &x2)? * f(0, 0, 0, &x1)?,
        -(f(0, 1, 0, &x1)? * f(0, 0, 0, &x2)?),
        -((u1.clone() - u2.clone()) * f(1, 0, -1, &x12)? * f(-1, 1, 1, x)?),
    ];
    Ok(IdentityCheck::new("blaux", terms))
}

/// `F` at odd times written through `f_0`, `f_1` of the same parameters.
pub fn neutral_odd<C: ComplexField>(x: &TimeArray<C>, y: &TimeArray<C>, g: &FermionParams<C>) -> Result<Vec<IdentityCheck<C>>> {
    if !x.is_odd() || !y.is_odd() {
        return Err(Error::OddnessViolation);
    }
    let f0 = eval_f(0, x, y, g)?;
    let f1 = eval_f(1, x, y, g)?;
    let big = |a, b, c| eval_F(a, b, c, x, y, g);
    let half = C::one() / C::from_i64(2);
    let prod = f0.clone() * f1.clone();
    let sum = half.clone() * (f0.clone() * f0.clone() + f1.clone() * f1.clone());
    let diff = half * C::i() * (f0.clone() * f0 - f1.clone() * f1);
    Ok(vec![
        IdentityCheck::new("F11 = f0 f1", vec![big(1, 1, 0)?, -prod.clone()]),
        IdentityCheck::new("F00 = f0 f1", vec![big(0, 0, 0)?, -prod]),
        IdentityCheck::new("F01 = (f0^2 + f1^2)/2", vec![big(0, 1, 0)?, -sum.clone()]),
        IdentityCheck::new("F10 = (f0^2 + f1^2)/2", vec![big(1, 0, 0)?, -sum]),
        IdentityCheck::new("F01;1 = i(f0^2 - f1^2)/2", vec![big(0, 1, 1)?, -diff.clone()]),
        IdentityCheck::new("F10;-1 = -i(f0^2 - f1^2)/2", vec![big(1, 0, -1)?, diff]),
    ])
}

/// `F` at `x` written through `f_0`, `f_1` at `x + eps(1/c)` and `x - eps~(1/c)`,
/// which must both be odd.
pub fn neutral_shifted<C: ComplexField>(
    x: &TimeArray<C>,
    y: &TimeArray<C>,
    c: &C,
    g: &FermionParams<C>,
) -> Result<Vec<IdentityCheck<C>>> {
    let u = C::one() / c.clone();
    let xp = x + &TimeArray::eps(u.clone());
    let xm = x - &TimeArray::eps_tilde(u);
    if !xp.is_odd() || !xm.is_odd() || !y.is_odd() {
        return Err(Error::OddnessViolation);
    }
    let (f0p, f1p) = (eval_f(0, &xp, y, g)?, eval_f(1, &xp, y, g)?);
    let (f0m, f1m) = (eval_f(0, &xm, y, g)?, eval_f(1, &xm, y, g)?);
    let big = |a, b, l| eval_F(a, b, l, x, y, g);
    let two = C::from_i64(2);
    let i = C::i();
    let same = (f0p.clone() * f0m.clone(), f1p.clone() * f1m.clone());
    let cross = (f0p * f1m, f1p * f0m);
    Ok(vec![
        IdentityCheck::new("2 F01", vec![two.clone() * big(0, 1, 0)?, -same.0.clone(), -same.1.clone()]),
        IdentityCheck::new("-2i F01;1", vec![-(two.clone() * i.clone() * big(0, 1, 1)?), -same.0, same.1]),
        IdentityCheck::new("2 F00", vec![two.clone() * big(0, 0, 0)?, -cross.0.clone(), -cross.1.clone()]),
        IdentityCheck::new("2i/c F-11;1", vec![two * i / c.clone() * big(-1, 1, 1)?, -cross.0, cross.1]),
    ])
}

/// Raising both charges equals evaluating at the index-lowered element.
pub fn index_shift<C: Field>(
    (l1, l2, l): (i32, i32, i32),
    x: &TimeArray<C>,
    y: &TimeArray<C>,
    g: &FermionParams<C>,
) -> Result<IdentityCheck<C>> {
    let a = eval_F(l1, l2, l, x, y, &g.omega()?)?;
    let b = eval_F(l1 + 1, l2 + 1, l, x, y, g)?;
    Ok(IdentityCheck::new("index shift", vec![a, -b]))
}

/// Charge conjugation: `F_{l1,l2;l}(x, y; g) = (-1)^{(l1+l2) l} F_{1-l1,1-l2;-l}(x~, y~; sigma g)`.
pub fn conjugation<C: Field>(
    (l1, l2, l): (i32, i32, i32),
    x: &TimeArray<C>,
    y: &TimeArray<C>,
    g: &FermionParams<C>,
) -> Result<IdentityCheck<C>> {
    let a = eval_F(l1, l2, l, x, y, g)?;
    let b = eval_F(1 - l1, 1 - l2, -l, &x.tilde(), &y.tilde(), &g.sigma())?;
    let sign = if ((l1 + l2) * l).rem_euclid(2) == 0 { C::one() } else { -C::one() };
    Ok(IdentityCheck::new("conjugation", vec![a, -(sign * b)]))
}
