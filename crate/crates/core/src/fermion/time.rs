use crate::error::{Error, Result};
use crate::numerics::Field;
use std::ops::{Add, Neg, Sub};

/// A formal integer combination `sum c * eps(a)` of time increments, where
/// `eps(a) = (a, a^2/2, a^3/3, ...)`.
#[derive(Clone, Debug)]
pub struct TimeArray<C> {
    terms: Vec<(C, i64)>,
}

impl<C: Field> PartialEq for TimeArray<C> {
    fn eq(&self, other: &Self) -> bool {
        self.terms.len() == other.terms.len() && self.terms.iter().all(|t| other.terms.contains(t))
    }
}

impl<C: Field> Default for TimeArray<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Field> TimeArray<C> {
    pub fn zero() -> Self {
        TimeArray { terms: Vec::new() }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (C, i64)>) -> Self {
        let mut out = Self::zero();
        for (a, c) in terms {
            out.push(a, c);
        }
        out
    }

    pub fn eps(a: C) -> Self {
        Self::from_terms([(a, 1)])
    }

    /// `eps~(a) = -eps(-a)`.
    pub fn eps_tilde(a: C) -> Self {
        Self::from_terms([(-a, -1)])
    }

    fn push(&mut self, a: C, c: i64) {
        if a.is_zero() || c == 0 {
            return;
        }
        if let Some(k) = self.terms.iter().position(|(b, _)| *b == a) {
            self.terms[k].1 += c;
            if self.terms[k].1 == 0 {
                self.terms.swap_remove(k);
            }
        } else {
            self.terms.push((a, c));
        }
    }

    /// `(a, coefficient)` pairs, in no particular order.
    pub fn terms(&self) -> &[(C, i64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scaled(&self, k: i64) -> Self {
        Self::from_terms(self.terms.iter().map(|(a, c)| (a.clone(), c * k)))
    }

    /// Flips the sign of every even component.
    pub fn tilde(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(a, c)| (-a.clone(), -c)))
    }

    pub fn is_odd(&self) -> bool {
        self.tilde() == *self
    }

    /// `exp(xi(x, p)) = prod (1 - a p)^(-c)`.
    pub fn exp_xi(&self, p: &C) -> Result<C> {
        let mut acc = C::one();
        for (a, c) in &self.terms {
            let base = C::one() - a.clone() * p.clone();
            if base.is_zero() {
                if *c > 0 {
                    return Err(Error::PoleAtMomentum(format!("1 - a p vanishes at p = {p:?}")));
                }
                return Ok(C::zero());
            }
            acc = acc * base.powi(-(*c as i32));
        }
        Ok(acc)
    }

    pub fn map<D: Field>(&self, f: impl Fn(&C) -> D) -> TimeArray<D> {
        TimeArray::from_terms(self.terms.iter().map(|(a, c)| (f(a), *c)))
    }
}

impl<C: Field> Add for TimeArray<C> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (a, c) in rhs.terms {
            self.push(a, c);
        }
        self
    }
}

impl<C: Field> Sub for TimeArray<C> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + rhs.scaled(-1)
    }
}

impl<C: Field> Neg for TimeArray<C> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scaled(-1)
    }
}

impl<C: Field> Add<&TimeArray<C>> for &TimeArray<C> {
    type Output = TimeArray<C>;
    fn add(self, rhs: &TimeArray<C>) -> TimeArray<C> {
        self.clone() + rhs.clone()
    }
}

impl<C: Field> Sub<&TimeArray<C>> for &TimeArray<C> {
    type Output = TimeArray<C>;
    fn sub(self, rhs: &TimeArray<C>) -> TimeArray<C> {
        self.clone() - rhs.clone()
    }
}

/// `z_i = -sum_{k=2}^{i} eps(1/a_k)`, with `a[0]` holding `a_2`.
pub fn z_shift<C: Field>(a: &[C], i: usize) -> TimeArray<C> {
    let mut z = TimeArray::zero();
    for ak in a.iter().take(i.saturating_sub(1)) {
        z = z - TimeArray::eps(C::one() / ak.clone());
    }
    z
}

/// The nine domains around one vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Domain {
    C0,
    C1,
    C2,
    C3,
    C4,
    N,
    S,
    W,
    E,
}

impl Domain {
    pub const ALL: [Domain; 9] =
        [Domain::C0, Domain::C1, Domain::C2, Domain::C3, Domain::C4, Domain::N, Domain::S, Domain::W, Domain::E];

    pub fn corner(j: usize) -> Domain {
        [Domain::C0, Domain::C1, Domain::C2, Domain::C3, Domain::C4][j]
    }

    pub fn is_corner(self) -> bool {
        matches!(self, Domain::C1 | Domain::C2 | Domain::C3 | Domain::C4)
    }
}

/// Time arrays of the nine domains around one vertex, with `x^1 = eta`.
#[derive(Clone, Debug)]
pub struct VertexTimes<C> {
    pub k: C,
    pub l: C,
    times: [TimeArray<C>; 9],
}

impl<C: Field> VertexTimes<C> {
    pub fn new(eta: &TimeArray<C>, big_k: &C, big_l: &C) -> Self {
        let e = |v: &C| TimeArray::eps(C::one() / v.clone());
        let et = |v: &C| TimeArray::eps_tilde(C::one() / v.clone());
        let x1 = eta.clone();
        let xn = &x1 - &e(big_k);
        let x2 = &xn - &et(big_k);
        let xe = &x1 - &e(big_l);
        let x0 = &xe - &e(big_k);
        let xw = &x2 - &e(big_l);
        let x3 = &xw - &et(big_l);
        let xs = &x0 - &et(big_l);
        let x4 = &xs + &e(big_k);
        VertexTimes { k: big_k.clone(), l: big_l.clone(), times: [x0, x1, x2, x3, x4, xn, xs, xw, xe] }
    }

    pub fn get(&self, d: Domain) -> &TimeArray<C> {
        &self.times[d as usize]
    }

    /// `x^D_i = x^D + z_i`.
    pub fn shifted(&self, d: Domain, a: &[C], i: usize) -> TimeArray<C> {
        self.get(d) + &z_shift(a, i)
    }

    /// Residuals of the twelve defining differences; all zero on a valid grid.
    pub fn recursion_defects(&self) -> Vec<TimeArray<C>> {
        use Domain::*;
        let x = |d| self.get(d).clone();
        let e = |v: &C| TimeArray::eps(C::one() / v.clone());
        let et = |v: &C| TimeArray::eps_tilde(C::one() / v.clone());
        let (k, l) = (&self.k, &self.l);
        vec![
            x(W) - x(C3) - et(l),
            x(C0) - x(S) - et(l),
            x(E) - x(C4) - et(l),
            x(C2) - x(W) - e(l),
            x(N) - x(C0) - e(l),
            x(C1) - x(E) - e(l),
            x(N) - x(C2) - et(k),
            x(C0) - x(W) - et(k),
            x(S) - x(C3) - et(k),
            x(C1) - x(N) - e(k),
            x(E) - x(C0) - e(k),
            x(C4) - x(S) - e(k),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{rat, Rat};

    fn r(n: i64, d: i64) -> Rat {
        rat(n, d)
    }

    #[test]
    fn exp_xi_closed_form() {
        let x = TimeArray::eps(r(1, 2));
        assert_eq!(x.exp_xi(&r(1, 3)).unwrap(), r(6, 5));
        assert_eq!(TimeArray::<Rat>::zero().exp_xi(&r(7, 3)).unwrap(), r(1, 1));
        let y = TimeArray::eps(r(2, 1)) - TimeArray::eps(r(2, 1));
        assert!(y.is_zero());
        assert!(matches!(TimeArray::eps(r(2, 1)).exp_xi(&r(1, 2)), Err(Error::PoleAtMomentum(_))));
        assert_eq!((-TimeArray::eps(r(2, 1))).exp_xi(&r(1, 2)).unwrap(), r(0, 1));
    }

    #[test]
    fn oddness() {
        let a = r(3, 7);
        assert!((TimeArray::eps(a.clone()) - TimeArray::eps(-a.clone())).is_odd());
        assert!(!TimeArray::eps(a.clone()).is_odd());
        assert!(TimeArray::<Rat>::zero().is_odd());
        assert!((TimeArray::eps(a.clone()) + TimeArray::eps_tilde(a)).is_odd());
    }

    #[test]
    fn vertex_grid_recursions_and_oddness() {
        let eta = TimeArray::eps(r(1, 4)) - TimeArray::eps(r(-1, 4));
        let (k, l) = (r(3, 1), r(2, 1));
        let g = VertexTimes::new(&eta, &k, &l);
        assert!(g.recursion_defects().iter().all(|d| d.is_zero()));
        for d in Domain::ALL.iter().filter(|d| d.is_corner()) {
            assert!(g.get(*d).is_odd(), "{d:?}");
        }
        let e = |v: &Rat| TimeArray::eps(r(1, 1) / v.clone());
        let et = |v: &Rat| TimeArray::eps_tilde(r(1, 1) / v.clone());
        for (d, s) in [(Domain::N, &k), (Domain::S, &k), (Domain::W, &l), (Domain::E, &l)] {
            assert_eq!(g.get(d).tilde(), g.get(d) + &(e(s) - et(s)), "{d:?}");
        }
        let x2 = g.get(Domain::C1) - &TimeArray::eps(r(1, 3)) + TimeArray::eps(r(-1, 3));
        assert_eq!(*g.get(Domain::C2), x2);
    }

    #[test]
    fn z_steps() {
        let a = [r(5, 1), r(7, 2), r(-3, 1)];
        assert!(z_shift(&a, 1).is_zero());
        for j in 2..=4 {
            assert_eq!(z_shift(&a, j) - z_shift(&a, j - 1), -TimeArray::eps(r(1, 1) / a[j - 2].clone()));
        }
    }
}
