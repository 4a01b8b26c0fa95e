use crate::error::{Error, Result};
use crate::numerics::Field;

/// Couplings and momenta of the group elements `g'` (neutral) and `g`
/// (two-component).
///
/// Momenta are stored in the combined layout `p_1..p_{2N+M}`: the pair of
/// coupling `b_i` is `(p_i, p_{2N+1-i})` and the neutral partner of coupling
/// `c_j` is `p_{2N+M+1-j}`, paired with `q_j`.
///
/// `b_hat`, `c_hat` are the couplings of the second half of each bilinear in
/// `g`; they equal `b`, `c` for the elements that come from `g'`, and differ
/// after a shift of the fermion index or a time evolution.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionParams<C> {
    pub b: Vec<C>,
    pub b_hat: Vec<C>,
    pub c: Vec<C>,
    pub c_hat: Vec<C>,
    pub p: Vec<C>,
    pub q: Vec<C>,
}

impl<C: Field> FermionParams<C> {
    /// From pairs `(p_j, q_j)` for each `b_j` and `(p'_j, q'_j)` for each `c_j`.
    pub fn from_pairs(b: Vec<C>, pairs: &[(C, C)], c: Vec<C>, cpairs: &[(C, C)]) -> Result<Self> {
        let (nn, m) = (pairs.len(), cpairs.len());
        if b.len() != nn || c.len() != m {
            return Err(Error::BadShape("one coupling per momentum pair".into()));
        }
        let mut p = vec![C::zero(); 2 * nn + m];
        for (i, (pi, qi)) in pairs.iter().enumerate() {
            p[i] = pi.clone();
            p[2 * nn - 1 - i] = qi.clone();
        }
        for (j, (pj, _)) in cpairs.iter().enumerate() {
            p[2 * nn + m - 1 - j] = pj.clone();
        }
        let q = cpairs.iter().map(|(_, qj)| qj.clone()).collect();
        Ok(FermionParams { b_hat: b.clone(), b, c_hat: c.clone(), c, p, q })
    }

    /// No couplings at all.
    pub fn vacuum() -> Self {
        FermionParams { b: vec![], b_hat: vec![], c: vec![], c_hat: vec![], p: vec![], q: vec![] }
    }

    pub fn n_b(&self) -> usize {
        self.b.len()
    }

    pub fn n_c(&self) -> usize {
        self.c.len()
    }

    pub fn check_shape(&self) -> Result<()> {
        let (nn, m) = (self.n_b(), self.n_c());
        if self.b_hat.len() != nn || self.c_hat.len() != m || self.p.len() != 2 * nn + m || self.q.len() != m {
            return Err(Error::BadShape("fermion parameter lengths disagree".into()));
        }
        Ok(())
    }

    /// 1-based partner index of `b_i`'s first momentum.
    pub fn bar(&self, i: usize) -> usize {
        2 * self.n_b() + 1 - i
    }

    /// 1-based index of `c_j`'s neutral momentum.
    pub fn tilde(&self, j: usize) -> usize {
        2 * self.n_b() + self.n_c() + 1 - j
    }

    /// `(p_j, q_j)` of coupling `b_j` (1-based).
    pub fn pair(&self, j: usize) -> (C, C) {
        (self.p[j - 1].clone(), self.p[self.bar(j) - 1].clone())
    }

    /// `(p'_j, q'_j)` of coupling `c_j` (1-based).
    pub fn cpair(&self, j: usize) -> (C, C) {
        (self.p[self.tilde(j) - 1].clone(), self.q[j - 1].clone())
    }

    pub fn is_symmetric(&self) -> bool {
        self.b == self.b_hat && self.c == self.c_hat
    }

    /// Same momenta, new couplings (hat couplings set equal).
    pub fn with_couplings(&self, b: Vec<C>, c: Vec<C>) -> Result<Self> {
        let out = FermionParams { b_hat: b.clone(), b, c_hat: c.clone(), c, p: self.p.clone(), q: self.q.clone() };
        out.check_shape()?;
        Ok(out)
    }

    /// The element with every fermion index lowered by one.
    pub fn omega(&self) -> Result<Self> {
        self.check_shape()?;
        let pole = |what: &str| Error::PoleAtMomentum(format!("index shift needs nonzero {what}"));
        let mut out = self.clone();
        for i in 1..=self.n_b() {
            let (p, pb) = self.pair(i);
            if p.is_zero() || pb.is_zero() {
                return Err(pole("b momenta"));
            }
            out.b[i - 1] = -(p.clone() / pb.clone()) * self.b[i - 1].clone();
            out.b_hat[i - 1] = -(pb / p) * self.b_hat[i - 1].clone();
        }
        for j in 1..=self.n_c() {
            let (pt, q) = self.cpair(j);
            if pt.is_zero() || q.is_zero() {
                return Err(pole("c momenta"));
            }
            out.c[j - 1] = -(pt.clone() / q.clone()) * self.c[j - 1].clone();
            out.c_hat[j - 1] = -(q / pt) * self.c_hat[j - 1].clone();
        }
        Ok(out)
    }

    /// The image under the charge-conjugation automorphism, which exchanges
    /// the two halves of each bilinear.
    pub fn sigma(&self) -> Self {
        FermionParams {
            b: self.b_hat.clone(),
            b_hat: self.b.clone(),
            c: self.c_hat.clone(),
            c_hat: self.c.clone(),
            p: self.p.clone(),
            q: self.q.clone(),
        }
    }

    pub fn map<D: Field>(&self, f: impl Fn(&C) -> D) -> FermionParams<D> {
        let m = |v: &[C]| v.iter().map(&f).collect();
        FermionParams { b: m(&self.b), b_hat: m(&self.b_hat), c: m(&self.c), c_hat: m(&self.c_hat), p: m(&self.p), q: m(&self.q) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{rat, Rat};

    #[test]
    fn layout() {
        let r = |a| rat(a, 1);
        let f: FermionParams<Rat> =
            FermionParams::from_pairs(vec![r(10), r(20)], &[(r(1), r(2)), (r(3), r(4))], vec![r(30)], &[(r(5), r(6))])
                .unwrap();
        assert_eq!(f.p, vec![r(1), r(3), r(4), r(2), r(5)]);
        assert_eq!(f.pair(1), (r(1), r(2)));
        assert_eq!(f.pair(2), (r(3), r(4)));
        assert_eq!(f.cpair(1), (r(5), r(6)));
        assert_eq!(f.sigma().sigma(), f);
        assert!(f.is_symmetric() && !f.omega().unwrap().is_symmetric());
    }
}
