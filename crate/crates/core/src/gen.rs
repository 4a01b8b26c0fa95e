//! Seeded random cases. A case is fixed by `(seed, index)`: the index picks
//! an independent ChaCha stream, so cases can be generated in any order.

use crate::bilinear::{solve_unique, SolveInput, TauData};
use crate::crystal::{level, CrystalElement, Family};
use crate::error::Result;
use crate::fermion::{FermionParams, TimeArray};
use crate::numerics::{rat, Field, GaussRat, Rat, TropVal};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest numerator and denominator of generated rationals.
pub const HEIGHT: i64 = 50;

pub struct CaseGen {
    rng: ChaCha8Rng,
}

impl CaseGen {
    pub fn new(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        CaseGen { rng }
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    /// A rational in `(0, HEIGHT]` with numerator and denominator at most `HEIGHT`.
    pub fn positive(&mut self) -> Rat {
        let p = self.int(1, HEIGHT);
        let q = self.int(1, HEIGHT);
        rat(p, q)
    }

    /// A nonzero rational of height at most `h`, negative with probability one half.
    pub fn signed(&mut self, h: i64) -> Rat {
        let p = self.int(1, h);
        let q = self.int(1, h);
        if self.rng.gen_bool(0.5) {
            rat(-p, q)
        } else {
            rat(p, q)
        }
    }

    pub fn element(&mut self, family: Family, n: usize) -> Result<CrystalElement<Rat>> {
        let coords = (0..family.coord_len(n)).map(|_| self.positive()).collect();
        CrystalElement::new(family, n, coords)
    }

    /// A pair with distinct levels whenever the family has a level.
    pub fn pair(&mut self, family: Family, n: usize) -> Result<(CrystalElement<Rat>, CrystalElement<Rat>)> {
        loop {
            let x = self.element(family, n)?;
            let y = self.element(family, n)?;
            if family == Family::A1 || level(&x)? != level(&y)? {
                return Ok((x, y));
            }
        }
    }

    pub fn triple(&mut self, family: Family, n: usize) -> Result<[CrystalElement<Rat>; 3]> {
        let (x, y) = self.pair(family, n)?;
        let (z, _) = self.pair(family, n)?;
        Ok([x, y, z])
    }

    /// Integer max-plus element with coordinates in `[lo, hi]`.
    pub fn trop_element(&mut self, family: Family, n: usize, lo: i64, hi: i64) -> Result<CrystalElement<TropVal>> {
        let coords = (0..family.coord_len(n)).map(|_| TropVal::int(self.int(lo, hi))).collect();
        CrystalElement::new(family, n, coords)
    }

    /// Positive free data for the unique-solution theorem.
    pub fn solve_input(&mut self, n: usize) -> Result<SolveInput<Rat>> {
        let mut v = |m: usize| (0..m).map(|_| self.positive()).collect::<Vec<_>>();
        let lambda = CrystalElement::new(Family::D1, n, v(2 * n - 1))?;
        let kappa = CrystalElement::new(Family::D1, n, v(2 * n - 1))?;
        let (north, w) = (v(n - 2), v(n - 2));
        let (tau1, tau2, tau3) = (v(n + 1), v(n + 1), v(n + 1));
        let ab = v(2);
        Ok(SolveInput { n, north, w, tau1, tau2, tau3, lambda, kappa, alpha: ab[0].clone(), beta: ab[1].clone() })
    }

    /// A generic solution of the bilinear equations, resampling non-generic draws.
    pub fn solved_data(&mut self, n: usize) -> Result<TauData<Rat>> {
        loop {
            if let Ok(d) = solve_unique(&self.solve_input(n)?) {
                if d.is_generic() {
                    return Ok(d);
                }
            }
        }
    }

    /// `N` two-component and `M` neutral couplings with distinct small momenta.
    pub fn fermion_params(&mut self, nn: usize, m: usize) -> Result<FermionParams<GaussRat>> {
        let mut used: Vec<Rat> = Vec::new();
        let mut momentum = |g: &mut Self| loop {
            let p = g.signed(9);
            if !used.iter().any(|u| *u == p || *u == -p.clone()) {
                used.push(p.clone());
                return p;
            }
        };
        let c = |r: Rat| GaussRat::new(r, rat(0, 1));
        let mut pairs = Vec::new();
        for _ in 0..nn {
            pairs.push((c(momentum(self)), c(momentum(self))));
        }
        let mut cpairs = Vec::new();
        for _ in 0..m {
            cpairs.push((c(momentum(self)), c(momentum(self))));
        }
        let b = (0..nn).map(|_| c(self.signed(9))).collect();
        let cc = (0..m).map(|_| c(self.signed(9))).collect();
        FermionParams::from_pairs(b, &pairs, cc, &cpairs)
    }

    /// `sum_k (eps(a_k) - eps(-a_k))` with `k` terms.
    pub fn odd_time<C: Field>(&mut self, k: usize) -> TimeArray<C> {
        (0..k).fold(TimeArray::zero(), |acc, _| {
            let a = C::from_rat(&self.signed(11));
            acc + TimeArray::eps(a.clone()) - TimeArray::eps(-a)
        })
    }

    /// `sum_k c_k eps(a_k)` with small nonzero integer weights.
    pub fn time<C: Field>(&mut self, k: usize) -> TimeArray<C> {
        (0..k).fold(TimeArray::zero(), |acc, _| {
            let a = C::from_rat(&self.signed(11));
            let w = [-2, -1, 1, 2][self.int(0, 3) as usize];
            acc + TimeArray::eps(a).scaled(w)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_case() {
        let a = CaseGen::new(7, 3).element(Family::D1, 4).unwrap();
        let b = CaseGen::new(7, 3).element(Family::D1, 4).unwrap();
        let c = CaseGen::new(7, 4).element(Family::D1, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn bounds_and_levels() {
        let mut g = CaseGen::new(1, 0);
        for _ in 0..50 {
            let x = g.element(Family::A1, 3).unwrap();
            for v in x.coords() {
                assert!(*v > rat(0, 1) && *v <= rat(HEIGHT, 1));
                assert!(*v.numer() <= HEIGHT.into() && *v.denom() <= HEIGHT.into());
            }
            let (x, y) = g.pair(Family::C1, 2).unwrap();
            assert_ne!(level(&x).unwrap(), level(&y).unwrap());
        }
    }

    #[test]
    fn odd_times_are_odd() {
        let mut g = CaseGen::new(2, 0);
        assert!(g.odd_time::<Rat>(3).is_odd());
    }
}
