use super::time::TimeArray;
use crate::error::{Error, Result};
use crate::bilinear::line_parameters;
use crate::crystal::CrystalElement;
use crate::numerics::{Field, Poly};

/// Lattice data of one vertex: the line parameters `K`, `L`, the rank `n`, the
/// momenta `a_2..a_{n-1}` (with `a_1 = 0` implicit), the base odd time `eta`
/// and the odd auxiliary time `y`.
#[derive(Clone, Debug)]
pub struct GridSpec<C> {
    pub n: usize,
    pub big_k: C,
    pub big_l: C,
    pub a: Vec<C>,
    pub eta: TimeArray<C>,
    pub y: TimeArray<C>,
}

impl<C: Field> GridSpec<C> {
    /// `eta = y = 0`.
    pub fn new(n: usize, big_k: C, big_l: C, a: Vec<C>) -> Result<Self> {
        let spec = GridSpec { n, big_k, big_l, a, eta: TimeArray::zero(), y: TimeArray::zero() };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_times(mut self, eta: TimeArray<C>, y: TimeArray<C>) -> Result<Self> {
        self.eta = eta;
        self.y = y;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::BadShape(format!("rank {} < 3", self.n)));
        }
        if self.a.len() != self.n - 2 {
            return Err(Error::BadShape(format!("expected {} momenta a_2..a_{{n-1}}, got {}", self.n - 2, self.a.len())));
        }
        if let Some(k) = self.a.iter().position(|a| a.is_zero()) {
            return Err(Error::ZeroInput(format!("a_{}", k + 2)));
        }
        if !self.eta.is_odd() || !self.y.is_odd() {
            return Err(Error::OddnessViolation);
        }
        let (k, l) = (&self.big_k, &self.big_l);
        for (name, v) in [("K - L", k.clone() - l.clone()), ("K + L", k.clone() + l.clone()), ("K", k.clone()), ("L", l.clone())] {
            if v.is_zero() {
                return Err(Error::NonGenericInput(format!("{name} vanishes")));
            }
        }
        for (i, a) in self.a.iter().enumerate() {
            for (name, v) in [("L", l), ("K", k)] {
                if (v.clone() - a.clone()).is_zero() || (v.clone() + a.clone()).is_zero() {
                    return Err(Error::NonGenericInput(format!("{name} = +-a_{}", i + 2)));
                }
            }
        }
        Ok(())
    }

    /// `A(p) = prod_k (1 - p / a_k)`.
    pub fn a_poly(&self, p: &C) -> C {
        self.a.iter().fold(C::one(), |acc, a| acc * (C::one() - p.clone() / a.clone()))
    }

    /// `P(t) = t^2 A(t) A(-t)`, the even polynomial of the reduction condition.
    pub fn red_poly(&self, t: &C) -> C {
        t.clone() * t.clone() * self.a_poly(t) * self.a_poly(&-t.clone())
    }

    /// `P` as a polynomial in `u = t^2`: `u prod_k (1 - u / a_k^2)`.
    pub fn red_poly_in_square(&self) -> Poly<C> {
        self.a.iter().fold(Poly::monomial(C::one(), 1), |acc, a| {
            let f = Poly::new(vec![C::one(), -(C::one() / (a.clone() * a.clone()))]);
            &acc * &f
        })
    }

    /// Spectral element with `x_i = L - a_i`, `xbar_i = L + a_i` for `i < n` and `x_n = 1`.
    pub fn lambda(&self) -> Result<CrystalElement<C>> {
        self.line_element(&self.big_l)
    }

    pub fn kappa(&self) -> Result<CrystalElement<C>> {
        self.line_element(&self.big_k)
    }

    fn line_element(&self, v: &C) -> Result<CrystalElement<C>> {
        let mut a = vec![C::zero()];
        a.extend(self.a.iter().cloned());
        a.push(C::zero());
        line_parameters(v, &a)
    }

    /// `l = L^2 prod_{i=2}^{n-1} (L^2 - a_i^2)`.
    pub fn line_level(&self, v: &C) -> C {
        self.a.iter().fold(v.clone() * v.clone(), |acc, a| acc * (v.clone() * v.clone() - a.clone() * a.clone()))
    }

    pub fn map<D: Field>(&self, f: impl Fn(&C) -> D) -> GridSpec<D> {
        GridSpec {
            n: self.n,
            big_k: f(&self.big_k),
            big_l: f(&self.big_l),
            a: self.a.iter().map(&f).collect(),
            eta: self.eta.map(&f),
            y: self.y.map(&f),
        }
    }
}
