use crate::crystal::{CrystalElement, Family};
use crate::error::{Error, Result};
use crate::numerics::Field;

/// Cyclic tau data for the A family.
#[derive(Clone, Debug, PartialEq)]
pub struct HirotaData<F> {
    pub lambda: Vec<F>,
    pub kappa: Vec<F>,
    /// `tau[J]` for `J = 1..=4` at index `J - 1`, each of length `n`, indices mod `n`.
    pub tau: [Vec<F>; 4],
    pub alpha: F,
}

impl<F: Field> HirotaData<F> {
    pub fn n(&self) -> usize {
        self.lambda.len()
    }
    fn at(v: &[F], i: isize) -> F {
        v[i.rem_euclid(v.len() as isize) as usize].clone()
    }
    pub fn t(&self, j: usize, i: isize) -> F {
        Self::at(&self.tau[j - 1], i)
    }
    fn delta(&self, j: usize, i: isize) -> F {
        self.t(j, i) / self.t(j, i - 1)
    }

    /// Swap `tau^2 <-> tau^4`, `lambda <-> kappa`, `alpha -> -alpha`.
    pub fn r_action(&self) -> Self {
        let mut out = self.clone();
        std::mem::swap(&mut out.lambda, &mut out.kappa);
        out.tau.swap(1, 3);
        out.alpha = -self.alpha.clone();
        out
    }
}

/// `lambda_i tau2_{i-1} tau4_i - kappa_i tau2_i tau4_{i-1} - alpha tau1_i tau3_{i-1}`, indices mod `n`, `lambda_i` indexed from 1.
pub fn hirota_a<F: Field>(i: isize, d: &HirotaData<F>) -> F {
    let l = HirotaData::at(&d.lambda, i - 1);
    let k = HirotaData::at(&d.kappa, i - 1);
    l * d.t(2, i - 1) * d.t(4, i) - k * d.t(2, i) * d.t(4, i - 1) - d.alpha.clone() * d.t(1, i) * d.t(3, i - 1)
}

/// Fills `tau^4` from the cyclic bidiagonal system formed by all `n` equations.
pub fn solve_hirota_a<F: Field>(d: &HirotaData<F>) -> Result<HirotaData<F>> {
    let n = d.n() as isize;
    // Equation i: a_i tau4_i - b_i tau4_{i-1} = r_i. Sweep tau4_0 = t as a parameter.
    let a = |i: isize| HirotaData::at(&d.lambda, i - 1) * d.t(2, i - 1);
    let b = |i: isize| HirotaData::at(&d.kappa, i - 1) * d.t(2, i);
    let r = |i: isize| d.alpha.clone() * d.t(1, i) * d.t(3, i - 1);
    let mut p = vec![F::zero(); n as usize + 1];
    let mut q = vec![F::zero(); n as usize + 1];
    q[0] = F::one();
    for i in 1..=n {
        let ai = a(i);
        if ai.is_zero() {
            return Err(Error::NonGenericInput(format!("lambda_{i} tau2_{} vanishes", i - 1)));
        }
        let iu = i as usize;
        p[iu] = (r(i) + b(i) * p[iu - 1].clone()) / ai.clone();
        q[iu] = b(i) * q[iu - 1].clone() / ai;
    }
    // Closing the cycle: tau4_n = tau4_0.
    let den = q[n as usize].clone() - F::one();
    if den.is_zero() {
        return Err(Error::SingularSystem);
    }
    let t = -p[n as usize].clone() / den;
    let mut out = d.clone();
    out.tau[3] = (0..n as usize).map(|i| p[i].clone() + q[i].clone() * t.clone()).collect();
    Ok(out)
}

/// `(x, y, x', y')` from cyclic tau data via the ratios `tau_i / tau_{i-1}`.
pub fn a_quadruple<F: Field>(d: &HirotaData<F>) -> Result<[CrystalElement<F>; 4]> {
    let n = d.n();
    let lam = |i: usize| d.lambda[i - 1].clone();
    let kap = |i: usize| d.kappa[i - 1].clone();
    let build = |f: &dyn Fn(usize) -> F| -> Result<CrystalElement<F>> {
        CrystalElement::new(Family::A1, n, (1..=n).map(|i| F::one() / f(i)).collect())
    };
    let dt = |j, i: usize| d.delta(j, i as isize);
    Ok([
        build(&|i| lam(i) * dt(3, i) / dt(2, i))?,
        build(&|i| kap(i) * dt(2, i) / dt(1, i))?,
        build(&|i| kap(i) * dt(3, i) / dt(4, i))?,
        build(&|i| lam(i) * dt(4, i) / dt(1, i))?,
    ])
}
