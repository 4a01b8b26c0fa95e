//! Lax matrix of the A family as exact rational functions of the spectral parameter.

use crate::crystal::{same_shape, CrystalElement, Family};
use crate::error::{Error, Result};
use crate::numerics::{poly_det, Field, Poly};

/// `M(x, z) = adj / det`, with entries polynomial in `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaxMatrix<F: Field> {
    pub adj: Vec<Vec<Poly<F>>>,
    pub det: Poly<F>,
}

/// The bidiagonal matrix with diagonal `1/x_i`, subdiagonal `-1` and corner `-z`.
pub fn lax_operator<F: Field>(x: &CrystalElement<F>) -> Result<Vec<Vec<Poly<F>>>> {
    x.expect_family(Family::A1)?;
    let n = x.rank();
    let mut m = vec![vec![Poly::zero(); n]; n];
    for i in 0..n {
        m[i][i] = Poly::constant(F::one() / x.coords()[i].clone());
        if i > 0 {
            m[i][i - 1] = Poly::constant(-F::one());
        }
    }
    m[0][n - 1] = &m[0][n - 1] + &Poly::monomial(-F::one(), 1);
    Ok(m)
}

fn minor<F: Field>(m: &[Vec<Poly<F>>], r: usize, c: usize) -> Vec<Vec<Poly<F>>> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != r)
        .map(|(_, row)| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, v)| v.clone()).collect())
        .collect()
}

/// Symbolic inverse of [`lax_operator`].
pub fn lax_matrix<F: Field>(x: &CrystalElement<F>) -> Result<LaxMatrix<F>> {
    let l = lax_operator(x)?;
    let n = l.len();
    let det = poly_det(&l)?;
    if det.is_zero() {
        return Err(Error::SingularInversion);
    }
    let mut adj = vec![vec![Poly::zero(); n]; n];
    for (i, row) in adj.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            let c = poly_det(&minor(&l, j, i))?;
            *e = if (i + j) % 2 == 0 { c } else { -&c };
        }
    }
    Ok(LaxMatrix { adj, det })
}

impl<F: Field> LaxMatrix<F> {
    pub fn size(&self) -> usize {
        self.adj.len()
    }

    pub fn product(&self, o: &Self) -> Self {
        let n = self.size();
        let mut adj = vec![vec![Poly::zero(); n]; n];
        for (i, row) in adj.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                for k in 0..n {
                    *e = &*e + &(&self.adj[i][k] * &o.adj[k][j]);
                }
            }
        }
        LaxMatrix { adj, det: &self.det * &o.det }
    }

    /// Numeric value at a spectral parameter where the denominator does not vanish.
    pub fn eval(&self, z: &F) -> Result<Vec<Vec<F>>> {
        let d = self.det.eval(z);
        if d.is_zero() {
            return Err(Error::SingularInversion);
        }
        Ok(self.adj.iter().map(|row| row.iter().map(|p| p.eval(z) / d.clone()).collect()).collect())
    }
}

/// Numerators of `M(x)M(y) - M(x')M(y')` over a common denominator.
pub fn check_lax<F: Field>(
    x: &CrystalElement<F>,
    y: &CrystalElement<F>,
    xp: &CrystalElement<F>,
    yp: &CrystalElement<F>,
) -> Result<Vec<Vec<Poly<F>>>> {
    for e in [y, xp, yp] {
        same_shape(x, e)?;
    }
    let lhs = lax_matrix(x)?.product(&lax_matrix(y)?);
    let rhs = lax_matrix(xp)?.product(&lax_matrix(yp)?);
    let n = lhs.size();
    Ok((0..n)
        .map(|i| (0..n).map(|j| &(&lhs.adj[i][j] * &rhs.det) - &(&rhs.adj[i][j] * &lhs.det)).collect())
        .collect())
}

pub fn residual_is_zero<F: Field>(r: &[Vec<Poly<F>>]) -> bool {
    r.iter().flatten().all(Poly::is_zero)
}
