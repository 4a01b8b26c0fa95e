use super::{extract_quadruple, TauData};
use crate::error::{Error, Result};
use crate::numerics::{relative_gap, Field};
use crate::tropical_r::{r_type_d, VuTable};

/// Direct ratios of the extracted `x`, `y` next to their closed tau forms.
pub fn ratio_identities<F: Field>(d: &TauData<F>) -> Result<Vec<(String, F, F)>> {
    let n = d.n;
    let q = extract_quadruple(d)?;
    let (x, y) = (&q.x, &q.y);
    let t = |j: usize, i: usize| d.t(j, i);
    let (la, lb, ka, kb) = (|i| d.lambda.x(i).clone(), |i| d.lambda.xbar(i).clone(), |i| d.kappa.x(i).clone(), |i| d.kappa.xbar(i).clone());
    let (nn, w) = (|i| d.n_(i), |i| d.w_(i));
    let b = d.beta.clone();
    // at rank three the n-2 column is the first one, which carries both tau2_0 and tau2_1
    let t2m = if n == 3 { t(2, 0) * t(2, 1) } else { t(2, n - 2) };
    let inv = |v: &F| F::one() / v.clone();
    let prod = |f: &dyn Fn(usize) -> F, lo: usize, hi: usize| (lo..=hi).fold(F::one(), |a, i| a * f(i));
    let mut out = Vec::new();

    for i in 1..=n - 2 {
        let direct = inv(x.x(i)) + inv(y.xbar(i));
        let form = match i {
            1 => b.clone() * t(0, 1) / (t(1, 0) * t(3, 0)),
            2 => b.clone() * t(0, 2) * t(2, 0) * t(2, 1) / (nn(1) * w(1)),
            _ => b.clone() * t(0, i) * t(2, i - 1) / (nn(i - 1) * w(i - 1)),
        };
        out.push((format!("sum-of-inverses {i}"), direct, form));
    }
    let direct = y.x(n).clone() / x.x(n - 1).clone() + inv(y.xbar(n - 1));
    let form = b.clone() * t(0, n - 1) * t(1, n) * t2m.clone() * t(2, n - 1)
        / (ka(n) * nn(n - 2) * w(n - 2) * t(1, n - 1) * t(2, n));
    out.push(("sum-of-inverses last".into(), direct, form));

    for i in 1..=n - 1 {
        let direct = prod(&|k| y.x(k).clone(), 1, i) / prod(&|k| x.x(k).clone(), 1, i - 1);
        let t00 = t(2, 0) * t(2, 0);
        let form = if i == 1 {
            t(1, 1) * t(2, 0) / (ka(1) * nn(1))
        } else if i == n - 1 {
            prod(&la, 1, n - 2) * w(n - 2) * t00 * t(1, n - 1)
                / (prod(&ka, 1, n - 1) * t(1, 0) * t(3, 0) * t2m.clone() * t(2, n - 1))
        } else if i == 2 {
            la(1) * w(1) * t(2, 0) * t(1, 2) / (ka(1) * ka(2) * nn(2) * t(1, 0) * t(3, 0) * t(2, 1))
        } else {
            prod(&la, 1, i - 1) * w(i - 1) * t00 * t(1, i)
                / (prod(&ka, 1, i) * nn(i) * t(1, 0) * t(3, 0) * t(2, i - 1))
        };
        out.push((format!("y-over-x products {i}"), direct, form));
    }

    for i in 1..=n - 2 {
        let direct = prod(&|k| x.xbar(k).clone(), 1, i) / prod(&|k| y.xbar(k).clone(), 1, i - 1);
        let t00 = t(2, 0) * t(2, 0);
        let form = match i {
            1 => t(2, 0) * t(3, 1) / (lb(1) * w(1)),
            2 => kb(1) * nn(1) * t(2, 0) * t(3, 2) / (lb(1) * lb(2) * w(2) * t(1, 0) * t(3, 0) * t(2, 1)),
            _ => prod(&kb, 1, i - 1) * nn(i - 1) * t00 * t(3, i)
                / (prod(&lb, 1, i) * w(i) * t(1, 0) * t(3, 0) * t(2, i - 1)),
        };
        out.push((format!("xbar-over-ybar products {i}"), direct, form));
    }
    let direct = prod(&|k| x.xbar(k).clone(), 1, n - 1) / (prod(&|k| y.xbar(k).clone(), 1, n - 2) * y.x(n).clone());
    let form = prod(&kb, 1, n - 2) * ka(n) * nn(n - 2) * t(2, 0) * t(2, 0) * t(1, n - 1) * t(3, n)
        / (prod(&lb, 1, n - 1) * t(1, 0) * t(3, 0) * t(1, n) * t2m * t(2, n - 1));
    out.push(("xbar-over-ybar products last".into(), direct, form));
    Ok(out)
}

/// The V and U values written as tau ratios; requires `d` to solve all equations.
pub fn uv_from_tau<F: Field>(d: &TauData<F>) -> Result<VuTable<F>> {
    let failing = d.failing_equations()?;
    if let Some(id) = failing.first() {
        return Err(Error::NotASolution(format!("<{},{}> has a nonzero residual", id.j, id.i)));
    }
    for (name, a, b) in ratio_identities(d)? {
        if !(a.clone() - b.clone()).negligible(&a) {
            return Err(Error::Internal(format!("ratio identity {name} does not hold")));
        }
    }
    let n = d.n;
    let t = |j: usize, i: usize| d.t(j, i);
    let (l, k) = (d.l(), d.k());
    let g = (k.clone() - l.clone()) * d.beta.clone() / (l * k * d.alpha.clone());
    let corner = |i: usize| g.clone() * t(2, i) * t(4, i) / (t(1, i) * t(3, i));

    let mut v = vec![F::zero(); n];
    let mut vs = vec![F::zero(); n];
    let mut u = vec![F::zero(); n - 1];
    v[0] = corner(0);
    vs[0] = v[0].clone();
    let v1_sigma1 = corner(1);
    u[0] = corner(0) * corner(1);
    v[1] = g.clone() * d.s_(1) * t(2, 0) * t(2, 1) / (d.n_(1) * t(3, 0) * t(3, 1));
    vs[1] = g.clone() * d.e_(1) * t(2, 0) * t(2, 1) / (d.w_(1) * t(1, 0) * t(1, 1));
    for i in 2..=n - 2 {
        v[i] = g.clone() * d.s_(i) * t(2, i) / (d.n_(i) * t(3, i));
        vs[i] = g.clone() * d.e_(i) * t(2, i) / (d.w_(i) * t(1, i));
        u[i - 1] = g.clone() * corner(i);
    }
    v[n - 1] = corner(n);
    vs[n - 1] = corner(n - 1);
    u[n - 2] = corner(n - 1) * corner(n);
    let mut v_sigma1 = v.clone();
    v_sigma1[0] = v1_sigma1;
    let mut v_sigman = v.clone();
    v_sigman[n - 1] = vs[n - 1].clone();
    Ok(VuTable { v, v_sigma1, v_star: vs, v_sigman, u })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BilinearizationReport {
    pub is_solution: bool,
    pub x_matches: bool,
    pub y_matches: bool,
    /// Largest relative coordinate gap between `R(x, y)` and `(x', y')`.
    pub max_gap: f64,
}

impl BilinearizationReport {
    pub fn passed(&self) -> bool {
        self.is_solution && self.x_matches && self.y_matches
    }
}

/// Applies R to the `(x, y)` read off from `d` and compares with `(x', y')`.
pub fn verify_bilinearization<F: Field>(d: &TauData<F>) -> Result<BilinearizationReport> {
    let q = extract_quadruple(d)?;
    let r = r_type_d(&q.x, &q.y)?;
    let close = |a: &[F], b: &[F]| a.iter().zip(b).all(|(p, q)| (p.clone() - q.clone()).negligible(q));
    let gap = r
        .x
        .coords()
        .iter()
        .zip(q.xp.coords())
        .chain(r.y.coords().iter().zip(q.yp.coords()))
        .map(|(a, b)| relative_gap(a, b))
        .fold(0.0, f64::max);
    Ok(BilinearizationReport {
        is_solution: d.is_solution()?,
        x_matches: close(r.x.coords(), q.xp.coords()),
        y_matches: close(r.y.coords(), q.yp.coords()),
        max_gap: gap,
    })
}
