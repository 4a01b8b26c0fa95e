//! The R maps of the four families and the identities that characterize them.

use crate::crystal::{embed, level, project, same_shape, sigma_pair, CrystalElement, Family, Sigma};
use crate::error::{Error, Result};
use crate::numerics::{Field, Semifield};

#[derive(Clone, Debug, PartialEq)]
pub struct RResult<S> {
    pub x: CrystalElement<S>,
    pub y: CrystalElement<S>,
}

/// The cyclic sum `P_i` of the A family, `i` taken mod `n`.
pub fn p_poly<S: Semifield>(i: isize, x: &CrystalElement<S>, y: &CrystalElement<S>) -> Result<S> {
    same_shape(x, y)?;
    x.expect_family(Family::A1)?;
    let n = x.rank() as isize;
    let terms = (1..=n).map(|k| {
        let xs = (k..=n).map(|j| x.xc(i + j).clone());
        let ys = (1..=k).map(|j| y.xc(i + j).clone());
        S::oprod(xs.chain(ys))
    });
    Ok(S::osum(terms))
}

pub fn r_type_a<S: Semifield>(x: &CrystalElement<S>, y: &CrystalElement<S>) -> Result<RResult<S>> {
    same_shape(x, y)?;
    x.expect_family(Family::A1)?;
    let n = x.rank();
    let p: Vec<S> = (0..n as isize).map(|i| p_poly(i, x, y)).collect::<Result<_>>()?;
    if let Some(i) = p.iter().position(Semifield::is_null) {
        return Err(Error::SingularInput(format!("P_{i}")));
    }
    let prev = |i: usize| &p[(i + n - 1) % n];
    let xs = (1..=n).map(|i| y.x(i).otimes(&p[i % n]).odiv(prev(i))).collect();
    let ys = (1..=n).map(|i| x.x(i).otimes(prev(i)).odiv(&p[i % n])).collect();
    Ok(RResult { x: CrystalElement::new(Family::A1, n, xs)?, y: CrystalElement::new(Family::A1, n, ys)? })
}

/// Residuals of the conservation laws that single out the A-family R.
pub fn check_toda<F: Field>(
    x: &CrystalElement<F>,
    y: &CrystalElement<F>,
    xp: &CrystalElement<F>,
    yp: &CrystalElement<F>,
) -> Result<Vec<F>> {
    for e in [y, xp, yp] {
        same_shape(x, e)?;
    }
    x.expect_family(Family::A1)?;
    let n = x.rank() as isize;
    let inv = |v: &F| F::one() / v.clone();
    let mut out = Vec::new();
    for i in 1..=n {
        out.push(x.xc(i).clone() * y.xc(i).clone() - xp.xc(i).clone() * yp.xc(i).clone());
    }
    for i in 1..=n {
        out.push(inv(x.xc(i)) + inv(y.xc(i + 1)) - inv(xp.xc(i)) - inv(yp.xc(i + 1)));
    }
    let prod = |f: &dyn Fn(isize) -> F| (1..=n).fold(F::one(), |a, i| a * f(i));
    out.push(prod(&|i| x.xc(i).clone() / yp.xc(i).clone()) - F::one());
    out.push(prod(&|i| y.xc(i).clone() / xp.xc(i).clone()) - F::one());
    Ok(out)
}

/// Values entering the D-family R: `V_0..V_{n-1}` and their images under the
/// involutions, and `U_1..U_{n-1}` (stored from index 0).
#[derive(Clone, Debug, PartialEq)]
pub struct VuTable<S> {
    pub v: Vec<S>,
    pub v_sigma1: Vec<S>,
    pub v_star: Vec<S>,
    pub v_sigman: Vec<S>,
    pub u: Vec<S>,
}

impl<S: Semifield> VuTable<S> {
    /// `U_i` for `1 <= i <= n-1`.
    pub fn u_at(&self, i: usize) -> &S {
        &self.u[i - 1]
    }
}

/// `V_0..V_{n-1}` in manifestly positive form.
///
/// Each `V_i` is written as `l(x) A_i + G_i (B + D) + l(y) C_i` where the
/// `l(x) - l(y)` terms of the step-by-step recursion have been cancelled in
/// closed form, so no subtraction is needed.
pub fn v_values<S: Semifield>(x: &CrystalElement<S>, y: &CrystalElement<S>) -> Result<Vec<S>> {
    same_shape(x, y)?;
    x.expect_family(Family::D1)?;
    let n = x.rank();
    let (lx, ly) = (level(x)?, level(y)?);
    let (xi, xb, yi, yb) = (|i| x.x(i), |i| x.xbar(i), |i| y.x(i), |i| y.xbar(i));
    let one = S::unit();

    let mut a = yi(1).odiv(yb(1));
    let mut run = S::unit();
    for m in 2..n {
        run = run.otimes(&yi(m - 1).odiv(xi(m - 1)));
        a = a.oplus(&run.otimes(&one.oplus(&yi(m).odiv(yb(m)))));
    }

    // tail[i] = sum over m in i+2..n-1 of prod_{j=i+1}^{m-1} (xbar_j / ybar_j) (1 + xbar_m / x_m)
    let mut tail = vec![S::null(); n - 1];
    for i in (0..n.saturating_sub(2)).rev() {
        if i + 2 <= n - 1 {
            let inner = one.oplus(&xb(i + 2).odiv(xi(i + 2))).oplus(&tail[i + 1]);
            tail[i] = xb(i + 1).odiv(yb(i + 1)).otimes(&inner);
        }
    }
    let c = |i: usize| xb(i + 1).odiv(xi(i + 1)).oplus(&tail[i]);

    let d = S::oprod((1..n).map(|i| xb(i).otimes(yi(i))));
    let bd = xi(n).otimes(yi(n)).otimes(&d).oplus(&d);

    let mut out = Vec::with_capacity(n);
    let mut g = S::unit();
    for i in 0..n - 1 {
        if i > 0 {
            let r = yb(i).odiv(xb(i));
            a = r.otimes(&a).oplus(&yb(i).odiv(xi(i))).oplus(&one);
            g = g.otimes(&r);
        }
        out.push(S::osum([lx.otimes(&a), g.otimes(&bd), ly.otimes(&c(i))]));
    }
    let r = yb(n - 1).odiv(xb(n - 1));
    let a_last = r.otimes(&a).oplus(&yb(n - 1).odiv(xi(n - 1))).oplus(&yi(n).orecip());
    out.push(lx.otimes(&a_last).oplus(&xi(n).otimes(&ly)));
    Ok(out)
}

/// `V_0..V_{n-1}` by the step recursion with the explicit `l(x) - l(y)` factor.
pub fn v_values_recursive<F: Field>(x: &CrystalElement<F>, y: &CrystalElement<F>) -> Result<Vec<F>> {
    same_shape(x, y)?;
    x.expect_family(Family::D1)?;
    let n = x.rank();
    let (lx, ly) = (level(x)?, level(y)?);
    let (xi, xb, yi, yb) = (|i| x.x(i).clone(), |i| x.xbar(i).clone(), |i| y.x(i).clone(), |i| y.xbar(i).clone());
    let one = F::one();
    let mut v0 = lx.clone() * yi(1) / yb(1) + ly.clone() * xb(1) / xi(1);
    let mut py = one.clone();
    let mut px = one.clone();
    for m in 2..n {
        py = py * yi(m - 1) / xi(m - 1);
        px = px * xb(m - 1) / yb(m - 1);
        v0 = v0 + lx.clone() * py.clone() * (one.clone() + yi(m) / yb(m));
        v0 = v0 + ly.clone() * px.clone() * (one.clone() + xb(m) / xi(m));
    }
    let d = (1..n).fold(one.clone(), |acc, i| acc * xb(i) * yi(i));
    v0 = v0 + xi(n) * yi(n) * d.clone() + d;
    let dl = lx - ly;
    let mut v = vec![v0];
    for i in 1..n - 1 {
        let prev = v[i - 1].clone();
        v.push(yb(i) * (prev / xb(i) + dl.clone() * (one.clone() / xi(i) + one.clone() / yb(i))));
    }
    let prev = v[n - 2].clone();
    v.push(
        yb(n - 1) / yi(n)
            * (yi(n) / xb(n - 1) * prev + dl * (yi(n) / xi(n - 1) + one.clone() / yb(n - 1))),
    );
    Ok(v)
}

fn nonnull<S: Semifield>(vals: &[S], name: &str) -> Result<()> {
    match vals.iter().position(Semifield::is_null) {
        Some(k) => Err(Error::SingularInput(format!("{name}[{k}]"))),
        None => Ok(()),
    }
}

pub fn vu_table<S: Semifield>(x: &CrystalElement<S>, y: &CrystalElement<S>) -> Result<VuTable<S>> {
    let n = x.rank();
    let v = v_values(x, y)?;
    let (s1x, s1y) = sigma_pair(Sigma::One, x, y)?;
    let (ssx, ssy) = sigma_pair(Sigma::Star, x, y)?;
    let (snx, sny) = sigma_pair(Sigma::N, x, y)?;
    let v_sigma1 = v_values(&s1x, &s1y)?;
    let v_star = v_values(&ssx, &ssy)?;
    let v_sigman = v_values(&snx, &sny)?;
    for (vals, name) in [(&v, "V"), (&v_sigma1, "V^s1"), (&v_star, "V^s*"), (&v_sigman, "V^sn")] {
        nonnull(vals, name)?;
    }
    let mut u = Vec::with_capacity(n - 1);
    u.push(v[0].otimes(&v_sigma1[0]));
    for i in 2..=n - 2 {
        let w = x.x(i).orecip().oplus(&y.xbar(i).orecip());
        let s = v[i].otimes(&v_star[i - 1]).odiv(y.x(i)).oplus(&v[i - 1].otimes(&v_star[i]).odiv(x.xbar(i)));
        u.push(s.odiv(&w));
    }
    u.push(v[n - 1].otimes(&v_star[n - 1]));
    nonnull(&u, "U")?;
    Ok(VuTable { v, v_sigma1, v_star, v_sigman, u })
}

pub fn r_type_d<S: Semifield>(x: &CrystalElement<S>, y: &CrystalElement<S>) -> Result<RResult<S>> {
    let t = vu_table(x, y)?;
    let n = x.rank();
    let (v, vs, v1, vn) = (&t.v, &t.v_star, &t.v_sigma1, &t.v_sigman);
    let u = |i: usize| t.u_at(i);

    let mut xs = vec![y.x(1).otimes(&v1[0]).odiv(&v[1])];
    let mut xbars = vec![y.xbar(1).otimes(&v[0]).odiv(&v[1])];
    let mut ys = vec![x.x(1).otimes(&v[0]).odiv(&vs[1])];
    let mut ybars = vec![x.xbar(1).otimes(&v1[0]).odiv(&vs[1])];
    for i in 2..n {
        xs.push(y.x(i).otimes(&v[i - 1]).otimes(u(i)).odiv(&v[i].otimes(u(i - 1))));
        xbars.push(y.xbar(i).otimes(&v[i - 1]).odiv(&v[i]));
        ys.push(x.x(i).otimes(&vs[i - 1]).odiv(&vs[i]));
        ybars.push(x.xbar(i).otimes(&vs[i - 1]).otimes(u(i)).odiv(&vs[i].otimes(u(i - 1))));
    }
    xs.push(y.x(n).otimes(&v[n - 1]).odiv(&vn[n - 1]));
    ys.push(x.x(n).otimes(&vn[n - 1]).odiv(&v[n - 1]));
    Ok(RResult { x: CrystalElement::d1(xs, xbars)?, y: CrystalElement::d1(ys, ybars)? })
}

/// R for A2 and C1 through the embedding into the D family.
pub fn r_reduced<S: Semifield>(x: &CrystalElement<S>, y: &CrystalElement<S>) -> Result<RResult<S>> {
    same_shape(x, y)?;
    let f = x.family();
    let r = r_type_d(&embed(x)?, &embed(y)?)?;
    Ok(RResult { x: project(f, &r.x)?, y: project(f, &r.y)? })
}

/// R for any family.
pub fn r_apply<S: Semifield>(x: &CrystalElement<S>, y: &CrystalElement<S>) -> Result<RResult<S>> {
    same_shape(x, y)?;
    match x.family() {
        Family::A1 => r_type_a(x, y),
        Family::D1 => r_type_d(x, y),
        Family::A2 | Family::C1 => r_reduced(x, y),
    }
}

pub type Triple<S> = (CrystalElement<S>, CrystalElement<S>, CrystalElement<S>);

#[derive(Clone, Debug, PartialEq)]
pub struct YbeResult<S> {
    pub left: Triple<S>,
    pub right: Triple<S>,
    pub equal: bool,
}

fn r_first<S: Semifield>(t: Triple<S>) -> Result<Triple<S>> {
    let r = r_apply(&t.0, &t.1)?;
    Ok((r.x, r.y, t.2))
}

fn r_second<S: Semifield>(t: Triple<S>) -> Result<Triple<S>> {
    let r = r_apply(&t.1, &t.2)?;
    Ok((t.0, r.x, r.y))
}

/// Both sides of the braid relation on a triple.
pub fn check_ybe<S: Semifield>(
    x: &CrystalElement<S>,
    y: &CrystalElement<S>,
    z: &CrystalElement<S>,
) -> Result<YbeResult<S>> {
    same_shape(x, y)?;
    same_shape(x, z)?;
    let start = (x.clone(), y.clone(), z.clone());
    let left = r_first(r_second(r_first(start.clone())?)?)?;
    let right = r_second(r_first(r_second(start)?)?)?;
    let equal = left == right;
    Ok(YbeResult { left, right, equal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{rat, Rat, TropVal};

    fn el(f: Family, n: usize, v: &[(i64, i64)]) -> CrystalElement<Rat> {
        CrystalElement::new(f, n, v.iter().map(|&(a, b)| rat(a, b)).collect()).unwrap()
    }

    fn ints(f: Family, n: usize, v: &[i64]) -> CrystalElement<Rat> {
        el(f, n, &v.iter().map(|&a| (a, 1)).collect::<Vec<_>>())
    }

    #[test]
    fn p_poly_examples() {
        let x = ints(Family::A1, 2, &[1, 2]);
        let y = ints(Family::A1, 2, &[3, 4]);
        assert_eq!(p_poly(0, &x, &y).unwrap(), rat(30, 1));
        assert_eq!(p_poly(1, &x, &y).unwrap(), rat(20, 1));
        assert_eq!(p_poly(2, &x, &y).unwrap(), rat(30, 1));
        assert_eq!(p_poly(-1, &x, &y).unwrap(), rat(20, 1));
    }

    #[test]
    fn r_type_a_example() {
        let x = ints(Family::A1, 2, &[1, 2]);
        let y = ints(Family::A1, 2, &[3, 4]);
        let r = r_type_a(&x, &y).unwrap();
        assert_eq!(r.x, ints(Family::A1, 2, &[2, 6]));
        assert_eq!(r.y, el(Family::A1, 2, &[(3, 2), (4, 3)]));
        assert!(check_toda(&x, &y, &r.x, &r.y).unwrap().iter().all(|v| *v == rat(0, 1)));
        let bad = check_toda(&x, &y, &x, &y).unwrap();
        assert!(bad.iter().any(|v| *v != rat(0, 1)));
    }

    #[test]
    fn tropical_a_example() {
        let x = CrystalElement::new(Family::A1, 2, vec![TropVal::int(0), TropVal::int(1)]).unwrap();
        let y = CrystalElement::new(Family::A1, 2, vec![TropVal::int(1), TropVal::int(0)]).unwrap();
        assert_eq!(p_poly(0, &x, &y).unwrap(), TropVal::int(2));
        assert_eq!(p_poly(1, &x, &y).unwrap(), TropVal::int(1));
        let r = r_type_a(&x, &y).unwrap();
        assert_eq!(r.x, x);
        assert_eq!(r.y, y);
    }

    #[test]
    fn a_fixed_point_on_diagonal() {
        let x = el(Family::A1, 4, &[(2, 3), (5, 1), (7, 2), (1, 9)]);
        let p0 = p_poly(0, &x, &x).unwrap();
        for i in 1..4 {
            assert_eq!(p_poly(i, &x, &x).unwrap(), p0);
        }
        let r = r_type_a(&x, &x).unwrap();
        assert_eq!((r.x, r.y), (x.clone(), x));
    }

    #[test]
    fn positive_form_matches_recursion() {
        for n in 3..=6 {
            let len = 2 * n - 1;
            let x = el(Family::D1, n, &(0..len).map(|k| (k as i64 + 2, 3)).collect::<Vec<_>>());
            let y = el(Family::D1, n, &(0..len).map(|k| (5, 2 * k as i64 + 1)).collect::<Vec<_>>());
            assert_eq!(v_values(&x, &y).unwrap(), v_values_recursive(&x, &y).unwrap(), "n={n}");
        }
    }

    #[test]
    fn d_inversion_and_levels() {
        let x = el(Family::D1, 3, &[(1, 2), (3, 1), (2, 5), (7, 3), (4, 1)]);
        let y = el(Family::D1, 3, &[(5, 1), (1, 3), (9, 2), (2, 1), (3, 7)]);
        let r = r_type_d(&x, &y).unwrap();
        assert_eq!(level(&r.x).unwrap(), level(&y).unwrap());
        assert_eq!(level(&r.y).unwrap(), level(&x).unwrap());
        let back = r_type_d(&r.x, &r.y).unwrap();
        assert_eq!((back.x, back.y), (x, y));
    }

    #[test]
    fn d_preserves_unit_last_coordinate() {
        let x = el(Family::D1, 4, &[(1, 2), (3, 1), (2, 5), (1, 1), (7, 3), (4, 1), (2, 9)]);
        let y = el(Family::D1, 4, &[(5, 1), (1, 3), (9, 2), (1, 1), (2, 1), (3, 7), (6, 5)]);
        let r = r_type_d(&x, &y).unwrap();
        assert_eq!(*r.x.x(4), rat(1, 1));
        assert_eq!(*r.y.x(4), rat(1, 1));
    }

    #[test]
    fn reduced_families_invert() {
        let x = el(Family::A2, 2, &[(1, 2), (3, 1), (2, 5), (7, 3)]);
        let y = el(Family::A2, 2, &[(5, 1), (1, 3), (9, 2), (2, 1)]);
        let r = r_reduced(&x, &y).unwrap();
        let back = r_reduced(&r.x, &r.y).unwrap();
        assert_eq!((back.x, back.y), (x, y));
        let x = el(Family::C1, 1, &[(1, 2), (3, 1), (2, 5)]);
        let y = el(Family::C1, 1, &[(5, 1), (1, 3), (9, 2)]);
        let r = r_reduced(&x, &y).unwrap();
        let back = r_reduced(&r.x, &r.y).unwrap();
        assert_eq!((back.x, back.y), (x, y));
    }

    #[test]
    fn ybe_small_cases() {
        let x = ints(Family::A1, 3, &[1, 2, 3]);
        let y = el(Family::A1, 3, &[(1, 2), (5, 1), (2, 3)]);
        let z = el(Family::A1, 3, &[(7, 1), (1, 4), (3, 2)]);
        assert!(check_ybe(&x, &y, &z).unwrap().equal);
        let x = el(Family::D1, 3, &[(1, 2), (3, 1), (2, 5), (7, 3), (4, 1)]);
        let y = el(Family::D1, 3, &[(5, 1), (1, 3), (9, 2), (2, 1), (3, 7)]);
        let z = el(Family::D1, 3, &[(2, 1), (2, 3), (1, 1), (5, 4), (1, 6)]);
        assert!(check_ybe(&x, &y, &z).unwrap().equal);
    }

    #[test]
    fn rejects_mismatched_shapes() {
        let x = ints(Family::A1, 2, &[1, 2]);
        let y = ints(Family::A1, 3, &[1, 2, 3]);
        assert!(r_type_a(&x, &y).is_err());
        let d = ints(Family::D1, 3, &[1, 2, 3, 4, 5]);
        assert!(matches!(r_type_a(&d, &d), Err(Error::WrongFamily { .. })));
    }
}
