use super::TauData;
use crate::crystal::{level, CrystalElement, Family};
use crate::error::{Error, Result};
use crate::numerics::Field;

/// The element `[mu; tau, C, tau']` built from two tau rows and one middle row.
pub fn build_element<F: Field>(mu: &CrystalElement<F>, tau: &[F], c: &[F], taup: &[F]) -> Result<CrystalElement<F>> {
    mu.expect_family(Family::D1)?;
    let n = mu.rank();
    if tau.len() != n + 1 || taup.len() != n + 1 || c.len() != n - 2 {
        return Err(Error::BadShape("need tau, tau' of length n+1 and C of length n-2".into()));
    }
    if tau.iter().chain(taup).chain(c).any(|v| v.is_zero()) {
        return Err(Error::ZeroInput("tau, C and tau' must be nonzero".into()));
    }
    let (t, tp) = (|i: usize| tau[i].clone(), |i: usize| taup[i].clone());
    let cc = |i: usize| c[i - 1].clone();
    let m = |i: usize| mu.x(i).clone();
    let mb = |i: usize| mu.xbar(i).clone();
    let mut z = vec![F::zero(); n + 1];
    let mut zb = vec![F::zero(); n];
    z[1] = t(0) * tp(1) / (m(1) * cc(1));
    zb[1] = t(1) * tp(0) / (mb(1) * cc(1));
    if n == 3 {
        z[2] = cc(1) * tp(2) / (m(2) * t(2) * tp(0) * tp(1));
        zb[2] = cc(1) * t(3) / (mb(2) * t(0) * t(1) * tp(3));
    } else {
        z[2] = cc(1) * tp(2) / (m(2) * cc(2) * tp(0) * tp(1));
        zb[2] = cc(1) * t(2) / (mb(2) * cc(2) * t(0) * t(1));
        for i in 3..=n - 2 {
            z[i] = cc(i - 1) * tp(i) / (m(i) * cc(i) * tp(i - 1));
            zb[i] = cc(i - 1) * t(i) / (mb(i) * cc(i) * t(i - 1));
        }
        z[n - 1] = cc(n - 2) * tp(n - 1) / (m(n - 1) * t(n - 1) * tp(n - 2));
        zb[n - 1] = cc(n - 2) * t(n) / (mb(n - 1) * t(n - 2) * tp(n));
    }
    z[n] = t(n - 1) * tp(n) / (m(n) * t(n) * tp(n - 1));
    CrystalElement::d1(z[1..].to_vec(), zb[1..].to_vec())
}

/// `(x, y, x', y')` read off from data.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadruple<F> {
    pub x: CrystalElement<F>,
    pub y: CrystalElement<F>,
    pub xp: CrystalElement<F>,
    pub yp: CrystalElement<F>,
}

pub fn extract_quadruple<F: Field>(d: &TauData<F>) -> Result<Quadruple<F>> {
    d.check_shape()?;
    Ok(Quadruple {
        x: build_element(&d.lambda, &d.tau[3], &d.w, &d.tau[2])?,
        y: build_element(&d.kappa, &d.tau[2], &d.north, &d.tau[1])?,
        xp: build_element(&d.kappa, &d.tau[3], &d.s, &d.tau[4])?,
        yp: build_element(&d.lambda, &d.tau[4], &d.east, &d.tau[1])?,
    })
}

/// Which tau row of `[mu; tau, C, tau']` is held fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixedSide {
    Tau,
    TauPrime,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Parameterized<F> {
    pub c: Vec<F>,
    /// The row that was solved for.
    pub tau: Vec<F>,
}

/// Solves `[mu; tau, C, tau'] = z` for `C` and the free tau row, with `C_1 = t`.
pub fn parameterize_element<F: Field>(
    z: &CrystalElement<F>,
    mu: &CrystalElement<F>,
    fixed: &[F],
    side: FixedSide,
    t: &F,
) -> Result<Parameterized<F>> {
    z.expect_family(Family::D1)?;
    mu.expect_family(Family::D1)?;
    let n = z.rank();
    if mu.rank() != n || fixed.len() != n + 1 {
        return Err(Error::BadShape("rank mismatch".into()));
    }
    if t.is_zero() || fixed.iter().any(|v| v.is_zero()) {
        return Err(Error::ZeroInput("parameter and fixed row must be nonzero".into()));
    }
    if !(level(z)? * level(mu)? - F::one()).negligible(&F::one()) {
        return Err(Error::LevelMismatch);
    }
    let zz = |i: usize| z.x(i).clone() * mu.x(i).clone();
    let zb = |i: usize| z.xbar(i).clone() * mu.xbar(i).clone();
    let f = |i: usize| fixed[i].clone();
    let mut c = vec![F::zero(); n - 1];
    let mut o = vec![F::zero(); n + 1];
    c[1] = t.clone();
    match side {
        FixedSide::Tau => {
            o[0] = zb(1) * t.clone() / f(1);
            o[1] = zz(1) * t.clone() / f(0);
            if n == 3 {
                o[2] = zz(2) * f(2) * o[0].clone() * o[1].clone() / c[1].clone();
                o[3] = c[1].clone() * f(3) / (zb(2) * f(0) * f(1));
            } else {
                c[2] = c[1].clone() * f(2) / (zb(2) * f(0) * f(1));
                for i in 3..=n - 2 {
                    c[i] = c[i - 1].clone() * f(i) / (zb(i) * f(i - 1));
                }
                o[2] = zz(2) * c[2].clone() * o[0].clone() * o[1].clone() / c[1].clone();
                for i in 3..=n - 2 {
                    o[i] = zz(i) * c[i].clone() * o[i - 1].clone() / c[i - 1].clone();
                }
                o[n - 1] = zz(n - 1) * f(n - 1) * o[n - 2].clone() / c[n - 2].clone();
                o[n] = c[n - 2].clone() * f(n) / (zb(n - 1) * f(n - 2));
            }
        }
        FixedSide::TauPrime => {
            o[1] = zb(1) * t.clone() / f(0);
            o[0] = zz(1) * t.clone() / f(1);
            if n == 3 {
                o[2] = c[1].clone() * f(2) / (zz(2) * f(0) * f(1));
                o[3] = zb(2) * o[0].clone() * o[1].clone() * f(3) / c[1].clone();
            } else {
                c[2] = c[1].clone() * f(2) / (zz(2) * f(0) * f(1));
                for i in 3..=n - 2 {
                    c[i] = c[i - 1].clone() * f(i) / (zz(i) * f(i - 1));
                }
                o[2] = zb(2) * c[2].clone() * o[0].clone() * o[1].clone() / c[1].clone();
                for i in 3..=n - 2 {
                    o[i] = zb(i) * c[i].clone() * o[i - 1].clone() / c[i - 1].clone();
                }
                o[n - 1] = c[n - 2].clone() * f(n - 1) / (zz(n - 1) * f(n - 2));
                o[n] = zb(n - 1) * o[n - 2].clone() * f(n) / c[n - 2].clone();
            }
        }
    }
    let out = Parameterized { c: c[1..].to_vec(), tau: o };
    let rebuilt = match side {
        FixedSide::Tau => build_element(mu, fixed, &out.c, &out.tau)?,
        FixedSide::TauPrime => build_element(mu, &out.tau, &out.c, fixed)?,
    };
    let close = rebuilt.coords().iter().zip(z.coords()).all(|(a, b)| (a.clone() - b.clone()).negligible(b));
    if !close {
        return Err(Error::LevelMismatch);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{rat, Rat};

    fn d1(v: &[(i64, i64)]) -> CrystalElement<Rat> {
        let n = (v.len() + 1) / 2;
        CrystalElement::new(Family::D1, n, v.iter().map(|&(a, b)| rat(a, b)).collect()).unwrap()
    }

    #[test]
    fn unit_rows_give_reciprocals() {
        let mu = d1(&[(2, 1), (3, 1), (5, 1), (7, 1), (11, 1), (13, 1), (17, 1)]);
        let ones = vec![rat(1, 1); 5];
        let z = build_element(&mu, &ones, &[rat(1, 1), rat(1, 1)], &ones).unwrap();
        let expect: Vec<Rat> = mu.coords().iter().map(|v| rat(1, 1) / v.clone()).collect();
        assert_eq!(z.coords(), &expect[..]);
    }

    #[test]
    fn level_is_inverted() {
        for n in 3..=6 {
            let mu = d1(&(0..2 * n - 1).map(|k| (k as i64 + 2, 3)).collect::<Vec<_>>());
            let tau: Vec<Rat> = (0..=n).map(|k| rat(2 * k as i64 + 1, 5)).collect();
            let taup: Vec<Rat> = (0..=n).map(|k| rat(7, k as i64 + 2)).collect();
            let c: Vec<Rat> = (0..n - 2).map(|k| rat(k as i64 + 4, 9)).collect();
            let z = build_element(&mu, &tau, &c, &taup).unwrap();
            assert_eq!(level(&z).unwrap() * level(&mu).unwrap(), rat(1, 1), "n={n}");
        }
    }

    #[test]
    fn rank_three_variant_differs() {
        let mu = d1(&[(1, 1); 5]);
        let tau = [rat(2, 1), rat(3, 1), rat(5, 1), rat(7, 1)];
        let taup = [rat(1, 1), rat(1, 1), rat(1, 1), rat(1, 1)];
        let z = build_element(&mu, &tau, &[rat(1, 1)], &taup).unwrap();
        assert_eq!(*z.x(2), rat(1, 5));
        assert_eq!(*z.xbar(2), rat(7, 6));
    }

    #[test]
    fn parameterization_round_trips() {
        for n in 3..=6 {
            let mu = d1(&(0..2 * n - 1).map(|k| (k as i64 + 2, 3)).collect::<Vec<_>>());
            let tau: Vec<Rat> = (0..=n).map(|k| rat(2 * k as i64 + 1, 5)).collect();
            let taup: Vec<Rat> = (0..=n).map(|k| rat(7, k as i64 + 2)).collect();
            let c: Vec<Rat> = (0..n - 2).map(|k| rat(k as i64 + 4, 9)).collect();
            let z = build_element(&mu, &tau, &c, &taup).unwrap();
            for t in [rat(1, 1), rat(-3, 7)] {
                let p = parameterize_element(&z, &mu, &tau, FixedSide::Tau, &t).unwrap();
                assert_eq!(build_element(&mu, &tau, &p.c, &p.tau).unwrap(), z);
                let q = parameterize_element(&z, &mu, &taup, FixedSide::TauPrime, &t).unwrap();
                assert_eq!(build_element(&mu, &q.tau, &q.c, &taup).unwrap(), z);
            }
            let p = parameterize_element(&z, &mu, &tau, FixedSide::Tau, &c[0]).unwrap();
            assert_eq!((p.c, p.tau), (c.clone(), taup.clone()));
        }
    }

    #[test]
    fn parameterization_unit_case_and_level_check() {
        let mu = d1(&[(2, 1), (3, 1), (5, 1), (7, 1), (11, 1)]);
        let z = mu.map(|v| rat(1, 1) / v.clone()).unwrap();
        let ones = vec![rat(1, 1); 4];
        let p = parameterize_element(&z, &mu, &ones, FixedSide::Tau, &rat(1, 1)).unwrap();
        assert_eq!(p.c, vec![rat(1, 1)]);
        assert_eq!(p.tau, ones);
        assert_eq!(
            parameterize_element(&mu, &mu, &ones, FixedSide::Tau, &rat(1, 1)),
            Err(Error::LevelMismatch)
        );
    }
}
