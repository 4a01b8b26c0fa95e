use super::{FermionParams, TimeArray};
use crate::error::{Error, Result};
use crate::numerics::{ComplexField, Field};

/// A value `coef * t^order` in the single infinitesimal `t` that a zero
/// momentum stands for.
#[derive(Clone, Debug)]
struct Tracked<C> {
    coef: C,
    order: i32,
}

impl<C: Field> Tracked<C> {
    fn one() -> Self {
        Tracked { coef: C::one(), order: 0 }
    }
    fn mul(&mut self, v: C) {
        self.coef = self.coef.clone() * v;
    }
    fn join(self, o: Tracked<C>) -> Self {
        Tracked { coef: self.coef * o.coef, order: self.order + o.order }
    }
    fn settle(self) -> Result<C> {
        match self.order {
            0 => Ok(self.coef),
            o if o > 0 || self.coef.is_zero() => Ok(C::zero()),
            _ => Err(Error::LimitUndefined("a zero momentum leaves a pole".into())),
        }
    }
}

fn both_zero<C: Field>(a: &C, b: &C) -> Result<()> {
    if a.is_zero() && b.is_zero() {
        Err(Error::LimitUndefined("two momenta vanish together".into()))
    } else {
        Ok(())
    }
}

/// `Delta^{m,l}_{K,K'}` over momenta `mom` (indices 0-based, increasing).
fn delta_mixed<C: Field>(m: i32, l: i32, k: &[usize], kp: &[usize], mom: &[C]) -> Result<Tracked<C>> {
    let mut t = Tracked::one();
    for (a, &mu) in k.iter().enumerate() {
        for &nu in &k[a + 1..] {
            both_zero(&mom[mu], &mom[nu])?;
            t.mul(mom[mu].clone() - mom[nu].clone());
        }
    }
    for (a, &mu) in kp.iter().enumerate() {
        for &nu in &kp[a + 1..] {
            both_zero(&mom[mu], &mom[nu])?;
            t.mul(mom[nu].clone() - mom[mu].clone());
        }
    }
    for &mu in k {
        for &nu in kp {
            if mu == nu && mom[mu].is_zero() {
                t.mul(C::one() / C::from_i64(2));
                t.order -= 1;
                continue;
            }
            both_zero(&mom[mu], &mom[nu])?;
            let d = mom[mu].clone() + mom[nu].clone();
            if d.is_zero() {
                return Err(Error::DeltaPole);
            }
            t.mul(C::one() / d);
        }
    }
    let e = m + l;
    for &mu in k {
        if mom[mu].is_zero() {
            t.order += e;
        } else {
            t.mul(mom[mu].powi(e));
        }
    }
    for &mu in kp {
        let e = 1 - m - l;
        if mom[mu].is_zero() {
            t.order += e;
            if e.rem_euclid(2) == 1 {
                t.mul(-C::one());
            }
        } else {
            t.mul((-mom[mu].clone()).powi(e));
        }
    }
    Ok(t)
}

/// `Delta^-_K / Delta^+_K`.
fn delta_ratio<C: Field>(k: &[usize], mom: &[C]) -> Result<C> {
    let mut acc = C::one();
    for (a, &mu) in k.iter().enumerate() {
        for &nu in &k[a + 1..] {
            both_zero(&mom[mu], &mom[nu])?;
            let d = mom[mu].clone() + mom[nu].clone();
            if d.is_zero() {
                return Err(Error::DeltaPole);
            }
            acc = acc * (mom[mu].clone() - mom[nu].clone()) / d;
        }
    }
    Ok(acc)
}

/// Exponential factors at one pair of times, computed once per evaluation.
struct Exps<C> {
    ep: Vec<C>,
    em_inv: Vec<C>,
    eq: Vec<C>,
}

impl<C: Field> Exps<C> {
    fn new(x: &TimeArray<C>, y: &TimeArray<C>, g: &FermionParams<C>) -> Result<Self> {
        let mut em_inv = Vec::with_capacity(g.p.len());
        for p in &g.p {
            let v = x.exp_xi(&-p.clone())?;
            if v.is_zero() {
                return Err(Error::PoleAtMomentum(format!("exp(xi(x, -p)) vanishes at p = {p:?}")));
            }
            em_inv.push(C::one() / v);
        }
        Ok(Exps {
            ep: g.p.iter().map(|p| x.exp_xi(p)).collect::<Result<_>>()?,
            em_inv,
            eq: g.q.iter().map(|q| y.exp_xi(q)).collect::<Result<_>>()?,
        })
    }
}

fn members(mask: usize, len: usize) -> impl Iterator<Item = usize> {
    (1..=len).filter(move |i| mask >> (i - 1) & 1 == 1)
}

fn check_momenta<C: Field>(g: &FermionParams<C>) -> Result<()> {
    g.check_shape()?;
    let zeros = g.p.iter().chain(&g.q).filter(|v| v.is_zero()).count();
    if zeros > 1 {
        return Err(Error::LimitUndefined("at most one momentum may vanish".into()));
    }
    Ok(())
}

/// The neutral-fermion tau function `f_l(x, y; g')`, `l` in `{0, 1}`.
pub fn eval_f<C: ComplexField>(l: u8, x: &TimeArray<C>, y: &TimeArray<C>, g: &FermionParams<C>) -> Result<C> {
    if l > 1 {
        return Err(Error::IndexOutOfRange { index: l as usize, max: 1 });
    }
    check_momenta(g)?;
    let (nn, m) = (g.n_b(), g.n_c());
    let ex = Exps::new(x, y, g)?;
    let half = C::one() / C::from_i64(2);
    let odd_weight = if l == 0 { C::i() } else { -C::i() };
    let mut total = C::zero();
    for im in 0..1usize << nn {
        for jm in 0..1usize << m {
            let mut w = C::one();
            let mut k = Vec::new();
            for i in members(im, nn) {
                let ib = g.bar(i);
                w = w * g.b[i - 1].clone() * ex.ep[i - 1].clone() * ex.em_inv[ib - 1].clone() * half.clone();
                k.extend([i - 1, ib - 1]);
            }
            let mut jq = Vec::new();
            for j in members(jm, m) {
                let jt = g.tilde(j);
                w = w * g.c[j - 1].clone() * ex.ep[jt - 1].clone() * ex.eq[j - 1].clone() * half.clone();
                k.push(jt - 1);
                jq.push(j - 1);
            }
            if w.is_zero() {
                continue;
            }
            if jq.len() % 2 == 1 {
                w = w * odd_weight.clone();
            }
            k.sort_unstable();
            total = total + w * delta_ratio(&k, &g.p)? * delta_ratio(&jq, &g.q)?;
        }
    }
    Ok(total)
}

/// The two-component tau function `F_{l1,l2;l}(x, y; g)`.
#[allow(non_snake_case)]
pub fn eval_F<C: Field>(l1: i32, l2: i32, l: i32, x: &TimeArray<C>, y: &TimeArray<C>, g: &FermionParams<C>) -> Result<C> {
    check_momenta(g)?;
    let (nn, m) = (g.n_b(), g.n_c());
    let ex = Exps::new(x, y, g)?;
    let mut total = C::zero();
    for im in 0..1usize << nn {
        for ipm in 0..1usize << nn {
            for jm in 0..1usize << m {
                for jpm in 0..1usize << m {
                    let (ni, nip, nj, njp) = (
                        im.count_ones() as i32,
                        ipm.count_ones() as i32,
                        jm.count_ones() as i32,
                        jpm.count_ones() as i32,
                    );
                    if njp - nj != l {
                        continue;
                    }
                    let mut w = if (nip + (ni + nip) * nj) % 2 == 0 { C::one() } else { -C::one() };
                    let (mut k, mut kp) = (Vec::new(), Vec::new());
                    for i in members(im, nn) {
                        let ib = g.bar(i);
                        w = w * g.b[i - 1].clone() * ex.ep[i - 1].clone() * ex.em_inv[ib - 1].clone();
                        k.push(i - 1);
                        kp.push(ib - 1);
                    }
                    for i in members(ipm, nn) {
                        let ib = g.bar(i);
                        w = w * g.b_hat[i - 1].clone() * ex.ep[ib - 1].clone() * ex.em_inv[i - 1].clone();
                        kp.push(i - 1);
                        k.push(ib - 1);
                    }
                    let (mut jq, mut jpq) = (Vec::new(), Vec::new());
                    for j in members(jm, m) {
                        let jt = g.tilde(j);
                        w = w * g.c[j - 1].clone() * ex.ep[jt - 1].clone() * ex.eq[j - 1].clone();
                        k.push(jt - 1);
                        jq.push(j - 1);
                    }
                    for j in members(jpm, m) {
                        let jt = g.tilde(j);
                        w = w * g.c_hat[j - 1].clone() * ex.em_inv[jt - 1].clone() * ex.eq[j - 1].clone();
                        kp.push(jt - 1);
                        jpq.push(j - 1);
                    }
                    if w.is_zero() {
                        continue;
                    }
                    k.sort_unstable();
                    kp.sort_unstable();
                    let dp = delta_mixed(l1, l, &k, &kp, &g.p)?;
                    let dq = delta_mixed(l2, -l, &jpq, &jq, &g.q)?;
                    let mut t = dp.join(dq);
                    t.mul(w);
                    total = total + t.settle()?;
                }
            }
        }
    }
    if (l * (l + 1) / 2).rem_euclid(2) == 1 {
        total = -total;
    }
    Ok(total)
}
