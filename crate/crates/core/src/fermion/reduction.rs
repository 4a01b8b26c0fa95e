use super::grid::GridSpec;
use super::identities::IdentityCheck;
use super::params::FermionParams;
use super::tau::eval_F;
use super::time::{z_shift, TimeArray};
use crate::crystal::Family;
use crate::error::{Error, Result};
use crate::numerics::{ComplexField, Field, Poly};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReductionMode {
    /// Partners must exist in the scalar type; nothing is approximated.
    Exact,
    /// Partners are root-found to the working precision.
    Numeric,
}

/// Free data of a reduced parameter set: couplings, the first momentum of
/// each `b` pair with an optional guess for its partner, and the neutral
/// momentum `p'` of each `c`.
#[derive(Clone, Debug)]
pub struct ReductionInput<C> {
    pub b: Vec<C>,
    pub p: Vec<C>,
    pub q_guess: Vec<Option<C>>,
    pub c: Vec<C>,
    pub p_prime: Vec<C>,
}

/// Builds parameters satisfying `P(p_j) = P(q_j)` and `P(p'_j) = q'_j^2`.
pub fn solve_reduction<C: ComplexField>(
    spec: &GridSpec<C>,
    input: &ReductionInput<C>,
    mode: ReductionMode,
) -> Result<FermionParams<C>> {
    spec.validate()?;
    if input.p.len() != input.b.len() || input.q_guess.len() != input.b.len() || input.p_prime.len() != input.c.len() {
        return Err(Error::BadShape("one momentum and one guess per coupling".into()));
    }
    let mut pairs = Vec::with_capacity(input.p.len());
    for (p, guess) in input.p.iter().zip(&input.q_guess) {
        pairs.push((p.clone(), b_partner(spec, p, guess.as_ref(), mode)?));
    }
    let mut cpairs = Vec::with_capacity(input.p_prime.len());
    for pp in &input.p_prime {
        cpairs.push((pp.clone(), c_partner(spec, pp, mode)?));
    }
    FermionParams::from_pairs(input.b.clone(), &pairs, input.c.clone(), &cpairs)
}

/// `(P(p_j) - P(q_j))` for every `b` pair followed by `(P(p'_j) - q'_j^2)` for every `c` pair.
pub fn reduction_residuals<C: Field>(spec: &GridSpec<C>, g: &FermionParams<C>) -> Vec<C> {
    let mut out: Vec<C> = (1..=g.n_b())
        .map(|j| {
            let (p, q) = g.pair(j);
            spec.red_poly(&p) - spec.red_poly(&q)
        })
        .collect();
    out.extend((1..=g.n_c()).map(|j| {
        let (pp, qq) = g.cpair(j);
        spec.red_poly(&pp) - qq.clone() * qq
    }));
    out
}

/// Whether every pair with a nonzero coupling meets the reduction condition;
/// pairs whose couplings vanish never enter the tau functions.
pub fn satisfies_reduction<C: Field>(spec: &GridSpec<C>, g: &FermionParams<C>) -> bool {
    let active = (0..g.n_b())
        .map(|j| !g.b[j].is_zero() || !g.b_hat[j].is_zero())
        .chain((0..g.n_c()).map(|j| !g.c[j].is_zero() || !g.c_hat[j].is_zero()));
    let scales = (1..=g.n_b()).map(|j| spec.red_poly(&g.pair(j).0)).chain((1..=g.n_c()).map(|j| spec.red_poly(&g.cpair(j).0)));
    active
        .zip(scales)
        .zip(reduction_residuals(spec, g))
        .all(|((on, scale), r)| !on || r.negligible(&(scale.abs_l1() + C::one())))
}

/// The remaining roots `u = q^2` of `P(sqrt u) = P(p)` once `u = p^2` is divided out.
fn partner_poly<C: Field>(spec: &GridSpec<C>, p: &C) -> Result<Poly<C>> {
    let pp = spec.red_poly_in_square();
    let p2 = p.clone() * p.clone();
    let shifted = &pp - &Poly::constant(pp.eval(&p2));
    let (quot, _) = shifted.div_rem(&Poly::new(vec![-p2, C::one()]))?;
    Ok(quot)
}

fn is_nonneg_real<C: ComplexField>(u: &C) -> bool {
    u.im().is_zero() && u.re() >= C::Real::zero()
}

fn distinct_partner<C: Field>(p: &C, q: &C) -> bool {
    let scale = p.abs_l1() + q.abs_l1();
    !(p.clone() - q.clone()).negligible(&scale) && !(p.clone() + q.clone()).negligible(&scale)
}

/// A partner `q` of `p` with `P(q) = P(p)`, `q != +-p`.
pub fn b_partner<C: ComplexField>(spec: &GridSpec<C>, p: &C, guess: Option<&C>, mode: ReductionMode) -> Result<C> {
    let target = spec.red_poly(p);
    let quot = partner_poly(spec, p)?;
    match mode {
        ReductionMode::Exact => {
            if let Some(q) = guess {
                if spec.red_poly(q) == target && distinct_partner(p, q) {
                    return Ok(q.clone());
                }
                return Err(Error::NoRationalPartner(format!("{q:?} does not pair with {p:?}")));
            }
            let mut roots = exact_roots(&quot);
            roots.sort_by_key(|u| !is_nonneg_real(u));
            roots
                .iter()
                .filter_map(|u| u.sqrt_opt())
                .find(|q| distinct_partner(p, q))
                .ok_or_else(|| Error::NoRationalPartner(format!("{p:?}")))
        }
        ReductionMode::Numeric => {
            let roots = numeric_roots(&quot)?;
            let anchor = match guess {
                Some(g) => g.clone() * g.clone(),
                None => p.clone() * p.clone(),
            };
            let dist = |u: &C| (u.clone() - anchor.clone()).abs_l1().re();
            let u = roots
                .into_iter()
                .min_by(|x, y| dist(x).partial_cmp(&dist(y)).unwrap_or(std::cmp::Ordering::Equal))
                .ok_or_else(|| Error::RootFindFailure("no partner roots".into()))?;
            let q = u.sqrt_opt().ok_or_else(|| Error::RootFindFailure("square root of partner".into()))?;
            let q = match guess {
                Some(g) if (g.clone() + q.clone()).abs_l1().re() < (g.clone() - q.clone()).abs_l1().re() => -q,
                _ => q,
            };
            let resid = spec.red_poly(&q) - target.clone();
            if !resid.negligible(&(target.abs_l1() + C::one())) || !distinct_partner(p, &q) {
                return Err(Error::RootFindFailure(format!("partner of {p:?} did not converge")));
            }
            Ok(q)
        }
    }
}

/// `q' = sqrt(P(p'))`, principal branch.
pub fn c_partner<C: ComplexField>(spec: &GridSpec<C>, p_prime: &C, mode: ReductionMode) -> Result<C> {
    let v = spec.red_poly(p_prime);
    v.sqrt_opt().ok_or_else(|| match mode {
        ReductionMode::Exact => Error::NoRationalPartner(format!("P({p_prime:?}) is not a square")),
        ReductionMode::Numeric => Error::RootFindFailure(format!("square root of P({p_prime:?})")),
    })
}

/// Roots available through radicals of degree at most two.
fn exact_roots<C: ComplexField>(f: &Poly<C>) -> Vec<C> {
    match f.degree() {
        Some(1) => vec![-(f.coeff(0) / f.coeff(1))],
        Some(2) => {
            let (a, b, c) = (f.coeff(2), f.coeff(1), f.coeff(0));
            let disc = b.clone() * b.clone() - C::from_i64(4) * a.clone() * c;
            match disc.sqrt_opt() {
                Some(s) => {
                    let two_a = C::from_i64(2) * a;
                    vec![(-b.clone() + s.clone()) / two_a.clone(), (-b - s) / two_a]
                }
                None => vec![],
            }
        }
        _ => vec![],
    }
}

/// All roots by simultaneous Weierstrass iteration, then Newton polishing.
fn numeric_roots<C: ComplexField>(f: &Poly<C>) -> Result<Vec<C>> {
    let d = f.degree().ok_or_else(|| Error::RootFindFailure("zero polynomial".into()))?;
    if d == 0 {
        return Ok(vec![]);
    }
    let lead = f.coeff(d);
    let monic = f.scale(&(C::one() / lead));
    let radius = (0..d).fold(C::one(), |acc, k| {
        let c = monic.coeff(k).abs_l1();
        if c.re() > acc.re() {
            c
        } else {
            acc
        }
    }) + C::one();
    let seed = C::from_parts(C::Real::from_rat(&crate::numerics::rat(2, 5)), C::Real::from_rat(&crate::numerics::rat(9, 10)));
    let mut z: Vec<C> = (0..d).map(|k| radius.clone() * seed.powi(k as i32 + 1)).collect();
    let mut converged = false;
    for _ in 0..2000 {
        let mut moved = false;
        for k in 0..d {
            let mut den = C::one();
            for (j, zj) in z.iter().enumerate() {
                if j != k {
                    den = den * (z[k].clone() - zj.clone());
                }
            }
            if den.is_zero() {
                return Err(Error::RootFindFailure("coincident iterates".into()));
            }
            let step = monic.eval(&z[k]) / den;
            if !step.negligible(&radius) {
                moved = true;
            }
            z[k] = z[k].clone() - step;
        }
        if !moved {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::RootFindFailure("simultaneous iteration did not settle".into()));
    }
    let deriv = Poly::new((1..=d).map(|k| monic.coeff(k) * C::from_i64(k as i64)).collect());
    for r in z.iter_mut() {
        for _ in 0..8 {
            let dv = deriv.eval(r);
            if dv.is_zero() {
                break;
            }
            *r = r.clone() - monic.eval(r) / dv;
        }
    }
    Ok(z)
}

/// Couplings of the auxiliary element `h'`: `b'_j = -q A(q) / (p A(-p)) b_j`,
/// `c'_j = -p' A(p') / q' c_j`. When `q'_j = 0` together with `A(p'_j) = 0`
/// the coupling is the limit value `0`.
pub fn h_parameters<C: Field>(g: &FermionParams<C>, spec: &GridSpec<C>) -> Result<FermionParams<C>> {
    g.check_shape()?;
    let mut out = g.clone();
    for j in 1..=g.n_b() {
        let (p, q) = g.pair(j);
        let den = p.clone() * spec.a_poly(&-p.clone());
        if den.is_zero() {
            return Err(Error::PoleInA(format!("p A(-p) at p = {p:?}")));
        }
        let f = -(q.clone() * spec.a_poly(&q)) / den;
        out.b[j - 1] = f.clone() * g.b[j - 1].clone();
        out.b_hat[j - 1] = f * g.b_hat[j - 1].clone();
    }
    for j in 1..=g.n_c() {
        let (pp, qq) = g.cpair(j);
        let num = pp.clone() * spec.a_poly(&pp);
        let f = if qq.is_zero() {
            if !num.is_zero() {
                return Err(Error::PoleInA(format!("q' = 0 at p' = {pp:?}")));
            }
            C::zero()
        } else {
            -num / qq
        };
        out.c[j - 1] = f.clone() * g.c[j - 1].clone();
        out.c_hat[j - 1] = f * g.c_hat[j - 1].clone();
    }
    Ok(out)
}

/// `F_{l1,l2;l}(x + z_{n-1}, y; omega(g)) = F_{l1,l2;l}(x, y; h)`, the left side
/// evaluated with raised charges.
pub fn reduction_identity<C: Field>(
    (l1, l2, l): (i32, i32, i32),
    x: &TimeArray<C>,
    spec: &GridSpec<C>,
    g: &FermionParams<C>,
) -> Result<IdentityCheck<C>> {
    let h = h_parameters(g, spec)?;
    let shifted = x + &z_shift(&spec.a, spec.n - 1);
    let lhs = eval_F(l1 + 1, l2 + 1, l, &shifted, &spec.y, g)?;
    let rhs = eval_F(l1, l2, l, x, &spec.y, &h)?;
    Ok(IdentityCheck::new("reduction", vec![lhs, -rhs]))
}

/// Parameters for the reduced families: `A2` sends `(p'_1, q'_1)` to `(a_m, 0)`
/// (requires exactly one `c`); `C1` switches every `c` off.
pub fn specialize_family<C: Field>(
    target: Family,
    g: &FermionParams<C>,
    spec: &GridSpec<C>,
    m: Option<usize>,
) -> Result<FermionParams<C>> {
    g.check_shape()?;
    let mut out = g.clone();
    match target {
        Family::A2 => {
            if g.n_c() != 1 {
                return Err(Error::BadShape(format!("A2 limit needs exactly one c coupling, got {}", g.n_c())));
            }
            let m = m.ok_or_else(|| Error::LimitUndefined("A2 limit needs an index m".into()))?;
            if !(2..spec.n).contains(&m) {
                return Err(Error::LimitUndefined(format!("m = {m} outside 2..={}", spec.n - 1)));
            }
            let k = g.tilde(1) - 1;
            out.p[k] = spec.a[m - 2].clone();
            out.q[0] = C::zero();
        }
        Family::C1 => {
            out.c.iter_mut().chain(out.c_hat.iter_mut()).for_each(|c| *c = C::zero());
        }
        other => {
            return Err(Error::WrongFamily { expected: "A2 or C1".into(), found: other.name().into() });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{rat, BigC, GaussRat};

    fn g(n: i64, d: i64) -> GaussRat {
        GaussRat::new(rat(n, d), rat(0, 1))
    }

    fn rank3() -> GridSpec<GaussRat> {
        GridSpec::new(3, g(7, 1), g(2, 1), vec![g(5, 1)]).unwrap()
    }

    #[test]
    fn rank_three_rational_family() {
        let s = rank3();
        assert_eq!(s.red_poly(&g(3, 1)), g(144, 25));
        assert_eq!(b_partner(&s, &g(3, 1), None, ReductionMode::Exact).unwrap(), g(4, 1));
        assert_eq!(c_partner(&s, &g(3, 1), ReductionMode::Exact).unwrap(), g(12, 5));
        assert_eq!(c_partner(&s, &g(60, 13), ReductionMode::Exact).unwrap(), g(300, 169));
        assert!(matches!(c_partner(&s, &g(1, 1), ReductionMode::Exact), Err(Error::NoRationalPartner(_))));
        assert!(matches!(b_partner(&s, &g(3, 1), Some(&g(2, 1)), ReductionMode::Exact), Err(Error::NoRationalPartner(_))));
    }

    #[test]
    fn h_couplings_of_rank_three_family() {
        let s = rank3();
        let input = ReductionInput { b: vec![g(1, 2)], p: vec![g(3, 1)], q_guess: vec![None], c: vec![], p_prime: vec![] };
        let params = solve_reduction(&s, &input, ReductionMode::Exact).unwrap();
        assert!(reduction_residuals(&s, &params).iter().all(|r| *r == g(0, 1)));
        let h = h_parameters(&params, &s).unwrap();
        assert_eq!(h.b[0], g(-1, 12));
        let vac = FermionParams::vacuum();
        assert_eq!(h_parameters(&vac, &s).unwrap(), vac);
    }

    #[test]
    fn reduction_identity_holds_exactly() {
        let s = rank3();
        let input =
            ReductionInput { b: vec![g(1, 2)], p: vec![g(3, 1)], q_guess: vec![None], c: vec![g(2, 3)], p_prime: vec![g(3, 1)] };
        let params = solve_reduction(&s, &input, ReductionMode::Exact).unwrap();
        let x = TimeArray::eps(g(1, 7)) - TimeArray::eps(g(-1, 7));
        for ls in [(0, 0, 0), (1, 1, 0), (0, 1, 1), (-1, 1, 1), (1, 0, -1), (0, 2, 1)] {
            assert!(reduction_identity(ls, &x, &s, &params).unwrap().holds(), "{ls:?}");
        }
    }

    #[test]
    fn numeric_partners_rank_four() {
        let s = GridSpec::new(4, g(9, 1), g(2, 1), vec![g(5, 1), g(3, 1)]).unwrap().map(|v| BigC::from_rat(&v.re));
        let input = ReductionInput {
            b: vec![BigC::from_rat(&rat(1, 3))],
            p: vec![BigC::from_rat(&rat(1, 2))],
            q_guess: vec![None],
            c: vec![BigC::from_rat(&rat(1, 4))],
            p_prime: vec![BigC::from_rat(&rat(7, 4))],
        };
        let params = solve_reduction(&s, &input, ReductionMode::Numeric).unwrap();
        for r in reduction_residuals(&s, &params) {
            assert!(r.abs_l1().re().approx_f64() < 1e-60);
        }
        let x = TimeArray::eps(BigC::from_rat(&rat(1, 7))) - TimeArray::eps(BigC::from_rat(&rat(-1, 7)));
        let chk = reduction_identity((0, 1, 1), &x, &s, &params).unwrap();
        assert!(chk.relative() < 1e-60);
    }

    #[test]
    fn specializations() {
        let s = GridSpec::new(4, g(9, 1), g(2, 1), vec![g(5, 1), g(3, 1)]).unwrap();
        let params = FermionParams::from_pairs(vec![g(1, 2)], &[(g(1, 3), g(2, 5))], vec![g(2, 3)], &[(g(1, 4), g(3, 7))]).unwrap();
        let a2 = specialize_family(Family::A2, &params, &s, Some(3)).unwrap();
        assert_eq!(a2.cpair(1), (g(3, 1), g(0, 1)));
        assert_eq!(h_parameters(&a2, &s).unwrap().c[0], g(0, 1));
        assert!(matches!(specialize_family(Family::A2, &params, &s, Some(4)), Err(Error::LimitUndefined(_))));
        let c1 = specialize_family(Family::C1, &params, &s, None).unwrap();
        assert!(c1.c.iter().all(|c| *c == g(0, 1)));
        assert!(matches!(specialize_family(Family::D1, &params, &s, None), Err(Error::WrongFamily { .. })));
    }
}
