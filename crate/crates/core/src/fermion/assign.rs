use super::grid::GridSpec;
use super::params::FermionParams;
use super::reduction::{h_parameters, satisfies_reduction};
use super::tau::{eval_f, eval_F};
use super::time::{Domain, VertexTimes};
use crate::bilinear::{EquationId, TauData};
use crate::error::{Error, Result};
use crate::numerics::{relative_residual, ComplexField, Field};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    FiniteN,
    InfiniteN,
}

struct Evaluator<'a, C> {
    spec: &'a GridSpec<C>,
    g: &'a FermionParams<C>,
    times: VertexTimes<C>,
}

impl<'a, C: ComplexField> Evaluator<'a, C> {
    fn new(spec: &'a GridSpec<C>, g: &'a FermionParams<C>) -> Result<Self> {
        spec.validate()?;
        g.check_shape()?;
        let times = VertexTimes::new(&spec.eta, &spec.big_k, &spec.big_l);
        Ok(Evaluator { spec, g, times })
    }

    fn f11(&self, d: Domain, i: usize) -> Result<C> {
        eval_F(1, 1, 0, &self.times.shifted(d, &self.spec.a, i), &self.spec.y, self.g)
    }

    fn x_row(&self, d: Domain) -> Result<Vec<C>> {
        (1..=self.spec.n - 2).map(|i| self.f11(d, i)).collect()
    }

    /// `f_j(x^J; g)` at `j = 0, 1`.
    fn head(&self, d: Domain, j: usize) -> Result<C> {
        eval_f(j as u8, self.times.get(d), &self.spec.y, self.g)
    }

    /// `(F_{0,1} + (-1)^j i F_{0,1;1})(x^0)`.
    fn head0(&self, j: usize) -> Result<C> {
        let x = self.times.get(Domain::C0);
        let y = &self.spec.y;
        let sign = if j % 2 == 0 { C::one() } else { -C::one() };
        Ok(eval_F(0, 1, 0, x, y, self.g)? + sign * C::i() * eval_F(0, 1, 1, x, y, self.g)?)
    }
}

/// The tau functions attached to one vertex by the fermionic construction.
///
/// Corner functions are `f_0`, `f_1` of `g'` next to index 0, `f_1`, `f_0` of
/// `h'` next to index `n`, and `F_{1,1}` in between, each evaluated at its
/// shifted time; `tau^0` uses the mixed combinations of `F` at both ends.
/// Requires the reduction condition.
pub fn assign_finite<C: ComplexField>(spec: &GridSpec<C>, g: &FermionParams<C>) -> Result<TauData<C>> {
    let ev = Evaluator::new(spec, g)?;
    if !satisfies_reduction(spec, g) {
        return Err(Error::ReductionViolated);
    }
    let n = spec.n;
    let h = h_parameters(g, spec)?;
    let y = &spec.y;
    let mut tau = vec![Vec::with_capacity(n + 1); 5];
    for (jj, row) in tau.iter_mut().enumerate().skip(1) {
        let d = Domain::corner(jj);
        for i in 0..=n {
            row.push(match i {
                0 | 1 => ev.head(d, i)?,
                _ if i + 2 <= n => ev.f11(d, i)?,
                _ => eval_f((n - i) as u8, ev.times.get(d), y, &h)?,
            });
        }
    }
    let x0 = ev.times.shifted(Domain::C0, &spec.a, n - 2);
    let tail_f = eval_F(1, 1, 0, &x0, y, g)?;
    let tail_g = eval_F(0, 2, 1, &x0, y, g)?;
    let coef = C::i() * spec.a[n - 3].clone() / (spec.big_k.clone() * spec.big_l.clone());
    for i in 0..=n {
        let v = match i {
            0 | 1 => ev.head0(i)?,
            _ if i + 2 <= n => ev.f11(Domain::C0, i - 1)?,
            _ => {
                let sign = if (n - i) % 2 == 0 { C::one() } else { -C::one() };
                tail_f.clone() + sign * coef.clone() * tail_g.clone()
            }
        };
        tau[0].push(v);
    }
    Ok(TauData {
        n,
        lambda: spec.lambda()?,
        kappa: spec.kappa()?,
        s: ev.x_row(Domain::S)?,
        w: ev.x_row(Domain::W)?,
        north: ev.x_row(Domain::N)?,
        east: ev.x_row(Domain::E)?,
        tau,
        alpha: spec.big_k.clone() - spec.big_l.clone(),
        beta: spec.big_k.clone() + spec.big_l.clone(),
    })
}

/// Residual scan of the rank-independent equations `<J,i>`, `0 <= i <= n-2`,
/// for the unreduced assignment.
#[derive(Clone, Debug)]
pub struct InfiniteScan<C> {
    /// Data with `tau_{n-1}`, `tau_n` left at one; only `i <= n-2` is meaningful.
    pub data: TauData<C>,
    pub residuals: Vec<(EquationId, f64)>,
    pub failing: Vec<EquationId>,
}

impl<C> InfiniteScan<C> {
    pub fn passed(&self) -> bool {
        self.failing.is_empty()
    }
}

pub fn scan_infinite<C: ComplexField>(spec: &GridSpec<C>, g: &FermionParams<C>) -> Result<InfiniteScan<C>> {
    let ev = Evaluator::new(spec, g)?;
    let n = spec.n;
    let mut tau = vec![Vec::with_capacity(n + 1); 5];
    for (jj, row) in tau.iter_mut().enumerate() {
        let d = Domain::corner(jj);
        for i in 0..=n {
            row.push(match (jj, i) {
                (0, 0 | 1) => ev.head0(i)?,
                (0, _) if i + 2 <= n => ev.f11(d, i - 1)?,
                (_, 0 | 1) => ev.head(d, i)?,
                _ if i + 2 <= n => ev.f11(d, i)?,
                _ => C::one(),
            });
        }
    }
    let data = TauData {
        n,
        lambda: spec.lambda()?,
        kappa: spec.kappa()?,
        s: ev.x_row(Domain::S)?,
        w: ev.x_row(Domain::W)?,
        north: ev.x_row(Domain::N)?,
        east: ev.x_row(Domain::E)?,
        tau,
        alpha: spec.big_k.clone() - spec.big_l.clone(),
        beta: spec.big_k.clone() + spec.big_l.clone(),
    };
    let mut residuals = Vec::new();
    let mut failing = Vec::new();
    for j in 1..=4 {
        for i in 0..=n - 2 {
            let id = EquationId { j, i };
            let terms = data.equation_terms(id)?;
            let sum = terms.iter().fold(C::zero(), |a, t| a + t.clone());
            let scale = terms.iter().fold(C::zero(), |a, t| a + t.abs_l1());
            if !sum.negligible(&scale) {
                failing.push(id);
            }
            residuals.push((id, relative_residual(&terms)));
        }
    }
    Ok(InfiniteScan { data, residuals, failing })
}

/// Largest `|Im|` over all assigned values, relative to the largest `|Re|`.
pub fn max_imaginary<C: ComplexField>(d: &TauData<C>) -> f64 {
    let vals = all_values(d);
    let re = vals.iter().map(|v| v.re().approx_f64().abs()).fold(0.0, f64::max);
    let im = vals.iter().map(|v| v.im().approx_f64().abs()).fold(0.0, f64::max);
    if re == 0.0 {
        im
    } else {
        im / re
    }
}

fn all_values<C: Clone>(d: &TauData<C>) -> Vec<C> {
    let mut out: Vec<C> = d.tau.iter().flatten().cloned().collect();
    out.extend([&d.s, &d.w, &d.north, &d.east].into_iter().flatten().cloned());
    out
}

/// The same data over the real subfield; every imaginary part must be
/// negligible against its value.
pub fn real_data<C: ComplexField>(d: &TauData<C>) -> Result<TauData<C::Real>> {
    let re = |v: &C| -> Result<C::Real> {
        let im = C::from_real(v.im());
        if !im.negligible(&v.abs_l1()) {
            return Err(Error::ComplexValue(format!("{v:?}")));
        }
        Ok(v.re())
    };
    let row = |v: &[C]| v.iter().map(re).collect::<Result<Vec<_>>>();
    Ok(TauData {
        n: d.n,
        lambda: d.lambda.map(|v| v.re())?,
        kappa: d.kappa.map(|v| v.re())?,
        s: row(&d.s)?,
        w: row(&d.w)?,
        north: row(&d.north)?,
        east: row(&d.east)?,
        tau: d.tau.iter().map(|r| row(r)).collect::<Result<_>>()?,
        alpha: re(&d.alpha)?,
        beta: re(&d.beta)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bilinear::verify_bilinearization;
    use crate::fermion::reduction::{solve_reduction, specialize_family, ReductionInput, ReductionMode};
    use crate::fermion::TimeArray;
    use crate::numerics::{rat, GaussRat, Rat};
    use crate::crystal::Family;

    fn g(n: i64, d: i64) -> GaussRat {
        GaussRat::new(rat(n, d), rat(0, 1))
    }

    fn rank3() -> GridSpec<GaussRat> {
        GridSpec::new(3, g(7, 1), g(2, 1), vec![g(5, 1)]).unwrap()
    }

    #[test]
    fn vacuum_gives_unit_data() {
        let s = rank3();
        let d = assign_finite(&s, &FermionParams::vacuum()).unwrap();
        assert!(d.tau.iter().flatten().all(|v| *v == g(1, 1)));
        assert!(d.is_solution().unwrap());
    }

    #[test]
    fn rank_three_exact_family() {
        let s = rank3();
        let input = ReductionInput { b: vec![g(1, 2)], p: vec![g(3, 1)], q_guess: vec![None], c: vec![], p_prime: vec![] };
        let params = solve_reduction(&s, &input, ReductionMode::Exact).unwrap();
        let d = assign_finite(&s, &params).unwrap();
        assert!(d.residuals().unwrap().iter().all(|(_, r)| *r == g(0, 1)));
        let real: TauData<Rat> = real_data(&d).unwrap();
        assert!(real.is_solution().unwrap());
        assert!(verify_bilinearization(&real).unwrap().passed());
        assert!(d.tau.iter().flatten().any(|v| *v != g(1, 1)));
    }

    #[test]
    fn rank_three_with_neutral_coupling() {
        let eta = TimeArray::eps(g(1, 9)) - TimeArray::eps(g(-1, 9));
        let s = rank3().with_times(eta, TimeArray::zero()).unwrap();
        let input =
            ReductionInput { b: vec![g(1, 2)], p: vec![g(3, 1)], q_guess: vec![None], c: vec![g(2, 3)], p_prime: vec![g(3, 1)] };
        let params = solve_reduction(&s, &input, ReductionMode::Exact).unwrap();
        let d = assign_finite(&s, &params).unwrap();
        assert_eq!(d.failing_equations().unwrap(), vec![]);
        assert!(max_imaginary(&d) > 0.0);

        let imaginary_c = params.with_couplings(params.b.clone(), vec![GaussRat::new(rat(0, 1), rat(2, 3))]).unwrap();
        let d = assign_finite(&s, &imaginary_c).unwrap();
        assert_eq!(d.failing_equations().unwrap(), vec![]);
        assert_eq!(max_imaginary(&d), 0.0);
        let real = real_data(&d).unwrap();
        assert!(verify_bilinearization(&real).unwrap().passed());
    }

    #[test]
    fn specializations_meet_constraints() {
        let s = GridSpec::new(4, g(9, 1), g(2, 1), vec![g(5, 1), g(3, 1)]).unwrap();
        let params = FermionParams::from_pairs(vec![], &[], vec![g(2, 3)], &[(g(1, 1), g(0, 1))]).unwrap();
        let a2 = specialize_family(Family::A2, &params, &s, Some(3)).unwrap();
        let d = assign_finite(&s, &a2).unwrap();
        assert!(d.is_solution().unwrap());
        assert!(crate::bilinear::paired_residuals_equal(Family::A2, &d).unwrap());
        for j in 0..5 {
            assert_eq!(d.tau[j][3], d.tau[j][4], "row {j}");
        }
    }

    #[test]
    fn specializations_with_solitons() {
        let s = GridSpec::new(4, g(9, 1), g(7, 1), vec![g(4, 1), g(5, 1)]).unwrap();
        assert_eq!(crate::fermion::b_partner(&s, &g(2, 1), None, ReductionMode::Exact).unwrap(), g(3, 1));
        let ic = GaussRat::new(rat(0, 1), rat(1, 4));
        let params = FermionParams::from_pairs(vec![g(1, 2)], &[(g(2, 1), g(3, 1))], vec![ic], &[(g(1, 1), g(1, 1))]).unwrap();
        let a2 = specialize_family(Family::A2, &params, &s, Some(2)).unwrap();
        let d = assign_finite(&s, &a2).unwrap();
        assert!(d.is_solution().unwrap());
        assert!(crate::bilinear::paired_residuals_equal(Family::A2, &d).unwrap());
        assert_eq!(max_imaginary(&d), 0.0);

        let c1 = specialize_family(Family::C1, &params, &s, None).unwrap();
        let d = assign_finite(&s, &c1).unwrap();
        assert!(d.is_solution().unwrap());
        assert!(crate::bilinear::paired_residuals_equal(Family::C1, &d).unwrap());
        for j in 0..5 {
            assert_eq!(d.tau[j][0], d.tau[j][1]);
            assert_eq!(d.tau[j][3], d.tau[j][4]);
        }
    }

    #[test]
    fn numeric_rank_four_family() {
        use crate::numerics::BigC;
        let big = |n: i64, d: i64| BigC::from_rat(&rat(n, d));
        let ibig = |n: i64, d: i64| BigC::new(Field::from_i64(0), Field::from_rat(&rat(n, d)));
        let eta = TimeArray::eps(big(1, 11)) - TimeArray::eps(big(-1, 11));
        let s = GridSpec::new(4, big(19, 2), big(3, 1), vec![big(5, 1), big(7, 2)]).unwrap().with_times(eta, TimeArray::zero()).unwrap();
        let input = ReductionInput {
            b: vec![big(1, 3)],
            p: vec![big(6, 5)],
            q_guess: vec![None],
            c: vec![ibig(1, 5)],
            p_prime: vec![big(2, 3)],
        };
        let params = solve_reduction(&s, &input, ReductionMode::Numeric).unwrap();
        let d = assign_finite(&s, &params).unwrap();
        assert!(d.max_relative_residual().unwrap() < 1e-25);
        assert!(max_imaginary(&d) < 1e-25);
        let real = real_data(&d).unwrap();
        assert!(verify_bilinearization(&real).unwrap().passed());
    }

    #[test]
    fn infinite_scan_without_reduction() {
        let s = GridSpec::new(5, g(9, 1), g(2, 1), vec![g(5, 1), g(3, 1), g(11, 2)]).unwrap();
        let params =
            FermionParams::from_pairs(vec![g(1, 3)], &[(g(1, 2), g(4, 5))], vec![g(2, 7)], &[(g(3, 4), g(1, 6))]).unwrap();
        let scan = scan_infinite(&s, &params).unwrap();
        assert!(scan.passed(), "{:?}", scan.failing);
        assert_eq!(scan.residuals.len(), 16);
        assert_eq!(assign_finite(&s, &params).unwrap_err(), Error::ReductionViolated);
    }
}
