//! The D-family bilinear equations on tau functions, their unique solution,
//! the tau parameterization of crystal elements and the reductions.

mod constrain;
mod element;
mod hirota;
mod solve;
mod uv;

pub use constrain::{constrain_family, paired_residuals_equal, ConstraintReport};
pub use element::{build_element, extract_quadruple, parameterize_element, FixedSide, Parameterized, Quadruple};
pub use hirota::{a_quadruple, hirota_a, solve_hirota_a, HirotaData};
pub use solve::{body_matrix, det_body_closed_form, solve_unique, BodySystem, SolveInput};
pub use uv::{ratio_identities, uv_from_tau, verify_bilinearization, BilinearizationReport};

use crate::crystal::{level, sigma_pair, CrystalElement, Sigma};
use crate::error::{Error, Result};
use crate::numerics::{relative_residual, Field, ScalarText};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// All tau functions of one vertex together with the parameters `lambda`, `kappa`, `alpha`, `beta`.
#[derive(Clone, Debug, PartialEq)]
pub struct TauData<F> {
    pub n: usize,
    pub lambda: CrystalElement<F>,
    pub kappa: CrystalElement<F>,
    /// `S_1..S_{n-2}` stored from index 0; likewise `w`, `north`, `east`.
    pub s: Vec<F>,
    pub w: Vec<F>,
    pub north: Vec<F>,
    pub east: Vec<F>,
    /// `tau[J][i]` for `J in 0..5`, `i in 0..=n`.
    pub tau: Vec<Vec<F>>,
    pub alpha: F,
    pub beta: F,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EquationId {
    pub j: usize,
    pub i: usize,
}

impl<F: Field> TauData<F> {
    pub fn t(&self, j: usize, i: usize) -> F {
        self.tau[j][i].clone()
    }
    pub fn s_(&self, i: usize) -> F {
        self.s[i - 1].clone()
    }
    pub fn w_(&self, i: usize) -> F {
        self.w[i - 1].clone()
    }
    pub fn n_(&self, i: usize) -> F {
        self.north[i - 1].clone()
    }
    pub fn e_(&self, i: usize) -> F {
        self.east[i - 1].clone()
    }
    fn la(&self, i: usize) -> F {
        self.lambda.x(i).clone()
    }
    fn lb(&self, i: usize) -> F {
        self.lambda.xbar(i).clone()
    }
    fn ka(&self, i: usize) -> F {
        self.kappa.x(i).clone()
    }
    fn kb(&self, i: usize) -> F {
        self.kappa.xbar(i).clone()
    }

    pub fn l(&self) -> F {
        level(&self.lambda).expect("D-family lambda")
    }

    pub fn k(&self) -> F {
        level(&self.kappa).expect("D-family kappa")
    }

    pub fn check_shape(&self) -> Result<()> {
        let n = self.n;
        let bad = |m: &str| Err(Error::BadShape(m.to_string()));
        if n < 3 || self.lambda.rank() != n || self.kappa.rank() != n {
            return bad("rank of lambda/kappa");
        }
        if [&self.s, &self.w, &self.north, &self.east].iter().any(|v| v.len() != n - 2) {
            return bad("S, W, N, E need n-2 entries");
        }
        if self.tau.len() != 5 || self.tau.iter().any(|v| v.len() != n + 1) {
            return bad("tau needs 5 rows of n+1 entries");
        }
        Ok(())
    }

    /// Whether every tau function is nonzero.
    pub fn is_generic(&self) -> bool {
        let nz = |v: &Vec<F>| v.iter().all(|a| !a.is_zero());
        [&self.s, &self.w, &self.north, &self.east].into_iter().all(nz) && self.tau.iter().all(nz)
    }

    /// The signed terms of `<J,i>` written as `lhs - rhs`.
    pub fn equation_terms(&self, id: EquationId) -> Result<Vec<F>> {
        let n = self.n;
        let EquationId { j, i } = id;
        if !(1..=4).contains(&j) || i > n {
            return Err(Error::IndexOutOfRange { index: if i > n { i } else { j }, max: if i > n { n } else { 4 } });
        }
        let (a, b) = (self.alpha.clone(), self.beta.clone());
        let t = |jj: usize, ii: usize| self.t(jj, ii);
        let (la, lb, ka, kb) = (|k| self.la(k), |k| self.lb(k), |k| self.ka(k), |k| self.kb(k));
        let (s, w, nn, e) = (|k| self.s_(k), |k| self.w_(k), |k| self.n_(k), |k| self.e_(k));
        let m = n - 2;
        let terms: [F; 3] = match (j, i) {
            (1, 0) => [kb(1) * nn(1) * t(4, 1), -(lb(1) * e(1) * t(2, 1)), -(a * t(0, 0) * t(1, 0))],
            (1, 1) => [ka(1) * nn(1) * t(4, 0), -(la(1) * e(1) * t(2, 0)), -(a * t(0, 1) * t(1, 1))],
            (1, i) if i == n - 1 => [
                ka(n - 1) * ka(n) * e(m) * t(2, n),
                -(la(n - 1) * la(n) * nn(m) * t(4, n)),
                -(a * t(0, n - 1) * t(1, n)),
            ],
            (1, i) if i == n => {
                [ka(n - 1) * e(m) * t(2, n - 1), -(la(n - 1) * nn(m) * t(4, n - 1)), -(a * t(0, n) * t(1, n - 1))]
            }
            (1, i) => [ka(i) * e(i - 1) * nn(i), -(la(i) * nn(i - 1) * e(i)), -(a * t(0, i) * t(1, i))],
            (2, 0) => [ka(1) * nn(1) * t(3, 1), lb(1) * w(1) * t(1, 1), -(b * t(0, 0) * t(2, 0))],
            (2, 1) => [kb(1) * nn(1) * t(3, 0), la(1) * w(1) * t(1, 0), -(b * t(0, 1) * t(2, 1))],
            (2, i) if i == n - 1 => [
                ka(n) * kb(n - 1) * w(m) * t(1, n - 1),
                la(n - 1) * nn(m) * t(3, n - 1),
                -(b * t(0, n - 1) * t(2, n - 1)),
            ],
            (2, i) if i == n => {
                [kb(n - 1) * w(m) * t(1, n), la(n - 1) * la(n) * nn(m) * t(3, n), -(b * t(0, n) * t(2, n))]
            }
            (2, i) => [kb(i) * w(i - 1) * nn(i), la(i) * nn(i - 1) * w(i), -(b * t(0, i) * t(2, i))],
            (3, 0) => [ka(1) * s(1) * t(2, 1), -(la(1) * w(1) * t(4, 1)), -(a * t(0, 0) * t(3, 0))],
            (3, 1) => [kb(1) * s(1) * t(2, 0), -(lb(1) * w(1) * t(4, 0)), -(a * t(0, 1) * t(3, 1))],
            (3, i) if i == n - 1 => {
                [kb(n - 1) * w(m) * t(4, n), -(lb(n - 1) * s(m) * t(2, n)), -(a * t(0, n - 1) * t(3, n))]
            }
            (3, i) if i == n => [
                ka(n) * kb(n - 1) * w(m) * t(4, n - 1),
                -(la(n) * lb(n - 1) * s(m) * t(2, n - 1)),
                -(a * t(0, n) * t(3, n - 1)),
            ],
            (3, i) => [kb(i) * w(i - 1) * s(i), -(lb(i) * s(i - 1) * w(i)), -(a * t(0, i) * t(3, i))],
            (4, 0) => [kb(1) * s(1) * t(1, 1), la(1) * e(1) * t(3, 1), -(b * t(0, 0) * t(4, 0))],
            (4, 1) => [ka(1) * s(1) * t(1, 0), lb(1) * e(1) * t(3, 0), -(b * t(0, 1) * t(4, 1))],
            (4, i) if i == n - 1 => [
                ka(n - 1) * e(m) * t(3, n - 1),
                la(n) * lb(n - 1) * s(m) * t(1, n - 1),
                -(b * t(0, n - 1) * t(4, n - 1)),
            ],
            (4, i) if i == n => {
                [ka(n - 1) * ka(n) * e(m) * t(3, n), lb(n - 1) * s(m) * t(1, n), -(b * t(0, n) * t(4, n))]
            }
            (4, i) => [ka(i) * e(i - 1) * s(i), lb(i) * s(i - 1) * e(i), -(b * t(0, i) * t(4, i))],
            _ => unreachable!(),
        };
        Ok(terms.to_vec())
    }

    /// `lhs - rhs` of `<J,i>`.
    pub fn eval_equation(&self, id: EquationId) -> Result<F> {
        Ok(self.equation_terms(id)?.into_iter().fold(F::zero(), |a, t| a + t))
    }

    pub fn all_ids(&self) -> Vec<EquationId> {
        (1..=4).flat_map(|j| (0..=self.n).map(move |i| EquationId { j, i })).collect()
    }

    /// Residuals of all `4(n+1)` equations.
    pub fn residuals(&self) -> Result<Vec<(EquationId, F)>> {
        self.all_ids().into_iter().map(|id| Ok((id, self.eval_equation(id)?))).collect()
    }

    /// Largest residual relative to the largest term of its equation.
    pub fn max_relative_residual(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for id in self.all_ids() {
            worst = worst.max(relative_residual(&self.equation_terms(id)?));
        }
        Ok(worst)
    }

    /// Equations whose residual is not negligible against their largest term.
    pub fn failing_equations(&self) -> Result<Vec<EquationId>> {
        let mut out = Vec::new();
        for id in self.all_ids() {
            if !terms_vanish(&self.equation_terms(id)?) {
                out.push(id);
            }
        }
        Ok(out)
    }

    pub fn is_solution(&self) -> Result<bool> {
        Ok(self.failing_equations()?.is_empty())
    }

    /// The two combinations that vanish on every solution of the body equations.
    pub fn null_combinations(&self) -> [Vec<F>; 2] {
        let n = self.n;
        let (a, b) = (self.alpha.clone(), self.beta.clone());
        let t = |j: usize, i: usize| self.t(j, i);
        let (l1, lb1, k1, kb1) = (self.la(1), self.lb(1), self.ka(1), self.kb(1));
        let (ln, kn) = (self.la(n), self.ka(n));
        [
            vec![
                a.clone() * lb1.clone() * kb1.clone() * t(3, 0) * t(1, 1),
                b.clone() * l1.clone() * kb1 * t(2, 0) * t(4, 1),
                -(a.clone() * l1 * k1.clone() * t(1, 0) * t(3, 1)),
                -(b.clone() * lb1 * k1 * t(4, 0) * t(2, 1)),
            ],
            vec![
                a.clone() * t(3, n - 1) * t(1, n),
                b.clone() * ln.clone() * t(4, n) * t(2, n - 1),
                -(a * ln * kn.clone() * t(1, n - 1) * t(3, n)),
                -(b * kn * t(2, n) * t(4, n - 1)),
            ],
        ]
    }
}

/// Whether a sum of terms vanishes at the working accuracy.
pub(crate) fn terms_vanish<F: Field>(terms: &[F]) -> bool {
    let total = terms.iter().cloned().fold(F::zero(), |a, t| a + t);
    let mut scale = F::zero();
    let mut best = 0.0f64;
    for t in terms {
        let m = t.abs_l1();
        let v = m.approx_f64().abs();
        if v >= best {
            best = v;
            scale = m;
        }
    }
    total.negligible(&scale)
}

/// Involutions on data: index swaps on the taus together with the action on `(lambda, kappa)`.
/// `sigma_star` also reverses the sign of `alpha`.
pub fn apply_sigma_data<F: Field>(a: Sigma, d: &TauData<F>) -> Result<TauData<F>> {
    let n = d.n;
    let (lambda, kappa) = sigma_pair(a, &d.lambda, &d.kappa)?;
    let mut out = TauData { lambda, kappa, ..d.clone() };
    match a {
        Sigma::One => out.tau.iter_mut().for_each(|row| row.swap(0, 1)),
        Sigma::N => out.tau.iter_mut().for_each(|row| row.swap(n - 1, n)),
        Sigma::Star => {
            for j in [0, 2, 4] {
                out.tau[j].swap(n - 1, n);
            }
            for i in 0..=n - 2 {
                out.tau[1][i] = d.t(3, i);
                out.tau[3][i] = d.t(1, i);
            }
            out.tau[1][n - 1] = d.t(3, n);
            out.tau[3][n] = d.t(1, n - 1);
            out.tau[1][n] = d.t(3, n - 1);
            out.tau[3][n - 1] = d.t(1, n);
            std::mem::swap(&mut out.w, &mut out.north);
            std::mem::swap(&mut out.s, &mut out.east);
            out.alpha = -d.alpha.clone();
        }
    }
    Ok(out)
}

/// The action of R on data: `lambda <-> kappa`, `tau^2 <-> tau^4`, `W <-> S`, `N <-> E`, `alpha -> -alpha`.
pub fn r_action_data<F: Field>(d: &TauData<F>) -> TauData<F> {
    let mut out = d.clone();
    std::mem::swap(&mut out.lambda, &mut out.kappa);
    out.tau.swap(2, 4);
    std::mem::swap(&mut out.w, &mut out.s);
    std::mem::swap(&mut out.north, &mut out.east);
    out.alpha = -d.alpha.clone();
    out
}

/// The parameters used for the explicit solutions: `lambda_i = L - a_i`,
/// barred `L + a_i`, `lambda_n = 1` (and the same for `kappa` with `K`).
pub fn line_parameters<F: Field>(big_l: &F, a: &[F]) -> Result<CrystalElement<F>> {
    let n = a.len();
    let mut xs: Vec<F> = a[..n - 1].iter().map(|ai| big_l.clone() - ai.clone()).collect();
    xs.push(F::one());
    let bars = a[..n - 1].iter().map(|ai| big_l.clone() + ai.clone()).collect();
    CrystalElement::d1(xs, bars)
}

/// Data with every tau function equal to one, which solves the equations for
/// parameters of the form [`line_parameters`] with `alpha = K - L`, `beta = K + L`.
pub fn unit_data<F: Field>(big_k: &F, big_l: &F, a: &[F]) -> Result<TauData<F>> {
    let n = a.len();
    let ones = |m| vec![F::one(); m];
    Ok(TauData {
        n,
        lambda: line_parameters(big_l, a)?,
        kappa: line_parameters(big_k, a)?,
        s: ones(n - 2),
        w: ones(n - 2),
        north: ones(n - 2),
        east: ones(n - 2),
        tau: vec![ones(n + 1); 5],
        alpha: big_k.clone() - big_l.clone(),
        beta: big_k.clone() + big_l.clone(),
    })
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "C: Serialize", deserialize = "C: Deserialize<'de>"))]
struct TauDataJson<C> {
    n: usize,
    lambda: C,
    kappa: C,
    #[serde(rename = "S")]
    s: Vec<String>,
    #[serde(rename = "W")]
    w: Vec<String>,
    #[serde(rename = "N")]
    north: Vec<String>,
    #[serde(rename = "E")]
    east: Vec<String>,
    tau: Vec<Vec<String>>,
    alpha: String,
    beta: String,
}

fn texts<F: ScalarText>(v: &[F]) -> Vec<String> {
    v.iter().map(F::to_text).collect()
}

fn parse_all<F: ScalarText>(v: &[String]) -> Result<Vec<F>> {
    v.iter().map(|s| F::from_text(s)).collect()
}

impl<F: Field + ScalarText> Serialize for TauData<F> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TauDataJson {
            n: self.n,
            lambda: &self.lambda,
            kappa: &self.kappa,
            s: texts(&self.s),
            w: texts(&self.w),
            north: texts(&self.north),
            east: texts(&self.east),
            tau: self.tau.iter().map(|r| texts(r)).collect(),
            alpha: self.alpha.to_text(),
            beta: self.beta.to_text(),
        }
        .serialize(s)
    }
}

impl<'de, F: Field + ScalarText> Deserialize<'de> for TauData<F> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = TauDataJson::<CrystalElement<F>>::deserialize(d)?;
        let conv = || -> Result<TauData<F>> {
            let out = TauData {
                n: j.n,
                lambda: j.lambda.clone(),
                kappa: j.kappa.clone(),
                s: parse_all(&j.s)?,
                w: parse_all(&j.w)?,
                north: parse_all(&j.north)?,
                east: parse_all(&j.east)?,
                tau: j.tau.iter().map(|r| parse_all(r)).collect::<Result<_>>()?,
                alpha: F::from_text(&j.alpha)?,
                beta: F::from_text(&j.beta)?,
            };
            out.check_shape()?;
            Ok(out)
        };
        conv().map_err(D::Error::custom)
    }
}


#[cfg(test)]
pub(crate) fn sample_input(n: usize, seed: u64) -> SolveInput<crate::numerics::Rat> {
    use crate::numerics::rat;
    use rand::{Rng, SeedableRng};
    let mut g = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut r = move || {
        let p: i64 = g.gen_range(1..=9);
        let q: i64 = g.gen_range(1..=7);
        if g.gen_bool(0.25) { rat(-p, q) } else { rat(p, q) }
    };
    let mut v = |m: usize| (0..m).map(|_| r()).collect::<Vec<_>>();
    let lambda = CrystalElement::new(crate::crystal::Family::D1, n, v(2 * n - 1)).unwrap();
    let kappa = CrystalElement::new(crate::crystal::Family::D1, n, v(2 * n - 1)).unwrap();
    let (north, w) = (v(n - 2), v(n - 2));
    let (tau1, tau2, tau3) = (v(n + 1), v(n + 1), v(n + 1));
    let ab = v(2);
    SolveInput { n, north, w, tau1, tau2, tau3, lambda, kappa, alpha: ab[0].clone(), beta: ab[1].clone() }
}
