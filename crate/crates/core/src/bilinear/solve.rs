use super::{terms_vanish, EquationId, TauData};
use crate::crystal::CrystalElement;
use crate::error::{Error, Result};
use crate::numerics::Field;

/// Free inputs of the unique-existence problem.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveInput<F> {
    pub n: usize,
    pub north: Vec<F>,
    pub w: Vec<F>,
    pub tau1: Vec<F>,
    pub tau2: Vec<F>,
    pub tau3: Vec<F>,
    pub lambda: CrystalElement<F>,
    pub kappa: CrystalElement<F>,
    pub alpha: F,
    pub beta: F,
}

impl<F: Field> SolveInput<F> {
    pub fn from_data(d: &TauData<F>) -> Self {
        SolveInput {
            n: d.n,
            north: d.north.clone(),
            w: d.w.clone(),
            tau1: d.tau[1].clone(),
            tau2: d.tau[2].clone(),
            tau3: d.tau[3].clone(),
            lambda: d.lambda.clone(),
            kappa: d.kappa.clone(),
            alpha: d.alpha.clone(),
            beta: d.beta.clone(),
        }
    }

    fn blank(&self) -> TauData<F> {
        let n = self.n;
        let z = |m| vec![F::zero(); m];
        TauData {
            n,
            lambda: self.lambda.clone(),
            kappa: self.kappa.clone(),
            s: z(n - 2),
            w: self.w.clone(),
            north: self.north.clone(),
            east: z(n - 2),
            tau: vec![z(n + 1), self.tau1.clone(), self.tau2.clone(), self.tau3.clone(), z(n + 1)],
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        let d = self.blank();
        d.check_shape()?;
        let nz = |v: &[F], name: &str| -> Result<()> {
            if v.iter().any(|a| a.is_zero()) {
                Err(Error::NonGenericInput(format!("{name} has a zero entry")))
            } else {
                Ok(())
            }
        };
        nz(&self.north, "N")?;
        nz(&self.w, "W")?;
        nz(&self.tau1, "tau1")?;
        nz(&self.tau2, "tau2")?;
        nz(&self.tau3, "tau3")?;
        if self.alpha.is_zero() || self.beta.is_zero() {
            return Err(Error::NonGenericInput("alpha and beta must be nonzero".into()));
        }
        let (l, k) = (d.l(), d.k());
        if (l.clone() * k.clone() * (l - k)).is_zero() {
            return Err(Error::NonGenericInput("lk(l-k) = 0".into()));
        }
        debug_assert_eq!(self.tau1.len(), n + 1);
        Ok(())
    }
}

/// The body system `A x = alpha b` in the unknowns
/// `(tau4_0, E_1..E_{n-2}, tau4_n, S_{n-2}..S_1)`: an upper bidiagonal matrix
/// with diagonal `d`, superdiagonal `u` and one corner entry at the bottom left.
#[derive(Clone, Debug, PartialEq)]
pub struct BodySystem<F> {
    pub d: Vec<F>,
    pub u: Vec<F>,
    pub corner: F,
    pub rhs: Vec<F>,
}

impl<F: Field> BodySystem<F> {
    pub fn dense(&self) -> Vec<Vec<F>> {
        let m = self.d.len();
        let mut a = vec![vec![F::zero(); m]; m];
        for r in 0..m {
            a[r][r] = self.d[r].clone();
            if r + 1 < m {
                a[r][r + 1] = self.u[r].clone();
            }
        }
        a[m - 1][0] = self.corner.clone();
        a
    }

    /// Determinant from the bidiagonal-plus-corner structure.
    pub fn det(&self) -> F {
        let m = self.d.len();
        let pd = self.d.iter().cloned().fold(F::one(), |a, b| a * b);
        let pu = self.u.iter().cloned().fold(F::one(), |a, b| a * b);
        let sign = if m % 2 == 0 { -F::one() } else { F::one() };
        pd + sign * self.corner.clone() * pu
    }

    /// O(m) solve: sweep the bidiagonal rows with the first unknown as a
    /// parameter, then close the cycle with the corner row.
    pub fn solve(&self) -> Result<Vec<F>> {
        let m = self.d.len();
        let mut p = vec![F::zero(); m];
        let mut q = vec![F::zero(); m];
        q[0] = F::one();
        for r in 0..m - 1 {
            if self.u[r].is_zero() {
                return Err(Error::NonGenericInput(format!("superdiagonal entry {r} vanishes")));
            }
            p[r + 1] = (self.rhs[r].clone() - self.d[r].clone() * p[r].clone()) / self.u[r].clone();
            q[r + 1] = -(self.d[r].clone() * q[r].clone()) / self.u[r].clone();
        }
        let dl = self.d[m - 1].clone();
        let denom = dl.clone() * q[m - 1].clone() + self.corner.clone();
        if denom.is_zero() {
            return Err(Error::SingularSystem);
        }
        let t = (self.rhs[m - 1].clone() - dl * p[m - 1].clone()) / denom;
        Ok((0..m).map(|r| p[r].clone() + q[r].clone() * t.clone()).collect())
    }
}

/// Assemble the body system for data whose `tau^0_1..tau^0_{n-1}` are known.
pub fn body_matrix<F: Field>(d: &TauData<F>) -> BodySystem<F> {
    let n = d.n;
    let m = 2 * n - 2;
    let (la, lb, ka, kb) = (|i| d.lambda.x(i).clone(), |i| d.lambda.xbar(i).clone(), |i| d.kappa.x(i).clone(), |i| d.kappa.xbar(i).clone());
    let t = |j, i| d.t(j, i);
    let a = d.alpha.clone();
    let mut dg = Vec::with_capacity(m);
    let mut up = Vec::with_capacity(m - 1);
    let mut rhs = Vec::with_capacity(m);
    dg.push(ka(1) * d.n_(1));
    up.push(-(la(1) * t(2, 0)));
    rhs.push(a.clone() * t(0, 1) * t(1, 1));
    for i in 2..=n - 2 {
        dg.push(ka(i) * d.n_(i));
        up.push(-(la(i) * d.n_(i - 1)));
        rhs.push(a.clone() * t(0, i) * t(1, i));
    }
    dg.push(ka(n - 1) * ka(n) * t(2, n));
    up.push(-(la(n - 1) * la(n) * d.n_(n - 2)));
    rhs.push(a.clone() * t(0, n - 1) * t(1, n));
    dg.push(kb(n - 1) * d.w_(n - 2));
    up.push(-(lb(n - 1) * t(2, n)));
    rhs.push(a.clone() * t(0, n - 1) * t(3, n));
    for i in (2..=n - 2).rev() {
        dg.push(kb(i) * d.w_(i - 1));
        up.push(-(lb(i) * d.w_(i)));
        rhs.push(a.clone() * t(0, i) * t(3, i));
    }
    dg.push(kb(1) * t(2, 0));
    rhs.push(a * t(0, 1) * t(3, 1));
    BodySystem { d: dg, u: up, corner: -(lb(1) * d.w_(1)), rhs }
}

/// `(k - l) tau2_0 tau2_n prod N_i W_i`.
pub fn det_body_closed_form<F: Field>(d: &TauData<F>) -> F {
    let n = d.n;
    let p = (1..=n - 2).fold(F::one(), |acc, i| acc * d.n_(i) * d.w_(i));
    (d.k() - d.l()) * d.t(2, 0) * d.t(2, n) * p
}

/// The unique completion of generic free data to a full solution.
pub fn solve_unique<F: Field>(input: &SolveInput<F>) -> Result<TauData<F>> {
    input.validate()?;
    let n = input.n;
    let mut d = input.blank();

    // tau^0_1 .. tau^0_{n-1} from <2,i>.
    for i in 1..n {
        let terms = d.equation_terms(EquationId { j: 2, i })?;
        let lhs = terms[0].clone() + terms[1].clone();
        let den = d.beta.clone() * d.t(2, i);
        d.tau[0][i] = lhs / den;
        if d.tau[0][i].is_zero() {
            return Err(Error::NonGenericInput(format!("tau0_{i} vanishes")));
        }
    }

    let sys = body_matrix(&d);
    let x = sys.solve()?;
    d.tau[4][0] = x[0].clone();
    for i in 1..=n - 2 {
        d.east[i - 1] = x[i].clone();
        d.s[i - 1] = x[2 * n - 2 - i].clone();
    }
    d.tau[4][n] = x[n - 1].clone();

    for i in 1..n {
        let terms = d.equation_terms(EquationId { j: 4, i })?;
        let lhs = terms[0].clone() + terms[1].clone();
        d.tau[4][i] = lhs / (d.beta.clone() * d.t(0, i));
    }

    let t10 = d.t(1, 0);
    let t1n1 = d.t(1, n - 1);
    if t10.is_zero() || t1n1.is_zero() {
        return Err(Error::NonGenericInput("tau1 end values vanish".into()));
    }
    let ends = [(0usize, t10), (n, t1n1)];
    for (i, t1) in ends {
        let terms = d.equation_terms(EquationId { j: 1, i })?;
        d.tau[0][i] = (terms[0].clone() + terms[1].clone()) / (d.alpha.clone() * t1);
    }

    for id in d.all_ids() {
        if !terms_vanish(&d.equation_terms(id)?) {
            return Err(Error::InconsistentSystem(format!("<{},{}> fails after solving", id.j, id.i)));
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bilinear::unit_data;
    use crate::numerics::{rat, Rat};

    fn gauss_det(mut a: Vec<Vec<Rat>>) -> Rat {
        let m = a.len();
        let mut det = rat(1, 1);
        for c in 0..m {
            let Some(p) = (c..m).find(|&r| a[r][c] != rat(0, 1)) else { return rat(0, 1) };
            if p != c {
                a.swap(p, c);
                det = -det;
            }
            det *= a[c][c].clone();
            for r in c + 1..m {
                let f = a[r][c].clone() / a[c][c].clone();
                for k in c..m {
                    let v = a[c][k].clone() * f.clone();
                    a[r][k] -= v;
                }
            }
        }
        det
    }

    #[test]
    fn unit_configuration_completes_to_ones() {
        for n in 3..=5 {
            let a: Vec<Rat> = (0..n as i64).map(|k| rat(k * 3, 1)).collect();
            let d = unit_data(&rat(5, 1), &rat(2, 1), &a).unwrap();
            let s = solve_unique(&SolveInput::from_data(&d)).unwrap();
            assert_eq!(s, d, "n={n}");
        }
    }

    #[test]
    fn det_at_unit_configuration() {
        let a = [rat(0, 1), rat(3, 1), rat(6, 1)];
        let d = unit_data(&rat(5, 1), &rat(2, 1), &a).unwrap();
        let sys = body_matrix(&d);
        let kl = d.k() - d.l();
        assert_eq!(sys.det(), kl);
        assert_eq!(gauss_det(sys.dense()), kl);
        assert_eq!(det_body_closed_form(&d), kl);
    }

    #[test]
    fn rejects_degenerate_levels() {
        let a = [rat(0, 1), rat(3, 1), rat(6, 1)];
        let d = unit_data(&rat(2, 1), &rat(2, 1), &a).unwrap();
        let mut inp = SolveInput::from_data(&d);
        inp.alpha = rat(1, 1);
        assert!(matches!(solve_unique(&inp), Err(Error::NonGenericInput(_))));
        let mut inp = SolveInput::from_data(&unit_data(&rat(5, 1), &rat(2, 1), &a).unwrap());
        inp.tau2[1] = rat(0, 1);
        assert!(matches!(solve_unique(&inp), Err(Error::NonGenericInput(_))));
    }
}
