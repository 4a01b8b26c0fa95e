use super::{solve_unique, EquationId, SolveInput, TauData};
use crate::crystal::{CrystalElement, Family};
use crate::error::{Error, Result};
use crate::numerics::Field;

#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintReport {
    /// Constraints the input violated, by name.
    pub violations: Vec<String>,
    /// Whether the paired equations have equal residuals on the output.
    pub paired_residuals_equal: bool,
}

fn set_slot<F: Field>(e: &CrystalElement<F>, pos: usize, v: F) -> Result<CrystalElement<F>> {
    let mut c = e.coords().to_vec();
    c[pos] = v;
    CrystalElement::new(e.family(), e.rank(), c)
}

fn violations<F: Field>(family: Family, d: &TauData<F>) -> Vec<String> {
    let n = d.n;
    let mut out = Vec::new();
    if !d.lambda.x(n).is_one() {
        out.push("lambda_n = 1".to_string());
    }
    if !d.kappa.x(n).is_one() {
        out.push("kappa_n = 1".to_string());
    }
    for j in 0..5 {
        if d.tau[j][n - 1] != d.tau[j][n] {
            out.push(format!("tau{j}_(n-1) = tau{j}_n"));
        }
    }
    if family == Family::C1 {
        if d.lambda.x(1) != d.lambda.xbar(1) {
            out.push("lambda_1 = lambdabar_1".into());
        }
        if d.kappa.x(1) != d.kappa.xbar(1) {
            out.push("kappa_1 = kappabar_1".into());
        }
        for j in 0..5 {
            if d.tau[j][0] != d.tau[j][1] {
                out.push(format!("tau{j}_0 = tau{j}_1"));
            }
        }
    }
    out
}

/// Whether the equations made equivalent by the reduction have equal residuals.
pub fn paired_residuals_equal<F: Field>(family: Family, d: &TauData<F>) -> Result<bool> {
    let n = d.n;
    let mut pairs = vec![(n - 1, n)];
    if family == Family::C1 {
        pairs.push((0, 1));
    }
    for j in 1..=4 {
        for &(a, b) in &pairs {
            let ra = d.eval_equation(EquationId { j, i: a })?;
            let rb = d.eval_equation(EquationId { j, i: b })?;
            if ra != rb {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Projects the free inputs onto the A2 or C1 constraint set and re-solves.
pub fn constrain_family<F: Field>(family: Family, d: &TauData<F>) -> Result<(TauData<F>, ConstraintReport)> {
    if !matches!(family, Family::A2 | Family::C1) {
        return Err(Error::WrongFamily { expected: "A2 or C1".into(), found: family.to_string() });
    }
    d.check_shape()?;
    let n = d.n;
    let report_violations = violations(family, d);
    let mut inp = SolveInput::from_data(d);
    inp.lambda = set_slot(&inp.lambda, n - 1, F::one())?;
    inp.kappa = set_slot(&inp.kappa, n - 1, F::one())?;
    for row in [&mut inp.tau1, &mut inp.tau2, &mut inp.tau3] {
        row[n] = row[n - 1].clone();
    }
    if family == Family::C1 {
        let last = 2 * n - 2;
        inp.lambda = set_slot(&inp.lambda, last, inp.lambda.x(1).clone())?;
        inp.kappa = set_slot(&inp.kappa, last, inp.kappa.x(1).clone())?;
        for row in [&mut inp.tau1, &mut inp.tau2, &mut inp.tau3] {
            row[1] = row[0].clone();
        }
    }
    let out = solve_unique(&inp)?;
    let paired = paired_residuals_equal(family, &out)?;
    Ok((out, ConstraintReport { violations: report_violations, paired_residuals_equal: paired }))
}
