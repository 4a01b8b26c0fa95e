//! Single-case checks. Each suite case and each replay file ends up here.

use crate::io::{params_json, texts, time_array, time_json, CliError, CliResult};
use serde::Serialize;
use serde_json::{json, Value};
use tropr::bilinear::{body_matrix, det_body_closed_form, extract_quadruple, uv_from_tau, verify_bilinearization, TauData};
use tropr::crystal::{level, sigma_pair, CrystalElement, Family, Sigma};
use tropr::fermion::{
    assign_finite, blaux, neutral_odd, neutral_shifted, reduction_residuals, solve_reduction, specialize_family, three_term,
    FermionParams, GridSpec, IdentityCheck, ReductionInput, ReductionMode, ThreeTerm, TimeArray,
};
use tropr::lax::{check_lax, residual_is_zero};
use tropr::numerics::{relative_gap, ComplexField, Field, ScalarText, Semifield};
use tropr::tropical_r::{check_toda, check_ybe, r_apply, vu_table};
use tropr::tropicalizer::{trop_r, trop_ybe, ud_consistency, UdRow};
use tropr::vertex::{evolve_with, line_levels, Boundary, LatticeState, Schedule};
use tropr::{BigReal, Rat, TropVal};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool) -> Self {
        Check { name: name.into(), passed, detail: None }
    }

    fn with(name: impl Into<String>, passed: bool, detail: String) -> Self {
        Check { name: name.into(), passed, detail: Some(detail) }
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

/// First failing check as a one-line message.
pub fn failure_message(checks: &[Check]) -> Option<String> {
    checks.iter().find(|c| !c.passed).map(|c| match &c.detail {
        Some(d) => format!("{}: {d}", c.name),
        None => format!("{} fails", c.name),
    })
}

/// Checks on one pair (and optional third element) in exact arithmetic.
/// `only` restricts the work to a single named check.
pub fn r_checks(x: &CrystalElement<Rat>, y: &CrystalElement<Rat>, z: Option<&CrystalElement<Rat>>, only: Option<&str>) -> CliResult<Vec<Check>> {
    let want = |name: &str| only.map_or(true, |o| o == name);
    let mut out = Vec::new();
    let r = r_apply(x, y)?;
    if want("inversion") {
        let back = r_apply(&r.x, &r.y)?;
        out.push(Check::new("inversion", back.x == *x && back.y == *y));
    }
    if want("positivity") {
        let zero = Rat::from_i64(0);
        let mut ok = x.coords().iter().chain(y.coords()).all(|v| *v > zero);
        ok &= r.x.coords().iter().chain(r.y.coords()).all(|v| *v > zero);
        if x.family() == Family::D1 {
            let t = vu_table(x, y)?;
            ok &= t.v.iter().chain(&t.v_sigma1).chain(&t.v_star).chain(&t.v_sigman).chain(&t.u).all(|v| *v > zero);
        }
        out.push(Check::new("positivity", ok));
    }
    if x.family() == Family::A1 {
        if want("toda") {
            out.push(Check::new("toda", check_toda(x, y, &r.x, &r.y)?.iter().all(|v| v.is_null())));
        }
        if want("lax") {
            out.push(Check::new("lax", residual_is_zero(&check_lax(x, y, &r.x, &r.y)?)));
        }
    }
    if x.family() == Family::D1 {
        if want("levels") {
            out.push(Check::new("levels", level(&r.x)? == level(y)? && level(&r.y)? == level(x)?));
        }
        if want("sigma") {
            for a in [Sigma::One, Sigma::N, Sigma::Star] {
                let (sx, sy) = sigma_pair(a, x, y)?;
                let involutive = sigma_pair(a, &sx, &sy)? == (x.clone(), y.clone());
                let rs = r_apply(&sx, &sy)?;
                let equivariant = (rs.x, rs.y) == sigma_pair(a, &r.x, &r.y)?;
                out.push(Check::new(format!("sigma {a:?}"), involutive && equivariant));
            }
        }
    }
    if let Some(z) = z {
        if want("ybe") {
            out.push(Check::new("ybe", check_ybe(x, y, z)?.equal));
        }
    }
    Ok(out)
}

fn max_gap(a: &[&CrystalElement<BigReal>], b: &[&CrystalElement<BigReal>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(u, v)| u.coords().iter().zip(v.coords()))
        .map(|(p, q)| relative_gap(p, q))
        .fold(0.0, f64::max)
}

/// Inversion and braid checks at the working binary precision.
pub fn r_checks_numeric(
    x: &CrystalElement<Rat>,
    y: &CrystalElement<Rat>,
    z: Option<&CrystalElement<Rat>>,
    only: Option<&str>,
    tol: f64,
) -> CliResult<Vec<Check>> {
    let lift = |e: &CrystalElement<Rat>| e.map(BigReal::from_rat);
    let (bx, by) = (lift(x)?, lift(y)?);
    let mut out = Vec::new();
    if only.map_or(true, |o| o == "inversion") {
        let r = r_apply(&bx, &by)?;
        let back = r_apply(&r.x, &r.y)?;
        let gap = max_gap(&[&back.x, &back.y], &[&bx, &by]);
        out.push(Check::with("inversion", gap < tol, format!("relative gap {gap:e}")));
    }
    if let (Some(z), true) = (z, only.map_or(true, |o| o == "ybe")) {
        let res = check_ybe(&bx, &by, &lift(z)?)?;
        let (l, r) = (&res.left, &res.right);
        let gap = max_gap(&[&l.0, &l.1, &l.2], &[&r.0, &r.1, &r.2]);
        out.push(Check::with("ybe", gap < tol, format!("relative gap {gap:e}")));
    }
    Ok(out)
}

/// Solver, bilinearization and tau-level V/U checks on one tau data set.
pub fn data_checks(d: &TauData<Rat>, only: Option<&str>) -> CliResult<Vec<Check>> {
    let want = |name: &str| only.map_or(true, |o| o == name);
    let mut out = Vec::new();
    if want("bilinear") {
        let res = d.residuals()?;
        let failing: Vec<String> = res.iter().filter(|(_, r)| !r.is_null()).map(|(id, _)| format!("{id:?}")).collect();
        out.push(if failing.is_empty() {
            Check::new("equations", true)
        } else {
            Check::with("equations", false, format!("nonzero: {}", failing.join(", ")))
        });
        out.push(Check::new("equation count", res.len() == 4 * (d.n + 1)));
        out.push(Check::new("determinant", body_matrix(d).det() == det_body_closed_form(d)));
        let sums = d.null_combinations().map(|terms| terms.into_iter().fold(Rat::from_i64(0), |a, t| a + t));
        out.push(Check::new("null combinations", sums.iter().all(|v| v.is_null())));
    }
    if want("uv") {
        out.push(attempt("uv", || {
            let q = extract_quadruple(d)?;
            Ok(uv_from_tau(d)? == vu_table(&q.x, &q.y)?)
        }));
    }
    if want("theorem") {
        out.push(match verify_bilinearization(d) {
            Ok(rep) => Check::with("theorem", rep.passed(), format!("solution {} x' {} y' {}", rep.is_solution, rep.x_matches, rep.y_matches)),
            Err(e) => Check::with("theorem", false, e.to_string()),
        });
    }
    Ok(out)
}

/// A check whose computation may reject the input; the rejection counts as a failure.
fn attempt(name: &str, f: impl FnOnce() -> tropr::Result<bool>) -> Check {
    match f() {
        Ok(ok) => Check::new(name, ok),
        Err(e) => Check::with(name, false, e.to_string()),
    }
}

/// Max-plus inversion, braid relation and additive equivariance.
pub fn trop_checks(x: &CrystalElement<TropVal>, y: &CrystalElement<TropVal>, z: Option<&CrystalElement<TropVal>>) -> CliResult<Vec<Check>> {
    let r = trop_r(x, y)?;
    let back = trop_r(&r.x, &r.y)?;
    let mut out = vec![Check::new("inversion", back.x == *x && back.y == *y)];
    if x.family() == Family::A1 {
        let shift = |e: &CrystalElement<TropVal>| e.map(|v| v.otimes(&TropVal::int(1)));
        let s = trop_r(&shift(x)?, &shift(y)?)?;
        out.push(Check::new("shift equivariance", s.x == shift(&r.x)? && s.y == shift(&r.y)?));
    }
    if let Some(z) = z {
        out.push(Check::new("ybe", trop_ybe(x, y, z)?));
    }
    Ok(out)
}

pub fn ud_checks(x: &CrystalElement<TropVal>, y: &CrystalElement<TropVal>, eps: &[f64]) -> CliResult<(Vec<UdRow>, Vec<Check>)> {
    let rows = ud_consistency(x, y, eps)?;
    let checks = rows
        .iter()
        .map(|r| Check::with(format!("eps {:e}", r.epsilon), r.within_bound, format!("deviation {:e} bound {:e}", r.max_deviation, r.bound)))
        .collect();
    Ok((rows, checks))
}

pub fn element_json<S: Semifield + ScalarText>(e: &CrystalElement<S>) -> Value {
    serde_json::to_value(e).expect("element serializes")
}

/// Evolution on a window with every lattice check.
pub fn lattice_checks(b: &Boundary<Rat>) -> CliResult<(LatticeState<Rat>, Vec<Check>)> {
    let st = evolve_with(b, Schedule::AntiDiagonal)?;
    let defects = st.vertex_defects()?;
    let lv = line_levels(&st)?;
    let other = evolve_with(b, Schedule::ColumnMajor)?;
    let checks = vec![
        Check::with("vertex relation", defects.is_empty(), format!("{} defective vertices", defects.len())),
        Check::with("line levels", lv.constant(), format!("{} violations", lv.violations.len())),
        Check::new("schedule independence", st == other),
    ];
    Ok((st, checks))
}

pub fn level_json(st: &LatticeState<Rat>) -> CliResult<Value> {
    let lv = line_levels(st)?;
    Ok(json!({ "rows": texts(&lv.rows), "cols": texts(&lv.cols), "violations": lv.violations }))
}

/// One identity test point: parameters, a general time `x`, an odd time,
/// the odd auxiliary time `y`, three spectral values `u` and a shift `c`.
pub struct IdentityCase<C> {
    pub params: FermionParams<C>,
    pub x: TimeArray<C>,
    pub odd: TimeArray<C>,
    pub y: TimeArray<C>,
    pub u: [C; 3],
    pub c: C,
}

impl<C: ComplexField + ScalarText> IdentityCase<C> {
    pub fn from_json(v: &Value) -> CliResult<Self> {
        let get = |k: &str| v.get(k).ok_or_else(|| CliError::Config(format!("missing field {k:?}")));
        let u: Vec<C> = crate::io::scalars(get("u")?)?;
        let u: [C; 3] = u.try_into().map_err(|_| CliError::Config("u needs exactly three values".into()))?;
        Ok(IdentityCase {
            params: crate::io::fermion_params(get("params")?)?,
            x: time_array(Some(get("x")?))?,
            odd: time_array(Some(get("odd")?))?,
            y: time_array(Some(get("y")?))?,
            u,
            c: crate::io::scalar(get("c")?)?,
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "params": params_json(&self.params),
            "x": time_json(&self.x),
            "odd": time_json(&self.odd),
            "y": time_json(&self.y),
            "u": texts(&self.u),
            "c": self.c.to_text(),
        })
    }

    pub fn map<D: ComplexField>(&self, f: impl Fn(&C) -> D + Copy) -> IdentityCase<D> {
        IdentityCase {
            params: self.params.map(f),
            x: self.x.map(f),
            odd: self.odd.map(f),
            y: self.y.map(f),
            u: [f(&self.u[0]), f(&self.u[1]), f(&self.u[2])],
            c: f(&self.c),
        }
    }

    /// Every identity family at this point.
    pub fn identities(&self) -> tropr::Result<Vec<IdentityCheck<C>>> {
        let (g, x, y, u) = (&self.params, &self.x, &self.y, &self.u);
        let mut out = Vec::new();
        for w in ThreeTerm::ALL {
            for ls in [(0, 0, 0), (0, 1, 1), (1, 1, 0)] {
                out.push(three_term(w, ls, x, y, u, g)?);
            }
        }
        out.push(blaux(x, y, &[u[0].clone(), u[1].clone()], g)?);
        out.extend(neutral_odd(&self.odd, y, g)?);
        let shifted = &self.odd - &TimeArray::eps(C::one() / self.c.clone());
        out.extend(neutral_shifted(&shifted, y, &self.c, g)?);
        Ok(out)
    }
}

/// Exact mode requires vanishing residuals; numeric mode a relative bound.
pub fn identity_checks<C: ComplexField>(checks: &[IdentityCheck<C>], tol: Option<f64>) -> Vec<Check> {
    checks
        .iter()
        .map(|c| match tol {
            None => Check::new(c.name.clone(), c.holds()),
            Some(t) => Check::with(c.name.clone(), c.relative() < t, format!("relative residual {:e}", c.relative())),
        })
        .collect()
}

/// Reduced parameters, their tau data and the reduced-family limits.
pub struct Reduced<C> {
    pub params: FermionParams<C>,
    pub data: TauData<C>,
    pub checks: Vec<Check>,
}

fn tau_gap<C: Field>(d: &TauData<C>, a: usize, b: usize) -> f64 {
    (0..5).map(|j| relative_gap(&d.tau[j][a], &d.tau[j][b])).fold(0.0, f64::max)
}

fn small(name: String, r: f64, tol: Option<f64>) -> Check {
    match tol {
        None => Check::with(name, r == 0.0, format!("{r:e}")),
        Some(t) => Check::with(name, r < t, format!("{r:e}")),
    }
}

pub fn reduce<C: ComplexField>(spec: &GridSpec<C>, input: &ReductionInput<C>, mode: ReductionMode, tol: Option<f64>) -> tropr::Result<Reduced<C>> {
    let params = solve_reduction(spec, input, mode)?;
    let red = reduction_residuals(spec, &params).iter().map(|r| r.abs_l1().approx_f64()).fold(0.0, f64::max);
    let data = assign_finite(spec, &params)?;
    let mut checks = vec![
        small("reduction constraints".into(), red, tol),
        small("equations".into(), data.max_relative_residual()?, tol),
        Check::new("bilinearization", verify_bilinearization(&data)?.passed()),
    ];
    let n = spec.n;
    let mut limits = vec![(Family::C1, None)];
    if params.n_c() == 1 {
        limits.push((Family::A2, Some(n - 1)));
    }
    for (fam, m) in limits {
        let s = specialize_family(fam, &params, spec, m)?;
        let d = assign_finite(spec, &s)?;
        checks.push(small(format!("{} equations", fam.name()), d.max_relative_residual()?, tol));
        checks.push(small(format!("{} tau_(n-1) = tau_n", fam.name()), tau_gap(&d, n - 1, n), tol));
        if fam == Family::C1 {
            checks.push(small("C1 tau_0 = tau_1".into(), tau_gap(&d, 0, 1), tol));
        }
    }
    Ok(Reduced { params, data, checks })
}
