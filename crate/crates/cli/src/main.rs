mod cases;
mod io;
mod suites;

use cases::{all_pass, data_checks, element_json, identity_checks, lattice_checks, level_json, r_checks, r_checks_numeric, reduce, trop_checks, ud_checks, IdentityCase};
use clap::{Args, Parser, Subcommand, ValueEnum};
use io::{emit, emit_text, inline_or_file, params_json, parse_family, read_json, read_value, texts, CliError, CliResult};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use suites::{csv_summary, run_suite, text_summary, Mode, SuiteConfig};
use tropr::bilinear::{solve_unique, SolveInput, TauData};
use tropr::crystal::{CrystalElement, Family};
use tropr::fermion::{assign_finite, eval_F, eval_f, ReductionMode};
use tropr::numerics::{set_default_precision, ComplexField, Field, ScalarText, Semifield};
use tropr::tropical_r::{check_ybe, r_apply};
use tropr::tropicalizer::trop_r;
use tropr::vertex::{tau_field, Boundary};
use tropr::{BigC, BigReal, GaussRat, Rat, TropVal};

#[derive(Parser)]
#[command(name = "tropr", version, about = "Tropical R maps, their tau functions and verification suites")]
struct Cli {
    /// Working precision in bits for numeric mode.
    #[arg(long, global = true, env = "TROPR_PRECISION", default_value_t = 256)]
    precision: usize,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Apply R to a pair, optionally running every single-case check.
    RApply(RApplyArgs),
    /// Run a seeded verification suite.
    Verify(VerifyArgs),
    /// Tau data: solve, residuals, bilinearization.
    #[command(subcommand)]
    Bilinear(BilinearCmd),
    /// Free-fermion tau functions.
    #[command(subcommand)]
    Tau(TauCmd),
    /// The vertex model on a finite window.
    #[command(subcommand)]
    Vertex(VertexCmd),
    /// Max-plus maps and the small-eps limit.
    #[command(subcommand)]
    Trop(TropCmd),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Numeric,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Numeric => Mode::Numeric,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct Shape {
    /// A1, D1, A2 or C1; required for bare coordinate arrays.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n: Option<usize>,
}

impl Shape {
    fn get(&self) -> CliResult<Option<(Family, usize)>> {
        match (&self.family, self.n) {
            (Some(f), Some(n)) => Ok(Some((parse_family(f)?, n))),
            (None, None) => Ok(None),
            _ => Err(CliError::Config("--family and --n go together".into())),
        }
    }
}

/// Elements given inline (`--x '[1,2]'`, `--x @file.json`) or as one `{x, y, z}` file.
#[derive(Args)]
struct Elements {
    #[command(flatten)]
    shape: Shape,
    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    y: Option<String>,
    #[arg(long)]
    z: Option<String>,
    #[arg(long)]
    input: Option<PathBuf>,
}

impl Elements {
    fn load<S: Semifield + ScalarText>(&self) -> CliResult<(CrystalElement<S>, CrystalElement<S>, Option<CrystalElement<S>>)> {
        let shape = self.shape.get()?;
        let file = self.input.as_deref().map(read_value).transpose()?;
        let pick = |flag: &Option<String>, key: &str| -> CliResult<Option<Value>> {
            match (flag, &file) {
                (Some(s), _) => inline_or_file(s).map(Some),
                (None, Some(f)) => Ok(f.get(key).cloned()),
                (None, None) => Ok(None),
            }
        };
        let need = |v: Option<Value>, key: &str| v.ok_or_else(|| CliError::Config(format!("missing element {key}")));
        let x = io::element(&need(pick(&self.x, "x")?, "x")?, shape)?;
        let y = io::element(&need(pick(&self.y, "y")?, "y")?, shape)?;
        let z = pick(&self.z, "z")?.map(|v| io::element(&v, shape)).transpose()?;
        Ok((x, y, z))
    }

    fn eps(&self) -> CliResult<Option<Vec<f64>>> {
        let Some(f) = self.input.as_deref() else { return Ok(None) };
        match read_value(f)?.get("eps") {
            Some(v) => Ok(Some(serde_json::from_value(v.clone())?)),
            None => Ok(None),
        }
    }
}

#[derive(Args)]
struct RApplyArgs {
    #[command(flatten)]
    elements: Elements,
    /// Run inversion, positivity and the family-specific checks; with `z`, the braid relation.
    #[arg(long)]
    checks: bool,
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeArg,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    suite: String,
    #[arg(long, default_value = "D1")]
    family: String,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    cases: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Directory for the replay file written when a case fails.
    #[arg(long, default_value = ".")]
    replay_dir: PathBuf,
}

#[derive(Subcommand)]
enum BilinearCmd {
    /// Solve for the unique tau data from free data (or from the free part of a full data set).
    Solve {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        input: PathBuf,
    },
    /// Residual of every equation.
    Residuals {
        #[arg(long)]
        input: PathBuf,
    },
    /// Equations, solver consistency, V/U tables and the R relation on the extracted elements.
    VerifyTheorem {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    #[value(name = "f")]
    Small,
    #[value(name = "F")]
    Big,
    Assign,
    Identities,
}

#[derive(Subcommand)]
enum TauCmd {
    /// Evaluate at the grid's base time `eta` and auxiliary time `y`.
    Eval {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        params: PathBuf,
        #[arg(long, value_enum)]
        what: What,
        /// Charge of `f`.
        #[arg(long, default_value_t = 0)]
        l: u8,
        /// Charges `l1,l2,l` of `F`.
        #[arg(long, value_delimiter = ',', default_values_t = [0, 0, 0], allow_hyphen_values = true)]
        charges: Vec<i32>,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
    },
    /// Reduced parameters from the `reduction` block of a grid spec, with their tau data.
    Reduce {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
    },
    /// Tau data of one vertex and its equation residuals.
    Assign {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        params: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
    },
    /// Every fermionic identity at one test point.
    Identities {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
    },
}

#[derive(Subcommand)]
enum VertexCmd {
    /// Evolve a boundary over an `SxT` window (columns by rows).
    Run {
        #[arg(long)]
        boundary: PathBuf,
        #[arg(long)]
        window: String,
        /// Build the face tau field of `--field` and compare it with the evolution.
        #[arg(long, requires = "field")]
        tau_check: bool,
        /// Tau field description `{n, K, L, a, base?, y?, params}`.
        #[arg(long)]
        field: Option<PathBuf>,
        /// Write `<prefix>-edges.csv` and, with a tau check, `<prefix>-faces.csv`.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum TropCmd {
    /// Max-plus R, with its inverse checked.
    Apply(Elements),
    /// Max-plus braid relation on `x, y, z`.
    Ybe(Elements),
    /// Compare the rational map at `exp(X / eps)` with the max-plus map.
    UdCheck {
        #[command(flatten)]
        elements: Elements,
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = set_default_precision(cli.precision).map_err(CliError::from).and_then(|_| run(&cli));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("tropr: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> CliResult<bool> {
    let out = cli.output.as_deref();
    match &cli.cmd {
        Cmd::RApply(a) => r_apply_cmd(a, cli.precision, out),
        Cmd::Verify(a) => verify(a, cli.precision, out),
        Cmd::Bilinear(c) => bilinear(c, out),
        Cmd::Tau(c) => match mode_of(c) {
            Mode::Exact => tau::<GaussRat>(c, ReductionMode::Exact, None, out),
            Mode::Numeric => tau::<BigC>(c, ReductionMode::Numeric, Some(tolerance(cli.precision)), out),
        },
        Cmd::Vertex(VertexCmd::Run { boundary, window, tau_check, field, csv }) => {
            vertex_run(boundary, window, (*tau_check).then_some(field.as_deref()).flatten(), csv.as_deref(), out)
        }
        Cmd::Trop(c) => trop(c, out),
    }
}

fn tolerance(bits: usize) -> f64 {
    2f64.powi(-(bits as i32) / 3)
}

fn checks_json(checks: &[cases::Check]) -> Value {
    serde_json::to_value(checks).expect("checks serialize")
}

fn r_apply_cmd(a: &RApplyArgs, bits: usize, out: Option<&Path>) -> CliResult<bool> {
    let (x, y, z) = a.elements.load::<Rat>()?;
    match a.mode {
        ModeArg::Exact => {
            let r = r_apply(&x, &y)?;
            let mut doc = json!({ "x": element_json(&r.x), "y": element_json(&r.y) });
            let mut ok = true;
            if a.checks {
                let c = r_checks(&x, &y, z.as_ref(), None)?;
                ok = all_pass(&c);
                doc["checks"] = checks_json(&c);
            } else if let Some(z) = &z {
                let res = check_ybe(&x, &y, z)?;
                ok = res.equal;
                doc["ybe"] = json!(res.equal);
            }
            emit(&doc, out)?;
            Ok(ok)
        }
        ModeArg::Numeric => {
            let lift = |e: &CrystalElement<Rat>| e.map(BigReal::from_rat);
            let r = r_apply(&lift(&x)?, &lift(&y)?)?;
            let mut doc = json!({ "x": element_json(&r.x), "y": element_json(&r.y) });
            let mut ok = true;
            if a.checks {
                let c = r_checks_numeric(&x, &y, z.as_ref(), None, tolerance(bits))?;
                ok = all_pass(&c);
                doc["checks"] = checks_json(&c);
            }
            emit(&doc, out)?;
            Ok(ok)
        }
    }
}

fn verify(a: &VerifyArgs, bits: usize, out: Option<&Path>) -> CliResult<bool> {
    let cfg = SuiteConfig {
        suite: a.suite.clone(),
        family: parse_family(&a.family)?,
        n: a.n,
        cases: a.cases,
        seed: a.seed,
        mode: a.mode.into(),
        precision: bits,
    };
    let (report, elapsed) = run_suite(&cfg)?;
    if let Some(f) = &report.first_failure {
        let mut case = f.case.clone();
        if let Value::Object(m) = &mut case {
            m.insert("replay".into(), json!(f.replay));
        }
        let path = a.replay_dir.join(format!("replay-{}-{}-{}.json", cfg.suite, cfg.seed, f.index));
        std::fs::write(&path, serde_json::to_string_pretty(&case)?).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        eprintln!("replay file: {}", path.display());
    }
    match a.format {
        Format::Json => emit(&report, out)?,
        Format::Csv => emit_text(&csv_summary(&report), out)?,
        Format::Text => emit_text(&text_summary(&report, elapsed), out)?,
    }
    Ok(report.all_passed())
}

fn load_data(path: &Path) -> CliResult<TauData<Rat>> {
    read_json(path)
}

fn bilinear(c: &BilinearCmd, out: Option<&Path>) -> CliResult<bool> {
    match c {
        BilinearCmd::Solve { n, input } => {
            let v = read_value(input)?;
            let free: SolveInput<Rat> = if v.get("tau").is_some() {
                SolveInput::from_data(&serde_json::from_value::<TauData<Rat>>(v)?)
            } else {
                serde_json::from_value::<io::SolveJson>(v)?.into_input()?
            };
            if let Some(n) = n {
                if *n != free.n {
                    return Err(CliError::Config(format!("--n {n} but the input has n = {}", free.n)));
                }
            }
            emit(&solve_unique(&free)?, out)?;
            Ok(true)
        }
        BilinearCmd::Residuals { input } => {
            let d = load_data(input)?;
            let res = d.residuals()?;
            let ok = res.iter().all(|(_, r)| r.is_null());
            let rows: Vec<Value> = res.iter().map(|(id, r)| json!({ "equation": id, "residual": r.to_text() })).collect();
            emit(&json!({ "solution": ok, "residuals": rows }), out)?;
            Ok(ok)
        }
        BilinearCmd::VerifyTheorem { input } => {
            let d = load_data(input)?;
            let checks = data_checks(&d, None)?;
            let ok = all_pass(&checks);
            emit(&json!({ "passed": ok, "checks": checks }), out)?;
            Ok(ok)
        }
    }
}

fn mode_of(c: &TauCmd) -> Mode {
    let m = match c {
        TauCmd::Eval { mode, .. } | TauCmd::Reduce { mode, .. } | TauCmd::Assign { mode, .. } | TauCmd::Identities { mode, .. } => *mode,
    };
    m.into()
}

fn data_summary<C: ComplexField + ScalarText>(d: &TauData<C>, tol: Option<f64>) -> CliResult<(Value, bool)> {
    let worst = d.max_relative_residual()?;
    let ok = match tol {
        None => d.is_solution()?,
        Some(t) => worst < t,
    };
    Ok((json!({ "data": d, "max_relative_residual": worst, "solution": ok }), ok))
}

fn tau<C: ComplexField + ScalarText>(c: &TauCmd, mode: ReductionMode, tol: Option<f64>, out: Option<&Path>) -> CliResult<bool> {
    match c {
        TauCmd::Eval { spec, params, what, l, charges, .. } => {
            if charges.len() != 3 {
                return Err(CliError::Config(format!("--charges takes l1,l2,l; got {} values", charges.len())));
            }
            let spec = io::grid_spec::<C>(&read_value(spec)?)?;
            let g = io::fermion_params::<C>(&read_value(params)?)?;
            let (doc, ok) = match what {
                What::Small => (json!({ "f": eval_f(*l, &spec.eta, &spec.y, &g)?.to_text() }), true),
                What::Big => (json!({ "F": eval_F(charges[0], charges[1], charges[2], &spec.eta, &spec.y, &g)?.to_text() }), true),
                What::Assign => data_summary(&assign_finite(&spec, &g)?, tol)?,
                What::Identities => {
                    let case = IdentityCase { params: g, x: spec.eta.clone(), odd: spec.eta.clone(), y: spec.y.clone(), u: [2, 3, 5].map(C::from_i64), c: C::from_i64(7) };
                    let checks = identity_checks(&case.identities()?, tol);
                    let ok = all_pass(&checks);
                    (json!({ "passed": ok, "checks": checks }), ok)
                }
            };
            emit(&doc, out)?;
            Ok(ok)
        }
        TauCmd::Assign { spec, params, .. } => {
            let spec = io::grid_spec::<C>(&read_value(spec)?)?;
            let g = io::fermion_params::<C>(&read_value(params)?)?;
            let (doc, ok) = data_summary(&assign_finite(&spec, &g)?, tol)?;
            emit(&doc, out)?;
            Ok(ok)
        }
        TauCmd::Reduce { spec, .. } => {
            let v = read_value(spec)?;
            let grid = io::grid_spec::<C>(&v)?;
            let block = v.get("reduction").ok_or_else(|| CliError::Config("the --spec file has no \"reduction\" block".into()))?;
            let input = io::reduction_input::<C>(block)?;
            let r = reduce(&grid, &input, mode, tol)?;
            let ok = all_pass(&r.checks);
            emit(&json!({ "params": params_json(&r.params), "data": r.data, "checks": r.checks, "passed": ok }), out)?;
            Ok(ok)
        }
        TauCmd::Identities { input, .. } => {
            let case = IdentityCase::<C>::from_json(&read_value(input)?)?;
            let checks = identity_checks(&case.identities()?, tol);
            let ok = all_pass(&checks);
            emit(&json!({ "passed": ok, "checks": checks }), out)?;
            Ok(ok)
        }
    }
}

fn parse_window(s: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::Config(format!("window {s:?} is not of the form SxT"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let (cols, rows) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if cols == 0 || rows == 0 {
        return Err(bad());
    }
    Ok((cols, rows))
}

fn edge_rows<S: Semifield + ScalarText>(st: &tropr::vertex::LatticeState<S>) -> String {
    let mut csv = String::from("edge,s,t,family,n,coords\n");
    for (id, e) in st.edges() {
        let (kind, s, t) = match id {
            tropr::vertex::EdgeId::H { s, t } => ("H", s, t),
            tropr::vertex::EdgeId::V { s, t } => ("V", s, t),
        };
        csv.push_str(&format!("{kind},{s},{t},{},{},{}\n", e.family().name(), e.rank(), texts(e.coords()).join(";")));
    }
    csv
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

fn vertex_run(boundary: &Path, window: &str, field: Option<&Path>, csv: Option<&Path>, out: Option<&Path>) -> CliResult<bool> {
    let (cols, rows) = parse_window(window)?;
    let b: Boundary<Rat> = read_json(boundary)?;
    if b.west.len() < rows || b.north.len() < cols {
        return Err(CliError::Config(format!(
            "window {cols}x{rows} needs {rows} west and {cols} north edges; the boundary has {} and {}",
            b.west.len(),
            b.north.len()
        )));
    }
    let b = Boundary { west: b.west[..rows].to_vec(), north: b.north[..cols].to_vec() };
    let (st, mut checks) = lattice_checks(&b)?;
    let mut doc = json!({
        "window": { "cols": cols, "rows": rows },
        "state": st,
        "levels": level_json(&st)?,
        "max_vertex_residual": st.max_vertex_residual()?,
    });
    if let Some(p) = csv {
        write_file(&with_suffix(p, "-edges.csv"), &edge_rows(&st))?;
    }
    if let Some(fp) = field {
        let v = read_value(fp)?;
        let spec = io::field_spec::<GaussRat>(&v)?;
        let g = io::fermion_params::<GaussRat>(v.get("params").ok_or_else(|| CliError::Config("the --field file has no \"params\" block".into()))?)?;
        let f = tau_field(&spec, &g)?;
        let failing = f.failing_vertices()?;
        let mismatches = f.evolve_mismatches()?;
        checks.push(cases::Check { name: "face equations".into(), passed: failing.is_empty(), detail: Some(format!("{} failing vertices", failing.len())) });
        checks.push(cases::Check { name: "extracted edges".into(), passed: mismatches.is_empty(), detail: Some(format!("{} mismatches", mismatches.len())) });
        doc["tau_check"] = json!({ "faces": f.faces.len(), "failing_vertices": failing, "mismatches": mismatches });
        if let Some(p) = csv {
            let mut text = String::from("s2,t2,taus\n");
            for ((s2, t2), taus) in &f.faces {
                text.push_str(&format!("{s2},{t2},{}\n", texts(taus).join(";")));
            }
            write_file(&with_suffix(p, "-faces.csv"), &text)?;
        }
    }
    let ok = all_pass(&checks);
    doc["checks"] = checks_json(&checks);
    emit(&doc, out)?;
    Ok(ok)
}

fn trop(c: &TropCmd, out: Option<&Path>) -> CliResult<bool> {
    match c {
        TropCmd::Apply(e) => {
            let (x, y, _) = e.load::<TropVal>()?;
            let r = trop_r(&x, &y)?;
            let back = trop_r(&r.x, &r.y)?;
            let ok = back.x == x && back.y == y;
            emit(&json!({ "x": element_json(&r.x), "y": element_json(&r.y), "inverse_ok": ok }), out)?;
            Ok(ok)
        }
        TropCmd::Ybe(e) => {
            let (x, y, z) = e.load::<TropVal>()?;
            let z = z.ok_or_else(|| CliError::Config("trop ybe needs z".into()))?;
            let checks = trop_checks(&x, &y, Some(&z))?;
            let ok = all_pass(&checks);
            emit(&json!({ "passed": ok, "checks": checks }), out)?;
            Ok(ok)
        }
        TropCmd::UdCheck { elements, eps } => {
            let (x, y, _) = elements.load::<TropVal>()?;
            let eps = match eps {
                Some(v) => v.clone(),
                None => elements.eps()?.unwrap_or_else(|| vec![1e-2, 1e-3, 1e-4]),
            };
            let (rows, checks) = ud_checks(&x, &y, &eps)?;
            let ok = all_pass(&checks);
            emit(&json!({ "passed": ok, "rows": rows }), out)?;
            Ok(ok)
        }
    }
}
