//! Seeded verification suites. Case `i` of a run is drawn from
//! `CaseGen::new(seed, i)`, so a report depends only on the configuration.

use crate::cases::{
    data_checks, element_json, failure_message, identity_checks, lattice_checks, r_checks, r_checks_numeric, reduce, trop_checks,
    ud_checks, Check, IdentityCase,
};
use crate::io::{texts, time_json, CliError, CliResult};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::time::{Duration, Instant};
use tropr::crystal::{level, Family};
use tropr::fermion::{GridSpec, ReductionInput, ReductionMode, TimeArray};
use tropr::gen::CaseGen;
use tropr::numerics::{rat, Field, ScalarText};
use tropr::vertex::Boundary;
use tropr::{BigC, GaussRat, Rat};

pub const SUITES: [&str; 14] = [
    "inversion",
    "ybe",
    "toda",
    "lax",
    "sigma",
    "positivity",
    "bilinear",
    "uv",
    "theorem",
    "fermion-identities",
    "reduction",
    "vertex",
    "trop",
    "ud",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Numeric,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Numeric => "numeric",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteConfig {
    pub suite: String,
    pub family: Family,
    pub n: usize,
    pub cases: u64,
    pub seed: u64,
    pub mode: Mode,
    /// Working precision in bits; only meaningful in numeric mode.
    pub precision: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub index: u64,
    pub message: String,
    /// Command that re-runs this case from its serialized input.
    pub replay: String,
    pub case: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub config: SuiteConfig,
    pub passed: u64,
    pub failed: u64,
    pub first_failure: Option<Failure>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

/// Outcome of one case: the serialized input and either the checks or the error it raised.
struct Outcome {
    case: Value,
    result: Result<Vec<Check>, String>,
}

impl Outcome {
    fn of(case: Value, r: CliResult<Vec<Check>>) -> Self {
        Outcome { case, result: r.map_err(|e| e.to_string()) }
    }

    fn message(&self) -> Option<String> {
        match &self.result {
            Ok(c) => failure_message(c),
            Err(e) => Some(e.clone()),
        }
    }
}

fn numeric_tolerance(bits: usize) -> f64 {
    2f64.powi(-(bits as i32) / 3)
}

fn replay_command(cfg: &SuiteConfig) -> &'static str {
    let numeric = cfg.mode == Mode::Numeric;
    match cfg.suite.as_str() {
        "inversion" | "ybe" if numeric => "tropr r-apply --checks --mode numeric --input <file>",
        "inversion" | "ybe" | "toda" | "lax" | "sigma" | "positivity" => "tropr r-apply --checks --input <file>",
        "bilinear" | "uv" | "theorem" => "tropr bilinear verify-theorem --input <file>",
        "fermion-identities" if numeric => "tropr tau identities --mode numeric --input <file>",
        "fermion-identities" => "tropr tau identities --input <file>",
        "reduction" if numeric => "tropr tau reduce --mode numeric --spec <file>",
        "reduction" => "tropr tau reduce --spec <file>",
        "vertex" => "tropr vertex run --window 3x3 --boundary <file>",
        "trop" => "tropr trop ybe --input <file>",
        _ => "tropr trop ud-check --input <file>",
    }
}

fn config_error(msg: String) -> CliError {
    CliError::Config(msg)
}

/// Rejects unknown suites and family, rank or mode combinations a suite cannot run.
pub fn validate(cfg: &SuiteConfig) -> CliResult<()> {
    let s = cfg.suite.as_str();
    if !SUITES.contains(&s) {
        return Err(config_error(format!("unknown suite {s:?}; expected one of {}", SUITES.join(", "))));
    }
    let min_rank = match cfg.family {
        Family::A1 => 2,
        Family::D1 => 3,
        Family::A2 => 2,
        Family::C1 => 1,
    };
    if cfg.n < min_rank {
        return Err(config_error(format!("{} needs n >= {min_rank}", cfg.family.name())));
    }
    let needs = |f: Family| -> CliResult<()> {
        if cfg.family != f {
            return Err(config_error(format!("suite {s} runs on family {} only", f.name())));
        }
        Ok(())
    };
    match s {
        "toda" | "lax" => needs(Family::A1)?,
        "sigma" | "bilinear" | "uv" | "theorem" | "vertex" => needs(Family::D1)?,
        "trop" | "ud" if matches!(cfg.family, Family::A2 | Family::C1) => {
            return Err(config_error(format!("suite {s} runs on families A1 and D1")));
        }
        _ => {}
    }
    let numeric_ok = matches!(s, "inversion" | "ybe" | "fermion-identities" | "reduction");
    if cfg.mode == Mode::Numeric && !numeric_ok {
        return Err(config_error(format!("suite {s} is exact only; numeric mode covers inversion, ybe, fermion-identities, reduction")));
    }
    Ok(())
}

pub fn run_suite(cfg: &SuiteConfig) -> CliResult<(Report, Duration)> {
    validate(cfg)?;
    let start = Instant::now();
    let outcomes: Vec<(u64, Outcome)> = (0..cfg.cases).into_par_iter().map(|i| (i, run_case(cfg, i))).collect();
    let elapsed = start.elapsed();
    let mut report = Report { config: cfg.clone(), passed: 0, failed: 0, first_failure: None };
    for (index, o) in outcomes {
        match o.message() {
            None => report.passed += 1,
            Some(message) => {
                report.failed += 1;
                if report.first_failure.is_none() {
                    report.first_failure = Some(Failure { index, message, replay: replay_command(cfg).into(), case: o.case });
                }
            }
        }
    }
    Ok((report, elapsed))
}

fn run_case(cfg: &SuiteConfig, index: u64) -> Outcome {
    let mut gen = CaseGen::new(cfg.seed, index);
    let generated = match cfg.suite.as_str() {
        "bilinear" | "uv" | "theorem" => gen.solved_data(cfg.n).map(|d| {
            let case = serde_json::to_value(&d).expect("tau data serializes");
            Outcome::of(case, data_checks(&d, Some(&cfg.suite)))
        }),
        "fermion-identities" => Ok(identity_case(cfg, index, &mut gen)),
        "reduction" => Ok(reduction_case(cfg, &mut gen)),
        "vertex" => vertex_case(cfg, &mut gen),
        "trop" => trop_case(cfg, &mut gen),
        "ud" => ud_case(cfg, &mut gen),
        _ => r_case(cfg, &mut gen),
    };
    generated.unwrap_or_else(|e| Outcome { case: Value::Null, result: Err(format!("case generation: {e}")) })
}

fn r_case(cfg: &SuiteConfig, gen: &mut CaseGen) -> tropr::Result<Outcome> {
    let (x, y, z) = if cfg.suite == "ybe" {
        let [x, y, z] = gen.triple(cfg.family, cfg.n)?;
        (x, y, Some(z))
    } else {
        let (x, y) = gen.pair(cfg.family, cfg.n)?;
        (x, y, None)
    };
    let mut case = json!({ "x": element_json(&x), "y": element_json(&y) });
    if let Some(z) = &z {
        case["z"] = element_json(z);
    }
    let checks = match cfg.mode {
        Mode::Exact => r_checks(&x, &y, z.as_ref(), Some(&cfg.suite)),
        Mode::Numeric => r_checks_numeric(&x, &y, z.as_ref(), Some(&cfg.suite), numeric_tolerance(cfg.precision)),
    };
    Ok(Outcome::of(case, checks))
}

fn trop_case(cfg: &SuiteConfig, gen: &mut CaseGen) -> tropr::Result<Outcome> {
    let (f, n) = (cfg.family, cfg.n);
    let t = loop {
        let t = [gen.trop_element(f, n, -5, 5)?, gen.trop_element(f, n, -5, 5)?, gen.trop_element(f, n, -5, 5)?];
        if f == Family::A1 {
            break t;
        }
        // The max-plus D map is defined where the first level strictly exceeds the second.
        let lv: Vec<Option<Rat>> = t.iter().map(|x| level(x).map(|v| v.finite().cloned())).collect::<tropr::Result<_>>()?;
        if lv[0] > lv[1] && lv[1] > lv[2] {
            break t;
        }
    };
    let case = json!({ "x": element_json(&t[0]), "y": element_json(&t[1]), "z": element_json(&t[2]) });
    Ok(Outcome::of(case, trop_checks(&t[0], &t[1], Some(&t[2]))))
}

const UD_EPS: [f64; 3] = [1e-2, 1e-3, 1e-4];

fn ud_case(cfg: &SuiteConfig, gen: &mut CaseGen) -> tropr::Result<Outcome> {
    let x = gen.trop_element(cfg.family, cfg.n, -5, 5)?;
    let y = gen.trop_element(cfg.family, cfg.n, -5, 5)?;
    let case = json!({ "x": element_json(&x), "y": element_json(&y), "eps": UD_EPS });
    Ok(Outcome::of(case, ud_checks(&x, &y, &UD_EPS).map(|(_, c)| c)))
}

fn vertex_case(cfg: &SuiteConfig, gen: &mut CaseGen) -> tropr::Result<Outcome> {
    let mut line = || (0..3).map(|_| gen.element(Family::D1, cfg.n)).collect::<tropr::Result<Vec<_>>>();
    let b = Boundary { west: line()?, north: line()? };
    let case = serde_json::to_value(&b).expect("boundary serializes");
    Ok(Outcome::of(case, lattice_checks(&b).map(|(_, c)| c)))
}

const CHARGE_SHAPES: [(usize, usize); 5] = [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];

fn real(r: Rat) -> GaussRat {
    GaussRat::new(r, rat(0, 1))
}

fn imag(r: Rat) -> GaussRat {
    GaussRat::new(rat(0, 1), r)
}

fn big(z: &GaussRat) -> BigC {
    BigC::new(Field::from_rat(&z.re), Field::from_rat(&z.im))
}

/// Draws until the point avoids every momentum pole.
fn identity_case(cfg: &SuiteConfig, index: u64, gen: &mut CaseGen) -> Outcome {
    let (nn, m) = CHARGE_SHAPES[(index % 5) as usize];
    let mut last = String::new();
    for _ in 0..64 {
        let params = match gen.fermion_params(nn, m) {
            Ok(p) => p,
            Err(e) => return Outcome { case: Value::Null, result: Err(e.to_string()) },
        };
        let case = IdentityCase {
            params,
            x: gen.time(2),
            odd: gen.odd_time(2),
            y: gen.odd_time(1),
            u: [real(gen.signed(13)), real(gen.signed(13)), real(gen.signed(13))],
            c: real(rat(gen.int(2, 9), 1) + gen.signed(5)),
        };
        if case.c == real(rat(0, 1)) {
            continue;
        }
        let checks = match cfg.mode {
            Mode::Exact => case.identities().map(|c| identity_checks(&c, None)),
            Mode::Numeric => case.map(big).identities().map(|c| identity_checks(&c, Some(numeric_tolerance(cfg.precision)))),
        };
        match checks {
            Err(tropr::Error::PoleAtMomentum(p)) => last = p,
            Err(tropr::Error::DeltaPole) => last = "coincident momenta".into(),
            r => return Outcome::of(case.to_json(), r.map_err(CliError::from)),
        }
    }
    Outcome { case: Value::Null, result: Err(format!("no pole-free point in 64 draws (last pole {last})")) }
}

fn grid_json(spec: &GridSpec<GaussRat>, input: &ReductionInput<GaussRat>) -> Value {
    json!({
        "n": spec.n,
        "K": spec.big_k.to_text(),
        "L": spec.big_l.to_text(),
        "a": texts(&spec.a),
        "eta": time_json(&spec.eta),
        "y": time_json(&spec.y),
        "reduction": {
            "b": texts(&input.b),
            "p": texts(&input.p),
            "q_guess": input.q_guess.iter().map(|q| q.as_ref().map(|v| v.to_text())).collect::<Vec<_>>(),
            "c": texts(&input.c),
            "p_prime": texts(&input.p_prime),
        },
    })
}

/// Exact mode works on a grid with a rational partner momentum; numeric mode
/// draws the grid and momenta freely and root-finds the partners.
fn reduction_case(cfg: &SuiteConfig, gen: &mut CaseGen) -> Outcome {
    let mut last = String::new();
    for _ in 0..64 {
        let (spec, input) = match cfg.mode {
            Mode::Exact => {
                let a = gen.int(2, 9);
                let eta = TimeArray::eps(real(rat(1, a))) - TimeArray::eps(real(rat(-1, a)));
                let spec = GridSpec::new(3, real(rat(7, 1)), real(rat(2, 1)), vec![real(rat(5, 1))]).and_then(|s| s.with_times(eta, TimeArray::zero()));
                let input = ReductionInput {
                    b: vec![real(gen.signed(9))],
                    p: vec![real(rat(3, 1))],
                    q_guess: vec![None],
                    c: vec![imag(gen.signed(9))],
                    p_prime: vec![real(rat(3, 1))],
                };
                (spec, input)
            }
            Mode::Numeric => {
                let n = cfg.n.max(3);
                let a: Vec<GaussRat> = (0..n - 2).map(|k| real(rat(4 + 3 * k as i64, 1) + gen.positive() / rat(50, 1))).collect();
                let eta = TimeArray::eps(real(rat(1, 11))) - TimeArray::eps(real(rat(-1, 11)));
                let spec = GridSpec::new(n, real(rat(gen.int(15, 30), 2)), real(rat(gen.int(2, 5), 1) + rat(1, 3)), a)
                    .and_then(|s| s.with_times(eta, TimeArray::zero()));
                let input = ReductionInput {
                    b: vec![real(gen.signed(5))],
                    p: vec![real(rat(gen.int(1, 9), 7))],
                    q_guess: vec![None],
                    c: vec![imag(gen.signed(5))],
                    p_prime: vec![real(rat(gen.int(1, 9), 11))],
                };
                (spec, input)
            }
        };
        let spec = match spec {
            Ok(s) => s,
            Err(e) => return Outcome { case: Value::Null, result: Err(e.to_string()) },
        };
        let case = grid_json(&spec, &input);
        let result = match cfg.mode {
            Mode::Exact => reduce(&spec, &input, ReductionMode::Exact, None).map(|r| r.checks),
            Mode::Numeric => {
                let bi = ReductionInput {
                    b: input.b.iter().map(big).collect(),
                    p: input.p.iter().map(big).collect(),
                    q_guess: vec![None; input.p.len()],
                    c: input.c.iter().map(big).collect(),
                    p_prime: input.p_prime.iter().map(big).collect(),
                };
                reduce(&spec.map(big), &bi, ReductionMode::Numeric, Some(numeric_tolerance(cfg.precision))).map(|r| r.checks)
            }
        };
        match result {
            Err(tropr::Error::PoleAtMomentum(p) | tropr::Error::PoleInA(p)) => last = p,
            Err(tropr::Error::DeltaPole) => last = "coincident momenta".into(),
            // A vanishing tau is a non-generic point, not a failure.
            Err(tropr::Error::ZeroInput(z)) => last = z,
            r => return Outcome::of(case, r.map_err(CliError::from)),
        }
    }
    Outcome { case: Value::Null, result: Err(format!("no generic draw in 64 attempts (last: {last})")) }
}

/// Tab-free one-line summary.
pub fn text_summary(r: &Report, elapsed: Duration) -> String {
    let c = &r.config;
    let mut s = format!(
        "suite {} family {} n {} seed {} mode {}: {}/{} pass ({:.2} s)",
        c.suite,
        c.family.name(),
        c.n,
        c.seed,
        c.mode.name(),
        r.passed,
        r.passed + r.failed,
        elapsed.as_secs_f64()
    );
    if let Some(f) = &r.first_failure {
        s.push_str(&format!("\nfirst failure: case {}: {}\nreplay: {}", f.index, f.message, f.replay));
    }
    s
}

pub fn csv_summary(r: &Report) -> String {
    let c = &r.config;
    let first = r.first_failure.as_ref().map_or(String::new(), |f| f.index.to_string());
    format!(
        "suite,family,n,seed,mode,cases,passed,failed,first_failure\n{},{},{},{},{},{},{},{},{}",
        c.suite,
        c.family.name(),
        c.n,
        c.seed,
        c.mode.name(),
        c.cases,
        r.passed,
        r.failed,
        first
    )
}
