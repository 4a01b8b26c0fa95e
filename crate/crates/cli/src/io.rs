//! JSON input schemas and output writing.
//!
//! Scalars are JSON strings in canonical text form (`"3/2"`, `"1/2-3i"`,
//! `"-inf"`) or plain JSON integers. Time arrays are lists of
//! `[momentum, multiplicity]` pairs standing for `sum k * eps(a)`.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::fmt;
use std::io::Write;
use std::path::Path;
use tropr::bilinear::SolveInput;
use tropr::crystal::{CrystalElement, Family};
use tropr::fermion::{FermionParams, GridSpec, ReductionInput, TimeArray};
use tropr::numerics::{Field, ScalarText, Semifield};
use tropr::vertex::TauFieldSpec;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Core(tropr::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<tropr::Error> for CliError {
    fn from(e: tropr::Error) -> Self {
        match e {
            tropr::Error::Config(m) => CliError::Config(m),
            e => CliError::Core(e),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(format!("bad JSON: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn read_value(path: &Path) -> CliResult<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    Ok(serde_json::from_value(read_value(path)?)?)
}

/// Accepts either inline JSON or `@path`.
pub fn inline_or_file(arg: &str) -> CliResult<Value> {
    match arg.strip_prefix('@') {
        Some(p) => read_value(Path::new(p)),
        None => Ok(serde_json::from_str(arg)?),
    }
}

/// Writes pretty JSON to `output`, or to stdout.
pub fn emit<T: Serialize>(value: &T, output: Option<&Path>) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value)?;
    emit_text(&text, output)
}

pub fn emit_text(text: &str, output: Option<&Path>) -> CliResult<()> {
    match output {
        Some(p) => std::fs::write(p, format!("{text}\n")).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io(format!("stdout: {e}"))),
                _ => Ok(()),
            }
        }
    }
}

pub fn scalar<S: ScalarText>(v: &Value) -> CliResult<S> {
    match v {
        Value::String(s) => Ok(S::from_text(s)?),
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(S::from_text(&n.to_string())?),
        other => Err(CliError::Config(format!("expected an exact scalar (string or integer), got {other}"))),
    }
}

pub fn scalars<S: ScalarText>(v: &Value) -> CliResult<Vec<S>> {
    match v {
        Value::Array(a) => a.iter().map(scalar).collect(),
        other => Err(CliError::Config(format!("expected an array of scalars, got {other}"))),
    }
}

fn field<'a>(v: &'a Value, key: &str) -> CliResult<&'a Value> {
    v.get(key).ok_or_else(|| CliError::Config(format!("missing field {key:?}")))
}

fn opt_field<'a>(v: &'a Value, key: &str) -> Option<&'a Value> {
    v.get(key).filter(|x| !x.is_null())
}

/// An element is either a full object `{family, n, coords}` or a bare
/// coordinate array read with the family and rank given on the command line.
pub fn element<S: Semifield + ScalarText>(v: &Value, shape: Option<(Family, usize)>) -> CliResult<CrystalElement<S>> {
    match v {
        Value::Array(_) => {
            let (f, n) = shape.ok_or_else(|| CliError::Config("a bare coordinate array needs --family and --n".into()))?;
            Ok(CrystalElement::new(f, n, scalars(v)?)?)
        }
        Value::Object(_) => {
            let el: CrystalElement<S> = serde_json::from_value(v.clone())?;
            if let Some((f, n)) = shape {
                if el.family() != f || el.rank() != n {
                    return Err(CliError::Config(format!(
                        "element is {} n={} but --family {} --n {n} was given",
                        el.family().name(),
                        el.rank(),
                        f.name()
                    )));
                }
            }
            Ok(el)
        }
        other => Err(CliError::Config(format!("expected an element, got {other}"))),
    }
}

pub fn time_array<C: Field + ScalarText>(v: Option<&Value>) -> CliResult<TimeArray<C>> {
    let Some(v) = v else { return Ok(TimeArray::zero()) };
    let items = v.as_array().ok_or_else(|| CliError::Config("a time array is a list of [a, k] pairs".into()))?;
    let mut terms = Vec::with_capacity(items.len());
    for it in items {
        match it.as_array().map(|p| p.as_slice()) {
            Some([a, k]) => {
                let k = k.as_i64().ok_or_else(|| CliError::Config(format!("multiplicity {k} is not an integer")))?;
                terms.push((scalar::<C>(a)?, k));
            }
            _ => return Err(CliError::Config(format!("time term {it} is not an [a, k] pair"))),
        }
    }
    Ok(TimeArray::from_terms(terms))
}

pub fn time_json<C: Field + ScalarText>(t: &TimeArray<C>) -> Value {
    Value::Array(t.terms().iter().map(|(a, k)| serde_json::json!([a.to_text(), k])).collect())
}

pub fn texts<S: ScalarText>(v: &[S]) -> Vec<String> {
    v.iter().map(S::to_text).collect()
}

/// `{n, K, L, a, eta?, y?}`.
pub fn grid_spec<C: Field + ScalarText>(v: &Value) -> CliResult<GridSpec<C>> {
    let n = field(v, "n")?.as_u64().ok_or_else(|| CliError::Config("n must be a positive integer".into()))? as usize;
    let spec = GridSpec::new(n, scalar(field(v, "K")?)?, scalar(field(v, "L")?)?, scalars(field(v, "a")?)?)?;
    Ok(spec.with_times(time_array(opt_field(v, "eta"))?, time_array(opt_field(v, "y"))?)?)
}

/// `{n, K: [per column], L: [per row], a, base?, y?}`.
pub fn field_spec<C: Field + ScalarText>(v: &Value) -> CliResult<TauFieldSpec<C>> {
    let n = field(v, "n")?.as_u64().ok_or_else(|| CliError::Config("n must be a positive integer".into()))? as usize;
    Ok(TauFieldSpec {
        n,
        big_k: scalars(field(v, "K")?)?,
        big_l: scalars(field(v, "L")?)?,
        a: scalars(field(v, "a")?)?,
        base: time_array(opt_field(v, "base"))?,
        y: time_array(opt_field(v, "y"))?,
    })
}

/// `{b, c, p, q, b_hat?, c_hat?}`; the hatted couplings default to `b`, `c`.
pub fn fermion_params<C: Field + ScalarText>(v: &Value) -> CliResult<FermionParams<C>> {
    let b: Vec<C> = scalars(field(v, "b")?)?;
    let c: Vec<C> = scalars(field(v, "c")?)?;
    let g = FermionParams {
        b_hat: match opt_field(v, "b_hat") {
            Some(x) => scalars(x)?,
            None => b.clone(),
        },
        c_hat: match opt_field(v, "c_hat") {
            Some(x) => scalars(x)?,
            None => c.clone(),
        },
        b,
        c,
        p: scalars(field(v, "p")?)?,
        q: scalars(field(v, "q")?)?,
    };
    g.check_shape()?;
    Ok(g)
}

pub fn params_json<C: Field + ScalarText>(g: &FermionParams<C>) -> Value {
    serde_json::json!({
        "b": texts(&g.b),
        "b_hat": texts(&g.b_hat),
        "c": texts(&g.c),
        "c_hat": texts(&g.c_hat),
        "p": texts(&g.p),
        "q": texts(&g.q),
    })
}

/// `{b, p, q_guess?, c, p_prime}`.
pub fn reduction_input<C: Field + ScalarText>(v: &Value) -> CliResult<ReductionInput<C>> {
    let b: Vec<C> = scalars(field(v, "b")?)?;
    let q_guess = match opt_field(v, "q_guess") {
        Some(Value::Array(a)) => a.iter().map(|x| if x.is_null() { Ok(None) } else { scalar(x).map(Some) }).collect::<CliResult<_>>()?,
        Some(other) => return Err(CliError::Config(format!("q_guess must be an array, got {other}"))),
        None => vec![None; b.len()],
    };
    Ok(ReductionInput { b, p: scalars(field(v, "p")?)?, q_guess, c: scalars(field(v, "c")?)?, p_prime: scalars(field(v, "p_prime")?)? })
}

/// Free data of the unique-solution theorem; the key names follow the tau data schema.
#[derive(Serialize, Deserialize)]
pub struct SolveJson {
    pub n: usize,
    #[serde(rename = "N")]
    pub north: Vec<String>,
    #[serde(rename = "W")]
    pub w: Vec<String>,
    pub tau1: Vec<String>,
    pub tau2: Vec<String>,
    pub tau3: Vec<String>,
    pub lambda: Value,
    pub kappa: Value,
    pub alpha: String,
    pub beta: String,
}

impl SolveJson {
    pub fn into_input<F: Field + ScalarText>(self) -> CliResult<SolveInput<F>> {
        let p = |v: &[String]| v.iter().map(|s| F::from_text(s)).collect::<tropr::Result<Vec<F>>>();
        Ok(SolveInput {
            n: self.n,
            north: p(&self.north)?,
            w: p(&self.w)?,
            tau1: p(&self.tau1)?,
            tau2: p(&self.tau2)?,
            tau3: p(&self.tau3)?,
            lambda: element(&self.lambda, Some((Family::D1, self.n)))?,
            kappa: element(&self.kappa, Some((Family::D1, self.n)))?,
            alpha: F::from_text(&self.alpha)?,
            beta: F::from_text(&self.beta)?,
        })
    }
}

pub fn parse_family(s: &str) -> CliResult<Family> {
    match s {
        "A1" => Ok(Family::A1),
        "D1" => Ok(Family::D1),
        "A2" => Ok(Family::A2),
        "C1" => Ok(Family::C1),
        _ => Err(CliError::Config(format!("unknown family {s:?}; expected one of A1, D1, A2, C1"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;
    use tropr::numerics::rat;
    use tropr::{GaussRat, Rat};

    #[test]
    fn scalars_accept_strings_and_integers() {
        let v: Vec<Rat> = scalars(&json!(["3/2", 4, "-1"])).unwrap();
        assert_eq!(v, vec![rat(3, 2), rat(4, 1), rat(-1, 1)]);
        assert!(scalar::<Rat>(&json!(1.5)).is_err());
    }

    #[test]
    fn bare_and_full_elements_agree() {
        let bare: CrystalElement<Rat> = element(&json!([1, 2, 3]), Some((Family::A1, 3))).unwrap();
        let full: CrystalElement<Rat> = element(&json!({"family": "A1", "n": 3, "coords": ["1", "2", "3"]}), None).unwrap();
        assert_eq!(bare, full);
        assert!(element::<Rat>(&json!([1, 2, 3]), None).is_err());
        assert!(element::<Rat>(&json!({"family": "A1", "n": 3, "coords": ["1", "2", "3"]}), Some((Family::D1, 3))).is_err());
    }

    #[test]
    fn time_arrays_round_trip() {
        let t: TimeArray<GaussRat> = time_array(Some(&json!([["1/9", 1], ["-1/9", -1]]))).unwrap();
        assert!(t.is_odd());
        let back: TimeArray<GaussRat> = time_array(Some(&time_json(&t))).unwrap();
        assert_eq!(back, t);
        assert!(time_array::<Rat>(Some(&json!([["1", 1.5]]))).is_err());
    }

    #[test]
    fn hatted_couplings_default() {
        let g: FermionParams<GaussRat> = fermion_params(&json!({"b": ["1/2"], "c": [], "p": [3, 4], "q": []})).unwrap();
        assert_eq!(g.b_hat, g.b);
        let back: FermionParams<GaussRat> = fermion_params(&params_json(&g)).unwrap();
        assert_eq!(back, g);
    }
}
