//! Command-line front end: JSON in, canonical JSON (or CSV) out.

pub mod check;
pub mod json;

use std::io::Read;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use json::{At, Cursor, DecodeError, JsonScalar};
use zastava::poisson::{
    all_triples, bracket, jacobi_check, parse_expr, CorruptedTable, IdentityCheck, IdentityReport,
    Session, StandardTable,
};
use zastava::polyalg::RootFinder;
use zastava::rootdata::RootSystem;
use zastava::scalar::{Rational, Scalar};
use zastava::superpotential::{Gradient, NewtonOptions, SuperParams, Variant};
use zastava::whittaker::{ext_class, ext_moments, kronecker_check, ExtRoute};
use zastava::zastava::{from_map_numeric, map_resultant, verify_b2_plucker, ZastavaPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "zastava", version, about = "Computations on the étale chart of zastava spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Input file, `-` for stdin, or inline JSON.
    #[arg(long, global = true)]
    pub input: Option<String>,
    /// Master seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Numeric tolerance override.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Superpotential sign variant, e.g. `+-` or `(+,+)`.
    #[arg(long, global = true)]
    pub variant: Option<String>,
    /// Root system used when the input does not name one, e.g. `B2`.
    #[arg(long, global = true)]
    pub rs: Option<String>,
    /// Series order for `extpair`.
    #[arg(long, global = true)]
    pub order: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Converts chart coordinates to `(Q, R)` and back (rank one).
    Convert,
    /// Glues two points `{"p": .., "q": ..}` with disjoint supports.
    Glue,
    /// Applies the Cartan involution.
    Involute,
    /// Evaluates the boundary function `F²` and its casework checks.
    Boundary,
    /// Factorization morphism to colored divisors.
    Pi,
    /// Rank-one point carried by one node.
    Project {
        /// 0-based node index.
        #[arg(long)]
        node: usize,
    },
    /// Extension class coefficients `c_k`, by closed form and by oracle.
    Extpair,
    /// Hankel and resultant identities for a rank-one point.
    Hankel,
    /// Poisson bracket of two expressions `{"alpha", "f", "g", "expect"?}`.
    Bracket,
    /// Jacobi identity on all generator triples of `{"alpha"}`.
    Jacobi {
        /// Use a deliberately corrupted bracket table.
        #[arg(long)]
        negative_control: bool,
    },
    /// Superpotential computations on `{"params", "w", "s"?}`.
    Superpotential {
        #[command(subcommand)]
        op: SuperOp,
    },
    /// Seeded identity-check suite.
    Check {
        /// Trials per family, overriding the defaults.
        #[arg(long)]
        trials: Option<usize>,
        /// Comma-separated family ids.
        #[arg(long)]
        only: Option<String>,
        /// Run a single trial index.
        #[arg(long)]
        trial: Option<usize>,
        /// Add the corrupted-bracket Jacobi family.
        #[arg(long)]
        negative_control: bool,
    },
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum SuperOp {
    /// Value and gradients of `W` and Φ.
    Eval,
    /// Closed-form critical section with Newton cross-checks.
    Critical,
    /// Lagrangian defect of the critical section.
    Defect,
    /// Gradient of `W` along the section against the gradient of Φ.
    Compare,
    /// Exponent data of the open-stratum generator.
    Exponents,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_IDENTITY_FAILURE: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    /// Schema violation at a JSON pointer.
    Schema(DecodeError),
    /// A module error, reported by its stable name.
    Domain { name: String, message: String },
    /// Unreadable input or bad flags.
    Usage(String),
}

impl CliError {
    fn domain(name: &str, e: impl std::fmt::Display) -> Self {
        CliError::Domain {
            name: name.to_string(),
            message: e.to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            CliError::Schema(e) => json!({
                "error": "SchemaViolation",
                "pointer": e.pointer,
                "message": e.message,
            }),
            CliError::Domain { name, message } => json!({ "error": name, "message": message }),
            CliError::Usage(m) => json!({ "error": "UsageError", "message": m }),
        }
    }
}

impl From<DecodeError> for CliError {
    fn from(e: DecodeError) -> Self {
        CliError::Schema(e)
    }
}

macro_rules! domain_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::domain(e.name(), &e)
            }
        }
    )*};
}

domain_from!(
    zastava::zastava::ZastavaError,
    zastava::whittaker::WhittakerError,
    zastava::poisson::PoissonError,
    zastava::superpotential::SuperError,
    zastava::rootdata::RootDataError,
    zastava::polyalg::PolyError
);

/// A report plus whether every identity in it held.
pub struct Report {
    pub value: Value,
    pub ok: bool,
}

impl Report {
    fn ok(value: Value) -> Self {
        Report { value, ok: true }
    }
}

type CResult<T> = Result<T, CliError>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    run_cli(&cli)
}

pub fn run_cli(cli: &Cli) -> Outcome {
    match dispatch(cli) {
        Ok(report) => match render(&report.value, cli.format) {
            Ok(stdout) => Outcome {
                code: if report.ok { EXIT_OK } else { EXIT_IDENTITY_FAILURE },
                stdout,
                stderr: String::new(),
            },
            Err(e) => Outcome {
                code: EXIT_INPUT_ERROR,
                stdout: String::new(),
                stderr: e,
            },
        },
        Err(e) => {
            let v = e.to_json();
            let message = v["message"].as_str().unwrap_or_default();
            let stderr = match &e {
                CliError::Schema(d) => format!("error at {}: {message}\n", d.pointer),
                _ => format!("error: {}: {message}\n", v["error"].as_str().unwrap_or_default()),
            };
            Outcome {
                code: EXIT_INPUT_ERROR,
                stdout: json::to_canonical(&v),
                stderr,
            }
        }
    }
}

fn render(v: &Value, format: Format) -> Result<String, String> {
    match format {
        Format::Json => Ok(json::to_canonical(v)),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["path", "value"]).map_err(|e| e.to_string())?;
            let mut rows = Vec::new();
            flatten("", v, &mut rows);
            for (path, value) in rows {
                w.write_record([path, value]).map_err(|e| e.to_string())?;
            }
            let bytes = w.into_inner().map_err(|e| e.to_string())?;
            String::from_utf8(bytes).map_err(|e| e.to_string())
        }
    }
}

/// Leaves of a JSON value keyed by their JSON pointer.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) if !m.is_empty() => {
            for (k, x) in m {
                flatten(&format!("{prefix}/{}", k.replace('~', "~0").replace('/', "~1")), x, out);
            }
        }
        Value::Array(a) if !a.is_empty() => {
            for (k, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}/{k}"), x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn read_input(cli: &Cli) -> CResult<Cursor> {
    let text = match cli.input.as_deref() {
        None | Some("-") => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::Usage(format!("reading stdin: {e}")))?;
            s
        }
        Some(s) if s.trim_start().starts_with(['{', '[']) => s.to_string(),
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("reading {path}: {e}")))?,
    };
    let value: Value = serde_json::from_str(&text).map_err(|e| {
        CliError::Schema(DecodeError {
            pointer: "/".into(),
            message: format!("invalid JSON: {e}"),
        })
    })?;
    Ok(Cursor::new(value))
}

fn fallback_rs(cli: &Cli) -> CResult<Option<RootSystem>> {
    cli.rs
        .as_deref()
        .map(|name| RootSystem::named(name).map_err(CliError::from))
        .transpose()
}

fn variant_override(cli: &Cli) -> CResult<Option<Variant>> {
    cli.variant
        .as_deref()
        .map(|v| v.parse().map_err(CliError::Usage))
        .transpose()
}

/// A point decoded exactly when every scalar is a rational string, else
/// numerically.
enum AnyPoint {
    Exact(ZastavaPoint<Rational>),
    Numeric(ZastavaPoint<Complex64>),
}

fn decode_any_point(at: At<'_>, rs: Option<&RootSystem>) -> CResult<AnyPoint> {
    match json::decode_point::<Rational>(at, rs) {
        Ok(p) => Ok(AnyPoint::Exact(p)),
        Err(exact) if is_type_error(&exact) => Ok(AnyPoint::Numeric(json::decode_point(at, rs)?)),
        Err(exact) => Err(exact.into()),
    }
}

fn is_type_error(e: &DecodeError) -> bool {
    e.message.starts_with("expected a rational")
}

fn close<S: Scalar>(a: &S, b: &S, tol: f64) -> bool {
    if S::EXACT {
        a == b
    } else {
        (a.to_complex() - b.to_complex()).norm() <= tol * a.magnitude().max(b.magnitude()).max(1.0)
    }
}

pub fn dispatch(cli: &Cli) -> CResult<Report> {
    let tol = cli.tol.unwrap_or(1e-12);
    match &cli.command {
        Command::Check {
            trials,
            only,
            trial,
            negative_control,
        } => {
            let cfg = check::CheckConfig {
                seed: cli.seed,
                trials: *trials,
                only: only
                    .as_deref()
                    .map(|s| s.split(',').map(|x| x.trim().to_string()).collect()),
                trial: *trial,
                negative_control: *negative_control,
            };
            let report = check::run_suite(&cfg).map_err(CliError::Usage)?;
            Ok(Report {
                ok: report.all_passed(),
                value: report.to_json(),
            })
        }
        Command::Superpotential { op } => superpotential(cli, *op, tol),
        Command::Bracket => bracket_cmd(cli),
        Command::Jacobi { negative_control } => jacobi_cmd(cli, *negative_control),
        cmd => {
            let input = read_input(cli)?;
            let rs = fallback_rs(cli)?;
            let at = input.root();
            if let Command::Glue = cmd {
                let p = at.field("p", |a| Ok(decode_any_point(a, rs.as_ref())))?;
                let q = at.field("q", |a| Ok(decode_any_point(a, rs.as_ref())))?;
                return match (p?, q?) {
                    (AnyPoint::Exact(p), AnyPoint::Exact(q)) => Ok(Report::ok(json::encode_point(&p.glue(&q)?))),
                    (p, q) => {
                        let (p, q) = (numeric(p), numeric(q));
                        Ok(Report::ok(json::encode_point(&p.glue(&q)?)))
                    }
                };
            }
            if let Command::Convert = cmd {
                if at.has("Q") {
                    return convert_map(at, tol);
                }
            }
            match decode_any_point(at, rs.as_ref())? {
                AnyPoint::Exact(p) => point_cmd(cmd, &p, cli, tol),
                AnyPoint::Numeric(p) => point_cmd(cmd, &p, cli, tol),
            }
        }
    }
}

fn numeric(p: AnyPoint) -> ZastavaPoint<Complex64> {
    match p {
        AnyPoint::Exact(p) => p.map_scalars(|x| x.to_complex()),
        AnyPoint::Numeric(p) => p,
    }
}

fn convert_map(at: At<'_>, tol: f64) -> CResult<Report> {
    match json::decode_map::<Rational>(at) {
        Ok(m) => match ZastavaPoint::from_map(&m) {
            Ok(p) => Ok(Report::ok(json::encode_point(&p))),
            Err(zastava::zastava::ZastavaError::Poly(zastava::polyalg::PolyError::NotSplit)) => {
                let finder = RootFinder { eps: tol, ..RootFinder::default() };
                Ok(Report::ok(json::encode_point(&from_map_numeric(&m, &finder)?)))
            }
            Err(e) => Err(e.into()),
        },
        Err(exact) if is_type_error(&exact) => {
            let m = json::decode_map::<Complex64>(at)?;
            let finder = RootFinder { eps: tol, ..RootFinder::default() };
            Ok(Report::ok(json::encode_point(&from_map_numeric(&m, &finder)?)))
        }
        Err(e) => Err(e.into()),
    }
}

fn point_cmd<S: JsonScalar>(cmd: &Command, p: &ZastavaPoint<S>, cli: &Cli, tol: f64) -> CResult<Report> {
    match cmd {
        Command::Convert => Ok(Report::ok(json::encode_map(&p.to_map()?))),
        Command::Involute => Ok(Report::ok(json::encode_point(&p.involution()?))),
        Command::Pi => {
            let d = p.pi_alpha();
            Ok(Report::ok(json!({ "divisor": json::encode_divisor(&d), "degree": d.degree() })))
        }
        Command::Project { node } => Ok(Report::ok(json::encode_point(&p.sl2_projection(*node)?))),
        Command::Boundary => boundary_cmd(p, tol),
        Command::Extpair => {
            let (closed, oracle) = match cli.order {
                Some(n) => (
                    ext_moments(p, ExtRoute::ClosedForm, n)?,
                    ext_moments(p, ExtRoute::BezoutOracle, n)?,
                ),
                None => (ext_class(p, ExtRoute::ClosedForm)?, ext_class(p, ExtRoute::BezoutOracle)?),
            };
            let agree = closed.c.len() == oracle.c.len()
                && closed.c.iter().zip(&oracle.c).all(|(a, b)| close(a, b, tol.max(1e-9)));
            Ok(Report {
                ok: agree,
                value: json!({ "a": closed.a, "c": json::encode_vec(&closed.c), "oracle_agrees": agree }),
            })
        }
        Command::Hankel => {
            let rep = kronecker_check(p)?;
            let ok = if S::EXACT {
                rep.identities_hold()
            } else {
                let unit = |x: &S| (x.magnitude() - 1.0).abs() <= tol.max(1e-9);
                unit(&rep.sigma) && unit(&rep.product)
            };
            Ok(Report {
                ok,
                value: json!({
                    "a": rep.a,
                    "c_tilde": json::encode_vec(&rep.c_tilde),
                    "c": json::encode_vec(&rep.c),
                    "det_l_tilde": rep.det_l_tilde.encode(),
                    "det_l": rep.det_l.encode(),
                    "resultant": rep.resultant.encode(),
                    "sigma": rep.sigma.encode(),
                    "conjectured_sigma": rep.conjectured_sigma().encode(),
                    "product": rep.product.encode(),
                    "identities_hold": ok,
                }),
            })
        }
        _ => unreachable!("handled by dispatch"),
    }
}

fn boundary_cmd<S: JsonScalar>(p: &ZastavaPoint<S>, tol: f64) -> CResult<Report> {
    let f2 = p.boundary_sq()?;
    let mut out = Map::new();
    let mut ok = true;
    out.insert("F_squared".into(), f2.encode());
    if let Ok(f) = p.boundary_numeric() {
        out.insert("F_principal".into(), f.encode());
    }
    let rs = p.root_system();
    let name = rs.name().unwrap_or_default();
    if rs.rank() == 1 {
        let m = p.to_map()?;
        let res = map_resultant(&m);
        let rsq = res.clone() * res;
        let hold = close(&f2, &rsq, tol);
        ok &= hold;
        out.insert("resultant_squared".into(), rsq.encode());
        out.insert("matches_resultant".into(), json!(hold));
    }
    if p.alpha() == [1, 1] && name == "A2" {
        let (wi, yi) = (&p.node(0)[0].w, &p.node(0)[0].y);
        let (wj, yj) = (&p.node(1)[0].w, &p.node(1)[0].y);
        let u = -(yi.clone() * yj.clone()) / (wi.clone() - wj.clone());
        let relation = yi.clone() * yj.clone() + (wi.clone() - wj.clone()) * u.clone();
        let hold = close(&f2, &-(u.clone() * u.clone()), tol) && relation.is_zero_or_close(tol);
        ok &= hold;
        out.insert("u".into(), u.encode());
        out.insert("matches_minus_u_squared".into(), json!(hold));
    }
    if p.alpha() == [1, 1] && (name == "B2" || name == "C2") {
        let (ci, cj) = (&p.node(0)[0], &p.node(1)[0]);
        let rep = verify_b2_plucker(&ci.w, &cj.w, &ci.y, &cj.y)?;
        let hold = rep.all_hold() && close(&f2, &(rep.b03.clone() * rep.b03.clone()), tol);
        ok &= hold;
        out.insert(
            "plucker".into(),
            json!({
                "A1": rep.a1.encode(), "A2": rep.a2.encode(),
                "b01": rep.b01.encode(), "b12": rep.b12.encode(),
                "b02": rep.b02.encode(), "b03": rep.b03.encode(),
                "quadrics": rep.quadrics,
                "boundary": rep.boundary.encode(),
                "holds": hold,
            }),
        );
    }
    Ok(Report { value: Value::Object(out), ok })
}

trait ZeroClose {
    fn is_zero_or_close(&self, tol: f64) -> bool;
}

impl<S: Scalar> ZeroClose for S {
    fn is_zero_or_close(&self, tol: f64) -> bool {
        if S::EXACT {
            self.is_zero()
        } else {
            self.magnitude() <= tol
        }
    }
}

fn session_from(cli: &Cli, at: At<'_>) -> CResult<std::sync::Arc<Session>> {
    let rs = match (at.opt_field("root_system", json::decode_root_system)?, fallback_rs(cli)?) {
        (Some(rs), _) | (None, Some(rs)) => rs,
        (None, None) => {
            return Err(CliError::Schema(DecodeError {
                pointer: at.pointer(),
                message: "missing field \"root_system\" (or pass --rs)".into(),
            }))
        }
    };
    let alpha = at.field("alpha", |a| a.list(|x| x.usize()))?;
    Ok(Session::new(rs, alpha)?)
}

fn check_json(c: &IdentityCheck) -> Value {
    json!({
        "identity": c.identity,
        "status": if c.passed { "pass" } else { "fail" },
        "residue": c.residue,
    })
}

pub fn identity_report_json(r: &IdentityReport) -> Value {
    let passed = r.checks.iter().filter(|c| c.passed).count();
    json!({
        "checks": r.checks.iter().map(check_json).collect::<Vec<_>>(),
        "passed": passed,
        "failed": r.checks.len() - passed,
    })
}

fn bracket_cmd(cli: &Cli) -> CResult<Report> {
    let input = read_input(cli)?;
    let at = input.root();
    let session = session_from(cli, at)?;
    let parse = |key: &str| -> CResult<_> {
        let text = at.field(key, |a| a.str().map(str::to_string))?;
        parse_expr(&session, &text).map_err(|e| {
            CliError::Schema(DecodeError {
                pointer: format!("/{key}"),
                message: e.to_string(),
            })
        })
    };
    let (f, g) = (parse("f")?, parse("g")?);
    let b = bracket(&f, &g)?;
    let mut out = json!({ "f": f.to_string(), "g": g.to_string(), "bracket": b.to_string() });
    let mut ok = true;
    if at.has("expect") {
        let e = parse("expect")?;
        let residue = b.sub(&e);
        ok = residue.is_zero();
        out["identity"] = json!(format!("{{{f}, {g}}} = {e}"));
        out["status"] = json!(if ok { "pass" } else { "fail" });
        out["residue"] = json!(residue.to_string());
    }
    Ok(Report { value: out, ok })
}

fn jacobi_cmd(cli: &Cli, negative_control: bool) -> CResult<Report> {
    let input = read_input(cli)?;
    let session = session_from(cli, input.root())?;
    let triples = all_triples(session.nvars());
    let report = if negative_control {
        jacobi_check(&session, &CorruptedTable { c: Rational::from_i64(1) }, &triples)
    } else {
        jacobi_check(&session, &StandardTable, &triples)
    };
    Ok(Report {
        ok: report.all_passed(),
        value: identity_report_json(&report),
    })
}

pub fn gradient_json(g: &Gradient<Complex64>) -> Value {
    json!({
        "w": json::encode_matrix(&g.w),
        "z": json::encode_vec(&g.z),
        "h_alpha": json::encode_vec(&g.h_alpha),
        "h_lambda": json::encode_vec(&g.h_lambda),
    })
}

fn decode_config(at: At<'_>, key: &str) -> Result<Vec<Vec<Complex64>>, DecodeError> {
    at.field(key, |a| a.list(|node| node.list(|x| x.complex())))
}

/// Deterministic Newton starting points: `re ∈ [−3, 3]`, `im ∈ [−π, π]`.
pub fn newton_starts(seed: u64, count: usize, dim: usize) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    Complex64::new(
                        rng.gen_range(-3.0..=3.0),
                        rng.gen_range(-std::f64::consts::PI..=std::f64::consts::PI),
                    )
                })
                .collect()
        })
        .collect()
}

fn superpotential(cli: &Cli, op: SuperOp, tol: f64) -> CResult<Report> {
    let input = read_input(cli)?;
    let at = input.root();
    let rs = fallback_rs(cli)?;
    let mut params: SuperParams<Complex64> = at.field("params", |a| json::decode_super_params(a, rs.as_ref()))?;
    if let Some(v) = variant_override(cli)? {
        params.variant = v;
    }
    let w = decode_config(at, "w")?;
    params.check_config(&w)?;
    match op {
        SuperOp::Eval => {
            let s = if at.has("s") {
                decode_config(at, "s")?
            } else {
                params.critical_section(&w)?.s
            };
            let g = params.w_gradient(&w, &s)?;
            Ok(Report::ok(json!({
                "variant": params.variant.to_string(),
                "s": json::encode_matrix(&s),
                "value": params.w_value(&w, &s)?.encode(),
                "gradient": {
                    "s": json::encode_matrix(&params.w_gradient_s(&w, &s)?),
                    "w": json::encode_matrix(&g.w),
                    "z": json::encode_vec(&g.z),
                    "h_alpha": json::encode_vec(&g.h_alpha),
                    "h_lambda": json::encode_vec(&g.h_lambda),
                },
                "phi_value": params.phi_value(&w)?.encode(),
                "phi_gradient": gradient_json(&params.phi_gradient(&w)?),
            })))
        }
        SuperOp::Critical => {
            let crit = params.critical_section(&w)?;
            let dim = crit.s.iter().map(Vec::len).sum();
            let opts = NewtonOptions { tol, ..NewtonOptions::default() };
            let runs = newton_starts(cli.seed, 20, dim)
                .iter()
                .enumerate()
                .map(|(k, x0)| params.newton_section(&w, x0, &opts, k))
                .collect::<Result<Vec<_>, _>>()?;
            let newton_ok = runs.iter().all(|r| r.converged && r.distance <= 1e-10);
            let ok = crit.stationarity <= tol && newton_ok;
            Ok(Report {
                ok,
                value: json!({
                    "variant": params.variant.to_string(),
                    "s": json::encode_matrix(&crit.s),
                    "t": json::encode_matrix(&crit.t),
                    "stationarity": crit.stationarity,
                    "hessian_diag": json::encode_vec(&crit.hessian_diag),
                    "newton": runs.iter().map(|r| json!({
                        "seed_index": r.seed_index,
                        "converged": r.converged,
                        "iterations": r.iterations,
                        "residual": r.residual,
                        "distance": r.distance,
                    })).collect::<Vec<_>>(),
                    "newton_agrees": newton_ok,
                }),
            })
        }
        SuperOp::Defect => {
            let rep = params.lagrangian_defect(&w, 1e-5)?;
            let ok = rep.fd_error <= 1e-7 && rep.closed_form_error <= 1e-9;
            Ok(Report {
                ok,
                value: json!({
                    "variant": params.variant.to_string(),
                    "g": json::encode_matrix(&rep.g),
                    "g_fd": json::encode_matrix(&rep.g_fd),
                    "fd_error": rep.fd_error,
                    "defect": json::encode_matrix(&rep.defect),
                    "defect_closed_form": json::encode_matrix(&rep.defect_closed_form),
                    "closed_form_error": rep.closed_form_error,
                    "defect_norm": rep.defect_norm,
                    "vanishes": rep.vanishes(cli.tol.unwrap_or(1e-9)),
                }),
            })
        }
        SuperOp::Compare => {
            let variants = match variant_override(cli)? {
                Some(v) => vec![v],
                None => Variant::ALL.to_vec(),
            };
            let mut ok = true;
            let mut reports = Vec::new();
            for v in variants {
                let rep = params.with_variant(v).restricted_gradient(&w)?;
                let expected = v.restricts_to_phi();
                ok &= rep.h_mismatch <= 1e-12 && (!expected || rep.wz_mismatch <= 1e-9);
                reports.push(json!({
                    "variant": v.to_string(),
                    "phi_gradient_mismatch": rep.wz_mismatch,
                    "h_gradient_mismatch": rep.h_mismatch,
                    "expected_to_match": expected,
                    "gradient": gradient_json(&rep.section),
                    "phi_gradient": gradient_json(&rep.phi),
                }));
            }
            Ok(Report { ok, value: json!({ "reports": reports }) })
        }
        SuperOp::Exponents => {
            let table = params.exponent_table();
            let dlog = params.exponent_log_derivative(&table, &w)?;
            let target = params.phi_gradient(&w)?.scale(&params.kappa);
            let mismatch = dlog
                .flatten()
                .iter()
                .zip(target.flatten())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            let ok = mismatch <= 1e-9;
            Ok(Report {
                ok,
                value: json!({
                    "exponents": table.iter().map(|e| json!({
                        "factor": e.factor.to_string(),
                        "exponent": e.exponent.encode(),
                    })).collect::<Vec<_>>(),
                    "log_derivative_mismatch": mismatch,
                }),
            })
        }
    }
}
