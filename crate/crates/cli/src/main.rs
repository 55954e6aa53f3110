//! `wedgehs`: command-line front end.
//!
//! Exit codes: 0 on success, 1 when a verification or consistency check
//! fails, 2 on any input error.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use wedgehs::cayley::{self, Endomorphism};
use wedgehs::expode::{self, ert_series};
use wedgehs::exterior::DEFAULT_MAX_RANK;
use wedgehs::input::parse_matrix;
use wedgehs::verify::{default_order, verify};
use wedgehs::{GradedEndo, Matrix, Rational};

const MAX_RANK_VAR: &str = "WEDGEHS_MAX_RANK";

#[derive(Parser)]
#[command(
    name = "wedgehs",
    version,
    about = "Exact Hasse-Schmidt derivations and Cayley-Hamilton checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Characteristic coefficients e_1..e_r and E_r(t) = det(1 - ft).
    Charpoly(Common),
    /// Dump the coefficient blocks of f̄(t) and f(t).
    Hs(Common),
    /// Run every graded Cayley-Hamilton check and print the report.
    Verify(Common),
    /// Exact exp(ft) series by three routes.
    Expm(Common),
    /// The u and v solution bases of the attached linear ODE.
    OdeBasis(Common),
}

#[derive(Args)]
struct Common {
    /// Matrix JSON document; reads stdin when omitted or `-`.
    input: Option<PathBuf>,
    /// Truncation order N.
    #[arg(long)]
    order: Option<usize>,
    /// Evaluate the exp series exactly at this rational point.
    #[arg(long)]
    at: Option<String>,
    /// Restrict grade-indexed output to this grade.
    #[arg(long)]
    grade: Option<usize>,
    /// Emit JSON (the only format).
    #[arg(long, default_value_t = true)]
    json: bool,
}

enum Failure {
    /// Exit code 2.
    Input(String),
    /// A computation failed on validated input; exit code 1.
    Internal(String),
}

struct Outcome {
    output: Value,
    ok: bool,
}

fn max_rank() -> Result<usize, Failure> {
    match std::env::var(MAX_RANK_VAR) {
        Ok(v) => v.parse::<usize>().map_err(|_| {
            Failure::Input(format!(
                "{MAX_RANK_VAR} must be a positive integer, got {v:?}"
            ))
        }),
        Err(_) => Ok(DEFAULT_MAX_RANK),
    }
}

fn read_input(path: &Option<PathBuf>) -> Result<String, Failure> {
    let mut text = String::new();
    match path {
        Some(p) if p.as_os_str() != "-" => {
            text = std::fs::read_to_string(p)
                .map_err(|e| Failure::Input(format!("cannot read {}: {e}", p.display())))?;
        }
        _ => {
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Failure::Input(format!("cannot read stdin: {e}")))?;
        }
    }
    Ok(text)
}

fn load(common: &Common) -> Result<Endomorphism, Failure> {
    let text = read_input(&common.input)?;
    let parsed = parse_matrix(&text, max_rank()?).map_err(|e| Failure::Input(e.to_string()))?;
    Ok(parsed.endomorphism())
}

fn order_or_default(common: &Common, f: &Endomorphism, min: usize) -> Result<usize, Failure> {
    let order = common.order.unwrap_or_else(|| default_order(f.rank()));
    if order < min {
        return Err(Failure::Input(format!(
            "--order {order} too small, need at least {min}"
        )));
    }
    Ok(order)
}

fn check_grade(common: &Common, f: &Endomorphism) -> Result<Option<usize>, Failure> {
    match common.grade {
        Some(h) if h > f.rank() => Err(Failure::Input(format!(
            "--grade {h} out of range 0..={}",
            f.rank()
        ))),
        g => Ok(g),
    }
}

fn matrices(ms: &[Matrix]) -> Value {
    Value::Array(ms.iter().map(|m| json!(m.row_vecs())).collect())
}

fn endo_blocks(endos: &[GradedEndo], grade: Option<usize>) -> Value {
    match grade {
        Some(h) => Value::Array(endos.iter().map(|e| json!(e.block(h).row_vecs())).collect()),
        None => json!(endos),
    }
}

fn internal(e: impl std::fmt::Display) -> Failure {
    Failure::Internal(e.to_string())
}

fn charpoly(common: &Common) -> Result<Outcome, Failure> {
    let f = load(common)?;
    let order = common.order.unwrap_or(f.rank());
    if order < f.rank() {
        return Err(Failure::Input(format!(
            "--order {order} too small, need at least {}",
            f.rank()
        )));
    }
    let e = cayley::char_coeffs(&f).map_err(internal)?;
    Ok(Outcome {
        output: json!({ "e": e.values(), "E_r": ert_series(&e, order) }),
        ok: true,
    })
}

fn hs(common: &Common) -> Result<Outcome, Failure> {
    let f = load(common)?;
    let order = order_or_default(common, &f, f.rank())?;
    let grade = check_grade(common, &f)?;
    let p = cayley::Pipeline::new(&f, order).map_err(internal)?;
    Ok(Outcome {
        output: json!({
            "rank": f.rank(),
            "order": order,
            "fbar": endo_blocks(p.fbar.coeffs(), grade),
            "f": endo_blocks(p.f_t.coeffs(), grade),
        }),
        ok: true,
    })
}

fn run_verify(common: &Common) -> Result<Outcome, Failure> {
    let f = load(common)?;
    let order = order_or_default(common, &f, 2 * f.rank())?;
    let grade = check_grade(common, &f)?;
    let mut report = verify(&f, order).map_err(internal)?;
    if let Some(h) = grade {
        report.filter_grade(h);
    }
    let ok = report.verified;
    Ok(Outcome {
        output: serde_json::to_value(&report).map_err(internal)?,
        ok,
    })
}

fn expm(common: &Common) -> Result<Outcome, Failure> {
    let f = load(common)?;
    let order = order_or_default(common, &f, f.rank())?;
    let at = common
        .at
        .as_deref()
        .map(|s| {
            s.parse::<Rational>()
                .map_err(|e| Failure::Input(format!("--at: {e}")))
        })
        .transpose()?;
    let e = cayley::char_coeffs(&f).map_err(internal)?;
    let v = expode::v_basis(&e, order).map_err(internal)?;
    let p = expode::putzer_polynomials(&f, &e);
    let putzer = expode::expm_putzer(&f, order).map_err(internal)?;
    let leonard = expode::expm_leonard(&f, order).map_err(internal)?;
    let taylor = expode::expm_taylor(&f, order);
    let agree = putzer == leonard && leonard == taylor;
    let mut output = json!({
        "rank": f.rank(),
        "order": order,
        "e": e.values(),
        "v": v,
        "p": matrices(&p),
        "putzer": putzer,
        "leonard": leonard,
        "taylor": taylor,
        "agree": agree,
    });
    if let Some(t0) = at {
        output["at"] = json!({
            "t": t0,
            "truncation_order": order,
            "value": taylor.evaluate(&t0).row_vecs(),
        });
    }
    Ok(Outcome { output, ok: agree })
}

fn ode_basis(common: &Common) -> Result<Outcome, Failure> {
    let f = load(common)?;
    let order = order_or_default(common, &f, f.rank())?;
    let e = cayley::char_coeffs(&f).map_err(internal)?;
    let u = expode::u_basis(&e, order).map_err(internal)?;
    let v = expode::v_basis(&e, order).map_err(internal)?;
    let mut residuals_zero = true;
    for y in u.iter().chain(&v) {
        let res = expode::ode_residual(y, &e).map_err(internal)?;
        residuals_zero &= res.coeffs().iter().all(Rational::is_zero);
    }
    Ok(Outcome {
        output: json!({
            "rank": f.rank(),
            "order": order,
            "e": e.values(),
            "u": u,
            "v": v,
            "residuals_zero": residuals_zero,
        }),
        ok: residuals_zero,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Charpoly(c) => charpoly(c),
        Command::Hs(c) => hs(c),
        Command::Verify(c) => run_verify(c),
        Command::Expm(c) => expm(c),
        Command::OdeBasis(c) => ode_basis(c),
    };
    match result {
        Ok(outcome) => {
            let text = serde_json::to_string_pretty(&outcome.output).expect("serializable");
            println!("{text}");
            ExitCode::from(if outcome.ok { 0 } else { 1 })
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
