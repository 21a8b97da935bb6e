//! `hscalc`: exact calculators and verification suites from the shell.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on bad
//! usage or malformed input. All output is deterministic for a fixed
//! command line, including the seed.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use hs_core::cylinder::CylFn;
use hs_core::fredholm::{index_pairing, Label, Sign};
use hs_core::json as codec;
use hs_core::khomology::{expand, generator, HomT};
use hs_core::report::{emit_json_array, text_table, Report};
use hs_core::scalar::{format_rat, parse_rat, Rat};
use hs_core::spectral::{
    comm_bound_check, comm_norm_mult, comm_norm_shift, resolvent_count, toeplitz_comm_check,
    LambdaParams,
};
use hs_core::verify::{gen, rng_for, run_suites, SuiteConfig, SuiteKind};

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

#[derive(Parser)]
#[command(
    name = "hscalc",
    version,
    about = "Exact calculators and deterministic verification suites for HS(s)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the seeded verification suites and print a pass/fail table.
    Verify(VerifyArgs),
    /// Expand an integer cylinder function in the generator basis.
    Expand(ExpandArgs),
    /// Pair a functional with a projection and report the index data.
    Pair(PairArgs),
    /// Check the commutator norms of the triple attached to a functional.
    Norms(NormsArgs),
    /// Count weight eigenvalues up to a radius.
    Count(CountArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Base of the digit expansion.
    #[arg(long, default_value_t = 2)]
    s: u32,
    /// Window radius for operator truncations.
    #[arg(long, default_value_t = 1000)]
    window: i64,
    /// Depth cutoff for module truncations.
    #[arg(long, default_value_t = 4)]
    lmax: u32,
    /// Weight slope per shift level, as p/q.
    #[arg(long, default_value = "1")]
    c1: String,
    /// Weight scale on the support levels, as p/q.
    #[arg(long, default_value = "1")]
    c2: String,
    /// Gauge angle for the conjugation checks, as p/q.
    #[arg(long, default_value = "1/3")]
    theta: String,
    /// Seed for the per-suite generator streams.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated suite names; defaults to all six.
    #[arg(long, value_delimiter = ',')]
    suite: Vec<String>,
    /// Write the JSON report array to this path.
    #[arg(long)]
    json_out: Option<PathBuf>,
}

#[derive(Args)]
struct ExpandArgs {
    /// Integer cylinder function JSON (units domain, vanishing at 1).
    #[arg(long)]
    cyl: PathBuf,
    /// Write the coefficient JSON here as well as to stdout.
    #[arg(long)]
    json_out: Option<PathBuf>,
}

#[derive(Args)]
struct PairArgs {
    /// Functional JSON: {"s": .., "coeffs": [{"y": .., "phi": ..}]}.
    #[arg(long)]
    phi: PathBuf,
    /// Pair against the generator projection at this point.
    #[arg(long, conflicts_with = "cyl", required_unless_present = "cyl")]
    x: Option<u64>,
    /// Pair against the projection of a 0/1 unit-supported table.
    #[arg(long)]
    cyl: Option<PathBuf>,
    /// Write the report JSON here as well as to stdout.
    #[arg(long)]
    json_out: Option<PathBuf>,
}

#[derive(Args)]
struct NormsArgs {
    /// Functional JSON with nonempty support.
    #[arg(long)]
    phi: PathBuf,
    /// Weight slope per shift level, as p/q.
    #[arg(long, default_value = "1")]
    c1: String,
    /// Weight scale on the support levels, as p/q.
    #[arg(long, default_value = "1")]
    c2: String,
    /// Truncation depth for the exact norm computations.
    #[arg(long, default_value_t = 64)]
    lmax: u32,
    /// Seed for the sampled bound checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report JSON to this path.
    #[arg(long)]
    json_out: Option<PathBuf>,
}

#[derive(Args)]
struct CountArgs {
    /// Count eigenvalues with modulus at most this radius, as p/q.
    #[arg(long = "R")]
    r: String,
    /// Functional JSON; when omitted a seeded sample is drawn.
    #[arg(long)]
    phi: Option<PathBuf>,
    /// Base for the sampled functional (ignored with --phi).
    #[arg(long, default_value_t = 2)]
    s: u32,
    /// Weight slope per shift level, as p/q.
    #[arg(long, default_value = "1")]
    c1: String,
    /// Weight scale on the support levels, as p/q.
    #[arg(long, default_value = "1")]
    c2: String,
    /// Seed for the sampled functional.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the result JSON here as well as to stdout.
    #[arg(long)]
    json_out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Verify(args) => run_verify(args),
        Command::Expand(args) => run_expand(args),
        Command::Pair(args) => run_pair(args),
        Command::Norms(args) => run_norms(args),
        Command::Count(args) => run_count(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn run_verify(args: VerifyArgs) -> CliResult<bool> {
    let cfg = SuiteConfig {
        s: args.s,
        window_m: args.window,
        l_max: args.lmax,
        c1: parse_rat(&args.c1)?,
        c2: parse_rat(&args.c2)?,
        theta: parse_rat(&args.theta)?,
        seed: args.seed,
    };
    let kinds: Vec<SuiteKind> = if args.suite.is_empty() {
        SuiteKind::ALL.to_vec()
    } else {
        args.suite
            .iter()
            .map(|text| SuiteKind::parse(text))
            .collect::<Result<_, _>>()?
    };
    let reports = run_suites(&kinds, &cfg)?;
    print!("{}", text_table(&reports));
    for report in &reports {
        if !report.passed() {
            print!("{}", report.emit_text(3));
        }
    }
    if let Some(path) = &args.json_out {
        fs::write(path, emit_json_array(&reports)).map_err(|e| io_error(path, &e))?;
    }
    Ok(reports.iter().all(Report::passed))
}

fn run_expand(args: ExpandArgs) -> CliResult<bool> {
    let f = load_int_cylfn(&args.cyl)?;
    let coeffs = expand(&f)?;
    let phi = HomT::new(f.s(), coeffs)?;
    emit(&codec::homt_to_json(&phi), args.json_out.as_deref())?;
    Ok(true)
}

fn run_pair(args: PairArgs) -> CliResult<bool> {
    let phi = load_homt(&args.phi)?;
    let (proj, desc) = match (args.x, &args.cyl) {
        (Some(x), None) => (generator(x, phi.s())?, format!("1_({x})")),
        (None, Some(path)) => (load_int_cylfn(path)?, path.display().to_string()),
        _ => unreachable!("clap rejects every other combination"),
    };
    let outcome = index_pairing(&phi, &proj)?;
    let paired = phi.pair(&proj)?;
    let value = json!({
        "projection": desc,
        "s": phi.s(),
        "odd_rank": outcome.odd_rank,
        "ev_rank": outcome.ev_rank,
        "kernel_dim": outcome.kernel_dim,
        "cokernel_dim": outcome.cokernel_dim,
        "kernel_labels": labels_json(&outcome.kernel_labels),
        "cokernel_labels": labels_json(&outcome.cokernel_labels),
        "index": outcome.index,
        "pairing": paired,
        "agrees": outcome.index == paired,
    });
    emit(&value, args.json_out.as_deref())?;
    Ok(outcome.index == paired)
}

fn run_norms(args: NormsArgs) -> CliResult<bool> {
    let phi = load_homt(&args.phi)?;
    if phi.is_empty() {
        return Err("the functional must have nonempty support".into());
    }
    if args.lmax < 1 {
        return Err("lmax must be at least 1".into());
    }
    let params = LambdaParams::new(parse_rat(&args.c1)?, parse_rat(&args.c2)?)?;
    let s = phi.s();
    let started = Instant::now();
    let mut report = Report::new("norms");

    for m in 1..=args.lmax.min(3) {
        let norm = comm_norm_shift(m, &params, &phi, args.lmax)?;
        let expected = params.c1() * Rat::from_integer(i64::from(m));
        report.check(
            norm == expected,
            format!("the {m}-fold shift commutator norm is c1 * {m}"),
            format_rat(expected),
            format_rat(norm),
            format!("l_max = {}", args.lmax),
        );
    }

    let mut rng = rng_for(args.seed, SuiteKind::Spectral);
    for trial in 0..10 {
        let family = gen::mult_family(&mut rng, s, 3, 2)?;
        let outcome = comm_norm_mult(&family, &params, &phi)?;
        report.check(
            outcome.ok(),
            format!("trial {trial}: exact multiplication norm within its bound"),
            format!("exact <= {}", outcome.bound),
            format!("exact {}", outcome.exact),
            format!("witness {:?}", outcome.exact_witness),
        );
    }
    for trial in 0..10 {
        let a = gen::poly_element(&mut rng, s, 100)?;
        let outcome = comm_bound_check(&a, &params, &phi)?;
        report.check(
            outcome.ok,
            format!("trial {trial}: smoothness bound for a polynomial element"),
            format!("lhs <= {} * {}", outcome.c, outcome.norm1),
            format!("lhs {}", outcome.lhs),
            format!("terms {:?}", outcome.terms),
        );
    }
    for trial in 0..5 {
        let symbol = gen::toeplitz_rat(&mut rng, 3, 4);
        let outcome = toeplitz_comm_check(&symbol, &params, &phi, &[4, 8])?;
        report.check(
            outcome.ok && outcome.monotone && outcome.sound,
            format!("trial {trial}: Toeplitz commutator within c1 * ||phi||_1"),
            format!("triangle {} <= budget {}", outcome.triangle, outcome.budget),
            format!("estimates {:?}", outcome.estimates),
            format!("symbol {:?}", symbol.coeffs()),
        );
    }

    report.set_elapsed_ms(started.elapsed().as_millis());
    print!("{}", report.emit_text(5));
    if let Some(path) = &args.json_out {
        fs::write(path, report.emit_json()).map_err(|e| io_error(path, &e))?;
    }
    Ok(report.passed())
}

fn run_count(args: CountArgs) -> CliResult<bool> {
    let params = LambdaParams::new(parse_rat(&args.c1)?, parse_rat(&args.c2)?)?;
    let r = parse_rat(&args.r)?;
    let phi = match &args.phi {
        Some(path) => load_homt(path)?,
        None => gen::homt(&mut rng_for(args.seed, SuiteKind::Spectral), args.s, 2, 100, 4)?,
    };
    let count = resolvent_count(&phi, &params, r)?;
    let value = json!({
        "R": format_rat(r),
        "c1": format_rat(params.c1()),
        "c2": format_rat(params.c2()),
        "count": count,
        "phi": codec::homt_to_json(&phi),
    });
    emit(&value, args.json_out.as_deref())?;
    Ok(true)
}

fn read_json(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, &e))?;
    Ok(codec::parse_document(&text)?)
}

fn load_int_cylfn(path: &Path) -> CliResult<CylFn<i64>> {
    match codec::dyn_cylfn_from_json(&read_json(path)?)? {
        codec::DynCylFn::Int(f) => Ok(f),
        codec::DynCylFn::Rat(_) => Err(format!(
            "{}: expected an integer table, found ring \"rat\"",
            path.display()
        )
        .into()),
        codec::DynCylFn::CFloat(_) => Err(format!(
            "{}: expected an integer table, found ring \"cfloat\"",
            path.display()
        )
        .into()),
    }
}

fn load_homt(path: &Path) -> CliResult<HomT> {
    Ok(codec::homt_from_json(&read_json(path)?)?)
}

fn labels_json(labels: &[Label]) -> Value {
    Value::Array(
        labels
            .iter()
            .map(|label| {
                json!({
                    "sign": match label.sign {
                        Sign::Plus => "+",
                        Sign::Minus => "-",
                    },
                    "y": label.y,
                    "j": label.j,
                    "l": label.l,
                })
            })
            .collect(),
    )
}

fn emit(value: &Value, json_out: Option<&Path>) -> CliResult<()> {
    let text = format!("{}\n", serde_json::to_string_pretty(value)?);
    print!("{text}");
    if let Some(path) = json_out {
        fs::write(path, &text).map_err(|e| io_error(path, &e))?;
    }
    Ok(())
}

fn io_error(path: &Path, err: &std::io::Error) -> Box<dyn std::error::Error> {
    format!("{}: {err}", path.display()).into()
}
