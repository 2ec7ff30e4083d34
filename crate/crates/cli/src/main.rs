// SPDX-License-Identifier: Apache-2.0

//! `qtorus`: dimensions of quantum tori from JSON instance files.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 inconclusive result
//! under `--require-exact`, 3 a checked statement came out violated.

mod element;

use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;
use std::time::Duration;

use clap::{value_parser, Arg, ArgAction, ArgMatches, Command};
use num_bigint::BigInt;
use qtorus::harness::{self, CampaignConfig};
use qtorus::instance::{self, InstanceFile};
use qtorus::lattice::Sublattice;
use qtorus::pairing::{self, MultiparameterMatrix};
use qtorus::solver::{self, DimensionOptions};
use qtorus::value_group::MergeMode;
use serde_json::{json, Value};

const TIME_BUDGET_ENV: &str = "QTORUS_TIME_BUDGET_MS";

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

type CliResult = Result<u8, Failure>;

fn cli() -> Command {
    let file = |name: &'static str| Arg::new(name).required(true).help("instance file (`-` for stdin)");
    let output = Arg::new("output").short('o').long("output").help("write the instance here instead of stdout");
    Command::new("qtorus")
        .about("Dimension of quantum tori and twisted group algebras of Z^n")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(Arg::new("json").long("json").global(true).action(ArgAction::SetTrue).help("compact single-line JSON"))
        .arg(
            Arg::new("bound")
                .long("bound")
                .global(true)
                .value_parser(value_parser!(u32))
                .help("coefficient bound for witness search"),
        )
        .arg(
            Arg::new("combo-samples")
                .long("combo-samples")
                .global(true)
                .value_parser(value_parser!(usize))
                .help("pencil combinations tried for the upper bound"),
        )
        .arg(
            Arg::new("time-budget")
                .long("time-budget")
                .global(true)
                .value_parser(value_parser!(f64))
                .help("seconds per dimension computation (default 10, or $QTORUS_TIME_BUDGET_MS)"),
        )
        .arg(Arg::new("seed").long("seed").global(true).value_parser(value_parser!(u64)))
        .arg(
            Arg::new("require-exact")
                .long("require-exact")
                .global(true)
                .action(ArgAction::SetTrue)
                .help("exit with status 2 if a dimension is only bracketed"),
        )
        .arg(
            Arg::new("mode")
                .long("mode")
                .global(true)
                .value_parser(["shared", "disjoint"])
                .help("how value groups of tensor factors are merged (default shared)"),
        )
        .subcommand(Command::new("dim").about("dimension with certificate").arg(file("file")))
        .subcommand(Command::new("center").about("whether the center is the base field").arg(file("file")))
        .subcommand(Command::new("codim").about("rank minus dimension").arg(file("file")))
        .subcommand(
            Command::new("tensor")
                .about("tensor product of two instances")
                .arg(file("a"))
                .arg(file("b"))
                .arg(output.clone()),
        )
        .subcommand(Command::new("transpose").about("transpose the multiparameters").arg(file("file")).arg(output.clone()))
        .subcommand(
            Command::new("restrict")
                .about("restrict to the sublattice spanned by the given rows")
                .arg(file("file"))
                .arg(Arg::new("basis").long("basis").required(true).help("JSON rows, e.g. [[2,0],[0,1]]"))
                .arg(output.clone()),
        )
        .subcommand(
            Command::new("generate")
                .about("write a generated instance")
                .arg(
                    Arg::new("kind")
                        .required(true)
                        .value_parser(["independent", "random", "transpose-pair", "commutative", "symplectic"]),
                )
                .arg(Arg::new("n").short('n').long("rank").value_parser(value_parser!(usize)).default_value("3"))
                .arg(Arg::new("k").short('k').long("free-rank").value_parser(value_parser!(usize)).default_value("2"))
                .arg(Arg::new("m").short('m').long("torsion-order").value_parser(value_parser!(u64)).default_value("1"))
                .arg(
                    Arg::new("exponent-bound")
                        .long("exponent-bound")
                        .value_parser(value_parser!(u32))
                        .default_value("2"),
                )
                .arg(output.clone())
                .arg(Arg::new("out2").long("out2").help("second file for transpose-pair")),
        )
        .subcommand(
            Command::new("verify")
                .about("random campaign over the tensor-product statements")
                .arg(Arg::new("trials").long("trials").value_parser(value_parser!(usize)).default_value("500"))
                .arg(Arg::new("max-rank").long("max-rank").value_parser(value_parser!(usize)).default_value("3"))
                .arg(Arg::new("max-free-rank").long("max-free-rank").value_parser(value_parser!(usize)).default_value("2"))
                .arg(
                    Arg::new("exponent-bound")
                        .long("exponent-bound")
                        .value_parser(value_parser!(u32))
                        .default_value("2"),
                )
                .arg(Arg::new("no-oracle").long("no-oracle").action(ArgAction::SetTrue)),
        )
        .subcommand(
            Command::new("element-mul")
                .about("multiply two elements of the algebra")
                .arg(file("file"))
                .arg(Arg::new("alpha").required(true).help("JSON list of terms {\"c\", \"q\", \"torsion\", \"x\"}"))
                .arg(Arg::new("beta").required(true)),
        )
}

fn options(m: &ArgMatches) -> Result<DimensionOptions, Failure> {
    let mut opts = DimensionOptions::default();
    if let Ok(ms) = std::env::var(TIME_BUDGET_ENV) {
        let ms: u64 = ms
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("{TIME_BUDGET_ENV} must be a number of milliseconds")))?;
        opts.time_budget = Duration::from_millis(ms);
    }
    if let Some(&b) = m.get_one::<u32>("bound") {
        opts.search_bound = b;
    }
    if let Some(&c) = m.get_one::<usize>("combo-samples") {
        opts.combo_samples = c;
    }
    if let Some(&t) = m.get_one::<f64>("time-budget") {
        opts.time_budget = Duration::try_from_secs_f64(t).map_err(|e| Failure::usage(format!("--time-budget: {e}")))?;
    }
    if let Some(&s) = m.get_one::<u64>("seed") {
        opts.seed = s;
    }
    Ok(opts)
}

fn mode(m: &ArgMatches) -> MergeMode {
    match m.get_one::<String>("mode").map(String::as_str) {
        Some("disjoint") => MergeMode::Disjoint,
        _ => MergeMode::Shared,
    }
}

fn read_instance(path: &str) -> Result<MultiparameterMatrix, Failure> {
    let parsed = if path == "-" {
        instance::parse_reader(io::stdin().lock())
    } else {
        let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("{path}: {e}")))?;
        instance::parse_str(&text)
    };
    parsed.map_err(|e| Failure::usage(format!("{path}: {e}")))
}

fn render(value: &Value, compact: bool) -> String {
    if compact {
        serde_json::to_string(value).expect("values serialize")
    } else {
        serde_json::to_string_pretty(value).expect("values serialize")
    }
}

fn emit(value: &Value, m: &ArgMatches) {
    let mut out = io::stdout().lock();
    // A closed pipe is not worth a panic.
    let _ = writeln!(out, "{}", render(value, m.get_flag("json")));
}

fn write_instance(lambda: &MultiparameterMatrix, target: Option<&String>, m: &ArgMatches) -> CliResult {
    let file = InstanceFile::from_matrix(lambda).map_err(|e| Failure::usage(e.to_string()))?;
    match target {
        Some(path) => {
            let text = instance::to_json_string(lambda).map_err(|e| Failure::usage(e.to_string()))?;
            fs::write(Path::new(path), text).map_err(|e| Failure::usage(format!("{path}: {e}")))?;
        }
        None => emit(&serde_json::to_value(file).expect("instance files serialize"), m),
    }
    Ok(0)
}

fn inexact_code(m: &ArgMatches, exact: bool) -> u8 {
    if m.get_flag("require-exact") && !exact {
        2
    } else {
        0
    }
}

fn cmd_dim(m: &ArgMatches) -> CliResult {
    let lambda = read_instance(m.get_one::<String>("file").expect("required"))?;
    let d = solver::dimension(&lambda, &options(m)?);
    emit(&serde_json::to_value(&d).map_err(|e| Failure::usage(e.to_string()))?, m);
    Ok(inexact_code(m, d.exact))
}

fn cmd_center(m: &ArgMatches) -> CliResult {
    let lambda = read_instance(m.get_one::<String>("file").expect("required"))?;
    let p = pairing::pairing_of(&lambda);
    let radical = p.radical();
    let rows: Vec<Vec<Value>> = radical.rows().iter().map(|r| r.iter().map(element::int_value).collect()).collect();
    emit(&json!({"center_is_f": radical.rank() == 0, "radical": rows}), m);
    Ok(0)
}

fn cmd_codim(m: &ArgMatches) -> CliResult {
    let lambda = read_instance(m.get_one::<String>("file").expect("required"))?;
    let d = solver::dimension(&lambda, &options(m)?);
    let value = match d.value() {
        Some(v) => json!({"rank": lambda.rank(), "codim": lambda.rank() - v, "exact": true}),
        None => json!({
            "rank": lambda.rank(),
            "codim": null,
            "exact": false,
            "codim_interval": [lambda.rank() - d.upper, lambda.rank() - d.lower],
        }),
    };
    emit(&value, m);
    if d.exact {
        Ok(0)
    } else {
        eprintln!("codimension is not certified: dimension lies in [{}, {}]", d.lower, d.upper);
        Ok(2)
    }
}

fn cmd_tensor(m: &ArgMatches) -> CliResult {
    let a = read_instance(m.get_one::<String>("a").expect("required"))?;
    let b = read_instance(m.get_one::<String>("b").expect("required"))?;
    let t = pairing::tensor(&a, &b, mode(m)).map_err(|e| Failure::usage(e.to_string()))?;
    write_instance(&t, m.get_one::<String>("output"), m)
}

fn cmd_transpose(m: &ArgMatches) -> CliResult {
    let a = read_instance(m.get_one::<String>("file").expect("required"))?;
    write_instance(&pairing::transpose(&a), m.get_one::<String>("output"), m)
}

fn cmd_restrict(m: &ArgMatches) -> CliResult {
    let lambda = read_instance(m.get_one::<String>("file").expect("required"))?;
    let basis: Vec<Vec<i64>> = serde_json::from_str(m.get_one::<String>("basis").expect("required"))
        .map_err(|e| Failure::usage(format!("--basis: {e}")))?;
    let rows = basis
        .into_iter()
        .map(|r| r.into_iter().map(BigInt::from).collect())
        .collect();
    let b = Sublattice::from_rows(lambda.rank(), rows).map_err(|e| Failure::usage(format!("--basis: {e}")))?;
    let restricted = pairing::pairing_of(&lambda)
        .restrict(&b)
        .map_err(|e| Failure::usage(format!("--basis: {e}")))?;
    write_instance(&restricted.to_matrix(), m.get_one::<String>("output"), m)
}

fn cmd_generate(m: &ArgMatches) -> CliResult {
    let n = *m.get_one::<usize>("n").expect("defaulted");
    if n == 0 {
        return Err(Failure::usage("--rank must be at least 1"));
    }
    let k = *m.get_one::<usize>("k").expect("defaulted");
    let tm = *m.get_one::<u64>("m").expect("defaulted");
    if tm == 0 {
        return Err(Failure::usage("--torsion-order must be at least 1"));
    }
    let bound = *m.get_one::<u32>("exponent-bound").expect("defaulted");
    let seed = m.get_one::<u64>("seed").copied().unwrap_or(0);
    let out = m.get_one::<String>("output");
    match m.get_one::<String>("kind").expect("required").as_str() {
        "independent" => write_instance(&harness::gen_independent(n), out, m),
        "random" => write_instance(&harness::gen_random(n, k, tm, bound, seed), out, m),
        "commutative" => write_instance(&harness::gen_commutative(n), out, m),
        "symplectic" => {
            if !n.is_multiple_of(2) {
                return Err(Failure::usage("symplectic instances need an even rank"));
            }
            write_instance(&harness::gen_symplectic(n / 2, "q"), out, m)
        }
        "transpose-pair" => {
            let (a, b) = harness::gen_transpose_pair(n);
            match (out, m.get_one::<String>("out2")) {
                (Some(_), Some(out2)) => {
                    write_instance(&a, out, m)?;
                    write_instance(&b, Some(out2), m)
                }
                (None, None) => {
                    let files = [&a, &b]
                        .iter()
                        .map(|l| InstanceFile::from_matrix(l).map_err(|e| Failure::usage(e.to_string())))
                        .collect::<Result<Vec<_>, _>>()?;
                    emit(&serde_json::to_value(files).expect("instance files serialize"), m);
                    Ok(0)
                }
                _ => Err(Failure::usage("transpose-pair needs both -o and --out2, or neither")),
            }
        }
        other => Err(Failure::usage(format!("unknown kind {other}"))),
    }
}

fn cmd_verify(m: &ArgMatches) -> CliResult {
    let config = CampaignConfig {
        trials: *m.get_one::<usize>("trials").expect("defaulted"),
        seed: m.get_one::<u64>("seed").copied().unwrap_or(7),
        max_rank: *m.get_one::<usize>("max-rank").expect("defaulted"),
        max_free_rank: *m.get_one::<usize>("max-free-rank").expect("defaulted"),
        exponent_bound: *m.get_one::<u32>("exponent-bound").expect("defaulted"),
        mode: mode(m),
        oracle_bound: (!m.get_flag("no-oracle")).then_some(1),
        opts: options(m)?,
        ..CampaignConfig::default()
    };
    if config.max_rank == 0 {
        return Err(Failure::usage("--max-rank must be at least 1"));
    }
    let report = harness::run_campaign(&config);
    emit(&serde_json::to_value(&report).expect("reports serialize"), m);
    if !report.is_clean() {
        eprintln!("{} violated verdicts, {} anomalies", report.violations(), report.anomalies.len());
        return Ok(3);
    }
    let inconclusive: usize = report.tallies.values().map(|t| t.inconclusive).sum();
    Ok(inexact_code(m, inconclusive == 0))
}

fn cmd_element_mul(m: &ArgMatches) -> CliResult {
    let lambda = read_instance(m.get_one::<String>("file").expect("required"))?;
    let ctx = std::sync::Arc::new(lambda);
    let a = element::parse(&ctx, m.get_one::<String>("alpha").expect("required")).map_err(Failure::usage)?;
    let b = element::parse(&ctx, m.get_one::<String>("beta").expect("required")).map_err(Failure::usage)?;
    let p = a.multiply(&b).map_err(|e| Failure::usage(e.to_string()))?;
    emit(
        &json!({"alpha": a.to_string(), "beta": b.to_string(), "product": p.to_string(), "terms": element::to_json(&p)}),
        m,
    );
    Ok(0)
}

fn run() -> CliResult {
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(0),
                _ => Err(Failure::usage("")),
            };
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    match name {
        "dim" => cmd_dim(sub),
        "center" => cmd_center(sub),
        "codim" => cmd_codim(sub),
        "tensor" => cmd_tensor(sub),
        "transpose" => cmd_transpose(sub),
        "restrict" => cmd_restrict(sub),
        "generate" => cmd_generate(sub),
        "verify" => cmd_verify(sub),
        "element-mul" => cmd_element_mul(sub),
        _ => unreachable!("clap rejects unknown subcommands"),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
