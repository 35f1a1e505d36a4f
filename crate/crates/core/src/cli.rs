//! The `polignac` command-line surface.
//!
//! Subcommands: `construct`, `verify`, `scan`, `covers`, `series`. Every
//! command is deterministic: identical configuration produces byte-identical
//! output files, whatever the worker count. Reports go to `--out` (or
//! stdout); errors print machine-readable JSON on stderr.
//!
//! Exit codes: 0 success, 2 usage or domain errors, 3 budget/feasibility/
//! regime errors, 4 consistency or correctness failures.

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::analytics;
use crate::arith::{FactorBudget, FermatBudget};
use crate::construct::{
    assemble, attach_companions, check_derived_magnitude_chain, check_magnitude_chain,
    derive_params, fermat_gammas, select_prime_blocks, verify_progression, Construction,
    ExplicitParams, Magnitude, SieveConstants,
};
use crate::error::{Error, Result};
use crate::represent::{
    crocker_divisibility, scan_density, verify_erdos_progression, Form, COVERED_PROGRESSION_BASE,
    DEFAULT_SCAN_BUDGET,
};
use crate::serde_util::parse_biguint;

/// Environment variable overriding the default range-scan budget.
pub const ENV_SCAN_BUDGET: &str = "POLIGNAC_SCAN_BUDGET";
/// Environment variables overriding the default factoring effort.
pub const ENV_TRIAL_BOUND: &str = "POLIGNAC_TRIAL_BOUND";
pub const ENV_RHO_ITERS: &str = "POLIGNAC_RHO_ITERS";

#[derive(Parser)]
#[command(
    name = "polignac",
    version,
    about = "Covering-congruence progressions avoiding p + 2^a + 2^b, plus scanners and analytics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble a construction and write its canonical JSON document
    Construct(ConstructArgs),
    /// Audit a construction file and sweep its progression up to x
    Verify(VerifyArgs),
    /// Scan a range of odd integers for representability
    Scan(ScanArgs),
    /// Check the covered progression and the power-of-two divisibility identity
    Covers(CoversArgs),
    /// Tabulate analytic series, sums, and sieve ratios
    Series(SeriesArgs),
}

#[derive(Args)]
struct ConstructArgs {
    /// Target range x (decimal)
    #[arg(long)]
    x: Option<String>,
    /// Evaluate the derived-parameter formulas instead of assembling
    #[arg(long)]
    derive: bool,
    /// Symbolic magnitude ln ln ln x for --derive
    #[arg(long, value_name = "F64")]
    x_lnlnln: Option<f64>,
    /// Number of blocks K
    #[arg(long)]
    k: Option<u32>,
    /// Per-block reciprocal-sum target L
    #[arg(long)]
    l: Option<f64>,
    /// Prime ceiling u (blocks use odd primes below u)
    #[arg(long)]
    u: Option<f64>,
    /// Number of Fermat factors m
    #[arg(long)]
    m: Option<u32>,
    /// Number of constrained blocks K'
    #[arg(long)]
    k_prime: Option<u32>,
    /// Explicit blocks, e.g. "3,5;7,11,13" (overrides greedy selection)
    #[arg(long)]
    blocks: Option<String>,
    /// JSON file holding explicit params (and optionally constants/blocks)
    #[arg(long)]
    params_file: Option<PathBuf>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long)]
    c3: Option<f64>,
    /// Factoring effort "TRIAL_BOUND,RHO_ITERS"
    #[arg(long)]
    effort: Option<String>,
    /// Output path for the construction document (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format (json only for this command)
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct VerifyArgs {
    /// Construction JSON document
    #[arg(long)]
    construction: PathBuf,
    /// Sweep the progression up to this bound
    #[arg(long)]
    x: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct ScanArgs {
    /// Inclusive range "LO:HI"
    #[arg(long)]
    range: String,
    /// Representation form: p+2^b, p+2^a+2^b, or p^alpha+2^a+2^b
    #[arg(long)]
    form: String,
    /// Multiplier c in p + c(2^a + 2^b)
    #[arg(long, default_value_t = 1)]
    c: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// json or csv
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct CoversArgs {
    /// Check progression members up to this limit
    #[arg(long, default_value_t = 100_000_000)]
    limit: u64,
    /// Exhaustive divisibility sweep over 0 <= a < b <= this exponent
    #[arg(long, default_value_t = 64)]
    crocker_max: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct SeriesArgs {
    /// Which table: mertens, primesum, c3, fls, l1, l2, or ppow
    #[arg(long)]
    which: String,
    /// Evaluation points, e.g. "10,100,1000"
    #[arg(long)]
    points: String,
    /// Exponent for the fls series (must be < 1/2)
    #[arg(long)]
    gamma: Option<f64>,
    /// Modulus W for l1 (decimal)
    #[arg(long)]
    w: Option<String>,
    /// Residue beta for l1 (decimal)
    #[arg(long)]
    beta: Option<String>,
    /// Prime list for l2, e.g. "3,5"
    #[arg(long)]
    primes: Option<String>,
    /// Factoring effort "TRIAL_BOUND,RHO_ITERS"
    #[arg(long)]
    effort: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json
    #[arg(long, default_value = "csv")]
    format: String,
}

/// Parses argv, runs the command, and returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Construct(args) => cmd_construct(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Scan(args) => cmd_scan(args),
        Command::Covers(args) => cmd_covers(args),
        Command::Series(args) => cmd_series(args),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            let json = serde_json::json!({
                "error": { "kind": e.kind(), "message": e.to_string() }
            });
            eprintln!("{json}");
            e.exit_code()
        }
    }
}

fn scan_budget() -> u64 {
    env_u64(ENV_SCAN_BUDGET).unwrap_or(DEFAULT_SCAN_BUDGET)
}

fn env_u64(name: &str) -> Option<u64> {
    std::env::var(name).ok().and_then(|v| v.parse().ok())
}

fn effort_from(flag: &Option<String>) -> Result<FactorBudget> {
    let mut budget = FactorBudget::default();
    if let Some(v) = env_u64(ENV_TRIAL_BOUND) {
        budget.trial_bound = v;
    }
    if let Some(v) = env_u64(ENV_RHO_ITERS) {
        budget.rho_iterations = v;
    }
    if let Some(s) = flag {
        let (t, r) = s
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("--effort expects TRIAL,RHO, got {s:?}")))?;
        budget.trial_bound = t
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("trial bound: {e}")))?;
        budget.rho_iterations = r
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("rho iterations: {e}")))?;
    }
    Ok(budget)
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn to_json_doc<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization");
    s.push('\n');
    s
}

/// Optional fields accepted from `--params-file`.
#[derive(serde::Deserialize)]
struct ParamsFile {
    x: String,
    k: u32,
    l: f64,
    u: f64,
    m: u32,
    k_prime: u32,
    c1: Option<f64>,
    c2: Option<f64>,
    c3: Option<f64>,
    blocks: Option<Vec<Vec<u64>>>,
}

fn cmd_construct(args: ConstructArgs) -> Result<()> {
    if args.format != "json" {
        return Err(Error::Domain(format!(
            "construct emits json only, got --format {}",
            args.format
        )));
    }
    let effort = effort_from(&args.effort)?;

    if args.derive {
        let constants = constants_from(args.c1, args.c2, args.c3, &effort)?;
        let magnitude = match (&args.x, args.x_lnlnln) {
            (Some(x), None) => Magnitude::Exact(parse_biguint(x).map_err(Error::Parse)?),
            (None, Some(v)) => Magnitude::LnLnLn(v),
            _ => {
                return Err(Error::Domain(
                    "--derive needs exactly one of --x or --x-lnlnln".into(),
                ))
            }
        };
        let scale = derive_params(&magnitude, &constants)?;
        let chain = check_derived_magnitude_chain(&scale);
        let doc = serde_json::json!({ "derived": scale, "magnitude_chain": chain });
        return write_output(&args.out, &to_json_doc(&doc));
    }

    // Explicit mode: flags or params file.
    let (params, constants, explicit_blocks) = if let Some(path) = &args.params_file {
        let raw = std::fs::read_to_string(path)?;
        let pf: ParamsFile =
            serde_json::from_str(&raw).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let params = ExplicitParams::new(
            parse_biguint(&pf.x).map_err(Error::Parse)?,
            pf.k,
            pf.l,
            pf.u,
            pf.m,
            pf.k_prime,
        )?;
        let constants = constants_from(
            args.c1.or(pf.c1),
            args.c2.or(pf.c2),
            args.c3.or(pf.c3),
            &effort,
        )?;
        (params, constants, pf.blocks)
    } else {
        let missing = |flag: &str| Error::Domain(format!("--{flag} is required in explicit mode"));
        let x = args.x.as_ref().ok_or_else(|| missing("x"))?;
        let params = ExplicitParams::new(
            parse_biguint(x).map_err(Error::Parse)?,
            args.k.ok_or_else(|| missing("k"))?,
            args.l.ok_or_else(|| missing("l"))?,
            args.u.ok_or_else(|| missing("u"))?,
            args.m.ok_or_else(|| missing("m"))?,
            args.k_prime.ok_or_else(|| missing("k-prime"))?,
        )?;
        let constants = constants_from(args.c1, args.c2, args.c3, &effort)?;
        let blocks = args.blocks.as_deref().map(parse_blocks).transpose()?;
        (params, constants, blocks)
    };

    let raw_blocks = match explicit_blocks {
        Some(b) => b,
        None => select_prime_blocks(params.u, params.k, params.l)?,
    };
    let blocks = attach_companions(&raw_blocks, &effort)?;
    let gammas = fermat_gammas(params.m, &FermatBudget::default())?;
    let x = params.x.clone();
    let cons = assemble(params, constants, blocks, gammas)?;

    let doc = to_json_doc(&cons);
    let members = cons.progression_count(&x);
    let summary = format!(
        "W = {}\nbeta = {}\n|S ∩ [1, {}]| = {}\n",
        cons.w, cons.beta, x, members
    );
    match &args.out {
        Some(path) => {
            std::fs::write(path, doc)?;
            print!("{summary}");
        }
        None => {
            print!("{doc}");
            eprint!("{summary}");
        }
    }
    Ok(())
}

fn constants_from(
    c1: Option<f64>,
    c2: Option<f64>,
    c3: Option<f64>,
    effort: &FactorBudget,
) -> Result<SieveConstants> {
    let mut constants = SieveConstants::computed(effort)?;
    if let Some(v) = c1 {
        constants.c1 = v;
    }
    if let Some(v) = c2 {
        constants.c2 = v;
    }
    if let Some(v) = c3 {
        constants.c3 = v;
    }
    constants.validate()?;
    Ok(constants)
}

fn parse_blocks(s: &str) -> Result<Vec<Vec<u64>>> {
    s.split(';')
        .map(|block| {
            block
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<u64>()
                        .map_err(|e| Error::Parse(format!("block prime {p:?}: {e}")))
                })
                .collect()
        })
        .collect()
}

fn cmd_verify(args: VerifyArgs) -> Result<()> {
    if args.format != "json" {
        return Err(Error::Domain(format!(
            "verify emits json only, got --format {}",
            args.format
        )));
    }
    let raw = std::fs::read_to_string(&args.construction)?;
    let cons: Construction = serde_json::from_str(&raw)
        .map_err(|e| Error::Parse(format!("{}: {e}", args.construction.display())))?;
    cons.audit()?;
    let report = verify_progression(&cons, args.x, args.workers, scan_budget())?;
    let chain = check_magnitude_chain(&cons);
    let doc = serde_json::json!({ "progression": report, "magnitude_chain": chain });
    write_output(&args.out, &to_json_doc(&doc))
}

fn cmd_scan(args: ScanArgs) -> Result<()> {
    let (lo, hi) = args
        .range
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("--range expects LO:HI, got {:?}", args.range)))?;
    let lo: u64 = lo
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("range start: {e}")))?;
    let hi: u64 = hi
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("range end: {e}")))?;
    let form: Form = args.form.parse()?;
    let report = scan_density(lo, hi, form, args.c, args.workers, scan_budget())?;
    let content = match args.format.as_str() {
        "json" => to_json_doc(&report),
        "csv" => {
            let mut s = String::from(
                "range_lo,range_hi,form,c,scanned,representable,non_representable,smallest_non_representable\n",
            );
            let members: Vec<String> = report
                .smallest_non_representable
                .iter()
                .map(u64::to_string)
                .collect();
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                report.range_lo,
                report.range_hi,
                report.form,
                report.c,
                report.scanned,
                report.representable,
                report.non_representable,
                members.join(";")
            );
            s
        }
        other => return Err(Error::Domain(format!("unknown format {other:?}"))),
    };
    write_output(&args.out, &content)
}

#[derive(Serialize)]
struct CrockerSweep {
    max_exponent: u64,
    checked: u64,
    failures: Vec<(u64, u64)>,
}

fn cmd_covers(args: CoversArgs) -> Result<()> {
    if args.format != "json" {
        return Err(Error::Domain(format!(
            "covers emits json only, got --format {}",
            args.format
        )));
    }
    if args.limit < COVERED_PROGRESSION_BASE {
        eprintln!(
            "warning: limit {} is below the first progression member {}; nothing to check",
            args.limit, COVERED_PROGRESSION_BASE
        );
    }
    let erdos = verify_erdos_progression(args.limit);
    let mut sweep = CrockerSweep {
        max_exponent: args.crocker_max,
        checked: 0,
        failures: Vec::new(),
    };
    for a in 0..args.crocker_max {
        for b in (a + 1)..=args.crocker_max {
            let check = crocker_divisibility(a, b)?;
            sweep.checked += 1;
            if !check.divides {
                sweep.failures.push((a, b));
            }
        }
    }
    let doc = serde_json::json!({ "erdos": erdos, "crocker": sweep });
    write_output(&args.out, &to_json_doc(&doc))?;
    if !erdos.violations.is_empty() || !sweep.failures.is_empty() {
        return Err(Error::Correctness(format!(
            "covering checks failed: {} progression violations, {} divisibility failures",
            erdos.violations.len(),
            sweep.failures.len()
        )));
    }
    Ok(())
}

fn cmd_series(args: SeriesArgs) -> Result<()> {
    let points: Vec<u64> = args
        .points
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<u64>()
                .map_err(|e| Error::Parse(format!("point {p:?}: {e}")))
        })
        .collect::<Result<_>>()?;
    if points.is_empty() {
        return Err(Error::Domain("need at least one evaluation point".into()));
    }
    let effort = effort_from(&args.effort)?;
    let table = match args.which.as_str() {
        "mertens" => {
            let rows: Vec<_> = points
                .iter()
                .map(|&u| analytics::mertens_sum(u, analytics::MERTENS_B))
                .collect::<Result<_>>()?;
            Table::Mertens(rows)
        }
        "primesum" => {
            let rows: Vec<_> = points
                .iter()
                .map(|&u| analytics::prime_sum(u))
                .collect::<Result<_>>()?;
            Table::PrimeSum(rows)
        }
        "c3" => {
            let rows: Vec<_> = points
                .iter()
                .map(|&l| analytics::c3_partial(l, &effort))
                .collect::<Result<_>>()?;
            Table::Series(rows, None)
        }
        "fls" => {
            let gamma = args
                .gamma
                .ok_or_else(|| Error::Domain("fls needs --gamma".into()))?;
            let rows: Vec<_> = points
                .iter()
                .map(|&l| analytics::fls_partial(l, gamma, &effort))
                .collect::<Result<_>>()?;
            Table::Series(rows, Some(gamma))
        }
        "l1" => {
            let w = parse_biguint(
                args.w
                    .as_deref()
                    .ok_or_else(|| Error::Domain("l1 needs --w".into()))?,
            )
            .map_err(Error::Parse)?;
            let beta = parse_biguint(
                args.beta
                    .as_deref()
                    .ok_or_else(|| Error::Domain("l1 needs --beta".into()))?,
            )
            .map_err(Error::Parse)?;
            let rows: Vec<_> = points
                .iter()
                .map(|&x| analytics::sieve_ratio_l1(&w, &beta, x, &effort))
                .collect::<Result<_>>()?;
            Table::L1(rows)
        }
        "l2" => {
            let primes: Vec<u64> = args
                .primes
                .as_deref()
                .ok_or_else(|| Error::Domain("l2 needs --primes".into()))?
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<u64>()
                        .map_err(|e| Error::Parse(format!("prime {p:?}: {e}")))
                })
                .collect::<Result<_>>()?;
            let rows: Vec<_> = points
                .iter()
                .map(|&x| analytics::sieve_ratio_l2(x, &primes))
                .collect::<Result<_>>()?;
            Table::L2(rows)
        }
        "ppow" => {
            let rows: Vec<_> = points
                .iter()
                .map(|&x| analytics::prime_power_rep_count(x, scan_budget()))
                .collect::<Result<_>>()?;
            Table::PrimePowerRep(rows)
        }
        other => {
            return Err(Error::Domain(format!(
                "unknown series {other:?}; expected mertens, primesum, c3, fls, l1, l2, or ppow"
            )))
        }
    };
    let content = match args.format.as_str() {
        "json" => table.to_json(),
        "csv" => table.to_csv(),
        other => return Err(Error::Domain(format!("unknown format {other:?}"))),
    };
    write_output(&args.out, &content)
}

enum Table {
    Mertens(Vec<analytics::MertensPoint>),
    PrimeSum(Vec<analytics::PrimeSumPoint>),
    Series(Vec<analytics::SeriesReport>, Option<f64>),
    L1(Vec<analytics::L1Point>),
    L2(Vec<analytics::L2Point>),
    PrimePowerRep(Vec<analytics::PrimePowerRepPoint>),
}

impl Table {
    fn to_json(&self) -> String {
        match self {
            Table::Mertens(rows) => to_json_doc(rows),
            Table::PrimeSum(rows) => to_json_doc(rows),
            Table::Series(rows, _) => to_json_doc(rows),
            Table::L1(rows) => to_json_doc(rows),
            Table::L2(rows) => to_json_doc(rows),
            Table::PrimePowerRep(rows) => to_json_doc(rows),
        }
    }

    fn to_csv(&self) -> String {
        let mut s = String::new();
        match self {
            Table::Mertens(rows) => {
                s.push_str("u,sum,residual\n");
                for r in rows {
                    let _ = writeln!(s, "{},{},{}", r.u, r.sum, r.residual);
                }
            }
            Table::PrimeSum(rows) => {
                s.push_str("u,sum,ratio\n");
                for r in rows {
                    let _ = writeln!(s, "{},{},{}", r.u, r.sum, r.ratio);
                }
            }
            Table::Series(rows, gamma) => {
                match gamma {
                    Some(g) => {
                        s.push_str("limit,gamma,partial_sum,terms,incomplete_terms\n");
                        for r in rows {
                            let _ = writeln!(
                                s,
                                "{},{},{},{},{}",
                                r.limit, g, r.partial_sum, r.terms, r.incomplete_terms
                            );
                        }
                    }
                    None => {
                        s.push_str("limit,partial_sum,terms,incomplete_terms\n");
                        for r in rows {
                            let _ = writeln!(
                                s,
                                "{},{},{},{}",
                                r.limit, r.partial_sum, r.terms, r.incomplete_terms
                            );
                        }
                    }
                }
            }
            Table::L1(rows) => {
                s.push_str("x,w,beta,count,bound_shape,implied_c1\n");
                for r in rows {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{}",
                        r.x, r.w, r.beta, r.count, r.bound_shape, r.implied_c1
                    );
                }
            }
            Table::L2(rows) => {
                s.push_str("x,primes,count,bound_shape,implied_c2\n");
                for r in rows {
                    let primes: Vec<String> = r.primes.iter().map(u64::to_string).collect();
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{}",
                        r.x,
                        primes.join(";"),
                        r.count,
                        r.bound_shape,
                        r.implied_c2
                    );
                }
            }
            Table::PrimePowerRep(rows) => {
                s.push_str("x,count,normalized\n");
                for r in rows {
                    let _ = writeln!(s, "{},{},{}", r.x, r.count, r.normalized);
                }
            }
        }
        s
    }
}
