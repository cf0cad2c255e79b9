use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand};

use gh_scheme_cli::{
    cmd_construct, cmd_eigen, cmd_kloosterman, cmd_leopardi, cmd_scheme, cmd_selftest, cmd_srg,
    AppError, CommandReport, Format, PhiSpec, RunConfig,
};

/// Exact constructions and certificates for Bush-type generalized Hadamard
/// matrices over finite fields and their association schemes.
#[derive(Parser)]
#[command(name = "gh-scheme", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FieldArgs {
    /// Field characteristic (a prime).
    #[arg(long)]
    p: u32,
    /// Extension degree.
    #[arg(long)]
    m: u32,
    /// Modulus polynomial as comma-separated coefficients c0,...,cm
    /// (low degree first, monic); defaults to the lexicographically
    /// smallest irreducible.
    #[arg(long)]
    modulus: Option<String>,
    /// Additive map onto a subfield: identity | trace | beta:<code> |
    /// subfield:<order>.
    #[arg(long, default_value = "trace")]
    phi: String,
    /// Output directory for the generated files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Output format: json | csv | latex (latex: eigen only).
    #[arg(long, default_value = "json")]
    format: String,
    /// Worker-thread cap (fallback: GH_SCHEME_THREADS, then 1).
    #[arg(long)]
    threads: Option<usize>,
    /// Increase verbosity.
    #[arg(short, long, action = ArgAction::Count)]
    verbose: u8,
}

#[derive(Args)]
struct SchemeArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Also write the per-pair class dump CSV.
    #[arg(long)]
    pairs: bool,
}

#[derive(Args)]
struct SelftestArgs {
    /// Largest field order to include.
    #[arg(long, default_value_t = 9)]
    max_q: u32,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(short, long, action = ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand)]
enum Command {
    /// Build H, L, M(H, L) and phi(M); verify GH, Bush-type and symmetry.
    Construct(FieldArgs),
    /// Build the relation partition and verify the scheme axioms exactly.
    Scheme(SchemeArgs),
    /// Eigenmatrices: brute-force character sums, closed forms, duality.
    Eigen(FieldArgs),
    /// The exact Kloosterman table with product-law and reality checks.
    Kloosterman(FieldArgs),
    /// Strongly-regular-graph parameters and spread checks (p = 3).
    Srg(FieldArgs),
    /// Swap-automorphism certificate for A_2 + A_3 (p = 3).
    Leopardi(FieldArgs),
    /// Run the full verification suite at q <= max-q.
    Selftest(SelftestArgs),
}

fn env_threads() -> usize {
    std::env::var("GH_SCHEME_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(1)
}

fn parse_modulus(raw: &Option<String>) -> Result<Option<Vec<u32>>, AppError> {
    match raw {
        None => Ok(None),
        Some(s) => {
            let coeffs: Result<Vec<u32>, _> =
                s.split(',').map(|t| t.trim().parse::<u32>()).collect();
            coeffs
                .map(Some)
                .map_err(|_| AppError::Usage(format!("bad modulus coefficient list '{s}'")))
        }
    }
}

fn to_config(args: &FieldArgs, pairs: bool) -> Result<RunConfig, AppError> {
    let phi: PhiSpec = args.phi.parse().map_err(AppError::Usage)?;
    let format: Format = args.format.parse().map_err(AppError::Usage)?;
    let threads = args.threads.unwrap_or_else(env_threads).max(1);
    Ok(RunConfig {
        p: args.p,
        m: args.m,
        modulus: parse_modulus(&args.modulus)?,
        phi,
        out_dir: args.out.clone(),
        format,
        threads,
        verbosity: args.verbose,
        pairs,
    })
}

fn print_report(report: &CommandReport, verbosity: u8) {
    for (name, ok) in &report.verdicts {
        println!("[{}] {name}", if *ok { "PASS" } else { "FAIL" });
    }
    if verbosity > 0 {
        for file in &report.files {
            println!("wrote {}", file.display());
        }
    }
}

fn run() -> Result<CommandReport, (AppError, u8)> {
    let cli = Cli::parse();
    let dispatch = |args: &FieldArgs,
                    pairs: bool,
                    f: fn(&RunConfig) -> Result<CommandReport, AppError>|
     -> Result<(CommandReport, u8), (AppError, u8)> {
        let cfg = to_config(args, pairs).map_err(|e| (e, args.verbose))?;
        f(&cfg)
            .map(|r| (r, args.verbose))
            .map_err(|e| (e, args.verbose))
    };
    let (report, verbosity) = match &cli.command {
        Command::Construct(args) => dispatch(args, false, cmd_construct)?,
        Command::Scheme(args) => dispatch(&args.field, args.pairs, cmd_scheme)?,
        Command::Eigen(args) => dispatch(args, false, cmd_eigen)?,
        Command::Kloosterman(args) => dispatch(args, false, cmd_kloosterman)?,
        Command::Srg(args) => dispatch(args, false, cmd_srg)?,
        Command::Leopardi(args) => dispatch(args, false, cmd_leopardi)?,
        Command::Selftest(args) => {
            let cfg = RunConfig {
                p: 0,
                m: 0,
                modulus: None,
                phi: PhiSpec::Trace,
                out_dir: PathBuf::from("."),
                format: Format::Json,
                threads: args.threads.unwrap_or_else(env_threads).max(1),
                verbosity: args.verbose,
                pairs: false,
            };
            let report = cmd_selftest(&cfg, args.max_q).map_err(|e| (e, args.verbose))?;
            (report, args.verbose)
        }
    };
    print_report(&report, verbosity);
    Ok(report)
}

fn main() -> ExitCode {
    match run() {
        Ok(report) if report.all_pass() => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err((err, _)) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
