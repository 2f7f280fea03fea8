//! `padicfrac`: expand a value in Q_p, reproduce the periodicity table,
//! or audit a corpus against the independent oracles.
//!
//! Exit codes: 0 success (including Truncated results), 1 audit failure,
//! 2 invalid input.

use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use padicfrac::report::{audit_json, expansion_json, render_brackets, table_csv, table_json};
use padicfrac::sweep::{audit_corpus, run_table, SweepConfig};
use padicfrac::{expand, AlgorithmId, Branch, Error, Kind, PrimeCtx, Rat, Surd};

#[derive(Parser)]
#[command(name = "padicfrac", version, about = "Exact p-adic continued fraction expansions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand one rational or quadratic surd.
    Expand(ExpandArgs),
    /// Periodicity counts over all admissible D per prime.
    Table(TableArgs),
    /// Run the oracle audits over a corpus; exit 1 on any failure.
    Audit(AuditArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum BranchArg {
    Plus,
    Minus,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Branch {
        match b {
            BranchArg::Plus => Branch::Plus,
            BranchArg::Minus => Branch::Minus,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TextFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct ExpandArgs {
    /// The prime p.
    #[arg(long)]
    p: u64,
    /// Algorithm: browkin1, browkin4, murru, new, neww, modified, or rblockN.
    #[arg(long)]
    alg: String,
    /// Numerator of a rational input.
    #[arg(long, allow_hyphen_values = true)]
    num: Option<String>,
    /// Denominator of a rational input (default 1).
    #[arg(long, allow_hyphen_values = true)]
    den: Option<String>,
    /// Expand sqrt(D).
    #[arg(long)]
    sqrt: Option<String>,
    /// Expand (P + sqrt(D))/Q, given as P,Q,D.
    #[arg(long)]
    surd: Option<String>,
    /// Which square root of D is meant.
    #[arg(long, value_enum, default_value = "plus")]
    branch: BranchArg,
    #[arg(long, default_value_t = 1000)]
    max_steps: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: TextFormat,
}

/// Sweep options shared by `table` and `audit`: a flat key = value
/// config file, overridden by individual flags.
#[derive(Args)]
struct ConfigArgs {
    /// Path to a flat key = value config file.
    #[arg(long)]
    config: Option<String>,
    /// Comma-separated primes.
    #[arg(long)]
    primes: Option<String>,
    #[arg(long)]
    d_min: Option<u64>,
    #[arg(long)]
    d_max: Option<u64>,
    #[arg(long)]
    max_steps: Option<usize>,
    /// Step cap for neww at p <= 31.
    #[arg(long)]
    neww_small_prime_steps: Option<usize>,
    /// Worker threads (also settable via PADICFRAC_THREADS).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, value_enum, default_value = "csv")]
    format: TableFormat,
}

#[derive(Args)]
struct AuditArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Random rationals per prime for the digit/reconstruction checks.
    #[arg(long, default_value_t = 200)]
    cases: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: TextFormat,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<SweepConfig, Error> {
        let mut config = SweepConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidInput(format!("config file {path}: {e}")))?;
            config.apply_kv_text(&text)?;
        }
        if let Some(primes) = &self.primes {
            config.apply_kv("primes", primes)?;
        }
        if let Some(v) = self.d_min {
            config.d_min = v;
        }
        if let Some(v) = self.d_max {
            config.d_max = v;
        }
        if let Some(v) = self.max_steps {
            config.max_steps = v;
        }
        if let Some(v) = self.neww_small_prime_steps {
            config.neww_small_prime_steps = v;
        }
        if let Some(v) = self.threads {
            config.threads = Some(v);
        }
        if let Some(v) = self.seed {
            config.seed = v;
        }
        // env override wins over both file and flag
        if let Ok(t) = std::env::var("PADICFRAC_THREADS") {
            config.threads = Some(
                t.parse()
                    .map_err(|_| Error::InvalidInput(format!("PADICFRAC_THREADS = `{t}`")))?,
            );
        }
        Ok(config)
    }
}

fn init_threads(config: &SweepConfig) {
    if let Some(t) = config.threads {
        // a duplicate build (e.g. in tests) is harmless; ignore it
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
}

fn parse_bigint(s: &str, what: &str) -> Result<BigInt, Error> {
    BigInt::from_str(s).map_err(|_| Error::InvalidInput(format!("{what}: `{s}` is not an integer")))
}

fn parse_input(args: &ExpandArgs, ctx: &Arc<PrimeCtx>) -> Result<Surd, Error> {
    let picked = [args.num.is_some(), args.sqrt.is_some(), args.surd.is_some()]
        .iter()
        .filter(|&&b| b)
        .count();
    if picked != 1 {
        return Err(Error::InvalidInput(
            "give exactly one of --num [--den], --sqrt, --surd".into(),
        ));
    }
    if let Some(num) = &args.num {
        let num = parse_bigint(num, "--num")?;
        let den = match &args.den {
            Some(d) => parse_bigint(d, "--den")?,
            None => BigInt::from(1),
        };
        if den == BigInt::from(0) {
            return Err(Error::ZeroDenominator);
        }
        return Ok(Surd::from_rat(ctx.clone(), Rat::new(num, den)));
    }
    if args.den.is_some() {
        return Err(Error::InvalidInput("--den requires --num".into()));
    }
    if let Some(d) = &args.sqrt {
        let d = parse_bigint(d, "--sqrt")?;
        return Surd::from_sqrt(ctx.clone(), d, args.branch.into());
    }
    let spec = args.surd.as_ref().expect("picked == 1");
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::InvalidInput(format!("--surd expects P,Q,D, got `{spec}`")));
    }
    let p_coef = parse_bigint(parts[0], "--surd P")?;
    let q_coef = parse_bigint(parts[1], "--surd Q")?;
    let d = parse_bigint(parts[2], "--surd D")?;
    if d == BigInt::from(0) {
        return Ok(Surd::from_rat(ctx.clone(), Rat::new(p_coef, q_coef)));
    }
    Surd::new(
        ctx.clone(),
        Rat::from(p_coef),
        Rat::from(q_coef),
        d,
        args.branch.into(),
    )
}

fn cmd_expand(args: &ExpandArgs) -> Result<(), Error> {
    let ctx = Arc::new(PrimeCtx::new(args.p)?);
    let alg = AlgorithmId::from_str(&args.alg)?;
    let alpha = parse_input(args, &ctx)?;
    let e = expand(&alpha, alg, args.max_steps)?;
    match args.format {
        TextFormat::Json => println!("{}", serde_json::to_string_pretty(&expansion_json(&e)).unwrap()),
        TextFormat::Text => {
            println!("{}", render_brackets(ctx.big(), &e));
            match e.kind {
                Kind::Finite => println!("finite, {} quotients", e.quotients.len()),
                Kind::Periodic { preperiod, period } => {
                    println!("periodic, pre-period {preperiod}, period {period}")
                }
                Kind::Truncated => println!("truncated at {} steps", e.quotients.len()),
            }
        }
    }
    Ok(())
}

fn cmd_table(args: &TableArgs) -> Result<(), Error> {
    let config = args.config.resolve()?;
    init_threads(&config);
    let rows = run_table(&config)?;
    match args.format {
        TableFormat::Csv => print!("{}", table_csv(&config, &rows)),
        TableFormat::Json => {
            println!("{}", serde_json::to_string_pretty(&table_json(&config, &rows)).unwrap())
        }
    }
    Ok(())
}

fn cmd_audit(args: &AuditArgs) -> Result<bool, Error> {
    let config = args.config.resolve()?;
    init_threads(&config);
    let reports = audit_corpus(&config, args.cases)?;
    let pass = reports.iter().all(|r| r.all_pass());
    match args.format {
        TextFormat::Json => println!("{}", serde_json::to_string_pretty(&audit_json(&reports)).unwrap()),
        TextFormat::Text => {
            for r in &reports {
                for c in &r.checks {
                    let status = if c.pass { "pass" } else { "FAIL" };
                    let witness = c
                        .witness
                        .as_deref()
                        .map(|w| format!(" [{w}]"))
                        .unwrap_or_default();
                    println!("{status}  {}: {}{witness}", r.subject, c.name);
                }
            }
            println!("{}", if pass { "all checks passed" } else { "AUDIT FAILED" });
        }
    }
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Expand(args) => cmd_expand(args).map(|()| true),
        Command::Table(args) => cmd_table(args).map(|()| true),
        Command::Audit(args) => cmd_audit(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
