use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ncharm_cli::report::Verdict;
use ncharm_cli::{lookup, run, CliError, CliResult, ExperimentConfig, REGISTRY};

/// Runs the numerical experiments of the ncharm library.
#[derive(Parser)]
#[command(name = "ncharm", version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// Experiment name (see `ncharm list`).
    experiment: Option<String>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Lists the registered experiments.
    List,
    /// Prints an experiment's parameters and defaults as a config file.
    Defaults { experiment: String },
}

#[derive(Args)]
struct RunArgs {
    /// `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for the CSV and JSON files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the `carrier` (or `carriers`) parameter.
    #[arg(long)]
    carrier: Option<String>,
    /// Overrides the `seminorm` parameter.
    #[arg(long)]
    seminorm: Option<String>,
    /// Overrides the `states` parameter.
    #[arg(long)]
    states: Option<String>,
    /// Overrides any parameter; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Suppresses the per-check listing.
    #[arg(long, short)]
    quiet: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match (&cli.command, &cli.experiment) {
        (Some(Command::List), _) => list(),
        (Some(Command::Defaults { experiment }), _) => defaults(experiment),
        (None, Some(name)) => execute(name, &cli.run),
        (None, None) => Err(CliError::Config("name an experiment, or run `ncharm list`".into())),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn list() -> CliResult<bool> {
    let width = REGISTRY.iter().map(|e| e.name.len()).max().unwrap_or(0);
    for e in REGISTRY {
        println!("{:width$}  {:>6}  {}", e.name, e.runtime, e.anchor);
    }
    Ok(true)
}

fn defaults(name: &str) -> CliResult<bool> {
    let e = lookup(name)?;
    println!("experiment = {}\nseed = 0", e.name);
    for p in e.params {
        println!("# {}\n{} = {}", p.help, p.key, p.default);
    }
    Ok(true)
}

fn execute(name: &str, args: &RunArgs) -> CliResult<bool> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::load(Some(name), path)?,
        None => ExperimentConfig::defaults(name)?,
    };
    if let Some(seed) = args.seed {
        config = config.with_seed(seed);
    }
    if let Some(c) = &args.carrier {
        let key = if config.echo().contains_key("carrier") { "carrier" } else { "carriers" };
        config.set(key, c)?;
    }
    if let Some(v) = &args.seminorm {
        config.set("seminorm", v)?;
    }
    if let Some(v) = &args.states {
        config.set("states", v)?;
    }
    for kv in &args.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        config.set(k.trim(), v.trim())?;
    }
    let report = run(&config)?;
    let files = report.write(&args.out)?;
    for r in &report.records {
        if args.quiet && r.verdict != Verdict::Fail {
            continue;
        }
        let tag = match r.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Info => "info",
        };
        match r.threshold {
            Some(t) => println!("{tag}  {}  {:e} (need {} {:e})", r.name, r.value, relation(r), t),
            None => println!("{tag}  {}  {:e}", r.name, r.value),
        }
    }
    println!(
        "{}: {} in {:.2} s; wrote {}",
        report.experiment,
        if report.passed { "passed" } else { "FAILED" },
        report.wall_time_seconds,
        files.iter().map(|f| f.display().to_string()).collect::<Vec<_>>().join(", ")
    );
    Ok(report.passed)
}

fn relation(r: &ncharm_cli::report::Record) -> &'static str {
    match r.relation {
        ncharm_cli::report::Relation::AtMost => "≤",
        ncharm_cli::report::Relation::AtLeast => "≥",
        ncharm_cli::report::Relation::None => "",
    }
}
