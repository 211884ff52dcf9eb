use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use strata::bench::{self, BenchConfig, BenchError, Flavor};
use strata::checks;
use strata::demo::{self, DemoConfig};
use strata::dynamics::QuadrotorParams;

/// Hierarchical optimization variables: assertions, benchmarks and an MPC demo.
#[derive(Parser)]
#[command(name = "strata", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check layout sizes, indices and path equivalences; exit 1 on any mismatch.
    Assert {
        /// Shift the value of the named assertion by one.
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
    /// Time hierarchy and map construction over a grid of horizons and rotor counts.
    BenchBuild(#[command(flatten)] BenchArgs),
    /// Time random leaf reads through each map flavor against raw offsets.
    BenchAccess {
        #[command(flatten)]
        bench: BenchArgs,
        /// Number of random reads per repetition.
        #[arg(long, default_value_t = 100_000)]
        reads: usize,
    },
    /// Closed-loop MPC of a quadrotor regulating to a hover setpoint.
    DemoQuadrotor(DemoArgs),
}

#[derive(Args)]
struct BenchArgs {
    /// Horizon lengths, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "30,90,390")]
    horizon: Vec<usize>,
    /// Rotor counts, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "4,8")]
    rotors: Vec<usize>,
    /// Timed repetitions per point (at least 3).
    #[arg(long, default_value_t = 11)]
    reps: usize,
    #[arg(long, default_value_t = 2)]
    warmup: usize,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl BenchArgs {
    fn config(&self) -> BenchConfig {
        BenchConfig {
            horizons: self.horizon.clone(),
            rotors: self.rotors.clone(),
            repetitions: self.reps,
            warmup: self.warmup,
        }
    }
}

#[derive(Args)]
struct DemoArgs {
    /// Vehicle parameters as key=value lines.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long, default_value_t = 15)]
    horizon: usize,
    #[arg(long, default_value_t = 0.05)]
    dt: f64,
    #[arg(long, default_value_t = 200)]
    steps: usize,
    /// Start position, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1,0,0", allow_negative_numbers = true)]
    start: Vec<f64>,
    /// Move the setpoint to `X,Y,Z` at step `--step-at`.
    #[arg(long, value_delimiter = ',', requires = "step_at", allow_negative_numbers = true)]
    step_to: Option<Vec<f64>>,
    #[arg(long, requires = "step_to")]
    step_at: Option<usize>,
    /// Trajectory CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    /// Assertion or solver failure.
    Check(String),
    Usage(String),
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Failure::Check(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn bench_failure(e: BenchError) -> Failure {
    match e {
        BenchError::Config(_) => Failure::Usage(e.to_string()),
        _ => Failure::Check(e.to_string()),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Assert { inject_fault } => {
            if let Some(name) = &inject_fault {
                if !checks::names().contains(name) {
                    return Err(Failure::Usage(format!("no assertion named `{name}`")));
                }
            }
            let results = checks::run(inject_fault.as_deref());
            print!("{}", checks::table(&results));
            match results.iter().find(|c| !c.passed()) {
                Some(c) => Err(Failure::Check(format!("assertion failed: {}", c.name))),
                None => Ok(()),
            }
        }
        Command::BenchBuild(args) => {
            let config = args.config();
            let rows = bench::bench_build(&config).map_err(bench_failure)?;
            emit(args.out.as_deref(), &bench::build_csv(&rows))?;
            let (n, r) = config.largest();
            let at = |f: Flavor| rows.iter().find(|x| x.horizon == n && x.rotors == r && x.flavor == f).unwrap();
            let (eager, lazy) = (at(Flavor::Eager).median_ns, at(Flavor::Lazy).median_ns);
            eprintln!("N={n} rotors={r}: lazy {lazy:.0} ns, eager {eager:.0} ns, lazy <= eager: {}", lazy <= eager);
            Ok(())
        }
        Command::BenchAccess { bench: args, reads } => {
            let rows = bench::bench_access(&args.config(), reads).map_err(bench_failure)?;
            emit(args.out.as_deref(), &bench::access_csv(&rows))
        }
        Command::DemoQuadrotor(args) => {
            let params = match &args.params {
                Some(path) => {
                    QuadrotorParams::load(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
                }
                None => QuadrotorParams::default(),
            };
            let point = |name: &str, v: &[f64]| -> Result<[f64; 3], Failure> {
                v.try_into().map_err(|_| Failure::Usage(format!("--{name} takes 3 comma-separated values")))
            };
            let start = point("start", &args.start)?;
            let step_to = args.step_to.as_deref().map(|v| point("step-to", v)).transpose()?;
            let config = DemoConfig {
                params,
                horizon: args.horizon,
                dt: args.dt,
                steps: args.steps,
                start,
                target_step: args.step_at.zip(step_to),
                ..DemoConfig::default()
            };
            match demo::run(&config) {
                Ok(result) => {
                    emit(args.out.as_deref(), &result.csv())?;
                    eprint!("{}", result.summary());
                    Ok(())
                }
                Err(demo::DemoError::Config(m)) => Err(Failure::Usage(m)),
                Err(demo::DemoError::Solver { source: e @ strata::sqp::SqpError::InvalidInstance(_), .. }) => {
                    Err(Failure::Usage(e.to_string()))
                }
                Err(e) => {
                    if let demo::DemoError::NotConverged { report, .. } = &e {
                        eprint!("{}", strata::sqp::report_to_text(report));
                    }
                    Err(Failure::Check(e.to_string()))
                }
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
