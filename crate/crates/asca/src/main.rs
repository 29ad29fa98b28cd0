use asca::cli::{
    self, ParamOverrides, RunConfig, ScenarioSpec, EXIT_AUDIT_VIOLATION, EXIT_NON_CONVERGED,
};
use asca::planner::ActivationMode;
use asca::Error;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "asca",
    version,
    about = "Deterministic angular swarm collision-avoidance simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy, Default)]
struct ParamArgs {
    /// Minimum required pairwise separation in meters
    #[arg(long)]
    d_min: Option<f64>,
    /// Maximum agent speed in meters/second
    #[arg(long)]
    v_max: Option<f64>,
    /// Step length in seconds
    #[arg(long)]
    dt: Option<f64>,
    /// Simulated time budget in seconds
    #[arg(long)]
    t_final: Option<f64>,
    /// Goal distance below which an agent counts as arrived, in meters
    #[arg(long)]
    d_final: Option<f64>,
    /// Which center distance activates a neighbor's constraint
    #[arg(long, value_enum)]
    activation: Option<ActivationMode>,
}

impl From<ParamArgs> for ParamOverrides {
    fn from(a: ParamArgs) -> ParamOverrides {
        ParamOverrides {
            d_min: a.d_min,
            v_max: a.v_max,
            dt: a.dt,
            t_final: a.t_final,
            d_final: a.d_final,
            activation: a.activation,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scenario and write trajectory, summary, and audit files
    Run {
        /// Scenario file path, or generator spec like "mirror:n=100,spacing=15"
        /// (generators: mirror, diagonal, circle, disk, sphere, random)
        #[arg(long)]
        scenario: String,
        /// Output directory (default: $ASCA_OUT_DIR or ./out)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Keep every k-th trajectory record (first and last always kept)
        #[arg(long, default_value_t = 1)]
        decimate: u32,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Run the five standard benchmarks at N = 100 and emit bench.csv
    Bench {
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run the benchmarks on worker threads (outputs are identical)
        #[arg(long)]
        parallel: bool,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Disk-swap sweep over agent counts at a fixed inner radius
    Scale {
        /// Agent counts to sweep
        #[arg(long, value_delimiter = ',', default_values_t = vec![50, 100, 150, 200, 250, 300])]
        counts: Vec<usize>,
        #[arg(long, default_value_t = 60.0)]
        inner_radius: f64,
        #[arg(long, default_value_t = 15.0)]
        ring_spacing: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        parallel: bool,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Seeded random scenarios with box-plot statistics and aspect ratio
    Random {
        /// Number of scenarios to run
        #[arg(long, default_value_t = 100)]
        scenarios: usize,
        /// Agents per scenario
        #[arg(long, default_value_t = 100)]
        agents: usize,
        #[arg(long, default_value_t = 0)]
        base_seed: u64,
        /// Side length of the square sampling box in meters
        #[arg(long, default_value_t = 500.0)]
        box_side: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        parallel: bool,
        #[command(flatten)]
        params: ParamArgs,
    },
}

fn dispatch(command: Command) -> Result<i32, Error> {
    match command {
        Command::Run {
            scenario,
            out,
            decimate,
            params,
        } => {
            let config = RunConfig {
                spec: ScenarioSpec::parse(&scenario)?,
                overrides: params.into(),
                out_dir: cli::resolve_out_dir(out),
                decimate,
            };
            let report = cli::cmd_run(&config)?;
            Ok(if report.audit_violations > 0 {
                EXIT_AUDIT_VIOLATION
            } else if !report.outcome.converged {
                EXIT_NON_CONVERGED
            } else {
                0
            })
        }
        Command::Bench {
            out,
            parallel,
            params,
        } => {
            let reports = cli::cmd_bench(&cli::resolve_out_dir(out), &params.into(), parallel)?;
            Ok(if reports.iter().any(|r| r.audit_violations > 0) {
                EXIT_AUDIT_VIOLATION
            } else if reports.iter().any(|r| !r.outcome.converged) {
                EXIT_NON_CONVERGED
            } else {
                0
            })
        }
        Command::Scale {
            counts,
            inner_radius,
            ring_spacing,
            out,
            parallel,
            params,
        } => {
            let report = cli::cmd_scale(
                &counts,
                inner_radius,
                ring_spacing,
                &params.into(),
                &cli::resolve_out_dir(out),
                parallel,
            )?;
            Ok(
                if report
                    .rows
                    .iter()
                    .any(|r| !r.converged && r.skipped.is_none())
                {
                    EXIT_NON_CONVERGED
                } else {
                    0
                },
            )
        }
        Command::Random {
            scenarios,
            agents,
            base_seed,
            box_side,
            out,
            parallel,
            params,
        } => {
            let report = cli::cmd_random(
                scenarios,
                agents,
                base_seed,
                box_side,
                &params.into(),
                &cli::resolve_out_dir(out),
                parallel,
            )?;
            Ok(if report.nonconverged > 0 {
                EXIT_NON_CONVERGED
            } else {
                0
            })
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprint!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(cause) = source {
                eprint!(": {cause}");
                source = cause.source();
            }
            eprintln!();
            cli::error_exit_code(&e)
        }
    };
    std::process::exit(code);
}
