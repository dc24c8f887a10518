use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lrdcp::analyze::{self, ColumnSel, Preprocess};
use lrdcp::options::{parse_block, parse_marginal, parse_score, parse_tests};
use lrdcp::simulate::{run_simulation, SimConfig};
use lrdcp::whittle::{default_bandwidth, local_whittle_h};
use lrdcp::{CliError, CliResult};
use lrdcp_core::cp_stats::ranks;
use lrdcp_core::efficiency::{are_ratio, GaussianMarginal, MarginalModel, SubordinatedMarginal};
use lrdcp_core::lrd_sim::MarginalSpec;

#[derive(Parser)]
#[command(name = "lrdcp", version, about = "Self-normalized rank change-point tests for long-memory series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo rejection rates under subordinated fGn
    Simulate(SimulateArgs),
    /// Run change-point tests on a CSV column
    Test(TestArgs),
    /// Write the T_k trajectories of a CSV column
    Trajectory(TrajectoryArgs),
    /// Local Whittle estimate of the Hurst index
    Hurst(HurstArgs),
    /// Asymptotic relative efficiency of two score functions
    Are(AreArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value = "normal")]
    marginal: String,
    #[arg(long)]
    hurst: f64,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    tau: f64,
    #[arg(long, default_value_t = 0.0)]
    shift: f64,
    #[arg(long, default_value_t = 5000)]
    reps: usize,
    /// N or gamma:F
    #[arg(long, default_value = "gamma:0.5")]
    block: String,
    #[arg(long, default_value = "wilcoxon,vdw,cusum")]
    tests: String,
    #[arg(long, default_value_t = 0.05)]
    level: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    input: String,
    /// Column name, or 0-based index
    #[arg(long)]
    column: Option<String>,
    #[arg(long)]
    log_returns: bool,
    #[arg(long)]
    abs: bool,
}

#[derive(Args)]
struct TestArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value = "wilcoxon,vdw,cusum")]
    tests: String,
    #[arg(long, default_value = "gamma:0.5")]
    block: String,
    #[arg(long, default_value_t = 0.05)]
    level: f64,
    #[arg(long)]
    out: Option<String>,
    /// Also write the trajectories to this CSV
    #[arg(long)]
    trajectory_out: Option<String>,
}

#[derive(Args)]
struct TrajectoryArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value = "wilcoxon,vdw,cusum")]
    tests: String,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct HurstArgs {
    #[command(flatten)]
    input: InputArgs,
    /// N or auto (floor(n^(2/3)))
    #[arg(long, default_value = "auto")]
    bandwidth: String,
}

#[derive(Args)]
struct AreArgs {
    #[arg(long)]
    score1: String,
    #[arg(long)]
    score2: String,
    #[arg(long, default_value = "gaussian")]
    marginal: String,
    /// Hermite rank (default: that of the marginal)
    #[arg(long)]
    rank: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lrdcp: {e}");
            e.exit_code()
        }
    }
}

fn output(path: Option<&str>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::Io {
            path: p.to_string(),
            source: e,
        })?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn io_err(path: Option<&str>) -> impl Fn(io::Error) -> CliError + '_ {
    move |e| CliError::Io {
        path: path.unwrap_or("<stdout>").to_string(),
        source: e,
    }
}

fn load(input: &InputArgs) -> CliResult<lrdcp_core::TimeSeries> {
    let column = input.column.clone().map(ColumnSel);
    let series = analyze::read_series_file(&input.input, column.as_ref())?;
    let series = analyze::preprocess(
        series,
        Preprocess {
            log_returns: input.log_returns,
            abs: input.abs,
        },
    )?;
    if !series.is_empty() && ranks(series.values())?.has_ties() {
        eprintln!("lrdcp: warning: {} contains tied values; ties get their maximal rank", input.input);
    }
    Ok(series)
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Simulate(a) => {
            let cfg = SimConfig {
                marginal: parse_marginal(&a.marginal)?,
                hurst: a.hurst,
                n: a.n,
                tau: a.tau,
                shift: a.shift,
                reps: a.reps,
                block: parse_block(&a.block)?,
                tests: parse_tests(&a.tests)?,
                level: a.level,
                seed: a.seed,
            };
            let table = match a.threads {
                Some(t) => rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| CliError::Usage(e.to_string()))?
                    .install(|| run_simulation(&cfg))?,
                None => run_simulation(&cfg)?,
            };
            let path = a.out.as_deref();
            let mut out = output(path)?;
            table
                .write_csv(&mut out)
                .map_err(|e| io_err(path)(e.into()))?;
            out.flush().map_err(io_err(path))
        }
        Command::Test(a) => {
            let series = load(&a.input)?;
            let tests = parse_tests(&a.tests)?;
            let reports = analyze::run_tests(&series, &tests, parse_block(&a.block)?, a.level)?;
            let mut stdout = io::stdout().lock();
            for r in &reports {
                write!(stdout, "{}", r.key_values()).map_err(io_err(None))?;
                writeln!(stdout, "argmax_label={}\n", series.label(r.argmax_k)).map_err(io_err(None))?;
            }
            if let Some(p) = a.out.as_deref() {
                let mut out = output(Some(p))?;
                analyze::write_reports_csv(&reports, &mut out).map_err(io_err(Some(p)))?;
                out.flush().map_err(io_err(Some(p)))?;
            }
            if let Some(p) = a.trajectory_out.as_deref() {
                let mut out = output(Some(p))?;
                analyze::write_trajectories_csv(&series, &tests, &mut out)?;
            }
            Ok(())
        }
        Command::Trajectory(a) => {
            let series = load(&a.input)?;
            let tests = parse_tests(&a.tests)?;
            let mut out = output(a.out.as_deref())?;
            analyze::write_trajectories_csv(&series, &tests, &mut out)
        }
        Command::Hurst(a) => {
            let series = load(&a.input)?;
            let m = match a.bandwidth.as_str() {
                "auto" => default_bandwidth(series.len()),
                s => s
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bandwidth must be N or auto, got '{s}'")))?,
            };
            let h = local_whittle_h(series.values(), Some(m))?;
            println!("hurst={h}\nbandwidth={m}\nn={}", series.len());
            Ok(())
        }
        Command::Are(a) => {
            let s1 = parse_score(&a.score1)?;
            let s2 = parse_score(&a.score2)?;
            let spec = parse_marginal(&a.marginal)?;
            let model: Box<dyn MarginalModel> = match spec {
                MarginalSpec::Normal => Box::new(GaussianMarginal),
                other => Box::new(SubordinatedMarginal(other)),
            };
            let r = are_ratio(&s1, &s2, model.as_ref(), a.rank.unwrap_or(spec.hermite_rank()))?;
            println!(
                "score1={}\nscore2={}\nmarginal={}\nintegral_J_1={}\nintegral_J_2={}\nintegral_f_1={}\nintegral_f_2={}\nratio={}\nquadrature_error={}",
                s1.name(),
                s2.name(),
                model.name(),
                r.integral_j_1,
                r.integral_j_2,
                r.integral_f_1,
                r.integral_f_2,
                r.ratio,
                r.quadrature_error
            );
            Ok(())
        }
    }
}
