use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use legalrisk::commands::{self, CmdError, OracleArgs, ScenarioChoice, SimulateArgs, SolveArgs, StrategySource};
use legalrisk::config::Config;
use legalrisk::output::{ensure_dir, write_json, Header};
use legalrisk::verify;

#[derive(Parser)]
#[command(name = "legalrisk", version, about = "Insider trading under dynamic legal risk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the limiting equilibrium and write solution.json and strategy.csv.
    Solve {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value = "auto")]
        scenario: ScenarioChoice,
        /// Number of uniform sample times in strategy.csv.
        #[arg(long, default_value_t = 201)]
        samples: usize,
    },
    /// Figure-style parameter sweeps.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// e.g. `p=1:6:11;c2=1|2|3;fig3.p=1.5|2`
        #[arg(long)]
        grid: Option<String>,
    },
    /// Monte Carlo simulation of the market.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        paths: usize,
        /// `solved` or a `t,theta` CSV file.
        #[arg(long, default_value = "solved")]
        strategy: StrategySource,
        #[arg(long, default_value = "auto")]
        scenario: ScenarioChoice,
        /// `limiting` (price E[V]) or `finite` (Bayes rule over the value support).
        #[arg(long, default_value = "limiting")]
        pricing: String,
        /// Write full path CSVs for the first N paths.
        #[arg(long, default_value_t = 0)]
        record: usize,
        #[arg(long, default_value_t = legalrisk_core::market_sim::DEFAULT_STEPS)]
        steps: usize,
    },
    /// Run the acceptance suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        /// Also write verify_report.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force piecewise-constant optimization of the limiting objective.
    Oracle {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        cells: usize,
        #[arg(long, default_value_t = legalrisk_core::oracle::DEFAULT_RESTARTS)]
        restarts: usize,
        /// `graded` or `uniform`.
        #[arg(long, default_value = "graded")]
        mesh: String,
        #[arg(long, default_value = "auto")]
        scenario: ScenarioChoice,
    },
}

fn run(cli: Cli) -> Result<(), CmdError> {
    match cli.command {
        Command::Solve { config, out, scenario, samples } => {
            let sol = commands::cmd_solve(&SolveArgs { config: config.as_deref(), out: &out, scenario, samples })?;
            println!(
                "solved scenario {} ({}): theta(0)={} objective={}",
                sol.kind.as_str(),
                sol.scenario.as_str(),
                legalrisk::output::g12(sol.strategy.value(0.0)),
                legalrisk::output::g12(sol.objective)
            );
        }
        Command::Sweep { config, out, grid } => {
            let d = commands::cmd_sweep(config.as_deref(), grid.as_deref(), &out)?;
            println!(
                "sweep: {} fig1, {} fig2, {} fig3, {} fig3 surface points, {} errors",
                d.fig1.len(),
                d.fig2.len(),
                d.fig3.len(),
                d.fig3s.len(),
                d.errors.len()
            );
        }
        Command::Simulate { config, out, seed, paths, strategy, scenario, pricing, record, steps } => {
            let finite_n = match pricing.as_str() {
                "limiting" => false,
                "finite" => true,
                other => {
                    return Err(CmdError::new(commands::EXIT_SIM_CONFIG, format!("pricing must be limiting or finite, got `{other}`")))
                }
            };
            let o = commands::cmd_simulate(&SimulateArgs {
                config: config.as_deref(),
                out: &out,
                seed,
                paths,
                strategy,
                scenario,
                finite_n,
                record,
                steps,
            })?;
            println!(
                "mean net payoff {} (se {}), prosecution frequency {}",
                legalrisk::output::g12(o.mean_net_payoff),
                legalrisk::output::g12(o.stderr),
                legalrisk::output::g12(o.prosecution_frequency)
            );
        }
        Command::Verify { suite, out } => {
            let checks = verify::run_suite(&suite).map_err(|e| CmdError::new(commands::EXIT_VALIDATION, e))?;
            let failed = checks.iter().filter(|c| !c.passed).count();
            if let Some(dir) = out {
                ensure_dir(&dir).map_err(|e| CmdError::new(commands::EXIT_VALIDATION, e.to_string()))?;
                let header = Header::new("verify", &Config::default(), None).with("suite", &suite);
                let body = serde_json::json!({
                    "passed": failed == 0,
                    "checks": checks.iter().map(|c| c.json()).collect::<Vec<_>>(),
                });
                write_json(&dir.join("verify_report.json"), &header, body)
                    .map_err(|e| CmdError::new(commands::EXIT_VALIDATION, e.to_string()))?;
            }
            if failed > 0 {
                return Err(CmdError::new(commands::EXIT_VERIFY, format!("{failed} of {} checks failed", checks.len())));
            }
        }
        Command::Oracle { config, out, seed, cells, restarts, mesh, scenario } => {
            let graded = match mesh.as_str() {
                "graded" => true,
                "uniform" => false,
                other => return Err(CmdError::new(commands::EXIT_VALIDATION, format!("mesh must be graded or uniform, got `{other}`"))),
            };
            let r = commands::cmd_oracle(&OracleArgs { config: config.as_deref(), out: &out, seed, cells, restarts, graded, scenario })?;
            println!(
                "oracle value {} (restart {}, converged {})",
                legalrisk::output::g12(r.value),
                r.best_restart,
                r.converged
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("legalrisk: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
