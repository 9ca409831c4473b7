//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use sprrp_core::mip::linearize_with_limit;
use sprrp_core::{expand, Instance};

use crate::dot::to_dot;
use crate::format::parse_instance;
use crate::lp::write_lp;
use crate::report::{solution_json, summary, timeline_csv};
use crate::solvers::{solve, SolveOptions, SolverKind};
use crate::sweep::{run_sweep, sweep_csv, sweep_values, SweepError, SweepParam};

#[derive(Debug, Parser)]
#[command(name = "sprrp", version, about = "Plan research and charging routes for solar-powered rovers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory for written artifacts (default: next to the input).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized tie-breaking.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Wall-clock budget for the exact solver, in seconds.
    #[arg(long, global = true)]
    time_budget: Option<f64>,
    /// Search node budget (exact) or move evaluation budget (greedy).
    #[arg(long, global = true)]
    node_budget: Option<u64>,
    /// Log verbosity; the SPRRP_LOG environment variable takes precedence.
    #[arg(long, global = true, value_enum, default_value = "warn")]
    log_level: LogLevel,
    /// Add wall-clock timings to the sweep table.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LogLevel {
    Error,
    Warn,
    Info,
    Debug,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check an instance file and list every violated rule.
    Validate { file: PathBuf },
    /// Solve an instance and write the solution and timeline.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        solver: SolverKind,
    },
    /// Solve over a range of one parameter and write a table.
    Sweep {
        file: PathBuf,
        #[arg(long, value_enum)]
        param: SweepParam,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long, default_value_t = 1.0)]
        step: f64,
        #[arg(long, value_enum, default_value = "exact")]
        solver: SolverKind,
    },
    /// Write the MIP model as an LP file.
    ExportMip {
        file: PathBuf,
        /// Largest number of half-sol segments in the horizon.
        #[arg(long, default_value_t = sprrp_core::mip::MAX_SEGMENTS)]
        max_segments: usize,
    },
    /// Write the event graph in Graphviz DOT format.
    Graph { file: PathBuf },
}

/// Failure carrying the process exit code.
struct Exit(i32, String);

impl Exit {
    fn input(msg: impl std::fmt::Display) -> Self {
        Exit(1, msg.to_string())
    }
}

fn init_logging(level: LogLevel) {
    let default = match level {
        LogLevel::Error => "error",
        LogLevel::Warn => "warn",
        LogLevel::Info => "info",
        LogLevel::Debug => "debug",
    };
    let env = env_logger::Env::new().filter_or("SPRRP_LOG", default);
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

fn load(file: &Path) -> Result<Instance, Exit> {
    let text = std::fs::read_to_string(file).map_err(|e| Exit::input(format!("{}: {e}", file.display())))?;
    parse_instance(&text).map_err(|e| Exit::input(format!("{}: {e}", file.display())))
}

fn load_valid(file: &Path) -> Result<Instance, Exit> {
    let inst = load(file)?;
    let violations = inst.validate();
    if violations.is_empty() {
        return Ok(inst);
    }
    let list: Vec<String> = violations.iter().map(|v| format!("  {v}")).collect();
    Err(Exit::input(format!("{}: invalid instance\n{}", file.display(), list.join("\n"))))
}

fn stem(file: &Path) -> String {
    file.file_stem().map_or_else(|| String::from("instance"), |s| s.to_string_lossy().into_owned())
}

fn out_dir(cli: &Cli, file: &Path) -> PathBuf {
    match &cli.out {
        Some(dir) => dir.clone(),
        None => file.parent().map(Path::to_path_buf).unwrap_or_default(),
    }
}

fn write_artifact(dir: &Path, name: String, contents: &str, stdout: &mut dyn Write) -> Result<(), Exit> {
    if !dir.as_os_str().is_empty() {
        std::fs::create_dir_all(dir).map_err(|e| Exit::input(format!("{}: {e}", dir.display())))?;
    }
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Exit::input(format!("{}: {e}", path.display())))?;
    let _ = writeln!(stdout, "wrote {}", path.display());
    Ok(())
}

fn options(cli: &Cli, solver: SolverKind) -> SolveOptions {
    SolveOptions {
        solver,
        seed: cli.seed,
        node_budget: cli.node_budget,
        time_budget: cli.time_budget,
        ..SolveOptions::default()
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), Exit> {
    match &cli.command {
        Command::Validate { file } => {
            let inst = load(file)?;
            let violations = inst.validate();
            if violations.is_empty() {
                let _ = writeln!(stdout, "{}: valid", file.display());
                return Ok(());
            }
            for v in &violations {
                let _ = writeln!(stdout, "{v}");
            }
            Err(Exit::input(format!("{}: {} violation(s)", file.display(), violations.len())))
        }
        Command::Solve { file, solver } => {
            let inst = load_valid(file)?;
            let graph = expand(&inst).map_err(Exit::input)?;
            let sol = solve(&inst, &options(cli, *solver)).map_err(Exit::input)?;
            let _ = write!(stdout, "{}", summary(&inst, &graph, &sol, solver.name()));
            let dir = out_dir(cli, file);
            let s = stem(file);
            write_artifact(&dir, format!("{s}.solution.json"), &solution_json(&inst, &graph, &sol, solver.name()), stdout)?;
            write_artifact(&dir, format!("{s}.timeline.csv"), &timeline_csv(&inst, &graph, &sol), stdout)
        }
        Command::Sweep { file, param, from, to, step, solver } => {
            let inst = load_valid(file)?;
            let values = sweep_values(*from, *to, *step).map_err(|e| Exit(2, e.to_string()))?;
            let result = run_sweep(&inst, *param, &values, &options(cli, *solver)).map_err(|e| match e {
                SweepError::BadStep | SweepError::EmptyRange { .. } => Exit(2, e.to_string()),
                SweepError::Solve { .. } => Exit::input(e),
            })?;
            let table = sweep_csv(&result, cli.timings);
            let _ = write!(stdout, "{table}");
            let dir = out_dir(cli, file);
            write_artifact(&dir, format!("{}.sweep.csv", stem(file)), &table, stdout)
        }
        Command::ExportMip { file, max_segments } => {
            let inst = load_valid(file)?;
            let model = linearize_with_limit(&inst, *max_segments).map_err(Exit::input)?;
            let text = write_lp(&model).map_err(Exit::input)?;
            let c = model.census();
            let _ = writeln!(
                stdout,
                "binaries: {}\ncontinuous: {}\nconstraints: {}",
                c.binaries, c.continuous, c.constraints
            );
            write_artifact(&out_dir(cli, file), format!("{}.lp", stem(file)), &text, stdout)
        }
        Command::Graph { file } => {
            let inst = load_valid(file)?;
            let graph = expand(&inst).map_err(Exit::input)?;
            let _ = writeln!(stdout, "nodes: {}\nedges: {}", graph.nodes.len(), graph.edges.len());
            write_artifact(&out_dir(cli, file), format!("{}.dot", stem(file)), &to_dot(&inst, &graph), stdout)
        }
    }
}

/// Runs the tool on `args` (including the program name) and returns the
/// exit status: 0 on success, 1 for invalid or unusable input, 2 for usage
/// errors.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{text}");
            } else {
                let _ = write!(stderr, "{text}");
            }
            return code;
        }
    };
    init_logging(cli.log_level);
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(Exit(code, msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            code
        }
    }
}
