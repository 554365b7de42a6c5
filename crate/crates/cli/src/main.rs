use std::collections::HashMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

use clpkit::bench::{self, BenchName, BenchReport};
use clpkit::fd::{Heuristic, SearchTree};
use clpkit::lang::{self, FdSettings, Goal, LangError, ProblemKind, RationalOutcome};
use clpkit::modeling::{ModelError, Value};
use clpkit::rational::to_float_string;
use clpkit::{Rat, RatSystem};

const EXIT_SAT: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_UNSAT: u8 = 20;
const EXIT_TIMEOUT: u8 = 30;

#[derive(Parser)]
#[command(name = "clpkit", version, about = "Solve constraint models and run the built-in benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a model file.
    #[command(group(ArgGroup::new("mode").args(["all", "first", "count"])))]
    Solve {
        file: PathBuf,
        /// Print every solution.
        #[arg(long)]
        all: bool,
        /// Print the first solution (default).
        #[arg(long)]
        first: bool,
        /// Print only the number of solutions.
        #[arg(long)]
        count: bool,
        #[arg(long, value_enum, default_value_t = HeuristicArg::Ff)]
        heuristic: HeuristicArg,
        /// Print the answer constraint after propagation instead of searching.
        #[arg(long)]
        answer: bool,
        /// Render rationals as decimals.
        #[arg(long)]
        decimal: bool,
        /// Wall-clock limit in seconds.
        #[arg(long, value_name = "S")]
        time_limit: Option<f64>,
        /// Write the search tree to this path.
        #[arg(long, value_name = "PATH")]
        tree: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = TreeFormat::Dot)]
        tree_format: TreeFormat,
        /// Parameter value, e.g. `--data n=8`.
        #[arg(long, value_name = "K=V")]
        data: Vec<String>,
    },
    /// Run a built-in benchmark.
    #[command(group(ArgGroup::new("mode").args(["all", "first"])))]
    Bench {
        #[arg(value_parser = ["queens", "queens_sym", "fourier"])]
        name: String,
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long)]
        all: bool,
        #[arg(long)]
        first: bool,
        #[arg(long, value_name = "S")]
        time_limit: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum HeuristicArg {
    Ff,
    Input,
}

#[derive(Clone, Copy, ValueEnum)]
enum TreeFormat {
    Dot,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    First,
    All,
    Count,
}

fn watchdog(limit: Option<f64>) -> Result<Arc<AtomicBool>, String> {
    let flag = Arc::new(AtomicBool::new(false));
    if let Some(secs) = limit {
        let d = Duration::try_from_secs_f64(secs).map_err(|_| format!("invalid time limit {secs}"))?;
        let f = Arc::clone(&flag);
        std::thread::spawn(move || {
            std::thread::sleep(d);
            f.store(true, Ordering::Relaxed);
        });
    }
    Ok(flag)
}

fn parse_data(items: &[String]) -> Result<HashMap<String, Value>, String> {
    let mut out = HashMap::new();
    for item in items {
        let (k, v) = item.split_once('=').ok_or_else(|| format!("expected K=V, got `{item}`"))?;
        let value = lang::parse_value(v).ok_or_else(|| format!("`{v}` is not a number"))?;
        out.insert(k.trim().to_string(), value);
    }
    Ok(out)
}

/// Prints a line, ignoring a closed stdout.
fn say(line: impl std::fmt::Display) {
    let _ = writeln!(std::io::stdout(), "{line}");
}

fn render(r: &Rat, decimal: bool) -> String {
    if decimal {
        to_float_string(r)
    } else {
        r.to_string()
    }
}

fn print_system(sys: &RatSystem, decimal: bool) {
    let num = |r: &Rat| render(r, decimal);
    for c in sys.constraints() {
        say(c.display_with(&num));
    }
}

struct SolveArgs {
    file: PathBuf,
    mode: Mode,
    heuristic: Heuristic,
    answer: bool,
    decimal: bool,
    time_limit: Option<f64>,
    tree: Option<(PathBuf, TreeFormat)>,
    data: Vec<String>,
}

fn cmd_solve(args: SolveArgs) -> Result<u8, String> {
    let src = std::fs::read_to_string(&args.file).map_err(|e| format!("{}: {e}", args.file.display()))?;
    let data = parse_data(&args.data)?;
    let cancel = watchdog(args.time_limit)?;
    let ast = lang::parse(&src).map_err(|p| format!("{}:{p}", args.file.display()))?;
    let problem = match lang::instantiate_with(&ast, &data, Some(Arc::clone(&cancel))) {
        Ok(p) => p,
        Err(LangError::Model(ModelError::Cancelled)) => {
            say("timeout");
            return Ok(EXIT_TIMEOUT);
        }
        Err(e) => return Err(e.to_string()),
    };
    let kind = problem.kind().map_err(|e| e.to_string())?;
    if kind == ProblemKind::Rational {
        return Ok(solve_rational(&problem, &args));
    }
    if args.answer {
        return Ok(match problem.fd_answer().map_err(|e| e.to_string())? {
            None => {
                say("unsatisfiable");
                EXIT_UNSAT
            }
            Some(lines) => {
                for l in lines {
                    say(&l);
                }
                EXIT_SAT
            }
        });
    }
    let optimizing = problem.goal != Goal::Satisfy;
    if optimizing && args.tree.is_some() {
        eprintln!("warning: search trees are recorded for satisfaction problems only");
    }
    let mut tree = SearchTree::new();
    let record = args.tree.is_some() && !optimizing;
    let settings = FdSettings {
        heuristic: args.heuristic,
        limit: if args.mode == Mode::First { Some(1) } else { None },
        observer: if record { Some(&mut tree) } else { None },
        cancel: Some(&cancel),
    };
    let start = Instant::now();
    let print = args.mode != Mode::Count;
    let summary = problem
        .solve_fd(settings, &mut |sol| {
            if print {
                say(sol);
                say("----------");
            }
        })
        .map_err(|e| e.to_string())?;
    if let Some(v) = summary.objective {
        say(format!("objective = {v}"));
    }
    if args.mode == Mode::Count {
        say(format!("solutions: {}", summary.solutions));
    }
    eprintln!(
        "% solutions: {}, nodes: {}, failures: {}, time: {:.3}s",
        summary.solutions,
        summary.nodes,
        summary.failures,
        start.elapsed().as_secs_f64()
    );
    if let (Some((path, format)), true) = (&args.tree, record) {
        let text = match format {
            TreeFormat::Dot => tree.to_dot(&|v| problem.model.fd_name(v)),
            TreeFormat::Json => tree.to_json(),
        };
        std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    if summary.cancelled {
        say("timeout");
        return Ok(EXIT_TIMEOUT);
    }
    if summary.solutions == 0 {
        say("unsatisfiable");
        return Ok(EXIT_UNSAT);
    }
    Ok(EXIT_SAT)
}

fn solve_rational(problem: &lang::Problem, args: &SolveArgs) -> u8 {
    let outcome = match problem.solve_rational() {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    match outcome {
        RationalOutcome::Unsat => {
            say("unsatisfiable");
            EXIT_UNSAT
        }
        RationalOutcome::Unbounded => {
            say("unbounded");
            EXIT_SAT
        }
        RationalOutcome::Answer(sys) => {
            if args.mode == Mode::Count {
                say("satisfiable");
            } else {
                print_system(&sys, args.decimal);
            }
            EXIT_SAT
        }
        RationalOutcome::Optimum { value, attained, answer } => {
            let tag = if attained { "" } else { " (supremum, not attained)" };
            say(format!("objective = {}{tag}", render(&value, args.decimal)));
            print_system(&answer, args.decimal);
            EXIT_SAT
        }
    }
}

fn print_report(r: &BenchReport) {
    for line in &r.details {
        say(line);
    }
    let n = r.n.map_or_else(|| "-".to_string(), |n| n.to_string());
    let mode = if r.all { "all" } else { "first" };
    say(format!("{:<12} {:>5} {:>6} {:>10} {:>10} {:>10}", "benchmark", "n", "mode", "solutions", "nodes", "seconds"));
    say(format!(
        "{:<12} {:>5} {:>6} {:>10} {:>10} {:>10.3}",
        r.name.as_str(),
        n,
        mode,
        r.solutions,
        r.nodes,
        r.seconds
    ));
}

fn cmd_bench(name: &str, n: usize, all: bool, time_limit: Option<f64>) -> Result<u8, String> {
    let name = BenchName::parse(name).ok_or_else(|| format!("unknown benchmark `{name}`"))?;
    let cancel = watchdog(time_limit)?;
    let report = match name {
        BenchName::Queens | BenchName::QueensSym => {
            bench::run_queens(n, name == BenchName::QueensSym, all, Some(cancel))
        }
        BenchName::Fourier => bench::run_fourier(),
    }
    .map_err(|e| e.to_string())?;
    print_report(&report);
    if report.cancelled {
        say("timeout");
        return Ok(EXIT_TIMEOUT);
    }
    Ok(EXIT_SAT)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { EXIT_SAT });
        }
    };
    let result = match cli.command {
        Command::Solve {
            file,
            all,
            first: _,
            count,
            heuristic,
            answer,
            decimal,
            time_limit,
            tree,
            tree_format,
            data,
        } => {
            let mode = if all {
                Mode::All
            } else if count {
                Mode::Count
            } else {
                Mode::First
            };
            let heuristic = match heuristic {
                HeuristicArg::Ff => Heuristic::FirstFail,
                HeuristicArg::Input => Heuristic::InputOrder,
            };
            cmd_solve(SolveArgs {
                file,
                mode,
                heuristic,
                answer,
                decimal,
                time_limit,
                tree: tree.map(|p| (p, tree_format)),
                data,
            })
        }
        Command::Bench { name, n, all, first: _, time_limit } => cmd_bench(&name, n, all, time_limit),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
