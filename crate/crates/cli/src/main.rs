use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use symparity::explicit::explicit_winning_sets;
use symparity::generate::gen_random;
use symparity::pgsolver::{emit_game, emit_solution, parse_pgsolver, parse_solution, ParseError, SolutionFormat};
use symparity::pm::dominion;
use symparity::strategy::verify_strategy;
use symparity::{solve, AlgoChoice, Backend, ParityGame, Player, Policy, SolveOptions, SolveRun, Symbolic};

#[derive(Parser)]
#[command(name = "symparity", version, about = "Symbolic parity game solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a game and print its solution.
    Solve {
        /// Game file in PGSolver format.
        #[arg(required_unless_present = "glob")]
        file: Option<PathBuf>,
        /// Solve every matching file instead, in parallel.
        #[arg(long, conflicts_with = "file")]
        glob: Option<String>,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value = "text")]
        format: SolutionFormat,
    },
    /// Search for a dominion of at most h+1 vertices.
    Dominion {
        file: PathBuf,
        #[arg(long, value_enum)]
        player: Side,
        #[arg(long)]
        h: u32,
        #[arg(long, default_value = "bits")]
        backend: Backend,
    },
    /// Check a solution file against the game.
    Verify { file: PathBuf, solution: PathBuf },
    /// Print a seeded random game.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        c: u32,
        /// Out-degree range `min:max`.
        #[arg(long, default_value = "1:3")]
        deg: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print only the operation counters of a solve.
    Stats {
        file: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value = "zielonka")]
    algo: AlgoChoice,
    /// Parameter policy for bigstep: sqrt, gamma or fixed:<h>.
    #[arg(long, default_value = "sqrt")]
    policy: Policy,
    #[arg(long)]
    strategies: bool,
    #[arg(long)]
    check_invariants: bool,
    #[arg(long, default_value = "bits")]
    backend: Backend,
}

impl SolverArgs {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            backend: self.backend,
            strategies: self.strategies,
            check: self.check_invariants,
            policy: self.policy,
            trace: std::env::var("PARITY_TRACE").is_ok_and(|v| v == "1"),
            ..SolveOptions::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    Even,
    Odd,
}

/// Failures that map to a specific exit code.
#[derive(Debug)]
enum Failure {
    /// The solution or a self-check disagrees with the solver.
    Disagreement(String),
    /// The input could not be read or parsed.
    Input(anyhow::Error),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Failure {
        if e.downcast_ref::<ParseError>().is_some() || e.downcast_ref::<std::io::Error>().is_some() {
            Failure::Input(e)
        } else {
            Failure::Other(e)
        }
    }
}

fn read_game(path: &Path) -> Result<ParityGame> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_pgsolver(&text).with_context(|| format!("parsing {}", path.display()))
}

fn run_solver(path: &Path, solver: &SolverArgs) -> Result<SolveRun> {
    let game = read_game(path)?;
    let run = solve(&game, solver.algo, &solver.options())?;
    let mut stderr = std::io::stderr().lock();
    for line in &run.trace {
        writeln!(stderr, "{line}")?;
    }
    for check in &run.checks {
        writeln!(stderr, "{}: check failed: {check}", path.display())?;
    }
    Ok(run)
}

fn solve_command(file: Option<PathBuf>, glob: Option<String>, solver: &SolverArgs, format: SolutionFormat) -> Result<(), Failure> {
    let runs: Vec<(PathBuf, Result<SolveRun>)> = match (file, glob) {
        (Some(path), _) => {
            let run = run_solver(&path, solver);
            vec![(path, run)]
        }
        (None, Some(pattern)) => {
            let mut paths = glob::glob(&pattern)
                .map_err(|e| Failure::Input(anyhow!("bad pattern {pattern:?}: {e}")))?
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::Input(e.into()))?;
            paths.sort();
            paths
                .into_par_iter()
                .map(|path| {
                    let run = run_solver(&path, solver);
                    (path, run)
                })
                .collect()
        }
        (None, None) => return Err(Failure::Input(anyhow!("no input given"))),
    };
    let batch = runs.len() > 1;
    let mut failed_checks = 0;
    let mut first_error = None;
    let mut stdout = std::io::stdout().lock();
    for (path, run) in runs {
        match run {
            Ok(run) => {
                if batch {
                    writeln!(stdout, "# {}", path.display()).map_err(|e| Failure::Other(e.into()))?;
                }
                write!(stdout, "{}", emit_solution(&run.report, format)).map_err(|e| Failure::Other(e.into()))?;
                failed_checks += run.checks.len();
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                first_error.get_or_insert(e);
            }
        }
    }
    if let Some(e) = first_error {
        return Err(e.into());
    }
    if failed_checks > 0 {
        return Err(Failure::Disagreement(format!("{failed_checks} self-checks failed")));
    }
    Ok(())
}

fn verify_command(file: &Path, solution: &Path) -> Result<(), Failure> {
    let game = read_game(file)?;
    let text = fs::read_to_string(solution)
        .with_context(|| format!("reading {}", solution.display()))
        .map_err(Failure::Input)?;
    let claimed = parse_solution(&text)
        .with_context(|| format!("parsing {}", solution.display()))
        .map_err(Failure::Input)?;
    if claimed.winner.len() != game.vertex_count() {
        return Err(Failure::Disagreement(format!(
            "solution covers {} vertices, the game has {}",
            claimed.winner.len(),
            game.vertex_count()
        )));
    }
    let (even, _) = explicit_winning_sets(&game);
    let claimed_even = claimed.winning_set(Player::Even);
    if claimed_even != even {
        let v = (0..game.vertex_count())
            .find(|&v| claimed_even.contains(v) != even.contains(v))
            .unwrap();
        return Err(Failure::Disagreement(format!("vertex {v} has the wrong winner")));
    }
    for strategy in [&claimed.strategy_even, &claimed.strategy_odd] {
        if strategy.is_empty() {
            continue;
        }
        let win = claimed.winning_set(strategy.player);
        verify_strategy(&game, &win, strategy)
            .map_err(|e| Failure::Disagreement(format!("{} strategy: {e}", strategy.player)))?;
    }
    println!("ok");
    Ok(())
}

fn gen_command(n: usize, c: u32, deg: &str, seed: u64) -> Result<(), Failure> {
    let (lo, hi) = deg
        .split_once(':')
        .and_then(|(lo, hi)| Some((lo.parse().ok()?, hi.parse().ok()?)))
        .ok_or_else(|| Failure::Input(anyhow!("degree range must look like min:max, got {deg:?}")))?;
    let game = gen_random(n, c, lo, hi, seed).map_err(|e| Failure::Input(e.into()))?;
    print!("{}", emit_game(&game));
    Ok(())
}

fn dominion_command(file: &Path, side: Side, h: u32, backend: Backend) -> Result<(), Failure> {
    let game = read_game(file)?;
    let player = match side {
        Side::Even => Player::Even,
        Side::Odd => Player::Odd,
    };
    let sym = Symbolic::new(&game, backend);
    let found = dominion(&sym, player, h);
    let ids: Vec<String> = sym.members(&found).iter().map(usize::to_string).collect();
    println!("{}", ids.join(" "));
    Ok(())
}

fn stats_command(file: &Path, solver: &SolverArgs) -> Result<(), Failure> {
    let run = run_solver(file, solver)?;
    for (key, value) in run.report.counters.entries() {
        println!("{key}: {value}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve {
            file,
            glob,
            solver,
            format,
        } => solve_command(file, glob, &solver, format),
        Command::Dominion {
            file,
            player,
            h,
            backend,
        } => dominion_command(&file, player, h, backend),
        Command::Verify { file, solution } => verify_command(&file, &solution),
        Command::Gen { n, c, deg, seed } => gen_command(n, c, &deg, seed),
        Command::Stats { file, solver } => stats_command(&file, &solver),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Disagreement(msg)) => {
            eprintln!("disagreement: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
