//! One entry point for every solver.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::bigstep::Policy;
use crate::explicit::explicit_winning_sets;
use crate::game::{ParityGame, Player};
use crate::pm::{symbolic_parity_dominion, PmOptions, Representation};
use crate::rank::Bound;
use crate::recursive::{classic_parity, symbolic_big_step, RecursiveOptions, SolveError};
use crate::report::{Algorithm, SolveReport, SolveRun};
use crate::strategy::extract_strategy_from_pm;
use crate::symbolic::{Backend, OpCounters, Symbolic};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlgoChoice {
    Explicit,
    ProgressMeasure,
    Zielonka,
    BigStep,
}

impl FromStr for AlgoChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<AlgoChoice, String> {
        match s {
            "explicit" => Ok(AlgoChoice::Explicit),
            "pm" => Ok(AlgoChoice::ProgressMeasure),
            "zielonka" => Ok(AlgoChoice::Zielonka),
            "bigstep" => Ok(AlgoChoice::BigStep),
            _ => Err(format!("unknown algorithm {s:?} (expected zielonka, pm, bigstep or explicit)")),
        }
    }
}

impl fmt::Display for AlgoChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlgoChoice::Explicit => "explicit",
            AlgoChoice::ProgressMeasure => "pm",
            AlgoChoice::Zielonka => "zielonka",
            AlgoChoice::BigStep => "bigstep",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub backend: Backend,
    pub strategies: bool,
    pub check: bool,
    pub representation: Representation,
    pub policy: Policy,
    pub trace: bool,
}

impl Default for SolveOptions {
    fn default() -> SolveOptions {
        SolveOptions {
            backend: Backend::Bits,
            strategies: false,
            check: false,
            representation: Representation::LinearSpace,
            policy: Policy::Sqrt,
            trace: false,
        }
    }
}

pub fn solve(game: &ParityGame, algo: AlgoChoice, opts: &SolveOptions) -> Result<SolveRun, SolveError> {
    let recursive = RecursiveOptions {
        backend: opts.backend,
        strategies: opts.strategies,
        check: opts.check,
        max_depth: None,
    };
    let run = match algo {
        AlgoChoice::Explicit => solve_explicit(game),
        AlgoChoice::ProgressMeasure => solve_pm_symbolic(game, opts)?,
        AlgoChoice::Zielonka => classic_parity(game, &recursive)?,
        AlgoChoice::BigStep => symbolic_big_step(game, opts.policy, &recursive)?,
    };
    assert!(run.report.is_partition(), "winning sets must partition the vertices");
    Ok(run)
}

/// The explicit progress measure; no symbolic counters.
pub fn solve_explicit(game: &ParityGame) -> SolveRun {
    let started = Instant::now();
    let (winning_even, winning_odd) = explicit_winning_sets(game);
    SolveRun {
        report: SolveReport {
            algorithm: Algorithm::Explicit,
            winning_even,
            winning_odd,
            strategy_even: None,
            strategy_odd: None,
            counters: OpCounters::default(),
            wall_time: started.elapsed(),
            iterations: Vec::new(),
        },
        checks: Vec::new(),
        trace: Vec::new(),
    }
}

/// Winning sets from the full-domain symbolic progress measure. Strategies
/// come from the final state; Odd's from a second run on the swapped view.
pub fn solve_pm_symbolic(game: &ParityGame, opts: &SolveOptions) -> Result<SolveRun, SolveError> {
    let started = Instant::now();
    let sym = Symbolic::new(game, opts.backend);
    let pm_opts = PmOptions {
        representation: opts.representation,
        check_invariants: opts.check,
        trace: opts.trace,
    };
    let run = symbolic_parity_dominion(&sym, &sym.all(), Player::Even, Bound::Full, &pm_opts);
    let winning_even = sym.to_bits(&run.dominion);
    let mut winning_odd = winning_even.clone();
    winning_odd.toggle_range(..);
    let mut checks: Vec<String> = run
        .violations
        .iter()
        .map(|v| format!("invariant {:?} at iteration {}: {}", v.kind, v.iteration, v.detail))
        .collect();
    let trace = run.trace.iter().map(|t| t.to_string()).collect();
    let (strategy_even, strategy_odd) = if opts.strategies {
        let even = extract_strategy_from_pm(&sym, &run)?;
        drop(run);
        let odd_opts = PmOptions {
            representation: opts.representation,
            ..PmOptions::default()
        };
        let odd_run = symbolic_parity_dominion(&sym, &sym.all(), Player::Odd, Bound::Full, &odd_opts);
        if sym.to_bits(&odd_run.dominion) != winning_odd {
            checks.push("the swapped run disagrees on Odd's winning set".to_string());
        }
        let odd = extract_strategy_from_pm(&sym, &odd_run)?;
        (Some(even), Some(odd))
    } else {
        drop(run);
        (None, None)
    };
    Ok(SolveRun {
        report: SolveReport {
            algorithm: Algorithm::ProgressMeasure,
            winning_even,
            winning_odd,
            strategy_even,
            strategy_odd,
            counters: sym.counters(),
            wall_time: started.elapsed(),
            iterations: Vec::new(),
        },
        checks,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::tests::example;
    use crate::strategy::verify_strategy;

    #[test]
    fn every_algorithm_on_example() {
        let g = example();
        let opts = SolveOptions {
            strategies: true,
            check: true,
            ..SolveOptions::default()
        };
        for algo in [AlgoChoice::Explicit, AlgoChoice::ProgressMeasure, AlgoChoice::Zielonka, AlgoChoice::BigStep] {
            let run = solve(&g, algo, &opts).unwrap();
            assert_eq!(run.report.winning_even.ones().collect::<Vec<_>>(), vec![2, 3, 4, 5, 6, 7], "{algo}");
            assert!(run.checks.is_empty(), "{algo}: {:?}", run.checks);
            if let Some(s) = &run.report.strategy_even {
                assert_eq!(verify_strategy(&g, &run.report.winning_even, s), Ok(()));
            }
            if let Some(s) = &run.report.strategy_odd {
                assert_eq!(verify_strategy(&g, &run.report.winning_odd, s), Ok(()));
            }
        }
    }

    #[test]
    fn algorithm_names() {
        for algo in [AlgoChoice::Explicit, AlgoChoice::ProgressMeasure, AlgoChoice::Zielonka, AlgoChoice::BigStep] {
            assert_eq!(algo.to_string().parse::<AlgoChoice>(), Ok(algo));
        }
        assert!("ziel".parse::<AlgoChoice>().is_err());
    }
}
