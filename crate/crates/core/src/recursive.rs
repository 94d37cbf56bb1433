//! The classical recursive algorithm and its big-step variant, which peels
//! small opponent dominions found by the bounded progress measure before
//! each recursive call.
//!
//! Levels work on vertex masks of one fixed universe; the top priority of a
//! level is the highest priority present in its mask.

use std::time::Instant;

use thiserror::Error;

use crate::attractor::attractor;
use crate::bigstep::{choose_h, Policy};
use crate::explicit::is_dominion;
use crate::game::{ParityGame, Player};
use crate::pm::{symbolic_parity_dominion, PmOptions};
use crate::rank::Bound;
use crate::report::{Algorithm, LevelIteration, SolveReport, SolveRun};
use crate::strategy::{extract_attractor_strategies, extract_strategy_from_pm, PieceSource, SolveTrace, StrategyError};
use crate::symbolic::{Backend, Symbolic, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("recursion went deeper than {0} levels")]
    RecursionDepthExceeded(u32),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

#[derive(Clone, Debug, Default)]
pub struct RecursiveOptions {
    pub backend: Backend,
    pub strategies: bool,
    /// Check progress-measure invariants and validate every peeled dominion
    /// against the explicit oracle. Failures end up in `checks`.
    pub check: bool,
    /// Depth limit; defaults to the number of priorities.
    pub max_depth: Option<u32>,
}

/// Winning sets of one level plus the strategy pieces backing them.
struct Level {
    win: [VertexSet; 2],
    trace: [SolveTrace; 2],
}

struct Engine<'a, 'g> {
    sym: &'a Symbolic<'g>,
    policy: Option<Policy>,
    strategies: bool,
    check: bool,
    max_depth: u32,
    n0: usize,
    levels: usize,
    iterations: Vec<LevelIteration>,
    checks: Vec<String>,
}

impl Engine<'_, '_> {
    fn solve(&mut self, mut g: VertexSet, depth: u32) -> Result<Level, SolveError> {
        let sym = self.sym;
        if depth > self.max_depth {
            return Err(SolveError::RecursionDepthExceeded(self.max_depth));
        }
        let members = sym.members(&g);
        let Some(d) = members.iter().map(|&v| sym.game().priority(v)).max() else {
            return Ok(Level {
                win: [sym.empty(), sym.empty()],
                trace: Default::default(),
            });
        };
        if d == 0 {
            // Only priority 0 left: Even wins and may move anywhere inside.
            let mut trace: [SolveTrace; 2] = Default::default();
            if self.strategies {
                let edges = self.stay_inside(&g, &members, Player::Even);
                trace[0].push(Player::Even, PieceSource::Trivial, edges);
            }
            return Ok(Level {
                win: [g, sym.empty()],
                trace,
            });
        }
        drop(members);
        let pl = Player::of_priority(d);
        let op = pl.opponent();
        let c = d + 1;
        let level_size = sym.count(&g);
        let level = self.levels;
        self.levels += 1;
        let h = match self.policy {
            Some(policy) if c > 2 => Some(choose_h(policy, self.n0, level_size, c)),
            _ => None,
        };

        let mut won_by_op = sym.empty();
        let mut op_trace = SolveTrace::default();
        loop {
            let before = sym.count(&g);
            if let Some(h) = h {
                self.peel_small_dominion(&mut g, &mut won_by_op, &mut op_trace, op, h);
            }
            let top = sym.intersect(&sym.priority(d), &g);
            let attracted = attractor(sym, pl, &top, &g, self.strategies);
            let rest = sym.difference(&g, &attracted.attractor);
            let mut inner = self.solve(rest, depth + 1)?;
            let [even, odd] = &mut inner.win;
            let inner_op = match op {
                Player::Even => std::mem::replace(even, sym.empty()),
                Player::Odd => std::mem::replace(odd, sym.empty()),
            };
            drop(inner.win);
            if sym.is_empty(&inner_op) {
                self.iterations.push(LevelIteration {
                    level,
                    depth,
                    priority_count: c,
                    h,
                    removed: before - sym.count(&g),
                    last: true,
                    level_size,
                });
                let mut pl_trace = SolveTrace::default();
                if self.strategies {
                    let [even_trace, odd_trace] = inner.trace;
                    pl_trace.append(if pl == Player::Even { even_trace } else { odd_trace });
                    pl_trace.push(pl, PieceSource::Attractor, attracted.strategy);
                    let tops = sym.members(&sym.intersect(&top, &sym.owned_by(pl)));
                    let edges = self.stay_inside(&g, &tops, pl);
                    pl_trace.push(pl, PieceSource::TopPriority, edges);
                }
                let (win, trace) = match pl {
                    Player::Even => ([g, won_by_op], [pl_trace, op_trace]),
                    Player::Odd => ([won_by_op, g], [op_trace, pl_trace]),
                };
                return Ok(Level { win, trace });
            }
            drop((top, attracted));
            let peeled = attractor(sym, op, &inner_op, &g, self.strategies);
            if self.strategies {
                let [even_trace, odd_trace] = inner.trace;
                op_trace.append(if op == Player::Even { even_trace } else { odd_trace });
                op_trace.push(op, PieceSource::Attractor, peeled.strategy);
            }
            drop(inner_op);
            won_by_op = sym.union(&won_by_op, &peeled.attractor);
            g = sym.difference(&g, &peeled.attractor);
            self.iterations.push(LevelIteration {
                level,
                depth,
                priority_count: c,
                h,
                removed: before - sym.count(&g),
                last: false,
                level_size,
            });
        }
    }

    /// Runs the bounded dominion search for `op` inside `g` and removes the
    /// attractor of whatever it finds.
    fn peel_small_dominion(
        &mut self,
        g: &mut VertexSet,
        won_by_op: &mut VertexSet,
        op_trace: &mut SolveTrace,
        op: Player,
        h: u32,
    ) {
        let sym = self.sym;
        if sym.is_empty(g) {
            return;
        }
        let opts = PmOptions {
            check_invariants: self.check,
            ..PmOptions::default()
        };
        let run = symbolic_parity_dominion(sym, g, op, Bound::Bounded(h), &opts);
        for v in &run.violations {
            self.checks.push(format!("invariant {:?} at iteration {}: {}", v.kind, v.iteration, v.detail));
        }
        if sym.is_empty(&run.dominion) {
            return;
        }
        if self.check {
            let sub = sym.game().subgame(&sym.to_bits(g)).expect("levels are subgames");
            let local = sub.game;
            let mut found = fixedbitset::FixedBitSet::with_capacity(local.vertex_count());
            for (i, &v) in sub.original.iter().enumerate() {
                found.set(i, sym.contains(&run.dominion, v));
            }
            if !is_dominion(&local, op, &found) {
                self.checks.push(format!("peeled set {:?} is not a dominion for {op}", sym.members(&run.dominion)));
            }
        }
        if self.strategies {
            match extract_strategy_from_pm(sym, &run) {
                Ok(s) => op_trace.push(op, PieceSource::Dominion, s.choice.into_iter().collect()),
                Err(e) => self.checks.push(format!("dominion strategy: {e}")),
            }
        }
        let peeled = attractor(sym, op, &run.dominion, g, self.strategies);
        drop(run);
        op_trace.push(op, PieceSource::Attractor, peeled.strategy);
        *won_by_op = sym.union(won_by_op, &peeled.attractor);
        *g = sym.difference(g, &peeled.attractor);
    }

    /// For each of `vertices` owned by `player`, the lowest successor in `g`.
    fn stay_inside(&self, g: &VertexSet, vertices: &[usize], player: Player) -> Vec<(usize, usize)> {
        let game = self.sym.game();
        vertices
            .iter()
            .filter(|&&v| game.owner(v) == player)
            .filter_map(|&v| {
                game.successors(v)
                    .iter()
                    .find(|&&w| self.sym.contains(g, w))
                    .map(|&w| (v, w))
            })
            .collect()
    }
}

fn run(game: &ParityGame, policy: Option<Policy>, opts: &RecursiveOptions) -> Result<SolveRun, SolveError> {
    let started = Instant::now();
    let sym = Symbolic::new(game, opts.backend);
    let mut engine = Engine {
        sym: &sym,
        policy,
        strategies: opts.strategies,
        check: opts.check,
        max_depth: opts.max_depth.unwrap_or(game.priority_count()),
        n0: game.vertex_count(),
        levels: 0,
        iterations: Vec::new(),
        checks: Vec::new(),
    };
    let level = engine.solve(sym.all(), 0)?;
    let winning_even = sym.to_bits(&level.win[0]);
    let winning_odd = sym.to_bits(&level.win[1]);
    let (strategy_even, strategy_odd) = if opts.strategies {
        let mut trace = SolveTrace::default();
        let [even_trace, odd_trace] = level.trace;
        trace.append(even_trace);
        trace.append(odd_trace);
        (
            Some(extract_attractor_strategies(game, &trace, Player::Even, &winning_even)?),
            Some(extract_attractor_strategies(game, &trace, Player::Odd, &winning_odd)?),
        )
    } else {
        (None, None)
    };
    drop(level.win);
    let counters = sym.counters();
    let algorithm = policy.map_or(Algorithm::Zielonka, Algorithm::BigStep);
    Ok(SolveRun {
        report: SolveReport {
            algorithm,
            winning_even,
            winning_odd,
            strategy_even,
            strategy_odd,
            counters,
            wall_time: started.elapsed(),
            iterations: engine.iterations,
        },
        checks: engine.checks,
        trace: Vec::new(),
    })
}

/// The classical recursive algorithm.
pub fn classic_parity(game: &ParityGame, opts: &RecursiveOptions) -> Result<SolveRun, SolveError> {
    run(game, None, opts)
}

/// The recursive algorithm with a bounded opponent-dominion search before
/// every recursive call on levels with more than two priorities.
pub fn symbolic_big_step(game: &ParityGame, policy: Policy, opts: &RecursiveOptions) -> Result<SolveRun, SolveError> {
    run(game, Some(policy), opts)
}
