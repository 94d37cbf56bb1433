//! Memoryless strategies: extraction from progress measures and attractor
//! layers, composition, and an independent verifier.

use std::collections::BTreeMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::explicit::explicit_winning_sets;
use crate::game::{ParityGame, Player};
use crate::pm::{PmRun, View};
use crate::symbolic::Symbolic;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("vertex {0} chooses {1}, which leaves the winning set")]
    StrategyLeavesW(usize, usize),
    #[error("vertex {0} chooses {1}, which is not a successor")]
    NotASuccessor(usize, usize),
    #[error("vertex {0} has no choice")]
    Undefined(usize),
    #[error("the opponent can leave the winning set at vertex {0}")]
    OpponentEscapes(usize),
    #[error("the opponent wins from vertex {0}")]
    Loses(usize),
    #[error("vertex {0} of the winning set is not covered")]
    IncompleteStrategy(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    pub player: Player,
    pub choice: BTreeMap<usize, usize>,
}

impl Strategy {
    pub fn new(player: Player) -> Strategy {
        Strategy {
            player,
            choice: BTreeMap::new(),
        }
    }

    pub fn from_edges(player: Player, edges: impl IntoIterator<Item = (usize, usize)>) -> Strategy {
        Strategy {
            player,
            choice: edges.into_iter().collect(),
        }
    }

    pub fn get(&self, v: usize) -> Option<usize> {
        self.choice.get(&v).copied()
    }

    pub fn len(&self) -> usize {
        self.choice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choice.is_empty()
    }

    /// Vertices where a choice is defined.
    pub fn domain(&self, n: usize) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(n);
        out.extend(self.choice.keys().copied());
        out
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, w) in &self.choice {
            writeln!(f, "{v} -> {w}")?;
        }
        Ok(())
    }
}

/// Where a piece of a composed strategy came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PieceSource {
    Dominion,
    Attractor,
    TopPriority,
    Trivial,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyPiece {
    pub player: Player,
    pub source: PieceSource,
    pub edges: Vec<(usize, usize)>,
}

/// The strategy pieces a recursive solver kept for its final answer, in
/// composition order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveTrace {
    pub pieces: Vec<StrategyPiece>,
}

impl SolveTrace {
    pub fn push(&mut self, player: Player, source: PieceSource, edges: Vec<(usize, usize)>) {
        if !edges.is_empty() {
            self.pieces.push(StrategyPiece { player, source, edges });
        }
    }

    pub fn append(&mut self, other: SolveTrace) {
        self.pieces.extend(other.pieces);
    }
}

/// Merges the pieces for `player` (first piece wins on overlap) and checks
/// that every vertex `player` owns in `win` has a choice.
pub fn extract_attractor_strategies(
    game: &ParityGame,
    trace: &SolveTrace,
    player: Player,
    win: &FixedBitSet,
) -> Result<Strategy, StrategyError> {
    let mut out = Strategy::new(player);
    for piece in trace.pieces.iter().filter(|p| p.player == player) {
        for &(v, w) in &piece.edges {
            if win.contains(v) {
                out.choice.entry(v).or_insert(w);
            }
        }
    }
    match win.ones().find(|&v| game.owner(v) == player && !out.choice.contains_key(&v)) {
        Some(v) => Err(StrategyError::IncompleteStrategy(v)),
        None => Ok(out),
    }
}

/// A strategy for the run's player on the arena minus `S_⊤`: each owned
/// vertex `u` moves to the lowest-id `v` with `ρ(v) ≤_Ω(u) ρ(u)`, strictly
/// for odd `Ω(u)`. One cpre per candidate target.
pub fn extract_strategy_from_pm(sym: &Symbolic, run: &PmRun) -> Result<Strategy, StrategyError> {
    let player = run.player;
    let state = &run.state;
    let view = View::new(sym, state.arena(), player);
    let domain = state.domain();
    let top = state.top_set(sym);
    let winning = sym.difference(state.arena(), &top);
    let owned = sym.intersect(&winning, &sym.owned_by(player));
    let priority_sets: Vec<_> = (0..domain.priority_count()).map(|ell| view.priority_set(ell)).collect();
    let mut covered = sym.empty();
    let mut out = Strategy::new(player);
    for v in sym.members(&winning) {
        let rho = state.rank_of(sym, v);
        let single = sym.singleton(v);
        let pre = sym.cpre_in(player, &single, state.arena());
        let pre = sym.intersect(&pre, &owned);
        let mut assigned = sym.empty();
        for (ell, p) in priority_sets.iter().enumerate() {
            let target = state.set_at(sym, &domain.incr_at(&rho, ell as u32));
            let found = sym.intersect(&pre, &target);
            let found = sym.intersect(&found, p);
            let found = sym.difference(&found, &covered);
            assigned = sym.union(&assigned, &found);
        }
        for u in sym.members(&assigned) {
            out.choice.insert(u, v);
        }
        covered = sym.union(&covered, &assigned);
    }
    let missing = sym.difference(&owned, &covered);
    match sym.members(&missing).first() {
        Some(&v) => Err(StrategyError::IncompleteStrategy(v)),
        None => Ok(out),
    }
}

/// Checks that `strategy` wins for its player from every vertex of `win`:
/// plays stay in `win` and the restricted game is won everywhere.
pub fn verify_strategy(game: &ParityGame, win: &FixedBitSet, strategy: &Strategy) -> Result<(), StrategyError> {
    let player = strategy.player;
    for v in win.ones() {
        if game.owner(v) == player {
            let w = strategy.get(v).ok_or(StrategyError::Undefined(v))?;
            if !game.successors(v).contains(&w) {
                return Err(StrategyError::NotASuccessor(v, w));
            }
            if !win.contains(w) {
                return Err(StrategyError::StrategyLeavesW(v, w));
            }
        } else if game.successors(v).iter().any(|&w| !win.contains(w)) {
            return Err(StrategyError::OpponentEscapes(v));
        }
    }
    if win.is_clear() {
        return Ok(());
    }
    let original: Vec<usize> = win.ones().collect();
    let mut local = vec![usize::MAX; game.vertex_count()];
    for (i, &v) in original.iter().enumerate() {
        local[v] = i;
    }
    let successors = original
        .iter()
        .map(|&v| {
            if game.owner(v) == player {
                vec![local[strategy.get(v).expect("checked above")]]
            } else {
                game.successors(v).iter().map(|&w| local[w]).collect()
            }
        })
        .collect();
    let restricted = ParityGame::new(
        original.iter().map(|&v| game.owner(v)).collect(),
        original.iter().map(|&v| game.priority(v)).collect(),
        successors,
    )
    .expect("restriction keeps a successor everywhere");
    let restricted = match player {
        Player::Even => restricted,
        Player::Odd => restricted.swap_roles_increment(),
    };
    let (even, _) = explicit_winning_sets(&restricted);
    match (0..original.len()).find(|&i| !even.contains(i)) {
        Some(i) => Err(StrategyError::Loses(original[i])),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::tests::example;
    use crate::pm::{symbolic_parity_dominion, PmOptions};
    use crate::rank::Bound;
    use crate::symbolic::Backend;

    fn bits(ids: &[usize]) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(8);
        s.extend(ids.iter().copied());
        s
    }

    #[test]
    fn alternative_even_strategy_verifies() {
        let g = example();
        let win = bits(&[2, 3, 4, 5, 6, 7]);
        let sigma = Strategy::from_edges(Player::Even, [(2, 3), (3, 5), (6, 4), (7, 6)]);
        assert_eq!(verify_strategy(&g, &win, &sigma), Ok(()));
        let bad = Strategy::from_edges(Player::Even, [(2, 1), (3, 5), (6, 4), (7, 6)]);
        assert_eq!(verify_strategy(&g, &win, &bad), Err(StrategyError::StrategyLeavesW(2, 1)));
        let tau = Strategy::from_edges(Player::Odd, [(1, 0)]);
        assert_eq!(verify_strategy(&g, &bits(&[0, 1]), &tau), Ok(()));
    }

    #[test]
    fn losing_strategy_rejected() {
        // Claiming all of V for Even: closed, but b keeps the play on a-b.
        let g = example();
        let sigma = Strategy::from_edges(Player::Even, [(0, 1), (2, 3), (3, 5), (6, 4), (7, 6)]);
        let all = bits(&[0, 1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(verify_strategy(&g, &all, &sigma), Err(StrategyError::Loses(0)));
    }

    #[test]
    fn pm_extraction_on_example() {
        let g = example();
        let sym = Symbolic::new(&g, Backend::Bits);
        let run = symbolic_parity_dominion(&sym, &sym.all(), Player::Even, Bound::Full, &PmOptions::default());
        let before = sym.counters();
        let sigma = extract_strategy_from_pm(&sym, &run).unwrap();
        assert!(sym.counters().since(&before).cpre_ops <= 8);
        // h has two admissible successors; the lower id wins.
        assert_eq!(sigma, Strategy::from_edges(Player::Even, [(2, 3), (3, 5), (6, 4), (7, 2)]));
        assert_eq!(verify_strategy(&g, &sym.to_bits(&run.dominion), &sigma), Ok(()));

        let run = symbolic_parity_dominion(&sym, &sym.all(), Player::Odd, Bound::Full, &PmOptions::default());
        let tau = extract_strategy_from_pm(&sym, &run).unwrap();
        assert_eq!(tau, Strategy::from_edges(Player::Odd, [(1, 0)]));
    }

    #[test]
    fn composition_reports_gaps() {
        let g = example();
        let mut trace = SolveTrace::default();
        trace.push(Player::Even, PieceSource::Attractor, vec![(2, 3), (7, 6)]);
        trace.push(Player::Even, PieceSource::Dominion, vec![(3, 5), (6, 4), (2, 1)]);
        let win = bits(&[2, 3, 4, 5, 6, 7]);
        let sigma = extract_attractor_strategies(&g, &trace, Player::Even, &win).unwrap();
        assert_eq!(sigma.get(2), Some(3));
        let partial = SolveTrace::default();
        assert_eq!(
            extract_attractor_strategies(&g, &partial, Player::Even, &win),
            Err(StrategyError::IncompleteStrategy(2))
        );
    }
}
