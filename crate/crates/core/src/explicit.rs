//! Explicit small progress measures and brute-force oracles.
//!
//! Everything here works on plain bitsets and the adjacency lists of the
//! game and is used as ground truth for the symbolic solvers.

use std::collections::VecDeque;
use std::ops::Index;

use fixedbitset::FixedBitSet;

use crate::game::{ParityGame, Player};
use crate::rank::{Bound, Rank, RankDomain};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankingFunction {
    ranks: Vec<Rank>,
}

impl RankingFunction {
    pub fn zero(domain: &RankDomain, n: usize) -> RankingFunction {
        RankingFunction {
            ranks: vec![domain.zero(); n],
        }
    }

    pub fn from_ranks(ranks: Vec<Rank>) -> RankingFunction {
        RankingFunction { ranks }
    }

    pub fn ranks(&self) -> &[Rank] {
        &self.ranks
    }

    pub fn set(&mut self, v: usize, r: Rank) {
        self.ranks[v] = r;
    }

    /// `{v | ρ(v) < ⊤}`.
    pub fn below_top(&self) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.ranks.len());
        for (v, r) in self.ranks.iter().enumerate() {
            out.set(v, !r.is_top());
        }
        out
    }
}

impl Index<usize> for RankingFunction {
    type Output = Rank;

    fn index(&self, v: usize) -> &Rank {
        &self.ranks[v]
    }
}

/// Minimum successor rank for Even vertices, maximum for Odd ones.
pub fn best(game: &ParityGame, rho: &RankingFunction, v: usize) -> Rank {
    let succ = game.successors(v).iter().map(|&w| &rho[w]);
    let pick = match game.owner(v) {
        Player::Even => succ.min(),
        Player::Odd => succ.max(),
    };
    pick.expect("every vertex has a successor").clone()
}

/// The value `lift(ρ, v)` assigns to `v`. Taking the maximum with the old
/// value keeps the operator inflationary from arbitrary starting points.
pub fn lifted_rank(game: &ParityGame, domain: &RankDomain, rho: &RankingFunction, v: usize) -> Rank {
    let candidate = domain.incr_at(&best(game, rho, v), game.priority(v));
    candidate.max(rho[v].clone())
}

pub fn lift(game: &ParityGame, domain: &RankDomain, rho: &RankingFunction, v: usize) -> RankingFunction {
    let mut out = rho.clone();
    out.set(v, lifted_rank(game, domain, rho, v));
    out
}

/// Least simultaneous fixed point of all lifts, by a predecessor-driven
/// work list. Returns the measure and `{v | ρ(v) < ⊤}`.
pub fn solve_explicit_pm(game: &ParityGame, domain: &RankDomain) -> (RankingFunction, FixedBitSet) {
    let n = game.vertex_count();
    let mut rho = RankingFunction::zero(domain, n);
    let mut queued = FixedBitSet::with_capacity(n);
    queued.insert_range(..);
    let mut work: VecDeque<usize> = game.vertices().collect();
    while let Some(v) = work.pop_front() {
        queued.set(v, false);
        let new = lifted_rank(game, domain, &rho, v);
        if new != rho[v] {
            rho.set(v, new);
            for &u in game.predecessors(v) {
                if !queued.put(u) {
                    work.push_back(u);
                }
            }
        }
    }
    let win = rho.below_top();
    (rho, win)
}

/// Same fixed point, reached by sweeping `order` round-robin until nothing
/// changes.
pub fn solve_explicit_pm_ordered(
    game: &ParityGame,
    domain: &RankDomain,
    order: &[usize],
) -> (RankingFunction, FixedBitSet) {
    let mut rho = RankingFunction::zero(domain, game.vertex_count());
    loop {
        let mut changed = false;
        for &v in order {
            let new = lifted_rank(game, domain, &rho, v);
            if new != rho[v] {
                rho.set(v, new);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let win = rho.below_top();
    (rho, win)
}

/// Winning sets `(W_E, W_O)` from the full progress measure.
pub fn explicit_winning_sets(game: &ParityGame) -> (FixedBitSet, FixedBitSet) {
    let domain = RankDomain::for_game(game, Bound::Full);
    let (_, even) = solve_explicit_pm(game, &domain);
    let mut odd = even.clone();
    odd.toggle_range(..);
    (even, odd)
}

/// `set` is a trap for `player`: their vertices cannot leave and the
/// opponent's vertices can stay.
pub fn is_trap(game: &ParityGame, player: Player, set: &FixedBitSet) -> bool {
    set.ones().all(|v| {
        let mut succ = game.successors(v).iter();
        if game.owner(v) == player {
            succ.all(|&w| set.contains(w))
        } else {
            succ.any(|&w| set.contains(w))
        }
    })
}

/// `set` is nonempty, the opponent cannot leave it, and `player` wins
/// everywhere in the subgame it induces.
pub fn is_dominion(game: &ParityGame, player: Player, set: &FixedBitSet) -> bool {
    if set.is_clear() || !is_trap(game, player.opponent(), set) {
        return false;
    }
    let sub = game.subgame(set).expect("trap induces a subgame").game;
    let sub = match player {
        Player::Even => sub,
        Player::Odd => sub.swap_roles_increment(),
    };
    let (even, _) = explicit_winning_sets(&sub);
    even.count_ones(..) == sub.vertex_count()
}

/// Every dominion for `player` with at most `max_size` vertices.
/// Exponential in the number of vertices.
pub fn enumerate_dominions_bruteforce(game: &ParityGame, player: Player, max_size: usize) -> Vec<FixedBitSet> {
    let n = game.vertex_count();
    let mut out = Vec::new();
    let mut pick = Vec::new();
    fn rec(
        game: &ParityGame,
        player: Player,
        max_size: usize,
        start: usize,
        pick: &mut Vec<usize>,
        out: &mut Vec<FixedBitSet>,
    ) {
        if !pick.is_empty() {
            let mut set = FixedBitSet::with_capacity(game.vertex_count());
            set.extend(pick.iter().copied());
            if is_dominion(game, player, &set) {
                out.push(set);
            }
        }
        if pick.len() == max_size {
            return;
        }
        for v in start..game.vertex_count() {
            pick.push(v);
            rec(game, player, max_size, v + 1, pick, out);
            pick.pop();
        }
    }
    rec(game, player, max_size.min(n), 0, &mut pick, &mut out);
    out
}
