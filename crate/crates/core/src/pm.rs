//! Set-based symbolic progress measures.
//!
//! The solver runs inside an arena (a vertex mask) and on behalf of one
//! player. For Odd the game is read with every priority raised by one and
//! the owners exchanged, so the code below always talks about "Even" and
//! "Odd" in the view's terms.

use std::collections::BTreeMap;
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::explicit::{lifted_rank, solve_explicit_pm, RankingFunction};
use crate::game::{ParityGame, Player};
use crate::rank::{Bound, Rank, RankDomain};
use crate::symbolic::{Symbolic, VertexSet};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Representation {
    /// One set per rank.
    DirectFamily,
    /// One set per odd priority and counter value, plus `S_⊤`.
    #[default]
    LinearSpace,
}

#[derive(Clone, Debug, Default)]
pub struct PmOptions {
    pub representation: Representation,
    pub check_invariants: bool,
    pub trace: bool,
}

impl PmOptions {
    /// Default options with tracing switched on by `PARITY_TRACE=1`.
    pub fn from_env() -> PmOptions {
        PmOptions {
            trace: std::env::var("PARITY_TRACE").is_ok_and(|v| v == "1"),
            ..PmOptions::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InvariantKind {
    AntiMonotonicity,
    LowerBound,
    Closure,
    Stability,
    Partition,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantViolation {
    pub iteration: u64,
    pub kind: InvariantKind,
    pub vertex: Option<usize>,
    pub detail: String,
}

/// One line of the iteration log.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub iteration: u64,
    pub rank: Rank,
    pub added: usize,
    pub size: usize,
    /// `None` once the loop stops.
    pub next: Option<Rank>,
    pub cpre_ops: u64,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "step {} r={} added={} size={} next={} cpre={}",
            self.iteration,
            self.rank,
            self.added,
            self.size,
            self.next.as_ref().map_or("stop".to_string(), Rank::to_string),
            self.cpre_ops
        )
    }
}

/// The family `{S_r}` in one of its two encodings.
#[derive(Debug)]
pub enum RankState {
    Direct {
        domain: RankDomain,
        arena: VertexSet,
        sets: BTreeMap<Rank, VertexSet>,
    },
    Linear {
        domain: RankDomain,
        arena: VertexSet,
        /// `coords[k][x]` is `C^{2k+1}_x`.
        coords: Vec<Vec<VertexSet>>,
        top: VertexSet,
    },
}

impl RankState {
    pub fn new(sym: &Symbolic, domain: RankDomain, arena: VertexSet, repr: Representation) -> RankState {
        match repr {
            Representation::DirectFamily => RankState::Direct {
                domain,
                arena,
                sets: BTreeMap::new(),
            },
            Representation::LinearSpace => {
                let coords = domain
                    .caps()
                    .iter()
                    .map(|&cap| {
                        let mut col = vec![arena.clone()];
                        col.extend((0..cap).map(|_| sym.empty()));
                        col
                    })
                    .collect();
                RankState::Linear {
                    domain,
                    arena,
                    coords,
                    top: sym.empty(),
                }
            }
        }
    }

    /// A linear-space state from explicit coordinate sets.
    pub fn from_coordinates(
        domain: RankDomain,
        arena: VertexSet,
        coords: Vec<Vec<VertexSet>>,
        top: VertexSet,
    ) -> RankState {
        assert_eq!(coords.len(), domain.width());
        for (col, &cap) in coords.iter().zip(domain.caps()) {
            assert_eq!(col.len(), cap as usize + 1);
        }
        RankState::Linear {
            domain,
            arena,
            coords,
            top,
        }
    }

    pub fn representation(&self) -> Representation {
        match self {
            RankState::Direct { .. } => Representation::DirectFamily,
            RankState::Linear { .. } => Representation::LinearSpace,
        }
    }

    pub fn domain(&self) -> &RankDomain {
        match self {
            RankState::Direct { domain, .. } | RankState::Linear { domain, .. } => domain,
        }
    }

    pub fn arena(&self) -> &VertexSet {
        match self {
            RankState::Direct { arena, .. } | RankState::Linear { arena, .. } => arena,
        }
    }

    /// `S_⊤`, without set operations.
    pub fn top_set(&self, sym: &Symbolic) -> VertexSet {
        match self {
            RankState::Direct { sets, .. } => sets.get(&Rank::Top).cloned().unwrap_or_else(|| sym.empty()),
            RankState::Linear { top, .. } => top.clone(),
        }
    }

    /// `ρ(v) = max{r | v ∈ S_r}`, read by membership only. Vertices outside
    /// the arena read as `0̄`.
    pub fn rank_of(&self, sym: &Symbolic, v: usize) -> Rank {
        match self {
            RankState::Direct { domain, sets, .. } => sets
                .iter()
                .rev()
                .find(|(_, s)| sym.contains(s, v))
                .map_or_else(|| domain.zero(), |(r, _)| r.clone()),
            RankState::Linear { domain, coords, top, .. } => {
                if sym.contains(top, v) {
                    return Rank::Top;
                }
                let x = coords
                    .iter()
                    .map(|col| col.iter().position(|c| sym.contains(c, v)).unwrap_or(0) as u32)
                    .collect();
                let _ = domain;
                Rank::Vector(x)
            }
        }
    }

    /// `S_r`: a lookup for the direct family, a reconstruction from the
    /// coordinate sets otherwise.
    pub fn set_at(&self, sym: &Symbolic, r: &Rank) -> VertexSet {
        match self {
            RankState::Direct { sets, arena, .. } => {
                if r.is_zero() {
                    return arena.clone();
                }
                sets.get(r).cloned().unwrap_or_else(|| sym.empty())
            }
            RankState::Linear { .. } => self.reconstruct(sym, r),
        }
    }

    /// Rebuilds `S_r` from the coordinate sets, walking the odd positions
    /// from the most significant one down and keeping the running
    /// intersection of exact matches.
    pub fn reconstruct(&self, sym: &Symbolic, r: &Rank) -> VertexSet {
        let RankState::Linear { arena, coords, top, .. } = self else {
            panic!("reconstruction needs the linear-space encoding");
        };
        let x = match r {
            Rank::Top => return top.clone(),
            Rank::Vector(x) => x,
        };
        if coords.is_empty() {
            return arena.clone();
        }
        let mut acc = top.clone();
        let mut matching: Option<VertexSet> = None;
        for s in (0..coords.len()).rev() {
            let want = x[s] as usize;
            let col = &coords[s];
            let mut above: Option<VertexSet> = None;
            for c in &col[want + 1..] {
                above = Some(match above {
                    None => c.clone(),
                    Some(a) => sym.union(&a, c),
                });
            }
            if let Some(above) = above {
                let part = match &matching {
                    None => above,
                    Some(m) => sym.intersect(m, &above),
                };
                acc = sym.union(&acc, &part);
            }
            matching = Some(match matching {
                None => col[want].clone(),
                Some(m) => sym.intersect(&m, &col[want]),
            });
        }
        sym.union(&acc, &matching.expect("at least one position"))
    }

    /// Lowest rank among the members of `set`, found by narrowing `set`
    /// through the coordinate columns. `set` must avoid `S_⊤`.
    fn min_rank_linear(&self, sym: &Symbolic, set: &VertexSet) -> Rank {
        let RankState::Linear { coords, .. } = self else {
            unreachable!()
        };
        let mut x = vec![0; coords.len()];
        let mut current = set.clone();
        for s in (0..coords.len()).rev() {
            for (value, c) in coords[s].iter().enumerate() {
                let t = sym.intersect(&current, c);
                if !sym.is_empty(&t) {
                    x[s] = value as u32;
                    current = t;
                    break;
                }
            }
        }
        Rank::Vector(x)
    }

    /// Moves `diff` to rank exactly `r` in the coordinate encoding.
    fn commit_linear(&mut self, sym: &Symbolic, r: &Rank, diff: &VertexSet) {
        let RankState::Linear { coords, top, .. } = self else {
            unreachable!()
        };
        for col in coords.iter_mut() {
            for c in col.iter_mut() {
                *c = sym.difference(c, diff);
            }
        }
        match r {
            Rank::Top => *top = sym.union(top, diff),
            Rank::Vector(x) => {
                for (col, &value) in coords.iter_mut().zip(x) {
                    let c = &mut col[value as usize];
                    *c = sym.union(c, diff);
                }
            }
        }
    }

    /// Ranks of all arena members, by inspection.
    pub fn ranking(&self, sym: &Symbolic) -> Vec<Rank> {
        (0..sym.universe_size()).map(|v| self.rank_of(sym, v)).collect()
    }
}

/// Result of one run of the dominion search.
#[derive(Debug)]
pub struct PmRun {
    /// Arena minus `S_⊤`.
    pub dominion: VertexSet,
    pub state: RankState,
    pub player: Player,
    pub iterations: u64,
    pub violations: Vec<InvariantViolation>,
    pub trace: Vec<TraceStep>,
}

/// How the solver reads the game: priorities and owners for `player`'s
/// dominion search, restricted to `arena`.
pub(crate) struct View<'a, 'g> {
    sym: &'a Symbolic<'g>,
    arena: VertexSet,
    player: Player,
    priority_count: u32,
    /// View priority of each vertex.
    priority: Vec<u32>,
}

impl<'a, 'g> View<'a, 'g> {
    pub(crate) fn new(sym: &'a Symbolic<'g>, arena: &VertexSet, player: Player) -> View<'a, 'g> {
        let game = sym.game();
        let shift = u32::from(player == Player::Odd);
        let priority: Vec<u32> = game.vertices().map(|v| game.priority(v) + shift).collect();
        let priority_count = sym
            .members(arena)
            .into_iter()
            .map(|v| priority[v] + 1)
            .max()
            .unwrap_or(1);
        View {
            sym,
            arena: arena.clone(),
            player,
            priority_count,
            priority,
        }
    }

    fn caps(&self) -> Vec<u32> {
        let mut caps = vec![0; (self.priority_count / 2) as usize];
        for v in self.sym.members(&self.arena) {
            let p = self.priority[v];
            if p % 2 == 1 {
                caps[(p / 2) as usize] += 1;
            }
        }
        caps
    }

    /// `P_i ∩ arena` in view priorities.
    pub(crate) fn priority_set(&self, i: u32) -> VertexSet {
        let global = match self.player {
            Player::Even => i,
            Player::Odd if i == 0 => return self.sym.empty(),
            Player::Odd => i - 1,
        };
        self.sym.intersect(&self.sym.priority(global), &self.arena)
    }

    /// The view opponent's controllable predecessor inside the arena.
    fn cpre_opponent(&self, s: &VertexSet) -> VertexSet {
        self.sym.cpre_in(self.player.opponent(), s, &self.arena)
    }

    /// The arena as a standalone explicit game in view priorities, with the
    /// map from its vertices back to global ids.
    fn explicit_game(&self) -> (ParityGame, Vec<usize>) {
        let sub = self
            .sym
            .game()
            .subgame(&self.sym.to_bits(&self.arena))
            .expect("arena induces a subgame");
        let game = match self.player {
            Player::Even => sub.game,
            Player::Odd => sub.game.swap_roles_increment(),
        };
        (game, sub.original)
    }
}

/// Explicit ground truth used when invariants are checked.
struct Checker {
    game: ParityGame,
    original: Vec<usize>,
    oracle: RankingFunction,
    violations: Vec<InvariantViolation>,
}

impl Checker {
    fn new(view: &View, domain: &RankDomain) -> Checker {
        let (game, original) = view.explicit_game();
        let (oracle, _) = solve_explicit_pm(&game, domain);
        Checker {
            game,
            original,
            oracle,
            violations: Vec::new(),
        }
    }

    fn local_ranking(&self, sym: &Symbolic, state: &RankState) -> RankingFunction {
        RankingFunction::from_ranks(self.original.iter().map(|&v| state.rank_of(sym, v)).collect())
    }

    fn report(&mut self, iteration: u64, kind: InvariantKind, vertex: Option<usize>, detail: String) {
        self.violations.push(InvariantViolation {
            iteration,
            kind,
            vertex,
            detail,
        });
    }

    /// Structural soundness of the family plus the lower bound.
    fn check_state(&mut self, sym: &Symbolic, state: &RankState, iteration: u64) {
        match state {
            RankState::Direct { domain, arena, sets } => {
                let mut previous = sym.to_bits(arena);
                for r in domain.iter().skip(1) {
                    let current = sets.get(&r).map_or_else(|| FixedBitSet::with_capacity(previous.len()), |s| sym.to_bits(s));
                    if !current.is_subset(&previous) {
                        self.report(iteration, InvariantKind::AntiMonotonicity, None, format!("S_{r} not below its predecessor"));
                    }
                    previous = current;
                }
            }
            RankState::Linear { arena, coords, top, .. } => {
                let arena = sym.to_bits(arena);
                let top = sym.to_bits(top);
                for (k, col) in coords.iter().enumerate() {
                    let mut seen = top.clone();
                    for c in col {
                        let c = sym.to_bits(c);
                        if !seen.is_disjoint(&c) {
                            self.report(iteration, InvariantKind::Partition, None, format!("overlap in column {}", 2 * k + 1));
                        }
                        seen.union_with(&c);
                    }
                    if seen != arena {
                        self.report(iteration, InvariantKind::Partition, None, format!("column {} does not cover", 2 * k + 1));
                    }
                }
            }
        }
        let rho = self.local_ranking(sym, state);
        for i in 0..self.original.len() {
            let v = self.original[i];
            if rho[i] > self.oracle[i] {
                self.report(iteration, InvariantKind::LowerBound, Some(v), format!("{} above {}", rho[i], self.oracle[i]));
            }
        }
    }

    /// After `S_r` is updated: every vertex that lifts to exactly `r` under
    /// the ranking from the start of the iteration is in the new `S_r`.
    fn check_closure(
        &mut self,
        sym: &Symbolic,
        start: &RankingFunction,
        domain: &RankDomain,
        r: &Rank,
        updated: &VertexSet,
        iteration: u64,
    ) {
        for i in 0..self.original.len() {
            let v = self.original[i];
            if lifted_rank(&self.game, domain, start, i) == *r && !sym.contains(updated, v) {
                self.report(iteration, InvariantKind::Closure, Some(v), format!("lifts to {r} from {}", start[i]));
            }
        }
    }

    /// At a loop boundary: every vertex either lifts to at least `r` or is
    /// stable under its lift.
    fn check_stability(&mut self, sym: &Symbolic, state: &RankState, domain: &RankDomain, r: &Rank, iteration: u64) {
        let rho = self.local_ranking(sym, state);
        for i in 0..self.original.len() {
            let v = self.original[i];
            let lifted = lifted_rank(&self.game, domain, &rho, i);
            if lifted < *r && lifted != rho[i] {
                self.report(iteration, InvariantKind::Stability, Some(v), format!("lifts to {lifted} from {}", rho[i]));
            }
        }
    }
}

/// The symbolic progress-measure loop inside `arena` for `player`. With
/// `Bound::Full` the returned dominion is the player's winning region of the
/// arena; with `Bound::Bounded(h)` it contains every dominion of at most
/// `h + 1` vertices and is itself a dominion or empty.
pub fn symbolic_parity_dominion(
    sym: &Symbolic,
    arena: &VertexSet,
    player: Player,
    bound: Bound,
    opts: &PmOptions,
) -> PmRun {
    let view = View::new(sym, arena, player);
    let c = view.priority_count;
    let domain = RankDomain::new(c, view.caps(), bound);
    let width = domain.width();

    // P_{2k+1} for the seeds and the "priority at most 2k+1" sets for the
    // closure steps.
    let odd_sets: Vec<VertexSet> = (0..width as u32).map(|k| view.priority_set(2 * k + 1)).collect();
    let mut low_sets: Vec<VertexSet> = Vec::with_capacity(width);
    let mut low = view.priority_set(0);
    for odd in &odd_sets {
        low = sym.union(&low, odd);
        low_sets.push(low.clone());
        let k = low_sets.len() as u32;
        if 2 * k < c {
            low = sym.union(&low, &view.priority_set(2 * k));
        }
    }
    drop(low);

    let mut checker = opts.check_invariants.then(|| Checker::new(&view, &domain));
    let mut state = RankState::new(sym, domain.clone(), arena.clone(), opts.representation);
    let mut trace = Vec::new();

    let n = sym.count(arena) as u128;
    let size = domain.size().unwrap_or(u128::MAX);
    let guard = n.saturating_mul(size).saturating_add(size);

    let mut r = domain.incr(&domain.zero());
    let mut iteration = 0u64;
    loop {
        iteration += 1;
        assert!(
            (iteration as u128) <= guard,
            "progress-measure loop exceeded {guard} iterations"
        );
        let cpre_before = sym.counters().cpre_ops;
        let start = checker.as_ref().map(|ch| ch.local_ranking(sym, &state));
        let old = state.set_at(sym, &r);
        let mut s = old.clone();

        // Seeds: vertices whose odd priority lets them jump to r from a
        // predecessor rank. The set for decr_1(r) is kept for the subset
        // test after the closure.
        let seed_positions = match &r {
            Rank::Top => width,
            Rank::Vector(_) => (r.lowest_active(c) as usize).div_ceil(2).min(width),
        };
        let mut below: Option<VertexSet> = None;
        for k in 0..seed_positions {
            let i = 2 * k as u32 + 1;
            if domain.caps()[k] == 0 && k > 0 {
                continue;
            }
            let pred = state.set_at(sym, &domain.decr_at(&r, i));
            if domain.caps()[k] > 0 {
                let seed = sym.intersect(&view.cpre_opponent(&pred), &odd_sets[k]);
                s = sym.union(&s, &seed);
            }
            if k == 0 {
                below = Some(pred);
            }
        }
        let below = below.unwrap_or_else(|| state.set_at(sym, &domain.decr(&r)));

        // Closure under the opponent's controllable predecessor, limited to
        // priorities at most ℓ below ⊤.
        loop {
            let pre = view.cpre_opponent(&s);
            let step = match &r {
                Rank::Top => pre,
                Rank::Vector(_) => {
                    let ell = r.lowest_active(c);
                    sym.intersect(&pre, &low_sets[(ell / 2) as usize])
                }
            };
            let next = sym.union(&s, &step);
            if sym.equals(&next, &s) {
                break;
            }
            s = next;
        }

        if let (Some(ch), Some(start)) = (checker.as_mut(), start.as_ref()) {
            ch.check_closure(sym, start, &domain, &r, &s, iteration);
        }
        let diff = sym.difference(&s, &old);
        let added = sym.count(&diff);
        let holds = sym.is_subset(&s, &below);
        let next = match &mut state {
            RankState::Direct { sets, .. } => {
                sets.insert(r.clone(), s.clone());
                if holds {
                    (!r.is_top()).then(|| domain.incr(&r))
                } else {
                    let mut lower = domain.decr(&r);
                    loop {
                        let target = state_set(sets, arena, sym, &lower);
                        if sym.is_subset(&s, &target) {
                            break;
                        }
                        let widened = sym.union(&target, &s);
                        sets.insert(lower.clone(), widened);
                        lower = domain.decr(&lower);
                    }
                    Some(domain.incr(&lower))
                }
            }
            RankState::Linear { .. } => {
                let target = if holds {
                    None
                } else {
                    Some(state.min_rank_linear(sym, &diff))
                };
                state.commit_linear(sym, &r, &diff);
                match target {
                    None => (!r.is_top()).then(|| domain.incr(&r)),
                    Some(m) => Some(domain.incr(&m)),
                }
            }
        };

        if opts.trace {
            trace.push(TraceStep {
                iteration,
                rank: r.clone(),
                added,
                size: sym.count(&s),
                next: next.clone(),
                cpre_ops: sym.counters().cpre_ops - cpre_before,
            });
        }
        if let Some(ch) = checker.as_mut() {
            ch.check_state(sym, &state, iteration);
            if let Some(next) = &next {
                ch.check_stability(sym, &state, &domain, next, iteration);
            }
        }
        drop((old, s, diff, below));
        match next {
            Some(next) => r = next,
            None => break,
        }
    }

    let top = state.top_set(sym);
    let dominion = sym.difference(arena, &top);
    PmRun {
        dominion,
        state,
        player,
        iterations: iteration,
        violations: checker.map(|c| c.violations).unwrap_or_default(),
        trace,
    }
}

fn state_set(sets: &BTreeMap<Rank, VertexSet>, arena: &VertexSet, sym: &Symbolic, r: &Rank) -> VertexSet {
    if r.is_zero() {
        return arena.clone();
    }
    sets.get(r).cloned().unwrap_or_else(|| sym.empty())
}

/// A dominion for `player` in the whole game containing every dominion of
/// at most `h + 1` vertices.
pub fn dominion(sym: &Symbolic, player: Player, h: u32) -> VertexSet {
    symbolic_parity_dominion(sym, &sym.all(), player, Bound::Bounded(h), &PmOptions::default()).dominion
}
