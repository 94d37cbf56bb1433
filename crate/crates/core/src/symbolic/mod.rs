//! The set-based symbolic interface.
//!
//! Solvers touch vertex sets only through [`Symbolic`]: basic set algebra
//! plus the one-step operators `pre` and `cpre`. Every call bumps exactly one
//! counter in [`OpCounters`], and every live [`VertexSet`] handle counts
//! towards the peak-space measure until it is dropped.

mod bdd;

use std::cell::{Cell, RefCell};
use std::fmt;
use std::rc::Rc;
use std::sync::atomic::{AtomicU64, Ordering};

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::game::{ParityGame, Player};

pub use bdd::BddManager;

/// Which representation backs the vertex sets.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Backend {
    /// Packed bit vectors over the fixed universe.
    #[default]
    Bits,
    /// Reduced ordered binary decision diagrams.
    Bdd,
}

impl std::str::FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bits" => Ok(Backend::Bits),
            "bdd" => Ok(Backend::Bdd),
            other => Err(format!("unknown backend `{other}` (expected bits or bdd)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetError {
    #[error("vertex sets from different universes were combined")]
    UniverseMismatch,
}

/// Operation counts of one solver run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounters {
    pub unions: u64,
    pub intersections: u64,
    pub differences: u64,
    pub containment_tests: u64,
    pub equality_tests: u64,
    pub pre_ops: u64,
    pub cpre_ops: u64,
    pub peak_live_sets: u64,
}

impl OpCounters {
    /// All basic (non one-step) set operations.
    pub fn basic_ops(&self) -> u64 {
        self.unions + self.intersections + self.differences + self.containment_tests + self.equality_tests
    }

    pub fn one_step_ops(&self) -> u64 {
        self.pre_ops + self.cpre_ops
    }

    /// Counter-wise difference `self - earlier`; the peak is kept as is.
    pub fn since(&self, earlier: &OpCounters) -> OpCounters {
        OpCounters {
            unions: self.unions - earlier.unions,
            intersections: self.intersections - earlier.intersections,
            differences: self.differences - earlier.differences,
            containment_tests: self.containment_tests - earlier.containment_tests,
            equality_tests: self.equality_tests - earlier.equality_tests,
            pre_ops: self.pre_ops - earlier.pre_ops,
            cpre_ops: self.cpre_ops - earlier.cpre_ops,
            peak_live_sets: self.peak_live_sets,
        }
    }

    /// `(key, value)` pairs in a fixed order, for structured output.
    pub fn entries(&self) -> [(&'static str, u64); 10] {
        [
            ("unions", self.unions),
            ("intersections", self.intersections),
            ("differences", self.differences),
            ("containment_tests", self.containment_tests),
            ("equality_tests", self.equality_tests),
            ("basic_ops", self.basic_ops()),
            ("pre_ops", self.pre_ops),
            ("cpre_ops", self.cpre_ops),
            ("one_step_ops", self.one_step_ops()),
            ("peak_live_sets", self.peak_live_sets),
        ]
    }
}

#[derive(Debug, Default)]
struct LiveCount {
    live: Cell<u64>,
    peak: Cell<u64>,
}

impl LiveCount {
    fn acquire(&self) {
        let live = self.live.get() + 1;
        self.live.set(live);
        if live > self.peak.get() {
            self.peak.set(live);
        }
    }

    fn release(&self) {
        self.live.set(self.live.get() - 1);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    Bits(FixedBitSet),
    Bdd(bdd::NodeId),
}

/// A handle to a set of vertices of one [`Symbolic`] universe.
///
/// Handles are values: operations never modify their operands. A handle is
/// a live set from creation until it is dropped; cloning creates another
/// live set.
pub struct VertexSet {
    repr: Repr,
    universe: u64,
    live: Rc<LiveCount>,
}

impl VertexSet {
    fn new(repr: Repr, universe: u64, live: &Rc<LiveCount>) -> VertexSet {
        live.acquire();
        VertexSet {
            repr,
            universe,
            live: Rc::clone(live),
        }
    }
}

impl Clone for VertexSet {
    fn clone(&self) -> Self {
        VertexSet::new(self.repr.clone(), self.universe, &self.live)
    }
}

impl Drop for VertexSet {
    fn drop(&mut self) {
        self.live.release();
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Bits(b) => f.debug_set().entries(b.ones()).finish(),
            Repr::Bdd(n) => write!(f, "VertexSet(bdd {n:?})"),
        }
    }
}

#[derive(Default)]
struct Counts {
    unions: Cell<u64>,
    intersections: Cell<u64>,
    differences: Cell<u64>,
    containment_tests: Cell<u64>,
    equality_tests: Cell<u64>,
    pre_ops: Cell<u64>,
    cpre_ops: Cell<u64>,
}

fn bump(c: &Cell<u64>) {
    c.set(c.get() + 1);
}

enum Store {
    Bits { predecessors: Vec<Vec<usize>> },
    Bdd { manager: RefCell<BddManager>, relation: bdd::NodeId },
}

static NEXT_UNIVERSE: AtomicU64 = AtomicU64::new(1);

/// The symbolic view of one game for one solver run.
///
/// Owns the counters and the backend. The structural sets (`V`, `V_E`,
/// `V_O`, `P_i`) are input constants; handing out a handle to one of them
/// costs no operation but the handle is a live set like any other.
pub struct Symbolic<'g> {
    game: &'g ParityGame,
    store: Store,
    id: u64,
    counts: Counts,
    live: Rc<LiveCount>,
    all: Repr,
    empty: Repr,
    owned: [Repr; 2],
    priority: Vec<Repr>,
}

impl<'g> Symbolic<'g> {
    pub fn new(game: &'g ParityGame, backend: Backend) -> Symbolic<'g> {
        let n = game.vertex_count();
        let mut all_bits = FixedBitSet::with_capacity(n);
        all_bits.insert_range(..);
        let c = game.priority_count();
        let masks: Vec<FixedBitSet> = (0..c).map(|p| game.priority_mask(p)).collect();
        let even = game.owner_mask(Player::Even);
        let odd = game.owner_mask(Player::Odd);
        let (store, all, empty, owned, priority) = match backend {
            Backend::Bits => {
                let predecessors = game.vertices().map(|v| game.predecessors(v).to_vec()).collect();
                (
                    Store::Bits { predecessors },
                    Repr::Bits(all_bits),
                    Repr::Bits(FixedBitSet::with_capacity(n)),
                    [Repr::Bits(even), Repr::Bits(odd)],
                    masks.into_iter().map(Repr::Bits).collect(),
                )
            }
            Backend::Bdd => {
                let mut m = BddManager::new(n);
                let all = m.from_bits(&all_bits);
                let even = m.from_bits(&even);
                let odd = m.from_bits(&odd);
                let priority = masks.iter().map(|b| Repr::Bdd(m.from_bits(b))).collect();
                let relation = m.relation(
                    game.vertices()
                        .flat_map(|v| game.successors(v).iter().map(move |&w| (v, w))),
                );
                (
                    Store::Bdd {
                        manager: RefCell::new(m),
                        relation,
                    },
                    Repr::Bdd(all),
                    Repr::Bdd(bdd::FALSE),
                    [Repr::Bdd(even), Repr::Bdd(odd)],
                    priority,
                )
            }
        };
        Symbolic {
            game,
            store,
            id: NEXT_UNIVERSE.fetch_add(1, Ordering::Relaxed),
            counts: Counts::default(),
            live: Rc::new(LiveCount::default()),
            all,
            empty,
            owned,
            priority,
        }
    }

    pub fn game(&self) -> &'g ParityGame {
        self.game
    }

    pub fn backend(&self) -> Backend {
        match self.store {
            Store::Bits { .. } => Backend::Bits,
            Store::Bdd { .. } => Backend::Bdd,
        }
    }

    pub fn universe_size(&self) -> usize {
        self.game.vertex_count()
    }

    /// Current counters, including the peak number of live sets so far.
    pub fn counters(&self) -> OpCounters {
        OpCounters {
            unions: self.counts.unions.get(),
            intersections: self.counts.intersections.get(),
            differences: self.counts.differences.get(),
            containment_tests: self.counts.containment_tests.get(),
            equality_tests: self.counts.equality_tests.get(),
            pre_ops: self.counts.pre_ops.get(),
            cpre_ops: self.counts.cpre_ops.get(),
            peak_live_sets: self.live.peak.get(),
        }
    }

    /// Number of set handles alive right now.
    pub fn live_sets(&self) -> u64 {
        self.live.live.get()
    }

    /// Restarts peak tracking from the current number of live sets.
    pub fn reset_peak(&self) {
        self.live.peak.set(self.live.live.get());
    }

    fn wrap(&self, repr: Repr) -> VertexSet {
        VertexSet::new(repr, self.id, &self.live)
    }

    fn check(&self, s: &VertexSet) -> Result<(), SetError> {
        if s.universe == self.id {
            Ok(())
        } else {
            Err(SetError::UniverseMismatch)
        }
    }

    fn checked<T>(&self, operands: &[&VertexSet], f: impl FnOnce() -> T) -> Result<T, SetError> {
        for s in operands {
            self.check(s)?;
        }
        Ok(f())
    }

    // ---- constants ---------------------------------------------------------

    pub fn empty(&self) -> VertexSet {
        self.wrap(self.empty.clone())
    }

    pub fn all(&self) -> VertexSet {
        self.wrap(self.all.clone())
    }

    pub fn owned_by(&self, player: Player) -> VertexSet {
        self.wrap(self.owned[player.index()].clone())
    }

    /// `P_p`; empty for priorities at or above the game's priority count.
    pub fn priority(&self, p: u32) -> VertexSet {
        match self.priority.get(p as usize) {
            Some(r) => self.wrap(r.clone()),
            None => self.empty(),
        }
    }

    pub fn singleton(&self, v: usize) -> VertexSet {
        assert!(v < self.universe_size(), "vertex {v} outside universe");
        match &self.store {
            Store::Bits { .. } => {
                let mut b = FixedBitSet::with_capacity(self.universe_size());
                b.insert(v);
                self.wrap(Repr::Bits(b))
            }
            Store::Bdd { manager, .. } => {
                let n = manager.borrow_mut().singleton(v);
                self.wrap(Repr::Bdd(n))
            }
        }
    }

    pub fn from_bits(&self, bits: &FixedBitSet) -> VertexSet {
        let mut b = bits.clone();
        b.grow(self.universe_size());
        assert!(b.len() == self.universe_size(), "bit set larger than the universe");
        match &self.store {
            Store::Bits { .. } => self.wrap(Repr::Bits(b)),
            Store::Bdd { manager, .. } => {
                let n = manager.borrow_mut().from_bits(&b);
                self.wrap(Repr::Bdd(n))
            }
        }
    }

    pub fn from_vertices(&self, vertices: impl IntoIterator<Item = usize>) -> VertexSet {
        let mut b = FixedBitSet::with_capacity(self.universe_size());
        for v in vertices {
            b.insert(v);
        }
        self.from_bits(&b)
    }

    // ---- basic set operations ---------------------------------------------

    fn binary(&self, a: &VertexSet, b: &VertexSet, bits: fn(&mut FixedBitSet, &FixedBitSet), op: BddBinary) -> VertexSet {
        let repr = match (&a.repr, &b.repr, &self.store) {
            (Repr::Bits(x), Repr::Bits(y), _) => {
                let mut out = x.clone();
                bits(&mut out, y);
                Repr::Bits(out)
            }
            (Repr::Bdd(x), Repr::Bdd(y), Store::Bdd { manager, .. }) => {
                let mut m = manager.borrow_mut();
                Repr::Bdd(match op {
                    BddBinary::Or => m.or(*x, *y),
                    BddBinary::And => m.and(*x, *y),
                    BddBinary::AndNot => m.and_not(*x, *y),
                })
            }
            _ => unreachable!("representation does not match backend"),
        };
        self.wrap(repr)
    }

    pub fn try_union(&self, a: &VertexSet, b: &VertexSet) -> Result<VertexSet, SetError> {
        self.checked(&[a, b], || {
            bump(&self.counts.unions);
            self.binary(a, b, |x, y| x.union_with(y), BddBinary::Or)
        })
    }

    pub fn try_intersect(&self, a: &VertexSet, b: &VertexSet) -> Result<VertexSet, SetError> {
        self.checked(&[a, b], || {
            bump(&self.counts.intersections);
            self.binary(a, b, |x, y| x.intersect_with(y), BddBinary::And)
        })
    }

    pub fn try_difference(&self, a: &VertexSet, b: &VertexSet) -> Result<VertexSet, SetError> {
        self.checked(&[a, b], || {
            bump(&self.counts.differences);
            self.binary(a, b, |x, y| x.difference_with(y), BddBinary::AndNot)
        })
    }

    pub fn try_is_subset(&self, a: &VertexSet, b: &VertexSet) -> Result<bool, SetError> {
        self.checked(&[a, b], || {
            bump(&self.counts.containment_tests);
            match (&a.repr, &b.repr, &self.store) {
                (Repr::Bits(x), Repr::Bits(y), _) => x.is_subset(y),
                (Repr::Bdd(x), Repr::Bdd(y), Store::Bdd { manager, .. }) => {
                    manager.borrow_mut().and_not(*x, *y) == bdd::FALSE
                }
                _ => unreachable!("representation does not match backend"),
            }
        })
    }

    pub fn try_equals(&self, a: &VertexSet, b: &VertexSet) -> Result<bool, SetError> {
        self.checked(&[a, b], || {
            bump(&self.counts.equality_tests);
            a.repr == b.repr
        })
    }

    pub fn union(&self, a: &VertexSet, b: &VertexSet) -> VertexSet {
        self.try_union(a, b).expect("union")
    }

    pub fn intersect(&self, a: &VertexSet, b: &VertexSet) -> VertexSet {
        self.try_intersect(a, b).expect("intersect")
    }

    pub fn difference(&self, a: &VertexSet, b: &VertexSet) -> VertexSet {
        self.try_difference(a, b).expect("difference")
    }

    /// `V \ a`, charged as one difference.
    pub fn complement(&self, a: &VertexSet) -> VertexSet {
        let all = self.all();
        self.difference(&all, a)
    }

    pub fn is_subset(&self, a: &VertexSet, b: &VertexSet) -> bool {
        self.try_is_subset(a, b).expect("is_subset")
    }

    pub fn equals(&self, a: &VertexSet, b: &VertexSet) -> bool {
        self.try_equals(a, b).expect("equals")
    }

    /// Emptiness, charged as one equality test against `∅`.
    pub fn is_empty(&self, a: &VertexSet) -> bool {
        let empty = self.empty();
        self.equals(a, &empty)
    }

    // ---- one-step operations ----------------------------------------------

    fn pre_raw(&self, b: &Repr) -> Repr {
        match (b, &self.store) {
            (Repr::Bits(target), Store::Bits { predecessors }) => {
                let mut out = FixedBitSet::with_capacity(self.universe_size());
                for u in target.ones() {
                    for &v in &predecessors[u] {
                        out.insert(v);
                    }
                }
                Repr::Bits(out)
            }
            (Repr::Bdd(target), Store::Bdd { manager, relation }) => {
                Repr::Bdd(manager.borrow_mut().pre_image(*relation, *target))
            }
            _ => unreachable!("representation does not match backend"),
        }
    }

    fn raw_binary(&self, a: &Repr, b: &Repr, op: BddBinary) -> Repr {
        match (a, b, &self.store) {
            (Repr::Bits(x), Repr::Bits(y), _) => {
                let mut out = x.clone();
                match op {
                    BddBinary::Or => out.union_with(y),
                    BddBinary::And => out.intersect_with(y),
                    BddBinary::AndNot => out.difference_with(y),
                }
                Repr::Bits(out)
            }
            (Repr::Bdd(x), Repr::Bdd(y), Store::Bdd { manager, .. }) => {
                let mut m = manager.borrow_mut();
                Repr::Bdd(match op {
                    BddBinary::Or => m.or(*x, *y),
                    BddBinary::And => m.and(*x, *y),
                    BddBinary::AndNot => m.and_not(*x, *y),
                })
            }
            _ => unreachable!("representation does not match backend"),
        }
    }

    pub fn try_pre(&self, b: &VertexSet) -> Result<VertexSet, SetError> {
        self.checked(&[b], || {
            bump(&self.counts.pre_ops);
            self.wrap(self.pre_raw(&b.repr))
        })
    }

    /// `{v | ∃u ∈ b: (v, u) ∈ E}`.
    pub fn pre(&self, b: &VertexSet) -> VertexSet {
        self.try_pre(b).expect("pre")
    }

    /// `cpre` relative to the subgame induced by `arena`, computed as
    /// `arena ∩ (pre(b ∩ arena) \ (V_op ∩ pre(arena \ b)))`. The arena must
    /// give every vertex in it a successor inside it.
    fn cpre_raw(&self, player: Player, b: &Repr, arena: &Repr) -> Repr {
        let inside = self.raw_binary(b, arena, BddBinary::And);
        let reach = self.pre_raw(&inside);
        let outside = self.raw_binary(arena, b, BddBinary::AndNot);
        let escape = self.pre_raw(&outside);
        let forced = self.raw_binary(&self.owned[player.opponent().index()], &escape, BddBinary::And);
        let ctrl = self.raw_binary(&reach, &forced, BddBinary::AndNot);
        self.raw_binary(&ctrl, arena, BddBinary::And)
    }

    pub fn try_cpre(&self, player: Player, b: &VertexSet) -> Result<VertexSet, SetError> {
        self.checked(&[b], || {
            bump(&self.counts.cpre_ops);
            self.wrap(self.cpre_raw(player, &b.repr, &self.all))
        })
    }

    /// Vertices from which `player` forces the next vertex into `b`.
    pub fn cpre(&self, player: Player, b: &VertexSet) -> VertexSet {
        self.try_cpre(player, b).expect("cpre")
    }

    pub fn try_cpre_in(&self, player: Player, b: &VertexSet, arena: &VertexSet) -> Result<VertexSet, SetError> {
        self.checked(&[b, arena], || {
            bump(&self.counts.cpre_ops);
            self.wrap(self.cpre_raw(player, &b.repr, &arena.repr))
        })
    }

    /// `cpre` inside the subgame induced by `arena`, charged as one
    /// controllable-predecessor operation.
    pub fn cpre_in(&self, player: Player, b: &VertexSet, arena: &VertexSet) -> VertexSet {
        self.try_cpre_in(player, b, arena).expect("cpre_in")
    }

    // ---- inspection (not counted; diagnostics, output and tests) ----------

    pub fn contains(&self, s: &VertexSet, v: usize) -> bool {
        match (&s.repr, &self.store) {
            (Repr::Bits(b), _) => b.contains(v),
            (Repr::Bdd(n), Store::Bdd { manager, .. }) => manager.borrow().contains(*n, v),
            _ => unreachable!("representation does not match backend"),
        }
    }

    pub fn to_bits(&self, s: &VertexSet) -> FixedBitSet {
        match (&s.repr, &self.store) {
            (Repr::Bits(b), _) => b.clone(),
            (Repr::Bdd(n), Store::Bdd { manager, .. }) => manager.borrow().to_bits(*n, self.universe_size()),
            _ => unreachable!("representation does not match backend"),
        }
    }

    pub fn members(&self, s: &VertexSet) -> Vec<usize> {
        self.to_bits(s).ones().collect()
    }

    pub fn count(&self, s: &VertexSet) -> usize {
        self.to_bits(s).count_ones(..)
    }
}

#[derive(Clone, Copy)]
enum BddBinary {
    Or,
    And,
    AndNot,
}
