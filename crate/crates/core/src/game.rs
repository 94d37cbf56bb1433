//! Parity games: construction, validation, and the structural transformations
//! the solvers rely on (priority normalization, role swap, induced subgames).

use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

/// The two players. `Even` wins a play iff the highest priority seen
/// infinitely often is even.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    Even,
    Odd,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Even => Player::Odd,
            Player::Odd => Player::Even,
        }
    }

    /// The player who likes priority `p`.
    pub fn of_priority(p: u32) -> Player {
        if p % 2 == 0 {
            Player::Even
        } else {
            Player::Odd
        }
    }

    /// Numeric encoding used by the PGSolver format (0 = Even, 1 = Odd).
    pub fn index(self) -> usize {
        match self {
            Player::Even => 0,
            Player::Odd => 1,
        }
    }

    pub fn from_index(i: usize) -> Option<Player> {
        match i {
            0 => Some(Player::Even),
            1 => Some(Player::Odd),
            _ => None,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::Even => f.write_str("even"),
            Player::Odd => f.write_str("odd"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("vertex {0} has no successor")]
    VertexWithoutSuccessor(usize),
    #[error("vertex {0} has a priority outside the declared range")]
    PriorityOutOfRange(usize),
    #[error("vertex {0} has an edge to a vertex that does not exist")]
    DanglingEdge(usize),
    #[error("vertex {0} loses all of its successors in the induced subgame")]
    NotClosed(usize),
    #[error("vertex {0} is outside the game")]
    UnknownVertex(usize),
    #[error("a game needs at least one vertex")]
    Empty,
    #[error("owner, priority and successor tables disagree in length")]
    LengthMismatch,
}

/// An immutable, validated parity game on vertices `0..n`.
///
/// Every vertex has at least one successor, successor lists are sorted and
/// free of duplicates, and all priorities are below [`ParityGame::priority_count`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityGame {
    owner: Vec<Player>,
    priority: Vec<u32>,
    successors: Vec<Vec<usize>>,
    predecessors: Vec<Vec<usize>>,
    names: Option<Vec<Option<String>>>,
    priority_count: u32,
    edge_count: usize,
}

impl ParityGame {
    /// Builds and validates a game. The priority count is one more than the
    /// largest priority that occurs.
    pub fn new(
        owner: Vec<Player>,
        priority: Vec<u32>,
        successors: Vec<Vec<usize>>,
    ) -> Result<ParityGame, GameError> {
        GameParts {
            owner,
            priority,
            successors,
            names: None,
            priority_count: None,
        }
        .build()
    }

    pub fn vertex_count(&self) -> usize {
        self.owner.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// `c`: priorities range over `0..c`.
    pub fn priority_count(&self) -> u32 {
        self.priority_count
    }

    pub fn owner(&self, v: usize) -> Player {
        self.owner[v]
    }

    pub fn priority(&self, v: usize) -> u32 {
        self.priority[v]
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.successors[v]
    }

    pub fn predecessors(&self, v: usize) -> &[usize] {
        &self.predecessors[v]
    }

    pub fn owners(&self) -> &[Player] {
        &self.owner
    }

    pub fn priorities(&self) -> &[u32] {
        &self.priority
    }

    pub fn name(&self, v: usize) -> Option<&str> {
        self.names.as_ref().and_then(|n| n[v].as_deref())
    }

    pub fn has_names(&self) -> bool {
        self.names.is_some()
    }

    pub fn vertices(&self) -> std::ops::Range<usize> {
        0..self.vertex_count()
    }

    /// `|P_i|` for every priority `i < c`.
    pub fn priority_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.priority_count as usize];
        for &p in &self.priority {
            sizes[p as usize] += 1;
        }
        sizes
    }

    /// Vertices of priority `p` as an explicit bit set.
    pub fn priority_mask(&self, p: u32) -> FixedBitSet {
        let mut mask = FixedBitSet::with_capacity(self.vertex_count());
        for v in self.vertices().filter(|&v| self.priority[v] == p) {
            mask.insert(v);
        }
        mask
    }

    /// Vertices owned by `player` as an explicit bit set.
    pub fn owner_mask(&self, player: Player) -> FixedBitSet {
        let mut mask = FixedBitSet::with_capacity(self.vertex_count());
        for v in self.vertices().filter(|&v| self.owner[v] == player) {
            mask.insert(v);
        }
        mask
    }

    pub fn is_normalized(&self) -> bool {
        let sizes = self.priority_sizes();
        sizes.iter().skip(1).all(|&s| s > 0) && self.priority_count >= 1
    }

    /// Lowers priorities until `P_i` is nonempty for every `0 < i < c`,
    /// preserving the parity and relative order of all priorities.
    ///
    /// Returns the normalized game and a table mapping every old priority
    /// level to its new value (`None` for levels no vertex uses).
    pub fn normalize_priorities(&self) -> (ParityGame, Vec<Option<u32>>) {
        let c = self.priority_count as usize;
        let sizes = self.priority_sizes();
        let mut level: Vec<u32> = (0..c as u32).collect();
        loop {
            let mut occupied = vec![false; c];
            for (p, &s) in sizes.iter().enumerate() {
                if s > 0 {
                    occupied[level[p] as usize] = true;
                }
            }
            let top = occupied.iter().rposition(|&o| o).unwrap_or(0);
            // Everything above an empty level i > 0 can move down by two.
            match (1..top).find(|&i| !occupied[i]) {
                Some(gap) => {
                    for l in level.iter_mut().filter(|l| **l as usize > gap) {
                        *l -= 2;
                    }
                }
                None => break,
            }
        }
        let remap: Vec<Option<u32>> = (0..c)
            .map(|p| (sizes[p] > 0).then_some(level[p]))
            .collect();
        let priority: Vec<u32> = self.priority.iter().map(|&p| level[p as usize]).collect();
        let priority_count = priority.iter().copied().max().unwrap_or(0) + 1;
        let game = ParityGame {
            owner: self.owner.clone(),
            priority,
            successors: self.successors.clone(),
            predecessors: self.predecessors.clone(),
            names: self.names.clone(),
            priority_count,
            edge_count: self.edge_count,
        };
        (game, remap)
    }

    /// Adds one to every priority and flips every owner. Even-dominions of
    /// the result are exactly the Odd-dominions of `self` and vice versa.
    pub fn swap_roles_increment(&self) -> ParityGame {
        ParityGame {
            owner: self.owner.iter().map(|p| p.opponent()).collect(),
            priority: self.priority.iter().map(|p| p + 1).collect(),
            successors: self.successors.clone(),
            predecessors: self.predecessors.clone(),
            names: self.names.clone(),
            priority_count: self.priority_count + 1,
            edge_count: self.edge_count,
        }
    }

    /// The game induced by `keep`. Vertices are renumbered in increasing
    /// order of their original id.
    pub fn subgame(&self, keep: &FixedBitSet) -> Result<Subgame, GameError> {
        let n = self.vertex_count();
        if let Some(v) = keep.ones().find(|&v| v >= n) {
            return Err(GameError::UnknownVertex(v));
        }
        let original: Vec<usize> = keep.ones().collect();
        if original.is_empty() {
            return Err(GameError::Empty);
        }
        let mut local = vec![usize::MAX; n];
        for (i, &v) in original.iter().enumerate() {
            local[v] = i;
        }
        let mut successors = Vec::with_capacity(original.len());
        for &v in &original {
            let succ: Vec<usize> = self.successors[v]
                .iter()
                .filter(|&&w| keep.contains(w))
                .map(|&w| local[w])
                .collect();
            if succ.is_empty() {
                return Err(GameError::NotClosed(v));
            }
            successors.push(succ);
        }
        let names = self
            .names
            .as_ref()
            .map(|names| original.iter().map(|&v| names[v].clone()).collect());
        let game = GameParts {
            owner: original.iter().map(|&v| self.owner[v]).collect(),
            priority: original.iter().map(|&v| self.priority[v]).collect(),
            successors,
            names,
            priority_count: None,
        }
        .build()?;
        Ok(Subgame { game, original })
    }
}

/// An induced subgame together with the ids its vertices had in the parent.
#[derive(Clone, Debug)]
pub struct Subgame {
    pub game: ParityGame,
    /// `original[i]` is the parent id of local vertex `i`.
    pub original: Vec<usize>,
}

/// Raw tables for a game, validated by [`GameParts::build`].
#[derive(Clone, Debug, Default)]
pub struct GameParts {
    pub owner: Vec<Player>,
    pub priority: Vec<u32>,
    pub successors: Vec<Vec<usize>>,
    pub names: Option<Vec<Option<String>>>,
    /// When set, every priority must lie below this bound.
    pub priority_count: Option<u32>,
}

impl GameParts {
    pub fn build(mut self) -> Result<ParityGame, GameError> {
        let n = self.owner.len();
        if n == 0 {
            return Err(GameError::Empty);
        }
        if self.priority.len() != n
            || self.successors.len() != n
            || self.names.as_ref().is_some_and(|names| names.len() != n)
        {
            return Err(GameError::LengthMismatch);
        }
        for (v, succ) in self.successors.iter_mut().enumerate() {
            if succ.is_empty() {
                return Err(GameError::VertexWithoutSuccessor(v));
            }
            if succ.iter().any(|&w| w >= n) {
                return Err(GameError::DanglingEdge(v));
            }
            succ.sort_unstable();
            succ.dedup();
        }
        let max_priority = self.priority.iter().copied().max().unwrap_or(0);
        let priority_count = match self.priority_count {
            Some(bound) => {
                if let Some(v) = self.priority.iter().position(|&p| p >= bound) {
                    return Err(GameError::PriorityOutOfRange(v));
                }
                bound
            }
            None => max_priority
                .checked_add(1)
                .ok_or(GameError::PriorityOutOfRange(
                    self.priority.iter().position(|&p| p == u32::MAX).unwrap_or(0),
                ))?,
        };
        let mut predecessors = vec![Vec::new(); n];
        for (v, succ) in self.successors.iter().enumerate() {
            for &w in succ {
                predecessors[w].push(v);
            }
        }
        let edge_count = self.successors.iter().map(Vec::len).sum();
        Ok(ParityGame {
            owner: self.owner,
            priority: self.priority,
            successors: self.successors,
            predecessors,
            names: self.names,
            priority_count,
            edge_count,
        })
    }

    /// Like [`GameParts::build`], but repairs vertices without successors by
    /// giving them a self-loop. A repaired sink is won by the player whose
    /// parity matches its own priority.
    pub fn build_with_self_loops(mut self) -> Result<ParityGame, GameError> {
        for (v, succ) in self.successors.iter_mut().enumerate() {
            if succ.is_empty() {
                succ.push(v);
            }
        }
        self.build()
    }
}
