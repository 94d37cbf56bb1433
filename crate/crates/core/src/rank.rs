//! Rank arithmetic for progress measures.
//!
//! A rank is either `Top` or a vector of counters, one per odd priority
//! `1, 3, 5, ...` below `c`. Even positions are identically zero and not
//! stored; all public functions still take priorities (`ell`) in full-index
//! terms. Vectors compare lexicographically with the highest odd index most
//! significant, and `Top` is above every vector.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::game::ParityGame;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RankError {
    #[error("domain size exceeds 128 bits")]
    Overflow,
}

/// Whether counter vectors are limited by the sum of their entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bound {
    /// Every vector with `x_i <= n_i`.
    Full,
    /// Vectors whose entries additionally sum to at most `h`.
    Bounded(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rank {
    Vector(Vec<u32>),
    Top,
}

impl Rank {
    pub fn is_top(&self) -> bool {
        matches!(self, Rank::Top)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Rank::Vector(x) if x.iter().all(|&c| c == 0))
    }

    /// Counter at odd priority `i`.
    pub fn counter(&self, i: u32) -> Option<u32> {
        match self {
            Rank::Vector(x) => x.get(slot(i)).copied(),
            Rank::Top => None,
        }
    }

    /// `⟨r⟩_ell`: zero every counter below priority `ell`.
    pub fn project(&self, ell: u32) -> Rank {
        match self {
            Rank::Top => Rank::Top,
            Rank::Vector(x) => {
                let mut y = x.clone();
                for s in 0..first_slot_at(ell).min(y.len()) {
                    y[s] = 0;
                }
                Rank::Vector(y)
            }
        }
    }

    /// Largest `ell` with `⟨r⟩_ell = r` (the lowest nonzero odd position),
    /// or `c` for the zero vector.
    pub fn lowest_active(&self, c: u32) -> u32 {
        match self {
            Rank::Top => 0,
            Rank::Vector(x) => x
                .iter()
                .position(|&v| v > 0)
                .map_or(c, |s| 2 * s as u32 + 1),
        }
    }
}

impl Ord for Rank {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Rank::Top, Rank::Top) => Ordering::Equal,
            (Rank::Top, _) => Ordering::Greater,
            (_, Rank::Top) => Ordering::Less,
            (Rank::Vector(x), Rank::Vector(y)) => x.iter().rev().cmp(y.iter().rev()),
        }
    }
}

impl PartialOrd for Rank {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank::Top => f.write_str("TOP"),
            Rank::Vector(x) => {
                f.write_str("(")?;
                for (i, v) in x.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Slot of odd priority `i`.
fn slot(i: u32) -> usize {
    debug_assert!(i % 2 == 1);
    (i / 2) as usize
}

/// First slot whose priority is at least `ell`.
fn first_slot_at(ell: u32) -> usize {
    (ell / 2) as usize
}

/// `<_ell`: compare after projecting both ranks to `ell`.
pub fn compare_at(a: &Rank, b: &Rank, ell: u32) -> Ordering {
    a.project(ell).cmp(&b.project(ell))
}

/// The codomain of a progress measure.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RankDomain {
    priority_count: u32,
    caps: Vec<u32>,
    bound: Bound,
}

impl RankDomain {
    /// `caps[k]` is `n_{2k+1}`; there must be one per odd priority below `c`.
    pub fn new(priority_count: u32, caps: Vec<u32>, bound: Bound) -> RankDomain {
        assert_eq!(caps.len(), (priority_count / 2) as usize, "one cap per odd priority");
        RankDomain {
            priority_count,
            caps,
            bound,
        }
    }

    /// Caps `n_i = |P_i|` read off the game.
    pub fn for_game(game: &ParityGame, bound: Bound) -> RankDomain {
        let sizes = game.priority_sizes();
        let caps = sizes.iter().skip(1).step_by(2).map(|&s| s as u32).collect();
        RankDomain::new(game.priority_count(), caps, bound)
    }

    pub fn priority_count(&self) -> u32 {
        self.priority_count
    }

    pub fn caps(&self) -> &[u32] {
        &self.caps
    }

    pub fn bound(&self) -> Bound {
        self.bound
    }

    /// Number of odd positions.
    pub fn width(&self) -> usize {
        self.caps.len()
    }

    fn budget(&self) -> u64 {
        match self.bound {
            Bound::Full => u64::MAX,
            Bound::Bounded(h) => h as u64,
        }
    }

    pub fn zero(&self) -> Rank {
        Rank::Vector(vec![0; self.width()])
    }

    pub fn contains(&self, r: &Rank) -> bool {
        match r {
            Rank::Top => true,
            Rank::Vector(x) => {
                x.len() == self.width()
                    && x.iter().zip(&self.caps).all(|(v, cap)| v <= cap)
                    && x.iter().map(|&v| v as u64).sum::<u64>() <= self.budget()
            }
        }
    }

    /// Exact number of ranks, `Top` included.
    pub fn size(&self) -> Result<u128, RankError> {
        match self.bound {
            Bound::Full => self
                .caps
                .iter()
                .try_fold(1u128, |acc, &cap| acc.checked_mul(cap as u128 + 1))
                .and_then(|p| p.checked_add(1))
                .ok_or(RankError::Overflow),
            Bound::Bounded(h) => {
                // ways[s] = vectors over the slots seen so far with sum s.
                let h = h as usize;
                let mut ways = vec![0u128; h + 1];
                ways[0] = 1;
                for &cap in &self.caps {
                    let mut next = vec![0u128; h + 1];
                    for (s, &w) in ways.iter().enumerate() {
                        if w == 0 {
                            continue;
                        }
                        for x in 0..=(cap as usize).min(h - s) {
                            next[s + x] = next[s + x].checked_add(w).ok_or(RankError::Overflow)?;
                        }
                    }
                    ways = next;
                }
                ways.iter()
                    .try_fold(1u128, |acc, &w| acc.checked_add(w))
                    .ok_or(RankError::Overflow)
            }
        }
    }

    /// The largest vector with zeros below priority `ell`, filled greedily
    /// from the most significant counter down.
    fn max_from(&self, ell: u32) -> Vec<u32> {
        let mut x = vec![0; self.width()];
        let mut left = self.budget();
        for s in (first_slot_at(ell)..self.width()).rev() {
            let v = (self.caps[s] as u64).min(left);
            x[s] = v as u32;
            left -= v;
        }
        x
    }

    /// Largest vector in the domain (`N̄`, or its sum-bounded analogue).
    pub fn max_vector(&self) -> Rank {
        Rank::Vector(self.max_from(0))
    }

    /// `incr_ell`: for even `ell` the projection, for odd `ell` the least
    /// rank strictly above in `<_ell`.
    pub fn incr_at(&self, r: &Rank, ell: u32) -> Rank {
        let x = match r {
            Rank::Top => return Rank::Top,
            Rank::Vector(x) => x,
        };
        let mut y = r.project(ell);
        if ell % 2 == 0 {
            return y;
        }
        let Rank::Vector(ref mut y_vec) = y else { unreachable!() };
        debug_assert_eq!(x.len(), self.width());
        // Carry with skip: bump the lowest admissible counter at or above
        // `ell`, clearing everything below it.
        let mut below_sum: u64 = y_vec.iter().map(|&v| v as u64).sum();
        for s in first_slot_at(ell)..self.width() {
            below_sum -= y_vec[s] as u64;
            let candidate = y_vec[s] + 1;
            if candidate <= self.caps[s] && below_sum + candidate as u64 <= self.budget() {
                y_vec[s] = candidate;
                return y;
            }
            y_vec[s] = 0;
        }
        Rank::Top
    }

    /// `decr_ell`: `0̄` when `⟨r⟩_ell = 0̄`, otherwise the least rank whose
    /// `ell`-increment is `⟨r⟩_ell`. For even `ell` this is the projection.
    pub fn decr_at(&self, r: &Rank, ell: u32) -> Rank {
        if ell % 2 == 0 {
            return match r {
                Rank::Top => Rank::Top,
                _ => r.project(ell),
            };
        }
        let start = first_slot_at(ell);
        match r.project(ell) {
            Rank::Top => Rank::Vector(self.max_from(ell)),
            Rank::Vector(mut x) => {
                let Some(j) = (start..self.width()).find(|&s| x[s] > 0) else {
                    return self.zero();
                };
                x[j] -= 1;
                let mut left = self.budget() - x.iter().map(|&v| v as u64).sum::<u64>();
                for s in (start..j).rev() {
                    let v = (self.caps[s] as u64).min(left);
                    x[s] = v as u32;
                    left -= v;
                }
                Rank::Vector(x)
            }
        }
    }

    /// Successor in the domain; `incr(Top) = Top`.
    pub fn incr(&self, r: &Rank) -> Rank {
        if self.width() == 0 {
            return Rank::Top;
        }
        self.incr_at(r, 1)
    }

    /// Predecessor in the domain; `decr(0̄) = 0̄`.
    pub fn decr(&self, r: &Rank) -> Rank {
        match r {
            Rank::Top => self.max_vector(),
            Rank::Vector(_) if self.width() == 0 => self.zero(),
            Rank::Vector(_) => self.decr_at(r, 1),
        }
    }

    /// All ranks in increasing order, ending with `Top`.
    pub fn iter(&self) -> impl Iterator<Item = Rank> + '_ {
        let mut next = Some(self.zero());
        std::iter::from_fn(move || {
            let current = next.take()?;
            if !current.is_top() {
                next = Some(self.incr(&current));
            }
            Some(current)
        })
    }

    /// Parses the `(x_1,x_3,...)` / `TOP` notation.
    pub fn parse_rank(&self, text: &str) -> Option<Rank> {
        let text = text.trim();
        if text.eq_ignore_ascii_case("top") {
            return Some(Rank::Top);
        }
        let inner = text.strip_prefix('(')?.strip_suffix(')')?;
        let x: Vec<u32> = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner.split(',').map(|t| t.trim().parse().ok()).collect::<Option<_>>()?
        };
        let r = Rank::Vector(x);
        self.contains(&r).then_some(r)
    }
}
