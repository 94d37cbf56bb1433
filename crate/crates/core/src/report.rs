use std::collections::BTreeMap;
use std::fmt;
use std::time::Duration;

use fixedbitset::FixedBitSet;

use crate::bigstep::Policy;
use crate::strategy::Strategy;
use crate::symbolic::OpCounters;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Explicit,
    ProgressMeasure,
    Zielonka,
    BigStep(Policy),
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::Explicit => f.write_str("explicit"),
            Algorithm::ProgressMeasure => f.write_str("pm"),
            Algorithm::Zielonka => f.write_str("zielonka"),
            Algorithm::BigStep(p) => write!(f, "bigstep/{p}"),
        }
    }
}

/// One removal step of a recursion level, for checking the big-step
/// progress guarantee.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelIteration {
    /// Sequence number of the level invocation this iteration belongs to.
    pub level: usize,
    pub depth: u32,
    pub priority_count: u32,
    /// `None` when no dominion search ran at this level.
    pub h: Option<u32>,
    pub removed: usize,
    pub last: bool,
    /// Vertices of the level when it was entered.
    pub level_size: usize,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub winning_even: FixedBitSet,
    pub winning_odd: FixedBitSet,
    pub strategy_even: Option<Strategy>,
    pub strategy_odd: Option<Strategy>,
    pub counters: OpCounters,
    pub wall_time: Duration,
    pub iterations: Vec<LevelIteration>,
}

impl SolveReport {
    pub fn vertex_count(&self) -> usize {
        self.winning_even.len()
    }

    /// The two winning sets are disjoint and cover every vertex.
    pub fn is_partition(&self) -> bool {
        self.winning_even.is_disjoint(&self.winning_odd)
            && self.winning_even.count_ones(..) + self.winning_odd.count_ones(..) == self.vertex_count()
    }

    /// Big-step iterations that removed fewer than `h + 2` vertices without
    /// being the last of their level, and the last iterations of levels that
    /// ran more than `⌊n/(h+2)⌋ + 1` times.
    pub fn progress_violations(&self) -> Vec<&LevelIteration> {
        let mut per_level: BTreeMap<usize, usize> = BTreeMap::new();
        for it in &self.iterations {
            *per_level.entry(it.level).or_default() += 1;
        }
        self.iterations
            .iter()
            .filter(|it| match it.h {
                Some(h) => {
                    let bound = it.level_size / (h as usize + 2) + 1;
                    (!it.last && it.removed < h as usize + 2) || (it.last && per_level[&it.level] > bound)
                }
                None => false,
            })
            .collect()
    }
}

/// A report plus whatever the optional self-checks and tracing produced.
#[derive(Clone, Debug)]
pub struct SolveRun {
    pub report: SolveReport,
    /// Failed self-checks; empty unless checking was requested.
    pub checks: Vec<String>,
    /// Progress-measure iteration log, when tracing was requested.
    pub trace: Vec<String>,
}
