//! Seeded random games.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::game::{ParityGame, Player};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("need at least one vertex")]
    NoVertices,
    #[error("need at least one priority")]
    NoPriorities,
    #[error("degree range {0}..={1} is not within 1..={2}")]
    Degree(usize, usize, usize),
}

/// A game with uniform owners and priorities, out-degrees uniform in
/// `min_deg..=max_deg` to distinct targets, then normalized.
pub fn gen_random(n: usize, c: u32, min_deg: usize, max_deg: usize, seed: u64) -> Result<ParityGame, GenError> {
    if n == 0 {
        return Err(GenError::NoVertices);
    }
    if c == 0 {
        return Err(GenError::NoPriorities);
    }
    if min_deg == 0 || min_deg > max_deg || max_deg > n {
        return Err(GenError::Degree(min_deg, max_deg, n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut owner = Vec::with_capacity(n);
    let mut priority = Vec::with_capacity(n);
    let mut successors = Vec::with_capacity(n);
    for _ in 0..n {
        owner.push(if rng.gen_bool(0.5) { Player::Odd } else { Player::Even });
        priority.push(rng.gen_range(0..c));
        let deg = rng.gen_range(min_deg..=max_deg);
        successors.push(sample(&mut rng, n, deg).into_vec());
    }
    let game = ParityGame::new(owner, priority, successors).expect("generated games are well formed");
    Ok(game.normalize_priorities().0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let a = gen_random(8, 5, 1, 3, 42).unwrap();
        let b = gen_random(8, 5, 1, 3, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, gen_random(8, 5, 1, 3, 43).unwrap());
    }

    #[test]
    fn shape() {
        for seed in 0..50 {
            let g = gen_random(10, 6, 1, 3, seed).unwrap();
            assert!(g.is_normalized());
            assert!(g.priority_count() <= 6);
            for v in g.vertices() {
                assert!((1..=3).contains(&g.successors(v).len()));
            }
        }
    }

    #[test]
    fn bad_parameters() {
        assert_eq!(gen_random(0, 3, 1, 1, 0), Err(GenError::NoVertices));
        assert_eq!(gen_random(3, 0, 1, 1, 0), Err(GenError::NoPriorities));
        assert_eq!(gen_random(3, 2, 2, 4, 0), Err(GenError::Degree(2, 4, 3)));
        assert_eq!(gen_random(3, 2, 0, 1, 0), Err(GenError::Degree(0, 1, 3)));
    }
}
