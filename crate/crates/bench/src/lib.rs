//! Game families shared by the benchmarks.

use symparity::generate::gen_random;
use symparity::ParityGame;

/// `count` seeded random games with `n` vertices, `c` priorities and
/// out-degree 1..=3.
pub fn random_family(n: usize, c: u32, count: u64) -> Vec<ParityGame> {
    (0..count)
        .map(|seed| gen_random(n, c, 1, n.min(3), seed).expect("valid parameters"))
        .collect()
}
