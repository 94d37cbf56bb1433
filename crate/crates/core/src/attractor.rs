//! Attractors and traps.

use crate::game::Player;
use crate::symbolic::{Symbolic, VertexSet};

#[derive(Debug)]
pub struct AttractorResult {
    pub attractor: VertexSet,
    /// `Z_0 ⊆ Z_1 ⊆ ...`, recorded only when a strategy was requested.
    pub layers: Vec<VertexSet>,
    /// Choices for the attracting player's vertices outside the target.
    pub strategy: Vec<(usize, usize)>,
}

/// Least fixed point of `X ↦ target ∪ cpre(player, X)` inside `arena`.
/// `target` must lie inside `arena`. With `want_strategy`, every vertex the
/// player owns in a new layer is sent to a vertex of the previous layer,
/// found with one `pre` per vertex of that layer.
pub fn attractor(
    sym: &Symbolic,
    player: Player,
    target: &VertexSet,
    arena: &VertexSet,
    want_strategy: bool,
) -> AttractorResult {
    let owned = want_strategy.then(|| sym.owned_by(player));
    let mut current = target.clone();
    let mut fresh = target.clone();
    let mut layers = Vec::new();
    let mut strategy = Vec::new();
    loop {
        if want_strategy {
            layers.push(current.clone());
        }
        let next = sym.union(&current, &sym.cpre_in(player, &current, arena));
        let added = sym.difference(&next, &current);
        if sym.is_empty(&added) {
            break;
        }
        if let Some(owned) = &owned {
            let mut todo = sym.intersect(&added, owned);
            for v in sym.members(&fresh) {
                if sym.is_empty(&todo) {
                    break;
                }
                let hit = sym.intersect(&sym.pre(&sym.singleton(v)), &todo);
                for u in sym.members(&hit) {
                    strategy.push((u, v));
                }
                todo = sym.difference(&todo, &hit);
            }
        }
        current = next;
        fresh = added;
    }
    AttractorResult {
        attractor: current,
        layers,
        strategy,
    }
}

/// `set` is a trap for `player`: it is contained in the opponent's
/// controllable predecessor of itself.
pub fn is_trap(sym: &Symbolic, player: Player, set: &VertexSet) -> bool {
    sym.is_subset(set, &sym.cpre(player.opponent(), set))
}
