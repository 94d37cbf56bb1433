//! A small reduced ordered BDD package, just large enough to represent
//! vertex sets and compute predecessor images through a transition relation.
//!
//! Vertex ids are encoded in binary over `bits` current-state variables.
//! Current and next-state variables are interleaved: bit `k` of the current
//! state is variable `2k`, bit `k` of the next state is variable `2k + 1`,
//! with the most significant bit at the root. Nodes are never collected.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

pub const FALSE: NodeId = NodeId(0);
pub const TRUE: NodeId = NodeId(1);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Node {
    var: u32,
    low: NodeId,
    high: NodeId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Op {
    And,
    Or,
    AndNot,
}

#[derive(Debug)]
pub struct BddManager {
    nodes: Vec<Node>,
    unique: HashMap<Node, NodeId>,
    apply_cache: HashMap<(Op, NodeId, NodeId), NodeId>,
    relprod_cache: HashMap<(NodeId, NodeId), NodeId>,
    rename_cache: HashMap<NodeId, NodeId>,
    bits: u32,
}

impl BddManager {
    pub fn new(vertex_count: usize) -> BddManager {
        let bits = usize::BITS - vertex_count.saturating_sub(1).leading_zeros();
        let terminal = |v| Node {
            var: u32::MAX,
            low: NodeId(v),
            high: NodeId(v),
        };
        BddManager {
            nodes: vec![terminal(0), terminal(1)],
            unique: HashMap::new(),
            apply_cache: HashMap::new(),
            relprod_cache: HashMap::new(),
            rename_cache: HashMap::new(),
            bits: bits.max(1),
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn var(&self, n: NodeId) -> u32 {
        self.nodes[n.0 as usize].var
    }

    fn mk(&mut self, var: u32, low: NodeId, high: NodeId) -> NodeId {
        if low == high {
            return low;
        }
        let node = Node { var, low, high };
        if let Some(&id) = self.unique.get(&node) {
            return id;
        }
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(node);
        self.unique.insert(node, id);
        id
    }

    /// Variable that carries bit `k` (0 = least significant) of the current state.
    fn current_var(&self, k: u32) -> u32 {
        2 * (self.bits - 1 - k)
    }

    /// Conjunction of literals encoding `id` over current (or next) variables.
    fn cube(&mut self, id: usize, next: bool) -> NodeId {
        let mut acc = TRUE;
        for k in 0..self.bits {
            let var = self.current_var(k) + u32::from(next);
            acc = if (id >> k) & 1 == 1 {
                self.mk(var, FALSE, acc)
            } else {
                self.mk(var, acc, FALSE)
            };
        }
        acc
    }

    pub fn singleton(&mut self, id: usize) -> NodeId {
        self.cube(id, false)
    }

    pub fn from_bits(&mut self, set: &FixedBitSet) -> NodeId {
        let ids: Vec<usize> = set.ones().collect();
        self.build_sorted(&ids, 0)
    }

    /// Builds the set of `ids` (sorted, all agreeing on the bits above
    /// `depth`) top-down.
    fn build_sorted(&mut self, ids: &[usize], depth: u32) -> NodeId {
        if ids.is_empty() {
            return FALSE;
        }
        if depth == self.bits {
            return TRUE;
        }
        let k = self.bits - 1 - depth;
        let split = ids.partition_point(|&v| (v >> k) & 1 == 0);
        let low = self.build_sorted(&ids[..split], depth + 1);
        let high = self.build_sorted(&ids[split..], depth + 1);
        let var = self.current_var(k);
        self.mk(var, low, high)
    }

    /// Relation `{(v, w) | w ∈ succ(v)}` over current/next variables.
    pub fn relation(&mut self, successors: impl Iterator<Item = (usize, usize)>) -> NodeId {
        let mut acc = FALSE;
        for (v, w) in successors {
            let a = self.cube(v, false);
            let b = self.cube(w, true);
            let edge = self.and(a, b);
            acc = self.or(acc, edge);
        }
        acc
    }

    pub fn contains(&self, mut n: NodeId, id: usize) -> bool {
        while n != TRUE && n != FALSE {
            let node = self.nodes[n.0 as usize];
            let k = self.bits - 1 - node.var / 2;
            n = if (id >> k) & 1 == 1 { node.high } else { node.low };
        }
        n == TRUE
    }

    pub fn to_bits(&self, n: NodeId, universe: usize) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(universe);
        for v in 0..universe {
            if self.contains(n, v) {
                out.insert(v);
            }
        }
        out
    }

    pub fn and(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.apply(Op::And, a, b)
    }

    pub fn or(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.apply(Op::Or, a, b)
    }

    pub fn and_not(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.apply(Op::AndNot, a, b)
    }

    fn apply(&mut self, op: Op, a: NodeId, b: NodeId) -> NodeId {
        match op {
            Op::And => {
                if a == FALSE || b == FALSE {
                    return FALSE;
                }
                if a == TRUE {
                    return b;
                }
                if b == TRUE || a == b {
                    return a;
                }
            }
            Op::Or => {
                if a == TRUE || b == TRUE {
                    return TRUE;
                }
                if a == FALSE {
                    return b;
                }
                if b == FALSE || a == b {
                    return a;
                }
            }
            Op::AndNot => {
                if a == FALSE || b == TRUE || a == b {
                    return FALSE;
                }
                if b == FALSE {
                    return a;
                }
            }
        }
        let key = match op {
            Op::And | Op::Or if b < a => (op, b, a),
            _ => (op, a, b),
        };
        if let Some(&r) = self.apply_cache.get(&key) {
            return r;
        }
        let (va, vb) = (self.var(a), self.var(b));
        let var = va.min(vb);
        let (a0, a1) = self.cofactors(a, var);
        let (b0, b1) = self.cofactors(b, var);
        let low = self.apply(op, a0, b0);
        let high = self.apply(op, a1, b1);
        let r = self.mk(var, low, high);
        self.apply_cache.insert(key, r);
        r
    }

    fn cofactors(&self, n: NodeId, var: u32) -> (NodeId, NodeId) {
        let node = self.nodes[n.0 as usize];
        if node.var == var {
            (node.low, node.high)
        } else {
            (n, n)
        }
    }

    /// Moves a set over current-state variables onto the next-state ones.
    /// The interleaved order makes this a structural copy.
    fn to_next(&mut self, n: NodeId) -> NodeId {
        if n == TRUE || n == FALSE {
            return n;
        }
        if let Some(&r) = self.rename_cache.get(&n) {
            return r;
        }
        let node = self.nodes[n.0 as usize];
        let low = self.to_next(node.low);
        let high = self.to_next(node.high);
        let r = self.mk(node.var + 1, low, high);
        self.rename_cache.insert(n, r);
        r
    }

    /// `∃ next. rel(cur, next) ∧ target(next)`: the predecessor image.
    pub fn pre_image(&mut self, rel: NodeId, target: NodeId) -> NodeId {
        let shifted = self.to_next(target);
        self.relprod(rel, shifted)
    }

    fn relprod(&mut self, a: NodeId, b: NodeId) -> NodeId {
        if a == FALSE || b == FALSE {
            return FALSE;
        }
        if a == TRUE && b == TRUE {
            return TRUE;
        }
        if let Some(&r) = self.relprod_cache.get(&(a, b)) {
            return r;
        }
        let var = self.var(a).min(self.var(b));
        let (a0, a1) = self.cofactors(a, var);
        let (b0, b1) = self.cofactors(b, var);
        let r = if var % 2 == 1 {
            let low = self.relprod(a0, b0);
            if low == TRUE {
                TRUE
            } else {
                let high = self.relprod(a1, b1);
                self.or(low, high)
            }
        } else {
            let low = self.relprod(a0, b0);
            let high = self.relprod(a1, b1);
            self.mk(var, low, high)
        };
        self.relprod_cache.insert((a, b), r);
        r
    }
}
