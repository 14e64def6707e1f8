//! Vertex orderings used to orient edges for clique enumeration.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::graph::{Graph, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderingKind {
    Degeneracy,
    Degree,
    Input,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexOrdering {
    /// `order[i]` is the node placed at position `i`.
    pub order: Vec<NodeId>,
    /// Inverse of `order`: `rank[u]` is the position of node `u`.
    pub rank: Vec<u32>,
    pub kind: OrderingKind,
    /// Largest remaining degree seen at removal time (degeneracy orderings only).
    pub degeneracy: Option<usize>,
}

impl VertexOrdering {
    fn from_order(order: Vec<NodeId>, kind: OrderingKind, degeneracy: Option<usize>) -> Self {
        let mut rank = vec![0u32; order.len()];
        for (pos, &u) in order.iter().enumerate() {
            rank[u as usize] = pos as u32;
        }
        VertexOrdering {
            order,
            rank,
            kind,
            degeneracy,
        }
    }

    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.order.len()];
        for &u in &self.order {
            let u = u as usize;
            if u >= seen.len() || seen[u] {
                return false;
            }
            seen[u] = true;
        }
        true
    }

    /// Number of neighbors of `u` placed after it.
    pub fn out_degree(&self, g: &Graph, u: usize) -> usize {
        let r = self.rank[u];
        g.neighbors(u).iter().filter(|&&v| self.rank[v as usize] > r).count()
    }
}

/// Repeatedly removes a minimum-degree node; ties go to the smallest id.
pub fn degeneracy_order(g: &Graph) -> VertexOrdering {
    let n = g.n();
    let mut degree: Vec<usize> = g.degrees();
    let mut removed = vec![false; n];
    let mut heap: BinaryHeap<Reverse<(usize, NodeId)>> =
        (0..n).map(|u| Reverse((degree[u], u as NodeId))).collect();
    let mut order = Vec::with_capacity(n);
    let mut degeneracy = 0;
    while let Some(Reverse((d, u))) = heap.pop() {
        let ui = u as usize;
        if removed[ui] || d != degree[ui] {
            continue;
        }
        removed[ui] = true;
        degeneracy = degeneracy.max(d);
        order.push(u);
        for &v in g.neighbors(ui) {
            let vi = v as usize;
            if !removed[vi] {
                degree[vi] -= 1;
                heap.push(Reverse((degree[vi], v)));
            }
        }
    }
    VertexOrdering::from_order(order, OrderingKind::Degeneracy, Some(degeneracy))
}

/// Ascending degree, ties by id.
pub fn degree_order(g: &Graph) -> VertexOrdering {
    let mut order: Vec<NodeId> = (0..g.n() as NodeId).collect();
    order.sort_by_key(|&u| (g.degree(u as usize), u));
    VertexOrdering::from_order(order, OrderingKind::Degree, None)
}

pub fn input_order(g: &Graph) -> VertexOrdering {
    VertexOrdering::from_order((0..g.n() as NodeId).collect(), OrderingKind::Input, None)
}
