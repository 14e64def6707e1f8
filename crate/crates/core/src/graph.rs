//! Immutable undirected simple graphs in compressed sparse row form.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Internal node identifier. Ids are contiguous in `0..n`.
pub type NodeId = u32;

/// Undirected simple graph with strictly sorted adjacency lists.
///
/// Node ids are contiguous; the original identifiers read from an edge list
/// are kept as labels so output can refer back to the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
    labels: Option<Vec<String>>,
}

#[derive(Clone, Copy, Debug)]
pub struct LoadOptions {
    /// Collapse repeated edges. When off, a repeated edge is an error.
    pub dedupe: bool,
    /// Discard `u u` lines. When off, a self-loop is an error.
    pub drop_self_loops: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            dedupe: true,
            drop_self_loops: true,
        }
    }
}

impl Graph {
    /// Builds a graph on `n` nodes from an edge iterator. Self-loops and
    /// repeated edges (in either direction) are discarded.
    pub fn from_edges<I>(n: usize, edges: I) -> Graph
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut pairs: Vec<(NodeId, NodeId)> = edges
            .into_iter()
            .filter(|&(u, v)| u != v)
            .map(|(u, v)| {
                assert!(u < n && v < n, "edge ({u}, {v}) out of range for n = {n}");
                if u < v {
                    (u as NodeId, v as NodeId)
                } else {
                    (v as NodeId, u as NodeId)
                }
            })
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        Self::from_sorted_pairs(n, &pairs, None)
    }

    /// `pairs` must be sorted, deduplicated and satisfy `u < v`.
    fn from_sorted_pairs(n: usize, pairs: &[(NodeId, NodeId)], labels: Option<Vec<String>>) -> Graph {
        let mut degree = vec![0usize; n];
        for &(u, v) in pairs {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor: Vec<usize> = offsets[..n].to_vec();
        let mut neighbors = vec![0 as NodeId; offsets[n]];
        // Pairs arrive sorted by (u, v), so every list is filled in ascending order.
        for &(u, v) in pairs {
            neighbors[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            neighbors[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        Graph {
            offsets,
            neighbors,
            labels,
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Graph {
        assert_eq!(labels.len(), self.n(), "one label per node");
        self.labels = Some(labels);
        self
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn m(&self) -> usize {
        self.neighbors.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, u: usize) -> &[NodeId] {
        &self.neighbors[self.offsets[u]..self.offsets[u + 1]]
    }

    #[inline]
    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n()).map(|u| self.degree(u)).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) { (u, v) } else { (v, u) };
        self.neighbors(a).binary_search(&(b as NodeId)).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in id order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| (v as usize) > u)
                .map(move |&v| (u, v as usize))
        })
    }

    /// Explicit labels, when the graph was loaded from a file or relabeled.
    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, u: usize) -> String {
        match &self.labels {
            Some(labels) => labels[u].clone(),
            None => u.to_string(),
        }
    }

    /// Degree multiset as a sorted vector.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d = self.degrees();
        d.sort_unstable();
        d
    }

    /// Graph induced on the neighbors of `u`, excluding `u` itself. Local id
    /// `i` corresponds to the `i`-th entry of `neighbors(u)`; labels carry over.
    pub fn neighborhood_subgraph(&self, u: usize) -> Graph {
        let hood = self.neighbors(u);
        let mut pairs = Vec::new();
        for (i, &v) in hood.iter().enumerate() {
            let adj_v = self.neighbors(v as usize);
            // Both lists are sorted; walk them together, keeping only w > v.
            let (mut a, mut b) = (i + 1, adj_v.partition_point(|&w| w <= v));
            while a < hood.len() && b < adj_v.len() {
                match hood[a].cmp(&adj_v[b]) {
                    std::cmp::Ordering::Less => a += 1,
                    std::cmp::Ordering::Greater => b += 1,
                    std::cmp::Ordering::Equal => {
                        pairs.push((i as NodeId, a as NodeId));
                        a += 1;
                        b += 1;
                    }
                }
            }
        }
        pairs.sort_unstable();
        let labels = hood.iter().map(|&v| self.label(v as usize)).collect();
        Self::from_sorted_pairs(hood.len(), &pairs, Some(labels))
    }

    /// Disjoint union; nodes of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.n();
        let edges: Vec<_> = self
            .edges()
            .chain(other.edges().map(|(u, v)| (u + shift, v + shift)))
            .collect();
        Graph::from_edges(shift + other.n(), edges)
    }

    /// Checks the structural invariants: sorted, symmetric, loop-free lists.
    pub fn validate(&self) -> bool {
        for u in 0..self.n() {
            let adj = self.neighbors(u);
            if adj.windows(2).any(|w| w[0] >= w[1]) {
                return false;
            }
            for &v in adj {
                if v as usize == u || self.neighbors(v as usize).binary_search(&(u as NodeId)).is_err() {
                    return false;
                }
            }
        }
        self.neighbors.len().is_multiple_of(2)
    }
}

/// Reads a whitespace-separated edge list. Lines starting with `#` or `%`
/// are comments, blank lines are skipped. Directed input is symmetrized.
pub fn load_edge_list<R: BufRead>(source: R, options: LoadOptions) -> Result<Graph> {
    let mut ids: HashMap<String, NodeId> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut pairs: Vec<(NodeId, NodeId)> = Vec::new();
    let mut first_line: HashMap<(NodeId, NodeId), usize> = HashMap::new();

    let mut intern = |token: &str, ids: &mut HashMap<String, NodeId>| -> NodeId {
        if let Some(&id) = ids.get(token) {
            return id;
        }
        let id = labels.len() as NodeId;
        labels.push(token.to_string());
        ids.insert(token.to_string(), id);
        id
    };

    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: lineno,
                found: tokens.len(),
            });
        }
        let u = intern(tokens[0], &mut ids);
        let v = intern(tokens[1], &mut ids);
        if u == v {
            if !options.drop_self_loops {
                return Err(Error::SelfLoop {
                    line: lineno,
                    label: tokens[0].to_string(),
                });
            }
            continue;
        }
        let key = (u.min(v), u.max(v));
        if !options.dedupe && first_line.insert(key, lineno).is_some() {
            return Err(Error::DuplicateEdge {
                line: lineno,
                u: tokens[0].to_string(),
                v: tokens[1].to_string(),
            });
        }
        pairs.push(key);
    }
    if pairs.is_empty() {
        return Err(Error::EmptyGraph);
    }
    pairs.sort_unstable();
    pairs.dedup();
    Ok(Graph::from_sorted_pairs(labels.len(), &pairs, Some(labels)))
}

/// Writes one `u v` line per edge using the original labels, in internal id
/// order, LF-terminated. Degree-0 nodes are written as `u u` so that reloading
/// keeps them.
pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> std::io::Result<()> {
    for u in 0..g.n() {
        let lu = g.label(u);
        if g.degree(u) == 0 {
            writeln!(out, "{lu} {lu}")?;
            continue;
        }
        for &v in g.neighbors(u) {
            if v as usize > u {
                writeln!(out, "{} {}", lu, g.label(v as usize))?;
            }
        }
    }
    out.flush()
}
