//! Per-node and total clique counts for every order up to a cap.
//!
//! Edges are oriented along a degeneracy ordering and each clique is found
//! exactly once from its lowest-ranked node (the root). The out-neighborhood
//! of a root is at most the degeneracy in size, so its induced adjacency is
//! stored as bit rows and candidate sets are intersected a word at a time.
//! The deepest level is never expanded: the number of top-order cliques
//! through a prefix is a popcount over the candidate rows.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::ordering::{degeneracy_order, VertexOrdering};
use crate::scalar::binomial;

pub const DEFAULT_ORDER_CAP: usize = 8;

/// Largest graph the brute-force oracle accepts.
pub const BRUTE_FORCE_LIMIT: usize = 40;

/// Clique counts at one order `ℓ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueCounts {
    pub order: usize,
    /// Number of `order`-cliques containing each node.
    pub per_node: Vec<u64>,
    pub total: u64,
}

impl CliqueCounts {
    /// Checks `Σ per_node = order · total` and `per_node(u) ≤ C(d_u, order − 1)`.
    pub fn is_consistent(&self, g: &Graph) -> bool {
        let sum: u128 = self.per_node.iter().map(|&c| u128::from(c)).sum();
        if sum != self.order as u128 * u128::from(self.total) {
            return false;
        }
        self.per_node.iter().enumerate().all(|(u, &c)| match binomial(g.degree(u) as u64, self.order as u64 - 1) {
            Some(cap) => c <= cap,
            None => true,
        })
    }
}

#[derive(Clone, Debug)]
pub struct CliqueConfig {
    /// Worker threads; 1 runs on the calling thread, 0 uses the rayon default.
    pub threads: usize,
    /// Refuse to run when the work estimate exceeds this many operations.
    pub budget: Option<u128>,
    pub order_cap: usize,
}

impl Default for CliqueConfig {
    fn default() -> Self {
        CliqueConfig {
            threads: 0,
            budget: None,
            order_cap: DEFAULT_ORDER_CAP,
        }
    }
}

impl CliqueConfig {
    pub fn single_threaded() -> Self {
        CliqueConfig {
            threads: 1,
            ..Default::default()
        }
    }
}

/// Out-neighbor lists under an ordering, each sorted by rank.
struct Oriented {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
}

impl Oriented {
    fn new(g: &Graph, ordering: &VertexOrdering) -> Self {
        let rank = &ordering.rank;
        let mut offsets = Vec::with_capacity(g.n() + 1);
        let mut targets = Vec::with_capacity(g.m());
        offsets.push(0);
        for u in 0..g.n() {
            let start = targets.len();
            targets.extend(g.neighbors(u).iter().copied().filter(|&v| rank[v as usize] > rank[u]));
            targets[start..].sort_unstable_by_key(|&v| rank[v as usize]);
            offsets.push(targets.len());
        }
        Oriented { offsets, targets }
    }

    #[inline]
    fn out(&self, u: usize) -> &[NodeId] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }
}

/// Upper estimate of the bit-row operations needed to reach `max_order`:
/// one popcount pass per prefix of size `max_order − 2` inside each root's
/// out-neighborhood.
pub fn estimate_work(g: &Graph, ordering: &VertexOrdering, max_order: usize) -> u128 {
    let depth = max_order.saturating_sub(2) as i32;
    let mut total = 0f64;
    for u in 0..g.n() {
        let d = ordering.out_degree(g, u) as f64;
        let words = (d / 64.0).ceil().max(1.0);
        // C(d, depth) via a running product, good enough for an estimate.
        let mut c = 1f64;
        for i in 0..depth {
            c *= (d - f64::from(i)).max(0.0) / f64::from(i + 1);
        }
        total += c * words * (d + 1.0);
    }
    if total >= u128::MAX as f64 {
        u128::MAX
    } else {
        total as u128
    }
}

struct Accumulator {
    /// `per_node[s][u]` for clique size `s`; sizes 0 and 1 unused.
    per_node: Vec<Vec<u64>>,
    total: Vec<u64>,
    overflow: Option<usize>,
}

impl Accumulator {
    fn new(n: usize, max_order: usize) -> Self {
        let mut per_node = vec![Vec::new(); max_order + 1];
        for slot in per_node.iter_mut().skip(2) {
            *slot = vec![0u64; n];
        }
        Accumulator {
            per_node,
            total: vec![0; max_order + 1],
            overflow: None,
        }
    }

    #[inline]
    fn add(&mut self, size: usize, u: NodeId, by: u64) {
        let slot = &mut self.per_node[size][u as usize];
        let (v, o) = slot.overflowing_add(by);
        *slot = v;
        if o {
            self.overflow.get_or_insert(size);
        }
    }

    #[inline]
    fn add_total(&mut self, size: usize, by: u64) {
        let (v, o) = self.total[size].overflowing_add(by);
        self.total[size] = v;
        if o {
            self.overflow.get_or_insert(size);
        }
    }

    fn merge(mut self, other: Accumulator) -> Accumulator {
        for size in 2..self.total.len() {
            for (a, b) in self.per_node[size].iter_mut().zip(&other.per_node[size]) {
                let (v, o) = a.overflowing_add(*b);
                *a = v;
                if o {
                    self.overflow.get_or_insert(size);
                }
            }
            let total = self.total[size];
            self.total[size] = 0;
            self.add_total(size, total);
            self.add_total(size, other.total[size]);
        }
        if self.overflow.is_none() {
            self.overflow = other.overflow;
        }
        self
    }
}

#[inline]
fn and_popcount(a: &[u64], b: &[u64]) -> u64 {
    a.iter().zip(b).map(|(x, y)| u64::from((x & y).count_ones())).sum()
}

/// Per-root scratch space.
struct Worker<'g> {
    oriented: &'g Oriented,
    max_order: usize,
    /// Local index of each node in the current root's out-neighborhood.
    pos: Vec<u32>,
    local: Vec<NodeId>,
    words: usize,
    above: Vec<u64>,
    below: Vec<u64>,
    /// One candidate row per recursion depth.
    cands: Vec<u64>,
    /// Global ids of the clique under construction, root first.
    members: Vec<NodeId>,
}

impl<'g> Worker<'g> {
    fn new(n: usize, oriented: &'g Oriented, max_order: usize) -> Self {
        Worker {
            oriented,
            max_order,
            pos: vec![u32::MAX; n],
            local: Vec::new(),
            words: 0,
            above: Vec::new(),
            below: Vec::new(),
            cands: Vec::new(),
            members: Vec::with_capacity(max_order),
        }
    }

    fn process_root(&mut self, root: usize, acc: &mut Accumulator) {
        let out = self.oriented.out(root);
        let d = out.len();
        if d == 0 {
            return;
        }
        self.local.clear();
        self.local.extend_from_slice(out);
        for (i, &v) in out.iter().enumerate() {
            self.pos[v as usize] = i as u32;
        }
        let w = d.div_ceil(64);
        self.words = w;
        self.above.clear();
        self.above.resize(d * w, 0);
        self.below.clear();
        self.below.resize(d * w, 0);
        // `out` is sorted by rank, so out-neighbors of local node i that are
        // also local have a larger local index.
        for i in 0..d {
            let x = self.local[i] as usize;
            for &y in self.oriented.out(x) {
                let j = self.pos[y as usize];
                if j != u32::MAX {
                    let j = j as usize;
                    self.above[i * w + j / 64] |= 1 << (j % 64);
                    self.below[j * w + i / 64] |= 1 << (i % 64);
                }
            }
        }
        for &v in out {
            self.pos[v as usize] = u32::MAX;
        }

        self.cands.clear();
        self.cands.resize(self.max_order * w, 0);
        for j in 0..d {
            self.cands[j / 64] |= 1 << (j % 64);
        }
        self.members.clear();
        self.members.push(root as NodeId);
        self.extend(0, acc);
    }

    /// The current clique is `members` (size `depth + 1`) and `cands[depth]`
    /// holds the local nodes that extend it.
    fn extend(&mut self, depth: usize, acc: &mut Accumulator) {
        let w = self.words;
        let size = depth + 1;
        let row = depth * w;
        let count: u64 = self.cands[row..row + w].iter().map(|x| u64::from(x.count_ones())).sum();
        if count == 0 {
            return;
        }
        acc.add_total(size + 1, count);
        for &u in &self.members {
            acc.add(size + 1, u, count);
        }

        if size + 1 == self.max_order {
            for wi in 0..w {
                let mut word = self.cands[row + wi];
                while word != 0 {
                    let x = wi * 64 + word.trailing_zeros() as usize;
                    word &= word - 1;
                    acc.add(size + 1, self.local[x], 1);
                }
            }
            return;
        }

        if size + 2 == self.max_order {
            let top_size = self.max_order;
            let mut top = 0u64;
            let cand = &self.cands[row..row + w];
            for wi in 0..w {
                let mut word = cand[wi];
                while word != 0 {
                    let x = wi * 64 + word.trailing_zeros() as usize;
                    word &= word - 1;
                    let gx = self.local[x];
                    acc.add(size + 1, gx, 1);
                    let up = and_popcount(cand, &self.above[x * w..(x + 1) * w]);
                    let down = and_popcount(cand, &self.below[x * w..(x + 1) * w]);
                    top += up;
                    if up + down > 0 {
                        acc.add(top_size, gx, up + down);
                    }
                }
            }
            if top > 0 {
                acc.add_total(top_size, top);
                for &u in &self.members {
                    acc.add(top_size, u, top);
                }
            }
            return;
        }

        let next = row + w;
        for wi in 0..w {
            let mut word = self.cands[row + wi];
            while word != 0 {
                let x = wi * 64 + word.trailing_zeros() as usize;
                word &= word - 1;
                let gx = self.local[x];
                acc.add(size + 1, gx, 1);
                let (head, tail) = self.cands.split_at_mut(next);
                let cand = &head[row..];
                let above = &self.above[x * w..(x + 1) * w];
                let mut any = 0u64;
                for k in 0..w {
                    tail[k] = cand[k] & above[k];
                    any |= tail[k];
                }
                if any != 0 {
                    self.members.push(gx);
                    self.extend(depth + 1, acc);
                    self.members.pop();
                }
            }
        }
    }
}

/// Exact clique counts for every order `2..=max_order` in one enumeration
/// pass. Results do not depend on the thread count.
pub fn count_cliques(g: &Graph, max_order: usize, config: &CliqueConfig) -> Result<Vec<CliqueCounts>> {
    if max_order < 2 || max_order > config.order_cap {
        return Err(Error::OrderCap {
            requested: max_order,
            cap: config.order_cap,
        });
    }
    let ordering = degeneracy_order(g);
    if let Some(budget) = config.budget {
        let estimate = estimate_work(g, &ordering, max_order);
        if estimate > budget {
            return Err(Error::Budget { estimate, budget });
        }
    }
    let oriented = Oriented::new(g, &ordering);
    let n = g.n();

    let acc = if config.threads == 1 {
        let mut acc = Accumulator::new(n, max_order);
        let mut worker = Worker::new(n, &oriented, max_order);
        for root in 0..n {
            worker.process_root(root, &mut acc);
        }
        acc
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        let stripes = pool.current_num_threads().max(1);
        let oriented = &oriented;
        pool.install(|| {
            (0..stripes)
                .into_par_iter()
                .map(|stripe| {
                    let mut acc = Accumulator::new(n, max_order);
                    let mut worker = Worker::new(n, oriented, max_order);
                    for root in (stripe..n).step_by(stripes) {
                        worker.process_root(root, &mut acc);
                    }
                    acc
                })
                .reduce_with(Accumulator::merge)
                .unwrap_or_else(|| Accumulator::new(n, max_order))
        })
    };

    if let Some(order) = acc.overflow {
        return Err(Error::Overflow { order });
    }
    let Accumulator { per_node, total, .. } = acc;
    Ok(per_node
        .into_iter()
        .zip(total)
        .enumerate()
        .skip(2)
        .map(|(order, (per_node, total))| CliqueCounts { order, per_node, total })
        .collect())
}

/// Test oracle: checks every node subset of size `order` for pairwise adjacency.
pub fn brute_force_clique_counts(g: &Graph, order: usize) -> Result<CliqueCounts> {
    let n = g.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::OracleTooLarge {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    if order < 1 {
        return Err(Error::InvalidParameter("clique order must be positive".into()));
    }
    let masks: Vec<u64> = (0..n)
        .map(|u| g.neighbors(u).iter().fold(0u64, |m, &v| m | (1 << v)))
        .collect();
    let mut per_node = vec![0u64; n];
    let mut total = 0u64;
    if order <= n {
        let mut subset: Vec<usize> = (0..order).collect();
        loop {
            let clique = subset
                .iter()
                .enumerate()
                .all(|(i, &a)| subset[i + 1..].iter().all(|&b| masks[a] >> b & 1 == 1));
            if clique {
                total += 1;
                for &a in &subset {
                    per_node[a] += 1;
                }
            }
            // Advance to the next combination in lexicographic order.
            let mut i = order;
            loop {
                if i == 0 {
                    return Ok(CliqueCounts { order, per_node, total });
                }
                i -= 1;
                if subset[i] < n - order + i {
                    break;
                }
            }
            subset[i] += 1;
            for j in i + 1..order {
                subset[j] = subset[j - 1] + 1;
            }
        }
    }
    Ok(CliqueCounts { order, per_node, total })
}

/// Calls `visit` once per `order`-clique with its node ids in ascending order.
pub fn for_each_clique<F: FnMut(&[NodeId])>(g: &Graph, order: usize, mut visit: F) -> Result<()> {
    if order < 1 {
        return Err(Error::InvalidParameter("clique order must be positive".into()));
    }
    let ordering = degeneracy_order(g);
    let oriented = Oriented::new(g, &ordering);
    let mut clique: Vec<NodeId> = Vec::with_capacity(order);
    let mut sorted: Vec<NodeId> = Vec::with_capacity(order);

    fn rec<F: FnMut(&[NodeId])>(
        g: &Graph,
        cand: &[NodeId],
        order: usize,
        clique: &mut Vec<NodeId>,
        sorted: &mut Vec<NodeId>,
        visit: &mut F,
    ) {
        if clique.len() == order {
            sorted.clear();
            sorted.extend_from_slice(clique);
            sorted.sort_unstable();
            visit(sorted);
            return;
        }
        for (i, &x) in cand.iter().enumerate() {
            let next: Vec<NodeId> = cand[i + 1..]
                .iter()
                .copied()
                .filter(|&y| g.has_edge(x as usize, y as usize))
                .collect();
            if clique.len() + 1 + next.len() < order {
                continue;
            }
            clique.push(x);
            rec(g, &next, order, clique, sorted, visit);
            clique.pop();
        }
    }

    for root in 0..g.n() {
        clique.clear();
        clique.push(root as NodeId);
        let cand = oriented.out(root);
        if order == 1 {
            visit(&clique);
            continue;
        }
        if cand.len() + 1 < order {
            continue;
        }
        rec(g, cand, order, &mut clique, &mut sorted, &mut visit);
    }
    Ok(())
}

/// Writes one clique per line as space-separated internal ids.
pub fn write_cliques<W: Write>(g: &Graph, order: usize, mut out: W) -> Result<()> {
    let mut io_err = None;
    for_each_clique(g, order, |c| {
        if io_err.is_some() {
            return;
        }
        let line: Vec<String> = c.iter().map(|v| v.to_string()).collect();
        if let Err(e) = writeln!(out, "{}", line.join(" ")) {
            io_err = Some(e);
        }
    })?;
    if let Some(e) = io_err {
        return Err(e.into());
    }
    out.flush()?;
    Ok(())
}
