//! Seeded random-graph generators and the extremal neighborhood families.

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{seeded, Rng};

/// Draws for a rewiring target before the edge is left in place.
pub const REWIRE_RETRIES: usize = 1000;

/// A generator and its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum GenSpec {
    Gnp { n: usize, p: f64, seed: u64 },
    Ring { n: usize, k: usize },
    SmallWorld { n: usize, k: usize, p: f64, seed: u64 },
    /// Hub whose neighborhood is complete `(ℓ−1)`-partite with equal parts.
    MultipartiteHood { order: usize, part_size: usize },
    /// Hub whose neighborhood is a `c`-clique plus `b` isolated nodes.
    CliqueStarHood { c: usize, b: usize },
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            GenSpec::Gnp { n, p, .. } => {
                if n == 0 {
                    return bad("gnp needs n >= 1".into());
                }
                check_probability(p)
            }
            GenSpec::Ring { n, k } => check_ring(n, k),
            GenSpec::SmallWorld { n, k, p, .. } => {
                check_ring(n, k)?;
                check_probability(p)
            }
            GenSpec::MultipartiteHood { order, part_size } => {
                if order < 3 || part_size == 0 {
                    return bad(format!("multipartite hood needs order >= 3 and part size >= 1, got {order}, {part_size}"));
                }
                Ok(())
            }
            GenSpec::CliqueStarHood { c, .. } => {
                if c < 2 {
                    return bad(format!("clique-star hood needs c >= 2, got {c}"));
                }
                Ok(())
            }
        }
    }

    pub fn generate(&self) -> Result<Graph> {
        self.validate()?;
        Ok(match *self {
            GenSpec::Gnp { n, p, seed } => gnp(n, p, seed)?,
            GenSpec::Ring { n, k } => ring_lattice(n, k)?,
            GenSpec::SmallWorld { n, k, p, seed } => small_world(n, k, p, seed)?,
            GenSpec::MultipartiteHood { order, part_size } => multipartite_hood(order, part_size)?,
            GenSpec::CliqueStarHood { c, b } => clique_star_hood(c, b)?,
        })
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

fn check_ring(n: usize, k: usize) -> Result<()> {
    if 2 * k >= n {
        return Err(Error::InvalidParameter(format!("ring needs 2k < n, got n = {n}, k = {k}")));
    }
    Ok(())
}

/// `G(n, p)`. Uses geometric skipping over the `C(n, 2)` candidate pairs,
/// so the number of draws is proportional to the number of edges.
pub fn gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    GenSpec::Gnp { n, p, seed }.validate()?;
    if p == 0.0 {
        return Ok(Graph::from_edges(n, std::iter::empty()));
    }
    if p == 1.0 {
        return Ok(complete(n));
    }
    let mut rng = seeded(seed);
    let log_q = (1.0 - p).ln();
    let mut edges = Vec::new();
    let (mut v, mut w): (usize, i64) = (1, -1);
    while v < n {
        let r: f64 = rng.random();
        let skip = ((1.0 - r).ln() / log_q).floor() as i64;
        w += 1 + skip;
        while v < n && w >= v as i64 {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((v, w as usize));
        }
    }
    Ok(Graph::from_edges(n, edges))
}

pub fn complete(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
}

/// Circulant graph joining every node to its `k` nearest nodes on each side.
pub fn ring_lattice(n: usize, k: usize) -> Result<Graph> {
    check_ring(n, k)?;
    Ok(Graph::from_edges(n, (0..n).flat_map(|u| (1..=k).map(move |j| (u, (u + j) % n)))))
}

/// Small-world rewiring of `ring_lattice(n, k)`: node by node, each of the
/// `k` clockwise edges `(u, v)` is replaced by `(u, w)` with probability `p`,
/// `w` uniform over the nodes that are neither `u` nor already adjacent to
/// `u`. A target is redrawn up to [`REWIRE_RETRIES`] times; if all draws
/// collide the edge stays. The edge count is always `n·k`.
pub fn small_world(n: usize, k: usize, p: f64, seed: u64) -> Result<Graph> {
    check_ring(n, k)?;
    check_probability(p)?;
    let mut rng = seeded(seed);
    let mut adj: Vec<Vec<u32>> = vec![Vec::with_capacity(2 * k); n];
    for u in 0..n {
        for j in 1..=k {
            let v = (u + j) % n;
            adj[u].push(v as u32);
            adj[v].push(u as u32);
        }
    }
    for u in 0..n {
        for j in 1..=k {
            if !rng.random_bool(p) {
                continue;
            }
            let v = ((u + j) % n) as u32;
            if let Some(w) = draw_target(&mut rng, &adj, u, n) {
                remove(&mut adj[u], v);
                remove(&mut adj[v as usize], u as u32);
                adj[u].push(w);
                adj[w as usize].push(u as u32);
            }
        }
    }
    let edges = adj
        .iter()
        .enumerate()
        .flat_map(|(u, list)| list.iter().filter(move |&&v| (v as usize) > u).map(move |&v| (u, v as usize)));
    Ok(Graph::from_edges(n, edges))
}

fn draw_target(rng: &mut Rng, adj: &[Vec<u32>], u: usize, n: usize) -> Option<u32> {
    if adj[u].len() + 1 >= n {
        return None;
    }
    for _ in 0..REWIRE_RETRIES {
        let w = rng.random_range(0..n as u32);
        if w as usize != u && !adj[u].contains(&w) {
            return Some(w);
        }
    }
    None
}

fn remove(list: &mut Vec<u32>, x: u32) {
    if let Some(i) = list.iter().position(|&y| y == x) {
        list.swap_remove(i);
    }
}

/// Node 0 is the hub; nodes `1..` are split into `order − 1` parts of
/// `part_size`, with every cross-part pair joined.
pub fn multipartite_hood(order: usize, part_size: usize) -> Result<Graph> {
    GenSpec::MultipartiteHood { order, part_size }.validate()?;
    let hood = (order - 1) * part_size;
    let part = |x: usize| (x - 1) / part_size;
    let spokes = (1..=hood).map(|v| (0, v));
    let cross = (1..=hood).flat_map(move |a| (a + 1..=hood).filter(move |&b| part(a) != part(b)).map(move |b| (a, b)));
    Ok(Graph::from_edges(hood + 1, spokes.chain(cross)))
}

/// Node 0 is the hub; nodes `1..=c` form a clique and nodes `c+1..=c+b`
/// touch only the hub.
pub fn clique_star_hood(c: usize, b: usize) -> Result<Graph> {
    GenSpec::CliqueStarHood { c, b }.validate()?;
    let spokes = (1..=c + b).map(|v| (0, v));
    let clique = (1..=c).flat_map(move |a| (a + 1..=c).map(move |x| (a, x)));
    Ok(Graph::from_edges(c + b + 1, spokes.chain(clique)))
}
