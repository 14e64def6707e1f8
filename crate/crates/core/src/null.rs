//! Degree-preserving null models and ensemble significance statistics.
//!
//! Both samplers run a double-edge-swap chain: two edges `(a, b)`, `(c, d)`
//! become `(a, d)`, `(c, b)`, which leaves every degree unchanged. Swaps
//! that would create a self-loop or a repeated edge are rejected.
//!
//! * CM draws a fixed number of swaps from the input graph.
//! * MRCN additionally pins the average clustering `C̄₂`: starting from a
//!   CM-randomized graph it anneals the energy `H = |C̄₂(sample) − C̄₂(g)|`
//!   under geometric cooling and stops once `H` is within the tolerance.
//!   Temperatures are per node: a move is accepted with probability
//!   `exp(−|Ṽ₂|·ΔH/T)`, so a schedule behaves the same on graphs of any size
//!   (one swap moves `C̄₂` by `O(1/|Ṽ₂|)`).

use std::fmt;
use std::io::Write;

use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::cliques::CliqueConfig;
use crate::coeffs::{fmt_opt, ClusteringReport};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::rng::{member_stream, seeded, Rng};

pub const DEFAULT_SWAP_FACTOR: f64 = 10.0;
pub const DEFAULT_Z_THRESHOLD: f64 = 5.0;

/// Mutable simple graph supporting edge swaps, with optional per-node
/// triangle counts kept current under every change.
#[derive(Clone, Debug)]
pub struct SwapGraph {
    adj: Vec<Vec<NodeId>>,
    edges: Vec<(NodeId, NodeId)>,
    triangles: Option<Vec<u64>>,
}

/// A proposed swap `(a, b), (c, d) → (a, d), (c, b)` by edge slot.
#[derive(Clone, Copy, Debug)]
struct Swap {
    i: usize,
    j: usize,
    a: NodeId,
    b: NodeId,
    c: NodeId,
    d: NodeId,
}

impl SwapGraph {
    pub fn new(g: &Graph) -> Self {
        SwapGraph {
            adj: (0..g.n()).map(|u| g.neighbors(u).to_vec()).collect(),
            edges: g.edges().map(|(u, v)| (u as NodeId, v as NodeId)).collect(),
            triangles: None,
        }
    }

    /// Starts tracking triangles through every node.
    pub fn track_triangles(&mut self) {
        let mut t = vec![0u64; self.adj.len()];
        for &(u, v) in &self.edges {
            let common = intersection_size(&self.adj[u as usize], &self.adj[v as usize]) as u64;
            t[u as usize] += common;
            t[v as usize] += common;
        }
        // Each triangle was seen from all three of its edges, twice per node.
        for x in &mut t {
            *x /= 2;
        }
        self.triangles = Some(t);
    }

    pub fn triangles(&self) -> Option<&[u64]> {
        self.triangles.as_deref()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn to_graph(&self, labels: Option<Vec<String>>) -> Graph {
        let g = Graph::from_edges(self.adj.len(), self.edges.iter().map(|&(u, v)| (u as usize, v as usize)));
        match labels {
            Some(l) => g.with_labels(l),
            None => g,
        }
    }

    fn propose(&self, rng: &mut Rng) -> Option<Swap> {
        let m = self.edges.len();
        let i = rng.random_range(0..m);
        let j = rng.random_range(0..m);
        if i == j {
            return None;
        }
        let (a, b) = self.edges[i];
        let (mut c, mut d) = self.edges[j];
        if rng.random_bool(0.5) {
            std::mem::swap(&mut c, &mut d);
        }
        if a == d || c == b || self.has_edge(a, d) || self.has_edge(c, b) {
            return None;
        }
        Some(Swap { i, j, a, b, c, d })
    }

    /// Applies a swap and returns the change of each touched node's triangle
    /// count through `on_change`.
    fn apply<F: FnMut(NodeId, i64)>(&mut self, s: &Swap, on_change: &mut F) {
        self.remove_edge(s.a, s.b, on_change);
        self.remove_edge(s.c, s.d, on_change);
        self.add_edge(s.a, s.d, on_change);
        self.add_edge(s.c, s.b, on_change);
        self.edges[s.i] = (s.a.min(s.d), s.a.max(s.d));
        self.edges[s.j] = (s.c.min(s.b), s.c.max(s.b));
    }

    #[cfg(test)]
    fn revert<F: FnMut(NodeId, i64)>(&mut self, s: &Swap, on_change: &mut F) {
        self.remove_edge(s.c, s.b, on_change);
        self.remove_edge(s.a, s.d, on_change);
        self.add_edge(s.c, s.d, on_change);
        self.add_edge(s.a, s.b, on_change);
        self.edges[s.i] = (s.a.min(s.b), s.a.max(s.b));
        self.edges[s.j] = (s.c.min(s.d), s.c.max(s.d));
    }

    fn remove_edge<F: FnMut(NodeId, i64)>(&mut self, u: NodeId, v: NodeId, on_change: &mut F) {
        let (ui, vi) = (u as usize, v as usize);
        let pu = self.adj[ui].binary_search(&v).expect("edge present");
        self.adj[ui].remove(pu);
        let pv = self.adj[vi].binary_search(&u).expect("edge present");
        self.adj[vi].remove(pv);
        self.update_triangles(u, v, -1, on_change);
    }

    fn add_edge<F: FnMut(NodeId, i64)>(&mut self, u: NodeId, v: NodeId, on_change: &mut F) {
        self.update_triangles(u, v, 1, on_change);
        let (ui, vi) = (u as usize, v as usize);
        let pu = self.adj[ui].binary_search(&v).unwrap_err();
        self.adj[ui].insert(pu, v);
        let pv = self.adj[vi].binary_search(&u).unwrap_err();
        self.adj[vi].insert(pv, u);
    }

    /// Change of `Σ weight[x]·t(x)` that applying `s` would cause, computed
    /// without touching the graph. The four endpoints of a proposed swap are
    /// distinct, so each step only has to discount edges the swap itself
    /// removes.
    fn swap_delta(&self, s: &Swap, weight: &[f64], marks: &mut Marks) -> f64 {
        marks.set(&self.adj[s.a as usize]);
        let ab = self.marked_common(marks, s.b, [s.a, s.b], weight);
        let ad = self.marked_common(marks, s.d, [s.b, s.c], weight);
        marks.set(&self.adj[s.c as usize]);
        let cd = self.marked_common(marks, s.d, [s.c, s.d], weight);
        let cb = self.marked_common(marks, s.b, [s.d, s.a], weight);
        let pair = |(sum, k): (f64, f64), u: NodeId, v: NodeId| sum + k * (weight[u as usize] + weight[v as usize]);
        pair(ad, s.a, s.d) + pair(cb, s.c, s.b) - pair(ab, s.a, s.b) - pair(cd, s.c, s.d)
    }

    /// Weighted sum and count of the marked neighbors of `v` outside `skip`.
    fn marked_common(&self, marks: &Marks, v: NodeId, skip: [NodeId; 2], weight: &[f64]) -> (f64, f64) {
        let (mut sum, mut k) = (0.0, 0.0);
        for &w in &self.adj[v as usize] {
            if marks.get(w) && w != skip[0] && w != skip[1] {
                sum += weight[w as usize];
                k += 1.0;
            }
        }
        (sum, k)
    }

    /// Triangles gained or lost by toggling `(u, v)`, which is absent from
    /// both lists when called.
    fn update_triangles<F: FnMut(NodeId, i64)>(&mut self, u: NodeId, v: NodeId, sign: i64, on_change: &mut F) {
        let Some(t) = self.triangles.as_mut() else {
            return;
        };
        let (au, av) = (&self.adj[u as usize], &self.adj[v as usize]);
        let (mut x, mut y, mut common) = (0, 0, 0i64);
        while x < au.len() && y < av.len() {
            match au[x].cmp(&av[y]) {
                std::cmp::Ordering::Less => x += 1,
                std::cmp::Ordering::Greater => y += 1,
                std::cmp::Ordering::Equal => {
                    let w = au[x];
                    t[w as usize] = (t[w as usize] as i64 + sign) as u64;
                    on_change(w, sign);
                    common += 1;
                    x += 1;
                    y += 1;
                }
            }
        }
        if common != 0 {
            t[u as usize] = (t[u as usize] as i64 + sign * common) as u64;
            t[v as usize] = (t[v as usize] as i64 + sign * common) as u64;
            on_change(u, sign * common);
            on_change(v, sign * common);
        }
    }
}

/// Reusable membership set over node ids, cleared in O(1) by bumping a stamp.
struct Marks {
    stamp: Vec<u32>,
    current: u32,
}

impl Marks {
    fn new(n: usize) -> Self {
        Marks { stamp: vec![0; n], current: 0 }
    }

    fn set(&mut self, nodes: &[NodeId]) {
        self.current = self.current.wrapping_add(1);
        if self.current == 0 {
            self.stamp.fill(0);
            self.current = 1;
        }
        for &w in nodes {
            self.stamp[w as usize] = self.current;
        }
    }

    fn get(&self, w: NodeId) -> bool {
        self.stamp[w as usize] == self.current
    }
}

fn intersection_size(a: &[NodeId], b: &[NodeId]) -> usize {
    let (mut x, mut y, mut n) = (0, 0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                x += 1;
                y += 1;
            }
        }
    }
    n
}

fn labels_of(g: &Graph) -> Option<Vec<String>> {
    g.labels().map(<[String]>::to_vec)
}

#[derive(Clone, Debug)]
pub struct CmSample {
    pub graph: Graph,
    pub attempted: usize,
    pub accepted: usize,
}

impl CmSample {
    pub fn rejected(&self) -> usize {
        self.attempted - self.accepted
    }
}

fn check_swappable(g: &Graph) -> Result<()> {
    if g.m() < 2 {
        return Err(Error::InvalidParameter(format!("edge swaps need at least 2 edges, graph has {}", g.m())));
    }
    Ok(())
}

fn run_swaps(sg: &mut SwapGraph, rng: &mut Rng, attempts: usize) -> usize {
    let mut accepted = 0;
    let mut ignore = |_: NodeId, _: i64| {};
    for _ in 0..attempts {
        if let Some(s) = sg.propose(rng) {
            sg.apply(&s, &mut ignore);
            accepted += 1;
        }
    }
    accepted
}

/// Configuration-model sample: `ceil(swap_factor · m)` attempted swaps.
pub fn cm_sample(g: &Graph, seed: u64, swap_factor: f64) -> Result<CmSample> {
    cm_sample_with(g, &mut seeded(seed), swap_factor)
}

pub fn cm_sample_with(g: &Graph, rng: &mut Rng, swap_factor: f64) -> Result<CmSample> {
    check_swappable(g)?;
    if swap_factor.is_nan() || swap_factor <= 0.0 {
        return Err(Error::InvalidParameter(format!("swap factor must be positive, got {swap_factor}")));
    }
    let attempted = (swap_factor * g.m() as f64).ceil() as usize;
    let mut sg = SwapGraph::new(g);
    let accepted = run_swaps(&mut sg, rng, attempted);
    Ok(CmSample {
        graph: sg.to_graph(labels_of(g)),
        attempted,
        accepted,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnnealingSchedule {
    /// Starting temperature, in units of summed local coefficients.
    pub initial_temperature: f64,
    pub cooling_factor: f64,
    pub steps_per_temperature: usize,
    /// Stop once `|C̄₂(sample) − C̄₂(g)|` is at most this.
    pub target_tolerance: f64,
    /// Temperature levels before giving up.
    pub max_sweeps: usize,
    /// Swaps per edge used to randomize before annealing starts.
    pub randomize_swap_factor: f64,
}

impl AnnealingSchedule {
    /// Defaults, with `10·m` proposals per temperature level.
    pub fn for_graph(g: &Graph) -> Self {
        AnnealingSchedule {
            initial_temperature: 0.05,
            cooling_factor: 0.95,
            steps_per_temperature: (10 * g.m()).max(1),
            target_tolerance: 0.005,
            max_sweeps: 200,
            randomize_swap_factor: DEFAULT_SWAP_FACTOR,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.initial_temperature > 0.0
            && self.cooling_factor > 0.0
            && self.cooling_factor < 1.0
            && self.steps_per_temperature > 0
            && self.target_tolerance >= 0.0
            && self.max_sweeps > 0
            && self.randomize_swap_factor >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid annealing schedule {self:?}")))
        }
    }
}

#[derive(Clone, Debug)]
pub struct MrcnSample {
    pub graph: Graph,
    /// Final `|C̄₂(sample) − C̄₂(g)|`.
    pub energy: f64,
    pub converged: bool,
    /// Temperature levels visited.
    pub sweeps: usize,
    pub proposals: usize,
    pub accepted: usize,
}

/// Running `C̄₂` over a fixed node set: degrees never change under swaps, so
/// the weight `2 / (d(d−1))` of each node and the set `Ṽ₂` are constant.
struct AvgClustering {
    weight: Vec<f64>,
    centers: f64,
}

impl AvgClustering {
    fn new(g: &Graph) -> Option<Self> {
        let weight: Vec<f64> = (0..g.n())
            .map(|u| {
                let d = g.degree(u) as f64;
                if d >= 2.0 {
                    2.0 / (d * (d - 1.0))
                } else {
                    0.0
                }
            })
            .collect();
        let centers = weight.iter().filter(|&&w| w > 0.0).count() as f64;
        (centers > 0.0).then_some(AvgClustering { weight, centers })
    }

    fn value(&self, triangles: &[u64]) -> f64 {
        let sum: f64 = triangles.iter().zip(&self.weight).map(|(&t, &w)| t as f64 * w).sum();
        sum / self.centers
    }
}

/// Maximally random clustered network sample. A `C̄₂`-defined graph with at
/// least two edges is required; non-convergence is reported in the result,
/// not as an error.
pub fn mrcn_sample(g: &Graph, seed: u64, schedule: &AnnealingSchedule) -> Result<MrcnSample> {
    mrcn_sample_with(g, &mut seeded(seed), schedule)
}

pub fn mrcn_sample_with(g: &Graph, rng: &mut Rng, schedule: &AnnealingSchedule) -> Result<MrcnSample> {
    schedule.validate()?;
    check_swappable(g)?;
    let avg = AvgClustering::new(g)
        .ok_or_else(|| Error::InvalidParameter("average clustering of the input is undefined".into()))?;
    let mut sg = SwapGraph::new(g);
    sg.track_triangles();
    let target = avg.value(sg.triangles().unwrap());

    let randomize = (schedule.randomize_swap_factor * g.m() as f64).ceil() as usize;
    let mut accepted = run_swaps(&mut sg, rng, randomize);
    let mut proposals = randomize;

    let mut current = avg.value(sg.triangles().unwrap());
    let mut energy = (current - target).abs();
    let mut sweeps = 0;
    let mut temperature = schedule.initial_temperature;
    let centers = avg.centers;
    let weight = &avg.weight;
    let mut marks = Marks::new(g.n());

    'anneal: while energy > schedule.target_tolerance && sweeps < schedule.max_sweeps {
        sweeps += 1;
        for _ in 0..schedule.steps_per_temperature {
            proposals += 1;
            let Some(s) = sg.propose(rng) else { continue };
            let next = current + sg.swap_delta(&s, weight, &mut marks) / centers;
            let next_energy = (next - target).abs();
            let d_energy = next_energy - energy;
            if d_energy <= 0.0 || rng.random::<f64>() < (-d_energy * centers / temperature).exp() {
                sg.apply(&s, &mut |_, _| {});
                accepted += 1;
                current = next;
                energy = next_energy;
                if energy <= schedule.target_tolerance {
                    // Incremental sums drift; confirm against the exact counts.
                    current = avg.value(sg.triangles().unwrap());
                    energy = (current - target).abs();
                    if energy <= schedule.target_tolerance {
                        break 'anneal;
                    }
                }
            }
        }
        temperature *= schedule.cooling_factor;
        current = avg.value(sg.triangles().unwrap());
        energy = (current - target).abs();
    }

    Ok(MrcnSample {
        graph: sg.to_graph(labels_of(g)),
        energy,
        converged: energy <= schedule.target_tolerance,
        sweeps,
        proposals,
        accepted,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum NullModel {
    Cm { swap_factor: f64 },
    Mrcn { schedule: AnnealingSchedule },
}

impl NullModel {
    /// Whether samples match the input on `stat` by construction.
    pub fn constrains(&self, stat: Statistic) -> bool {
        matches!(self, NullModel::Mrcn { .. }) && stat == Statistic::Average(2)
    }
}

/// A statistic compared between the input and its null samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Statistic {
    /// `C̄_ℓ`
    Average(usize),
    /// `C_ℓ`
    Global(usize),
}

impl Statistic {
    pub fn order(&self) -> usize {
        match *self {
            Statistic::Average(o) | Statistic::Global(o) => o,
        }
    }

    fn extract(&self, report: &ClusteringReport<f64>) -> Option<f64> {
        let r = report.order(self.order())?;
        match self {
            Statistic::Average(_) => r.average,
            Statistic::Global(_) => r.global,
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistic::Average(o) => write!(f, "avg_ccf_{o}"),
            Statistic::Global(o) => write!(f, "global_ccf_{o}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Significance {
    Above,
    Below,
    NotSignificant,
    /// Held fixed by the null model, so not tested.
    Constrained,
}

/// Ensemble summary for one statistic.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleStats {
    pub statistic: Statistic,
    pub original: Option<f64>,
    pub mean: f64,
    /// Sample standard deviation (`n − 1` denominator).
    pub std: f64,
    /// Samples on which the statistic was defined.
    pub n_samples: usize,
    /// `(original − mean) / std`; `±∞` when `std = 0` and the values differ,
    /// `0` when they are equal.
    pub z_score: Option<f64>,
    pub flag: Significance,
}

impl EnsembleStats {
    pub fn from_values(statistic: Statistic, original: Option<f64>, values: &[f64], threshold: f64) -> Self {
        let n = values.len();
        let mean = if n == 0 { f64::NAN } else { values.iter().sum::<f64>() / n as f64 };
        let std = if n < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        let z_score = match original {
            Some(x) if n > 0 => Some(if std > 0.0 {
                (x - mean) / std
            } else if x == mean {
                0.0
            } else if x > mean {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            }),
            _ => None,
        };
        let flag = match z_score {
            Some(z) if z >= threshold => Significance::Above,
            Some(z) if z <= -threshold => Significance::Below,
            _ => Significance::NotSignificant,
        };
        EnsembleStats {
            statistic,
            original,
            mean,
            std,
            n_samples: n,
            z_score,
            flag,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EnsembleConfig {
    pub n_samples: usize,
    pub seed: u64,
    pub threads: usize,
    pub z_threshold: f64,
}

#[derive(Clone, Debug)]
pub struct EnsembleResult {
    pub stats: Vec<EnsembleStats>,
    pub n_requested: usize,
    pub n_converged: usize,
    /// Final energy of every MRCN member, in member order; empty for CM.
    pub energies: Vec<f64>,
    pub z_threshold: f64,
}

type Member = (bool, f64, Vec<Option<f64>>);

/// Draws `n_samples` null graphs on independent streams (member `i` uses
/// stream `i + 1` of `seed`) and compares each statistic with the input.
/// Non-converged MRCN members are left out of every statistic.
pub fn ensemble_stats(g: &Graph, model: &NullModel, statistics: &[Statistic], config: &EnsembleConfig) -> Result<EnsembleResult> {
    if config.n_samples < 2 {
        return Err(Error::InvalidParameter("ensembles need at least 2 samples".into()));
    }
    let max_order = statistics.iter().map(Statistic::order).max().unwrap_or(2).max(2);
    let cliques = CliqueConfig::single_threaded();
    let measure = |h: &Graph| -> Result<Vec<Option<f64>>> {
        let report = ClusteringReport::<f64>::compute(h, max_order, &cliques)?;
        Ok(statistics.iter().map(|s| s.extract(&report)).collect())
    };
    let original = measure(g)?;

    let draw = |member: usize| -> Result<(bool, f64, Vec<Option<f64>>)> {
        let mut rng = member_stream(config.seed, member);
        let (graph, converged, energy) = match model {
            NullModel::Cm { swap_factor } => (cm_sample_with(g, &mut rng, *swap_factor)?.graph, true, 0.0),
            NullModel::Mrcn { schedule } => {
                let s = mrcn_sample_with(g, &mut rng, schedule)?;
                (s.graph, s.converged, s.energy)
            }
        };
        let values = if converged { measure(&graph)? } else { Vec::new() };
        Ok((converged, energy, values))
    };

    let members: Vec<Result<Member>> = if config.threads == 1 {
        (0..config.n_samples).map(draw).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        pool.install(|| (0..config.n_samples).into_par_iter().map(draw).collect())
    };
    let members: Vec<Member> = members.into_iter().collect::<Result<_>>()?;

    let n_converged = members.iter().filter(|m| m.0).count();
    if n_converged == 0 {
        return Err(Error::NoConvergedSamples(config.n_samples));
    }
    let stats = statistics
        .iter()
        .enumerate()
        .map(|(k, &stat)| {
            let values: Vec<f64> = members.iter().filter(|m| m.0).filter_map(|m| m.2[k]).collect();
            let mut s = EnsembleStats::from_values(stat, original[k], &values, config.z_threshold);
            if model.constrains(stat) {
                s.flag = Significance::Constrained;
            }
            s
        })
        .collect();
    let energies = match model {
        NullModel::Cm { .. } => Vec::new(),
        NullModel::Mrcn { .. } => members.iter().map(|m| m.1).collect(),
    };
    Ok(EnsembleResult {
        stats,
        n_requested: config.n_samples,
        n_converged,
        energies,
        z_threshold: config.z_threshold,
    })
}

impl Significance {
    pub fn label(&self, threshold: f64) -> String {
        match self {
            Significance::Above => format!("above-{threshold}sigma"),
            Significance::Below => format!("below-{threshold}sigma"),
            Significance::NotSignificant => "not-significant".to_string(),
            Significance::Constrained => "constrained".to_string(),
        }
    }
}

/// CSV: `statistic,original,mean,std,z,flag,n_converged`.
pub fn write_ensemble_csv<W: Write>(result: &EnsembleResult, mut out: W) -> std::io::Result<()> {
    writeln!(out, "statistic,original,mean,std,z,flag,n_converged")?;
    for s in &result.stats {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            s.statistic,
            fmt_opt(s.original),
            s.mean,
            s.std,
            fmt_opt(s.z_score),
            s.flag.label(result.z_threshold),
            result.n_converged
        )?;
    }
    out.flush()
}
