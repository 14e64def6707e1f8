//! Batch analyses over local coefficients: `(κ₂, κ_ℓ)` joint distributions,
//! degree-conditioned averages and small-world rewiring sweeps.

use std::io::Write;

use rand::Rng as _;
use rayon::prelude::*;

use crate::cliques::CliqueConfig;
use crate::coeffs::{er_baseline, fmt_opt, kk_upper_bound, ClusteringReport};
use crate::error::{Error, Result};
use crate::gen::small_world;
use crate::rng::member_stream;

/// Slack allowed on `κ_ℓ ≤ sqrt(κ₂)` for floating-point rounding.
pub const BOUND_SLACK: f64 = 1e-12;

pub const DEFAULT_JOINT_BINS: usize = 40;

#[derive(Clone, Debug, PartialEq)]
pub struct JointPoint {
    pub node: usize,
    pub kappa2: f64,
    pub kappa: f64,
    pub degree: usize,
}

/// One logarithmic `κ₂` bin of the averaged curve.
#[derive(Clone, Debug, PartialEq)]
pub struct JointBin {
    pub lo: f64,
    pub hi: f64,
    /// Geometric midpoint.
    pub center: f64,
    pub mean_kappa: f64,
    pub std_kappa: f64,
    pub count: usize,
    /// Mean of `κ₂(u)^(ℓ−1)` over the nodes in the bin.
    pub mean_er_baseline: f64,
    /// `κ₂^(ℓ−1)` at the bin center.
    pub er_baseline: f64,
    /// `sqrt(κ₂)` at the bin center.
    pub upper_bound: f64,
}

impl JointBin {
    pub fn standard_error(&self) -> f64 {
        self.std_kappa / (self.count as f64).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    pub order: usize,
    /// Nodes where both `κ₂` and `κ_ℓ` are defined.
    pub points: Vec<JointPoint>,
    /// Occupied bins only; points with `κ₂ = 0` have no log bin.
    pub bins: Vec<JointBin>,
}

impl JointDistribution {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Joint distribution of `(κ₂(u), κ_ℓ(u))` with a log-binned mean curve.
/// Bins split `[min positive κ₂, 1]` into `n_bins` geometric intervals.
pub fn joint_distribution(report: &ClusteringReport<f64>, order: usize, n_bins: usize) -> Result<JointDistribution> {
    if order < 3 || n_bins < 2 {
        return Err(Error::InvalidParameter(format!("joint distribution needs order >= 3 and bins >= 2, got {order}, {n_bins}")));
    }
    let second = report.order(2).ok_or_else(|| Error::InvalidParameter("report lacks order 2".into()))?;
    let higher = report
        .order(order)
        .ok_or_else(|| Error::InvalidParameter(format!("report lacks order {order}")))?;
    let mut points = Vec::new();
    for u in 0..report.n {
        if let (Some(k2), Some(k)) = (second.local[u], higher.local[u]) {
            if k > kk_upper_bound(k2) + BOUND_SLACK {
                return Err(Error::BoundViolation {
                    node: u,
                    kappa2: k2,
                    kappa: k,
                });
            }
            points.push(JointPoint {
                node: u,
                kappa2: k2,
                kappa: k,
                degree: report.degrees[u],
            });
        }
    }

    let min_pos = points.iter().map(|p| p.kappa2).filter(|&x| x > 0.0).fold(f64::INFINITY, f64::min);
    let mut bins = Vec::new();
    if min_pos.is_finite() {
        let span = (1.0 / min_pos).ln();
        let edge = |i: usize| if span > 0.0 { min_pos * (span * i as f64 / n_bins as f64).exp() } else { 1.0 };
        let mut members: Vec<Vec<&JointPoint>> = vec![Vec::new(); n_bins];
        for p in points.iter().filter(|p| p.kappa2 > 0.0) {
            let idx = if span > 0.0 {
                ((p.kappa2 / min_pos).ln() / span * n_bins as f64).floor() as usize
            } else {
                0
            };
            members[idx.min(n_bins - 1)].push(p);
        }
        for (i, m) in members.iter().enumerate() {
            if m.is_empty() {
                continue;
            }
            let count = m.len();
            let mean = m.iter().map(|p| p.kappa).sum::<f64>() / count as f64;
            let var = if count > 1 {
                m.iter().map(|p| (p.kappa - mean).powi(2)).sum::<f64>() / (count - 1) as f64
            } else {
                0.0
            };
            let (lo, hi) = (edge(i), edge(i + 1));
            let center = (lo * hi).sqrt();
            bins.push(JointBin {
                lo,
                hi,
                center,
                mean_kappa: mean,
                std_kappa: var.sqrt(),
                count,
                mean_er_baseline: m.iter().map(|p| er_baseline(p.kappa2, order)).sum::<f64>() / count as f64,
                er_baseline: er_baseline(center, order),
                upper_bound: kk_upper_bound(center),
            });
        }
    }
    Ok(JointDistribution { order, points, bins })
}

pub fn write_joint_points<W: Write>(joint: &JointDistribution, mut out: W) -> std::io::Result<()> {
    writeln!(out, "node,kappa_2,kappa_{},degree", joint.order)?;
    for p in &joint.points {
        writeln!(out, "{},{},{},{}", p.node, p.kappa2, p.kappa, p.degree)?;
    }
    out.flush()
}

pub fn write_joint_bins<W: Write>(joint: &JointDistribution, mut out: W) -> std::io::Result<()> {
    writeln!(out, "bin_lo,bin_hi,bin_center,mean_kappa,std_kappa,count,mean_er_baseline,er_baseline,kk_upper_bound")?;
    for b in &joint.bins {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            b.lo, b.hi, b.center, b.mean_kappa, b.std_kappa, b.count, b.mean_er_baseline, b.er_baseline, b.upper_bound
        )?;
    }
    out.flush()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DegreeBinning {
    /// Bins `[base^i, base^(i+1))`.
    Log { base: f64 },
    /// Bins `[i·width, (i+1)·width)`.
    Linear { width: usize },
}

impl Default for DegreeBinning {
    fn default() -> Self {
        DegreeBinning::Log { base: 2.0 }
    }
}

impl DegreeBinning {
    fn index(&self, degree: usize) -> usize {
        match *self {
            DegreeBinning::Log { base } => {
                // Exact integer stepping avoids rounding at bin edges.
                let mut i = 0;
                let mut edge = base;
                while (degree as f64) >= edge {
                    edge *= base;
                    i += 1;
                }
                i
            }
            DegreeBinning::Linear { width } => degree / width,
        }
    }

    fn range(&self, index: usize) -> (f64, f64) {
        match *self {
            DegreeBinning::Log { base } => (base.powi(index as i32), base.powi(index as i32 + 1)),
            DegreeBinning::Linear { width } => ((index * width) as f64, ((index + 1) * width) as f64),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            DegreeBinning::Log { base } => base > 1.0,
            DegreeBinning::Linear { width } => width > 0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid degree binning {self:?}")))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeBin {
    /// Degree range `[lo, hi)`.
    pub lo: f64,
    pub hi: f64,
    /// `(order, mean κ_ℓ over defined nodes, count)`; mean is `None` when
    /// no node of the bin has a defined value.
    pub values: Vec<(usize, Option<f64>, usize)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeBinnedProfile {
    pub orders: Vec<usize>,
    pub bins: Vec<DegreeBin>,
}

/// Mean of defined `κ_ℓ(u)` per degree bin, for each order.
pub fn degree_profile(report: &ClusteringReport<f64>, orders: &[usize], binning: DegreeBinning) -> Result<DegreeBinnedProfile> {
    binning.validate()?;
    let selected = orders
        .iter()
        .map(|&o| report.order(o).ok_or_else(|| Error::InvalidParameter(format!("order {o} not computed"))))
        .collect::<Result<Vec<_>>>()?;
    let n_bins = report.degrees.iter().map(|&d| binning.index(d)).max().map_or(0, |i| i + 1);
    // [bin][order] -> (sum, count)
    let mut acc = vec![vec![(0.0f64, 0usize); selected.len()]; n_bins];
    for u in 0..report.n {
        let b = binning.index(report.degrees[u]);
        for (k, r) in selected.iter().enumerate() {
            if let Some(v) = r.local[u] {
                acc[b][k].0 += v;
                acc[b][k].1 += 1;
            }
        }
    }
    let bins = acc
        .into_iter()
        .enumerate()
        .filter(|(_, cells)| cells.iter().any(|c| c.1 > 0))
        .map(|(i, cells)| {
            let (lo, hi) = binning.range(i);
            let (lo, hi) = if matches!(binning, DegreeBinning::Log { .. }) && i == 0 { (0.0, hi) } else { (lo, hi) };
            DegreeBin {
                lo,
                hi,
                values: cells
                    .into_iter()
                    .zip(&selected)
                    .map(|((sum, count), r)| (r.order, (count > 0).then(|| sum / count as f64), count))
                    .collect(),
            }
        })
        .collect();
    Ok(DegreeBinnedProfile {
        orders: orders.to_vec(),
        bins,
    })
}

pub fn write_degree_profile<W: Write>(profile: &DegreeBinnedProfile, mut out: W) -> std::io::Result<()> {
    writeln!(out, "degree_lo,degree_hi,order,mean_kappa,count")?;
    for b in &profile.bins {
        for &(order, mean, count) in &b.values {
            writeln!(out, "{},{},{},{},{}", b.lo, b.hi, order, fmt_opt(mean), count)?;
        }
    }
    out.flush()
}

/// Parses `LO:HI:log:STEPS`, `LO:HI:lin:STEPS` or a comma-separated list.
pub fn parse_pgrid(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidParameter(format!("cannot parse probability grid {text:?}"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() == 4 {
        let lo: f64 = parts[0].parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].parse().map_err(|_| bad())?;
        let steps: usize = parts[3].parse().map_err(|_| bad())?;
        if steps == 0 || lo > hi || lo < 0.0 || hi > 1.0 {
            return Err(bad());
        }
        let at = |i: usize| if steps == 1 { 0.0 } else { i as f64 / (steps - 1) as f64 };
        let grid: Vec<f64> = match parts[2] {
            "log" if lo > 0.0 => {
                let (a, b) = (lo.log10(), hi.log10());
                (0..steps).map(|i| 10f64.powf(a + (b - a) * at(i))).collect()
            }
            "lin" => (0..steps).map(|i| lo + (hi - lo) * at(i)).collect(),
            _ => return Err(bad()),
        };
        // Twelve significant digits keep rows readable and inside [lo, hi].
        return Ok(grid.into_iter().map(|p| round_sig(p).clamp(lo, hi)).collect());
    }
    let grid = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<Vec<f64>>>()?;
    if grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(bad());
    }
    Ok(grid)
}

fn round_sig(x: f64) -> f64 {
    format!("{x:.11e}").parse().unwrap_or(x)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub p: f64,
    pub order: usize,
    /// Mean `C̄_ℓ` over the replicates where it is defined.
    pub mean: Option<f64>,
    pub std: f64,
    pub reps: usize,
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub n: usize,
    pub k: usize,
    pub reps: usize,
    pub seed: u64,
    pub threads: usize,
}

/// Seed of replicate `rep` at grid index `p_index`: the first `u64` of
/// ensemble stream `p_index · reps + rep`.
pub fn sweep_seed(seed: u64, reps: usize, p_index: usize, rep: usize) -> u64 {
    member_stream(seed, p_index * reps + rep).random()
}

/// `C̄_ℓ` of small-world graphs across a grid of rewiring probabilities.
/// Rows come out sorted by grid position, then order.
pub fn sweep_rewiring(config: &SweepConfig, p_grid: &[f64], orders: &[usize]) -> Result<Vec<SweepRow>> {
    if config.reps == 0 {
        return Err(Error::InvalidParameter("reps must be >= 1".into()));
    }
    if let Some(p) = p_grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
    }
    let max_order = orders.iter().copied().max().unwrap_or(2).max(2);
    let jobs: Vec<(usize, usize)> = (0..p_grid.len()).flat_map(|i| (0..config.reps).map(move |r| (i, r))).collect();
    let run = |&(i, rep): &(usize, usize)| -> Result<Vec<Option<f64>>> {
        let g = small_world(config.n, config.k, p_grid[i], sweep_seed(config.seed, config.reps, i, rep))?;
        let report = ClusteringReport::<f64>::compute(&g, max_order, &CliqueConfig::single_threaded())?;
        Ok(orders.iter().map(|&o| report.order(o).and_then(|r| r.average)).collect())
    };
    let results: Vec<Result<Vec<Option<f64>>>> = if config.threads == 1 {
        jobs.iter().map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        pool.install(|| jobs.par_iter().map(run).collect())
    };
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for (i, &p) in p_grid.iter().enumerate() {
        let reps = &results[i * config.reps..(i + 1) * config.reps];
        for (k, &order) in orders.iter().enumerate() {
            let values: Vec<f64> = reps.iter().filter_map(|r| r[k]).collect();
            let n = values.len();
            let mean = (n > 0).then(|| values.iter().sum::<f64>() / n as f64);
            let std = match mean {
                Some(m) if n > 1 => (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt(),
                _ => 0.0,
            };
            rows.push(SweepRow { p, order, mean, std, reps: n });
        }
    }
    Ok(rows)
}

pub fn write_sweep<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "p,order,mean_avg_ccf,std_avg_ccf,reps")?;
    for r in rows {
        writeln!(out, "{},{},{},{},{}", r.p, r.order, fmt_opt(r.mean), r.std, r.reps)?;
    }
    out.flush()
}
