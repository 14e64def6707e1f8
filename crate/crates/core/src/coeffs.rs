//! Higher-order clustering coefficients.
//!
//! An `ℓ`-wedge is an `ℓ`-clique plus one adjacent edge sharing exactly one
//! node (the center). It is closed when the two together span an
//! `(ℓ+1)`-clique. With `K_ℓ(u)` the `ℓ`-cliques containing `u` and `d_u` its
//! degree, the wedges centered at `u` number `|K_ℓ(u)|·(d_u − ℓ + 1)`, and
//!
//! * local:   `κ_ℓ(u) = ℓ·|K_{ℓ+1}(u)| / |W_ℓ(u)|`, undefined when `|W_ℓ(u)| = 0`
//! * global:  `C_ℓ = (ℓ² + ℓ)·|K_{ℓ+1}| / |W_ℓ|`
//! * average: mean of the defined `κ_ℓ(u)`
//!
//! All coefficients are generic over [`Scalar`] so the same code yields
//! `f64` values or exact rationals.

use std::io::Write;

use num_traits::Float;
use serde::Serialize;

use crate::cliques::{count_cliques, CliqueConfig, CliqueCounts};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

/// `|W_ℓ(u)|` per node and `|W_ℓ|` in total.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WedgeCounts {
    pub order: usize,
    pub per_node: Vec<u64>,
    pub total: u128,
}

/// Wedge counts at the order of `counts`, from `|W_ℓ(u)| = |K_ℓ(u)|·(d_u − ℓ + 1)`.
pub fn wedge_counts(g: &Graph, counts: &CliqueCounts) -> Result<WedgeCounts> {
    let order = counts.order;
    let mut per_node = Vec::with_capacity(g.n());
    let mut total: u128 = 0;
    for (u, &k) in counts.per_node.iter().enumerate() {
        let free = (g.degree(u) + 1).saturating_sub(order) as u64;
        let w = k.checked_mul(free).ok_or(Error::Overflow { order })?;
        total += u128::from(w);
        per_node.push(w);
    }
    Ok(WedgeCounts {
        order,
        per_node,
        total,
    })
}

fn scalar_from_u128<S: Scalar>(x: u128) -> S {
    let lo = S::from_count(x as u64);
    let hi = (x >> 64) as u64;
    if hi == 0 {
        lo
    } else {
        let shift = S::from_count(1u64 << 32);
        S::from_count(hi) * shift.clone() * shift + lo
    }
}

/// Local coefficient from the wedge form `ℓ·|K_{ℓ+1}(u)| / |W_ℓ(u)|`.
pub fn local_from_wedges<S: Scalar>(wedges: &WedgeCounts, upper: &CliqueCounts) -> Vec<Option<S>> {
    let order = wedges.order;
    debug_assert_eq!(upper.order, order + 1);
    wedges
        .per_node
        .iter()
        .zip(&upper.per_node)
        .map(|(&w, &closed)| {
            (w > 0).then(|| S::from_count(order as u64) * S::from_count(closed) / S::from_count(w))
        })
        .collect()
}

/// Local coefficient from the clique-ratio form
/// `ℓ·|K_{ℓ+1}(u)| / ((d_u − ℓ + 1)·|K_ℓ(u)|)`.
pub fn local_from_cliques<S: Scalar>(g: &Graph, lower: &CliqueCounts, upper: &CliqueCounts) -> Vec<Option<S>> {
    let order = lower.order;
    debug_assert_eq!(upper.order, order + 1);
    (0..g.n())
        .map(|u| {
            let free = (g.degree(u) + 1).saturating_sub(order) as u64;
            let k = lower.per_node[u];
            (free > 0 && k > 0).then(|| {
                S::from_count(order as u64) * S::from_count(upper.per_node[u])
                    / (S::from_count(free) * S::from_count(k))
            })
        })
        .collect()
}

/// `(ℓ² + ℓ)·|K_{ℓ+1}| / |W_ℓ|`, `None` when there are no wedges.
pub fn global_from_counts<S: Scalar>(wedges: &WedgeCounts, upper: &CliqueCounts) -> Option<S> {
    let order = wedges.order as u64;
    (wedges.total > 0).then(|| {
        S::from_count(order * order + order) * S::from_count(upper.total) / scalar_from_u128::<S>(wedges.total)
    })
}

/// Mean over defined values and the fraction of nodes where the value is defined.
pub fn average_of_defined<S: Scalar>(local: &[Option<S>]) -> (Option<S>, S) {
    let mut sum = S::zero();
    let mut defined = 0u64;
    for v in local.iter().flatten() {
        sum = sum + v.clone();
        defined += 1;
    }
    let fraction = if local.is_empty() {
        S::zero()
    } else {
        S::from_count(defined) / S::from_count(local.len() as u64)
    };
    ((defined > 0).then(|| sum / S::from_count(defined)), fraction)
}

/// Expected `κ_ℓ(u)` for a node whose neighborhood is wired at random with
/// edge density `κ₂(u)`: `κ₂^(ℓ−1)`. The finite-degree correction, which
/// vanishes as `O(1/d_u²)`, is left out.
pub fn er_baseline<F: Float>(kappa2: F, order: usize) -> F {
    kappa2.powi(order as i32 - 1)
}

/// Largest possible `κ_ℓ(u)` for `ℓ ≥ 3` given `κ₂(u)`: `sqrt(κ₂(u))`.
pub fn kk_upper_bound<F: Float>(kappa2: F) -> F {
    kappa2.sqrt()
}

/// Coefficients of one order.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderReport<S> {
    pub order: usize,
    pub local: Vec<Option<S>>,
    pub wedges: WedgeCounts,
    /// `|K_{ℓ+1}|`, the number of cliques closing wedges of this order.
    pub closed_cliques: u64,
    pub global: Option<S>,
    pub average: Option<S>,
    /// `|Ṽ_ℓ| / |V|`.
    pub wedge_fraction: S,
}

impl<S: Scalar> OrderReport<S> {
    pub fn defined_nodes(&self) -> usize {
        self.local.iter().filter(|v| v.is_some()).count()
    }
}

/// Clustering coefficients of every order `2..=max_order` for one graph.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusteringReport<S> {
    pub n: usize,
    pub m: usize,
    pub degrees: Vec<usize>,
    /// Reports for orders `2, 3, …`, ascending.
    pub orders: Vec<OrderReport<S>>,
}

impl<S: Scalar> ClusteringReport<S> {
    /// Computes orders `2..=max_order`; needs cliques up to `max_order + 1`.
    pub fn compute(g: &Graph, max_order: usize, config: &CliqueConfig) -> Result<Self> {
        if max_order < 2 {
            return Err(Error::InvalidParameter(format!("order {max_order} < 2")));
        }
        let counts = count_cliques(g, max_order + 1, config)?;
        Self::from_counts(g, &counts)
    }

    /// Builds the report from clique counts for orders `2..=L+1`, giving
    /// coefficients for orders `2..=L`.
    pub fn from_counts(g: &Graph, counts: &[CliqueCounts]) -> Result<Self> {
        let mut orders = Vec::new();
        for pair in counts.windows(2) {
            let (lower, upper) = (&pair[0], &pair[1]);
            let wedges = wedge_counts(g, lower)?;
            let local = local_from_wedges::<S>(&wedges, upper);
            let global = global_from_counts::<S>(&wedges, upper);
            let (average, wedge_fraction) = average_of_defined(&local);
            orders.push(OrderReport {
                order: lower.order,
                local,
                wedges,
                closed_cliques: upper.total,
                global,
                average,
                wedge_fraction,
            });
        }
        Ok(ClusteringReport {
            n: g.n(),
            m: g.m(),
            degrees: g.degrees(),
            orders,
        })
    }

    pub fn order(&self, order: usize) -> Option<&OrderReport<S>> {
        self.orders.iter().find(|r| r.order == order)
    }

    pub fn max_order(&self) -> usize {
        self.orders.last().map_or(1, |r| r.order)
    }

    pub fn local(&self, order: usize, u: usize) -> Option<&S> {
        self.order(order).and_then(|r| r.local[u].as_ref())
    }

    pub fn summary(&self, orders: &[usize]) -> Summary {
        Summary {
            nodes: self.n,
            edges: self.m,
            orders: orders
                .iter()
                .filter_map(|&o| self.order(o))
                .map(|r| OrderSummary {
                    order: r.order,
                    global_ccf: r.global.as_ref().map(Scalar::to_f64),
                    avg_ccf: r.average.as_ref().map(Scalar::to_f64),
                    wedge_fraction: r.wedge_fraction.to_f64(),
                    wedges: r.wedges.total,
                    closed_cliques: r.closed_cliques,
                })
                .collect(),
        }
    }
}

/// Global, average and participation values per order, as exported.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub nodes: usize,
    pub edges: usize,
    pub orders: Vec<OrderSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderSummary {
    pub order: usize,
    pub global_ccf: Option<f64>,
    pub avg_ccf: Option<f64>,
    pub wedge_fraction: f64,
    pub wedges: u128,
    pub closed_cliques: u64,
}

impl Summary {
    pub fn any_undefined(&self) -> bool {
        self.orders.iter().any(|o| o.global_ccf.is_none() || o.avg_ccf.is_none())
    }
}

pub(crate) fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x}"))
}

/// Per-node TSV: `node_label  degree  kappa_ℓ  wedges_ℓ …` for each order.
pub fn write_node_table<S: Scalar, W: Write>(
    report: &ClusteringReport<S>,
    g: &Graph,
    orders: &[usize],
    mut out: W,
) -> std::io::Result<()> {
    let selected: Vec<&OrderReport<S>> = orders.iter().filter_map(|&o| report.order(o)).collect();
    let mut header = vec!["node_label".to_string(), "degree".to_string()];
    for r in &selected {
        header.push(format!("kappa_{}", r.order));
        header.push(format!("wedges_{}", r.order));
    }
    writeln!(out, "{}", header.join("\t"))?;
    for u in 0..report.n {
        let mut row = vec![g.label(u), report.degrees[u].to_string()];
        for r in &selected {
            row.push(fmt_opt(r.local[u].as_ref().map(Scalar::to_f64)));
            row.push(r.wedges.per_node[u].to_string());
        }
        writeln!(out, "{}", row.join("\t"))?;
    }
    out.flush()
}

/// Summary block TSV, one row per order.
pub fn write_summary_tsv<W: Write>(summary: &Summary, mut out: W) -> std::io::Result<()> {
    writeln!(out, "order\tglobal_ccf\tavg_ccf\twedge_fraction\twedges\tclosed_cliques")?;
    for o in &summary.orders {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            o.order,
            fmt_opt(o.global_ccf),
            fmt_opt(o.avg_ccf),
            o.wedge_fraction,
            o.wedges,
            o.closed_cliques
        )?;
    }
    out.flush()
}

/// `C_ℓ` of `g` in double precision.
pub fn global_hoccf(g: &Graph, order: usize) -> Result<Option<f64>> {
    let report = ClusteringReport::<f64>::compute(g, order, &CliqueConfig::default())?;
    Ok(report.order(order).and_then(|r| r.global))
}

/// `κ_ℓ(u)` for every node of `g`.
pub fn local_hoccf(g: &Graph, order: usize) -> Result<Vec<Option<f64>>> {
    let report = ClusteringReport::<f64>::compute(g, order, &CliqueConfig::default())?;
    Ok(report.order(order).map(|r| r.local.clone()).unwrap_or_default())
}

/// `(C̄_ℓ, |Ṽ_ℓ|/|V|)` of `g`.
pub fn average_hoccf(g: &Graph, order: usize) -> Result<(Option<f64>, f64)> {
    let report = ClusteringReport::<f64>::compute(g, order, &CliqueConfig::default())?;
    Ok(report.order(order).map_or((None, 0.0), |r| (r.average, r.wedge_fraction)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    fn star(leaves: usize) -> Graph {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v)))
    }

    fn report(g: &Graph, max: usize) -> ClusteringReport<f64> {
        ClusteringReport::compute(g, max, &CliqueConfig::single_threaded()).unwrap()
    }

    #[test]
    fn triangle_wedges() {
        let g = complete(3);
        let counts = count_cliques(&g, 2, &CliqueConfig::single_threaded()).unwrap();
        let w = wedge_counts(&g, &counts[0]).unwrap();
        assert_eq!(w.per_node, vec![2, 2, 2]);
        assert_eq!(w.total, 6);
    }

    #[test]
    fn star_center_wedges_and_zero_clustering() {
        let g = star(5);
        let r = report(&g, 2);
        let o = r.order(2).unwrap();
        assert_eq!(o.wedges.per_node[0], 20);
        assert_eq!(o.global, Some(0.0));
        assert_eq!(o.local[0], Some(0.0));
        // Leaves have degree one: no wedge, undefined rather than zero.
        assert!(o.local[1..].iter().all(Option::is_none));
        assert!((o.wedge_fraction - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn complete_graph_is_fully_clustered() {
        let r = report(&complete(10), 4);
        for o in &r.orders {
            assert_eq!(o.global, Some(1.0));
            assert_eq!(o.average, Some(1.0));
            assert_eq!(o.wedge_fraction, 1.0);
            assert!(o.local.iter().all(|v| *v == Some(1.0)));
        }
    }

    #[test]
    fn order_beyond_clique_size_is_undefined() {
        // K3: no 3-wedge has a free node, so order 3 is undefined everywhere.
        let r = report(&complete(3), 3);
        let o3 = r.order(3).unwrap();
        assert_eq!(o3.global, None);
        assert_eq!(o3.average, None);
        assert_eq!(o3.wedge_fraction, 0.0);
        assert!(r.summary(&[2, 3]).any_undefined());
    }

    #[test]
    fn wedge_and_clique_forms_agree_exactly() {
        let g = complete(6).disjoint_union(&star(4));
        let counts = count_cliques(&g, 5, &CliqueConfig::single_threaded()).unwrap();
        for pair in counts.windows(2) {
            let w = wedge_counts(&g, &pair[0]).unwrap();
            let a = local_from_wedges::<BigRational>(&w, &pair[1]);
            let b = local_from_cliques::<BigRational>(&g, &pair[0], &pair[1]);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn baselines() {
        assert!((er_baseline(0.2f64, 3) - 0.04).abs() < 1e-15);
        assert_eq!(er_baseline(1.0f64, 5), 1.0);
        assert_eq!(er_baseline(0.0f64, 4), 0.0);
        assert_eq!(kk_upper_bound(0.25f64), 0.5);
        assert_eq!(kk_upper_bound(1.0f32), 1.0);
    }

    #[test]
    fn exports() {
        let g = star(2);
        let r = report(&g, 2);
        let mut table = Vec::new();
        write_node_table(&r, &g, &[2], &mut table).unwrap();
        assert_eq!(
            String::from_utf8(table).unwrap(),
            "node_label\tdegree\tkappa_2\twedges_2\n0\t2\t0\t2\n1\t1\tNA\t0\n2\t1\tNA\t0\n"
        );
        let mut summary = Vec::new();
        write_summary_tsv(&r.summary(&[2]), &mut summary).unwrap();
        let text = String::from_utf8(summary).unwrap();
        assert!(text.starts_with("order\tglobal_ccf\tavg_ccf\twedge_fraction\twedges\tclosed_cliques\n2\t0\t0\t"));
    }

    #[test]
    fn large_wedge_totals_convert() {
        let x: u128 = (1u128 << 70) + 5;
        let v: f64 = scalar_from_u128(x);
        assert!((v - x as f64).abs() / (x as f64) < 1e-12);
        let r: BigRational = scalar_from_u128(x);
        assert_eq!(r, BigRational::from_integer(num_bigint::BigInt::from(x)));
    }
}
