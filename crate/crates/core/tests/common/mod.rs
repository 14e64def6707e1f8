//! Reference implementations used to check the library from the outside.
//! Everything here works from an adjacency matrix and plain enumeration.
#![allow(dead_code)]

use hocc_core::{BigRational, Graph};
use num_bigint::BigInt;

pub fn matrix(g: &Graph) -> Vec<Vec<bool>> {
    let mut a = vec![vec![false; g.n()]; g.n()];
    for (u, v) in g.edges() {
        a[u][v] = true;
        a[v][u] = true;
    }
    a
}

/// Every clique of exactly `size` nodes, as sorted node lists.
pub fn cliques(a: &[Vec<bool>], size: usize) -> Vec<Vec<usize>> {
    fn grow(a: &[Vec<bool>], size: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for v in from..a.len() {
            if cur.iter().all(|&w| a[v][w]) {
                cur.push(v);
                grow(a, size, v + 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    grow(a, size, 0, &mut Vec::new(), &mut out);
    out
}

/// `|K_size(u)|` for every node.
pub fn per_node_cliques(a: &[Vec<bool>], size: usize) -> Vec<u64> {
    let mut counts = vec![0u64; a.len()];
    for k in cliques(a, size) {
        for u in k {
            counts[u] += 1;
        }
    }
    counts
}

/// Wedges of order `order` centered at each node, and how many are closed:
/// each `order`-clique through the center plus one more neighbor of the
/// center, closed when that neighbor is adjacent to the whole clique.
pub fn wedges(a: &[Vec<bool>], order: usize) -> Vec<(u64, u64)> {
    let mut out = vec![(0u64, 0u64); a.len()];
    for k in cliques(a, order) {
        for &u in &k {
            for v in 0..a.len() {
                if a[u][v] && !k.contains(&v) {
                    out[u].0 += 1;
                    if k.iter().all(|&w| a[v][w]) {
                        out[u].1 += 1;
                    }
                }
            }
        }
    }
    out
}

pub fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Local coefficient as the closed fraction of wedges.
pub fn local(a: &[Vec<bool>], order: usize) -> Vec<Option<BigRational>> {
    wedges(a, order).into_iter().map(|(w, c)| (w > 0).then(|| ratio(c, w))).collect()
}

/// Classical local clustering: closed neighbor pairs over all neighbor pairs.
pub fn classical_local(a: &[Vec<bool>]) -> Vec<Option<f64>> {
    (0..a.len())
        .map(|u| {
            let nb: Vec<usize> = (0..a.len()).filter(|&v| a[u][v]).collect();
            let d = nb.len();
            if d < 2 {
                return None;
            }
            let mut links = 0;
            for i in 0..d {
                for j in i + 1..d {
                    if a[nb[i]][nb[j]] {
                        links += 1;
                    }
                }
            }
            Some(2.0 * links as f64 / (d * (d - 1)) as f64)
        })
        .collect()
}

/// Transitivity: three times the triangles over connected triples.
pub fn transitivity(a: &[Vec<bool>]) -> Option<f64> {
    let triangles = cliques(a, 3).len() as f64;
    let triples: f64 = (0..a.len())
        .map(|u| {
            let d = a[u].iter().filter(|&&x| x).count() as f64;
            d * (d - 1.0) / 2.0
        })
        .sum();
    (triples > 0.0).then(|| 3.0 * triangles / triples)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn sample_std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}
