//! Configuration-model sampling of bipartite multigraphs.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ensemble::{DegreeDistribution, Ensemble};
use crate::error::{Error, Result};

/// Bipartite multigraph in compressed adjacency form, both directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TannerGraph {
    n: usize,
    m: usize,
    check_offsets: Vec<usize>,
    /// Variable index per edge, grouped by check.
    check_adj: Vec<u32>,
    var_offsets: Vec<usize>,
    /// Check index per edge, grouped by variable.
    var_adj: Vec<u32>,
    seed: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GraphOptions {
    /// Rewire parallel edges away by random edge swaps.
    pub remove_multi_edges: bool,
}

impl TannerGraph {
    /// Builds a graph from per-check variable lists. `n` is the variable count.
    pub fn from_adjacency(n: usize, checks: &[Vec<u32>], seed: u64) -> Result<Self> {
        let m = checks.len();
        let mut check_offsets = Vec::with_capacity(m + 1);
        let mut check_adj = Vec::new();
        check_offsets.push(0);
        for row in checks {
            if let Some(&v) = row.iter().find(|&&v| v as usize >= n) {
                return Err(Error::param("adjacency", format!("variable {v} out of range")));
            }
            check_adj.extend_from_slice(row);
            check_offsets.push(check_adj.len());
        }
        let mut deg = vec![0usize; n];
        for &v in &check_adj {
            deg[v as usize] += 1;
        }
        let mut var_offsets = Vec::with_capacity(n + 1);
        var_offsets.push(0);
        for d in &deg {
            var_offsets.push(var_offsets.last().unwrap() + d);
        }
        let mut fill = var_offsets[..n].to_vec();
        let mut var_adj = vec![0u32; check_adj.len()];
        for c in 0..m {
            for &v in &check_adj[check_offsets[c]..check_offsets[c + 1]] {
                var_adj[fill[v as usize]] = c as u32;
                fill[v as usize] += 1;
            }
        }
        Ok(Self {
            n,
            m,
            check_offsets,
            check_adj,
            var_offsets,
            var_adj,
            seed,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn edge_count(&self) -> usize {
        self.check_adj.len()
    }

    /// Variables on check `c`, with multiplicity.
    pub fn check_neighbors(&self, c: usize) -> &[u32] {
        &self.check_adj[self.check_offsets[c]..self.check_offsets[c + 1]]
    }

    /// Checks on variable `v`, with multiplicity.
    pub fn var_neighbors(&self, v: usize) -> &[u32] {
        &self.var_adj[self.var_offsets[v]..self.var_offsets[v + 1]]
    }

    pub fn var_degree_histogram(&self) -> BTreeMap<u32, usize> {
        histogram((0..self.n).map(|v| self.var_neighbors(v).len() as u32))
    }

    pub fn check_degree_histogram(&self) -> BTreeMap<u32, usize> {
        histogram((0..self.m).map(|c| self.check_neighbors(c).len() as u32))
    }

    /// Number of (check, variable) pairs joined by more than one edge.
    pub fn parallel_edge_pairs(&self) -> usize {
        let mut seen = HashSet::new();
        let mut dup = HashSet::new();
        for c in 0..self.m {
            for &v in self.check_neighbors(c) {
                if !seen.insert((c, v)) {
                    dup.insert((c, v));
                }
            }
        }
        dup.len()
    }
}

fn histogram(degrees: impl Iterator<Item = u32>) -> BTreeMap<u32, usize> {
    let mut h = BTreeMap::new();
    for d in degrees {
        *h.entry(d).or_insert(0) += 1;
    }
    h
}

/// Node counts per degree for `count` nodes, by largest remainder.
pub fn node_perspective(dist: &DegreeDistribution, count: usize) -> BTreeMap<u32, usize> {
    let inv = dist.avg_inverse_degree();
    let raw: Vec<(u32, f64)> = dist
        .iter()
        .map(|(d, c)| (d, c / d as f64 / inv * count as f64))
        .collect();
    let mut hist: BTreeMap<u32, usize> = raw.iter().map(|&(d, r)| (d, r.floor() as usize)).collect();
    let assigned: usize = hist.values().sum();
    let mut order: Vec<(u32, f64)> = raw.iter().map(|&(d, r)| (d, r - r.floor())).collect();
    // largest remainder first, ties to the lower degree
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    for &(d, _) in order.iter().take(count.saturating_sub(assigned)) {
        *hist.get_mut(&d).unwrap() += 1;
    }
    hist.retain(|_, c| *c > 0);
    hist
}

fn expand(hist: &BTreeMap<u32, usize>) -> Vec<u32> {
    hist.iter()
        .flat_map(|(&d, &c)| std::iter::repeat_n(d, c))
        .collect()
}

/// Check count `round(n(1 - R))` for design rate `R`.
pub fn check_count(e: &Ensemble, n: usize) -> usize {
    (n as f64 * (1.0 - e.design_rate())).round() as usize
}

/// Samples a Tanner graph with `n` variables from the configuration model.
///
/// Node degree histograms come from [`node_perspective`] on both sides; any
/// edge-count mismatch is absorbed on the check side by moving the
/// highest-degree checks up or down one degree each.
pub fn sample_graph(e: &Ensemble, n: usize, seed: u64, opts: GraphOptions) -> Result<TannerGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_graph_with(e, n, &mut rng, seed, opts)
}

pub(crate) fn sample_graph_with(
    e: &Ensemble,
    n: usize,
    rng: &mut impl Rng,
    seed: u64,
    opts: GraphOptions,
) -> Result<TannerGraph> {
    let m = check_count(e, n);
    if n < e.lambda.max_degree() as usize || m == 0 {
        return Err(Error::param(
            "n",
            format!("block length {n} too small for this ensemble"),
        ));
    }
    let var_deg = expand(&node_perspective(&e.lambda, n));
    let mut check_deg = expand(&node_perspective(&e.rho, m));
    let ev: usize = var_deg.iter().map(|&d| d as usize).sum();
    let ec: usize = check_deg.iter().map(|&d| d as usize).sum();
    let mut diff = ev as i64 - ec as i64;
    let mut k = m;
    while diff != 0 {
        k = if k == 0 { m - 1 } else { k - 1 };
        if diff > 0 {
            check_deg[k] += 1;
            diff -= 1;
        } else if check_deg[k] > 2 {
            check_deg[k] -= 1;
            diff += 1;
        }
    }

    let mut stubs: Vec<u32> = var_deg
        .iter()
        .enumerate()
        .flat_map(|(v, &d)| std::iter::repeat_n(v as u32, d as usize))
        .collect();
    stubs.shuffle(rng);
    if opts.remove_multi_edges {
        remove_parallel(&mut stubs, &check_deg, rng);
    }
    let mut checks = Vec::with_capacity(m);
    let mut at = 0;
    for &d in &check_deg {
        checks.push(stubs[at..at + d as usize].to_vec());
        at += d as usize;
    }
    if at != stubs.len() {
        return Err(Error::Solver(format!(
            "edge count mismatch after repair: {} vs {at}",
            stubs.len()
        )));
    }
    TannerGraph::from_adjacency(n, &checks, seed)
}

/// Swaps variable endpoints between edges until no check sees a variable twice,
/// giving up on an edge after a bounded number of attempts.
fn remove_parallel(stubs: &mut [u32], check_deg: &[u32], rng: &mut impl Rng) {
    let mut owner = Vec::with_capacity(stubs.len());
    for (c, &d) in check_deg.iter().enumerate() {
        owner.extend(std::iter::repeat_n(c as u32, d as usize));
    }
    let mut mult: HashMap<(u32, u32), u32> = HashMap::with_capacity(stubs.len());
    for (i, &v) in stubs.iter().enumerate() {
        *mult.entry((owner[i], v)).or_insert(0) += 1;
    }
    for i in 0..stubs.len() {
        if mult[&(owner[i], stubs[i])] < 2 {
            continue;
        }
        for _ in 0..1000 {
            let j = rng.gen_range(0..stubs.len());
            let (ci, vi, cj, vj) = (owner[i], stubs[i], owner[j], stubs[j]);
            let free = |k: (u32, u32)| mult.get(&k).copied().unwrap_or(0) == 0;
            if ci == cj || vi == vj || !free((ci, vj)) || !free((cj, vi)) {
                continue;
            }
            *mult.get_mut(&(ci, vi)).unwrap() -= 1;
            *mult.get_mut(&(cj, vj)).unwrap() -= 1;
            mult.insert((ci, vj), 1);
            mult.insert((cj, vi), 1);
            stubs.swap(i, j);
            break;
        }
    }
}
