//! Peeling decoder for the erasure channel.
//!
//! Every pass snapshots the checks with exactly one erased neighbour and
//! recovers all of their variables at once, so the result does not depend on
//! the order in which those checks are visited.

use super::graph::TannerGraph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeelOutcome {
    /// Positions still erased after decoding.
    pub remaining: Vec<bool>,
    pub residual: usize,
    pub passes: usize,
}

impl PeelOutcome {
    pub fn success(&self) -> bool {
        self.residual == 0
    }
}

/// Per-thread buffers reused across decodes.
#[derive(Debug, Default)]
pub(crate) struct PeelScratch {
    count: Vec<u32>,
    sum: Vec<u64>,
    frontier: Vec<u32>,
    next: Vec<u32>,
    recover: Vec<u32>,
    queued: Vec<bool>,
}

/// Decodes `erased` on `g`, stopping after `max_iters` passes.
pub fn peel_decode(g: &TannerGraph, erased: &[bool], max_iters: usize) -> PeelOutcome {
    let mut remaining = erased.to_vec();
    let (residual, passes) = peel_in_place(g, &mut remaining, max_iters, &mut PeelScratch::default());
    PeelOutcome {
        remaining,
        residual,
        passes,
    }
}

pub(crate) fn peel_in_place(
    g: &TannerGraph,
    erased: &mut [bool],
    max_iters: usize,
    s: &mut PeelScratch,
) -> (usize, usize) {
    assert_eq!(erased.len(), g.n(), "erasure pattern length");
    let m = g.m();
    s.count.clear();
    s.count.resize(m, 0);
    s.sum.clear();
    s.sum.resize(m, 0);
    s.queued.clear();
    s.queued.resize(m, false);
    let mut residual = 0;
    for v in 0..g.n() {
        if erased[v] {
            residual += 1;
            for &c in g.var_neighbors(v) {
                s.count[c as usize] += 1;
                s.sum[c as usize] += v as u64;
            }
        }
    }
    if residual == 0 {
        return (0, 0);
    }
    s.frontier.clear();
    s.frontier
        .extend((0..m as u32).filter(|&c| s.count[c as usize] == 1));

    let mut passes = 0;
    while !s.frontier.is_empty() && passes < max_iters {
        passes += 1;
        s.recover.clear();
        for &c in &s.frontier {
            if s.count[c as usize] == 1 {
                s.recover.push(s.sum[c as usize] as u32);
            }
        }
        s.recover.sort_unstable();
        s.recover.dedup();
        s.next.clear();
        for &v in &s.recover {
            if !erased[v as usize] {
                continue;
            }
            erased[v as usize] = false;
            residual -= 1;
            for &c in g.var_neighbors(v as usize) {
                let ci = c as usize;
                s.count[ci] -= 1;
                s.sum[ci] -= v as u64;
                if !s.queued[ci] {
                    s.queued[ci] = true;
                    s.next.push(c);
                }
            }
        }
        s.frontier.clear();
        for &c in &s.next {
            s.queued[c as usize] = false;
            if s.count[c as usize] == 1 {
                s.frontier.push(c);
            }
        }
    }
    (residual, passes)
}
