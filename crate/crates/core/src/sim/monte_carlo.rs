//! Monte Carlo estimation of erasure rates over a sweep of channel parameters.
//!
//! Trial `t` at sweep index `k` draws everything from its own ChaCha8 stream
//! `(k << 40) | t` under the master seed, and batches are folded in trial
//! order, so results do not depend on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::graph::{sample_graph_with, GraphOptions, TannerGraph};
use super::peel::{peel_in_place, PeelScratch};
use crate::ensemble::Ensemble;
use crate::error::{Error, Result};

const FIXED_GRAPH_STREAM: u64 = u64::MAX;
const FIRST_BATCH: u64 = 64;
const MAX_BATCH: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: usize,
    pub max_iters: usize,
    pub stop_target: u64,
    pub trial_cap: u64,
    /// Reuse one sampled graph for every trial instead of a fresh one per trial.
    pub fixed_graph: bool,
    pub remove_multi_edges: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n: 5000,
            max_iters: 200,
            stop_target: 100,
            trial_cap: 10_000_000,
            fixed_graph: false,
            remove_multi_edges: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimPoint {
    pub eps: f64,
    pub trials: u64,
    pub word_events: u64,
    pub residual_bits: u64,
    pub wer: f64,
    pub ber: f64,
    /// The trial cap was hit before `stop_target` word erasures.
    pub capped: bool,
}

impl SimPoint {
    /// Binomial standard error of the word erasure rate.
    pub fn wer_std_error(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        (self.wer * (1.0 - self.wer) / self.trials as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimCurve {
    pub points: Vec<SimPoint>,
    pub master_seed: u64,
    pub config: SimConfig,
}

impl SimCurve {
    /// Linear interpolation of the channel parameter where the WER crosses `level`.
    pub fn crossing(&self, level: f64) -> Option<f64> {
        self.points.windows(2).find_map(|w| {
            let (a, b) = (&w[0], &w[1]);
            if a.wer <= level && b.wer >= level && b.wer > a.wer {
                Some(a.eps + (level - a.wer) / (b.wer - a.wer) * (b.eps - a.eps))
            } else {
                None
            }
        })
    }

    /// Index pairs where the WER drops by more than `k` combined standard errors.
    pub fn monotonicity_violations(&self, k: f64) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                let (a, b) = (&self.points[i], &self.points[j]);
                let se = (a.wer_std_error().powi(2) + b.wer_std_error().powi(2)).sqrt();
                if a.wer - b.wer > k * se.max(1e-12) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["eps", "trials", "word_events", "wer", "ber", "capped"])
            .map_err(|e| Error::Io(e.to_string()))?;
        for p in &self.points {
            w.write_record([
                format!("{}", p.eps),
                p.trials.to_string(),
                p.word_events.to_string(),
                format!("{:.6e}", p.wer),
                format!("{:.6e}", p.ber),
                p.capped.to_string(),
            ])
            .map_err(|e| Error::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

fn trial_rng(master: u64, eps_idx: usize, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(((eps_idx as u64) << 40) | trial);
    rng
}

struct Scratch {
    erased: Vec<bool>,
    peel: PeelScratch,
}

fn run_trial(
    e: &Ensemble,
    fixed: Option<&TannerGraph>,
    eps: f64,
    cfg: &SimConfig,
    mut rng: ChaCha8Rng,
    s: &mut Scratch,
) -> Result<usize> {
    let opts = GraphOptions {
        remove_multi_edges: cfg.remove_multi_edges,
    };
    let fresh;
    let g = match fixed {
        Some(g) => g,
        None => {
            fresh = sample_graph_with(e, cfg.n, &mut rng, 0, opts)?;
            &fresh
        }
    };
    s.erased.clear();
    s.erased.extend((0..cfg.n).map(|_| rng.gen::<f64>() < eps));
    let (residual, _) = peel_in_place(g, &mut s.erased, cfg.max_iters, &mut s.peel);
    Ok(residual)
}

/// Estimates word and bit erasure rates of `e` at every channel parameter in `eps_list`.
pub fn monte_carlo(
    e: &Ensemble,
    eps_list: &[f64],
    cfg: &SimConfig,
    master_seed: u64,
) -> Result<SimCurve> {
    if cfg.stop_target == 0 || cfg.trial_cap == 0 || cfg.n == 0 {
        return Err(Error::param("config", "n, stop target and trial cap must be positive"));
    }
    if let Some(&bad) = eps_list.iter().find(|&&x| !(0.0..=1.0).contains(&x)) {
        return Err(Error::param("eps", format!("{bad} is not a probability")));
    }
    let fixed = if cfg.fixed_graph {
        let mut rng = trial_rng(master_seed, 0, 0);
        rng.set_stream(FIXED_GRAPH_STREAM);
        let opts = GraphOptions {
            remove_multi_edges: cfg.remove_multi_edges,
        };
        Some(sample_graph_with(e, cfg.n, &mut rng, master_seed, opts)?)
    } else {
        None
    };

    let mut points = Vec::with_capacity(eps_list.len());
    for (k, &eps) in eps_list.iter().enumerate() {
        let (mut trials, mut words, mut bits) = (0u64, 0u64, 0u64);
        let mut batch = FIRST_BATCH;
        'point: while trials < cfg.trial_cap && words < cfg.stop_target {
            let end = (trials + batch).min(cfg.trial_cap);
            let results: Vec<usize> = (trials..end)
                .into_par_iter()
                .map_init(
                    || Scratch {
                        erased: Vec::with_capacity(cfg.n),
                        peel: PeelScratch::default(),
                    },
                    |s, t| run_trial(e, fixed.as_ref(), eps, cfg, trial_rng(master_seed, k, t), s),
                )
                .collect::<Result<_>>()?;
            for r in results {
                trials += 1;
                if r > 0 {
                    words += 1;
                    bits += r as u64;
                    if words >= cfg.stop_target {
                        break 'point;
                    }
                }
            }
            batch = (batch * 2).min(MAX_BATCH);
        }
        points.push(SimPoint {
            eps,
            trials,
            word_events: words,
            residual_bits: bits,
            wer: words as f64 / trials as f64,
            ber: bits as f64 / (trials as f64 * cfg.n as f64),
            capped: words < cfg.stop_target,
        });
    }
    Ok(SimCurve {
        points,
        master_seed,
        config: *cfg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::DegreeDistribution;

    fn ensemble() -> Ensemble {
        Ensemble::new(
            DegreeDistribution::variable([(3, 1.0)]).unwrap(),
            DegreeDistribution::check_regular(6).unwrap(),
        )
    }

    fn small() -> SimConfig {
        SimConfig {
            n: 500,
            stop_target: 20,
            trial_cap: 2000,
            ..SimConfig::default()
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let a = monte_carlo(&ensemble(), &[0.4, 0.45], &small(), 11).unwrap();
        let b = monte_carlo(&ensemble(), &[0.4, 0.45], &small(), 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn stops_exactly_at_target() {
        let c = monte_carlo(&ensemble(), &[0.6], &small(), 1).unwrap();
        let p = &c.points[0];
        assert_eq!(p.word_events, 20);
        assert_eq!(p.trials, 20);
        assert!(!p.capped);
    }

    #[test]
    fn cap_is_flagged() {
        let cfg = SimConfig {
            trial_cap: 50,
            ..small()
        };
        let c = monte_carlo(&ensemble(), &[0.001], &cfg, 1).unwrap();
        assert_eq!(c.points[0].trials, 50);
        assert!(c.points[0].capped);
    }

    #[test]
    fn fixed_graph_is_deterministic() {
        let cfg = SimConfig {
            fixed_graph: true,
            ..small()
        };
        let a = monte_carlo(&ensemble(), &[0.45], &cfg, 5).unwrap();
        let b = monte_carlo(&ensemble(), &[0.45], &cfg, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let c = monte_carlo(&ensemble(), &[0.6], &small(), 1).unwrap();
        let csv = c.to_csv().unwrap();
        assert!(csv.starts_with("eps,trials,word_events,wer,ber,capped"));
        assert_eq!(csv.lines().count(), 2);
    }
}
