//! End-to-end community detection: mean-first-passage dissimilarity, seed
//! selection, credal clustering per candidate community count, and model
//! selection by evidential modularity.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::{mfcm_fit, BaselineError};
use crate::belief::{BeliefError, FocalStructure};
use crate::dissimilarity::PrototypeSet;
use crate::eval::{contour_matrix, modularity, EvalError};
use crate::graph::{
    esc_centrality, mean_first_passage_times, zhou_dissimilarity, GraphError, SeedConfig,
    WeightedGraph,
};
use crate::mecm::{mecm_fit, CredalPartition, FitReport, MecmError, MecmParams};

#[derive(Debug, Error, PartialEq)]
pub enum PipelineError {
    #[error("candidate range needs 2 ≤ c_min ≤ c_max, got [{0}, {1}]")]
    BadRange(usize, usize),
    #[error("largest candidate count {c_max} exceeds the node count {n}")]
    RangeTooWide { c_max: usize, n: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Clustering(#[from] MecmError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Belief(#[from] BeliefError),
}

/// How the sweep seeds each clustering run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum InitStrategy {
    /// Evidential semi-local centrality scan with the μ spacing rule.
    Esc,
    /// Fuzzy median clustering started from the centrality seeds; its final
    /// prototypes start the credal fit.
    MfcmRefined,
    /// Uniform distinct sample; one generator seeded here drives the whole
    /// sweep.
    Random { seed: u64 },
}

/// Sweep settings. `mecm` and `seed_cfg` act as templates: their cluster
/// counts are overwritten with each candidate c.
#[derive(Clone, Debug)]
pub struct DetectionConfig {
    pub c_min: usize,
    pub c_max: usize,
    pub mecm: MecmParams,
    pub seed_cfg: SeedConfig,
    pub init_strategy: InitStrategy,
}

impl DetectionConfig {
    pub fn new(c_min: usize, c_max: usize, mecm: MecmParams) -> DetectionConfig {
        DetectionConfig {
            c_min,
            c_max,
            mecm,
            seed_cfg: SeedConfig::new(c_min),
            init_strategy: InitStrategy::Esc,
        }
    }
}

/// Outcome of a sweep: the winning model plus the full modularity trace so
/// near-peaks stay visible.
#[derive(Clone, Debug)]
pub struct DetectionResult {
    pub best_c: usize,
    pub partition: CredalPartition,
    pub prototypes: PrototypeSet,
    pub q_trace: Vec<(usize, f64)>,
    pub per_c_reports: Vec<FitReport>,
}

/// First strict maximum of the trace; scanning in ascending c keeps the
/// smaller count on ties.
fn peak_of(q_trace: &[(usize, f64)]) -> usize {
    let mut best = 0;
    for j in 1..q_trace.len() {
        if q_trace[j].1 > q_trace[best].1 {
            best = j;
        }
    }
    best
}

/// Runs the full detection sweep on a connected graph: the dissimilarity
/// matrix and centrality scores are computed once, then every candidate c in
/// `[c_min, c_max]` is seeded, fitted, and scored by evidential modularity.
pub fn detect_communities(
    g: &WeightedGraph,
    cfg: &DetectionConfig,
) -> Result<DetectionResult, PipelineError> {
    if cfg.c_min < 2 || cfg.c_min > cfg.c_max {
        return Err(PipelineError::BadRange(cfg.c_min, cfg.c_max));
    }
    let n = g.n();
    if cfg.c_max > n {
        return Err(PipelineError::RangeTooWide { c_max: cfg.c_max, n });
    }
    g.require_connected()?;

    let t = mean_first_passage_times(g)?;
    let zd = zhou_dissimilarity(&t)?;
    let scores = esc_centrality(g)?;
    let mut rng = match cfg.init_strategy {
        InitStrategy::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };

    let mut q_trace = Vec::new();
    let mut per_c_reports = Vec::new();
    let mut fits = Vec::new();
    for c in cfg.c_min..=cfg.c_max {
        let mut params = cfg.mecm.clone();
        params.c = c;
        let mut seed_cfg = cfg.seed_cfg.clone();
        seed_cfg.c = c;

        let init = match (&cfg.init_strategy, rng.as_mut()) {
            (InitStrategy::Random { .. }, Some(rng)) => {
                let picks = rand::seq::index::sample(rng, n, c).into_vec();
                PrototypeSet::new(picks, n).map_err(MecmError::from)?
            }
            _ => {
                let esc_seeds = crate::graph::select_prototypes(&scores, &zd.seeding, &seed_cfg)?;
                if cfg.init_strategy == InitStrategy::MfcmRefined {
                    let (_, refined, _) =
                        mfcm_fit(&zd.raw, c, params.beta, &esc_seeds, params.max_iter)?;
                    refined
                } else {
                    esc_seeds
                }
            }
        };

        let structure = FocalStructure::auto(c)?;
        let (partition, prototypes, report) = mecm_fit(&zd.raw, &params, &structure, &init)?;
        let q = modularity(g, &contour_matrix(&partition), c)?;
        q_trace.push((c, q));
        per_c_reports.push(report);
        fits.push((partition, prototypes));
    }

    let peak = peak_of(&q_trace);
    let (partition, prototypes) = fits.swap_remove(peak);
    Ok(DetectionResult {
        best_c: q_trace[peak].0,
        partition,
        prototypes,
        q_trace,
        per_c_reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Two dense blobs of four nodes, joined by a single bridge.
    fn two_blob_graph() -> WeightedGraph {
        let ids = (0..8).map(|i| i.to_string()).collect();
        let mut edges = Vec::new();
        for block in 0..2 {
            let base = block * 4;
            for i in 0..4usize {
                for j in i + 1..4 {
                    edges.push((base + i, base + j, 1.0));
                }
            }
        }
        edges.push((3, 4, 1.0));
        WeightedGraph::from_edges(ids, &edges).unwrap()
    }

    fn config(c_min: usize, c_max: usize) -> DetectionConfig {
        DetectionConfig::new(c_min, c_max, MecmParams::new(c_min, 1.0, 2.0, 100.0, 0.5, 0.9))
    }

    #[test]
    fn degenerate_sweep_returns_that_count() {
        let g = two_blob_graph();
        let out = detect_communities(&g, &config(2, 2)).unwrap();
        assert_eq!(out.best_c, 2);
        assert_eq!(out.q_trace.len(), 1);
        assert_eq!(out.per_c_reports.len(), 1);
        assert_eq!(out.partition.n(), 8);
    }

    #[test]
    fn two_blobs_pick_two_communities() {
        let g = two_blob_graph();
        let out = detect_communities(&g, &config(2, 4)).unwrap();
        assert_eq!(out.best_c, 2);
        let hard = crate::eval::harden_pignistic(&out.partition).unwrap();
        let labels = hard.labels();
        assert_eq!(labels[0], labels[1]);
        assert_eq!(labels[0], labels[2]);
        assert_eq!(labels[4], labels[5]);
        assert_ne!(labels[0], labels[4]);
    }

    #[test]
    fn sweep_is_deterministic() {
        let g = two_blob_graph();
        for strategy in [
            InitStrategy::Esc,
            InitStrategy::MfcmRefined,
            InitStrategy::Random { seed: 11 },
        ] {
            let mut cfg = config(2, 3);
            cfg.init_strategy = strategy;
            let a = detect_communities(&g, &cfg).unwrap();
            let b = detect_communities(&g, &cfg).unwrap();
            assert_eq!(a.best_c, b.best_c);
            assert_eq!(a.q_trace, b.q_trace);
            assert_eq!(a.partition.masses(), b.partition.masses());
            assert_eq!(a.prototypes.indices(), b.prototypes.indices());
        }
    }

    #[test]
    fn trace_matches_degenerate_recomputation() {
        let g = two_blob_graph();
        let sweep = detect_communities(&g, &config(2, 4)).unwrap();
        for &(c, q) in &sweep.q_trace {
            let single = detect_communities(&g, &config(c, c)).unwrap();
            assert_eq!(single.q_trace[0], (c, q));
        }
        // The retained partition reproduces its own trace entry.
        let q_best = modularity(&g, &contour_matrix(&sweep.partition), sweep.best_c).unwrap();
        let traced = sweep
            .q_trace
            .iter()
            .find(|(c, _)| *c == sweep.best_c)
            .unwrap()
            .1;
        assert_abs_diff_eq!(q_best, traced);
    }

    #[test]
    fn peak_scan_prefers_smaller_count_on_ties() {
        assert_eq!(peak_of(&[(2, 0.5), (3, 0.5), (4, 0.4)]), 0);
        assert_eq!(peak_of(&[(2, 0.1), (3, 0.5), (4, 0.5)]), 1);
        assert_eq!(peak_of(&[(2, 0.1), (3, 0.2), (4, 0.5)]), 2);
    }

    #[test]
    fn range_validation() {
        let g = two_blob_graph();
        assert_eq!(
            detect_communities(&g, &config(1, 3)).unwrap_err(),
            PipelineError::BadRange(1, 3)
        );
        assert_eq!(
            detect_communities(&g, &config(4, 3)).unwrap_err(),
            PipelineError::BadRange(4, 3)
        );
        assert_eq!(
            detect_communities(&g, &config(2, 9)).unwrap_err(),
            PipelineError::RangeTooWide { c_max: 9, n: 8 }
        );
    }

    #[test]
    fn random_strategy_uses_one_stream() {
        // Determinism of the shared stream is covered above; here we only
        // assert the sweep completes and stays in range.
        let g = two_blob_graph();
        let mut cfg = config(2, 3);
        cfg.init_strategy = InitStrategy::Random { seed: 3 };
        let out = detect_communities(&g, &cfg).unwrap();
        assert!(out.best_c == 2 || out.best_c == 3);
    }
}
