//! Weighted graphs and the graph-side machinery: random-walk mean first
//! passage times, the passage-time dissimilarity index, evidential semi-local
//! centrality, and centrality-guided prototype seeding.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::dissimilarity::{DissimilarityMatrix, PrototypeSet};
use crate::EPS;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("graph must have at least {want} nodes (got {got})")]
    TooSmall { got: usize, want: usize },
    #[error("self-loop on node {0} is not allowed")]
    SelfLoop(String),
    #[error("edge weight {weight} on ({u}, {v}) must be positive and finite")]
    BadWeight { u: String, v: String, weight: f64 },
    #[error("weight matrix must be symmetric: entry ({0},{1}) differs from its mirror")]
    Asymmetric(usize, usize),
    #[error("node {0} is isolated (zero strength)")]
    IsolatedNode(String),
    #[error("graph is disconnected: {} components ({})", components.len(), describe_components(components))]
    Disconnected { components: Vec<Vec<String>> },
    #[error("passage-time system is singular")]
    SingularSystem,
    #[error("{c} seeds requested but the graph has {n} nodes")]
    TooManySeeds { c: usize, n: usize },
    #[error("seed threshold mu must lie in (0, 1] (got {0})")]
    BadMu(f64),
    #[error("mu_decay must lie in (0, 1) (got {0})")]
    BadMuDecay(f64),
    #[error("scores length {got} does not match {want} nodes")]
    ScoreLength { got: usize, want: usize },
}

fn describe_components(components: &[Vec<String>]) -> String {
    components
        .iter()
        .map(|c| {
            let shown: Vec<&str> = c.iter().take(4).map(String::as_str).collect();
            let ellipsis = if c.len() > 4 { ", …" } else { "" };
            format!("{} nodes: [{}{}]", c.len(), shown.join(", "), ellipsis)
        })
        .collect::<Vec<_>>()
        .join(" | ")
}

/// An undirected weighted graph without self-loops, with external node labels.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    node_ids: Vec<String>,
    w: Vec<f64>,
}

impl WeightedGraph {
    /// Builds from an accumulated symmetric weight matrix.
    pub fn new(node_ids: Vec<String>, w: Vec<f64>) -> Result<WeightedGraph, GraphError> {
        let n = node_ids.len();
        if n == 0 {
            return Err(GraphError::TooSmall { got: 0, want: 1 });
        }
        assert_eq!(w.len(), n * n, "weight buffer shape");
        for i in 0..n {
            if w[i * n + i] != 0.0 {
                return Err(GraphError::SelfLoop(node_ids[i].clone()));
            }
            for j in 0..n {
                let v = w[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(GraphError::BadWeight {
                        u: node_ids[i].clone(),
                        v: node_ids[j].clone(),
                        weight: v,
                    });
                }
                if w[j * n + i] != v {
                    return Err(GraphError::Asymmetric(i, j));
                }
            }
        }
        Ok(WeightedGraph { node_ids, w })
    }

    /// Builds from undirected edges over `0..n`; duplicate edges sum weights.
    pub fn from_edges(
        node_ids: Vec<String>,
        edges: &[(usize, usize, f64)],
    ) -> Result<WeightedGraph, GraphError> {
        let n = node_ids.len();
        let mut w = vec![0.0; n * n];
        for &(u, v, weight) in edges {
            if u == v {
                return Err(GraphError::SelfLoop(node_ids[u].clone()));
            }
            if !weight.is_finite() || weight <= 0.0 {
                return Err(GraphError::BadWeight {
                    u: node_ids[u].clone(),
                    v: node_ids[v].clone(),
                    weight,
                });
            }
            w[u * n + v] += weight;
            w[v * n + u] += weight;
        }
        WeightedGraph::new(node_ids, w)
    }

    pub fn n(&self) -> usize {
        self.node_ids.len()
    }

    pub fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.n() + j]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.weight(i, j) > 0.0
    }

    /// Σ_ij w_ij (each undirected edge counted from both endpoints).
    pub fn total_weight(&self) -> f64 {
        self.w.iter().sum()
    }

    /// Weighted degree (strength) of each node.
    pub fn strengths(&self) -> Vec<f64> {
        (0..self.n()).map(|i| (0..self.n()).map(|j| self.weight(i, j)).sum()).collect()
    }

    /// Unweighted degree of each node.
    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n()).map(|i| (0..self.n()).filter(|&j| self.has_edge(i, j)).count()).collect()
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.n()).filter(|&j| self.has_edge(i, j)).collect()
    }

    /// Connected components as node-index lists, each in ascending order,
    /// ordered by their smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut components = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut stack = vec![start];
            let mut comp = Vec::new();
            seen[start] = true;
            while let Some(i) = stack.pop() {
                comp.push(i);
                for j in 0..n {
                    if !seen[j] && self.has_edge(i, j) {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            comp.sort_unstable();
            components.push(comp);
        }
        components
    }

    pub fn require_connected(&self) -> Result<(), GraphError> {
        if let Some(i) = (0..self.n()).find(|&i| self.neighbors(i).is_empty()) {
            return Err(GraphError::IsolatedNode(self.node_ids[i].clone()));
        }
        let components = self.connected_components();
        if components.len() > 1 {
            return Err(GraphError::Disconnected {
                components: components
                    .iter()
                    .map(|c| c.iter().map(|&i| self.node_ids[i].clone()).collect())
                    .collect(),
            });
        }
        Ok(())
    }

    /// Induced subgraph on `keep` (ascending indices); returns the subgraph
    /// and the original index of each kept node.
    pub fn subgraph(&self, keep: &[usize]) -> Result<(WeightedGraph, Vec<usize>), GraphError> {
        let ids = keep.iter().map(|&i| self.node_ids[i].clone()).collect();
        let m = keep.len();
        let mut w = vec![0.0; m * m];
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                w[a * m + b] = self.weight(i, j);
            }
        }
        Ok((WeightedGraph::new(ids, w)?, keep.to_vec()))
    }

    /// Largest connected component (ties by smallest member) with the original
    /// index of each kept node.
    pub fn largest_component(&self) -> Result<(WeightedGraph, Vec<usize>), GraphError> {
        let components = self.connected_components();
        let largest = components
            .iter()
            .max_by(|a, b| a.len().cmp(&b.len()).then(b[0].cmp(&a[0])))
            .expect("graph is non-empty");
        self.subgraph(largest)
    }
}

/// Mean first passage times of the natural random walk: entry (x, y) is the
/// expected number of steps from x until first reaching y. Solved per target
/// column from the walk's linear equations. Requires a connected graph.
pub fn mean_first_passage_times(g: &WeightedGraph) -> Result<DissimilarityMatrix, GraphError> {
    let n = g.n();
    if n < 2 {
        return Err(GraphError::TooSmall { got: n, want: 2 });
    }
    g.require_connected()?;
    let strengths = g.strengths();
    let p = DMatrix::from_fn(n, n, |i, j| g.weight(i, j) / strengths[i]);
    let ones = DVector::from_element(n, 1.0);
    let mut t = vec![0.0; n * n];
    for y in 0..n {
        // I − B(y), where B(y) is the transition matrix with column y zeroed
        // (the walk stops on reaching y).
        let mut b = DMatrix::identity(n, n) - &p;
        for i in 0..n {
            b[(i, y)] = if i == y { 1.0 } else { 0.0 };
        }
        let sol = b.lu().solve(&ones).ok_or(GraphError::SingularSystem)?;
        for x in 0..n {
            t[x * n + y] = if x == y { 0.0 } else { sol[x] };
        }
    }
    DissimilarityMatrix::from_flat(n, t).map_err(|_| GraphError::SingularSystem)
}

/// Raw and seeding-normalized passage-time dissimilarities.
#[derive(Clone, Debug)]
pub struct ZhouDissimilarity {
    /// Root-mean-square gap between two nodes' passage-time profiles.
    pub raw: DissimilarityMatrix,
    /// `raw` divided by its mean off-diagonal entry; the seed-acceptance
    /// threshold μ operates on this scale-free copy.
    pub seeding: DissimilarityMatrix,
}

/// Dissimilarity index over a passage-time matrix: Λ(x,y) is the RMS
/// difference of t(x,·) and t(y,·) over the other n−2 nodes. Symmetric with
/// zero diagonal even for asymmetric t.
pub fn zhou_dissimilarity(t: &DissimilarityMatrix) -> Result<ZhouDissimilarity, GraphError> {
    let n = t.n();
    if n < 3 {
        return Err(GraphError::TooSmall { got: n, want: 3 });
    }
    let mut lam = vec![0.0; n * n];
    for x in 0..n {
        for y in x + 1..n {
            let mut acc = 0.0;
            for z in 0..n {
                if z == x || z == y {
                    continue;
                }
                let diff = t.get(x, z) - t.get(y, z);
                acc += diff * diff;
            }
            let value = (acc / (n - 2) as f64).sqrt();
            lam[x * n + y] = value;
            lam[y * n + x] = value;
        }
    }
    let raw = DissimilarityMatrix::from_flat(n, lam).map_err(|_| GraphError::SingularSystem)?;
    let mean = raw.mean_off_diagonal();
    let seeding =
        if mean > EPS { raw.scaled(1.0 / mean).expect("scaling preserves validity") } else { raw.clone() };
    Ok(ZhouDissimilarity { raw, seeding })
}

/// Evidential semi-local centrality. Per node, degree and strength evidence
/// on a {high, low} frame are fused and reduced to an importance score,
/// then aggregated over one- and two-hop neighborhoods.
pub fn esc_centrality(g: &WeightedGraph) -> Result<Vec<f64>, GraphError> {
    let n = g.n();
    if n < 2 {
        return Err(GraphError::TooSmall { got: n, want: 2 });
    }
    let degrees: Vec<f64> = g.degrees().iter().map(|&d| d as f64).collect();
    let strengths = g.strengths();
    let (k_min, k_max) = min_max(&degrees);
    let (w_min, w_max) = min_max(&strengths);
    // The +1 softening keeps both denominators positive on regular graphs and
    // provably leaves the ranking untouched.
    let dk = k_max - k_min + 1.0;
    let dw = w_max - w_min + 1.0;
    let mut mec_star = vec![0.0; n];
    for i in 0..n {
        let rank = degrees.iter().filter(|&&kj| kj <= degrees[i]).count() as f64 / n as f64;
        let (h1, l1) = (rank * (degrees[i] - k_min) / dk, rank * (k_max - degrees[i]) / dk);
        let t1 = 1.0 - h1 - l1;
        let (h2, l2) = ((strengths[i] - w_min) / dw, (w_max - strengths[i]) / dw);
        let t2 = 1.0 - h2 - l2;
        let conflict = h1 * l2 + l1 * h2;
        let norm = 1.0 - conflict;
        let h = (h1 * h2 + h1 * t2 + t1 * h2) / norm;
        let l = (l1 * l2 + l1 * t2 + t1 * l2) / norm;
        mec_star[i] = h - l;
    }
    let min_star = mec_star.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let shift = min_star.abs();
    let total: f64 = mec_star.iter().map(|&v| shift + v).sum();
    let mec: Vec<f64> = if total <= EPS {
        // Fully regular evidence: fall back to uniform importance.
        vec![1.0 / n as f64; n]
    } else {
        mec_star.iter().map(|&v| (shift + v) / total).collect()
    };
    // Semi-local aggregation: R sums importance over ≤ 2-hop walks, then two
    // more neighbor-sum rounds.
    let adj_mul = |x: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| (0..n).filter(|&j| g.has_edge(i, j)).map(|j| x[j]).sum())
            .collect()
    };
    let a_mec = adj_mul(&mec);
    let aa_mec = adj_mul(&a_mec);
    let r: Vec<f64> = (0..n).map(|i| mec[i] + a_mec[i] + aa_mec[i]).collect();
    let b = adj_mul(&r);
    Ok(adj_mul(&b))
}

fn min_max(xs: &[f64]) -> (f64, f64) {
    xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// Seeding parameters: acceptance threshold μ on normalized dissimilarity and
/// its decay factor applied whenever a scan fails to gather enough seeds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeedConfig {
    pub mu: f64,
    pub mu_decay: f64,
    pub c: usize,
}

impl SeedConfig {
    pub fn new(c: usize) -> SeedConfig {
        SeedConfig { mu: 0.9, mu_decay: 0.9, c }
    }

    fn validate(&self) -> Result<(), GraphError> {
        if !(self.mu > 0.0 && self.mu <= 1.0) {
            return Err(GraphError::BadMu(self.mu));
        }
        if !(self.mu_decay > 0.0 && self.mu_decay < 1.0) {
            return Err(GraphError::BadMuDecay(self.mu_decay));
        }
        Ok(())
    }
}

/// Greedy centrality-ranked seeding: scan nodes by decreasing score and accept
/// one when its normalized dissimilarity to every accepted seed exceeds μ;
/// decay μ and restart the scan whenever it comes up short. Once μ underflows
/// (an all-zero dissimilarity, e.g. a complete graph) the top-scored nodes are
/// accepted as-is.
pub fn select_prototypes(
    scores: &[f64],
    d_norm: &DissimilarityMatrix,
    cfg: &SeedConfig,
) -> Result<PrototypeSet, GraphError> {
    cfg.validate()?;
    let n = d_norm.n();
    if scores.len() != n {
        return Err(GraphError::ScoreLength { got: scores.len(), want: n });
    }
    if cfg.c > n {
        return Err(GraphError::TooManySeeds { c: cfg.c, n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut mu = cfg.mu;
    loop {
        if mu < EPS {
            return Ok(PrototypeSet::new(order[..cfg.c].to_vec(), n)
                .expect("scan order is distinct"));
        }
        let mut seeds: Vec<usize> = Vec::with_capacity(cfg.c);
        for &i in &order {
            if seeds.iter().all(|&s| d_norm.get(i, s) > mu) {
                seeds.push(i);
                if seeds.len() == cfg.c {
                    return Ok(PrototypeSet::new(seeds, n).expect("scan order is distinct"));
                }
            }
        }
        mu *= cfg.mu_decay;
    }
}
