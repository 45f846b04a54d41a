//! Seeded synthetic data: uniform overlapping discs, Gaussian mixtures, and
//! the thresholded Gaussian proximity graph.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::baselines::ObjectData;
use crate::graph::{GraphError, WeightedGraph};

#[derive(Debug, Error, PartialEq)]
pub enum GeneratorError {
    #[error("radius must be > 0 (got {0})")]
    BadRadius(f64),
    #[error("edge threshold must be > 0 (got {0})")]
    BadThreshold(f64),
    #[error("every component needs a positive count")]
    BadCount,
    #[error("covariance must be square ({0}×{0}) and match the mean length")]
    BadCovarianceShape(usize),
    #[error("covariance is not positive definite")]
    NotPositiveDefinite,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// One Gaussian mixture component.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussComponent {
    pub mean: Vec<f64>,
    pub cov: Vec<Vec<f64>>,
    pub count: usize,
}

/// Lower-triangular factor used to color standard normal draws; the all-zero
/// covariance degenerates to a point mass at the mean.
fn cholesky_factor(cov: &[Vec<f64>], p: usize) -> Result<DMatrix<f64>, GeneratorError> {
    if cov.len() != p || cov.iter().any(|row| row.len() != p) {
        return Err(GeneratorError::BadCovarianceShape(p));
    }
    let m = DMatrix::from_fn(p, p, |i, j| cov[i][j]);
    if m.iter().all(|&v| v == 0.0) {
        return Ok(DMatrix::zeros(p, p));
    }
    Ok(m.cholesky().ok_or(GeneratorError::NotPositiveDefinite)?.l())
}

fn sample_gaussian(rng: &mut ChaCha8Rng, mean: &[f64], l: &DMatrix<f64>) -> Vec<f64> {
    let p = mean.len();
    let z: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
    (0..p).map(|q| mean[q] + (0..p).map(|r| l[(q, r)] * z[r]).sum::<f64>()).collect()
}

/// Uniform samples over two discs of a common radius; labels record the
/// source disc (0 or 1).
pub fn overlapped_circles(
    centers: [[f64; 2]; 2],
    radius: f64,
    n_per: usize,
    seed: u64,
) -> Result<(ObjectData, Vec<usize>), GeneratorError> {
    if !(radius > 0.0) {
        return Err(GeneratorError::BadRadius(radius));
    }
    if n_per == 0 {
        return Err(GeneratorError::BadCount);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(2 * n_per);
    let mut labels = Vec::with_capacity(2 * n_per);
    for (which, center) in centers.iter().enumerate() {
        for _ in 0..n_per {
            let r = radius * rng.gen::<f64>().sqrt();
            let theta = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
            rows.push(vec![center[0] + r * theta.cos(), center[1] + r * theta.sin()]);
            labels.push(which);
        }
    }
    let data = ObjectData::from_rows(&rows).expect("sampled rows are finite");
    Ok((data, labels))
}

/// Seeded Gaussian mixture sample; labels record the component.
pub fn gaussian_mixture(
    components: &[GaussComponent],
    seed: u64,
) -> Result<(ObjectData, Vec<usize>), GeneratorError> {
    if components.is_empty() || components.iter().any(|c| c.count == 0 || c.mean.is_empty()) {
        return Err(GeneratorError::BadCount);
    }
    let p = components[0].mean.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (which, comp) in components.iter().enumerate() {
        if comp.mean.len() != p {
            return Err(GeneratorError::BadCovarianceShape(p));
        }
        let l = cholesky_factor(&comp.cov, p)?;
        for _ in 0..comp.count {
            rows.push(sample_gaussian(&mut rng, &comp.mean, &l));
            labels.push(which);
        }
    }
    let data = ObjectData::from_rows(&rows).expect("sampled rows are finite");
    Ok((data, labels))
}

/// A generated proximity graph together with its sampled coordinates and
/// ground-truth component labels.
#[derive(Clone, Debug)]
pub struct GeneratedGraph {
    pub graph: WeightedGraph,
    pub points: ObjectData,
    pub labels: Vec<usize>,
}

/// Samples 2-D Gaussian blobs and links every pair of points within
/// `threshold` Euclidean distance by a unit edge. Node ids are 1-based.
pub fn gaussian_graph(
    means: &[[f64; 2]],
    cov: [[f64; 2]; 2],
    sizes: &[usize],
    threshold: f64,
    seed: u64,
) -> Result<GeneratedGraph, GeneratorError> {
    if !(threshold > 0.0) {
        return Err(GeneratorError::BadThreshold(threshold));
    }
    if means.len() != sizes.len() || sizes.iter().any(|&s| s == 0) {
        return Err(GeneratorError::BadCount);
    }
    let components: Vec<GaussComponent> = means
        .iter()
        .zip(sizes)
        .map(|(m, &count)| GaussComponent {
            mean: m.to_vec(),
            cov: vec![cov[0].to_vec(), cov[1].to_vec()],
            count,
        })
        .collect();
    let (points, labels) = gaussian_mixture(&components, seed)?;
    let n = points.n();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let dist: f64 = points
                .row(i)
                .iter()
                .zip(points.row(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if dist <= threshold {
                edges.push((i, j, 1.0));
            }
        }
    }
    let ids: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let graph = WeightedGraph::from_edges(ids, &edges)?;
    Ok(GeneratedGraph { graph, points, labels })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    }

    #[test]
    fn circles_respect_their_discs() {
        let centers = [[0.0, 0.0], [30.0, 30.0]];
        let (data, labels) = overlapped_circles(centers, 30.0, 100, 7).unwrap();
        assert_eq!(data.n(), 200);
        assert_eq!(labels.iter().filter(|&&l| l == 0).count(), 100);
        for i in 0..200 {
            let c = centers[labels[i]];
            assert!(dist(data.row(i), &c) <= 30.0 + 1e-9);
        }
    }

    #[test]
    fn circles_coincident_centers_fully_overlap() {
        let centers = [[1.0, 2.0], [1.0, 2.0]];
        let (data, _) = overlapped_circles(centers, 5.0, 50, 3).unwrap();
        for i in 0..100 {
            assert!(dist(data.row(i), &[1.0, 2.0]) <= 5.0 + 1e-9);
        }
    }

    #[test]
    fn circles_distant_centers_are_separable() {
        let centers = [[0.0, 0.0], [1000.0, 0.0]];
        let (data, labels) = overlapped_circles(centers, 30.0, 20, 11).unwrap();
        for i in 0..40 {
            for j in 0..40 {
                if labels[i] != labels[j] {
                    assert!(dist(data.row(i), data.row(j)) > 900.0);
                }
            }
        }
    }

    #[test]
    fn generators_are_deterministic() {
        let centers = [[0.0, 0.0], [30.0, 30.0]];
        let (a, _) = overlapped_circles(centers, 30.0, 25, 42).unwrap();
        let (b, _) = overlapped_circles(centers, 30.0, 25, 42).unwrap();
        assert_eq!(a, b);
        let (c, _) = overlapped_circles(centers, 30.0, 25, 43).unwrap();
        assert_ne!(a, c);

        let comp = GaussComponent { mean: vec![0.0, 0.0], cov: vec![vec![1.0, 0.0], vec![0.0, 1.0]], count: 10 };
        let (x1, _) = gaussian_mixture(&[comp.clone()], 5).unwrap();
        let (x2, _) = gaussian_mixture(&[comp], 5).unwrap();
        assert_eq!(x1, x2);

        let g1 = gaussian_graph(&[[0.0, 0.0], [3.0, 3.0]], [[0.25, 0.0], [0.0, 0.25]], &[10, 10], 0.8, 9)
            .unwrap();
        let g2 = gaussian_graph(&[[0.0, 0.0], [3.0, 3.0]], [[0.25, 0.0], [0.0, 0.25]], &[10, 10], 0.8, 9)
            .unwrap();
        assert_eq!(g1.graph, g2.graph);
    }

    #[test]
    fn mixture_zero_covariance_is_a_point_mass() {
        let comp = GaussComponent {
            mean: vec![2.0, -3.0],
            cov: vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            count: 5,
        };
        let (data, _) = gaussian_mixture(&[comp], 1).unwrap();
        for i in 0..5 {
            assert_eq!(data.row(i), &[2.0, -3.0]);
        }
    }

    #[test]
    fn mixture_rejects_bad_covariance() {
        let comp = GaussComponent {
            mean: vec![0.0, 0.0],
            cov: vec![vec![1.0, 2.0], vec![2.0, 1.0]],
            count: 3,
        };
        assert_eq!(gaussian_mixture(&[comp], 1), Err(GeneratorError::NotPositiveDefinite));
    }

    #[test]
    fn graph_edge_rule_matches_distances() {
        let g = gaussian_graph(&[[0.0, 0.0]], [[1.0, 0.0], [0.0, 1.0]], &[15], 1.0, 21).unwrap();
        for i in 0..15 {
            for j in 0..15 {
                if i == j {
                    continue;
                }
                let d = dist(g.points.row(i), g.points.row(j));
                assert_eq!(g.graph.has_edge(i, j), d <= 1.0, "pair ({i},{j}) at {d}");
            }
        }
    }

    #[test]
    fn graph_threshold_extremes() {
        let g = gaussian_graph(&[[0.0, 0.0], [100.0, 0.0]], [[0.01, 0.0], [0.0, 0.01]], &[5, 5], 1e-9, 2)
            .unwrap();
        assert_eq!(g.graph.total_weight(), 0.0);
        let g = gaussian_graph(&[[0.0, 0.0], [1.0, 0.0]], [[0.01, 0.0], [0.0, 0.01]], &[5, 5], 1e9, 2)
            .unwrap();
        // Complete graph on 10 nodes: 45 undirected unit edges.
        assert_eq!(g.graph.total_weight(), 90.0);
    }
}
