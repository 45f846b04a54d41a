//! Comparison clusterers sharing the relational interface: hard median
//! c-means (MCM), fuzzy median c-means (MFCM), and the evidential c-means
//! for Euclidean object data (ECM).

use nalgebra::DMatrix;
use thiserror::Error;

use crate::belief::FocalStructure;
use crate::dissimilarity::{DissimilarityMatrix, PrototypeError, PrototypeSet};
use crate::mecm::{
    mass_update, objective, ConvergedBy, CredalPartition, FitReport, MecmError, MecmParams,
    MetaDissimMatrix,
};
use crate::EPS;

#[derive(Debug, Error, PartialEq)]
pub enum BaselineError {
    #[error("{c} clusters need at least {c} objects, got {n}")]
    TooFewObjects { n: usize, c: usize },
    #[error("init has {got} prototypes, expected {want}")]
    InitSize { got: usize, want: usize },
    #[error("beta must be > 1 (got {0})")]
    BadBeta(f64),
    #[error("max_iter must be ≥ 1")]
    BadMaxIter,
    #[error("object data must be non-empty with consistent finite rows")]
    BadObjectData,
    #[error("init centers: {got} rows of width {width}, expected {c}×{p}")]
    BadCenters { got: usize, width: usize, c: usize, p: usize },
    #[error("memberships must be in [0,1] with unit row sums (row {0})")]
    BadMembershipRow(usize),
    #[error("membership column {0} sums to zero")]
    DeadCluster(usize),
    #[error("labels reference cluster {label} outside 0..{c}")]
    BadLabel { label: usize, c: usize },
    #[error("center system is singular; perturb the initialization and retry")]
    SingularSystem,
    #[error(transparent)]
    Mecm(#[from] MecmError),
    #[error(transparent)]
    Prototype(#[from] PrototypeError),
}

/// Crisp cluster labels in 0..c.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HardPartition {
    labels: Vec<usize>,
    c: usize,
}

impl HardPartition {
    pub fn new(labels: Vec<usize>, c: usize) -> Result<HardPartition, BaselineError> {
        if let Some(&bad) = labels.iter().find(|&&l| l >= c) {
            return Err(BaselineError::BadLabel { label: bad, c });
        }
        Ok(HardPartition { labels, c })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }
}

/// Graded memberships: rows sum to 1, no cluster has zero total membership.
#[derive(Clone, Debug, PartialEq)]
pub struct FuzzyPartition {
    n: usize,
    c: usize,
    u: Vec<f64>,
}

impl FuzzyPartition {
    pub fn new(n: usize, c: usize, u: Vec<f64>) -> Result<FuzzyPartition, BaselineError> {
        assert_eq!(u.len(), n * c, "membership buffer shape");
        for i in 0..n {
            let row = &u[i * c..(i + 1) * c];
            let sum: f64 = row.iter().sum();
            if row.iter().any(|&x| !(0.0..=1.0 + 1e-9).contains(&x)) || (sum - 1.0).abs() > 1e-9 {
                return Err(BaselineError::BadMembershipRow(i));
            }
        }
        for k in 0..c {
            if (0..n).map(|i| u[i * c + k]).sum::<f64>() <= 0.0 {
                return Err(BaselineError::DeadCluster(k));
            }
        }
        Ok(FuzzyPartition { n, c, u })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.u[i * self.c..(i + 1) * self.c]
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.u[i * self.c + k]
    }

    /// Max-membership hardening; ties go to the lowest cluster index.
    pub fn harden(&self) -> HardPartition {
        let labels = (0..self.n)
            .map(|i| {
                let row = self.row(i);
                let mut best = 0;
                for k in 1..self.c {
                    if row[k] > row[best] {
                        best = k;
                    }
                }
                best
            })
            .collect();
        HardPartition { labels, c: self.c }
    }
}

/// Feature vectors, n×p row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ObjectData {
    n: usize,
    p: usize,
    x: Vec<f64>,
}

impl ObjectData {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<ObjectData, BaselineError> {
        let n = rows.len();
        if n == 0 || rows[0].is_empty() {
            return Err(BaselineError::BadObjectData);
        }
        let p = rows[0].len();
        let mut x = Vec::with_capacity(n * p);
        for row in rows {
            if row.len() != p || row.iter().any(|v| !v.is_finite()) {
                return Err(BaselineError::BadObjectData);
            }
            x.extend_from_slice(row);
        }
        Ok(ObjectData { n, p, x })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.p..(i + 1) * self.p]
    }
}

fn nearest_assignment(d: &DissimilarityMatrix, v: &PrototypeSet) -> Vec<usize> {
    (0..d.n())
        .map(|i| {
            let mut best = 0;
            for k in 1..v.c() {
                if d.get(i, v.get(k)) < d.get(i, v.get(best)) {
                    best = k;
                }
            }
            best
        })
        .collect()
}

/// Hard median c-means: nearest-prototype assignment alternating with the
/// per-cluster medoid (minimum summed dissimilarity over cluster members,
/// candidates exclude other clusters' prototypes). An emptied cluster is
/// reseeded to the admissible object farthest from its stale prototype.
pub fn mcm_fit(
    d: &DissimilarityMatrix,
    c: usize,
    init: &PrototypeSet,
    max_iter: usize,
) -> Result<(HardPartition, PrototypeSet, FitReport), BaselineError> {
    let n = d.n();
    if c == 0 || n < c {
        return Err(BaselineError::TooFewObjects { n, c });
    }
    if init.c() != c {
        return Err(BaselineError::InitSize { got: init.c(), want: c });
    }
    if max_iter == 0 {
        return Err(BaselineError::BadMaxIter);
    }
    let mut v: Vec<usize> = init.indices().to_vec();
    let mut prev: Option<Vec<usize>> = None;
    let mut labels = Vec::new();
    let mut trace = Vec::new();
    let mut converged = ConvergedBy::MaxIter;
    for _ in 0..max_iter {
        let vset = PrototypeSet::new(v.clone(), n)?;
        labels = nearest_assignment(d, &vset);
        for k in 0..c {
            if labels.iter().any(|&l| l == k) {
                continue;
            }
            // Reseed an emptied cluster as far as possible from its stale
            // prototype, keeping prototypes distinct; ties → lowest index.
            let mut far: Option<(f64, usize)> = None;
            for i in 0..n {
                if (0..c).any(|o| o != k && v[o] == i) {
                    continue;
                }
                let dist = d.get(i, v[k]);
                if far.map_or(true, |(best, _)| dist > best) {
                    far = Some((dist, i));
                }
            }
            v[k] = far.expect("n ≥ c leaves an admissible object").1;
            let vset = PrototypeSet::new(v.clone(), n)?;
            labels = nearest_assignment(d, &vset);
        }
        trace.push((0..n).map(|i| d.get(i, v[labels[i]])).sum());
        if prev.as_deref() == Some(&labels) {
            converged = ConvergedBy::PrototypesStable;
            break;
        }
        prev = Some(labels.clone());
        for k in 0..c {
            let mut best: Option<(f64, usize)> = None;
            for cand in 0..n {
                if (0..c).any(|o| o != k && v[o] == cand) {
                    continue;
                }
                let cost: f64 =
                    (0..n).filter(|&i| labels[i] == k).map(|i| d.get(i, cand)).sum();
                if best.map_or(true, |(b, _)| cost < b) {
                    best = Some((cost, cand));
                }
            }
            v[k] = best.expect("admissible candidate exists").1;
        }
    }
    let vset = PrototypeSet::new(v, n)?;
    if converged == ConvergedBy::MaxIter {
        // The cap interrupted after a medoid move; re-sync the assignment.
        labels = nearest_assignment(d, &vset);
        trace.push((0..n).map(|i| d.get(i, vset.get(labels[i]))).sum());
    }
    let iterations = if converged == ConvergedBy::MaxIter { max_iter } else { trace.len() };
    let report = FitReport { objective_trace: trace, iterations, converged_by: converged };
    Ok((HardPartition { labels, c }, vset, report))
}

/// Inverse-power membership update from an n×c matrix of distances to the
/// prototypes; distances are floored at `EPS`.
pub fn mfcm_assignment(
    d_to_prototypes: &[Vec<f64>],
    beta: f64,
) -> Result<FuzzyPartition, BaselineError> {
    if !(beta > 1.0) {
        return Err(BaselineError::BadBeta(beta));
    }
    let n = d_to_prototypes.len();
    if n == 0 || d_to_prototypes[0].is_empty() {
        return Err(BaselineError::BadObjectData);
    }
    let c = d_to_prototypes[0].len();
    let ex = -2.0 / (beta - 1.0);
    let mut u = vec![0.0; n * c];
    for (i, row) in d_to_prototypes.iter().enumerate() {
        if row.len() != c {
            return Err(BaselineError::BadObjectData);
        }
        let powers: Vec<f64> = row.iter().map(|&x| x.max(EPS).powf(ex)).collect();
        let total: f64 = powers.iter().sum();
        for (k, pw) in powers.iter().enumerate() {
            u[i * c + k] = pw / total;
        }
    }
    FuzzyPartition::new(n, c, u)
}

/// Fuzzy median c-means: inverse-power memberships alternating with medoids
/// weighted by membership^β against squared dissimilarities.
pub fn mfcm_fit(
    d: &DissimilarityMatrix,
    c: usize,
    beta: f64,
    init: &PrototypeSet,
    max_iter: usize,
) -> Result<(FuzzyPartition, PrototypeSet, FitReport), BaselineError> {
    let n = d.n();
    if c == 0 || n < c {
        return Err(BaselineError::TooFewObjects { n, c });
    }
    if init.c() != c {
        return Err(BaselineError::InitSize { got: init.c(), want: c });
    }
    if !(beta > 1.0) {
        return Err(BaselineError::BadBeta(beta));
    }
    if max_iter == 0 {
        return Err(BaselineError::BadMaxIter);
    }
    let dists = |v: &[usize]| -> Vec<Vec<f64>> {
        (0..n).map(|i| v.iter().map(|&p| d.get(i, p)).collect()).collect()
    };
    let trace_of = |u: &FuzzyPartition, v: &[usize]| -> f64 {
        let mut total = 0.0;
        for i in 0..n {
            for (k, &p) in v.iter().enumerate() {
                let dd = d.get(i, p).max(EPS);
                total += u.get(i, k).powf(beta) * dd * dd;
            }
        }
        total
    };
    let mut v: Vec<usize> = init.indices().to_vec();
    let mut trace = Vec::new();
    let mut converged = ConvergedBy::MaxIter;
    let mut iterations = 0;
    for _ in 0..max_iter {
        iterations += 1;
        let u = mfcm_assignment(&dists(&v), beta)?;
        trace.push(trace_of(&u, &v));
        let mut v_new = v.clone();
        for k in 0..c {
            let mut best: Option<(f64, usize)> = None;
            for cand in 0..n {
                if (0..c).any(|o| o != k && v_new[o] == cand) {
                    continue;
                }
                let cost: f64 = (0..n)
                    .map(|i| {
                        let dd = d.get(i, cand);
                        u.get(i, k).powf(beta) * dd * dd
                    })
                    .sum();
                if best.map_or(true, |(b, _)| cost < b) {
                    best = Some((cost, cand));
                }
            }
            v_new[k] = best.expect("admissible candidate exists").1;
        }
        if v_new == v {
            converged = ConvergedBy::PrototypesStable;
            break;
        }
        v = v_new;
    }
    // Memberships consistent with the final prototypes.
    let u = mfcm_assignment(&dists(&v), beta)?;
    if converged == ConvergedBy::MaxIter {
        trace.push(trace_of(&u, &v));
    }
    let report = FitReport { objective_trace: trace, iterations, converged_by: converged };
    Ok((u, PrototypeSet::new(v, n)?, report))
}

/// Parameters of the evidential c-means for object data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EcmParams {
    pub c: usize,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub max_iter: usize,
    /// Max-norm center movement below which the alternation stops.
    pub tol: f64,
}

impl EcmParams {
    pub fn new(c: usize, alpha: f64, beta: f64, delta: f64) -> EcmParams {
        EcmParams { c, alpha, beta, delta, max_iter: 200, tol: 1e-6 }
    }

    /// Mass/objective computations are shared with the median fitter.
    fn as_mecm(&self) -> MecmParams {
        let mut p = MecmParams::new(self.c, self.alpha, self.beta, self.delta, 1.0, 1.0);
        p.max_iter = self.max_iter;
        p
    }
}

fn barycenter_sq_dists(
    x: &ObjectData,
    centers: &DMatrix<f64>,
    structure: &FocalStructure,
) -> MetaDissimMatrix {
    let n = x.n();
    let p = x.p();
    let f = structure.len();
    let mut values = vec![0.0; n * f];
    for (j, &set) in structure.sets().iter().enumerate() {
        if set.is_empty() {
            continue;
        }
        let mem = set.members();
        let mut bar = vec![0.0; p];
        for &k in &mem {
            for q in 0..p {
                bar[q] += centers[(k, q)];
            }
        }
        for b in &mut bar {
            *b /= mem.len() as f64;
        }
        for i in 0..n {
            let row = x.row(i);
            let d2: f64 = row.iter().zip(&bar).map(|(a, b)| (a - b) * (a - b)).sum();
            values[i * f + j] = d2.max(EPS * EPS);
        }
    }
    MetaDissimMatrix::from_values(n, f, values)
}

/// Evidential c-means on Euclidean object data: mass update against focal-set
/// barycenters alternating with a linear solve for the cluster centers.
pub fn ecm_fit(
    x: &ObjectData,
    params: &EcmParams,
    structure: &FocalStructure,
    init_centers: &[Vec<f64>],
) -> Result<(CredalPartition, Vec<Vec<f64>>, FitReport), BaselineError> {
    let n = x.n();
    let p = x.p();
    let c = params.c;
    if c == 0 || n < c {
        return Err(BaselineError::TooFewObjects { n, c });
    }
    if structure.frame_size() != c {
        return Err(MecmError::FrameMismatch { frame: structure.frame_size(), c }.into());
    }
    if init_centers.len() != c || init_centers.iter().any(|r| r.len() != p) {
        return Err(BaselineError::BadCenters {
            got: init_centers.len(),
            width: init_centers.first().map_or(0, |r| r.len()),
            c,
            p,
        });
    }
    let mparams = params.as_mecm();
    mparams.validate()?;
    let mut centers = DMatrix::from_fn(c, p, |k, q| init_centers[k][q]);
    let mut trace = Vec::new();
    let mut converged = ConvergedBy::MaxIter;
    let mut iterations = 0;
    for _ in 0..params.max_iter {
        iterations += 1;
        let d2 = barycenter_sq_dists(x, &centers, structure);
        let m = mass_update(&d2, structure, &mparams)?;
        trace.push(objective(&m, &d2, &mparams));

        // Normal equations for the centers: weights aggregate masses of every
        // focal set containing each (pair of) cluster(s).
        let mut h = DMatrix::zeros(c, c);
        let mut b = DMatrix::zeros(c, p);
        for (j, &set) in structure.sets().iter().enumerate() {
            if set.is_empty() {
                continue;
            }
            let mem = set.members();
            let card = mem.len() as f64;
            let mass_beta_sum: f64 = (0..n).map(|i| m.get(i, j).powf(params.beta)).sum();
            let mut weighted_x = vec![0.0; p];
            for i in 0..n {
                let w = m.get(i, j).powf(params.beta);
                for (q, &v) in x.row(i).iter().enumerate() {
                    weighted_x[q] += w * v;
                }
            }
            let wb = card.powf(params.alpha - 1.0);
            let wh = card.powf(params.alpha - 2.0);
            for &l in &mem {
                for q in 0..p {
                    b[(l, q)] += wb * weighted_x[q];
                }
                for &k in &mem {
                    h[(l, k)] += wh * mass_beta_sum;
                }
            }
        }
        let new_centers = h.lu().solve(&b).ok_or(BaselineError::SingularSystem)?;
        if new_centers.iter().any(|v: &f64| !v.is_finite()) {
            return Err(BaselineError::SingularSystem);
        }
        let movement = (&new_centers - &centers).abs().max();
        centers = new_centers;
        if movement < params.tol {
            converged = ConvergedBy::PrototypesStable;
            break;
        }
    }
    // Masses consistent with the final centers.
    let d2 = barycenter_sq_dists(x, &centers, structure);
    let m = mass_update(&d2, structure, &mparams)?;
    trace.push(objective(&m, &d2, &mparams));
    let out_centers: Vec<Vec<f64>> =
        (0..c).map(|k| (0..p).map(|q| centers[(k, q)]).collect()).collect();
    let report = FitReport { objective_trace: trace, iterations, converged_by: converged };
    Ok((m, out_centers, report))
}
