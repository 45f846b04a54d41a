//! Median evidential c-means: credal partitions over a focal structure,
//! meta-cluster dissimilarities with discounting, the alternating
//! mass/prototype optimization, and the partition validity index.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::belief::{FocalSet, FocalStructure, MassFunction};
use crate::dissimilarity::{DissimilarityMatrix, PrototypeError, PrototypeSet};
use crate::EPS;

#[derive(Debug, Error, PartialEq)]
pub enum MecmError {
    #[error("cluster count must be ≥ 1 (got {0})")]
    BadClusterCount(usize),
    #[error("beta must be > 1 (got {0})")]
    BadBeta(f64),
    #[error("delta must be > 0 (got {0})")]
    BadDelta(f64),
    #[error("gamma must be > 0 (got {0})")]
    BadGamma(f64),
    #[error("eta must lie in (0, 1] (got {0})")]
    BadEta(f64),
    #[error("max_iter must be ≥ 1")]
    BadMaxIter,
    #[error("distance_floor must be > 0 (got {0})")]
    BadFloor(f64),
    #[error("discounting needs at least two member clusters")]
    NeedsPair,
    #[error("pair-distance list has {got} entries, expected {want}")]
    BadPairList { got: usize, want: usize },
    #[error("the empty set carries no meta-dissimilarity; it is priced by delta")]
    EmptyFocalSet,
    #[error("focal structure spans {frame} clusters but {c} prototypes were given")]
    FrameMismatch { frame: usize, c: usize },
    #[error("{c} distinct prototypes need at least {c} objects, got {n}")]
    TooFewObjects { n: usize, c: usize },
    #[error("partition rows must be nonnegative and sum to 1 (row {row} sums to {sum})")]
    BadPartitionRow { row: usize, sum: f64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("validity index needs c ≥ 2 (got {0})")]
    ValidityNeedsTwo(usize),
    #[error(transparent)]
    Prototype(#[from] PrototypeError),
}

/// Parameters of the median evidential fitter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MecmParams {
    /// Cluster count (frame size).
    pub c: usize,
    /// Cardinality penalty exponent; larger values tax imprecise sets harder.
    pub alpha: f64,
    /// Weighting exponent on masses, > 1.
    pub beta: f64,
    /// Outlier threshold: dissimilarity attributed to the empty set.
    pub delta: f64,
    /// Balance between mean-distance and ambiguity terms for imprecise sets.
    pub gamma: f64,
    /// Discount control in (0, 1]; smaller values amplify ambiguity.
    pub eta: f64,
    /// Safety cap on alternation steps.
    pub max_iter: usize,
    /// Distances below this floor are treated as the floor (squared form).
    pub distance_floor: f64,
}

impl MecmParams {
    pub fn new(c: usize, alpha: f64, beta: f64, delta: f64, gamma: f64, eta: f64) -> MecmParams {
        MecmParams { c, alpha, beta, delta, gamma, eta, max_iter: 200, distance_floor: EPS }
    }

    pub fn validate(&self) -> Result<(), MecmError> {
        if self.c == 0 {
            return Err(MecmError::BadClusterCount(self.c));
        }
        if !(self.beta > 1.0) {
            return Err(MecmError::BadBeta(self.beta));
        }
        if !(self.delta > 0.0) {
            return Err(MecmError::BadDelta(self.delta));
        }
        if !(self.gamma > 0.0) {
            return Err(MecmError::BadGamma(self.gamma));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(MecmError::BadEta(self.eta));
        }
        if self.max_iter == 0 {
            return Err(MecmError::BadMaxIter);
        }
        if !(self.distance_floor > 0.0) {
            return Err(MecmError::BadFloor(self.distance_floor));
        }
        Ok(())
    }

    fn floor_sq(&self) -> f64 {
        self.distance_floor * self.distance_floor
    }
}

/// How an alternating fit stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergedBy {
    PrototypesStable,
    MaxIter,
}

/// Iteration diagnostics shared by all alternating fitters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged_by: ConvergedBy,
}

/// An n-row matrix of mass functions over a shared focal structure.
#[derive(Clone, Debug, PartialEq)]
pub struct CredalPartition {
    structure: FocalStructure,
    n: usize,
    masses: Vec<f64>,
}

impl CredalPartition {
    /// Row-sum tolerance.
    pub const ROW_TOL: f64 = 1e-9;

    pub fn new(
        structure: FocalStructure,
        n: usize,
        masses: Vec<f64>,
    ) -> Result<CredalPartition, MecmError> {
        let f = structure.len();
        if masses.len() != n * f {
            return Err(MecmError::ShapeMismatch(format!(
                "{} masses for {n}×{f} partition",
                masses.len()
            )));
        }
        for i in 0..n {
            let row = &masses[i * f..(i + 1) * f];
            let sum: f64 = row.iter().sum();
            if row.iter().any(|&m| !(m >= 0.0) || !m.is_finite())
                || (sum - 1.0).abs() > Self::ROW_TOL
            {
                return Err(MecmError::BadPartitionRow { row: i, sum });
            }
        }
        Ok(CredalPartition { structure, n, masses })
    }

    /// Crisp partition: each object puts mass 1 on its label's singleton.
    pub fn crisp(structure: FocalStructure, labels: &[usize]) -> Result<CredalPartition, MecmError> {
        let f = structure.len();
        let mut masses = vec![0.0; labels.len() * f];
        for (i, &k) in labels.iter().enumerate() {
            let j = structure
                .index_of(FocalSet::singleton(k))
                .ok_or(MecmError::BadClusterCount(k + 1))?;
            masses[i * f + j] = 1.0;
        }
        CredalPartition::new(structure, labels.len(), masses)
    }

    pub fn structure(&self) -> &FocalStructure {
        &self.structure
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let f = self.structure.len();
        &self.masses[i * f..(i + 1) * f]
    }

    /// Row-major view of every mass row.
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.masses[i * self.structure.len() + j]
    }

    pub fn empty_mass(&self, i: usize) -> f64 {
        self.row(i)[self.structure.empty_index()]
    }

    pub fn mass_function(&self, i: usize) -> MassFunction {
        MassFunction::new(self.structure.clone(), self.row(i).to_vec())
            .expect("partition rows are validated mass functions")
    }
}

/// Ambiguity discount for an imprecise set: spread of the object's distances
/// to the member prototypes over the prototypes' own spread.
///
/// `distances_to_members` lists d(x_i, v_k) in member order;
/// `prototype_pair_distances` lists d(v_x, v_y) for member pairs x < y in the
/// same order. The denominator is floored at `EPS` to survive coincident
/// prototypes.
pub fn rho(
    distances_to_members: &[f64],
    prototype_pair_distances: &[f64],
    eta: f64,
) -> Result<f64, MecmError> {
    let k = distances_to_members.len();
    if k < 2 {
        return Err(MecmError::NeedsPair);
    }
    let want = k * (k - 1) / 2;
    if prototype_pair_distances.len() != want {
        return Err(MecmError::BadPairList { got: prototype_pair_distances.len(), want });
    }
    let mut num = 0.0;
    for x in 0..k {
        for y in x + 1..k {
            num += (distances_to_members[x] - distances_to_members[y]).abs();
        }
    }
    let den = (eta * prototype_pair_distances.iter().sum::<f64>()).max(EPS);
    Ok(num / den)
}

/// Squared meta-dissimilarity between object `i` and the meta cluster `a`:
/// the squared prototype distance for singletons, otherwise a γ-weighted mix
/// of the mean squared member distance and the discounted nearest distance.
/// Clamped below at the squared distance floor.
pub fn meta_dissimilarity(
    i: usize,
    a: FocalSet,
    d: &DissimilarityMatrix,
    v: &PrototypeSet,
    params: &MecmParams,
) -> Result<f64, MecmError> {
    if a.is_empty() {
        return Err(MecmError::EmptyFocalSet);
    }
    let members = a.members();
    if *members.last().unwrap() >= v.c() {
        return Err(MecmError::FrameMismatch { frame: members.last().unwrap() + 1, c: v.c() });
    }
    let floor_sq = params.floor_sq();
    if members.len() == 1 {
        let dist = d.get(i, v.get(members[0]));
        return Ok((dist * dist).max(floor_sq));
    }
    let dists: Vec<f64> = members.iter().map(|&k| d.get(i, v.get(k))).collect();
    let pair_dists: Vec<f64> = {
        let mut p = Vec::with_capacity(members.len() * (members.len() - 1) / 2);
        for x in 0..members.len() {
            for y in x + 1..members.len() {
                p.push(d.get(v.get(members[x]), v.get(members[y])));
            }
        }
        p
    };
    let rho_ij = rho(&dists, &pair_dists, params.eta)?;
    let mean_sq = dists.iter().map(|&x| x * x).sum::<f64>() / members.len() as f64;
    let min_d = dists.iter().fold(f64::INFINITY, |m, &x| m.min(x));
    let value = (params.gamma * mean_sq + rho_ij * min_d) / (params.gamma + 1.0);
    Ok(value.max(floor_sq))
}

/// Squared meta-dissimilarities for all (object, focal set) pairs, aligned
/// with a focal structure. Column 0 (∅) is kept for alignment and holds 0.
#[derive(Clone, Debug)]
pub struct MetaDissimMatrix {
    n: usize,
    width: usize,
    values: Vec<f64>,
}

impl MetaDissimMatrix {
    pub fn compute(
        d: &DissimilarityMatrix,
        v: &PrototypeSet,
        structure: &FocalStructure,
        params: &MecmParams,
    ) -> Result<MetaDissimMatrix, MecmError> {
        if structure.frame_size() != v.c() {
            return Err(MecmError::FrameMismatch { frame: structure.frame_size(), c: v.c() });
        }
        let n = d.n();
        let width = structure.len();
        let mut values = vec![0.0; n * width];
        for (j, &set) in structure.sets().iter().enumerate() {
            if set.is_empty() {
                continue;
            }
            for (i, row) in values.chunks_exact_mut(width).enumerate() {
                row[j] = meta_dissimilarity(i, set, d, v, params)?;
            }
        }
        Ok(MetaDissimMatrix { n, width, values })
    }

    pub fn from_values(n: usize, width: usize, values: Vec<f64>) -> MetaDissimMatrix {
        assert_eq!(values.len(), n * width);
        MetaDissimMatrix { n, width, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.width + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.width..(i + 1) * self.width]
    }
}

/// Closed-form mass update: masses are inverse-power weights of the squared
/// meta-dissimilarities, with the outlier threshold δ² competing as the
/// implicit distance of the empty set.
pub fn mass_update(
    dbar: &MetaDissimMatrix,
    structure: &FocalStructure,
    params: &MecmParams,
) -> Result<CredalPartition, MecmError> {
    params.validate()?;
    if dbar.width != structure.len() {
        return Err(MecmError::ShapeMismatch(format!(
            "meta-dissimilarity width {} vs {} focal sets",
            dbar.width,
            structure.len()
        )));
    }
    let ex = 1.0 / (params.beta - 1.0);
    let floor_sq = params.floor_sq();
    let card_weight: Vec<f64> = structure
        .sets()
        .iter()
        .map(|s| if s.is_empty() { 0.0 } else { (s.cardinality() as f64).powf(-params.alpha * ex) })
        .collect();
    let delta_term = (params.delta * params.delta).powf(-ex);
    let f = structure.len();
    let mut masses = vec![0.0; dbar.n * f];
    for i in 0..dbar.n {
        let row = dbar.row(i);
        let out = &mut masses[i * f..(i + 1) * f];
        let mut total = delta_term;
        for j in 1..f {
            let term = card_weight[j] * row[j].max(floor_sq).powf(-ex);
            out[j] = term;
            total += term;
        }
        let mut assigned = 0.0;
        for m in out[1..].iter_mut() {
            *m /= total;
            assigned += *m;
        }
        out[0] = (1.0 - assigned).max(0.0);
    }
    CredalPartition::new(structure.clone(), dbar.n, masses)
}

/// The criterion the alternation descends: cardinality-weighted masses times
/// squared meta-dissimilarities, plus the δ² penalty on unassigned mass.
pub fn objective(m: &CredalPartition, dbar: &MetaDissimMatrix, params: &MecmParams) -> f64 {
    let st = m.structure();
    let f = st.len();
    let card_alpha: Vec<f64> =
        st.sets().iter().map(|s| (s.cardinality().max(1) as f64).powf(params.alpha)).collect();
    let delta_sq = params.delta * params.delta;
    let mut j_total = 0.0;
    for i in 0..m.n() {
        let mrow = m.row(i);
        let drow = dbar.row(i);
        let mut acc = delta_sq * mrow[0].powf(params.beta);
        for j in 1..f {
            acc += card_alpha[j] * mrow[j].powf(params.beta) * drow[j];
        }
        j_total += acc;
    }
    j_total
}

/// Per-object statistics of an imprecise set restricted to its fixed members
/// (every member except the cluster being updated).
struct RestStats {
    protos: Vec<usize>,
    /// Orientation of candidate↔member prototype pairs: true when the updated
    /// cluster precedes the member in frame order.
    cand_first: Vec<bool>,
    card: f64,
    weight_alpha: f64,
    /// Mass weights m_ij^β per object for this set.
    mass_beta: Vec<f64>,
    /// Σ_a d(i, v_a)² per object.
    sum_sq: Vec<f64>,
    /// min_a d(i, v_a) per object.
    min_d: Vec<f64>,
    /// Σ_{a<b} |d(i,v_a) − d(i,v_b)| per object.
    sum_abs: Vec<f64>,
    /// Per-object member distances, row-major n × |rest|.
    dists: Vec<f64>,
    /// Σ_{a<b} d(v_a, v_b) over the fixed members.
    pair_sum: f64,
}

/// One-cluster medoid relocation: for each cluster in index order, pick the
/// candidate object minimizing the cluster's share of the objective, holding
/// all other (already updated or still current) prototypes fixed. Candidates
/// exclude objects serving as other clusters' prototypes; ties go to the
/// lowest object index.
pub fn prototype_update(
    m: &CredalPartition,
    d: &DissimilarityMatrix,
    v_old: &PrototypeSet,
    params: &MecmParams,
) -> Result<PrototypeSet, MecmError> {
    params.validate()?;
    let n = d.n();
    let c = v_old.c();
    if n < c {
        return Err(MecmError::TooFewObjects { n, c });
    }
    let st = m.structure();
    if st.frame_size() != c {
        return Err(MecmError::FrameMismatch { frame: st.frame_size(), c });
    }
    let floor_sq = params.floor_sq();
    let gamma = params.gamma;
    let mut working: Vec<usize> = v_old.indices().to_vec();

    for k in 0..c {
        // Precompute, per focal set containing ω_k, everything that does not
        // depend on the candidate.
        let mut singleton_weights: Option<Vec<f64>> = None;
        let mut rests: Vec<RestStats> = Vec::new();
        for (j, &set) in st.sets().iter().enumerate() {
            if !set.contains(k) {
                continue;
            }
            let beta_masses: Vec<f64> =
                (0..n).map(|i| m.get(i, j).powf(params.beta)).collect();
            let members = set.members();
            if members.len() == 1 {
                singleton_weights = Some(beta_masses);
                continue;
            }
            let rest: Vec<usize> = members.iter().copied().filter(|&a| a != k).collect();
            let protos: Vec<usize> = rest.iter().map(|&a| working[a]).collect();
            let cand_first: Vec<bool> = rest.iter().map(|&a| k < a).collect();
            let r = protos.len();
            let mut dists = vec![0.0; n * r];
            let mut sum_sq = vec![0.0; n];
            let mut min_d = vec![f64::INFINITY; n];
            let mut sum_abs = vec![0.0; n];
            for i in 0..n {
                let row = &mut dists[i * r..(i + 1) * r];
                for (slot, &p) in row.iter_mut().zip(&protos) {
                    *slot = d.get(i, p);
                }
                for &x in row.iter() {
                    sum_sq[i] += x * x;
                    min_d[i] = min_d[i].min(x);
                }
                for a in 0..r {
                    for b in a + 1..r {
                        sum_abs[i] += (row[a] - row[b]).abs();
                    }
                }
            }
            let mut pair_sum = 0.0;
            for a in 0..r {
                for b in a + 1..r {
                    pair_sum += d.get(protos[a], protos[b]);
                }
            }
            rests.push(RestStats {
                protos,
                cand_first,
                card: members.len() as f64,
                weight_alpha: (members.len() as f64).powf(params.alpha),
                mass_beta: beta_masses,
                sum_sq,
                min_d,
                sum_abs,
                dists,
                pair_sum,
            });
        }
        let singleton_weights = singleton_weights.expect("structure contains every singleton");

        let mut best: Option<(f64, usize)> = None;
        for cand in 0..n {
            let taken =
                (0..c).any(|other| other != k && working[other] == cand);
            if taken {
                continue;
            }
            let mut cost = 0.0;
            for (i, w) in singleton_weights.iter().enumerate() {
                let dist = d.get(i, cand);
                cost += w * (dist * dist).max(floor_sq);
            }
            for rest in &rests {
                let r = rest.protos.len();
                // Pair distances between the candidate and the fixed members,
                // oriented by frame order to respect asymmetric inputs.
                let mut pair_sum = rest.pair_sum;
                for (a, &p) in rest.protos.iter().enumerate() {
                    pair_sum += if rest.cand_first[a] { d.get(cand, p) } else { d.get(p, cand) };
                }
                let inv_den = 1.0 / (params.eta * pair_sum).max(EPS);
                let mut set_cost = 0.0;
                for i in 0..n {
                    let w = rest.mass_beta[i];
                    let d_ic = d.get(i, cand);
                    let row = &rest.dists[i * r..(i + 1) * r];
                    let mut num = rest.sum_abs[i];
                    for &x in row {
                        num += (d_ic - x).abs();
                    }
                    let mean_sq = (d_ic * d_ic + rest.sum_sq[i]) / rest.card;
                    let min_d = rest.min_d[i].min(d_ic);
                    let dbar = ((gamma * mean_sq + num * inv_den * min_d) / (gamma + 1.0))
                        .max(floor_sq);
                    set_cost += w * dbar;
                }
                cost += rest.weight_alpha * set_cost;
            }
            if best.map_or(true, |(b, _)| cost < b) {
                best = Some((cost, cand));
            }
        }
        working[k] = best.expect("at least one admissible candidate (n ≥ c)").1;
    }
    Ok(PrototypeSet::new(working, n)?)
}

/// Alternates mass and prototype updates until the prototype set repeats or
/// `max_iter` is hit. The returned partition is always consistent with the
/// returned prototypes.
pub fn mecm_fit(
    d: &DissimilarityMatrix,
    params: &MecmParams,
    structure: &FocalStructure,
    init: &PrototypeSet,
) -> Result<(CredalPartition, PrototypeSet, FitReport), MecmError> {
    params.validate()?;
    let n = d.n();
    let c = params.c;
    if structure.frame_size() != c {
        return Err(MecmError::FrameMismatch { frame: structure.frame_size(), c });
    }
    if init.c() != c {
        return Err(MecmError::FrameMismatch { frame: c, c: init.c() });
    }
    if n < c {
        return Err(MecmError::TooFewObjects { n, c });
    }
    let mut v = init.clone();
    let mut trace = Vec::new();
    let mut converged = ConvergedBy::MaxIter;
    let mut iterations = 0;
    let mut partition = None;
    for _ in 0..params.max_iter {
        iterations += 1;
        let dbar = MetaDissimMatrix::compute(d, &v, structure, params)?;
        let m = mass_update(&dbar, structure, params)?;
        trace.push(objective(&m, &dbar, params));
        let v_new = prototype_update(&m, d, &v, params)?;
        partition = Some(m);
        if v_new == v {
            converged = ConvergedBy::PrototypesStable;
            break;
        }
        v = v_new;
    }
    if converged == ConvergedBy::MaxIter {
        // The cap interrupted the alternation after a prototype move; re-sync
        // the masses so partition and prototypes agree.
        let dbar = MetaDissimMatrix::compute(d, &v, structure, params)?;
        let m = mass_update(&dbar, structure, params)?;
        trace.push(objective(&m, &dbar, params));
        partition = Some(m);
    }
    let report = FitReport { objective_trace: trace, iterations, converged_by: converged };
    Ok((partition.expect("max_iter ≥ 1 guarantees one pass"), v, report))
}

/// Normalized nonspecificity of a credal partition, in [0, 1]: 0 for crisp
/// partitions, 1 when all mass sits on Ω or on ∅.
pub fn validity_index(m: &CredalPartition) -> Result<f64, MecmError> {
    let c = m.structure().frame_size();
    if c < 2 {
        return Err(MecmError::ValidityNeedsTwo(c));
    }
    let log_c = (c as f64).log2();
    // Pre-normalized weights keep the crisp (all-zero) and vacuous (all-one)
    // anchors exact: singletons weigh 0, Ω and ∅ weigh exactly 1.
    let weights: Vec<f64> = m
        .structure()
        .sets()
        .iter()
        .enumerate()
        .map(|(j, set)| {
            if j == 0 { 1.0 } else { (set.cardinality() as f64).log2() / log_c }
        })
        .collect();
    let mut total = 0.0;
    for i in 0..m.n() {
        let row = m.row(i);
        total += row.iter().zip(&weights).map(|(&mass, &w)| mass * w).sum::<f64>();
    }
    Ok(total / m.n() as f64)
}
