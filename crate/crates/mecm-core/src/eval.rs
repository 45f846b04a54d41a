//! Partition quality measures: hardening rules, pair-counting precision /
//! recall / Rand index with their evidential generalizations, modularity in
//! crisp / fuzzy / evidential form, and information-theoretic comparisons.

use thiserror::Error;

use crate::baselines::{BaselineError, FuzzyPartition, HardPartition};
use crate::belief::FocalSet;
use crate::graph::WeightedGraph;
use crate::mecm::CredalPartition;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("partition lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("pair counting needs at least 2 objects")]
    TooFewObjects,
    #[error("object {0} carries full conflict (m(∅) = 1), cannot harden")]
    TotalConflictRow(usize),
    #[error("modularity needs at least one edge")]
    EdgelessGraph,
    #[error("membership matrix has {got} entries, expected {want}")]
    BadMatrixShape { got: usize, want: usize },
    #[error(transparent)]
    Baseline(#[from] BaselineError),
}

/// Pair-decision counts between a predicted and a reference partition.
/// `a`: same/same, `b`: different/different, `fp`: same/different,
/// `fn_`: different/same.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairCounts {
    pub a: usize,
    pub b: usize,
    pub fp: usize,
    pub fn_: usize,
}

/// Pair counts restricted to specifically-clustered objects (singleton focal
/// sets). `n_e`: pairs specifically placed in one cluster; `n_er`: those also
/// co-grouped in the reference; `b_star`: pairs in different singletons that
/// are also separated in the reference; `n_r`: reference same-group pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvidentialPairCounts {
    pub a_star: usize,
    pub b_star: usize,
    pub n_er: usize,
    pub n_e: usize,
    pub n_r: usize,
}

/// Pignistic-maximum hardening; ties go to the lowest cluster index.
pub fn harden_pignistic(m: &CredalPartition) -> Result<HardPartition, EvalError> {
    let c = m.structure().frame_size();
    let mut labels = Vec::with_capacity(m.n());
    for i in 0..m.n() {
        let bet = m
            .mass_function(i)
            .pignistic()
            .map_err(|_| EvalError::TotalConflictRow(i))?;
        let mut best = 0;
        for k in 1..c {
            if bet[k] > bet[best] {
                best = k;
            }
        }
        labels.push(best);
    }
    Ok(HardPartition::new(labels, c)?)
}

/// Maximum-mass hardening onto focal sets (∅ and imprecise sets included);
/// ties prefer the smaller cardinality, then the lower mask.
pub fn harden_credal(m: &CredalPartition) -> Vec<FocalSet> {
    let sets = m.structure().sets();
    (0..m.n())
        .map(|i| {
            let row = m.row(i);
            // Sets are ordered by (cardinality, mask); the first strict
            // maximum realizes the tie rule.
            let mut best = 0;
            for j in 1..sets.len() {
                if row[j] > row[best] {
                    best = j;
                }
            }
            sets[best]
        })
        .collect()
}

/// Pair-counting agreement: precision a/(a+fp), recall a/(a+fn), Rand index
/// 2(a+b)/(n(n−1)). Empty denominators yield 1 by convention.
pub fn pair_indices(
    pred: &HardPartition,
    reference: &HardPartition,
) -> Result<(PairCounts, f64, f64, f64), EvalError> {
    let n = pred.n();
    if n != reference.n() {
        return Err(EvalError::LengthMismatch(n, reference.n()));
    }
    if n < 2 {
        return Err(EvalError::TooFewObjects);
    }
    let (p, r) = (pred.labels(), reference.labels());
    let mut counts = PairCounts { a: 0, b: 0, fp: 0, fn_: 0 };
    for i in 0..n {
        for j in i + 1..n {
            match (p[i] == p[j], r[i] == r[j]) {
                (true, true) => counts.a += 1,
                (false, false) => counts.b += 1,
                (true, false) => counts.fp += 1,
                (false, true) => counts.fn_ += 1,
            }
        }
    }
    let ratio = |num: usize, den: usize| if den == 0 { 1.0 } else { num as f64 / den as f64 };
    let precision = ratio(counts.a, counts.a + counts.fp);
    let recall = ratio(counts.a, counts.a + counts.fn_);
    let rand = 2.0 * (counts.a + counts.b) as f64 / (n * (n - 1)) as f64;
    Ok((counts, precision, recall, rand))
}

/// Evidential pair indices over hardened credal assignments: only pairs where
/// both objects sit in singleton focal sets count as specific decisions.
pub fn evidential_indices(
    pred: &[FocalSet],
    reference: &HardPartition,
) -> Result<(EvidentialPairCounts, f64, f64, f64), EvalError> {
    let n = pred.len();
    if n != reference.n() {
        return Err(EvalError::LengthMismatch(n, reference.n()));
    }
    if n < 2 {
        return Err(EvalError::TooFewObjects);
    }
    let r = reference.labels();
    let mut counts = EvidentialPairCounts { a_star: 0, b_star: 0, n_er: 0, n_e: 0, n_r: 0 };
    for i in 0..n {
        for j in i + 1..n {
            let same_ref = r[i] == r[j];
            if same_ref {
                counts.n_r += 1;
            }
            if pred[i].cardinality() != 1 || pred[j].cardinality() != 1 {
                continue;
            }
            if pred[i] == pred[j] {
                counts.n_e += 1;
                if same_ref {
                    counts.n_er += 1;
                }
            } else if !same_ref {
                counts.b_star += 1;
            }
        }
    }
    counts.a_star = counts.n_er;
    let ratio = |num: usize, den: usize| if den == 0 { 1.0 } else { num as f64 / den as f64 };
    let ep = ratio(counts.n_er, counts.n_e);
    let er = ratio(counts.n_er, counts.n_r);
    let eri = 2.0 * (counts.a_star + counts.b_star) as f64 / (n * (n - 1)) as f64;
    Ok((counts, ep, er, eri))
}

/// Newman-style modularity trace(Uᵀ(W − kᵀk/‖W‖)U)/‖W‖ for any real
/// membership matrix `u` (n×c, row-major): indicator columns give the crisp
/// value, memberships the fuzzy one, contours the evidential one.
pub fn modularity(g: &WeightedGraph, u: &[f64], c: usize) -> Result<f64, EvalError> {
    let n = g.n();
    if u.len() != n * c {
        return Err(EvalError::BadMatrixShape { got: u.len(), want: n * c });
    }
    let total = g.total_weight();
    if total <= 0.0 {
        return Err(EvalError::EdgelessGraph);
    }
    let strengths = g.strengths();
    let mut q = 0.0;
    for k in 0..c {
        let mut coupled = 0.0;
        for i in 0..n {
            if u[i * c + k] == 0.0 {
                continue;
            }
            for j in 0..n {
                let w = g.weight(i, j);
                if w > 0.0 {
                    coupled += w * u[i * c + k] * u[j * c + k];
                }
            }
        }
        let loading: f64 = (0..n).map(|i| strengths[i] * u[i * c + k]).sum();
        q += coupled - loading * loading / total;
    }
    Ok(q / total)
}

/// Indicator matrix of a hard partition (n×c, row-major).
pub fn indicator_matrix(h: &HardPartition) -> Vec<f64> {
    let c = h.c();
    let mut u = vec![0.0; h.n() * c];
    for (i, &k) in h.labels().iter().enumerate() {
        u[i * c + k] = 1.0;
    }
    u
}

/// Membership matrix of a fuzzy partition (n×c, row-major).
pub fn membership_matrix(f: &FuzzyPartition) -> Vec<f64> {
    (0..f.n()).flat_map(|i| f.row(i).to_vec()).collect()
}

/// Contour (singleton plausibility) matrix of a credal partition (n×c).
pub fn contour_matrix(m: &CredalPartition) -> Vec<f64> {
    let c = m.structure().frame_size();
    let sets = m.structure().sets();
    let mut pl = vec![0.0; m.n() * c];
    for i in 0..m.n() {
        let row = m.row(i);
        for (j, &set) in sets.iter().enumerate() {
            for k in set.members() {
                pl[i * c + k] += row[j];
            }
        }
    }
    pl
}

/// Normalized mutual information (in [0,1]) and variation of information
/// (nats). Two empty-entropy partitions are identical: NMI 1, VI 0.
pub fn nmi_vi(pred: &HardPartition, reference: &HardPartition) -> Result<(f64, f64), EvalError> {
    let n = pred.n();
    if n != reference.n() {
        return Err(EvalError::LengthMismatch(n, reference.n()));
    }
    if n == 0 {
        return Err(EvalError::TooFewObjects);
    }
    let cp = pred.c();
    let cr = reference.c();
    let mut joint = vec![0.0; cp * cr];
    for (&a, &b) in pred.labels().iter().zip(reference.labels()) {
        joint[a * cr + b] += 1.0 / n as f64;
    }
    let pp: Vec<f64> = (0..cp).map(|a| (0..cr).map(|b| joint[a * cr + b]).sum()).collect();
    let pr: Vec<f64> = (0..cr).map(|b| (0..cp).map(|a| joint[a * cr + b]).sum()).collect();
    let entropy = |probs: &[f64]| -> f64 {
        -probs.iter().filter(|&&p| p > 0.0).map(|&p| p * p.ln()).sum::<f64>()
    };
    let h1 = entropy(&pp);
    let h2 = entropy(&pr);
    let mut mi = 0.0;
    for a in 0..cp {
        for b in 0..cr {
            let pab = joint[a * cr + b];
            if pab > 0.0 {
                mi += pab * (pab / (pp[a] * pr[b])).ln();
            }
        }
    }
    let nmi = if h1 + h2 > 0.0 { 2.0 * mi / (h1 + h2) } else { 1.0 };
    let vi = h1 + h2 - 2.0 * mi;
    Ok((nmi, vi))
}
