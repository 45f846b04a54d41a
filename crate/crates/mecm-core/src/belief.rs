//! Mass functions over the power set of a cluster frame: focal structures,
//! belief/plausibility/pignistic transforms, Dempster combination, and the
//! plausibility-weighted decision rule.
//!
//! Cluster indices are 0-based internally; serialization maps them to the
//! 1-based convention used by file formats.

use std::collections::HashMap;

use thiserror::Error;

/// Tolerance on the unit-sum constraint of a mass function.
pub const MASS_TOL: f64 = 1e-9;

/// Largest supported frame; masks are stored in a `u32`.
pub const MAX_FRAME: usize = 16;

#[derive(Debug, Error, PartialEq)]
pub enum BeliefError {
    #[error("frame size mismatch: {0} vs {1}")]
    FrameMismatch(usize, usize),
    #[error("mass vector length {got} does not match {want} focal sets")]
    LengthMismatch { got: usize, want: usize },
    #[error("masses must be nonnegative and sum to 1 (sum = {0})")]
    InvalidMass(f64),
    #[error("total conflict: the combined evidence is contradictory")]
    TotalConflict,
    #[error("focal set {0:?} is not part of the structure")]
    UnknownFocalSet(FocalSet),
    #[error("frame size {0} outside the supported range 1..={MAX_FRAME}")]
    BadFrameSize(usize),
}

/// A subset of the cluster frame `{0, .., c-1}`, encoded as a bit mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FocalSet(pub u32);

impl FocalSet {
    pub const EMPTY: FocalSet = FocalSet(0);

    pub fn singleton(k: usize) -> FocalSet {
        FocalSet(1 << k)
    }

    pub fn omega(c: usize) -> FocalSet {
        FocalSet(((1u64 << c) - 1) as u32)
    }

    pub fn from_members(members: &[usize]) -> FocalSet {
        FocalSet(members.iter().fold(0u32, |m, &k| m | (1 << k)))
    }

    pub fn cardinality(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, k: usize) -> bool {
        self.0 >> k & 1 == 1
    }

    pub fn intersection(self, other: FocalSet) -> FocalSet {
        FocalSet(self.0 & other.0)
    }

    pub fn union(self, other: FocalSet) -> FocalSet {
        FocalSet(self.0 | other.0)
    }

    pub fn is_subset_of(self, other: FocalSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Member cluster indices in increasing order.
    pub fn members(self) -> Vec<usize> {
        (0..32).filter(|&k| self.contains(k)).collect()
    }
}

/// Which subsets of the frame carry mass.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FocalMode {
    FullPowerSet,
    PairsPlusOmega,
}

/// An ordered family of focal sets over a frame of size `c`.
///
/// Sets are ordered by (cardinality, mask), so ∅ comes first, then the
/// singletons in cluster order, then pairs, and so on. The family always
/// contains ∅, every singleton, and Ω.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FocalStructure {
    c: usize,
    mode: FocalMode,
    sets: Vec<FocalSet>,
    index: HashMap<u32, usize>,
}

impl FocalStructure {
    pub fn full_power_set(c: usize) -> Result<FocalStructure, BeliefError> {
        if c == 0 || c > MAX_FRAME {
            return Err(BeliefError::BadFrameSize(c));
        }
        let sets = (0u32..1 << c).map(FocalSet).collect();
        Ok(Self::from_sets(c, FocalMode::FullPowerSet, sets))
    }

    pub fn pairs_plus_omega(c: usize) -> Result<FocalStructure, BeliefError> {
        if c == 0 || c > MAX_FRAME {
            return Err(BeliefError::BadFrameSize(c));
        }
        let mut sets = vec![FocalSet::EMPTY];
        for k in 0..c {
            sets.push(FocalSet::singleton(k));
        }
        for k in 0..c {
            for l in k + 1..c {
                sets.push(FocalSet::singleton(k).union(FocalSet::singleton(l)));
            }
        }
        let omega = FocalSet::omega(c);
        if !sets.contains(&omega) {
            sets.push(omega);
        }
        Ok(Self::from_sets(c, FocalMode::PairsPlusOmega, sets))
    }

    /// Full power set up to c = 8, pairs-plus-Ω beyond (2^c blowup guard).
    pub fn auto(c: usize) -> Result<FocalStructure, BeliefError> {
        if c <= 8 {
            Self::full_power_set(c)
        } else {
            Self::pairs_plus_omega(c)
        }
    }

    fn from_sets(c: usize, mode: FocalMode, mut sets: Vec<FocalSet>) -> FocalStructure {
        sets.sort_by_key(|s| (s.cardinality(), s.0));
        let index = sets.iter().enumerate().map(|(i, s)| (s.0, i)).collect();
        FocalStructure { c, mode, sets, index }
    }

    pub fn frame_size(&self) -> usize {
        self.c
    }

    pub fn mode(&self) -> FocalMode {
        self.mode
    }

    pub fn sets(&self) -> &[FocalSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index_of(&self, set: FocalSet) -> Option<usize> {
        self.index.get(&set.0).copied()
    }

    /// Position of ∅ in the set order (always 0 by the sort key).
    pub fn empty_index(&self) -> usize {
        0
    }
}

/// A basic belief assignment over a focal structure.
#[derive(Clone, Debug, PartialEq)]
pub struct MassFunction {
    structure: FocalStructure,
    masses: Vec<f64>,
}

impl MassFunction {
    /// Validates nonnegativity and the unit sum before accepting the masses.
    pub fn new(structure: FocalStructure, masses: Vec<f64>) -> Result<MassFunction, BeliefError> {
        if masses.len() != structure.len() {
            return Err(BeliefError::LengthMismatch { got: masses.len(), want: structure.len() });
        }
        let sum: f64 = masses.iter().sum();
        if masses.iter().any(|&m| !(m >= 0.0) || !m.is_finite()) || (sum - 1.0).abs() > MASS_TOL {
            return Err(BeliefError::InvalidMass(sum));
        }
        Ok(MassFunction { structure, masses })
    }

    /// Mass function from (set, mass) pairs; unlisted sets get zero.
    pub fn from_pairs(
        structure: FocalStructure,
        pairs: &[(FocalSet, f64)],
    ) -> Result<MassFunction, BeliefError> {
        let mut masses = vec![0.0; structure.len()];
        for &(set, m) in pairs {
            let j = structure.index_of(set).ok_or(BeliefError::UnknownFocalSet(set))?;
            masses[j] += m;
        }
        MassFunction::new(structure, masses)
    }

    pub fn structure(&self) -> &FocalStructure {
        &self.structure
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn mass_of(&self, set: FocalSet) -> f64 {
        self.structure.index_of(set).map_or(0.0, |j| self.masses[j])
    }

    pub fn empty_mass(&self) -> f64 {
        self.masses[self.structure.empty_index()]
    }

    /// Credibility: total mass of nonempty subsets of `a`.
    pub fn bel(&self, a: FocalSet) -> f64 {
        self.structure
            .sets
            .iter()
            .zip(&self.masses)
            .filter(|(s, _)| !s.is_empty() && s.is_subset_of(a))
            .map(|(_, &m)| m)
            .sum()
    }

    /// Plausibility: total mass of sets intersecting `a`.
    pub fn pl(&self, a: FocalSet) -> f64 {
        self.structure
            .sets
            .iter()
            .zip(&self.masses)
            .filter(|(s, _)| !s.intersection(a).is_empty())
            .map(|(_, &m)| m)
            .sum()
    }

    /// Contour function: plausibility of each singleton.
    pub fn contour(&self) -> Vec<f64> {
        (0..self.structure.c).map(|k| self.pl(FocalSet::singleton(k))).collect()
    }

    /// Pignistic transform: mass of each set split equally among its members,
    /// renormalized by 1 − m(∅).
    pub fn pignistic(&self) -> Result<Vec<f64>, BeliefError> {
        let m_empty = self.empty_mass();
        if 1.0 - m_empty <= MASS_TOL {
            return Err(BeliefError::TotalConflict);
        }
        let mut bet = vec![0.0; self.structure.c];
        for (s, &m) in self.structure.sets.iter().zip(&self.masses) {
            if s.is_empty() || m == 0.0 {
                continue;
            }
            let share = m / (s.cardinality() as f64 * (1.0 - m_empty));
            for k in s.members() {
                bet[k] += share;
            }
        }
        Ok(bet)
    }
}

/// Normalized conjunctive (Dempster) combination of two mass functions on the
/// same structure. Errors on total conflict.
pub fn dempster_combine(
    m1: &MassFunction,
    m2: &MassFunction,
) -> Result<MassFunction, BeliefError> {
    if m1.structure != m2.structure {
        return Err(BeliefError::FrameMismatch(m1.structure.c, m2.structure.c));
    }
    let st = &m1.structure;
    let mut combined = vec![0.0; st.len()];
    let mut conflict = 0.0;
    for (b, &mb) in st.sets.iter().zip(&m1.masses) {
        if mb == 0.0 {
            continue;
        }
        for (c, &mc) in st.sets.iter().zip(&m2.masses) {
            if mc == 0.0 {
                continue;
            }
            let inter = b.intersection(*c);
            if inter.is_empty() {
                conflict += mb * mc;
            } else {
                // Intersections of structure members stay in the structure for
                // both supported modes.
                let j = st.index_of(inter).ok_or(BeliefError::UnknownFocalSet(inter))?;
                combined[j] += mb * mc;
            }
        }
    }
    if 1.0 - conflict <= MASS_TOL {
        return Err(BeliefError::TotalConflict);
    }
    for m in &mut combined {
        *m /= 1.0 - conflict;
    }
    MassFunction::new(st.clone(), combined)
}

/// Plausibility-weighted decision: argmax over nonempty X of
/// `λ_X / (|X|^r (1 − m(∅))) · Pl(X)`, ties broken by smallest cardinality
/// then lowest mask. `lambda` is indexed like the structure's sets and
/// defaults to 1.
pub fn plausibility_decision(
    m: &MassFunction,
    r: f64,
    lambda: Option<&[f64]>,
) -> Result<FocalSet, BeliefError> {
    let m_empty = m.empty_mass();
    if 1.0 - m_empty <= MASS_TOL {
        return Err(BeliefError::TotalConflict);
    }
    if let Some(l) = lambda {
        if l.len() != m.structure.len() {
            return Err(BeliefError::LengthMismatch { got: l.len(), want: m.structure.len() });
        }
    }
    let kb = 1.0 / (1.0 - m_empty);
    let mut best: Option<(FocalSet, f64)> = None;
    for (j, &set) in m.structure.sets.iter().enumerate() {
        if set.is_empty() {
            continue;
        }
        let lam = lambda.map_or(1.0, |l| l[j]);
        let weight = kb * lam / (set.cardinality() as f64).powf(r);
        let score = weight * m.pl(set);
        // Sets are scanned in (cardinality, mask) order, so keeping the first
        // strict maximum implements the tie rule.
        if best.map_or(true, |(_, s)| score > s) {
            best = Some((set, score));
        }
    }
    Ok(best.expect("structure contains nonempty sets").0)
}
