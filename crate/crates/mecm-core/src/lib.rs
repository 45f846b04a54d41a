//! Median evidential c-means: prototype-based clustering of arbitrary
//! dissimilarity data under belief-function (credal) partitions, with the
//! graph machinery (random-walk dissimilarity, evidential centrality,
//! modularity) needed to apply it to community detection.
//!
//! Modules:
//! - [`belief`]: mass functions over the power set of a cluster frame —
//!   Bel/Pl/pignistic transforms, Dempster combination, decision rules.
//! - [`dissimilarity`]: the n×n dissimilarity container (no symmetry or
//!   metric assumptions).
//! - [`mecm`]: the median evidential c-means fitter and its validity index.
//! - [`baselines`]: median c-means, median fuzzy c-means, and evidential
//!   c-means for Euclidean object data.
//! - [`graph`]: weighted graphs, mean-first-passage-time dissimilarity,
//!   evidential semi-local centrality, and prototype seeding.
//! - [`generators`]: seeded synthetic datasets (overlapped discs, Gaussian
//!   mixtures, thresholded Gaussian graphs).
//! - [`eval`]: hardening rules, pair-counting and evidential indices,
//!   modularity variants, NMI/VI.
//! - [`pipeline`]: end-to-end community detection with a modularity sweep
//!   over candidate cluster counts.
//! - [`io`]: file formats (edge lists, CSV matrices, JSON results) and the
//!   run manifest.

pub mod baselines;
pub mod belief;
pub mod dissimilarity;
pub mod eval;
pub mod generators;
pub mod graph;
pub mod io;
pub mod mecm;
pub mod pipeline;

/// Floor used when a formula divides by a quantity that may collapse to zero
/// (prototype spread, zero dissimilarities).
pub const EPS: f64 = 1e-12;
