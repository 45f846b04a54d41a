//! Command-line front end: synthetic data generation, graph dissimilarities,
//! centrality scores, (credal) clustering, community detection, and metric
//! reports. Every output embeds a manifest that reproduces the run.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mecm_core::baselines::{ecm_fit, mcm_fit, mfcm_fit, BaselineError, EcmParams};
use mecm_core::belief::{BeliefError, FocalStructure};
use mecm_core::dissimilarity::{DissimilarityMatrix, PrototypeSet};
use mecm_core::eval::{
    evidential_indices, indicator_matrix, modularity, nmi_vi, pair_indices, EvalError,
};
use mecm_core::generators::{
    gaussian_graph, gaussian_mixture, overlapped_circles, GaussComponent, GeneratorError,
};
use mecm_core::graph::{
    esc_centrality, mean_first_passage_times, zhou_dissimilarity, GraphError, SeedConfig,
};
use mecm_core::io::{self, CredalResultDoc, IoError, RunManifest};
use mecm_core::mecm::{mecm_fit, CredalPartition, MecmError, MecmParams};
use mecm_core::pipeline::{detect_communities, DetectionConfig, InitStrategy, PipelineError};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(
    name = "mecm",
    version,
    about = "Median evidential c-means: credal clustering and community detection"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute a graph dissimilarity matrix (CSV) from an edge list
    Dissim(DissimArgs),
    /// Score nodes by evidential semi-local centrality (CSV)
    Centrality(CentralityArgs),
    /// Cluster dissimilarity or coordinate data (JSON result)
    Cluster(ClusterArgs),
    /// Detect communities by sweeping candidate counts (JSON result)
    Detect(DetectArgs),
    /// Compare a result file against reference labels (metrics row)
    Eval(EvalArgs),
    /// Generate synthetic datasets
    Generate(GenerateArgs),
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Clustering(#[from] MecmError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error(transparent)]
    Belief(#[from] BeliefError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Dissimilarity(#[from] mecm_core::dissimilarity::DissimilarityError),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

// Numeric failures (exit 2) as opposed to validation failures (exit 1).
fn numeric_graph(e: &GraphError) -> bool {
    matches!(e, GraphError::SingularSystem | GraphError::Disconnected { .. })
}

fn numeric_baseline(e: &BaselineError) -> bool {
    matches!(e, BaselineError::SingularSystem)
}

fn numeric_belief(e: &BeliefError) -> bool {
    matches!(e, BeliefError::TotalConflict)
}

fn numeric_eval(e: &EvalError) -> bool {
    match e {
        EvalError::TotalConflictRow(_) => true,
        EvalError::Baseline(b) => numeric_baseline(b),
        _ => false,
    }
}

fn numeric_io(e: &IoError) -> bool {
    match e {
        IoError::Graph(g) => numeric_graph(g),
        IoError::Baseline(b) => numeric_baseline(b),
        IoError::Belief(b) => numeric_belief(b),
        IoError::Eval(ev) => numeric_eval(ev),
        _ => false,
    }
}

fn numeric_pipeline(e: &PipelineError) -> bool {
    match e {
        PipelineError::Graph(g) => numeric_graph(g),
        PipelineError::Baseline(b) => numeric_baseline(b),
        PipelineError::Belief(b) => numeric_belief(b),
        PipelineError::Eval(ev) => numeric_eval(ev),
        _ => false,
    }
}

fn exit_code(e: &CliError) -> u8 {
    let numeric = match e {
        CliError::Io(x) => numeric_io(x),
        CliError::Graph(x) => numeric_graph(x),
        CliError::Baseline(x) => numeric_baseline(x),
        CliError::Belief(x) => numeric_belief(x),
        CliError::Eval(x) => numeric_eval(x),
        CliError::Pipeline(x) => numeric_pipeline(x),
        CliError::Generator(GeneratorError::Graph(g)) => numeric_graph(g),
        _ => false,
    };
    if numeric {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Keep --help/--version on their conventional success path;
            // real argument errors exit 1 (validation).
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cmd: Cmd) -> Result<(), CliError> {
    match cmd {
        Cmd::Dissim(a) => run_dissim(a),
        Cmd::Centrality(a) => run_centrality(a),
        Cmd::Cluster(a) => run_cluster(a),
        Cmd::Detect(a) => run_detect(a),
        Cmd::Eval(a) => run_eval(a),
        Cmd::Generate(a) => run_generate(a),
    }
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

/// 1-based row names used when a dataset has no ids of its own.
fn row_ids(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

// ---------------------------------------------------------------- dissim --

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum DissimKind {
    /// Mean first-passage times of the unbiased random walk
    Mfpt,
    /// Symmetric dissimilarity from first-passage-time profiles
    Zhou,
}

#[derive(Args)]
struct DissimArgs {
    /// Edge-list file (`u v [w]` lines, `#` comments)
    #[arg(long)]
    graph: PathBuf,
    /// Which matrix to emit
    #[arg(long, value_enum, default_value_t = DissimKind::Zhou)]
    kind: DissimKind,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
}

fn run_dissim(a: DissimArgs) -> Result<(), CliError> {
    let g = io::load_edge_list(&a.graph)?;
    let t = mean_first_passage_times(&g)?;
    let d = match a.kind {
        DissimKind::Mfpt => t,
        DissimKind::Zhou => zhou_dissimilarity(&t)?.raw,
    };
    let manifest = RunManifest::new("dissim", VERSION)
        .with_input(&path_str(&a.graph))
        .with_param("kind", format!("{:?}", a.kind).to_lowercase());
    io::write_text_file(&a.out, &io::matrix_to_csv(&d, Some(g.node_ids()), &manifest))?;
    Ok(())
}

// ------------------------------------------------------------ centrality --

#[derive(Args)]
struct CentralityArgs {
    /// Edge-list file
    #[arg(long)]
    graph: PathBuf,
    /// Output CSV path (`id,score` rows)
    #[arg(long)]
    out: PathBuf,
}

fn run_centrality(a: CentralityArgs) -> Result<(), CliError> {
    let g = io::load_edge_list(&a.graph)?;
    let scores = esc_centrality(&g)?;
    let manifest = RunManifest::new("centrality", VERSION).with_input(&path_str(&a.graph));
    io::write_text_file(&a.out, &io::scores_to_csv(g.node_ids(), &scores, &manifest))?;
    Ok(())
}

// --------------------------------------------------------------- cluster --

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum Method {
    Mecm,
    Mcm,
    Mfcm,
    Ecm,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum FocalArg {
    /// Full power set up to 8 clusters, pairs+Ω beyond
    Auto,
    /// All 2^c subsets
    Full,
    /// ∅, singletons, pairs, and Ω only
    Pairs,
}

impl FocalArg {
    fn structure(self, c: usize) -> Result<FocalStructure, BeliefError> {
        match self {
            FocalArg::Auto => FocalStructure::auto(c),
            FocalArg::Full => FocalStructure::full_power_set(c),
            FocalArg::Pairs => FocalStructure::pairs_plus_omega(c),
        }
    }
}

#[derive(Args)]
struct ClusterArgs {
    /// Dissimilarity CSV (square, possibly asymmetric)
    #[arg(long, conflicts_with = "objects")]
    dissim: Option<PathBuf>,
    /// Coordinate CSV, one point per row (required for ecm; others use
    /// Euclidean distances of the points)
    #[arg(long)]
    objects: Option<PathBuf>,
    #[arg(long, value_enum)]
    method: Method,
    /// Number of clusters
    #[arg(long)]
    c: usize,
    /// Cardinality exponent weighting imprecise focal sets
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Fuzziness exponent (> 1)
    #[arg(long, default_value_t = 2.0)]
    beta: f64,
    /// Outlier distance: mass farther than δ from every prototype drifts to ∅
    #[arg(long, default_value_t = 100.0)]
    delta: f64,
    /// Mean-vs-minimum balance in imprecise-set distances
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Ambiguity sensitivity of the prototype-spread discount
    #[arg(long, default_value_t = 0.9)]
    eta: f64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    /// Center-movement tolerance (ecm only)
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Focal-set family (mecm/ecm)
    #[arg(long, value_enum, default_value_t = FocalArg::Auto)]
    focal: FocalArg,
    /// 1-based object rows used as initial prototypes/centers
    #[arg(long, value_delimiter = ',', conflicts_with = "seed")]
    init: Option<Vec<usize>>,
    /// Seed for a random distinct initialization
    #[arg(long)]
    seed: Option<u64>,
    /// Output JSON path
    #[arg(long)]
    out: PathBuf,
}

/// Initial prototype rows (0-based) from `--init` (1-based) or `--seed`.
fn resolve_init(
    init: &Option<Vec<usize>>,
    seed: Option<u64>,
    n: usize,
    c: usize,
) -> Result<Vec<usize>, CliError> {
    if c == 0 || c > n {
        return Err(usage(format!("need 1 ≤ c ≤ n, got c={c} with n={n}")));
    }
    match (init, seed) {
        (Some(rows), None) => {
            if rows.len() != c {
                return Err(usage(format!(
                    "--init needs exactly {c} indices, got {}",
                    rows.len()
                )));
            }
            rows.iter()
                .map(|&r| {
                    if r == 0 || r > n {
                        Err(usage(format!("--init row {r} outside 1..={n}")))
                    } else {
                        Ok(r - 1)
                    }
                })
                .collect()
        }
        (None, Some(seed)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(rand::seq::index::sample(&mut rng, n, c).into_vec())
        }
        _ => Err(usage("provide exactly one of --init or --seed")),
    }
}

fn cluster_manifest(a: &ClusterArgs) -> RunManifest {
    let mut m = RunManifest::new("cluster", VERSION);
    if let Some(p) = &a.dissim {
        m = m.with_input(&path_str(p));
    }
    if let Some(p) = &a.objects {
        m = m.with_input(&path_str(p));
    }
    m = m
        .with_param("method", format!("{:?}", a.method).to_lowercase())
        .with_param("c", a.c as u64)
        .with_param("alpha", a.alpha)
        .with_param("beta", a.beta)
        .with_param("delta", a.delta)
        .with_param("gamma", a.gamma)
        .with_param("eta", a.eta)
        .with_param("max_iter", a.max_iter as u64)
        .with_param("tol", a.tol)
        .with_param("focal", format!("{:?}", a.focal).to_lowercase());
    if let Some(rows) = &a.init {
        m = m.with_param(
            "init",
            rows.iter().map(|&r| r as u64).collect::<Vec<_>>(),
        );
    }
    if let Some(s) = a.seed {
        m = m.with_param("seed", s);
    }
    m
}

fn run_cluster(a: ClusterArgs) -> Result<(), CliError> {
    let manifest = cluster_manifest(&a);
    let points = a.objects.as_deref().map(io::load_object_csv).transpose()?;

    let doc = if a.method == Method::Ecm {
        let x = points.ok_or_else(|| usage("ecm clusters coordinates; provide --objects"))?;
        let init = resolve_init(&a.init, a.seed, x.n(), a.c)?;
        let centers: Vec<Vec<f64>> = init.iter().map(|&i| x.row(i).to_vec()).collect();
        let mut params = EcmParams::new(a.c, a.alpha, a.beta, a.delta);
        params.max_iter = a.max_iter;
        params.tol = a.tol;
        let structure = a.focal.structure(a.c)?;
        let (partition, centers, report) = ecm_fit(&x, &params, &structure, &centers)?;
        let ids = row_ids(x.n());
        CredalResultDoc::from_partition(&partition, Vec::new(), &report, &ids, "ecm", manifest)?
            .with_centers(centers)
    } else {
        let d = match (&a.dissim, &points) {
            (Some(p), _) => io::load_dissimilarity_csv(p)?,
            (None, Some(x)) => {
                let rows: Vec<Vec<f64>> = (0..x.n()).map(|i| x.row(i).to_vec()).collect();
                DissimilarityMatrix::euclidean(&rows)?
            }
            (None, None) => return Err(usage("provide --dissim or --objects")),
        };
        let ids = row_ids(d.n());
        let init = PrototypeSet::new(resolve_init(&a.init, a.seed, d.n(), a.c)?, d.n())
            .map_err(MecmError::from)?;
        match a.method {
            Method::Mecm => {
                let mut params = MecmParams::new(a.c, a.alpha, a.beta, a.delta, a.gamma, a.eta);
                params.max_iter = a.max_iter;
                let structure = a.focal.structure(a.c)?;
                let (partition, protos, report) = mecm_fit(&d, &params, &structure, &init)?;
                CredalResultDoc::from_partition(
                    &partition,
                    CredalResultDoc::prototype_ids(&protos, &ids),
                    &report,
                    &ids,
                    "mecm",
                    manifest,
                )?
            }
            Method::Mcm => {
                let (hard, protos, report) = mcm_fit(&d, a.c, &init, a.max_iter)?;
                let partition =
                    CredalPartition::crisp(FocalStructure::auto(a.c)?, hard.labels())?;
                CredalResultDoc::from_partition(
                    &partition,
                    CredalResultDoc::prototype_ids(&protos, &ids),
                    &report,
                    &ids,
                    "mcm",
                    manifest,
                )?
            }
            Method::Mfcm => {
                let (u, protos, report) = mfcm_fit(&d, a.c, a.beta, &init, a.max_iter)?;
                let partition =
                    CredalPartition::crisp(FocalStructure::auto(a.c)?, u.harden().labels())?;
                CredalResultDoc::from_partition(
                    &partition,
                    CredalResultDoc::prototype_ids(&protos, &ids),
                    &report,
                    &ids,
                    "mfcm",
                    manifest,
                )?
                .with_memberships(&u)
            }
            Method::Ecm => unreachable!("handled above"),
        }
    };
    io::write_credal_result(&doc, &a.out)?;
    Ok(())
}

// ---------------------------------------------------------------- detect --

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum StrategyArg {
    /// Centrality scan with the μ spacing rule
    Esc,
    /// Fuzzy median refinement of the centrality seeds
    MfcmRefined,
    /// Uniform distinct sample (requires --seed)
    Random,
}

#[derive(Args)]
struct DetectArgs {
    /// Edge-list file
    #[arg(long)]
    graph: PathBuf,
    /// Smallest candidate community count (≥ 2)
    #[arg(long, default_value_t = 2)]
    cmin: usize,
    /// Largest candidate community count
    #[arg(long)]
    cmax: usize,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    beta: f64,
    #[arg(long, default_value_t = 100.0)]
    delta: f64,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long, default_value_t = 0.9)]
    eta: f64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    /// Seed-spacing threshold on the normalized dissimilarity
    #[arg(long, default_value_t = 0.9)]
    mu: f64,
    /// Factor shrinking μ when a scan gathers too few seeds
    #[arg(long, default_value_t = 0.9)]
    mu_decay: f64,
    #[arg(long, value_enum, default_value_t = StrategyArg::Esc)]
    init_strategy: StrategyArg,
    /// RNG seed (required with --init-strategy random)
    #[arg(long)]
    seed: Option<u64>,
    /// Output JSON path
    #[arg(long)]
    out: PathBuf,
}

fn run_detect(a: DetectArgs) -> Result<(), CliError> {
    let strategy = match (a.init_strategy, a.seed) {
        (StrategyArg::Esc, _) => InitStrategy::Esc,
        (StrategyArg::MfcmRefined, _) => InitStrategy::MfcmRefined,
        (StrategyArg::Random, Some(seed)) => InitStrategy::Random { seed },
        (StrategyArg::Random, None) => {
            return Err(usage("--init-strategy random requires --seed"))
        }
    };
    let mut manifest = RunManifest::new("detect", VERSION)
        .with_input(&path_str(&a.graph))
        .with_param("cmin", a.cmin as u64)
        .with_param("cmax", a.cmax as u64)
        .with_param("alpha", a.alpha)
        .with_param("beta", a.beta)
        .with_param("delta", a.delta)
        .with_param("gamma", a.gamma)
        .with_param("eta", a.eta)
        .with_param("max_iter", a.max_iter as u64)
        .with_param("mu", a.mu)
        .with_param("mu_decay", a.mu_decay)
        .with_param(
            "init_strategy",
            match a.init_strategy {
                StrategyArg::Esc => "esc",
                StrategyArg::MfcmRefined => "mfcm_refined",
                StrategyArg::Random => "random",
            },
        );
    if let Some(s) = a.seed {
        manifest = manifest.with_param("seed", s);
    }

    let g = io::load_edge_list(&a.graph)?;
    let mut params = MecmParams::new(a.cmin.max(1), a.alpha, a.beta, a.delta, a.gamma, a.eta);
    params.max_iter = a.max_iter;
    let mut seed_cfg = SeedConfig::new(a.cmin.max(1));
    seed_cfg.mu = a.mu;
    seed_cfg.mu_decay = a.mu_decay;
    let cfg = DetectionConfig {
        c_min: a.cmin,
        c_max: a.cmax,
        mecm: params,
        seed_cfg,
        init_strategy: strategy,
    };
    let result = detect_communities(&g, &cfg)?;

    let ids: Vec<String> = g.node_ids().to_vec();
    let best_report = &result.per_c_reports[result.best_c - a.cmin];
    let doc = CredalResultDoc::from_partition(
        &result.partition,
        CredalResultDoc::prototype_ids(&result.prototypes, &ids),
        best_report,
        &ids,
        "mecm",
        manifest,
    )?
    .with_sweep(result.best_c, result.q_trace, result.per_c_reports);
    io::write_credal_result(&doc, &a.out)?;
    Ok(())
}

// ------------------------------------------------------------------ eval --

#[derive(Args)]
struct EvalArgs {
    /// Result JSON from `cluster` or `detect`
    #[arg(long)]
    pred: PathBuf,
    /// Reference labels CSV (`id,group` rows)
    #[arg(long = "ref")]
    reference: PathBuf,
    /// Graph for the modularity column (edge list)
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Also write the metrics row to this CSV
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run_eval(a: EvalArgs) -> Result<(), CliError> {
    let doc = io::read_credal_result(&a.pred)?;
    let labels = io::load_labels_csv(&a.reference)?;
    let ids = doc.object_ids();
    let aligned = labels
        .aligned_to(&ids)
        .map_err(|id| usage(format!("reference file lacks object id `{id}`")))?;
    let reference = mecm_core::baselines::HardPartition::new(aligned, labels.n_groups)
        .map_err(BaselineError::from)?;

    let pred_hard = doc.hard_partition()?;
    let focals = doc.hard_focals()?;
    let (_, p, r, ri) = pair_indices(&pred_hard, &reference)?;
    let (_, ep, er, eri) = evidential_indices(&focals, &reference)?;
    let (nmi, vi) = nmi_vi(&pred_hard, &reference)?;

    let q = match &a.graph {
        Some(path) => {
            let g = io::load_edge_list(path)?;
            let by_id: HashMap<&str, usize> = ids
                .iter()
                .map(String::as_str)
                .zip(pred_hard.labels().iter().copied())
                .collect();
            let node_labels = g
                .node_ids()
                .iter()
                .map(|id| {
                    by_id
                        .get(id.as_str())
                        .copied()
                        .ok_or_else(|| usage(format!("result lacks graph node `{id}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let hard = mecm_core::baselines::HardPartition::new(node_labels, doc.c)
                .map_err(BaselineError::from)?;
            Some(modularity(&g, &indicator_matrix(&hard), doc.c)?)
        }
        None => None,
    };

    let mut manifest = RunManifest::new("eval", VERSION)
        .with_input(&path_str(&a.pred))
        .with_input(&path_str(&a.reference));
    if let Some(g) = &a.graph {
        manifest = manifest.with_input(&path_str(g));
    }

    let header = "method,P,R,RI,EP,ER,ERI,NMI,VI,Q";
    let row = format!(
        "{},{},{},{},{},{},{},{},{},{}",
        doc.method,
        io::fmt_f64(p),
        io::fmt_f64(r),
        io::fmt_f64(ri),
        io::fmt_f64(ep),
        io::fmt_f64(er),
        io::fmt_f64(eri),
        io::fmt_f64(nmi),
        io::fmt_f64(vi),
        q.map(io::fmt_f64).unwrap_or_default(),
    );
    println!("{header}");
    println!("{row}");
    if let Some(out) = &a.out {
        let contents = format!("{}\n{header}\n{row}\n", manifest.to_comment());
        io::write_text_file(out, &contents)?;
    }
    Ok(())
}

// -------------------------------------------------------------- generate --

#[derive(Args)]
struct GenerateArgs {
    #[command(subcommand)]
    what: GenerateCmd,
}

#[derive(Subcommand)]
enum GenerateCmd {
    /// Two uniform discs of equal radius
    Circles {
        /// Disc radius
        #[arg(long)]
        r: f64,
        /// Flat center coordinates x1,y1,x2,y2
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        centers: Vec<f64>,
        /// Points per disc
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Points CSV path
        #[arg(long)]
        out: PathBuf,
        /// Labels CSV path
        #[arg(long)]
        labels_out: PathBuf,
    },
    /// Spherical Gaussian blobs linked by a distance threshold
    GaussGraph {
        /// Flat component means x1,y1,x2,y2,…
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        means: Vec<f64>,
        /// Per-coordinate standard deviation
        #[arg(long)]
        std: f64,
        /// Points per component
        #[arg(long)]
        nper: usize,
        /// Link every pair closer than this distance
        #[arg(long)]
        dist: f64,
        #[arg(long)]
        seed: u64,
        /// Edge-list output path
        #[arg(long)]
        out: PathBuf,
        /// Labels CSV path
        #[arg(long)]
        labels_out: PathBuf,
        /// Optional coordinates CSV path
        #[arg(long)]
        points_out: Option<PathBuf>,
    },
    /// Spherical Gaussian mixture (points only)
    GaussMix {
        /// Flat component means x1,y1,x2,y2,…
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        means: Vec<f64>,
        /// Per-coordinate standard deviation
        #[arg(long)]
        std: f64,
        /// Points per component, comma separated
        #[arg(long, value_delimiter = ',')]
        counts: Vec<usize>,
        #[arg(long)]
        seed: u64,
        /// Points CSV path
        #[arg(long)]
        out: PathBuf,
        /// Labels CSV path
        #[arg(long)]
        labels_out: PathBuf,
    },
}

fn paired(flat: &[f64], what: &str) -> Result<Vec<[f64; 2]>, CliError> {
    if flat.is_empty() || flat.len() % 2 != 0 {
        return Err(usage(format!(
            "{what} wants x,y pairs, got {} values",
            flat.len()
        )));
    }
    Ok(flat.chunks(2).map(|p| [p[0], p[1]]).collect())
}

fn run_generate(a: GenerateArgs) -> Result<(), CliError> {
    match a.what {
        GenerateCmd::Circles {
            r,
            centers,
            n,
            seed,
            out,
            labels_out,
        } => {
            let pairs = paired(&centers, "--centers")?;
            if pairs.len() != 2 {
                return Err(usage("--centers wants exactly two x,y pairs"));
            }
            let manifest = RunManifest::new("generate", VERSION)
                .with_param("generator", "circles")
                .with_param("r", r)
                .with_param("centers", centers.clone())
                .with_param("n", n as u64)
                .with_param("seed", seed);
            let (points, labels) = overlapped_circles([pairs[0], pairs[1]], r, n, seed)?;
            io::write_text_file(&out, &io::points_to_csv(&points, &manifest))?;
            let ids = row_ids(points.n());
            io::write_text_file(&labels_out, &io::labels_to_csv(&ids, &labels, &manifest))?;
        }
        GenerateCmd::GaussGraph {
            means,
            std,
            nper,
            dist,
            seed,
            out,
            labels_out,
            points_out,
        } => {
            let centers = paired(&means, "--means")?;
            let manifest = RunManifest::new("generate", VERSION)
                .with_param("generator", "gauss-graph")
                .with_param("means", means.clone())
                .with_param("std", std)
                .with_param("nper", nper as u64)
                .with_param("dist", dist)
                .with_param("seed", seed);
            let cov = [[std * std, 0.0], [0.0, std * std]];
            let sizes = vec![nper; centers.len()];
            let generated = gaussian_graph(&centers, cov, &sizes, dist, seed)?;
            io::write_text_file(&out, &io::edges_to_text(&generated.graph, &manifest))?;
            let ids = generated.graph.node_ids().to_vec();
            io::write_text_file(
                &labels_out,
                &io::labels_to_csv(&ids, &generated.labels, &manifest),
            )?;
            if let Some(p) = points_out {
                io::write_text_file(&p, &io::points_to_csv(&generated.points, &manifest))?;
            }
        }
        GenerateCmd::GaussMix {
            means,
            std,
            counts,
            seed,
            out,
            labels_out,
        } => {
            let centers = paired(&means, "--means")?;
            if counts.len() != centers.len() {
                return Err(usage(format!(
                    "--counts wants {} entries to match --means, got {}",
                    centers.len(),
                    counts.len()
                )));
            }
            let manifest = RunManifest::new("generate", VERSION)
                .with_param("generator", "gauss-mix")
                .with_param("means", means.clone())
                .with_param("std", std)
                .with_param(
                    "counts",
                    counts.iter().map(|&x| x as u64).collect::<Vec<_>>(),
                )
                .with_param("seed", seed);
            let components: Vec<GaussComponent> = centers
                .iter()
                .zip(&counts)
                .map(|(m, &count)| GaussComponent {
                    mean: m.to_vec(),
                    cov: vec![vec![std * std, 0.0], vec![0.0, std * std]],
                    count,
                })
                .collect();
            let (points, labels) = gaussian_mixture(&components, seed)?;
            io::write_text_file(&out, &io::points_to_csv(&points, &manifest))?;
            let ids = row_ids(points.n());
            io::write_text_file(&labels_out, &io::labels_to_csv(&ids, &labels, &manifest))?;
        }
    }
    Ok(())
}
