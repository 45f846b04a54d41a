//! File formats: whitespace edge lists, numeric CSV matrices, label files,
//! and the JSON result document. Every writer embeds a run manifest; floats
//! are printed in shortest round-trip form so written values reparse
//! bit-identically.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::baselines::{BaselineError, FuzzyPartition, HardPartition, ObjectData};
use crate::belief::{BeliefError, FocalSet};
use crate::dissimilarity::{DissimilarityError, DissimilarityMatrix, PrototypeSet};
use crate::eval::{harden_credal, harden_pignistic, EvalError};
use crate::graph::{GraphError, WeightedGraph};
use crate::mecm::{CredalPartition, FitReport};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {what}")]
    MalformedLine {
        path: String,
        line: usize,
        what: String,
    },
    #[error("{path}:{line}: self-loop on node {id}")]
    SelfLoop {
        path: String,
        line: usize,
        id: String,
    },
    #[error("{path}: no edges found")]
    EmptyGraph { path: String },
    #[error("{path}: matrix is {rows}×{cols}, expected square")]
    NonSquare {
        path: String,
        rows: usize,
        cols: usize,
    },
    #[error("{path}: {source}")]
    BadMatrix {
        path: String,
        source: DissimilarityError,
    },
    #[error("{path}: invalid JSON: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("result document references unknown focal set index {0}")]
    BadFocalIndex(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error(transparent)]
    Belief(#[from] BeliefError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Everything needed to rerun a command: subcommand, inputs, and the full
/// parameter set (seed included). Embedded verbatim in every output file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub inputs: Vec<String>,
    pub params: Map<String, Value>,
}

impl RunManifest {
    pub fn new(subcommand: &str, version: &str) -> RunManifest {
        RunManifest {
            tool: "mecm".into(),
            version: version.into(),
            subcommand: subcommand.into(),
            inputs: Vec::new(),
            params: Map::new(),
        }
    }

    pub fn with_input(mut self, path: &str) -> RunManifest {
        self.inputs.push(path.into());
        self
    }

    pub fn with_param(mut self, key: &str, value: impl Into<Value>) -> RunManifest {
        self.params.insert(key.into(), value.into());
        self
    }

    /// One-line JSON form used in CSV `# manifest:` comments.
    pub fn to_comment(&self) -> String {
        let json = serde_json::to_string(self).expect("manifest serializes");
        format!("# manifest: {json}")
    }
}

fn read_to_string(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })
}

/// Writes a whole text file, mapping failures to a path-carrying error.
pub fn write_text_file(path: &Path, contents: &str) -> Result<(), IoError> {
    std::fs::write(path, contents).map_err(|source| IoError::Write {
        path: path.display().to_string(),
        source,
    })
}

/// Non-empty, non-comment lines of a file with their 1-based line numbers.
fn data_lines(contents: &str) -> impl Iterator<Item = (usize, &str)> {
    contents
        .lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
}

/// Parses a whitespace edge list: `u v [w]` per line, `#` comments skipped,
/// arbitrary node tokens mapped to dense indices in first-appearance order,
/// duplicate edges summed, missing weight read as 1.
pub fn load_edge_list(path: &Path) -> Result<WeightedGraph, IoError> {
    let contents = read_to_string(path)?;
    let path_str = path.display().to_string();
    let malformed = |line: usize, what: &str| IoError::MalformedLine {
        path: path_str.clone(),
        line,
        what: what.into(),
    };

    let mut ids: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut intern = |tok: &str, ids: &mut Vec<String>| -> usize {
        *index.entry(tok.to_string()).or_insert_with(|| {
            ids.push(tok.to_string());
            ids.len() - 1
        })
    };

    let mut edges = Vec::new();
    for (line, text) in data_lines(&contents) {
        let mut toks = text.split_whitespace();
        let (Some(a), Some(b)) = (toks.next(), toks.next()) else {
            return Err(malformed(line, "expected `u v [w]`"));
        };
        let w = match toks.next() {
            Some(t) => t
                .parse::<f64>()
                .map_err(|_| malformed(line, &format!("bad weight `{t}`")))?,
            None => 1.0,
        };
        if toks.next().is_some() {
            return Err(malformed(line, "expected `u v [w]`, got extra fields"));
        }
        if !(w > 0.0) || !w.is_finite() {
            return Err(malformed(line, &format!("weight must be positive, got {w}")));
        }
        if a == b {
            return Err(IoError::SelfLoop {
                path: path_str,
                line,
                id: a.to_string(),
            });
        }
        let (u, v) = (intern(a, &mut ids), intern(b, &mut ids));
        edges.push((u, v, w));
    }
    if edges.is_empty() {
        return Err(IoError::EmptyGraph { path: path_str });
    }
    Ok(WeightedGraph::from_edges(ids, &edges)?)
}

/// Splits CSV rows of a file into trimmed cells, keeping line numbers.
fn csv_rows(contents: &str) -> Vec<(usize, Vec<&str>)> {
    data_lines(contents)
        .map(|(line, text)| (line, text.split(',').map(str::trim).collect()))
        .collect()
}

/// Reads a square numeric CSV. A header row (recognized by a non-numeric
/// first cell) and a leading label column under it are detected and skipped;
/// asymmetry is preserved.
pub fn load_dissimilarity_csv(path: &Path) -> Result<DissimilarityMatrix, IoError> {
    let contents = read_to_string(path)?;
    let path_str = path.display().to_string();
    let rows = csv_rows(&contents);
    if rows.is_empty() {
        return Err(IoError::MalformedLine {
            path: path_str,
            line: 1,
            what: "no data rows".into(),
        });
    }

    let numeric = |cell: &str| cell.parse::<f64>().ok();
    let has_header = numeric(rows[0].1[0]).is_none();
    let data = &rows[has_header as usize..];
    if data.is_empty() {
        return Err(IoError::MalformedLine {
            path: path_str,
            line: rows[0].0,
            what: "header without data rows".into(),
        });
    }
    let label_col = data.iter().all(|(_, cells)| {
        !cells.is_empty() && numeric(cells[0]).is_none() && cells.len() > 1
    });

    let n = data.len();
    let mut flat = Vec::with_capacity(n * n);
    for (line, cells) in data {
        let cells = &cells[label_col as usize..];
        if cells.len() != n {
            return Err(IoError::NonSquare {
                path: path_str,
                rows: n,
                cols: cells.len(),
            });
        }
        for cell in cells {
            flat.push(numeric(cell).ok_or_else(|| IoError::MalformedLine {
                path: path_str.clone(),
                line: *line,
                what: format!("non-numeric entry `{cell}`"),
            })?);
        }
    }
    DissimilarityMatrix::from_flat(n, flat).map_err(|source| IoError::BadMatrix {
        path: path_str,
        source,
    })
}

/// Reference labels: `id,group` rows with arbitrary group tokens mapped to
/// dense 0-based groups in first-appearance order.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelFile {
    pub ids: Vec<String>,
    pub groups: Vec<usize>,
    pub n_groups: usize,
}

impl LabelFile {
    /// Group of a given object id, if present.
    pub fn group_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id).map(|i| self.groups[i])
    }

    /// Groups aligned to an external id order; errors name the missing id.
    pub fn aligned_to(&self, ids: &[String]) -> Result<Vec<usize>, String> {
        let map: HashMap<&str, usize> = self
            .ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), self.groups[i]))
            .collect();
        ids.iter()
            .map(|id| map.get(id.as_str()).copied().ok_or_else(|| id.clone()))
            .collect()
    }
}

pub fn load_labels_csv(path: &Path) -> Result<LabelFile, IoError> {
    let contents = read_to_string(path)?;
    let path_str = path.display().to_string();
    let mut ids = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut group_index: HashMap<String, usize> = HashMap::new();
    let mut groups = Vec::new();
    for (line, cells) in csv_rows(&contents) {
        let [id, group] = cells[..] else {
            return Err(IoError::MalformedLine {
                path: path_str,
                line,
                what: "expected `id,group`".into(),
            });
        };
        if seen.insert(id.to_string(), line).is_some() {
            return Err(IoError::MalformedLine {
                path: path_str,
                line,
                what: format!("duplicate id `{id}`"),
            });
        }
        let next = group_index.len();
        let g = *group_index.entry(group.to_string()).or_insert(next);
        ids.push(id.to_string());
        groups.push(g);
    }
    if ids.is_empty() {
        return Err(IoError::MalformedLine {
            path: path_str,
            line: 1,
            what: "no label rows".into(),
        });
    }
    Ok(LabelFile {
        ids,
        groups,
        n_groups: group_index.len(),
    })
}

/// Numeric object CSV: one point per row, uniform width.
pub fn load_object_csv(path: &Path) -> Result<ObjectData, IoError> {
    let contents = read_to_string(path)?;
    let path_str = path.display().to_string();
    let mut rows = Vec::new();
    for (line, cells) in csv_rows(&contents) {
        let row: Result<Vec<f64>, IoError> = cells
            .iter()
            .map(|cell| {
                cell.parse::<f64>().map_err(|_| IoError::MalformedLine {
                    path: path_str.clone(),
                    line,
                    what: format!("non-numeric coordinate `{cell}`"),
                })
            })
            .collect();
        rows.push(row?);
    }
    if rows.is_empty() {
        return Err(IoError::MalformedLine {
            path: path_str,
            line: 1,
            what: "no data rows".into(),
        });
    }
    Ok(ObjectData::from_rows(&rows)?)
}

/// Shortest round-trip decimal form of a float (reparses bit-identically).
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// Dissimilarity matrix as CSV: manifest comment, optional `# nodes:` line,
/// then numeric rows.
pub fn matrix_to_csv(
    d: &DissimilarityMatrix,
    node_ids: Option<&[String]>,
    manifest: &RunManifest,
) -> String {
    let mut out = manifest.to_comment();
    out.push('\n');
    if let Some(ids) = node_ids {
        let _ = writeln!(out, "# nodes: {}", ids.join(","));
    }
    for i in 0..d.n() {
        let row: Vec<String> = d.row(i).iter().map(|&x| fmt_f64(x)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Per-node score table as CSV (`id,score` rows).
pub fn scores_to_csv(ids: &[String], scores: &[f64], manifest: &RunManifest) -> String {
    let mut out = manifest.to_comment();
    out.push('\n');
    out.push_str("id,score\n");
    for (id, &s) in ids.iter().zip(scores) {
        let _ = writeln!(out, "{id},{}", fmt_f64(s));
    }
    out
}

/// Points as a plain numeric CSV (reloadable with `load_object_csv`).
pub fn points_to_csv(points: &ObjectData, manifest: &RunManifest) -> String {
    let mut out = manifest.to_comment();
    out.push('\n');
    for i in 0..points.n() {
        let row: Vec<String> = points.row(i).iter().map(|&x| fmt_f64(x)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Label assignments as `id,group` rows; groups are written 1-based.
pub fn labels_to_csv(ids: &[String], groups: &[usize], manifest: &RunManifest) -> String {
    let mut out = manifest.to_comment();
    out.push('\n');
    out.push_str("id,community\n");
    for (id, &g) in ids.iter().zip(groups) {
        let _ = writeln!(out, "{id},{}", g + 1);
    }
    out
}

/// Whitespace edge list (upper triangle) with a manifest comment.
pub fn edges_to_text(g: &WeightedGraph, manifest: &RunManifest) -> String {
    let mut out = manifest.to_comment();
    out.push('\n');
    let ids = g.node_ids();
    for i in 0..g.n() {
        for j in i + 1..g.n() {
            let w = g.weight(i, j);
            if w > 0.0 {
                let _ = writeln!(out, "{} {} {}", ids[i], ids[j], fmt_f64(w));
            }
        }
    }
    out
}

/// One clustered object in the result document. Cluster numbering is
/// 1-based externally; `hard_focal` lists the members of the mass-maximal
/// focal set (empty for ∅).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectRecord {
    pub id: String,
    pub masses: Vec<f64>,
    pub pignistic: Vec<f64>,
    pub hard_label: usize,
    pub hard_focal: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub memberships: Option<Vec<f64>>,
}

/// JSON result of a clustering or detection run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CredalResultDoc {
    pub manifest: RunManifest,
    pub method: String,
    pub c: usize,
    /// Focal sets in mass order, as sorted 1-based cluster arrays (∅ = []).
    pub focal_sets: Vec<Vec<usize>>,
    /// Prototype object ids, cluster order (empty for center-based fits).
    pub prototypes: Vec<String>,
    /// Cluster centers, cluster order (center-based fits only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centers: Option<Vec<Vec<f64>>>,
    pub report: FitReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_c: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_trace: Option<Vec<(usize, f64)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_c_reports: Option<Vec<FitReport>>,
    pub objects: Vec<ObjectRecord>,
}

impl CredalResultDoc {
    /// Assembles the document from a fitted credal partition. `ids` names
    /// the objects in row order; `prototype_ids` the chosen prototypes in
    /// cluster order (empty when the method fits centers, not prototypes).
    pub fn from_partition(
        partition: &CredalPartition,
        prototype_ids: Vec<String>,
        report: &FitReport,
        ids: &[String],
        method: &str,
        manifest: RunManifest,
    ) -> Result<CredalResultDoc, IoError> {
        let structure = partition.structure();
        let c = structure.frame_size();
        let focal_sets = structure
            .sets()
            .iter()
            .map(|s| s.members().iter().map(|&k| k + 1).collect())
            .collect();
        let hard = harden_pignistic(partition)?;
        let focals = harden_credal(partition);
        let objects = (0..partition.n())
            .map(|i| -> Result<ObjectRecord, IoError> {
                Ok(ObjectRecord {
                    id: ids[i].clone(),
                    masses: partition.row(i).to_vec(),
                    pignistic: partition.mass_function(i).pignistic()?,
                    hard_label: hard.labels()[i] + 1,
                    hard_focal: focals[i].members().iter().map(|&k| k + 1).collect(),
                    memberships: None,
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(CredalResultDoc {
            manifest,
            method: method.into(),
            c,
            focal_sets,
            prototypes: prototype_ids,
            centers: None,
            report: report.clone(),
            best_c: None,
            q_trace: None,
            per_c_reports: None,
            objects,
        })
    }

    /// Names the prototypes of a prototype-based fit.
    pub fn prototype_ids(prototypes: &PrototypeSet, ids: &[String]) -> Vec<String> {
        prototypes.indices().iter().map(|&i| ids[i].clone()).collect()
    }

    /// Attaches fitted cluster centers (for center-based fits).
    pub fn with_centers(mut self, centers: Vec<Vec<f64>>) -> CredalResultDoc {
        self.centers = Some(centers);
        self
    }

    /// Attaches per-object fuzzy memberships (for fuzzy fits serialized as
    /// crisp credal documents).
    pub fn with_memberships(mut self, u: &FuzzyPartition) -> CredalResultDoc {
        for (i, obj) in self.objects.iter_mut().enumerate() {
            obj.memberships = Some(u.row(i).to_vec());
        }
        self
    }

    pub fn with_sweep(
        mut self,
        best_c: usize,
        q_trace: Vec<(usize, f64)>,
        per_c_reports: Vec<FitReport>,
    ) -> CredalResultDoc {
        self.best_c = Some(best_c);
        self.q_trace = Some(q_trace);
        self.per_c_reports = Some(per_c_reports);
        self
    }

    pub fn object_ids(&self) -> Vec<String> {
        self.objects.iter().map(|o| o.id.clone()).collect()
    }

    /// 0-based hardened labels as a partition over this document's frame.
    pub fn hard_partition(&self) -> Result<HardPartition, IoError> {
        let labels = self
            .objects
            .iter()
            .map(|o| {
                if o.hard_label == 0 || o.hard_label > self.c {
                    Err(IoError::BadFocalIndex(o.hard_label))
                } else {
                    Ok(o.hard_label - 1)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(HardPartition::new(labels, self.c)?)
    }

    /// 0-based hardened focal sets.
    pub fn hard_focals(&self) -> Result<Vec<FocalSet>, IoError> {
        self.objects
            .iter()
            .map(|o| {
                let members = o
                    .hard_focal
                    .iter()
                    .map(|&k| {
                        if k == 0 || k > self.c {
                            Err(IoError::BadFocalIndex(k))
                        } else {
                            Ok(k - 1)
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(FocalSet::from_members(&members))
            })
            .collect()
    }
}

pub fn write_credal_result(doc: &CredalResultDoc, path: &Path) -> Result<(), IoError> {
    let mut json = serde_json::to_string_pretty(doc).map_err(|source| IoError::Json {
        path: path.display().to_string(),
        source,
    })?;
    json.push('\n');
    write_text_file(path, &json)
}

pub fn read_credal_result(path: &Path) -> Result<CredalResultDoc, IoError> {
    let contents = read_to_string(path)?;
    serde_json::from_str(&contents).map_err(|source| IoError::Json {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::FocalStructure;
    use crate::mecm::ConvergedBy;
    use std::io::Write as _;
    use tempfile::NamedTempFile;

    fn file_with(contents: &str) -> NamedTempFile {
        let mut f = NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    fn manifest() -> RunManifest {
        RunManifest::new("test", "0.0.0")
            .with_input("in.file")
            .with_param("seed", 7)
            .with_param("delta", 100.0)
    }

    #[test]
    fn edge_list_minimal_parse() {
        let f = file_with("a b\nb c\n");
        let g = load_edge_list(f.path()).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.node_ids(), ["a", "b", "c"]);
        assert_eq!(g.weight(0, 1), 1.0);
        assert_eq!(g.weight(1, 2), 1.0);
        assert_eq!(g.total_weight(), 4.0);
    }

    #[test]
    fn edge_list_duplicates_sum() {
        let f = file_with("a b 2\na b 3\n");
        let g = load_edge_list(f.path()).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.weight(0, 1), 5.0);
        assert_eq!(g.weight(1, 0), 5.0);
    }

    #[test]
    fn edge_list_karate_counts() {
        let g = load_edge_list(Path::new(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../data/karate.edges"
        )))
        .unwrap();
        assert_eq!(g.n(), 34);
        assert_eq!(g.total_weight(), 156.0);
    }

    #[test]
    fn edge_list_diagnostics_carry_line_numbers() {
        let err = load_edge_list(file_with("# c\n\na a\n").path()).unwrap_err();
        let IoError::SelfLoop { line, id, .. } = err else {
            panic!("want SelfLoop, got {err:?}")
        };
        assert_eq!((line, id.as_str()), (3, "a"));

        let err = load_edge_list(file_with("a b 1\nc\n").path()).unwrap_err();
        let IoError::MalformedLine { line, .. } = err else {
            panic!("want MalformedLine, got {err:?}")
        };
        assert_eq!(line, 2);

        let err = load_edge_list(file_with("a b x\n").path()).unwrap_err();
        assert!(matches!(err, IoError::MalformedLine { line: 1, .. }));

        let err = load_edge_list(file_with("a b 1 2\n").path()).unwrap_err();
        assert!(matches!(err, IoError::MalformedLine { line: 1, .. }));

        let err = load_edge_list(file_with("a b 0\n").path()).unwrap_err();
        assert!(matches!(err, IoError::MalformedLine { line: 1, .. }));

        let err = load_edge_list(file_with("# only comments\n").path()).unwrap_err();
        assert!(matches!(err, IoError::EmptyGraph { .. }));
    }

    #[test]
    fn dissimilarity_csv_variants() {
        let d = load_dissimilarity_csv(file_with("0,1\n1,0\n").path()).unwrap();
        assert_eq!(d.n(), 2);
        assert_eq!(d.get(0, 1), 1.0);

        // Asymmetry preserved.
        let d = load_dissimilarity_csv(file_with("0,1\n2,0\n").path()).unwrap();
        assert_eq!(d.get(0, 1), 1.0);
        assert_eq!(d.get(1, 0), 2.0);

        // Header row and label column are detected and skipped.
        let d = load_dissimilarity_csv(file_with("id,a,b\na, 0, 1.5\nb, 2, 0\n").path()).unwrap();
        assert_eq!(d.n(), 2);
        assert_eq!(d.get(0, 1), 1.5);
        assert_eq!(d.get(1, 0), 2.0);

        let err = load_dissimilarity_csv(file_with("0,-1\n1,0\n").path()).unwrap_err();
        assert!(matches!(err, IoError::BadMatrix { .. }));

        let err = load_dissimilarity_csv(file_with("0,1,2\n1,0,3\n").path()).unwrap_err();
        assert!(matches!(err, IoError::NonSquare { rows: 2, cols: 3, .. }));

        let err = load_dissimilarity_csv(file_with("0,x\n1,0\n").path()).unwrap_err();
        assert!(matches!(err, IoError::MalformedLine { line: 1, .. }));
    }

    #[test]
    fn labels_csv_first_appearance_groups() {
        let f = file_with("# node,community\n1,2\n2,2\n3,1\n");
        let labels = load_labels_csv(f.path()).unwrap();
        assert_eq!(labels.ids, ["1", "2", "3"]);
        assert_eq!(labels.groups, [0, 0, 1]);
        assert_eq!(labels.n_groups, 2);
        assert_eq!(labels.group_of("3"), Some(1));
        assert_eq!(labels.group_of("9"), None);
        assert_eq!(
            labels.aligned_to(&["3".into(), "1".into()]).unwrap(),
            vec![1, 0]
        );
        assert_eq!(labels.aligned_to(&["z".into()]).unwrap_err(), "z");

        let err = load_labels_csv(file_with("1,2\n1,1\n").path()).unwrap_err();
        assert!(matches!(err, IoError::MalformedLine { line: 2, .. }));
    }

    #[test]
    fn object_csv_parses_points() {
        let pts = load_object_csv(file_with("0.5,1\n2,3\n-1,0\n").path()).unwrap();
        assert_eq!((pts.n(), pts.p()), (3, 2));
        assert_eq!(pts.row(2), [-1.0, 0.0]);

        let err = load_object_csv(file_with("0.5,oops\n").path()).unwrap_err();
        assert!(matches!(err, IoError::MalformedLine { line: 1, .. }));
    }

    #[test]
    fn matrix_csv_round_trips_bit_identically() {
        let d = DissimilarityMatrix::from_flat(
            2,
            vec![0.0, 1.0 / 3.0, std::f64::consts::PI, 0.0],
        )
        .unwrap();
        let csv = matrix_to_csv(&d, Some(&["a".into(), "b".into()]), &manifest());
        assert!(csv.starts_with("# manifest: "));
        assert!(csv.contains("# nodes: a,b"));
        let f = file_with(&csv);
        let back = load_dissimilarity_csv(f.path()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(back.get(i, j).to_bits(), d.get(i, j).to_bits());
            }
        }
    }

    #[test]
    fn result_doc_round_trips_bit_identically() {
        let structure = FocalStructure::full_power_set(2).unwrap();
        let masses = vec![
            0.05, 0.15, 1.0 / 3.0, 0.45 + (1.0 / 3.0 - 1.0 / 3.0), // row 0
            0.0, 0.9, 0.1, 0.0, // row 1
        ];
        // Repair row 0 to sum exactly to 1.
        let mut masses = masses;
        let s: f64 = masses[..4].iter().sum();
        masses[3] += 1.0 - s;
        let partition = CredalPartition::new(structure, 2, masses).unwrap();
        let protos = PrototypeSet::new(vec![0, 1], 2).unwrap();
        let report = FitReport {
            objective_trace: vec![3.0, 1.0 / 7.0],
            iterations: 2,
            converged_by: ConvergedBy::PrototypesStable,
        };
        let ids = vec!["n1".to_string(), "n2".to_string()];
        let doc = CredalResultDoc::from_partition(
            &partition,
            CredalResultDoc::prototype_ids(&protos, &ids),
            &report,
            &ids,
            "mecm",
            manifest(),
        )
        .unwrap()
        .with_sweep(2, vec![(2, 0.1 + 0.2)], vec![report.clone()]);

        let tmp = NamedTempFile::new().unwrap();
        write_credal_result(&doc, tmp.path()).unwrap();
        let back = read_credal_result(tmp.path()).unwrap();
        assert_eq!(back, doc);
        for (a, b) in back.objects[0].masses.iter().zip(&doc.objects[0].masses) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(back.q_trace.unwrap()[0].1.to_bits(), (0.1f64 + 0.2).to_bits());

        // Focal sets are 1-based sorted arrays, ∅ first.
        assert_eq!(doc.focal_sets, vec![vec![], vec![1], vec![2], vec![1, 2]]);
        // Hardening helpers invert the 1-based encoding.
        assert_eq!(doc.hard_partition().unwrap().labels(), &[1, 0]);
        assert_eq!(
            doc.hard_focals().unwrap(),
            vec![FocalSet::omega(2), FocalSet::singleton(0)]
        );
    }

    #[test]
    fn crisp_doc_hard_focals_are_singletons() {
        let structure = FocalStructure::full_power_set(3).unwrap();
        let partition = CredalPartition::crisp(structure, &[2, 0, 1]).unwrap();
        let protos = PrototypeSet::new(vec![0, 1, 2], 3).unwrap();
        let report = FitReport {
            objective_trace: vec![0.0],
            iterations: 1,
            converged_by: ConvergedBy::PrototypesStable,
        };
        let ids: Vec<String> = (1..=3).map(|i| i.to_string()).collect();
        let doc = CredalResultDoc::from_partition(
            &partition,
            CredalResultDoc::prototype_ids(&protos, &ids),
            &report,
            &ids,
            "mcm",
            manifest(),
        )
        .unwrap();
        for (obj, want) in doc.objects.iter().zip([3usize, 1, 2]) {
            assert_eq!(obj.hard_label, want);
            assert_eq!(obj.hard_focal, vec![want]);
        }
    }

    #[test]
    fn fuzzy_memberships_ride_along() {
        let structure = FocalStructure::full_power_set(2).unwrap();
        let partition = CredalPartition::crisp(structure, &[0, 1]).unwrap();
        let protos = PrototypeSet::new(vec![0, 1], 2).unwrap();
        let report = FitReport {
            objective_trace: vec![0.0],
            iterations: 1,
            converged_by: ConvergedBy::MaxIter,
        };
        let ids = vec!["a".to_string(), "b".to_string()];
        let u = FuzzyPartition::new(2, 2, vec![0.8, 0.2, 0.3, 0.7]).unwrap();
        let doc = CredalResultDoc::from_partition(
            &partition,
            CredalResultDoc::prototype_ids(&protos, &ids),
            &report,
            &ids,
            "mfcm",
            manifest(),
        )
        .unwrap()
        .with_memberships(&u);
        assert_eq!(doc.objects[0].memberships.as_deref(), Some(&[0.8, 0.2][..]));
        let tmp = NamedTempFile::new().unwrap();
        write_credal_result(&doc, tmp.path()).unwrap();
        assert_eq!(read_credal_result(tmp.path()).unwrap(), doc);
    }

    #[test]
    fn text_writers_embed_manifest() {
        let m = manifest();
        let ids = vec!["a".to_string(), "b".to_string()];
        let scores = scores_to_csv(&ids, &[0.5, 0.25], &m);
        assert!(scores.starts_with("# manifest: "));
        assert!(scores.contains("a,0.5\n"));

        let labels = labels_to_csv(&ids, &[0, 1], &m);
        assert!(labels.contains("a,1\n") && labels.contains("b,2\n"));

        let g = WeightedGraph::from_edges(ids.clone(), &[(0, 1, 2.5)]).unwrap();
        let edges = edges_to_text(&g, &m);
        assert!(edges.contains("a b 2.5\n"));
        let f = file_with(&edges);
        let back = load_edge_list(f.path()).unwrap();
        assert_eq!(back.weight(0, 1), 2.5);

        let pts = ObjectData::from_rows(&[vec![0.5, 1.0], vec![2.0, 3.0]]).unwrap();
        let csv = points_to_csv(&pts, &m);
        let f = file_with(&csv);
        let back = load_object_csv(f.path()).unwrap();
        assert_eq!(back.row(0), [0.5, 1.0]);

        // Manifest comment reparses to the manifest itself.
        let comment = m.to_comment();
        let json = comment.strip_prefix("# manifest: ").unwrap();
        let back: RunManifest = serde_json::from_str(json).unwrap();
        assert_eq!(back, m);
    }
}
