//! Evaluation suite: task battery, synthetic benchmark graph, and the
//! multi-variant benchmark runner.
//!
//! The task battery mirrors the usual downstream probes for entity
//! embeddings: classification and regression (leave-one-out kNN surrogates),
//! clustering (k-means with optimal cluster-to-label assignment), semantic
//! analogies, entity relatedness (Kendall tau against gold rankings), and
//! document similarity (harmonic mean of Pearson and Spearman against gold
//! scores). Every metric has a brute-force oracle in its tests.
//!
//! Entities missing from the store under evaluation are excluded and listed
//! in the task outcome rather than silently dropped or zero-filled, since
//! zero vectors would corrupt cosine rankings.

mod assignment;
mod bench;
mod gold;
mod kmeans;
mod metrics;
mod synth;

pub use assignment::optimal_assignment;
pub use bench::{
    evaluate_single, run_benchmark, BenchConfig, BenchmarkReport, EvalParams, ReportRow, Variant,
};
pub use gold::{
    read_document_pairs, read_labels, read_quads, read_rankings, read_targets,
    write_document_pairs, write_labels, write_quads, write_rankings, write_targets,
};
pub use kmeans::{kmeans_cluster_accuracy, ClusterOutcome};
pub use metrics::{
    analogy_accuracy, document_similarity, kendall_tau, knn_classify_loo, knn_regress_loo,
    pair_separation, ranking_tau, AnalogyOutcome, ClassifyOutcome, DocSimOutcome, RegressOutcome,
    SeparationStats,
};
pub use synth::{generate_synthetic_kg, SyntheticGold, SyntheticGraphSpec};

/// Gold data for [`run_benchmark`]; absent members skip their tasks.
#[derive(Debug, Clone, Default)]
pub struct GoldBundle {
    pub labels: Option<GoldLabels>,
    pub targets: Option<GoldTargets>,
    pub quads: Option<Vec<AnalogyQuad>>,
    pub rankings: Option<Vec<GoldRanking>>,
    pub documents: Option<Vec<DocumentPair>>,
}

use std::collections::BTreeMap;
use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("invalid gold data: {0}")]
    InvalidGold(String),
    #[error("invalid synthetic graph spec: {0}")]
    InvalidSpec(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("evaluation undefined: {0}")]
    Undefined(String),
    #[error("line {line}: {message}")]
    GoldFormat { line: usize, message: String },
    #[error(transparent)]
    Store(#[from] crate::store::StoreError),
    #[error(transparent)]
    Corpus(#[from] crate::walk::CorpusError),
    #[error(transparent)]
    Train(#[from] crate::embed::TrainError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Entity token to class label, for classification and clustering.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GoldLabels {
    pub labels: BTreeMap<String, String>,
}

impl GoldLabels {
    pub fn distinct_labels(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.labels.values().map(|s| s.as_str()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Entity token to numeric target, for regression.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GoldTargets {
    pub targets: BTreeMap<String, f64>,
}

/// One relatedness judgment: comparison entities ordered from most to least
/// related to the anchor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldRanking {
    pub anchor: String,
    pub ranked: Vec<String>,
}

impl GoldRanking {
    pub fn new(anchor: String, ranked: Vec<String>) -> Result<Self, EvalError> {
        if ranked.len() < 2 {
            return Err(EvalError::InvalidGold(format!(
                "ranking for {anchor:?} needs at least 2 comparison entities"
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for t in &ranked {
            if !seen.insert(t) {
                return Err(EvalError::InvalidGold(format!(
                    "ranking for {anchor:?} lists {t:?} twice"
                )));
            }
        }
        Ok(GoldRanking { anchor, ranked })
    }
}

/// One analogy question `a : a_star :: b : b_star`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalogyQuad {
    pub a: String,
    pub a_star: String,
    pub b: String,
    pub b_star: String,
}

impl AnalogyQuad {
    pub fn new(a: String, a_star: String, b: String, b_star: String) -> Result<Self, EvalError> {
        let quad = AnalogyQuad { a, a_star, b, b_star };
        let all = [&quad.a, &quad.a_star, &quad.b, &quad.b_star];
        for i in 0..4 {
            for j in (i + 1)..4 {
                if all[i] == all[j] {
                    return Err(EvalError::InvalidGold(format!(
                        "analogy quad tokens must be distinct, {:?} repeats",
                        all[i]
                    )));
                }
            }
        }
        Ok(quad)
    }
}

/// Two weighted entity sets with a gold similarity score.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentPair {
    pub doc_a: Vec<(String, f64)>,
    pub doc_b: Vec<(String, f64)>,
    pub gold: f64,
}

impl DocumentPair {
    pub fn new(
        doc_a: Vec<(String, f64)>,
        doc_b: Vec<(String, f64)>,
        gold: f64,
    ) -> Result<Self, EvalError> {
        for (side, doc) in [("A", &doc_a), ("B", &doc_b)] {
            if doc.is_empty() {
                return Err(EvalError::InvalidGold(format!(
                    "document {side} has no entities"
                )));
            }
            if doc.iter().any(|(_, w)| *w < 0.0 || !w.is_finite()) {
                return Err(EvalError::InvalidGold(format!(
                    "document {side} has a negative or non-finite weight"
                )));
            }
        }
        if !gold.is_finite() {
            return Err(EvalError::InvalidGold("gold score must be finite".into()));
        }
        Ok(DocumentPair { doc_a, doc_b, gold })
    }
}
