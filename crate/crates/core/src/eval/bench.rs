//! Multi-variant benchmark: walk mode x model matrix, one evaluation column
//! per variant.

use std::io::Cursor;
use std::path::PathBuf;

use rayon::prelude::*;

use super::metrics;
use super::{EvalError, GoldBundle, SyntheticGold};
use crate::embed::{self, ModelKind, TrainConfig};
use crate::store::EmbeddingStore;
use crate::walk::{self, WalkConfig, WalkKind};
use crate::KnowledgeGraph;

/// One benchmark column: a walk extraction mode paired with a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Variant {
    pub mode: WalkKind,
    pub model: ModelKind,
}

impl Variant {
    pub fn name(&self) -> String {
        format!("{}-{}", self.mode.as_str(), self.model.as_str())
    }

    /// All 12 combinations, grouped by walk mode.
    pub fn full_matrix() -> Vec<Variant> {
        let mut v = Vec::with_capacity(12);
        for mode in [WalkKind::Classic, WalkKind::E, WalkKind::P] {
            for model in ModelKind::all() {
                v.push(Variant { mode, model });
            }
        }
        v
    }
}

/// Evaluation knobs shared by every variant.
#[derive(Debug, Clone)]
pub struct EvalParams {
    /// Neighbors for the LOO classifier and regressor.
    pub knn_k: usize,
    pub kmeans_restarts: usize,
    /// Seed for k-means and other evaluation-side randomness.
    pub eval_seed: u64,
}

impl Default for EvalParams {
    fn default() -> Self {
        EvalParams {
            knn_k: 3,
            kmeans_restarts: 10,
            eval_seed: 7,
        }
    }
}

/// Benchmark configuration. The walk mode and model fields of the embedded
/// configs are overridden per variant.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub walk: WalkConfig,
    pub train: TrainConfig,
    pub eval: EvalParams,
    /// When set, corpora and embedding files are persisted here.
    pub work_dir: Option<PathBuf>,
    /// Run walk-mode groups concurrently. Results are identical either way
    /// as long as training itself is deterministic (one train thread).
    pub parallel: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            walk: WalkConfig::default(),
            train: TrainConfig::default(),
            eval: EvalParams::default(),
            work_dir: None,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Task {
    Classification,
    Clustering,
    Regression,
    Analogies,
    Relatedness,
    DocumentSimilarity,
}

impl Task {
    fn row_header(self) -> (&'static str, &'static str, &'static str, bool) {
        // (task, dataset, metric, higher_is_better)
        match self {
            Task::Classification => ("Classification", "classes", "ACC", true),
            Task::Clustering => ("Clustering", "classes", "ACC", true),
            Task::Regression => ("Regression", "targets", "RMSE", false),
            Task::Analogies => ("Semantic Analogies", "capital-country", "ACC", true),
            Task::Relatedness => ("Entity Relatedness", "rankings", "Kendall Tau", true),
            Task::DocumentSimilarity => ("Document Similarity", "documents", "Harmonic Mean", true),
        }
    }
}

/// One row of the benchmark table: a task evaluated for every variant.
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub task: String,
    pub dataset: String,
    pub metric: String,
    pub higher_is_better: bool,
    /// One cell per variant; `None` when that variant failed the task.
    pub values: Vec<Option<f64>>,
}

impl ReportRow {
    /// Marks the best cell(s): maximum (or minimum for lower-is-better
    /// metrics) over the present values; exact ties are all marked.
    pub fn best_mask(&self) -> Vec<bool> {
        let best = self
            .values
            .iter()
            .flatten()
            .copied()
            .reduce(|a, b| {
                if self.higher_is_better {
                    a.max(b)
                } else {
                    a.min(b)
                }
            });
        self.values
            .iter()
            .map(|v| matches!((v, best), (Some(x), Some(b)) if *x == b))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct BenchmarkReport {
    pub variants: Vec<String>,
    pub rows: Vec<ReportRow>,
    /// `(variant, message)` for every recorded failure.
    pub errors: Vec<(String, String)>,
    /// Informational notes (exclusions, skipped rankings, ...).
    pub notes: Vec<String>,
}

impl BenchmarkReport {
    pub fn row(&self, task: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.task == task)
    }

    /// Aligned text table with the best cell per row marked by asterisks.
    pub fn render_text(&self, header_lines: &[String]) -> String {
        let mut out = String::new();
        for line in header_lines {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        let mut headers = vec![
            "Task".to_string(),
            "Dataset".to_string(),
            "Metric".to_string(),
        ];
        headers.extend(self.variants.iter().cloned());
        let mut table: Vec<Vec<String>> = vec![headers];
        for row in &self.rows {
            let best = row.best_mask();
            let mut cells = vec![row.task.clone(), row.dataset.clone(), row.metric.clone()];
            for (i, v) in row.values.iter().enumerate() {
                cells.push(match v {
                    Some(x) if best[i] => format!("*{x:.3}*"),
                    Some(x) => format!("{x:.3}"),
                    None => "ERR".to_string(),
                });
            }
            table.push(cells);
        }
        let cols = table[0].len();
        let widths: Vec<usize> = (0..cols)
            .map(|c| table.iter().map(|r| r[c].len()).max().unwrap_or(0))
            .collect();
        for row in &table {
            let line: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(c, cell)| format!("{cell:<width$}", width = widths[c]))
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        if !self.errors.is_empty() {
            out.push_str("\nerrors:\n");
            for (variant, message) in &self.errors {
                out.push_str(&format!("  {variant}: {message}\n"));
            }
        }
        if !self.notes.is_empty() {
            out.push_str("\nnotes:\n");
            for note in &self.notes {
                out.push_str(&format!("  {note}\n"));
            }
        }
        out
    }

    /// Tab-separated values: one row per (task, dataset), one column per
    /// variant.
    pub fn render_tsv(&self) -> String {
        let mut out = String::new();
        out.push_str("task\tdataset\tmetric");
        for v in &self.variants {
            out.push('\t');
            out.push_str(v);
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!("{}\t{}\t{}", row.task, row.dataset, row.metric));
            for v in &row.values {
                out.push('\t');
                match v {
                    Some(x) => out.push_str(&format!("{x:.6}")),
                    None => out.push_str("NA"),
                }
            }
            out.push('\n');
        }
        out
    }
}

impl SyntheticGold {
    /// The gold bundle consumed by [`run_benchmark`].
    pub fn bundle(&self) -> GoldBundle {
        GoldBundle {
            labels: Some(self.class_labels.clone()),
            targets: Some(self.regression_targets.clone()),
            quads: Some(self.quads.clone()),
            rankings: Some(self.rankings.clone()),
            documents: Some(self.documents.clone()),
        }
    }
}

type TaskResult = (Task, Result<f64, String>);

/// Runs every variant end to end (walk corpus, training, task battery) and
/// assembles the per-task, per-variant matrix. A failing stage marks that
/// variant's cells and is recorded; remaining variants continue.
pub fn run_benchmark(
    graph: &KnowledgeGraph,
    gold: &GoldBundle,
    variants: &[Variant],
    cfg: &BenchConfig,
) -> Result<BenchmarkReport, EvalError> {
    if let Some(dir) = &cfg.work_dir {
        std::fs::create_dir_all(dir)?;
    }
    let tasks = active_tasks(gold);
    if tasks.is_empty() {
        return Err(EvalError::InvalidGold(
            "no gold data given, nothing to evaluate".into(),
        ));
    }

    // Group variants by walk mode so each corpus is extracted once.
    let mut groups: Vec<(WalkKind, Vec<(usize, Variant)>)> = Vec::new();
    for (idx, variant) in variants.iter().enumerate() {
        match groups.iter_mut().find(|(mode, _)| *mode == variant.mode) {
            Some((_, members)) => members.push((idx, *variant)),
            None => groups.push((variant.mode, vec![(idx, *variant)])),
        }
    }

    let run_group = |(mode, members): &(WalkKind, Vec<(usize, Variant)>)| {
        run_mode_group(graph, gold, cfg, &tasks, *mode, members)
    };
    let group_results: Vec<GroupOutcome> = if cfg.parallel {
        groups.par_iter().map(run_group).collect()
    } else {
        groups.iter().map(run_group).collect()
    };

    let mut cells: Vec<Vec<Option<f64>>> = vec![vec![None; variants.len()]; tasks.len()];
    let mut errors = Vec::new();
    let mut notes = Vec::new();
    for outcome in group_results {
        errors.extend(outcome.errors);
        notes.extend(outcome.notes);
        for (variant_idx, results) in outcome.cells {
            for (task, value) in results {
                let row = tasks.iter().position(|t| *t == task).unwrap();
                match value {
                    Ok(x) => cells[row][variant_idx] = Some(x),
                    Err(message) => errors.push((variants[variant_idx].name(), message)),
                }
            }
        }
    }

    let rows = tasks
        .iter()
        .zip(cells)
        .map(|(task, values)| {
            let (task, dataset, metric, higher) = task.row_header();
            ReportRow {
                task: task.to_string(),
                dataset: dataset.to_string(),
                metric: metric.to_string(),
                higher_is_better: higher,
                values,
            }
        })
        .collect();
    Ok(BenchmarkReport {
        variants: variants.iter().map(|v| v.name()).collect(),
        rows,
        errors,
        notes,
    })
}

/// Evaluates one embedding store against the gold bundle, as a one-column
/// report (the `eval` subcommand path).
pub fn evaluate_single(
    store: &EmbeddingStore,
    gold: &GoldBundle,
    params: &EvalParams,
) -> Result<BenchmarkReport, EvalError> {
    let tasks = active_tasks(gold);
    if tasks.is_empty() {
        return Err(EvalError::InvalidGold(
            "no gold data given, nothing to evaluate".into(),
        ));
    }
    let results = evaluate_store(store, gold, params, &tasks);
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for (task, value) in results {
        let (task, dataset, metric, higher) = task.row_header();
        let mut row = ReportRow {
            task: task.to_string(),
            dataset: dataset.to_string(),
            metric: metric.to_string(),
            higher_is_better: higher,
            values: vec![None],
        };
        match value {
            Ok(x) => row.values[0] = Some(x),
            Err(message) => errors.push(("embeddings".to_string(), format!("{task}: {message}"))),
        }
        rows.push(row);
    }
    Ok(BenchmarkReport {
        variants: vec!["embeddings".to_string()],
        rows,
        errors,
        notes: Vec::new(),
    })
}

fn active_tasks(gold: &GoldBundle) -> Vec<Task> {
    let mut tasks = Vec::new();
    if gold.labels.is_some() {
        tasks.push(Task::Classification);
        tasks.push(Task::Clustering);
    }
    if gold.targets.is_some() {
        tasks.push(Task::Regression);
    }
    if gold.quads.is_some() {
        tasks.push(Task::Analogies);
    }
    if gold.rankings.is_some() {
        tasks.push(Task::Relatedness);
    }
    if gold.documents.is_some() {
        tasks.push(Task::DocumentSimilarity);
    }
    tasks
}

struct GroupOutcome {
    cells: Vec<(usize, Vec<TaskResult>)>,
    errors: Vec<(String, String)>,
    notes: Vec<String>,
}

fn run_mode_group(
    graph: &KnowledgeGraph,
    gold: &GoldBundle,
    cfg: &BenchConfig,
    tasks: &[Task],
    mode: WalkKind,
    members: &[(usize, Variant)],
) -> GroupOutcome {
    let mut outcome = GroupOutcome {
        cells: Vec::new(),
        errors: Vec::new(),
        notes: Vec::new(),
    };
    let walk_cfg = WalkConfig { mode, ..cfg.walk.clone() };
    let mut corpus: Vec<u8> = Vec::new();
    let stats = match walk::extract_corpus(graph, &walk_cfg, &mut corpus) {
        Ok(stats) => stats,
        Err(e) => {
            for (_, variant) in members {
                outcome
                    .errors
                    .push((variant.name(), format!("walk extraction failed: {e}")));
            }
            return outcome;
        }
    };
    outcome.notes.push(format!(
        "{} corpus: {} walks from {} nodes ({} duplicates dropped)",
        mode.as_str(),
        stats.walks_emitted,
        stats.nodes_processed,
        stats.duplicates_dropped
    ));
    if let Some(dir) = &cfg.work_dir {
        let path = dir.join(format!("corpus-{}.txt", mode.as_str()));
        if let Err(e) = std::fs::write(&path, &corpus) {
            outcome
                .notes
                .push(format!("failed to persist {}: {e}", path.display()));
        }
    }

    for (variant_idx, variant) in members {
        let train_cfg = TrainConfig { model: variant.model, ..cfg.train.clone() };
        let store = match embed::train(Cursor::new(&corpus), &train_cfg) {
            Ok((store, _)) => store,
            Err(e) => {
                outcome
                    .errors
                    .push((variant.name(), format!("training failed: {e}")));
                continue;
            }
        };
        if let Some(dir) = &cfg.work_dir {
            let path = dir.join(format!("vectors-{}.txt", variant.name()));
            if let Err(e) = store.save(&path) {
                outcome
                    .notes
                    .push(format!("failed to persist {}: {e}", path.display()));
            }
        }
        let results = evaluate_store(&store, gold, &cfg.eval, tasks);
        outcome.cells.push((*variant_idx, results));
    }
    outcome
}

fn evaluate_store(
    store: &EmbeddingStore,
    gold: &GoldBundle,
    params: &EvalParams,
    tasks: &[Task],
) -> Vec<TaskResult> {
    tasks
        .iter()
        .map(|task| {
            let value: Result<f64, String> = match task {
                Task::Classification => {
                    let gold = gold.labels.as_ref().unwrap();
                    metrics::knn_classify_loo(store, gold, params.knn_k)
                        .map(|o| o.accuracy)
                        .map_err(|e| e.to_string())
                }
                Task::Clustering => {
                    let gold = gold.labels.as_ref().unwrap();
                    let k = gold.distinct_labels().len();
                    super::kmeans::kmeans_cluster_accuracy(
                        store,
                        gold,
                        k,
                        params.kmeans_restarts,
                        params.eval_seed,
                    )
                    .map(|o| o.accuracy)
                    .map_err(|e| e.to_string())
                }
                Task::Regression => {
                    let gold = gold.targets.as_ref().unwrap();
                    metrics::knn_regress_loo(store, gold, params.knn_k)
                        .map(|o| o.rmse)
                        .map_err(|e| e.to_string())
                }
                Task::Analogies => {
                    let quads = gold.quads.as_ref().unwrap();
                    metrics::analogy_accuracy(store, quads)
                        .map(|o| o.accuracy)
                        .map_err(|e| e.to_string())
                }
                Task::Relatedness => {
                    let rankings = gold.rankings.as_ref().unwrap();
                    let mut taus = Vec::new();
                    for ranking in rankings {
                        if let Ok((tau, _)) = metrics::ranking_tau(store, ranking) {
                            taus.push(tau);
                        }
                    }
                    if taus.is_empty() {
                        Err("no gold ranking could be evaluated".to_string())
                    } else {
                        Ok(taus.iter().sum::<f64>() / taus.len() as f64)
                    }
                }
                Task::DocumentSimilarity => {
                    let pairs = gold.documents.as_ref().unwrap();
                    metrics::document_similarity(store, pairs)
                        .map(|o| o.harmonic_mean)
                        .map_err(|e| e.to_string())
                }
            };
            (*task, value)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_matrix_has_twelve_unique_variants() {
        let m = Variant::full_matrix();
        assert_eq!(m.len(), 12);
        let names: std::collections::HashSet<String> = m.iter().map(|v| v.name()).collect();
        assert_eq!(names.len(), 12);
        assert!(names.contains("classic-sg"));
        assert!(names.contains("p-cbow_oa"));
    }

    #[test]
    fn best_mask_marks_max_and_ties() {
        let row = ReportRow {
            task: "t".into(),
            dataset: "d".into(),
            metric: "ACC".into(),
            higher_is_better: true,
            values: vec![Some(0.5), Some(0.9), Some(0.9), None],
        };
        assert_eq!(row.best_mask(), vec![false, true, true, false]);
    }

    #[test]
    fn best_mask_minimizes_for_rmse() {
        let row = ReportRow {
            task: "t".into(),
            dataset: "d".into(),
            metric: "RMSE".into(),
            higher_is_better: false,
            values: vec![Some(3.0), Some(1.0), None, Some(2.0)],
        };
        assert_eq!(row.best_mask(), vec![false, true, false, false]);
    }

    #[test]
    fn exactly_one_best_marker_per_row_in_rendered_text() {
        let report = BenchmarkReport {
            variants: vec!["a".into(), "b".into()],
            rows: vec![ReportRow {
                task: "Classification".into(),
                dataset: "classes".into(),
                metric: "ACC".into(),
                higher_is_better: true,
                values: vec![Some(0.25), Some(0.75)],
            }],
            errors: vec![],
            notes: vec![],
        };
        let text = report.render_text(&["header".into()]);
        assert!(text.contains("*0.750*"));
        assert!(text.contains("0.250"));
        assert_eq!(text.matches('*').count(), 2);
    }

    #[test]
    fn tsv_shape_matches_variants() {
        let report = BenchmarkReport {
            variants: vec!["a".into(), "b".into()],
            rows: vec![ReportRow {
                task: "Regression".into(),
                dataset: "targets".into(),
                metric: "RMSE".into(),
                higher_is_better: false,
                values: vec![Some(1.5), None],
            }],
            errors: vec![],
            notes: vec![],
        };
        let tsv = report.render_tsv();
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].split('\t').count(), 5);
        assert!(lines[1].ends_with("1.500000\tNA"));
    }
}
