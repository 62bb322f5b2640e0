//! Subcommand implementations.

use std::io::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use walkvec_core::eval::{
    evaluate_single, generate_synthetic_kg, read_document_pairs, read_labels, read_quads,
    read_rankings, read_targets, run_benchmark, write_document_pairs, write_labels, write_quads,
    write_rankings, write_targets, BenchConfig, GoldBundle, SyntheticGraphSpec, Variant,
};
use walkvec_core::graph::{parse_ntriples_path, KnowledgeGraph, ParseOptions};
use walkvec_core::store::EmbeddingStore;
use walkvec_core::{embed, walk};

use crate::config::PipelineConfig;
use crate::provenance::{digest_file, write_sidecar, PartialFile, TOOL_VERSION};
use crate::GoldFlags;

fn install_thread_pool(cfg: &PipelineConfig) {
    // Sizes the global rayon pool; later calls are no-ops, which is fine.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.effective_threads())
        .build_global();
}

fn load_graph(cfg: &PipelineConfig, path: &Path) -> Result<KnowledgeGraph> {
    let options = ParseOptions {
        skip_literals: cfg.skip_literals,
        ..Default::default()
    };
    let graph = parse_ntriples_path(path, &options)
        .with_context(|| format!("cannot parse graph {}", path.display()))?;
    eprintln!(
        "loaded {}: {} entities, {} predicates, {} triples",
        path.display(),
        graph.entity_count(),
        graph.predicate_count(),
        graph.triple_count()
    );
    Ok(graph)
}

pub fn walk(cfg: &PipelineConfig, graph_path: &Path, out: &Path) -> Result<()> {
    install_thread_pool(cfg);
    let graph = load_graph(cfg, graph_path)?;
    let walk_cfg = cfg.walk_config();
    let partial = PartialFile::new(out);
    // Compression follows the final name, not the .partial working name.
    let mut sink = walkvec_core::util::create_writer_gz(
        partial.working_path(),
        walkvec_core::util::is_gz_path(out),
    )?;
    let stats = walk::extract_corpus(&graph, &walk_cfg, &mut sink).context("walk extraction failed")?;
    drop(sink);
    partial.commit()?;
    write_sidecar(out, "walk", &cfg.render(), cfg.seed, &[("graph", graph_path)])?;
    println!(
        "wrote {}: {} walks from {} nodes ({} duplicates dropped)",
        out.display(),
        stats.walks_emitted,
        stats.nodes_processed,
        stats.duplicates_dropped
    );
    Ok(())
}

pub fn train(cfg: &PipelineConfig, corpus: &Path, out: &Path) -> Result<()> {
    install_thread_pool(cfg);
    if !corpus.exists() {
        bail!("corpus file {} does not exist", corpus.display());
    }
    let train_cfg = cfg.train_config();
    if train_cfg.threads > 1 {
        eprintln!(
            "note: training with {} workers applies racy lock-free updates; \
             results are NOT reproducible across runs (use --deterministic \
             for byte-identical output)",
            train_cfg.threads
        );
    }
    let (store, report) = embed::train_from_path(corpus, &train_cfg)
        .with_context(|| format!("training on {} failed", corpus.display()))?;
    let partial = PartialFile::new(out);
    let mut sink = walkvec_core::util::create_writer_gz(
        partial.working_path(),
        walkvec_core::util::is_gz_path(out),
    )?;
    store.save_to(&mut sink).context("cannot write embeddings")?;
    sink.flush().context("cannot write embeddings")?;
    drop(sink);
    partial.commit()?;
    write_sidecar(out, "train", &cfg.render(), cfg.seed, &[("corpus", corpus)])?;
    let losses: Vec<String> = report
        .epoch_mean_loss
        .iter()
        .map(|l| format!("{l:.4}"))
        .collect();
    println!(
        "wrote {}: {} vectors x {} dims ({} sentences, mean epoch loss {})",
        out.display(),
        report.vocab_size,
        cfg.dim,
        report.sentences,
        losses.join(" -> ")
    );
    Ok(())
}

pub fn nearest(vectors: &Path, token: &str, k: usize) -> Result<()> {
    let store = EmbeddingStore::load(vectors)
        .with_context(|| format!("cannot load embeddings {}", vectors.display()))?;
    let neighbors = store.nearest(token, k)?;
    println!("nearest neighbors of {token} (k={k})");
    println!("{:>4}  {:<60}  cosine", "#", "token");
    for (rank, (neighbor, score)) in neighbors.iter().enumerate() {
        println!("{:>4}  {:<60}  {score:.4}", rank + 1, neighbor);
    }
    Ok(())
}

pub fn analogy(vectors: &Path, a: &str, a_star: &str, b: &str, k: usize) -> Result<()> {
    let store = EmbeddingStore::load(vectors)
        .with_context(|| format!("cannot load embeddings {}", vectors.display()))?;
    let candidates = store.analogy(a, a_star, b, k)?;
    println!("{a} : {a_star} :: {b} : ?");
    println!("{:>4}  {:<60}  cosine", "#", "candidate");
    for (rank, (candidate, score)) in candidates.iter().enumerate() {
        println!("{:>4}  {:<60}  {score:.4}", rank + 1, candidate);
    }
    Ok(())
}

fn load_gold(flags: &GoldFlags) -> Result<GoldBundle> {
    let mut bundle = GoldBundle::default();
    if let Some(path) = &flags.labels {
        let reader = walkvec_core::util::open_reader(path)?;
        bundle.labels = Some(read_labels(reader).with_context(|| path.display().to_string())?);
    }
    if let Some(path) = &flags.targets {
        let reader = walkvec_core::util::open_reader(path)?;
        bundle.targets = Some(read_targets(reader).with_context(|| path.display().to_string())?);
    }
    if let Some(path) = &flags.quads {
        let reader = walkvec_core::util::open_reader(path)?;
        bundle.quads = Some(read_quads(reader).with_context(|| path.display().to_string())?);
    }
    if let Some(path) = &flags.rankings {
        let reader = walkvec_core::util::open_reader(path)?;
        bundle.rankings =
            Some(read_rankings(reader).with_context(|| path.display().to_string())?);
    }
    if let Some(path) = &flags.documents {
        let reader = walkvec_core::util::open_reader(path)?;
        bundle.documents =
            Some(read_document_pairs(reader).with_context(|| path.display().to_string())?);
    }
    Ok(bundle)
}

pub fn eval(
    cfg: &PipelineConfig,
    vectors: &Path,
    gold_flags: &GoldFlags,
    out: Option<&Path>,
) -> Result<()> {
    let store = EmbeddingStore::load(vectors)
        .with_context(|| format!("cannot load embeddings {}", vectors.display()))?;
    let gold = load_gold(gold_flags)?;
    let report = evaluate_single(&store, &gold, &cfg.eval_params())?;
    let header = vec![
        format!("walkvec {TOOL_VERSION} eval report"),
        format!("embeddings = {} ({} vectors x {} dims)", vectors.display(), store.len(), store.dim()),
        format!("seed = {}", cfg.seed),
    ];
    let text = report.render_text(&header);
    print!("{text}");
    if let Some(path) = out {
        let partial = PartialFile::new(path);
        std::fs::write(partial.working_path(), &text)?;
        partial.commit()?;
        write_sidecar(path, "eval", &cfg.render(), cfg.seed, &[("vectors", vectors)])?;
    }
    if !report.errors.is_empty() {
        bail!("{} task(s) failed, see report", report.errors.len());
    }
    Ok(())
}

pub fn benchmark(
    cfg: &PipelineConfig,
    graph_path: Option<&Path>,
    synthetic: bool,
    gold_flags: &GoldFlags,
    out_dir: &Path,
) -> Result<()> {
    install_thread_pool(cfg);
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))?;

    let (graph, gold, graph_note) = if synthetic {
        let spec = SyntheticGraphSpec {
            seed: cfg.seed,
            ..Default::default()
        };
        let (graph, synth_gold) = generate_synthetic_kg(&spec)?;
        // Export the graph and gold data so the other subcommands can be
        // pointed at them.
        let graph_file = out_dir.join("graph.nt");
        graph.write_ntriples_path(&graph_file)?;
        let gold_dir = out_dir.join("gold");
        std::fs::create_dir_all(&gold_dir)?;
        write_labels(
            &synth_gold.class_labels,
            std::fs::File::create(gold_dir.join("labels.tsv"))?,
        )?;
        write_targets(
            &synth_gold.regression_targets,
            std::fs::File::create(gold_dir.join("targets.tsv"))?,
        )?;
        write_quads(
            &synth_gold.quads,
            std::fs::File::create(gold_dir.join("quads.txt"))?,
        )?;
        write_rankings(
            &synth_gold.rankings,
            std::fs::File::create(gold_dir.join("rankings.txt"))?,
        )?;
        write_document_pairs(
            &synth_gold.documents,
            std::fs::File::create(gold_dir.join("documents.txt"))?,
        )?;
        let note = format!("graph = synthetic (seed {})", cfg.seed);
        (graph, synth_gold.bundle(), note)
    } else {
        let path = graph_path
            .context("benchmark needs --graph FILE or --synthetic")?;
        let graph = load_graph(cfg, path)?;
        let gold = load_gold(gold_flags)?;
        let note = format!(
            "graph = {} (fnv1a64 {:#018x})",
            path.display(),
            digest_file(path)?
        );
        (graph, gold, note)
    };

    let bench_cfg = BenchConfig {
        walk: cfg.walk_config(),
        train: cfg.train_config(),
        eval: cfg.eval_params(),
        work_dir: Some(out_dir.to_path_buf()),
        parallel: !cfg.deterministic,
    };
    let variants = Variant::full_matrix();
    let report = run_benchmark(&graph, &gold, &variants, &bench_cfg)?;

    let mut header = vec![
        format!("walkvec {TOOL_VERSION} benchmark report"),
        graph_note,
        format!("seed = {}", cfg.seed),
        "config:".to_string(),
    ];
    header.extend(cfg.render().lines().map(|l| format!("  {l}")));

    let text = report.render_text(&header);
    let report_txt = out_dir.join("report.txt");
    let partial = PartialFile::new(&report_txt);
    std::fs::write(partial.working_path(), &text)?;
    partial.commit()?;
    let report_tsv = out_dir.join("report.tsv");
    let partial = PartialFile::new(&report_tsv);
    std::fs::write(partial.working_path(), report.render_tsv())?;
    partial.commit()?;
    std::fs::write(out_dir.join("config.resolved"), cfg.render())?;

    print!("{text}");
    println!("report written to {}", report_txt.display());
    if !report.errors.is_empty() {
        bail!("{} variant stage(s) failed, see report", report.errors.len());
    }
    Ok(())
}
