//! `walkvec` — walk-based knowledge graph embeddings from the command line.
//!
//! Subcommands: `walk` (graph to corpus), `train` (corpus to vectors),
//! `nearest` / `analogy` (vector queries), `eval` (task battery against gold
//! files), `benchmark` (the full walk-mode x model matrix).

mod commands;
mod config;
mod provenance;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use config::PipelineConfig;

#[derive(Parser)]
#[command(
    name = "walkvec",
    version,
    about = "Walk-based knowledge graph embeddings: corpora, training, queries, evaluation"
)]
struct Cli {
    /// Key=value config file; command-line flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Global random seed; all stage seeds derive from it.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (default: WALKVEC_THREADS or all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Fully reproducible mode: single training worker, byte-identical
    /// outputs for identical inputs and seed.
    #[arg(long, global = true)]
    deterministic: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct WalkFlags {
    /// Walks generated per focus entity.
    #[arg(long)]
    walks_per_node: Option<usize>,
    /// Maximum hops against edge direction.
    #[arg(long)]
    backward_hops: Option<usize>,
    /// Maximum hops along edge direction.
    #[arg(long)]
    forward_hops: Option<usize>,
    /// Walk projection: classic, e, or p.
    #[arg(long)]
    mode: Option<String>,
    /// Drop duplicate walks per focus entity (true/false).
    #[arg(long)]
    dedup: Option<bool>,
    /// Keep literal-object triples as graph vertices (true/false; default
    /// skips them).
    #[arg(long)]
    skip_literals: Option<bool>,
}

#[derive(Args, Default)]
struct TrainFlags {
    /// Vector dimensionality.
    #[arg(long)]
    dim: Option<usize>,
    /// Maximum context offset.
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    /// Starting learning rate (default: 0.025 for sg, 0.05 for cbow).
    #[arg(long)]
    learning_rate: Option<f64>,
    /// Negative samples per positive.
    #[arg(long)]
    negatives: Option<usize>,
    /// Negative-sampling smoothing exponent.
    #[arg(long)]
    smoothing: Option<f64>,
    /// Drop tokens rarer than this.
    #[arg(long)]
    min_count: Option<u64>,
    /// Frequent-token subsampling threshold (off unless set).
    #[arg(long)]
    subsample: Option<f64>,
    /// Model: sg, cbow, sg_oa, or cbow_oa.
    #[arg(long)]
    model: Option<String>,
}

#[derive(Args, Default)]
struct EvalFlags {
    /// Neighbors for the LOO classifier/regressor.
    #[arg(long)]
    knn_k: Option<usize>,
    #[arg(long)]
    kmeans_restarts: Option<usize>,
}

#[derive(Args, Default)]
struct GoldFlags {
    /// Classification/clustering labels (token<TAB>label).
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Regression targets (token<TAB>number).
    #[arg(long)]
    targets: Option<PathBuf>,
    /// Analogy quads (4 tokens per line).
    #[arg(long)]
    quads: Option<PathBuf>,
    /// Relatedness rankings (anchor line, then ordered tokens; blank line
    /// between blocks).
    #[arg(long)]
    rankings: Option<PathBuf>,
    /// Document pairs (`tokA:w ... | tokB:w ... | gold`).
    #[arg(long)]
    documents: Option<PathBuf>,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)] // parsed once, immediately consumed
enum Command {
    /// Extract a random-walk corpus from an N-Triples graph.
    Walk {
        /// Input N-Triples file (.nt or .nt.gz).
        #[arg(long)]
        graph: PathBuf,
        /// Output corpus path (.txt or .txt.gz).
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        flags: WalkFlags,
    },
    /// Train token vectors from a walk corpus.
    Train {
        /// Input corpus (one walk per line).
        #[arg(long)]
        corpus: PathBuf,
        /// Output embedding file (word2vec text format).
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        flags: TrainFlags,
    },
    /// List the nearest neighbors of a token by cosine.
    Nearest {
        #[arg(long)]
        vectors: PathBuf,
        #[arg(long)]
        token: String,
        #[arg(short, long, default_value_t = 5)]
        k: usize,
    },
    /// Resolve `a : a-star :: b : ?` by vector offset.
    Analogy {
        #[arg(long)]
        vectors: PathBuf,
        #[arg(long)]
        a: String,
        #[arg(long)]
        a_star: String,
        #[arg(long)]
        b: String,
        #[arg(short, long, default_value_t = 5)]
        k: usize,
    },
    /// Evaluate an embedding file against gold task data.
    Eval {
        #[arg(long)]
        vectors: PathBuf,
        /// Write the text report here (also printed).
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        gold: GoldFlags,
        #[command(flatten)]
        eval: EvalFlags,
    },
    /// Run the full walk-mode x model benchmark matrix.
    Benchmark {
        /// Input N-Triples graph; mutually exclusive with --synthetic.
        #[arg(long, conflicts_with = "synthetic")]
        graph: Option<PathBuf>,
        /// Generate the built-in synthetic benchmark graph (and export it
        /// with its gold data into the output directory).
        #[arg(long)]
        synthetic: bool,
        /// Output directory for report, corpora, embeddings, and provenance.
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        gold: GoldFlags,
        #[command(flatten)]
        walk: WalkFlags,
        #[command(flatten)]
        train: TrainFlags,
        #[command(flatten)]
        eval: EvalFlags,
    },
}

fn resolve_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut cfg = PipelineConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.override_key("seed", &seed.to_string())?;
    }
    if let Some(threads) = cli.threads {
        cfg.override_key("threads", &threads.to_string())?;
    }
    if cli.deterministic {
        cfg.override_key("deterministic", "true")?;
    }
    Ok(cfg)
}

fn apply_walk_flags(cfg: &mut PipelineConfig, flags: &WalkFlags) -> Result<()> {
    if let Some(v) = flags.walks_per_node {
        cfg.override_key("walks_per_node", &v.to_string())?;
    }
    if let Some(v) = flags.backward_hops {
        cfg.override_key("backward_hops", &v.to_string())?;
    }
    if let Some(v) = flags.forward_hops {
        cfg.override_key("forward_hops", &v.to_string())?;
    }
    if let Some(v) = &flags.mode {
        cfg.override_key("walk_mode", v)?;
    }
    if let Some(v) = flags.dedup {
        cfg.override_key("dedup", &v.to_string())?;
    }
    if let Some(v) = flags.skip_literals {
        cfg.override_key("skip_literals", &v.to_string())?;
    }
    Ok(())
}

fn apply_train_flags(cfg: &mut PipelineConfig, flags: &TrainFlags) -> Result<()> {
    if let Some(v) = flags.dim {
        cfg.override_key("dim", &v.to_string())?;
    }
    if let Some(v) = flags.window {
        cfg.override_key("window", &v.to_string())?;
    }
    if let Some(v) = flags.epochs {
        cfg.override_key("epochs", &v.to_string())?;
    }
    if let Some(v) = flags.learning_rate {
        cfg.override_key("learning_rate", &v.to_string())?;
    }
    if let Some(v) = flags.negatives {
        cfg.override_key("negatives", &v.to_string())?;
    }
    if let Some(v) = flags.smoothing {
        cfg.override_key("smoothing", &v.to_string())?;
    }
    if let Some(v) = flags.min_count {
        cfg.override_key("min_count", &v.to_string())?;
    }
    if let Some(v) = flags.subsample {
        cfg.override_key("subsample", &v.to_string())?;
    }
    if let Some(v) = &flags.model {
        cfg.override_key("model", v)?;
    }
    Ok(())
}

fn apply_eval_flags(cfg: &mut PipelineConfig, flags: &EvalFlags) -> Result<()> {
    if let Some(v) = flags.knn_k {
        cfg.override_key("knn_k", &v.to_string())?;
    }
    if let Some(v) = flags.kmeans_restarts {
        cfg.override_key("kmeans_restarts", &v.to_string())?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = resolve_config(&cli)?;
    match &cli.command {
        Command::Walk { graph, out, flags } => {
            apply_walk_flags(&mut cfg, flags)?;
            commands::walk(&cfg, graph, out)
        }
        Command::Train { corpus, out, flags } => {
            apply_train_flags(&mut cfg, flags)?;
            commands::train(&cfg, corpus, out)
        }
        Command::Nearest { vectors, token, k } => commands::nearest(vectors, token, *k),
        Command::Analogy {
            vectors,
            a,
            a_star,
            b,
            k,
        } => commands::analogy(vectors, a, a_star, b, *k),
        Command::Eval {
            vectors,
            out,
            gold,
            eval,
        } => {
            apply_eval_flags(&mut cfg, eval)?;
            commands::eval(&cfg, vectors, gold, out.as_deref())
        }
        Command::Benchmark {
            graph,
            synthetic,
            out_dir,
            gold,
            walk,
            train,
            eval,
        } => {
            apply_walk_flags(&mut cfg, walk)?;
            apply_train_flags(&mut cfg, train)?;
            apply_eval_flags(&mut cfg, eval)?;
            commands::benchmark(&cfg, graph.as_deref(), *synthetic, gold, out_dir)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
