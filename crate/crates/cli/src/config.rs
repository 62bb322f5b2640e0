//! Pipeline configuration: defaults, key=value config files, and flag
//! precedence (flags override file values override defaults).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use walkvec_core::embed::{ModelKind, TrainConfig};
use walkvec_core::eval::EvalParams;
use walkvec_core::walk::{WalkConfig, WalkKind};

/// Fully resolved pipeline configuration.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    // walk extraction
    pub walks_per_node: usize,
    pub backward_hops: usize,
    pub forward_hops: usize,
    pub walk_mode: WalkKind,
    pub dedup: bool,
    // graph parsing
    pub skip_literals: bool,
    // training
    pub dim: usize,
    pub window: usize,
    pub epochs: usize,
    pub learning_rate: Option<f64>,
    pub negatives: usize,
    pub smoothing: f64,
    pub min_count: u64,
    pub subsample: Option<f64>,
    pub model: ModelKind,
    // evaluation
    pub knn_k: usize,
    pub kmeans_restarts: usize,
    // global
    pub seed: u64,
    pub threads: usize,
    pub deterministic: bool,
    /// Keys set from the config file, for conflict notices.
    file_keys: Vec<String>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let walk = WalkConfig::default();
        let train = TrainConfig::default();
        let eval = EvalParams::default();
        PipelineConfig {
            walks_per_node: walk.walks_per_node,
            backward_hops: walk.backward_hops,
            forward_hops: walk.forward_hops,
            walk_mode: walk.mode,
            dedup: walk.dedup,
            skip_literals: true,
            dim: train.dim,
            window: train.window,
            epochs: train.epochs,
            learning_rate: None,
            negatives: train.negatives,
            smoothing: train.smoothing,
            min_count: train.min_count,
            subsample: None,
            model: train.model,
            knn_k: eval.knn_k,
            kmeans_restarts: eval.kmeans_restarts,
            seed: 1,
            threads: default_threads(),
            deterministic: false,
            file_keys: Vec::new(),
        }
    }
}

fn default_threads() -> usize {
    std::env::var("WALKVEC_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

const KEYS: &[&str] = &[
    "walks_per_node",
    "backward_hops",
    "forward_hops",
    "walk_mode",
    "dedup",
    "skip_literals",
    "dim",
    "window",
    "epochs",
    "learning_rate",
    "negatives",
    "smoothing",
    "min_count",
    "subsample",
    "model",
    "knn_k",
    "kmeans_restarts",
    "seed",
    "threads",
    "deterministic",
];

impl PipelineConfig {
    /// Loads defaults, then file values (when given). Flag overrides are
    /// applied afterwards by the command layer.
    pub fn load(file: Option<&Path>) -> Result<Self> {
        let mut cfg = PipelineConfig::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read config file {}", path.display()))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').with_context(|| {
                    format!(
                        "{}:{}: expected key=value, found {line:?}",
                        path.display(),
                        lineno + 1
                    )
                })?;
                cfg.set(key.trim(), value.trim()).with_context(|| {
                    format!("{}:{}", path.display(), lineno + 1)
                })?;
                cfg.file_keys.push(key.trim().to_string());
            }
        }
        Ok(cfg)
    }

    /// Applies one key=value assignment, rejecting unknown keys with the
    /// nearest valid name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .ok()
                .with_context(|| format!("invalid value {value:?} for {key}"))
        }
        match key {
            "walks_per_node" => self.walks_per_node = parse(key, value)?,
            "backward_hops" => self.backward_hops = parse(key, value)?,
            "forward_hops" => self.forward_hops = parse(key, value)?,
            "walk_mode" => {
                self.walk_mode = value
                    .parse()
                    .map_err(|e: String| anyhow::anyhow!(e))?
            }
            "dedup" => self.dedup = parse(key, value)?,
            "skip_literals" => self.skip_literals = parse(key, value)?,
            "dim" => self.dim = parse(key, value)?,
            "window" => self.window = parse(key, value)?,
            "epochs" => self.epochs = parse(key, value)?,
            "learning_rate" => self.learning_rate = Some(parse(key, value)?),
            "negatives" => self.negatives = parse(key, value)?,
            "smoothing" => self.smoothing = parse(key, value)?,
            "min_count" => self.min_count = parse(key, value)?,
            "subsample" => self.subsample = Some(parse(key, value)?),
            "model" => {
                self.model = value
                    .parse()
                    .map_err(|e: String| anyhow::anyhow!(e))?
            }
            "knn_k" => self.knn_k = parse(key, value)?,
            "kmeans_restarts" => self.kmeans_restarts = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "threads" => self.threads = parse(key, value)?,
            "deterministic" => self.deterministic = parse(key, value)?,
            unknown => {
                let nearest = KEYS
                    .iter()
                    .min_by_key(|k| levenshtein(unknown, k))
                    .unwrap();
                bail!("unknown config key {unknown:?}, nearest valid key is {nearest:?}");
            }
        }
        Ok(())
    }

    /// Records a flag override; logs a notice when it conflicts with a file
    /// value.
    pub fn override_key(&mut self, key: &str, value: &str) -> Result<()> {
        if self.file_keys.iter().any(|k| k == key) {
            eprintln!("notice: flag --{} overrides config file value", key.replace('_', "-"));
        }
        self.set(key, value)
    }

    /// Effective worker count: the determinism flag forces one worker.
    pub fn effective_threads(&self) -> usize {
        if self.deterministic {
            1
        } else {
            self.threads.max(1)
        }
    }

    pub fn walk_config(&self) -> WalkConfig {
        WalkConfig {
            walks_per_node: self.walks_per_node,
            backward_hops: self.backward_hops,
            forward_hops: self.forward_hops,
            mode: self.walk_mode,
            seed: walkvec_core::util::derive_seed(self.seed, STREAM_WALK),
            dedup: self.dedup,
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            dim: self.dim,
            window: self.window,
            epochs: self.epochs,
            learning_rate: self.learning_rate,
            negatives: self.negatives,
            smoothing: self.smoothing,
            min_count: self.min_count,
            subsample: self.subsample,
            model: self.model,
            seed: walkvec_core::util::derive_seed(self.seed, STREAM_TRAIN),
            threads: self.effective_threads(),
        }
    }

    pub fn eval_params(&self) -> EvalParams {
        EvalParams {
            knn_k: self.knn_k,
            kmeans_restarts: self.kmeans_restarts,
            eval_seed: walkvec_core::util::derive_seed(self.seed, STREAM_EVAL),
        }
    }

    /// Renders the full resolved configuration, the provenance record echoed
    /// next to every artifact.
    pub fn render(&self) -> String {
        let mut pairs: BTreeMap<&str, String> = BTreeMap::new();
        pairs.insert("walks_per_node", self.walks_per_node.to_string());
        pairs.insert("backward_hops", self.backward_hops.to_string());
        pairs.insert("forward_hops", self.forward_hops.to_string());
        pairs.insert("walk_mode", self.walk_mode.as_str().to_string());
        pairs.insert("dedup", self.dedup.to_string());
        pairs.insert("skip_literals", self.skip_literals.to_string());
        pairs.insert("dim", self.dim.to_string());
        pairs.insert("window", self.window.to_string());
        pairs.insert("epochs", self.epochs.to_string());
        pairs.insert(
            "learning_rate",
            self.learning_rate
                .map(|x| x.to_string())
                .unwrap_or_else(|| format!("{} (model default)", self.model.default_learning_rate())),
        );
        pairs.insert("negatives", self.negatives.to_string());
        pairs.insert("smoothing", self.smoothing.to_string());
        pairs.insert("min_count", self.min_count.to_string());
        pairs.insert(
            "subsample",
            self.subsample
                .map(|x| x.to_string())
                .unwrap_or_else(|| "off".to_string()),
        );
        pairs.insert("model", self.model.as_str().to_string());
        pairs.insert("knn_k", self.knn_k.to_string());
        pairs.insert("kmeans_restarts", self.kmeans_restarts.to_string());
        pairs.insert("seed", self.seed.to_string());
        pairs.insert("threads", self.effective_threads().to_string());
        pairs.insert("deterministic", self.deterministic.to_string());
        let mut out = String::new();
        for (k, v) in pairs {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

// Named sub-seed streams so each pipeline stage draws independent
// randomness from the one global seed.
const STREAM_WALK: u64 = 0x77_61_6c_6b; // "walk"
const STREAM_TRAIN: u64 = 0x74_72_61_69; // "trai"
const STREAM_EVAL: u64 = 0x65_76_61_6c; // "eval"

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn defaults_match_walk_and_train_defaults() {
        let cfg = PipelineConfig::default();
        assert_eq!(cfg.walks_per_node, 500);
        assert_eq!(cfg.backward_hops, 2);
        assert_eq!(cfg.forward_hops, 2);
        assert_eq!(cfg.dim, 200);
        assert_eq!(cfg.window, 5);
        assert_eq!(cfg.negatives, 5);
        assert_eq!(cfg.smoothing, 0.75);
    }

    #[test]
    fn file_values_override_defaults_and_flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("walkvec.conf");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "# comment\ndim=64\nwalk_mode=p").unwrap();
        drop(f);
        let mut cfg = PipelineConfig::load(Some(&path)).unwrap();
        assert_eq!(cfg.dim, 64);
        assert_eq!(cfg.walk_mode, WalkKind::P);
        cfg.override_key("dim", "32").unwrap();
        assert_eq!(cfg.dim, 32);
    }

    #[test]
    fn unknown_key_suggests_nearest() {
        let mut cfg = PipelineConfig::default();
        let err = cfg.set("walk_modes", "p").unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("walk_modes"), "{msg}");
        assert!(msg.contains("walk_mode"), "{msg}");
    }

    #[test]
    fn invalid_mode_lists_choices() {
        let mut cfg = PipelineConfig::default();
        let err = cfg.set("walk_mode", "q").unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("classic"), "{msg}");
        assert!(msg.contains("e"), "{msg}");
        assert!(msg.contains("p"), "{msg}");
    }

    #[test]
    fn deterministic_forces_single_worker() {
        let cfg = PipelineConfig {
            threads: 8,
            deterministic: true,
            ..Default::default()
        };
        assert_eq!(cfg.effective_threads(), 1);
    }

    #[test]
    fn render_lists_every_key() {
        let cfg = PipelineConfig::default();
        let rendered = cfg.render();
        for key in KEYS {
            assert!(rendered.contains(key), "{key} missing from render");
        }
    }
}
