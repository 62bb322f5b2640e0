//! SGD training loop over an in-memory corpus.

use std::io::BufRead;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::model::{self, Example, Matrices, Scratch};
use super::vocab::Vocabulary;
use super::{TrainConfig, TrainError};
use crate::store::EmbeddingStore;
use crate::util;

/// Learning rate never decays below this fraction of the starting rate.
const LR_FLOOR_RATIO: f64 = 1e-4;

const STREAM_INIT: u64 = 0x696e_6974; // "init"
const STREAM_PASS: u64 = 0x7061_7373; // "pass"

/// Summary of one training run.
#[derive(Debug, Clone)]
pub struct TrainReport {
    pub vocab_size: usize,
    pub sentences: usize,
    /// Retained token occurrences per corpus pass.
    pub tokens_per_epoch: u64,
    pub examples_trained: u64,
    /// Mean example loss per epoch, in epoch order.
    pub epoch_mean_loss: Vec<f64>,
    pub initial_learning_rate: f64,
}

/// Trains embeddings from a walk corpus stream.
///
/// With `threads == 1` the run is fully deterministic for a given config.
/// With more threads, workers apply racy lock-free updates and results vary
/// between runs.
pub fn train<R: BufRead>(
    corpus: R,
    cfg: &TrainConfig,
) -> Result<(EmbeddingStore, TrainReport), TrainError> {
    cfg.validate()?;

    let mut lines: Vec<String> = Vec::new();
    for line in corpus.lines() {
        lines.push(line?);
    }
    let mut counts = std::collections::HashMap::new();
    for line in &lines {
        for token in line.split_whitespace() {
            *counts.entry(token.to_string()).or_insert(0u64) += 1;
        }
    }
    let vocab = Vocabulary::from_counts(counts, cfg.min_count, cfg.smoothing)?;

    let sentences: Vec<Vec<u32>> = lines
        .iter()
        .map(|line| {
            line.split_whitespace()
                .filter_map(|t| vocab.id(t))
                .collect()
        })
        .filter(|s: &Vec<u32>| !s.is_empty())
        .collect();
    drop(lines);

    let matrices = Matrices::new(
        cfg.model,
        vocab.len(),
        cfg.dim,
        cfg.window,
        util::derive_seed(cfg.seed, STREAM_INIT),
    );

    let tokens_per_epoch: u64 = sentences.iter().map(|s| s.len() as u64).sum();
    let total_work = tokens_per_epoch * cfg.epochs as u64;
    let lr0 = cfg.resolved_learning_rate();
    let tokens_done = AtomicU64::new(0);

    let mut report = TrainReport {
        vocab_size: vocab.len(),
        sentences: sentences.len(),
        tokens_per_epoch,
        examples_trained: 0,
        epoch_mean_loss: Vec::with_capacity(cfg.epochs),
        initial_learning_rate: lr0,
    };

    for epoch in 0..cfg.epochs {
        let (loss_sum, examples) = if cfg.threads == 1 {
            let mut worker = Worker::new(&matrices, &vocab, cfg);
            let mut rng = ChaCha8Rng::seed_from_u64(util::derive_seed(
                cfg.seed,
                STREAM_PASS ^ epoch as u64,
            ));
            let mut loss_sum = 0.0;
            let mut examples = 0u64;
            for (i, sentence) in sentences.iter().enumerate() {
                let done = tokens_done.fetch_add(sentence.len() as u64, Ordering::Relaxed);
                let lr = decayed_lr(lr0, done, total_work);
                let (loss, n) = worker.train_sentence(sentence, lr, &mut rng);
                if !loss.is_finite() {
                    return Err(TrainError::NonFiniteLoss { epoch, sentence: i });
                }
                loss_sum += loss;
                examples += n;
            }
            (loss_sum, examples)
        } else {
            train_epoch_parallel(
                &matrices,
                &vocab,
                cfg,
                &sentences,
                epoch,
                lr0,
                total_work,
                &tokens_done,
            )?
        };
        report.examples_trained += examples;
        report
            .epoch_mean_loss
            .push(if examples == 0 { 0.0 } else { loss_sum / examples as f64 });
    }

    let rows: Vec<(String, Vec<f32>)> = (0..vocab.len())
        .map(|id| {
            (
                vocab.token(id as u32).to_string(),
                matrices.input_row_f32(id),
            )
        })
        .collect();
    let store = EmbeddingStore::new(cfg.dim, rows)?;
    Ok((store, report))
}

/// [`train`] reading the corpus from a file; `.gz` paths are decompressed.
pub fn train_from_path(
    path: &Path,
    cfg: &TrainConfig,
) -> Result<(EmbeddingStore, TrainReport), TrainError> {
    let reader = util::open_reader(path)?;
    train(reader, cfg)
}

#[allow(clippy::too_many_arguments)]
fn train_epoch_parallel(
    matrices: &Matrices,
    vocab: &Vocabulary,
    cfg: &TrainConfig,
    sentences: &[Vec<u32>],
    epoch: usize,
    lr0: f64,
    total_work: u64,
    tokens_done: &AtomicU64,
) -> Result<(f64, u64), TrainError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| TrainError::InvalidConfig(format!("thread pool: {e}")))?;
    let chunk_size = sentences.len().div_ceil(cfg.threads * 8).max(1);
    let chunks: Vec<(usize, &[Vec<u32>])> = sentences.chunks(chunk_size).enumerate().collect();
    let results: Vec<Result<(f64, u64), TrainError>> = pool.install(|| {
        chunks
            .into_par_iter()
            .map(|(chunk_idx, chunk)| {
                let mut worker = Worker::new(matrices, vocab, cfg);
                let mut rng = ChaCha8Rng::seed_from_u64(util::derive_seed(
                    cfg.seed,
                    STREAM_PASS ^ ((epoch as u64) << 32) ^ chunk_idx as u64,
                ));
                let mut loss_sum = 0.0;
                let mut examples = 0u64;
                for (i, sentence) in chunk.iter().enumerate() {
                    let done = tokens_done.fetch_add(sentence.len() as u64, Ordering::Relaxed);
                    let lr = decayed_lr(lr0, done, total_work);
                    let (loss, n) = worker.train_sentence(sentence, lr, &mut rng);
                    if !loss.is_finite() {
                        return Err(TrainError::NonFiniteLoss {
                            epoch,
                            sentence: chunk_idx * chunk_size + i,
                        });
                    }
                    loss_sum += loss;
                    examples += n;
                }
                Ok((loss_sum, examples))
            })
            .collect()
    });
    let mut loss_sum = 0.0;
    let mut examples = 0;
    for r in results {
        let (l, n) = r?;
        loss_sum += l;
        examples += n;
    }
    Ok((loss_sum, examples))
}

fn decayed_lr(lr0: f64, done: u64, total: u64) -> f64 {
    let progress = if total == 0 {
        1.0
    } else {
        done as f64 / total as f64
    };
    lr0 * (1.0 - progress).max(LR_FLOOR_RATIO)
}

/// Per-worker training state: reusable buffers plus borrow of the shared
/// parameters.
struct Worker<'a> {
    matrices: &'a Matrices,
    vocab: &'a Vocabulary,
    cfg: &'a TrainConfig,
    scratch: Scratch,
    negatives: Vec<u32>,
    contexts: Vec<(u32, i32)>,
    kept: Vec<u32>,
}

impl<'a> Worker<'a> {
    fn new(matrices: &'a Matrices, vocab: &'a Vocabulary, cfg: &'a TrainConfig) -> Self {
        Worker {
            matrices,
            vocab,
            cfg,
            scratch: Scratch::new(),
            negatives: Vec::with_capacity(cfg.negatives),
            contexts: Vec::with_capacity(2 * cfg.window),
            kept: Vec::new(),
        }
    }

    fn train_sentence<R: Rng>(&mut self, sentence: &[u32], lr: f64, rng: &mut R) -> (f64, u64) {
        let sentence: &[u32] = if let Some(t) = self.cfg.subsample {
            self.kept.clear();
            for &id in sentence {
                if rng.random::<f64>() < self.vocab.keep_probability(id, t) {
                    self.kept.push(id);
                }
            }
            &self.kept
        } else {
            sentence
        };
        if sentence.is_empty() {
            return (0.0, 0);
        }

        let window = self.cfg.window as i32;
        let n = sentence.len() as i32;
        let mut loss_sum = 0.0;
        let mut examples = 0u64;
        if self.cfg.model.is_skip_gram() {
            for t in 0..n {
                for r in -window..=window {
                    if r == 0 {
                        continue;
                    }
                    let u = t + r;
                    if u < 0 || u >= n {
                        continue;
                    }
                    let pair = model::TrainingPair {
                        center: sentence[t as usize],
                        context: sentence[u as usize],
                        offset: r,
                    };
                    draw_negatives(
                        self.vocab,
                        self.cfg.negatives,
                        pair.context,
                        rng,
                        &mut self.negatives,
                    );
                    loss_sum += model::train_example(
                        self.matrices,
                        &Example::Pair(pair),
                        &self.negatives,
                        lr,
                        &mut self.scratch,
                    );
                    examples += 1;
                }
            }
        } else {
            for t in 0..n {
                self.contexts.clear();
                for r in -window..=window {
                    if r == 0 {
                        continue;
                    }
                    let u = t + r;
                    if u < 0 || u >= n {
                        continue;
                    }
                    self.contexts.push((sentence[u as usize], r));
                }
                if self.contexts.is_empty() {
                    continue;
                }
                let center = sentence[t as usize];
                draw_negatives(
                    self.vocab,
                    self.cfg.negatives,
                    center,
                    rng,
                    &mut self.negatives,
                );
                loss_sum += model::train_example(
                    self.matrices,
                    &Example::Window {
                        center,
                        contexts: &self.contexts,
                    },
                    &self.negatives,
                    lr,
                    &mut self.scratch,
                );
                examples += 1;
            }
        }
        (loss_sum, examples)
    }

}

/// Draws `count` negatives into `out`, discarding collisions with the
/// predicted token (so an example may see fewer negatives).
fn draw_negatives<R: Rng>(
    vocab: &Vocabulary,
    count: usize,
    predicted: u32,
    rng: &mut R,
    out: &mut Vec<u32>,
) {
    out.clear();
    for _ in 0..count {
        let id = vocab.sample_negative(rng);
        if id != predicted {
            out.push(id);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::ModelKind;
    use std::io::Cursor;

    /// Tiny deterministic corpus with enough co-occurrence structure for the
    /// loss to fall: sliding token runs over a cyclic alphabet.
    fn toy_corpus() -> String {
        let mut lines = Vec::new();
        for i in 0..150 {
            let a = (i * 7) % 25;
            let tokens: Vec<String> = (0..9).map(|j| format!("s:w{}", (a + j) % 25)).collect();
            lines.push(tokens.join(" "));
        }
        lines.join("\n")
    }

    fn quick_cfg(model: ModelKind) -> TrainConfig {
        TrainConfig {
            dim: 16,
            window: 3,
            epochs: 4,
            learning_rate: Some(0.08),
            model,
            seed: 9,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn mean_epoch_loss_decreases_early() {
        for model in ModelKind::all() {
            let (_, report) = train(Cursor::new(toy_corpus()), &quick_cfg(model)).unwrap();
            let l = &report.epoch_mean_loss;
            assert!(
                l[0] > l[1] && l[1] > l[2],
                "model {model:?}: losses {l:?} not decreasing"
            );
        }
    }

    #[test]
    fn same_seed_single_thread_is_bit_identical() {
        let cfg = quick_cfg(ModelKind::Sg);
        let (s1, _) = train(Cursor::new(toy_corpus()), &cfg).unwrap();
        let (s2, _) = train(Cursor::new(toy_corpus()), &cfg).unwrap();
        assert_eq!(s1, s2);
        let mut b1 = Vec::new();
        let mut b2 = Vec::new();
        s1.save_to(&mut b1).unwrap();
        s2.save_to(&mut b2).unwrap();
        assert_eq!(b1, b2);
    }

    #[test]
    fn different_seeds_differ() {
        let cfg = quick_cfg(ModelKind::Sg);
        let other = TrainConfig { seed: 10, ..cfg.clone() };
        let (s1, _) = train(Cursor::new(toy_corpus()), &cfg).unwrap();
        let (s2, _) = train(Cursor::new(toy_corpus()), &other).unwrap();
        assert_ne!(s1, s2);
    }

    #[test]
    fn every_retained_token_gets_a_vector() {
        let (store, report) = train(Cursor::new(toy_corpus()), &quick_cfg(ModelKind::Cbow)).unwrap();
        assert_eq!(store.len(), report.vocab_size);
        for token in ["s:w0", "s:w13", "s:w24"] {
            assert!(store.contains(token), "missing {token}");
        }
        assert_eq!(store.dim(), 16);
    }

    #[test]
    fn min_count_filters_corpus_and_store() {
        let corpus = "s:a s:b\ns:a s:c\ns:a s:b\n";
        let cfg = TrainConfig {
            dim: 4,
            min_count: 2,
            epochs: 1,
            ..TrainConfig::default()
        };
        let (store, _) = train(Cursor::new(corpus), &cfg).unwrap();
        assert!(store.contains("s:a"));
        assert!(store.contains("s:b"));
        assert!(!store.contains("s:c"));
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let res = train(Cursor::new(""), &TrainConfig::default());
        assert!(matches!(res, Err(TrainError::EmptyVocabulary)));
    }

    #[test]
    fn parallel_mode_trains_and_loss_falls() {
        let cfg = TrainConfig {
            threads: 2,
            ..quick_cfg(ModelKind::Sg)
        };
        let (store, report) = train(Cursor::new(toy_corpus()), &cfg).unwrap();
        assert!(report.epoch_mean_loss[0] > *report.epoch_mean_loss.last().unwrap());
        assert!(!store.is_empty());
    }

    #[test]
    fn subsampling_runs_and_trains() {
        let cfg = TrainConfig {
            subsample: Some(1e-3),
            ..quick_cfg(ModelKind::Sg)
        };
        let (store, _) = train(Cursor::new(toy_corpus()), &cfg).unwrap();
        assert!(!store.is_empty());
    }

    #[test]
    fn learning_rate_floor_holds() {
        assert!((decayed_lr(0.025, 0, 100) - 0.025).abs() < 1e-15);
        let floored = decayed_lr(0.025, 1000, 100);
        assert!((floored - 0.025 * LR_FLOOR_RATIO).abs() < 1e-15);
    }
}
