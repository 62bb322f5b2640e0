//! Token vector training over walk corpora.
//!
//! Four model variants share one negative-sampling objective: skip-gram and
//! CBOW, each in a classic and an order-aware flavor. The order-aware
//! variants keep one output matrix per window offset, so token order within
//! the window affects training; the classic variants collapse all offsets
//! into a single output matrix.
//!
//! All arithmetic runs in f64. Matrices are stored as atomic bit patterns:
//! the single-threaded path is fully deterministic, the multi-threaded path
//! applies lock-free racy updates (standard for this algorithm family) and
//! makes no reproducibility promise.

mod model;
mod train;
mod vocab;

pub use model::{
    example_loss, example_loss_and_gradients, extract_pairs, train_example, Example, GradientSet,
    Matrices, Scratch, TrainingPair,
};
pub use train::{train, train_from_path, TrainReport};
pub use vocab::{build_vocab, Vocabulary};

use std::io;

use thiserror::Error;

/// Model variant axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Skip-gram: predict each context token from the center token.
    Sg,
    /// CBOW: predict the center token from the averaged context.
    Cbow,
    /// Skip-gram with one output matrix per window offset.
    SgOa,
    /// CBOW scored through per-offset output matrices.
    CbowOa,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Sg => "sg",
            ModelKind::Cbow => "cbow",
            ModelKind::SgOa => "sg_oa",
            ModelKind::CbowOa => "cbow_oa",
        }
    }

    pub fn is_order_aware(self) -> bool {
        matches!(self, ModelKind::SgOa | ModelKind::CbowOa)
    }

    pub fn is_skip_gram(self) -> bool {
        matches!(self, ModelKind::Sg | ModelKind::SgOa)
    }

    /// Conventional word2vec starting rates: 0.025 for skip-gram models,
    /// 0.05 for CBOW models.
    pub fn default_learning_rate(self) -> f64 {
        if self.is_skip_gram() {
            0.025
        } else {
            0.05
        }
    }

    pub fn all() -> [ModelKind; 4] {
        [ModelKind::Sg, ModelKind::SgOa, ModelKind::Cbow, ModelKind::CbowOa]
    }
}

impl std::str::FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sg" => Ok(ModelKind::Sg),
            "cbow" => Ok(ModelKind::Cbow),
            "sg_oa" | "sg-oa" => Ok(ModelKind::SgOa),
            "cbow_oa" | "cbow-oa" => Ok(ModelKind::CbowOa),
            other => Err(format!(
                "invalid model {other:?}, expected one of: sg, cbow, sg_oa, cbow_oa"
            )),
        }
    }
}

/// Training configuration. Defaults: 200 dimensions, window 5, 5 epochs,
/// 5 negatives with a 0.75 smoothing exponent, min_count 0 so every walk
/// token keeps a vector, fixed (non-shrinking) window, no subsampling.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub dim: usize,
    /// Maximum absolute context offset.
    pub window: usize,
    pub epochs: usize,
    /// Starting learning rate; `None` selects the model default. Decays
    /// linearly to 1e-4 of the starting value.
    pub learning_rate: Option<f64>,
    /// Negative samples per positive example.
    pub negatives: usize,
    /// Exponent applied to counts when building the negative-sampling table.
    pub smoothing: f64,
    /// Tokens with fewer occurrences are dropped from vocabulary and corpus.
    pub min_count: u64,
    /// Optional frequent-token subsampling threshold (word2vec `sample`).
    /// Off by default: walk corpora are engineered, not natural text.
    pub subsample: Option<f64>,
    pub model: ModelKind,
    pub seed: u64,
    /// Worker count. 1 is the deterministic mode; more workers train faster
    /// with racy updates and no reproducibility guarantee.
    pub threads: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 200,
            window: 5,
            epochs: 5,
            learning_rate: None,
            negatives: 5,
            smoothing: 0.75,
            min_count: 0,
            subsample: None,
            model: ModelKind::Sg,
            seed: 1,
            threads: 1,
        }
    }
}

impl TrainConfig {
    pub fn resolved_learning_rate(&self) -> f64 {
        self.learning_rate
            .unwrap_or_else(|| self.model.default_learning_rate())
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        if self.dim < 1 {
            return Err(TrainError::InvalidConfig("dim must be at least 1".into()));
        }
        if self.window < 1 {
            return Err(TrainError::InvalidConfig(
                "window must be at least 1".into(),
            ));
        }
        if self.negatives < 1 {
            return Err(TrainError::InvalidConfig(
                "negatives must be at least 1".into(),
            ));
        }
        if self.epochs < 1 {
            return Err(TrainError::InvalidConfig(
                "epochs must be at least 1".into(),
            ));
        }
        if self.threads < 1 {
            return Err(TrainError::InvalidConfig(
                "threads must be at least 1".into(),
            ));
        }
        if self.resolved_learning_rate() <= 0.0 {
            return Err(TrainError::InvalidConfig(
                "learning rate must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("invalid train config: {0}")]
    InvalidConfig(String),
    #[error("no trainable tokens (empty corpus or everything below min_count)")]
    EmptyVocabulary,
    #[error("non-finite loss at epoch {epoch}, sentence {sentence}: training diverged")]
    NonFiniteLoss { epoch: usize, sentence: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Store(#[from] crate::store::StoreError),
}
