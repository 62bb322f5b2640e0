//! Corpus vocabulary and the negative-sampling distribution.

use std::collections::HashMap;
use std::io::BufRead;

use rand::Rng;

use super::TrainError;

/// Token statistics plus the cumulative negative-sampling table.
///
/// Ids are dense in `[0, len)`, assigned by descending count with
/// lexicographic tie-break, so a given corpus always produces the same
/// vocabulary.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    tokens: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, u32>,
    /// Non-decreasing CDF over ids ending at exactly 1.0.
    cumulative: Vec<f64>,
    total_tokens: u64,
}

/// Counts whitespace-separated tokens from a corpus stream and builds the
/// vocabulary. Tokens occurring fewer than `min_count` times are dropped.
pub fn build_vocab<R: BufRead>(
    reader: R,
    min_count: u64,
    smoothing: f64,
) -> Result<Vocabulary, TrainError> {
    let mut counts: HashMap<String, u64> = HashMap::new();
    for line in reader.lines() {
        for token in line?.split_whitespace() {
            *counts.entry(token.to_string()).or_insert(0) += 1;
        }
    }
    Vocabulary::from_counts(counts, min_count, smoothing)
}

impl Vocabulary {
    pub fn from_counts(
        counts: HashMap<String, u64>,
        min_count: u64,
        smoothing: f64,
    ) -> Result<Self, TrainError> {
        let mut entries: Vec<(String, u64)> = counts
            .into_iter()
            .filter(|(_, c)| *c >= min_count.max(1))
            .collect();
        if entries.is_empty() {
            return Err(TrainError::EmptyVocabulary);
        }
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

        let mut tokens = Vec::with_capacity(entries.len());
        let mut token_counts = Vec::with_capacity(entries.len());
        let mut index = HashMap::with_capacity(entries.len());
        for (id, (token, count)) in entries.into_iter().enumerate() {
            index.insert(token.clone(), id as u32);
            tokens.push(token);
            token_counts.push(count);
        }
        let total_tokens = token_counts.iter().sum();

        let weights: Vec<f64> = token_counts
            .iter()
            .map(|&c| (c as f64).powf(smoothing))
            .collect();
        let total_weight: f64 = weights.iter().sum();
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for w in &weights {
            acc += w / total_weight;
            cumulative.push(acc);
        }
        *cumulative.last_mut().unwrap() = 1.0;

        Ok(Vocabulary {
            tokens,
            counts: token_counts,
            index,
            cumulative,
            total_tokens,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn token(&self, id: u32) -> &str {
        &self.tokens[id as usize]
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn count(&self, id: u32) -> u64 {
        self.counts[id as usize]
    }

    /// Total retained token occurrences in the corpus.
    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|s| s.as_str())
    }

    /// Per-id probability under the smoothed negative-sampling distribution.
    pub fn sampling_probability(&self, id: u32) -> f64 {
        let i = id as usize;
        if i == 0 {
            self.cumulative[0]
        } else {
            self.cumulative[i] - self.cumulative[i - 1]
        }
    }

    /// The cumulative negative-sampling distribution in id order; a
    /// non-decreasing sequence ending at exactly 1.0.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// Draws one id from the smoothed unigram distribution.
    pub fn sample_negative<R: Rng>(&self, rng: &mut R) -> u32 {
        let x: f64 = rng.random();
        self.cumulative.partition_point(|&c| c <= x) as u32
    }

    /// Occurrence keep-probability under word2vec-style subsampling with
    /// threshold `t`.
    pub(crate) fn keep_probability(&self, id: u32, t: f64) -> f64 {
        let f = self.counts[id as usize] as f64 / self.total_tokens as f64;
        (((f / t).sqrt() + 1.0) * t / f).min(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::io::Cursor;

    #[test]
    fn single_line_counts() {
        let v = build_vocab(Cursor::new("s:a s:p s:b\n"), 0, 0.75).unwrap();
        assert_eq!(v.len(), 3);
        for token in ["s:a", "s:p", "s:b"] {
            assert_eq!(v.count(v.id(token).unwrap()), 1);
        }
        assert_eq!(v.total_tokens(), 3);
    }

    #[test]
    fn ids_ordered_by_count_then_token() {
        let v = build_vocab(Cursor::new("s:b s:b s:a s:c s:c\n"), 0, 1.0).unwrap();
        assert_eq!(v.token(0), "s:b");
        assert_eq!(v.token(1), "s:c");
        assert_eq!(v.token(2), "s:a");
    }

    #[test]
    fn unsmoothed_probabilities_are_count_fractions() {
        let v = build_vocab(Cursor::new("s:x s:x s:x s:x s:y\n"), 0, 1.0).unwrap();
        let x = v.id("s:x").unwrap();
        let y = v.id("s:y").unwrap();
        assert!((v.sampling_probability(x) - 0.8).abs() < 1e-12);
        assert!((v.sampling_probability(y) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn smoothed_probabilities_match_independent_computation() {
        let v = build_vocab(Cursor::new("s:x s:x s:x s:x s:y\n"), 0, 0.75).unwrap();
        // 4^0.75 = 2^1.5 = 2 * sqrt(2), computed independently of powf.
        let four_smoothed = 2.0 * 2.0_f64.sqrt();
        let expected_x = four_smoothed / (four_smoothed + 1.0);
        let x = v.id("s:x").unwrap();
        let y = v.id("s:y").unwrap();
        assert!((v.sampling_probability(x) - expected_x).abs() < 1e-12);
        assert!((v.sampling_probability(y) - (1.0 - expected_x)).abs() < 1e-12);
    }

    #[test]
    fn min_count_drops_rare_tokens() {
        let v = build_vocab(Cursor::new("s:a s:a s:b\n"), 2, 0.75).unwrap();
        assert_eq!(v.len(), 1);
        assert!(v.id("s:b").is_none());
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(matches!(
            build_vocab(Cursor::new(""), 0, 0.75),
            Err(TrainError::EmptyVocabulary)
        ));
        assert!(matches!(
            build_vocab(Cursor::new("s:a\n"), 5, 0.75),
            Err(TrainError::EmptyVocabulary)
        ));
    }

    #[test]
    fn cumulative_table_is_monotone_and_ends_at_one() {
        let v = build_vocab(
            Cursor::new("s:a s:a s:a s:b s:b s:c s:d s:e s:e s:e s:e\n"),
            0,
            0.75,
        )
        .unwrap();
        let cum = v.cumulative();
        for w in cum.windows(2) {
            assert!(w[0] <= w[1]);
        }
        assert_eq!(*cum.last().unwrap(), 1.0);
    }

    #[test]
    fn negative_sampling_tracks_distribution() {
        let v = build_vocab(Cursor::new("s:x s:x s:x s:x s:y\n"), 0, 1.0).unwrap();
        let x = v.id("s:x").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let draws = 20_000;
        let hits = (0..draws)
            .filter(|_| v.sample_negative(&mut rng) == x)
            .count();
        let freq = hits as f64 / draws as f64;
        assert!((freq - 0.8).abs() < 0.02, "frequency {freq}");
    }
}
