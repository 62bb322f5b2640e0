//! Task metrics: leave-one-out kNN classification and regression, analogy
//! accuracy, Kendall tau relatedness, document similarity, and the
//! structural/contextual pair separation probe.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AnalogyQuad, DocumentPair, EvalError, GoldLabels, GoldRanking, GoldTargets};
use crate::store::EmbeddingStore;

#[derive(Debug, Clone)]
pub struct ClassifyOutcome {
    pub accuracy: f64,
    pub evaluated: usize,
    /// Gold entities absent from the store, excluded from evaluation.
    pub excluded: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct RegressOutcome {
    pub rmse: f64,
    pub evaluated: usize,
    pub excluded: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct AnalogyOutcome {
    pub accuracy: f64,
    pub total: usize,
    pub correct: usize,
    /// Tokens that were missing; their quads count as incorrect.
    pub missing: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct DocSimOutcome {
    pub harmonic_mean: f64,
    pub pearson: f64,
    pub spearman: f64,
    pub evaluated_pairs: usize,
    /// Entity tokens missing from the store (weights dropped).
    pub missing: Vec<String>,
    /// Indices of pairs excluded because one side had no resolvable entity.
    pub excluded_pairs: Vec<usize>,
}

/// Splits gold entities into (present-sorted, missing) against the store.
fn partition_present<'a, T>(
    store: &EmbeddingStore,
    gold: &'a BTreeMap<String, T>,
) -> (Vec<(&'a str, &'a T)>, Vec<String>) {
    let mut present = Vec::new();
    let mut missing = Vec::new();
    for (token, value) in gold {
        if store.contains(token) {
            present.push((token.as_str(), value));
        } else {
            missing.push(token.clone());
        }
    }
    (present, missing)
}

/// Ranks `candidates` (indices into a token list) by cosine to `probe`,
/// descending, breaking exact ties lexicographically.
fn rank_by_cosine<'a>(
    store: &EmbeddingStore,
    probe: &str,
    candidates: impl Iterator<Item = &'a str>,
) -> Vec<(&'a str, f64)> {
    let mut scored: Vec<(&'a str, f64)> = candidates
        .map(|c| {
            let score = store
                .cosine_between(probe, c)
                .expect("candidates are pre-checked against the store");
            (c, score)
        })
        .collect();
    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("cosine is finite")
            .then_with(|| a.0.cmp(b.0))
    });
    scored
}

/// Leave-one-out k-nearest-neighbor classification accuracy by cosine.
/// Vote ties resolve to the lexicographically smallest class label.
pub fn knn_classify_loo(
    store: &EmbeddingStore,
    gold: &GoldLabels,
    k: usize,
) -> Result<ClassifyOutcome, EvalError> {
    if gold.distinct_labels().len() < 2 {
        return Err(EvalError::InvalidGold(
            "classification needs at least 2 distinct labels".into(),
        ));
    }
    let (present, excluded) = partition_present(store, &gold.labels);
    if present.len() < k + 1 {
        return Err(EvalError::Contract(format!(
            "need at least k+1 = {} labeled entities in the store, have {}",
            k + 1,
            present.len()
        )));
    }
    let mut correct = 0usize;
    for &(token, _) in &present {
        let neighbors = rank_by_cosine(
            store,
            token,
            present
                .iter()
                .map(|&(t, _)| t)
                .filter(|&t| t != token),
        );
        let mut votes: BTreeMap<&str, usize> = BTreeMap::new();
        for (neighbor, _) in neighbors.iter().take(k) {
            let label = gold.labels[*neighbor].as_str();
            *votes.entry(label).or_insert(0) += 1;
        }
        // BTreeMap iterates labels in ascending order, so on equal counts the
        // smallest label wins.
        let winner = votes
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
            .map(|(l, _)| *l)
            .expect("k >= 1");
        if winner == gold.labels[token] {
            correct += 1;
        }
    }
    Ok(ClassifyOutcome {
        accuracy: correct as f64 / present.len() as f64,
        evaluated: present.len(),
        excluded,
    })
}

/// Leave-one-out kNN regression: prediction is the mean target of the k
/// nearest entities; returns the root mean squared error.
pub fn knn_regress_loo(
    store: &EmbeddingStore,
    gold: &GoldTargets,
    k: usize,
) -> Result<RegressOutcome, EvalError> {
    let (present, excluded) = partition_present(store, &gold.targets);
    if present.len() < k + 1 {
        return Err(EvalError::Contract(format!(
            "need at least k+1 = {} target entities in the store, have {}",
            k + 1,
            present.len()
        )));
    }
    let mut sq_sum = 0.0;
    for &(token, &target) in &present {
        let neighbors = rank_by_cosine(
            store,
            token,
            present
                .iter()
                .map(|&(t, _)| t)
                .filter(|&t| t != token),
        );
        let prediction = neighbors
            .iter()
            .take(k)
            .map(|(n, _)| gold.targets[*n])
            .sum::<f64>()
            / k.min(neighbors.len()) as f64;
        sq_sum += (prediction - target) * (prediction - target);
    }
    Ok(RegressOutcome {
        rmse: (sq_sum / present.len() as f64).sqrt(),
        evaluated: present.len(),
        excluded,
    })
}

/// Fraction of quads where the top-1 analogy answer is exactly `b_star`.
/// Quads touching tokens missing from the store count as incorrect.
pub fn analogy_accuracy(
    store: &EmbeddingStore,
    quads: &[AnalogyQuad],
) -> Result<AnalogyOutcome, EvalError> {
    if quads.is_empty() {
        return Err(EvalError::InvalidGold("no analogy quads given".into()));
    }
    let mut correct = 0usize;
    let mut missing = Vec::new();
    for quad in quads {
        let absent: Vec<&String> = [&quad.a, &quad.a_star, &quad.b, &quad.b_star]
            .into_iter()
            .filter(|t| !store.contains(t))
            .collect();
        if !absent.is_empty() {
            for t in absent {
                if !missing.contains(t) {
                    missing.push(t.clone());
                }
            }
            continue;
        }
        let answer = store.analogy(&quad.a, &quad.a_star, &quad.b, 1)?;
        if answer.first().is_some_and(|(t, _)| *t == quad.b_star) {
            correct += 1;
        }
    }
    Ok(AnalogyOutcome {
        accuracy: correct as f64 / quads.len() as f64,
        total: quads.len(),
        correct,
        missing,
    })
}

/// Kendall tau-a between a gold ordering and a predicted ordering of the same
/// element set: (concordant - discordant) / (n (n-1) / 2).
pub fn kendall_tau(gold: &[String], predicted: &[String]) -> Result<f64, EvalError> {
    if gold.len() != predicted.len() {
        return Err(EvalError::Contract(format!(
            "rankings differ in length: {} vs {}",
            gold.len(),
            predicted.len()
        )));
    }
    let n = gold.len();
    if n < 2 {
        return Err(EvalError::Contract(
            "kendall tau needs at least 2 elements".into(),
        ));
    }
    let mut predicted_rank: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, t) in predicted.iter().enumerate() {
        if predicted_rank.insert(t, i).is_some() {
            return Err(EvalError::Contract(format!(
                "predicted ranking lists {t:?} twice"
            )));
        }
    }
    let ranks: Vec<usize> = gold
        .iter()
        .map(|t| {
            predicted_rank
                .get(t.as_str())
                .copied()
                .ok_or_else(|| EvalError::Contract(format!("{t:?} missing from prediction")))
        })
        .collect::<Result<_, _>>()?;
    let mut concordant = 0i64;
    let mut discordant = 0i64;
    for i in 0..n {
        for j in (i + 1)..n {
            // Gold rank of i is smaller by construction.
            if ranks[i] < ranks[j] {
                concordant += 1;
            } else {
                discordant += 1;
            }
        }
    }
    let pairs = (n * (n - 1) / 2) as f64;
    Ok((concordant - discordant) as f64 / pairs)
}

/// Kendall tau of a gold relatedness ranking against the cosine ranking
/// around its anchor. Comparison entities missing from the store are dropped
/// from both sides and reported; the anchor must be present.
pub fn ranking_tau(
    store: &EmbeddingStore,
    ranking: &GoldRanking,
) -> Result<(f64, Vec<String>), EvalError> {
    if !store.contains(&ranking.anchor) {
        return Err(EvalError::Contract(format!(
            "ranking anchor {:?} missing from the store",
            ranking.anchor
        )));
    }
    let mut excluded = Vec::new();
    let gold: Vec<String> = ranking
        .ranked
        .iter()
        .filter(|t| {
            let present = store.contains(t);
            if !present {
                excluded.push((*t).clone());
            }
            present
        })
        .cloned()
        .collect();
    if gold.len() < 2 {
        return Err(EvalError::Contract(format!(
            "ranking for {:?} has fewer than 2 comparison entities in the store",
            ranking.anchor
        )));
    }
    let predicted: Vec<String> = rank_by_cosine(store, &ranking.anchor, gold.iter().map(|s| s.as_str()))
        .into_iter()
        .map(|(t, _)| t.to_string())
        .collect();
    Ok((kendall_tau(&gold, &predicted)?, excluded))
}

/// Document similarity: cosine between weight-normalized mean entity vectors,
/// scored against gold by the harmonic mean of Pearson and Spearman.
pub fn document_similarity(
    store: &EmbeddingStore,
    pairs: &[DocumentPair],
) -> Result<DocSimOutcome, EvalError> {
    if pairs.len() < 2 {
        return Err(EvalError::InvalidGold(
            "document similarity needs at least 2 pairs".into(),
        ));
    }
    let golds: Vec<f64> = pairs.iter().map(|p| p.gold).collect();
    if golds.iter().all(|&g| g == golds[0]) {
        return Err(EvalError::InvalidGold(
            "gold similarity scores are constant".into(),
        ));
    }

    let mut missing = Vec::new();
    let mut excluded_pairs = Vec::new();
    let mut predicted = Vec::new();
    let mut gold_used = Vec::new();
    for (idx, pair) in pairs.iter().enumerate() {
        let va = document_vector(store, &pair.doc_a, &mut missing);
        let vb = document_vector(store, &pair.doc_b, &mut missing);
        match (va, vb) {
            (Some(va), Some(vb)) => {
                predicted.push(cosine_f64(&va, &vb));
                gold_used.push(pair.gold);
            }
            _ => excluded_pairs.push(idx),
        }
    }
    if predicted.len() < 2 {
        return Err(EvalError::Undefined(
            "fewer than 2 document pairs could be evaluated".into(),
        ));
    }
    let pearson = pearson(&predicted, &gold_used)?;
    let spearman = spearman(&predicted, &gold_used)?;
    if (pearson + spearman).abs() < 1e-12 {
        return Err(EvalError::Undefined(
            "harmonic mean undefined: r + rho is zero".into(),
        ));
    }
    Ok(DocSimOutcome {
        harmonic_mean: 2.0 * pearson * spearman / (pearson + spearman),
        pearson,
        spearman,
        evaluated_pairs: predicted.len(),
        missing,
        excluded_pairs,
    })
}

fn document_vector(
    store: &EmbeddingStore,
    doc: &[(String, f64)],
    missing: &mut Vec<String>,
) -> Option<Vec<f64>> {
    let mut acc = vec![0.0; store.dim()];
    let mut weight_sum = 0.0;
    for (token, weight) in doc {
        match store.vector(token) {
            Some(v) => {
                for (a, &x) in acc.iter_mut().zip(v) {
                    *a += weight * x as f64;
                }
                weight_sum += weight;
            }
            None => {
                if !missing.contains(token) {
                    missing.push(token.clone());
                }
            }
        }
    }
    if weight_sum <= 0.0 {
        return None;
    }
    for a in &mut acc {
        *a /= weight_sum;
    }
    Some(acc)
}

fn cosine_f64(u: &[f64], v: &[f64]) -> f64 {
    let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return 0.0;
    }
    u.iter().zip(v).map(|(x, y)| x * y).sum::<f64>() / (nu * nv)
}

/// Pearson correlation coefficient.
pub(crate) fn pearson(x: &[f64], y: &[f64]) -> Result<f64, EvalError> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(EvalError::Undefined(
            "correlation undefined for constant sequence".into(),
        ));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Spearman rank correlation with average ranks for ties.
pub(crate) fn spearman(x: &[f64], y: &[f64]) -> Result<f64, EvalError> {
    pearson(&average_ranks(x), &average_ranks(y))
}

fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Mean cosine of gold pairs versus mean cosine of seeded random pairs drawn
/// from `candidates`. The probe behind the structure-vs-context hypothesis:
/// under predicate-walk embeddings structural twins should beat random pairs,
/// under entity-walk embeddings contextual partners should.
pub fn pair_separation(
    store: &EmbeddingStore,
    gold_pairs: &[(String, String)],
    candidates: &[String],
    random_pairs: usize,
    seed: u64,
) -> Result<SeparationStats, EvalError> {
    let usable: Vec<&(String, String)> = gold_pairs
        .iter()
        .filter(|(a, b)| store.contains(a) && store.contains(b))
        .collect();
    if usable.is_empty() {
        return Err(EvalError::Contract(
            "no gold pair is fully resolvable in the store".into(),
        ));
    }
    let pool: Vec<&String> = candidates.iter().filter(|t| store.contains(t)).collect();
    if pool.len() < 2 {
        return Err(EvalError::Contract(
            "need at least 2 candidate entities for random pairs".into(),
        ));
    }
    let mut gold_sum = 0.0;
    for (a, b) in &usable {
        gold_sum += store.cosine_between(a, b)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut random_sum = 0.0;
    for _ in 0..random_pairs {
        let a = pool[rng.random_range(0..pool.len())];
        let mut b = pool[rng.random_range(0..pool.len())];
        while b == a {
            b = pool[rng.random_range(0..pool.len())];
        }
        random_sum += store.cosine_between(a, b)?;
    }
    Ok(SeparationStats {
        mean_gold: gold_sum / usable.len() as f64,
        mean_random: random_sum / random_pairs.max(1) as f64,
        gold_pairs_used: usable.len(),
    })
}

#[derive(Debug, Clone, Copy)]
pub struct SeparationStats {
    pub mean_gold: f64,
    pub mean_random: f64,
    pub gold_pairs_used: usize,
}

impl SeparationStats {
    pub fn gold_wins(&self) -> bool {
        self.mean_gold > self.mean_random
    }
}
