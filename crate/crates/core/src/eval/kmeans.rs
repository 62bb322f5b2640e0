//! k-means clustering with k-means++ seeding and accuracy under the optimal
//! cluster-to-label assignment.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::assignment::optimal_assignment;
use super::{EvalError, GoldLabels};
use crate::store::EmbeddingStore;
use crate::util;

const MAX_ITERATIONS: usize = 100;

#[derive(Debug, Clone)]
pub struct ClusterOutcome {
    pub accuracy: f64,
    /// Within-cluster sum of squared distances of the kept run.
    pub inertia: f64,
    pub evaluated: usize,
    pub excluded: Vec<String>,
}

/// Clusters the gold entities' vectors with `restarts` k-means++ runs, keeps
/// the lowest-inertia run, and scores accuracy as the best one-to-one
/// matching between clusters and gold labels. Deterministic for a given seed.
pub fn kmeans_cluster_accuracy(
    store: &EmbeddingStore,
    gold: &GoldLabels,
    k: usize,
    restarts: usize,
    seed: u64,
) -> Result<ClusterOutcome, EvalError> {
    if k < 1 {
        return Err(EvalError::Contract("k must be at least 1".into()));
    }
    let mut tokens = Vec::new();
    let mut excluded = Vec::new();
    for token in gold.labels.keys() {
        if store.contains(token) {
            tokens.push(token.as_str());
        } else {
            excluded.push(token.clone());
        }
    }
    if k > tokens.len() {
        return Err(EvalError::Contract(format!(
            "k = {k} exceeds the {} entities available in the store",
            tokens.len()
        )));
    }
    let dim = store.dim();
    let points: Vec<Vec<f64>> = tokens
        .iter()
        .map(|t| store.vector(t).unwrap().iter().map(|&x| x as f64).collect())
        .collect();

    let mut best: Option<(f64, Vec<usize>)> = None;
    for restart in 0..restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(util::derive_seed(seed, restart as u64));
        let (inertia, assignment) = lloyd(&points, k, dim, &mut rng);
        let better = match &best {
            None => true,
            Some((best_inertia, _)) => inertia < *best_inertia,
        };
        if better {
            best = Some((inertia, assignment));
        }
    }
    let (inertia, assignment) = best.expect("at least one restart");

    // Confusion matrix: clusters x labels, then optimal matching.
    let labels = gold.distinct_labels();
    let label_index = |l: &str| labels.iter().position(|x| *x == l).unwrap();
    let side = k.max(labels.len());
    let mut confusion = vec![vec![0.0; side]; side];
    for (i, token) in tokens.iter().enumerate() {
        let cluster = assignment[i];
        let label = label_index(&gold.labels[*token]);
        confusion[cluster][label] += 1.0;
    }
    let (_, matched) = optimal_assignment(&confusion);
    Ok(ClusterOutcome {
        accuracy: matched / tokens.len() as f64,
        inertia,
        evaluated: tokens.len(),
        excluded,
    })
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// One k-means run: k-means++ init then Lloyd iterations until assignments
/// stabilize. Returns (inertia, point-to-cluster assignment).
fn lloyd<R: Rng>(points: &[Vec<f64>], k: usize, dim: usize, rng: &mut R) -> (f64, Vec<usize>) {
    let n = points.len();
    // k-means++ seeding: first center uniform, then proportional to squared
    // distance from the nearest chosen center.
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    centers.push(points[rng.random_range(0..n)].clone());
    let mut d2: Vec<f64> = points
        .iter()
        .map(|p| squared_distance(p, &centers[0]))
        .collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total <= 0.0 {
            // All remaining mass is zero (duplicate points); fall back to
            // uniform choice.
            rng.random_range(0..n)
        } else {
            let x: f64 = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                acc += d;
                if x < acc {
                    chosen = i;
                    break;
                }
            }
            chosen
        };
        centers.push(points[next].clone());
        for (i, p) in points.iter().enumerate() {
            let d = squared_distance(p, centers.last().unwrap());
            if d < d2[i] {
                d2[i] = d;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for _ in 0..MAX_ITERATIONS {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let mut best = 0;
            let mut best_d = squared_distance(p, &centers[0]);
            for (c, center) in centers.iter().enumerate().skip(1) {
                let d = squared_distance(p, center);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            if assignment[i] != best {
                assignment[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (i, p) in points.iter().enumerate() {
            counts[assignment[i]] += 1;
            for (s, x) in sums[assignment[i]].iter_mut().zip(p) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                continue; // empty cluster keeps its previous center
            }
            for (center, s) in centers[c].iter_mut().zip(&sums[c]) {
                *center = s / counts[c] as f64;
            }
        }
    }
    let inertia = points
        .iter()
        .enumerate()
        .map(|(i, p)| squared_distance(p, &centers[assignment[i]]))
        .sum();
    (inertia, assignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::EmbeddingStore;

    fn store(rows: &[(&str, &[f32])]) -> EmbeddingStore {
        let dim = rows[0].1.len();
        EmbeddingStore::new(
            dim,
            rows.iter()
                .map(|(t, v)| (t.to_string(), v.to_vec()))
                .collect(),
        )
        .unwrap()
    }

    fn labels(pairs: &[(&str, &str)]) -> GoldLabels {
        GoldLabels {
            labels: pairs
                .iter()
                .map(|(t, l)| (t.to_string(), l.to_string()))
                .collect(),
        }
    }

    #[test]
    fn two_far_clusters_are_perfect() {
        let s = store(&[
            ("s:a1", &[0.0, 0.0]),
            ("s:a2", &[0.1, 0.0]),
            ("s:a3", &[0.0, 0.1]),
            ("s:b1", &[10.0, 10.0]),
            ("s:b2", &[10.1, 10.0]),
            ("s:b3", &[10.0, 10.1]),
        ]);
        let gold = labels(&[
            ("s:a1", "A"),
            ("s:a2", "A"),
            ("s:a3", "A"),
            ("s:b1", "B"),
            ("s:b2", "B"),
            ("s:b3", "B"),
        ]);
        let out = kmeans_cluster_accuracy(&s, &gold, 2, 5, 17).unwrap();
        assert_eq!(out.accuracy, 1.0);
    }

    #[test]
    fn accuracy_is_invariant_under_label_renaming() {
        let s = store(&[
            ("s:a1", &[0.0, 0.0]),
            ("s:a2", &[0.2, 0.1]),
            ("s:b1", &[5.0, 5.0]),
            ("s:b2", &[5.2, 5.1]),
            ("s:c1", &[-4.0, 3.0]),
            ("s:c2", &[-4.1, 3.2]),
        ]);
        let gold1 = labels(&[
            ("s:a1", "x"),
            ("s:a2", "x"),
            ("s:b1", "y"),
            ("s:b2", "y"),
            ("s:c1", "z"),
            ("s:c2", "z"),
        ]);
        let gold2 = labels(&[
            ("s:a1", "z"),
            ("s:a2", "z"),
            ("s:b1", "x"),
            ("s:b2", "x"),
            ("s:c1", "y"),
            ("s:c2", "y"),
        ]);
        let out1 = kmeans_cluster_accuracy(&s, &gold1, 3, 5, 23).unwrap();
        let out2 = kmeans_cluster_accuracy(&s, &gold2, 3, 5, 23).unwrap();
        assert_eq!(out1.accuracy, out2.accuracy);
    }

    #[test]
    fn one_dimensional_split_matches_hand_oracle() {
        // Points {0, 0.1, 10, 10.1} with classes on each side: the optimal
        // 2-means splits between 0.1 and 10, giving perfect accuracy.
        let s = store(&[
            ("s:p0", &[0.0]),
            ("s:p1", &[0.1]),
            ("s:p2", &[10.0]),
            ("s:p3", &[10.1]),
        ]);
        let gold = labels(&[
            ("s:p0", "lo"),
            ("s:p1", "lo"),
            ("s:p2", "hi"),
            ("s:p3", "hi"),
        ]);
        let out = kmeans_cluster_accuracy(&s, &gold, 2, 10, 5).unwrap();
        assert_eq!(out.accuracy, 1.0);
        // Hand-computed inertia of the optimal clustering, 2 * (0.05)^2 * 2,
        // up to the f32 rounding of the stored coordinates.
        assert!((out.inertia - 0.01).abs() < 1e-6, "{}", out.inertia);
    }

    #[test]
    fn k_larger_than_population_is_an_error() {
        let s = store(&[("s:a", &[1.0]), ("s:b", &[2.0])]);
        let gold = labels(&[("s:a", "A"), ("s:b", "B")]);
        assert!(matches!(
            kmeans_cluster_accuracy(&s, &gold, 3, 2, 1),
            Err(EvalError::Contract(_))
        ));
    }

    #[test]
    fn same_seed_is_deterministic() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let rows: Vec<(String, Vec<f32>)> = (0..30)
            .map(|i| {
                (
                    format!("s:e{i:02}"),
                    (0..4).map(|_| rng.random_range(-1.0..1.0)).collect(),
                )
            })
            .collect();
        let s = EmbeddingStore::new(4, rows).unwrap();
        let gold = GoldLabels {
            labels: (0..30)
                .map(|i| (format!("s:e{i:02}"), format!("c{}", i % 3)))
                .collect(),
        };
        let a = kmeans_cluster_accuracy(&s, &gold, 3, 10, 77).unwrap();
        let b = kmeans_cluster_accuracy(&s, &gold, 3, 10, 77).unwrap();
        assert_eq!(a.accuracy, b.accuracy);
        assert_eq!(a.inertia, b.inertia);
    }
}
