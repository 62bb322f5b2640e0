//! Cross-module integration: graph -> walks -> training -> queries.

use std::collections::HashSet;
use std::io::Cursor;

use walkvec_core::embed::{train, ModelKind, TrainConfig};
use walkvec_core::eval::{generate_synthetic_kg, knn_classify_loo, SyntheticGraphSpec};
use walkvec_core::walk::{extract_corpus, WalkConfig, WalkKind};

fn corpus_for(mode: WalkKind, seed: u64) -> (walkvec_core::KnowledgeGraph, Vec<u8>) {
    let spec = SyntheticGraphSpec { seed, ..Default::default() };
    let (graph, _) = generate_synthetic_kg(&spec).unwrap();
    let cfg = WalkConfig {
        walks_per_node: 50,
        mode,
        seed,
        ..Default::default()
    };
    let mut corpus = Vec::new();
    extract_corpus(&graph, &cfg, &mut corpus).unwrap();
    (graph, corpus)
}

#[test]
fn p_mode_vocabulary_is_predicates_plus_focus_entities() {
    let (graph, corpus) = corpus_for(WalkKind::P, 3);
    let cfg = TrainConfig {
        dim: 8,
        epochs: 1,
        seed: 3,
        ..Default::default()
    };
    let (store, _) = train(Cursor::new(&corpus), &cfg).unwrap();
    let entities: HashSet<&str> = graph.entity_iris().collect();
    let predicates: HashSet<&str> = graph.predicate_iris().collect();
    for token in store.tokens() {
        assert!(
            entities.contains(token) || predicates.contains(token),
            "unexpected token {token}"
        );
    }
    // Every entity is the focus of its own walks, so every entity keeps a
    // vector even in predicate mode.
    for entity in &entities {
        assert!(store.contains(entity), "missing focus entity {entity}");
    }
}

#[test]
fn e_mode_vocabulary_is_entities_only() {
    let (graph, corpus) = corpus_for(WalkKind::E, 4);
    let cfg = TrainConfig {
        dim: 8,
        epochs: 1,
        seed: 4,
        ..Default::default()
    };
    let (store, _) = train(Cursor::new(&corpus), &cfg).unwrap();
    let entities: HashSet<&str> = graph.entity_iris().collect();
    let predicates: HashSet<&str> = graph.predicate_iris().collect();
    assert_eq!(store.len(), entities.len());
    for token in store.tokens() {
        assert!(entities.contains(token), "unexpected token {token}");
        assert!(!predicates.contains(token), "predicate {token} leaked");
    }
}

#[test]
fn classic_vocabulary_covers_entities_and_predicates() {
    let (graph, corpus) = corpus_for(WalkKind::Classic, 5);
    let cfg = TrainConfig {
        dim: 8,
        epochs: 1,
        seed: 5,
        ..Default::default()
    };
    let (store, _) = train(Cursor::new(&corpus), &cfg).unwrap();
    for entity in graph.entity_iris() {
        assert!(store.contains(entity), "missing entity {entity}");
    }
    // Predicates on edges reachable from any focus appear as tokens too.
    let present_predicates = graph
        .predicate_iris()
        .filter(|p| store.contains(p))
        .count();
    assert!(present_predicates > 0);
}

#[test]
fn end_to_end_structure_signal_reaches_classifier() {
    let (graph, corpus) = corpus_for(WalkKind::P, 6);
    let spec = SyntheticGraphSpec { seed: 6, ..Default::default() };
    let (_, gold) = generate_synthetic_kg(&spec).unwrap();
    let cfg = TrainConfig {
        dim: 32,
        epochs: 40,
        model: ModelKind::Sg,
        seed: 6,
        ..Default::default()
    };
    let (store, report) = train(Cursor::new(&corpus), &cfg).unwrap();
    assert!(report.epoch_mean_loss[0] > *report.epoch_mean_loss.last().unwrap());
    let outcome = knn_classify_loo(&store, &gold.class_labels, 3).unwrap();
    assert!(
        outcome.accuracy > 0.9,
        "predicate-walk embeddings should separate structural classes, got {}",
        outcome.accuracy
    );
    drop(graph);
}
