//! Synthetic benchmark graph generator.
//!
//! The generator operationalizes the structure-versus-context contrast that
//! motivates the predicate and entity walk projections:
//!
//! - *Structural twins*: classes of entities that share an identical
//!   predicate signature but point to disjoint, entity-private attribute
//!   objects. Twins look alike structurally while sharing no neighbors, so
//!   predicate-walk embeddings should pull them together.
//! - *Contextual partners*: groups of entities that link to the same hub
//!   entities, each member through its own private predicate. Partners share
//!   neighborhoods but no structure, so entity-walk embeddings should pull
//!   them together.
//! - *Relational block*: capital/country style pairs with typed hubs and
//!   inverse relations, yielding analogy quads that need both similarity and
//!   relatedness to resolve.
//!
//! Everything is derived deterministically from the spec (including its
//! seed): generating twice yields byte-identical graphs and gold data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    AnalogyQuad, DocumentPair, EvalError, GoldLabels, GoldRanking, GoldTargets,
};
use crate::graph::{GraphBuilder, KnowledgeGraph};

/// Size knobs for the synthetic graph. Defaults produce roughly 500
/// entities.
#[derive(Debug, Clone)]
pub struct SyntheticGraphSpec {
    /// Structural classes (also the classification/clustering label count).
    pub classes: usize,
    /// Entities per structural class.
    pub entities_per_class: usize,
    /// Attribute predicates shared within each class.
    pub attributes_per_class: usize,
    /// Context hub pool; hubs/2 contextual groups draw 3 hubs each.
    pub hubs: usize,
    /// Capital/country style pairs in the relational block.
    pub relation_pairs: usize,
    pub seed: u64,
}

impl Default for SyntheticGraphSpec {
    fn default() -> Self {
        SyntheticGraphSpec {
            classes: 6,
            entities_per_class: 14,
            attributes_per_class: 4,
            hubs: 12,
            relation_pairs: 12,
            seed: 42,
        }
    }
}

const MEMBERS_PER_GROUP: usize = 5;
const HUBS_PER_GROUP: usize = 4;
const DOC_ENTITIES: usize = 4;

impl SyntheticGraphSpec {
    pub fn validate(&self) -> Result<(), EvalError> {
        if self.classes < 2 {
            return Err(EvalError::InvalidSpec(
                "need at least 2 classes for labeled tasks".into(),
            ));
        }
        if self.entities_per_class < 2 {
            return Err(EvalError::InvalidSpec(
                "need at least 2 entities per class to form twins".into(),
            ));
        }
        if self.attributes_per_class < 1 {
            return Err(EvalError::InvalidSpec(
                "need at least 1 attribute predicate per class".into(),
            ));
        }
        if self.hubs < 2 {
            return Err(EvalError::InvalidSpec("need at least 2 hubs".into()));
        }
        if self.relation_pairs < 2 {
            return Err(EvalError::InvalidSpec(
                "need at least 2 relation pairs for analogy quads".into(),
            ));
        }
        Ok(())
    }
}

/// Gold data emitted alongside the synthetic graph.
#[derive(Debug, Clone)]
pub struct SyntheticGold {
    /// Same-class entity pairs (share structure, no neighbors).
    pub structural_twins: Vec<(String, String)>,
    /// Same-group entity pairs (share neighbors, no structure).
    pub contextual_partners: Vec<(String, String)>,
    /// Capital/country analogy quads.
    pub quads: Vec<AnalogyQuad>,
    /// Structural class labels for classification and clustering.
    pub class_labels: GoldLabels,
    /// Per-class numeric targets with small per-entity jitter.
    pub regression_targets: GoldTargets,
    /// Relatedness judgments anchored at contextual group members.
    pub rankings: Vec<GoldRanking>,
    /// Weighted entity documents with class-overlap gold scores.
    pub documents: Vec<DocumentPair>,
    /// Every entity of the structural/contextual sections, the candidate
    /// pool for random-pair baselines.
    pub pair_candidates: Vec<String>,
}

/// Builds the synthetic knowledge graph and its gold data.
pub fn generate_synthetic_kg(
    spec: &SyntheticGraphSpec,
) -> Result<(KnowledgeGraph, SyntheticGold), EvalError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut b = GraphBuilder::new();

    let mut class_labels = GoldLabels::default();
    let mut regression_targets = GoldTargets::default();
    let mut structural_twins = Vec::new();
    let mut pair_candidates = Vec::new();

    // Structural classes: identical predicate signatures within a class,
    // entity-private attribute objects.
    let mut class_entities: Vec<Vec<String>> = Vec::with_capacity(spec.classes);
    for ci in 0..spec.classes {
        let mut members = Vec::with_capacity(spec.entities_per_class);
        for j in 0..spec.entities_per_class {
            let entity = format!("syn:c{ci}:e{j}");
            for a in 0..spec.attributes_per_class {
                let predicate = format!("syn:c{ci}:attr{a}");
                let object = format!("syn:c{ci}:e{j}:obj{a}");
                b.add_triple(&entity, &predicate, &object);
            }
            class_labels
                .labels
                .insert(entity.clone(), format!("class-{ci}"));
            regression_targets
                .targets
                .insert(entity.clone(), 10.0 * ci as f64 + rng.random::<f64>());
            pair_candidates.push(entity.clone());
            members.push(entity);
        }
        for j in 0..members.len() {
            for k in (j + 1)..members.len() {
                structural_twins.push((members[j].clone(), members[k].clone()));
            }
        }
        class_entities.push(members);
    }

    // Contextual groups: members share the same hubs through private
    // predicates. Group gi takes the cyclic hub window starting at 2*gi, so
    // adjacent groups overlap in 2 hubs and groups at distance >= 2 share
    // none. That overlap gradient is the gold relatedness signal.
    let hubs: Vec<String> = (0..spec.hubs).map(|h| format!("syn:hub{h}")).collect();
    let groups = (spec.hubs / 2).max(1);
    let mut contextual_partners = Vec::new();
    let mut rankings = Vec::new();
    let mut group_members: Vec<Vec<String>> = Vec::with_capacity(groups);
    for gi in 0..groups {
        let group_hubs: Vec<&String> = (0..HUBS_PER_GROUP.min(spec.hubs))
            .map(|t| &hubs[(2 * gi + t) % spec.hubs])
            .collect();
        let members: Vec<String> = (0..MEMBERS_PER_GROUP)
            .map(|j| format!("syn:g{gi}:m{j}"))
            .collect();
        for (j, member) in members.iter().enumerate() {
            let predicate = format!("syn:g{gi}:m{j}:rel");
            for hub in &group_hubs {
                b.add_triple(member, &predicate, hub);
            }
            pair_candidates.push(member.clone());
        }
        for j in 0..members.len() {
            for k in (j + 1)..members.len() {
                contextual_partners.push((members[j].clone(), members[k].clone()));
            }
        }
        group_members.push(members);
    }
    // Relatedness judgments: a partner (full hub overlap), a member of the
    // adjacent group (partial overlap), a member of a distant group (no
    // overlap). Only meaningful with at least 4 groups.
    if groups >= 4 {
        for gi in 0..groups {
            let anchor = group_members[gi][0].clone();
            rankings.push(GoldRanking::new(
                anchor,
                vec![
                    group_members[gi][1].clone(),
                    group_members[(gi + 1) % groups][0].clone(),
                    group_members[(gi + 2) % groups][0].clone(),
                ],
            )?);
        }
    }

    // Relational block: capitals and countries with inverse relations and
    // type hubs.
    let is_a = "syn:geo:isA";
    let capital_of = "syn:geo:capitalOf";
    let has_capital = "syn:geo:hasCapital";
    let city_hub = "syn:type:City";
    let country_hub = "syn:type:Country";
    let mut quads = Vec::new();
    for i in 0..spec.relation_pairs {
        let capital = format!("syn:geo:capital{i}");
        let country = format!("syn:geo:country{i}");
        b.add_triple(&capital, capital_of, &country);
        b.add_triple(&country, has_capital, &capital);
        b.add_triple(&capital, is_a, city_hub);
        b.add_triple(&country, is_a, country_hub);
    }
    for i in 0..spec.relation_pairs {
        for j in 0..spec.relation_pairs {
            if i != j {
                quads.push(AnalogyQuad::new(
                    format!("syn:geo:capital{i}"),
                    format!("syn:geo:country{i}"),
                    format!("syn:geo:capital{j}"),
                    format!("syn:geo:country{j}"),
                )?);
            }
        }
    }

    // Documents: two per class, sampling class members with varied weights.
    // Gold similarity is 1 for same-class documents and 0 otherwise.
    let mut docs: Vec<(usize, Vec<(String, f64)>)> = Vec::new();
    for (ci, members) in class_entities.iter().enumerate() {
        for copy in 0..2 {
            let mut doc = Vec::new();
            for d in 0..DOC_ENTITIES.min(members.len()) {
                let idx = (copy * 2 + d) % members.len();
                let weight = 1.0 + (d % 3) as f64 * 0.5;
                doc.push((members[idx].clone(), weight));
            }
            docs.push((ci, doc));
        }
    }
    let mut documents = Vec::new();
    for i in 0..docs.len() {
        for j in (i + 1)..docs.len() {
            let gold = if docs[i].0 == docs[j].0 { 1.0 } else { 0.0 };
            documents.push(DocumentPair::new(
                docs[i].1.clone(),
                docs[j].1.clone(),
                gold,
            )?);
        }
    }

    Ok((
        b.build(),
        SyntheticGold {
            structural_twins,
            contextual_partners,
            quads,
            class_labels,
            regression_targets,
            rankings,
            documents,
            pair_candidates,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeMap, BTreeSet};

    #[test]
    fn predicate_signatures_separate_classes() {
        let spec = SyntheticGraphSpec {
            classes: 2,
            entities_per_class: 2,
            attributes_per_class: 2,
            hubs: 2,
            relation_pairs: 2,
            seed: 1,
        };
        let (g, _) = generate_synthetic_kg(&spec).unwrap();
        // Outgoing predicate multiset per class entity.
        let mut signatures: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for ci in 0..2 {
            for j in 0..2 {
                let name = format!("syn:c{ci}:e{j}");
                let id = g.entity_id(&name).unwrap();
                let sig: BTreeSet<String> = g
                    .out_edges(id)
                    .unwrap()
                    .iter()
                    .map(|(p, _)| g.predicate_iri(*p).to_string())
                    .collect();
                signatures.insert(name, sig);
            }
        }
        assert_eq!(signatures["syn:c0:e0"], signatures["syn:c0:e1"]);
        assert_eq!(signatures["syn:c1:e0"], signatures["syn:c1:e1"]);
        assert!(signatures["syn:c0:e0"].is_disjoint(&signatures["syn:c1:e0"]));
        // Neighbor sets of twins are disjoint.
        let neighbors = |name: &str| -> BTreeSet<String> {
            let id = g.entity_id(name).unwrap();
            g.out_edges(id)
                .unwrap()
                .iter()
                .map(|(_, o)| g.entity_iri(*o).to_string())
                .collect()
        };
        assert!(neighbors("syn:c0:e0").is_disjoint(&neighbors("syn:c0:e1")));
    }

    #[test]
    fn fixed_seed_reproduces_graph_bytes() {
        let spec = SyntheticGraphSpec::default();
        let (g1, _) = generate_synthetic_kg(&spec).unwrap();
        let (g2, _) = generate_synthetic_kg(&spec).unwrap();
        let mut b1 = Vec::new();
        let mut b2 = Vec::new();
        g1.write_ntriples(&mut b1).unwrap();
        g2.write_ntriples(&mut b2).unwrap();
        assert_eq!(b1, b2);
    }

    #[test]
    fn three_pairs_give_six_ordered_quads() {
        let spec = SyntheticGraphSpec {
            relation_pairs: 3,
            ..SyntheticGraphSpec::default()
        };
        let (_, gold) = generate_synthetic_kg(&spec).unwrap();
        assert_eq!(gold.quads.len(), 6);
    }

    #[test]
    fn default_spec_is_desk_scale() {
        let (g, gold) = generate_synthetic_kg(&SyntheticGraphSpec::default()).unwrap();
        assert!(
            (400..600).contains(&g.entity_count()),
            "|V| = {}",
            g.entity_count()
        );
        assert_eq!(gold.class_labels.distinct_labels().len(), 6);
        assert!(!gold.structural_twins.is_empty());
        assert!(!gold.contextual_partners.is_empty());
        assert_eq!(gold.quads.len(), 12 * 11);
        assert!(gold.documents.len() >= 2);
        assert!(gold.rankings.len() >= 2);
    }

    #[test]
    fn too_small_spec_is_rejected() {
        let spec = SyntheticGraphSpec {
            classes: 1,
            ..SyntheticGraphSpec::default()
        };
        assert!(matches!(
            generate_synthetic_kg(&spec),
            Err(EvalError::InvalidSpec(_))
        ));
    }
}
