//! Centered random walks and walk corpus extraction.
//!
//! A classic walk alternates entity and predicate tokens around a focus
//! entity: up to `forward_hops` hops follow outgoing edges, up to
//! `backward_hops` hops follow incoming edges. Two projections derive
//! specialized corpora from classic walks: the predicate projection keeps
//! only the focus entity plus all predicates (structure), the entity
//! projection keeps only entities (context).
//!
//! Corpus extraction parallelizes over focus entities. Every entity owns an
//! RNG seeded from the global seed and its handle, and per-entity output is
//! merged in handle order, so the corpus is byte-identical regardless of
//! thread count.

use std::collections::HashSet;
use std::io::{self, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{EntityId, KnowledgeGraph, PredicateId};
use crate::util;

/// Walk flavor: which tokens of the underlying classic walk are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WalkKind {
    /// Alternating entity/predicate tokens.
    Classic,
    /// Focus entity plus predicates only.
    P,
    /// Entities only.
    E,
}

impl WalkKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WalkKind::Classic => "classic",
            WalkKind::P => "p",
            WalkKind::E => "e",
        }
    }
}

impl std::str::FromStr for WalkKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "classic" => Ok(WalkKind::Classic),
            "p" => Ok(WalkKind::P),
            "e" => Ok(WalkKind::E),
            other => Err(format!(
                "invalid walk mode {other:?}, expected one of: classic, e, p"
            )),
        }
    }
}

/// One token of a walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WalkToken {
    Entity(EntityId),
    Predicate(PredicateId),
}

impl WalkToken {
    pub fn is_entity(self) -> bool {
        matches!(self, WalkToken::Entity(_))
    }
}

/// An extracted walk with its focus position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    tokens: Vec<WalkToken>,
    focus_index: usize,
    kind: WalkKind,
}

impl Walk {
    pub fn tokens(&self) -> &[WalkToken] {
        &self.tokens
    }

    pub fn focus_index(&self) -> usize {
        self.focus_index
    }

    pub fn kind(&self) -> WalkKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Renders the walk as one corpus line: lexical forms joined by single
    /// spaces.
    pub fn to_line(&self, g: &KnowledgeGraph) -> String {
        let mut line = String::new();
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            match *t {
                WalkToken::Entity(e) => line.push_str(g.entity_iri(e)),
                WalkToken::Predicate(p) => line.push_str(g.predicate_iri(p)),
            }
        }
        line
    }

    /// Checks the structural invariants of this walk against its graph:
    /// token alternation for the classic kind, projection shape for p/e
    /// kinds, and (for classic walks) that every hop is an actual edge.
    pub fn validate(&self, g: &KnowledgeGraph) -> Result<(), String> {
        if self.tokens.is_empty() {
            return Err("walk has no tokens".into());
        }
        if self.focus_index >= self.tokens.len() {
            return Err("focus index out of range".into());
        }
        match self.kind {
            WalkKind::Classic => {
                if !self.tokens[self.focus_index].is_entity() {
                    return Err("focus token is not an entity".into());
                }
                for (i, t) in self.tokens.iter().enumerate() {
                    let offset_even = (i ^ self.focus_index) & 1 == 0;
                    if offset_even != t.is_entity() {
                        return Err(format!("token {i} breaks entity/predicate alternation"));
                    }
                }
                if !self.tokens.first().unwrap().is_entity()
                    || !self.tokens.last().unwrap().is_entity()
                {
                    return Err("classic walk must begin and end with an entity".into());
                }
                for w in self.tokens.windows(3).step_by(2) {
                    if let [WalkToken::Entity(s), WalkToken::Predicate(p), WalkToken::Entity(o)] =
                        *w
                    {
                        if !g.has_edge(s, p, o) {
                            return Err(format!(
                                "hop ({} {} {}) is not an edge of the graph",
                                g.entity_iri(s),
                                g.predicate_iri(p),
                                g.entity_iri(o)
                            ));
                        }
                    } else {
                        return Err("malformed hop".into());
                    }
                }
            }
            WalkKind::P => {
                for (i, t) in self.tokens.iter().enumerate() {
                    if i == self.focus_index {
                        if !t.is_entity() {
                            return Err("p-walk focus must be an entity".into());
                        }
                    } else if t.is_entity() {
                        return Err(format!("p-walk has a non-focus entity at {i}"));
                    }
                }
            }
            WalkKind::E => {
                for (i, t) in self.tokens.iter().enumerate() {
                    if !t.is_entity() {
                        return Err(format!("e-walk has a predicate token at {i}"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Configuration for walk extraction.
#[derive(Debug, Clone)]
pub struct WalkConfig {
    /// Walks generated per focus entity.
    pub walks_per_node: usize,
    /// Maximum hops against edge direction (prepended).
    pub backward_hops: usize,
    /// Maximum hops along edge direction (appended).
    pub forward_hops: usize,
    /// Projection applied before writing.
    pub mode: WalkKind,
    /// Root seed; every focus entity derives its own stream from it.
    pub seed: u64,
    /// Drop exact duplicate walks within one focus entity group.
    pub dedup: bool,
}

impl Default for WalkConfig {
    /// 500 walks per node over 4 node hops, centered (2 backward + 2
    /// forward), classic tokens, dedup on.
    fn default() -> Self {
        WalkConfig {
            walks_per_node: 500,
            backward_hops: 2,
            forward_hops: 2,
            mode: WalkKind::Classic,
            seed: 1,
            dedup: true,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<(), WalkError> {
        if self.walks_per_node < 1 {
            return Err(WalkError::InvalidConfig(
                "walks_per_node must be at least 1".into(),
            ));
        }
        if self.backward_hops + self.forward_hops < 1 {
            return Err(WalkError::InvalidConfig(
                "backward_hops + forward_hops must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum WalkError {
    #[error("invalid walk config: {0}")]
    InvalidConfig(String),
    #[error("focus entity handle {0} is not in the graph")]
    UnknownFocus(u32),
    #[error("expected a {expected} walk, got a {found} walk")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("walk extraction failed: {0}")]
    Walk(#[from] WalkError),
    #[error("corpus token {token:?} contains whitespace and cannot be written")]
    InvalidToken { token: String },
    #[error("corpus sink failed after {walks_written} walks: {source}")]
    Io {
        walks_written: u64,
        #[source]
        source: io::Error,
    },
}

/// Generates one classic centered walk for `focus`.
///
/// Forward hops are sampled first (uniformly over outgoing edges of the
/// current tail), then backward hops (uniformly over incoming edges of the
/// current head). A side with no edges truncates silently, so the walk may be
/// shorter than nominal.
pub fn generate_centered_walk<R: Rng>(
    g: &KnowledgeGraph,
    focus: EntityId,
    cfg: &WalkConfig,
    rng: &mut R,
) -> Result<Walk, WalkError> {
    if focus.index() >= g.entity_count() {
        return Err(WalkError::UnknownFocus(focus.0));
    }
    let mut forward: Vec<WalkToken> = Vec::with_capacity(2 * cfg.forward_hops);
    let mut tail = focus;
    for _ in 0..cfg.forward_hops {
        let out = g.out_slice(tail);
        if out.is_empty() {
            break;
        }
        let (p, o) = out[rng.random_range(0..out.len())];
        forward.push(WalkToken::Predicate(p));
        forward.push(WalkToken::Entity(o));
        tail = o;
    }
    let mut backward: Vec<WalkToken> = Vec::with_capacity(2 * cfg.backward_hops);
    let mut head = focus;
    for _ in 0..cfg.backward_hops {
        let inc = g.in_slice(head);
        if inc.is_empty() {
            break;
        }
        let (s, p) = inc[rng.random_range(0..inc.len())];
        // Collected nearest-first; reversed below so tokens read left to
        // right.
        backward.push(WalkToken::Predicate(p));
        backward.push(WalkToken::Entity(s));
        head = s;
    }
    let focus_index = backward.len();
    let mut tokens = Vec::with_capacity(backward.len() + 1 + forward.len());
    tokens.extend(backward.into_iter().rev());
    tokens.push(WalkToken::Entity(focus));
    tokens.extend(forward);
    Ok(Walk {
        tokens,
        focus_index,
        kind: WalkKind::Classic,
    })
}

/// Projects a classic walk to its predicate walk: the focus entity plus all
/// predicate tokens, order preserved.
pub fn derive_p_walk(w: &Walk) -> Result<Walk, WalkError> {
    if w.kind != WalkKind::Classic {
        return Err(WalkError::KindMismatch {
            expected: "classic",
            found: w.kind.as_str(),
        });
    }
    let mut tokens = Vec::with_capacity(w.tokens.len() / 2 + 1);
    let mut focus_index = 0;
    for (i, t) in w.tokens.iter().enumerate() {
        if i == w.focus_index {
            focus_index = tokens.len();
            tokens.push(*t);
        } else if !t.is_entity() {
            tokens.push(*t);
        }
    }
    Ok(Walk {
        tokens,
        focus_index,
        kind: WalkKind::P,
    })
}

/// Projects a classic walk to its entity walk: all entity tokens, order
/// preserved (repeats kept).
pub fn derive_e_walk(w: &Walk) -> Result<Walk, WalkError> {
    if w.kind != WalkKind::Classic {
        return Err(WalkError::KindMismatch {
            expected: "classic",
            found: w.kind.as_str(),
        });
    }
    let mut tokens = Vec::with_capacity(w.tokens.len() / 2 + 1);
    let mut focus_index = 0;
    for (i, t) in w.tokens.iter().enumerate() {
        if t.is_entity() {
            if i == w.focus_index {
                focus_index = tokens.len();
            }
            tokens.push(*t);
        }
    }
    Ok(Walk {
        tokens,
        focus_index,
        kind: WalkKind::E,
    })
}

fn project(w: &Walk, mode: WalkKind) -> Result<Walk, WalkError> {
    match mode {
        WalkKind::Classic => Ok(w.clone()),
        WalkKind::P => derive_p_walk(w),
        WalkKind::E => derive_e_walk(w),
    }
}

/// Totals reported by [`extract_corpus`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CorpusStats {
    pub nodes_processed: u64,
    pub walks_emitted: u64,
    pub duplicates_dropped: u64,
}

struct EntityOutput {
    lines: String,
    emitted: u64,
    dropped: u64,
}

/// Generates the walk corpus for every entity of the graph and writes it to
/// `sink`, one walk per line, tokens space-separated.
///
/// An empty graph yields zero stats and no output. Extraction runs on the
/// current rayon thread pool; output order and content are independent of
/// thread count.
pub fn extract_corpus<W: Write>(
    g: &KnowledgeGraph,
    cfg: &WalkConfig,
    sink: &mut W,
) -> Result<CorpusStats, CorpusError> {
    cfg.validate()?;
    let n = g.entity_count();
    let per_entity: Vec<Result<EntityOutput, CorpusError>> = (0..n as u32)
        .into_par_iter()
        .map(|handle| walk_one_entity(g, cfg, EntityId(handle)))
        .collect();

    let mut stats = CorpusStats::default();
    for out in per_entity {
        let out = out?;
        if let Err(source) = sink.write_all(out.lines.as_bytes()) {
            return Err(CorpusError::Io {
                walks_written: stats.walks_emitted,
                source,
            });
        }
        stats.nodes_processed += 1;
        stats.walks_emitted += out.emitted;
        stats.duplicates_dropped += out.dropped;
    }
    if let Err(source) = sink.flush() {
        return Err(CorpusError::Io {
            walks_written: stats.walks_emitted,
            source,
        });
    }
    Ok(stats)
}

/// [`extract_corpus`] writing to a file; `.gz` paths are compressed.
pub fn extract_corpus_to_path(
    g: &KnowledgeGraph,
    cfg: &WalkConfig,
    path: &Path,
) -> Result<CorpusStats, CorpusError> {
    let mut w = util::create_writer(path).map_err(|source| CorpusError::Io {
        walks_written: 0,
        source,
    })?;
    extract_corpus(g, cfg, &mut w)
}

fn walk_one_entity(
    g: &KnowledgeGraph,
    cfg: &WalkConfig,
    focus: EntityId,
) -> Result<EntityOutput, CorpusError> {
    let mut rng = ChaCha8Rng::seed_from_u64(util::derive_seed(cfg.seed, focus.0 as u64));
    let mut seen: HashSet<String> = HashSet::new();
    let mut lines = String::new();
    let mut emitted = 0;
    let mut dropped = 0;
    for _ in 0..cfg.walks_per_node {
        let classic = generate_centered_walk(g, focus, cfg, &mut rng)?;
        let walk = project(&classic, cfg.mode)?;
        // Whitespace inside a token would corrupt the line format. Only
        // possible when literal vertices were kept at parse time.
        if let Some(token) = walk
            .tokens()
            .iter()
            .map(|t| match *t {
                WalkToken::Entity(e) => g.entity_iri(e),
                WalkToken::Predicate(p) => g.predicate_iri(p),
            })
            .find(|s| s.contains(char::is_whitespace))
        {
            return Err(CorpusError::InvalidToken {
                token: token.to_string(),
            });
        }
        let line = walk.to_line(g);
        if cfg.dedup && !seen.insert(line.clone()) {
            dropped += 1;
            continue;
        }
        lines.push_str(&line);
        lines.push('\n');
        emitted += 1;
    }
    Ok(EntityOutput {
        lines,
        emitted,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;

    fn chain() -> KnowledgeGraph {
        // a -p-> b -q-> c
        let mut b = GraphBuilder::new();
        b.add_triple("s:a", "s:p", "s:b");
        b.add_triple("s:b", "s:q", "s:c");
        b.build()
    }

    fn tokens_of(g: &KnowledgeGraph, w: &Walk) -> Vec<String> {
        w.to_line(g).split(' ').map(str::to_string).collect()
    }

    fn cfg(back: usize, fwd: usize) -> WalkConfig {
        WalkConfig {
            backward_hops: back,
            forward_hops: fwd,
            ..WalkConfig::default()
        }
    }

    #[test]
    fn chain_walk_is_forced() {
        let g = chain();
        let b = g.entity_id("s:b").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let w = generate_centered_walk(&g, b, &cfg(1, 1), &mut rng).unwrap();
        assert_eq!(tokens_of(&g, &w), ["s:a", "s:p", "s:b", "s:q", "s:c"]);
        assert_eq!(w.focus_index(), 2);
        w.validate(&g).unwrap();
    }

    #[test]
    fn isolated_node_truncates_both_sides() {
        let mut b = GraphBuilder::new();
        let v = b.ensure_entity("s:v");
        let g = b.build();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let w = generate_centered_walk(&g, v, &cfg(3, 3), &mut rng).unwrap();
        assert_eq!(tokens_of(&g, &w), ["s:v"]);
        assert_eq!(w.focus_index(), 0);
        w.validate(&g).unwrap();
    }

    #[test]
    fn self_loop_repeats_tokens() {
        let mut b = GraphBuilder::new();
        b.add_triple("s:a", "s:p", "s:a");
        let g = b.build();
        let a = g.entity_id("s:a").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let w = generate_centered_walk(&g, a, &cfg(0, 2), &mut rng).unwrap();
        assert_eq!(tokens_of(&g, &w), ["s:a", "s:p", "s:a", "s:p", "s:a"]);
        assert_eq!(w.focus_index(), 0);
        w.validate(&g).unwrap();
    }

    #[test]
    fn fixed_seed_reproduces_choices() {
        let mut b = GraphBuilder::new();
        b.add_triple("s:a", "s:p", "s:b");
        b.add_triple("s:a", "s:p", "s:c");
        let g = b.build();
        let a = g.entity_id("s:a").unwrap();
        let walk = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            generate_centered_walk(&g, a, &cfg(0, 1), &mut rng).unwrap()
        };
        assert_eq!(walk(11), walk(11));
    }

    #[test]
    fn unknown_focus_is_an_error() {
        let g = chain();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let err = generate_centered_walk(&g, EntityId(42), &cfg(1, 1), &mut rng).unwrap_err();
        assert!(matches!(err, WalkError::UnknownFocus(42)));
    }

    #[test]
    fn p_walk_keeps_predicates_and_focus() {
        let g = chain();
        let b = g.entity_id("s:b").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let w = generate_centered_walk(&g, b, &cfg(1, 1), &mut rng).unwrap();
        let p = derive_p_walk(&w).unwrap();
        assert_eq!(tokens_of(&g, &p), ["s:p", "s:b", "s:q"]);
        assert_eq!(p.focus_index(), 1);
        p.validate(&g).unwrap();
    }

    #[test]
    fn p_walk_of_single_token_walk() {
        let mut b = GraphBuilder::new();
        let v = b.ensure_entity("s:v");
        let g = b.build();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let w = generate_centered_walk(&g, v, &cfg(2, 2), &mut rng).unwrap();
        let p = derive_p_walk(&w).unwrap();
        assert_eq!(tokens_of(&g, &p), ["s:v"]);
    }

    #[test]
    fn p_walk_asymmetric_hops() {
        // a -p-> b -q-> c -r-> d, focus b with 1 back / 2 fwd.
        let mut bld = GraphBuilder::new();
        bld.add_triple("s:a", "s:p", "s:b");
        bld.add_triple("s:b", "s:q", "s:c");
        bld.add_triple("s:c", "s:r", "s:d");
        let g = bld.build();
        let b = g.entity_id("s:b").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let w = generate_centered_walk(&g, b, &cfg(1, 2), &mut rng).unwrap();
        assert_eq!(
            tokens_of(&g, &w),
            ["s:a", "s:p", "s:b", "s:q", "s:c", "s:r", "s:d"]
        );
        let p = derive_p_walk(&w).unwrap();
        assert_eq!(tokens_of(&g, &p), ["s:p", "s:b", "s:q", "s:r"]);
    }

    #[test]
    fn e_walk_keeps_entities() {
        let g = chain();
        let b = g.entity_id("s:b").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let w = generate_centered_walk(&g, b, &cfg(1, 1), &mut rng).unwrap();
        let e = derive_e_walk(&w).unwrap();
        assert_eq!(tokens_of(&g, &e), ["s:a", "s:b", "s:c"]);
        assert_eq!(e.focus_index(), 1);
        e.validate(&g).unwrap();
    }

    #[test]
    fn e_walk_preserves_repeats() {
        let mut b = GraphBuilder::new();
        b.add_triple("s:a", "s:p", "s:a");
        let g = b.build();
        let a = g.entity_id("s:a").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let w = generate_centered_walk(&g, a, &cfg(0, 2), &mut rng).unwrap();
        let e = derive_e_walk(&w).unwrap();
        assert_eq!(tokens_of(&g, &e), ["s:a", "s:a", "s:a"]);
    }

    #[test]
    fn projections_reject_non_classic_input() {
        let g = chain();
        let b = g.entity_id("s:b").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let w = generate_centered_walk(&g, b, &cfg(1, 1), &mut rng).unwrap();
        let p = derive_p_walk(&w).unwrap();
        assert!(matches!(
            derive_p_walk(&p),
            Err(WalkError::KindMismatch { .. })
        ));
        assert!(matches!(
            derive_e_walk(&p),
            Err(WalkError::KindMismatch { .. })
        ));
    }

    #[test]
    fn projection_token_counts_add_up() {
        let g = crate::graph::random_graph(5, 25, 80);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for focus in g.entity_ids() {
            let w = generate_centered_walk(&g, focus, &cfg(2, 2), &mut rng).unwrap();
            let p = derive_p_walk(&w).unwrap();
            let e = derive_e_walk(&w).unwrap();
            assert_eq!(p.len() + e.len(), w.len() + 1);
            w.validate(&g).unwrap();
            p.validate(&g).unwrap();
            e.validate(&g).unwrap();
        }
    }

    #[test]
    fn chain_corpus_dedups_to_single_lines() {
        let g = chain();
        let cfg = WalkConfig {
            walks_per_node: 10,
            ..WalkConfig::default()
        };
        let mut buf = Vec::new();
        let stats = extract_corpus(&g, &cfg, &mut buf).unwrap();
        let corpus = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = corpus.lines().collect();
        // Every focus in the chain sees the same single possible walk.
        assert_eq!(stats.nodes_processed, 3);
        assert_eq!(stats.walks_emitted, 3);
        assert_eq!(stats.duplicates_dropped, 27);
        assert_eq!(lines, ["s:a s:p s:b s:q s:c"; 3]);
    }

    #[test]
    fn chain_corpus_p_mode() {
        let g = chain();
        let cfg = WalkConfig {
            walks_per_node: 10,
            mode: WalkKind::P,
            ..WalkConfig::default()
        };
        let mut buf = Vec::new();
        extract_corpus(&g, &cfg, &mut buf).unwrap();
        let corpus = String::from_utf8(buf).unwrap();
        let b_line = corpus
            .lines()
            .find(|l| l.contains("s:b"))
            .expect("focus b line");
        assert_eq!(b_line, "s:p s:b s:q");
    }

    #[test]
    fn empty_graph_yields_zero_stats() {
        let g = GraphBuilder::new().build();
        let mut buf = Vec::new();
        let stats = extract_corpus(&g, &WalkConfig::default(), &mut buf).unwrap();
        assert_eq!(stats, CorpusStats::default());
        assert!(buf.is_empty());
    }

    #[test]
    fn invalid_config_rejected() {
        let g = chain();
        let mut buf = Vec::new();
        let res = extract_corpus(
            &g,
            &WalkConfig {
                backward_hops: 0,
                forward_hops: 0,
                ..WalkConfig::default()
            },
            &mut buf,
        );
        assert!(matches!(res, Err(CorpusError::Walk(_))));
    }

    #[test]
    fn corpus_identical_across_thread_counts() {
        let g = crate::graph::random_graph(17, 60, 240);
        let cfg = WalkConfig {
            walks_per_node: 25,
            seed: 3,
            ..WalkConfig::default()
        };
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| {
                let mut buf = Vec::new();
                let stats = extract_corpus(&g, &cfg, &mut buf).unwrap();
                (stats, buf)
            })
        };
        let (s1, b1) = run(1);
        let (s2, b2) = run(3);
        assert_eq!(s1, s2);
        assert_eq!(b1, b2);
    }

    #[test]
    fn dedup_off_keeps_duplicates() {
        let g = chain();
        let cfg = WalkConfig {
            walks_per_node: 4,
            dedup: false,
            ..WalkConfig::default()
        };
        let mut buf = Vec::new();
        let stats = extract_corpus(&g, &cfg, &mut buf).unwrap();
        assert_eq!(stats.walks_emitted, 12);
        assert_eq!(stats.duplicates_dropped, 0);
    }

    #[test]
    fn literal_tokens_with_whitespace_are_rejected() {
        let opts = crate::graph::ParseOptions {
            skip_literals: false,
            ..Default::default()
        };
        let g = crate::graph::parse_ntriples(
            std::io::Cursor::new("<s:a> <s:p> \"two words\" .\n"),
            &opts,
        )
        .unwrap();
        let mut buf = Vec::new();
        let res = extract_corpus(&g, &WalkConfig::default(), &mut buf);
        match res {
            Err(CorpusError::InvalidToken { token }) => assert!(token.contains(' ')),
            other => panic!("expected InvalidToken, got {other:?}"),
        }
    }

    #[test]
    fn corpus_path_gzip_round_trip() {
        let g = chain();
        let cfg = WalkConfig {
            walks_per_node: 5,
            ..WalkConfig::default()
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.txt.gz");
        extract_corpus_to_path(&g, &cfg, &path).unwrap();
        let mut text = String::new();
        use std::io::Read;
        crate::util::open_reader(&path).unwrap().read_to_string(&mut text).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().all(|l| l == "s:a s:p s:b s:q s:c"));
    }
}

