//! N-Triples parsing and the in-memory knowledge graph.
//!
//! The graph is a labeled directed multigraph over interned identifiers.
//! Entities and predicates live in disjoint identifier spaces, so a walk
//! token is always unambiguously one or the other. Construction is
//! single-writer; once built the graph is immutable and all read operations
//! are side-effect-free, so it can be shared freely across threads.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::{self, BufRead, Write};
use std::path::Path;

use thiserror::Error;

use crate::util;

/// Dense handle for an entity (vertex). Handles are assigned in first-seen
/// order and are stable for a given input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntityId(pub u32);

/// Dense handle for a predicate (edge label).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredicateId(pub u32);

impl EntityId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl PredicateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One directed labeled edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Triple {
    pub subject: EntityId,
    pub predicate: PredicateId,
    pub object: EntityId,
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {message}: {text:?}")]
    Parse {
        line: usize,
        message: String,
        text: String,
    },
    #[error("unknown entity: {0}")]
    UnknownEntity(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl GraphError {
    fn parse(line: usize, message: impl Into<String>, text: impl Into<String>) -> Self {
        GraphError::Parse {
            line,
            message: message.into(),
            text: text.into(),
        }
    }
}

/// Options for [`parse_ntriples`].
#[derive(Debug, Clone)]
pub struct ParseOptions {
    /// Skip triples whose object is a literal. The subject of a skipped
    /// triple is still materialized as an entity. Default: on, because walks
    /// range over entity and predicate tokens only.
    pub skip_literals: bool,
    /// Predicates (full IRI) whose triples are dropped entirely, e.g.
    /// `rdf:type` when type edges should not influence walks. The subject is
    /// materialized as with skipped literals.
    pub skip_predicates: HashSet<String>,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            skip_literals: true,
            skip_predicates: HashSet::new(),
        }
    }
}

#[derive(Debug, Default, Clone)]
struct Interner {
    by_name: HashMap<String, u32>,
    names: Vec<String>,
}

impl Interner {
    fn intern(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.by_name.get(name) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(name.to_string());
        self.by_name.insert(name.to_string(), id);
        id
    }

    fn get(&self, name: &str) -> Option<u32> {
        self.by_name.get(name).copied()
    }

    fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }

    fn len(&self) -> usize {
        self.names.len()
    }
}

/// Incrementally builds a [`KnowledgeGraph`]. Duplicate triples are collapsed
/// so that uniform edge sampling is not skewed by repeated input lines.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    entities: Interner,
    predicates: Interner,
    triples: Vec<Triple>,
    seen: HashSet<(u32, u32, u32)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Interns an entity without adding any edge.
    pub fn ensure_entity(&mut self, iri: &str) -> EntityId {
        EntityId(self.entities.intern(iri))
    }

    /// Adds one edge; returns false if it was a duplicate.
    pub fn add_triple(&mut self, subject: &str, predicate: &str, object: &str) -> bool {
        let s = self.entities.intern(subject);
        let p = self.predicates.intern(predicate);
        let o = self.entities.intern(object);
        if !self.seen.insert((s, p, o)) {
            return false;
        }
        self.triples.push(Triple {
            subject: EntityId(s),
            predicate: PredicateId(p),
            object: EntityId(o),
        });
        true
    }

    pub fn build(self) -> KnowledgeGraph {
        let n = self.entities.len();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for t in &self.triples {
            out[t.subject.index()].push((t.predicate, t.object));
            inc[t.object.index()].push((t.subject, t.predicate));
        }
        KnowledgeGraph {
            entities: self.entities,
            predicates: self.predicates,
            edge_set: self.seen,
            triples: self.triples,
            out,
            inc,
        }
    }
}

/// Directed labeled multigraph with forward and backward adjacency indices.
#[derive(Debug, Clone)]
pub struct KnowledgeGraph {
    entities: Interner,
    predicates: Interner,
    triples: Vec<Triple>,
    edge_set: HashSet<(u32, u32, u32)>,
    out: Vec<Vec<(PredicateId, EntityId)>>,
    inc: Vec<Vec<(EntityId, PredicateId)>>,
}

impl KnowledgeGraph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::new()
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn predicate_count(&self) -> usize {
        self.predicates.len()
    }

    pub fn triple_count(&self) -> usize {
        self.triples.len()
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn entity_id(&self, iri: &str) -> Option<EntityId> {
        self.entities.get(iri).map(EntityId)
    }

    pub fn predicate_id(&self, iri: &str) -> Option<PredicateId> {
        self.predicates.get(iri).map(PredicateId)
    }

    pub fn entity_iri(&self, id: EntityId) -> &str {
        self.entities.name(id.0)
    }

    pub fn predicate_iri(&self, id: PredicateId) -> &str {
        self.predicates.name(id.0)
    }

    /// All entity handles in interning order.
    pub fn entity_ids(&self) -> impl Iterator<Item = EntityId> + '_ {
        (0..self.entities.len() as u32).map(EntityId)
    }

    pub fn entity_iris(&self) -> impl Iterator<Item = &str> {
        self.entities.names.iter().map(|s| s.as_str())
    }

    pub fn predicate_iris(&self) -> impl Iterator<Item = &str> {
        self.predicates.names.iter().map(|s| s.as_str())
    }

    /// Outgoing `(predicate, object)` pairs of `v` in insertion order.
    pub fn out_edges(&self, v: EntityId) -> Result<&[(PredicateId, EntityId)], GraphError> {
        self.out
            .get(v.index())
            .map(|e| e.as_slice())
            .ok_or_else(|| GraphError::UnknownEntity(format!("entity handle {}", v.0)))
    }

    /// Incoming `(subject, predicate)` pairs of `v` in insertion order.
    pub fn in_edges(&self, v: EntityId) -> Result<&[(EntityId, PredicateId)], GraphError> {
        self.inc
            .get(v.index())
            .map(|e| e.as_slice())
            .ok_or_else(|| GraphError::UnknownEntity(format!("entity handle {}", v.0)))
    }

    pub(crate) fn out_slice(&self, v: EntityId) -> &[(PredicateId, EntityId)] {
        &self.out[v.index()]
    }

    pub(crate) fn in_slice(&self, v: EntityId) -> &[(EntityId, PredicateId)] {
        &self.inc[v.index()]
    }

    pub fn has_edge(&self, s: EntityId, p: PredicateId, o: EntityId) -> bool {
        self.edge_set.contains(&(s.0, p.0, o.0))
    }

    /// Edge set as lexical `(subject, predicate, object)` strings; the
    /// order-insensitive notion of graph equality used by round-trip checks.
    pub fn lexical_edge_set(&self) -> HashSet<(String, String, String)> {
        self.triples
            .iter()
            .map(|t| {
                (
                    self.entity_iri(t.subject).to_string(),
                    self.predicate_iri(t.predicate).to_string(),
                    self.entity_iri(t.object).to_string(),
                )
            })
            .collect()
    }

    /// Serializes the graph back to N-Triples, one triple per line in
    /// insertion order. Entities with no edges are not representable in
    /// N-Triples and are omitted.
    pub fn write_ntriples<W: Write>(&self, mut w: W) -> io::Result<()> {
        for t in &self.triples {
            writeln!(
                w,
                "{} {} {} .",
                term_form(self.entity_iri(t.subject)),
                term_form(self.predicate_iri(t.predicate)),
                term_form(self.entity_iri(t.object)),
            )?;
        }
        Ok(())
    }

    pub fn write_ntriples_path(&self, path: &Path) -> io::Result<()> {
        let mut w = util::create_writer(path)?;
        self.write_ntriples(&mut w)?;
        w.flush()
    }
}

impl fmt::Display for KnowledgeGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "KnowledgeGraph {{ |V|={}, |R|={}, |E|={} }}",
            self.entity_count(),
            self.predicate_count(),
            self.triple_count()
        )
    }
}

/// Re-serializes a stored lexical form as an N-Triples term. Blank nodes and
/// literals are stored verbatim; IRIs are stored without angle brackets.
fn term_form(lexical: &str) -> String {
    if lexical.starts_with("_:") || lexical.starts_with('"') {
        lexical.to_string()
    } else {
        format!("<{lexical}>")
    }
}

/// One parsed RDF term.
#[derive(Debug, PartialEq)]
enum Term {
    Iri(String),
    BlankNode(String),
    Literal(String),
}

impl Term {
    /// Lexical form used for interning: IRIs without brackets, blank nodes
    /// and literals verbatim.
    fn into_lexical(self) -> String {
        match self {
            Term::Iri(s) | Term::BlankNode(s) | Term::Literal(s) => s,
        }
    }
}

/// Parses a line-oriented N-Triples stream.
///
/// The supported grammar subset is `<iri> <iri> (<iri>|literal|bnode) .` with
/// `#` comment lines and blank lines. Blank nodes are accepted as subjects
/// and objects and treated as ordinary entities.
pub fn parse_ntriples<R: BufRead>(
    reader: R,
    options: &ParseOptions,
) -> Result<KnowledgeGraph, GraphError> {
    let mut builder = GraphBuilder::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        parse_line(&line, lineno, options, &mut builder)?;
    }
    Ok(builder.build())
}

/// Parses an N-Triples file; `.gz` paths are decompressed transparently.
pub fn parse_ntriples_path(
    path: &Path,
    options: &ParseOptions,
) -> Result<KnowledgeGraph, GraphError> {
    let reader = util::open_reader(path)?;
    parse_ntriples(reader, options)
}

fn parse_line(
    line: &str,
    lineno: usize,
    options: &ParseOptions,
    builder: &mut GraphBuilder,
) -> Result<(), GraphError> {
    let mut scanner = Scanner::new(line, lineno);
    scanner.skip_ws();
    if scanner.at_end() || scanner.peek() == Some('#') {
        return Ok(());
    }

    let subject = scanner.term()?;
    if matches!(subject, Term::Literal(_)) {
        return Err(GraphError::parse(lineno, "literal subject", line));
    }
    scanner.require_ws()?;
    let predicate = scanner.term()?;
    if !matches!(predicate, Term::Iri(_)) {
        return Err(GraphError::parse(lineno, "predicate must be an IRI", line));
    }
    scanner.require_ws()?;
    let object = scanner.term()?;
    scanner.skip_ws();
    if scanner.peek() != Some('.') {
        return Err(GraphError::parse(
            lineno,
            "expected terminating '.'",
            line,
        ));
    }
    scanner.bump();
    scanner.skip_ws();
    if !scanner.at_end() && scanner.peek() != Some('#') {
        return Err(GraphError::parse(
            lineno,
            "unexpected trailing content after '.'",
            line,
        ));
    }

    let predicate = predicate.into_lexical();
    let skip = (options.skip_literals && matches!(object, Term::Literal(_)))
        || options.skip_predicates.contains(&predicate);
    if skip {
        // The subject still becomes a vertex; the edge and object do not.
        builder.ensure_entity(&subject.into_lexical());
        return Ok(());
    }
    builder.add_triple(
        &subject.into_lexical(),
        &predicate,
        &object.into_lexical(),
    );
    Ok(())
}

struct Scanner<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: &'a str,
    lineno: usize,
}

impl<'a> Scanner<'a> {
    fn new(line: &'a str, lineno: usize) -> Self {
        Scanner {
            chars: line.chars().peekable(),
            line,
            lineno,
        }
    }

    fn err(&self, message: impl Into<String>) -> GraphError {
        GraphError::parse(self.lineno, message, self.line)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        self.chars.next()
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ') | Some('\t')) {
            self.bump();
        }
    }

    fn require_ws(&mut self) -> Result<(), GraphError> {
        if !matches!(self.peek(), Some(' ') | Some('\t')) {
            return Err(self.err("expected whitespace between terms"));
        }
        self.skip_ws();
        Ok(())
    }

    fn term(&mut self) -> Result<Term, GraphError> {
        match self.peek() {
            Some('<') => self.iri(),
            Some('_') => self.blank_node(),
            Some('"') => self.literal(),
            Some(c) => Err(self.err(format!("unexpected character {c:?} at start of term"))),
            None => Err(self.err("unexpected end of line, expected a term")),
        }
    }

    fn iri(&mut self) -> Result<Term, GraphError> {
        self.bump(); // consume '<'
        let mut iri = String::new();
        loop {
            match self.bump() {
                Some('>') => break,
                Some('\\') => {
                    // Only \uXXXX / \UXXXXXXXX escapes are legal inside an
                    // IRIREF; keep them as written.
                    let kind = self.bump();
                    let digits = match kind {
                        Some('u') => 4,
                        Some('U') => 8,
                        _ => return Err(self.err("invalid escape in IRI")),
                    };
                    iri.push('\\');
                    iri.push(kind.unwrap());
                    for _ in 0..digits {
                        match self.bump() {
                            Some(c) if c.is_ascii_hexdigit() => iri.push(c),
                            _ => return Err(self.err("invalid unicode escape in IRI")),
                        }
                    }
                }
                Some(c) if c <= ' ' || "<\"{}|^`".contains(c) => {
                    return Err(self.err(format!("illegal character {c:?} in IRI")));
                }
                Some(c) => iri.push(c),
                None => return Err(self.err("unterminated IRI")),
            }
        }
        if !has_scheme(&iri) {
            return Err(self.err(format!("IRI is not absolute (missing scheme): <{iri}>")));
        }
        Ok(Term::Iri(iri))
    }

    fn blank_node(&mut self) -> Result<Term, GraphError> {
        let mut label = String::new();
        label.push(self.bump().unwrap()); // '_'
        if self.peek() != Some(':') {
            return Err(self.err("expected ':' after '_' in blank node label"));
        }
        label.push(self.bump().unwrap());
        while let Some(c) = self.peek() {
            if c == ' ' || c == '\t' {
                break;
            }
            if c == '.' {
                // A '.' can terminate the statement; blank node labels may
                // contain dots but not end with one. Lookahead via clone.
                let mut ahead = self.chars.clone();
                ahead.next();
                match ahead.peek() {
                    Some(' ') | Some('\t') | None => break,
                    _ => {}
                }
            }
            label.push(c);
            self.bump();
        }
        if label.len() <= 2 {
            return Err(self.err("empty blank node label"));
        }
        Ok(Term::BlankNode(label))
    }

    fn literal(&mut self) -> Result<Term, GraphError> {
        let mut raw = String::new();
        raw.push(self.bump().unwrap()); // opening quote
        loop {
            match self.bump() {
                Some('"') => {
                    raw.push('"');
                    break;
                }
                Some('\\') => {
                    raw.push('\\');
                    match self.bump() {
                        Some(c) => raw.push(c),
                        None => return Err(self.err("unterminated escape in literal")),
                    }
                }
                Some(c) => raw.push(c),
                None => return Err(self.err("unterminated literal")),
            }
        }
        // Optional language tag or datatype annotation.
        match self.peek() {
            Some('@') => {
                raw.push(self.bump().unwrap());
                let mut any = false;
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || c == '-' {
                        raw.push(c);
                        self.bump();
                        any = true;
                    } else {
                        break;
                    }
                }
                if !any {
                    return Err(self.err("empty language tag"));
                }
            }
            Some('^') => {
                self.bump();
                if self.bump() != Some('^') {
                    return Err(self.err("expected '^^' before datatype IRI"));
                }
                match self.iri()? {
                    Term::Iri(dt) => {
                        raw.push_str("^^<");
                        raw.push_str(&dt);
                        raw.push('>');
                    }
                    _ => unreachable!(),
                }
            }
            _ => {}
        }
        Ok(Term::Literal(raw))
    }
}

/// True when the string starts with an RFC 3986 scheme followed by ':'.
fn has_scheme(iri: &str) -> bool {
    let mut chars = iri.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    for c in chars {
        if c == ':' {
            return true;
        }
        if !(c.is_ascii_alphanumeric() || c == '+' || c == '-' || c == '.') {
            return false;
        }
    }
    false
}

/// Builds a random multigraph for property tests: `edges` draws over `nodes`
/// vertices and roughly `nodes / 8` predicates (duplicates collapse).
#[cfg(test)]
pub(crate) fn random_graph(seed: u64, nodes: usize, edges: usize) -> KnowledgeGraph {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::new();
    let preds = 1 + (nodes / 8).max(1);
    for _ in 0..edges {
        let s = rng.random_range(0..nodes);
        let o = rng.random_range(0..nodes);
        let p = rng.random_range(0..preds);
        b.add_triple(&format!("s:n{s}"), &format!("s:p{p}"), &format!("s:n{o}"));
    }
    b.build()
}
