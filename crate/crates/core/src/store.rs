//! Embedding persistence and vector queries.
//!
//! Vectors are stored in the word2vec text format: a `count dim` header line
//! followed by one `token v1 ... v_dim` line per token. Values are written
//! with Rust's shortest round-trip float formatting, so a save/load cycle
//! reproduces the store exactly and a second save is byte-identical.
//!
//! The store is immutable after construction; queries are read-only and safe
//! to run concurrently. Lookups are exact brute force, which is both precise
//! and fast at the vocabulary sizes this toolkit targets.

use std::collections::HashMap;
use std::io::{self, BufRead, Write};
use std::path::Path;

use thiserror::Error;

use crate::util;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("unknown token {token:?}{}", hint_suffix(.hints))]
    UnknownToken { token: String, hints: Vec<String> },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("invalid store: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn hint_suffix(hints: &[String]) -> String {
    if hints.is_empty() {
        String::new()
    } else {
        format!(" (closest tokens: {})", hints.join(", "))
    }
}

/// Immutable token-to-vector map with fixed dimension and file-order token
/// listing.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingStore {
    dim: usize,
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f32>,
    norms: Vec<f64>,
}

impl EmbeddingStore {
    /// Builds a store from `(token, vector)` rows, validating dimensions,
    /// finiteness, and token uniqueness.
    pub fn new(dim: usize, rows: Vec<(String, Vec<f32>)>) -> Result<Self, StoreError> {
        if dim == 0 {
            return Err(StoreError::Invalid("dimension must be positive".into()));
        }
        let mut tokens = Vec::with_capacity(rows.len());
        let mut index = HashMap::with_capacity(rows.len());
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (token, vector) in rows {
            if vector.len() != dim {
                return Err(StoreError::Invalid(format!(
                    "vector for {token:?} has length {}, expected {dim}",
                    vector.len()
                )));
            }
            if vector.iter().any(|x| !x.is_finite()) {
                return Err(StoreError::Invalid(format!(
                    "vector for {token:?} contains a non-finite value"
                )));
            }
            if index.insert(token.clone(), tokens.len()).is_some() {
                return Err(StoreError::Invalid(format!("duplicate token {token:?}")));
            }
            tokens.push(token);
            data.extend_from_slice(&vector);
        }
        let norms = (0..tokens.len())
            .map(|i| norm_f64(&data[i * dim..(i + 1) * dim]))
            .collect();
        Ok(EmbeddingStore {
            dim,
            tokens,
            index,
            data,
            norms,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Tokens in file (insertion) order.
    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|s| s.as_str())
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn vector(&self, token: &str) -> Option<&[f32]> {
        self.index.get(token).map(|&i| self.row(i))
    }

    fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    fn lookup(&self, token: &str) -> Result<usize, StoreError> {
        self.index
            .get(token)
            .copied()
            .ok_or_else(|| StoreError::UnknownToken {
                token: token.to_string(),
                hints: self.lexical_hints(token, 3),
            })
    }

    /// Closest tokens by edit distance, used to make unknown-token errors
    /// actionable.
    fn lexical_hints(&self, query: &str, k: usize) -> Vec<String> {
        let mut scored: Vec<(usize, &String)> = self
            .tokens
            .iter()
            .map(|t| (levenshtein(query, t), t))
            .collect();
        scored.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(b.1)));
        scored.into_iter().take(k).map(|(_, t)| t.clone()).collect()
    }

    /// Cosine similarity between two stored tokens.
    pub fn cosine_between(&self, a: &str, b: &str) -> Result<f64, StoreError> {
        let ia = self.lookup(a)?;
        let ib = self.lookup(b)?;
        Ok(self.cosine_rows(ia, ib))
    }

    fn cosine_rows(&self, a: usize, b: usize) -> f64 {
        let na = self.norms[a];
        let nb = self.norms[b];
        if na == 0.0 || nb == 0.0 {
            return 0.0;
        }
        dot_f64(self.row(a), self.row(b)) / (na * nb)
    }

    /// Top-k tokens by descending cosine to `query`, excluding the query
    /// itself. Exact ties are broken by lexicographic token order.
    pub fn nearest(&self, query: &str, k: usize) -> Result<Vec<(&str, f64)>, StoreError> {
        let qi = self.lookup(query)?;
        let qrow: Vec<f64> = self.row(qi).iter().map(|&x| x as f64).collect();
        Ok(self.nearest_to_vector(&qrow, k, &[qi]))
    }

    /// Top-k tokens by descending cosine to an arbitrary query vector,
    /// skipping `exclude` rows. Ties break lexicographically.
    pub fn nearest_to_vector(&self, query: &[f64], k: usize, exclude: &[usize]) -> Vec<(&str, f64)> {
        assert_eq!(query.len(), self.dim, "query vector dimension mismatch");
        let qnorm = query.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut scored: Vec<(usize, f64)> = Vec::with_capacity(self.tokens.len());
        for i in 0..self.tokens.len() {
            if exclude.contains(&i) {
                continue;
            }
            let score = if qnorm == 0.0 || self.norms[i] == 0.0 {
                0.0
            } else {
                let mut dot = 0.0;
                for (x, y) in self.row(i).iter().zip(query) {
                    dot += *x as f64 * *y;
                }
                dot / (self.norms[i] * qnorm)
            };
            scored.push((i, score));
        }
        scored.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .expect("cosine scores are finite")
                .then_with(|| self.tokens[a.0].cmp(&self.tokens[b.0]))
        });
        scored
            .into_iter()
            .take(k)
            .map(|(i, s)| (self.tokens[i].as_str(), s))
            .collect()
    }

    /// Resolves `a : a_star :: b : ?` by ranking every token outside the
    /// query triple by cosine to `vec(a_star) - vec(a) + vec(b)`.
    pub fn analogy(
        &self,
        a: &str,
        a_star: &str,
        b: &str,
        k: usize,
    ) -> Result<Vec<(&str, f64)>, StoreError> {
        let ia = self.lookup(a)?;
        let ia_star = self.lookup(a_star)?;
        let ib = self.lookup(b)?;
        let target: Vec<f64> = (0..self.dim)
            .map(|j| {
                self.row(ia_star)[j] as f64 - self.row(ia)[j] as f64 + self.row(ib)[j] as f64
            })
            .collect();
        Ok(self.nearest_to_vector(&target, k, &[ia, ia_star, ib]))
    }

    /// Writes the store in word2vec text format.
    pub fn save_to<W: Write>(&self, mut w: W) -> Result<(), StoreError> {
        writeln!(w, "{} {}", self.tokens.len(), self.dim)?;
        for (i, token) in self.tokens.iter().enumerate() {
            w.write_all(token.as_bytes())?;
            for x in self.row(i) {
                write!(w, " {x}")?;
            }
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<(), StoreError> {
        let mut w = util::create_writer(path)?;
        self.save_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    /// Parses word2vec text format, validating the header against the body.
    pub fn load_from<R: BufRead>(reader: R) -> Result<Self, StoreError> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| StoreError::Format {
                line: 1,
                message: "empty file, expected 'count dim' header".into(),
            })??;
        let mut parts = header.split_whitespace();
        let count: usize = parse_header_field(parts.next(), 1, "token count")?;
        let dim: usize = parse_header_field(parts.next(), 1, "dimension")?;
        if parts.next().is_some() {
            return Err(StoreError::Format {
                line: 1,
                message: "header must be exactly 'count dim'".into(),
            });
        }
        let mut rows = Vec::with_capacity(count);
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            let line = line?;
            if line.is_empty() {
                continue;
            }
            if rows.len() == count {
                return Err(StoreError::Format {
                    line: lineno,
                    message: format!("more vector lines than the declared count {count}"),
                });
            }
            let mut fields = line.split(' ');
            let token = fields
                .next()
                .filter(|t| !t.is_empty())
                .ok_or_else(|| StoreError::Format {
                    line: lineno,
                    message: "missing token".into(),
                })?
                .to_string();
            let mut vector = Vec::with_capacity(dim);
            for field in fields {
                let value: f32 = field.parse().map_err(|_| StoreError::Format {
                    line: lineno,
                    message: format!("invalid float {field:?}"),
                })?;
                if !value.is_finite() {
                    return Err(StoreError::Format {
                        line: lineno,
                        message: format!("non-finite value {field:?}"),
                    });
                }
                vector.push(value);
            }
            if vector.len() != dim {
                return Err(StoreError::Format {
                    line: lineno,
                    message: format!("expected {dim} values, found {}", vector.len()),
                });
            }
            rows.push((token, vector));
        }
        if rows.len() != count {
            return Err(StoreError::Format {
                line: rows.len() + 1,
                message: format!("header declares {count} tokens, body has {}", rows.len()),
            });
        }
        let mut seen = HashMap::new();
        for (i, (token, _)) in rows.iter().enumerate() {
            if let Some(first) = seen.insert(token.clone(), i + 2) {
                return Err(StoreError::Format {
                    line: i + 2,
                    message: format!("duplicate token {token:?} (first at line {first})"),
                });
            }
        }
        Self::new(dim, rows)
    }

    pub fn load(path: &Path) -> Result<Self, StoreError> {
        let reader = util::open_reader(path)?;
        Self::load_from(reader)
    }
}

fn parse_header_field(
    field: Option<&str>,
    line: usize,
    what: &str,
) -> Result<usize, StoreError> {
    field
        .and_then(|f| f.parse().ok())
        .ok_or_else(|| StoreError::Format {
            line,
            message: format!("invalid or missing {what} in header"),
        })
}

/// Cosine similarity of two equal-length vectors, accumulated in f64.
/// Zero-norm inputs yield 0.0.
///
/// Panics if the vectors differ in length; that is a caller bug.
pub fn cosine(u: &[f32], v: &[f32]) -> f64 {
    cosine_flagged(u, v).0
}

/// Like [`cosine`], additionally reporting whether a zero-norm input forced
/// the defined-as-zero fallback.
pub fn cosine_flagged(u: &[f32], v: &[f32]) -> (f64, bool) {
    assert_eq!(u.len(), v.len(), "cosine of vectors with unequal dimensions");
    let nu = norm_f64(u);
    let nv = norm_f64(v);
    if nu == 0.0 || nv == 0.0 {
        return (0.0, true);
    }
    (dot_f64(u, v) / (nu * nv), false)
}

fn dot_f64(u: &[f32], v: &[f32]) -> f64 {
    u.iter().zip(v).map(|(&x, &y)| x as f64 * y as f64).sum()
}

fn norm_f64(v: &[f32]) -> f64 {
    v.iter().map(|&x| (x as f64) * (x as f64)).sum::<f64>().sqrt()
}

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
