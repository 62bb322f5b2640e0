//! Gold file formats.
//!
//! - labels / targets: tab-separated `token<TAB>label` or `token<TAB>number`
//! - rankings: blank-line separated blocks, first line the anchor, following
//!   lines the comparison entities from most to least related
//! - analogy quads: four whitespace-separated tokens per line
//! - document pairs: `tokenA:w tokenA:w | tokenB:w | gold_score`
//!
//! Lines starting with `#` are comments in every format.

use std::io::{BufRead, Write};

use super::{AnalogyQuad, DocumentPair, EvalError, GoldLabels, GoldRanking, GoldTargets};

fn fail(line: usize, message: impl Into<String>) -> EvalError {
    EvalError::GoldFormat {
        line,
        message: message.into(),
    }
}

fn is_comment(line: &str) -> bool {
    line.trim_start().starts_with('#')
}

pub fn read_labels<R: BufRead>(reader: R) -> Result<GoldLabels, EvalError> {
    let mut gold = GoldLabels::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() || is_comment(&line) {
            continue;
        }
        let (token, label) = line
            .split_once('\t')
            .ok_or_else(|| fail(i + 1, "expected token<TAB>label"))?;
        if gold
            .labels
            .insert(token.to_string(), label.trim().to_string())
            .is_some()
        {
            return Err(fail(i + 1, format!("duplicate token {token:?}")));
        }
    }
    Ok(gold)
}

pub fn write_labels<W: Write>(gold: &GoldLabels, mut w: W) -> Result<(), EvalError> {
    for (token, label) in &gold.labels {
        writeln!(w, "{token}\t{label}")?;
    }
    Ok(())
}

pub fn read_targets<R: BufRead>(reader: R) -> Result<GoldTargets, EvalError> {
    let mut gold = GoldTargets::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() || is_comment(&line) {
            continue;
        }
        let (token, value) = line
            .split_once('\t')
            .ok_or_else(|| fail(i + 1, "expected token<TAB>number"))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| fail(i + 1, format!("invalid number {value:?}")))?;
        if gold.targets.insert(token.to_string(), value).is_some() {
            return Err(fail(i + 1, format!("duplicate token {token:?}")));
        }
    }
    Ok(gold)
}

pub fn write_targets<W: Write>(gold: &GoldTargets, mut w: W) -> Result<(), EvalError> {
    for (token, value) in &gold.targets {
        writeln!(w, "{token}\t{value}")?;
    }
    Ok(())
}

pub fn read_rankings<R: BufRead>(reader: R) -> Result<Vec<GoldRanking>, EvalError> {
    let mut rankings = Vec::new();
    let mut block: Vec<String> = Vec::new();
    let mut block_start = 0usize;
    let mut flush = |block: &mut Vec<String>, line: usize| -> Result<(), EvalError> {
        if block.is_empty() {
            return Ok(());
        }
        if block.len() < 3 {
            return Err(fail(
                line,
                "ranking block needs an anchor plus at least 2 comparison entities",
            ));
        }
        let anchor = block.remove(0);
        rankings.push(GoldRanking::new(anchor, std::mem::take(block))?);
        Ok(())
    };
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if is_comment(&line) {
            continue;
        }
        let trimmed = line.trim();
        if trimmed.is_empty() {
            flush(&mut block, block_start + 1)?;
            continue;
        }
        if block.is_empty() {
            block_start = i;
        }
        block.push(trimmed.to_string());
    }
    flush(&mut block, block_start + 1)?;
    Ok(rankings)
}

pub fn write_rankings<W: Write>(rankings: &[GoldRanking], mut w: W) -> Result<(), EvalError> {
    for (i, r) in rankings.iter().enumerate() {
        if i > 0 {
            writeln!(w)?;
        }
        writeln!(w, "{}", r.anchor)?;
        for t in &r.ranked {
            writeln!(w, "{t}")?;
        }
    }
    Ok(())
}

pub fn read_quads<R: BufRead>(reader: R) -> Result<Vec<AnalogyQuad>, EvalError> {
    let mut quads = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() || is_comment(&line) {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 4 {
            return Err(fail(
                i + 1,
                format!("expected 4 tokens, found {}", parts.len()),
            ));
        }
        quads.push(AnalogyQuad::new(
            parts[0].to_string(),
            parts[1].to_string(),
            parts[2].to_string(),
            parts[3].to_string(),
        )?);
    }
    Ok(quads)
}

pub fn write_quads<W: Write>(quads: &[AnalogyQuad], mut w: W) -> Result<(), EvalError> {
    for q in quads {
        writeln!(w, "{} {} {} {}", q.a, q.a_star, q.b, q.b_star)?;
    }
    Ok(())
}

pub fn read_document_pairs<R: BufRead>(reader: R) -> Result<Vec<DocumentPair>, EvalError> {
    let mut pairs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() || is_comment(&line) {
            continue;
        }
        let parts: Vec<&str> = line.split('|').collect();
        if parts.len() != 3 {
            return Err(fail(
                i + 1,
                "expected `docA_tokens | docB_tokens | gold_score`",
            ));
        }
        let parse_doc = |part: &str| -> Result<Vec<(String, f64)>, EvalError> {
            part.split_whitespace()
                .map(|entry| {
                    let (token, weight) = entry
                        .rsplit_once(':')
                        .ok_or_else(|| fail(i + 1, format!("entry {entry:?} lacks :weight")))?;
                    let weight: f64 = weight
                        .parse()
                        .map_err(|_| fail(i + 1, format!("invalid weight in {entry:?}")))?;
                    Ok((token.to_string(), weight))
                })
                .collect()
        };
        let doc_a = parse_doc(parts[0])?;
        let doc_b = parse_doc(parts[1])?;
        let gold: f64 = parts[2]
            .trim()
            .parse()
            .map_err(|_| fail(i + 1, format!("invalid gold score {:?}", parts[2].trim())))?;
        pairs.push(DocumentPair::new(doc_a, doc_b, gold)?);
    }
    Ok(pairs)
}

pub fn write_document_pairs<W: Write>(
    pairs: &[DocumentPair],
    mut w: W,
) -> Result<(), EvalError> {
    for p in pairs {
        let side = |doc: &[(String, f64)]| {
            doc.iter()
                .map(|(t, wt)| format!("{t}:{wt}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(w, "{} | {} | {}", side(&p.doc_a), side(&p.doc_b), p.gold)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    #[test]
    fn labels_round_trip() {
        let input = "# classes\nsyn:a\tA\nsyn:b\tB\n";
        let gold = read_labels(Cursor::new(input)).unwrap();
        assert_eq!(gold.labels["syn:a"], "A");
        let mut out = Vec::new();
        write_labels(&gold, &mut out).unwrap();
        let again = read_labels(Cursor::new(out)).unwrap();
        assert_eq!(gold, again);
    }

    #[test]
    fn labels_duplicate_rejected_with_line() {
        let err = read_labels(Cursor::new("syn:a\tA\nsyn:a\tB\n")).unwrap_err();
        assert!(matches!(err, EvalError::GoldFormat { line: 2, .. }), "{err}");
    }

    #[test]
    fn targets_parse_numbers() {
        let gold = read_targets(Cursor::new("syn:a\t1.5\nsyn:b\t-2\n")).unwrap();
        assert_eq!(gold.targets["syn:a"], 1.5);
        assert_eq!(gold.targets["syn:b"], -2.0);
        assert!(read_targets(Cursor::new("syn:a\tnope\n")).is_err());
    }

    #[test]
    fn rankings_blocks_round_trip() {
        let input = "syn:anchor1\nsyn:r1\nsyn:r2\n\nsyn:anchor2\nsyn:r3\nsyn:r4\nsyn:r5\n";
        let rankings = read_rankings(Cursor::new(input)).unwrap();
        assert_eq!(rankings.len(), 2);
        assert_eq!(rankings[0].anchor, "syn:anchor1");
        assert_eq!(rankings[1].ranked.len(), 3);
        let mut out = Vec::new();
        write_rankings(&rankings, &mut out).unwrap();
        let again = read_rankings(Cursor::new(out)).unwrap();
        assert_eq!(rankings, again);
    }

    #[test]
    fn short_ranking_block_rejected() {
        let err = read_rankings(Cursor::new("syn:anchor\nsyn:only\n")).unwrap_err();
        assert!(matches!(err, EvalError::GoldFormat { .. }), "{err}");
    }

    #[test]
    fn quads_round_trip_and_arity_check() {
        let quads = read_quads(Cursor::new("syn:a syn:b syn:c syn:d\n")).unwrap();
        assert_eq!(quads.len(), 1);
        let mut out = Vec::new();
        write_quads(&quads, &mut out).unwrap();
        assert_eq!(read_quads(Cursor::new(out)).unwrap(), quads);
        let err = read_quads(Cursor::new("syn:a syn:b syn:c\n")).unwrap_err();
        assert!(matches!(err, EvalError::GoldFormat { line: 1, .. }), "{err}");
    }

    #[test]
    fn document_pairs_round_trip() {
        // IRIs contain colons; the weight is everything after the last one.
        let input = "syn:e1:2 syn:e2:1.5 | syn:e3:1 | 0.75\n";
        let pairs = read_document_pairs(Cursor::new(input)).unwrap();
        assert_eq!(pairs[0].doc_a.len(), 2);
        assert_eq!(pairs[0].doc_a[0], ("syn:e1".to_string(), 2.0));
        assert_eq!(pairs[0].doc_b[0], ("syn:e3".to_string(), 1.0));
        assert_eq!(pairs[0].gold, 0.75);
        let mut out = Vec::new();
        write_document_pairs(&pairs, &mut out).unwrap();
        assert_eq!(read_document_pairs(Cursor::new(out)).unwrap(), pairs);
    }

    #[test]
    fn document_pair_bad_weight_rejected() {
        let err = read_document_pairs(Cursor::new("syn:e1 | syn:e2:1 | 0.5\n")).unwrap_err();
        assert!(matches!(err, EvalError::GoldFormat { line: 1, .. }), "{err}");
    }
}
