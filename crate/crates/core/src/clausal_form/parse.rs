use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::inventory::unquote;
use super::{ClausalDrs, Clause, ClfError, Concept, Head, Inventory, Span, SymbolClass, Term, TokenContext};

/// Result of parsing one blank-line-separated block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedDocument {
    pub doc_id: String,
    /// 1-based line number where the block starts.
    pub first_line: usize,
    /// 1-based line number of every clause line, in order.
    pub clause_lines: Vec<usize>,
    pub result: Result<ClausalDrs, ClfError>,
}

/// Parses with the bundled inventory; fails on the first bad document.
pub fn parse_clf(text: &str) -> Result<Vec<ClausalDrs>, ClfError> {
    parse_clf_with(text, &Inventory::bundled())
}

pub fn parse_clf_with(text: &str, inventory: &Inventory) -> Result<Vec<ClausalDrs>, ClfError> {
    parse_clf_documents(text, inventory).into_iter().map(|d| d.result).collect()
}

/// Parses every document independently so that one bad document does not
/// hide the others.
pub fn parse_clf_documents(text: &str, inventory: &Inventory) -> Vec<ParsedDocument> {
    let mut docs = Vec::new();
    let mut block: Vec<(usize, &str)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            if !block.is_empty() {
                push_block(&mut docs, &block, inventory);
                block.clear();
            }
        } else {
            block.push((i + 1, line));
        }
    }
    if !block.is_empty() {
        push_block(&mut docs, &block, inventory);
    }
    docs
}

fn push_block(docs: &mut Vec<ParsedDocument>, block: &[(usize, &str)], inventory: &Inventory) {
    let mut doc_id = None;
    let mut raw_text = None;
    let mut clause_lines = Vec::new();
    let mut clauses = Vec::new();
    let mut error = None;
    for &(line_no, line) in block {
        let trimmed = line.trim();
        if trimmed.starts_with('%') {
            if let Some(v) = header(trimmed, "id:") {
                doc_id = Some(v.to_string());
            } else if let Some(v) = header(trimmed, "text:") {
                raw_text = Some(v.to_string());
            }
            continue;
        }
        clause_lines.push(line_no);
        if error.is_none() {
            match parse_clause(trimmed, line_no, inventory) {
                Ok(c) => clauses.push(c),
                Err(e) => error = Some(e),
            }
        }
    }
    if clause_lines.is_empty() && doc_id.is_none() {
        return;
    }
    let doc_id = doc_id.unwrap_or_else(|| format!("doc{}", docs.len()));
    let result = match error {
        Some(e) => Err(e),
        None => check_single_introduction(&doc_id, &clauses).map(|_| ClausalDrs::new(doc_id.clone(), raw_text, clauses)),
    };
    docs.push(ParsedDocument { doc_id, first_line: block[0].0, clause_lines, result });
}

fn header<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    let rest = line.strip_prefix("%%%")?.trim_start();
    rest.strip_prefix(key).map(str::trim)
}

fn check_single_introduction(doc_id: &str, clauses: &[Clause]) -> Result<(), ClfError> {
    let mut seen = BTreeSet::new();
    for c in clauses {
        if let (Head::Ref, [Term::Referent(r)]) = (&c.head, c.args.as_slice()) {
            if !seen.insert(r.as_str()) {
                return Err(ClfError::IllFormed { doc_id: doc_id.to_string(), reason: format!("{r} is introduced more than once") });
            }
        }
    }
    Ok(())
}

/// Splits a line into whitespace-separated fields and the comment after the
/// first `%` that is not inside a quoted constant.
fn split_line(line: &str) -> Result<(Vec<&str>, Option<&str>), String> {
    let mut fields = Vec::new();
    let mut start = None;
    let mut in_quotes = false;
    for (i, ch) in line.char_indices() {
        match ch {
            '"' => {
                if start.is_none() {
                    start = Some(i);
                }
                in_quotes = !in_quotes;
            }
            '%' if !in_quotes => {
                if let Some(s) = start.take() {
                    fields.push(&line[s..i]);
                }
                return Ok((fields, Some(&line[i + 1..])));
            }
            c if c.is_whitespace() && !in_quotes => {
                if let Some(s) = start.take() {
                    fields.push(&line[s..i]);
                }
            }
            _ => {
                if start.is_none() {
                    start = Some(i);
                }
            }
        }
    }
    if in_quotes {
        return Err("unterminated quoted constant".into());
    }
    if let Some(s) = start {
        fields.push(&line[s..]);
    }
    Ok((fields, None))
}

fn parse_span(tok: &str) -> Option<Span> {
    let (a, b) = tok.split_once(':')?;
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|c| c.is_ascii_digit());
    if digits(a) && digits(b) {
        Some(Span::new(a.parse().ok()?, b.parse().ok()?))
    } else {
        None
    }
}

fn parse_comment(comment: &str) -> (Option<Span>, Option<String>) {
    let mut anchor = None;
    let mut rest = Vec::new();
    for tok in comment.split_whitespace() {
        match parse_span(tok) {
            Some(span) if anchor.is_none() => anchor = Some(span),
            _ => rest.push(tok),
        }
    }
    let residual = if rest.is_empty() { None } else { Some(rest.join(" ")) };
    (anchor, residual)
}

fn parse_clause(line: &str, line_no: usize, inventory: &Inventory) -> Result<Clause, ClfError> {
    let malformed = |reason: String| ClfError::MalformedClause { line: line_no, reason };
    let (fields, comment) = split_line(line).map_err(malformed)?;
    if fields.len() < 3 {
        return Err(malformed(format!("expected at least 3 fields, found {}", fields.len())));
    }
    let classify = |tok: &str, ctx| {
        inventory.classify(tok, ctx).map_err(|e| match e {
            ClfError::Unclassifiable(t) => malformed(format!("unclassifiable token `{t}`")),
            other => other,
        })
    };
    classify(fields[0], TokenContext::BoxField)?;
    let head_tok = fields[1];
    let (head, arg_toks) = match classify(head_tok, TokenContext::Head { next: fields.get(2).copied() })? {
        SymbolClass::RefIntroducer => (Head::Ref, &fields[2..]),
        SymbolClass::DrsOperator => (Head::Operator(head_tok.to_string()), &fields[2..]),
        SymbolClass::DiscourseRelation => (Head::Relation(head_tok.to_string()), &fields[2..]),
        SymbolClass::ComparisonRelation => (Head::Comparison(head_tok.to_string()), &fields[2..]),
        SymbolClass::SemanticRole => (Head::Role(head_tok.to_string()), &fields[2..]),
        SymbolClass::Concept => {
            let sense = unquote(fields[2]).unwrap_or_default();
            (Head::Concept(Concept::new(head_tok, sense)), &fields[3..])
        }
        other => return Err(malformed(format!("`{head_tok}` ({other:?}) cannot head a clause"))),
    };
    if arg_toks.is_empty() || arg_toks.len() > 2 {
        return Err(malformed(format!("{} takes 1 or 2 arguments, found {}", head.symbol(), arg_toks.len())));
    }
    let mut args = Vec::with_capacity(arg_toks.len());
    for &tok in arg_toks {
        args.push(match classify(tok, TokenContext::Argument)? {
            SymbolClass::BoxLabel => Term::BoxLabel(tok.to_string()),
            SymbolClass::DiscourseReferent => Term::Referent(tok.to_string()),
            _ => Term::Constant(unquote(tok).unwrap_or(tok).to_string()),
        });
    }
    let mut clause = Clause::new(fields[0], head, args);
    if let Some(reason) = clause.arity_problem() {
        return Err(malformed(reason));
    }
    if let Some(c) = comment {
        let (anchor, residual) = parse_comment(c);
        clause.anchor = anchor;
        clause.comment = residual;
    }
    Ok(clause)
}

/// Writes documents back to clausal form with `%%% id:` / `%%% text:`
/// headers and normalized spacing.
pub fn serialize_clf(docs: &[ClausalDrs]) -> String {
    let mut out = String::new();
    for (i, d) in docs.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "%%% id: {}", d.doc_id());
        if let Some(t) = d.raw_text() {
            let _ = writeln!(out, "%%% text: {t}");
        }
        for c in d.clauses() {
            let _ = writeln!(out, "{c}");
        }
    }
    out
}
