//! The `.sft` rule file format.
//!
//! ```text
//! # hard squares
//! [alphabet]
//! zero one
//! [horizontal]
//! mode=forbidden
//! one one
//! [vertical]
//! mode=forbidden
//! one one
//! [meta]
//! generator=hard-square
//! ```
//!
//! Pair sections default to `mode=allowed`.  An alphabet section consisting
//! of the single directive `mode=empty` denotes the empty SFT.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::sft::{is_valid_name, Alphabet, Relation, Sft2d, Sym};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {col}: unknown symbol {name:?}")]
    UnknownSymbol { line: usize, col: usize, name: String },
    #[error("line {line}: duplicate section [{name}]")]
    DuplicateSection { line: usize, name: String },
    #[error("line {line}: unknown section [{name}]")]
    UnknownSection { line: usize, name: String },
    #[error("line {line}, column {col}: {msg}")]
    Malformed { line: usize, col: usize, msg: String },
    #[error("line {line}, column {col}: duplicate symbol {name:?}")]
    DuplicateSymbol { line: usize, col: usize, name: String },
    #[error("missing [alphabet] section or alphabet is empty")]
    EmptyAlphabet,
    #[error("too many symbols")]
    TooManySymbols,
}

impl ParseError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::UnknownSymbol { line, .. }
            | ParseError::DuplicateSection { line, .. }
            | ParseError::UnknownSection { line, .. }
            | ParseError::Malformed { line, .. }
            | ParseError::DuplicateSymbol { line, .. } => Some(*line),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Alphabet,
    Horizontal,
    Vertical,
    Meta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Allowed,
    Forbidden,
}

/// A pair as written in the file, with its source position.
#[derive(Debug, Clone)]
struct PairItem {
    line: usize,
    cols: (usize, usize),
    names: (String, String),
}

/// Parsed document before name resolution.
#[derive(Debug, Default)]
struct RulesetDocument {
    symbols: Vec<(usize, usize, String)>,
    empty_directive: bool,
    h: Vec<PairItem>,
    v: Vec<PairItem>,
    h_mode: Option<Mode>,
    v_mode: Option<Mode>,
    meta: Vec<String>,
}

/// Tokens of a line with their 1-based starting columns.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(move |(s, t)| (line[..s].chars().count() + 1, t))
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn scan(text: &str) -> Result<RulesetDocument, ParseError> {
    let mut doc = RulesetDocument::default();
    let mut section: Option<Section> = None;
    let mut seen: HashSet<&'static str> = HashSet::new();
    let mut section_has_items = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw);
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('[') {
            if !trimmed.ends_with(']') {
                return Err(ParseError::Malformed {
                    line: line_no,
                    col: 1,
                    msg: "unterminated section header".into(),
                });
            }
            let name = trimmed[1..trimmed.len() - 1].trim();
            let (sec, key) = match name {
                "alphabet" => (Section::Alphabet, "alphabet"),
                "horizontal" => (Section::Horizontal, "horizontal"),
                "vertical" => (Section::Vertical, "vertical"),
                "meta" => (Section::Meta, "meta"),
                other => {
                    return Err(ParseError::UnknownSection {
                        line: line_no,
                        name: other.to_string(),
                    })
                }
            };
            if !seen.insert(key) {
                return Err(ParseError::DuplicateSection {
                    line: line_no,
                    name: key.into(),
                });
            }
            section = Some(sec);
            section_has_items = false;
            continue;
        }
        let Some(sec) = section else {
            return Err(ParseError::Malformed {
                line: line_no,
                col: 1,
                msg: "content before any section header".into(),
            });
        };
        match sec {
            Section::Meta => doc.meta.push(trimmed.to_string()),
            Section::Alphabet => {
                if trimmed == "mode=empty" {
                    if section_has_items {
                        return Err(ParseError::Malformed {
                            line: line_no,
                            col: 1,
                            msg: "mode=empty must be the only alphabet entry".into(),
                        });
                    }
                    doc.empty_directive = true;
                    section_has_items = true;
                    continue;
                }
                if doc.empty_directive {
                    return Err(ParseError::Malformed {
                        line: line_no,
                        col: 1,
                        msg: "symbols listed after mode=empty".into(),
                    });
                }
                for (col, tok) in tokens(line) {
                    if !is_valid_name(tok) {
                        return Err(ParseError::Malformed {
                            line: line_no,
                            col,
                            msg: format!("invalid symbol name {tok:?}"),
                        });
                    }
                    doc.symbols.push((line_no, col, tok.to_string()));
                }
                section_has_items = true;
            }
            Section::Horizontal | Section::Vertical => {
                let (mode, items) = if sec == Section::Horizontal {
                    (&mut doc.h_mode, &mut doc.h)
                } else {
                    (&mut doc.v_mode, &mut doc.v)
                };
                if let Some(rest) = trimmed.strip_prefix("mode=") {
                    if section_has_items {
                        return Err(ParseError::Malformed {
                            line: line_no,
                            col: 1,
                            msg: "mode directive must open the section".into(),
                        });
                    }
                    *mode = Some(match rest {
                        "allowed" => Mode::Allowed,
                        "forbidden" => Mode::Forbidden,
                        _ => {
                            return Err(ParseError::Malformed {
                                line: line_no,
                                col: 6,
                                msg: format!("unknown mode {rest:?}"),
                            })
                        }
                    });
                    section_has_items = true;
                    continue;
                }
                let toks: Vec<(usize, &str)> = tokens(line).collect();
                if toks.len() != 2 {
                    return Err(ParseError::Malformed {
                        line: line_no,
                        col: toks.get(2).map_or(1, |t| t.0),
                        msg: format!("expected a pair of symbols, found {} tokens", toks.len()),
                    });
                }
                items.push(PairItem {
                    line: line_no,
                    cols: (toks[0].0, toks[1].0),
                    names: (toks[0].1.to_string(), toks[1].1.to_string()),
                });
                section_has_items = true;
            }
        }
    }
    Ok(doc)
}

/// Parse `.sft` text into an SFT.
pub fn parse(text: &str) -> Result<Sft2d, ParseError> {
    let doc = scan(text)?;
    if doc.empty_directive {
        if !doc.h.is_empty() || !doc.v.is_empty() {
            let item = doc.h.first().or(doc.v.first()).unwrap();
            return Err(ParseError::UnknownSymbol {
                line: item.line,
                col: item.cols.0,
                name: item.names.0.clone(),
            });
        }
        return Ok(Sft2d::empty().with_metadata(doc.meta.join("\n")));
    }
    if doc.symbols.is_empty() {
        return Err(ParseError::EmptyAlphabet);
    }
    let mut index: HashMap<&str, Sym> = HashMap::with_capacity(doc.symbols.len());
    for (i, (line, col, name)) in doc.symbols.iter().enumerate() {
        if i >= crate::sft::MAX_SYMBOLS {
            return Err(ParseError::TooManySymbols);
        }
        if index.insert(name.as_str(), i as Sym).is_some() {
            return Err(ParseError::DuplicateSymbol {
                line: *line,
                col: *col,
                name: name.clone(),
            });
        }
    }
    let n = doc.symbols.len();
    let build = |items: &[PairItem], mode: Option<Mode>| -> Result<Relation, ParseError> {
        let mut listed = Relation::empty(n);
        for it in items {
            let look = |name: &str, col: usize| {
                index.get(name).copied().ok_or_else(|| ParseError::UnknownSymbol {
                    line: it.line,
                    col,
                    name: name.to_string(),
                })
            };
            let a = look(&it.names.0, it.cols.0)?;
            let b = look(&it.names.1, it.cols.1)?;
            listed.insert(a, b);
        }
        Ok(match mode.unwrap_or(Mode::Allowed) {
            Mode::Allowed => listed,
            Mode::Forbidden => Relation::from_fn(n, |a, b| !listed.contains(a, b)),
        })
    };
    let h = build(&doc.h, doc.h_mode)?;
    let v = build(&doc.v, doc.v_mode)?;
    let names = doc.symbols.into_iter().map(|(_, _, s)| s).collect();
    let alphabet = Alphabet::new(names).map_err(|_| ParseError::TooManySymbols)?;
    Ok(Sft2d::new(alphabet, h, v)
        .expect("relations sized from alphabet")
        .with_metadata(doc.meta.join("\n")))
}

fn write_pairs(out: &mut String, header: &str, x: &Sft2d, rel: &Relation) {
    let n = x.num_symbols();
    let allowed = rel.count();
    let forbidden = n * n - allowed;
    let _ = writeln!(out, "[{header}]");
    let allowed_mode = allowed <= forbidden;
    out.push_str(if allowed_mode {
        "mode=allowed\n"
    } else {
        "mode=forbidden\n"
    });
    let names = x.alphabet();
    for a in 0..n as Sym {
        for b in 0..n as Sym {
            if rel.contains(a, b) == allowed_mode {
                let _ = writeln!(out, "{} {}", names.name(a), names.name(b));
            }
        }
    }
}

/// Canonical text of an SFT: symbols in index order one per line, pairs in
/// lexicographic index order, each pair section in whichever mode lists
/// fewer pairs (ties go to `allowed`).
pub fn serialize(x: &Sft2d) -> String {
    let mut out = String::new();
    out.push_str("[alphabet]\n");
    if x.is_empty() {
        out.push_str("mode=empty\n");
    } else {
        for name in x.alphabet().names() {
            out.push_str(name);
            out.push('\n');
        }
        write_pairs(&mut out, "horizontal", x, x.h());
        write_pairs(&mut out, "vertical", x, x.v());
    }
    let meta: Vec<&str> = x
        .metadata()
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect();
    if !meta.is_empty() {
        out.push_str("[meta]\n");
        for l in meta {
            out.push_str(l);
            out.push('\n');
        }
    }
    out
}
