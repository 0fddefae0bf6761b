//! Plain-text instance files.
//!
//! ```text
//! # comment
//! JOBS
//! j1 1
//! MACHINES
//! m1 2.8
//! EDGES
//! # job machine capacity rank_at_job rank_at_machine
//! j1 m1 1 1 3
//! ALLOCATION
//! # job machine value
//! j1 m1 1
//! ```
//!
//! Numbers may be integers, decimals or `p/q` fractions and are read exactly.
//! The `ALLOCATION` section is optional; edges it does not mention carry zero.

use std::collections::HashSet;
use std::fmt::Write as _;

use num_traits::Zero;

use crate::allocation::Allocation;
use crate::instance::{Instance, InvalidInstance, RawEdge, RawInstance};
use crate::rational::{format_compact, parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid instance: {0}")]
    Invalid(#[from] InvalidInstance),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Section {
    Jobs,
    Machines,
    Edges,
    Allocation,
}

impl Section {
    fn from_header(word: &str) -> Option<Section> {
        match word {
            "JOBS" => Some(Section::Jobs),
            "MACHINES" => Some(Section::Machines),
            "EDGES" => Some(Section::Edges),
            "ALLOCATION" => Some(Section::Allocation),
            _ => None,
        }
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token {
                    text: &line[s..i],
                    column: s + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &line[s..],
            column: s + 1,
        });
    }
    out
}

struct Cursor {
    line: usize,
}

impl Cursor {
    fn error(&self, column: usize, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn number(&self, tok: &Token<'_>) -> Result<Rational, ParseError> {
        parse_rational(tok.text).map_err(|e| self.error(tok.column, e.to_string()))
    }

    fn rank(&self, tok: &Token<'_>) -> Result<u32, ParseError> {
        tok.text
            .parse::<u32>()
            .map_err(|_| self.error(tok.column, format!("invalid rank {:?}", tok.text)))
    }

    fn arity(&self, toks: &[Token<'_>], n: usize, what: &str) -> Result<(), ParseError> {
        if toks.len() != n {
            let column = toks.get(n).map_or(1, |t| t.column);
            return Err(self.error(
                column,
                format!("expected {n} fields ({what}), found {}", toks.len()),
            ));
        }
        Ok(())
    }
}

/// Parses an instance file, applying every instance validation. The returned
/// allocation is `Some` exactly when the file has an `ALLOCATION` section; it
/// is not checked for feasibility here.
pub fn parse_instance(text: &str) -> Result<(Instance, Option<Allocation>), ParseError> {
    let mut raw = RawInstance::new();
    let mut section = None;
    let mut seen_sections = HashSet::new();
    let mut alloc_lines: Vec<(usize, String, usize, String, usize, Rational)> = Vec::new();
    let mut has_alloc = false;

    for (idx, full_line) in text.lines().enumerate() {
        let cur = Cursor { line: idx + 1 };
        let line = full_line.split('#').next().unwrap_or("");
        let toks = tokens(line);
        if toks.is_empty() {
            continue;
        }
        if let Some(s) = Section::from_header(toks[0].text) {
            if toks.len() > 1 {
                return Err(cur.error(toks[1].column, "unexpected text after section header"));
            }
            if !seen_sections.insert(s) {
                return Err(cur.error(toks[0].column, format!("repeated section {}", toks[0].text)));
            }
            if s == Section::Allocation {
                has_alloc = true;
            }
            section = Some(s);
            continue;
        }
        match section {
            None => {
                return Err(cur.error(toks[0].column, "data before the first section header"));
            }
            Some(Section::Jobs) | Some(Section::Machines) => {
                cur.arity(&toks, 2, "name quota")?;
                let entry = (toks[0].text.to_string(), cur.number(&toks[1])?);
                if section == Some(Section::Jobs) {
                    raw.jobs.push(entry);
                } else {
                    raw.machines.push(entry);
                }
            }
            Some(Section::Edges) => {
                cur.arity(&toks, 5, "job machine capacity rank_at_job rank_at_machine")?;
                raw.edges.push(RawEdge {
                    job: toks[0].text.to_string(),
                    machine: toks[1].text.to_string(),
                    capacity: cur.number(&toks[2])?,
                    rank_job: cur.rank(&toks[3])?,
                    rank_machine: cur.rank(&toks[4])?,
                });
            }
            Some(Section::Allocation) => {
                cur.arity(&toks, 3, "job machine value")?;
                let value = cur.number(&toks[2])?;
                alloc_lines.push((
                    cur.line,
                    toks[0].text.to_string(),
                    toks[0].column,
                    toks[1].text.to_string(),
                    toks[2].column,
                    value,
                ));
            }
        }
    }

    let instance = raw.validate()?;
    let allocation = if has_alloc {
        let mut x = Allocation::zero(&instance);
        let mut assigned = HashSet::new();
        for (line, job, column, machine, value_column, value) in alloc_lines {
            let cur = Cursor { line };
            let e = instance
                .edge_by_names(&job, &machine)
                .ok_or_else(|| cur.error(column, format!("no edge {job}-{machine}")))?;
            if !assigned.insert(e) {
                return Err(cur.error(column, format!("edge {job}-{machine} allocated twice")));
            }
            if value < Rational::zero() {
                return Err(cur.error(value_column, "negative allocation value"));
            }
            x.set(e, value);
        }
        Some(x)
    } else {
        None
    };
    Ok((instance, allocation))
}

/// Writes an instance (and optionally an allocation) in the format accepted
/// by [`parse_instance`]. Only positive allocation entries are written.
pub fn serialize(instance: &Instance, x: Option<&Allocation>) -> String {
    let mut out = String::new();
    out.push_str("JOBS\n");
    for a in instance.jobs() {
        let _ = writeln!(out, "{} {}", a.name, format_compact(&a.quota));
    }
    out.push_str("MACHINES\n");
    for a in instance.machines() {
        let _ = writeln!(out, "{} {}", a.name, format_compact(&a.quota));
    }
    out.push_str("EDGES\n");
    for e in instance.edges() {
        let _ = writeln!(
            out,
            "{} {} {} {} {}",
            instance.jobs()[e.job].name,
            instance.machines()[e.machine].name,
            format_compact(&e.capacity),
            e.rank_job,
            e.rank_machine
        );
    }
    if let Some(x) = x {
        out.push_str("ALLOCATION\n");
        out.push_str(&allocation_lines(instance, x));
    }
    out
}

/// The body of an `ALLOCATION` section.
pub fn allocation_lines(instance: &Instance, x: &Allocation) -> String {
    let mut out = String::new();
    for (id, e) in instance.edges().iter().enumerate() {
        let v = x.get(id);
        if !v.is_zero() {
            let _ = writeln!(
                out,
                "{} {} {}",
                instance.jobs()[e.job].name,
                instance.machines()[e.machine].name,
                format_compact(v)
            );
        }
    }
    out
}
