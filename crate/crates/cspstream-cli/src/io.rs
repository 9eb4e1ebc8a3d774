//! Text formats for constraint streams, sign-pattern distributions,
//! polarization traces, and generator metadata.
//!
//! Stream files are line-oriented: a `CSPSTREAM v1` header, a
//! `n=<n> k=<k>` dimension line, then one event per line,
//! `+|- j_1 .. j_k s_1 .. s_k`, with 1-based variable indices and signs
//! in {+1,-1}. Distribution files are `DIST v1`, `k=<k>`, then one
//! `<bitstring> <rational>` line per pattern (all `2^k` present, any
//! order, masses summing to exactly 1). `#` starts a comment anywhere;
//! blank lines are skipped. Writers emit a fixed ordering so that
//! write-then-read is the identity on the in-memory value.

use cspstream::csp::{Constraint, StreamEvent};
use cspstream::dist::{Dist, DistError};
use cspstream::genhard::{GenParams, Generated};
use cspstream::polarize::PolarizationTrace;
use cspstream::rat::{fmt_rat, parse_rat};
use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

#[derive(Debug)]
pub enum FormatError {
    Io(io::Error),
    /// Missing or wrong first significant line.
    BadHeader { expected: &'static str },
    BadDimensions { line: usize },
    BadEvent { line: usize, reason: &'static str },
    BadRational { line: usize },
    IndexOutOfRange { line: usize, index: usize, n: usize },
    DuplicateIndex { line: usize },
    BadPattern { line: usize },
    DuplicatePattern { line: usize },
    MissingPatterns { expected: usize, got: usize },
    Dist(DistError),
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormatError::Io(e) => write!(f, "{e}"),
            FormatError::BadHeader { expected } => {
                write!(f, "expected header line `{expected}`")
            }
            FormatError::BadDimensions { line } => {
                write!(f, "line {line}: expected `n=<n> k=<k>`")
            }
            FormatError::BadEvent { line, reason } => {
                write!(f, "line {line}: {reason}")
            }
            FormatError::BadRational { line } => {
                write!(f, "line {line}: malformed rational")
            }
            FormatError::IndexOutOfRange { line, index, n } => {
                write!(f, "line {line}: index {index} outside 1..={n}")
            }
            FormatError::DuplicateIndex { line } => {
                write!(f, "line {line}: repeated variable index")
            }
            FormatError::BadPattern { line } => {
                write!(f, "line {line}: expected a sign-pattern bitstring")
            }
            FormatError::DuplicatePattern { line } => {
                write!(f, "line {line}: repeated sign pattern")
            }
            FormatError::MissingPatterns { expected, got } => {
                write!(f, "distribution lists {got} patterns, needs {expected}")
            }
            FormatError::Dist(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for FormatError {}

impl From<io::Error> for FormatError {
    fn from(e: io::Error) -> Self {
        FormatError::Io(e)
    }
}

impl From<DistError> for FormatError {
    fn from(e: DistError) -> Self {
        FormatError::Dist(e)
    }
}

/// A parsed stream file: dimensions plus events in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamFile {
    pub n: usize,
    pub k: usize,
    pub events: Vec<StreamEvent>,
}

const STREAM_HEADER: &str = "CSPSTREAM v1";
const DIST_HEADER: &str = "DIST v1";

fn significant(line: &str) -> Option<&str> {
    let body = match line.find('#') {
        Some(cut) => &line[..cut],
        None => line,
    }
    .trim();
    if body.is_empty() {
        None
    } else {
        Some(body)
    }
}

/// Lines that survive comment stripping, with their 1-based numbers.
fn read_significant(r: impl BufRead) -> io::Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if let Some(body) = significant(&line) {
            out.push((i + 1, body.to_string()));
        }
    }
    Ok(out)
}

fn parse_dims(line_no: usize, body: &str) -> Result<(usize, usize), FormatError> {
    let bad = || FormatError::BadDimensions { line: line_no };
    let mut parts = body.split_whitespace();
    let n: usize = parts
        .next()
        .and_then(|t| t.strip_prefix("n="))
        .and_then(|v| v.parse().ok())
        .ok_or_else(bad)?;
    let k: usize = parts
        .next()
        .and_then(|t| t.strip_prefix("k="))
        .and_then(|v| v.parse().ok())
        .ok_or_else(bad)?;
    if parts.next().is_some() || n == 0 || k == 0 {
        return Err(bad());
    }
    Ok((n, k))
}

pub fn read_stream(r: impl BufRead) -> Result<StreamFile, FormatError> {
    let lines = read_significant(r)?;
    let mut it = lines.into_iter();
    match it.next() {
        Some((_, body)) if body == STREAM_HEADER => {}
        _ => {
            return Err(FormatError::BadHeader {
                expected: STREAM_HEADER,
            })
        }
    }
    let (line_no, dims) = it.next().ok_or(FormatError::BadDimensions { line: 0 })?;
    let (n, k) = parse_dims(line_no, &dims)?;
    let mut events = Vec::new();
    for (line, body) in it {
        let tokens: Vec<&str> = body.split_whitespace().collect();
        if tokens.len() != 1 + 2 * k {
            return Err(FormatError::BadEvent {
                line,
                reason: "expected op, k indices, and k signs",
            });
        }
        let insert = match tokens[0] {
            "+" => true,
            "-" => false,
            _ => {
                return Err(FormatError::BadEvent {
                    line,
                    reason: "op must be + or -",
                })
            }
        };
        let mut indices = Vec::with_capacity(k);
        for t in &tokens[1..1 + k] {
            let idx: usize = t.parse().map_err(|_| FormatError::BadEvent {
                line,
                reason: "indices must be positive integers",
            })?;
            if idx == 0 || idx > n {
                return Err(FormatError::IndexOutOfRange {
                    line,
                    index: idx,
                    n,
                });
            }
            let zero_based = (idx - 1) as u32;
            if indices.contains(&zero_based) {
                return Err(FormatError::DuplicateIndex { line });
            }
            indices.push(zero_based);
        }
        let mut signs = Vec::with_capacity(k);
        for t in &tokens[1 + k..] {
            let s: i32 = t.parse().map_err(|_| FormatError::BadEvent {
                line,
                reason: "signs must be +1 or -1",
            })?;
            if s != 1 && s != -1 {
                return Err(FormatError::BadEvent {
                    line,
                    reason: "signs must be +1 or -1",
                });
            }
            signs.push(s as i8);
        }
        events.push(StreamEvent {
            insert,
            constraint: Constraint::new(indices, signs),
        });
    }
    Ok(StreamFile { n, k, events })
}

pub fn write_stream(mut w: impl Write, s: &StreamFile) -> io::Result<()> {
    writeln!(w, "{STREAM_HEADER}")?;
    writeln!(w, "n={} k={}", s.n, s.k)?;
    for ev in &s.events {
        let op = if ev.insert { '+' } else { '-' };
        write!(w, "{op}")?;
        for idx in &ev.constraint.indices {
            write!(w, " {}", idx + 1)?;
        }
        for sign in &ev.constraint.signs {
            write!(w, " {sign:+}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn read_stream_path(path: &Path) -> Result<StreamFile, FormatError> {
    read_stream(BufReader::new(File::open(path)?))
}

pub fn write_stream_path(path: &Path, s: &StreamFile) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_stream(&mut w, s)?;
    w.flush()
}

pub fn read_dist(r: impl BufRead) -> Result<Dist, FormatError> {
    let lines = read_significant(r)?;
    let mut it = lines.into_iter();
    match it.next() {
        Some((_, body)) if body == DIST_HEADER => {}
        _ => {
            return Err(FormatError::BadHeader {
                expected: DIST_HEADER,
            })
        }
    }
    let (line_no, body) = it.next().ok_or(FormatError::BadDimensions { line: 0 })?;
    let k: usize = body
        .strip_prefix("k=")
        .and_then(|v| v.parse().ok())
        .filter(|&k| k > 0)
        .ok_or(FormatError::BadDimensions { line: line_no })?;
    let size = 1usize << k;
    let mut masses = vec![None; size];
    let mut got = 0usize;
    for (line, body) in it {
        let mut parts = body.split_whitespace();
        let (Some(bits), Some(mass), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(FormatError::BadPattern { line });
        };
        if bits.len() != k || !bits.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(FormatError::BadPattern { line });
        }
        let idx = usize::from_str_radix(bits, 2).expect("validated bitstring");
        if masses[idx].is_some() {
            return Err(FormatError::DuplicatePattern { line });
        }
        let value = parse_rat(mass).map_err(|_| FormatError::BadRational { line })?;
        masses[idx] = Some(value);
        got += 1;
    }
    if got != size {
        return Err(FormatError::MissingPatterns {
            expected: size,
            got,
        });
    }
    let masses = masses.into_iter().map(|m| m.expect("counted")).collect();
    Ok(Dist::new(k, masses)?)
}

pub fn write_dist(mut w: impl Write, d: &Dist) -> io::Result<()> {
    writeln!(w, "{DIST_HEADER}")?;
    writeln!(w, "k={}", d.k())?;
    let k = d.k();
    for (idx, mass) in d.masses().iter().enumerate() {
        writeln!(w, "{idx:0k$b} {}", fmt_rat(mass))?;
    }
    Ok(())
}

pub fn read_dist_path(path: &Path) -> Result<Dist, FormatError> {
    read_dist(BufReader::new(File::open(path)?))
}

pub fn write_dist_path(path: &Path, d: &Dist) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_dist(&mut w, d)?;
    w.flush()
}

/// Index of the first event that drives some constraint's net weight
/// negative, if any.
pub fn first_turnstile_violation(events: &[StreamEvent]) -> Option<usize> {
    let mut running: HashMap<&Constraint, i64> = HashMap::new();
    for (i, ev) in events.iter().enumerate() {
        let count = running.entry(&ev.constraint).or_insert(0);
        *count += if ev.insert { 1 } else { -1 };
        if *count < 0 {
            return Some(i);
        }
    }
    None
}

fn pattern_bits(idx: usize, k: usize) -> String {
    format!("{idx:0k$b}")
}

/// One JSON object per mass-moving step, then a closing object with the
/// final mass vector.
pub fn write_trace(mut w: impl Write, trace: &PolarizationTrace) -> io::Result<()> {
    let k = trace.final_fn.k();
    for (i, s) in trace.steps.iter().enumerate() {
        let obj = serde_json::json!({
            "step": i,
            "u": pattern_bits(s.u, k),
            "v": pattern_bits(s.v, k),
            "epsilon": fmt_rat(&s.epsilon),
            "phi_before": fmt_rat(&s.phi_before),
            "phi_after": fmt_rat(&s.phi_after),
        });
        writeln!(w, "{obj}")?;
    }
    let masses: Vec<String> = trace.final_fn.values().iter().map(fmt_rat).collect();
    let obj = serde_json::json!({ "final": masses, "steps": trace.steps.len() });
    writeln!(w, "{obj}")
}

/// Two JSON lines: the planted side channel, then per-event mask
/// provenance (truth-table indices of the drawn masks).
pub fn write_gen_metadata(
    mut w: impl Write,
    p: &GenParams,
    g: &Generated,
) -> io::Result<()> {
    let obj = serde_json::json!({
        "seed": p.seed,
        "n": p.n,
        "k": p.k,
        "blocks": p.blocks,
        "alpha_m": fmt_rat(&p.alpha_m),
        "tau": fmt_rat(&p.tau),
        "x_star": g.x_star,
    });
    writeln!(w, "{obj}")?;
    let obj = serde_json::json!({ "masks": g.masks });
    writeln!(w, "{obj}")
}
