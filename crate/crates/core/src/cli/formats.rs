//! Text formats: curve families, bipartite edge lists and symbol lists.
//!
//! A family file looks like
//!
//! ```text
//! tangency-family 1
//! window -1 3
//! ground none
//! flags x_monotone bi_infinite one_intersecting precisely_one
//! seed none
//! curves 2
//! curve 0 -1 0 3 0
//! curve 1 -1 1 0 0 3 3
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Coordinates are
//! rationals written `p` or `p/q`. Saving sorts chains by id and writes
//! rationals in lowest terms, so output is byte-stable.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::curves::{validate_family, CurveFamily, FamilyFlags, PolyChain};
use crate::exact_geom::{format_rational, parse_rational, Point, Rational};
use crate::extremal_graph::BipartiteGraph;

pub const FAMILY_HEADER: &str = "tangency-family 1";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },
    #[error("declared flag does not hold: {}", .0.join(", "))]
    FlagMismatch(Vec<&'static str>),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn parse_err(line: usize, column: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        column,
        msg: msg.into(),
    }
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    out
}

/// Content lines: `(line number, tokens)`, skipping blanks and comments.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<(usize, &str)>)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| (i + 1, tokens(l)))
}

fn rational_at(line: usize, (col, tok): (usize, &str)) -> Result<Rational, FormatError> {
    parse_rational(tok).map_err(|e| parse_err(line, col, format!("{e}: {tok:?}")))
}

fn number_at<T: std::str::FromStr>(line: usize, (col, tok): (usize, &str)) -> Result<T, FormatError> {
    tok.parse()
        .map_err(|_| parse_err(line, col, format!("expected a nonnegative integer, got {tok:?}")))
}

const FLAG_NAMES: [&str; 4] = ["x_monotone", "bi_infinite", "one_intersecting", "precisely_one"];

/// Parses a family file without checking its declared flags.
pub fn parse_family(text: &str) -> Result<CurveFamily, FormatError> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, t)) if t.iter().map(|t| t.1).eq(FAMILY_HEADER.split(' ')) => {}
        Some((n, t)) => return Err(parse_err(n, t[0].0, format!("expected header {FAMILY_HEADER:?}"))),
        None => return Err(parse_err(1, 1, "empty file")),
    }
    let mut window = None;
    let mut ground = None;
    let mut flags = FamilyFlags::default();
    let mut seed = None;
    let mut expected = None;
    let mut chains = Vec::new();
    let mut last_line = 1;
    for (n, toks) in lines {
        last_line = n;
        let (col, key) = toks[0];
        let args = &toks[1..];
        let is_none = args.len() == 1 && args[0].1 == "none";
        match key {
            _ if expected.is_some() && key != "curve" => {
                return Err(parse_err(n, col, format!("expected a curve record, got {key:?}")));
            }
            "window" if is_none => window = None,
            "window" if args.len() == 2 => window = Some((rational_at(n, args[0])?, rational_at(n, args[1])?)),
            "ground" if is_none => ground = None,
            "ground" if args.len() == 1 => ground = Some(rational_at(n, args[0])?),
            "seed" if is_none => seed = None,
            "seed" if args.len() == 1 => seed = Some(number_at(n, args[0])?),
            "flags" => {
                flags = FamilyFlags::default();
                for &(c, name) in args.iter().filter(|_| !is_none) {
                    match name {
                        "x_monotone" => flags.x_monotone = true,
                        "bi_infinite" => flags.bi_infinite = true,
                        "one_intersecting" => flags.one_intersecting = true,
                        "precisely_one" => flags.precisely_one = true,
                        _ => return Err(parse_err(n, c, format!("unknown flag {name:?}"))),
                    }
                }
            }
            "curves" if args.len() == 1 => expected = Some(number_at::<usize>(n, args[0])?),
            "curve" if expected.is_some() => {
                if args.is_empty() {
                    return Err(parse_err(n, col, "curve record without an id"));
                }
                let id: u64 = number_at(n, args[0])?;
                let coords = &args[1..];
                if coords.len() % 2 != 0 {
                    let c = coords.last().map_or(col, |t| t.0);
                    return Err(parse_err(n, c, "odd number of coordinates"));
                }
                let vertices = coords
                    .chunks(2)
                    .map(|p| Ok(Point::new(rational_at(n, p[0])?, rational_at(n, p[1])?)))
                    .collect::<Result<Vec<_>, FormatError>>()?;
                let chain = PolyChain::new(id, vertices).map_err(|e| parse_err(n, args[0].0, e.to_string()))?;
                if chains.iter().any(|c: &PolyChain| c.id() == id) {
                    return Err(parse_err(n, args[0].0, format!("duplicate curve id {id}")));
                }
                chains.push(chain);
            }
            _ => return Err(parse_err(n, col, format!("unexpected record {key:?}"))),
        }
    }
    let Some(expected) = expected else {
        return Err(parse_err(last_line, 1, "missing \"curves\" record"));
    };
    if chains.len() != expected {
        return Err(parse_err(
            last_line,
            1,
            format!("declared {expected} curves, found {}", chains.len()),
        ));
    }
    let mut family = CurveFamily::new(chains).map_err(|e| parse_err(last_line, 1, e.to_string()))?;
    family.window = window;
    family.ground = ground;
    family.flags = flags;
    family.seed = seed;
    Ok(family)
}

/// Canonical text form: chains sorted by id, rationals in lowest terms.
pub fn format_family(f: &CurveFamily) -> String {
    let opt = |r: &Option<Rational>| r.as_ref().map_or("none".to_string(), format_rational);
    let mut s = String::new();
    writeln!(s, "{FAMILY_HEADER}").unwrap();
    match &f.window {
        Some((lo, hi)) => writeln!(s, "window {} {}", format_rational(lo), format_rational(hi)).unwrap(),
        None => writeln!(s, "window none").unwrap(),
    }
    writeln!(s, "ground {}", opt(&f.ground)).unwrap();
    let on = [f.flags.x_monotone, f.flags.bi_infinite, f.flags.one_intersecting, f.flags.precisely_one];
    let names: Vec<&str> = FLAG_NAMES.iter().zip(on).filter(|p| p.1).map(|p| *p.0).collect();
    writeln!(s, "flags {}", if names.is_empty() { "none".to_string() } else { names.join(" ") }).unwrap();
    writeln!(s, "seed {}", f.seed.map_or("none".to_string(), |v| v.to_string())).unwrap();
    writeln!(s, "curves {}", f.len()).unwrap();
    let mut chains: Vec<&PolyChain> = f.chains.iter().collect();
    chains.sort_by_key(|c| c.id());
    for c in chains {
        write!(s, "curve {}", c.id()).unwrap();
        for v in c.vertices() {
            write!(s, " {} {}", format_rational(&v.x), format_rational(&v.y)).unwrap();
        }
        s.push('\n');
    }
    s
}

fn read(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), FormatError> {
    fs::write(path, text).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Parses a family and re-checks every flag it declares.
pub fn load_family_str(text: &str) -> Result<CurveFamily, FormatError> {
    let f = parse_family(text)?;
    let violated = validate_family(&f).violated_flags(&f.flags);
    if !violated.is_empty() {
        return Err(FormatError::FlagMismatch(violated));
    }
    Ok(f)
}

pub fn load_family(path: &Path) -> Result<CurveFamily, FormatError> {
    load_family_str(&read(path)?)
}

pub fn save_family(f: &CurveFamily, path: &Path) -> Result<(), FormatError> {
    write(path, &format_family(f))
}

/// Edge list: a header `A <na> B <nb>`, then one `a b` pair per line.
pub fn parse_graph(text: &str) -> Result<BipartiteGraph, FormatError> {
    let mut lines = content_lines(text);
    let (na, nb) = match lines.next() {
        Some((n, t)) if t.len() == 4 && t[0].1 == "A" && t[2].1 == "B" => (number_at(n, t[1])?, number_at(n, t[3])?),
        Some((n, t)) => return Err(parse_err(n, t[0].0, "expected header \"A <size> B <size>\"")),
        None => return Err(parse_err(1, 1, "empty file")),
    };
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (n, t) in lines {
        if t.len() != 2 {
            return Err(parse_err(n, t[0].0, "expected an edge \"a b\""));
        }
        let (a, b): (usize, usize) = (number_at(n, t[0])?, number_at(n, t[1])?);
        if a >= na {
            return Err(parse_err(n, t[0].0, format!("vertex {a} outside side A of size {na}")));
        }
        if b >= nb {
            return Err(parse_err(n, t[1].0, format!("vertex {b} outside side B of size {nb}")));
        }
        if !seen.insert((a, b)) {
            return Err(parse_err(n, t[0].0, format!("duplicate edge {a} {b}")));
        }
        edges.push((a, b));
    }
    Ok(BipartiteGraph::new(na, nb, edges).expect("checked above"))
}

pub fn format_graph(g: &BipartiteGraph) -> String {
    let mut s = format!("A {} B {}\n", g.na(), g.nb());
    for (a, b) in g.edges() {
        writeln!(s, "{a} {b}").unwrap();
    }
    s
}

pub fn load_graph(path: &Path) -> Result<BipartiteGraph, FormatError> {
    parse_graph(&read(path)?)
}

pub fn save_graph(g: &BipartiteGraph, path: &Path) -> Result<(), FormatError> {
    write(path, &format_graph(g))
}

/// One list of ids per line.
pub fn parse_lists(text: &str) -> Result<Vec<Vec<u64>>, FormatError> {
    content_lines(text)
        .map(|(n, t)| t.into_iter().map(|tok| number_at(n, tok)).collect())
        .collect()
}

pub fn load_lists(path: &Path) -> Result<Vec<Vec<u64>>, FormatError> {
    parse_lists(&read(path)?)
}
