//! Reading and writing graphs and partitions.
//!
//! Edge list: one edge per line, `u v` or `u v w`, 0-indexed, whitespace
//! separated. Lines starting with `#` are comments; a comment of the form
//! `# nodes N` fixes the node count (otherwise it is one past the largest
//! index seen), which lets isolated trailing nodes survive a round trip.
//!
//! METIS: header `n m [fmt [ncon]]`, then one line per node listing its
//! 1-indexed neighbors. `fmt` is up to three binary digits: the last enables
//! edge weights, the middle vertex weights (`ncon` of them, skipped), the
//! first vertex sizes (skipped). `%` lines are comments.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use super::{Graph, Partition};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    EdgeList,
    Metis,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edge-list" | "edgelist" => Ok(Format::EdgeList),
            "metis" => Ok(Format::Metis),
            other => Err(Error::InvalidConfig(format!("unknown graph format `{other}`"))),
        }
    }
}

pub fn load_graph(path: impl AsRef<Path>, format: Format) -> Result<Graph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    match format {
        Format::EdgeList => parse_edge_list(&text),
        Format::Metis => parse_metis(&text),
    }
}

fn parse_field<T: FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("invalid {what} `{tok}`"),
    })
}

fn check_weight(w: f64, line: usize) -> Result<f64> {
    if w.is_finite() && w >= 0.0 {
        Ok(w)
    } else {
        Err(Error::Parse {
            line,
            msg: format!("edge weight {w} must be finite and nonnegative"),
        })
    }
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut declared_n: Option<usize> = None;
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let mut toks = comment.split_whitespace();
            if toks.next() == Some("nodes") {
                if let Some(tok) = toks.next() {
                    declared_n = Some(parse_field(tok, line, "node count")?);
                }
            }
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        let (u, v, w) = match toks.as_slice() {
            [u, v] => (parse_field(u, line, "node")?, parse_field(v, line, "node")?, 1.0),
            [u, v, w] => (
                parse_field(u, line, "node")?,
                parse_field(v, line, "node")?,
                check_weight(parse_field(w, line, "weight")?, line)?,
            ),
            _ => {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected `u v` or `u v w`, got {} fields", toks.len()),
                })
            }
        };
        if u == v {
            return Err(Error::SelfLoop { node: u, line });
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(Error::DuplicateEdge {
                u: u.min(v),
                v: u.max(v),
                line,
            });
        }
        edges.push((u, v, w, line));
    }
    let max_index = edges.iter().map(|&(u, v, _, _)| u.max(v) + 1).max().unwrap_or(0);
    let n = match declared_n {
        Some(n) => {
            if let Some(&(u, v, _, line)) = edges.iter().find(|&&(u, v, _, _)| u.max(v) >= n) {
                return Err(Error::IndexOutOfRange {
                    index: u.max(v),
                    n,
                    line,
                });
            }
            n
        }
        None => max_index,
    };
    Graph::from_edges(n, edges.into_iter().map(|(u, v, w, _)| (u, v, w)))
}

pub fn parse_metis(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.starts_with('%'));

    let (header_line, header) = lines.by_ref().find(|(_, l)| !l.is_empty()).ok_or(Error::Parse {
        line: 1,
        msg: "missing METIS header".into(),
    })?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if !(2..=4).contains(&toks.len()) {
        return Err(Error::Parse {
            line: header_line,
            msg: "header must be `n m [fmt [ncon]]`".into(),
        });
    }
    let n: usize = parse_field(toks[0], header_line, "node count")?;
    let m: usize = parse_field(toks[1], header_line, "edge count")?;
    let fmt = toks.get(2).copied().unwrap_or("0");
    if fmt.len() > 3 || !fmt.chars().all(|c| c == '0' || c == '1') {
        return Err(Error::Parse {
            line: header_line,
            msg: format!("invalid fmt `{fmt}`"),
        });
    }
    let flags = format!("{fmt:0>3}");
    let flag = |i: usize| flags.as_bytes()[i] == b'1';
    let (has_vsize, has_vwgt, has_ewgt) = (flag(0), flag(1), flag(2));
    let ncon: usize = match toks.get(3) {
        Some(tok) => parse_field(tok, header_line, "ncon")?,
        None => usize::from(has_vwgt),
    };
    let skip = usize::from(has_vsize) + if has_vwgt { ncon } else { 0 };

    // Directed half-edges keyed by (from, to), with the line they came from.
    let mut half: Vec<(usize, usize, f64, usize)> = Vec::new();
    let mut keys = HashSet::new();
    for u in 0..n {
        let (line, body) = lines.next().unwrap_or((header_line + u + 1, ""));
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.len() < skip {
            return Err(Error::Parse {
                line,
                msg: "missing vertex size/weight fields".into(),
            });
        }
        let rest = &toks[skip..];
        let stride = if has_ewgt { 2 } else { 1 };
        if !rest.len().is_multiple_of(stride) {
            return Err(Error::Parse {
                line,
                msg: "neighbor without a weight".into(),
            });
        }
        for chunk in rest.chunks(stride) {
            let one_based: usize = parse_field(chunk[0], line, "neighbor")?;
            if one_based == 0 || one_based > n {
                return Err(Error::IndexOutOfRange {
                    index: one_based,
                    n,
                    line,
                });
            }
            let v = one_based - 1;
            if v == u {
                return Err(Error::SelfLoop { node: u, line });
            }
            let w = if has_ewgt {
                check_weight(parse_field(chunk[1], line, "weight")?, line)?
            } else {
                1.0
            };
            if !keys.insert((u, v)) {
                return Err(Error::DuplicateEdge {
                    u: u.min(v),
                    v: u.max(v),
                    line,
                });
            }
            half.push((u, v, w, line));
        }
    }
    if let Some((line, extra)) = lines.find(|(_, l)| !l.is_empty()) {
        return Err(Error::Parse {
            line,
            msg: format!("unexpected trailing content `{extra}`"),
        });
    }

    let weight_of: std::collections::HashMap<(usize, usize), f64> =
        half.iter().map(|&(u, v, w, _)| ((u, v), w)).collect();
    let mut edges = Vec::new();
    for &(u, v, w, line) in &half {
        match weight_of.get(&(v, u)) {
            None => {
                return Err(Error::Parse {
                    line,
                    msg: format!("edge {}-{} is not listed by node {}", u + 1, v + 1, v + 1),
                })
            }
            Some(&back) if back != w => {
                return Err(Error::Parse {
                    line,
                    msg: format!("edge {}-{} has weights {w} and {back}", u + 1, v + 1),
                })
            }
            Some(_) if u < v => edges.push((u, v, w)),
            Some(_) => {}
        }
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: header_line,
            msg: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    Graph::from_edges(n, edges)
}

/// Edge-list text with a `# nodes N` header; weights are written only when
/// some edge is not unit weight.
pub fn format_edge_list(g: &Graph) -> String {
    let weighted = g.edges().iter().any(|e| e.w != 1.0);
    let mut out = format!("# nodes {}\n", g.n());
    for e in g.edges() {
        if weighted {
            writeln!(out, "{} {} {}", e.u, e.v, e.w).unwrap();
        } else {
            writeln!(out, "{} {}", e.u, e.v).unwrap();
        }
    }
    out
}

pub fn write_edge_list(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_edge_list(g)).map_err(|e| Error::io(path, e))
}

/// METIS text; the format flag `1` and per-edge weights are written only
/// when some edge is not unit weight.
pub fn format_metis(g: &Graph) -> String {
    let weighted = g.edges().iter().any(|e| e.w != 1.0);
    let mut out = format!("{} {}", g.n(), g.edge_count());
    out.push_str(if weighted { " 1\n" } else { "\n" });
    for u in 0..g.n() {
        let mut first = true;
        for (v, w) in g.neighbors(u) {
            if !first {
                out.push(' ');
            }
            first = false;
            if weighted {
                write!(out, "{} {}", v + 1, w).unwrap();
            } else {
                write!(out, "{}", v + 1).unwrap();
            }
        }
        out.push('\n');
    }
    out
}

pub fn save_graph(g: &Graph, path: impl AsRef<Path>, format: Format) -> Result<()> {
    let path = path.as_ref();
    let text = match format {
        Format::EdgeList => format_edge_list(g),
        Format::Metis => format_metis(g),
    };
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// One label per line, in node order.
pub fn parse_partition(text: &str) -> Result<Partition> {
    let mut labels = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let tok = raw.trim();
        if tok.is_empty() || tok.starts_with('#') {
            continue;
        }
        match tok {
            "0" => labels.push(0),
            "1" => labels.push(1),
            other => {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("label `{other}` is not 0 or 1"),
                })
            }
        }
    }
    Partition::new(labels)
}

pub fn read_partition(path: impl AsRef<Path>) -> Result<Partition> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_partition(&text)
}

pub fn write_partition(part: &Partition, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::with_capacity(2 * part.len());
    for l in part.labels() {
        writeln!(out, "{l}").unwrap();
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}
