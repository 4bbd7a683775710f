//! Edge-list and constraint files.
//!
//! Edge lists are plain text: a header line `n m` followed by `m` lines
//! `i j` with `0 <= i < j < n`. Blank lines and `#` comments are skipped.

use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{ConstraintSpec, Graph};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_pair(line: usize, text: &str) -> Result<(usize, usize)> {
    let mut it = text.split_whitespace();
    let mut next = || -> Result<usize> {
        let tok = it.next().ok_or_else(|| parse_err(line, "expected two integers"))?;
        tok.parse().map_err(|_| parse_err(line, format!("not a vertex id: {tok:?}")))
    };
    let pair = (next()?, next()?);
    if it.next().is_some() {
        return Err(parse_err(line, "trailing tokens"));
    }
    Ok(pair)
}

pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut lines = reader
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l))
        .filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty() && !s.trim_start().starts_with('#')));

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header `n m`"))?;
    let (n, m) = parse_pair(hline, &header?)?;
    let mut g = Graph::empty(n);
    let mut seen = 0;
    for (line, text) in lines {
        let (i, j) = parse_pair(line, &text?)?;
        if i >= n || j >= n {
            return Err(parse_err(line, format!("vertex id out of range for n = {n}")));
        }
        if i == j {
            return Err(parse_err(line, format!("self-loop at vertex {i}")));
        }
        if i > j {
            return Err(parse_err(line, format!("edge ({i}, {j}) must be written with i < j")));
        }
        if g.has_edge(i, j) {
            return Err(parse_err(line, format!("duplicate edge ({i}, {j})")));
        }
        g.insert_edge(i, j);
        seen += 1;
    }
    if seen != m {
        return Err(parse_err(hline, format!("header declares {m} edges, found {seen}")));
    }
    Ok(g)
}

pub fn write_edge_list<W: Write>(g: &Graph, mut w: W) -> Result<()> {
    writeln!(w, "{} {}", g.n(), g.edge_count())?;
    for (i, j) in g.edges() {
        writeln!(w, "{i} {j}")?;
    }
    Ok(())
}

pub fn load_edge_list(path: &Path) -> Result<Graph> {
    let file = fs::File::open(path)?;
    read_edge_list(std::io::BufReader::new(file))
}

pub fn load_constraint(path: &Path) -> Result<ConstraintSpec> {
    let text = fs::read_to_string(path)?;
    let spec: ConstraintSpec = serde_json::from_str(&text)?;
    spec.validate()?;
    Ok(spec)
}
