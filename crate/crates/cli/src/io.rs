//! Point-set file format.
//!
//! UTF-8 text. Line 1 (after any comments): header `d=<int> n=<int>
//! weighted=<0|1>`; then n rows of d floats (plus a trailing weight when
//! weighted=1) separated by spaces. Lines starting with `#` are comments.
//! Floats are written with 17 significant digits, so finite decimal inputs
//! round-trip bit-exactly.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use cursekit_core::points::PointSet;

pub fn read_point_set(path: &Path) -> Result<PointSet> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading point-set file {}", path.display()))?;
    parse_point_set(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn write_point_set(ps: &PointSet, path: &Path) -> Result<()> {
    std::fs::write(path, format_point_set(ps))
        .with_context(|| format!("writing point-set file {}", path.display()))
}

pub fn format_point_set(ps: &PointSet) -> String {
    let weighted = ps.weights().is_some();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "d={} n={} weighted={}",
        ps.d(),
        ps.len(),
        u8::from(weighted)
    );
    for (k, node) in ps.iter_nodes().enumerate() {
        let mut first = true;
        for &x in node {
            if !first {
                out.push(' ');
            }
            let _ = write!(out, "{x:.16e}");
            first = false;
        }
        if let Some(w) = ps.weights() {
            let _ = write!(out, " {:.16e}", w[k]);
        }
        out.push('\n');
    }
    out
}

fn parse_header_token(token: &str, expect: &'static str, line_no: usize) -> Result<usize> {
    let (key, value) = token
        .split_once('=')
        .ok_or_else(|| anyhow!("line {line_no}: malformed header token '{token}'"))?;
    if key != expect {
        bail!("line {line_no}: expected header field '{expect}=', found '{key}='");
    }
    value
        .parse()
        .map_err(|_| anyhow!("line {line_no}: header field '{expect}' is not an integer"))
}

pub fn parse_point_set(text: &str) -> Result<PointSet> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_no, header) = lines
        .next()
        .ok_or_else(|| anyhow!("missing header line 'd=<int> n=<int> weighted=<0|1>'"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 3 {
        bail!("line {header_no}: header must be 'd=<int> n=<int> weighted=<0|1>'");
    }
    let d = parse_header_token(tokens[0], "d", header_no)?;
    let n = parse_header_token(tokens[1], "n", header_no)?;
    let weighted = match parse_header_token(tokens[2], "weighted", header_no)? {
        0 => false,
        1 => true,
        _ => bail!("line {header_no}: weighted must be 0 or 1"),
    };
    if d == 0 {
        bail!("line {header_no}: dimension must be >= 1");
    }

    let expected_cols = d + usize::from(weighted);
    let mut coords = Vec::with_capacity(n * d);
    let mut weights = if weighted {
        Some(Vec::with_capacity(n))
    } else {
        None
    };
    let mut seen = 0usize;
    for (line_no, line) in lines {
        if seen == n {
            bail!("line {line_no}: expected exactly {n} data rows, found more");
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != expected_cols {
            bail!(
                "line {line_no}: expected {expected_cols} columns for d={d} weighted={}, found {}",
                u8::from(weighted),
                fields.len()
            );
        }
        for (col, field) in fields.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| anyhow!("line {line_no}: column {} is not a float", col + 1))?;
            if !v.is_finite() {
                bail!("line {line_no}: column {} is not finite", col + 1);
            }
            if col < d {
                coords.push(v);
            } else {
                if v < 0.0 {
                    bail!("line {line_no}: negative weight {v}");
                }
                weights.as_mut().expect("weighted").push(v);
            }
        }
        seen += 1;
    }
    if seen != n {
        bail!("expected {n} data rows, found {seen}");
    }
    PointSet::new(d, coords, weights).map_err(|e| anyhow!("{e}"))
}
