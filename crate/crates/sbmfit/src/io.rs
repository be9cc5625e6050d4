//! Text formats for graphs, masks, matrices and labels.
//!
//! * Edge list: one `i<TAB>j` pair per line, 1-based ids, undirected;
//!   duplicate lines are ignored, unlisted pairs are absent.
//! * Mask file: same format listing the OBSERVED pairs; a file whose single
//!   line is `*` means fully observed.
//! * Matrix dump: comma-separated full `n x n` matrix, one row per line.
//! * Labels: `node,label` rows (1-based on both sides) under a header.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Result, SbmError};
use crate::graph::{AdjacencyMatrix, LabelAssignment, SamplingMask, ThetaMatrix};

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let mut it = line.split('\t');
    let a = it.next().unwrap_or("");
    let b = it.next().unwrap_or("");
    if b.is_empty() || it.next().is_some() {
        return Err(SbmError::Parse {
            line: lineno,
            msg: format!("expected two tab-separated ids, got {line:?}"),
        });
    }
    let parse = |tok: &str| -> Result<usize> {
        let id: usize = tok.trim().parse().map_err(|_| SbmError::Parse {
            line: lineno,
            msg: format!("invalid node id {tok:?}"),
        })?;
        if id == 0 {
            return Err(SbmError::Parse { line: lineno, msg: "node ids are 1-based".into() });
        }
        Ok(id - 1)
    };
    Ok((parse(a)?, parse(b)?))
}

/// Parse pair lines common to edge lists and masks, applying `set` per pair.
fn parse_pairs(text: &str, n: usize, mut set: impl FnMut(usize, usize)) -> Result<()> {
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (i, j) = parse_pair(line, idx + 1)?;
        if i == j {
            return Err(SbmError::Parse {
                line: idx + 1,
                msg: format!("self-pair {} is not allowed", i + 1),
            });
        }
        if i >= n || j >= n {
            return Err(SbmError::Parse {
                line: idx + 1,
                msg: format!("node id {} exceeds node count {n}", i.max(j) + 1),
            });
        }
        set(i, j);
    }
    Ok(())
}

/// Largest node id mentioned in a pair file, or 0 for an empty file.
pub fn edge_list_max_node(text: &str) -> Result<usize> {
    let mut max = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim_end();
        if line.is_empty() || line.starts_with('#') || line == "*" {
            continue;
        }
        let (i, j) = parse_pair(line, idx + 1)?;
        max = max.max(i + 1).max(j + 1);
    }
    Ok(max)
}

/// Parse an edge list over `n` nodes.
pub fn parse_edge_list(text: &str, n: usize) -> Result<AdjacencyMatrix> {
    let mut a = AdjacencyMatrix::new(n);
    parse_pairs(text, n, |i, j| a.set_edge(i, j, true))?;
    Ok(a)
}

/// Parse a mask file over `n` nodes; `*` alone on the first non-comment line
/// means fully observed.
pub fn parse_mask(text: &str, n: usize) -> Result<SamplingMask> {
    if text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#')) == Some("*") {
        return Ok(SamplingMask::full(n));
    }
    let mut m = SamplingMask::new(n);
    parse_pairs(text, n, |i, j| m.set_observed(i, j, true))?;
    Ok(m)
}

pub fn format_edge_list(a: &AdjacencyMatrix) -> String {
    let mut out = String::new();
    for (i, j) in a.edges() {
        let _ = writeln!(out, "{}\t{}", i + 1, j + 1);
    }
    out
}

pub fn format_mask(m: &SamplingMask) -> String {
    let mut out = String::new();
    for (i, j) in m.pairs() {
        let _ = writeln!(out, "{}\t{}", i + 1, j + 1);
    }
    out
}

/// Full `n x n` CSV dump; `{}` formatting round-trips f64 exactly.
pub fn format_matrix_csv(t: &ThetaMatrix) -> String {
    let n = t.n();
    let mut out = String::new();
    for i in 0..n {
        for j in 0..n {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", if i == j { 0.0 } else { t.get(i, j) });
        }
        out.push('\n');
    }
    out
}

pub fn parse_matrix_csv(text: &str) -> Result<ThetaMatrix> {
    let rows: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    let n = rows.len();
    let mut vals = vec![0.0; n * n];
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<&str> = row.split(',').collect();
        if cells.len() != n {
            return Err(SbmError::Parse {
                line: i + 1,
                msg: format!("row has {} cells, expected {n}", cells.len()),
            });
        }
        for (j, cell) in cells.iter().enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| SbmError::Parse {
                line: i + 1,
                msg: format!("invalid number {cell:?}"),
            })?;
            vals[i * n + j] = v;
        }
    }
    let mut t = ThetaMatrix::zeros(n);
    for i in 0..n {
        if vals[i * n + i] != 0.0 {
            return Err(SbmError::Parse { line: i + 1, msg: "matrix diagonal must be zero".into() });
        }
        for j in i + 1..n {
            let (u, l) = (vals[i * n + j], vals[j * n + i]);
            if (u - l).abs() > 1e-9 {
                return Err(SbmError::Parse {
                    line: j + 1,
                    msg: format!("matrix not symmetric at ({}, {})", i + 1, j + 1),
                });
            }
            if !(0.0..=1.0).contains(&u) {
                return Err(SbmError::Parse {
                    line: i + 1,
                    msg: format!("entry {u} outside [0, 1]"),
                });
            }
            t.set_sym(i, j, u);
        }
    }
    Ok(t)
}

pub fn format_labels_csv(z: &LabelAssignment) -> String {
    let mut out = String::from("node,label\n");
    for i in 0..z.n() {
        let _ = writeln!(out, "{},{}", i + 1, z.label(i) + 1);
    }
    out
}

pub fn parse_labels_csv(text: &str) -> Result<LabelAssignment> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || (idx == 0 && line.starts_with("node")) {
            continue;
        }
        let mut it = line.split(',');
        let (a, b) = (it.next().unwrap_or(""), it.next().unwrap_or(""));
        let node: usize = a.trim().parse().map_err(|_| SbmError::Parse {
            line: idx + 1,
            msg: format!("invalid node id {a:?}"),
        })?;
        let label: usize = b.trim().parse().map_err(|_| SbmError::Parse {
            line: idx + 1,
            msg: format!("invalid label {b:?}"),
        })?;
        if node == 0 || label == 0 {
            return Err(SbmError::Parse { line: idx + 1, msg: "ids and labels are 1-based".into() });
        }
        entries.push((node - 1, label - 1));
    }
    let n = entries.iter().map(|&(i, _)| i + 1).max().unwrap_or(0);
    let mut z = vec![usize::MAX; n];
    for (node, label) in entries {
        z[node] = label;
    }
    if let Some(i) = z.iter().position(|&l| l == usize::MAX) {
        return Err(SbmError::Parse { line: 0, msg: format!("node {} has no label", i + 1) });
    }
    let k = z.iter().max().map_or(1, |&m| m + 1);
    LabelAssignment::new(z, k)
}

pub fn read_to_string(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

pub fn write_string(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    Ok(fs::write(path, content)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_round_trip() {
        let mut a = AdjacencyMatrix::new(5);
        a.set_edge(0, 1, true);
        a.set_edge(2, 4, true);
        let text = format_edge_list(&a);
        assert_eq!(text, "1\t2\n3\t5\n");
        let back = parse_edge_list(&text, 5).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn duplicates_are_ignored() {
        let a = parse_edge_list("1\t2\n2\t1\n1\t2\n", 3).unwrap();
        assert_eq!(a.edge_count(), 1);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse_edge_list("1\t2\nfoo\n", 4) {
            Err(SbmError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_edge_list("1\t9\n", 4) {
            Err(SbmError::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_edge_list("0\t1\n", 4).is_err());
        assert!(parse_edge_list("2\t2\n", 4).is_err());
    }

    #[test]
    fn star_mask_is_fully_observed() {
        let m = parse_mask("*\n", 4).unwrap();
        assert_eq!(m, SamplingMask::full(4));
    }

    #[test]
    fn matrix_csv_round_trip() {
        let t = ThetaMatrix::from_fn(4, |i, j| ((i + 1) * (j + 1)) as f64 / 25.0);
        let text = format_matrix_csv(&t);
        let back = parse_matrix_csv(&text).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn labels_csv_round_trip() {
        let z = LabelAssignment::new(vec![0, 2, 1, 2], 3).unwrap();
        let text = format_labels_csv(&z);
        let back = parse_labels_csv(&text).unwrap();
        assert_eq!(z.as_slice(), back.as_slice());
    }
}
