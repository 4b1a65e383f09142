//! Line-based text formats for groups, graphs, Cayley specs, certificates
//! and traces. Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::certificate::{CertificateKind, HamiltonCertificate};
use crate::graph::{CayleySpec, Graph};
use crate::permgroup::{PermGroup, Permutation};
use crate::pipeline::TraceEntry;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    InFile { path: PathBuf, source: Box<FormatError> },
}

pub type Result<T, E = FormatError> = std::result::Result<T, E>;

fn parse_error(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse { line, message: message.into() }
}

/// Nonempty, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn numbers(line: usize, s: &str) -> Result<Vec<usize>> {
    s.split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_error(line, format!("`{t}` is not a number"))))
        .collect()
}

/// `<keyword> N` header.
fn header(lines: &mut dyn Iterator<Item = (usize, &str)>, keyword: &str) -> Result<usize> {
    let (line, text) = lines.next().ok_or_else(|| parse_error(1, format!("missing `{keyword} N`")))?;
    let rest = text
        .strip_prefix(keyword)
        .ok_or_else(|| parse_error(line, format!("expected `{keyword} N`")))?;
    match numbers(line, rest)?.as_slice() {
        [n] if *n > 0 => Ok(*n),
        _ => Err(parse_error(line, format!("expected `{keyword} N` with N > 0"))),
    }
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.to_owned(), source })
}

fn in_file<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| FormatError::InFile { path: path.to_owned(), source: Box::new(e) })
}

pub fn parse_group(text: &str) -> Result<PermGroup> {
    let mut lines = content_lines(text);
    let degree = header(&mut lines, "degree")?;
    let mut gens = Vec::new();
    for (line, s) in lines {
        let images = numbers(line, s)?;
        if images.len() != degree {
            return Err(parse_error(line, format!("expected {degree} images, found {}", images.len())));
        }
        gens.push(Permutation::from_images(images).map_err(|e| parse_error(line, e.to_string()))?);
    }
    PermGroup::new(degree, gens).map_err(|e| parse_error(1, e.to_string()))
}

pub fn write_group(g: &PermGroup) -> String {
    let mut out = format!("degree {}\n", g.degree());
    for p in g.generators() {
        out.push_str(&join(p.images()));
        out.push('\n');
    }
    out
}

pub fn read_group(path: &Path) -> Result<PermGroup> {
    in_file(path, parse_group(&read_file(path)?))
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = content_lines(text);
    let n = header(&mut lines, "vertices")?;
    let mut edges = Vec::new();
    for (line, s) in lines {
        match numbers(line, s)?.as_slice() {
            [u, v] if u < v && *v < n => edges.push((*u, *v)),
            [u, v] if u >= v => return Err(parse_error(line, "edge must satisfy u < v")),
            [_, _] => return Err(parse_error(line, format!("vertex out of range 0..{n}"))),
            _ => return Err(parse_error(line, "expected `u v`")),
        }
    }
    Graph::from_edges(n, &edges).map_err(|e| parse_error(1, e.to_string()))
}

pub fn write_graph(x: &Graph) -> String {
    let mut out = format!("vertices {}\n", x.vertex_count());
    for (u, v) in x.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn read_graph(path: &Path) -> Result<Graph> {
    in_file(path, parse_graph(&read_file(path)?))
}

/// Parses `group PATH` and `S: i j k`; `load` resolves the group reference.
pub fn parse_cayley_spec(
    text: &str,
    load: impl FnOnce(&str) -> Result<PermGroup>,
) -> Result<CayleySpec> {
    let mut group_ref = None;
    let mut set = None;
    for (line, s) in content_lines(text) {
        if let Some(rest) = s.strip_prefix("group ") {
            group_ref = Some((line, rest.trim().to_string()));
        } else if let Some(rest) = s.strip_prefix("S:") {
            set = Some((line, numbers(line, rest)?));
        } else {
            return Err(parse_error(line, "expected `group PATH` or `S: i j k`"));
        }
    }
    let (gline, group_ref) = group_ref.ok_or_else(|| parse_error(1, "missing `group PATH`"))?;
    let (sline, indices) = set.ok_or_else(|| parse_error(gline, "missing `S: i j k`"))?;
    let group = load(&group_ref)?;
    CayleySpec::from_indices(group, &indices).map_err(|e| parse_error(sline, e.to_string()))
}

pub fn write_cayley_spec(group_ref: &str, spec: &CayleySpec) -> Result<String> {
    let elements = spec.group().elements().map_err(|e| parse_error(0, e.to_string()))?;
    let indices: Vec<usize> = spec
        .connection_set()
        .iter()
        .map(|s| elements.binary_search(s).expect("connection set lies in the group"))
        .collect();
    Ok(format!("group {group_ref}\nS: {}\n", join(&indices)))
}

/// Reads a spec; the group path is relative to the spec file's directory.
pub fn read_cayley_spec(path: &Path) -> Result<CayleySpec> {
    let dir = path.parent().unwrap_or(Path::new(".")).to_owned();
    let text = read_file(path)?;
    in_file(path, parse_cayley_spec(&text, |r| read_group(&dir.join(r))))
}

pub fn parse_certificate(text: &str) -> Result<HamiltonCertificate> {
    let mut lines = content_lines(text);
    let (line, kind) = lines.next().ok_or_else(|| parse_error(1, "missing `cycle` or `path`"))?;
    let kind = match kind {
        "cycle" => CertificateKind::Cycle,
        "path" => CertificateKind::Path,
        _ => return Err(parse_error(line, "expected `cycle` or `path`")),
    };
    let (line, vertices) = lines.next().ok_or_else(|| parse_error(line + 1, "missing vertex line"))?;
    let vertices = numbers(line, vertices)?;
    if let Some((line, _)) = lines.next() {
        return Err(parse_error(line, "unexpected content after the vertex line"));
    }
    Ok(HamiltonCertificate { kind, vertices })
}

pub fn write_certificate(c: &HamiltonCertificate) -> String {
    format!("{}\n{}\n", c.kind, join(&c.vertices))
}

pub fn read_certificate(path: &Path) -> Result<HamiltonCertificate> {
    in_file(path, parse_certificate(&read_file(path)?))
}

pub fn parse_trace(text: &str) -> Result<Vec<TraceEntry>> {
    content_lines(text)
        .map(|(line, s)| s.parse().map_err(|e: String| parse_error(line, e)))
        .collect()
}

pub fn write_trace(trace: &[TraceEntry]) -> String {
    trace.iter().map(|e| format!("{e}\n")).collect()
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::hamiltonize;

    fn line_of(e: FormatError) -> usize {
        match e {
            FormatError::Parse { line, .. } => line,
            other => panic!("{other}"),
        }
    }

    #[test]
    fn group_round_trip() {
        let text = "# cyclic\ndegree 5\n1 2 3 4 0\n";
        let g = parse_group(text).unwrap();
        assert_eq!(g.order().unwrap(), 5);
        assert_eq!(write_group(&g), "degree 5\n1 2 3 4 0\n");
        assert_eq!(parse_group(&write_group(&g)).unwrap().order().unwrap(), 5);
    }

    #[test]
    fn group_errors_carry_line_numbers() {
        assert_eq!(line_of(parse_group("degree 3\n\n1 2\n").unwrap_err()), 3);
        assert_eq!(line_of(parse_group("degree 3\n1 1 0\n").unwrap_err()), 2);
        assert_eq!(line_of(parse_group("# x\ndegre 3\n").unwrap_err()), 2);
        assert_eq!(line_of(parse_group("degree 3\n1 x 0\n").unwrap_err()), 2);
    }

    #[test]
    fn graph_round_trip() {
        let c5 = Graph::cycle(5).unwrap();
        assert_eq!(parse_graph(&write_graph(&c5)).unwrap(), c5);
        assert_eq!(line_of(parse_graph("vertices 3\n0 1\n2 1\n").unwrap_err()), 3);
        assert_eq!(line_of(parse_graph("vertices 3\n0 3\n").unwrap_err()), 2);
        assert_eq!(line_of(parse_graph("vertices 3\n0 1 2\n").unwrap_err()), 2);
    }

    #[test]
    fn cayley_spec_round_trip() {
        let group = parse_group("degree 9\n1 2 3 4 5 6 7 8 0\n").unwrap();
        let spec = CayleySpec::from_indices(group.clone(), &[1, 8]).unwrap();
        let text = write_cayley_spec("z9.txt", &spec).unwrap();
        assert_eq!(text, "group z9.txt\nS: 1 8\n");
        let back = parse_cayley_spec(&text, |r| {
            assert_eq!(r, "z9.txt");
            Ok(group.clone())
        })
        .unwrap();
        assert_eq!(back.connection_set(), spec.connection_set());
        let err = parse_cayley_spec("group z\nS: 1 99\n", |_| Ok(group.clone())).unwrap_err();
        assert_eq!(line_of(err), 2);
    }

    #[test]
    fn certificate_round_trip() {
        let c = HamiltonCertificate::cycle(vec![0, 1, 2, 3, 4]);
        assert_eq!(write_certificate(&c), "cycle\n0 1 2 3 4\n");
        assert_eq!(parse_certificate(&write_certificate(&c)).unwrap(), c);
        assert_eq!(line_of(parse_certificate("loop\n0 1\n").unwrap_err()), 1);
        assert_eq!(line_of(parse_certificate("path\n0 -1\n").unwrap_err()), 2);
        assert_eq!(line_of(parse_certificate("path\n0 1\n2\n").unwrap_err()), 3);
    }

    #[test]
    fn trace_round_trip() {
        let action = crate::graph::tests::petersen_f20();
        let result = hamiltonize(&action).unwrap();
        let text = write_trace(&result.trace);
        assert_eq!(parse_trace(&text).unwrap(), result.trace);
        assert_eq!(line_of(parse_trace("1 hypotheses ok\nx nope y\n").unwrap_err()), 2);
    }
}
