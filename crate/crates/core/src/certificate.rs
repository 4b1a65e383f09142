//! Hamilton cycle and path certificates and their independent checker.

use std::fmt;

use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateKind {
    Cycle,
    Path,
}

impl fmt::Display for CertificateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CertificateKind::Cycle => "cycle",
            CertificateKind::Path => "path",
        })
    }
}

/// A vertex sequence claimed to be a Hamilton cycle or path.
/// Cycles do not repeat the first vertex at the end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HamiltonCertificate {
    pub kind: CertificateKind,
    pub vertices: Vec<usize>,
}

/// Why a certificate was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    WrongLength { expected: usize, found: usize },
    OutOfRange(usize),
    Repeated(usize),
    MissingEdge(usize, usize),
    TooShortForCycle,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::WrongLength { expected, found } => {
                write!(f, "expected {expected} vertices, found {found}")
            }
            Violation::OutOfRange(v) => write!(f, "vertex {v} out of range"),
            Violation::Repeated(v) => write!(f, "vertex {v} repeated"),
            Violation::MissingEdge(u, v) => write!(f, "{u}-{v} is not an edge"),
            Violation::TooShortForCycle => write!(f, "a cycle needs at least 3 vertices"),
        }
    }
}

impl HamiltonCertificate {
    pub fn cycle(vertices: Vec<usize>) -> Self {
        Self { kind: CertificateKind::Cycle, vertices }
    }

    pub fn path(vertices: Vec<usize>) -> Self {
        Self { kind: CertificateKind::Path, vertices }
    }

    /// Checks the certificate against `graph`, reporting the first problem.
    pub fn check(&self, graph: &Graph) -> Result<(), Violation> {
        let n = graph.vertex_count();
        if self.vertices.len() != n {
            return Err(Violation::WrongLength { expected: n, found: self.vertices.len() });
        }
        if self.kind == CertificateKind::Cycle && n < 3 {
            return Err(Violation::TooShortForCycle);
        }
        let mut seen = vec![false; n];
        for &v in &self.vertices {
            if v >= n {
                return Err(Violation::OutOfRange(v));
            }
            if seen[v] {
                return Err(Violation::Repeated(v));
            }
            seen[v] = true;
        }
        for w in self.vertices.windows(2) {
            if !graph.has_edge(w[0], w[1]) {
                return Err(Violation::MissingEdge(w[0], w[1]));
            }
        }
        if self.kind == CertificateKind::Cycle {
            let (first, last) = (self.vertices[0], self.vertices[n - 1]);
            if !graph.has_edge(last, first) {
                return Err(Violation::MissingEdge(last, first));
            }
        }
        Ok(())
    }

    /// Whether a cycle certificate uses the edge `{u, v}`.
    pub fn uses_edge(&self, u: usize, v: usize) -> bool {
        let n = self.vertices.len();
        let closing = self.kind == CertificateKind::Cycle && n > 2;
        (0..n).any(|i| {
            if i + 1 == n && !closing {
                return false;
            }
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
            (a, b) == (u, v) || (a, b) == (v, u)
        })
    }

    /// A cycle rewritten as the Hamilton path from `u` to `v` obtained by
    /// deleting its edge `{u, v}`.
    pub fn open_at_edge(&self, u: usize, v: usize) -> Option<Vec<usize>> {
        if self.kind != CertificateKind::Cycle || !self.uses_edge(u, v) {
            return None;
        }
        let n = self.vertices.len();
        let i = self.vertices.iter().position(|&w| w == u)?;
        if self.vertices[(i + 1) % n] == v {
            // walk backwards from u so that v comes last
            Some((0..n).map(|k| self.vertices[(i + n - k) % n]).collect())
        } else {
            Some((0..n).map(|k| self.vertices[(i + k) % n]).collect())
        }
    }

    /// Relabels every vertex through `map`.
    pub fn mapped(&self, map: &[usize]) -> Self {
        Self { kind: self.kind, vertices: self.vertices.iter().map(|&v| map[v]).collect() }
    }
}

/// Independent check of a certificate; shares no state with any constructor.
pub fn verify_certificate(graph: &Graph, cert: &HamiltonCertificate) -> bool {
    cert.check(graph).is_ok()
}
