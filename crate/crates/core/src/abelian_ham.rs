//! Hamilton cycles through a prescribed edge of a connected Cayley graph on
//! an abelian group of order at least 3. Such a cycle always exists, so the
//! solver is a forced-edge backtracking search and a failed search is a bug.
//!
//! The search grows a path `start = u, v, …` from the pinned edge `{u, v}`
//! and closes it back at `u`. Write `end` for the current last vertex and
//! `U` for the unvisited set. Every completion is a path `end, w₁ … w_r,
//! start` through all of `U`. The pruning rules below each cut only states
//! with no such completion.
//!
//! * Usable degree. In a completion every `w ∈ U` has two tour neighbours,
//!   both in `U ∪ {end, start}`. Fewer than two usable neighbours is fatal.
//! * Degree-2 forcing. If `w` has exactly two usable neighbours, both are
//!   its tour neighbours. If one of them is `end`, then `w = w₁`; two such
//!   vertices cannot both come first. If one is `start`, then `w = w_r`;
//!   likewise at most one. A vertex whose pair is `{end, start}` must be
//!   both, so it must be the only unvisited vertex.
//! * Connectivity. `w₁ … w_r` is a walk inside `U` starting next to `end`,
//!   so `U` must be reachable from `end` through `U`.
//! * Bipartite parity. In a bipartite graph the tour alternates colours, so
//!   among `w₁ … w_r` exactly `⌈r/2⌉` have the colour opposite to `end`, and
//!   `start` has the colour of position `r + 1`.

use thiserror::Error;

use crate::certificate::HamiltonCertificate;
use crate::graph::{CayleySpec, Edge, Graph, GraphError};

#[derive(Debug, Error)]
pub enum AbelianHamError {
    #[error("the group is not abelian")]
    NotAbelian,
    #[error("the group has order {0}; a Hamilton cycle needs at least 3 vertices")]
    TooSmall(usize),
    #[error("the connection set does not generate the group")]
    Disconnected,
    #[error("{{{0}, {1}}} is not an edge of the Cayley graph")]
    NotAnEdge(usize, usize),
    #[error("no Hamilton cycle through {{{0}, {1}}} was found; this contradicts the abelian edge theorem and indicates a solver bug")]
    SearchExhausted(usize, usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A Hamilton cycle of `Cay(G; S)` that uses the edge `e`. Vertices are
/// positions in the sorted element list. The cycle starts at the smaller
/// endpoint of `e` and continues to the larger one.
pub fn hamilton_cycle_through_edge(
    spec: &CayleySpec,
    e: Edge,
) -> Result<HamiltonCertificate, AbelianHamError> {
    let graph = checked_cayley_graph(spec)?;
    cycle_through_edge(&graph, e)
}

/// A Hamilton cycle of `Cay(G; S)` through the edge from the identity to its
/// smallest neighbour.
pub fn hamilton_cycle_abelian(spec: &CayleySpec) -> Result<HamiltonCertificate, AbelianHamError> {
    let graph = checked_cayley_graph(spec)?;
    let first = graph.neighbors(0)[0];
    cycle_through_edge(&graph, (0, first))
}

fn checked_cayley_graph(spec: &CayleySpec) -> Result<Graph, AbelianHamError> {
    let group = spec.group();
    let gens = group.generators();
    if gens.iter().any(|a| gens.iter().any(|b| !a.commutes_with(b))) {
        return Err(AbelianHamError::NotAbelian);
    }
    let order = group.order().map_err(GraphError::from)?;
    if order < 3 {
        return Err(AbelianHamError::TooSmall(order));
    }
    let (graph, _) = spec.cayley_graph()?;
    if !graph.is_connected() {
        return Err(AbelianHamError::Disconnected);
    }
    Ok(graph)
}

/// The search itself, on any graph. It succeeds whenever `graph` has a
/// Hamilton cycle through `e`; the abelian hypothesis only guarantees that.
pub fn cycle_through_edge(graph: &Graph, e: Edge) -> Result<HamiltonCertificate, AbelianHamError> {
    let (u, v) = (e.0.min(e.1), e.0.max(e.1));
    if v >= graph.vertex_count() || u == v || !graph.has_edge(u, v) {
        return Err(AbelianHamError::NotAnEdge(e.0, e.1));
    }
    if graph.vertex_count() < 3 {
        return Err(AbelianHamError::TooSmall(graph.vertex_count()));
    }
    let mut search = EdgeSearch::new(graph, u, v);
    if search.extend() {
        let cert = HamiltonCertificate::cycle(search.path);
        debug_assert!(cert.check(graph).is_ok());
        Ok(cert)
    } else {
        Err(AbelianHamError::SearchExhausted(u, v))
    }
}

struct EdgeSearch<'a> {
    graph: &'a Graph,
    colour: Option<Vec<bool>>,
    visited: Vec<bool>,
    path: Vec<usize>,
    mark: Vec<bool>,
    stack: Vec<usize>,
}

/// What the pruning pass concluded about the next step.
enum Step {
    Dead,
    Forced(usize),
    Free,
}

impl<'a> EdgeSearch<'a> {
    fn new(graph: &'a Graph, u: usize, v: usize) -> Self {
        let n = graph.vertex_count();
        let mut visited = vec![false; n];
        visited[u] = true;
        visited[v] = true;
        Self {
            graph,
            colour: graph.bipartition(),
            visited,
            path: vec![u, v],
            mark: vec![false; n],
            stack: Vec::with_capacity(n),
        }
    }

    fn extend(&mut self) -> bool {
        let n = self.graph.vertex_count();
        let end = *self.path.last().expect("nonempty path");
        if self.path.len() == n {
            return self.graph.has_edge(end, self.path[0]);
        }
        let candidates: Vec<usize> = match self.prune(end) {
            Step::Dead => return false,
            Step::Forced(w) => vec![w],
            Step::Free => self
                .graph
                .neighbors(end)
                .iter()
                .copied()
                .filter(|&w| !self.visited[w])
                .collect(),
        };
        for w in candidates {
            self.visited[w] = true;
            self.path.push(w);
            if self.extend() {
                return true;
            }
            self.path.pop();
            self.visited[w] = false;
        }
        false
    }

    fn prune(&mut self, end: usize) -> Step {
        let g = self.graph;
        let start = self.path[0];
        let n = g.vertex_count();
        let remaining = n - self.path.len();
        let mut forced_next = None;
        let mut forced_last = None;
        for w in 0..n {
            if self.visited[w] {
                continue;
            }
            let mut usable = 0;
            let (mut touches_end, mut touches_start) = (false, false);
            for &y in g.neighbors(w) {
                if !self.visited[y] {
                    usable += 1;
                } else if y == end {
                    usable += 1;
                    touches_end = true;
                } else if y == start {
                    usable += 1;
                    touches_start = true;
                }
            }
            if usable < 2 {
                return Step::Dead;
            }
            if usable == 2 {
                if touches_end && touches_start && remaining > 1 {
                    return Step::Dead;
                }
                if touches_end {
                    if forced_next.is_some() {
                        return Step::Dead;
                    }
                    forced_next = Some(w);
                }
                if touches_start {
                    if forced_last.is_some() {
                        return Step::Dead;
                    }
                    forced_last = Some(w);
                }
            }
        }
        if !self.unvisited_reachable_from(end, remaining) {
            return Step::Dead;
        }
        if let Some(colour) = &self.colour {
            let opposite = (0..n)
                .filter(|&w| !self.visited[w] && colour[w] != colour[end])
                .count();
            if opposite != remaining.div_ceil(2) {
                return Step::Dead;
            }
            let start_matches_end = colour[start] == colour[end];
            if start_matches_end != (remaining % 2 == 1) {
                return Step::Dead;
            }
        }
        match forced_next {
            Some(w) => Step::Forced(w),
            None => Step::Free,
        }
    }

    fn unvisited_reachable_from(&mut self, end: usize, remaining: usize) -> bool {
        self.mark.iter_mut().for_each(|m| *m = false);
        self.stack.clear();
        self.stack.push(end);
        self.mark[end] = true;
        let mut reached = 0;
        while let Some(v) = self.stack.pop() {
            for &w in self.graph.neighbors(v) {
                if !self.visited[w] && !self.mark[w] {
                    self.mark[w] = true;
                    reached += 1;
                    self.stack.push(w);
                }
            }
        }
        reached == remaining
    }
}
