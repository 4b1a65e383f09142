//! Simple undirected graphs, group actions on them, and the constructions the
//! theorem pipeline needs: Cayley graphs, quotients by orbit partitions,
//! induced orbit subgraphs, edge orbits and G-minimal reduction.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::partition::{PartitionError, QuotientMap};
use crate::permgroup::{GroupError, PermGroup, Permutation};

pub type Edge = (usize, usize);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("a graph needs at least one vertex")]
    NoVertices,
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for {vertex_count} vertices")]
    VertexOutOfRange { vertex: usize, vertex_count: usize },
    #[error("group degree {degree} does not match vertex count {vertex_count}")]
    DegreeMismatch { degree: usize, vertex_count: usize },
    #[error("generator {0} is not an automorphism of the graph")]
    NotAutomorphism(String),
    #[error("connection set is not closed under inverses: {0} lacks its inverse")]
    AsymmetricConnectionSet(String),
    #[error("connection set contains the identity")]
    IdentityInConnectionSet,
    #[error("connection-set element {0} is not in the group")]
    NotInGroup(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("action is not transitive")]
    NotTransitive,
    #[error("partition is not a block system for the action")]
    NotBlockSystem,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

pub type Result<T, E = GraphError> = std::result::Result<T, E>;

/// A finite simple undirected graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    pub fn empty(vertex_count: usize) -> Result<Self> {
        if vertex_count == 0 {
            return Err(GraphError::NoVertices);
        }
        Ok(Self { adjacency: vec![Vec::new(); vertex_count] })
    }

    /// Builds a graph from an edge list; repeated edges are merged.
    pub fn from_edges(vertex_count: usize, edges: &[Edge]) -> Result<Self> {
        let mut graph = Self::empty(vertex_count)?;
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= vertex_count {
                    return Err(GraphError::VertexOutOfRange { vertex: w, vertex_count });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            graph.adjacency[u].push(v);
            graph.adjacency[v].push(u);
        }
        for list in &mut graph.adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(graph)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        let edges: Vec<Edge> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_edges(n, &edges)
    }

    pub fn complete(n: usize) -> Result<Self> {
        let edges: Vec<Edge> =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Self::from_edges(n, &edges)
    }

    /// The Petersen graph as the Kneser graph K(5,2): 2-subsets of {0..4},
    /// adjacent when disjoint. Vertices are numbered in lexicographic order.
    pub fn petersen() -> Self {
        let pairs: Vec<(usize, usize)> =
            (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
        let mut edges = Vec::new();
        for (i, &(a, b)) in pairs.iter().enumerate() {
            for (j, &(c, d)) in pairs.iter().enumerate().skip(i + 1) {
                if a != c && a != d && b != c && b != d {
                    edges.push((i, j));
                }
            }
        }
        Self::from_edges(10, &edges).expect("valid edges")
    }

    /// The n-prism `C_n × K_2`: outer cycle 0..n, inner cycle n..2n, spokes.
    pub fn prism(n: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for i in 0..n {
            edges.push((i, (i + 1) % n));
            edges.push((n + i, n + (i + 1) % n));
            edges.push((i, n + i));
        }
        Self::from_edges(2 * n, &edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.vertex_count() && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// All edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for (u, list) in self.adjacency.iter().enumerate() {
            out.extend(list.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![0];
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    /// `Some(d)` if every vertex has degree `d`.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.degree(0);
        self.adjacency.iter().all(|l| l.len() == d).then_some(d)
    }

    /// Length of a shortest cycle, or `None` for a forest.
    pub fn girth(&self) -> Option<usize> {
        let n = self.vertex_count();
        let mut best: Option<usize> = None;
        for root in 0..n {
            let mut dist = vec![usize::MAX; n];
            let mut parent = vec![usize::MAX; n];
            dist[root] = 0;
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for &w in &self.adjacency[v] {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[v] + 1;
                        parent[w] = v;
                        queue.push_back(w);
                    } else if parent[v] != w {
                        let len = dist[v] + dist[w] + 1;
                        best = Some(best.map_or(len, |b| b.min(len)));
                    }
                }
            }
        }
        best
    }

    /// A proper 2-colouring if the graph is bipartite.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let n = self.vertex_count();
        let mut colour: Vec<Option<bool>> = vec![None; n];
        for root in 0..n {
            if colour[root].is_some() {
                continue;
            }
            colour[root] = Some(false);
            let mut stack = vec![root];
            while let Some(v) = stack.pop() {
                let c = colour[v].expect("coloured");
                for &w in &self.adjacency[v] {
                    match colour[w] {
                        None => {
                            colour[w] = Some(!c);
                            stack.push(w);
                        }
                        Some(cw) if cw == c => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        Some(colour.into_iter().map(|c| c.expect("all coloured")).collect())
    }

    /// The subgraph induced on `vertices`, relabelled in ascending order.
    /// Returns the graph and the map from new labels back to original ids.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<(Graph, Vec<usize>)> {
        let mut members = vertices.to_vec();
        members.sort_unstable();
        members.dedup();
        let mut relabel = HashMap::new();
        for (i, &v) in members.iter().enumerate() {
            if v >= self.vertex_count() {
                return Err(GraphError::VertexOutOfRange {
                    vertex: v,
                    vertex_count: self.vertex_count(),
                });
            }
            relabel.insert(v, i);
        }
        let mut edges = Vec::new();
        for (i, &v) in members.iter().enumerate() {
            for w in &self.adjacency[v] {
                if let Some(&j) = relabel.get(w) {
                    if i < j {
                        edges.push((i, j));
                    }
                }
            }
        }
        Ok((Graph::from_edges(members.len(), &edges)?, members))
    }

    /// The quotient by a partition. Blocks are adjacent iff some edge crosses
    /// between them; blocks with internal edges are flagged instead of looped.
    pub fn quotient(&self, q: &QuotientMap) -> Result<QuotientGraph> {
        if q.vertex_count() != self.vertex_count() {
            return Err(GraphError::VertexOutOfRange {
                vertex: q.vertex_count(),
                vertex_count: self.vertex_count(),
            });
        }
        let mut loops = vec![false; q.block_count()];
        let mut edges = Vec::new();
        for (u, v) in self.edges() {
            let (a, b) = (q.block_of(u), q.block_of(v));
            if a == b {
                loops[a] = true;
            } else {
                edges.push((a.min(b), a.max(b)));
            }
        }
        Ok(QuotientGraph { graph: Graph::from_edges(q.block_count(), &edges)?, loops })
    }

    /// Same vertex set with `removed` edges deleted.
    pub fn without_edges(&self, removed: &[Edge]) -> Graph {
        let drop: std::collections::HashSet<Edge> =
            removed.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        let kept: Vec<Edge> = self.edges().into_iter().filter(|e| !drop.contains(e)).collect();
        Graph::from_edges(self.vertex_count(), &kept).expect("subset of valid edges")
    }

    pub fn is_automorphism(&self, g: &Permutation) -> bool {
        g.degree() == self.vertex_count()
            && self.edges().iter().all(|&(u, v)| self.has_edge(g.apply(u), g.apply(v)))
    }

    /// Recognises the Petersen graph as the unique 3-regular graph of girth 5
    /// on 10 vertices.
    pub fn is_petersen(&self) -> bool {
        self.vertex_count() == 10 && self.regular_degree() == Some(3) && self.girth() == Some(5)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph {\n");
        for v in 0..self.vertex_count() {
            let _ = writeln!(out, "  {v};");
        }
        for (u, v) in self.edges() {
            let _ = writeln!(out, "  {u} -- {v};");
        }
        out.push_str("}\n");
        out
    }
}

/// A quotient graph together with the blocks that had internal edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientGraph {
    pub graph: Graph,
    pub loops: Vec<bool>,
}

impl QuotientGraph {
    pub fn has_loops(&self) -> bool {
        self.loops.iter().any(|&l| l)
    }
}

/// A permutation group acting on a graph by automorphisms.
#[derive(Debug, Clone)]
pub struct GroupAction {
    group: PermGroup,
    graph: Graph,
}

impl GroupAction {
    pub fn new(group: PermGroup, graph: Graph) -> Result<Self> {
        if group.degree() != graph.vertex_count() {
            return Err(GraphError::DegreeMismatch {
                degree: group.degree(),
                vertex_count: graph.vertex_count(),
            });
        }
        for g in group.generators() {
            if !graph.is_automorphism(g) {
                return Err(GraphError::NotAutomorphism(g.to_string()));
            }
        }
        Ok(Self { group, graph })
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn is_transitive(&self) -> bool {
        self.group.is_transitive()
    }

    /// The same graph acted on by a subgroup.
    pub fn restrict(&self, subgroup: &PermGroup) -> Result<GroupAction> {
        GroupAction::new(subgroup.clone(), self.graph.clone())
    }

    /// The same group acting on a spanning subgraph.
    pub fn with_graph(&self, graph: Graph) -> Result<GroupAction> {
        GroupAction::new(self.group.clone(), graph)
    }

    /// Edge orbits under the group, each sorted, ordered by smallest edge.
    pub fn edge_orbits(&self) -> Vec<Vec<Edge>> {
        let edges = self.graph.edges();
        let index: HashMap<Edge, usize> =
            edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut parent: Vec<usize> = (0..edges.len()).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for (i, &(u, v)) in edges.iter().enumerate() {
            for g in self.group.generators() {
                let (a, b) = (g.apply(u), g.apply(v));
                let j = index[&(a.min(b), a.max(b))];
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
        let mut classes: Vec<Vec<Edge>> = Vec::new();
        let mut class_of: HashMap<usize, usize> = HashMap::new();
        for (i, &e) in edges.iter().enumerate() {
            let root = find(&mut parent, i);
            let id = *class_of.entry(root).or_insert_with(|| {
                classes.push(Vec::new());
                classes.len() - 1
            });
            classes[id].push(e);
        }
        classes
    }

    /// Greedily deletes edge orbits, smallest edge first, while the graph
    /// stays connected. The result is a connected, group-invariant spanning
    /// subgraph in which every remaining edge orbit is a cut.
    pub fn g_minimal_reduce(&self) -> Result<Reduction> {
        if !self.graph.is_connected() {
            return Err(GraphError::Disconnected);
        }
        let mut current = self.graph.clone();
        let mut removed = Vec::new();
        let mut kept = Vec::new();
        for orbit in self.edge_orbits() {
            let candidate = current.without_edges(&orbit);
            if candidate.is_connected() {
                current = candidate;
                removed.push(orbit);
            } else {
                kept.push(orbit);
            }
        }
        let action = GroupAction::new(self.group.clone(), current)?;
        Ok(Reduction { action, removed, kept })
    }

    /// The action of the group on the blocks of `q`.
    ///
    /// `q` must be a block system (for example the orbits of a normal
    /// subgroup). The induced group may act unfaithfully on the blocks of
    /// the original group, so it is rebuilt from the block permutations.
    pub fn on_quotient(&self, q: &QuotientMap) -> Result<QuotientAction> {
        let quotient = self.graph.quotient(q)?;
        let mut gens = Vec::new();
        for g in self.group.generators() {
            let mut images = Vec::with_capacity(q.block_count());
            for block in q.blocks() {
                let target = q.block_of(g.apply(block[0]));
                if block.iter().any(|&v| q.block_of(g.apply(v)) != target) {
                    return Err(GraphError::NotBlockSystem);
                }
                images.push(target);
            }
            gens.push(Permutation::from_images(images)?);
        }
        let group = PermGroup::new(q.block_count(), gens)?;
        let action = GroupAction::new(group, quotient.graph.clone())?;
        Ok(QuotientAction { action, loops: quotient.loops })
    }

    /// Recovers a Cayley presentation when the stabilizer of `x0` is trivial.
    pub fn sabidussi_labeling(&self, x0: usize) -> Result<Option<SabidussiLabeling>> {
        if !self.is_transitive() {
            return Err(GraphError::NotTransitive);
        }
        if self.group.stabilizer(x0)?.order()? != 1 {
            return Ok(None);
        }
        let elements = self.group.elements()?;
        let vertex_of_element: Vec<usize> = elements.iter().map(|g| g.apply(x0)).collect();
        let connection_set: Vec<Permutation> = elements
            .iter()
            .filter(|s| self.graph.has_edge(x0, s.apply(x0)))
            .cloned()
            .collect();
        let spec = CayleySpec::new(self.group.clone(), connection_set)?;
        let (cayley, _) = spec.cayley_graph()?;
        let preserved = cayley.edge_count() == self.graph.edge_count()
            && cayley
                .edges()
                .iter()
                .all(|&(i, j)| self.graph.has_edge(vertex_of_element[i], vertex_of_element[j]));
        if !preserved {
            return Err(GraphError::Group(GroupError::Inconsistent(
                "Sabidussi labelling is not an isomorphism".into(),
            )));
        }
        Ok(Some(SabidussiLabeling { spec, vertex_of_element }))
    }
}

/// Output of [`GroupAction::g_minimal_reduce`].
#[derive(Debug, Clone)]
pub struct Reduction {
    pub action: GroupAction,
    pub removed: Vec<Vec<Edge>>,
    pub kept: Vec<Vec<Edge>>,
}

/// The induced action on a quotient graph, with its loop flags.
#[derive(Debug, Clone)]
pub struct QuotientAction {
    pub action: GroupAction,
    pub loops: Vec<bool>,
}

/// A Cayley presentation of a graph with a regular group action.
/// Element `i` of the group (in sorted order) labels vertex
/// `vertex_of_element[i]`.
#[derive(Debug, Clone)]
pub struct SabidussiLabeling {
    pub spec: CayleySpec,
    pub vertex_of_element: Vec<usize>,
}

/// A group together with a symmetric, identity-free connection set.
#[derive(Debug, Clone)]
pub struct CayleySpec {
    group: PermGroup,
    connection_set: Vec<Permutation>,
}

impl CayleySpec {
    pub fn new(group: PermGroup, mut connection_set: Vec<Permutation>) -> Result<Self> {
        connection_set.sort();
        connection_set.dedup();
        for s in &connection_set {
            if !group.contains(s)? {
                return Err(GraphError::NotInGroup(s.to_string()));
            }
            if s.is_identity() {
                return Err(GraphError::IdentityInConnectionSet);
            }
            if connection_set.binary_search(&s.inverse()).is_err() {
                return Err(GraphError::AsymmetricConnectionSet(s.to_string()));
            }
        }
        Ok(Self { group, connection_set })
    }

    /// Connection set given by positions in the sorted element list.
    pub fn from_indices(group: PermGroup, indices: &[usize]) -> Result<Self> {
        let elements = group.elements()?;
        let mut set = Vec::new();
        for &i in indices {
            let s = elements.get(i).ok_or(GraphError::VertexOutOfRange {
                vertex: i,
                vertex_count: elements.len(),
            })?;
            set.push(s.clone());
        }
        Self::new(group, set)
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn connection_set(&self) -> &[Permutation] {
        &self.connection_set
    }

    /// Whether the connection set generates the whole group.
    pub fn generates(&self) -> Result<bool> {
        let sub = PermGroup::new(self.group.degree(), self.connection_set.clone())?;
        Ok(sub.order()? == self.group.order()?)
    }

    /// `Cay(G; S)` on the sorted element list, with the left-regular action.
    pub fn cayley_graph(&self) -> Result<(Graph, GroupAction)> {
        let elements = self.group.elements()?;
        let index = |g: &Permutation| -> usize {
            elements.binary_search(g).expect("closed under multiplication")
        };
        let mut edges = Vec::new();
        for (i, g) in elements.iter().enumerate() {
            for s in &self.connection_set {
                let j = index(&g.compose_unchecked(s));
                if i < j {
                    edges.push((i, j));
                }
            }
        }
        let graph = Graph::from_edges(elements.len(), &edges)?;
        let mut left = Vec::new();
        for a in self.group.generators() {
            let images = elements.iter().map(|g| index(&a.compose_unchecked(g))).collect();
            left.push(Permutation::from_images(images)?);
        }
        let action = GroupAction::new(PermGroup::new(elements.len(), left)?, graph.clone())?;
        Ok((graph, action))
    }
}
