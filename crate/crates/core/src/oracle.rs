//! Exhaustive Hamilton cycle and path search.
//!
//! This is the ground truth the pipeline is checked against, and the fallback
//! for branches whose constructions are not implemented here. The search is
//! plain depth-first backtracking from vertex 0 with neighbours in ascending
//! order, and two pruning rules that never cut a completable partial path:
//!
//! * every unvisited vertex must keep enough usable neighbours (unvisited
//!   vertices, the current end, and for cycles the start), since in any
//!   completion it has two tour neighbours among them (one if it is the end
//!   of a path);
//! * the unvisited vertices must all be reachable from the current end
//!   through unvisited vertices, since the rest of the tour is such a walk.

use crate::certificate::HamiltonCertificate;
use crate::graph::Graph;

pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Three-valued answer of an exhaustive search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(HamiltonCertificate),
    /// The whole search space was explored.
    NoneExists,
    BudgetExceeded,
}

impl SearchOutcome {
    pub fn certificate(&self) -> Option<&HamiltonCertificate> {
        match self {
            SearchOutcome::Found(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_definitive_none(&self) -> bool {
        matches!(self, SearchOutcome::NoneExists)
    }
}

pub fn find_hamilton_cycle(x: &Graph, budget: u64) -> SearchOutcome {
    let n = x.vertex_count();
    if n < 3 {
        return SearchOutcome::NoneExists;
    }
    let mut search = Search::new(x, budget, true);
    match search.run(0) {
        Some(true) => SearchOutcome::Found(HamiltonCertificate::cycle(search.path)),
        Some(false) => SearchOutcome::NoneExists,
        None => SearchOutcome::BudgetExceeded,
    }
}

pub fn find_hamilton_path(x: &Graph, budget: u64) -> SearchOutcome {
    let n = x.vertex_count();
    let mut search = Search::new(x, budget, false);
    for start in 0..n {
        match search.run(start) {
            Some(true) => return SearchOutcome::Found(HamiltonCertificate::path(search.path)),
            Some(false) => continue,
            None => return SearchOutcome::BudgetExceeded,
        }
    }
    SearchOutcome::NoneExists
}

struct Search<'a> {
    graph: &'a Graph,
    closed: bool,
    budget: u64,
    expansions: u64,
    visited: Vec<bool>,
    path: Vec<usize>,
    // scratch for the reachability check
    mark: Vec<bool>,
    stack: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(graph: &'a Graph, budget: u64, closed: bool) -> Self {
        let n = graph.vertex_count();
        Self {
            graph,
            closed,
            budget,
            expansions: 0,
            visited: vec![false; n],
            path: Vec::with_capacity(n),
            mark: vec![false; n],
            stack: Vec::with_capacity(n),
        }
    }

    /// `Some(found)` when the subtree was settled, `None` on budget exhaustion.
    fn run(&mut self, start: usize) -> Option<bool> {
        self.visited.iter_mut().for_each(|v| *v = false);
        self.path.clear();
        self.visited[start] = true;
        self.path.push(start);
        self.extend()
    }

    fn extend(&mut self) -> Option<bool> {
        self.expansions += 1;
        if self.expansions > self.budget {
            return None;
        }
        let n = self.graph.vertex_count();
        let end = *self.path.last().expect("nonempty path");
        if self.path.len() == n {
            return Some(!self.closed || self.graph.has_edge(end, self.path[0]));
        }
        if !self.feasible(end) {
            return Some(false);
        }
        for i in 0..self.graph.degree(end) {
            let w = self.graph.neighbors(end)[i];
            if self.visited[w] {
                continue;
            }
            self.visited[w] = true;
            self.path.push(w);
            match self.extend() {
                Some(true) => return Some(true),
                None => return None,
                Some(false) => {}
            }
            self.path.pop();
            self.visited[w] = false;
        }
        Some(false)
    }

    fn feasible(&mut self, end: usize) -> bool {
        let g = self.graph;
        let start = self.path[0];
        let n = g.vertex_count();
        let remaining = n - self.path.len();
        let mut deficient = 0;
        for u in 0..n {
            if self.visited[u] {
                continue;
            }
            let usable = g
                .neighbors(u)
                .iter()
                .filter(|&&w| {
                    !self.visited[w] || w == end || (self.closed && w == start && self.path.len() > 1)
                })
                .count();
            if usable < 2 {
                if self.closed || usable == 0 {
                    return false;
                }
                deficient += 1;
                if deficient > 1 {
                    return false;
                }
            }
        }
        // reachability of all unvisited vertices from `end` through unvisited ones
        self.mark.iter_mut().for_each(|m| *m = false);
        self.stack.clear();
        self.stack.push(end);
        self.mark[end] = true;
        let mut reached = 0;
        while let Some(v) = self.stack.pop() {
            for &w in g.neighbors(v) {
                if !self.visited[w] && !self.mark[w] {
                    self.mark[w] = true;
                    reached += 1;
                    self.stack.push(w);
                }
            }
        }
        if reached != remaining {
            return false;
        }
        if self.closed && self.path.len() > 1 {
            return g.neighbors(start).iter().any(|&w| !self.visited[w]);
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::verify_certificate;

    /// Brute force over all orderings, for cross-checking on tiny graphs.
    fn brute_force_has_cycle(g: &Graph) -> bool {
        fn permute(g: &Graph, rest: &mut Vec<usize>, path: &mut Vec<usize>) -> bool {
            if rest.is_empty() {
                return g.has_edge(*path.last().unwrap(), path[0]);
            }
            for i in 0..rest.len() {
                let v = rest.remove(i);
                if g.has_edge(*path.last().unwrap(), v) {
                    path.push(v);
                    if permute(g, rest, path) {
                        return true;
                    }
                    path.pop();
                }
                rest.insert(i, v);
            }
            false
        }
        let n = g.vertex_count();
        n >= 3 && permute(g, &mut (1..n).collect(), &mut vec![0])
    }

    #[test]
    fn petersen_has_no_hamilton_cycle() {
        let p = Graph::petersen();
        assert_eq!(find_hamilton_cycle(&p, DEFAULT_BUDGET), SearchOutcome::NoneExists);
        assert!(!brute_force_has_cycle(&p));
    }

    #[test]
    fn petersen_has_a_hamilton_path() {
        let p = Graph::petersen();
        let out = find_hamilton_path(&p, DEFAULT_BUDGET);
        let cert = out.certificate().expect("path exists");
        assert!(verify_certificate(&p, cert));
    }

    #[test]
    fn small_cases() {
        let c7 = Graph::cycle(7).unwrap();
        assert_eq!(
            find_hamilton_cycle(&c7, DEFAULT_BUDGET),
            SearchOutcome::Found(HamiltonCertificate::cycle((0..7).collect()))
        );
        let prism = Graph::prism(5).unwrap();
        let cert = find_hamilton_cycle(&prism, DEFAULT_BUDGET).certificate().cloned().unwrap();
        assert!(verify_certificate(&prism, &cert));
        let k2 = Graph::complete(2).unwrap();
        assert_eq!(
            find_hamilton_path(&k2, DEFAULT_BUDGET),
            SearchOutcome::Found(HamiltonCertificate::path(vec![0, 1]))
        );
        let one = Graph::empty(1).unwrap();
        assert_eq!(
            find_hamilton_path(&one, DEFAULT_BUDGET),
            SearchOutcome::Found(HamiltonCertificate::path(vec![0]))
        );
        assert_eq!(find_hamilton_cycle(&k2, DEFAULT_BUDGET), SearchOutcome::NoneExists);
    }

    #[test]
    fn budget_is_respected() {
        assert_eq!(find_hamilton_cycle(&Graph::petersen(), 5), SearchOutcome::BudgetExceeded);
    }

    #[test]
    fn paths_need_a_start_outside_vertex_zero() {
        // star K_{1,2} with centre 0: the only Hamilton path starts at a leaf
        let g = Graph::from_edges(3, &[(0, 1), (0, 2)]).unwrap();
        let cert = find_hamilton_path(&g, DEFAULT_BUDGET).certificate().cloned().unwrap();
        assert_eq!(cert.vertices, vec![1, 0, 2]);
        let star = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(find_hamilton_path(&star, DEFAULT_BUDGET), SearchOutcome::NoneExists);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(200))]
            #[test]
            fn agrees_with_brute_force(n in 3usize..8, bits in any::<u32>()) {
                let mut edges = Vec::new();
                let mut k = 0;
                for u in 0..n {
                    for v in u + 1..n {
                        if bits >> (k % 32) & 1 == 1 {
                            edges.push((u, v));
                        }
                        k += 1;
                    }
                }
                let g = Graph::from_edges(n, &edges).unwrap();
                let out = find_hamilton_cycle(&g, DEFAULT_BUDGET);
                prop_assert_eq!(out.certificate().is_some(), brute_force_has_cycle(&g));
                if let Some(c) = out.certificate() {
                    prop_assert!(verify_certificate(&g, c));
                }
            }
        }
    }
}
