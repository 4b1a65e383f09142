//! Lifting paths from a quotient `X/H` back to `X`, and assembling Hamilton
//! cycles from lifted paths with the Factor Group Lemma.
//!
//! The lemma: suppose `H` is a cyclic p-group acting semiregularly on `X`,
//! `x₁ … xₙ₊₁` is a path in `X` whose `H`-image is a Hamilton cycle of
//! `X/H`, and `xₙ₊₁ = γ(x₁)` for some `γ ∈ H` outside `Hᵖ`. Then `γ`
//! generates `H`, and the closed trail `P, γP, …, γ^{|H|-1}P, x₁` with
//! `P = x₁ … xₙ` is a Hamilton cycle of `X`.

use thiserror::Error;

use crate::certificate::{HamiltonCertificate, Violation};
use crate::graph::Graph;
use crate::partition::QuotientMap;
use crate::permgroup::{GroupError, PermGroup, Permutation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LiftError {
    #[error("empty path")]
    EmptyPath,
    #[error("start vertex {0} is not in the first block of the quotient path")]
    StartNotInFirstBlock(usize),
    #[error("quotient path leaves the quotient graph at position {0}")]
    InvalidQuotientPath(usize),
    #[error("no neighbour in the next block at position {0}; the partition is not the orbit map of a normal subgroup")]
    NoNeighbourInBlock(usize),
    #[error("lifted path is not a path in the graph at position {0}")]
    NotAPath(usize),
    #[error("the subgroup is trivial, so the endpoints cannot differ by a generator")]
    TrivialSubgroup,
    #[error("path end {end} is not in the H-orbit of its start {start}")]
    EndpointNotInOrbit { start: usize, end: usize },
    #[error("path end {end} is in the H^p-orbit of its start {start}")]
    EndpointInPowerOrbit { start: usize, end: usize },
    #[error("the H-image of the path is not a Hamilton cycle of the quotient")]
    QuotientNotHamiltonCycle,
    #[error("assembled trail is not a Hamilton cycle ({0}); the subgroup does not act semiregularly by automorphisms")]
    AssemblyFailed(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Lifts a walk in the quotient (a sequence of block ids, consecutive blocks
/// adjacent) to a path in `x` that starts at `start` and visits the same
/// blocks in order. Ties are broken by smallest vertex id.
pub fn lift_path(
    x: &Graph,
    q: &QuotientMap,
    quotient_path: &[usize],
    start: usize,
) -> Result<Vec<usize>, LiftError> {
    let Some(&first) = quotient_path.first() else {
        return Err(LiftError::EmptyPath);
    };
    if start >= x.vertex_count() || first >= q.block_count() || q.block_of(start) != first {
        return Err(LiftError::StartNotInFirstBlock(start));
    }
    let mut path = vec![start];
    let mut current = start;
    for (i, &block) in quotient_path.iter().enumerate().skip(1) {
        if block >= q.block_count() || block == quotient_path[i - 1] {
            return Err(LiftError::InvalidQuotientPath(i));
        }
        let next = x
            .neighbors(current)
            .iter()
            .copied()
            .find(|&w| q.block_of(w) == block)
            .ok_or(LiftError::NoNeighbourInBlock(i))?;
        path.push(next);
        current = next;
    }
    Ok(path)
}

/// Pointwise image of a path. Adjacency survives only if `g` is an
/// automorphism; callers re-check.
pub fn apply_perm_to_path(g: &Permutation, path: &[usize]) -> Vec<usize> {
    path.iter().map(|&v| g.apply(v)).collect()
}

/// Assembles a Hamilton cycle of `x` from `lifted_path = x₁ … xₙ₊₁` using the
/// cyclic p-group `h`. The degenerate case `n = 2` with a two-block quotient
/// is accepted as well. The result is verified before it is returned.
pub fn factor_group_cycle(
    x: &Graph,
    h: &PermGroup,
    p: usize,
    lifted_path: &[usize],
) -> Result<HamiltonCertificate, LiftError> {
    if lifted_path.len() < 3 {
        return Err(LiftError::QuotientNotHamiltonCycle);
    }
    for (i, w) in lifted_path.windows(2).enumerate() {
        if w[0] >= x.vertex_count() || !x.has_edge(w[0], w[1]) {
            return Err(LiftError::NotAPath(i));
        }
    }
    let order = h.order()?;
    if order == 1 {
        return Err(LiftError::TrivialSubgroup);
    }
    let n = lifted_path.len() - 1;
    let (start, end) = (lifted_path[0], lifted_path[n]);
    let gamma = h
        .elements()?
        .iter()
        .find(|g| g.apply(start) == end)
        .cloned()
        .ok_or(LiftError::EndpointNotInOrbit { start, end })?;
    if h.power_subgroup(p)?.orbit(start)?.binary_search(&end).is_ok() {
        return Err(LiftError::EndpointInPowerOrbit { start, end });
    }

    let blocks = h.orbit_partition();
    let mut seen = vec![false; blocks.block_count()];
    for &v in &lifted_path[..n] {
        let b = blocks.block_of(v);
        if seen[b] {
            return Err(LiftError::QuotientNotHamiltonCycle);
        }
        seen[b] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(LiftError::QuotientNotHamiltonCycle);
    }

    let segment = &lifted_path[..n];
    let mut trail = Vec::with_capacity(n * order);
    let mut power = Permutation::identity(h.degree());
    for _ in 0..order {
        trail.extend(apply_perm_to_path(&power, segment));
        power = gamma.compose(&power)?;
    }
    let cert = HamiltonCertificate::cycle(trail);
    cert.check(x)
        .map_err(|v: Violation| LiftError::AssemblyFailed(v.to_string()))?;
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::verify_certificate;

    fn rotation(n: usize, k: usize) -> Permutation {
        Permutation::from_images((0..n).map(|i| (i + k) % n).collect()).unwrap()
    }

    /// Oracle for the Factor Group Lemma: walk the trail directly, applying
    /// the rotation by hand instead of through the permutation machinery.
    fn trail_by_hand(n: usize, shift: usize, segment: &[usize], copies: usize) -> Vec<usize> {
        (0..copies)
            .flat_map(|i| segment.iter().map(move |&v| (v + i * shift) % n))
            .collect()
    }

    #[test]
    fn lifting_follows_blocks() {
        let c9 = Graph::cycle(9).unwrap();
        let q = QuotientMap::from_labels(&(0..9).map(|i| i % 3).collect::<Vec<_>>());
        assert_eq!(lift_path(&c9, &q, &[0, 1, 2], 0).unwrap(), vec![0, 1, 2]);
        assert_eq!(lift_path(&c9, &q, &[0], 3).unwrap(), vec![3]);
        assert_eq!(lift_path(&c9, &q, &[0, 2, 1, 0], 0).unwrap(), vec![0, 8, 7, 6]);
        let same = QuotientMap::singletons(9);
        assert_eq!(lift_path(&c9, &same, &[4, 5, 6], 4).unwrap(), vec![4, 5, 6]);
        assert_eq!(lift_path(&c9, &q, &[1, 2], 0), Err(LiftError::StartNotInFirstBlock(0)));
        assert_eq!(lift_path(&c9, &q, &[0, 0], 0), Err(LiftError::InvalidQuotientPath(1)));
    }

    #[test]
    fn lifting_fails_without_block_neighbours() {
        // A path graph with a partition that is not an orbit map.
        let p = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let q = QuotientMap::from_labels(&[0, 1, 0, 1]);
        assert_eq!(lift_path(&p, &q, &[0, 1], 2).unwrap(), vec![2, 1]);
        let q = QuotientMap::from_labels(&[0, 0, 1, 1]);
        assert_eq!(lift_path(&p, &q, &[0, 1], 0), Err(LiftError::NoNeighbourInBlock(1)));
    }

    #[test]
    fn apply_to_path() {
        assert_eq!(apply_perm_to_path(&Permutation::identity(9), &[0, 1, 2]), vec![0, 1, 2]);
        assert_eq!(apply_perm_to_path(&rotation(9, 3), &[0, 1, 2]), vec![3, 4, 5]);
    }

    #[test]
    fn factor_group_lemma_on_z9() {
        let c9 = Graph::cycle(9).unwrap();
        let h = PermGroup::new(9, vec![rotation(9, 3)]).unwrap();
        let cert = factor_group_cycle(&c9, &h, 3, &[0, 1, 2, 3]).unwrap();
        assert_eq!(cert.vertices, trail_by_hand(9, 3, &[0, 1, 2], 3));
        assert_eq!(cert.vertices, vec![0, 1, 2, 3, 4, 5, 6, 7, 8]);
        assert!(verify_certificate(&c9, &cert));
    }

    #[test]
    fn factor_group_lemma_degenerate_k2_quotient() {
        let c6 = Graph::cycle(6).unwrap();
        let h = PermGroup::new(6, vec![rotation(6, 2)]).unwrap();
        let cert = factor_group_cycle(&c6, &h, 3, &[0, 1, 2]).unwrap();
        assert_eq!(cert.vertices, trail_by_hand(6, 2, &[0, 1], 3));
        assert_eq!(cert.vertices, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn factor_group_lemma_preconditions() {
        let c9 = Graph::cycle(9).unwrap();
        let h = PermGroup::new(9, vec![rotation(9, 3)]).unwrap();
        assert_eq!(
            factor_group_cycle(&c9, &PermGroup::trivial(9), 3, &[0, 1, 2, 3]),
            Err(LiftError::TrivialSubgroup)
        );
        assert_eq!(
            factor_group_cycle(&c9, &h, 3, &[0, 1, 2]),
            Err(LiftError::EndpointNotInOrbit { start: 0, end: 2 })
        );
        assert_eq!(factor_group_cycle(&c9, &h, 3, &[0, 2, 3]), Err(LiftError::NotAPath(0)));
        // Z9 with H = Z9 and p = 3: the end 3 lies in the H^3-orbit {0, 3, 6}.
        let z9 = PermGroup::new(9, vec![rotation(9, 1)]).unwrap();
        assert_eq!(
            factor_group_cycle(&c9, &z9, 3, &[0, 1, 2, 3]),
            Err(LiftError::EndpointInPowerOrbit { start: 0, end: 3 })
        );
        // Path 0..6 revisits block 0 before closing.
        assert_eq!(
            factor_group_cycle(&c9, &h, 3, &[0, 1, 2, 3, 4, 5, 6]),
            Err(LiftError::QuotientNotHamiltonCycle)
        );
    }

    #[test]
    fn assembly_is_rechecked() {
        // H = ⟨(0 2)(1 3)⟩ acting on a 4-vertex graph it does not preserve.
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let h = PermGroup::new(4, vec![rotation(4, 2)]).unwrap();
        assert!(matches!(
            factor_group_cycle(&g, &h, 2, &[0, 1, 2]),
            Err(LiftError::AssemblyFailed(_))
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            // On a circulant Cay(Z_n, {±1}), with H generated by rotation by
            // `blocks`, the path 0..blocks lifts the quotient Hamilton cycle and
            // the assembled cycle has length |H| * blocks = n.
            #[test]
            fn fgl_on_cycles(p in prop::sample::select(vec![2usize, 3, 5, 7]), blocks in 3usize..7) {
                let n = p * blocks;
                let x = Graph::cycle(n).unwrap();
                let h = PermGroup::new(n, vec![rotation(n, blocks)]).unwrap();
                let path: Vec<usize> = (0..=blocks).collect();
                let q = h.orbit_partition();
                let quotient: Vec<usize> = path.iter().map(|&v| q.block_of(v)).collect();
                let lifted = lift_path(&x, &q, &quotient, 0).unwrap();
                prop_assert_eq!(
                    lifted.iter().map(|&v| q.block_of(v)).collect::<Vec<_>>(),
                    quotient
                );
                let cert = factor_group_cycle(&x, &h, p, &lifted).unwrap();
                prop_assert_eq!(cert.vertices.len(), n);
                prop_assert!(verify_certificate(&x, &cert));
            }

            #[test]
            fn automorphisms_map_paths_to_paths(n in 3usize..20, k in 0usize..20, len in 1usize..10) {
                let x = Graph::cycle(n).unwrap();
                let path: Vec<usize> = (0..len.min(n)).collect();
                let moved = apply_perm_to_path(&rotation(n, k % n), &path);
                for w in moved.windows(2) {
                    prop_assert!(x.has_edge(w[0], w[1]));
                }
            }
        }
    }
}
