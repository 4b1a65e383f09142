//! Built-in instances: small groups with cyclic prime-power commutator
//! subgroup, Cayley graphs on seeded minimal connection sets, a few
//! non-regular actions, and the Petersen graph under `F₂₀`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{CayleySpec, Edge, Graph, GraphError, GroupAction};
use crate::permgroup::{PermGroup, Permutation};

type Result<T> = std::result::Result<T, GraphError>;

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub action: GroupAction,
    /// Present for Cayley graphs built from a connection set.
    pub spec: Option<CayleySpec>,
}

type Builder = fn() -> Result<(GroupAction, Option<CayleySpec>)>;

const ENTRIES: &[(&str, &str, Builder)] = &[
    ("d10-pentagon", "D10 acting on the pentagon", || polygon(5)),
    ("d10-prism", "Cay(D10; r, r^-1, s), the pentagonal prism", || prism(5)),
    ("d12-hexagon", "D12 acting on the hexagon", || polygon(6)),
    ("d18-nonagon", "D18 acting on the 9-cycle", || polygon(9)),
    ("d18-sampled", "D18 with a sampled minimal connection set", || sampled(dihedral(9), 18)),
    ("d18xz2-diagonal", "D18 x Z2 on Z9 x Z2, edges (a,b)~(a+-1,b+1)", || diagonal(2)),
    ("d18xz2-twisted", "D18 x Z2 on Z9 x Z2, 9-cycles joined by +-3 shifts", || twisted(2)),
    ("d18xz3-diagonal", "D18 x Z3 on Z9 x Z3, edges (a,b)~(a+-1,b+-1)", || diagonal(3)),
    ("d18xz3-twisted", "D18 x Z3 on Z9 x Z3, 9-cycles joined by +-3 shifts", || twisted(3)),
    ("d6-prism", "Cay(D6; r, r^-1, s), the triangular prism", || prism(3)),
    ("d6-sampled", "D6 with a sampled minimal connection set", || sampled(dihedral(3), 6)),
    ("d6-triangle", "D6 acting on the triangle", || polygon(3)),
    ("d8-sampled", "D8 with a sampled minimal connection set", || sampled(dihedral(4), 8)),
    ("d8-square", "D8 acting on the square", || polygon(4)),
    ("dic12-sampled", "dicyclic group of order 12, sampled connection set", || {
        sampled(dicyclic(3), 12)
    }),
    ("f20-generators", "Cay(F20; x+1, x-1, 2x, 3x)", || generator_cayley(affine(5, 2))),
    ("f20-sampled", "affine group of Z5 (order 20), sampled connection set", || {
        sampled(affine(5, 2), 20)
    }),
    ("f21-generators", "Cay(Z7 x| Z3; x+-1, 2x, 4x)", || generator_cayley(affine(7, 2))),
    ("f21-sampled", "affine group Z7 x| Z3 (order 21), sampled connection set", || {
        sampled(affine(7, 2), 21)
    }),
    ("heisenberg3-sampled", "Heisenberg group mod 3 (order 27), sampled connection set", || {
        sampled(heisenberg(3), 27)
    }),
    ("k2-z2", "Z2 acting on K2", || circulant(2, &[1])),
    ("petersen-f20", "the Petersen graph under F20", || Ok((petersen_f20(), None))),
    ("q8-regular", "Cay(Q8; +-i, +-j)", q8_regular),
    ("s3xz2-layered", "S3 x Z2 on Z3 x Z2, edges (a,b)~(a',b+1) for a != a'", || layered(2)),
    ("s3xz3-layered", "S3 x Z3 on Z3 x Z3, edges (a,b)~(a',b+-1) for a != a'", || layered(3)),
    ("s3xz4-layered", "S3 x Z4 on Z3 x Z4, edges (a,b)~(a',b+-1) for a != a'", || layered(4)),
    ("s4-regular", "Cay(S4; (0 1), (0 1 2 3)^+-1); G' = A4 is not cyclic", s4_regular),
    ("z12-sampled", "Z12 with a sampled minimal connection set", || sampled(abelian(&[12]), 112)),
    ("z2xz2xz2-cube", "the 3-cube as Cay(Z2^3; e1, e2, e3)", cube),
    ("z2xz4-sampled", "Z2 x Z4 with a sampled minimal connection set", || {
        sampled(abelian(&[2, 4]), 24)
    }),
    ("z2xz4xz4-sampled", "Z2 x Z4 x Z4 with a sampled minimal connection set", || {
        sampled(abelian(&[2, 4, 4]), 244)
    }),
    ("z2xz8-sampled", "Z2 x Z8 with a sampled minimal connection set", || {
        sampled(abelian(&[2, 8]), 28)
    }),
    ("z3xs3-sampled", "Z3 x S3 (order 18), sampled connection set", || {
        sampled(direct_product(&abelian(&[3]), &dihedral(3)), 318)
    }),
    ("z3xz3-sampled", "Z3 x Z3 with a sampled minimal connection set", || {
        sampled(abelian(&[3, 3]), 33)
    }),
    ("z4xz4-sampled", "Z4 x Z4 with a sampled minimal connection set", || {
        sampled(abelian(&[4, 4]), 44)
    }),
    ("z5-complete", "K5 as Cay(Z5; +-1, +-2)", || circulant(5, &[1, 2])),
    ("z5xz5-sampled", "Z5 x Z5 with a sampled minimal connection set", || {
        sampled(abelian(&[5, 5]), 55)
    }),
    ("z6-chord", "Cay(Z6; +-1, 3)", || circulant(6, &[1, 3])),
    ("z9-cycle", "the 9-cycle as Cay(Z9; +-1)", || circulant(9, &[1])),
];

/// Names of all built-in entries, sorted.
pub fn names() -> Vec<&'static str> {
    ENTRIES.iter().map(|(n, _, _)| *n).collect()
}

pub fn entry(name: &str) -> Option<Result<CatalogEntry>> {
    let (name, summary, build) = ENTRIES.iter().find(|(n, _, _)| *n == name)?;
    Some(build().map(|(action, spec)| CatalogEntry { name, summary, action, spec }))
}

/// Every entry, sorted by name.
pub fn catalog() -> Result<Vec<CatalogEntry>> {
    names().into_iter().map(|n| entry(n).expect("listed")).collect()
}

fn rotation(n: usize, k: usize) -> Permutation {
    Permutation::from_images((0..n).map(|i| (i + k) % n).collect()).expect("bijection")
}

fn images(n: usize, f: impl Fn(usize) -> usize) -> Permutation {
    Permutation::from_images((0..n).map(f).collect()).expect("bijection")
}

/// `Z_{n₁} × … × Z_{n_r}` acting regularly on itself (mixed radix points).
pub fn abelian(factors: &[usize]) -> PermGroup {
    let order: usize = factors.iter().product();
    let mut gens = Vec::new();
    let mut stride = 1;
    for &n in factors {
        let s = stride;
        gens.push(images(order, |v| {
            let digit = v / s % n;
            v - digit * s + (digit + 1) % n * s
        }));
        stride *= n;
    }
    PermGroup::new(order, gens).expect("same degree")
}

/// The dihedral group of order `2n` acting on the vertices of an `n`-gon.
pub fn dihedral(n: usize) -> PermGroup {
    PermGroup::new(n, vec![rotation(n, 1), images(n, |i| (n - i) % n)]).expect("same degree")
}

/// The dicyclic group `⟨a, x | a^{2n}, x² = aⁿ, xax⁻¹ = a⁻¹⟩` of order
/// `4n`, acting regularly. `dicyclic(2)` is the quaternion group.
pub fn dicyclic(n: usize) -> PermGroup {
    let m = 2 * n;
    // element a^i x^j is encoded as i + m·j
    let mul = move |u: usize, v: usize| {
        let (i, j, k, l) = (u % m, u / m, v % m, v / m);
        let mut a = if j == 1 { (i + m - k) % m } else { (i + k) % m };
        let mut x = j + l;
        if x == 2 {
            a = (a + n) % m;
            x = 0;
        }
        a + m * x
    };
    regular(2 * m, mul, &[1, m])
}

/// The Heisenberg group of upper unitriangular 3×3 matrices mod `p`.
pub fn heisenberg(p: usize) -> PermGroup {
    let decode = move |v: usize| (v % p, v / p % p, v / (p * p));
    let mul = move |u: usize, v: usize| {
        let ((a, b, c), (d, e, f)) = (decode(u), decode(v));
        (a + d) % p + p * ((b + e) % p) + p * p * ((c + f + a * e) % p)
    };
    regular(p * p * p, mul, &[1, p])
}

/// `x ↦ ax + b` over `Z_p`, with `a` in the subgroup generated by `unit`.
pub fn affine(p: usize, unit: usize) -> PermGroup {
    PermGroup::new(p, vec![rotation(p, 1), images(p, |x| x * unit % p)]).expect("same degree")
}

pub fn symmetric(n: usize) -> PermGroup {
    let transposition = Permutation::from_cycles(n, &[&[0, 1]]).expect("valid");
    PermGroup::new(n, vec![transposition, rotation(n, 1)]).expect("same degree")
}

/// `a × b` acting on pairs `(i, j) ↦ i + deg(a)·j`.
pub fn direct_product(a: &PermGroup, b: &PermGroup) -> PermGroup {
    let (n, m) = (a.degree(), b.degree());
    let mut gens = Vec::new();
    for g in a.generators() {
        gens.push(images(n * m, |v| g.apply(v % n) + n * (v / n)));
    }
    for h in b.generators() {
        gens.push(images(n * m, |v| v % n + n * h.apply(v / n)));
    }
    PermGroup::new(n * m, gens).expect("same degree")
}

/// Left-regular representation of a group given by a multiplication rule on
/// `0..order`, with `0` the identity.
fn regular(order: usize, mul: impl Fn(usize, usize) -> usize, gens: &[usize]) -> PermGroup {
    let perms = gens.iter().map(|&g| images(order, |v| mul(g, v))).collect();
    PermGroup::new(order, perms).expect("same degree")
}

/// A minimal symmetric generating set: inverse-closed pairs are added in
/// random order until they generate, then dropped while they still do.
pub fn sample_connection_set(group: &PermGroup, rng: &mut ChaCha8Rng) -> Vec<Permutation> {
    let order = group.order().expect("desk-scale group");
    let mut pool: Vec<Permutation> =
        group.elements().expect("desk-scale group").iter().filter(|g| !g.is_identity()).cloned().collect();
    pool.shuffle(rng);
    let generates = |set: &[Permutation]| -> bool {
        !set.is_empty()
            && PermGroup::new(group.degree(), set.to_vec()).and_then(|h| h.order()).ok() == Some(order)
    };
    let flatten = |pairs: &[Permutation]| -> Vec<Permutation> {
        let mut set: Vec<Permutation> = pairs.iter().flat_map(|s| [s.clone(), s.inverse()]).collect();
        set.sort();
        set.dedup();
        set
    };
    let mut chosen: Vec<Permutation> = Vec::new();
    for s in pool {
        if order == 1 || generates(&flatten(&chosen)) {
            break;
        }
        if !chosen.iter().any(|c| *c == s || *c == s.inverse()) {
            chosen.push(s);
        }
    }
    let mut order_of_removal: Vec<usize> = (0..chosen.len()).collect();
    order_of_removal.shuffle(rng);
    let mut keep = vec![true; chosen.len()];
    for i in order_of_removal {
        keep[i] = false;
        let rest: Vec<Permutation> =
            chosen.iter().zip(&keep).filter(|(_, &k)| k).map(|(s, _)| s.clone()).collect();
        if !generates(&flatten(&rest)) {
            keep[i] = true;
        }
    }
    let kept: Vec<Permutation> =
        chosen.into_iter().zip(keep).filter(|(_, k)| *k).map(|(s, _)| s).collect();
    flatten(&kept)
}

fn cayley(spec: CayleySpec) -> Result<(GroupAction, Option<CayleySpec>)> {
    let (_, action) = spec.cayley_graph()?;
    Ok((action, Some(spec)))
}

fn sampled(group: PermGroup, seed: u64) -> Result<(GroupAction, Option<CayleySpec>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let set = sample_connection_set(&group, &mut rng);
    cayley(CayleySpec::new(group, set)?)
}

fn circulant(n: usize, jumps: &[usize]) -> Result<(GroupAction, Option<CayleySpec>)> {
    let group = abelian(&[n]);
    let set = jumps.iter().flat_map(|&j| [rotation(n, j), rotation(n, (n - j) % n)]).collect();
    cayley(CayleySpec::new(group, set)?)
}

fn cube() -> Result<(GroupAction, Option<CayleySpec>)> {
    let group = abelian(&[2, 2, 2]);
    let set = group.generators().to_vec();
    cayley(CayleySpec::new(group, set)?)
}

fn prism(n: usize) -> Result<(GroupAction, Option<CayleySpec>)> {
    let group = dihedral(n);
    let s = group.generators()[1].clone();
    cayley(CayleySpec::new(group, vec![rotation(n, 1), rotation(n, n - 1), s])?)
}

/// The Cayley graph on the group's own generators and their inverses.
fn generator_cayley(group: PermGroup) -> Result<(GroupAction, Option<CayleySpec>)> {
    let set = group.generators().iter().flat_map(|g| [g.clone(), g.inverse()]).collect();
    cayley(CayleySpec::new(group, set)?)
}

fn q8_regular() -> Result<(GroupAction, Option<CayleySpec>)> {
    let group = dicyclic(2);
    let (i, j) = (group.generators()[0].clone(), group.generators()[1].clone());
    let set = vec![i.clone(), i.inverse(), j.clone(), j.inverse()];
    cayley(CayleySpec::new(group, set)?)
}

fn s4_regular() -> Result<(GroupAction, Option<CayleySpec>)> {
    let group = symmetric(4);
    let set = vec![
        Permutation::from_cycles(4, &[&[0, 1]]).expect("valid"),
        rotation(4, 1),
        rotation(4, 3),
    ];
    cayley(CayleySpec::new(group, set)?)
}

fn polygon(n: usize) -> Result<(GroupAction, Option<CayleySpec>)> {
    Ok((GroupAction::new(dihedral(n), Graph::cycle(n)?)?, None))
}

/// A graph on `Z_n × Z_k` (point `a + n·b`) from a rule listing the
/// neighbours of `(a, b)`.
fn product_graph(n: usize, k: usize, neighbours: impl Fn(usize, usize) -> Vec<(usize, usize)>) -> Result<Graph> {
    let mut edges: Vec<Edge> = Vec::new();
    for b in 0..k {
        for a in 0..n {
            for (c, d) in neighbours(a, b) {
                let (u, v) = (a + n * b, c % n + n * (d % k));
                if u < v {
                    edges.push((u, v));
                }
            }
        }
    }
    Graph::from_edges(n * k, &edges)
}

fn layered(k: usize) -> Result<(GroupAction, Option<CayleySpec>)> {
    let group = direct_product(&symmetric(3), &abelian(&[k]));
    let graph = product_graph(3, k, |a, b| {
        (0..3)
            .filter(|&c| c != a)
            .flat_map(|c| [(c, b + 1), (c, b + k - 1)])
            .collect()
    })?;
    Ok((GroupAction::new(group, graph)?, None))
}

fn diagonal(k: usize) -> Result<(GroupAction, Option<CayleySpec>)> {
    let group = direct_product(&dihedral(9), &abelian(&[k]));
    let graph = product_graph(9, k, |a, b| {
        vec![(a + 1, b + 1), (a + 8, b + 1), (a + 1, b + k - 1), (a + 8, b + k - 1)]
    })?;
    Ok((GroupAction::new(group, graph)?, None))
}

fn twisted(k: usize) -> Result<(GroupAction, Option<CayleySpec>)> {
    let group = direct_product(&dihedral(9), &abelian(&[k]));
    let graph = product_graph(9, k, |a, b| {
        vec![
            (a + 1, b),
            (a + 8, b),
            (a + 3, b + 1),
            (a + 6, b + 1),
            (a + 3, b + k - 1),
            (a + 6, b + k - 1),
        ]
    })?;
    Ok((GroupAction::new(group, graph)?, None))
}

/// `F₂₀ = ⟨x ↦ x+1, x ↦ 2x⟩` acting on the 2-subsets of `Z₅`, which are the
/// vertices of [`Graph::petersen`].
pub fn petersen_f20() -> GroupAction {
    let pairs: Vec<(usize, usize)> = (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
    let on_pairs = |f: &dyn Fn(usize) -> usize| {
        images(10, |i| {
            let (a, b) = pairs[i];
            let (c, d) = (f(a), f(b));
            pairs.iter().position(|&p| p == (c.min(d), c.max(d))).expect("pair")
        })
    };
    let group = PermGroup::new(10, vec![on_pairs(&|x| (x + 1) % 5), on_pairs(&|x| 2 * x % 5)])
        .expect("same degree");
    GroupAction::new(group, Graph::petersen()).expect("F20 preserves disjointness")
}

/// Invariant factor lists `d₁ | d₂ | … | d_r` with product `n`, one per
/// abelian group of order `n`.
pub fn abelian_invariant_factors(n: usize) -> Vec<Vec<usize>> {
    fn extend(rest: usize, smallest: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 1 {
            out.push(prefix.clone());
            return;
        }
        for d in smallest.max(2)..=rest {
            let divides_prev = prefix.last().is_none_or(|&p| d % p == 0);
            if rest % d == 0 && divides_prev {
                prefix.push(d);
                extend(rest / d, d, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(n, 2, &mut Vec::new(), &mut out);
    out
}

/// Seeded sample of connected abelian Cayley graphs: every abelian group of
/// order in `orders`, `samples` connection sets each (duplicates dropped).
pub fn abelian_sweep(orders: std::ops::RangeInclusive<usize>, samples: usize) -> Vec<(String, CayleySpec)> {
    let mut out = Vec::new();
    for n in orders {
        for factors in abelian_invariant_factors(n) {
            let group = abelian(&factors);
            let label = factors.iter().map(|d| format!("z{d}")).collect::<Vec<_>>().join("x");
            let mut seen: Vec<Vec<Permutation>> = Vec::new();
            for i in 0..samples {
                let mut rng = ChaCha8Rng::seed_from_u64((n * 1000 + i) as u64);
                let set = sample_connection_set(&group, &mut rng);
                if seen.contains(&set) {
                    continue;
                }
                seen.push(set.clone());
                let spec = CayleySpec::new(group.clone(), set).expect("sampled from the group");
                out.push((format!("{label}-{i}"), spec));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_is_large_and_sorted() {
        let names = names();
        assert!(names.len() >= 25);
        assert!(names.windows(2).all(|w| w[0] < w[1]));
        assert!(entry("nosuch").is_none());
    }

    #[test]
    fn group_orders() {
        assert_eq!(dicyclic(2).order().unwrap(), 8);
        assert_eq!(dicyclic(2).commutator_subgroup().unwrap().order().unwrap(), 2);
        assert_eq!(dicyclic(3).order().unwrap(), 12);
        assert!(!dicyclic(3).is_abelian());
        let h = heisenberg(3);
        assert_eq!(h.order().unwrap(), 27);
        assert_eq!(h.commutator_subgroup().unwrap().order().unwrap(), 3);
        assert_eq!(affine(5, 2).order().unwrap(), 20);
        assert_eq!(affine(7, 2).order().unwrap(), 21);
        assert_eq!(abelian(&[2, 4, 4]).order().unwrap(), 32);
        assert_eq!(direct_product(&symmetric(3), &abelian(&[4])).order().unwrap(), 24);
        assert_eq!(symmetric(4).order().unwrap(), 24);
    }

    #[test]
    fn invariant_factors() {
        assert_eq!(abelian_invariant_factors(8), vec![vec![2, 2, 2], vec![2, 4], vec![8]]);
        assert_eq!(abelian_invariant_factors(12), vec![vec![2, 6], vec![12]]);
        assert_eq!(abelian_invariant_factors(7), vec![vec![7]]);
        let total: usize = (3..=32).map(|n| abelian_invariant_factors(n).len()).sum();
        assert_eq!(total, 53);
    }

    #[test]
    fn sampled_sets_are_minimal_and_generating() {
        let group = abelian(&[2, 4, 4]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let set = sample_connection_set(&group, &mut rng);
        let spec = CayleySpec::new(group.clone(), set.clone()).unwrap();
        assert!(spec.generates().unwrap());
        for s in &set {
            let rest: Vec<_> = set.iter().filter(|t| *t != s && **t != s.inverse()).cloned().collect();
            let sub = PermGroup::new(group.degree(), rest).unwrap();
            assert!(sub.order().unwrap() < 32);
        }
        let mut again = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(sample_connection_set(&group, &mut again), set);
    }

    #[test]
    fn every_entry_builds() {
        for e in catalog().unwrap() {
            assert!(e.action.graph().is_connected(), "{}", e.name);
            assert!(e.action.is_transitive(), "{}", e.name);
            assert!(e.action.graph().vertex_count() <= 64, "{}", e.name);
            if let Some(spec) = &e.spec {
                assert!(spec.generates().unwrap(), "{}", e.name);
            }
        }
    }
}
