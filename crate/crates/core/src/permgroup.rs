//! Finite permutation groups at desk scale.
//!
//! Groups are given by generators and enumerated lazily. Every operation is
//! exact: element lists are computed by closure and cached per value, so the
//! engine is only meant for groups up to a configurable order bound
//! (see [`max_group_order`]).

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::partition::QuotientMap;

pub const DEFAULT_MAX_GROUP_ORDER: usize = 100_000;

/// Environment variable overriding the element-enumeration bound.
pub const MAX_ORDER_ENV: &str = "HAMLIFT_MAX_GROUP_ORDER";

static MAX_ORDER: AtomicUsize = AtomicUsize::new(0);

/// The largest group order the engine will enumerate.
///
/// Read once from `HAMLIFT_MAX_GROUP_ORDER` unless set explicitly.
pub fn max_group_order() -> usize {
    let current = MAX_ORDER.load(Ordering::Relaxed);
    if current != 0 {
        return current;
    }
    let bound = std::env::var(MAX_ORDER_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(DEFAULT_MAX_GROUP_ORDER);
    // Another thread may race us here; both compute the same value.
    MAX_ORDER.store(bound, Ordering::Relaxed);
    bound
}

pub fn set_max_group_order(bound: usize) {
    MAX_ORDER.store(bound.max(1), Ordering::Relaxed);
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("degree must be positive")]
    ZeroDegree,
    #[error("image table is not a bijection on 0..{degree}")]
    NotBijection { degree: usize },
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("point {point} out of range for degree {degree}")]
    PointOutOfRange { point: usize, degree: usize },
    #[error("group too large: more than {bound} elements")]
    TooLarge { bound: usize },
    #[error("subgroup is not contained in the ambient group")]
    NotContained,
    #[error("subgroup is not normal in the ambient group")]
    NotNormal,
    #[error("group of order {order} is not cyclic of prime-power order")]
    NotCyclicPrimePower { order: usize },
    #[error("{0}")]
    Inconsistent(String),
}

pub type Result<T, E = GroupError> = std::result::Result<T, E>;

/// A bijection on `0..degree`, stored as its image table.
///
/// The derived ordering is lexicographic on image tables, which is the
/// canonical element order used throughout the crate.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Self { images: (0..degree).collect() }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let degree = images.len();
        if degree == 0 {
            return Err(GroupError::ZeroDegree);
        }
        let mut seen = vec![false; degree];
        for &i in &images {
            if i >= degree || seen[i] {
                return Err(GroupError::NotBijection { degree });
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    /// Builds a permutation from disjoint cycles, e.g. `&[&[0, 1, 2], &[3, 4]]`.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Result<Self> {
        if degree == 0 {
            return Err(GroupError::ZeroDegree);
        }
        let mut images: Vec<usize> = (0..degree).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (i, &a) in cycle.iter().enumerate() {
                let b = cycle[(i + 1) % cycle.len()];
                if a >= degree || b >= degree {
                    return Err(GroupError::PointOutOfRange { point: a.max(b), degree });
                }
                if touched[a] {
                    return Err(GroupError::NotBijection { degree });
                }
                touched[a] = true;
                images[a] = b;
            }
        }
        Self::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, v: usize) -> usize {
        self.images[v]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`: the permutation sending `v` to `self(other(v))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(GroupError::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: other.images.iter().map(|&v| self.images[v]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Permutation { images }
    }

    pub fn pow(&self, exp: usize) -> Permutation {
        let mut result = Permutation::identity(self.degree());
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = result.compose_unchecked(&base);
            }
            base = base.compose_unchecked(&base);
            e >>= 1;
        }
        result
    }

    /// `g ∘ self ∘ g⁻¹`.
    pub fn conjugate_by(&self, g: &Permutation) -> Permutation {
        g.compose_unchecked(self).compose_unchecked(&g.inverse())
    }

    /// `self⁻¹ ∘ other⁻¹ ∘ self ∘ other`.
    pub fn commutator(&self, other: &Permutation) -> Permutation {
        self.inverse()
            .compose_unchecked(&other.inverse())
            .compose_unchecked(self)
            .compose_unchecked(other)
    }

    pub fn order(&self) -> usize {
        let mut power = self.clone();
        let mut n = 1;
        while !power.is_identity() {
            power = power.compose_unchecked(self);
            n += 1;
        }
        n
    }

    pub fn commutes_with(&self, other: &Permutation) -> bool {
        self.compose_unchecked(other) == other.compose_unchecked(self)
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut v = self.images[start];
            while v != start {
                seen[v] = true;
                cycle.push(v);
                v = self.images[v];
            }
            out.push(cycle);
        }
        out
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for cycle in cycles {
            write!(f, "(")?;
            for (i, v) in cycle.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Result of [`PermGroup::cyclic_prime_power_structure`].
///
/// The trivial group is reported with `exponent == 0` and no prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicPrimePower {
    pub prime: Option<usize>,
    pub exponent: u32,
    pub generator: Permutation,
}

impl CyclicPrimePower {
    pub fn order(&self) -> usize {
        self.prime.map_or(1, |p| p.pow(self.exponent))
    }
}

/// A finite permutation group given by its degree and generators.
///
/// The sorted element list is computed on first use and cached; the cache is
/// a `OnceLock`, so concurrent readers see it either absent or complete.
#[derive(Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    elements: OnceLock<Arc<[Permutation]>>,
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PermGroup")
            .field("degree", &self.degree)
            .field("generators", &self.generators)
            .field("order", &self.elements.get().map(|e| e.len()))
            .finish()
    }
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        if degree == 0 {
            return Err(GroupError::ZeroDegree);
        }
        for g in &generators {
            if g.degree() != degree {
                return Err(GroupError::DegreeMismatch { left: degree, right: g.degree() });
            }
        }
        let generators = if generators.is_empty() {
            vec![Permutation::identity(degree)]
        } else {
            generators
        };
        Ok(Self { degree, generators, elements: OnceLock::new() })
    }

    pub fn trivial(degree: usize) -> Self {
        Self::new(degree, vec![Permutation::identity(degree)]).expect("positive degree")
    }

    /// Wraps an element set already known to be a subgroup.
    ///
    /// A small generating set is chosen greedily; the input is rejected if its
    /// closure is larger than the set itself.
    pub fn from_elements(degree: usize, mut elements: Vec<Permutation>) -> Result<Self> {
        elements.sort();
        elements.dedup();
        let mut generators = Vec::new();
        let mut closure: HashSet<Permutation> = HashSet::new();
        closure.insert(Permutation::identity(degree));
        for e in &elements {
            if e.degree() != degree {
                return Err(GroupError::DegreeMismatch { left: degree, right: e.degree() });
            }
            if !closure.contains(e) {
                generators.push(e.clone());
                closure = close(degree, &generators, elements.len() + 1)?.into_iter().collect();
            }
        }
        if closure.len() != elements.len() {
            return Err(GroupError::Inconsistent(format!(
                "element set of size {} is not closed (closure has {})",
                elements.len(),
                closure.len()
            )));
        }
        let group = Self::new(degree, generators)?;
        let _ = group.elements.set(elements.into());
        Ok(group)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    /// All elements, sorted lexicographically by image table.
    pub fn elements(&self) -> Result<&[Permutation]> {
        if let Some(e) = self.elements.get() {
            return Ok(e);
        }
        let mut list = close(self.degree, &self.generators, max_group_order())?;
        list.sort();
        let _ = self.elements.set(list.into());
        Ok(self.elements.get().expect("just set"))
    }

    pub fn order(&self) -> Result<usize> {
        Ok(self.elements()?.len())
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.iter().all(Permutation::is_identity)
    }

    pub fn contains(&self, g: &Permutation) -> Result<bool> {
        if g.degree() != self.degree {
            return Ok(false);
        }
        Ok(self.elements()?.binary_search(g).is_ok())
    }

    /// Position of `g` in the sorted element list.
    pub fn index_of(&self, g: &Permutation) -> Result<Option<usize>> {
        Ok(self.elements()?.binary_search(g).ok())
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> Result<bool> {
        if self.degree != other.degree {
            return Ok(false);
        }
        for g in &self.generators {
            if !other.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Element-set equality.
    pub fn same_elements(&self, other: &PermGroup) -> Result<bool> {
        Ok(self.degree == other.degree && self.elements()? == other.elements()?)
    }

    pub fn is_abelian(&self) -> bool {
        self.generators
            .iter()
            .enumerate()
            .all(|(i, a)| self.generators[i + 1..].iter().all(|b| a.commutes_with(b)))
    }

    fn check_point(&self, x: usize) -> Result<()> {
        if x >= self.degree {
            return Err(GroupError::PointOutOfRange { point: x, degree: self.degree });
        }
        Ok(())
    }

    /// The orbit of `x`, sorted ascending.
    pub fn orbit(&self, x: usize) -> Result<Vec<usize>> {
        self.check_point(x)?;
        let mut seen = vec![false; self.degree];
        seen[x] = true;
        let mut queue = VecDeque::from([x]);
        let mut orbit = vec![x];
        while let Some(v) = queue.pop_front() {
            for g in &self.generators {
                let w = g.apply(v);
                if !seen[w] {
                    seen[w] = true;
                    orbit.push(w);
                    queue.push_back(w);
                }
            }
        }
        orbit.sort_unstable();
        Ok(orbit)
    }

    /// The orbits as a quotient map, blocks ordered by smallest member.
    pub fn orbit_partition(&self) -> QuotientMap {
        let mut label = vec![usize::MAX; self.degree];
        for start in 0..self.degree {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = start;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for g in &self.generators {
                    let w = g.apply(v);
                    if label[w] == usize::MAX {
                        label[w] = start;
                        queue.push_back(w);
                    }
                }
            }
        }
        QuotientMap::from_labels(&label)
    }

    pub fn is_transitive(&self) -> bool {
        self.orbit(0).map(|o| o.len() == self.degree).unwrap_or(false)
    }

    /// The point stabilizer of `x`, generated by Schreier generators.
    ///
    /// Enforces orbit–stabilizer: `|orbit(x)| · |G_x| = |G|`.
    pub fn stabilizer(&self, x: usize) -> Result<PermGroup> {
        self.check_point(x)?;
        // transversal[y] maps x to y
        let mut transversal: HashMap<usize, Permutation> = HashMap::new();
        transversal.insert(x, Permutation::identity(self.degree));
        let mut queue = VecDeque::from([x]);
        let mut orbit = vec![x];
        while let Some(y) = queue.pop_front() {
            let ty = transversal[&y].clone();
            for g in &self.generators {
                let z = g.apply(y);
                if let std::collections::hash_map::Entry::Vacant(slot) = transversal.entry(z) {
                    slot.insert(g.compose_unchecked(&ty));
                    orbit.push(z);
                    queue.push_back(z);
                }
            }
        }
        let mut schreier: Vec<Permutation> = Vec::new();
        for &y in &orbit {
            let ty = &transversal[&y];
            for g in &self.generators {
                let z = g.apply(y);
                let s = transversal[&z].inverse().compose_unchecked(g).compose_unchecked(ty);
                if !s.is_identity() {
                    schreier.push(s);
                }
            }
        }
        schreier.sort();
        schreier.dedup();
        let stab = PermGroup::new(self.degree, schreier)?;
        let (order, stab_order) = (self.order()?, stab.order()?);
        if orbit.len() * stab_order != order {
            return Err(GroupError::Inconsistent(format!(
                "orbit–stabilizer failed at {x}: {} * {stab_order} != {order}",
                orbit.len()
            )));
        }
        Ok(stab)
    }

    /// The subgroup generated by `self.generators ∪ extra`.
    pub fn join(&self, extra: &[Permutation]) -> Result<PermGroup> {
        let mut gens = self.generators.clone();
        gens.extend(extra.iter().cloned());
        PermGroup::new(self.degree, gens)
    }

    /// The smallest normal subgroup of `self` containing `h`.
    pub fn normal_closure(&self, h: &PermGroup) -> Result<PermGroup> {
        if !h.is_subgroup_of(self)? {
            return Err(GroupError::NotContained);
        }
        let mut gens: Vec<Permutation> =
            h.generators.iter().filter(|g| !g.is_identity()).cloned().collect();
        let mut closure = PermGroup::new(self.degree, gens.clone())?;
        loop {
            let mut added = false;
            let current = gens.clone();
            for n in &current {
                for g in &self.generators {
                    let c = n.conjugate_by(g);
                    if !closure.contains(&c)? {
                        gens.push(c);
                        closure = PermGroup::new(self.degree, gens.clone())?;
                        added = true;
                    }
                }
            }
            if !added {
                return Ok(closure);
            }
        }
    }

    /// Whether `h` is normal in `self`. Errors if `h` is not a subgroup.
    pub fn is_normal(&self, h: &PermGroup) -> Result<bool> {
        if !h.is_subgroup_of(self)? {
            return Err(GroupError::NotContained);
        }
        for n in &h.generators {
            for g in &self.generators {
                if !h.contains(&n.conjugate_by(g))? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The commutator subgroup, as the normal closure of generator commutators.
    pub fn commutator_subgroup(&self) -> Result<PermGroup> {
        let mut commutators = Vec::new();
        for (i, a) in self.generators.iter().enumerate() {
            for b in &self.generators[i + 1..] {
                let c = a.commutator(b);
                if !c.is_identity() {
                    commutators.push(c);
                }
            }
        }
        commutators.sort();
        commutators.dedup();
        let seed = PermGroup::new(self.degree, commutators)?;
        let derived = self.normal_closure(&seed)?;
        if !self.is_normal(&derived)? {
            return Err(GroupError::Inconsistent("commutator subgroup is not normal".into()));
        }
        for (i, a) in self.generators.iter().enumerate() {
            for b in &self.generators[i + 1..] {
                if !derived.contains(&a.commutator(b))? {
                    return Err(GroupError::Inconsistent(
                        "quotient by commutator subgroup is not abelian".into(),
                    ));
                }
            }
        }
        Ok(derived)
    }

    /// `Some` iff the group is cyclic of prime-power order (including order 1).
    pub fn cyclic_prime_power_structure(&self) -> Result<Option<CyclicPrimePower>> {
        let order = self.order()?;
        if order == 1 {
            return Ok(Some(CyclicPrimePower {
                prime: None,
                exponent: 0,
                generator: Permutation::identity(self.degree),
            }));
        }
        let Some((p, k)) = prime_power(order) else {
            return Ok(None);
        };
        let generator = self.elements()?.iter().find(|g| g.order() == order).cloned();
        Ok(generator.map(|generator| CyclicPrimePower {
            prime: Some(p),
            exponent: k,
            generator,
        }))
    }

    /// `⟨h^p : h ∈ self⟩`.
    pub fn power_subgroup(&self, p: usize) -> Result<PermGroup> {
        let mut gens: Vec<Permutation> = self
            .elements()?
            .iter()
            .map(|h| h.pow(p))
            .filter(|g| !g.is_identity())
            .collect();
        gens.sort();
        gens.dedup();
        PermGroup::new(self.degree, gens)
    }

    /// The chain `{e} = H₀ < H₁ < … < Hₖ = self` of a cyclic p-group.
    pub fn cyclic_subgroup_chain(&self, p: usize) -> Result<Vec<PermGroup>> {
        let order = self.order()?;
        let Some(structure) = self.cyclic_prime_power_structure()? else {
            return Err(GroupError::NotCyclicPrimePower { order });
        };
        if structure.exponent == 0 {
            return Ok(vec![PermGroup::trivial(self.degree)]);
        }
        if structure.prime != Some(p) {
            return Err(GroupError::NotCyclicPrimePower { order });
        }
        let k = structure.exponent;
        Ok((0..=k)
            .map(|i| {
                let g = structure.generator.pow(p.pow(k - i));
                PermGroup::new(self.degree, vec![g]).expect("same degree")
            })
            .collect())
    }

    /// The subgroup `a·b` of `self`; `a` must be normal in `self`.
    pub fn product_subgroup(&self, a: &PermGroup, b: &PermGroup) -> Result<PermGroup> {
        if !b.is_subgroup_of(self)? {
            return Err(GroupError::NotContained);
        }
        if !self.is_normal(a)? {
            return Err(GroupError::NotNormal);
        }
        let mut set: HashSet<Permutation> = HashSet::new();
        for x in a.elements()? {
            for y in b.elements()? {
                set.insert(x.compose_unchecked(y));
            }
        }
        let meet = a.intersection(b)?.order()?;
        let expected = a.order()? * b.order()? / meet;
        if set.len() != expected {
            return Err(GroupError::Inconsistent(format!(
                "product set has {} elements, expected {expected}",
                set.len()
            )));
        }
        let mut gens: Vec<Permutation> = a.generators.clone();
        gens.extend(b.generators.iter().cloned());
        let product = PermGroup::new(self.degree, gens)?;
        if product.order()? != set.len() {
            return Err(GroupError::Inconsistent("product set is not a subgroup".into()));
        }
        Ok(product)
    }

    pub fn intersection(&self, other: &PermGroup) -> Result<PermGroup> {
        if self.degree != other.degree {
            return Err(GroupError::DegreeMismatch { left: self.degree, right: other.degree });
        }
        let mut common = Vec::new();
        for g in self.elements()? {
            if other.contains(g)? {
                common.push(g.clone());
            }
        }
        PermGroup::from_elements(self.degree, common)
    }

    /// `g · self · g⁻¹`.
    pub fn conjugate(&self, g: &Permutation) -> PermGroup {
        let gens = self.generators.iter().map(|h| h.conjugate_by(g)).collect();
        PermGroup::new(self.degree, gens).expect("same degree")
    }

    /// The largest normal subgroup of `ambient` contained in `self`.
    pub fn normal_core_in(&self, ambient: &PermGroup) -> Result<PermGroup> {
        let mut core = self.clone();
        for g in ambient.elements()? {
            core = core.intersection(&self.conjugate(g))?;
            if core.order()? == 1 {
                break;
            }
        }
        Ok(core)
    }

    /// Every subgroup, in order of increasing size (ties by element list).
    pub fn subgroups(&self) -> Result<Vec<PermGroup>> {
        let lattice = SubgroupLattice::build(self)?;
        Ok(lattice.groups(self))
    }

    pub fn normal_subgroups(&self) -> Result<Vec<PermGroup>> {
        let mut out = Vec::new();
        for h in self.subgroups()? {
            if self.is_normal(&h)? {
                out.push(h);
            }
        }
        Ok(out)
    }

    pub fn maximal_subgroups(&self) -> Result<Vec<PermGroup>> {
        let lattice = SubgroupLattice::build(self)?;
        let elements = self.elements()?;
        Ok(lattice
            .maximal()
            .into_iter()
            .map(|bits| lattice.to_group(self.degree, elements, &bits))
            .collect())
    }

    /// Intersection of all maximal subgroups (trivial when there are none).
    pub fn frattini_subgroup(&self) -> Result<PermGroup> {
        let lattice = SubgroupLattice::build(self)?;
        let maximal = lattice.maximal();
        if maximal.is_empty() {
            return Ok(PermGroup::trivial(self.degree));
        }
        let mut meet = maximal[0].clone();
        for m in &maximal[1..] {
            meet.intersect_with(m);
        }
        Ok(lattice.to_group(self.degree, self.elements()?, &meet))
    }
}

/// Closure of `generators` under composition, bounded by `bound` elements.
fn close(degree: usize, generators: &[Permutation], bound: usize) -> Result<Vec<Permutation>> {
    let identity = Permutation::identity(degree);
    let mut seen: HashSet<Permutation> = HashSet::new();
    seen.insert(identity.clone());
    let mut list = vec![identity];
    let mut i = 0;
    while i < list.len() {
        let x = list[i].clone();
        for s in generators {
            let y = x.compose_unchecked(s);
            if seen.insert(y.clone()) {
                if seen.len() > bound {
                    return Err(GroupError::TooLarge { bound });
                }
                list.push(y);
            }
        }
        i += 1;
    }
    Ok(list)
}

/// `Some((p, k))` when `n = p^k` with `p` prime and `k ≥ 1`.
pub fn prime_power(n: usize) -> Option<(usize, u32)> {
    if n < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= n && n % p != 0 {
        p += 1;
    }
    if n % p != 0 {
        p = n;
    }
    let mut m = n;
    let mut k = 0;
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    (m == 1).then_some((p, k))
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn is_subset_of(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
    fn intersect_with(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= b;
        }
    }
    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.0.len() * 64).filter(|&i| self.get(i))
    }
}

/// All subgroups of a small group, found by repeatedly adjoining one element.
struct SubgroupLattice {
    order: usize,
    subgroups: Vec<Bits>,
}

impl SubgroupLattice {
    fn build(group: &PermGroup) -> Result<Self> {
        let elements = group.elements()?;
        let n = elements.len();
        let index: HashMap<&Permutation, usize> =
            elements.iter().enumerate().map(|(i, g)| (g, i)).collect();
        let mut table = vec![0usize; n * n];
        for (i, a) in elements.iter().enumerate() {
            for (j, b) in elements.iter().enumerate() {
                table[i * n + j] = index[&a.compose_unchecked(b)];
            }
        }
        let identity = index[&Permutation::identity(group.degree)];
        let closure = |gens: &[usize]| -> Bits {
            let mut bits = Bits::new(n);
            bits.set(identity);
            let mut list = vec![identity];
            let mut i = 0;
            while i < list.len() {
                let x = list[i];
                for &s in gens {
                    let y = table[x * n + s];
                    if !bits.get(y) {
                        bits.set(y);
                        list.push(y);
                    }
                }
                i += 1;
            }
            bits
        };

        let trivial = closure(&[]);
        let mut seen: HashSet<Bits> = HashSet::from([trivial.clone()]);
        let mut queue: VecDeque<(Bits, Vec<usize>)> = VecDeque::from([(trivial, Vec::new())]);
        let mut subgroups = Vec::new();
        while let Some((bits, gens)) = queue.pop_front() {
            for g in 0..n {
                if bits.get(g) {
                    continue;
                }
                let mut next_gens = gens.clone();
                next_gens.push(g);
                let next = closure(&next_gens);
                if seen.insert(next.clone()) {
                    queue.push_back((next, next_gens));
                }
            }
            subgroups.push(bits);
        }
        subgroups.sort_by(|a, b| a.count().cmp(&b.count()).then_with(|| b.0.cmp(&a.0)));
        Ok(Self { order: n, subgroups })
    }

    fn maximal(&self) -> Vec<Bits> {
        let proper: Vec<&Bits> =
            self.subgroups.iter().filter(|b| b.count() < self.order).collect();
        proper
            .iter()
            .filter(|m| {
                !proper
                    .iter()
                    .any(|other| other.count() > m.count() && m.is_subset_of(other))
            })
            .map(|m| (*m).clone())
            .collect()
    }

    fn to_group(&self, degree: usize, elements: &[Permutation], bits: &Bits) -> PermGroup {
        let members: Vec<Permutation> = bits.ones().map(|i| elements[i].clone()).collect();
        PermGroup::from_elements(degree, members).expect("lattice members are subgroups")
    }

    fn groups(&self, group: &PermGroup) -> Vec<PermGroup> {
        let elements = group.elements().expect("built from this group");
        self.subgroups
            .iter()
            .map(|b| self.to_group(group.degree, elements, b))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(n: usize, cycles: &[&[usize]]) -> Permutation {
        Permutation::from_cycles(n, cycles).unwrap()
    }

    fn sym3() -> PermGroup {
        PermGroup::new(3, vec![cyc(3, &[&[0, 1]]), cyc(3, &[&[0, 1, 2]])]).unwrap()
    }

    fn z9() -> PermGroup {
        PermGroup::new(9, vec![cyc(9, &[&[0, 1, 2, 3, 4, 5, 6, 7, 8]])]).unwrap()
    }

    /// Left-regular representation of Q8 on {±1, ±i, ±j, ±k}.
    pub(crate) fn q8() -> PermGroup {
        // index: 0=1 1=i 2=j 3=k 4=-1 5=-i 6=-j 7=-k
        let mul = |a: usize, b: usize| -> usize {
            let (sa, ua) = (a / 4, a % 4);
            let (sb, ub) = (b / 4, b % 4);
            let (sign, unit) = match (ua, ub) {
                (0, u) | (u, 0) => (0, u),
                (x, y) if x == y => (1, 0),
                (1, 2) => (0, 3),
                (2, 3) => (0, 1),
                (3, 1) => (0, 2),
                (2, 1) => (1, 3),
                (3, 2) => (1, 1),
                (1, 3) => (1, 2),
                _ => unreachable!(),
            };
            ((sa + sb + sign) % 2) * 4 + unit
        };
        let left = |a: usize| Permutation::from_images((0..8).map(|b| mul(a, b)).collect()).unwrap();
        PermGroup::new(8, vec![left(1), left(2)]).unwrap()
    }

    #[test]
    fn compose_follows_right_to_left() {
        let a = cyc(3, &[&[0, 1]]);
        let b = cyc(3, &[&[1, 2]]);
        // a∘b: 0 -> b 0 -> a 1; 1 -> 2 -> 2; 2 -> 1 -> 0
        assert_eq!(a.compose(&b).unwrap().images(), &[1, 2, 0]);
        let id = Permutation::identity(5);
        let p = cyc(5, &[&[0, 3], &[1, 4, 2]]);
        assert_eq!(id.compose(&p).unwrap(), p);
        let r = cyc(3, &[&[0, 1, 2]]);
        assert!(r.compose(&cyc(3, &[&[0, 2, 1]])).unwrap().is_identity());
        assert_eq!(
            a.compose(&Permutation::identity(4)),
            Err(GroupError::DegreeMismatch { left: 3, right: 4 })
        );
    }

    #[test]
    fn inverse_reverses_cycles() {
        assert!(Permutation::identity(4).inverse().is_identity());
        assert_eq!(cyc(5, &[&[0, 1, 2, 3, 4]]).inverse(), cyc(5, &[&[0, 4, 3, 2, 1]]));
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::from_images(vec![0, 0, 1]).is_err());
        assert!(Permutation::from_images(vec![0, 3]).is_err());
        assert!(Permutation::from_images(vec![]).is_err());
        assert!(Permutation::from_cycles(3, &[&[0, 1], &[1, 2]]).is_err());
    }

    #[test]
    fn element_enumeration() {
        assert_eq!(PermGroup::new(5, vec![cyc(5, &[&[0, 1, 2, 3, 4]])]).unwrap().order(), Ok(5));
        let s3 = sym3();
        assert_eq!(s3.order(), Ok(6));
        let els = s3.elements().unwrap();
        assert!(els.windows(2).all(|w| w[0] < w[1]));
        assert!(els[0].is_identity());
        assert_eq!(PermGroup::trivial(4).order(), Ok(1));
    }

    #[test]
    fn enumeration_bound_is_enforced() {
        let sym8 = PermGroup::new(
            8,
            vec![cyc(8, &[&[0, 1]]), cyc(8, &[&[0, 1, 2, 3, 4, 5, 6, 7]])],
        )
        .unwrap();
        let err = close(8, sym8.generators(), 1000).unwrap_err();
        assert_eq!(err, GroupError::TooLarge { bound: 1000 });
    }

    #[test]
    fn orbits() {
        let z5 = PermGroup::new(5, vec![cyc(5, &[&[0, 1, 2, 3, 4]])]).unwrap();
        assert_eq!(z5.orbit(0).unwrap(), vec![0, 1, 2, 3, 4]);
        let g = PermGroup::new(4, vec![cyc(4, &[&[0, 1], &[2, 3]])]).unwrap();
        assert_eq!(g.orbit(0).unwrap(), vec![0, 1]);
        let three = PermGroup::new(9, vec![cyc(9, &[&[0, 3, 6], &[1, 4, 7], &[2, 5, 8]])]).unwrap();
        assert_eq!(three.orbit(1).unwrap(), vec![1, 4, 7]);
        assert!(three.orbit(9).is_err());
        let q = three.orbit_partition();
        assert_eq!(q.blocks(), &[vec![0, 3, 6], vec![1, 4, 7], vec![2, 5, 8]]);
        assert_eq!(z5.orbit_partition().block_count(), 1);
        assert_eq!(PermGroup::trivial(4).orbit_partition().block_count(), 4);
    }

    #[test]
    fn stabilizers() {
        let s3 = sym3();
        let stab = s3.stabilizer(2).unwrap();
        assert_eq!(stab.order(), Ok(2));
        assert!(stab.contains(&cyc(3, &[&[0, 1]])).unwrap());
        assert_eq!(z9().stabilizer(4).unwrap().order(), Ok(1));
    }

    #[test]
    fn commutator_subgroups() {
        let z9 = z9();
        assert!(z9.commutator_subgroup().unwrap().is_trivial());
        let d = sym3().commutator_subgroup().unwrap();
        assert_eq!(d.order(), Ok(3));
        assert!(d.contains(&cyc(3, &[&[0, 1, 2]])).unwrap());
        let q8 = q8();
        assert_eq!(q8.order(), Ok(8));
        let d = q8.commutator_subgroup().unwrap();
        assert_eq!(d.order(), Ok(2));
        // -1 is left multiplication by index 4: swaps x and -x.
        let minus_one = cyc(8, &[&[0, 4], &[1, 5], &[2, 6], &[3, 7]]);
        assert!(d.contains(&minus_one).unwrap());
    }

    #[test]
    fn commutator_subgroup_matches_brute_force() {
        for g in [sym3(), q8(), z9()] {
            let els = g.elements().unwrap();
            let all: Vec<Permutation> = els
                .iter()
                .flat_map(|a| els.iter().map(move |b| a.commutator(b)))
                .collect();
            let brute = PermGroup::new(g.degree(), all).unwrap();
            assert!(brute.same_elements(&g.commutator_subgroup().unwrap()).unwrap());
        }
    }

    #[test]
    fn normal_closure_and_normality() {
        let s3 = sym3();
        let t = PermGroup::new(3, vec![cyc(3, &[&[0, 1]])]).unwrap();
        assert_eq!(s3.normal_closure(&t).unwrap().order(), Ok(6));
        assert!(!s3.is_normal(&t).unwrap());
        let a3 = s3.commutator_subgroup().unwrap();
        assert!(s3.is_normal(&a3).unwrap());
        assert!(s3.normal_closure(&a3).unwrap().same_elements(&a3).unwrap());
        assert!(s3.normal_closure(&PermGroup::trivial(3)).unwrap().is_trivial());
        let z9 = z9();
        let sub = PermGroup::new(9, vec![cyc(9, &[&[0, 3, 6], &[1, 4, 7], &[2, 5, 8]])]).unwrap();
        assert!(z9.is_normal(&sub).unwrap());
        assert_eq!(s3.is_normal(&z9), Err(GroupError::NotContained));
    }

    #[test]
    fn cyclic_prime_power() {
        let c3 = PermGroup::new(3, vec![cyc(3, &[&[0, 1, 2]])]).unwrap();
        let s = c3.cyclic_prime_power_structure().unwrap().unwrap();
        assert_eq!((s.prime, s.exponent), (Some(3), 1));
        assert_eq!(s.generator.order(), 3);
        let t = PermGroup::trivial(3).cyclic_prime_power_structure().unwrap().unwrap();
        assert_eq!((t.prime, t.exponent), (None, 0));
        assert!(t.generator.is_identity());
        assert_eq!(sym3().cyclic_prime_power_structure(), Ok(None));
        // Z2 x Z2 has prime-power order but is not cyclic.
        let v4 = PermGroup::new(4, vec![cyc(4, &[&[0, 1], &[2, 3]]), cyc(4, &[&[0, 2], &[1, 3]])])
            .unwrap();
        assert_eq!(v4.cyclic_prime_power_structure(), Ok(None));
    }

    #[test]
    fn power_subgroups() {
        let z9 = z9();
        let cubes = z9.power_subgroup(3).unwrap();
        assert_eq!(cubes.order(), Ok(3));
        assert!(cubes.contains(&cyc(9, &[&[0, 3, 6], &[1, 4, 7], &[2, 5, 8]])).unwrap());
        assert!(PermGroup::trivial(2).power_subgroup(5).unwrap().is_trivial());
        let c5 = PermGroup::new(5, vec![cyc(5, &[&[0, 1, 2, 3, 4]])]).unwrap();
        assert!(c5.power_subgroup(5).unwrap().is_trivial());
    }

    #[test]
    fn frattini_subgroups() {
        let z9 = z9();
        let phi = z9.frattini_subgroup().unwrap();
        assert_eq!(phi.order(), Ok(3));
        assert!(phi.same_elements(&z9.power_subgroup(3).unwrap()).unwrap());
        assert!(sym3().frattini_subgroup().unwrap().is_trivial());
        let v4 = PermGroup::new(4, vec![cyc(4, &[&[0, 1], &[2, 3]]), cyc(4, &[&[0, 2], &[1, 3]])])
            .unwrap();
        assert!(v4.frattini_subgroup().unwrap().is_trivial());
        assert!(PermGroup::trivial(3).frattini_subgroup().unwrap().is_trivial());
        // Φ(Q8) = {±1}
        assert_eq!(q8().frattini_subgroup().unwrap().order(), Ok(2));
    }

    #[test]
    fn subgroup_counts() {
        assert_eq!(sym3().subgroups().unwrap().len(), 6);
        assert_eq!(q8().subgroups().unwrap().len(), 6);
        assert_eq!(z9().subgroups().unwrap().len(), 3);
        assert_eq!(sym3().normal_subgroups().unwrap().len(), 3);
        assert_eq!(sym3().maximal_subgroups().unwrap().len(), 4);
    }

    #[test]
    fn subgroup_chains() {
        let chain = z9().cyclic_subgroup_chain(3).unwrap();
        let orders: Vec<usize> = chain.iter().map(|h| h.order().unwrap()).collect();
        assert_eq!(orders, vec![1, 3, 9]);
        let c5 = PermGroup::new(5, vec![cyc(5, &[&[0, 1, 2, 3, 4]])]).unwrap();
        assert_eq!(c5.cyclic_subgroup_chain(5).unwrap().len(), 2);
        assert_eq!(PermGroup::trivial(3).cyclic_subgroup_chain(2).unwrap().len(), 1);
        assert!(sym3().cyclic_subgroup_chain(3).is_err());
        assert!(z9().cyclic_subgroup_chain(2).is_err());
    }

    #[test]
    fn product_subgroups() {
        let s3 = sym3();
        let a3 = s3.commutator_subgroup().unwrap();
        let t = PermGroup::new(3, vec![cyc(3, &[&[0, 1]])]).unwrap();
        assert_eq!(s3.product_subgroup(&a3, &t).unwrap().order(), Ok(6));
        let e = PermGroup::trivial(3);
        assert!(s3.product_subgroup(&e, &t).unwrap().same_elements(&t).unwrap());
        assert!(s3.product_subgroup(&a3, &e).unwrap().same_elements(&a3).unwrap());
        assert_eq!(s3.product_subgroup(&t, &a3).unwrap_err(), GroupError::NotNormal);
    }

    #[test]
    fn normal_core_of_point_stabilizer_is_trivial() {
        let s3 = sym3();
        assert!(s3.stabilizer(0).unwrap().normal_core_in(&s3).unwrap().is_trivial());
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(1), None);
        assert_eq!(prime_power(2), Some((2, 1)));
        assert_eq!(prime_power(27), Some((3, 3)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(49), Some((7, 2)));
        assert_eq!(prime_power(97), Some((97, 1)));
    }

    #[test]
    fn display_uses_cycle_notation() {
        assert_eq!(cyc(5, &[&[0, 3], &[1, 4, 2]]).to_string(), "(0 3)(1 4 2)");
        assert_eq!(Permutation::identity(2).to_string(), "()");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn perm(n: usize) -> impl Strategy<Value = Permutation> {
            Just((0..n).collect::<Vec<usize>>())
                .prop_shuffle()
                .prop_map(|v| Permutation::from_images(v).unwrap())
        }

        proptest! {
            #[test]
            fn inverse_composes_to_identity(p in perm(8)) {
                prop_assert!(p.compose(&p.inverse()).unwrap().is_identity());
                prop_assert!(p.inverse().compose(&p).unwrap().is_identity());
            }

            #[test]
            fn orbit_stabilizer_holds(a in perm(6), b in perm(6), x in 0usize..6) {
                let g = PermGroup::new(6, vec![a, b]).unwrap();
                let stab = g.stabilizer(x).unwrap();
                prop_assert_eq!(g.orbit(x).unwrap().len() * stab.order().unwrap(), g.order().unwrap());
                for s in stab.elements().unwrap() {
                    prop_assert_eq!(s.apply(x), x);
                }
            }

            #[test]
            fn stabilizers_conjugate(a in perm(6), b in perm(6), x in 0usize..6) {
                let g = PermGroup::new(6, vec![a, b]).unwrap();
                let stab = g.stabilizer(x).unwrap();
                for h in g.generators() {
                    let moved = g.stabilizer(h.apply(x)).unwrap();
                    prop_assert!(moved.same_elements(&stab.conjugate(h)).unwrap());
                }
            }
        }
    }
}
