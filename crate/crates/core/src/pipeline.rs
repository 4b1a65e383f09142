//! The construction driver.
//!
//! Given a group acting transitively on a connected graph with a cyclic
//! commutator subgroup of prime-power order, [`hamiltonize`] either builds a
//! Hamilton cycle or recognises the Petersen graph. The case analysis:
//!
//! 1. check the hypotheses;
//! 2. shrink the graph to a G-minimal spanning subgraph;
//! 3. if `G'` is transitive (or trivial), the graph is a Cayley graph on an
//!    abelian group and the abelian solver finishes;
//! 4. test whether the `G'`-orbits induce edges;
//! 5. if not, pick the smallest `H ≤ G'` with `H·G_x` normal and assemble a
//!    cycle with the Factor Group Lemma from a lifted Hamilton path of `X/H`;
//! 6. otherwise pick the smallest `H ≤ G'` making stabilizer products agree
//!    across orbit boundaries, and either use the Factor Group Lemma again or
//!    lift a Hamilton cycle of `X/G'`.
//!
//! Branches that rest on constructions cited from elsewhere fall back to the
//! exhaustive oracle and are tagged, so purely constructive coverage can be
//! measured from the trace. Hamilton paths of quotients are obtained by
//! recursion on the induced action.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::abelian_ham::{self, AbelianHamError};
use crate::certificate::HamiltonCertificate;
use crate::graph::{Edge, GraphError, GroupAction, QuotientAction};
use crate::lifting::{factor_group_cycle, lift_path, LiftError};
use crate::oracle::{find_hamilton_cycle, find_hamilton_path, SearchOutcome, DEFAULT_BUDGET};
use crate::permgroup::{GroupError, PermGroup, Permutation};

pub use crate::lemmas::{verify_lemma_suite, LemmaCheck, LemmaReport};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("internal inconsistency at {anchor}: {detail}")]
    Internal { anchor: Anchor, detail: String },
    #[error("oracle budget exhausted at {0}")]
    BudgetExceeded(Anchor),
    #[error("hypothesis violated: {0}")]
    Hypothesis(HypothesisViolation),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error(transparent)]
    Abelian(#[from] AbelianHamError),
}

type Result<T, E = PipelineError> = std::result::Result<T, E>;

fn internal(anchor: Anchor, detail: impl Into<String>) -> PipelineError {
    PipelineError::Internal { anchor, detail: detail.into() }
}

/// The hypotheses the construction needs, by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    Connected,
    AtLeastThreeVertices,
    ActsByAutomorphisms,
    Transitive,
    CommutatorCyclicPrimePower,
}

impl Hypothesis {
    pub fn name(self) -> &'static str {
        match self {
            Hypothesis::Connected => "connected",
            Hypothesis::AtLeastThreeVertices => "at-least-three-vertices",
            Hypothesis::ActsByAutomorphisms => "acts-by-automorphisms",
            Hypothesis::Transitive => "transitive",
            Hypothesis::CommutatorCyclicPrimePower => "commutator-cyclic-prime-power",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisViolation {
    pub hypothesis: Hypothesis,
    pub detail: String,
}

impl fmt::Display for HypothesisViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.hypothesis.name(), self.detail)
    }
}

/// Named decision points recorded in the trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Anchor {
    Hypotheses,
    GMinimalReduction,
    SingleOrbitCayley,
    AbelianEdgeCycle,
    OrbitSubgraphTest,
    EmptyOrbitConstruction,
    NonemptyOrbitConstruction,
    OrbitSubgraphsConnectedOdd,
    MinimalNormalizingSubgroup,
    CrossOrbitCoherence,
    AdjacentPair,
    QuotientHamiltonPath,
    QuotientEdgeCycle,
    QuotientRecursion,
    PathLift,
    FactorGroupLemma,
    TwoVertexQuotient,
    PetersenException,
    QuotientCycleLift,
    EqualStabilizers,
    CitedCayleyConstruction,
    CitedTwoOrbitLift,
    CitedDegreeThreeLift,
    CitedClosedLift,
}

impl Anchor {
    pub const ALL: [Anchor; 24] = [
        Anchor::Hypotheses,
        Anchor::GMinimalReduction,
        Anchor::SingleOrbitCayley,
        Anchor::AbelianEdgeCycle,
        Anchor::OrbitSubgraphTest,
        Anchor::EmptyOrbitConstruction,
        Anchor::NonemptyOrbitConstruction,
        Anchor::OrbitSubgraphsConnectedOdd,
        Anchor::MinimalNormalizingSubgroup,
        Anchor::CrossOrbitCoherence,
        Anchor::AdjacentPair,
        Anchor::QuotientHamiltonPath,
        Anchor::QuotientEdgeCycle,
        Anchor::QuotientRecursion,
        Anchor::PathLift,
        Anchor::FactorGroupLemma,
        Anchor::TwoVertexQuotient,
        Anchor::PetersenException,
        Anchor::QuotientCycleLift,
        Anchor::EqualStabilizers,
        Anchor::CitedCayleyConstruction,
        Anchor::CitedTwoOrbitLift,
        Anchor::CitedDegreeThreeLift,
        Anchor::CitedClosedLift,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Anchor::Hypotheses => "hypotheses",
            Anchor::GMinimalReduction => "g-minimal-reduction",
            Anchor::SingleOrbitCayley => "single-orbit-cayley",
            Anchor::AbelianEdgeCycle => "abelian-edge-cycle",
            Anchor::OrbitSubgraphTest => "orbit-subgraph-test",
            Anchor::EmptyOrbitConstruction => "empty-orbit-construction",
            Anchor::NonemptyOrbitConstruction => "nonempty-orbit-construction",
            Anchor::OrbitSubgraphsConnectedOdd => "orbit-subgraphs-connected-odd",
            Anchor::MinimalNormalizingSubgroup => "minimal-normalizing-subgroup",
            Anchor::CrossOrbitCoherence => "cross-orbit-coherence",
            Anchor::AdjacentPair => "adjacent-pair",
            Anchor::QuotientHamiltonPath => "quotient-hamilton-path",
            Anchor::QuotientEdgeCycle => "quotient-edge-cycle",
            Anchor::QuotientRecursion => "quotient-recursion",
            Anchor::PathLift => "path-lift",
            Anchor::FactorGroupLemma => "factor-group-lemma",
            Anchor::TwoVertexQuotient => "two-vertex-quotient",
            Anchor::PetersenException => "petersen-exception",
            Anchor::QuotientCycleLift => "quotient-cycle-lift",
            Anchor::EqualStabilizers => "equal-stabilizers",
            Anchor::CitedCayleyConstruction => "cited-cayley-construction",
            Anchor::CitedTwoOrbitLift => "cited-two-orbit-lift",
            Anchor::CitedDegreeThreeLift => "cited-degree-three-lift",
            Anchor::CitedClosedLift => "cited-closed-lift",
        }
    }

    /// Whether the anchor stands for a construction proved elsewhere, which
    /// the pipeline replaces by the exhaustive oracle.
    pub fn is_external_citation(self) -> bool {
        matches!(
            self,
            Anchor::CitedCayleyConstruction
                | Anchor::CitedTwoOrbitLift
                | Anchor::CitedDegreeThreeLift
                | Anchor::CitedClosedLift
        )
    }
}

impl fmt::Display for Anchor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Anchor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Anchor::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown anchor `{s}`"))
    }
}

/// One decision of a run: `<step> <anchor> <verdict>`. Steps of recursive
/// runs on quotients are prefixed by the step that started them, as in `5.3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub step: String,
    pub anchor: Anchor,
    pub verdict: String,
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.step, self.anchor, self.verdict)
    }
}

impl FromStr for TraceEntry {
    type Err = String;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let mut parts = line.trim().splitn(3, ' ');
        let step = parts.next().filter(|s| !s.is_empty()).ok_or("missing step")?;
        if !step.split('.').all(|s| s.parse::<u32>().is_ok()) {
            return Err(format!("malformed step `{step}`"));
        }
        let anchor = parts.next().ok_or("missing anchor")?.parse()?;
        let verdict = parts.next().unwrap_or("").to_string();
        Ok(TraceEntry { step: step.to_string(), anchor, verdict })
    }
}

/// A cited construction replaced by the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleBranch {
    /// Cayley graphs of groups with cyclic commutator subgroup.
    CayleyConstruction,
    /// `X/G'` has two vertices.
    TwoOrbitLift,
    /// Orbit subgraphs of degree at least three.
    DegreeThreeLift,
    /// A Hamilton cycle of `X/G'` lifts to a cycle.
    ClosedLift,
}

impl OracleBranch {
    pub fn anchor(self) -> Anchor {
        match self {
            OracleBranch::CayleyConstruction => Anchor::CitedCayleyConstruction,
            OracleBranch::TwoOrbitLift => Anchor::CitedTwoOrbitLift,
            OracleBranch::DegreeThreeLift => Anchor::CitedDegreeThreeLift,
            OracleBranch::ClosedLift => Anchor::CitedClosedLift,
        }
    }
}

impl fmt::Display for OracleBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.anchor().name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Cycle(HamiltonCertificate),
    PetersenException,
    HypothesisViolation(HypothesisViolation),
    OracleAssisted { cert: HamiltonCertificate, branch: OracleBranch },
}

#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub outcome: Outcome,
    pub trace: Vec<TraceEntry>,
}

impl PipelineResult {
    pub fn certificate(&self) -> Option<&HamiltonCertificate> {
        match &self.outcome {
            Outcome::Cycle(c) | Outcome::OracleAssisted { cert: c, .. } => Some(c),
            _ => None,
        }
    }

    pub fn trace_text(&self) -> String {
        self.trace.iter().map(|e| format!("{e}\n")).collect()
    }
}

/// The checked setting of a run.
#[derive(Debug, Clone)]
pub struct Context {
    /// The working action; after reduction it acts on the G-minimal subgraph.
    pub action: GroupAction,
    pub group: PermGroup,
    pub derived: PermGroup,
    pub prime: Option<usize>,
    pub exponent: u32,
    pub generator: Permutation,
    /// `{e} = H₀ < … < H_k = G'`.
    pub chain: Vec<PermGroup>,
    stabilizers: Vec<PermGroup>,
}

impl Context {
    pub fn stabilizer(&self, x: usize) -> &PermGroup {
        &self.stabilizers[x]
    }

    /// `H·G_x`; `h` must be normal in `G`.
    pub fn stabilizer_product(&self, h: &PermGroup, x: usize) -> Result<PermGroup> {
        Ok(self.group.product_subgroup(h, &self.stabilizers[x])?)
    }
}

/// Checks connectivity, size, automorphisms, transitivity and the shape of
/// the commutator subgroup.
pub fn validate_hypotheses(a: &GroupAction) -> Result<Context, HypothesisViolation> {
    validate_with_min_vertices(a, 3)
}

pub(crate) fn validate_with_min_vertices(a: &GroupAction, min_vertices: usize) -> Result<Context, HypothesisViolation> {
    let violation = |hypothesis, detail: String| HypothesisViolation { hypothesis, detail };
    let x = a.graph();
    let g = a.group();
    if x.vertex_count() < min_vertices {
        return Err(violation(
            Hypothesis::AtLeastThreeVertices,
            format!("{} vertices", x.vertex_count()),
        ));
    }
    if !x.is_connected() {
        return Err(violation(Hypothesis::Connected, "graph is disconnected".into()));
    }
    if let Some(bad) = g.generators().iter().find(|s| !x.is_automorphism(s)) {
        return Err(violation(Hypothesis::ActsByAutomorphisms, format!("{bad}")));
    }
    if !a.is_transitive() {
        return Err(violation(Hypothesis::Transitive, "more than one vertex orbit".into()));
    }
    let as_violation = |e: GroupError| violation(Hypothesis::CommutatorCyclicPrimePower, e.to_string());
    let derived = g.commutator_subgroup().map_err(as_violation)?;
    let order = derived.order().map_err(as_violation)?;
    let Some(structure) = derived.cyclic_prime_power_structure().map_err(as_violation)? else {
        return Err(violation(
            Hypothesis::CommutatorCyclicPrimePower,
            format!("G' has order {order} and is not cyclic of prime-power order"),
        ));
    };
    let chain = match structure.prime {
        Some(p) => derived.cyclic_subgroup_chain(p).map_err(as_violation)?,
        None => vec![PermGroup::trivial(g.degree())],
    };
    let stabilizers = (0..g.degree())
        .map(|v| g.stabilizer(v))
        .collect::<Result<Vec<_>, _>>()
        .map_err(as_violation)?;
    Ok(Context {
        action: a.clone(),
        group: g.clone(),
        derived,
        prime: structure.prime,
        exponent: structure.exponent,
        generator: structure.generator,
        chain,
        stabilizers,
    })
}

/// The smallest `H` in the chain of `G'` with `H·G_x` normal in `G`.
pub fn minimal_normalizing_subgroup(ctx: &Context, x: usize) -> Result<PermGroup> {
    let top = ctx.stabilizer_product(&ctx.derived, x)?;
    if !ctx.group.is_normal(&top)? {
        return Err(internal(
            Anchor::MinimalNormalizingSubgroup,
            format!("G'·G_{x} is not normal although G/G' is abelian"),
        ));
    }
    for h in &ctx.chain {
        if ctx.group.is_normal(&ctx.stabilizer_product(h, x)?)? {
            return Ok(h.clone());
        }
    }
    unreachable!("the chain ends at G'")
}

/// The smallest `H` in the chain of `G'` with `H·G_x = H·G_y` for every edge
/// `{x, y}` of the working graph joining different `G'`-orbits.
pub fn cross_orbit_coherence_subgroup(ctx: &Context) -> Result<PermGroup> {
    let orbits = ctx.derived.orbit_partition();
    let cross: Vec<Edge> = ctx
        .action
        .graph()
        .edges()
        .into_iter()
        .filter(|&(x, y)| !orbits.same_block(x, y))
        .collect();
    for h in &ctx.chain {
        let products = (0..ctx.group.degree())
            .map(|v| ctx.stabilizer_product(h, v))
            .collect::<Result<Vec<_>>>()?;
        let mut coherent = true;
        for &(x, y) in &cross {
            if !products[x].same_elements(&products[y])? {
                coherent = false;
                break;
            }
        }
        if coherent {
            return Ok(h.clone());
        }
    }
    Err(internal(Anchor::CrossOrbitCoherence, "G' itself fails the coherence condition"))
}

/// A Hamilton cycle of `X/h` through the quotient edge `e`.
///
/// For `h = G'` the quotient is a Cayley graph on an abelian group and the
/// abelian solver is used. Otherwise a Hamilton cycle of the quotient is
/// built recursively and its translates are scanned for one that uses `e`.
pub fn edge_hamilton_cycle_quotient(
    ctx: &Context,
    h: &PermGroup,
    e: Edge,
) -> Result<(HamiltonCertificate, PipelineResult)> {
    let mut run = Run::default();
    let q = h.orbit_partition();
    let quotient = ctx.action.on_quotient(&q)?;
    let cert = run.edge_cycle_in_quotient(ctx, h, &quotient, e, "1")?;
    let outcome = run.wrap(cert.clone());
    Ok((cert, PipelineResult { outcome, trace: run.trace }))
}

/// Builds a Hamilton cycle of the graph, recognises the Petersen graph, or
/// reports the violated hypothesis.
pub fn hamiltonize(a: &GroupAction) -> Result<PipelineResult> {
    hamiltonize_with_budget(a, DEFAULT_BUDGET)
}

pub fn hamiltonize_with_budget(a: &GroupAction, budget: u64) -> Result<PipelineResult> {
    let mut run = Run { budget, ..Run::default() };
    let outcome = match run.solve(a, "")? {
        Solved::Cycle(cert) => {
            if let Err(v) = cert.check(a.graph()) {
                return Err(internal(Anchor::Hypotheses, format!("final certificate rejected: {v}")));
            }
            run.wrap(cert)
        }
        Solved::Petersen => Outcome::PetersenException,
        Solved::Violation(v) => Outcome::HypothesisViolation(v),
    };
    Ok(PipelineResult { outcome, trace: run.trace })
}

/// A Hamilton path: the cycle minus one edge, the edge of `K₂`, or an
/// oracle path of the Petersen graph.
pub fn hamilton_path(a: &GroupAction) -> Result<HamiltonCertificate> {
    validate_with_min_vertices(a, 1).map_err(PipelineError::Hypothesis)?;
    match a.graph().vertex_count() {
        1 => return Ok(HamiltonCertificate::path(vec![0])),
        2 => return Ok(HamiltonCertificate::path(vec![0, 1])),
        _ => {}
    }
    let result = hamiltonize(a)?;
    match result.outcome {
        Outcome::Cycle(c) | Outcome::OracleAssisted { cert: c, .. } => {
            Ok(HamiltonCertificate::path(c.vertices))
        }
        Outcome::PetersenException => match find_hamilton_path(a.graph(), DEFAULT_BUDGET) {
            SearchOutcome::Found(c) => Ok(c),
            SearchOutcome::BudgetExceeded => Err(PipelineError::BudgetExceeded(Anchor::PetersenException)),
            SearchOutcome::NoneExists => {
                Err(internal(Anchor::PetersenException, "the Petersen graph has no Hamilton path"))
            }
        },
        Outcome::HypothesisViolation(v) => Err(PipelineError::Hypothesis(v)),
    }
}

enum Solved {
    Cycle(HamiltonCertificate),
    Petersen,
    Violation(HypothesisViolation),
}

#[derive(Default)]
struct Run {
    trace: Vec<TraceEntry>,
    assisted: Option<OracleBranch>,
    budget: u64,
}

impl Run {
    fn log(&mut self, step: &str, anchor: Anchor, verdict: impl Into<String>) {
        self.trace.push(TraceEntry { step: step.to_string(), anchor, verdict: verdict.into() });
    }

    fn wrap(&self, cert: HamiltonCertificate) -> Outcome {
        match self.assisted {
            Some(branch) => Outcome::OracleAssisted { cert, branch },
            None => Outcome::Cycle(cert),
        }
    }

    fn solve(&mut self, a: &GroupAction, prefix: &str) -> Result<Solved> {
        let step = |n: u32| format!("{prefix}{n}");

        let mut ctx = match validate_hypotheses(a) {
            Ok(ctx) => ctx,
            Err(v) => {
                self.log(&step(1), Anchor::Hypotheses, format!("violated {v}"));
                return Ok(Solved::Violation(v));
            }
        };
        self.log(
            &step(1),
            Anchor::Hypotheses,
            format!(
                "ok vertices={} |G|={} |G'|={} p={}",
                a.graph().vertex_count(),
                ctx.group.order()?,
                ctx.derived.order()?,
                ctx.prime.map_or("-".to_string(), |p| p.to_string())
            ),
        );

        let reduction = a.g_minimal_reduce()?;
        self.log(
            &step(2),
            Anchor::GMinimalReduction,
            format!(
                "removed {} edge orbits, kept {}",
                reduction.removed.len(),
                reduction.kept.len()
            ),
        );
        ctx.action = reduction.action;

        let orbits = ctx.derived.orbit_partition();
        if orbits.block_count() == 1 || ctx.derived.is_trivial() {
            let cert = self.single_orbit(&ctx, &step(3))?;
            return Ok(Solved::Cycle(cert));
        }

        let (orbit_graph, _) = ctx.action.graph().induced_subgraph(orbits.block(0))?;
        let empty = orbit_graph.edge_count() == 0;
        self.log(
            &step(4),
            Anchor::OrbitSubgraphTest,
            format!(
                "{} orbits of size {}, {} induced edges each",
                orbits.block_count(),
                orbits.block(0).len(),
                orbit_graph.edge_count()
            ),
        );

        if empty {
            self.log(&step(5), Anchor::EmptyOrbitConstruction, "orbit subgraphs are edgeless");
            let cert = self.empty_orbits(&ctx, &step(5))?;
            Ok(Solved::Cycle(cert))
        } else {
            self.log(&step(6), Anchor::NonemptyOrbitConstruction, "orbit subgraphs have edges");
            self.nonempty_orbits(&ctx, &step(6))
        }
    }

    /// The graph is a Cayley graph on the abelian group `G'` (or on `G`
    /// itself when `G` is abelian).
    fn single_orbit(&mut self, ctx: &Context, step: &str) -> Result<HamiltonCertificate> {
        let regular = if ctx.derived.is_trivial() { &ctx.group } else { &ctx.derived };
        let restricted = ctx.action.restrict(regular)?;
        let Some(labeling) = restricted.sabidussi_labeling(0)? else {
            return Err(internal(Anchor::SingleOrbitCayley, "the transitive abelian group is not regular"));
        };
        self.log(
            step,
            Anchor::SingleOrbitCayley,
            format!(
                "Cayley graph on an abelian group of order {} with {} connection elements",
                regular.order()?,
                labeling.spec.connection_set().len()
            ),
        );
        let cert = abelian_ham::hamilton_cycle_abelian(&labeling.spec)?
            .mapped(&labeling.vertex_of_element);
        self.log(step, Anchor::AbelianEdgeCycle, "cycle found");
        self.checked(ctx, cert, Anchor::SingleOrbitCayley)
    }

    fn empty_orbits(&mut self, ctx: &Context, step: &str) -> Result<HamiltonCertificate> {
        let h = minimal_normalizing_subgroup(ctx, 0)?;
        self.log(step, Anchor::MinimalNormalizingSubgroup, format!("|H|={}", h.order()?));
        if h.is_trivial() {
            if !ctx.stabilizer(0).is_trivial() {
                return Err(internal(
                    Anchor::MinimalNormalizingSubgroup,
                    "G_x is normal but not trivial",
                ));
            }
            return self.oracle_cycle(ctx, step, OracleBranch::CayleyConstruction);
        }
        self.factor_group_construction(ctx, &h, false, step)
    }

    fn nonempty_orbits(&mut self, ctx: &Context, step: &str) -> Result<Solved> {
        let orbits = ctx.derived.orbit_partition();
        let (orbit_graph, _) = ctx.action.graph().induced_subgraph(orbits.block(0))?;
        let p = ctx.prime.expect("nontrivial G'");
        if !orbit_graph.is_connected() || p == 2 {
            return Err(internal(
                Anchor::OrbitSubgraphsConnectedOdd,
                format!("connected={} p={p}", orbit_graph.is_connected()),
            ));
        }
        self.log(step, Anchor::OrbitSubgraphsConnectedOdd, format!("connected, p={p}"));

        if orbits.block_count() == 2 {
            if ctx.action.graph().is_petersen() {
                self.log(step, Anchor::TwoVertexQuotient, "X/G' = K2");
                self.log(step, Anchor::PetersenException, "3-regular, 10 vertices, girth 5");
                return Ok(Solved::Petersen);
            }
            self.log(step, Anchor::TwoVertexQuotient, "X/G' = K2, not Petersen");
            let cert = self.oracle_cycle(ctx, step, OracleBranch::TwoOrbitLift)?;
            return Ok(Solved::Cycle(cert));
        }

        let h = cross_orbit_coherence_subgroup(ctx)?;
        self.log(step, Anchor::CrossOrbitCoherence, format!("|H|={}", h.order()?));
        if !h.is_trivial() {
            let cert = self.factor_group_construction(ctx, &h, true, step)?;
            return Ok(Solved::Cycle(cert));
        }

        let quotient = ctx.action.on_quotient(&orbits)?;
        let cycle = self.abelian_quotient_cycle(&quotient, None)?;
        let start = cycle.vertices.iter().position(|&b| b == orbits.block_of(0)).expect("Hamilton");
        let m = cycle.vertices.len();
        let closed: Vec<usize> = (0..=m).map(|i| cycle.vertices[(start + i) % m]).collect();
        let lift = lift_path(ctx.action.graph(), &orbits, &closed, 0)?;
        let (first, last) = (lift[0], lift[m]);
        if first == last {
            self.log(step, Anchor::QuotientCycleLift, "lift of a Hamilton cycle of X/G' closes");
            let cert = self.oracle_cycle(ctx, step, OracleBranch::ClosedLift)?;
            return Ok(Solved::Cycle(cert));
        }
        if !ctx.stabilizer(first).same_elements(ctx.stabilizer(last))? {
            return Err(internal(
                Anchor::QuotientCycleLift,
                format!("G_{first} != G_{last} although H is trivial"),
            ));
        }
        self.log(
            step,
            Anchor::QuotientCycleLift,
            format!("lift ends at {last} != {first} with equal stabilizers"),
        );

        let mut all_equal = true;
        for &y in orbits.block(orbits.block_of(first)) {
            if !ctx.stabilizer(y).same_elements(ctx.stabilizer(first))? {
                all_equal = false;
                break;
            }
        }
        if all_equal {
            self.log(step, Anchor::EqualStabilizers, "all stabilizers on the G'-orbit agree");
            let cert = self.empty_orbits(ctx, step)?;
            return Ok(Solved::Cycle(cert));
        }
        let degree = orbit_graph.regular_degree().unwrap_or(0);
        self.log(step, Anchor::EqualStabilizers, format!("stabilizers differ, orbit degree {degree}"));
        if degree >= 3 {
            let cert = self.oracle_cycle(ctx, step, OracleBranch::DegreeThreeLift)?;
            return Ok(Solved::Cycle(cert));
        }
        Err(internal(
            Anchor::EqualStabilizers,
            "2-regular orbit subgraphs with two equal but not all equal stabilizers",
        ))
    }

    /// Finds adjacent `x₁, u` with `H^p·G_{x₁} ≠ H^p·G_u`, a Hamilton path
    /// from `Hx₁` to `Hu` in `X/H`, lifts it, and closes it into a Hamilton
    /// cycle of `X` with the Factor Group Lemma.
    fn factor_group_construction(
        &mut self,
        ctx: &Context,
        h: &PermGroup,
        cross_orbit_only: bool,
        step: &str,
    ) -> Result<HamiltonCertificate> {
        let x = ctx.action.graph();
        let p = ctx.prime.expect("nontrivial H");
        let hp = h.power_subgroup(p)?;
        let derived_orbits = ctx.derived.orbit_partition();
        let products = (0..x.vertex_count())
            .map(|v| ctx.stabilizer_product(&hp, v))
            .collect::<Result<Vec<_>>>()?;

        let mut pair = None;
        'scan: for x1 in 0..x.vertex_count() {
            for &u in x.neighbors(x1) {
                if cross_orbit_only && derived_orbits.same_block(x1, u) {
                    continue;
                }
                if !products[x1].same_elements(&products[u])? {
                    pair = Some((x1, u));
                    break 'scan;
                }
            }
        }
        let Some((x1, u)) = pair else {
            return Err(internal(Anchor::AdjacentPair, "no adjacent pair separates H^p·G_x"));
        };
        let hp_orbit_u = hp.orbit(u)?;
        let gamma = ctx
            .stabilizer(x1)
            .elements()?
            .iter()
            .find(|g| hp_orbit_u.binary_search(&g.apply(u)).is_err())
            .cloned()
            .ok_or_else(|| internal(Anchor::AdjacentPair, "no γ in G_x1 moves u off H^p·u"))?;
        let gu = gamma.apply(u);
        if h.orbit(u)?.binary_search(&gu).is_err() || h.orbit(x1)?.binary_search(&u).is_ok() {
            return Err(internal(Anchor::AdjacentPair, format!("γ(u)={gu} not in H·u or u in H·x1")));
        }
        self.log(step, Anchor::AdjacentPair, format!("x1={x1} u={u} gamma(u)={gu}"));

        let q = h.orbit_partition();
        let quotient = ctx.action.on_quotient(&q)?;
        let (from, to) = (q.block_of(x1), q.block_of(u));
        let path = if q.block_count() == 2 {
            self.log(step, Anchor::QuotientHamiltonPath, "X/H = K2");
            vec![from, to]
        } else {
            let cycle = self.edge_cycle_in_quotient(ctx, h, &quotient, (from, to), step)?;
            let path = cycle.open_at_edge(from, to).ok_or_else(|| {
                internal(Anchor::QuotientEdgeCycle, "cycle does not use the requested edge")
            })?;
            self.log(step, Anchor::QuotientHamiltonPath, format!("{} blocks", path.len()));
            path
        };
        let lifted = lift_path(x, &q, &path, x1)?;
        self.log(step, Anchor::PathLift, format!("ends at {}", lifted[lifted.len() - 1]));

        let end = lifted[lifted.len() - 1];
        for (label, y1) in [("u", u), ("gamma(u)", gu)] {
            if hp.orbit(y1)?.binary_search(&end).is_ok() {
                continue;
            }
            let mut candidate = vec![y1];
            candidate.extend_from_slice(&lifted);
            let cert = factor_group_cycle(x, h, p, &candidate)?;
            self.log(
                step,
                Anchor::FactorGroupLemma,
                format!("|H|={} path starts at {label}, {} vertices", h.order()?, cert.vertices.len()),
            );
            return self.checked(ctx, cert, Anchor::FactorGroupLemma);
        }
        Err(internal(Anchor::FactorGroupLemma, "both candidate paths close in X/H^p"))
    }

    /// A Hamilton cycle of `X/h` through the quotient edge `e`.
    fn edge_cycle_in_quotient(
        &mut self,
        ctx: &Context,
        h: &PermGroup,
        quotient: &QuotientAction,
        e: Edge,
        step: &str,
    ) -> Result<HamiltonCertificate> {
        let graph = quotient.action.graph();
        if !graph.has_edge(e.0, e.1) {
            return Err(internal(Anchor::QuotientEdgeCycle, format!("{e:?} is not a quotient edge")));
        }
        if h.same_elements(&ctx.derived)? {
            let cert = self.abelian_quotient_cycle(quotient, Some(e))?;
            self.log(step, Anchor::QuotientEdgeCycle, "X/G' is an abelian Cayley graph");
            return Ok(cert);
        }
        let prefix = format!("{step}.");
        let cycle = match self.solve(&quotient.action, &prefix)? {
            Solved::Cycle(c) => c,
            Solved::Petersen => {
                return Err(internal(Anchor::QuotientRecursion, "quotient is the Petersen graph"))
            }
            Solved::Violation(v) => {
                return Err(internal(Anchor::QuotientRecursion, format!("quotient violates {v}")))
            }
        };
        self.log(step, Anchor::QuotientRecursion, format!("{} vertices", graph.vertex_count()));
        for (i, g) in quotient.action.group().elements()?.iter().enumerate() {
            let image = HamiltonCertificate::cycle(cycle.vertices.iter().map(|&v| g.apply(v)).collect());
            if image.uses_edge(e.0, e.1) {
                self.log(step, Anchor::QuotientEdgeCycle, format!("translate {i} uses the edge"));
                return Ok(image);
            }
        }
        Err(internal(Anchor::QuotientEdgeCycle, "no translate of the cycle uses the edge"))
    }

    /// A Hamilton cycle of a quotient on which the group acts as a regular
    /// abelian group, through `edge` when given.
    fn abelian_quotient_cycle(
        &mut self,
        quotient: &QuotientAction,
        edge: Option<Edge>,
    ) -> Result<HamiltonCertificate> {
        let Some(labeling) = quotient.action.sabidussi_labeling(0)? else {
            return Err(internal(Anchor::QuotientEdgeCycle, "the abelian quotient action is not regular"));
        };
        let map = &labeling.vertex_of_element;
        let cert = match edge {
            Some((a, b)) => {
                let element_of = |v: usize| map.iter().position(|&w| w == v).expect("bijective");
                abelian_ham::hamilton_cycle_through_edge(&labeling.spec, (element_of(a), element_of(b)))?
            }
            None => abelian_ham::hamilton_cycle_abelian(&labeling.spec)?,
        };
        Ok(cert.mapped(map))
    }

    fn oracle_cycle(
        &mut self,
        ctx: &Context,
        step: &str,
        branch: OracleBranch,
    ) -> Result<HamiltonCertificate> {
        let anchor = branch.anchor();
        match find_hamilton_cycle(ctx.action.graph(), self.budget) {
            SearchOutcome::Found(cert) => {
                self.log(step, anchor, "oracle found a cycle");
                self.assisted.get_or_insert(branch);
                self.checked(ctx, cert, anchor)
            }
            SearchOutcome::NoneExists => Err(internal(anchor, "oracle proved no Hamilton cycle exists")),
            SearchOutcome::BudgetExceeded => Err(PipelineError::BudgetExceeded(anchor)),
        }
    }

    fn checked(
        &self,
        ctx: &Context,
        cert: HamiltonCertificate,
        anchor: Anchor,
    ) -> Result<HamiltonCertificate> {
        cert.check(ctx.action.graph())
            .map_err(|v| internal(anchor, format!("certificate rejected: {v}")))?;
        Ok(cert)
    }
}
