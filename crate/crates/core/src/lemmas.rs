//! Exhaustive checks of the structural facts the construction relies on,
//! evaluated on a concrete action, and the catalog-wide sweep built on them.

use rayon::prelude::*;

use crate::catalog::{self, CatalogEntry};
use crate::certificate::verify_certificate;
use crate::graph::GroupAction;
use crate::oracle::{find_hamilton_cycle, SearchOutcome};
use crate::permgroup::{GroupError, PermGroup};
use crate::pipeline::{self, Outcome};

/// Result of one check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaCheck {
    pub lemma: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct LemmaReport {
    /// Set when the action does not satisfy the hypotheses; no checks run.
    pub skipped: Option<String>,
    pub checks: Vec<LemmaCheck>,
}

impl LemmaReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, lemma: &str) -> Option<&LemmaCheck> {
        self.checks.iter().find(|c| c.lemma == lemma)
    }
}

pub const LEMMAS: [&str; 10] = [
    "orbit-stabilizer",
    "stabilizer-conjugation",
    "stabilizer-product-normality",
    "trivial-normal-core",
    "abelian-quotient",
    "power-subgroup-in-frattini",
    "g-minimal-reduction",
    "frattini-orbits-edgeless",
    "orbit-subgraphs-isomorphic",
    "orbit-subgraphs-connected-odd",
];

/// Runs every check on `a`. Hypotheses are those of the construction,
/// except that graphs with fewer than three vertices are allowed.
pub fn verify_lemma_suite(a: &GroupAction) -> LemmaReport {
    let ctx = match pipeline::validate_with_min_vertices(a, 1) {
        Ok(ctx) => ctx,
        Err(v) => return LemmaReport { skipped: Some(v.to_string()), checks: Vec::new() },
    };
    let checks: [(&'static str, Check); 10] = [
        ("orbit-stabilizer", Suite::orbit_stabilizer),
        ("stabilizer-conjugation", Suite::stabilizer_conjugation),
        ("stabilizer-product-normality", Suite::stabilizer_product_normality),
        ("trivial-normal-core", Suite::trivial_normal_core),
        ("abelian-quotient", Suite::abelian_quotient),
        ("power-subgroup-in-frattini", Suite::power_subgroup_in_frattini),
        ("g-minimal-reduction", Suite::g_minimal_reduction),
        ("frattini-orbits-edgeless", Suite::frattini_orbits_edgeless),
        ("orbit-subgraphs-isomorphic", Suite::orbit_subgraphs_isomorphic),
        ("orbit-subgraphs-connected-odd", Suite::orbit_subgraphs_connected_odd),
    ];
    let suite = match Suite::new(a, ctx) {
        Ok(s) => s,
        Err(e) => return LemmaReport { skipped: Some(e.to_string()), checks: Vec::new() },
    };
    let checks = checks
        .into_iter()
        .map(|(lemma, f)| match f(&suite) {
            Ok(Ok(detail)) => LemmaCheck { lemma, passed: true, detail },
            Ok(Err(detail)) => LemmaCheck { lemma, passed: false, detail },
            Err(e) => LemmaCheck { lemma, passed: false, detail: format!("error: {e}") },
        })
        .collect();
    LemmaReport { skipped: None, checks }
}

type Verdict = Result<String, String>;
type Check = fn(&Suite) -> Result<Verdict, GroupError>;

struct Suite {
    ctx: pipeline::Context,
    reduced: GroupAction,
    kept_orbits: Vec<Vec<(usize, usize)>>,
    normal: Vec<PermGroup>,
    frattini: PermGroup,
}

fn fail<T>(detail: String) -> Result<Verdict, T> {
    Ok(Err(detail))
}

impl Suite {
    fn new(a: &GroupAction, ctx: pipeline::Context) -> Result<Self, GroupError> {
        let reduction = a.g_minimal_reduce().map_err(|e| GroupError::Inconsistent(e.to_string()))?;
        let normal = ctx.group.normal_subgroups()?;
        let frattini = ctx.group.frattini_subgroup()?;
        Ok(Self { ctx, reduced: reduction.action, kept_orbits: reduction.kept, normal, frattini })
    }

    fn n(&self) -> usize {
        self.ctx.group.degree()
    }

    fn orbit_stabilizer(&self) -> Result<Verdict, GroupError> {
        let order = self.ctx.group.order()?;
        for x in 0..self.n() {
            let orbit = self.ctx.group.orbit(x)?.len();
            let stab = self.ctx.stabilizer(x).order()?;
            if orbit * stab != order {
                return fail(format!("x={x}: {orbit}·{stab} != {order}"));
            }
        }
        Ok(Ok(format!("{} points", self.n())))
    }

    fn stabilizer_conjugation(&self) -> Result<Verdict, GroupError> {
        for x in 0..self.n() {
            for g in self.ctx.group.generators() {
                let conjugate = self.ctx.stabilizer(x).conjugate(g);
                if !conjugate.same_elements(self.ctx.stabilizer(g.apply(x)))? {
                    return fail(format!("x={x}, g={g}"));
                }
            }
        }
        Ok(Ok(format!("{} points x {} generators", self.n(), self.ctx.group.generators().len())))
    }

    /// For every normal `H`: `H·G_x` normal for some `x` ⟺ for all `x` ⟺
    /// `H·G_x = H·G_y` for all `x, y`.
    fn stabilizer_product_normality(&self) -> Result<Verdict, GroupError> {
        let g = &self.ctx.group;
        for h in &self.normal {
            let products = (0..self.n())
                .map(|x| g.product_subgroup(h, self.ctx.stabilizer(x)))
                .collect::<Result<Vec<_>, _>>()?;
            let normal = products.iter().map(|p| g.is_normal(p)).collect::<Result<Vec<_>, _>>()?;
            let some = normal.iter().any(|&b| b);
            let all = normal.iter().all(|&b| b);
            let mut equal = true;
            for p in &products[1..] {
                if !p.same_elements(&products[0])? {
                    equal = false;
                    break;
                }
            }
            if some != all || all != equal {
                return fail(format!(
                    "|H|={}: some={some} all={all} equal={equal}",
                    h.order()?
                ));
            }
        }
        Ok(Ok(format!("{} normal subgroups", self.normal.len())))
    }

    fn trivial_normal_core(&self) -> Result<Verdict, GroupError> {
        for x in 0..self.n() {
            let core = self.ctx.stabilizer(x).normal_core_in(&self.ctx.group)?;
            if !core.is_trivial() {
                return fail(format!("x={x}: core of order {}", core.order()?));
            }
        }
        Ok(Ok(format!("|G_x|={}", self.ctx.stabilizer(0).order()?)))
    }

    fn abelian_quotient(&self) -> Result<Verdict, GroupError> {
        let gens = self.ctx.group.generators();
        for a in gens {
            for b in gens {
                if !self.ctx.derived.contains(&a.commutator(b))? {
                    return fail(format!("[{a}, {b}] not in G'"));
                }
            }
        }
        Ok(Ok(format!("|G'|={}", self.ctx.derived.order()?)))
    }

    /// Every subgroup `H` of `G'` is normal in `G` and `H^p ⊆ Φ(G)`.
    fn power_subgroup_in_frattini(&self) -> Result<Verdict, GroupError> {
        let Some(p) = self.ctx.prime else {
            return Ok(Ok("G' trivial".into()));
        };
        for h in &self.ctx.chain {
            if !self.ctx.group.is_normal(h)? {
                return fail(format!("subgroup of order {} is not normal", h.order()?));
            }
            let hp = h.power_subgroup(p)?;
            if !hp.is_subgroup_of(&self.frattini)? {
                return fail(format!("H^p of order {} not in the Frattini subgroup", hp.order()?));
            }
        }
        Ok(Ok(format!("|Φ(G)|={}", self.frattini.order()?)))
    }

    fn g_minimal_reduction(&self) -> Result<Verdict, GroupError> {
        let graph = self.reduced.graph();
        if !graph.is_connected() {
            return fail("reduced graph is disconnected".into());
        }
        for g in self.ctx.group.generators() {
            if !graph.is_automorphism(g) {
                return fail(format!("{g} does not preserve the reduced graph"));
            }
        }
        for orbit in &self.kept_orbits {
            if graph.without_edges(orbit).is_connected() {
                return fail(format!("edge orbit of {:?} is not a cut", orbit[0]));
            }
        }
        Ok(Ok(format!("{} edge orbits kept", self.kept_orbits.len())))
    }

    /// After reduction, orbits of normal subgroups inside `Φ(G)` are
    /// independent sets.
    fn frattini_orbits_edgeless(&self) -> Result<Verdict, GroupError> {
        let graph = self.reduced.graph();
        let mut tested = 0;
        for h in &self.normal {
            if !h.is_subgroup_of(&self.frattini)? {
                continue;
            }
            tested += 1;
            let q = h.orbit_partition();
            if let Some((u, v)) = graph.edges().into_iter().find(|&(u, v)| q.same_block(u, v)) {
                return fail(format!("|H|={}: edge {u}-{v} inside an orbit", h.order()?));
            }
        }
        Ok(Ok(format!("{tested} normal subgroups inside Φ(G)")))
    }

    /// Each `G'`-orbit is mapped onto every other by some group element that
    /// carries induced edges to induced edges.
    fn orbit_subgraphs_isomorphic(&self) -> Result<Verdict, GroupError> {
        let graph = self.reduced.graph();
        let q = self.ctx.derived.orbit_partition();
        let base = q.block(0);
        for b in 1..q.block_count() {
            let target = q.block(b)[0];
            let g = self
                .ctx
                .group
                .elements()?
                .iter()
                .find(|g| g.apply(base[0]) == target)
                .cloned()
                .expect("transitive");
            for &u in base {
                for &v in base {
                    if graph.has_edge(u, v) != graph.has_edge(g.apply(u), g.apply(v)) {
                        return fail(format!("orbit {b}: {u}-{v} not preserved"));
                    }
                    if q.block_of(g.apply(u)) != b {
                        return fail(format!("orbit {b}: G' orbits are not blocks"));
                    }
                }
            }
        }
        Ok(Ok(format!("{} orbits", q.block_count())))
    }

    fn orbit_subgraphs_connected_odd(&self) -> Result<Verdict, GroupError> {
        let q = self.ctx.derived.orbit_partition();
        let (sub, _) = self
            .reduced
            .graph()
            .induced_subgraph(q.block(0))
            .map_err(|e| GroupError::Inconsistent(e.to_string()))?;
        if sub.edge_count() == 0 {
            return Ok(Ok("orbit subgraphs empty".into()));
        }
        let p = self.ctx.prime.unwrap_or(0);
        if !sub.is_connected() || p % 2 == 0 {
            return fail(format!("connected={} p={p}", sub.is_connected()));
        }
        Ok(Ok(format!("connected, p={p}")))
    }
}

/// One row of the sweep report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub instance: String,
    pub check: String,
    pub status: SweepStatus,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepStatus {
    Pass,
    Fail,
    Skip,
}

impl std::fmt::Display for SweepStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SweepStatus::Pass => "PASS",
            SweepStatus::Fail => "FAIL",
            SweepStatus::Skip => "SKIP",
        })
    }
}

impl std::fmt::Display for SweepRow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}\t{}\t{}\t{}", self.instance, self.check, self.status, self.detail)
    }
}

/// Lemma suite plus a construction check for every catalog entry whose
/// group has order at most `max_order`. Entries run in parallel; rows come
/// back ordered by instance name.
pub fn sweep(max_order: usize) -> Vec<SweepRow> {
    let mut entries: Vec<CatalogEntry> = Vec::new();
    let mut rows = Vec::new();
    for name in catalog::names() {
        match catalog::entry(name).expect("listed") {
            Ok(e) => {
                if e.action.group().order().is_ok_and(|o| o <= max_order) {
                    entries.push(e);
                }
            }
            Err(err) => rows.push(SweepRow {
                instance: name.to_string(),
                check: "build".into(),
                status: SweepStatus::Fail,
                detail: err.to_string(),
            }),
        }
    }
    let per_entry: Vec<Vec<SweepRow>> = entries.par_iter().map(sweep_entry).collect();
    rows.extend(per_entry.into_iter().flatten());
    rows.sort_by(|a, b| a.instance.cmp(&b.instance));
    rows
}

fn sweep_entry(e: &CatalogEntry) -> Vec<SweepRow> {
    let row = |check: &str, status, detail: String| SweepRow {
        instance: e.name.to_string(),
        check: check.to_string(),
        status,
        detail,
    };
    let mut rows = Vec::new();
    let report = verify_lemma_suite(&e.action);
    if let Some(reason) = &report.skipped {
        rows.push(row("lemmas", SweepStatus::Skip, reason.clone()));
    }
    for c in &report.checks {
        let status = if c.passed { SweepStatus::Pass } else { SweepStatus::Fail };
        rows.push(row(c.lemma, status, c.detail.clone()));
    }
    let graph = e.action.graph();
    match pipeline::hamiltonize(&e.action) {
        Ok(result) => match &result.outcome {
            Outcome::Cycle(c) | Outcome::OracleAssisted { cert: c, .. } => {
                let ok = verify_certificate(graph, c);
                let status = if ok { SweepStatus::Pass } else { SweepStatus::Fail };
                let how = match &result.outcome {
                    Outcome::OracleAssisted { branch, .. } => format!("oracle-assisted {branch}"),
                    _ => "constructed".to_string(),
                };
                rows.push(row("hamiltonize", status, format!("{how} cycle")));
            }
            Outcome::PetersenException => {
                let confirmed = find_hamilton_cycle(graph, crate::oracle::DEFAULT_BUDGET)
                    == SearchOutcome::NoneExists;
                let status = if confirmed { SweepStatus::Pass } else { SweepStatus::Fail };
                rows.push(row("hamiltonize", status, "Petersen exception, oracle: no cycle".into()));
            }
            Outcome::HypothesisViolation(v) => {
                rows.push(row("hamiltonize", SweepStatus::Skip, v.to_string()));
            }
        },
        Err(err) => rows.push(row("hamiltonize", SweepStatus::Fail, err.to_string())),
    }
    rows
}
