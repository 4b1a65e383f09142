use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context as _, Result};
use clap::{Args, Parser, Subcommand};

use hamlift::abelian_ham::hamilton_cycle_through_edge;
use hamlift::catalog;
use hamlift::certificate::HamiltonCertificate;
use hamlift::formats;
use hamlift::graph::{CayleySpec, GroupAction};
use hamlift::lemmas::{sweep, SweepStatus};
use hamlift::oracle::{find_hamilton_cycle, find_hamilton_path, SearchOutcome, DEFAULT_BUDGET};
use hamlift::pipeline::{hamiltonize_with_budget, Outcome};

/// Hamilton cycles in vertex-transitive graphs whose group has a cyclic
/// prime-power commutator subgroup.
#[derive(Parser)]
#[command(name = "hamlift", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List or inspect built-in instances.
    Catalog {
        #[command(subcommand)]
        action: CatalogCommand,
    },
    /// Build a Hamilton cycle. Exit 0: cycle, 2: Petersen graph, 1: violation or error.
    Hamilton {
        #[command(flatten)]
        input: Input,
        /// Certificate output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Trace output file (default: stderr).
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Check a certificate against a graph. Exit 0: valid, 1: invalid.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        cert: PathBuf,
    },
    /// Exhaustive search. Exit 0: found, 1: none exists, 3: budget exceeded.
    Oracle {
        #[command(flatten)]
        graph: GraphInput,
        /// Search for a Hamilton path instead of a cycle.
        #[arg(long)]
        path: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Hamilton cycle through a given edge of an abelian Cayley graph.
    CqEdge {
        /// Built-in instance with a Cayley presentation.
        #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
        catalog: Option<String>,
        /// Cayley spec file.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, num_args = 2, value_names = ["U", "V"], required = true)]
        edge: Vec<usize>,
    },
    /// Quotient graph by the orbits of a normal subgroup (default: the commutator subgroup).
    Quotient {
        #[command(flatten)]
        input: Input,
        /// Group file generating the normal subgroup.
        #[arg(long)]
        subgroup: Option<PathBuf>,
    },
    /// Minimal connected spanning subgraph invariant under the group.
    Reduce {
        #[command(flatten)]
        input: Input,
    },
    /// Graphviz rendering of a graph.
    ExportDot {
        #[command(flatten)]
        graph: GraphInput,
    },
    /// Lemma checks and constructions over the catalog. Exit 1 if any check fails.
    Sweep {
        /// Largest group order included.
        #[arg(long, default_value_t = 64)]
        max_order: usize,
        /// Tab-separated report `instance check status detail`.
        #[arg(long)]
        report: PathBuf,
    },
}

#[derive(Subcommand)]
enum CatalogCommand {
    List,
    Show {
        name: String,
        /// Write the graph in text format.
        #[arg(long)]
        write_graph: Option<PathBuf>,
        /// Write the group in text format.
        #[arg(long)]
        write_group: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Input {
    #[arg(long, conflicts_with_all = ["graph", "group"], required_unless_present = "graph")]
    catalog: Option<String>,
    #[arg(long, requires = "group")]
    graph: Option<PathBuf>,
    #[arg(long, requires = "graph")]
    group: Option<PathBuf>,
}

#[derive(Args)]
struct GraphInput {
    #[arg(long, conflicts_with = "graph", required_unless_present = "graph")]
    catalog: Option<String>,
    #[arg(long)]
    graph: Option<PathBuf>,
}

fn catalog_entry(name: &str) -> Result<catalog::CatalogEntry> {
    match catalog::entry(name) {
        Some(e) => Ok(e?),
        None => bail!("unknown catalog entry `{name}`"),
    }
}

impl Input {
    fn load(&self) -> Result<GroupAction> {
        if let Some(name) = &self.catalog {
            return Ok(catalog_entry(name)?.action);
        }
        let (graph, group) = (self.graph.as_ref().unwrap(), self.group.as_ref().unwrap());
        let graph = formats::read_graph(graph)?;
        let group = formats::read_group(group)?;
        GroupAction::new(group, graph).context("group does not act on the graph")
    }
}

impl GraphInput {
    fn load(&self) -> Result<hamlift::graph::Graph> {
        match (&self.catalog, &self.graph) {
            (Some(name), _) => Ok(catalog_entry(name)?.action.graph().clone()),
            (None, Some(path)) => Ok(formats::read_graph(path)?),
            (None, None) => unreachable!("clap requires one input"),
        }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(std::io::stdout().write_all(text.as_bytes())?),
    }
}

fn print_search(outcome: SearchOutcome) -> ExitCode {
    match outcome {
        SearchOutcome::Found(c) => {
            print!("{}", formats::write_certificate(&c));
            ExitCode::SUCCESS
        }
        SearchOutcome::NoneExists => {
            println!("none");
            ExitCode::from(1)
        }
        SearchOutcome::BudgetExceeded => {
            println!("budget exceeded");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Catalog { action: CatalogCommand::List } => {
            let mut out = String::new();
            for name in catalog::names() {
                let e = catalog_entry(name)?;
                out.push_str(&format!("{name}\t{}\n", e.summary));
            }
            print!("{out}");
        }
        Command::Catalog { action: CatalogCommand::Show { name, write_graph, write_group } } => {
            let e = catalog_entry(&name)?;
            let group = e.action.group();
            let derived = group.commutator_subgroup()?;
            println!("name {}", e.name);
            println!("summary {}", e.summary);
            println!("vertices {}", e.action.graph().vertex_count());
            println!("edges {}", e.action.graph().edge_count());
            println!("group order {}", group.order()?);
            println!("commutator order {}", derived.order()?);
            if let Some(spec) = &e.spec {
                println!("cayley {}", formats::write_cayley_spec("-", spec)?.lines().nth(1).unwrap());
            }
            if let Some(p) = write_graph {
                write_output(Some(&p), &formats::write_graph(e.action.graph()))?;
            }
            if let Some(p) = write_group {
                write_output(Some(&p), &formats::write_group(group))?;
            }
        }
        Command::Hamilton { input, out, trace, budget } => {
            let action = input.load()?;
            let result = hamiltonize_with_budget(&action, budget)?;
            let trace_text = result.trace_text();
            match &trace {
                Some(p) => write_output(Some(p), &trace_text)?,
                None => eprint!("{trace_text}"),
            }
            match &result.outcome {
                Outcome::Cycle(c) | Outcome::OracleAssisted { cert: c, .. } => {
                    write_output(out.as_deref(), &formats::write_certificate(c))?;
                }
                Outcome::PetersenException => {
                    eprintln!("Petersen graph: no Hamilton cycle");
                    return Ok(ExitCode::from(2));
                }
                Outcome::HypothesisViolation(v) => {
                    eprintln!("hypothesis violated: {v}");
                    return Ok(ExitCode::from(1));
                }
            }
        }
        Command::Verify { graph, cert } => {
            let graph = formats::read_graph(&graph)?;
            let cert = formats::read_certificate(&cert)?;
            match cert.check(&graph) {
                Ok(()) => println!("valid Hamilton {}", cert.kind),
                Err(v) => {
                    println!("invalid: {v}");
                    return Ok(ExitCode::from(1));
                }
            }
        }
        Command::Oracle { graph, path, budget } => {
            let graph = graph.load()?;
            let outcome = if path {
                find_hamilton_path(&graph, budget)
            } else {
                find_hamilton_cycle(&graph, budget)
            };
            return Ok(print_search(outcome));
        }
        Command::CqEdge { catalog, spec, edge } => {
            let spec: CayleySpec = match (catalog, spec) {
                (Some(name), _) => catalog_entry(&name)?
                    .spec
                    .ok_or_else(|| anyhow!("`{name}` has no Cayley presentation"))?,
                (None, Some(path)) => formats::read_cayley_spec(&path)?,
                (None, None) => unreachable!("clap requires one input"),
            };
            let cycle: HamiltonCertificate = hamilton_cycle_through_edge(&spec, (edge[0], edge[1]))?;
            print!("{}", formats::write_certificate(&cycle));
        }
        Command::Quotient { input, subgroup } => {
            let action = input.load()?;
            let group = action.group();
            let h = match subgroup {
                Some(p) => formats::read_group(&p)?,
                None => group.commutator_subgroup()?,
            };
            if !group.is_normal(&h)? {
                bail!("subgroup is not normal in the group");
            }
            let q = h.orbit_partition();
            let quotient = action.on_quotient(&q)?;
            let mut out = String::new();
            for (b, block) in q.blocks().iter().enumerate() {
                let members: Vec<String> = block.iter().map(|v| v.to_string()).collect();
                let looped = if quotient.loops[b] { " loop" } else { "" };
                out.push_str(&format!("# block {b}: {}{looped}\n", members.join(" ")));
            }
            out.push_str(&formats::write_graph(quotient.action.graph()));
            print!("{out}");
        }
        Command::Reduce { input } => {
            let action = input.load()?;
            let r = action.g_minimal_reduce()?;
            print!(
                "# removed {} edge orbits, kept {}\n{}",
                r.removed.len(),
                r.kept.len(),
                formats::write_graph(r.action.graph())
            );
        }
        Command::ExportDot { graph } => {
            print!("{}", graph.load()?.to_dot());
        }
        Command::Sweep { max_order, report } => {
            let rows = sweep(max_order);
            let text: String = rows.iter().map(|r| format!("{r}\n")).collect();
            fs::write(&report, text).with_context(|| format!("writing {}", report.display()))?;
            let count = |s| rows.iter().filter(|r| r.status == s).count();
            let failed = count(SweepStatus::Fail);
            println!(
                "{} rows: {} pass, {failed} fail, {} skip",
                rows.len(),
                count(SweepStatus::Pass),
                count(SweepStatus::Skip)
            );
            if failed > 0 {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
