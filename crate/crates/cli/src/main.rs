//! `hermix`: matrices, cycle classes, minors, tree counts and sweeps for
//! mixed-graph files.
//!
//! Exit status: 0 when every check of the command holds, 1 when one fails,
//! 2 on usage, input or configuration errors.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hermix_core::eisenstein::bigint_to_json;
use hermix_core::linalg::det;
use hermix_core::verify::{load_sweep_specs, DEFAULT_CYCLE_LIMIT};
use hermix_core::{
    build_d, build_l, build_n, build_q, build_s, build_t, classify_cycle, offdiag_minor_l,
    offdiag_minor_q, parse_graph, principal_minor_l, principal_minor_q, run_sweep,
    spanning_trees_kirchhoff, tree_count_via_l, tree_count_via_q, LabelingOutcome, MinorReport,
    MixedGraph, TreeCountReport,
};

#[derive(Parser)]
#[command(
    name = "hermix",
    version,
    about = "Exact Hermitian Laplacians of mixed graphs over Z[ω]"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Cycle enumeration limit (classify) or orientation budget (verify).
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Seed override for every sweep (verify).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum Which {
    N,
    D,
    L,
    Q,
    S,
    T,
}

#[derive(Subcommand)]
enum Command {
    /// Print N, D, L, Q, S, T with exact entries and their complex values.
    Matrices {
        file: PathBuf,
        /// Comma-separated subset of N,D,L,Q,S,T (default: all).
        #[arg(long, value_enum, value_delimiter = ',', ignore_case = true)]
        which: Vec<Which>,
        /// Print exact entries only, without complex values (text format).
        #[arg(long)]
        exact_only: bool,
    },
    /// List simple cycles with their classes and the labeling verdicts.
    Classify { file: PathBuf },
    /// Compare minors of L and Q with their combinatorial sums.
    Minor {
        file: PathBuf,
        /// Row vertices, comma-separated and 1-based.
        #[arg(long, value_parser = parse_vertex_list)]
        v1: VertexList,
        /// Column vertices (default: same as --v1).
        #[arg(long, value_parser = parse_vertex_list)]
        v2: Option<VertexList>,
    },
    /// Kirchhoff count and the cofactor-based counts from L and Q.
    Treecount { file: PathBuf },
    /// Run the sweeps of a spec file.
    Verify {
        spec: PathBuf,
        /// Include wall time in JSON output.
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Clone, Debug)]
struct VertexList(BTreeSet<usize>);

fn parse_vertex_list(s: &str) -> Result<VertexList, String> {
    let mut out = BTreeSet::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let v: usize = part
            .parse()
            .map_err(|_| format!("`{part}` is not a vertex index"))?;
        if v == 0 {
            return Err("vertices are 1-based".into());
        }
        if !out.insert(v) {
            return Err(format!("vertex {v} listed twice"));
        }
    }
    if out.is_empty() {
        return Err("empty vertex list".into());
    }
    Ok(VertexList(out))
}

/// Command result: rendered output and whether all checks held.
struct Output {
    text: String,
    json: Value,
    ok: bool,
}

#[derive(Debug)]
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let body = match cli.format {
                Format::Text => out.text,
                Format::Json => format!(
                    "{}\n",
                    serde_json::to_string_pretty(&out.json).expect("JSON value")
                ),
            };
            let written = match &cli.output {
                Some(path) => fs::write(path, body).map_err(|e| format!("{}: {e}", path.display())),
                None => {
                    print!("{body}");
                    Ok(())
                }
            };
            match written {
                Err(e) => {
                    eprintln!("hermix: {e}");
                    ExitCode::from(2)
                }
                Ok(()) if out.ok => ExitCode::SUCCESS,
                Ok(()) => ExitCode::from(1),
            }
        }
        Err(UsageError(msg)) => {
            eprintln!("hermix: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Output, UsageError> {
    match &cli.command {
        Command::Matrices {
            file,
            which,
            exact_only,
        } => cmd_matrices(&load_graph(file)?, which, !*exact_only),
        Command::Classify { file } => {
            let limit = cli.budget.map_or(DEFAULT_CYCLE_LIMIT, |b| b as usize);
            cmd_classify(&load_graph(file)?, limit)
        }
        Command::Minor { file, v1, v2 } => {
            let v2 = v2.as_ref().unwrap_or(v1);
            cmd_minor(&load_graph(file)?, &v1.0, &v2.0)
        }
        Command::Treecount { file } => cmd_treecount(&load_graph(file)?),
        Command::Verify { spec, timing } => cmd_verify(spec, cli.seed, cli.budget, *timing),
    }
}

fn load_graph(path: &Path) -> Result<MixedGraph, UsageError> {
    let text =
        fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    parse_graph(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn graph_header(g: &MixedGraph) -> String {
    format!(
        "graph: {} vertices, {} edges, {}\n",
        g.vertex_count(),
        g.edge_count(),
        if g.is_connected() {
            "connected"
        } else {
            "disconnected"
        }
    )
}

fn cmd_matrices(g: &MixedGraph, which: &[Which], complex: bool) -> Result<Output, UsageError> {
    let all = [Which::N, Which::D, Which::L, Which::Q, Which::S, Which::T];
    let which: Vec<Which> = if which.is_empty() {
        all.to_vec()
    } else {
        all.into_iter().filter(|w| which.contains(w)).collect()
    };
    let mut text = graph_header(g);
    let mut json = serde_json::Map::new();
    json.insert("graph".to_string(), json!(g.to_text()));
    let mut ok = true;
    for w in which {
        let (name, m) = match w {
            Which::N => ("N", build_n(g)),
            Which::D => ("D", build_d(g)),
            Which::L => ("L", build_l(g)),
            Which::Q => ("Q", build_q(g)),
            Which::S => ("S", build_s(g)),
            Which::T => ("T", build_t(g)),
        };
        text.push_str(&format!("\n{name} =\n{}", m.render_text(complex)));
        let mut entry = m.to_json();
        let factor = match w {
            Which::S => Some(("S·S* = L", m.mul(&m.adjoint())? == build_l(g))),
            Which::T => Some(("T·T* = Q", m.mul(&m.adjoint())? == build_q(g))),
            _ => None,
        };
        if let Some((label, holds)) = factor {
            text.push_str(&format!("{label}: {holds}\n"));
            entry["factorization_holds"] = json!(holds);
            ok &= holds;
        }
        json.insert(name.to_string(), entry);
    }
    Ok(Output {
        text,
        json: Value::Object(json),
        ok,
    })
}

fn labeling_text(outcome: &LabelingOutcome) -> String {
    match outcome {
        LabelingOutcome::Labeled(l) => {
            let labels: Vec<String> = l
                .labels
                .iter()
                .enumerate()
                .map(|(i, x)| format!("{}:{x}", i + 1))
                .collect();
            format!("yes, labels {}", labels.join(" "))
        }
        LabelingOutcome::Conflict(c) => format!("no, obstruction cycle {}", path_text(&c.vertices)),
    }
}

fn labeling_json(outcome: &LabelingOutcome) -> Value {
    match outcome {
        LabelingOutcome::Labeled(l) => json!({"exists": true, "labels": l.labels}),
        LabelingOutcome::Conflict(c) => json!({"exists": false, "obstruction": c.vertices}),
    }
}

fn path_text(vs: &[usize]) -> String {
    vs.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("-")
}

fn cmd_classify(g: &MixedGraph, limit: usize) -> Result<Output, UsageError> {
    let cycles = g.simple_cycles(limit)?;
    let reports = cycles
        .iter()
        .map(|c| classify_cycle(c, g))
        .collect::<Result<Vec<_>, _>>()?;
    let sp = hermix_core::structure::sp_analysis(g);
    let quasi = hermix_core::structure::quasi_analysis(g);
    let det_l = det(&build_l(g))?;
    let det_q = det(&build_q(g))?;
    let connected = g.is_connected();
    let all_phi4 = reports.iter().all(|r| r.phi == hermix_core::PhiClass::Phi4);
    let all_psi4 = reports.iter().all(|r| r.psi == hermix_core::PsiClass::Psi4);
    let sp_yes = matches!(sp, LabelingOutcome::Labeled(_));
    let quasi_yes = matches!(quasi, LabelingOutcome::Labeled(_));
    // determinant equivalences are only claimed for connected graphs
    let consistent = sp_yes == all_phi4
        && quasi_yes == all_psi4
        && (!connected || (sp_yes == det_l.is_zero() && quasi_yes == det_q.is_zero()));

    let mut text = graph_header(g);
    text.push_str(&format!("cycles ({}):\n", reports.len()));
    for r in &reports {
        text.push_str(&format!(
            "  {:<16} a={} b={} c={}  {} {}\n",
            path_text(&r.vertices),
            r.a,
            r.b,
            r.c,
            r.phi,
            r.psi
        ));
    }
    text.push_str(&format!("SP: {}\n", labeling_text(&sp)));
    text.push_str(&format!("det L = {}\n", det_l));
    text.push_str(&format!(
        "quasi-singular labeling: {}\n",
        labeling_text(&quasi)
    ));
    text.push_str(&format!("det Q = {}\n", det_q));
    text.push_str(&format!("consistent: {consistent}\n"));
    let json = json!({
        "graph": g.to_text(),
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "connected": connected,
        "cycles": reports,
        "sp": labeling_json(&sp),
        "quasi": labeling_json(&quasi),
        "det_l": det_l,
        "det_q": det_q,
        "consistent": consistent,
    });
    Ok(Output {
        text,
        json,
        ok: consistent,
    })
}

fn minor_text(r: &MinorReport) -> String {
    format!(
        "{}[{:?},{:?}]: det = {} (|.|² = {}), sum = {} over {} terms (|.|² = {}), match: {}\n",
        r.matrix,
        r.v1,
        r.v2,
        r.algebraic,
        r.norm_algebraic(),
        r.combinatorial,
        r.terms,
        r.norm_combinatorial(),
        r.exact_match()
    )
}

fn cmd_minor(
    g: &MixedGraph,
    v1: &BTreeSet<usize>,
    v2: &BTreeSet<usize>,
) -> Result<Output, UsageError> {
    let (l, q) = if v1 == v2 {
        (principal_minor_l(g, v1)?, principal_minor_q(g, v1)?)
    } else {
        (offdiag_minor_l(g, v1, v2)?, offdiag_minor_q(g, v1, v2)?)
    };
    let text = format!("{}{}{}", graph_header(g), minor_text(&l), minor_text(&q));
    Ok(Output {
        text,
        json: json!({"graph": g.to_text(), "L": l.to_json(), "Q": q.to_json()}),
        ok: l.exact_match() && q.exact_match(),
    })
}

fn tree_text(r: &TreeCountReport) -> String {
    if !r.applicable {
        let witness = r
            .witness
            .as_ref()
            .map(|w| {
                format!(
                    "; cofactors ({},{}) and ({},{}) have norms {} and {}",
                    w.first.0, w.first.1, w.second.0, w.second.1, w.first.2, w.second.2
                )
            })
            .unwrap_or_default();
        return format!(
            "{}-based: not applicable (no labeling){witness}\n",
            r.matrix
        );
    }
    let count = r
        .count
        .as_ref()
        .map_or("none".to_string(), |c| c.to_string());
    let norm = r
        .common_norm
        .as_ref()
        .map_or("unequal".to_string(), |n| n.to_string());
    format!(
        "{}-based: count {count}, common cofactor norm {norm}, holds: {}\n",
        r.matrix,
        r.holds()
    )
}

fn cmd_treecount(g: &MixedGraph) -> Result<Output, UsageError> {
    let kirchhoff = spanning_trees_kirchhoff(g);
    let l = tree_count_via_l(g)?;
    let q = tree_count_via_q(g)?;
    let text = format!(
        "{}Kirchhoff: {kirchhoff}\n{}{}",
        graph_header(g),
        tree_text(&l),
        tree_text(&q)
    );
    Ok(Output {
        text,
        json: json!({"graph": g.to_text(), "kirchhoff": bigint_to_json(&kirchhoff), "L": l.to_json(), "Q": q.to_json()}),
        ok: l.holds() && q.holds(),
    })
}

fn cmd_verify(
    path: &Path,
    seed: Option<u64>,
    budget: Option<u64>,
    timing: bool,
) -> Result<Output, UsageError> {
    let mut specs = load_sweep_specs(path)?;
    for s in &mut specs {
        if let Some(seed) = seed {
            s.seed = seed;
        }
        if let Some(b) = budget {
            s.budget = b;
        }
    }
    // materialize every sweep's graphs first so budget errors surface before any work
    for s in &specs {
        hermix_core::verify::sweep_graphs(s)?;
    }
    let mut text = String::new();
    let mut reports = Vec::new();
    let mut ok = true;
    for s in &specs {
        let r = run_sweep(s)?;
        ok &= r.ok();
        text.push_str(&r.summary_table());
        reports.push(r.to_json(timing));
    }
    text.push_str(if ok {
        "verify: all checks passed\n"
    } else {
        "verify: FAILURES\n"
    });
    Ok(Output {
        text,
        json: json!({"sweeps": reports, "ok": ok}),
        ok,
    })
}
