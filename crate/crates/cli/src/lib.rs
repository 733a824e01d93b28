//! Command implementations for the `pellgraph` binary. Commands write data
//! to `out` and human-readable summaries to `diag`, so they can be driven
//! from tests without a process boundary.

use std::io::Write;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pellgraph::graphs::{build_pell_graph, BuildLimits, Graph};
use pellgraph::irregularity::imbalance;
use pellgraph::pellstruct::{
    classify_edge, e_closed, e_initial, edge_count_closed, irr_closed, sigma_closed, EdgeKind,
    MAX_PELL_IMBALANCE,
};
use pellgraph::seq::SeqValue;
use pellgraph::verify::{parse_checks, verify, Check, VerificationReport, VerifyConfig};
use pellgraph::words::PellString;

/// Largest `n` for formula tables, which need no graph.
pub const TABLE_MAX_N: usize = 60;

#[derive(Debug, Parser)]
#[command(
    name = "pellgraph",
    version,
    about = "Pell graphs, irregularity and expansion checks"
)]
pub struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "PELLGRAPH_THREADS")]
    pub threads: Option<usize>,
    /// Largest n for which Pell graphs may be built.
    #[arg(long, global = true, env = "PELLGRAPH_BUILD_LIMIT")]
    pub build_limit: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the counting formulas against brute force.
    Verify(VerifyArgs),
    /// Print a formula table.
    Table(TableArgs),
    /// Print the edges or adjacency lists of a Pell graph.
    Graph(GraphArgs),
    /// Classify every edge of a Pell graph and compare with its imbalance.
    Classify(ClassifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    /// Newline-delimited JSON.
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Stat {
    E,
    Irr,
    Sigma,
    Edges,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Edges,
    Adjacency,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 10)]
    pub max_n: usize,
    /// Comma-separated checks, or `all`. Default: every per-n check.
    #[arg(long)]
    pub checks: Option<String>,
    /// First seed of the random expansion campaign.
    #[arg(long, env = "PELLGRAPH_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long, value_enum)]
    pub stat: Stat,
    #[arg(long, default_value_t = 10)]
    pub max_n: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Emit::Edges)]
    pub emit: Emit,
    /// Print vertices as Pell words.
    #[arg(long, conflicts_with = "indices")]
    pub labels: bool,
    /// Print vertices as indices (the default).
    #[arg(long)]
    pub indices: bool,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

/// How a command finished when it did not hit an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    AllPass,
    Violation,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::AllPass => 0,
            Status::Violation => 1,
        }
    }
}

fn limits(cli: &Cli) -> BuildLimits {
    let mut l = BuildLimits::default();
    if let Some(p) = cli.build_limit {
        l.pell = p;
    }
    l
}

/// Runs `cli` on the current rayon pool.
pub fn run(cli: &Cli, out: &mut dyn Write, diag: &mut dyn Write) -> Result<Status> {
    let limits = limits(cli);
    match &cli.command {
        Command::Verify(a) => cmd_verify(a, &limits, out, diag),
        Command::Table(a) => cmd_table(a, out).map(|_| Status::AllPass),
        Command::Graph(a) => cmd_graph(a, &limits, out).map(|_| Status::AllPass),
        Command::Classify(a) => cmd_classify(a, &limits, out, diag),
    }
}

/// Quotes a CSV field when it holds a separator or a quote.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn cmd_verify(
    a: &VerifyArgs,
    limits: &BuildLimits,
    out: &mut dyn Write,
    diag: &mut dyn Write,
) -> Result<Status> {
    let checks = match &a.checks {
        Some(list) => parse_checks(list)?,
        None => Check::PER_N.to_vec(),
    };
    if checks.is_empty() {
        bail!("no checks selected");
    }
    let config = VerifyConfig {
        max_n: a.max_n,
        checks,
        seed: a.seed,
        limits: *limits,
        ..Default::default()
    };
    let report = verify(&config)?;
    write_report(&report, a.format, out)?;
    let s = report.summary();
    writeln!(
        diag,
        "verify: {} entries, {} passed, {} failed, {} observations",
        s.passed + s.failed,
        s.passed,
        s.failed,
        report.observations.len()
    )?;
    for t in &report.timings {
        writeln!(diag, "  {:<12} {:>9.3}s", t.check, t.wall.as_secs_f64())?;
    }
    Ok(if report.passed() {
        Status::AllPass
    } else {
        Status::Violation
    })
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Record<'a> {
    Entry(&'a pellgraph::verify::Entry),
    Observation(&'a pellgraph::verify::Observation),
    Summary(pellgraph::verify::Summary),
}

fn write_report(report: &VerificationReport, format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Json => {
            for e in &report.entries {
                writeln!(out, "{}", serde_json::to_string(&Record::Entry(e))?)?;
            }
            for o in &report.observations {
                writeln!(out, "{}", serde_json::to_string(&Record::Observation(o))?)?;
            }
            writeln!(
                out,
                "{}",
                serde_json::to_string(&Record::Summary(report.summary()))?
            )?;
        }
        Format::Csv => {
            writeln!(out, "kind,check,n,i,item,expected,actual,pass")?;
            for e in &report.entries {
                writeln!(
                    out,
                    "entry,{},{},{},{},{},{},{}",
                    e.check,
                    opt(e.n),
                    opt(e.i),
                    csv_field(e.item.as_deref().unwrap_or_default()),
                    e.expected,
                    e.actual,
                    e.pass
                )?;
            }
            for o in &report.observations {
                writeln!(
                    out,
                    "observation,{},{},{},{},{},{},{}",
                    o.check,
                    opt(o.n),
                    opt(o.i),
                    csv_field(o.item.as_deref().unwrap_or_default()),
                    opt(o.expected),
                    opt(o.actual),
                    opt(o.matches)
                )?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct Row {
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    i: Option<usize>,
    value: SeqValue,
}

fn table_rows(stat: Stat, max_n: usize) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for n in 1..=max_n {
        match stat {
            Stat::E => {
                for i in 0..=MAX_PELL_IMBALANCE {
                    let value = match e_initial(n, i) {
                        Some(v) => v,
                        None => e_closed(n, i)?,
                    };
                    rows.push(Row {
                        n,
                        i: Some(i),
                        value,
                    });
                }
            }
            Stat::Irr => rows.push(Row {
                n,
                i: None,
                value: irr_closed(n)?,
            }),
            Stat::Sigma if n >= 2 => rows.push(Row {
                n,
                i: None,
                value: sigma_closed(n)?,
            }),
            Stat::Sigma => {}
            Stat::Edges => rows.push(Row {
                n,
                i: None,
                value: edge_count_closed(n)?,
            }),
        }
    }
    Ok(rows)
}

pub fn cmd_table(a: &TableArgs, out: &mut dyn Write) -> Result<()> {
    if a.max_n < 1 || a.max_n > TABLE_MAX_N {
        bail!("--max-n must be in 1..={TABLE_MAX_N}");
    }
    let rows = table_rows(a.stat, a.max_n)?;
    match a.format {
        Format::Json => {
            for r in &rows {
                writeln!(out, "{}", serde_json::to_string(r)?)?;
            }
        }
        Format::Csv => {
            writeln!(
                out,
                "{}",
                if a.stat == Stat::E {
                    "n,i,value"
                } else {
                    "n,value"
                }
            )?;
            for r in &rows {
                match r.i {
                    Some(i) => writeln!(out, "{},{},{}", r.n, i, r.value)?,
                    None => writeln!(out, "{},{}", r.n, r.value)?,
                }
            }
        }
    }
    Ok(())
}

fn pell_graph(n: usize, limits: &BuildLimits) -> Result<Graph> {
    build_pell_graph(n, limits).with_context(|| format!("building the Pell graph of order {n}"))
}

pub fn cmd_graph(a: &GraphArgs, limits: &BuildLimits, out: &mut dyn Write) -> Result<()> {
    let g = pell_graph(a.n, limits)?;
    let name = |v: usize| if a.labels { g.label(v) } else { v.to_string() };
    match a.emit {
        Emit::Edges => {
            for (u, v) in g.edges() {
                writeln!(out, "{} {}", name(u), name(v))?;
            }
        }
        Emit::Adjacency => {
            for v in 0..g.n_vertices() {
                let nb: Vec<String> = g.neighbors(v).iter().map(|&w| name(w)).collect();
                writeln!(out, "{}: {}", name(v), nb.join(" "))?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ClassifiedEdge {
    u: String,
    v: String,
    kind: EdgeKind,
    site: usize,
    predicted: u8,
    measured: u64,
}

pub fn cmd_classify(
    a: &ClassifyArgs,
    limits: &BuildLimits,
    out: &mut dyn Write,
    diag: &mut dyn Write,
) -> Result<Status> {
    let g = pell_graph(a.n, limits)?;
    let labels = g.labels().context("Pell graphs carry labels")?;
    let words: Vec<PellString> = labels.iter().map(|l| l.parse()).collect::<Result<_, _>>()?;
    if a.format == Format::Csv {
        writeln!(out, "u,v,kind,site,predicted,measured")?;
    }
    let mut mismatches = 0usize;
    for (u, v) in g.edges() {
        let class = classify_edge(&words[u], &words[v])?;
        let row = ClassifiedEdge {
            u: labels[u].clone(),
            v: labels[v].clone(),
            kind: class.kind,
            site: class.site,
            predicted: class.predicted,
            measured: imbalance(&g, u, v)?,
        };
        if u64::from(row.predicted) != row.measured {
            mismatches += 1;
        }
        match a.format {
            Format::Json => writeln!(out, "{}", serde_json::to_string(&row)?)?,
            Format::Csv => {
                let kind = match row.kind {
                    EdgeKind::Flip => "flip",
                    EdgeKind::Swap => "swap",
                };
                writeln!(
                    out,
                    "{},{},{kind},{},{},{}",
                    row.u, row.v, row.site, row.predicted, row.measured
                )?
            }
        }
    }
    writeln!(
        diag,
        "classify: {} edges, {mismatches} mismatched",
        g.n_edges()
    )?;
    Ok(if mismatches == 0 {
        Status::AllPass
    } else {
        Status::Violation
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (Result<Status>, String) {
        let cli =
            Cli::try_parse_from(std::iter::once("pellgraph").chain(args.iter().copied())).unwrap();
        let (mut out, mut diag) = (Vec::new(), Vec::new());
        let status = run(&cli, &mut out, &mut diag);
        (status, String::from_utf8(out).unwrap())
    }

    #[test]
    fn table_rows_end_where_expected() {
        let (_, edges) = run_args(&["table", "--stat", "edges", "--max-n", "4"]);
        assert_eq!(edges.lines().last(), Some("4,58"));
        let (_, irr) = run_args(&["table", "--stat", "irr", "--max-n", "4"]);
        assert_eq!(irr.lines().last(), Some("4,64"));
        let (_, e) = run_args(&["table", "--stat", "e", "--max-n", "4"]);
        assert!(e.lines().any(|l| l == "4,2,11"));
        assert_eq!(e.lines().next(), Some("n,i,value"));
    }

    #[test]
    fn table_json_is_line_delimited() {
        let (_, s) = run_args(&[
            "table", "--stat", "sigma", "--max-n", "3", "--format", "json",
        ]);
        assert_eq!(s, "{\"n\":2,\"value\":6}\n{\"n\":3,\"value\":36}\n");
    }

    #[test]
    fn table_allows_sixty_but_not_more() {
        let (status, s) = run_args(&["table", "--stat", "e", "--max-n", "60"]);
        assert!(status.is_ok());
        assert_eq!(s.lines().count(), 1 + 60 * 5);
        let (status, _) = run_args(&["table", "--stat", "e", "--max-n", "61"]);
        assert!(status.is_err());
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("K_2,3"), "\"K_2,3\"");
        assert_eq!(csv_field("plain"), "plain");
    }

    #[test]
    fn graph_and_classify_outputs() {
        let (_, s) = run_args(&["graph", "--n", "1", "--emit", "edges", "--labels"]);
        assert_eq!(s, "0 1\n");
        let (_, s) = run_args(&["graph", "--n", "2", "--emit", "adjacency", "--labels"]);
        assert!(s.lines().any(|l| l == "11: 01 10 22"));
        let (status, s) = run_args(&["classify", "--n", "2"]);
        assert_eq!(status.unwrap(), Status::AllPass);
        assert!(s.lines().any(|l| l == "11,22,swap,0,2,2"));
    }

    #[test]
    fn build_limit_is_respected() {
        let (status, _) = run_args(&["--build-limit", "3", "graph", "--n", "4"]);
        assert!(status.is_err());
    }
}
