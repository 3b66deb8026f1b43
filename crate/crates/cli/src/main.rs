use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use groupcount::census::census;
use groupcount::classifier::{classify, scan_range, solve, SolveError, CLASSIFIED};
use groupcount::cubefree::{count, CountResult};
use groupcount::graph::HolderGraph;
use serde::Serialize;
use serde_json::{json, Value};

const VERIFY_LIMIT: u64 = 1_000_000;
const MAX_N: u64 = 1 << 63;

/// Exit codes.
const OK: u8 = 0;
const VERIFY_FAILED: u8 = 1;
const INVALID: u8 = 2;
const UNCLASSIFIED_K: u8 = 3;
const UNSUPPORTED: u8 = 4;

#[derive(Parser)]
#[command(
    name = "groupcount",
    version,
    about = "Count groups of order n from its factorization"
)]
struct Cli {
    /// Print a JSON envelope instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Range {
    /// Largest n to scan.
    #[arg(long)]
    max: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Number of groups of order n.
    Count { n: u64 },
    /// The generalized Hölder graph of n.
    Graph {
        n: u64,
        /// Graphviz output; weak arrows are dashed.
        #[arg(long, conflicts_with = "json")]
        dot: bool,
    },
    /// Which rule, if any, gives g(n) in {1, 2, 3, 6, 7}.
    Classify { n: u64 },
    /// All n up to --max with g(n) = k.
    Solve {
        k: u8,
        #[command(flatten)]
        range: Range,
    },
    /// Cross-check classify against count over 1..=max.
    Verify {
        #[command(flatten)]
        range: Range,
    },
    /// Square-free graph shapes with g equal to the target.
    Census {
        #[arg(long, default_value_t = 5)]
        vertices: usize,
        #[arg(long)]
        target: u64,
    },
}

#[derive(Serialize)]
struct Envelope {
    command: &'static str,
    input: Value,
    result: Value,
    status: &'static str,
    note: Option<String>,
}

struct Outcome {
    command: &'static str,
    input: Value,
    result: Value,
    text: String,
    code: u8,
    note: Option<String>,
}

impl Outcome {
    fn ok(command: &'static str, input: Value, result: Value, text: String) -> Self {
        Outcome {
            command,
            input,
            result,
            text,
            code: OK,
            note: None,
        }
    }

    fn fail(command: &'static str, input: Value, code: u8, note: String) -> Self {
        Outcome {
            command,
            input,
            result: Value::Null,
            text: String::new(),
            code,
            note: Some(note),
        }
    }

    fn status(&self) -> &'static str {
        match self.code {
            OK => "ok",
            UNSUPPORTED => "unsupported",
            _ => "error",
        }
    }
}

fn jobs(requested: Option<usize>) -> usize {
    requested
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1)
}

fn check_n(command: &'static str, n: u64) -> Result<(), Box<Outcome>> {
    if n == 0 || n > MAX_N {
        return Err(Box::new(Outcome::fail(
            command,
            json!({ "n": n }),
            INVALID,
            format!("n must be in 1..=2^63, got {n}"),
        )));
    }
    Ok(())
}

fn cmd_count(n: u64) -> Outcome {
    if let Err(e) = check_n("count", n) {
        return *e;
    }
    let result = count(n).expect("n >= 1");
    let input = json!({ "n": n });
    let payload = serde_json::to_value(result).expect("serializable");
    match result {
        CountResult::Exact { value } => {
            Outcome::ok("count", input, payload, format!("g({n}) = {value}"))
        }
        CountResult::Unsupported {
            reason,
            lower_bound,
        } => {
            let bound = lower_bound.map_or(String::new(), |b| format!(", g({n}) >= {b}"));
            let note = format!("unsupported ({}){bound}", reason.as_str());
            Outcome {
                command: "count",
                input,
                result: payload,
                text: format!("g({n}): {note}"),
                code: UNSUPPORTED,
                note: Some(note),
            }
        }
    }
}

fn cmd_graph(n: u64, dot: bool) -> Outcome {
    if let Err(e) = check_n("graph", n) {
        return *e;
    }
    let g = HolderGraph::of(n).expect("n >= 1");
    let result = serde_json::to_value(g.to_json()).expect("serializable");
    let text = if dot {
        g.to_dot().trim_end().to_string()
    } else {
        let names: Vec<String> = g.vertices().iter().map(|v| v.name()).collect();
        let mut lines = vec![format!("vertices: {}", names.join(" "))];
        for e in g.edges() {
            let kind = g.edge_strength(e).map_or("", |s| match s {
                groupcount::graph::Strength::Weak => " (weak)",
                groupcount::graph::Strength::Strong => " (strong)",
            });
            lines.push(format!("{} -> {}{kind}", names[e.from], names[e.to]));
        }
        lines.join("\n")
    };
    Outcome::ok("graph", json!({ "n": n }), result, text)
}

fn cmd_classify(n: u64) -> Outcome {
    if let Err(e) = check_n("classify", n) {
        return *e;
    }
    let v = classify(n);
    let text = match (v.k, v.matched_rule) {
        (Some(k), Some(rule)) => {
            let labels: Vec<String> = v.witness.iter().map(|(a, p)| format!("{a}={p}")).collect();
            format!("{n}: g = {k} by {rule} {}", labels.join(" "))
                .trim_end()
                .to_string()
        }
        _ => format!("{n}: g is not 1, 2, 3, 6 or 7"),
    };
    let result = serde_json::to_value(&v).expect("serializable");
    Outcome::ok("classify", json!({ "n": n }), result, text)
}

fn cmd_solve(k: u8, range: &Range) -> Outcome {
    let input = json!({ "k": k, "max": range.max });
    match solve(k, range.max, jobs(range.jobs)) {
        Ok(found) => {
            let text = found
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join("\n");
            Outcome::ok("solve", input, json!(found), text)
        }
        Err(e @ SolveError::NotClassified(_)) => {
            Outcome::fail("solve", input, UNCLASSIFIED_K, e.to_string())
        }
        Err(e) => Outcome::fail("solve", input, INVALID, e.to_string()),
    }
}

#[derive(Serialize)]
struct Disagreement {
    n: u64,
    count: u64,
    classify: Option<u8>,
}

fn cmd_verify(range: &Range) -> Outcome {
    let input = json!({ "max": range.max });
    if range.max > VERIFY_LIMIT {
        let note = format!("--max must be at most {VERIFY_LIMIT}");
        return Outcome::fail("verify", input, INVALID, note);
    }
    // Per n with an exact count: (n, g, classified k).
    let rows = scan_range(range.max, jobs(range.jobs), |n| {
        let g = count(n).ok()?.value()?;
        Some((n, g, classify(n).k))
    });
    let mut per_k: BTreeMap<String, u64> = CLASSIFIED.iter().map(|k| (k.to_string(), 0)).collect();
    let mut disagreements = Vec::new();
    for &(n, g, k) in &rows {
        let expected = g <= 7 && CLASSIFIED.contains(&(g as u8));
        if expected {
            *per_k.get_mut(&g.to_string()).expect("classified k") += 1;
        }
        let agrees = if expected {
            k == Some(g as u8)
        } else {
            k.is_none()
        };
        if !agrees {
            disagreements.push(Disagreement {
                n,
                count: g,
                classify: k,
            });
        }
    }
    let total = disagreements.len();
    disagreements.truncate(20);
    let result = json!({
        "checked": rows.len(),
        "per_k": per_k,
        "disagreements": total,
        "first_disagreements": disagreements,
    });
    let mut text = format!(
        "checked {} orders with an exact count up to {}\n",
        rows.len(),
        range.max
    );
    for (k, c) in &per_k {
        text.push_str(&format!("g = {k}: {c}\n"));
    }
    text.push_str(&format!("disagreements: {total}"));
    for d in &disagreements {
        text.push_str(&format!(
            "\n  n = {}: count {}, classify {:?}",
            d.n, d.count, d.classify
        ));
    }
    let mut out = Outcome::ok("verify", input, result, text);
    if total > 0 {
        out.code = VERIFY_FAILED;
        out.note = Some(format!("{total} disagreements"));
    }
    out
}

fn cmd_census(vertices: usize, target: u64) -> Outcome {
    let input = json!({ "vertices": vertices, "target": target });
    if !(2..=groupcount::census::MAX_CENSUS_VERTICES).contains(&vertices) {
        return Outcome::fail(
            "census",
            input,
            INVALID,
            "--vertices must be in 2..=6".into(),
        );
    }
    let report = census(&[target], vertices, 2, 2);
    let lines: Vec<String> = report
        .entries
        .iter()
        .map(|e| {
            let edges: Vec<String> = e
                .graph
                .edges
                .iter()
                .map(|[a, b]| format!("{a}->{b}"))
                .collect();
            format!(
                "{}: g = {}, edges {}, smallest n = {}",
                e.name.as_deref().unwrap_or("?"),
                e.g,
                edges.join(" "),
                e.witness
            )
        })
        .collect();
    let text = if lines.is_empty() {
        format!("no connected square-free shape with g = {target}")
    } else {
        lines.join("\n")
    };
    Outcome::ok("census", input, report.to_json(), text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Count { n } => cmd_count(*n),
        Command::Graph { n, dot } => cmd_graph(*n, *dot),
        Command::Classify { n } => cmd_classify(*n),
        Command::Solve { k, range } => cmd_solve(*k, range),
        Command::Verify { range } => cmd_verify(range),
        Command::Census { vertices, target } => cmd_census(*vertices, *target),
    };
    if cli.json {
        let envelope = Envelope {
            command: outcome.command,
            input: outcome.input.clone(),
            result: outcome.result.clone(),
            status: outcome.status(),
            note: outcome.note.clone(),
        };
        println!(
            "{}",
            serde_json::to_string(&envelope).expect("serializable")
        );
    } else if outcome.code == OK || outcome.code == UNSUPPORTED || outcome.code == VERIFY_FAILED {
        println!("{}", outcome.text);
    } else if let Some(note) = &outcome.note {
        eprintln!("error: {note}");
    }
    ExitCode::from(outcome.code)
}
