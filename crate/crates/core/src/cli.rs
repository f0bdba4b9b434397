//! Command-line front end.
//!
//! [`parse`] turns an argument vector into a [`CommandPlan`], reading and
//! decoding any `--input` payload up front. [`execute`] runs the plan and
//! returns the rendered output with an exit code:
//!
//! * `0` success,
//! * `1` invalid input (bad flags, malformed JSON, out-of-range parameters),
//! * `2` a mathematical hypothesis of the requested construction fails.

use std::fmt::Write as _;
use std::io::Read;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::dual_graph::{self, GraphOfGroups};
use crate::free_group::{self, Word};
use crate::infinite_link;
use crate::link_model;
use crate::spine;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Json,
    Dot,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "nsphere", about = "Finite models of the non-separating sphere complex")]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Admissible boundary partitions: vertices of the link of a reduced simplex.
    LinkEnum {
        #[arg(long)]
        n: usize,
    },
    /// Compatibility graph and flag complex of the link of a reduced simplex.
    LinkComplex {
        #[arg(long)]
        n: usize,
    },
    /// Largest reduced system plus disjoint non-separating spheres.
    StarMax {
        #[arg(long)]
        n: usize,
    },
    /// Classify a sphere system given by its dual graph.
    Classify {
        #[arg(long)]
        input: String,
        /// Ambient rank; defaults to the rank of the graph of groups.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Reduced subsystem of a simple system (edges outside a spanning tree).
    Reduce {
        #[arg(long)]
        input: String,
    },
    /// Remove one sphere from a system.
    Remove {
        #[arg(long)]
        input: String,
        #[arg(long)]
        edge: String,
    },
    /// Blueprint of a sphere system realizing a graph of groups.
    Realize {
        #[arg(long)]
        input: String,
    },
    /// Positive-rank piece of a non-reduced system of non-separating spheres.
    Witness {
        #[arg(long)]
        input: String,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Tube certificates T_1..T_max-m (or the single T_m) for a non-reduced system.
    TmFamily {
        #[arg(long)]
        input: String,
        #[arg(long, required_unless_present = "m")]
        max_m: Option<usize>,
        #[arg(long, conflicts_with = "max_m")]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Isomorphism classes of core graphs of rank n.
    SpineEnum {
        #[arg(long)]
        n: usize,
    },
    /// Forest-collapse poset of core graphs of rank n.
    SpinePoset {
        #[arg(long)]
        n: usize,
    },
    /// Whitehead minimization of a word.
    WhMin {
        #[arg(long)]
        word: String,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Primitivity test with certificate.
    Primitive {
        #[arg(long)]
        word: String,
        #[arg(long)]
        n: Option<usize>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::LinkEnum { .. } => "link-enum",
            Command::LinkComplex { .. } => "link-complex",
            Command::StarMax { .. } => "star-max",
            Command::Classify { .. } => "classify",
            Command::Reduce { .. } => "reduce",
            Command::Remove { .. } => "remove",
            Command::Realize { .. } => "realize",
            Command::Witness { .. } => "witness",
            Command::TmFamily { .. } => "tm-family",
            Command::SpineEnum { .. } => "spine-enum",
            Command::SpinePoset { .. } => "spine-poset",
            Command::WhMin { .. } => "wh-min",
            Command::Primitive { .. } => "primitive",
        }
    }

    /// The statement each computation feeds.
    pub fn anchor(&self) -> &'static str {
        match self {
            Command::LinkEnum { .. } => "the link of a reduced simplex has finitely many vertices",
            Command::LinkComplex { .. } => "link of a reduced simplex; flag property",
            Command::StarMax { .. } => "the non-separating sphere complex has dimension 3n-4",
            Command::Classify { .. } => "reduced and simple sphere systems",
            Command::Reduce { .. } => "every simple system contains a reduced system",
            Command::Remove { .. } => "faces of a simplex: removing one sphere",
            Command::Realize { .. } => "graph of groups decompositions are realized by sphere systems",
            Command::Witness { .. } => "a non-reduced system of n non-separating spheres is not simple",
            Command::TmFamily { .. } => "the link of a non-reduced (n-1)-simplex is infinite",
            Command::SpineEnum { .. } | Command::SpinePoset { .. } => "spine of reduced outer space",
            Command::WhMin { .. } => "Whitehead automorphisms and cyclic length",
            Command::Primitive { .. } => "primitive elements are dual to non-separating spheres",
        }
    }

    fn input_path(&self) -> Option<&str> {
        match self {
            Command::Classify { input, .. }
            | Command::Reduce { input }
            | Command::Remove { input, .. }
            | Command::Realize { input }
            | Command::Witness { input, .. }
            | Command::TmFamily { input, .. } => Some(input),
            _ => None,
        }
    }
}

/// A validated invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandPlan {
    pub command: Command,
    pub format: Format,
    /// Decoded `--input` payload.
    pub input: Option<GraphOfGroups>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// `--help` or `--version`; not a failure.
    Help(String),
    Usage(String),
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Help(_) => 0,
            _ => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Help(s) | CliError::Usage(s) | CliError::Input(s) => s,
        }
    }
}

/// Parse arguments (including the program name) and load any input file.
pub fn parse<I, T>(argv: I) -> Result<CommandPlan, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = Args::try_parse_from(argv).map_err(|e| {
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Help(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    })?;
    let input = match args.command.input_path() {
        Some(path) => Some(read_graph(path)?),
        None => None,
    };
    Ok(CommandPlan { command: args.command, format: args.format, input })
}

fn read_graph(path: &str) -> Result<GraphOfGroups, CliError> {
    let text = if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Input(format!("cannot read stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {path}: {e}")))?
    };
    decode_graph(&text)
}

/// Accept a bare graph or a report whose `result` is a graph.
pub fn decode_graph(text: &str) -> Result<GraphOfGroups, CliError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed JSON input: {e}")))?;
    let payload = match value.get("result") {
        Some(inner) if value.get("vertices").is_none() => inner.clone(),
        _ => value,
    };
    serde_json::from_value(payload).map_err(|e| CliError::Input(format!("invalid graph of groups: {e}")))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Input(String),
    Hypothesis(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => 1,
            Failure::Hypothesis(_) => 2,
        }
    }
}

impl From<link_model::LinkError> for Failure {
    fn from(e: link_model::LinkError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<free_group::FreeGroupError> for Failure {
    fn from(e: free_group::FreeGroupError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<spine::SpineError> for Failure {
    fn from(e: spine::SpineError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<dual_graph::DualGraphError> for Failure {
    fn from(e: dual_graph::DualGraphError) -> Self {
        if e.is_hypothesis() {
            Failure::Hypothesis(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<infinite_link::InfiniteLinkError> for Failure {
    fn from(e: infinite_link::InfiniteLinkError) -> Self {
        if e.is_hypothesis() {
            Failure::Hypothesis(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

/// What a subcommand produced: a JSON result and, when it has one, a
/// Graphviz rendering.
struct Produced {
    result: Value,
    dot: Option<String>,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("results serialize")
}

fn input_of(plan: &CommandPlan) -> Result<&GraphOfGroups, Failure> {
    plan.input.as_ref().ok_or_else(|| Failure::Input("missing --input".into()))
}

fn run(plan: &CommandPlan) -> Result<Produced, Failure> {
    let produced = match &plan.command {
        Command::LinkEnum { n } => {
            let vertices = link_model::enumerate_link_vertices(*n)?;
            Produced {
                result: json!({ "n": n, "count": vertices.len(), "partitions": vertices }),
                dot: None,
            }
        }
        Command::LinkComplex { n } => {
            let complex = link_model::build_link_complex(*n)?;
            let mut result = to_value(&complex);
            result["summary"] = to_value(&complex.summary());
            Produced { result, dot: Some(complex.to_dot()) }
        }
        Command::StarMax { n } => {
            let size = link_model::max_simple_star_size(*n)?;
            Produced {
                result: json!({ "n": n, "max_family_size": size, "dimension": size - 1 }),
                dot: None,
            }
        }
        Command::Classify { n, .. } => {
            let g = input_of(plan)?;
            let n = n.unwrap_or_else(|| dual_graph::rank_of(g));
            let c = dual_graph::classify(g, n)?;
            Produced { result: to_value(&c), dot: Some(g.to_dot()) }
        }
        Command::Reduce { .. } => {
            let g = input_of(plan)?;
            let edges = dual_graph::extract_reduced_subsystem(g)?;
            Produced {
                result: json!({ "count": edges.len(), "reduced_subsystem": edges }),
                dot: Some(g.to_dot()),
            }
        }
        Command::Remove { edge, .. } => {
            let g = dual_graph::remove_sphere(input_of(plan)?, edge)?;
            Produced { result: to_value(&g), dot: Some(g.to_dot()) }
        }
        Command::Realize { .. } => {
            let g = input_of(plan)?;
            let b = dual_graph::realize_blueprint(g)?;
            Produced { result: to_value(&b), dot: Some(g.to_dot()) }
        }
        Command::Witness { n, .. } => {
            let g = input_of(plan)?;
            let w = infinite_link::find_witness(g, n.unwrap_or_else(|| dual_graph::rank_of(g)))?;
            Produced { result: to_value(&w), dot: Some(g.to_dot()) }
        }
        Command::TmFamily { max_m, m, n, .. } => {
            let g = input_of(plan)?;
            let w = infinite_link::find_witness(g, n.unwrap_or_else(|| dual_graph::rank_of(g)))?;
            let certs = match (m, max_m) {
                (Some(m), _) => vec![infinite_link::generate_tm(&w, *m)?],
                (None, Some(max)) => infinite_link::tm_family(&w, *max)?,
                (None, None) => return Err(Failure::Input("one of --m or --max-m is required".into())),
            };
            let report = infinite_link::verify_distinct_family(&certs)?;
            Produced {
                result: json!({ "witness": w, "certificates": certs, "report": report }),
                dot: None,
            }
        }
        Command::SpineEnum { n } => {
            let graphs = spine::enumerate_core_graphs(*n)?;
            let trivalent = graphs.iter().filter(|g| g.is_trivalent()).count();
            Produced {
                result: json!({ "n": n, "count": graphs.len(), "trivalent": trivalent, "graphs": graphs }),
                dot: None,
            }
        }
        Command::SpinePoset { n } => {
            let poset = spine::build_collapse_poset(*n)?;
            let mut result = to_value(&poset);
            result["summary"] = to_value(&poset.summary());
            Produced { result, dot: Some(poset.to_dot()) }
        }
        Command::WhMin { word, n } => {
            let w = Word::parse(word, *n)?;
            let m = free_group::whitehead_minimize(&w)?;
            let trace: Vec<String> = m.trace.iter().map(|a| a.to_string()).collect();
            Produced {
                result: json!({
                    "word": w,
                    "min_word": m.min_word,
                    "cyclic_length": m.min_word.len(),
                    "trace": m.trace,
                    "trace_text": trace,
                    "plateau_states": m.plateau_states,
                }),
                dot: None,
            }
        }
        Command::Primitive { word, n } => {
            let w = Word::parse(word, *n)?;
            let p = free_group::is_primitive(&w)?;
            Produced {
                result: json!({
                    "word": w,
                    "primitive": p.primitive,
                    "min_word": p.min_word,
                    "certificate": p.certificate,
                }),
                dot: None,
            }
        }
    };
    Ok(produced)
}

/// Run a plan. Never panics on bad input; failures become exit codes.
pub fn execute(plan: &CommandPlan) -> Outcome {
    let name = plan.command.name();
    let anchor = plan.command.anchor();
    match run(plan) {
        Ok(Produced { result, dot }) => {
            let stdout = match plan.format {
                Format::Dot => match dot {
                    Some(d) => d,
                    None => {
                        return Outcome {
                            code: 1,
                            stdout: String::new(),
                            stderr: format!("error: {name} has no dot rendering\n"),
                        }
                    }
                },
                Format::Json => {
                    let report = json!({ "command": name, "anchor": anchor, "result": result });
                    format!("{report}\n")
                }
                Format::Text => {
                    let mut out = format!("command: {name}\nanchor: {anchor}\n");
                    render_text(&result, 0, &mut out);
                    out
                }
            };
            Outcome { code: 0, stdout, stderr: String::new() }
        }
        Err(failure) => {
            let (kind, message) = match &failure {
                Failure::Input(m) => ("invalid-input", m),
                Failure::Hypothesis(m) => ("hypothesis-violation", m),
            };
            let stdout = if plan.format == Format::Json {
                let report = json!({
                    "command": name,
                    "anchor": anchor,
                    "error": { "kind": kind, "message": message },
                });
                format!("{report}\n")
            } else {
                String::new()
            };
            Outcome { code: failure.code(), stdout, stderr: format!("error: {message}\n") }
        }
    }
}

fn render_text(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                if val.is_object() || (val.is_array() && val.as_array().is_some_and(|a| a.iter().any(|x| x.is_object()))) {
                    let _ = writeln!(out, "{pad}{k}:");
                    render_text(val, depth + 1, out);
                } else {
                    let _ = writeln!(out, "{pad}{k}: {}", scalar(val));
                }
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                let _ = writeln!(out, "{pad}- [{i}]");
                render_text(item, depth + 1, out);
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", scalar(other));
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(args: &str) -> Result<CommandPlan, CliError> {
        parse(std::iter::once("nsphere").chain(args.split_whitespace()))
    }

    #[test]
    fn parse_examples() {
        let p = plan("link-enum --n 3 --format json").unwrap();
        assert_eq!(p.command, Command::LinkEnum { n: 3 });
        assert_eq!(p.format, Format::Json);

        let err = plan("link-enum").unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.message().contains("--n"));

        assert!(matches!(plan("frobnicate --n 2"), Err(CliError::Usage(_))));
        assert!(matches!(plan("--help"), Err(CliError::Help(_))));
    }

    #[test]
    fn missing_input_file_is_input_error() {
        let err = plan("classify --input /nonexistent/sys.json").unwrap_err();
        assert!(matches!(err, CliError::Input(_)));
    }

    #[test]
    fn decode_accepts_envelopes() {
        let g = GraphOfGroups::rose(2);
        let envelope = json!({ "command": "remove", "result": g }).to_string();
        assert_eq!(decode_graph(&envelope).unwrap(), g);
        assert!(decode_graph("{not json").unwrap_err().message().contains("malformed JSON"));
    }

    #[test]
    fn link_enum_output() {
        let out = execute(&plan("link-enum --n 2").unwrap());
        assert_eq!(out.code, 0);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["result"]["count"], 2);
        assert_eq!(v["anchor"], Command::LinkEnum { n: 2 }.anchor());
    }

    #[test]
    fn out_of_range_is_exit_one() {
        let out = execute(&plan("spine-enum --n 1").unwrap());
        assert_eq!(out.code, 1);
        let out = execute(&plan("link-enum --n 2 --format dot").unwrap());
        assert_eq!(out.code, 1);
    }

    #[test]
    fn words_from_flags() {
        let out = execute(&plan("primitive --word aab").unwrap());
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["result"]["primitive"], true);
        let out = execute(&plan("wh-min --word a1,A2").unwrap());
        assert_eq!(out.code, 1);
    }

    #[test]
    fn text_format_renders() {
        let out = execute(&plan("star-max --n 2 --format text").unwrap());
        assert!(out.stdout.contains("max_family_size: 3"), "{}", out.stdout);
    }
}
