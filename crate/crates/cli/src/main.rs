use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use lambda2::diagrams::diagram_space;
use lambda2::faces::{self, LedgerOptions, Mutation};
use lambda2::geometry::{
    chain_intersection_feasible, parallel_edge_coincidence, Configuration, DirectionAssignment, FeasibilityStatus,
    UnitVec3, Vec3,
};
use lambda2::graphs::{
    canonical_graph, EdgeOrientedGraph, Family, GraphJson, GraphName, Labeling, VertexOrientation, D1, NE,
};
use lambda2::integrate::{self, Formula, Forms, Kernel, McConfig, PropagatorForm, SignConvention};
use lambda2::lmo::{self, DeltaTable};
use lambda2::orient::{orient_report, Numbering};
use lambda2::rational::{self, Q};
use lambda2::Error;

const SCHEMA_VERSION: &str = "1";

#[derive(Parser, Debug)]
#[command(name = "lambda2", version, about = "Degree-two configuration-space invariant: combinatorics, ledger and estimators")]
struct Cli {
    /// Worker threads for parallel stages (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print human-readable tables to standard error.
    #[arg(short, long, global = true)]
    verbose: bool,
    /// Unix time recorded in the manifest; defaults to SOURCE_DATE_EPOCH, then the clock.
    #[arg(long, global = true)]
    timestamp: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Describe the four family graphs (and T_less).
    Graphs(GraphsArgs),
    /// Diagram space, relations and the weight system.
    Weights(WeightsArgs),
    /// Compare the vertex-induced and edge-induced half-edge orders.
    OrientCheck(OrientArgs),
    /// Classify and cancel every boundary term.
    VerifyLedger(LedgerArgs),
    /// Decide whether one chain per edge can meet.
    Feasibility(FeasibilityArgs),
    /// Monte Carlo estimate of an integral or of the invariant.
    Estimate(EstimateArgs),
    /// Combine per-prime lens-space differences.
    LmoDelta(LmoArgs),
    /// Check the antisymmetrisation expansion on random configurations.
    ExpansionCheck(ExpansionArgs),
}

#[derive(Args, Debug, Serialize)]
struct GraphsArgs {
    #[arg(long)]
    graph: Option<GraphName>,
    /// Labels of edges a..f, e.g. 123456.
    #[arg(long)]
    labeling: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct WeightsArgs {
    /// Write the relation matrix and weight row as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct OrientArgs {
    #[arg(long)]
    graph: GraphName,
    /// Vertices (1-based) whose cyclic order is reversed.
    #[arg(long, value_delimiter = ',')]
    flip: Vec<usize>,
    /// Edge letters to reverse.
    #[arg(long, value_delimiter = ',')]
    reverse: Vec<char>,
    /// Vertex numbering, e.g. 2134.
    #[arg(long)]
    numbering: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum MutationArg {
    AnomalousSelfPartner,
    DoubleEdgeSingleSwap,
    TriangularWrongPair,
    ThetaWeightOne,
    NoEdgeAsOneEdge,
}

impl From<MutationArg> for Mutation {
    fn from(m: MutationArg) -> Self {
        match m {
            MutationArg::AnomalousSelfPartner => Mutation::AnomalousSelfPartner,
            MutationArg::DoubleEdgeSingleSwap => Mutation::DoubleEdgeSingleSwap,
            MutationArg::TriangularWrongPair => Mutation::TriangularWrongPair,
            MutationArg::ThetaWeightOne => Mutation::ThetaWeightOne,
            MutationArg::NoEdgeAsOneEdge => Mutation::NoEdgeAsOneEdge,
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct LedgerArgs {
    /// Corrupt one rule (negative control).
    #[arg(long, value_enum)]
    mutation: Option<MutationArg>,
    /// Include every block in the JSON output.
    #[arg(long)]
    blocks: bool,
    /// Write all blocks as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct FeasibilityArgs {
    #[arg(long)]
    graph: GraphName,
    /// JSON file {"directions": [[x,y,z] x 6]} indexed by label; entries may be "p/q" strings.
    #[arg(long, conflicts_with = "single_direction")]
    directions: Option<PathBuf>,
    /// The same direction on every edge, e.g. 0,0,1.
    #[arg(long, allow_hyphen_values = true)]
    single_direction: Option<String>,
    #[arg(long)]
    labeling: Option<String>,
    #[arg(long, conflicts_with = "labeling")]
    all_labelings: bool,
    /// Per-labeling results as CSV (with --all-labelings).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum FormulaArg {
    Lambda2,
    Lescop,
    Integral,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
enum ConventionArg {
    #[value(name = "pair_induced")]
    #[serde(rename = "pair_induced")]
    PairInduced,
    #[value(name = "fixed_M4")]
    #[serde(rename = "fixed_M4")]
    FixedM4,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum KernelArg {
    Top,
    Probe,
}

#[derive(Args, Debug, Serialize)]
struct EstimateArgs {
    #[arg(long, value_enum)]
    formula: FormulaArg,
    /// JSON file {"forms": [...]} with one or six forms, or the word "uniform".
    #[arg(long)]
    forms: String,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    shards: u32,
    #[arg(long, value_enum, default_value = "pair_induced")]
    convention: ConventionArg,
    /// Geometric factor: the top form, or the per-edge probe (seeded by --probe-seed).
    #[arg(long, value_enum, default_value = "top")]
    kernel: KernelArg,
    #[arg(long, default_value_t = 1)]
    probe_seed: u64,
    /// Graph for --formula integral.
    #[arg(long)]
    graph: Option<GraphName>,
    #[arg(long)]
    labeling: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct LmoArgs {
    #[arg(long)]
    h1: u64,
    /// JSON file {"p": "delta", ...}.
    #[arg(long)]
    table: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct ExpansionArgs {
    #[arg(long)]
    graph: GraphName,
    #[arg(long)]
    labeling: Option<String>,
    #[arg(long, default_value = "uniform")]
    forms: String,
    #[arg(long, default_value_t = 1000)]
    configs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Restrict to these edge letters, evaluated on random vectors.
    #[arg(long, value_delimiter = ',')]
    edges: Vec<char>,
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
}

/// Result of a subcommand: the JSON payload, whether verification passed,
/// and the seed if one was used.
struct Outcome {
    result: Value,
    ok: bool,
    seed: Option<u64>,
    input: Value,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let (name, outcome) = match run(&cli) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let manifest = json!({
        "command": name,
        "input": outcome.input,
        "version": env!("CARGO_PKG_VERSION"),
        "schema_version": SCHEMA_VERSION,
        "seed": outcome.seed,
        "timestamp": timestamp(cli.timestamp),
    });
    let doc = json!({ "manifest": manifest, "result": outcome.result, "ok": outcome.ok });
    let text = serde_json::to_string_pretty(&doc).expect("serialisable");
    // A closed pipe downstream is not an error of ours.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    ExitCode::from(if outcome.ok { 0 } else { 1 })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Usage(_) | Error::Invalid(_) | Error::Domain(_) | Error::Precondition(_) => 2,
        Error::Solver(_) | Error::Internal(_) => 1,
    }
}

fn timestamp(flag: Option<u64>) -> u64 {
    flag.or_else(|| std::env::var("SOURCE_DATE_EPOCH").ok()?.trim().parse().ok())
        .unwrap_or_else(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()))
}

fn run(cli: &Cli) -> lambda2::Result<(&'static str, Outcome)> {
    let v = cli.verbose;
    Ok(match &cli.command {
        Command::Graphs(a) => ("graphs", cmd_graphs(a, v)?),
        Command::Weights(a) => ("weights", cmd_weights(a, v)?),
        Command::OrientCheck(a) => ("orient-check", cmd_orient(a, v)?),
        Command::VerifyLedger(a) => ("verify-ledger", cmd_ledger(a, v)?),
        Command::Feasibility(a) => ("feasibility", cmd_feasibility(a, v)?),
        Command::Estimate(a) => ("estimate", cmd_estimate(a, cli.threads, v)?),
        Command::LmoDelta(a) => ("lmo-delta", cmd_lmo(a, v)?),
        Command::ExpansionCheck(a) => ("expansion-check", cmd_expansion(a, v)?),
    })
}

fn echo<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).expect("serialisable arguments")
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serialisable result")
}

fn parse_labeling(s: Option<&str>) -> lambda2::Result<Labeling> {
    let Some(s) = s else { return Ok(Labeling::identity()) };
    let digits: Vec<u8> = s
        .chars()
        .filter(|c| !matches!(c, ',' | ' '))
        .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(|| Error::Usage(format!("bad labeling {s:?}"))))
        .collect::<lambda2::Result<_>>()?;
    Labeling::from_slice(&digits)
}

fn parse_edge_letters(letters: &[char]) -> lambda2::Result<Vec<usize>> {
    letters
        .iter()
        .map(|&c| match c {
            'a'..='f' => Ok(c as usize - 'a' as usize),
            _ => Err(Error::Usage(format!("unknown edge {c:?}; edges are a..f"))),
        })
        .collect()
}

fn read_json(path: &Path) -> lambda2::Result<Value> {
    let text = fs::read_to_string(path).map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> lambda2::Result<()> {
    let io = |e: csv::Error| Error::Usage(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))
}

/// Drawn vertex orientation; `T_less` shares the tetrahedron's.
fn drawn_orientation(name: GraphName) -> lambda2::Result<VertexOrientation> {
    match name {
        GraphName::TLess => VertexOrientation::drawn(GraphName::T1),
        n => VertexOrientation::drawn(n),
    }
}

fn cmd_graphs(a: &GraphsArgs, verbose: bool) -> lambda2::Result<Outcome> {
    let j = parse_labeling(a.labeling.as_deref())?;
    let names: Vec<GraphName> = match a.graph {
        Some(g) => vec![g],
        None => GraphName::FAMILY.iter().copied().chain([GraphName::TLess]).collect(),
    };
    let direct = D1::new(Family::Direct);
    let reversed = D1::new(Family::Reversed);
    let mut out = Vec::new();
    for name in names {
        let g = canonical_graph(name);
        let classes = match Family::of(name) {
            Some(Family::Direct) => Some(direct.count(name)),
            Some(Family::Reversed) => Some(reversed.count(name)),
            None => None,
        };
        let vo = drawn_orientation(name)?;
        let sign = lambda2::orient::orientation_sign(&g, &vo, &lambda2::orient::STANDARD_NUMBERING)?;
        let item = json!({
            "name": name,
            "shape": g.base().shape(),
            "graph": GraphJson::from_graph(&g, &j),
            "automorphisms": g.base().automorphisms().len(),
            "oriented_automorphisms": g.automorphisms(true).len(),
            "d1_classes": classes,
            "orientation_sign": sign,
        });
        if verbose {
            eprintln!("{:<7} aut {:>2}  oriented aut {:>2}  sign {:+}", name.as_str(), item["automorphisms"], item["oriented_automorphisms"], sign);
        }
        out.push(item);
    }
    Ok(Outcome { result: json!({ "graphs": out }), ok: true, seed: None, input: echo(a) })
}

fn cmd_weights(a: &WeightsArgs, verbose: bool) -> lambda2::Result<Outcome> {
    let space = diagram_space();
    let summary = space.summary();
    if let Some(path) = &a.csv {
        fs::write(path, space.to_csv()).map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    if verbose {
        eprintln!("classes {}  rank {}  dim {}", summary.class_count, summary.rank, summary.dim);
    }
    Ok(Outcome { result: to_value(&summary), ok: true, seed: None, input: echo(a) })
}

fn cmd_orient(a: &OrientArgs, verbose: bool) -> lambda2::Result<Outcome> {
    let reversed = parse_edge_letters(&a.reverse)?;
    let g = canonical_graph(a.graph).reverse_edges(&reversed);
    let mut vo = drawn_orientation(a.graph)?;
    for &v in &a.flip {
        if !(1..=4).contains(&v) {
            return Err(Error::Usage(format!("vertex {v} out of range 1..4")));
        }
        vo = vo.flip(v - 1);
    }
    let numbering: Numbering = match &a.numbering {
        None => lambda2::orient::STANDARD_NUMBERING,
        Some(s) => {
            let d: Vec<u8> = s.chars().filter_map(|c| c.to_digit(10).map(|x| x as u8)).collect();
            d.try_into().map_err(|_| Error::Usage(format!("numbering {s:?} must have four digits")))?
        }
    };
    let r = orient_report(&g, &vo, &numbering)?;
    if verbose {
        eprintln!("vertex order {}\nedge order   {}\nsign {:+}", r.vertex_order.join(" "), r.edge_order.join(" "), r.sign);
    }
    Ok(Outcome { result: to_value(&r), ok: true, seed: None, input: echo(a) })
}

fn cmd_ledger(a: &LedgerArgs, verbose: bool) -> lambda2::Result<Outcome> {
    let keep = a.blocks || a.csv.is_some();
    let report = faces::verify_ledger_with(LedgerOptions { mutation: a.mutation.map(Into::into), keep_blocks: keep });
    if let Some(path) = &a.csv {
        let mut rows = Vec::new();
        for b in &report.pair_blocks {
            rows.push(vec![format!("{:?}", b.class), b.term.clone(), b.partner.clone(), String::new(), b.sign.to_string()]);
        }
        for b in &report.one_edge_blocks {
            let members: Vec<String> = b
                .members
                .iter()
                .map(|m| format!("{}:{}", m.graph, m.labels.iter().map(u8::to_string).collect::<String>()))
                .collect();
            let signs: Vec<String> = b.members.iter().map(|m| format!("{:+}*{}", m.sign, rational::to_string(&m.weight))).collect();
            rows.push(vec![
                "OneEdge".into(),
                format!("{:?} l={}", b.family, b.label),
                members.join(" "),
                signs.join(" "),
                rational::to_string(&b.weighted_sum),
            ]);
        }
        write_csv(path, &["class", "term", "partner_or_members", "signed_weights", "sign_or_sum"], &rows)?;
    }
    if verbose {
        for (g, counts) in &report.per_class_counts {
            let cells: Vec<String> = counts.iter().map(|(c, n)| format!("{c:?}={n}")).collect();
            eprintln!("{g:<3} {}", cells.join(" "));
        }
        eprintln!("terms {}  violations {}", report.total_terms, report.violations.len());
    }
    let mut result = to_value(&report);
    if !a.blocks {
        if let Some(o) = result.as_object_mut() {
            o.remove("pair_blocks");
            o.remove("one_edge_blocks");
        }
    }
    Ok(Outcome { ok: report.all_green, result, seed: None, input: echo(a) })
}

/// Parses one direction: three numbers or rational strings.
fn parse_direction(v: &Value) -> lambda2::Result<(Option<[Q; 3]>, [f64; 3])> {
    let arr = v.as_array().filter(|a| a.len() == 3).ok_or_else(|| Error::Invalid(format!("direction {v} must have three entries")))?;
    let mut exact: Vec<Q> = Vec::new();
    let mut float = [0.0; 3];
    let mut all_exact = true;
    for (i, x) in arr.iter().enumerate() {
        match x {
            Value::String(s) => {
                let q = rational::parse(s)?;
                float[i] = rational::to_f64(&q);
                exact.push(q);
            }
            Value::Number(n) if n.is_i64() => {
                let k = n.as_i64().expect("checked");
                float[i] = k as f64;
                exact.push(Q::from_integer(k.into()));
            }
            Value::Number(n) => {
                float[i] = n.as_f64().ok_or_else(|| Error::Invalid(format!("bad number {n}")))?;
                all_exact = false;
            }
            _ => return Err(Error::Invalid(format!("direction entry {x} is not a number"))),
        }
    }
    let exact = all_exact.then(|| exact.try_into().expect("three entries"));
    Ok((exact, float))
}

enum PerLabel {
    Exact([[Q; 3]; NE]),
    Float([UnitVec3; NE]),
}

impl PerLabel {
    fn assign(&self, j: &Labeling) -> lambda2::Result<DirectionAssignment> {
        match self {
            PerLabel::Exact(d) => DirectionAssignment::exact_from_labels(j, d),
            PerLabel::Float(d) => Ok(DirectionAssignment::float_from_labels(j, d)),
        }
    }
}

fn parse_directions(values: &[Value]) -> lambda2::Result<PerLabel> {
    if values.len() != NE {
        return Err(Error::Invalid(format!("expected {NE} directions (one per label), got {}", values.len())));
    }
    let parsed: Vec<_> = values.iter().map(parse_direction).collect::<lambda2::Result<_>>()?;
    if parsed.iter().all(|(e, _)| e.is_some()) {
        let d: Vec<[Q; 3]> = parsed.into_iter().map(|(e, _)| e.expect("checked")).collect();
        return Ok(PerLabel::Exact(d.try_into().expect("six directions")));
    }
    let d: Vec<UnitVec3> = parsed.iter().map(|(_, f)| UnitVec3::normalize(Vec3(*f))).collect::<lambda2::Result<_>>()?;
    Ok(PerLabel::Float(d.try_into().expect("six directions")))
}

fn cmd_feasibility(a: &FeasibilityArgs, verbose: bool) -> lambda2::Result<Outcome> {
    let mut input = echo(a);
    let per_label = match (&a.directions, &a.single_direction) {
        (Some(path), None) => {
            let v = read_json(path)?;
            let dirs = v.get("directions").and_then(Value::as_array).ok_or_else(|| Error::Invalid("missing \"directions\" array".into()))?;
            input["directions_file"] = v.clone();
            parse_directions(dirs)?
        }
        (None, Some(s)) => {
            let parts: Vec<Value> = s.split(',').map(|p| Value::String(p.trim().to_string())).collect();
            parse_directions(&vec![Value::Array(parts); NE])?
        }
        _ => return Err(Error::Usage("give exactly one of --directions or --single-direction".into())),
    };
    let g = canonical_graph(a.graph);
    if !a.all_labelings {
        let j = parse_labeling(a.labeling.as_deref())?;
        let assignment = per_label.assign(&j)?;
        let r = chain_intersection_feasible(&g, &assignment)?;
        let mut result = to_value(&r);
        if g.base().shape() == Some(lambda2::graphs::Shape::DoubleTheta) {
            result["parallel_edges"] = to_value(&parallel_edge_coincidence(&g, &assignment)?);
        }
        if verbose {
            eprintln!("{} {:?} dim {:?}", a.graph, r.status, r.family_dimension);
        }
        return Ok(Outcome { result, ok: true, seed: None, input });
    }
    use rayon::prelude::*;
    let results: Vec<_> = Labeling::all()
        .par_iter()
        .map(|j| chain_intersection_feasible(&g, &per_label.assign(j)?).map(|r| (*j, r)))
        .collect::<lambda2::Result<_>>()?;
    let mut counts: BTreeMap<FeasibilityStatus, usize> = BTreeMap::new();
    let mut dims: BTreeMap<usize, usize> = BTreeMap::new();
    let mut first = None;
    for (j, r) in &results {
        *counts.entry(r.status).or_default() += 1;
        if let Some(d) = r.family_dimension {
            *dims.entry(d).or_default() += 1;
        }
        if first.is_none() && r.is_feasible() {
            first = Some(json!({ "labels": j.labels(), "result": r }));
        }
    }
    if let Some(path) = &a.csv {
        let rows: Vec<Vec<String>> = results
            .iter()
            .map(|(j, r)| {
                vec![
                    j.labels().iter().map(u8::to_string).collect(),
                    to_value(&r.status).as_str().unwrap_or_default().to_string(),
                    r.family_dimension.map(|d| d.to_string()).unwrap_or_default(),
                ]
            })
            .collect();
        write_csv(path, &["labels", "status", "family_dimension"], &rows)?;
    }
    let count = |s| counts.get(&s).copied().unwrap_or(0);
    if verbose {
        eprintln!("{}: feasible {} infeasible {}", a.graph, count(FeasibilityStatus::Feasible), count(FeasibilityStatus::Infeasible));
    }
    let result = json!({
        "graph": a.graph,
        "labelings": results.len(),
        "feasible": count(FeasibilityStatus::Feasible),
        "feasible_non_injective": count(FeasibilityStatus::FeasibleNonInjective),
        "infeasible": count(FeasibilityStatus::Infeasible),
        "family_dimensions": dims.iter().map(|(d, n)| (d.to_string(), *n)).collect::<BTreeMap<_, _>>(),
        "first_feasible": first,
    });
    Ok(Outcome { result, ok: true, seed: None, input })
}

fn parse_forms(source: &str, input: &mut Value) -> lambda2::Result<Forms> {
    if source == "uniform" {
        return Ok(integrate::uniform_forms());
    }
    let v = read_json(Path::new(source))?;
    input["forms_file"] = v.clone();
    let list = v.get("forms").cloned().ok_or_else(|| Error::Invalid("missing \"forms\" array".into()))?;
    let forms: Vec<PropagatorForm> = serde_json::from_value(list).map_err(|e| Error::Invalid(format!("forms: {e}")))?;
    match forms.len() {
        1 => Ok(std::array::from_fn(|_| forms[0].clone())),
        NE => Ok(forms.try_into().expect("six forms")),
        n => Err(Error::Invalid(format!("expected 1 or {NE} forms, got {n}"))),
    }
}

fn cmd_estimate(a: &EstimateArgs, threads: Option<usize>, verbose: bool) -> lambda2::Result<Outcome> {
    let mut input = echo(a);
    let forms = parse_forms(&a.forms, &mut input)?;
    let cfg = McConfig { samples: a.samples, seed: a.seed, shards: a.shards, threads };
    let kernel = match a.kernel {
        KernelArg::Top => Kernel::TopForm,
        KernelArg::Probe => Kernel::pair_probe(a.probe_seed),
    };
    let convention = match a.convention {
        ConventionArg::PairInduced => SignConvention::PairInduced,
        ConventionArg::FixedM4 => SignConvention::FixedM4,
    };
    let est = match a.formula {
        FormulaArg::Lambda2 => integrate::estimate_formula(Formula::Lambda2, &forms, &kernel, &cfg)?,
        FormulaArg::Lescop => integrate::estimate_formula(Formula::Lescop(convention), &forms, &kernel, &cfg)?,
        FormulaArg::Integral => {
            let g: EdgeOrientedGraph = canonical_graph(a.graph.ok_or_else(|| Error::Usage("--formula integral needs --graph".into()))?);
            integrate::estimate_integral(&g, &parse_labeling(a.labeling.as_deref())?, &forms, &cfg)?
        }
    };
    if verbose {
        eprintln!("mean {:e}  stderr {:e}  n {}", est.mean, est.stderr, est.n);
    }
    Ok(Outcome { result: to_value(&est), ok: true, seed: Some(a.seed), input })
}

fn cmd_lmo(a: &LmoArgs, verbose: bool) -> lambda2::Result<Outcome> {
    let mut input = echo(a);
    let v = read_json(&a.table)?;
    input["table_file"] = v.clone();
    let table: DeltaTable = serde_json::from_value(v).map_err(|e| Error::Invalid(format!("table: {e}")))?;
    let delta = lmo::lmo_kkt_delta(a.h1, &table)?;
    let factors: Vec<Value> = lmo::factorize(a.h1).iter().map(|(p, k)| json!({ "prime": p, "valuation": k })).collect();
    if verbose {
        eprintln!("delta {}", rational::to_string(&delta));
    }
    let result = json!({ "h1": a.h1, "factors": factors, "delta": rational::to_string(&delta) });
    Ok(Outcome { result, ok: true, seed: None, input })
}

fn cmd_expansion(a: &ExpansionArgs, verbose: bool) -> lambda2::Result<Outcome> {
    use rand::Rng;
    let mut input = echo(a);
    let forms = parse_forms(&a.forms, &mut input)?;
    let g = canonical_graph(a.graph);
    let j = parse_labeling(a.labeling.as_deref())?;
    let edges = parse_edge_letters(&a.edges)?;
    let mut rng = integrate::shard_rng(a.seed, 0);
    let mut rejected = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..a.configs {
        let c: Configuration = integrate::sample_configuration(&mut rng, &mut rejected);
        let d = if edges.is_empty() {
            integrate::antisym_expansion_check(&g, &j, &forms, &c)?
        } else {
            let vecs: Vec<[f64; 12]> =
                (0..2 * edges.len()).map(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0))).collect();
            integrate::antisym_expansion_check_on(&g, &j, &forms, &c, &edges, Some(&vecs), true)?.discrepancy
        };
        worst = worst.max(d);
    }
    let ok = worst <= a.tolerance;
    if verbose {
        eprintln!("max discrepancy {worst:e} over {} configurations", a.configs);
    }
    let result = json!({
        "configs": a.configs,
        "max_discrepancy": worst,
        "relative_to": if edges.is_empty() { "hadamard_scale" } else { "value" },
        "tolerance": a.tolerance,
        "rejections": rejected,
    });
    Ok(Outcome { result, ok, seed: Some(a.seed), input })
}
