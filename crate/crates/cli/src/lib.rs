//! `helly-ecc`: eccentricities, centers and metric checks for Helly graphs.
//!
//! Exit status: 0 on success, 1 on bad input or an exceeded cap, 2 when
//! `verify` finds a disagreement, 3 when a fast algorithm detects that its
//! input is not Helly.

use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use helly_core::algorithms::{
    all_ecc_hyperbolic, all_ecc_sqrt, ecc_at_most_k, find_center, AlgoError, Options,
};
use helly_core::generators::{GenError, GenMeta, GenSpec};
use helly_core::graph::{load_graph, Dist, Graph, GraphError, Vertex, VertexSet};
use helly_core::oracles::{
    all_ecc_bruteforce, center_formula_check, center_isometry_check, helly_check_equal_radii,
    helly_check_subsets, parameter_report, subset_ecc, unimodality_check, Caps, Delta,
    DistanceMatrix, EccentricityTable, HellyVerdict, OracleError, ParamReport, SubsetEccReport,
    Verdict,
};
use serde::Serialize;
use thiserror::Error;

pub const SCHEMA: &str = "helly-ecc/1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;
pub const EXIT_NOT_HELLY: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "helly-ecc",
    version,
    about = "Eccentricities and centers of Helly graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: RunOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    /// One BFS per vertex.
    Oracle,
    /// Threshold groups for small radius, distant gates for large radius.
    Sqrt,
    /// Center extraction around a central vertex, driven by hyperbolicity.
    Hyp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Debug, Clone, Args)]
pub struct RunOptions {
    #[arg(long, global = true, value_enum, default_value_t = Algo::Sqrt)]
    pub algo: Algo,
    /// Upper bound on the hyperbolicity for `--algo hyp`, e.g. `1`, `3/2`.
    #[arg(long, global = true)]
    pub delta: Option<Delta>,
    #[arg(long, global = true, default_value_t = Caps::default().subsets)]
    pub cap_subsets: usize,
    #[arg(long, global = true, default_value_t = Caps::default().quadruples)]
    pub cap_quadruples: usize,
    #[arg(long, global = true, default_value_t = Caps::default().pseudoconvex)]
    pub cap_pseudoconvex: usize,
    #[arg(long, global = true, default_value_t = Caps::default().kappa)]
    pub cap_kappa: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Re-check group invariants by brute force after every step.
    #[arg(long, global = true)]
    pub debug_invariants: bool,
    /// Seed for generator specs that do not name one.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

impl RunOptions {
    fn caps(&self) -> Caps {
        Caps {
            subsets: self.cap_subsets,
            quadruples: self.cap_quadruples,
            pseudoconvex: self.cap_pseudoconvex,
            kappa: self.cap_kappa,
        }
    }

    fn algo_options(&self) -> Options {
        Options {
            debug_invariants: self.debug_invariants,
        }
    }
}

/// Exactly one graph source.
#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct Input {
    /// Edge-list file, or `-` for standard input.
    pub path: Option<PathBuf>,
    /// Generator spec such as `king-grid(10,10)`.
    #[arg(long = "gen", value_name = "SPEC")]
    pub spec: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eccentricity table with radius, diameter and center.
    Ecc(Input),
    /// A central vertex and the radius.
    Center(Input),
    /// Helly verification and the metric characterizations.
    Check(Input),
    /// Hyperbolicity, pseudoconvexity and center-diameter parameters.
    Params(Input),
    /// Eccentricities with respect to a vertex subset.
    SubsetEcc {
        #[command(flatten)]
        input: Input,
        /// Comma-separated vertex ids.
        #[arg(long, value_delimiter = ',', required = true)]
        subset: Vec<Vertex>,
    },
    /// Emit a generated graph as an edge list.
    Gen {
        spec: String,
        /// Edge-list destination; standard output by default.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Metadata destination; standard error by default.
        #[arg(long)]
        meta: Option<PathBuf>,
    },
    /// Run every fast algorithm and compare against the oracle.
    Verify(Input),
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Algo(#[from] AlgoError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Algo(AlgoError::InvalidArgument(_)) => EXIT_INPUT,
            CliError::Algo(_) => EXIT_NOT_HELLY,
            _ => EXIT_INPUT,
        }
    }
}

/// Runs a parsed command line; returns the exit status.
pub fn run(cli: &Cli, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let mut piped = None;
    if let Some(input) = cli.command.input() {
        if input.path.as_ref().is_some_and(|p| p.as_os_str() == "-") {
            let mut text = String::new();
            if let Err(e) = stdin.read_to_string(&mut text) {
                let _ = writeln!(stderr, "error: standard input: {e}");
                return EXIT_INPUT;
            }
            piped = Some(text);
        }
    }
    let piped = piped.as_deref();
    let mut out = Output::default();
    let result = match cli.opts.threads {
        0 => execute(cli, piped, &mut out),
        t => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| execute(cli, piped, &mut out)),
            Err(e) => Err(CliError::Input(format!("cannot start {t} threads: {e}"))),
        },
    };
    let code = match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(out.stderr, "error: {e}");
            e.exit_code()
        }
    };
    if stdout
        .write_all(out.stdout.as_bytes())
        .and_then(|_| stdout.flush())
        .is_err()
    {
        return EXIT_INPUT;
    }
    let _ = stderr.write_all(out.stderr.as_bytes());
    code
}

impl Command {
    fn input(&self) -> Option<&Input> {
        match self {
            Command::Ecc(i)
            | Command::Center(i)
            | Command::Check(i)
            | Command::Params(i)
            | Command::Verify(i)
            | Command::SubsetEcc { input: i, .. } => Some(i),
            Command::Gen { .. } => None,
        }
    }
}

#[derive(Debug, Default)]
struct Output {
    stdout: String,
    stderr: String,
}

fn execute(cli: &Cli, piped: Option<&str>, out: &mut Output) -> Result<i32, CliError> {
    let opts = &cli.opts;
    let stdout = &mut out.stdout;
    match &cli.command {
        Command::Gen {
            spec,
            out: path,
            meta,
        } => {
            let built = GenSpec::parse_with_seed(spec, opts.seed)?.generate()?;
            let text = built.graph.to_edge_list();
            match path {
                Some(path) => fs::write(path, text)?,
                None => stdout.push_str(&text),
            }
            let doc = render(&GenReport::new(&built.meta), Format::Json);
            match meta {
                Some(path) => fs::write(path, doc)?,
                None => out.stderr.push_str(&doc),
            }
            Ok(EXIT_OK)
        }
        Command::Ecc(input) => {
            let (g, _) = load(input, opts, piped)?;
            let table = eccentricities(&g, opts.algo, opts)?;
            emit(stdout, &EccReport::new(&g, opts.algo, &table), opts.format)?;
            Ok(EXIT_OK)
        }
        Command::Center(input) => {
            let (g, _) = load(input, opts, piped)?;
            let (vertex, rad) = match opts.algo {
                Algo::Oracle => {
                    let t = all_ecc_bruteforce(&g);
                    (t.center.first().unwrap_or(0), t.rad)
                }
                Algo::Sqrt | Algo::Hyp => find_center(&g),
            };
            let report = CenterReport {
                schema: SCHEMA,
                command: "center",
                algorithm: opts.algo,
                n: g.n(),
                m: g.m(),
                vertex,
                label: g.labels()[vertex],
                rad,
            };
            emit(stdout, &report, opts.format)?;
            Ok(EXIT_OK)
        }
        Command::Check(input) => {
            let (g, _) = load(input, opts, piped)?;
            emit(stdout, &check_report(&g, opts)?, opts.format)?;
            Ok(EXIT_OK)
        }
        Command::Params(input) => {
            let (g, _) = load(input, opts, piped)?;
            let report = parameter_report(&g, &opts.caps())?;
            let doc = ParamsDoc {
                schema: SCHEMA,
                command: "params",
                n: g.n(),
                m: g.m(),
                report,
            };
            emit(stdout, &doc, opts.format)?;
            Ok(EXIT_OK)
        }
        Command::SubsetEcc { input, subset } => {
            let (g, _) = load(input, opts, piped)?;
            if let Some(&v) = subset.iter().find(|&&v| v >= g.n()) {
                return Err(GraphError::VertexOutOfRange {
                    vertex: v,
                    n: g.n(),
                }
                .into());
            }
            let set: VertexSet = subset.iter().copied().collect();
            let report = subset_ecc(&set, &DistanceMatrix::new(&g))?;
            let doc = SubsetDoc {
                schema: SCHEMA,
                command: "subset-ecc",
                n: g.n(),
                m: g.m(),
                report,
            };
            emit(stdout, &doc, opts.format)?;
            Ok(EXIT_OK)
        }
        Command::Verify(input) => {
            let (g, source) = load(input, opts, piped)?;
            let report = verify(&g, source, opts);
            emit(stdout, &report, opts.format)?;
            Ok(if report.agree == report.total {
                EXIT_OK
            } else {
                EXIT_MISMATCH
            })
        }
    }
}

/// Loads the graph and a short description of where it came from.
fn load(
    input: &Input,
    opts: &RunOptions,
    piped: Option<&str>,
) -> Result<(Graph, String), CliError> {
    match (&input.path, &input.spec) {
        (_, Some(spec)) => {
            let spec = GenSpec::parse_with_seed(spec, opts.seed)?;
            Ok((spec.generate()?.graph, spec.to_string()))
        }
        (Some(path), None) if path.as_os_str() == "-" => {
            Ok((load_graph(piped.unwrap_or_default())?, "-".into()))
        }
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            Ok((load_graph(&text)?, path.display().to_string()))
        }
        (None, None) => Err(CliError::Input("no input graph".into())),
    }
}

fn eccentricities(
    g: &Graph,
    algo: Algo,
    opts: &RunOptions,
) -> Result<EccentricityTable, AlgoError> {
    match algo {
        Algo::Oracle => Ok(all_ecc_bruteforce(g)),
        Algo::Sqrt => all_ecc_sqrt(g, opts.algo_options()),
        Algo::Hyp => all_ecc_hyperbolic(g, opts.delta, opts.algo_options()),
    }
}

#[derive(Debug, Serialize)]
struct EccReport<'a> {
    schema: &'static str,
    command: &'static str,
    algorithm: Algo,
    n: usize,
    m: usize,
    rad: Dist,
    diam: Dist,
    ecc: &'a [Dist],
    center: &'a VertexSet,
    /// Input ids, present when they differ from the compact numbering.
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<&'a [u64]>,
}

impl<'a> EccReport<'a> {
    fn new(g: &'a Graph, algo: Algo, t: &'a EccentricityTable) -> Self {
        EccReport {
            schema: SCHEMA,
            command: "ecc",
            algorithm: algo,
            n: g.n(),
            m: g.m(),
            rad: t.rad,
            diam: t.diam,
            ecc: &t.ecc,
            center: &t.center,
            labels: (!g.has_identity_labels()).then(|| g.labels()),
        }
    }
}

#[derive(Debug, Serialize)]
struct CenterReport {
    schema: &'static str,
    command: &'static str,
    algorithm: Algo,
    n: usize,
    m: usize,
    vertex: Vertex,
    label: u64,
    rad: Dist,
}

#[derive(Debug, Serialize)]
struct RadiusLaw {
    rad: Dist,
    diam: Dist,
    holds: bool,
}

#[derive(Debug, Serialize)]
struct EqualRadii {
    k: Dist,
    #[serde(flatten)]
    verdict: Verdict,
}

#[derive(Debug, Serialize)]
struct CheckReport {
    schema: &'static str,
    command: &'static str,
    n: usize,
    m: usize,
    helly: HellyVerdict,
    radius_law: RadiusLaw,
    unimodality: Verdict,
    center_formula: Verdict,
    center_isometry: Verdict,
    equal_radii: Vec<EqualRadii>,
}

fn check_report(g: &Graph, opts: &RunOptions) -> Result<CheckReport, CliError> {
    let helly = helly_check_subsets(g, opts.cap_subsets)?;
    let t = all_ecc_bruteforce(g);
    let equal_radii = (1..=t.diam)
        .map(|k| {
            helly_check_equal_radii(g, k, opts.cap_subsets).map(|verdict| EqualRadii { k, verdict })
        })
        .collect::<Result<_, _>>()?;
    Ok(CheckReport {
        schema: SCHEMA,
        command: "check",
        n: g.n(),
        m: g.m(),
        helly,
        radius_law: RadiusLaw {
            rad: t.rad,
            diam: t.diam,
            holds: t.rad == t.diam.div_ceil(2),
        },
        unimodality: unimodality_check(g, &t),
        center_formula: center_formula_check(g, &t),
        center_isometry: center_isometry_check(g, &t),
        equal_radii,
    })
}

#[derive(Debug, Serialize)]
struct ParamsDoc {
    schema: &'static str,
    command: &'static str,
    n: usize,
    m: usize,
    #[serde(flatten)]
    report: ParamReport,
}

#[derive(Debug, Serialize)]
struct SubsetDoc {
    schema: &'static str,
    command: &'static str,
    n: usize,
    m: usize,
    #[serde(flatten)]
    report: SubsetEccReport,
}

#[derive(Debug, Serialize)]
struct GenReport<'a> {
    schema: &'static str,
    command: &'static str,
    #[serde(flatten)]
    meta: &'a GenMeta,
}

impl<'a> GenReport<'a> {
    fn new(meta: &'a GenMeta) -> Self {
        GenReport {
            schema: SCHEMA,
            command: "gen",
            meta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Agreement {
    Match,
    Mismatch,
    Error,
}

#[derive(Debug, Serialize)]
pub struct AlgoOutcome {
    pub algorithm: &'static str,
    pub status: Agreement,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub source: String,
    pub n: usize,
    pub m: usize,
    pub rad: Dist,
    pub diam: Dist,
    pub algorithms: Vec<AlgoOutcome>,
    pub agree: usize,
    pub total: usize,
    pub summary: String,
}

fn compare(
    name: &'static str,
    got: Result<EccentricityTable, AlgoError>,
    oracle: &EccentricityTable,
) -> AlgoOutcome {
    let (status, detail) = match got {
        Err(e) => (Agreement::Error, Some(e.to_string())),
        Ok(t) if t == *oracle => (Agreement::Match, None),
        Ok(t) => {
            let detail = match (0..oracle.ecc.len()).find(|&v| t.ecc.get(v) != oracle.ecc.get(v)) {
                Some(v) => format!(
                    "vertex {v}: ecc {:?}, oracle {}",
                    t.ecc.get(v),
                    oracle.ecc[v]
                ),
                None => "radius, diameter or center differs".into(),
            };
            (Agreement::Mismatch, Some(detail))
        }
    };
    AlgoOutcome {
        algorithm: name,
        status,
        detail,
    }
}

/// Compares the distant-gate, hyperbolic and threshold algorithms with the
/// oracle table.
pub fn verify(g: &Graph, source: String, opts: &RunOptions) -> VerifyReport {
    let oracle = all_ecc_bruteforce(g);
    let o = opts.algo_options();
    let threshold = ecc_at_most_k(g, oracle.diam, o).and_then(|t| {
        t.ecc
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .map(EccentricityTable::from_ecc)
            .ok_or_else(|| AlgoError::NotHelly {
                stage: "eccentricity threshold",
                detail: "some vertex exceeds the diameter".into(),
            })
    });
    let algorithms = vec![
        compare("sqrt", all_ecc_sqrt(g, o), &oracle),
        compare("hyp", all_ecc_hyperbolic(g, opts.delta, o), &oracle),
        compare("threshold", threshold, &oracle),
    ];
    let agree = algorithms
        .iter()
        .filter(|a| a.status == Agreement::Match)
        .count();
    let total = algorithms.len();
    VerifyReport {
        schema: SCHEMA,
        command: "verify",
        source,
        n: g.n(),
        m: g.m(),
        rad: oracle.rad,
        diam: oracle.diam,
        algorithms,
        agree,
        total,
        summary: format!("{agree}/{total} algorithms agree"),
    }
}

fn emit(out: &mut String, doc: &impl Serialize, format: Format) -> Result<(), CliError> {
    out.push_str(&render(doc, format));
    Ok(())
}

/// JSON, or one `key<TAB>value` line per scalar leaf with dotted keys and
/// scalar arrays joined by commas.
pub fn render(doc: &impl Serialize, format: Format) -> String {
    let value = serde_json::to_value(doc).expect("reports serialize");
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&value).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Tsv => {
            let mut out = String::new();
            flatten("", &value, &mut out);
            out
        }
    }
}

fn flatten(prefix: &str, value: &serde_json::Value, out: &mut String) {
    use serde_json::Value;
    let scalar = |v: &Value| match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&key(k), v, out);
            }
        }
        Value::Array(items) if items.iter().all(|v| !v.is_object() && !v.is_array()) => {
            let joined: Vec<String> = items.iter().map(scalar).collect();
            let _ = writeln!(out, "{prefix}\t{}", joined.join(","));
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), v, out);
            }
        }
        other => {
            let _ = writeln!(out, "{prefix}\t{}", scalar(other));
        }
    }
}
