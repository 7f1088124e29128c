//! `minorcast` command-line front-end.
//!
//! Exit codes: 0 success, 1 error (including a failed re-verification),
//! 2 infeasible, 3 time limit reached, 4 `verify` found violations.

pub mod bench;
pub mod instance;
pub mod report;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use minorcast::decomposition::{build_master, solve_decomposition_with, DecompositionOptions};
use minorcast::embedding::DEFAULT_FIBER_CAP;
use minorcast::milp::{export_lp, SolveLimits, SolveStatus};
use minorcast::monolithic::{build_monolithic, solve_monolithic};
use minorcast::topology::{
    gen_chimera, gen_erdos_renyi, gen_pegasus, gen_structured_detailed, illustrative_example, ChimeraSpec,
    ErdosRenyiSpec, PegasusSpec, StructuredCells, StructuredSpec,
};
use minorcast::verify::{oracle_min_embedding, verify_embedding, OracleOptions, OracleResult, DEFAULT_ORACLE_CAP};
use minorcast::{save_graph, EmbedObjective, EmbedOutcome, EmbedProblem, EmbedStats, Graph};
use serde::Serialize;

use crate::instance::resolve_graph;
use crate::report::EmbeddingDoc;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_TIMEOUT: i32 = 3;
pub const EXIT_INVALID: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "minorcast", version, about = "Exact minor embedding into annealer hardware graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a graph and write it as an edge list.
    Gen(GenArgs),
    /// Embed a source graph into a target graph.
    Embed(EmbedArgs),
    /// Write the 0-1 model of an embedding problem in LP format.
    Export(ExportArgs),
    /// Check an embedding JSON document against its graphs.
    Verify(VerifyArgs),
    /// Minimum embedding by exhaustive search (small targets only).
    Oracle(OracleArgs),
    /// Run a benchmark manifest and write a CSV table.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Monolithic,
    Decomposition,
    Oracle,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Monolithic => "monolithic",
            Method::Decomposition => "decomposition",
            Method::Oracle => "oracle",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        <Method as ValueEnum>::from_str(s, true).map_err(|_| anyhow::anyhow!("unknown method `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum ObjectiveArg {
    Feasible,
    #[default]
    MinSize,
}

impl ObjectiveArg {
    pub fn to_objective(self) -> EmbedObjective {
        match self {
            ObjectiveArg::Feasible => EmbedObjective::Feasibility,
            ObjectiveArg::MinSize => EmbedObjective::MinSize,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        <ObjectiveArg as ValueEnum>::from_str(s, true).map_err(|_| anyhow::anyhow!("unknown objective `{s}`"))
    }
}

#[derive(Debug, Clone, Args)]
pub struct SeedArg {
    /// Seed for generators that were not given one.
    #[arg(long, env = "MINORCAST_SEED", default_value_t = 0, global = true)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct PairArgs {
    /// Graph to embed: generator spec or edge-list file.
    #[arg(long)]
    pub source: String,
    /// Hardware graph: generator spec or edge-list file.
    #[arg(long)]
    pub target: String,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(subcommand)]
    pub family: GenFamily,
    /// Output file; stdout when omitted. A `.meta.json` sidecar is written next to it.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub seed: SeedArg,
}

#[derive(Debug, Subcommand)]
pub enum GenFamily {
    Chimera {
        #[arg(short = 'L', default_value_t = 4)]
        l: usize,
        #[arg(short = 'M')]
        m: usize,
        #[arg(short = 'N')]
        n: usize,
    },
    Pegasus {
        #[arg(short = 'M')]
        m: usize,
        #[arg(short = 'N')]
        n: usize,
    },
    Er {
        #[arg(long)]
        nu: usize,
        #[arg(long)]
        p: f64,
    },
    Structured {
        #[arg(long)]
        zeta: usize,
        #[arg(long = "p-inter")]
        p_inter: f64,
        #[arg(long = "p-intra")]
        p_intra: f64,
        /// 2 for the `C_{4,1,2}` family, 4 for `C_{4,2,2}`.
        #[arg(long, default_value_t = 2)]
        cells: usize,
    },
    Illustrative,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::MinSize)]
    pub objective: ObjectiveArg,
    /// Fiber-size bound. Defaults to 3 for the monolithic model and to the
    /// target size otherwise.
    #[arg(short)]
    pub k: Option<usize>,
    #[command(flatten)]
    pub seed: SeedArg,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[command(flatten)]
    pub solve: SolveArgs,
    #[arg(long, value_enum, default_value_t = Method::Decomposition)]
    pub method: Method,
    /// Wall-clock limit in seconds.
    #[arg(long = "time-limit")]
    pub time_limit: Option<f64>,
    /// Oracle refusal threshold on target vertices.
    #[arg(long = "size-cap", default_value_t = DEFAULT_ORACLE_CAP)]
    pub size_cap: usize,
    /// Oracle: ignore embeddings larger than this.
    #[arg(long = "max-size")]
    pub max_size: Option<usize>,
    /// Monolithic: select at most one connecting path per vertex pair.
    #[arg(long = "unique-fiber-path")]
    pub unique_fiber_path: bool,
    /// Embedding JSON output; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Per-iteration decomposition log.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub solve: SolveArgs,
    #[arg(long, value_enum, default_value_t = Method::Monolithic)]
    pub method: Method,
    #[arg(long = "unique-fiber-path")]
    pub unique_fiber_path: bool,
    /// LP output; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Embedding JSON document.
    #[arg(long)]
    pub embedding: PathBuf,
    #[command(flatten)]
    pub seed: SeedArg,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long = "size-cap", default_value_t = DEFAULT_ORACLE_CAP)]
    pub size_cap: usize,
    #[arg(long = "max-size")]
    pub max_size: Option<usize>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub seed: SeedArg,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// TOML manifest.
    pub manifest: PathBuf,
    /// CSV output; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Parallel runs.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

/// Everything needed to run one method on one graph pair.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub method: Method,
    pub objective: ObjectiveArg,
    pub k: Option<usize>,
    pub time_limit: Option<f64>,
    pub size_cap: usize,
    pub max_size: Option<usize>,
    pub unique_fiber_path: bool,
}

impl RunConfig {
    pub fn new(method: Method, objective: ObjectiveArg) -> Self {
        RunConfig {
            method,
            objective,
            k: None,
            time_limit: None,
            size_cap: DEFAULT_ORACLE_CAP,
            max_size: None,
            unique_fiber_path: false,
        }
    }

    pub fn fiber_bound(&self, target: &Graph) -> usize {
        self.k.unwrap_or(match self.method {
            Method::Monolithic => DEFAULT_FIBER_CAP,
            _ => target.num_vertices(),
        })
    }

    fn problem(&self, target: &Graph, source: &Graph) -> Result<EmbedProblem> {
        let mut p =
            EmbedProblem::new(target.clone(), source.clone(), self.fiber_bound(target), self.objective.to_objective());
        if let Some(t) = self.time_limit {
            if !(t.is_finite() && t >= 0.0) {
                bail!("time limit must be a non-negative number of seconds");
            }
            p.limits = SolveLimits::with_time_limit(t);
        }
        p.unique_fiber_path = self.unique_fiber_path;
        Ok(p)
    }
}

/// Runs the configured method. Returned embeddings have been re-verified.
pub fn run_method(
    cfg: &RunConfig,
    target: &Graph,
    source: &Graph,
    trace: Option<&mut dyn std::io::Write>,
) -> Result<EmbedOutcome> {
    let problem = cfg.problem(target, source)?;
    let out = match cfg.method {
        Method::Monolithic => solve_monolithic(&problem)?,
        Method::Decomposition => {
            let out = solve_decomposition_with(&problem, &DecompositionOptions::default())?;
            if let Some(w) = trace {
                for entry in &out.trace {
                    writeln!(w, "{}", entry.to_line())?;
                }
            }
            out
        }
        Method::Oracle => run_oracle(&problem, cfg.size_cap, cfg.max_size)?,
    };
    if let Some(e) = &out.embedding {
        let report = verify_embedding(e, target, source)?;
        if let Some(v) = report.violations.first() {
            bail!("re-verification failed: {v}");
        }
    }
    Ok(out)
}

fn run_oracle(problem: &EmbedProblem, cap: usize, max_size: Option<usize>) -> Result<EmbedOutcome> {
    let start = Instant::now();
    let m = problem.source.num_vertices() as i64;
    let mut out = EmbedOutcome {
        status: SolveStatus::Infeasible,
        embedding: None,
        best_bound: m,
        k: problem.k,
        reason: None,
        stats: EmbedStats::default(),
        trace: Vec::new(),
    };
    if problem.is_trivially_infeasible() {
        out.reason = Some(format!(
            "trivially infeasible: source has {} vertices, target only {}",
            problem.source.num_vertices(),
            problem.target.num_vertices()
        ));
        return Ok(out);
    }
    let options = OracleOptions { max_target_vertices: cap, max_size, max_fiber: Some(problem.k) };
    match oracle_min_embedding(&problem.target, &problem.source, &options)? {
        OracleResult::Infeasible => {
            let mut why = format!("no embedding with fibers of at most {} vertices", problem.k);
            if let Some(s) = max_size {
                why.push_str(&format!(" and size at most {s}"));
            }
            out.reason = Some(why);
        }
        OracleResult::Minimum { size, witness } => {
            out.status = match problem.objective {
                EmbedObjective::MinSize => SolveStatus::Optimal,
                EmbedObjective::Feasibility => SolveStatus::Feasible,
            };
            out.best_bound = size as i64;
            out.embedding = Some(witness);
        }
    }
    out.stats.wall_time = start.elapsed();
    Ok(out)
}

pub fn exit_code(status: SolveStatus) -> i32 {
    match status {
        SolveStatus::Optimal | SolveStatus::Feasible => EXIT_OK,
        SolveStatus::Infeasible => EXIT_INFEASIBLE,
        SolveStatus::Timeout => EXIT_TIMEOUT,
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Embed(a) => cmd_embed(a),
        Command::Export(a) => cmd_export(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

#[derive(Debug, Serialize)]
struct GenMeta {
    generator: String,
    params: serde_json::Value,
    seed: Option<u64>,
    num_vertices: usize,
    num_edges: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    forced_attachment: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    contracted: Option<Vec<(usize, usize)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dropped_vertices: Option<Vec<usize>>,
    version: String,
}

fn cmd_gen(a: GenArgs) -> Result<i32> {
    let seed = a.seed.seed;
    let (graph, mut meta) = match a.family {
        GenFamily::Chimera { l, m, n } => {
            let spec = ChimeraSpec::new(l, m, n);
            (gen_chimera(spec)?, meta("chimera", serde_json::to_value(spec)?, None))
        }
        GenFamily::Pegasus { m, n } => {
            let spec = PegasusSpec::new(m, n);
            (gen_pegasus(spec)?, meta("pegasus", serde_json::to_value(spec)?, None))
        }
        GenFamily::Er { nu, p } => {
            let spec = ErdosRenyiSpec { nu, p, seed };
            (gen_erdos_renyi(spec)?, meta("er", serde_json::to_value(spec)?, Some(seed)))
        }
        GenFamily::Structured { zeta, p_inter, p_intra, cells } => {
            let cells = match cells {
                2 => StructuredCells::Two,
                4 => StructuredCells::Four,
                c => bail!("--cells must be 2 or 4, got {c}"),
            };
            let spec = StructuredSpec { zeta, p_inter, p_intra, cells, seed };
            let inst = gen_structured_detailed(spec)?;
            let mut md = meta("structured", serde_json::to_value(spec)?, Some(seed));
            md.forced_attachment = Some(inst.forced_attachment);
            md.contracted = Some(inst.contracted.clone());
            md.dropped_vertices = Some(inst.dropped_vertices.clone());
            (inst.graph, md)
        }
        GenFamily::Illustrative => (illustrative_example(), meta("illustrative", serde_json::Value::Null, None)),
    };
    meta.num_vertices = graph.num_vertices();
    meta.num_edges = graph.num_edges();
    let text = save_graph(&graph);
    write_output(a.output.as_deref(), &text)?;
    if let Some(out) = &a.output {
        let mut side = out.as_os_str().to_owned();
        side.push(".meta.json");
        let mut doc = serde_json::to_string_pretty(&meta)?;
        doc.push('\n');
        std::fs::write(PathBuf::from(side), doc)?;
    }
    eprintln!("generated {} vertices, {} edges", graph.num_vertices(), graph.num_edges());
    Ok(EXIT_OK)
}

fn meta(generator: &str, params: serde_json::Value, seed: Option<u64>) -> GenMeta {
    GenMeta {
        generator: generator.to_string(),
        params,
        seed,
        num_vertices: 0,
        num_edges: 0,
        forced_attachment: None,
        contracted: None,
        dropped_vertices: None,
        version: report::VERSION.to_string(),
    }
}

fn load_pair(pair: &PairArgs, seed: u64) -> Result<(Graph, Graph)> {
    let source = resolve_graph(&pair.source, seed).context("source graph")?;
    let target = resolve_graph(&pair.target, seed).context("target graph")?;
    Ok((source, target))
}

fn summarize(out: &EmbedOutcome) {
    let size = out.size().map_or_else(|| "-".to_string(), |s| s.to_string());
    eprintln!("status={} size={} bound={} k={}", out.status.as_str(), size, out.best_bound, out.k);
    if let Some(r) = &out.reason {
        eprintln!("reason: {r}");
    }
}

fn cmd_embed(a: EmbedArgs) -> Result<i32> {
    let seed = a.solve.seed.seed;
    let (source, target) = load_pair(&a.solve.pair, seed)?;
    let cfg = RunConfig {
        method: a.method,
        objective: a.solve.objective,
        k: a.solve.k,
        time_limit: a.time_limit,
        size_cap: a.size_cap,
        max_size: a.max_size,
        unique_fiber_path: a.unique_fiber_path,
    };
    let mut trace_file = match &a.trace {
        Some(p) => Some(std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => None,
    };
    let out = run_method(&cfg, &target, &source, trace_file.as_mut().map(|f| f as &mut dyn std::io::Write))?;
    let objective = cfg.objective.to_objective().as_str();
    let doc = EmbeddingDoc::from_outcome(&out, cfg.method.as_str(), objective, seed);
    write_output(a.output.as_deref(), &doc.to_json())?;
    summarize(&out);
    Ok(exit_code(out.status))
}

fn cmd_export(a: ExportArgs) -> Result<i32> {
    let seed = a.solve.seed.seed;
    let (source, target) = load_pair(&a.solve.pair, seed)?;
    let mut cfg = RunConfig::new(a.method, a.solve.objective);
    cfg.k = a.solve.k;
    cfg.unique_fiber_path = a.unique_fiber_path;
    let problem = cfg.problem(&target, &source)?;
    let model = match a.method {
        Method::Monolithic => build_monolithic(&problem)?.0,
        Method::Decomposition => build_master(&problem)?.0,
        Method::Oracle => bail!("the oracle has no 0-1 model to export"),
    };
    write_output(a.output.as_deref(), &export_lp(&model))?;
    eprintln!("{} variables, {} constraints", model.num_vars(), model.num_constraints());
    Ok(EXIT_OK)
}

fn cmd_verify(a: VerifyArgs) -> Result<i32> {
    let (source, target) = load_pair(&a.pair, a.seed.seed)?;
    let text = std::fs::read_to_string(&a.embedding).with_context(|| format!("reading {}", a.embedding.display()))?;
    let doc: EmbeddingDoc = serde_json::from_str(&text).context("parsing embedding JSON")?;
    let report = verify_embedding(&doc.embedding(source.num_vertices()), &target, &source)?;
    if report.is_valid() {
        println!("valid size={}", report.size);
        Ok(EXIT_OK)
    } else {
        for v in &report.violations {
            println!("{v}");
        }
        println!("invalid violations={}", report.violations.len());
        Ok(EXIT_INVALID)
    }
}

fn cmd_oracle(a: OracleArgs) -> Result<i32> {
    let seed = a.seed.seed;
    let (source, target) = load_pair(&a.pair, seed)?;
    let mut cfg = RunConfig::new(Method::Oracle, ObjectiveArg::MinSize);
    cfg.size_cap = a.size_cap;
    cfg.max_size = a.max_size;
    let out = run_method(&cfg, &target, &source, None)?;
    let doc = EmbeddingDoc::from_outcome(&out, "oracle", "min-size", seed);
    write_output(a.output.as_deref(), &doc.to_json())?;
    summarize(&out);
    Ok(exit_code(out.status))
}

fn cmd_bench(a: BenchArgs) -> Result<i32> {
    let text = std::fs::read_to_string(&a.manifest).with_context(|| format!("reading {}", a.manifest.display()))?;
    let jobs = bench::expand(&bench::parse_manifest(&text)?)?;
    let rows = bench::run_jobs(&jobs, a.jobs.max(1))?;
    let csv = bench::to_csv(&rows)?;
    write_output(a.output.as_deref(), &csv)?;
    let failed = rows.iter().filter(|r| r.status == "error").count();
    eprintln!("{} runs, {} errors", rows.len(), failed);
    Ok(EXIT_OK)
}

/// Duration as fractional seconds with millisecond resolution.
pub fn seconds(d: Duration) -> String {
    format!("{:.3}", d.as_secs_f64())
}
