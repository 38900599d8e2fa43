//! Command-line front end. Every output starts with a metadata block: `#` comment
//! lines for text and CSV files, a `"meta"` object for JSON.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::evo::{self, CrossoverKind, EvoParams, PathMode, TieRule};
use crate::exact::{floyd_warshall, pair_edge_classes, INF};
use crate::graph::{
    generate_complete_uniform, generate_hard_path, parse_graph, serialize_graph, Graph,
};
use crate::harness::{
    fit_summaries, read_summary_csv, run_experiment_with_progress, summarize, write_summary_csv,
    ExperimentPlan, GroupSummary, VariantFit,
};
use crate::rng::{RngStream, DEFAULT_SEED};

pub const SEED_ENV: &str = "EVOAPSP_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "evoapsp",
    version,
    about = "Evolutionary all-pairs shortest paths"
)]
pub struct Cli {
    /// Master seed (decimal or 0x-prefixed hex); overrides EVOAPSP_SEED
    #[arg(long, global = true, env = SEED_ENV, value_parser = parse_seed)]
    pub seed: Option<u64>,
    /// Output file (a directory for `experiment`); stdout when omitted
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Suppress progress and notes on stderr
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a graph in edge-list format
    Gen(GenArgs),
    /// Exact distances and edge-count classes
    Exact(ExactArgs),
    /// One seeded run of the algorithm
    Evolve(EvolveArgs),
    /// Run an experiment plan and write raw.csv, summary.csv and fit.json
    Experiment(ExperimentArgs),
    /// Fit growth exponents to a summary CSV
    Fit(FitArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphKind {
    CompleteUniform,
    HardPath,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GraphKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub w_min: u64,
    #[arg(long, default_value_t = 100)]
    pub w_max: u64,
    /// Weight factor for the off-path edges of `hard-path` (default n)
    #[arg(long)]
    pub heavy: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Also write the edge-count histogram as `hops,count` CSV
    #[arg(long)]
    pub classes: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value = "none")]
    pub crossover: CrossoverKind,
    #[arg(long, default_value_t = evo::DEFAULT_CROSSOVER_PROB)]
    pub pc: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value = "replace")]
    pub tie: TieRule,
    #[arg(long, default_value = "path")]
    pub mode: PathMode,
    /// Iteration budget (default 50 n^4)
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub plan: PathBuf,
    /// Worker threads (default: available cores)
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub summary: PathBuf,
    /// Variant to fit; all variants when omitted
    #[arg(long)]
    pub variant: Option<String>,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

/// Failure classes, mapped to exit codes 1 and 2.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Input(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Param(_) => CliError::Usage(e.to_string()),
            Error::Parse { .. } | Error::State(_) => CliError::Input(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

/// Resolved settings that determine a command's output.
struct Meta {
    command: &'static str,
    flags: Vec<(&'static str, String)>,
    seed: u64,
}

impl Meta {
    fn new(command: &'static str, seed: u64) -> Self {
        Meta {
            command,
            flags: Vec::new(),
            seed,
        }
    }

    fn flag(mut self, key: &'static str, value: impl ToString) -> Self {
        self.flags.push((key, value.to_string()));
        self
    }

    fn write_comments<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "# evoapsp {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(w, "# command: {}", self.command)?;
        for (k, v) in &self.flags {
            writeln!(w, "# --{k} {v}")?;
        }
        writeln!(w, "# seed: {}", self.seed)
    }

    fn json(&self) -> Value {
        let flags: Map<String, Value> = self
            .flags
            .iter()
            .map(|(k, v)| (k.to_string(), Value::String(v.clone())))
            .collect();
        json!({
            "tool": "evoapsp",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "flags": flags,
            "seed": self.seed,
        })
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            fs::File::create(p).map_err(|e| io_err(p, e))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn read_graph(path: &Path) -> Result<Graph, CliError> {
    parse_graph(&read_input(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_json<W: Write>(mut w: W, value: &Value) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()
}

fn out_err(e: io::Error) -> CliError {
    CliError::Input(format!("writing output: {e}"))
}

/// Runs a parsed command line.
pub fn execute(cli: Cli) -> Result<(), CliError> {
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Gen(a) => gen(a, seed, out),
        Command::Exact(a) => exact(a, seed, out),
        Command::Evolve(a) => evolve(a, seed, out),
        Command::Experiment(a) => experiment(a, cli.seed, out, cli.quiet),
        Command::Fit(a) => fit(a, seed, out, cli.quiet),
    }
}

fn gen(a: &GenArgs, seed: u64, out: Option<&Path>) -> Result<(), CliError> {
    let (g, meta) = match a.kind {
        GraphKind::CompleteUniform => {
            if a.heavy.is_some() {
                return Err(CliError::Usage("--heavy applies to hard-path only".into()));
            }
            let g = generate_complete_uniform(a.n, a.w_min, a.w_max, seed)?;
            let meta = Meta::new("gen", seed)
                .flag("kind", "complete-uniform")
                .flag("n", a.n)
                .flag("w-min", a.w_min)
                .flag("w-max", a.w_max);
            (g, meta)
        }
        GraphKind::HardPath => {
            let heavy = a.heavy.unwrap_or(a.n as u64);
            let g = generate_hard_path(a.n, heavy)?;
            let meta = Meta::new("gen", seed)
                .flag("kind", "hard-path")
                .flag("n", a.n)
                .flag("heavy", heavy);
            (g, meta)
        }
    };
    let mut w = open_output(out)?;
    meta.write_comments(&mut w).map_err(out_err)?;
    w.write_all(serialize_graph(&g).as_bytes())
        .map_err(out_err)?;
    w.flush().map_err(out_err)
}

fn exact(a: &ExactArgs, seed: u64, out: Option<&Path>) -> Result<(), CliError> {
    let g = read_graph(&a.graph)?;
    let d = floyd_warshall(&g);
    let classes = pair_edge_classes(&d);
    let mut meta = Meta::new("exact", seed).flag("graph", a.graph.display());
    if let Some(c) = &a.classes {
        meta = meta.flag("classes", c.display());
    }
    let n = g.vertex_count();

    let mut w = open_output(out)?;
    let mut body = || -> io::Result<()> {
        meta.write_comments(&mut w)?;
        write!(w, "source")?;
        for v in 0..n {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
        for u in 0..n {
            write!(w, "{u}")?;
            for &x in d.row(u as u32) {
                if x == INF {
                    write!(w, ",inf")?;
                } else {
                    write!(w, ",{}", g.format_weight(x))?;
                }
            }
            writeln!(w)?;
        }
        writeln!(w, "# edge classes: hops,count")?;
        for (h, c) in classes.iter() {
            writeln!(w, "# {h},{c}")?;
        }
        w.flush()
    };
    body().map_err(out_err)?;

    if let Some(path) = &a.classes {
        let mut f = BufWriter::new(fs::File::create(path).map_err(|e| io_err(path, e))?);
        let mut body = || -> io::Result<()> {
            meta.write_comments(&mut f)?;
            writeln!(f, "hops,count")?;
            for (h, c) in classes.iter() {
                writeln!(f, "{h},{c}")?;
            }
            f.flush()
        };
        body().map_err(|e| io_err(path, e))?;
    }
    Ok(())
}

fn evolve(a: &EvolveArgs, seed: u64, out: Option<&Path>) -> Result<(), CliError> {
    let g = read_graph(&a.graph)?;
    let budget = a
        .budget
        .unwrap_or_else(|| EvoParams::default_budget(g.vertex_count()));
    let params = EvoParams {
        crossover_kind: a.crossover,
        crossover_prob: a.pc,
        mutation_lambda: a.lambda,
        path_mode: a.mode,
        tie_rule: a.tie,
        max_steps: budget,
    };
    params.validate()?;
    let meta = Meta::new("evolve", seed)
        .flag("graph", a.graph.display())
        .flag("crossover", a.crossover)
        .flag("pc", a.pc)
        .flag("lambda", a.lambda)
        .flag("tie", a.tie)
        .flag("mode", a.mode)
        .flag("budget", budget)
        .flag("stream", a.stream);

    let oracle = floyd_warshall(&g);
    let start = Instant::now();
    let stats = evo::run(&g, &params, &oracle, RngStream::new(seed, a.stream))?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;

    let doc = json!({
        "meta": meta.json(),
        "stats": to_value(&stats),
        "wall_ms": wall_ms,
    });
    write_json(open_output(out)?, &doc).map_err(out_err)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

/// Fits every variant in first-appearance order; variants that cannot be fitted
/// are listed with the reason.
fn fit_all(
    rows: &[GroupSummary],
    only: Option<&str>,
) -> Result<(Vec<VariantFit>, Vec<Value>), CliError> {
    let mut names: Vec<&str> = Vec::new();
    for r in rows {
        if !names.contains(&r.variant.as_str()) {
            names.push(&r.variant);
        }
    }
    if let Some(v) = only {
        if !names.contains(&v) {
            return Err(CliError::Usage(format!(
                "no summary rows for variant {v:?}"
            )));
        }
        names = vec![v];
    }
    let mut fits = Vec::new();
    let mut skipped = Vec::new();
    for name in names {
        match fit_summaries(rows, name) {
            Ok(fit) => fits.push(VariantFit {
                variant: name.to_string(),
                fit,
            }),
            Err(e) => skipped.push(json!({ "variant": name, "reason": e.to_string() })),
        }
    }
    Ok((fits, skipped))
}

fn experiment(
    a: &ExperimentArgs,
    cli_seed: Option<u64>,
    out: Option<&Path>,
    quiet: bool,
) -> Result<(), CliError> {
    let dir = out.ok_or_else(|| CliError::Usage("experiment needs --out DIR".into()))?;
    let mut plan = ExperimentPlan::from_json(&read_input(&a.plan)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", a.plan.display())))?;
    let seed = cli_seed.or(plan.master_seed).unwrap_or(DEFAULT_SEED);
    plan.master_seed = Some(seed);
    let jobs = match a.jobs {
        Some(0) => return Err(CliError::Usage("--jobs must be at least 1".into())),
        Some(j) => j,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;

    let plan_json = serde_json::to_string(&plan).expect("plan serializes");
    let meta = Meta::new("experiment", seed)
        .flag("plan", a.plan.display())
        .flag("resolved-plan", &plan_json);

    let total = plan.variants.len() * plan.sizes.len() * plan.repetitions as usize;
    let done = std::sync::atomic::AtomicUsize::new(0);
    let table = run_experiment_with_progress(&plan, jobs, |row| {
        let k = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
        if !quiet {
            let steps = row
                .steps
                .map_or_else(|| "budget exhausted".to_string(), |s| s.to_string());
            eprintln!(
                "[{k}/{total}] {} n={} rep={}: {steps}",
                row.variant, row.n, row.rep
            );
        }
    })?;
    let summary = summarize(&table)?;
    let (fits, skipped) = fit_all(&summary, None)?;
    if !quiet {
        for s in &skipped {
            eprintln!("not fitted: {} ({})", s["variant"], s["reason"]);
        }
        for g in summary.iter().filter(|g| g.flagged()) {
            eprintln!(
                "warning: {} n={} succeeded in {}/{} runs",
                g.variant, g.n, g.successes, g.runs
            );
        }
    }

    let raw_path = dir.join("raw.csv");
    let mut w = BufWriter::new(fs::File::create(&raw_path).map_err(|e| io_err(&raw_path, e))?);
    meta.write_comments(&mut w)
        .and_then(|_| table.write_csv(&mut w))
        .and_then(|_| w.flush())
        .map_err(|e| io_err(&raw_path, e))?;

    let summary_path = dir.join("summary.csv");
    let mut w =
        BufWriter::new(fs::File::create(&summary_path).map_err(|e| io_err(&summary_path, e))?);
    meta.write_comments(&mut w)
        .and_then(|_| write_summary_csv(&summary, &mut w))
        .and_then(|_| w.flush())
        .map_err(|e| io_err(&summary_path, e))?;

    let fit_path = dir.join("fit.json");
    let f = fs::File::create(&fit_path).map_err(|e| io_err(&fit_path, e))?;
    let doc = json!({ "meta": meta.json(), "fits": to_value(&fits), "skipped": skipped });
    write_json(BufWriter::new(f), &doc).map_err(|e| io_err(&fit_path, e))
}

fn fit(a: &FitArgs, seed: u64, out: Option<&Path>, quiet: bool) -> Result<(), CliError> {
    let text = read_input(&a.summary)?;
    let rows = read_summary_csv(text.as_bytes())
        .map_err(|e| CliError::Input(format!("{}: {e}", a.summary.display())))?;
    let (fits, skipped) = fit_all(&rows, a.variant.as_deref())?;
    if fits.is_empty() {
        let reasons: Vec<String> = skipped.iter().map(|s| s["reason"].to_string()).collect();
        return Err(CliError::Input(format!(
            "nothing to fit: {}",
            reasons.join("; ")
        )));
    }
    if !quiet {
        for s in &skipped {
            eprintln!("not fitted: {} ({})", s["variant"], s["reason"]);
        }
    }
    let mut meta = Meta::new("fit", seed).flag("summary", a.summary.display());
    if let Some(v) = &a.variant {
        meta = meta.flag("variant", v);
    }
    let doc = json!({ "meta": meta.json(), "fits": to_value(&fits), "skipped": skipped });
    write_json(open_output(out)?, &doc).map_err(out_err)
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
