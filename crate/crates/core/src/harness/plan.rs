use std::collections::HashSet;
use std::io::{self, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evo::{run, CrossoverKind, EvoParams, PathMode, TieRule, DEFAULT_CROSSOVER_PROB};
use crate::exact::{floyd_warshall, DistMatrix};
use crate::graph::{generate_complete_uniform, generate_hard_path, Graph};
use crate::rng::{derive_seed, RngStream, DEFAULT_SEED};

/// Stream id of repetition `rep` of variant `variant` at size index `size`.
pub fn run_stream_id(variant: usize, size: usize, rep: u32) -> u64 {
    ((variant as u64) << 48) | ((size as u64 & 0xFFFF) << 32) | u64::from(rep)
}

fn default_lambda() -> f64 {
    1.0
}

/// A named operator configuration. `pc` defaults to 1/2 when crossover is on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariantSpec {
    pub name: String,
    #[serde(default)]
    pub crossover: CrossoverKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pc: Option<f64>,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default)]
    pub tie: TieRule,
    #[serde(default)]
    pub mode: PathMode,
}

impl VariantSpec {
    pub fn new(name: impl Into<String>, crossover: CrossoverKind) -> Self {
        VariantSpec {
            name: name.into(),
            crossover,
            pc: None,
            lambda: 1.0,
            tie: TieRule::default(),
            mode: PathMode::default(),
        }
    }

    pub fn params(&self, max_steps: u64) -> EvoParams {
        let default_pc = if self.crossover == CrossoverKind::None {
            0.0
        } else {
            DEFAULT_CROSSOVER_PROB
        };
        EvoParams {
            crossover_kind: self.crossover,
            crossover_prob: self.pc.unwrap_or(default_pc),
            mutation_lambda: self.lambda,
            path_mode: self.mode,
            tie_rule: self.tie,
            max_steps,
        }
    }
}

/// Instance family evaluated at every size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InstanceSpec {
    /// `generate_hard_path(n, heavy)`, with `heavy = n` when omitted.
    HardPath {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        heavy: Option<u64>,
    },
    /// `generate_complete_uniform(n, w_min, w_max, seed)`; the seed is derived
    /// from the master seed and the size index.
    CompleteUniform { w_min: u64, w_max: u64 },
}

impl InstanceSpec {
    pub fn build(&self, n: usize, master_seed: u64, size_index: usize) -> Result<Graph> {
        match *self {
            InstanceSpec::HardPath { heavy } => generate_hard_path(n, heavy.unwrap_or(n as u64)),
            InstanceSpec::CompleteUniform { w_min, w_max } => generate_complete_uniform(
                n,
                w_min,
                w_max,
                derive_seed(master_seed, 1 << 62 | size_index as u64),
            ),
        }
    }
}

/// Iteration budget `ceil(factor * n^power)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetRule {
    pub factor: f64,
    pub power: u32,
}

impl Default for BudgetRule {
    fn default() -> Self {
        BudgetRule {
            factor: 50.0,
            power: 4,
        }
    }
}

impl BudgetRule {
    pub fn budget(&self, n: usize) -> u64 {
        let v = (self.factor * (n as f64).powi(self.power as i32)).ceil();
        if v >= u64::MAX as f64 {
            u64::MAX
        } else {
            v as u64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub variants: Vec<VariantSpec>,
    pub sizes: Vec<usize>,
    pub repetitions: u32,
    pub instance: InstanceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    #[serde(default)]
    pub budget: BudgetRule,
}

impl ExperimentPlan {
    pub fn from_json(text: &str) -> Result<Self> {
        let plan: ExperimentPlan =
            serde_json::from_str(text).map_err(|e| Error::parse(e.line(), format!("plan: {e}")))?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn seed(&self) -> u64 {
        self.master_seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions < 1 {
            return Err(Error::param("repetitions must be at least 1"));
        }
        if self.sizes.is_empty() || self.variants.is_empty() {
            return Err(Error::param("plan needs at least one size and one variant"));
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("sizes must be strictly increasing"));
        }
        if self.sizes[0] < 2 {
            return Err(Error::param("sizes must be at least 2"));
        }
        if self.sizes.len() > 0xFFFF {
            return Err(Error::param("too many sizes"));
        }
        let mut names = HashSet::new();
        for v in &self.variants {
            if v.name.is_empty() || v.name.contains([',', '"', '\n']) {
                return Err(Error::param(format!("invalid variant name {:?}", v.name)));
            }
            if !names.insert(v.name.as_str()) {
                return Err(Error::param(format!("duplicate variant name {:?}", v.name)));
            }
            v.params(1).validate()?;
        }
        if !(self.budget.factor > 0.0 && self.budget.factor.is_finite()) {
            return Err(Error::param("budget factor must be positive"));
        }
        Ok(())
    }
}

/// One run of the experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub variant: String,
    pub n: usize,
    pub rep: u32,
    /// `None` when the budget ran out (or the run failed).
    pub steps: Option<u64>,
    pub success: bool,
    pub wall_ms: f64,
    /// Panic message when the run aborted.
    pub error: Option<String>,
}

/// Rows in canonical `(variant, size, repetition)` order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentTable {
    pub rows: Vec<ExperimentRow>,
}

pub const RAW_CSV_HEADER: &str = "variant,n,rep,steps,success,wall_ms";

impl ExperimentTable {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{RAW_CSV_HEADER}")?;
        for r in &self.rows {
            let steps = r.steps.map(|s| s.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{},{:.3}",
                r.variant, r.n, r.rep, steps, r.success, r.wall_ms
            )?;
        }
        for r in self.rows.iter().filter(|r| r.error.is_some()) {
            let msg = r.error.as_deref().unwrap_or_default().replace('\n', " ");
            writeln!(w, "# error: {} n={} rep={}: {msg}", r.variant, r.n, r.rep)?;
        }
        Ok(())
    }

    /// Same rows with wall-clock times zeroed.
    pub fn without_wall_time(&self) -> Self {
        let mut t = self.clone();
        t.rows.iter_mut().for_each(|r| r.wall_ms = 0.0);
        t
    }
}

/// Runs every `(variant, size, repetition)` on a pool of `parallelism` workers.
pub fn run_experiment(plan: &ExperimentPlan, parallelism: usize) -> Result<ExperimentTable> {
    run_experiment_with_progress(plan, parallelism, |_| {})
}

/// As [`run_experiment`], calling `progress` as each run finishes (in completion order).
pub fn run_experiment_with_progress<F>(
    plan: &ExperimentPlan,
    parallelism: usize,
    progress: F,
) -> Result<ExperimentTable>
where
    F: Fn(&ExperimentRow) + Sync,
{
    plan.validate()?;
    let seed = plan.seed();
    let instances: Vec<(Graph, DistMatrix)> = plan
        .sizes
        .iter()
        .enumerate()
        .map(|(si, &n)| {
            let g = plan.instance.build(n, seed, si)?;
            let d = floyd_warshall(&g);
            Ok((g, d))
        })
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, usize, u32)> = (0..plan.variants.len())
        .flat_map(|vi| {
            (0..plan.sizes.len())
                .flat_map(move |si| (0..plan.repetitions).map(move |rep| (vi, si, rep)))
        })
        .collect();

    let execute = |&(vi, si, rep): &(usize, usize, u32)| {
        let variant = &plan.variants[vi];
        let n = plan.sizes[si];
        let (g, oracle) = &instances[si];
        let params = variant.params(plan.budget.budget(n));
        let rng = RngStream::new(seed, run_stream_id(vi, si, rep));
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| run(g, &params, oracle, rng)));
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        let (steps, error) = match outcome {
            Ok(Ok(stats)) => (stats.steps_to_optimal, None),
            Ok(Err(e)) => (None, Some(e.to_string())),
            Err(panic) => (None, Some(panic_message(panic.as_ref()))),
        };
        let row = ExperimentRow {
            variant: variant.name.clone(),
            n,
            rep,
            steps,
            success: steps.is_some(),
            wall_ms,
            error,
        };
        progress(&row);
        row
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::State(format!("worker pool: {e}")))?;
    // collect() on an indexed parallel iterator keeps job order
    let rows = pool.install(|| jobs.par_iter().map(execute).collect());
    Ok(ExperimentTable { rows })
}

fn panic_message(panic: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = panic.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = panic.downcast_ref::<String>() {
        s.clone()
    } else {
        "run panicked".to_string()
    }
}
