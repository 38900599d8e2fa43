use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::evo::operators::{crossover_into, mutate_with_p0, Marks};
use crate::evo::{
    select_parents, selection_replace, CrossoverKind, EvoParams, Individual, Population,
    ReplaceOutcome,
};
use crate::exact::DistMatrix;
use crate::graph::{Graph, Vertex};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Operator {
    Mutation,
    Crossover,
}

/// What happened in one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepOutcome {
    pub operator: Operator,
    pub offspring: bool,
    pub replacement: ReplaceOutcome,
    /// Endpoints of the offspring, when one was produced.
    pub pair: Option<(Vertex, Vertex)>,
}

impl StepOutcome {
    pub fn replaced(&self) -> bool {
        self.replacement.changed()
    }
}

/// A population evolving on a fixed graph with its own random stream.
#[derive(Debug, Clone)]
pub struct Evolution<'g> {
    graph: &'g Graph,
    params: EvoParams,
    population: Population,
    rng: RngStream,
    scratch: Individual,
    marks: Marks,
    exp_neg_lambda: f64,
    steps: u64,
}

impl<'g> Evolution<'g> {
    /// Starts from the single-edge population of `graph`.
    pub fn new(graph: &'g Graph, params: EvoParams, rng: RngStream) -> Result<Self> {
        Self::with_population(graph, params, Population::init(graph), rng)
    }

    pub fn with_population(
        graph: &'g Graph,
        params: EvoParams,
        population: Population,
        rng: RngStream,
    ) -> Result<Self> {
        if population.vertex_count() != graph.vertex_count() {
            return Err(Error::param(
                "population and graph disagree on vertex count",
            ));
        }
        let params = params.normalized()?;
        Ok(Evolution {
            graph,
            params,
            exp_neg_lambda: (-params.mutation_lambda).exp(),
            population,
            rng,
            scratch: Individual::from_edge(0, 0, 0),
            marks: Marks::new(graph.vertex_count()),
            steps: 0,
        })
    }

    pub fn population(&self) -> &Population {
        &self.population
    }

    pub fn params(&self) -> &EvoParams {
        &self.params
    }

    /// Iterations performed so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// One iteration: choose an operator, build at most one offspring, offer it.
    pub fn step(&mut self) -> Result<StepOutcome> {
        let p = &self.params;
        let use_crossover =
            p.crossover_kind != CrossoverKind::None && self.rng.coin(p.crossover_prob);
        let (operator, offspring) = if use_crossover {
            let parents = select_parents(&self.population, p.crossover_kind, &mut self.rng)?;
            let produced = match parents.second {
                Some(second) => crossover_into(
                    parents.first,
                    second,
                    p.crossover_kind,
                    p.path_mode,
                    self.graph,
                    &mut self.marks,
                    &mut self.scratch,
                ),
                None => false,
            };
            (Operator::Crossover, produced)
        } else {
            let parent = self.population.uniform_member(&mut self.rng)?;
            self.scratch.clone_from(parent);
            mutate_with_p0(
                &mut self.scratch,
                self.graph,
                p.path_mode,
                p.mutation_lambda,
                self.exp_neg_lambda,
                &mut self.rng,
            );
            (Operator::Mutation, true)
        };
        self.steps += 1;

        let offspring = offspring && self.scratch.first() != self.scratch.last();
        let (replacement, pair) = if offspring {
            (
                selection_replace(&mut self.population, &self.scratch, p.tie_rule),
                Some(self.scratch.endpoints()),
            )
        } else {
            (ReplaceOutcome::Kept, None)
        };
        Ok(StepOutcome {
            operator,
            offspring,
            replacement,
            pair,
        })
    }
}

/// Free-standing single iteration on a borrowed population.
pub fn step(
    pop: &mut Population,
    g: &Graph,
    params: &EvoParams,
    rng: &mut RngStream,
) -> Result<StepOutcome> {
    let taken = std::mem::replace(pop, Population::empty(0));
    let mut evo = Evolution::with_population(g, *params, taken, rng.clone())?;
    let out = evo.step();
    *pop = evo.population;
    *rng = evo.rng;
    out
}

/// True iff every pair at finite oracle distance holds an individual of exactly that weight.
pub fn is_optimal(pop: &Population, oracle: &DistMatrix) -> Result<bool> {
    check_sizes(pop, oracle)?;
    Ok(optimal_pairs(pop, oracle) == oracle.reachable_pairs())
}

fn check_sizes(pop: &Population, oracle: &DistMatrix) -> Result<()> {
    if pop.vertex_count() != oracle.vertex_count() {
        return Err(Error::param(format!(
            "population has {} vertices but oracle has {}",
            pop.vertex_count(),
            oracle.vertex_count()
        )));
    }
    Ok(())
}

fn optimal_pairs(pop: &Population, oracle: &DistMatrix) -> usize {
    pop.iter()
        .filter(|ind| {
            let (s, t) = ind.endpoints();
            oracle.dist(s, t) == Some(ind.weight())
        })
        .count()
}

/// Trajectory sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Checkpoint {
    pub step: u64,
    pub fraction_optimal: f64,
}

/// Outcome of one run. Contains no wall-clock data, so equal inputs give equal stats.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunStats {
    /// First iteration after which the population is optimal; `None` if the budget ran out.
    #[serde(serialize_with = "steps_or_exhausted")]
    pub steps_to_optimal: Option<u64>,
    pub success: bool,
    pub steps_executed: u64,
    pub budget: u64,
    pub optimal_pairs: usize,
    pub target_pairs: usize,
    pub trajectory: Vec<Checkpoint>,
    pub master_seed: u64,
    pub stream_id: u64,
}

fn steps_or_exhausted<S: Serializer>(v: &Option<u64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(n) => s.serialize_u64(*n),
        None => s.serialize_str("budget exhausted"),
    }
}

/// Checkpoint steps `ceil(1.2^k)`, deduplicated, ascending.
pub fn checkpoint_schedule() -> impl Iterator<Item = u64> {
    let mut x = 1.0f64;
    let mut last = 0u64;
    std::iter::from_fn(move || loop {
        let c = x.ceil();
        x *= 1.2;
        if c >= u64::MAX as f64 {
            return None;
        }
        let c = c as u64;
        if c > last {
            last = c;
            return Some(c);
        }
    })
}

/// Iterates until the population is optimal or `params.max_steps` iterations have run.
pub fn run(g: &Graph, params: &EvoParams, oracle: &DistMatrix, rng: RngStream) -> Result<RunStats> {
    let master_seed = rng.master_seed();
    let stream_id = rng.stream_id();
    let mut evo = Evolution::new(g, *params, rng)?;
    check_sizes(&evo.population, oracle)?;
    let budget = evo.params.max_steps;
    let target = oracle.reachable_pairs();
    let mut optimal = optimal_pairs(&evo.population, oracle);
    let fraction = |k: usize| {
        if target == 0 {
            1.0
        } else {
            k as f64 / target as f64
        }
    };

    let mut trajectory = vec![Checkpoint {
        step: 0,
        fraction_optimal: fraction(optimal),
    }];
    let mut schedule = checkpoint_schedule().peekable();
    let mut steps_to_optimal = (optimal == target).then_some(0);

    while steps_to_optimal.is_none() && evo.steps < budget {
        let out = evo.step()?;
        if let Some((s, t)) = out.pair {
            let was = match out.replacement {
                ReplaceOutcome::Kept => None,
                ReplaceOutcome::Inserted => Some(false),
                ReplaceOutcome::Replaced { previous } => Some(oracle.dist(s, t) == Some(previous)),
            };
            if was == Some(false) {
                let w = evo.population.get(s, t).map(Individual::weight);
                if w.is_some() && oracle.dist(s, t) == w {
                    optimal += 1;
                }
            }
        }
        let now = evo.steps;
        if optimal == target {
            steps_to_optimal = Some(now);
        }
        while schedule.peek().is_some_and(|&c| c < now) {
            schedule.next();
        }
        if schedule.peek() == Some(&now) || steps_to_optimal.is_some() || now == budget {
            trajectory.push(Checkpoint {
                step: now,
                fraction_optimal: fraction(optimal),
            });
        }
    }

    Ok(RunStats {
        steps_to_optimal,
        success: steps_to_optimal.is_some(),
        steps_executed: evo.steps,
        budget,
        optimal_pairs: optimal,
        target_pairs: target,
        trajectory,
        master_seed,
        stream_id,
    })
}
