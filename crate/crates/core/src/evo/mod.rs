//! The steady-state genetic algorithm for all-pairs shortest paths.
//!
//! The population holds at most one walk per ordered endpoint pair. Each
//! iteration creates one offspring, either by mutating a uniformly chosen
//! individual (`S + 1` elementary extend/shrink moves, `S ~ Pois(lambda)`) or,
//! with probability `p_c`, by concatenating two parents. The offspring then
//! competes only with the incumbent holding the same endpoints.

mod individual;
mod operators;
mod population;
mod run;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::MAX_POISSON_LAMBDA;

pub use individual::Individual;
pub use operators::{
    crossover, elementary_mutation, mutate, mutate_in_place, select_parents, Parents,
};
pub use population::{selection_replace, Population, ReplaceOutcome};
pub use run::{
    checkpoint_schedule, is_optimal, run, step, Checkpoint, Evolution, Operator, RunStats,
    StepOutcome,
};

macro_rules! cli_enum {
    ($ty:ident { $($variant:ident => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub const NAMES: &'static [&'static str] = &[$($name),+];

            pub fn as_str(self) -> &'static str {
                match self { $($ty::$variant => $name),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok($ty::$variant),)+
                    _ => Err(Error::param(format!(
                        "unknown {} {s:?} (expected one of: {})",
                        stringify!($ty),
                        Self::NAMES.join(", ")
                    ))),
                }
            }
        }
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CrossoverKind {
    /// Mutation only.
    #[default]
    None,
    /// Two independent uniform parents; offspring only if they happen to chain.
    #[serde(rename = "naive")]
    NaiveUniform,
    /// Second parent drawn among individuals starting where the first ends.
    #[serde(rename = "matched")]
    EndpointMatched,
    /// Like `EndpointMatched`, then splice at the first vertex the parents share.
    #[serde(rename = "matched-trim")]
    EndpointMatchedTrim,
}

cli_enum!(CrossoverKind {
    None => "none",
    NaiveUniform => "naive",
    EndpointMatched => "matched",
    EndpointMatchedTrim => "matched-trim",
});

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum PathMode {
    /// Offspring that repeat a vertex are discarded.
    #[default]
    #[serde(rename = "path")]
    SimplePath,
    #[serde(rename = "walk")]
    Walk,
}

cli_enum!(PathMode {
    SimplePath => "path",
    Walk => "walk",
});

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum TieRule {
    /// Equal-weight offspring replace the incumbent.
    #[default]
    #[serde(rename = "replace")]
    ReplaceOnTie,
    #[serde(rename = "keep")]
    KeepOnTie,
}

cli_enum!(TieRule {
    ReplaceOnTie => "replace",
    KeepOnTie => "keep",
});

/// Default crossover probability when a crossover kind is selected.
pub const DEFAULT_CROSSOVER_PROB: f64 = 0.5;

/// Operator configuration for one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvoParams {
    pub crossover_kind: CrossoverKind,
    pub crossover_prob: f64,
    pub mutation_lambda: f64,
    pub path_mode: PathMode,
    pub tie_rule: TieRule,
    pub max_steps: u64,
}

impl Default for EvoParams {
    fn default() -> Self {
        EvoParams {
            crossover_kind: CrossoverKind::None,
            crossover_prob: 0.0,
            mutation_lambda: 1.0,
            path_mode: PathMode::SimplePath,
            tie_rule: TieRule::ReplaceOnTie,
            max_steps: 0,
        }
    }
}

impl EvoParams {
    /// Mutation-only parameters with the given iteration budget.
    pub fn mutation_only(max_steps: u64) -> Self {
        EvoParams {
            max_steps,
            ..Self::default()
        }
    }

    /// Crossover-enabled parameters with `p_c = 1/2`.
    pub fn with_crossover(kind: CrossoverKind, max_steps: u64) -> Self {
        EvoParams {
            crossover_kind: kind,
            crossover_prob: if kind == CrossoverKind::None {
                0.0
            } else {
                DEFAULT_CROSSOVER_PROB
            },
            max_steps,
            ..Self::default()
        }
    }

    /// Default budget `50 n^4`, saturating.
    pub fn default_budget(n: usize) -> u64 {
        (n as u64)
            .checked_pow(4)
            .and_then(|v| v.checked_mul(50))
            .unwrap_or(u64::MAX)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.crossover_prob) {
            return Err(Error::param(format!(
                "crossover probability {} outside [0, 1]",
                self.crossover_prob
            )));
        }
        if !(0.0..=MAX_POISSON_LAMBDA).contains(&self.mutation_lambda) {
            return Err(Error::param(format!(
                "mutation lambda {} outside [0, {MAX_POISSON_LAMBDA}]",
                self.mutation_lambda
            )));
        }
        Ok(())
    }

    /// Validated copy with `p_c` forced to 0 when crossover is disabled.
    pub fn normalized(&self) -> Result<Self> {
        self.validate()?;
        let mut p = *self;
        if p.crossover_kind == CrossoverKind::None {
            p.crossover_prob = 0.0;
        }
        Ok(p)
    }
}
