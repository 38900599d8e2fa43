use serde::Serialize;

use crate::error::{Error, Result};
use crate::evo::PathMode;
use crate::graph::{Graph, Vertex, Weight};

/// A walk in the graph with its cached total weight.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Individual {
    pub(crate) vertices: Vec<Vertex>,
    pub(crate) weight: Weight,
}

impl Individual {
    /// The single-edge walk `[u, v]`.
    pub fn from_edge(u: Vertex, v: Vertex, weight: Weight) -> Self {
        Individual {
            vertices: vec![u, v],
            weight,
        }
    }

    /// Builds a walk from a vertex sequence, checking every edge against `g`.
    pub fn from_vertices(g: &Graph, vertices: Vec<Vertex>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::param("a walk needs at least two vertices"));
        }
        let weight = walk_weight(g, &vertices)?;
        Ok(Individual { vertices, weight })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn weight(&self) -> Weight {
        self.weight
    }

    #[inline]
    pub fn first(&self) -> Vertex {
        self.vertices[0]
    }

    #[inline]
    pub fn last(&self) -> Vertex {
        self.vertices[self.vertices.len() - 1]
    }

    pub fn endpoints(&self) -> (Vertex, Vertex) {
        (self.first(), self.last())
    }

    pub fn edge_count(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_simple(&self) -> bool {
        let mut seen = self.vertices.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }

    /// Checks the walk invariants: length, edges, cached weight, and simplicity in path mode.
    pub fn validate(&self, g: &Graph, mode: PathMode) -> Result<()> {
        if self.vertices.len() < 2 {
            return Err(Error::State("walk shorter than one edge".into()));
        }
        let weight = walk_weight(g, &self.vertices).map_err(|e| Error::State(e.to_string()))?;
        if weight != self.weight {
            return Err(Error::State(format!(
                "cached weight {} differs from edge sum {weight}",
                self.weight
            )));
        }
        if mode == PathMode::SimplePath && !self.is_simple() {
            return Err(Error::State(
                "walk repeats a vertex in simple-path mode".into(),
            ));
        }
        Ok(())
    }
}

pub(crate) fn walk_weight(g: &Graph, vertices: &[Vertex]) -> Result<Weight> {
    vertices.windows(2).try_fold(0 as Weight, |acc, e| {
        let w = g
            .weight(e[0], e[1])
            .ok_or_else(|| Error::param(format!("{} -> {} is not an edge", e[0], e[1])))?;
        Ok(acc + w)
    })
}
