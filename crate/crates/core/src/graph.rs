//! Directed weighted graphs, instance generators, and the edge-list format.
//!
//! Edge-list documents look like
//!
//! ```text
//! # optional comment lines
//! 3 2
//! 0 1 5
//! 1 2 0.25
//! ```
//!
//! The first non-comment line is `n m`, followed by exactly `m` edge lines
//! `src dst weight`. Weights are positive integers or decimals. Decimals are
//! stored exactly as integers scaled by `10^d`, where `d` is the largest
//! number of fractional digits in the document.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::rng::RngStream;

pub type Vertex = u32;
/// Edge weight in units of `1 / Graph::scale()`.
pub type Weight = u64;

/// Upper bound on a stored edge weight. Keeps sums of up to 2^20 edges inside u64.
pub const MAX_EDGE_WEIGHT: Weight = 1 << 40;

const MAX_DECIMALS: u32 = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub src: Vertex,
    pub dst: Vertex,
    pub weight: Weight,
}

/// Simple directed graph with strictly positive weights.
///
/// Edges are kept sorted by `(src, dst)`; `out_adj` and `in_adj` are sorted
/// by neighbor id, so structural equality does not depend on input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    scale: u64,
    edges: Vec<Edge>,
    out_adj: Vec<Vec<(Vertex, Weight)>>,
    in_adj: Vec<Vec<(Vertex, Weight)>>,
}

impl Graph {
    /// Builds a graph with integer weights (`scale = 1`).
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        Self::with_scale(n, edges, 1)
    }

    /// Builds a graph whose weights are expressed in units of `1 / scale`.
    pub fn with_scale(n: usize, mut edges: Vec<Edge>, scale: u64) -> Result<Self> {
        if n > Vertex::MAX as usize {
            return Err(Error::param(format!("vertex count {n} too large")));
        }
        if scale == 0 {
            return Err(Error::param("weight scale must be positive"));
        }
        for e in &edges {
            check_edge(n, e)?;
        }
        edges.sort_unstable();
        if let Some(w) = edges
            .windows(2)
            .find(|w| (w[0].src, w[0].dst) == (w[1].src, w[1].dst))
        {
            return Err(Error::param(format!(
                "duplicate edge {} -> {}",
                w[0].src, w[0].dst
            )));
        }

        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for e in &edges {
            out_adj[e.src as usize].push((e.dst, e.weight));
            in_adj[e.dst as usize].push((e.src, e.weight));
        }
        // edges are sorted by (src, dst), so out lists are already ordered
        for list in &mut in_adj {
            list.sort_unstable();
        }
        Ok(Graph {
            n,
            // nothing to scale; keeps serialize/parse an identity
            scale: if edges.is_empty() { 1 } else { scale },
            edges,
            out_adj,
            in_adj,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Denominator of the stored weights.
    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[inline]
    pub fn out_neighbors(&self, v: Vertex) -> &[(Vertex, Weight)] {
        &self.out_adj[v as usize]
    }

    #[inline]
    pub fn in_neighbors(&self, v: Vertex) -> &[(Vertex, Weight)] {
        &self.in_adj[v as usize]
    }

    /// Weight of edge `u -> v`, if present.
    #[inline]
    pub fn weight(&self, u: Vertex, v: Vertex) -> Option<Weight> {
        let list = self.out_adj.get(u as usize)?;
        list.binary_search_by_key(&v, |&(d, _)| d)
            .ok()
            .map(|i| list[i].1)
    }

    /// Renders a weight (or weight sum) in graph units.
    pub fn format_weight(&self, w: Weight) -> String {
        format_scaled(w, self.scale)
    }
}

fn check_edge(n: usize, e: &Edge) -> Result<()> {
    if e.src as usize >= n || e.dst as usize >= n {
        return Err(Error::param(format!(
            "edge {} -> {} references a vertex outside 0..{n}",
            e.src, e.dst
        )));
    }
    if e.src == e.dst {
        return Err(Error::param(format!("self-loop at vertex {}", e.src)));
    }
    if e.weight == 0 {
        return Err(Error::param(format!(
            "edge {} -> {} has non-positive weight",
            e.src, e.dst
        )));
    }
    if e.weight > MAX_EDGE_WEIGHT {
        return Err(Error::param(format!(
            "edge {} -> {} weight exceeds {MAX_EDGE_WEIGHT}",
            e.src, e.dst
        )));
    }
    Ok(())
}

fn format_scaled(w: u64, scale: u64) -> String {
    if scale == 1 {
        return w.to_string();
    }
    let digits = scale.ilog10() as usize;
    format!("{}.{:0digits$}", w / scale, w % scale)
}

/// Complete directed graph on `n` vertices with i.i.d. uniform integer weights in `[w_min, w_max]`.
pub fn generate_complete_uniform(n: usize, w_min: u64, w_max: u64, seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::param(format!("need at least 2 vertices, got {n}")));
    }
    if w_min < 1 || w_min > w_max {
        return Err(Error::param(format!(
            "weight range [{w_min}, {w_max}] must satisfy 1 <= w_min <= w_max"
        )));
    }
    if w_max > MAX_EDGE_WEIGHT {
        return Err(Error::param(format!("w_max exceeds {MAX_EDGE_WEIGHT}")));
    }
    let mut rng = RngStream::new(seed, 0);
    let span = w_max - w_min + 1;
    let mut edges = Vec::with_capacity(n * (n - 1));
    for src in 0..n as Vertex {
        for dst in 0..n as Vertex {
            if src != dst {
                edges.push(Edge {
                    src,
                    dst,
                    weight: w_min + rng.below(span),
                });
            }
        }
    }
    Graph::new(n, edges)
}

/// Complete directed graph whose only cheap edges form the chain `0 -> 1 -> ... -> n-1`.
///
/// Chain edges weigh 1 and every other ordered pair weighs `heavy * n`, so for
/// `u < v` the unique shortest path walks the chain and has `v - u` edges.
pub fn generate_hard_path(n: usize, heavy: u64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::param(format!("need at least 2 vertices, got {n}")));
    }
    if heavy < n as u64 {
        return Err(Error::param(format!(
            "heavy multiplier {heavy} must be at least n = {n}"
        )));
    }
    let heavy_weight = heavy
        .checked_mul(n as u64)
        .filter(|&w| w <= MAX_EDGE_WEIGHT)
        .ok_or_else(|| Error::param("heavy * n exceeds the maximum edge weight"))?;
    let mut edges = Vec::with_capacity(n * (n - 1));
    for src in 0..n as Vertex {
        for dst in 0..n as Vertex {
            if src != dst {
                let weight = if dst == src + 1 { 1 } else { heavy_weight };
                edges.push(Edge { src, dst, weight });
            }
        }
    }
    Graph::new(n, edges)
}

/// Parses an edge-list document.
pub fn parse_graph(text: &str) -> Result<Graph> {
    struct RawEdge<'a> {
        line: usize,
        src: Vertex,
        dst: Vertex,
        int_part: &'a str,
        frac_part: &'a str,
    }

    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing header line \"n m\""))?;
    let mut fields = header.split_whitespace();
    let (n, m) = match (fields.next(), fields.next(), fields.next()) {
        (Some(a), Some(b), None) => (
            a.parse::<usize>()
                .map_err(|_| Error::parse(header_line, format!("bad vertex count {a:?}")))?,
            b.parse::<usize>()
                .map_err(|_| Error::parse(header_line, format!("bad edge count {b:?}")))?,
        ),
        _ => return Err(Error::parse(header_line, "header must be \"n m\"")),
    };
    if n > Vertex::MAX as usize {
        return Err(Error::parse(header_line, "vertex count too large"));
    }

    let mut raw = Vec::with_capacity(m.min(1 << 20));
    let mut decimals = 0u32;
    for (line, content) in lines {
        let parts: Vec<&str> = content.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(Error::parse(line, "edge line must be \"src dst weight\""));
        }
        let vertex = |s: &str| -> Result<Vertex> {
            let v: Vertex = s
                .parse()
                .map_err(|_| Error::parse(line, format!("bad vertex id {s:?}")))?;
            if v as usize >= n {
                return Err(Error::parse(line, format!("vertex {v} outside 0..{n}")));
            }
            Ok(v)
        };
        let src = vertex(parts[0])?;
        let dst = vertex(parts[1])?;
        if src == dst {
            return Err(Error::parse(line, format!("self-loop at vertex {src}")));
        }
        let (int_part, frac_part) = match parts[2].split_once('.') {
            Some((i, f)) => (i, f),
            None => (parts[2], ""),
        };
        let digits_ok = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
        if int_part.is_empty() && frac_part.is_empty()
            || !digits_ok(int_part)
            || !digits_ok(frac_part)
        {
            return Err(Error::parse(line, format!("bad weight {:?}", parts[2])));
        }
        let frac_trimmed = frac_part.trim_end_matches('0');
        if frac_part.len() as u32 > MAX_DECIMALS && frac_trimmed.len() as u32 > MAX_DECIMALS {
            return Err(Error::parse(
                line,
                format!(
                    "weight {:?} has more than {MAX_DECIMALS} decimals",
                    parts[2]
                ),
            ));
        }
        decimals = decimals.max(frac_part.len().min(MAX_DECIMALS as usize) as u32);
        if raw.len() == m {
            return Err(Error::parse(
                line,
                format!("more than the declared {m} edges"),
            ));
        }
        raw.push(RawEdge {
            line,
            src,
            dst,
            int_part,
            frac_part,
        });
    }
    if raw.len() != m {
        return Err(Error::parse(
            text.lines().count() + 1,
            format!("declared {m} edges but found {}", raw.len()),
        ));
    }

    let scale = 10u64.pow(decimals);
    let mut edges = Vec::with_capacity(m);
    let mut seen = std::collections::HashMap::with_capacity(m);
    for e in raw {
        let frac = &e.frac_part[..e.frac_part.len().min(decimals as usize)];
        let int: u64 = if e.int_part.is_empty() {
            0
        } else {
            e.int_part
                .parse()
                .map_err(|_| Error::parse(e.line, "weight too large"))?
        };
        let frac_val: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().unwrap_or(0)
        };
        let frac_scaled = frac_val * 10u64.pow(decimals - frac.len() as u32);
        let weight = int
            .checked_mul(scale)
            .and_then(|w| w.checked_add(frac_scaled))
            .filter(|&w| w <= MAX_EDGE_WEIGHT)
            .ok_or_else(|| Error::parse(e.line, "weight too large"))?;
        if weight == 0 {
            return Err(Error::parse(e.line, "weight must be positive"));
        }
        if let Some(first) = seen.insert((e.src, e.dst), e.line) {
            return Err(Error::parse(
                e.line,
                format!(
                    "duplicate edge {} -> {} (first on line {first})",
                    e.src, e.dst
                ),
            ));
        }
        edges.push(Edge {
            src: e.src,
            dst: e.dst,
            weight,
        });
    }
    Graph::with_scale(n, edges, scale).map_err(|e| Error::parse(header_line, e.to_string()))
}

/// Canonical edge-list text: header, then edges sorted by `(src, dst)`.
pub fn serialize_graph(g: &Graph) -> String {
    let mut out = String::with_capacity(16 + g.edge_count() * 12);
    writeln!(out, "{} {}", g.vertex_count(), g.edge_count()).unwrap();
    for e in g.edges() {
        writeln!(out, "{} {} {}", e.src, e.dst, g.format_weight(e.weight)).unwrap();
    }
    out
}
