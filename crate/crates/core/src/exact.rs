//! Exact all-pairs oracles and the shortest-path edge-count diagnostics.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex, Weight};

/// Distance sentinel for unreachable pairs. Never produced by a real weight sum.
pub const INF: Weight = Weight::MAX;

#[inline]
fn sat_add(a: Weight, b: Weight) -> Weight {
    if a == INF || b == INF {
        INF
    } else {
        a.saturating_add(b).min(INF - 1)
    }
}

/// Exact shortest-path distances plus the minimal edge count among minimum-weight walks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistMatrix {
    n: usize,
    dist: Vec<Weight>,
    hops: Vec<u32>,
}

impl DistMatrix {
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Raw distance, `INF` when unreachable.
    #[inline]
    pub fn raw(&self, u: Vertex, v: Vertex) -> Weight {
        self.dist[u as usize * self.n + v as usize]
    }

    pub fn dist(&self, u: Vertex, v: Vertex) -> Option<Weight> {
        Some(self.raw(u, v)).filter(|&d| d != INF)
    }

    /// Minimal edge count among minimum-weight `u -> v` walks; `None` if unreachable.
    pub fn hops(&self, u: Vertex, v: Vertex) -> Option<u32> {
        let i = u as usize * self.n + v as usize;
        (self.dist[i] != INF).then_some(self.hops[i])
    }

    pub fn row(&self, u: Vertex) -> &[Weight] {
        let start = u as usize * self.n;
        &self.dist[start..start + self.n]
    }

    /// Number of ordered pairs `(u, v)`, `u != v`, at finite distance.
    pub fn reachable_pairs(&self) -> usize {
        (0..self.n)
            .flat_map(|u| (0..self.n).map(move |v| (u, v)))
            .filter(|&(u, v)| u != v && self.dist[u * self.n + v] != INF)
            .count()
    }
}

/// Floyd–Warshall relaxing on the lexicographic key `(weight, hops)`.
pub fn floyd_warshall(g: &Graph) -> DistMatrix {
    let n = g.vertex_count();
    let mut dist = vec![INF; n * n];
    let mut hops = vec![0u32; n * n];
    for v in 0..n {
        dist[v * n + v] = 0;
    }
    for e in g.edges() {
        let i = e.src as usize * n + e.dst as usize;
        dist[i] = e.weight;
        hops[i] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            let dik = dist[i * n + k];
            if dik == INF {
                continue;
            }
            let hik = hops[i * n + k];
            for j in 0..n {
                let dkj = dist[k * n + j];
                if dkj == INF {
                    continue;
                }
                let cand = (sat_add(dik, dkj), hik + hops[k * n + j]);
                let idx = i * n + j;
                if cand < (dist[idx], hops[idx]) {
                    dist[idx] = cand.0;
                    hops[idx] = cand.1;
                }
            }
        }
    }
    DistMatrix { n, dist, hops }
}

/// Single-source Dijkstra; returns one distance per vertex (`INF` when unreachable).
pub fn dijkstra_from(g: &Graph, source: Vertex) -> Result<Vec<Weight>> {
    Ok(dijkstra_with_hops(g, source)?
        .into_iter()
        .map(|(d, _)| d)
        .collect())
}

/// Dijkstra on the `(weight, hops)` key; hop entries are meaningless where the distance is `INF`.
pub fn dijkstra_with_hops(g: &Graph, source: Vertex) -> Result<Vec<(Weight, u32)>> {
    let n = g.vertex_count();
    if source as usize >= n {
        return Err(Error::param(format!("source {source} outside 0..{n}")));
    }
    let mut best = vec![(INF, 0u32); n];
    let mut heap = BinaryHeap::new();
    best[source as usize] = (0, 0);
    heap.push(Reverse((0, 0u32, source)));
    while let Some(Reverse((d, h, u))) = heap.pop() {
        if (d, h) > best[u as usize] {
            continue;
        }
        for &(v, w) in g.out_neighbors(u) {
            let cand = (sat_add(d, w), h + 1);
            if cand < best[v as usize] {
                best[v as usize] = cand;
                heap.push(Reverse((cand.0, cand.1, v)));
            }
        }
    }
    Ok(best)
}

/// Ordered pairs at finite distance, classified by shortest-path edge count.
///
/// `count(l)` is the number of pairs whose shortest paths need exactly `l`
/// edges; `at_most(l)` is the cumulative reading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeClassHistogram {
    // index 0 unused
    counts: Vec<u64>,
}

impl EdgeClassHistogram {
    pub fn count(&self, hops: usize) -> u64 {
        self.counts.get(hops).copied().unwrap_or(0)
    }

    pub fn at_most(&self, hops: usize) -> u64 {
        self.counts.iter().take(hops + 1).sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Largest possible class index (`n - 1`, or 0 for a single vertex).
    pub fn max_hops(&self) -> usize {
        self.counts.len().saturating_sub(1)
    }

    /// `(hops, count)` for every class `1..=n-1`, including empty ones.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().copied().enumerate().skip(1)
    }
}

pub fn pair_edge_classes(d: &DistMatrix) -> EdgeClassHistogram {
    let n = d.vertex_count();
    let mut counts = vec![0u64; n.max(1)];
    for u in 0..n as Vertex {
        for v in 0..n as Vertex {
            if u != v {
                if let Some(h) = d.hops(u, v) {
                    counts[h as usize] += 1;
                }
            }
        }
    }
    EdgeClassHistogram { counts }
}

#[cfg(test)]
pub(crate) mod oracle {
    //! Brute-force enumeration of simple paths, used only as a test oracle.
    use super::INF;
    use crate::graph::{Graph, Vertex, Weight};

    /// Minimum `(weight, edges)` over all simple paths from `s` to every vertex.
    pub fn brute_force_from(g: &Graph, s: Vertex) -> Vec<(Weight, u32)> {
        let n = g.vertex_count();
        let mut best = vec![(INF, 0u32); n];
        best[s as usize] = (0, 0);
        let mut on_path = vec![false; n];
        fn dfs(
            g: &Graph,
            u: Vertex,
            w: Weight,
            h: u32,
            on_path: &mut [bool],
            best: &mut [(Weight, u32)],
        ) {
            on_path[u as usize] = true;
            for &(v, ew) in g.out_neighbors(u) {
                if on_path[v as usize] {
                    continue;
                }
                let cand = (w + ew, h + 1);
                if cand < best[v as usize] {
                    best[v as usize] = cand;
                }
                dfs(g, v, cand.0, cand.1, on_path, best);
            }
            on_path[u as usize] = false;
        }
        dfs(g, s, 0, 0, &mut on_path, &mut best);
        best
    }
}

#[cfg(test)]
mod tests {
    use super::oracle::brute_force_from;
    use super::*;
    use crate::graph::{generate_complete_uniform, generate_hard_path, parse_graph, Edge};
    use proptest::prelude::*;

    fn triangle() -> Graph {
        parse_graph("3 3\n0 1 1\n1 2 1\n0 2 3\n").unwrap()
    }

    #[test]
    fn single_edge() {
        let g = Graph::new(
            2,
            vec![Edge {
                src: 0,
                dst: 1,
                weight: 5,
            }],
        )
        .unwrap();
        let d = floyd_warshall(&g);
        assert_eq!(d.dist(0, 1), Some(5));
        assert_eq!(d.hops(0, 1), Some(1));
        assert_eq!(d.dist(1, 0), None);
        assert_eq!(d.raw(1, 0), INF);
    }

    #[test]
    fn triangle_matches_brute_force() {
        let g = triangle();
        let brute = brute_force_from(&g, 0);
        assert_eq!(brute[2], (2, 2));
        let d = floyd_warshall(&g);
        assert_eq!((d.dist(0, 2), d.hops(0, 2)), (Some(2), Some(2)));
        assert_eq!(dijkstra_from(&g, 0).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn hard_path_five() {
        let g = generate_hard_path(5, 5).unwrap();
        assert_eq!(brute_force_from(&g, 0)[4], (4, 4));
        let d = floyd_warshall(&g);
        assert_eq!(d.dist(0, 4), Some(4));
        assert_eq!(d.hops(0, 4), Some(4));
    }

    #[test]
    fn hard_path_three_and_two() {
        let g = generate_hard_path(3, 3).unwrap();
        assert_eq!(brute_force_from(&g, 0)[2], (2, 2));
        assert_eq!(floyd_warshall(&g).dist(0, 2), Some(2));
        let g = generate_hard_path(2, 2).unwrap();
        assert_eq!(floyd_warshall(&g).dist(0, 1), Some(1));
    }

    #[test]
    fn hard_path_hops_are_index_gaps() {
        for n in [2usize, 6, 11] {
            let d = floyd_warshall(&generate_hard_path(n, n as u64).unwrap());
            for u in 0..n as Vertex {
                for v in u + 1..n as Vertex {
                    assert_eq!(d.hops(u, v), Some(v - u));
                    assert_eq!(d.dist(u, v), Some(u64::from(v - u)));
                }
            }
        }
    }

    #[test]
    fn sink_vertex_reaches_nothing() {
        let g = parse_graph("4 3\n0 1 2\n1 2 2\n0 3 1\n").unwrap();
        let row = dijkstra_from(&g, 3).unwrap();
        assert_eq!(row, vec![INF, INF, INF, 0]);
        assert!(dijkstra_from(&g, 4).is_err());
    }

    #[test]
    fn classes_complete_two() {
        let g = generate_complete_uniform(2, 1, 9, 1).unwrap();
        let h = pair_edge_classes(&floyd_warshall(&g));
        assert_eq!(h.iter().collect::<Vec<_>>(), vec![(1, 2)]);
    }

    #[test]
    fn classes_hard_path_four() {
        // Enumerate every pair with the brute-force oracle.
        let g = generate_hard_path(4, 4).unwrap();
        let mut expected = [0u64; 4];
        for s in 0..4 {
            for (t, &(w, h)) in brute_force_from(&g, s).iter().enumerate() {
                if t as Vertex != s && w != INF {
                    expected[h as usize] += 1;
                }
            }
        }
        assert_eq!(expected, [0, 9, 2, 1]);
        let h = pair_edge_classes(&floyd_warshall(&g));
        assert_eq!(h.count(1), 9);
        assert_eq!(h.count(2), 2);
        assert_eq!(h.count(3), 1);
        assert_eq!(h.at_most(2), 11);
        assert_eq!(h.total(), 12);
    }

    #[test]
    fn classes_partition_reachable_pairs() {
        let g = parse_graph("5 4\n0 1 1\n1 2 1\n2 3 1\n4 0 7\n").unwrap();
        let d = floyd_warshall(&g);
        let h = pair_edge_classes(&d);
        assert_eq!(h.total() as usize, d.reachable_pairs());
        assert_eq!(h.count(4), 1); // 4 -> 3
    }

    fn arb_sparse_graph() -> impl Strategy<Value = Graph> {
        (2usize..8).prop_flat_map(|n| {
            proptest::collection::vec((0..n as Vertex, 0..n as Vertex, 1u64..20), 0..n * 3)
                .prop_map(move |raw| {
                    let mut seen = std::collections::HashSet::new();
                    let edges = raw
                        .into_iter()
                        .filter(|&(u, v, _)| u != v && seen.insert((u, v)))
                        .map(|(src, dst, weight)| Edge { src, dst, weight })
                        .collect();
                    Graph::new(n, edges).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn floyd_matches_brute_force(g in arb_sparse_graph()) {
            let d = floyd_warshall(&g);
            for s in 0..g.vertex_count() as Vertex {
                let brute = brute_force_from(&g, s);
                for (t, &(w, h)) in brute.iter().enumerate() {
                    prop_assert_eq!(d.raw(s, t as Vertex), w);
                    if w != INF {
                        prop_assert_eq!(d.hops(s, t as Vertex), Some(h));
                    }
                }
                prop_assert_eq!(dijkstra_with_hops(&g, s).unwrap()
                    .into_iter().map(|(w, _)| w).collect::<Vec<_>>(),
                    brute.iter().map(|&(w, _)| w).collect::<Vec<_>>());
            }
        }

        #[test]
        fn dist_matrix_invariants(g in arb_sparse_graph()) {
            let d = floyd_warshall(&g);
            let n = g.vertex_count() as Vertex;
            for u in 0..n {
                prop_assert_eq!(d.dist(u, u), Some(0));
                prop_assert_eq!(d.hops(u, u), Some(0));
                for v in 0..n {
                    if u != v {
                        if let Some(h) = d.hops(u, v) {
                            prop_assert!(h >= 1 && h < n);
                        }
                    }
                    for w in 0..n {
                        prop_assert!(d.raw(u, w) <= sat_add(d.raw(u, v), d.raw(v, w)));
                    }
                }
            }
        }
    }
}
