use crate::error::Result;
use crate::evo::{CrossoverKind, Individual, PathMode, Population};
use crate::graph::{Graph, Vertex};
use crate::rng::RngStream;

/// Generation-stamped vertex marks, reused across iterations.
#[derive(Debug, Clone)]
pub(crate) struct Marks {
    stamp: Vec<u32>,
    pos: Vec<u32>,
    generation: u32,
}

impl Marks {
    pub(crate) fn new(n: usize) -> Self {
        Marks {
            stamp: vec![0; n],
            pos: vec![0; n],
            generation: 0,
        }
    }

    #[inline]
    fn reset(&mut self) {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.fill(0);
            self.generation = 1;
        }
    }

    #[inline]
    fn mark(&mut self, v: Vertex, pos: usize) {
        self.stamp[v as usize] = self.generation;
        self.pos[v as usize] = pos as u32;
    }

    #[inline]
    fn get(&self, v: Vertex) -> Option<usize> {
        (self.stamp[v as usize] == self.generation).then(|| self.pos[v as usize] as usize)
    }

    fn all_distinct(&mut self, vertices: &[Vertex]) -> bool {
        self.reset();
        for (i, &v) in vertices.iter().enumerate() {
            if self.get(v).is_some() {
                return false;
            }
            self.mark(v, i);
        }
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Move {
    ExtendLeft,
    ExtendRight,
    ShrinkLeft,
    ShrinkRight,
}

/// Applies one elementary move in place; returns whether the walk changed.
///
/// The move is uniform among the applicable ones: extend-left needs an
/// in-neighbor of the first vertex, extend-right an out-neighbor of the last,
/// and both shrinks need at least two edges. The new neighbor is uniform over
/// all in/out-neighbors; in simple-path mode, picking a vertex already on the
/// walk leaves it unchanged.
pub fn elementary_mutation(
    ind: &mut Individual,
    g: &Graph,
    mode: PathMode,
    rng: &mut RngStream,
) -> bool {
    let first = ind.first();
    let last = ind.last();
    let mut moves = [Move::ExtendLeft; 4];
    let mut count = 0;
    if !g.in_neighbors(first).is_empty() {
        moves[count] = Move::ExtendLeft;
        count += 1;
    }
    if !g.out_neighbors(last).is_empty() {
        moves[count] = Move::ExtendRight;
        count += 1;
    }
    if ind.vertices.len() >= 3 {
        moves[count] = Move::ShrinkLeft;
        moves[count + 1] = Move::ShrinkRight;
        count += 2;
    }
    if count == 0 {
        return false;
    }
    match moves[rng.below(count as u64) as usize] {
        Move::ExtendLeft => {
            let nbrs = g.in_neighbors(first);
            let (u, w) = nbrs[rng.below(nbrs.len() as u64) as usize];
            if mode == PathMode::SimplePath && ind.vertices.contains(&u) {
                return false;
            }
            ind.vertices.insert(0, u);
            ind.weight += w;
        }
        Move::ExtendRight => {
            let nbrs = g.out_neighbors(last);
            let (v, w) = nbrs[rng.below(nbrs.len() as u64) as usize];
            if mode == PathMode::SimplePath && ind.vertices.contains(&v) {
                return false;
            }
            ind.vertices.push(v);
            ind.weight += w;
        }
        Move::ShrinkLeft => {
            let w = g
                .weight(ind.vertices[0], ind.vertices[1])
                .expect("walk edge present");
            ind.vertices.remove(0);
            ind.weight -= w;
        }
        Move::ShrinkRight => {
            let k = ind.vertices.len();
            let w = g
                .weight(ind.vertices[k - 2], ind.vertices[k - 1])
                .expect("walk edge present");
            ind.vertices.pop();
            ind.weight -= w;
        }
    }
    true
}

/// Draws `S ~ Pois(lambda)` and applies `S + 1` elementary moves in place.
/// Returns the number of moves attempted.
pub fn mutate_in_place(
    ind: &mut Individual,
    g: &Graph,
    mode: PathMode,
    lambda: f64,
    rng: &mut RngStream,
) -> u64 {
    mutate_with_p0(ind, g, mode, lambda, (-lambda).exp(), rng)
}

#[inline]
pub(crate) fn mutate_with_p0(
    ind: &mut Individual,
    g: &Graph,
    mode: PathMode,
    lambda: f64,
    p0: f64,
    rng: &mut RngStream,
) -> u64 {
    let moves = rng.poisson_with_p0(lambda, p0) + 1;
    for _ in 0..moves {
        elementary_mutation(ind, g, mode, rng);
    }
    moves
}

/// Mutated copy of `ind`; see [`mutate_in_place`].
pub fn mutate(
    ind: &Individual,
    g: &Graph,
    mode: PathMode,
    lambda: f64,
    rng: &mut RngStream,
) -> Individual {
    let mut out = ind.clone();
    mutate_in_place(&mut out, g, mode, lambda, rng);
    out
}

/// Crosses `a` with `b`. `None` means no offspring.
///
/// Plain concatenation (naive and matched kinds) requires `last(a) == first(b)`.
/// The trim kind splices `a` up to its first vertex `x` that also occurs in
/// `b` onto `b` after its last visit of `x`, falling back to concatenation if
/// that would leave a closed or empty walk. Offspring with equal endpoints,
/// or repeating a vertex in simple-path mode, are discarded.
pub fn crossover(
    a: &Individual,
    b: &Individual,
    kind: CrossoverKind,
    mode: PathMode,
    g: &Graph,
) -> Option<Individual> {
    let mut marks = Marks::new(g.vertex_count());
    let mut out = Individual {
        vertices: Vec::new(),
        weight: 0,
    };
    crossover_into(a, b, kind, mode, g, &mut marks, &mut out).then_some(out)
}

pub(crate) fn crossover_into(
    a: &Individual,
    b: &Individual,
    kind: CrossoverKind,
    mode: PathMode,
    g: &Graph,
    marks: &mut Marks,
    out: &mut Individual,
) -> bool {
    match kind {
        CrossoverKind::None => false,
        CrossoverKind::NaiveUniform | CrossoverKind::EndpointMatched => {
            concatenate_into(a, b, mode, marks, out)
        }
        CrossoverKind::EndpointMatchedTrim => {
            splice_into(a, b, mode, g, marks, out) || concatenate_into(a, b, mode, marks, out)
        }
    }
}

fn concatenate_into(
    a: &Individual,
    b: &Individual,
    mode: PathMode,
    marks: &mut Marks,
    out: &mut Individual,
) -> bool {
    if a.last() != b.first() || a.first() == b.last() {
        return false;
    }
    if mode == PathMode::SimplePath {
        marks.reset();
        for (i, &v) in a.vertices.iter().enumerate() {
            marks.mark(v, i);
        }
        if b.vertices[1..].iter().any(|&v| marks.get(v).is_some()) {
            return false;
        }
    }
    out.vertices.clear();
    out.vertices.extend_from_slice(&a.vertices);
    out.vertices.extend_from_slice(&b.vertices[1..]);
    out.weight = a.weight + b.weight;
    true
}

/// Splice at the first shared vertex; false if no valid splice exists.
fn splice_into(
    a: &Individual,
    b: &Individual,
    mode: PathMode,
    g: &Graph,
    marks: &mut Marks,
    out: &mut Individual,
) -> bool {
    marks.reset();
    // later positions overwrite earlier ones: pos = last visit
    for (j, &v) in b.vertices.iter().enumerate() {
        marks.mark(v, j);
    }
    let Some((i, j)) = a
        .vertices
        .iter()
        .enumerate()
        .find_map(|(i, &v)| marks.get(v).map(|j| (i, j)))
    else {
        return false;
    };
    let kept_a = &a.vertices[..=i];
    let kept_b = &b.vertices[j + 1..];
    if kept_a.len() + kept_b.len() < 2 || kept_a[0] == *kept_b.last().unwrap_or(&kept_a[i]) {
        return false;
    }
    let edge = |u: Vertex, v: Vertex| g.weight(u, v).expect("walk edge present");
    let dropped_a: u64 = a.vertices[i..].windows(2).map(|e| edge(e[0], e[1])).sum();
    let dropped_b: u64 = b.vertices[..=j].windows(2).map(|e| edge(e[0], e[1])).sum();

    out.vertices.clear();
    out.vertices.extend_from_slice(kept_a);
    out.vertices.extend_from_slice(kept_b);
    out.weight = (a.weight - dropped_a) + (b.weight - dropped_b);
    mode == PathMode::Walk || marks.all_distinct(&out.vertices)
}

/// Parents for one iteration. `second` is `None` for mutation, and for
/// matched crossover when no individual starts where `first` ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Parents<'a> {
    pub first: &'a Individual,
    pub second: Option<&'a Individual>,
}

/// Selects parents for the operator `kind` (`CrossoverKind::None` = mutation).
pub fn select_parents<'a>(
    pop: &'a Population,
    kind: CrossoverKind,
    rng: &mut RngStream,
) -> Result<Parents<'a>> {
    let first = pop.uniform_member(rng)?;
    let second = match kind {
        CrossoverKind::None => None,
        CrossoverKind::NaiveUniform => Some(pop.uniform_member(rng)?),
        CrossoverKind::EndpointMatched | CrossoverKind::EndpointMatchedTrim => {
            pop.uniform_starting_at(first.last(), rng)
        }
    };
    Ok(Parents { first, second })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::graph::{generate_complete_uniform, generate_hard_path, Edge};
    use proptest::prelude::*;

    fn walk(g: &Graph, v: &[Vertex]) -> Individual {
        Individual::from_vertices(g, v.to_vec()).unwrap()
    }

    fn three_sigma_uniform(counts: &[usize], draws: usize) {
        let k = counts.len() as f64;
        let p = 1.0 / k;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        for &c in counts {
            assert!(
                (c as f64 - draws as f64 * p).abs() <= 3.0 * sigma,
                "{counts:?}"
            );
        }
    }

    #[test]
    fn single_edge_only_extends() {
        // [0,1] in complete n=3: shrinks are inapplicable
        let g = generate_complete_uniform(3, 1, 9, 1).unwrap();
        let mut rng = RngStream::new(5, 0);
        let mut grew_left = 0;
        let mut grew_right = 0;
        for _ in 0..2000 {
            let mut ind = walk(&g, &[0, 1]);
            let changed = elementary_mutation(&mut ind, &g, PathMode::SimplePath, &mut rng);
            match ind.vertices() {
                [0, 1] => assert!(!changed),
                [2, 0, 1] => grew_left += 1,
                [0, 1, 2] => grew_right += 1,
                other => panic!("unexpected {other:?}"),
            }
            ind.validate(&g, PathMode::SimplePath).unwrap();
        }
        assert!(grew_left > 0 && grew_right > 0);
    }

    #[test]
    fn shrink_right_updates_weight() {
        let g = generate_hard_path(4, 4).unwrap();
        let full = walk(&g, &[0, 1, 2]);
        let mut rng = RngStream::new(1, 0);
        let mut seen = false;
        for _ in 0..200 {
            let mut ind = full.clone();
            elementary_mutation(&mut ind, &g, PathMode::Walk, &mut rng);
            if ind.vertices() == [0, 1] {
                assert_eq!(ind.weight(), full.weight() - g.weight(1, 2).unwrap());
                seen = true;
            }
        }
        assert!(seen);
    }

    #[test]
    fn isolated_walk_has_no_moves() {
        let g = Graph::new(
            2,
            vec![Edge {
                src: 0,
                dst: 1,
                weight: 3,
            }],
        )
        .unwrap();
        let mut ind = walk(&g, &[0, 1]);
        let mut rng = RngStream::new(0, 0);
        assert!(!elementary_mutation(&mut ind, &g, PathMode::Walk, &mut rng));
        assert_eq!(ind.vertices(), &[0, 1]);
    }

    #[test]
    fn move_distribution_uniform_over_applicable() {
        // Walk mode on a complete graph: every move is applicable and always changes the walk.
        let g = generate_complete_uniform(6, 1, 5, 2).unwrap();
        let start = walk(&g, &[1, 2, 3]);
        let mut rng = RngStream::new(77, 1);
        let draws = 10_000;
        let mut counts = [0usize; 4];
        for _ in 0..draws {
            let mut ind = start.clone();
            assert!(elementary_mutation(&mut ind, &g, PathMode::Walk, &mut rng));
            let v = ind.vertices();
            let cell = match v.len() {
                4 if v[1..] == [1, 2, 3] => 0,
                4 => 1,
                2 if v == [2, 3] => 2,
                2 => 3,
                _ => unreachable!(),
            };
            counts[cell] += 1;
        }
        three_sigma_uniform(&counts, draws);
    }

    #[test]
    fn zero_lambda_applies_exactly_one_move() {
        let g = generate_complete_uniform(5, 1, 5, 2).unwrap();
        let mut rng = RngStream::new(3, 3);
        for _ in 0..500 {
            let mut ind = walk(&g, &[0, 1, 2]);
            assert_eq!(
                mutate_in_place(&mut ind, &g, PathMode::Walk, 0.0, &mut rng),
                1
            );
            // exactly one move in walk mode on a complete graph changes length by one
            assert!(ind.vertices().len() == 2 || ind.vertices().len() == 4);
        }
    }

    #[test]
    fn mean_move_count_is_lambda_plus_one() {
        let g = generate_complete_uniform(5, 1, 5, 2).unwrap();
        let mut rng = RngStream::new(8, 0);
        let draws = 100_000;
        let base = walk(&g, &[0, 1]);
        let mut total = 0u64;
        let mut ind = base.clone();
        for _ in 0..draws {
            ind.clone_from(&base);
            total += mutate_in_place(&mut ind, &g, PathMode::SimplePath, 1.0, &mut rng);
        }
        // S + 1 has variance 1
        let mean = total as f64 / draws as f64;
        assert!((mean - 2.0).abs() <= 3.0 / (draws as f64).sqrt(), "{mean}");
    }

    #[test]
    fn concatenation_basic() {
        let g = generate_hard_path(4, 4).unwrap();
        let a = walk(&g, &[0, 1]);
        let b = walk(&g, &[1, 2]);
        let c = crossover(
            &a,
            &b,
            CrossoverKind::NaiveUniform,
            PathMode::SimplePath,
            &g,
        )
        .unwrap();
        assert_eq!(c.vertices(), &[0, 1, 2]);
        assert_eq!(c.weight(), 2);
        let d = walk(&g, &[2, 0]);
        assert!(crossover(
            &a,
            &d,
            CrossoverKind::NaiveUniform,
            PathMode::SimplePath,
            &g
        )
        .is_none());
        assert!(crossover(&a, &b, CrossoverKind::None, PathMode::SimplePath, &g).is_none());
    }

    #[test]
    fn concatenation_rejects_cycles_and_repeats() {
        let g = generate_complete_uniform(5, 1, 5, 4).unwrap();
        let a = walk(&g, &[0, 1]);
        let back = walk(&g, &[1, 0]);
        for mode in [PathMode::SimplePath, PathMode::Walk] {
            assert!(crossover(&a, &back, CrossoverKind::EndpointMatched, mode, &g).is_none());
        }
        let a = walk(&g, &[0, 1, 2]);
        let b = walk(&g, &[2, 1, 3]);
        assert!(crossover(
            &a,
            &b,
            CrossoverKind::EndpointMatched,
            PathMode::SimplePath,
            &g
        )
        .is_none());
        let w = crossover(&a, &b, CrossoverKind::EndpointMatched, PathMode::Walk, &g).unwrap();
        assert_eq!(w.vertices(), &[0, 1, 2, 1, 3]);
        w.validate(&g, PathMode::Walk).unwrap();
    }

    #[test]
    fn trim_splices_at_first_shared_vertex() {
        let g = generate_complete_uniform(6, 1, 9, 4).unwrap();
        let a = walk(&g, &[0, 1, 2, 3]);
        let b = walk(&g, &[3, 4, 1, 5]);
        let c = crossover(
            &a,
            &b,
            CrossoverKind::EndpointMatchedTrim,
            PathMode::SimplePath,
            &g,
        )
        .unwrap();
        assert_eq!(c.vertices(), &[0, 1, 5]);
        c.validate(&g, PathMode::SimplePath).unwrap();
        // plain matched concatenation repeats vertex 1
        assert!(crossover(
            &a,
            &b,
            CrossoverKind::EndpointMatched,
            PathMode::SimplePath,
            &g
        )
        .is_none());
    }

    #[test]
    fn trim_without_overlap_is_concatenation() {
        let g = generate_complete_uniform(6, 1, 9, 4).unwrap();
        let a = walk(&g, &[0, 1, 2]);
        let b = walk(&g, &[2, 3, 4]);
        let plain = crossover(
            &a,
            &b,
            CrossoverKind::EndpointMatched,
            PathMode::SimplePath,
            &g,
        );
        let trim = crossover(
            &a,
            &b,
            CrossoverKind::EndpointMatchedTrim,
            PathMode::SimplePath,
            &g,
        );
        assert_eq!(plain, trim);
        assert_eq!(trim.unwrap().weight(), a.weight() + b.weight());
    }

    #[test]
    fn trim_closed_result_is_rejected() {
        let g = generate_complete_uniform(6, 1, 9, 4).unwrap();
        let a = walk(&g, &[0, 1, 2]);
        let b = walk(&g, &[2, 3, 0]);
        assert!(crossover(
            &a,
            &b,
            CrossoverKind::EndpointMatchedTrim,
            PathMode::Walk,
            &g
        )
        .is_none());
    }

    #[test]
    fn select_parents_rules() {
        let g = Graph::new(
            2,
            vec![Edge {
                src: 0,
                dst: 1,
                weight: 3,
            }],
        )
        .unwrap();
        let pop = Population::init(&g);
        let mut rng = RngStream::new(0, 0);
        let p = select_parents(&pop, CrossoverKind::None, &mut rng).unwrap();
        assert_eq!(p.first.vertices(), &[0, 1]);
        assert!(p.second.is_none());
        // nothing starts at 1
        let p = select_parents(&pop, CrossoverKind::EndpointMatched, &mut rng).unwrap();
        assert!(p.second.is_none());
        let empty = Population::empty(3);
        assert!(matches!(
            select_parents(&empty, CrossoverKind::None, &mut rng),
            Err(Error::State(_))
        ));
    }

    #[test]
    fn matched_second_parent_starts_at_first_end() {
        let g = generate_complete_uniform(5, 1, 9, 8).unwrap();
        let pop = Population::init(&g);
        let mut rng = RngStream::new(4, 4);
        for _ in 0..2000 {
            let p = select_parents(&pop, CrossoverKind::EndpointMatchedTrim, &mut rng).unwrap();
            assert_eq!(p.second.unwrap().first(), p.first.last());
        }
    }

    #[test]
    fn uniform_parent_frequencies() {
        let g = generate_complete_uniform(3, 1, 9, 8).unwrap();
        let pop = Population::init(&g);
        assert_eq!(pop.len(), 6);
        let mut rng = RngStream::new(6, 6);
        let draws = 10_000;
        let mut counts = [0usize; 6];
        for _ in 0..draws {
            let (s, t) = select_parents(&pop, CrossoverKind::None, &mut rng)
                .unwrap()
                .first
                .endpoints();
            let cell = match (s, t) {
                (0, 1) => 0,
                (0, 2) => 1,
                (1, 0) => 2,
                (1, 2) => 3,
                (2, 0) => 4,
                (2, 1) => 5,
                _ => unreachable!(),
            };
            counts[cell] += 1;
        }
        three_sigma_uniform(&counts, draws);
    }

    fn random_simple_path(g: &Graph, len: usize, rng: &mut RngStream) -> Vec<Vertex> {
        let n = g.vertex_count() as u64;
        let mut v: Vec<Vertex> = Vec::new();
        while v.len() < len {
            let c = rng.below(n) as Vertex;
            if !v.contains(&c) {
                v.push(c);
            }
        }
        v
    }

    #[test]
    fn concatenation_additivity_corpus() {
        let g = generate_complete_uniform(12, 1, 100, 31).unwrap();
        let mut rng = RngStream::new(31, 7);
        for _ in 0..1000 {
            let total = 3 + rng.below(9) as usize;
            let whole = random_simple_path(&g, total, &mut rng);
            let cut = 1 + rng.below(total as u64 - 2) as usize;
            let a = walk(&g, &whole[..=cut]);
            let b = walk(&g, &whole[cut..]);
            for kind in [CrossoverKind::NaiveUniform, CrossoverKind::EndpointMatched] {
                let c = crossover(&a, &b, kind, PathMode::SimplePath, &g).unwrap();
                assert_eq!(c.weight(), a.weight() + b.weight());
                assert_eq!(c.vertices(), whole.as_slice());
            }
        }
    }

    proptest! {
        #[test]
        fn operators_preserve_walk_invariants(
            seed: u64,
            walk_mode: bool,
            kind in prop::sample::select(vec![
                CrossoverKind::NaiveUniform,
                CrossoverKind::EndpointMatched,
                CrossoverKind::EndpointMatchedTrim,
            ]),
        ) {
            let mode = if walk_mode { PathMode::Walk } else { PathMode::SimplePath };
            let g = generate_complete_uniform(7, 1, 20, seed).unwrap();
            let mut rng = RngStream::new(seed, 1);
            let mut pool: Vec<Individual> = Population::init(&g).iter().cloned().collect();
            for _ in 0..300 {
                let i = rng.below(pool.len() as u64) as usize;
                let child = if rng.coin(0.5) {
                    Some(mutate(&pool[i], &g, mode, 1.0, &mut rng))
                } else {
                    let j = rng.below(pool.len() as u64) as usize;
                    crossover(&pool[i], &pool[j], kind, mode, &g)
                };
                if let Some(c) = child {
                    prop_assert!(c.validate(&g, mode).is_ok(), "{:?}", c);
                    if c.first() != c.last() {
                        pool.push(c);
                    }
                }
            }
        }
    }
}
