use crate::error::{Error, Result};
use crate::evo::{Individual, TieRule};
use crate::graph::{Graph, Vertex, Weight};
use crate::rng::RngStream;

/// At most one individual per ordered pair `(s, t)`, `s != t`.
///
/// Slots are a dense `n x n` array. Pairs are never removed, so the list of
/// occupied pairs and the per-start index only grow; both support O(1)
/// uniform sampling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Population {
    n: usize,
    slots: Vec<Option<Individual>>,
    occupied: Vec<usize>,
    by_start: Vec<Vec<Vertex>>,
}

/// Result of offering an offspring to its pair's slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReplaceOutcome {
    /// The slot was left as it was.
    Kept,
    /// The slot was empty and now holds the offspring.
    Inserted,
    /// The incumbent (of the given weight) was replaced.
    Replaced { previous: Weight },
}

impl ReplaceOutcome {
    pub fn changed(self) -> bool {
        self != ReplaceOutcome::Kept
    }
}

impl Population {
    pub fn empty(n: usize) -> Self {
        Population {
            n,
            slots: vec![None; n * n],
            occupied: Vec::new(),
            by_start: vec![Vec::new(); n],
        }
    }

    /// One single-edge individual per edge of `g`.
    pub fn init(g: &Graph) -> Self {
        let mut pop = Self::empty(g.vertex_count());
        for e in g.edges() {
            pop.insert_new(Individual::from_edge(e.src, e.dst, e.weight));
        }
        pop
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.occupied.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupied.is_empty()
    }

    pub fn get(&self, s: Vertex, t: Vertex) -> Option<&Individual> {
        if s as usize >= self.n || t as usize >= self.n {
            return None;
        }
        self.slots[s as usize * self.n + t as usize].as_ref()
    }

    /// Individuals in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = &Individual> + '_ {
        self.occupied
            .iter()
            .map(move |&i| self.slots[i].as_ref().expect("occupied slot"))
    }

    /// Number of individuals whose walk starts at `v`.
    pub fn starting_at_count(&self, v: Vertex) -> usize {
        self.by_start.get(v as usize).map_or(0, Vec::len)
    }

    #[inline]
    pub(crate) fn uniform_member(&self, rng: &mut RngStream) -> Result<&Individual> {
        if self.occupied.is_empty() {
            return Err(Error::State("population is empty".into()));
        }
        let i = self.occupied[rng.below(self.occupied.len() as u64) as usize];
        Ok(self.slots[i].as_ref().expect("occupied slot"))
    }

    #[inline]
    pub(crate) fn uniform_starting_at(
        &self,
        v: Vertex,
        rng: &mut RngStream,
    ) -> Option<&Individual> {
        let targets = &self.by_start[v as usize];
        if targets.is_empty() {
            return None;
        }
        let t = targets[rng.below(targets.len() as u64) as usize];
        self.slots[v as usize * self.n + t as usize].as_ref()
    }

    fn insert_new(&mut self, ind: Individual) {
        let (s, t) = ind.endpoints();
        let idx = s as usize * self.n + t as usize;
        debug_assert!(self.slots[idx].is_none());
        self.slots[idx] = Some(ind);
        self.occupied.push(idx);
        self.by_start[s as usize].push(t);
    }

    /// Overwrites the slot of `ind`'s endpoints, bypassing selection.
    pub fn force_set(&mut self, ind: Individual) -> Result<()> {
        let (s, t) = ind.endpoints();
        if s == t || s as usize >= self.n || t as usize >= self.n {
            return Err(Error::param(format!("invalid endpoint pair ({s}, {t})")));
        }
        let idx = s as usize * self.n + t as usize;
        match &mut self.slots[idx] {
            Some(slot) => *slot = ind,
            None => self.insert_new(ind),
        }
        Ok(())
    }
}

/// Offers `off` to the slot of its endpoints.
///
/// Inserted into an empty slot; otherwise replaces the incumbent iff it is
/// strictly lighter, or equally heavy under `ReplaceOnTie`. Replacing an
/// incumbent by an identical walk reports `Kept`. Offspring with equal
/// endpoints are ignored.
pub fn selection_replace(pop: &mut Population, off: &Individual, tie: TieRule) -> ReplaceOutcome {
    let (s, t) = off.endpoints();
    if s == t || s as usize >= pop.n || t as usize >= pop.n {
        return ReplaceOutcome::Kept;
    }
    let idx = s as usize * pop.n + t as usize;
    match &mut pop.slots[idx] {
        None => {
            pop.insert_new(off.clone());
            ReplaceOutcome::Inserted
        }
        Some(inc) => {
            let replace = off.weight < inc.weight
                || (off.weight == inc.weight
                    && tie == TieRule::ReplaceOnTie
                    && off.vertices != inc.vertices);
            if replace {
                let previous = inc.weight;
                inc.clone_from(off);
                ReplaceOutcome::Replaced { previous }
            } else {
                ReplaceOutcome::Kept
            }
        }
    }
}
