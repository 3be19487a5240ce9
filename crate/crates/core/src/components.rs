//! Deterministic connected-component labeling.
//!
//! Union events are buffered and only applied by [`Components::finalize`].
//! The resulting partition is the transitive closure of the events, which is
//! independent of the order they were recorded in, so events may be collected
//! from parallel sweeps without affecting the outcome. Every component is
//! represented by its smallest member.

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default)]
pub struct Components<T> {
    events: Vec<Vec<T>>,
    parent: HashMap<T, usize>,
    nodes: Vec<T>,
    up: Vec<usize>,
    low: Vec<T>,
    frozen: bool,
}

impl<T: Copy + Ord + Hash> Components<T> {
    pub fn new() -> Self {
        Components {
            events: Vec::new(),
            parent: HashMap::new(),
            nodes: Vec::new(),
            up: Vec::new(),
            low: Vec::new(),
            frozen: false,
        }
    }

    /// Registers `x` as a member even if nothing is ever united with it.
    pub fn insert(&mut self, x: T) -> Result<()> {
        self.unite([x])
    }

    /// Buffers one union event covering all elements of `group`.
    pub fn unite(&mut self, group: impl IntoIterator<Item = T>) -> Result<()> {
        if self.frozen {
            return Err(Error::Finalized);
        }
        let group: Vec<T> = group.into_iter().collect();
        if !group.is_empty() {
            self.events.push(group);
        }
        Ok(())
    }

    /// Absorbs events collected elsewhere (e.g. from a parallel sweep).
    pub fn absorb(&mut self, events: Vec<Vec<T>>) -> Result<()> {
        if self.frozen {
            return Err(Error::Finalized);
        }
        self.events.extend(events);
        Ok(())
    }

    /// Applies all buffered events and freezes the structure.
    pub fn finalize(&mut self) {
        if self.frozen {
            return;
        }
        self.frozen = true;
        for event in std::mem::take(&mut self.events) {
            let mut first: Option<usize> = None;
            for x in event {
                let xi = self.index_of(x);
                match first {
                    None => first = Some(self.root(xi)),
                    Some(r) => first = Some(self.link(r, xi)),
                }
            }
        }
    }

    fn index_of(&mut self, x: T) -> usize {
        if let Some(&i) = self.parent.get(&x) {
            return i;
        }
        let i = self.nodes.len();
        self.parent.insert(x, i);
        self.nodes.push(x);
        self.up.push(i);
        self.low.push(x);
        i
    }

    fn root(&mut self, mut i: usize) -> usize {
        while self.up[i] != i {
            self.up[i] = self.up[self.up[i]];
            i = self.up[i];
        }
        i
    }

    fn link(&mut self, a: usize, b: usize) -> usize {
        let (ra, rb) = (self.root(a), self.root(b));
        if ra == rb {
            return ra;
        }
        let (keep, drop) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.up[drop] = keep;
        if self.low[drop] < self.low[keep] {
            self.low[keep] = self.low[drop];
        }
        keep
    }

    /// Smallest member of the component containing `x`, if `x` was ever seen.
    /// Only valid after [`Components::finalize`].
    pub fn find(&mut self, x: T) -> Option<T> {
        assert!(self.frozen, "find before finalize");
        let i = *self.parent.get(&x)?;
        let r = self.root(i);
        Some(self.low[r])
    }

    /// All components, keyed by smallest member, members sorted.
    pub fn groups(&mut self) -> BTreeMap<T, Vec<T>> {
        assert!(self.frozen, "groups before finalize");
        let mut out: BTreeMap<T, Vec<T>> = BTreeMap::new();
        for i in 0..self.nodes.len() {
            let r = self.root(i);
            let (rep, node) = (self.low[r], self.nodes[i]);
            out.entry(rep).or_default().push(node);
        }
        for members in out.values_mut() {
            members.sort_unstable();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    /// Quadratic reference: merge overlapping sets literally.
    fn naive(events: &[Vec<u32>]) -> BTreeMap<u32, Vec<u32>> {
        let mut sets: Vec<std::collections::BTreeSet<u32>> = Vec::new();
        for ev in events {
            let mut merged: std::collections::BTreeSet<u32> = ev.iter().copied().collect();
            let mut rest = Vec::new();
            for s in sets.drain(..) {
                if s.iter().any(|x| merged.contains(x)) {
                    merged.extend(s);
                } else {
                    rest.push(s);
                }
            }
            rest.push(merged);
            sets = rest;
        }
        sets.into_iter()
            .map(|s| {
                let v: Vec<u32> = s.into_iter().collect();
                (v[0], v)
            })
            .collect()
    }

    #[test]
    fn matches_naive_merging_on_random_event_streams() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for round in 0..8 {
            let universe = 1 + rng.gen_range(0..10_000u32);
            let n_events = rng.gen_range(1..400);
            let mut events = Vec::new();
            for _ in 0..n_events {
                let len = rng.gen_range(1..=4);
                let ev: Vec<u32> = (0..len).map(|_| rng.gen_range(0..universe)).collect();
                events.push(ev);
            }
            let mut c = Components::new();
            for ev in &events {
                c.unite(ev.iter().copied()).unwrap();
            }
            c.finalize();
            assert_eq!(c.groups(), naive(&events), "round {round}");
        }
    }

    #[test]
    fn partition_is_independent_of_event_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut events: Vec<Vec<u32>> = (0..2000)
            .map(|_| (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0..3000)).collect())
            .collect();
        let mut a = Components::new();
        a.absorb(events.clone()).unwrap();
        a.finalize();
        let before = a.groups();
        events.shuffle(&mut rng);
        let mut b = Components::new();
        b.absorb(events).unwrap();
        b.finalize();
        assert_eq!(before, b.groups());
    }

    #[test]
    fn representative_is_the_minimum_and_finds_resolve() {
        let mut c = Components::new();
        c.unite([7u32, 3]).unwrap();
        c.unite([3, 9]).unwrap();
        c.insert(20).unwrap();
        c.finalize();
        assert_eq!(c.find(9), Some(3));
        assert_eq!(c.find(20), Some(20));
        assert_eq!(c.find(99), None);
        let groups = c.groups();
        assert_eq!(groups[&3], vec![3, 7, 9]);
        assert_eq!(groups[&20], vec![20]);
    }

    #[test]
    fn uniting_after_finalize_is_an_error() {
        let mut c = Components::new();
        c.unite([1u32, 2]).unwrap();
        c.finalize();
        assert!(matches!(c.unite([2, 3]), Err(Error::Finalized)));
        assert!(matches!(c.absorb(vec![vec![4]]), Err(Error::Finalized)));
        c.finalize(); // idempotent
        assert_eq!(c.find(2), Some(1));
    }
}
