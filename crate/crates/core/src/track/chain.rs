//! Assembly of pairwise-linked detections into ordered chains.
//!
//! Detections are mesh elements; a link joins two of them through a shared
//! parent element. Under exact perturbed predicates every node has degree
//! ≤ 2, so components are simple paths or cycles. Nodes of higher degree
//! (possible with exact arithmetic disabled) split the component into
//! several chains, each of which duplicates the branch node, so output
//! stays polyline-representable.

use std::collections::HashMap;

use crate::components::Components;
use crate::error::Result;
use crate::handle::ElementHandle;

/// Two linked detections and the parent element that paired them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Link {
    pub a: ElementHandle,
    pub b: ElementHandle,
    pub via: ElementHandle,
}

impl Link {
    pub fn new(x: ElementHandle, y: ElementHandle, via: ElementHandle) -> Self {
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        Link { a, b, via }
    }
}

#[derive(Clone, Debug)]
pub struct Chain {
    /// Smallest detection handle in the connected component (shared by all
    /// chains split off one component).
    pub component: ElementHandle,
    pub nodes: Vec<ElementHandle>,
    pub closed: bool,
}

#[derive(Clone, Debug)]
pub struct ChainSet {
    pub chains: Vec<Chain>,
    /// Nodes with more than two incident links (0 under exact predicates).
    pub branch_nodes: u64,
}

/// Builds maximal chains from isolated detections and links. Deterministic:
/// the outcome depends only on the *sets* of nodes and links, never on
/// their order of arrival.
pub fn assemble(nodes: &[ElementHandle], mut links: Vec<Link>) -> Result<ChainSet> {
    links.sort_unstable();
    links.dedup();

    let mut uf: Components<ElementHandle> = Components::new();
    for &n in nodes {
        uf.insert(n)?;
    }
    for l in &links {
        uf.unite([l.a, l.b])?;
    }
    uf.finalize();

    // per-node incident link indices, visited in sorted-link order
    let mut incident: HashMap<ElementHandle, Vec<usize>> = HashMap::new();
    for (i, l) in links.iter().enumerate() {
        incident.entry(l.a).or_default().push(i);
        incident.entry(l.b).or_default().push(i);
    }
    let degree = |h: ElementHandle| incident.get(&h).map_or(0, |v| v.len());

    let mut used = vec![false; links.len()];
    let mut chains = Vec::new();
    let mut branch_nodes = 0u64;

    for (component, members) in uf.groups() {
        let mut emitted_any = false;
        for &m in &members {
            if degree(m) > 2 {
                branch_nodes += 1;
            }
        }
        // walk open chains from every node that cannot be a chain interior
        for &start in &members {
            if degree(start) == 2 {
                continue;
            }
            for &first in incident.get(&start).into_iter().flatten() {
                if used[first] {
                    continue;
                }
                chains.push(Chain {
                    component,
                    nodes: walk(start, first, &links, &incident, &mut used),
                    closed: false,
                });
                emitted_any = true;
            }
            if degree(start) == 0 {
                chains.push(Chain { component, nodes: vec![start], closed: false });
                emitted_any = true;
            }
        }
        // whatever remains in this component is a pure cycle
        for &m in &members {
            for &first in incident.get(&m).into_iter().flatten() {
                if used[first] {
                    continue;
                }
                let mut nodes = walk(m, first, &links, &incident, &mut used);
                debug_assert_eq!(nodes.first(), nodes.last());
                nodes.pop();
                chains.push(Chain { component, nodes, closed: true });
                emitted_any = true;
            }
        }
        debug_assert!(emitted_any || members.is_empty());
    }

    for chain in &mut chains {
        canonicalize(chain);
    }
    chains.sort_by(|x, y| {
        (x.component, &x.nodes).cmp(&(y.component, &y.nodes))
    });
    Ok(ChainSet { chains, branch_nodes })
}

/// Follows links from `start` through degree-2 nodes until a chain end (or
/// back to `start` for cycles). Returns the node sequence including both
/// ends; cycle walks return first == last.
fn walk(
    start: ElementHandle,
    first: usize,
    links: &[Link],
    incident: &HashMap<ElementHandle, Vec<usize>>,
    used: &mut [bool],
) -> Vec<ElementHandle> {
    let other = |i: usize, at: ElementHandle| if links[i].a == at { links[i].b } else { links[i].a };
    let mut nodes = vec![start];
    let mut at = start;
    let mut link = first;
    loop {
        used[link] = true;
        at = other(link, at);
        nodes.push(at);
        if at == start {
            return nodes; // cycle closed
        }
        let inc = &incident[&at];
        if inc.len() != 2 {
            return nodes; // endpoint or branch node
        }
        let next = if inc[0] == link { inc[1] } else { inc[0] };
        if used[next] {
            return nodes;
        }
        link = next;
    }
}

/// Fixes a deterministic orientation (and, for cycles, starting point).
fn canonicalize(chain: &mut Chain) {
    let n = chain.nodes.len();
    if n < 2 {
        return;
    }
    if chain.closed {
        let min_pos = (0..n).min_by_key(|&i| chain.nodes[i]).unwrap();
        chain.nodes.rotate_left(min_pos);
        if n >= 3 && chain.nodes[n - 1] < chain.nodes[1] {
            chain.nodes[1..].reverse();
        }
    } else if chain.nodes[n - 1] < chain.nodes[0] {
        chain.nodes.reverse();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(i: u64) -> ElementHandle {
        ElementHandle::lattice(2, [i as i32, 0, 0], 0, 0)
    }
    fn via(i: u64) -> ElementHandle {
        ElementHandle::lattice(3, [i as i32, 0, 0], 0, 0)
    }

    #[test]
    fn open_path_is_oriented_from_its_smaller_end() {
        let nodes: Vec<_> = (0..5).map(h).collect();
        let links = vec![
            Link::new(h(3), h(4), via(0)),
            Link::new(h(1), h(0), via(1)),
            Link::new(h(2), h(1), via(2)),
            Link::new(h(2), h(3), via(3)),
        ];
        let set = assemble(&nodes, links).unwrap();
        assert_eq!(set.chains.len(), 1);
        assert_eq!(set.branch_nodes, 0);
        let c = &set.chains[0];
        assert_eq!(c.nodes, (0..5).map(h).collect::<Vec<_>>());
        assert!(!c.closed);
        assert_eq!(c.component, h(0));
    }

    #[test]
    fn cycle_is_detected_and_rotated_to_its_minimum() {
        let nodes: Vec<_> = (10..14).map(h).collect();
        let links = vec![
            Link::new(h(12), h(13), via(0)),
            Link::new(h(10), h(11), via(1)),
            Link::new(h(13), h(10), via(2)),
            Link::new(h(11), h(12), via(3)),
        ];
        let set = assemble(&nodes, links).unwrap();
        assert_eq!(set.chains.len(), 1);
        let c = &set.chains[0];
        assert!(c.closed);
        assert_eq!(c.nodes, vec![h(10), h(11), h(12), h(13)]);
    }

    #[test]
    fn two_node_cycle_through_distinct_parents() {
        let nodes = vec![h(1), h(2)];
        let links = vec![Link::new(h(1), h(2), via(0)), Link::new(h(2), h(1), via(1))];
        let set = assemble(&nodes, links).unwrap();
        assert_eq!(set.chains.len(), 1);
        assert!(set.chains[0].closed);
        assert_eq!(set.chains[0].nodes, vec![h(1), h(2)]);
    }

    #[test]
    fn branch_node_splits_into_three_chains_all_containing_it() {
        // star: center 5, arms 1-2-5, 3-5, 4-5
        let nodes = vec![h(1), h(2), h(3), h(4), h(5)];
        let links = vec![
            Link::new(h(1), h(2), via(0)),
            Link::new(h(2), h(5), via(1)),
            Link::new(h(3), h(5), via(2)),
            Link::new(h(4), h(5), via(3)),
        ];
        let set = assemble(&nodes, links).unwrap();
        assert_eq!(set.branch_nodes, 1);
        assert_eq!(set.chains.len(), 3);
        for c in &set.chains {
            assert!(c.nodes.contains(&h(5)), "{:?}", c.nodes);
            assert_eq!(c.component, h(1));
            assert!(!c.closed);
        }
        let lens: Vec<usize> = set.chains.iter().map(|c| c.nodes.len()).collect();
        assert_eq!(lens.iter().sum::<usize>(), 3 + 2 + 2);
    }

    #[test]
    fn singletons_and_order_independence() {
        let nodes = vec![h(7), h(3), h(9)];
        let set = assemble(&nodes, vec![]).unwrap();
        assert_eq!(set.chains.len(), 3);
        assert_eq!(set.chains[0].nodes, vec![h(3)]);
        assert!(!set.chains[0].closed);

        let nodes: Vec<_> = (0..40).map(h).collect();
        let mut links: Vec<Link> =
            (0..39).map(|i| Link::new(h(i), h(i + 1), via(i))).collect();
        let forward = assemble(&nodes, links.clone()).unwrap();
        links.reverse();
        links.swap(0, 20);
        let shuffled = assemble(&nodes, links).unwrap();
        assert_eq!(forward.chains.len(), 1);
        assert_eq!(forward.chains[0].nodes, shuffled.chains[0].nodes);
    }
}
