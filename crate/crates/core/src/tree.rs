//! Single-root shortest-path trees over delay or cost.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::bitset::BitSet;
use crate::graph::{LinkId, Network, NodeId, Path};

pub const INF: u64 = u64::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Metric {
    Delay,
    Cost,
}

impl Metric {
    #[inline]
    fn primary(self, net: &Network, l: LinkId) -> u64 {
        match self {
            Metric::Delay => net.link(l).delay,
            Metric::Cost => net.link(l).cost,
        }
    }

    #[inline]
    fn secondary(self, net: &Network, l: LinkId) -> u64 {
        match self {
            Metric::Delay => net.link(l).cost,
            Metric::Cost => net.link(l).delay,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Distances from every node *to* the root.
    ToRoot,
    /// Distances *from* the root to every node.
    FromRoot,
}

/// Dijkstra tree keyed lexicographically on (metric, other metric), so the
/// min-cost tree breaks ties toward lower delay and vice versa.
#[derive(Clone, Debug)]
pub struct ShortestTree {
    root: NodeId,
    metric: Metric,
    direction: Direction,
    value: Vec<u64>,
    tie: Vec<u64>,
    /// Link toward the root (`ToRoot`) or from the parent (`FromRoot`).
    hop: Vec<Option<LinkId>>,
}

impl ShortestTree {
    pub fn root(&self) -> NodeId {
        self.root
    }

    /// The other metric summed along the tree path from `node`.
    #[inline]
    pub fn secondary(&self, node: NodeId) -> u64 {
        self.tie[node]
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Best metric value; [`INF`] when unreachable.
    #[inline]
    pub fn value(&self, node: NodeId) -> u64 {
        self.value[node]
    }

    pub fn values(&self) -> &[u64] {
        &self.value
    }

    pub fn reachable(&self, node: NodeId) -> bool {
        self.value[node] != INF
    }

    pub fn next_hop(&self, node: NodeId) -> Option<LinkId> {
        self.hop[node]
    }

    /// The tree path between `node` and the root, oriented source to
    /// destination. `None` when unreachable.
    pub fn path(&self, net: &Network, node: NodeId) -> Option<Path> {
        if !self.reachable(node) {
            return None;
        }
        let mut links = Vec::new();
        let mut cur = node;
        while let Some(l) = self.hop[cur] {
            links.push(l);
            cur = match self.direction {
                Direction::ToRoot => net.link(l).to,
                Direction::FromRoot => net.link(l).from,
            };
        }
        if self.direction == Direction::FromRoot {
            links.reverse();
        }
        Some(Path::from_chain(net, links))
    }
}

/// Dijkstra over the reverse graph: `value[u]` is the best `metric` over all
/// `u -> t` paths.
pub fn build_reverse_tree(net: &Network, t: NodeId, metric: Metric) -> ShortestTree {
    build_tree(net, t, metric, Direction::ToRoot, None)
}

/// Dijkstra from `s`: `value[v]` is the best `metric` over all `s -> v` paths.
pub fn build_forward_tree(net: &Network, s: NodeId, metric: Metric) -> ShortestTree {
    build_tree(net, s, metric, Direction::FromRoot, None)
}

/// General form; links in `disabled` are ignored.
pub fn build_tree(
    net: &Network,
    root: NodeId,
    metric: Metric,
    direction: Direction,
    disabled: Option<&BitSet>,
) -> ShortestTree {
    let n = net.node_count();
    let mut value = vec![INF; n];
    let mut tie = vec![INF; n];
    let mut hop = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    value[root] = 0;
    tie[root] = 0;
    heap.push(Reverse((0u64, 0u64, root)));
    while let Some(Reverse((v, w, u))) = heap.pop() {
        if done[u] || (v, w) != (value[u], tie[u]) {
            continue;
        }
        done[u] = true;
        let adjacent = match direction {
            Direction::ToRoot => net.ingress(u),
            Direction::FromRoot => net.egress(u),
        };
        for &l in adjacent {
            if disabled.is_some_and(|d| d.contains(l)) {
                continue;
            }
            let link = net.link(l);
            let other = match direction {
                Direction::ToRoot => link.from,
                Direction::FromRoot => link.to,
            };
            if done[other] {
                continue;
            }
            let cand = (v + metric.primary(net, l), w + metric.secondary(net, l));
            if cand < (value[other], tie[other]) {
                value[other] = cand.0;
                tie[other] = cand.1;
                hop[other] = Some(l);
                heap.push(Reverse((cand.0, cand.1, other)));
            }
        }
    }
    ShortestTree {
        root,
        metric,
        direction,
        value,
        tie,
        hop,
    }
}

/// Min-delay and min-cost trees toward one destination.
#[derive(Clone, Debug)]
pub struct DestTrees {
    pub delay: ShortestTree,
    pub cost: ShortestTree,
}

impl DestTrees {
    pub fn new(net: &Network, t: NodeId, disabled: Option<&BitSet>) -> Self {
        DestTrees {
            delay: build_tree(net, t, Metric::Delay, Direction::ToRoot, disabled),
            cost: build_tree(net, t, Metric::Cost, Direction::ToRoot, disabled),
        }
    }
}
