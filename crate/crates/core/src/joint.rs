//! Per-node delay-budget cost functions for joint delay/cost pruning.
//!
//! `f_u(l)` lower-bounds the cost of finishing at the destination from `u`
//! with at most `l` delay left. It is built by a smallest-cost-first search
//! from the destination over the reverse graph that keeps only Pareto-optimal
//! `(delay, cost)` pairs per node. Walks may repeat nodes, which only makes
//! the bound looser, never unsafe.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::bitset::BitSet;
use crate::graph::{Network, NodeId};
use crate::tree::{build_tree, Direction, Metric, INF};

/// Pareto lists `Π_u`, delay ascending and cost strictly descending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostFunction {
    pairs: Vec<Vec<(u64, u64)>>,
}

impl CostFunction {
    pub fn pairs(&self, u: NodeId) -> &[(u64, u64)] {
        &self.pairs[u]
    }

    /// `f_u(l)`: least cost among pairs with delay `<= l`; [`INF`] if none.
    #[inline]
    pub fn eval(&self, u: NodeId, budget: u64) -> u64 {
        let list = &self.pairs[u];
        let fits = list.partition_point(|&(d, _)| d <= budget);
        if fits == 0 {
            INF
        } else {
            list[fits - 1].1
        }
    }

    pub fn total_pairs(&self) -> usize {
        self.pairs.iter().map(Vec::len).sum()
    }
}

/// Builds `Π_u` for every node for the query `(s, t, U)`.
pub fn compute_cost_functions(net: &Network, s: NodeId, t: NodeId, upper: u64) -> CostFunction {
    compute_cost_functions_masked(net, s, t, upper, None)
}

pub(crate) fn compute_cost_functions_masked(
    net: &Network,
    s: NodeId,
    t: NodeId,
    upper: u64,
    disabled: Option<&BitSet>,
) -> CostFunction {
    let n = net.node_count();
    // Feasibility cut uses min delays from the source.
    let from_src = build_tree(net, s, Metric::Delay, Direction::FromRoot, disabled);
    let mut pairs: Vec<Vec<(u64, u64)>> = vec![Vec::new(); n];
    // Popped in non-decreasing cost, so each accepted pair has strictly
    // smaller delay than the last one accepted at the same node.
    let dominated = |list: &[(u64, u64)], delay: u64| list.last().is_some_and(|&(d, _)| d <= delay);

    let mut heap = BinaryHeap::new();
    if from_src.value(t) <= upper {
        heap.push(Reverse((0u64, 0u64, t)));
    }
    while let Some(Reverse((cost, delay, u))) = heap.pop() {
        if dominated(&pairs[u], delay) {
            continue;
        }
        pairs[u].push((delay, cost));
        for &l in net.ingress(u) {
            if disabled.is_some_and(|d| d.contains(l)) {
                continue;
            }
            let link = net.link(l);
            let v = link.from;
            let reach = from_src.value(v);
            if reach == INF {
                continue;
            }
            let new_delay = delay + link.delay;
            if new_delay.saturating_add(reach) > upper || dominated(&pairs[v], new_delay) {
                continue;
            }
            heap.push(Reverse((cost + link.cost, new_delay, v)));
        }
    }
    for list in &mut pairs {
        list.reverse();
    }
    CostFunction { pairs }
}

pub fn eval_cost_function(cf: &CostFunction, u: NodeId, budget: u64) -> u64 {
    cf.eval(u, budget)
}

/// True iff the branch ending at `u` with accumulated `delay` and `cost`
/// cannot beat `tmp_min`: `cost + f_u(U - delay) >= tmp_min`.
pub fn joint_prune(
    delay: u64,
    cost: u64,
    cf: &CostFunction,
    u: NodeId,
    upper: u64,
    tmp_min: u64,
) -> bool {
    if delay > upper {
        return true;
    }
    let rest = cf.eval(u, upper - delay);
    rest == INF || cost.saturating_add(rest) >= tmp_min
}
