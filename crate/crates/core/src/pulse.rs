//! Depth-first branch-and-bound shared by Pulse+, AP-Pulse+ and the backup
//! search.
//!
//! The stack holds `(link, delay, cost, depth, share)` entries. Because the
//! stack is LIFO, every popped entry's parent is on the current root path, so
//! one visited bit set plus the current node sequence is enough to enforce
//! elementarity: popping an entry at depth `k` truncates the current path to
//! its first `k` nodes.

use crate::bitset::{words, BitSet};
use crate::graph::{LinkId, Network, NodeId, Path, SrlgId};
use crate::joint::CostFunction;
use crate::solution::{Deadline, SearchStats};
use crate::tree::{DestTrees, ShortestTree, INF};

/// Per-node egress link order used when expanding a branch.
#[derive(Clone, Debug)]
pub struct EgressOrder {
    offsets: Vec<usize>,
    links: Vec<LinkId>,
}

impl EgressOrder {
    /// Adjacency order (ascending link id).
    pub fn natural(net: &Network) -> Self {
        let mut offsets = Vec::with_capacity(net.node_count() + 1);
        let mut links = Vec::with_capacity(net.link_count());
        offsets.push(0);
        for u in 0..net.node_count() {
            links.extend_from_slice(net.egress(u));
            offsets.push(links.len());
        }
        EgressOrder { offsets, links }
    }

    #[inline]
    pub fn of(&self, node: NodeId) -> &[LinkId] {
        &self.links[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn to_lists(&self) -> Vec<Vec<LinkId>> {
        (0..self.offsets.len() - 1)
            .map(|u| self.of(u).to_vec())
            .collect()
    }
}

/// Largest-delay-first order: egress links sorted ascending by
/// `w(e) = d(e) + d_min(To(e) -> t)`, ties by link id, unreachable heads last.
/// Pushed in this order, the LIFO stack explores the largest `w` first.
pub fn ldf_order(net: &Network, delay_tree: &ShortestTree) -> EgressOrder {
    let mut order = EgressOrder::natural(net);
    for u in 0..net.node_count() {
        let (lo, hi) = (order.offsets[u], order.offsets[u + 1]);
        order.links[lo..hi].sort_by_key(|&l| {
            let link = net.link(l);
            (link.delay.saturating_add(delay_tree.value(link.to)), l)
        });
    }
    order
}

/// A Srlg-like set referenced by a sub-instance: either a real Srlg or the
/// singleton `{e}` for a link.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupRef {
    Srlg(SrlgId),
    Link(LinkId),
}

impl GroupRef {
    pub fn links<'a>(&'a self, net: &'a Network) -> &'a [LinkId] {
        match self {
            GroupRef::Srlg(s) => &net.srlg(*s).links,
            GroupRef::Link(l) => std::slice::from_ref(l),
        }
    }
}

/// Include / conflict constraints compiled to bit masks over the handful of
/// groups they mention.
#[derive(Clone, Debug, Default)]
pub(crate) struct GroupRules {
    words: usize,
    link_bits: Vec<Vec<u32>>,
    include: Vec<u64>,
    conflicts: Vec<Vec<u64>>,
}

impl GroupRules {
    pub fn new(net: &Network, include: &[GroupRef], conflicts: &[Vec<SrlgId>]) -> Self {
        let mut index: Vec<GroupRef> = include.to_vec();
        for t in conflicts {
            index.extend(t.iter().map(|&s| GroupRef::Srlg(s)));
        }
        index.sort_unstable();
        index.dedup();
        let words = index.len().div_ceil(64).max(1);
        let mut link_bits = vec![Vec::new(); net.link_count()];
        for (bit, g) in index.iter().enumerate() {
            for &l in g.links(net) {
                link_bits[l].push(bit as u32);
            }
        }
        let mask_of = |groups: &mut dyn Iterator<Item = GroupRef>| {
            let mut m = vec![0u64; words];
            for g in groups {
                let bit = index.binary_search(&g).expect("indexed group");
                words::set(&mut m, bit);
            }
            m
        };
        let include_mask = mask_of(&mut include.iter().copied());
        let conflict_masks = conflicts
            .iter()
            .map(|t| mask_of(&mut t.iter().map(|&s| GroupRef::Srlg(s))))
            .collect();
        GroupRules {
            words,
            link_bits,
            include: include_mask,
            conflicts: conflict_masks,
        }
    }

    #[inline]
    fn add_link(&self, mask: &mut [u64], link: LinkId) {
        for &b in &self.link_bits[link] {
            words::set(mask, b as usize);
        }
    }

    #[inline]
    fn hits_conflict(&self, mask: &[u64]) -> bool {
        self.conflicts.iter().any(|t| words::is_subset(t, mask))
    }

    #[inline]
    fn covers_include(&self, mask: &[u64]) -> bool {
        words::is_subset(&self.include, mask)
    }
}

pub(crate) struct Search<'a> {
    pub net: &'a Network,
    pub src: NodeId,
    pub dst: NodeId,
    pub lower: u64,
    pub upper: u64,
    pub disabled: Option<&'a BitSet>,
    pub trees: &'a DestTrees,
    pub order: &'a EgressOrder,
    pub cost_fn: Option<&'a CostFunction>,
    /// Initial incumbent; only strictly cheaper paths are accepted.
    pub bound: u64,
    /// Stop at the first valid path and never cut by cost.
    pub first_feasible: bool,
    pub rules: Option<&'a GroupRules>,
    pub deadline: Deadline,
    pub trace_interval: Option<u64>,
}

pub(crate) struct SearchOutcome {
    pub best: Option<Path>,
    pub stats: SearchStats,
    pub timed_out: bool,
}

#[derive(Clone, Copy)]
struct Entry {
    link: LinkId,
    delay: u64,
    cost: u64,
    depth: u32,
    share: f64,
}

const ROOT: LinkId = LinkId::MAX;
const DEADLINE_CHECK: u64 = 1024;

impl Search<'_> {
    pub fn run(&self) -> SearchOutcome {
        let net = self.net;
        let dmin = &self.trees.delay;
        let cmin = &self.trees.cost;
        let mut stats = SearchStats::default();
        let mut best: Option<Path> = None;
        let mut tmp_min = self.bound;
        let mut timed_out = false;

        let words = self.rules.map_or(0, |r| r.words);
        let mut mask_stack: Vec<u64> = Vec::new();
        let mut cur_mask = vec![0u64; words];

        let mut visited = BitSet::new(net.node_count());
        let mut path_nodes: Vec<NodeId> = Vec::new();
        let mut path_links: Vec<LinkId> = Vec::new();
        let mut stack = vec![Entry {
            link: ROOT,
            delay: 0,
            cost: 0,
            depth: 0,
            share: 1.0,
        }];

        while let Some(e) = stack.pop() {
            stats.iterations += 1;
            if stats.iterations % DEADLINE_CHECK == 0 && self.deadline.expired() {
                timed_out = true;
                break;
            }
            if let Some(every) = self.trace_interval {
                if stats.iterations % every == 0 {
                    stats.space_trace.push((stats.iterations, stats.searched_fraction));
                }
            }

            let depth = e.depth as usize;
            while path_nodes.len() > depth {
                visited.remove(path_nodes.pop().unwrap());
            }
            path_links.truncate(depth.saturating_sub(1));
            let u = if e.link == ROOT {
                self.src
            } else {
                net.link(e.link).to
            };
            if let Some(rules) = self.rules {
                if depth == 0 {
                    cur_mask.iter_mut().for_each(|w| *w = 0);
                } else {
                    let parent = &mask_stack[(depth - 1) * words..depth * words];
                    cur_mask.copy_from_slice(parent);
                    rules.add_link(&mut cur_mask, e.link);
                }
            }

            if u == self.dst {
                let in_range = self.lower <= e.delay && e.delay <= self.upper;
                let groups_ok = self
                    .rules
                    .is_none_or(|r| r.covers_include(&cur_mask) && !r.hits_conflict(&cur_mask));
                if in_range && groups_ok && e.cost < tmp_min {
                    tmp_min = e.cost;
                    let mut links = path_links.clone();
                    links.push(e.link);
                    best = Some(Path::from_chain(net, links));
                    stats.best_cost_trace.push((stats.iterations, e.cost));
                    if self.first_feasible {
                        stats.searched_fraction += e.share;
                        break;
                    }
                }
                stats.searched_fraction += e.share;
                continue;
            }

            if self.prune(u, e.delay, e.cost, tmp_min, dmin, cmin)
                || self.rules.is_some_and(|r| r.hits_conflict(&cur_mask))
            {
                stats.searched_fraction += e.share;
                continue;
            }

            path_nodes.push(u);
            visited.insert(u);
            if e.link != ROOT {
                path_links.push(e.link);
            }
            if words > 0 {
                mask_stack.truncate(depth * words);
                mask_stack.extend_from_slice(&cur_mask);
            }

            let children = self
                .order
                .of(u)
                .iter()
                .filter(|&&l| {
                    !self.disabled.is_some_and(|d| d.contains(l)) && !visited.contains(net.link(l).to)
                })
                .count();
            if children == 0 {
                stats.searched_fraction += e.share;
                continue;
            }
            let share = e.share / children as f64;
            for &l in self.order.of(u) {
                if self.disabled.is_some_and(|d| d.contains(l)) {
                    continue;
                }
                let link = net.link(l);
                if visited.contains(link.to) {
                    continue;
                }
                stack.push(Entry {
                    link: l,
                    delay: e.delay + link.delay,
                    cost: e.cost + link.cost,
                    depth: e.depth + 1,
                    share,
                });
            }
        }

        stats.elapsed = self.deadline.elapsed();
        SearchOutcome {
            best,
            stats,
            timed_out,
        }
    }

    #[inline]
    fn prune(
        &self,
        u: NodeId,
        delay: u64,
        cost: u64,
        tmp_min: u64,
        dmin: &ShortestTree,
        cmin: &ShortestTree,
    ) -> bool {
        let to_go = dmin.value(u);
        if to_go == INF || delay.saturating_add(to_go) > self.upper {
            return true;
        }
        if self.first_feasible {
            return false;
        }
        match self.cost_fn {
            Some(cf) => crate::joint::joint_prune(delay, cost, cf, u, self.upper, tmp_min),
            None => cost.saturating_add(cmin.value(u)) >= tmp_min,
        }
    }
}
