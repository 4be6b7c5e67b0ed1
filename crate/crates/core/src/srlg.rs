//! Srlg-disjoint active/backup path pairs: backup search, conflict-set
//! discovery, AP-Pulse+ and the CoSE-Pulse+ divide-and-conquer solver.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::time::Duration;

use crate::bitset::BitSet;
use crate::drcr::DrcrError;
use crate::graph::{is_elementary, srlgs_of_path, LinkId, Network, NodeId, Path, SrlgId};
use crate::pulse::{ldf_order, GroupRef, GroupRules, Search, SearchOutcome};
use crate::solution::{Deadline, Verdict};
use crate::tree::{DestTrees, INF};

/// Find an active path of least cost with `d <= upper` plus an Srlg-disjoint
/// backup whose delay is within `delta` of the active delay and `<= upper`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SrlgDrcrQuery {
    pub src: NodeId,
    pub dst: NodeId,
    pub upper: u64,
    pub delta: u64,
}

impl SrlgDrcrQuery {
    pub fn new(src: NodeId, dst: NodeId, upper: u64, delta: u64) -> Self {
        SrlgDrcrQuery {
            src,
            dst,
            upper,
            delta,
        }
    }

    pub fn validate(&self, net: &Network) -> Result<(), DrcrError> {
        net.check_node(self.src)?;
        net.check_node(self.dst)?;
        if self.src == self.dst {
            return Err(DrcrError::InvalidQuery("src equals dst".into()));
        }
        Ok(())
    }

    /// Admissible backup delay window for an active path of delay `d`.
    pub fn backup_window(&self, d: u64) -> (u64, u64) {
        backup_window(d, self.upper, self.delta)
    }
}

fn backup_window(d: u64, upper: u64, delta: u64) -> (u64, u64) {
    (d.saturating_sub(delta), upper.min(d.saturating_add(delta)))
}

/// Groups an active path must touch (`include`) or avoid (`exclude`).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SubInstance {
    pub include: Vec<GroupRef>,
    pub exclude: Vec<GroupRef>,
}

impl SubInstance {
    fn normalized(mut self) -> Self {
        self.include.sort_unstable();
        self.include.dedup();
        self.exclude.sort_unstable();
        self.exclude.dedup();
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConflictSet {
    /// Sorted Srlg ids.
    pub srlgs: Vec<SrlgId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathPair {
    pub active: Path,
    pub backup: Path,
}

impl PathPair {
    /// Recomputes every pair constraint from the raw links.
    pub fn check(&self, net: &Network, q: &SrlgDrcrQuery) -> Result<(), String> {
        for (name, p) in [("active", &self.active), ("backup", &self.backup)] {
            let rebuilt = Path::new(net, p.links().to_vec()).map_err(|e| format!("{name}: {e}"))?;
            if rebuilt.delay() != p.delay() || rebuilt.cost() != p.cost() {
                return Err(format!("{name}: cached sums disagree with links"));
            }
            if p.source(net) != Some(q.src) || p.target(net) != Some(q.dst) {
                return Err(format!("{name}: wrong endpoints"));
            }
            if !is_elementary(net, p) {
                return Err(format!("{name}: repeats a node"));
            }
        }
        let a = srlgs_of_path(net, &self.active).map_err(|e| e.to_string())?;
        let b = srlgs_of_path(net, &self.backup).map_err(|e| e.to_string())?;
        if let Some(shared) = a.intersection(&b).next() {
            return Err(format!("paths share Srlg {shared}"));
        }
        let d = self.active.delay();
        if d > q.upper {
            return Err(format!("active delay {d} exceeds {}", q.upper));
        }
        let (lo, hi) = q.backup_window(d);
        let db = self.backup.delay();
        if db < lo || db > hi {
            return Err(format!("backup delay {db} outside [{lo}, {hi}]"));
        }
        Ok(())
    }
}

/// Srlg choice when a U-feasible path shares Srlgs with the active path.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PickStrategy {
    /// The shared Srlg with the most links, lowest id on ties.
    #[default]
    LargestGroup,
    /// The lowest shared Srlg on the first link of the path that has one.
    FirstHit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConflictOutcome {
    Found(ConflictSet),
    /// A U-feasible path Srlg-disjoint from the active path exists.
    DisjointExists(Path),
    Timeout,
}

fn links_of_srlgs(net: &Network, srlgs: &BTreeSet<SrlgId>) -> BitSet {
    let mut off = BitSet::new(net.link_count());
    for &s in srlgs {
        for &l in &net.srlg(s).links {
            off.insert(l);
        }
    }
    off
}

/// First feasible backup for `active`: Pulse+ on the network without the
/// links of any Srlg in `Ω(active)`, delay window
/// `[d - delta, min(U, d + delta)]`.
pub fn backup_search(net: &Network, active: &Path, upper: u64, delta: u64) -> Option<Path> {
    backup_search_within(net, active, upper, delta, Deadline::unlimited()).best
}

pub(crate) fn backup_search_within(
    net: &Network,
    active: &Path,
    upper: u64,
    delta: u64,
    deadline: Deadline,
) -> SearchOutcome {
    let (Some(src), Some(dst)) = (active.source(net), active.target(net)) else {
        return SearchOutcome {
            best: None,
            stats: Default::default(),
            timed_out: false,
        };
    };
    let omega = net.srlgs_of_links(active.links());
    let off = links_of_srlgs(net, &omega);
    let trees = DestTrees::new(net, dst, Some(&off));
    let order = ldf_order(net, &trees.delay);
    let (lower, upper) = backup_window(active.delay(), upper, delta);
    Search {
        net,
        src,
        dst,
        lower,
        upper,
        disabled: Some(&off),
        trees: &trees,
        order: &order,
        cost_fn: None,
        bound: INF,
        first_feasible: true,
        rules: None,
        deadline,
        trace_interval: None,
    }
    .run()
}

/// Conflict-Pulse+: depth-first search over U-feasible paths that disables
/// one shared Srlg each time it meets a path overlapping the active path.
pub fn find_conflict_set(
    net: &Network,
    q: &SrlgDrcrQuery,
    active: &Path,
    strategy: PickStrategy,
    time_limit: Option<Duration>,
) -> ConflictOutcome {
    conflict_pulse(net, q, active, strategy, Deadline::new(time_limit)).0
}

fn conflict_pulse(
    net: &Network,
    q: &SrlgDrcrQuery,
    active: &Path,
    strategy: PickStrategy,
    deadline: Deadline,
) -> (ConflictOutcome, u64) {
    let omega_a = net.srlgs_of_links(active.links());
    let trees = DestTrees::new(net, q.dst, None);
    let dmin = &trees.delay;
    let order = ldf_order(net, dmin);
    let mut disabled = BitSet::new(net.link_count());
    let mut picked: Vec<SrlgId> = Vec::new();

    let mut visited = BitSet::new(net.node_count());
    let mut path_nodes: Vec<NodeId> = Vec::new();
    let mut path_links: Vec<LinkId> = Vec::new();
    const ROOT: LinkId = LinkId::MAX;
    let mut stack: Vec<(LinkId, u64, usize)> = vec![(ROOT, 0, 0)];
    let mut iterations = 0u64;

    while let Some((link, delay, depth)) = stack.pop() {
        iterations += 1;
        if iterations.is_multiple_of(1024) && deadline.expired() {
            return (ConflictOutcome::Timeout, iterations);
        }
        while path_nodes.len() > depth {
            visited.remove(path_nodes.pop().unwrap());
        }
        path_links.truncate(depth.saturating_sub(1));
        if link != ROOT
            && (disabled.contains(link) || path_links.iter().any(|&l| disabled.contains(l)))
        {
            continue;
        }
        let u = if link == ROOT { q.src } else { net.link(link).to };

        if u == q.dst {
            if delay > q.upper {
                continue;
            }
            let mut links = path_links.clone();
            links.push(link);
            let shared: Vec<SrlgId> = net
                .srlgs_of_links(&links)
                .intersection(&omega_a)
                .copied()
                .collect();
            if shared.is_empty() {
                return (
                    ConflictOutcome::DisjointExists(Path::from_chain(net, links)),
                    iterations,
                );
            }
            let r = match strategy {
                PickStrategy::LargestGroup => *shared
                    .iter()
                    .max_by_key(|&&s| (net.srlg(s).links.len(), std::cmp::Reverse(s)))
                    .unwrap(),
                PickStrategy::FirstHit => links
                    .iter()
                    .find_map(|&l| {
                        net.link(l)
                            .srlgs
                            .iter()
                            .copied()
                            .filter(|s| omega_a.contains(s))
                            .min()
                    })
                    .unwrap(),
            };
            for &l in &net.srlg(r).links {
                disabled.insert(l);
            }
            picked.push(r);
            continue;
        }

        let to_go = dmin.value(u);
        if to_go == INF || delay + to_go > q.upper {
            continue;
        }
        path_nodes.push(u);
        visited.insert(u);
        if link != ROOT {
            path_links.push(link);
        }
        for &l in order.of(u) {
            if !disabled.contains(l) && !visited.contains(net.link(l).to) {
                stack.push((l, delay + net.link(l).delay, depth + 1));
            }
        }
    }
    picked.sort_unstable();
    (
        ConflictOutcome::Found(ConflictSet { srlgs: picked }),
        iterations,
    )
}

/// AP-Pulse+: least-cost path strictly cheaper than `bound` with
/// `d <= U`, touching every group of `inst.include`, avoiding every group of
/// `inst.exclude` and containing no conflict set.
pub fn ap_pulse_plus(
    net: &Network,
    q: &SrlgDrcrQuery,
    inst: &SubInstance,
    conflicts: &[ConflictSet],
    bound: u64,
) -> Option<Path> {
    ap_search(net, q, inst, conflicts, bound, Deadline::unlimited()).best
}

fn ap_search(
    net: &Network,
    q: &SrlgDrcrQuery,
    inst: &SubInstance,
    conflicts: &[ConflictSet],
    bound: u64,
    deadline: Deadline,
) -> SearchOutcome {
    let mut off = BitSet::new(net.link_count());
    for g in &inst.exclude {
        for &l in g.links(net) {
            off.insert(l);
        }
    }
    let trees = DestTrees::new(net, q.dst, Some(&off));
    let order = ldf_order(net, &trees.delay);
    let sets: Vec<Vec<SrlgId>> = conflicts.iter().map(|t| t.srlgs.clone()).collect();
    let rules = (!inst.include.is_empty() || !sets.is_empty())
        .then(|| GroupRules::new(net, &inst.include, &sets));
    Search {
        net,
        src: q.src,
        dst: q.dst,
        lower: 0,
        upper: q.upper,
        disabled: Some(&off),
        trees: &trees,
        order: &order,
        cost_fn: None,
        bound,
        first_feasible: false,
        rules: rules.as_ref(),
        deadline,
        trace_interval: None,
    }
    .run()
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CoseStats {
    /// Sub-instances popped from the queue.
    pub subinstances: u64,
    pub conflict_sets: Vec<ConflictSet>,
    /// Search iterations summed over every AP, backup and conflict search.
    pub iterations: u64,
    /// Children that repeated an already queued `(In, Ex)`; expected to be 0.
    pub duplicate_instances: u64,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct CoseOutcome {
    pub verdict: Verdict<PathPair>,
    pub stats: CoseStats,
}

#[derive(Clone, Debug, Default)]
pub struct CoseOptions {
    pub time_limit: Option<Duration>,
    pub strategy: PickStrategy,
}

pub fn cose_pulse_plus(
    net: &Network,
    q: &SrlgDrcrQuery,
    time_limit: Option<Duration>,
) -> Result<CoseOutcome, DrcrError> {
    cose_pulse_plus_with(
        net,
        q,
        &CoseOptions {
            time_limit,
            ..CoseOptions::default()
        },
    )
}

pub fn cose_pulse_plus_with(
    net: &Network,
    q: &SrlgDrcrQuery,
    opts: &CoseOptions,
) -> Result<CoseOutcome, DrcrError> {
    q.validate(net)?;
    let deadline = Deadline::new(opts.time_limit);
    let mut stats = CoseStats::default();
    let mut queue: VecDeque<SubInstance> = VecDeque::from([SubInstance::default()]);
    let mut seen: HashSet<SubInstance> = queue.iter().cloned().collect();
    let mut tmp_min = INF;
    let mut best: Option<PathPair> = None;
    let mut timed_out = false;

    'instances: while let Some(inst) = queue.pop_front() {
        if deadline.expired() {
            timed_out = true;
            break;
        }
        stats.subinstances += 1;
        let ap = ap_search(net, q, &inst, &stats.conflict_sets, tmp_min, deadline);
        stats.iterations += ap.stats.iterations;
        if ap.timed_out {
            timed_out = true;
            break;
        }
        let Some(active) = ap.best else { continue };

        let bk = backup_search_within(net, &active, q.upper, q.delta, deadline);
        stats.iterations += bk.stats.iterations;
        if bk.timed_out {
            timed_out = true;
            break;
        }
        if let Some(backup) = bk.best {
            tmp_min = active.cost();
            best = Some(PathPair { active, backup });
            continue;
        }

        let (outcome, iters) = conflict_pulse(net, q, &active, opts.strategy, deadline);
        stats.iterations += iters;
        let splits: Vec<GroupRef> = match outcome {
            ConflictOutcome::Timeout => {
                timed_out = true;
                break 'instances;
            }
            ConflictOutcome::Found(t) if !t.srlgs.is_empty() => {
                let r: Vec<GroupRef> = t
                    .srlgs
                    .iter()
                    .map(|&s| GroupRef::Srlg(s))
                    .filter(|g| !inst.include.contains(g))
                    .collect();
                stats.conflict_sets.push(t);
                r
            }
            _ => active
                .links()
                .iter()
                .map(|&l| GroupRef::Link(l))
                .filter(|g| !inst.include.contains(g))
                .collect(),
        };
        for n in 0..splits.len() {
            let mut include = inst.include.clone();
            include.extend_from_slice(&splits[..n]);
            let mut exclude = inst.exclude.clone();
            exclude.push(splits[n]);
            let child = SubInstance { include, exclude }.normalized();
            if seen.insert(child.clone()) {
                queue.push_back(child);
            } else {
                stats.duplicate_instances += 1;
            }
        }
    }

    stats.elapsed = deadline.elapsed();
    let verdict = if timed_out {
        Verdict::Timeout
    } else {
        match best {
            Some(pair) => Verdict::Optimal(pair),
            None => Verdict::Infeasible,
        }
    };
    Ok(CoseOutcome { verdict, stats })
}
