//! K-shortest-path baselines: Yen's algorithm under cost, delay or Lagrangian
//! weights, and the DRCR / Srlg-disjoint DRCR solvers built on it.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt::Debug;
use std::ops::Add;
use std::time::Duration;

use thiserror::Error;

use crate::bitset::BitSet;
use crate::drcr::{classify_case, DrcrCase, DrcrError, DrcrQuery};
use crate::graph::{LinkId, Network, NodeId, Path};
use crate::solution::{Deadline, Verdict};
use crate::srlg::{backup_search_within, PathPair, SrlgDrcrQuery};

#[derive(Debug, Error, PartialEq)]
pub enum KspError {
    #[error("link {link} has negative weight {weight}")]
    NegativeWeight { link: LinkId, weight: f64 },
    #[error(transparent)]
    Query(#[from] DrcrError),
}

/// Link weight used to order paths.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightFn {
    Cost,
    Delay,
    /// `c(e) + lambda * d(e)`.
    Lagrangian(f64),
}

pub trait Weight: Copy + PartialOrd + Add<Output = Self> + Debug {
    const ZERO: Self;
    const INFINITE: Self;
    fn order(&self, other: &Self) -> Ordering;
}

impl Weight for u64 {
    const ZERO: Self = 0;
    const INFINITE: Self = u64::MAX;
    fn order(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
}

impl Weight for f64 {
    const ZERO: Self = 0.0;
    const INFINITE: Self = f64::INFINITY;
    fn order(&self, other: &Self) -> Ordering {
        self.total_cmp(other)
    }
}

#[derive(Clone, Copy, Debug)]
struct Key<W>(W);

impl<W: Weight> PartialEq for Key<W> {
    fn eq(&self, other: &Self) -> bool {
        self.0.order(&other.0) == Ordering::Equal
    }
}
impl<W: Weight> Eq for Key<W> {}
impl<W: Weight> PartialOrd for Key<W> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<W: Weight> Ord for Key<W> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.order(&other.0)
    }
}

/// Lagrangian link weights. Values within rounding error below zero are
/// clamped to zero; anything more negative is rejected.
pub fn lagrangian_weights(net: &Network, lambda: f64) -> Result<Vec<f64>, KspError> {
    net.links()
        .iter()
        .enumerate()
        .map(|(id, l)| {
            let w = l.cost as f64 + lambda * l.delay as f64;
            let slack = 1e-9 * (1.0 + l.cost as f64 + (lambda * l.delay as f64).abs());
            if w >= 0.0 {
                Ok(w)
            } else if w > -slack {
                Ok(0.0)
            } else {
                Err(KspError::NegativeWeight {
                    link: id,
                    weight: w,
                })
            }
        })
        .collect()
}

/// Distances to `t` over the reverse graph plus the next hop toward `t`.
fn reverse_dijkstra<W: Weight>(net: &Network, t: NodeId, w: &[W]) -> (Vec<W>, Vec<Option<LinkId>>) {
    let n = net.node_count();
    let mut dist = vec![W::INFINITE; n];
    let mut next = vec![None; n];
    let mut heap = BinaryHeap::new();
    dist[t] = W::ZERO;
    heap.push(Reverse((Key(W::ZERO), t)));
    while let Some(Reverse((Key(d), u))) = heap.pop() {
        if d.order(&dist[u]) == Ordering::Greater {
            continue;
        }
        for &l in net.ingress(u) {
            let v = net.link(l).from;
            let nd = d + w[l];
            if nd.order(&dist[v]) == Ordering::Less {
                dist[v] = nd;
                next[v] = Some(l);
                heap.push(Reverse((Key(nd), v)));
            }
        }
    }
    (dist, next)
}

#[derive(Clone, Debug)]
struct Candidate<W> {
    weight: W,
    links: Vec<LinkId>,
}

impl<W: Weight> PartialEq for Candidate<W> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<W: Weight> Eq for Candidate<W> {}
impl<W: Weight> PartialOrd for Candidate<W> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<W: Weight> Ord for Candidate<W> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight
            .order(&other.weight)
            .then(self.links.len().cmp(&other.links.len()))
            .then_with(|| self.links.cmp(&other.links))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Timeout;

/// Accepted paths as a prefix tree: the links leaving a trie node are the
/// links Yen must remove when spurring from that shared root.
#[derive(Default)]
struct PrefixTrie {
    children: Vec<Vec<(LinkId, u32)>>,
    terminal: Vec<bool>,
}

impl PrefixTrie {
    fn new() -> Self {
        PrefixTrie {
            children: vec![Vec::new()],
            terminal: vec![false],
        }
    }

    fn child(&self, node: u32, link: LinkId) -> Option<u32> {
        self.children[node as usize]
            .iter()
            .find(|&&(l, _)| l == link)
            .map(|&(_, c)| c)
    }

    /// Returns false if the path was already present.
    fn insert(&mut self, links: &[LinkId]) -> bool {
        let mut node = 0u32;
        for &l in links {
            node = match self.child(node, l) {
                Some(c) => c,
                None => {
                    let c = self.children.len() as u32;
                    self.children.push(Vec::new());
                    self.terminal.push(false);
                    self.children[node as usize].push((l, c));
                    c
                }
            };
        }
        !std::mem::replace(&mut self.terminal[node as usize], true)
    }

    fn contains(&self, links: &[LinkId]) -> bool {
        let mut node = 0u32;
        for &l in links {
            match self.child(node, l) {
                Some(c) => node = c,
                None => return false,
            }
        }
        self.terminal[node as usize]
    }
}

/// Yen's loopless k-shortest paths. Spur paths are found by A* guided by
/// the unrestricted distances to the destination. Duplicate candidates are
/// dropped lazily when popped.
pub struct Yen<'a, W: Weight> {
    net: &'a Network,
    src: NodeId,
    dst: NodeId,
    weights: Vec<W>,
    to_dst: Vec<W>,
    next_hop: Vec<Option<LinkId>>,
    accepted: PrefixTrie,
    emitted: usize,
    last: Option<Vec<LinkId>>,
    candidates: BinaryHeap<Reverse<Candidate<W>>>,
    started: bool,
    // A* scratch, reset through `touched` after each spur.
    g: Vec<W>,
    pred: Vec<Option<LinkId>>,
    touched: Vec<NodeId>,
}

impl<'a, W: Weight> Yen<'a, W> {
    pub fn new(net: &'a Network, src: NodeId, dst: NodeId, weights: Vec<W>) -> Self {
        let (to_dst, next_hop) = reverse_dijkstra(net, dst, &weights);
        let n = net.node_count();
        Yen {
            net,
            src,
            dst,
            weights,
            to_dst,
            next_hop,
            accepted: PrefixTrie::new(),
            emitted: 0,
            last: None,
            candidates: BinaryHeap::new(),
            started: false,
            g: vec![W::INFINITE; n],
            pred: vec![None; n],
            touched: Vec::new(),
        }
    }

    pub fn weight_of(&self, links: &[LinkId]) -> W {
        links.iter().fold(W::ZERO, |acc, &l| acc + self.weights[l])
    }

    /// Number of paths emitted so far.
    pub fn emitted(&self) -> usize {
        self.emitted
    }

    pub fn next_within(&mut self, deadline: &Deadline) -> Result<Option<Path>, Timeout> {
        if !self.started {
            self.started = true;
            if self.src == self.dst || self.next_hop[self.src].is_none() {
                return Ok(None);
            }
            let mut links = Vec::new();
            let mut u = self.src;
            while u != self.dst {
                let l = self.next_hop[u].expect("tree reaches destination");
                links.push(l);
                u = self.net.link(l).to;
            }
            return Ok(Some(self.accept(links)));
        }
        let Some(prev) = self.last.take() else {
            return Ok(None);
        };
        let mut removed = BitSet::new(self.net.link_count());
        let mut blocked = BitSet::new(self.net.node_count());
        let mut trie_node = 0u32;
        let mut spur_node = self.src;
        for i in 0..prev.len() {
            if deadline.expired() {
                self.last = Some(prev);
                return Err(Timeout);
            }
            let children = &self.accepted.children[trie_node as usize];
            for &(l, _) in children {
                removed.insert(l);
            }
            if let Some(spur) = self.spur_path(spur_node, &removed, &blocked) {
                let mut links = prev[..i].to_vec();
                links.extend(spur);
                let weight = self.weight_of(&links);
                self.candidates.push(Reverse(Candidate { weight, links }));
            }
            for &(l, _) in &self.accepted.children[trie_node as usize] {
                removed.remove(l);
            }
            blocked.insert(spur_node);
            trie_node = self.accepted.child(trie_node, prev[i]).expect("previous path is in the trie");
            spur_node = self.net.link(prev[i]).to;
        }
        while let Some(Reverse(c)) = self.candidates.pop() {
            if !self.accepted.contains(&c.links) {
                return Ok(Some(self.accept(c.links)));
            }
        }
        Ok(None)
    }

    fn accept(&mut self, links: Vec<LinkId>) -> Path {
        self.accepted.insert(&links);
        self.emitted += 1;
        self.last = Some(links.clone());
        Path::from_chain(self.net, links)
    }

    fn spur_path(&mut self, from: NodeId, removed: &BitSet, blocked: &BitSet) -> Option<Vec<LinkId>> {
        let net = self.net;
        let mut heap = BinaryHeap::new();
        self.g[from] = W::ZERO;
        self.touched.push(from);
        heap.push(Reverse((Key(self.to_dst[from]), from)));
        while let Some(Reverse((Key(f), u))) = heap.pop() {
            if u == self.dst {
                break;
            }
            if f.order(&(self.g[u] + self.to_dst[u])) == Ordering::Greater {
                continue;
            }
            for &l in net.egress(u) {
                let v = net.link(l).to;
                if removed.contains(l) || blocked.contains(v) || self.to_dst[v].order(&W::INFINITE) == Ordering::Equal {
                    continue;
                }
                let ng = self.g[u] + self.weights[l];
                if ng.order(&self.g[v]) == Ordering::Less {
                    if self.g[v].order(&W::INFINITE) == Ordering::Equal {
                        self.touched.push(v);
                    }
                    self.g[v] = ng;
                    self.pred[v] = Some(l);
                    heap.push(Reverse((Key(ng + self.to_dst[v]), v)));
                }
            }
        }
        let mut links = Vec::new();
        if from == self.dst || self.pred[self.dst].is_some() {
            let mut v = self.dst;
            while v != from {
                let l = self.pred[v].expect("predecessor chain reaches the spur node");
                links.push(l);
                v = net.link(l).from;
            }
            links.reverse();
        }
        let found = from == self.dst || !links.is_empty();
        for &u in &self.touched {
            self.g[u] = W::INFINITE;
            self.pred[u] = None;
        }
        self.touched.clear();
        found.then_some(links)
    }
}

impl<W: Weight> Iterator for Yen<'_, W> {
    type Item = Path;

    fn next(&mut self) -> Option<Path> {
        self.next_within(&Deadline::unlimited()).ok().flatten()
    }
}

/// Yen iterator over either integer or real weights.
pub enum KspPaths<'a> {
    Integer(Yen<'a, u64>),
    Real(Yen<'a, f64>),
}

impl Iterator for KspPaths<'_> {
    type Item = Path;

    fn next(&mut self) -> Option<Path> {
        match self {
            KspPaths::Integer(y) => y.next(),
            KspPaths::Real(y) => y.next(),
        }
    }
}

/// Loopless `s -> t` paths in non-decreasing weight.
pub fn yen_ksp(net: &Network, s: NodeId, t: NodeId, w: WeightFn) -> Result<KspPaths<'_>, KspError> {
    net.check_node(s).map_err(DrcrError::from)?;
    net.check_node(t).map_err(DrcrError::from)?;
    Ok(match w {
        WeightFn::Cost => KspPaths::Integer(Yen::new(net, s, t, net.links().iter().map(|l| l.cost).collect())),
        WeightFn::Delay => KspPaths::Integer(Yen::new(net, s, t, net.links().iter().map(|l| l.delay).collect())),
        WeightFn::Lagrangian(lambda) => KspPaths::Real(Yen::new(net, s, t, lagrangian_weights(net, lambda)?)),
    })
}

#[derive(Clone, Debug)]
pub struct KspOutcome {
    pub verdict: Verdict<Path>,
    /// Paths drawn from the KSP iterator.
    pub ksp_iterations: u64,
    pub lambda: Option<f64>,
    pub elapsed: Duration,
}

fn finish<T>(best: Option<T>, timed_out: bool) -> Verdict<T> {
    match (timed_out, best) {
        (true, _) => Verdict::Timeout,
        (false, Some(p)) => Verdict::Optimal(p),
        (false, None) => Verdict::Infeasible,
    }
}

fn in_range(q: &DrcrQuery, p: &Path) -> bool {
    q.lower <= p.delay() && p.delay() <= q.upper
}

/// Paths in cost order; the first one inside `[L, U]` is optimal.
pub fn cost_ksp_drcr(net: &Network, q: &DrcrQuery, time_limit: Option<Duration>) -> Result<KspOutcome, KspError> {
    q.validate(net)?;
    let deadline = Deadline::new(time_limit);
    let mut yen = Yen::new(net, q.src, q.dst, net.links().iter().map(|l| l.cost).collect());
    let mut iterations = 0;
    let (best, timed_out) = loop {
        match yen.next_within(&deadline) {
            Err(Timeout) => break (None, true),
            Ok(None) => break (None, false),
            Ok(Some(p)) => {
                iterations += 1;
                if in_range(q, &p) {
                    break (Some(p), false);
                }
            }
        }
    };
    Ok(KspOutcome {
        verdict: finish(best, timed_out),
        ksp_iterations: iterations,
        lambda: None,
        elapsed: deadline.elapsed(),
    })
}

/// Paths in delay order until the delay passes `U`; cheapest in range wins.
pub fn delay_ksp_drcr(net: &Network, q: &DrcrQuery, time_limit: Option<Duration>) -> Result<KspOutcome, KspError> {
    q.validate(net)?;
    let deadline = Deadline::new(time_limit);
    let mut yen = Yen::new(net, q.src, q.dst, net.links().iter().map(|l| l.delay).collect());
    let mut iterations = 0;
    let mut best: Option<Path> = None;
    let timed_out = loop {
        match yen.next_within(&deadline) {
            Err(Timeout) => break true,
            Ok(None) => break false,
            Ok(Some(p)) => {
                iterations += 1;
                if p.delay() > q.upper {
                    break false;
                }
                if in_range(q, &p) && best.as_ref().is_none_or(|b| p.cost() < b.cost()) {
                    best = Some(p);
                }
            }
        }
    };
    Ok(KspOutcome {
        verdict: finish(best, timed_out),
        ksp_iterations: iterations,
        lambda: None,
        elapsed: deadline.elapsed(),
    })
}

/// Which branch of the dual maximization produced `lambda_star`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LambdaSubcase {
    /// The upper bound binds (`d(min delay) < L`, `U < d(min cost)`, or
    /// `L = 0`): bisection over `[0, Λ]`.
    UpperBound,
    /// The lower bound binds and the maximizer lies in `(-μ, 0)`.
    LowerBoundInterior,
    /// The lower bound binds and the maximizer is clipped at `-μ`.
    LowerBoundAtMu,
    /// The query is trivial or infeasible; `lambda_star = 0`.
    Trivial,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LambdaResult {
    pub lambda_star: f64,
    pub g_value: f64,
    pub subcase: LambdaSubcase,
    /// `min c(e)/d(e)` over links with `d(e) > 0`; infinite if there are none.
    pub mu: f64,
    /// Set when the maximizer would be `-μ` but `μ` is 0 or undefined, so
    /// `lambda_star` falls back to 0.
    pub degenerate: bool,
}

pub fn mu(net: &Network) -> f64 {
    net.links()
        .iter()
        .filter(|l| l.delay > 0)
        .map(|l| l.cost as f64 / l.delay as f64)
        .fold(f64::INFINITY, f64::min)
}

/// The minimum-`w_λ` path, if `dst` is reachable.
pub fn lambda_opt_path(net: &Network, src: NodeId, dst: NodeId, lambda: f64) -> Result<Option<Path>, KspError> {
    let w = lagrangian_weights(net, lambda)?;
    let (_, next) = reverse_dijkstra(net, dst, &w);
    if src != dst && next[src].is_none() {
        return Ok(None);
    }
    let mut links = Vec::new();
    let mut u = src;
    while u != dst {
        let l = next[u].expect("tree reaches destination");
        links.push(l);
        u = net.link(l).to;
    }
    Ok(Some(Path::from_chain(net, links)))
}

fn penalty(lambda: f64, q: &DrcrQuery) -> f64 {
    (lambda * q.lower as f64).max(lambda * q.upper as f64)
}

/// Dual value `g(λ) = min_P w_λ(P) - max(λL, λU)`; `None` if unreachable.
pub fn dual_value(net: &Network, q: &DrcrQuery, lambda: f64) -> Result<Option<f64>, KspError> {
    Ok(lambda_opt_path(net, q.src, q.dst, lambda)?
        .map(|p| p.cost() as f64 + lambda * p.delay() as f64 - penalty(lambda, q)))
}

const BISECTION_STEPS: usize = 64;

fn bisect(
    net: &Network,
    q: &DrcrQuery,
    mut lo: f64,
    mut hi: f64,
    target: u64,
) -> Result<f64, KspError> {
    // The supergradient d(P^λ) - target decreases in λ.
    for _ in 0..BISECTION_STEPS {
        if hi - lo < 1e-6 * (1.0 + lo.abs() + hi.abs()) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let p = lambda_opt_path(net, q.src, q.dst, mid)?.expect("reachable");
        if p.delay() > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let g = |l: f64| dual_value(net, q, l).map(|v| v.expect("reachable"));
    Ok(if g(hi)? > g(lo)? { hi } else { lo })
}

/// Chooses `λ*` maximizing the concave dual `g` over `λ >= -μ`.
pub fn choose_lambda(net: &Network, q: &DrcrQuery) -> Result<LambdaResult, KspError> {
    let analysis = classify_case(net, q)?;
    let mu = mu(net);
    let total_cost: u64 = net.links().iter().map(|l| l.cost).sum();
    let big = total_cost as f64 + 1.0;
    let (lambda_star, subcase, degenerate) = match analysis.case {
        DrcrCase::NonTrivial4 | DrcrCase::Degenerated => {
            (bisect(net, q, 0.0, big, q.upper)?, LambdaSubcase::UpperBound, false)
        }
        DrcrCase::NonTrivial6 => {
            if !mu.is_finite() || mu == 0.0 {
                (0.0, LambdaSubcase::LowerBoundAtMu, true)
            } else {
                let at_mu = lambda_opt_path(net, q.src, q.dst, -mu)?.expect("reachable");
                if at_mu.delay() > q.lower {
                    (bisect(net, q, -mu, 0.0, q.lower)?, LambdaSubcase::LowerBoundInterior, false)
                } else {
                    (-mu, LambdaSubcase::LowerBoundAtMu, false)
                }
            }
        }
        _ => (0.0, LambdaSubcase::Trivial, false),
    };
    let g_value = dual_value(net, q, lambda_star)?.unwrap_or(f64::NEG_INFINITY);
    Ok(LambdaResult {
        lambda_star,
        g_value,
        subcase,
        mu,
        degenerate,
    })
}

/// Stop margin: with integer costs an improving path has
/// `w_λ <= w^U - 1`, so anything at or above `w^U - 0.5` cannot improve.
const STOP_MARGIN: f64 = 0.5;

/// Paths in `w_λ` order with `λ` from [`choose_lambda`], stopping once the
/// weight reaches `tmp_min + max(λL, λU)`.
pub fn lagrangian_ksp_drcr(net: &Network, q: &DrcrQuery, time_limit: Option<Duration>) -> Result<KspOutcome, KspError> {
    let deadline = Deadline::new(time_limit);
    let choice = choose_lambda(net, q)?;
    let lambda = choice.lambda_star;
    if choice.g_value == f64::NEG_INFINITY || choice.subcase == LambdaSubcase::Trivial {
        let analysis = classify_case(net, q)?;
        if analysis.case == DrcrCase::Infeasible {
            return Ok(KspOutcome {
                verdict: Verdict::Infeasible,
                ksp_iterations: 0,
                lambda: Some(lambda),
                elapsed: deadline.elapsed(),
            });
        }
    }
    let mut yen = Yen::new(net, q.src, q.dst, lagrangian_weights(net, lambda)?);
    let pen = penalty(lambda, q);
    let mut iterations = 0;
    let mut best: Option<Path> = None;
    let mut w_upper = f64::INFINITY;
    let timed_out = loop {
        match yen.next_within(&deadline) {
            Err(Timeout) => break true,
            Ok(None) => break false,
            Ok(Some(p)) => {
                iterations += 1;
                let w = p.cost() as f64 + lambda * p.delay() as f64;
                if w >= w_upper - STOP_MARGIN {
                    break false;
                }
                if in_range(q, &p) && best.as_ref().is_none_or(|b| p.cost() < b.cost()) {
                    w_upper = p.cost() as f64 + pen;
                    best = Some(p);
                }
            }
        }
    };
    Ok(KspOutcome {
        verdict: finish(best, timed_out),
        ksp_iterations: iterations,
        lambda: Some(lambda),
        elapsed: deadline.elapsed(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KspOrder {
    Cost,
    Delay,
}

#[derive(Clone, Debug)]
pub struct SrlgKspOutcome {
    pub verdict: Verdict<PathPair>,
    pub ksp_iterations: u64,
    pub backup_searches: u64,
    pub lambda: Option<f64>,
    pub elapsed: Duration,
}

enum Backup {
    Found(Path),
    None,
    Timeout,
}

fn try_backup(net: &Network, active: &Path, q: &SrlgDrcrQuery, deadline: Deadline, count: &mut u64) -> Backup {
    *count += 1;
    let out = backup_search_within(net, active, q.upper, q.delta, deadline);
    match (out.timed_out, out.best) {
        (true, _) => Backup::Timeout,
        (false, Some(b)) => Backup::Found(b),
        (false, None) => Backup::None,
    }
}

/// Active paths in cost or delay order, each checked for a backup.
pub fn srlg_ksp_drcr(
    net: &Network,
    q: &SrlgDrcrQuery,
    order: KspOrder,
    time_limit: Option<Duration>,
) -> Result<SrlgKspOutcome, KspError> {
    q.validate(net)?;
    let deadline = Deadline::new(time_limit);
    let weights: Vec<u64> = match order {
        KspOrder::Cost => net.links().iter().map(|l| l.cost).collect(),
        KspOrder::Delay => net.links().iter().map(|l| l.delay).collect(),
    };
    let mut yen = Yen::new(net, q.src, q.dst, weights);
    let (mut iterations, mut searches) = (0, 0);
    let mut best: Option<PathPair> = None;
    let timed_out = loop {
        let active = match yen.next_within(&deadline) {
            Err(Timeout) => break true,
            Ok(None) => break false,
            Ok(Some(p)) => p,
        };
        iterations += 1;
        if active.delay() > q.upper {
            if order == KspOrder::Delay {
                break false;
            }
            continue;
        }
        if best.as_ref().is_some_and(|b| active.cost() >= b.active.cost()) {
            continue;
        }
        match try_backup(net, &active, q, deadline, &mut searches) {
            Backup::Timeout => break true,
            Backup::None => {}
            Backup::Found(backup) => {
                best = Some(PathPair { active, backup });
                if order == KspOrder::Cost {
                    break false;
                }
            }
        }
    };
    Ok(SrlgKspOutcome {
        verdict: finish(best, timed_out),
        ksp_iterations: iterations,
        backup_searches: searches,
        lambda: None,
        elapsed: deadline.elapsed(),
    })
}

/// Lagrangian KSP for pairs: delay-feasible actives wait in a cost-ordered
/// heap and are only checked for a backup once no unseen path can be
/// cheaper than the heap top.
pub fn srlg_lagrangian_ksp(net: &Network, q: &SrlgDrcrQuery, time_limit: Option<Duration>) -> Result<SrlgKspOutcome, KspError> {
    q.validate(net)?;
    let deadline = Deadline::new(time_limit);
    let dq = DrcrQuery::new(q.src, q.dst, 0, q.upper);
    let lambda = choose_lambda(net, &dq)?.lambda_star;
    let mut yen = Yen::new(net, q.src, q.dst, lagrangian_weights(net, lambda)?);
    let lu = lambda * q.upper as f64;
    let mut heap: BinaryHeap<Reverse<(u64, Vec<LinkId>)>> = BinaryHeap::new();
    let w_upper = |heap: &BinaryHeap<Reverse<(u64, Vec<LinkId>)>>| {
        heap.peek().map_or(f64::INFINITY, |Reverse((c, _))| *c as f64 + lu)
    };
    let (mut iterations, mut searches) = (0, 0);
    let mut found: Option<PathPair> = None;
    let mut timed_out = false;

    loop {
        let next = match yen.next_within(&deadline) {
            Err(Timeout) => {
                timed_out = true;
                break;
            }
            Ok(p) => p,
        };
        let Some(p) = next else { break };
        iterations += 1;
        let w = p.cost() as f64 + lambda * p.delay() as f64;
        if w >= w_upper(&heap) - STOP_MARGIN {
            let Reverse((_, links)) = heap.pop().expect("finite bound implies non-empty heap");
            let active = Path::from_chain(net, links);
            match try_backup(net, &active, q, deadline, &mut searches) {
                Backup::Timeout => {
                    timed_out = true;
                    break;
                }
                Backup::Found(backup) => {
                    found = Some(PathPair { active, backup });
                    break;
                }
                Backup::None => {}
            }
        }
        if p.delay() <= q.upper {
            heap.push(Reverse((p.cost(), p.links().to_vec())));
        }
    }
    if found.is_none() && !timed_out {
        while let Some(Reverse((_, links))) = heap.pop() {
            let active = Path::from_chain(net, links);
            match try_backup(net, &active, q, deadline, &mut searches) {
                Backup::Timeout => {
                    timed_out = true;
                    break;
                }
                Backup::Found(backup) => {
                    found = Some(PathPair { active, backup });
                    break;
                }
                Backup::None => {}
            }
        }
    }
    Ok(SrlgKspOutcome {
        verdict: finish(found, timed_out),
        ksp_iterations: iterations,
        backup_searches: searches,
        lambda: Some(lambda),
        elapsed: deadline.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::NetworkBuilder;

    fn g1_query(lower: u64, upper: u64) -> (Network, DrcrQuery) {
        let net = fixtures::g1();
        let q = DrcrQuery::new(0, net.node_by_name("t").unwrap(), lower, upper);
        (net, q)
    }

    #[test]
    fn yen_orders_g1() {
        let net = fixtures::g1();
        let t = net.node_by_name("t").unwrap();
        let costs: Vec<u64> = yen_ksp(&net, 0, t, WeightFn::Cost).unwrap().map(|p| p.cost()).collect();
        assert_eq!(costs, [2, 10]);
        let delays: Vec<u64> = yen_ksp(&net, 0, t, WeightFn::Delay).unwrap().map(|p| p.delay()).collect();
        assert_eq!(delays, [2, 4]);
    }

    #[test]
    fn yen_disconnected_is_empty() {
        let mut b = NetworkBuilder::with_nodes(3);
        b.add_link(0, 1, 1, 1).unwrap();
        let net = b.build().unwrap();
        assert_eq!(yen_ksp(&net, 0, 2, WeightFn::Cost).unwrap().count(), 0);
    }

    #[test]
    fn yen_enumerates_all_simple_paths_of_k4() {
        let mut b = NetworkBuilder::with_nodes(4);
        for u in 0..4 {
            for v in 0..4 {
                if u != v {
                    b.add_link(u, v, 1 + (u + v) as u64 % 3, 1).unwrap();
                }
            }
        }
        let net = b.build().unwrap();
        let paths: Vec<Path> = yen_ksp(&net, 0, 3, WeightFn::Delay).unwrap().collect();
        assert_eq!(paths.len(), 5);
        assert!(paths.windows(2).all(|w| w[0].delay() <= w[1].delay()));
        let distinct: std::collections::HashSet<Vec<LinkId>> = paths.iter().map(|p| p.links().to_vec()).collect();
        assert_eq!(distinct.len(), 5);
    }

    #[test]
    fn negative_weight_rejected() {
        let net = fixtures::g1();
        assert!(matches!(
            yen_ksp(&net, 0, 1, WeightFn::Lagrangian(-10.0)),
            Err(KspError::NegativeWeight { .. })
        ));
    }

    #[test]
    fn cost_ksp_on_g1() {
        let (net, q) = g1_query(0, 10);
        let out = cost_ksp_drcr(&net, &q, None).unwrap();
        assert_eq!(out.verdict.solution().unwrap().cost(), 2);
        assert_eq!(out.ksp_iterations, 1);
        let (net, q) = g1_query(3, 5);
        let out = cost_ksp_drcr(&net, &q, None).unwrap();
        assert_eq!(out.verdict.solution().unwrap().cost(), 10);
        assert_eq!(out.ksp_iterations, 2);
        let (net, q) = g1_query(5, 6);
        let out = cost_ksp_drcr(&net, &q, None).unwrap();
        assert_eq!(out.verdict, Verdict::Infeasible);
        assert_eq!(out.ksp_iterations, 2);
    }

    #[test]
    fn delay_ksp_on_g1() {
        let (net, q) = g1_query(0, 10);
        assert_eq!(delay_ksp_drcr(&net, &q, None).unwrap().verdict.solution().unwrap().cost(), 2);
        let (net, q) = g1_query(3, 5);
        assert_eq!(delay_ksp_drcr(&net, &q, None).unwrap().verdict.solution().unwrap().cost(), 10);
        let (net, q) = g1_query(5, 6);
        assert_eq!(delay_ksp_drcr(&net, &q, None).unwrap().verdict, Verdict::Infeasible);
    }

    #[test]
    fn lagrangian_ksp_on_g1() {
        let (net, q) = g1_query(3, 5);
        let out = lagrangian_ksp_drcr(&net, &q, None).unwrap();
        assert_eq!(out.verdict.solution().unwrap().links(), &[2, 3]);
        let (net, q) = g1_query(0, 10);
        assert_eq!(lagrangian_ksp_drcr(&net, &q, None).unwrap().verdict.solution().unwrap().cost(), 2);
        let (net, q) = g1_query(5, 6);
        assert_eq!(lagrangian_ksp_drcr(&net, &q, None).unwrap().verdict, Verdict::Infeasible);
    }

    #[test]
    fn lambda_on_piecewise_dual() {
        // g(λ) = 4 + 3λ for λ <= 0, 4 - 3λ on (0, 1], 6 - 5λ beyond.
        let net = fixtures::lagrangian_example(1);
        let q = DrcrQuery::new(0, net.node_by_name("B").unwrap(), 5, 7);
        let g = |l: f64| dual_value(&net, &q, l).unwrap().unwrap();
        assert!((g(-0.5) - 2.5).abs() < 1e-9);
        assert!((g(0.5) - 2.5).abs() < 1e-9);
        assert!((g(2.0) + 4.0).abs() < 1e-9);
        let r = choose_lambda(&net, &q).unwrap();
        assert!(r.lambda_star.abs() < 1e-5, "{r:?}");
        assert!((r.g_value - 4.0).abs() < 1e-4);
    }

    #[test]
    fn lambda_bounds_the_optimum() {
        let net = fixtures::g1();
        let q = DrcrQuery::new(0, net.node_by_name("t").unwrap(), 3, 5);
        let r = choose_lambda(&net, &q).unwrap();
        assert!(r.g_value <= 10.0 + 1e-9);
        assert_eq!(r.mu, 1.0);
        assert_eq!(r.subcase, LambdaSubcase::LowerBoundAtMu);
        assert_eq!(r.lambda_star, -1.0);
    }

    #[test]
    fn upper_bound_case_goes_interior() {
        // cheap slow path (d=10, c=1) vs fast expensive path (d=2, c=20)
        let mut b = NetworkBuilder::with_nodes(4);
        b.add_link(0, 1, 5, 1).unwrap();
        b.add_link(1, 3, 5, 0).unwrap();
        b.add_link(0, 2, 1, 10).unwrap();
        b.add_link(2, 3, 1, 10).unwrap();
        let net = b.build().unwrap();
        let q = DrcrQuery::new(0, 3, 3, 9);
        let r = choose_lambda(&net, &q).unwrap();
        assert_eq!(r.subcase, LambdaSubcase::UpperBound);
        assert!(r.lambda_star > 0.0);
        assert!(r.g_value <= 20.0 + 1e-9);
        // μ counts the zero-cost link, so it is 0
        assert_eq!(r.mu, 0.0);
    }

    #[test]
    fn srlg_ksp_fixtures() {
        let net = fixtures::g3b();
        let q = SrlgDrcrQuery::new(0, net.node_by_name("F").unwrap(), 3, 0);
        for order in [KspOrder::Cost, KspOrder::Delay] {
            let out = srlg_ksp_drcr(&net, &q, order, None).unwrap();
            let pair = out.verdict.solution().unwrap();
            assert_eq!(pair.active.cost(), 12);
            pair.check(&net, &q).unwrap();
        }
        let out = srlg_lagrangian_ksp(&net, &q, None).unwrap();
        assert_eq!(out.verdict.solution().unwrap().active.cost(), 12);

        let net = fixtures::square();
        let q = SrlgDrcrQuery::new(0, net.node_by_name("t").unwrap(), 4, 1);
        let out = srlg_ksp_drcr(&net, &q, KspOrder::Cost, None).unwrap();
        assert_eq!(out.ksp_iterations, 1);
        assert!(out.verdict.solution().is_some());

        let net = fixtures::chain();
        let q = SrlgDrcrQuery::new(0, net.node_by_name("t").unwrap(), 4, 1);
        for order in [KspOrder::Cost, KspOrder::Delay] {
            assert_eq!(srlg_ksp_drcr(&net, &q, order, None).unwrap().verdict, Verdict::Infeasible);
        }
        assert_eq!(srlg_lagrangian_ksp(&net, &q, None).unwrap().verdict, Verdict::Infeasible);
    }
}
