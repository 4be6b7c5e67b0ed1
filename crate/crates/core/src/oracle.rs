//! Exhaustive reference solvers for small instances.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::bitset::BitSet;
use crate::drcr::DrcrQuery;
use crate::graph::{LinkId, Network, NodeId, Path, SrlgId};
use crate::srlg::{ConflictSet, PathPair, SrlgDrcrQuery};
use crate::tree::INF;

pub const MAX_PATHS: usize = 200_000;
pub const MAX_STATES: usize = 5_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("more than {0} paths")]
    TooManyPaths(usize),
    #[error("more than {0} dynamic-programming states")]
    TooManyStates(usize),
}

/// Every elementary `s -> t` path.
pub fn enumerate_elementary_paths(
    net: &Network,
    s: NodeId,
    t: NodeId,
    max_paths: usize,
) -> Result<Vec<Path>, OracleError> {
    enumerate_bounded(net, s, t, u64::MAX, max_paths)
}

/// Every elementary `s -> t` path with delay `<= max_delay`.
pub fn enumerate_bounded(
    net: &Network,
    s: NodeId,
    t: NodeId,
    max_delay: u64,
    max_paths: usize,
) -> Result<Vec<Path>, OracleError> {
    #[allow(clippy::too_many_arguments)]
    fn walk(
        net: &Network,
        u: NodeId,
        t: NodeId,
        delay: u64,
        max_delay: u64,
        max_paths: usize,
        on_path: &mut BitSet,
        links: &mut Vec<LinkId>,
        out: &mut Vec<Path>,
    ) -> Result<(), OracleError> {
        if u == t {
            if out.len() == max_paths {
                return Err(OracleError::TooManyPaths(max_paths));
            }
            out.push(Path::new(net, links.clone()).expect("walk chains"));
            return Ok(());
        }
        on_path.insert(u);
        for &l in net.egress(u) {
            let link = net.link(l);
            let d = delay.saturating_add(link.delay);
            if on_path.contains(link.to) || d > max_delay {
                continue;
            }
            links.push(l);
            walk(net, link.to, t, d, max_delay, max_paths, on_path, links, out)?;
            links.pop();
        }
        on_path.remove(u);
        Ok(())
    }
    let mut out = Vec::new();
    if s == t {
        return Ok(out);
    }
    let mut on_path = BitSet::new(net.node_count());
    walk(net, s, t, 0, max_delay, max_paths, &mut on_path, &mut Vec::new(), &mut out)?;
    Ok(out)
}

/// Least-cost path with `L <= d <= U`; ties go to the lexicographically
/// smallest link sequence.
pub fn brute_drcr(net: &Network, q: &DrcrQuery) -> Result<Option<(u64, Path)>, OracleError> {
    let paths = enumerate_bounded(net, q.src, q.dst, q.upper, MAX_PATHS)?;
    Ok(paths
        .into_iter()
        .filter(|p| p.delay() >= q.lower)
        .min_by(|a, b| a.cost().cmp(&b.cost()).then_with(|| a.links().cmp(b.links())))
        .map(|p| (p.cost(), p)))
}

fn srlg_set(net: &Network, p: &Path) -> BTreeSet<SrlgId> {
    net.srlgs_of_links(p.links())
}

/// Least active cost over all Srlg-disjoint pairs satisfying the query.
pub fn brute_srlg_drcr(net: &Network, q: &SrlgDrcrQuery) -> Result<Option<(u64, PathPair)>, OracleError> {
    let mut paths = enumerate_bounded(net, q.src, q.dst, q.upper, MAX_PATHS)?;
    paths.sort_by(|a, b| a.cost().cmp(&b.cost()).then_with(|| a.links().cmp(b.links())));
    let sets: Vec<BTreeSet<SrlgId>> = paths.iter().map(|p| srlg_set(net, p)).collect();
    for (i, active) in paths.iter().enumerate() {
        let (lo, hi) = q.backup_window(active.delay());
        let backup = paths
            .iter()
            .enumerate()
            .find(|(j, b)| (lo..=hi).contains(&b.delay()) && sets[i].is_disjoint(&sets[*j]));
        if let Some((_, b)) = backup {
            let pair = PathPair {
                active: active.clone(),
                backup: b.clone(),
            };
            return Ok(Some((active.cost(), pair)));
        }
    }
    Ok(None)
}

/// True iff no U-feasible path whose Srlg set contains `t` has an
/// Srlg-disjoint U-feasible partner.
pub fn verify_conflict_set(net: &Network, q: &SrlgDrcrQuery, t: &ConflictSet) -> Result<bool, OracleError> {
    let paths = enumerate_bounded(net, q.src, q.dst, q.upper, MAX_PATHS)?;
    let sets: Vec<BTreeSet<SrlgId>> = paths.iter().map(|p| srlg_set(net, p)).collect();
    for a in &sets {
        if !t.srlgs.iter().all(|s| a.contains(s)) {
            continue;
        }
        if sets.iter().any(|b| a.is_disjoint(b)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `table[u][l]`: least cost of a walk `u -> t` with delay `<= l`, for
/// `0 <= l <= U`; [`INF`] when none exists.
pub fn brute_cost_function(net: &Network, t: NodeId, upper: u64) -> Result<Vec<Vec<u64>>, OracleError> {
    let n = net.node_count();
    let width = upper as usize + 1;
    if n.saturating_mul(width) > MAX_STATES {
        return Err(OracleError::TooManyStates(MAX_STATES));
    }
    let mut f = vec![vec![INF; width]; n];
    f[t].iter_mut().for_each(|c| *c = 0);
    // Value iteration; zero-delay links need more than one sweep per budget.
    loop {
        let mut changed = false;
        for u in 0..n {
            for l in 0..width {
                let mut best = f[u][l];
                if l > 0 {
                    best = best.min(f[u][l - 1]);
                }
                for &e in net.egress(u) {
                    let link = net.link(e);
                    if link.delay as usize > l {
                        continue;
                    }
                    let rest = f[link.to][l - link.delay as usize];
                    if rest != INF {
                        best = best.min(rest + link.cost);
                    }
                }
                if best < f[u][l] {
                    f[u][l] = best;
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(f);
        }
    }
}
