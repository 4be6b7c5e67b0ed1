//! Seeded generators for DRCR and Srlg-disjoint DRCR corpora.

use std::ops::RangeInclusive;
use std::time::Duration;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::drcr::{case_of, DrcrQuery};
use crate::graph::{LinkId, Network, NetworkBuilder};
use crate::srlg::{ap_pulse_plus, backup_search, cose_pulse_plus, SrlgDrcrQuery, SubInstance};
use crate::tree::{build_reverse_tree, Metric, INF};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SrlgStyle {
    #[default]
    None,
    Star,
    Nonstar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub n: usize,
    /// Link probability is `p_mult * ln(n) / n` unless `p_override` is set.
    pub p_mult: f64,
    pub p_override: Option<f64>,
    pub delay_range: RangeInclusive<u64>,
    pub cost_range: RangeInclusive<u64>,
    pub seed: u64,
    pub srlg_style: SrlgStyle,
    pub srlg_size_range: RangeInclusive<usize>,
    pub ul_gap_max: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            n: 100,
            p_mult: 1.0,
            p_override: None,
            delay_range: 1..=10,
            cost_range: 1..=10,
            seed: 0,
            srlg_style: SrlgStyle::None,
            srlg_size_range: 1..=40,
            ul_gap_max: 20,
        }
    }
}

impl GenConfig {
    pub fn link_probability(&self) -> f64 {
        self.p_override.unwrap_or_else(|| {
            let n = self.n as f64;
            (self.p_mult * n.ln() / n).min(1.0)
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("no query of case {case} found after {tries} tries")]
    GaveUp { case: u8, tries: usize },
    #[error("target case must be 4 or 6, got {0}")]
    BadCase(u8),
    #[error("solver timed out while classifying")]
    Timeout,
}

const MAX_TRIES: usize = 1000;

/// Directed G(n, p): each ordered pair independently gets a link with
/// probability `p`, with delay and cost drawn uniformly from the config
/// ranges. Srlgs are added according to `cfg.srlg_style`.
pub fn gen_er_network(cfg: &GenConfig) -> Network {
    assert!(cfg.n >= 2, "need at least two nodes");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let p = cfg.link_probability();
    let mut b = NetworkBuilder::with_nodes(cfg.n);
    for u in 0..cfg.n {
        for v in 0..cfg.n {
            if u != v && rng.random_bool(p) {
                let d = rng.random_range(cfg.delay_range.clone());
                let c = rng.random_range(cfg.cost_range.clone());
                b.add_link(u, v, d, c).expect("generated link is valid");
            }
        }
    }
    let net = b.build().expect("generated weights are small");
    match cfg.srlg_style {
        SrlgStyle::None => net,
        style => gen_srlgs(&net, style, cfg),
    }
}

/// Replaces the network's Srlgs with generated ones.
///
/// Star groups are random subsets of a single node's egress links, each of
/// size uniform in `[1, ceil(average out-degree)]`; a node keeps receiving
/// groups until all of its egress links are covered. Non-star groups are
/// random link subsets sized within `cfg.srlg_size_range` until every link
/// is covered.
pub fn gen_srlgs(net: &Network, style: SrlgStyle, cfg: &GenConfig) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5151_4c47);
    let m = net.link_count();
    let mut groups: Vec<Vec<LinkId>> = Vec::new();
    match style {
        SrlgStyle::None => {}
        SrlgStyle::Star => {
            let avg = (m as f64 / net.node_count() as f64).ceil().max(1.0) as usize;
            for u in 0..net.node_count() {
                let egress = net.egress(u);
                let mut covered = vec![false; egress.len()];
                while covered.iter().any(|c| !c) {
                    let size = rng.random_range(1..=avg.min(egress.len()));
                    let picks = sample(&mut rng, egress.len(), size).into_vec();
                    let mut g: Vec<LinkId> = picks.iter().map(|&i| egress[i]).collect();
                    for i in picks {
                        covered[i] = true;
                    }
                    g.sort_unstable();
                    groups.push(g);
                }
            }
        }
        SrlgStyle::Nonstar => {
            let mut covered = vec![false; m];
            let mut remaining = m;
            let lo = (*cfg.srlg_size_range.start()).max(1);
            let hi = (*cfg.srlg_size_range.end()).max(lo);
            while remaining > 0 {
                let size = rng.random_range(lo..=hi).min(m);
                let mut g = sample(&mut rng, m, size).into_vec();
                g.sort_unstable();
                for &l in &g {
                    if !covered[l] {
                        covered[l] = true;
                        remaining -= 1;
                    }
                }
                groups.push(g);
            }
        }
    }
    net.with_srlgs(groups).expect("generated groups reference real links")
}

/// Samples a query of Case 4 or Case 6 by rejection over random node pairs.
pub fn gen_drcr_query(net: &Network, seed: u64, target_case: u8) -> Result<DrcrQuery, GenError> {
    gen_drcr_query_with_gap(net, seed, target_case, GenConfig::default().ul_gap_max)
}

pub fn gen_drcr_query_with_gap(
    net: &Network,
    seed: u64,
    target_case: u8,
    gap_max: u64,
) -> Result<DrcrQuery, GenError> {
    if target_case != 4 && target_case != 6 {
        return Err(GenError::BadCase(target_case));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = net.node_count();
    for _ in 0..MAX_TRIES {
        let s = rng.random_range(0..n);
        let t = rng.random_range(0..n);
        if s == t {
            continue;
        }
        let delay = build_reverse_tree(net, t, Metric::Delay);
        if delay.value(s) == INF {
            continue;
        }
        let dmd = delay.value(s);
        let dmc = build_reverse_tree(net, t, Metric::Cost).secondary(s);
        let (lower, upper) = if target_case == 4 {
            if dmc < dmd + 2 {
                continue;
            }
            let lower = rng.random_range(dmd + 1..=dmc - 1);
            let upper = rng.random_range(lower..=(lower + gap_max).min(dmc - 1));
            (lower, upper)
        } else {
            let lower = rng.random_range(dmc + 1..=dmc + 10);
            (lower, rng.random_range(lower..=lower + gap_max))
        };
        let case = case_of(lower, upper, dmd, dmc);
        debug_assert_eq!(case.number(), target_case);
        if case.number() == target_case {
            return Ok(DrcrQuery::new(s, t, lower, upper));
        }
    }
    Err(GenError::GaveUp {
        case: target_case,
        tries: MAX_TRIES,
    })
}

/// `count` queries alternating between Case 4 and Case 6, each seeded from
/// `seed` and its index. Pairs that give up are skipped.
pub fn gen_drcr_corpus(net: &Network, seed: u64, count: usize) -> Vec<DrcrQuery> {
    gen_drcr_corpus_seeded(net, seed, count, GenConfig::default().ul_gap_max)
        .into_iter()
        .map(|(_, q)| q)
        .collect()
}

/// [`gen_drcr_corpus`] with an explicit `U - L` bound, paired with the seed
/// each query was drawn from.
pub fn gen_drcr_corpus_seeded(net: &Network, seed: u64, count: usize, gap_max: u64) -> Vec<(u64, DrcrQuery)> {
    let mut out = Vec::with_capacity(count);
    let mut i = 0u64;
    while out.len() < count && i < (count as u64) * 4 {
        let case = if i.is_multiple_of(2) { 4 } else { 6 };
        let qseed = seed.wrapping_add(i);
        if let Ok(q) = gen_drcr_query_with_gap(net, qseed, case, gap_max) {
            out.push((qseed, q));
        }
        i += 1;
    }
    out
}

/// Random reachable pair with `U = ceil(2.5 * min delay)`.
pub fn gen_srlg_query(net: &Network, seed: u64, delta: u64) -> Result<SrlgDrcrQuery, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = net.node_count();
    for _ in 0..MAX_TRIES {
        let s = rng.random_range(0..n);
        let t = rng.random_range(0..n);
        if s == t {
            continue;
        }
        let dmd = build_reverse_tree(net, t, Metric::Delay).value(s);
        if dmd == INF {
            continue;
        }
        return Ok(SrlgDrcrQuery::new(s, t, (5 * dmd).div_ceil(2), delta));
    }
    Err(GenError::GaveUp {
        case: 0,
        tries: MAX_TRIES,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrapClass {
    Trap,
    Nontrap,
    Infeasible,
}

/// A feasible instance is a trap when the cheapest U-feasible active path
/// has no valid backup.
pub fn classify_trap(
    net: &Network,
    q: &SrlgDrcrQuery,
    time_limit: Option<Duration>,
) -> Result<TrapClass, GenError> {
    let first = ap_pulse_plus(net, q, &SubInstance::default(), &[], INF);
    let Some(active) = first else {
        return Ok(TrapClass::Infeasible);
    };
    if backup_search(net, &active, q.upper, q.delta).is_some() {
        return Ok(TrapClass::Nontrap);
    }
    let out = cose_pulse_plus(net, q, time_limit).expect("query validated by caller");
    match out.verdict {
        crate::solution::Verdict::Optimal(_) => Ok(TrapClass::Trap),
        crate::solution::Verdict::Infeasible => Ok(TrapClass::Infeasible),
        crate::solution::Verdict::Timeout => Err(GenError::Timeout),
    }
}

/// Reproduction record written next to a generated corpus.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub config: GenConfig,
    pub link_probability: f64,
    pub nodes: usize,
    pub links: usize,
    pub srlgs: usize,
    pub query_seeds: Vec<u64>,
    pub kind: String,
}
