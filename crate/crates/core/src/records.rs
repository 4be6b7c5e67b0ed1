//! JSON Lines query/result records and percentile summaries.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::drcr::{DrcrQuery, PulseOutcome};
use crate::graph::{Network, NodeId, Path};
use crate::ksp::{KspOutcome, SrlgKspOutcome};
use crate::srlg::{CoseOutcome, SrlgDrcrQuery};

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("no results to report")]
    Empty,
}

/// A node given either by name or by dense id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeRef {
    Id(u64),
    Name(String),
}

impl NodeRef {
    /// Names win over ids, so files whose nodes are named `"0".."n-1"`
    /// resolve the same either way.
    pub fn resolve(&self, net: &Network) -> Result<NodeId, RecordError> {
        let text = match self {
            NodeRef::Id(i) => i.to_string(),
            NodeRef::Name(s) => s.clone(),
        };
        if let Some(n) = net.node_by_name(&text) {
            return Ok(n);
        }
        match self {
            NodeRef::Id(i) if (*i as usize) < net.node_count() => Ok(*i as usize),
            _ => Err(RecordError::UnknownNode(text)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub src: NodeRef,
    pub dst: NodeRef,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<u64>,
    #[serde(rename = "U")]
    pub upper: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Query {
    Drcr(DrcrQuery),
    Srlg(SrlgDrcrQuery),
}

impl QueryRecord {
    pub fn drcr(net: &Network, q: &DrcrQuery) -> Self {
        QueryRecord {
            src: NodeRef::Name(net.node_name(q.src).to_string()),
            dst: NodeRef::Name(net.node_name(q.dst).to_string()),
            lower: Some(q.lower),
            upper: q.upper,
            delta: None,
        }
    }

    pub fn srlg(net: &Network, q: &SrlgDrcrQuery) -> Self {
        QueryRecord {
            src: NodeRef::Name(net.node_name(q.src).to_string()),
            dst: NodeRef::Name(net.node_name(q.dst).to_string()),
            lower: None,
            upper: q.upper,
            delta: Some(q.delta),
        }
    }

    /// A record with `delta` is an Srlg-disjoint query; otherwise a DRCR
    /// query with `L` defaulting to 0.
    pub fn resolve(&self, net: &Network) -> Result<Query, RecordError> {
        let src = self.src.resolve(net)?;
        let dst = self.dst.resolve(net)?;
        Ok(match self.delta {
            Some(delta) => Query::Srlg(SrlgDrcrQuery::new(src, dst, self.upper, delta)),
            None => Query::Drcr(DrcrQuery::new(src, dst, self.lower.unwrap_or(0), self.upper)),
        })
    }
}

/// Parses JSON Lines, skipping blank lines.
pub fn parse_jsonl<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>, RecordError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|source| RecordError::Json { line: i + 1, source }))
        .collect()
}

pub fn to_jsonl<T: Serialize>(items: &[T]) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).expect("records serialize"));
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delay: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<u64>,
    pub elapsed_us: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cf_build_us: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ksp_iterations: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backup_path: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conflict_sets_found: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subinstances: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topology: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algo: Option<String>,
}

fn micros(d: std::time::Duration) -> u64 {
    d.as_micros().min(u64::MAX as u128) as u64
}

impl ResultRecord {
    fn with_path(mut self, net: &Network, p: Option<&Path>) -> Self {
        if let Some(p) = p {
            self.cost = Some(p.cost());
            self.delay = Some(p.delay());
            self.path = Some(p.labels(net));
        }
        self
    }

    pub fn from_pulse(net: &Network, out: &PulseOutcome) -> Self {
        ResultRecord {
            status: out.verdict.status().into(),
            iterations: Some(out.stats.iterations),
            elapsed_us: micros(out.stats.elapsed),
            cf_build_us: out.stats.cost_function_build.map(micros),
            ..Default::default()
        }
        .with_path(net, out.verdict.solution())
    }

    pub fn from_ksp(net: &Network, out: &KspOutcome) -> Self {
        ResultRecord {
            status: out.verdict.status().into(),
            iterations: Some(out.ksp_iterations),
            ksp_iterations: Some(out.ksp_iterations),
            lambda: out.lambda,
            elapsed_us: micros(out.elapsed),
            ..Default::default()
        }
        .with_path(net, out.verdict.solution())
    }

    pub fn from_cose(net: &Network, out: &CoseOutcome) -> Self {
        let pair = out.verdict.solution();
        ResultRecord {
            status: out.verdict.status().into(),
            iterations: Some(out.stats.iterations),
            elapsed_us: micros(out.stats.elapsed),
            backup_path: pair.map(|p| p.backup.labels(net)),
            conflict_sets_found: Some(out.stats.conflict_sets.len() as u64),
            subinstances: Some(out.stats.subinstances),
            ..Default::default()
        }
        .with_path(net, pair.map(|p| &p.active))
    }

    pub fn from_srlg_ksp(net: &Network, out: &SrlgKspOutcome) -> Self {
        let pair = out.verdict.solution();
        ResultRecord {
            status: out.verdict.status().into(),
            iterations: Some(out.ksp_iterations),
            ksp_iterations: Some(out.ksp_iterations),
            lambda: out.lambda,
            elapsed_us: micros(out.elapsed),
            backup_path: pair.map(|p| p.backup.labels(net)),
            ..Default::default()
        }
        .with_path(net, pair.map(|p| &p.active))
    }

    pub fn is_timeout(&self) -> bool {
        self.status == "timeout"
    }
}

/// A percentile that may fall on a timed-out run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Percentile {
    Micros(u64),
    OverLimit,
}

impl Percentile {
    pub fn render(&self, limit_us: Option<u64>) -> String {
        match (self, limit_us) {
            (Percentile::Micros(v), _) => v.to_string(),
            (Percentile::OverLimit, Some(l)) => format!(">{l}"),
            (Percentile::OverLimit, None) => ">LIMIT".into(),
        }
    }
}

/// Nearest-rank percentile of an ascending slice: the value at rank
/// `ceil(p/100 * n)`.
pub fn nearest_rank<T: Copy>(sorted: &[T], p: f64) -> Option<T> {
    if sorted.is_empty() {
        return None;
    }
    let rank = ((p / 100.0) * sorted.len() as f64).ceil().max(1.0) as usize;
    Some(sorted[rank.min(sorted.len()) - 1])
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub topology: String,
    pub algo: String,
    pub p50: Percentile,
    pub p75: Percentile,
    pub p99: Percentile,
    pub completion_rate: f64,
}

/// Groups by `(topology, algo)`; timeouts sort above every finished run.
pub fn summarize(records: &[ResultRecord]) -> Result<Vec<ReportRow>, RecordError> {
    if records.is_empty() {
        return Err(RecordError::Empty);
    }
    let mut groups: BTreeMap<(String, String), Vec<Option<u64>>> = BTreeMap::new();
    for r in records {
        let key = (
            r.topology.clone().unwrap_or_default(),
            r.algo.clone().unwrap_or_default(),
        );
        groups
            .entry(key)
            .or_default()
            .push((!r.is_timeout()).then_some(r.elapsed_us));
    }
    Ok(groups
        .into_iter()
        .map(|((topology, algo), mut times)| {
            // None sorts first; flip so timeouts land at the top.
            times.sort_by_key(|t| t.map_or((1, 0), |v| (0, v)));
            let pick = |p| match nearest_rank(&times, p).flatten() {
                Some(v) => Percentile::Micros(v),
                None => Percentile::OverLimit,
            };
            let solved = times.iter().filter(|t| t.is_some()).count();
            ReportRow {
                topology,
                algo,
                p50: pick(50.0),
                p75: pick(75.0),
                p99: pick(99.0),
                completion_rate: solved as f64 / times.len() as f64,
            }
        })
        .collect())
}
