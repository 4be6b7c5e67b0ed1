//! Delay-range constrained routing: case analysis and the Pulse+ solver.

use std::time::Duration;

use thiserror::Error;

use crate::graph::{GraphError, Network, NodeId, Path};
use crate::joint::compute_cost_functions;
use crate::pulse::{ldf_order, EgressOrder, Search};
use crate::solution::{Deadline, Instant, SearchStats, Verdict};
use crate::tree::{build_reverse_tree, DestTrees, Metric, INF};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DrcrError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
}

/// Find a min-cost elementary `src -> dst` path with `lower <= delay <= upper`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DrcrQuery {
    pub src: NodeId,
    pub dst: NodeId,
    pub lower: u64,
    pub upper: u64,
}

impl DrcrQuery {
    pub fn new(src: NodeId, dst: NodeId, lower: u64, upper: u64) -> Self {
        DrcrQuery {
            src,
            dst,
            lower,
            upper,
        }
    }

    pub fn validate(&self, net: &Network) -> Result<(), DrcrError> {
        net.check_node(self.src)?;
        net.check_node(self.dst)?;
        if self.src == self.dst {
            return Err(DrcrError::InvalidQuery("src equals dst".into()));
        }
        if self.lower > self.upper {
            return Err(DrcrError::InvalidQuery(format!(
                "lower bound {} exceeds upper bound {}",
                self.lower, self.upper
            )));
        }
        Ok(())
    }
}

/// The six cases determined by `L`, `U` and the delays of the min-delay and
/// min-cost paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DrcrCase {
    /// `U` is below the minimum delay.
    Infeasible,
    /// `L <= d(min_delay) <= U < d(min_cost)`: the lower bound is inactive.
    Degenerated,
    /// `L <= d(min_delay) <= d(min_cost) <= U`: the min-cost path is optimal.
    TrivialMinCost,
    /// `d(min_delay) < L <= U < d(min_cost)`.
    NonTrivial4,
    /// `d(min_delay) < L <= d(min_cost) <= U`: the min-cost path is optimal.
    TrivialMinCost5,
    /// `d(min_delay) <= d(min_cost) < L`.
    NonTrivial6,
}

impl DrcrCase {
    pub fn number(self) -> u8 {
        match self {
            DrcrCase::Infeasible => 1,
            DrcrCase::Degenerated => 2,
            DrcrCase::TrivialMinCost => 3,
            DrcrCase::NonTrivial4 => 4,
            DrcrCase::TrivialMinCost5 => 5,
            DrcrCase::NonTrivial6 => 6,
        }
    }

    /// Cases whose optimum is the min-cost path itself.
    pub fn is_trivial(self) -> bool {
        matches!(self, DrcrCase::TrivialMinCost | DrcrCase::TrivialMinCost5)
    }
}

#[derive(Clone, Debug)]
pub struct CaseAnalysis {
    pub case: DrcrCase,
    pub min_delay: Option<Path>,
    pub min_cost: Option<Path>,
}

impl CaseAnalysis {
    /// The optimum when the case is trivial.
    pub fn trivial_optimum(&self) -> Option<&Path> {
        if self.case.is_trivial() {
            self.min_cost.as_ref()
        } else {
            None
        }
    }
}

/// Case from the two reference delays. `None` delays mean `dst` is
/// unreachable.
pub fn case_of(lower: u64, upper: u64, min_delay: u64, min_cost_delay: u64) -> DrcrCase {
    if upper < min_delay {
        DrcrCase::Infeasible
    } else if lower <= min_delay {
        if min_cost_delay <= upper {
            DrcrCase::TrivialMinCost
        } else {
            DrcrCase::Degenerated
        }
    } else if min_cost_delay < lower {
        DrcrCase::NonTrivial6
    } else if min_cost_delay <= upper {
        DrcrCase::TrivialMinCost5
    } else {
        DrcrCase::NonTrivial4
    }
}

pub fn classify_case(net: &Network, q: &DrcrQuery) -> Result<CaseAnalysis, DrcrError> {
    q.validate(net)?;
    let delay = build_reverse_tree(net, q.dst, Metric::Delay);
    let cost = build_reverse_tree(net, q.dst, Metric::Cost);
    Ok(analyze(net, q, &delay, &cost))
}

fn analyze(
    net: &Network,
    q: &DrcrQuery,
    delay: &crate::tree::ShortestTree,
    cost: &crate::tree::ShortestTree,
) -> CaseAnalysis {
    let min_delay = delay.path(net, q.src);
    let min_cost = cost.path(net, q.src);
    let case = match (&min_delay, &min_cost) {
        (Some(md), Some(mc)) => case_of(q.lower, q.upper, md.delay(), mc.delay()),
        _ => DrcrCase::Infeasible,
    };
    CaseAnalysis {
        case,
        min_delay,
        min_cost,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PulseOptions {
    /// Largest-delay-first branch ordering.
    pub ldf: bool,
    /// Replace the cost cut with the joint delay/cost cost-function cut.
    pub joint_pruning: bool,
    pub time_limit: Option<Duration>,
    /// Record `(iteration, searched_fraction)` every this many iterations.
    pub trace_interval: Option<u64>,
}

impl Default for PulseOptions {
    fn default() -> Self {
        PulseOptions {
            ldf: true,
            joint_pruning: false,
            time_limit: None,
            trace_interval: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PulseOutcome {
    pub verdict: Verdict<Path>,
    pub stats: SearchStats,
    pub case: Option<DrcrCase>,
}

/// Pulse+ branch and bound: feasibility and cost cuts, per-branch visited
/// tracking, no dominance check.
pub fn pulse_plus(
    net: &Network,
    q: &DrcrQuery,
    opts: &PulseOptions,
) -> Result<PulseOutcome, DrcrError> {
    q.validate(net)?;
    let deadline = Deadline::new(opts.time_limit);
    let trees = DestTrees::new(net, q.dst, None);
    Ok(run_pulse(net, q, opts, &trees, deadline, None))
}

fn run_pulse(
    net: &Network,
    q: &DrcrQuery,
    opts: &PulseOptions,
    trees: &DestTrees,
    deadline: Deadline,
    case: Option<DrcrCase>,
) -> PulseOutcome {
    let order = if opts.ldf {
        ldf_order(net, &trees.delay)
    } else {
        EgressOrder::natural(net)
    };
    let (cost_fn, build_time) = if opts.joint_pruning {
        let started = Instant::now();
        let cf = compute_cost_functions(net, q.src, q.dst, q.upper);
        (Some(cf), Some(started.elapsed()))
    } else {
        (None, None)
    };
    let search = Search {
        net,
        src: q.src,
        dst: q.dst,
        lower: q.lower,
        upper: q.upper,
        disabled: None,
        trees,
        order: &order,
        cost_fn: cost_fn.as_ref(),
        bound: INF,
        first_feasible: false,
        rules: None,
        deadline,
        trace_interval: opts.trace_interval,
    };
    let out = search.run();
    let mut stats = out.stats;
    stats.cost_function_build = build_time;
    let verdict = if out.timed_out {
        Verdict::Timeout
    } else {
        match out.best {
            Some(p) => Verdict::Optimal(p),
            None => Verdict::Infeasible,
        }
    };
    PulseOutcome {
        verdict,
        stats,
        case,
    }
}

/// Classifies first, answers Cases 1, 3 and 5 directly and runs Pulse+ for
/// the rest.
pub fn solve_drcr(
    net: &Network,
    q: &DrcrQuery,
    opts: &PulseOptions,
) -> Result<PulseOutcome, DrcrError> {
    q.validate(net)?;
    let deadline = Deadline::new(opts.time_limit);
    let trees = DestTrees::new(net, q.dst, None);
    let analysis = analyze(net, q, &trees.delay, &trees.cost);
    let direct = |verdict| PulseOutcome {
        verdict,
        stats: SearchStats {
            elapsed: deadline.elapsed(),
            searched_fraction: 1.0,
            ..SearchStats::default()
        },
        case: Some(analysis.case),
    };
    match analysis.case {
        DrcrCase::Infeasible => Ok(direct(Verdict::Infeasible)),
        DrcrCase::TrivialMinCost | DrcrCase::TrivialMinCost5 => Ok(direct(Verdict::Optimal(
            analysis.min_cost.clone().expect("reachable in trivial case"),
        ))),
        case => Ok(run_pulse(net, q, opts, &trees, deadline, Some(case))),
    }
}
