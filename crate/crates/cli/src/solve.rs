use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::Args;
use drcr_core::drcr::{pulse_plus, PulseOptions};
use drcr_core::graph::{load_network, Network};
use drcr_core::ksp::{
    cost_ksp_drcr, delay_ksp_drcr, lagrangian_ksp_drcr, srlg_ksp_drcr, srlg_lagrangian_ksp, KspOrder,
};
use drcr_core::records::{parse_jsonl, to_jsonl, Query, QueryRecord, ResultRecord};
use drcr_core::srlg::cose_pulse_plus;

use crate::{read, Algo};

#[derive(Args)]
pub struct SolveArgs {
    /// Edge list: link_id,src,dst,cost,delay,srlg_ids.
    #[arg(long)]
    graph: PathBuf,
    /// JSON Lines queries, {"src","dst","L","U"} or {"src","dst","U","delta"}.
    #[arg(long)]
    queries: PathBuf,
    #[arg(long, value_enum)]
    algo: Algo,
    /// Per-query limit; fractions are allowed (0.001 is one microsecond).
    #[arg(long, default_value_t = 10_000.0)]
    time_limit_ms: f64,
    /// Largest-delay-first branch ordering (pulse+ only).
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    ldf: bool,
    /// Delay-budget cost functions for pruning (pulse+ only).
    #[arg(long)]
    joint_pruning: bool,
    /// Worker threads; results keep input order.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Label written to every record; defaults to the graph file's parent
    /// directory name.
    #[arg(long)]
    topology: Option<String>,
    /// Output JSONL file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: &SolveArgs) -> Result<()> {
    if !(args.time_limit_ms >= 0.0 && args.time_limit_ms.is_finite()) {
        bail!("--time-limit-ms must be a non-negative number");
    }
    let net = load_network(&read(&args.graph)?).with_context(|| format!("parsing {}", args.graph.display()))?;
    let records: Vec<QueryRecord> =
        parse_jsonl(&read(&args.queries)?).with_context(|| format!("parsing {}", args.queries.display()))?;
    let queries = records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let q = r.resolve(&net).with_context(|| format!("query {}", i + 1))?;
            match (q, args.algo.is_srlg()) {
                (Query::Drcr(_), true) => bail!("query {}: {} needs a delta field", i + 1, args.algo.name()),
                (Query::Srlg(_), false) => bail!("query {}: {} takes DRCR queries", i + 1, args.algo.name()),
                _ => Ok(q),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let topology = args.topology.clone().unwrap_or_else(|| {
        args.graph
            .canonicalize()
            .ok()
            .and_then(|p| p.parent()?.file_name().map(|s| s.to_string_lossy().into_owned()))
            .unwrap_or_else(|| "graph".into())
    });
    let limit = Duration::from_secs_f64(args.time_limit_ms / 1000.0);
    let solve_one = |q: &Query| -> Result<ResultRecord> {
        let mut rec = solve(&net, q, args, limit)?;
        rec.topology = Some(topology.clone());
        rec.algo = Some(args.algo.name().into());
        Ok(rec)
    };

    let results: Vec<ResultRecord> = if args.jobs <= 1 {
        queries.iter().map(solve_one).collect::<Result<_>>()?
    } else {
        let chunk = queries.len().div_ceil(args.jobs).max(1);
        std::thread::scope(|scope| {
            let handles: Vec<_> = queries
                .chunks(chunk)
                .map(|part| scope.spawn(|| part.iter().map(solve_one).collect::<Result<Vec<_>>>()))
                .collect();
            let mut all = Vec::with_capacity(queries.len());
            for h in handles {
                all.extend(h.join().expect("solver thread panicked")?);
            }
            Ok::<_, anyhow::Error>(all)
        })?
    };

    let text = to_jsonl(&results);
    match &args.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn solve(net: &Network, q: &Query, args: &SolveArgs, limit: Duration) -> Result<ResultRecord> {
    let limit_opt = Some(limit);
    Ok(match (*q, args.algo) {
        (Query::Drcr(q), Algo::Pulse) => {
            let opts = PulseOptions {
                ldf: args.ldf,
                joint_pruning: args.joint_pruning,
                time_limit: limit_opt,
                trace_interval: None,
            };
            ResultRecord::from_pulse(net, &pulse_plus(net, &q, &opts)?)
        }
        (Query::Drcr(q), Algo::CostKsp) => ResultRecord::from_ksp(net, &cost_ksp_drcr(net, &q, limit_opt)?),
        (Query::Drcr(q), Algo::DelayKsp) => ResultRecord::from_ksp(net, &delay_ksp_drcr(net, &q, limit_opt)?),
        (Query::Drcr(q), Algo::LagrangianKsp) => {
            ResultRecord::from_ksp(net, &lagrangian_ksp_drcr(net, &q, limit_opt)?)
        }
        (Query::Srlg(q), Algo::CosePulse) => ResultRecord::from_cose(net, &cose_pulse_plus(net, &q, limit_opt)?),
        (Query::Srlg(q), Algo::SrlgCostKsp) => {
            ResultRecord::from_srlg_ksp(net, &srlg_ksp_drcr(net, &q, KspOrder::Cost, limit_opt)?)
        }
        (Query::Srlg(q), Algo::SrlgDelayKsp) => {
            ResultRecord::from_srlg_ksp(net, &srlg_ksp_drcr(net, &q, KspOrder::Delay, limit_opt)?)
        }
        (Query::Srlg(q), Algo::SrlgLagrangianKsp) => {
            ResultRecord::from_srlg_ksp(net, &srlg_lagrangian_ksp(net, &q, limit_opt)?)
        }
        _ => unreachable!("query kinds are checked against the algorithm up front"),
    })
}
