use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use drcr_core::records::{parse_jsonl, summarize, ResultRecord};

use crate::read;

#[derive(Args)]
pub struct ReportArgs {
    /// One or more JSONL files written by `solve`.
    #[arg(long, num_args = 1.., required = true)]
    results: Vec<PathBuf>,
    /// Output CSV file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Renders timed-out percentiles as ">limit_us" instead of ">LIMIT".
    #[arg(long)]
    time_limit_ms: Option<u64>,
}

pub fn run(args: &ReportArgs) -> Result<()> {
    let mut records: Vec<ResultRecord> = Vec::new();
    for path in &args.results {
        let parsed: Vec<ResultRecord> =
            parse_jsonl(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
        records.extend(parsed);
    }
    let rows = summarize(&records)?;
    let limit_us = args.time_limit_ms.map(|ms| ms.saturating_mul(1000));

    let sink: Box<dyn std::io::Write> = match &args.out {
        Some(path) => Box::new(std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["topology", "algo", "p50_us", "p75_us", "p99_us", "completion_rate"])?;
    for row in rows {
        w.write_record([
            row.topology,
            row.algo,
            row.p50.render(limit_us),
            row.p75.render(limit_us),
            row.p99.render(limit_us),
            format!("{:.4}", row.completion_rate),
        ])?;
    }
    w.flush()?;
    Ok(())
}
