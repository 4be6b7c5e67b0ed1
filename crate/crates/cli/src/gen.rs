use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use drcr_core::records::{to_jsonl, QueryRecord};
use drcr_core::testgen::{gen_drcr_corpus_seeded, gen_er_network, gen_srlg_query, GenConfig, Manifest, SrlgStyle};

use crate::{CaseKind, StyleArg};

#[derive(Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 100)]
    nodes: usize,
    /// Link probability is pmult * ln(n) / n.
    #[arg(long, default_value_t = 1.0)]
    pmult: f64,
    /// Use this link probability instead of the pmult rule.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = CaseKind::Drcr)]
    cases: CaseKind,
    /// Number of queries.
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Defaults to star for srlg corpora and none otherwise.
    #[arg(long, value_enum)]
    srlg_style: Option<StyleArg>,
    /// Smallest and largest non-star group size.
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"])]
    srlg_size: Option<Vec<usize>>,
    /// Backup delay tolerance for srlg corpora.
    #[arg(long, default_value_t = 4)]
    delta: u64,
    /// Largest U - L gap for DRCR queries.
    #[arg(long, default_value_t = 20)]
    gap: u64,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
}

pub fn run(args: &GenArgs) -> Result<()> {
    if args.nodes < 2 {
        bail!("--nodes must be at least 2");
    }
    if let Some(p) = args.p {
        if !(0.0..=1.0).contains(&p) {
            bail!("--p must lie in [0, 1]");
        }
    }
    let style = match args.srlg_style.unwrap_or(match args.cases {
        CaseKind::Srlg => StyleArg::Star,
        CaseKind::Drcr => StyleArg::None,
    }) {
        StyleArg::None => SrlgStyle::None,
        StyleArg::Star => SrlgStyle::Star,
        StyleArg::Nonstar => SrlgStyle::Nonstar,
    };
    let mut cfg = GenConfig {
        n: args.nodes,
        p_mult: args.pmult,
        p_override: args.p,
        seed: args.seed,
        srlg_style: style,
        ul_gap_max: args.gap,
        ..GenConfig::default()
    };
    if let Some(range) = &args.srlg_size {
        if range[0] == 0 || range[0] > range[1] {
            bail!("--srlg-size needs 1 <= MIN <= MAX");
        }
        cfg.srlg_size_range = range[0]..=range[1];
    }
    let net = gen_er_network(&cfg);

    let (kind, seeds, records) = match args.cases {
        CaseKind::Drcr => {
            let corpus = gen_drcr_corpus_seeded(&net, args.seed, args.count, args.gap);
            let records: Vec<QueryRecord> = corpus.iter().map(|(_, q)| QueryRecord::drcr(&net, q)).collect();
            ("drcr", corpus.into_iter().map(|(s, _)| s).collect::<Vec<_>>(), records)
        }
        CaseKind::Srlg => {
            let mut seeds = Vec::new();
            let mut records = Vec::new();
            for i in 0..args.count as u64 {
                let qseed = args.seed.wrapping_add(i);
                if let Ok(q) = gen_srlg_query(&net, qseed, args.delta) {
                    seeds.push(qseed);
                    records.push(QueryRecord::srlg(&net, &q));
                }
            }
            ("srlg", seeds, records)
        }
    };
    if records.len() < args.count {
        eprintln!("warning: generated {} of {} queries", records.len(), args.count);
    }

    let manifest = Manifest {
        link_probability: cfg.link_probability(),
        config: cfg,
        nodes: net.node_count(),
        links: net.link_count(),
        srlgs: net.srlg_count(),
        query_seeds: seeds,
        kind: kind.into(),
    };

    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    write(&args.out.join("graph.csv"), &net.to_edge_list())?;
    write(&args.out.join("queries.jsonl"), &to_jsonl(&records))?;
    write(
        &args.out.join("manifest.json"),
        &(serde_json::to_string_pretty(&manifest)? + "\n"),
    )?;
    Ok(())
}

fn write(path: &PathBuf, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
