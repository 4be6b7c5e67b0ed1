//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::time::{Duration, Instant};

use drcr_core::drcr::{pulse_plus, DrcrQuery, PulseOptions};
use drcr_core::graph::{is_elementary, Network, Path};
use drcr_core::joint::compute_cost_functions;
use drcr_core::ksp::{cost_ksp_drcr, delay_ksp_drcr, lagrangian_ksp_drcr};
use drcr_core::oracle::{brute_cost_function, brute_drcr, brute_srlg_drcr, verify_conflict_set};
use drcr_core::solution::Verdict;
use drcr_core::srlg::{cose_pulse_plus, ConflictSet, PathPair, SrlgDrcrQuery};
use drcr_core::testgen::{
    classify_trap, gen_drcr_corpus, gen_er_network, gen_srlg_query, GenConfig, SrlgStyle, TrapClass,
};
use drcr_core::tree::{build_forward_tree, build_reverse_tree, Metric, INF};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// Every path or pair returned anywhere in the suite, checked for criterion 10.
#[derive(Default)]
struct Validity {
    checked: usize,
    failures: Vec<String>,
}

impl Validity {
    fn path(&mut self, net: &Network, p: &Path, q: &DrcrQuery, what: &str) {
        self.checked += 1;
        let ok = is_elementary(net, p)
            && p.sums_consistent(net)
            && p.source(net) == Some(q.src)
            && p.target(net) == Some(q.dst)
            && (q.lower..=q.upper).contains(&p.delay());
        if !ok {
            self.failures.push(format!("{what}: {:?} for {q:?}", p.links()));
        }
    }

    fn pair(&mut self, net: &Network, pair: &PathPair, q: &SrlgDrcrQuery, what: &str) {
        self.checked += 1;
        if let Err(e) = pair.check(net, q) {
            self.failures.push(format!("{what}: {e} for {q:?}"));
        }
    }
}

struct DrcrInstance {
    net: Network,
    q: DrcrQuery,
    optimum: Option<u64>,
}

fn small_drcr_corpus() -> Vec<DrcrInstance> {
    let ps = [0.3, 0.5, 0.8];
    (0..500u64)
        .map(|seed| {
            let n = 4 + (seed % 9) as usize;
            let net = gen_er_network(&GenConfig {
                n,
                p_override: Some(ps[(seed % 3) as usize]),
                seed,
                ..GenConfig::default()
            });
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA5A5);
            let s = rng.random_range(0..n);
            let t = (s + rng.random_range(1..n)) % n;
            let dmd = build_reverse_tree(&net, t, Metric::Delay).value(s);
            let anchor = if dmd == INF { 10 } else { dmd };
            let lower = (anchor + rng.random_range(0..=15)).saturating_sub(5);
            let upper = lower + rng.random_range(0..=20);
            let q = DrcrQuery::new(s, t, lower, upper);
            let optimum = brute_drcr(&net, &q).expect("oracle within guard").map(|r| r.0);
            DrcrInstance { net, q, optimum }
        })
        .collect()
}

fn cost_of(v: &Verdict<Path>) -> Result<Option<u64>, String> {
    match v {
        Verdict::Optimal(p) => Ok(Some(p.cost())),
        Verdict::Infeasible => Ok(None),
        Verdict::Timeout => Err("unexpected timeout".into()),
    }
}

fn criterion_1(corpus: &[DrcrInstance], oracle_time: Duration, validity: &mut Validity) -> Outcome {
    let started = Instant::now();
    let mut mismatches = Vec::new();
    let feasible = corpus.iter().filter(|i| i.optimum.is_some()).count();
    for (idx, inst) in corpus.iter().enumerate() {
        let out = pulse_plus(&inst.net, &inst.q, &PulseOptions::default()).map_err(|e| e.to_string())?;
        if let Verdict::Optimal(p) = &out.verdict {
            validity.path(&inst.net, p, &inst.q, "pulse+");
        }
        let got = cost_of(&out.verdict)?;
        if got != inst.optimum {
            mismatches.push(format!("#{idx}: {got:?} vs {:?}", inst.optimum));
        }
    }
    let secs = (started.elapsed() + oracle_time).as_secs_f64();
    if mismatches.is_empty() && secs < 60.0 {
        Ok(format!(
            "{} instances ({feasible} feasible) match the oracle; oracle plus solver took {secs:.2}s",
            corpus.len()
        ))
    } else {
        Err(format!("{} mismatches {:?}, {secs:.2}s", mismatches.len(), mismatches.first()))
    }
}

fn criterion_2(corpus: &[DrcrInstance], validity: &mut Validity) -> Outcome {
    let mut mismatches = Vec::new();
    for (idx, inst) in corpus.iter().enumerate() {
        let runs = [
            ("cost-ksp", cost_ksp_drcr(&inst.net, &inst.q, None)),
            ("delay-ksp", delay_ksp_drcr(&inst.net, &inst.q, None)),
            ("lagrangian-ksp", lagrangian_ksp_drcr(&inst.net, &inst.q, None)),
        ];
        for (name, out) in runs {
            let out = out.map_err(|e| format!("{name}: {e}"))?;
            if let Verdict::Optimal(p) = &out.verdict {
                validity.path(&inst.net, p, &inst.q, name);
            }
            let got = cost_of(&out.verdict)?;
            if got != inst.optimum {
                mismatches.push(format!("{name} #{idx}: {got:?} vs {:?}", inst.optimum));
            }
        }
    }
    if mismatches.is_empty() {
        Ok(format!("cost-, delay- and lagrangian-ksp agree on {} instances", corpus.len()))
    } else {
        Err(format!("{} mismatches, first {:?}", mismatches.len(), mismatches.first()))
    }
}

fn srlg_network(seed: u64) -> Network {
    let ps = [0.3, 0.5, 0.8];
    let n = 4 + (seed % 7) as usize;
    let net = gen_er_network(&GenConfig {
        n,
        p_override: Some(ps[(seed % 3) as usize]),
        seed: seed + 10_000,
        ..GenConfig::default()
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED);
    let m = net.link_count();
    let groups = if m == 0 {
        Vec::new()
    } else {
        let k = rng.random_range(1..=8);
        (0..k)
            .map(|_| {
                let size = rng.random_range(1..=m.div_ceil(3).max(1));
                sample(&mut rng, m, size).into_vec()
            })
            .collect()
    };
    net.with_srlgs(groups).expect("valid groups")
}

fn criteria_3_4(validity: &mut Validity) -> (Outcome, Outcome) {
    let mut mismatches = Vec::new();
    let mut feasible = 0;
    let mut conflict_sets: Vec<(Network, SrlgDrcrQuery, ConflictSet)> = Vec::new();
    for seed in 0..300u64 {
        let net = srlg_network(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC0FFEE);
        let n = net.node_count();
        let s = rng.random_range(0..n);
        let t = (s + rng.random_range(1..n)) % n;
        let dmd = build_reverse_tree(&net, t, Metric::Delay).value(s);
        let upper = if dmd == INF { 20 } else { (5 * dmd).div_ceil(2) };
        let q = SrlgDrcrQuery::new(s, t, upper, rng.random_range(0..=4));
        let want = brute_srlg_drcr(&net, &q).expect("oracle within guard").map(|r| r.0);
        let out = cose_pulse_plus(&net, &q, None).expect("valid query");
        let got = match &out.verdict {
            Verdict::Optimal(pair) => {
                validity.pair(&net, pair, &q, "cose-pulse+");
                Some(pair.active.cost())
            }
            Verdict::Infeasible => None,
            Verdict::Timeout => {
                mismatches.push(format!("seed {seed}: timeout"));
                continue;
            }
        };
        feasible += usize::from(want.is_some());
        if got != want || out.stats.duplicate_instances != 0 {
            mismatches.push(format!(
                "seed {seed}: {got:?} vs {want:?}, {} duplicate instances",
                out.stats.duplicate_instances
            ));
        }
        for t in out.stats.conflict_sets {
            conflict_sets.push((net.clone(), q, t));
        }
    }
    let c3 = if mismatches.is_empty() {
        Ok(format!("300 instances ({feasible} feasible) match the pair oracle"))
    } else {
        Err(format!("{} mismatches, first {:?}", mismatches.len(), mismatches.first()))
    };

    let mut invalid = Vec::new();
    for (net, q, t) in &conflict_sets {
        if !verify_conflict_set(net, q, t).expect("oracle within guard") {
            invalid.push(format!("{t:?} for {q:?}"));
        }
    }
    let c4 = if conflict_sets.is_empty() {
        Err("no conflict sets were emitted, nothing verified".into())
    } else if invalid.is_empty() {
        Ok(format!("{} emitted conflict sets all verified", conflict_sets.len()))
    } else {
        Err(format!("{} of {} invalid, first {:?}", invalid.len(), conflict_sets.len(), invalid.first()))
    };
    (c3, c4)
}

fn criterion_5(corpus: &[DrcrInstance], validity: &mut Validity) -> Outcome {
    let mut compared = 0usize;
    for seed in 0..100u64 {
        let n = 3 + (seed % 8) as usize;
        let net = gen_er_network(&GenConfig {
            n,
            p_override: Some([0.3, 0.5, 0.8][(seed % 3) as usize]),
            seed: seed + 20_000,
            ..GenConfig::default()
        });
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = rng.random_range(0..n);
        let t = (s + rng.random_range(1..n)) % n;
        let upper = rng.random_range(0..=30);
        let cf = compute_cost_functions(&net, s, t, upper);
        let table = brute_cost_function(&net, t, upper).map_err(|e| e.to_string())?;
        let from_s = build_forward_tree(&net, s, Metric::Delay);
        for (u, row) in table.iter().enumerate() {
            let reach = from_s.value(u);
            if reach > upper {
                if !cf.pairs(u).is_empty() {
                    return Err(format!("seed {seed}: node {u} unreachable within U has pairs"));
                }
                continue;
            }
            for l in 0..=(upper - reach) {
                compared += 1;
                if cf.eval(u, l) != row[l as usize] {
                    return Err(format!(
                        "seed {seed}: f_{u}({l}) = {} but oracle says {}",
                        cf.eval(u, l),
                        row[l as usize]
                    ));
                }
            }
        }
    }
    for (idx, inst) in corpus.iter().enumerate() {
        for ldf in [true, false] {
            for joint_pruning in [true, false] {
                let opts = PulseOptions {
                    ldf,
                    joint_pruning,
                    ..PulseOptions::default()
                };
                let out = pulse_plus(&inst.net, &inst.q, &opts).map_err(|e| e.to_string())?;
                if let Verdict::Optimal(p) = &out.verdict {
                    validity.path(&inst.net, p, &inst.q, "pulse+ options");
                }
                if cost_of(&out.verdict)? != inst.optimum {
                    return Err(format!("#{idx}: ldf={ldf} joint={joint_pruning} changed the cost"));
                }
            }
        }
    }
    Ok(format!(
        "{compared} (u, l) values equal the oracle on 100 instances; all option combinations agree on {} queries",
        corpus.len()
    ))
}

fn median(mut v: Vec<u64>) -> u64 {
    v.sort_unstable();
    v[v.len().div_ceil(2) - 1]
}

fn criteria_6_7(validity: &mut Validity) -> (Outcome, Outcome) {
    let net = gen_er_network(&GenConfig {
        n: 4000,
        p_mult: 3.0,
        seed: 1,
        ..GenConfig::default()
    });
    let queries = gen_drcr_corpus(&net, 100, 200);
    if queries.len() < 200 {
        let msg = format!("only {} queries generated", queries.len());
        return (Err(msg.clone()), Err(msg));
    }
    let limit = Some(Duration::from_secs(10));
    let run = |ldf: bool, joint_pruning: bool, validity: &mut Validity| {
        let mut iterations = Vec::new();
        let mut overhead = Vec::new();
        let mut timeouts = 0;
        for q in &queries {
            let opts = PulseOptions {
                ldf,
                joint_pruning,
                time_limit: limit,
                trace_interval: None,
            };
            let out = pulse_plus(&net, q, &opts).expect("valid query");
            if let Verdict::Optimal(p) = &out.verdict {
                validity.path(&net, p, q, "pulse+ scale");
            }
            timeouts += usize::from(out.verdict.is_timeout());
            iterations.push(out.stats.iterations);
            overhead.extend(out.stats.overhead_ratio());
        }
        let mean_overhead = overhead.iter().sum::<f64>() / overhead.len().max(1) as f64;
        (median(iterations), timeouts, mean_overhead)
    };
    let (plain, plain_to, _) = run(false, false, validity);
    let (ldf, ldf_to, _) = run(true, false, validity);
    let (joint, joint_to, overhead) = run(true, true, validity);
    let r6 = ldf as f64 / plain as f64;
    let c6 = format!(
        "median iterations {ldf} with LDF vs {plain} without (ratio {r6:.3}, limit 0.8; timeouts {ldf_to}/{plain_to})"
    );
    let r7 = joint as f64 / ldf as f64;
    let c7 = format!(
        "median iterations {joint} with joint pruning vs {ldf} (ratio {r7:.3}, limit 0.5; timeouts {joint_to}); mean overhead ratio {overhead:.3}"
    );
    (
        if r6 <= 0.8 { Ok(c6) } else { Err(c6) },
        if r7 <= 0.5 { Ok(c7) } else { Err(c7) },
    )
}

fn criterion_8(validity: &mut Validity) -> Outcome {
    let net = gen_er_network(&GenConfig {
        n: 1000,
        p_mult: 1.0,
        seed: 2,
        ..GenConfig::default()
    });
    let queries = gen_drcr_corpus(&net, 7, 100);
    if queries.len() < 100 {
        return Err(format!("only {} queries generated", queries.len()));
    }
    let mut times = Vec::new();
    let mut completed = 0;
    for q in &queries {
        let opts = PulseOptions {
            time_limit: Some(Duration::from_secs(10)),
            ..PulseOptions::default()
        };
        let started = Instant::now();
        let out = pulse_plus(&net, q, &opts).expect("valid query");
        times.push(started.elapsed().as_micros() as u64);
        if let Verdict::Optimal(p) = &out.verdict {
            validity.path(&net, p, q, "pulse+ 1000");
        }
        completed += usize::from(!out.verdict.is_timeout());
    }
    let med = median(times.clone());
    let msg = format!(
        "{completed}/100 completed, median {med} us, max {} us (limit 50000 us)",
        times.iter().max().unwrap()
    );
    if completed == 100 && med <= 50_000 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_9(validity: &mut Validity) -> Outcome {
    let net = gen_er_network(&GenConfig {
        n: 100,
        p_mult: 2.0,
        seed: 3,
        srlg_style: SrlgStyle::Star,
        ..GenConfig::default()
    });
    let count = 300u64;
    let mut fractions = Vec::new();
    for delta in [1u64, 2, 4, 8] {
        let mut traps = 0;
        for s in 0..count {
            let q = gen_srlg_query(&net, 1000 + s, delta).map_err(|e| e.to_string())?;
            match classify_trap(&net, &q, Some(Duration::from_secs(10))) {
                Ok(TrapClass::Trap) => traps += 1,
                Ok(_) => {}
                Err(e) => return Err(format!("delta {delta}: {e}")),
            }
            if let Ok(out) = cose_pulse_plus(&net, &q, Some(Duration::from_secs(10))) {
                if let Verdict::Optimal(pair) = &out.verdict {
                    validity.pair(&net, pair, &q, "cose-pulse+ trap corpus");
                }
            }
        }
        fractions.push(traps as f64 / count as f64);
    }
    let inversions: Vec<f64> = fractions
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&d| d > 0.0)
        .collect();
    let shown: Vec<String> = fractions.iter().map(|f| format!("{:.3}", f)).collect();
    let msg = format!("trap fractions for delta 1,2,4,8: {}", shown.join(", "));
    if inversions.len() <= 1 && inversions.iter().all(|&d| d <= 0.01 + 1e-12) {
        Ok(msg)
    } else {
        Err(format!("{msg}; inversions {inversions:?}"))
    }
}

fn criterion_10(validity: &Validity) -> Outcome {
    if validity.checked == 0 {
        return Err("nothing was checked".into());
    }
    if validity.failures.is_empty() {
        Ok(format!("{} returned paths and pairs all valid", validity.checked))
    } else {
        Err(format!(
            "{} of {} invalid, first {:?}",
            validity.failures.len(),
            validity.checked,
            validity.failures.first()
        ))
    }
}

fn main() {
    let mut validity = Validity::default();
    let mut results: Vec<(u8, &str, Outcome)> = Vec::new();
    let oracle_started = Instant::now();
    let corpus = small_drcr_corpus();
    let oracle_time = oracle_started.elapsed();

    results.push((1, "DRCR optimality", criterion_1(&corpus, oracle_time, &mut validity)));
    results.push((2, "KSP agreement", criterion_2(&corpus, &mut validity)));
    let (c3, c4) = criteria_3_4(&mut validity);
    results.push((3, "Srlg-disjoint optimality", c3));
    results.push((4, "conflict-set validity", c4));
    results.push((5, "joint-pruning correctness", criterion_5(&corpus, &mut validity)));
    let (c6, c7) = criteria_6_7(&mut validity);
    results.push((6, "LDF iteration reduction", c6));
    results.push((7, "joint-pruning iteration reduction", c7));
    results.push((8, "scale completion", criterion_8(&mut validity)));
    results.push((9, "trap-rate trend", criterion_9(&mut validity)));
    results.push((10, "validity sweep", criterion_10(&validity)));

    let mut failed = 0;
    for (n, name, outcome) in &results {
        match outcome {
            Ok(msg) => println!("criterion {n:>2} PASS  {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {msg}");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
