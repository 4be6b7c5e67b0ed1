//! Browser bindings. Every call returns a JSON string so the page needs no
//! generated type glue beyond `wasm-bindgen`'s own.

use drcr_core::drcr::{classify_case, pulse_plus, DrcrQuery, PulseOptions};
use drcr_core::graph::{Network, Path};
use drcr_core::srlg::{cose_pulse_plus, SrlgDrcrQuery};
use drcr_core::testgen::{gen_er_network, GenConfig, SrlgStyle};
use drcr_core::tree::{build_reverse_tree, Metric};
use drcr_core::Verdict;
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

const TRACE_EVERY: u64 = 32;

#[wasm_bindgen]
pub struct Demo {
    net: Network,
}

fn path_json(net: &Network, p: &Path) -> Value {
    json!({
        "links": p.links(),
        "nodes": p.nodes(net),
        "delay": p.delay(),
        "cost": p.cost(),
    })
}

#[wasm_bindgen]
impl Demo {
    /// Random network with `nodes` nodes and link probability
    /// `p_mult * ln(n) / n`. `srlg_style` is `none`, `star` or `nonstar`.
    #[wasm_bindgen(constructor)]
    pub fn new(nodes: u32, p_mult: f64, seed: u32, srlg_style: &str) -> Result<Demo, String> {
        if !(2..=2000).contains(&nodes) {
            return Err("node count must be between 2 and 2000".into());
        }
        if !(p_mult > 0.0 && p_mult.is_finite()) {
            return Err("p_mult must be positive".into());
        }
        let srlg_style = match srlg_style {
            "none" => SrlgStyle::None,
            "star" => SrlgStyle::Star,
            "nonstar" => SrlgStyle::Nonstar,
            other => return Err(format!("unknown Srlg style {other:?}")),
        };
        let net = gen_er_network(&GenConfig {
            n: nodes as usize,
            p_mult,
            seed: seed.into(),
            srlg_style,
            srlg_size_range: 1..=4,
            ..GenConfig::default()
        });
        Ok(Demo { net })
    }

    /// `{"nodes": n, "links": [{"id","from","to","delay","cost","srlgs"}]}`.
    pub fn graph(&self) -> String {
        let links: Vec<Value> = self
            .net
            .links()
            .iter()
            .enumerate()
            .map(|(id, l)| {
                json!({"id": id, "from": l.from, "to": l.to, "delay": l.delay, "cost": l.cost, "srlgs": l.srlgs})
            })
            .collect();
        json!({"nodes": self.net.node_count(), "srlgs": self.net.srlg_count(), "links": links}).to_string()
    }

    /// Least delay from `src` to `dst`, or -1 when unreachable. Handy for
    /// picking sensible delay bounds in the page.
    pub fn min_delay(&self, src: u32, dst: u32) -> Result<f64, String> {
        self.check(src)?;
        self.check(dst)?;
        let d = build_reverse_tree(&self.net, dst as usize, Metric::Delay).value(src as usize);
        Ok(if d == drcr_core::tree::INF { -1.0 } else { d as f64 })
    }

    /// Pulse+ on `(src, dst, [lower, upper])` with the search-space trace.
    pub fn solve_drcr(
        &self,
        src: u32,
        dst: u32,
        lower: u32,
        upper: u32,
        ldf: bool,
        joint_pruning: bool,
    ) -> Result<String, String> {
        let q = DrcrQuery::new(src as usize, dst as usize, lower.into(), upper.into());
        let case = classify_case(&self.net, &q).map_err(|e| e.to_string())?;
        let opts = PulseOptions {
            ldf,
            joint_pruning,
            time_limit: None,
            trace_interval: Some(TRACE_EVERY),
        };
        let out = pulse_plus(&self.net, &q, &opts).map_err(|e| e.to_string())?;
        Ok(json!({
            "case": case.case.number(),
            "status": out.verdict.status(),
            "path": out.verdict.solution().map(|p| path_json(&self.net, p)),
            "iterations": out.stats.iterations,
            "searched_fraction": out.stats.searched_fraction,
            "space_trace": out.stats.space_trace,
            "best_cost_trace": out.stats.best_cost_trace,
        })
        .to_string())
    }

    /// CoSE-Pulse+ for an Srlg-disjoint active/backup pair.
    pub fn solve_pair(&self, src: u32, dst: u32, upper: u32, delta: u32) -> Result<String, String> {
        let q = SrlgDrcrQuery::new(src as usize, dst as usize, upper.into(), delta.into());
        let out = cose_pulse_plus(&self.net, &q, None).map_err(|e| e.to_string())?;
        let (active, backup) = match &out.verdict {
            Verdict::Optimal(pair) => (
                Some(path_json(&self.net, &pair.active)),
                Some(path_json(&self.net, &pair.backup)),
            ),
            _ => (None, None),
        };
        let conflict_sets: Vec<&[usize]> = out.stats.conflict_sets.iter().map(|t| t.srlgs.as_slice()).collect();
        Ok(json!({
            "status": out.verdict.status(),
            "active": active,
            "backup": backup,
            "subinstances": out.stats.subinstances,
            "iterations": out.stats.iterations,
            "conflict_sets": conflict_sets,
        })
        .to_string())
    }
}

impl Demo {
    fn check(&self, node: u32) -> Result<(), String> {
        self.net.check_node(node as usize).map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn graph_round_trips_counts() {
        let demo = Demo::new(30, 2.0, 4, "star").unwrap();
        let g = parse(&demo.graph());
        assert_eq!(g["nodes"], 30);
        assert_eq!(g["links"].as_array().unwrap().len(), demo.net.link_count());
        assert!(g["srlgs"].as_u64().unwrap() > 0);
    }

    #[test]
    fn drcr_answer_matches_library() {
        let demo = Demo::new(40, 2.0, 1, "none").unwrap();
        let (s, t) = (0..40u32)
            .flat_map(|s| (0..40u32).map(move |t| (s, t)))
            .find(|&(s, t)| s != t && demo.min_delay(s, t).unwrap() > 0.0)
            .unwrap();
        let dmd = demo.min_delay(s, t).unwrap() as u32;
        let v = parse(&demo.solve_drcr(s, t, dmd + 2, dmd + 6, true, false).unwrap());
        let q = DrcrQuery::new(s as usize, t as usize, (dmd + 2).into(), (dmd + 6).into());
        let lib = pulse_plus(&demo.net, &q, &PulseOptions::default()).unwrap();
        assert_eq!(v["status"], lib.verdict.status());
        assert_eq!(v["path"]["cost"].as_u64(), lib.verdict.solution().map(Path::cost));
        assert!((v["searched_fraction"].as_f64().unwrap() - 1.0).abs() < 1e-6);
        assert!(v["space_trace"].is_array());
        let joint = parse(&demo.solve_drcr(s, t, dmd + 2, dmd + 6, true, true).unwrap());
        assert_eq!(joint["path"]["cost"], v["path"]["cost"]);
    }

    #[test]
    fn pair_is_disjoint_when_found() {
        let demo = Demo::new(25, 3.0, 2, "star").unwrap();
        let mut found = 0;
        for t in 1..25u32 {
            let dmd = demo.min_delay(0, t).unwrap();
            if dmd < 0.0 {
                continue;
            }
            let v = parse(&demo.solve_pair(0, t, (dmd * 2.5).ceil() as u32, 4).unwrap());
            if v["status"] == "optimal" {
                found += 1;
                let links = |k: &str| -> Vec<usize> {
                    v[k]["links"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap() as usize).collect()
                };
                let a = demo.net.srlgs_of_links(&links("active"));
                let b = demo.net.srlgs_of_links(&links("backup"));
                assert!(a.is_disjoint(&b));
            }
        }
        assert!(found > 0);
    }

    #[test]
    fn bad_input_is_an_error() {
        assert!(Demo::new(1, 1.0, 0, "none").is_err());
        assert!(Demo::new(10, 1.0, 0, "ring").is_err());
        let demo = Demo::new(10, 1.0, 0, "none").unwrap();
        assert!(demo.solve_drcr(0, 99, 0, 10, true, false).is_err());
        assert!(demo.solve_drcr(0, 1, 10, 5, true, false).is_err());
        assert!(demo.min_delay(42, 0).is_err());
    }
}
