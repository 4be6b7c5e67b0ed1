//! Delay-range constrained routing (DRCR) and its Srlg-disjoint variant.
//!
//! [`drcr::solve_drcr`] and [`drcr::pulse_plus`] find a least-cost elementary
//! path whose delay lies in `[L, U]`. [`srlg::cose_pulse_plus`] adds an
//! Srlg-disjoint backup path within a delay window of the active path.
//! [`ksp`] holds the k-shortest-path baselines, [`testgen`] the corpus
//! generators and [`oracle`] exhaustive reference solvers.
//!
//! ```
//! use drcr_core::{load_network, pulse_plus, DrcrQuery, PulseOptions, Verdict};
//!
//! let net = load_network("0,s,a,1,1,\n1,a,t,1,1,\n2,s,t,9,4,\n")?;
//! let (s, t) = (net.node_by_name("s").unwrap(), net.node_by_name("t").unwrap());
//! let out = pulse_plus(&net, &DrcrQuery::new(s, t, 3, 5), &PulseOptions::default())?;
//! let Verdict::Optimal(path) = &out.verdict else { panic!("feasible") };
//! assert_eq!((path.cost(), path.delay()), (9, 4));
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod bitset;
pub mod drcr;
pub mod fixtures;
pub mod graph;
pub mod joint;
pub mod ksp;
pub mod oracle;
mod pulse;
pub mod records;
pub mod solution;
pub mod srlg;
pub mod testgen;
pub mod tree;

pub use drcr::{
    classify_case, pulse_plus, solve_drcr, DrcrCase, DrcrError, DrcrQuery, PulseOptions,
    PulseOutcome,
};
pub use graph::{load_network, Network, NetworkBuilder, Path};
pub use pulse::{ldf_order, EgressOrder, GroupRef};
pub use solution::{SearchStats, Verdict};
pub use srlg::{cose_pulse_plus, PathPair, SrlgDrcrQuery};
