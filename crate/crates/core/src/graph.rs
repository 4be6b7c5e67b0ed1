//! Directed network with per-link delay, cost and Srlg membership.
//!
//! Nodes, links and Srlgs are stored densely (`0..n`). The labels found in an
//! input file are kept alongside so results can be reported in the caller's
//! vocabulary.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

pub type NodeId = usize;
pub type LinkId = usize;
pub type SrlgId = usize;

/// Upper bound on the sum of all link delays (and, separately, all costs).
/// Keeping totals below this makes every path sum overflow-free.
pub const TOTAL_WEIGHT_LIMIT: u64 = 1 << 62;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: self-loop on node {node}")]
    SelfLoop { line: usize, node: String },
    #[error("line {line}: duplicate link id {id}")]
    DuplicateLink { line: usize, id: u64 },
    #[error("Srlg references unknown link {0}")]
    DanglingSrlg(LinkId),
    #[error("total link {0} reaches 2^62")]
    Overflow(&'static str),
    #[error("unknown link {0}")]
    UnknownLink(LinkId),
    #[error("link {prev} ends at node {end} but link {next} starts at node {start}")]
    Broken {
        prev: LinkId,
        next: LinkId,
        end: NodeId,
        start: NodeId,
    },
    #[error("node {0} out of range")]
    UnknownNode(NodeId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Link {
    pub from: NodeId,
    pub to: NodeId,
    pub delay: u64,
    pub cost: u64,
    /// Srlgs containing this link, ascending.
    pub srlgs: Vec<SrlgId>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Srlg {
    /// Member links, ascending.
    pub links: Vec<LinkId>,
}

#[derive(Clone, Debug)]
pub struct Network {
    node_names: Vec<String>,
    link_labels: Vec<u64>,
    srlg_labels: Vec<u64>,
    links: Vec<Link>,
    srlgs: Vec<Srlg>,
    egress: Vec<Vec<LinkId>>,
    ingress: Vec<Vec<LinkId>>,
}

impl Network {
    pub fn node_count(&self) -> usize {
        self.node_names.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn srlg_count(&self) -> usize {
        self.srlgs.len()
    }

    #[inline]
    pub fn link(&self, id: LinkId) -> &Link {
        &self.links[id]
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn srlg(&self, id: SrlgId) -> &Srlg {
        &self.srlgs[id]
    }

    pub fn srlgs(&self) -> &[Srlg] {
        &self.srlgs
    }

    #[inline]
    pub fn egress(&self, node: NodeId) -> &[LinkId] {
        &self.egress[node]
    }

    #[inline]
    pub fn ingress(&self, node: NodeId) -> &[LinkId] {
        &self.ingress[node]
    }

    pub fn node_name(&self, node: NodeId) -> &str {
        &self.node_names[node]
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.node_names.iter().position(|n| n == name)
    }

    pub fn link_label(&self, link: LinkId) -> u64 {
        self.link_labels[link]
    }

    pub fn srlg_label(&self, srlg: SrlgId) -> u64 {
        self.srlg_labels[srlg]
    }

    pub fn check_node(&self, node: NodeId) -> Result<(), GraphError> {
        if node < self.node_count() {
            Ok(())
        } else {
            Err(GraphError::UnknownNode(node))
        }
    }

    /// Union of the Srlg sets of the given links.
    pub fn srlgs_of_links(&self, links: &[LinkId]) -> BTreeSet<SrlgId> {
        links
            .iter()
            .flat_map(|&l| self.links[l].srlgs.iter().copied())
            .collect()
    }

    /// Returns a copy of this network with the Srlg table replaced.
    pub fn with_srlgs(&self, groups: Vec<Vec<LinkId>>) -> Result<Network, GraphError> {
        let mut b = NetworkBuilder::new();
        for name in &self.node_names {
            b.add_node(name);
        }
        for (i, l) in self.links.iter().enumerate() {
            b.add_link_labeled(self.link_labels[i], l.from, l.to, l.delay, l.cost)?;
        }
        for (i, g) in groups.into_iter().enumerate() {
            let sid = b.srlg(i as u64);
            for l in g {
                b.attach(l, sid)?;
            }
        }
        b.build()
    }

    /// Serializes to the comma-separated edge-list format accepted by
    /// [`load_network`].
    pub fn to_edge_list(&self) -> String {
        let mut out = String::from("# link_id,src,dst,cost,delay,srlg_ids\n");
        for (i, l) in self.links.iter().enumerate() {
            let srlgs: Vec<String> = l
                .srlgs
                .iter()
                .map(|&s| self.srlg_labels[s].to_string())
                .collect();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                self.link_labels[i],
                self.node_names[l.from],
                self.node_names[l.to],
                l.cost,
                l.delay,
                srlgs.join(";")
            ));
        }
        out
    }
}

/// Incremental construction with validation at [`NetworkBuilder::build`].
#[derive(Debug, Default)]
pub struct NetworkBuilder {
    node_names: Vec<String>,
    node_index: HashMap<String, NodeId>,
    link_labels: Vec<u64>,
    link_index: HashMap<u64, LinkId>,
    srlg_labels: Vec<u64>,
    srlg_index: HashMap<u64, SrlgId>,
    links: Vec<Link>,
    srlgs: Vec<Srlg>,
}

impl NetworkBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builder pre-populated with nodes named `0..n`.
    pub fn with_nodes(n: usize) -> Self {
        let mut b = Self::new();
        for i in 0..n {
            b.add_node(&i.to_string());
        }
        b
    }

    /// Returns the id for `name`, creating the node on first use.
    pub fn add_node(&mut self, name: &str) -> NodeId {
        if let Some(&id) = self.node_index.get(name) {
            return id;
        }
        let id = self.node_names.len();
        self.node_names.push(name.to_string());
        self.node_index.insert(name.to_string(), id);
        id
    }

    pub fn node_count(&self) -> usize {
        self.node_names.len()
    }

    /// Adds a link labeled with its dense index.
    pub fn add_link(
        &mut self,
        from: NodeId,
        to: NodeId,
        delay: u64,
        cost: u64,
    ) -> Result<LinkId, GraphError> {
        let label = self.links.len() as u64;
        self.add_link_labeled(label, from, to, delay, cost)
    }

    pub fn add_link_labeled(
        &mut self,
        label: u64,
        from: NodeId,
        to: NodeId,
        delay: u64,
        cost: u64,
    ) -> Result<LinkId, GraphError> {
        let line = self.links.len() + 1;
        for n in [from, to] {
            if n >= self.node_names.len() {
                return Err(GraphError::UnknownNode(n));
            }
        }
        if from == to {
            return Err(GraphError::SelfLoop {
                line,
                node: self.node_names[from].clone(),
            });
        }
        if self.link_index.contains_key(&label) {
            return Err(GraphError::DuplicateLink { line, id: label });
        }
        let id = self.links.len();
        self.link_index.insert(label, id);
        self.link_labels.push(label);
        self.links.push(Link {
            from,
            to,
            delay,
            cost,
            srlgs: Vec::new(),
        });
        Ok(id)
    }

    /// Returns the dense id of the Srlg labeled `label`, creating it on first use.
    pub fn srlg(&mut self, label: u64) -> SrlgId {
        if let Some(&id) = self.srlg_index.get(&label) {
            return id;
        }
        let id = self.srlgs.len();
        self.srlg_labels.push(label);
        self.srlg_index.insert(label, id);
        self.srlgs.push(Srlg::default());
        id
    }

    /// Puts `link` into Srlg `srlg`.
    pub fn attach(&mut self, link: LinkId, srlg: SrlgId) -> Result<(), GraphError> {
        if link >= self.links.len() {
            return Err(GraphError::DanglingSrlg(link));
        }
        if !self.srlgs[srlg].links.contains(&link) {
            self.srlgs[srlg].links.push(link);
            self.links[link].srlgs.push(srlg);
        }
        Ok(())
    }

    pub fn build(mut self) -> Result<Network, GraphError> {
        let mut delay_total: u64 = 0;
        let mut cost_total: u64 = 0;
        for l in &self.links {
            delay_total = delay_total
                .checked_add(l.delay)
                .filter(|&t| t < TOTAL_WEIGHT_LIMIT)
                .ok_or(GraphError::Overflow("delay"))?;
            cost_total = cost_total
                .checked_add(l.cost)
                .filter(|&t| t < TOTAL_WEIGHT_LIMIT)
                .ok_or(GraphError::Overflow("cost"))?;
        }
        let n = self.node_names.len();
        let mut egress = vec![Vec::new(); n];
        let mut ingress = vec![Vec::new(); n];
        for (id, l) in self.links.iter_mut().enumerate() {
            l.srlgs.sort_unstable();
            egress[l.from].push(id);
            ingress[l.to].push(id);
        }
        for s in &mut self.srlgs {
            s.links.sort_unstable();
        }
        Ok(Network {
            node_names: self.node_names,
            link_labels: self.link_labels,
            srlg_labels: self.srlg_labels,
            links: self.links,
            srlgs: self.srlgs,
            egress,
            ingress,
        })
    }
}

/// Parses the edge-list format `link_id,src,dst,cost,delay,srlg_ids`.
///
/// `srlg_ids` is a `;`-separated, possibly empty list of non-negative integers.
/// Blank lines and lines starting with `#` are skipped. Node names are mapped
/// to dense ids in order of first appearance.
pub fn load_network(text: &str) -> Result<Network, GraphError> {
    let mut b = NetworkBuilder::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if fields.len() != 6 {
            return Err(GraphError::Parse {
                line,
                msg: format!("expected 6 comma-separated fields, found {}", fields.len()),
            });
        }
        let num = |s: &str, what: &str| -> Result<u64, GraphError> {
            s.parse::<u64>().map_err(|_| GraphError::Parse {
                line,
                msg: format!("invalid {what} `{s}`"),
            })
        };
        let label = num(fields[0], "link id")?;
        if fields[1].is_empty() || fields[2].is_empty() {
            return Err(GraphError::Parse {
                line,
                msg: "empty node name".into(),
            });
        }
        let from = b.add_node(fields[1]);
        let to = b.add_node(fields[2]);
        let cost = num(fields[3], "cost")?;
        let delay = num(fields[4], "delay")?;
        if from == to {
            return Err(GraphError::SelfLoop {
                line,
                node: fields[1].to_string(),
            });
        }
        let link = b
            .add_link_labeled(label, from, to, delay, cost)
            .map_err(|e| match e {
                GraphError::DuplicateLink { id, .. } => GraphError::DuplicateLink { line, id },
                other => other,
            })?;
        for s in fields[5].split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let sid = b.srlg(num(s, "Srlg id")?);
            b.attach(link, sid)?;
        }
    }
    b.build()
}

/// An ordered link sequence with cached delay and cost.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Path {
    links: Vec<LinkId>,
    delay: u64,
    cost: u64,
}

impl Path {
    /// Validates that `links` chain and computes the sums.
    pub fn new(net: &Network, links: Vec<LinkId>) -> Result<Path, GraphError> {
        for &l in &links {
            if l >= net.link_count() {
                return Err(GraphError::UnknownLink(l));
            }
        }
        for w in links.windows(2) {
            let (a, b) = (net.link(w[0]), net.link(w[1]));
            if a.to != b.from {
                return Err(GraphError::Broken {
                    prev: w[0],
                    next: w[1],
                    end: a.to,
                    start: b.from,
                });
            }
        }
        Ok(Self::from_chain(net, links))
    }

    /// Caller guarantees the links chain.
    pub(crate) fn from_chain(net: &Network, links: Vec<LinkId>) -> Path {
        let (delay, cost) = links.iter().fold((0u64, 0u64), |(d, c), &l| {
            let link = net.link(l);
            (d + link.delay, c + link.cost)
        });
        Path { links, delay, cost }
    }

    pub fn empty() -> Path {
        Path::default()
    }

    pub fn links(&self) -> &[LinkId] {
        &self.links
    }

    pub fn delay(&self) -> u64 {
        self.delay
    }

    pub fn cost(&self) -> u64 {
        self.cost
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    /// Node sequence `From(e1), To(e1), ..., To(eh)`; empty for the empty path.
    pub fn nodes(&self, net: &Network) -> Vec<NodeId> {
        let mut nodes = Vec::with_capacity(self.links.len() + 1);
        if let Some(&first) = self.links.first() {
            nodes.push(net.link(first).from);
        }
        nodes.extend(self.links.iter().map(|&l| net.link(l).to));
        nodes
    }

    pub fn source(&self, net: &Network) -> Option<NodeId> {
        self.links.first().map(|&l| net.link(l).from)
    }

    pub fn target(&self, net: &Network) -> Option<NodeId> {
        self.links.last().map(|&l| net.link(l).to)
    }

    /// Concatenation; `other` must start where `self` ends.
    pub fn concat(&self, net: &Network, other: &Path) -> Result<Path, GraphError> {
        let mut links = self.links.clone();
        links.extend_from_slice(&other.links);
        Path::new(net, links)
    }

    /// True when the cached sums match a recomputation from raw links.
    pub fn sums_consistent(&self, net: &Network) -> bool {
        let fresh = Self::from_chain(net, self.links.clone());
        fresh.delay == self.delay && fresh.cost == self.cost
    }

    pub fn labels(&self, net: &Network) -> Vec<u64> {
        self.links.iter().map(|&l| net.link_label(l)).collect()
    }

    pub fn display<'a>(&'a self, net: &'a Network) -> PathDisplay<'a> {
        PathDisplay { path: self, net }
    }
}

pub struct PathDisplay<'a> {
    path: &'a Path,
    net: &'a Network,
}

impl fmt::Display for PathDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self
            .path
            .nodes(self.net)
            .into_iter()
            .map(|n| self.net.node_name(n))
            .collect();
        write!(
            f,
            "{} (delay {}, cost {})",
            names.join("->"),
            self.path.delay,
            self.path.cost
        )
    }
}

/// Ω(P): the union of the Srlg sets of every link on `p`.
pub fn srlgs_of_path(net: &Network, p: &Path) -> Result<BTreeSet<SrlgId>, GraphError> {
    if let Some(&bad) = p.links.iter().find(|&&l| l >= net.link_count()) {
        return Err(GraphError::UnknownLink(bad));
    }
    Ok(net.srlgs_of_links(&p.links))
}

/// True iff no node repeats along the path.
pub fn is_elementary(net: &Network, p: &Path) -> bool {
    let nodes = p.nodes(net);
    let mut seen = vec![false; net.node_count()];
    nodes.into_iter().all(|n| !std::mem::replace(&mut seen[n], true))
}
