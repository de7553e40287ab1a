//! Network topologies: the line-oriented file format, validation, and presets.
//!
//! ```text
//! # comment
//! node <id> <label> <role>
//! link <idA> <idB> <delay_ms> <bandwidth_mbps>
//! ```

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::engine::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Consumer,
    Router,
    Producer,
    Resolver,
    Tld,
    Nameserver,
}

impl Role {
    pub const ALL: [Role; 6] = [
        Role::Consumer,
        Role::Router,
        Role::Producer,
        Role::Resolver,
        Role::Tld,
        Role::Nameserver,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Consumer => "consumer",
            Role::Router => "router",
            Role::Producer => "producer",
            Role::Resolver => "resolver",
            Role::Tld => "tld",
            Role::Nameserver => "nameserver",
        }
    }

    /// End hosts, as opposed to routers and resolver clusters.
    pub fn is_host(self) -> bool {
        matches!(
            self,
            Role::Consumer | Role::Producer | Role::Tld | Role::Nameserver
        )
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Role::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown role '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeDescriptor {
    pub id: NodeId,
    pub label: String,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkDescriptor {
    pub endpoint_a: NodeId,
    pub endpoint_b: NodeId,
    /// Propagation delay.
    pub delay: SimTime,
    pub bandwidth_mbps: f64,
}

pub const DEFAULT_DELAY_MS: f64 = 1.0;
pub const DEFAULT_BANDWIDTH_MBPS: f64 = 1000.0;

impl LinkDescriptor {
    pub fn new(a: NodeId, b: NodeId, delay: SimTime, bandwidth_mbps: f64) -> Self {
        Self {
            endpoint_a: a,
            endpoint_b: b,
            delay,
            bandwidth_mbps,
        }
    }

    pub fn with_defaults(a: NodeId, b: NodeId) -> Self {
        Self::new(
            a,
            b,
            SimTime::from_millis_f64(DEFAULT_DELAY_MS),
            DEFAULT_BANDWIDTH_MBPS,
        )
    }

    /// The endpoint opposite `from`, if `from` is on this link.
    pub fn other(&self, from: NodeId) -> Option<NodeId> {
        if from == self.endpoint_a {
            Some(self.endpoint_b)
        } else if from == self.endpoint_b {
            Some(self.endpoint_a)
        } else {
            None
        }
    }

    /// Time to clock `bits` onto the link, rounded up to whole nanoseconds.
    pub fn serialization(&self, bits: u32) -> SimTime {
        SimTime::from_nanos((bits as f64 * 1000.0 / self.bandwidth_mbps).ceil() as u64)
    }

    fn key(&self) -> (NodeId, NodeId) {
        ordered(self.endpoint_a, self.endpoint_b)
    }
}

fn ordered(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: duplicate node id {id}")]
    DuplicateNode { line: usize, id: NodeId },
    #[error("line {line}: link endpoint {id} is not a declared node")]
    DanglingEndpoint { line: usize, id: NodeId },
    #[error("line {line}: link connects node {id} to itself")]
    SelfLoop { line: usize, id: NodeId },
    #[error("line {line}: second link between {a} and {b}")]
    DuplicateLink { line: usize, a: NodeId, b: NodeId },
    #[error("topology has no nodes")]
    Empty,
    #[error("graph is disconnected: node {0} is unreachable from node {1}")]
    Disconnected(NodeId, NodeId),
    #[error("unknown node id {0}")]
    UnknownNode(NodeId),
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
}

#[derive(Debug, Clone)]
pub struct Topology {
    nodes: BTreeMap<NodeId, NodeDescriptor>,
    links: Vec<LinkDescriptor>,
    adjacency: BTreeMap<NodeId, Vec<NodeId>>,
    link_index: HashMap<(NodeId, NodeId), usize>,
}

pub const PRESET_NAMES: [&str; 3] = ["nsfnet", "nsfnet-populated", "oteglobe"];

impl Topology {
    /// Builds and validates a topology from already-parsed parts.
    pub fn from_parts(
        nodes: Vec<NodeDescriptor>,
        links: Vec<LinkDescriptor>,
    ) -> Result<Self, TopologyError> {
        let mut map = BTreeMap::new();
        for (i, n) in nodes.into_iter().enumerate() {
            let id = n.id;
            if map.insert(id, n).is_some() {
                return Err(TopologyError::DuplicateNode { line: i + 1, id });
            }
        }
        Self::assemble(map, links.into_iter().enumerate().map(|(i, l)| (i + 1, l)))
    }

    fn assemble(
        nodes: BTreeMap<NodeId, NodeDescriptor>,
        links: impl Iterator<Item = (usize, LinkDescriptor)>,
    ) -> Result<Self, TopologyError> {
        if nodes.is_empty() {
            return Err(TopologyError::Empty);
        }
        let mut adjacency: BTreeMap<NodeId, Vec<NodeId>> =
            nodes.keys().map(|id| (*id, Vec::new())).collect();
        let mut keyed = BTreeMap::new();
        for (line, link) in links {
            for id in [link.endpoint_a, link.endpoint_b] {
                if !nodes.contains_key(&id) {
                    return Err(TopologyError::DanglingEndpoint { line, id });
                }
            }
            if link.endpoint_a == link.endpoint_b {
                return Err(TopologyError::SelfLoop {
                    line,
                    id: link.endpoint_a,
                });
            }
            let key = link.key();
            if keyed.insert(key, link).is_some() {
                return Err(TopologyError::DuplicateLink {
                    line,
                    a: key.0,
                    b: key.1,
                });
            }
        }
        // sorted by endpoint pair so input order never matters
        let links: Vec<LinkDescriptor> = keyed.into_values().collect();
        let mut link_index = HashMap::with_capacity(links.len());
        for (i, l) in links.iter().enumerate() {
            link_index.insert(l.key(), i);
            adjacency.get_mut(&l.endpoint_a).unwrap().push(l.endpoint_b);
            adjacency.get_mut(&l.endpoint_b).unwrap().push(l.endpoint_a);
        }
        for n in adjacency.values_mut() {
            n.sort_unstable();
        }
        let topo = Topology {
            nodes,
            links,
            adjacency,
            link_index,
        };
        topo.check_connected()?;
        Ok(topo)
    }

    fn check_connected(&self) -> Result<(), TopologyError> {
        let start = *self.nodes.keys().next().expect("non-empty");
        let mut seen: HashMap<NodeId, ()> = HashMap::new();
        let mut queue = VecDeque::from([start]);
        seen.insert(start, ());
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[&u] {
                if seen.insert(v, ()).is_none() {
                    queue.push_back(v);
                }
            }
        }
        match self.nodes.keys().find(|id| !seen.contains_key(id)) {
            Some(id) => Err(TopologyError::Disconnected(*id, start)),
            None => Ok(()),
        }
    }

    /// Parses and validates topology-file text.
    pub fn parse(text: &str) -> Result<Self, TopologyError> {
        let mut nodes = BTreeMap::new();
        let mut pending_links = Vec::new();
        let line_count = text.split('\n').count();
        for (idx, raw) in text.split('\n').enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("");
            let body = body.trim_end_matches([' ', '\r', '\t']);
            if body.trim().is_empty() {
                continue;
            }
            if line == line_count {
                return Err(syntax(line, "record is not terminated by a newline"));
            }
            let fields: Vec<&str> = body.split(' ').collect();
            if fields.iter().any(|f| f.is_empty()) {
                return Err(syntax(line, "fields must be separated by single spaces"));
            }
            match fields[0] {
                "node" => {
                    if fields.len() != 4 {
                        return Err(syntax(line, "expected: node <id> <label> <role>"));
                    }
                    let id = parse_id(fields[1], line)?;
                    let role = fields[3].parse::<Role>().map_err(|m| syntax(line, &m))?;
                    let desc = NodeDescriptor {
                        id,
                        label: fields[2].to_string(),
                        role,
                    };
                    if nodes.insert(id, desc).is_some() {
                        return Err(TopologyError::DuplicateNode { line, id });
                    }
                }
                "link" => {
                    if fields.len() != 5 {
                        return Err(syntax(
                            line,
                            "expected: link <idA> <idB> <delay_ms> <bandwidth_mbps>",
                        ));
                    }
                    let a = parse_id(fields[1], line)?;
                    let b = parse_id(fields[2], line)?;
                    let delay: f64 = fields[3]
                        .parse()
                        .map_err(|_| syntax(line, "delay must be a number"))?;
                    if !delay.is_finite() || delay < 0.0 {
                        return Err(syntax(line, "delay must be non-negative"));
                    }
                    let bw: f64 = fields[4]
                        .parse()
                        .map_err(|_| syntax(line, "bandwidth must be a number"))?;
                    if !bw.is_finite() || bw <= 0.0 {
                        return Err(syntax(line, "bandwidth must be positive"));
                    }
                    pending_links.push((
                        line,
                        LinkDescriptor::new(a, b, SimTime::from_millis_f64(delay), bw),
                    ));
                }
                other => return Err(syntax(line, &format!("unknown record '{other}'"))),
            }
        }
        Self::assemble(nodes, pending_links.into_iter())
    }

    pub fn preset(name: &str) -> Result<Self, TopologyError> {
        let text = match name {
            "nsfnet" => include_str!("../presets/nsfnet.topo"),
            "nsfnet-populated" => include_str!("../presets/nsfnet-populated.topo"),
            "oteglobe" => include_str!("../presets/oteglobe.topo"),
            other => return Err(TopologyError::UnknownPreset(other.to_string())),
        };
        Self::parse(text)
    }

    /// Renders back to the file format; `parse(render())` reproduces the topology.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for n in self.nodes.values() {
            out.push_str(&format!("node {} {} {}\n", n.id, n.label, n.role));
        }
        for l in &self.links {
            out.push_str(&format!(
                "link {} {} {} {}\n",
                l.endpoint_a,
                l.endpoint_b,
                l.delay.as_millis_f64(),
                l.bandwidth_mbps
            ));
        }
        out
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &NodeDescriptor> {
        self.nodes.values()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.keys().copied()
    }

    pub fn node(&self, id: NodeId) -> Option<&NodeDescriptor> {
        self.nodes.get(&id)
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.nodes.contains_key(&id)
    }

    pub fn role(&self, id: NodeId) -> Option<Role> {
        self.nodes.get(&id).map(|n| n.role)
    }

    pub fn links(&self) -> &[LinkDescriptor] {
        &self.links
    }

    /// Neighbors in ascending id order.
    pub fn neighbors(&self, id: NodeId) -> &[NodeId] {
        self.adjacency.get(&id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn link_between(&self, a: NodeId, b: NodeId) -> Option<&LinkDescriptor> {
        self.link_index.get(&ordered(a, b)).map(|&i| &self.links[i])
    }

    /// Node ids with the given role, ascending.
    pub fn nodes_with_role(&self, role: Role) -> Vec<NodeId> {
        self.nodes
            .values()
            .filter(|n| n.role == role)
            .map(|n| n.id)
            .collect()
    }

    pub fn role_counts(&self) -> BTreeMap<Role, usize> {
        let mut counts = BTreeMap::new();
        for n in self.nodes.values() {
            *counts.entry(n.role).or_insert(0) += 1;
        }
        counts
    }

    pub fn count_role(&self, role: Role) -> usize {
        self.nodes.values().filter(|n| n.role == role).count()
    }
}

fn syntax(line: usize, message: &str) -> TopologyError {
    TopologyError::Syntax {
        line,
        message: message.to_string(),
    }
}

fn parse_id(s: &str, line: usize) -> Result<NodeId, TopologyError> {
    s.parse::<u32>()
        .map(NodeId)
        .map_err(|_| syntax(line, &format!("invalid node id '{s}'")))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAIR: &str = "node 0 a consumer\nnode 1 b producer\nlink 0 1 1 1000\n";

    #[test]
    fn smallest_graph() {
        let t = Topology::parse(PAIR).unwrap();
        assert_eq!(t.node_count(), 2);
        assert_eq!(t.link_count(), 1);
        assert_eq!(t.neighbors(NodeId(0)), &[NodeId(1)]);
        assert_eq!(t.neighbors(NodeId(1)), &[NodeId(0)]);
        let l = t.link_between(NodeId(1), NodeId(0)).unwrap();
        assert_eq!(l.delay, SimTime::from_millis(1));
    }

    #[test]
    fn line_order_is_irrelevant() {
        let shuffled = "link 0 1 1 1000\nnode 1 b producer\nnode 0 a consumer\n";
        let a = Topology::parse(PAIR).unwrap();
        let b = Topology::parse(shuffled).unwrap();
        assert_eq!(a.render(), b.render());
    }

    #[test]
    fn comments_and_blank_lines() {
        let t = Topology::parse("# header\n\nnode 0 a router # trailing\nnode 1 b router\nlink 1 0 0.5 10\n")
            .unwrap();
        assert_eq!(t.link_count(), 1);
    }

    #[test]
    fn validation_errors() {
        let err = |s: &str| Topology::parse(s).unwrap_err();
        assert!(matches!(
            err("node 0 a consumer\nnode 0 b router\n"),
            TopologyError::DuplicateNode { line: 2, .. }
        ));
        assert!(matches!(
            err("node 0 a consumer\nlink 0 9 1 1\n"),
            TopologyError::DanglingEndpoint { line: 2, id: NodeId(9) }
        ));
        assert!(matches!(
            err("node 0 a consumer\nnode 1 b router\n"),
            TopologyError::Disconnected(..)
        ));
        assert!(matches!(
            err("node 0 a consumer\nnode 1 b router\nlink 0 1 1 1\nlink 1 0 1 1\n"),
            TopologyError::DuplicateLink { line: 4, .. }
        ));
        assert!(matches!(
            err("node 0 a consumer\nlink 0 0 1 1\n"),
            TopologyError::SelfLoop { .. }
        ));
        assert!(matches!(err("node 0 a wizard\n"), TopologyError::Syntax { line: 1, .. }));
        assert!(matches!(err("node 0  a router\n"), TopologyError::Syntax { line: 1, .. }));
        assert!(matches!(err("node 0 a router"), TopologyError::Syntax { line: 1, .. }));
        assert!(matches!(
            err("node 0 a router\nnode 1 b router\nlink 0 1 -1 5\n"),
            TopologyError::Syntax { line: 3, .. }
        ));
        assert!(matches!(
            err("node 0 a router\nnode 1 b router\nlink 0 1 1 0\n"),
            TopologyError::Syntax { line: 3, .. }
        ));
        assert!(matches!(err("# nothing\n"), TopologyError::Empty));
    }

    #[test]
    fn serialization_time() {
        let l = LinkDescriptor::with_defaults(NodeId(0), NodeId(1));
        assert_eq!(l.serialization(1024), SimTime::from_nanos(1024));
    }
}
