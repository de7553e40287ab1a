//! Hop-count shortest paths and FIB construction.
//!
//! Distances are unweighted. Where several neighbors lie on shortest paths the
//! one with the lowest node id is chosen, so every route in a run is a
//! deterministic function of the topology.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::name::ContentName;
use crate::node::{FaceId, Fib, LOCAL_FACE};
use crate::topology::{NodeId, Role, Topology, TopologyError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathEntry {
    pub distance: u32,
    pub next_hop: NodeId,
}

/// BFS distances from `source` plus the lowest-id first hop on some shortest path.
pub fn shortest_paths(
    topology: &Topology,
    source: NodeId,
) -> Result<BTreeMap<NodeId, PathEntry>, TopologyError> {
    if !topology.contains(source) {
        return Err(TopologyError::UnknownNode(source));
    }
    let mut dist: HashMap<NodeId, u32> = HashMap::new();
    let mut order = Vec::with_capacity(topology.node_count());
    let mut queue = VecDeque::from([source]);
    dist.insert(source, 0);
    while let Some(u) = queue.pop_front() {
        order.push(u);
        let du = dist[&u];
        for &v in topology.neighbors(u) {
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(v) {
                e.insert(du + 1);
                queue.push_back(v);
            }
        }
    }
    // first hop of v = min first hop over predecessors one level closer
    let mut first: HashMap<NodeId, NodeId> = HashMap::new();
    first.insert(source, source);
    for &v in &order[1..] {
        let dv = dist[&v];
        let hop = if dv == 1 {
            v
        } else {
            topology
                .neighbors(v)
                .iter()
                .filter(|w| dist.get(w) == Some(&(dv - 1)))
                .map(|w| first[w])
                .min()
                .expect("BFS predecessor exists")
        };
        first.insert(v, hop);
    }
    Ok(order
        .into_iter()
        .map(|v| {
            (
                v,
                PathEntry {
                    distance: dist[&v],
                    next_hop: first[&v],
                },
            )
        })
        .collect())
}

/// All-pairs distances and next hops, indexed densely.
#[derive(Debug, Clone)]
pub struct RouteTable {
    ids: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    dist: Vec<u32>,
    next: Vec<u32>,
}

impl RouteTable {
    pub fn new(topology: &Topology) -> Self {
        let ids: Vec<NodeId> = topology.node_ids().collect();
        let index: HashMap<NodeId, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
        let n = ids.len();
        let mut dist = vec![u32::MAX; n * n];
        let mut next = vec![u32::MAX; n * n];
        for (si, &s) in ids.iter().enumerate() {
            let paths = shortest_paths(topology, s).expect("node exists");
            for (v, e) in paths {
                let vi = index[&v];
                dist[si * n + vi] = e.distance;
                next[si * n + vi] = index[&e.next_hop] as u32;
            }
        }
        Self {
            ids,
            index,
            dist,
            next,
        }
    }

    fn idx(&self, id: NodeId) -> Result<usize, TopologyError> {
        self.index
            .get(&id)
            .copied()
            .ok_or(TopologyError::UnknownNode(id))
    }

    pub fn distance(&self, from: NodeId, to: NodeId) -> Result<u32, TopologyError> {
        let (a, b) = (self.idx(from)?, self.idx(to)?);
        Ok(self.dist[a * self.ids.len() + b])
    }

    pub fn next_hop(&self, from: NodeId, to: NodeId) -> Result<NodeId, TopologyError> {
        let (a, b) = (self.idx(from)?, self.idx(to)?);
        Ok(self.ids[self.next[a * self.ids.len() + b] as usize])
    }

    /// Node sequence from `from` to `to` inclusive, following next hops.
    pub fn path(&self, from: NodeId, to: NodeId) -> Result<Vec<NodeId>, TopologyError> {
        let mut path = vec![from];
        let mut cur = from;
        self.idx(to)?;
        while cur != to {
            cur = self.next_hop(cur, to)?;
            path.push(cur);
        }
        Ok(path)
    }

    /// Nearest of `candidates` to `from`, ties broken by lowest id.
    pub fn nearest(&self, from: NodeId, candidates: &[NodeId]) -> Result<Option<(NodeId, u32)>, TopologyError> {
        let mut best: Option<(NodeId, u32)> = None;
        for &c in candidates {
            let d = self.distance(from, c)?;
            best = match best {
                Some((b, bd)) if (bd, b) <= (d, c) => Some((b, bd)),
                _ => Some((c, d)),
            };
        }
        Ok(best)
    }

    /// Nearest node with `role` (ties by lowest id).
    pub fn nearest_with_role(
        &self,
        topology: &Topology,
        from: NodeId,
        role: Role,
    ) -> Result<Option<(NodeId, u32)>, TopologyError> {
        self.nearest(from, &topology.nodes_with_role(role))
    }
}

/// Face numbering shared by FIBs and node construction: face `i` (1-based)
/// leads to the `i`-th neighbor in ascending id order.
pub fn face_toward(topology: &Topology, node: NodeId, neighbor: NodeId) -> Option<FaceId> {
    topology
        .neighbors(node)
        .iter()
        .position(|n| *n == neighbor)
        .map(|i| FaceId(i as u32 + 1))
}

/// Builds `node`'s FIB. Each prefix routes toward its nearest anchor (ties by
/// lowest anchor id); an anchor at `node` itself maps to the local face.
pub fn build_fib(
    topology: &Topology,
    routes: &RouteTable,
    node: NodeId,
    anchors: &[(ContentName, NodeId)],
) -> Result<Fib, TopologyError> {
    if !topology.contains(node) {
        return Err(TopologyError::UnknownNode(node));
    }
    let mut grouped: BTreeMap<&ContentName, Vec<NodeId>> = BTreeMap::new();
    for (prefix, anchor) in anchors {
        if !topology.contains(*anchor) {
            return Err(TopologyError::UnknownNode(*anchor));
        }
        grouped.entry(prefix).or_default().push(*anchor);
    }
    let mut fib = Fib::new();
    for (prefix, candidates) in grouped {
        let (anchor, distance) = routes
            .nearest(node, &candidates)?
            .expect("at least one anchor per prefix");
        let face = if anchor == node {
            LOCAL_FACE
        } else {
            let hop = routes.next_hop(node, anchor)?;
            face_toward(topology, node, hop).expect("next hop is a neighbor")
        };
        fib.insert(prefix.clone(), face, distance);
    }
    Ok(fib)
}
