#![allow(dead_code)]

use std::collections::BTreeSet;

use balancedn::topology::{NodeId, Topology};
use rand::Rng;

/// Random connected graph: a random spanning tree plus `extra` random chords.
/// All nodes are routers; `roles` overrides roles by id.
pub fn random_graph<R: Rng>(rng: &mut R, nodes: u32, extra: usize, roles: &[(u32, &str)]) -> Topology {
    let mut edges = BTreeSet::new();
    for v in 1..nodes {
        let u = rng.gen_range(0..v);
        edges.insert((u, v));
    }
    let mut attempts = 0;
    while edges.len() < (nodes as usize - 1) + extra && attempts < 10 * extra + 10 {
        attempts += 1;
        let a = rng.gen_range(0..nodes);
        let b = rng.gen_range(0..nodes);
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    let mut text = String::new();
    for v in 0..nodes {
        let role = roles.iter().find(|(id, _)| *id == v).map_or("router", |(_, r)| r);
        text.push_str(&format!("node {v} n{v} {role}\n"));
    }
    for (a, b) in edges {
        text.push_str(&format!("link {a} {b} 1 1000\n"));
    }
    Topology::parse(&text).expect("generated topology is valid")
}

/// Length of the shortest simple path by exhaustive enumeration.
pub fn brute_force_distance(t: &Topology, from: NodeId, to: NodeId) -> Option<u32> {
    fn walk(t: &Topology, at: NodeId, to: NodeId, seen: &mut Vec<NodeId>, best: &mut Option<u32>) {
        let len = seen.len() as u32 - 1;
        if at == to {
            *best = Some(best.map_or(len, |b| b.min(len)));
            return;
        }
        if best.is_some_and(|b| len >= b) {
            return;
        }
        for &n in t.neighbors(at) {
            if !seen.contains(&n) {
                seen.push(n);
                walk(t, n, to, seen, best);
                seen.pop();
            }
        }
    }
    let mut best = None;
    walk(t, from, to, &mut vec![from], &mut best);
    best
}

pub fn line(roles: &[&str]) -> Topology {
    let mut text = String::new();
    for (i, r) in roles.iter().enumerate() {
        text.push_str(&format!("node {i} n{i} {r}\n"));
    }
    for i in 1..roles.len() {
        text.push_str(&format!("link {} {i} 1 1000\n", i - 1));
    }
    Topology::parse(&text).unwrap()
}
