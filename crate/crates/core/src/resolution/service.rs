//! Packet-level BalanceDN application logic.
//!
//! Each resolution step travels as its own Interest/Data exchange ("leg")
//! addressed to the node that serves it. Leg names have the form
//! `/balancedn/at/<target>/<kind>/<flow>/<content...>`, and every node's FIB
//! routes `/balancedn/at/<id>` toward node `id`. Servers keep a continuation
//! per outstanding leg and relay the answer back down the chain, so Data
//! returns through every server it passed (recursive resolution).

use std::collections::{HashMap, HashSet, VecDeque};
use std::num::NonZeroU32;

use super::{Deployment, LocatorRecord, Stage};
use crate::engine::SimTime;
use crate::name::ContentName;
use crate::packet::{DataContent, DataPacket, FlowId, RECORD_REPLY_BITS};
use crate::placement::ResolverIndex;
use crate::topology::NodeId;

const ROOT: &str = "balancedn";
const AT: &str = "at";

/// Name construction and parsing for service legs.
#[derive(Debug, Clone, Copy)]
pub struct ServiceNames;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Leg {
    pub target: NodeId,
    pub stage: Stage,
    pub flow: FlowId,
    pub content: ContentName,
}

fn kind_str(stage: Stage) -> &'static str {
    match stage {
        Stage::ConsumerToCluster => "c",
        Stage::ClusterToResolver => "r",
        Stage::ResolverToTld => "tld",
        Stage::TldToNameserver => "ns",
        Stage::Fetch => "fetch",
        Stage::DataReturn => "data",
    }
}

impl ServiceNames {
    /// Routable prefix for everything served at `node`.
    pub fn node_prefix(node: NodeId) -> ContentName {
        ContentName::from_segments([ROOT.as_bytes(), AT.as_bytes(), node.0.to_string().as_bytes()])
            .expect("static segments are valid")
    }

    pub fn leg(target: NodeId, stage: Stage, flow: FlowId, content: &ContentName) -> ContentName {
        let head = ContentName::from_segments([
            ROOT.as_bytes(),
            AT.as_bytes(),
            target.0.to_string().as_bytes(),
            kind_str(stage).as_bytes(),
            flow.to_string().as_bytes(),
        ])
        .expect("static segments are valid");
        head.join(content)
    }

    pub fn parse(name: &ContentName) -> Option<Leg> {
        let segs: Vec<&[u8]> = name.segments().collect();
        if segs.len() < 6 || segs[0] != ROOT.as_bytes() || segs[1] != AT.as_bytes() {
            return None;
        }
        let num = |s: &[u8]| std::str::from_utf8(s).ok()?.parse::<u64>().ok();
        let target = NodeId(u32::try_from(num(segs[2])?).ok()?);
        let stage = match segs[3] {
            b"c" => Stage::ConsumerToCluster,
            b"r" => Stage::ClusterToResolver,
            b"tld" => Stage::ResolverToTld,
            b"ns" => Stage::TldToNameserver,
            b"fetch" => Stage::Fetch,
            _ => return None,
        };
        let flow = num(segs[4])?;
        let content = ContentName::from_segments(segs[5..].iter().copied()).ok()?;
        Some(Leg {
            target,
            stage,
            flow,
            content,
        })
    }

    /// Stage a packet name belongs to, if it is a service leg.
    pub fn stage_of(name: &ContentName) -> Option<Stage> {
        Self::parse(name).map(|l| l.stage)
    }
}

/// What the service asks the engine to do next.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AppAction {
    /// Send an Interest for `name` out of `node`'s local face.
    Express { node: NodeId, name: ContentName, flow: FlowId },
    /// Answer the pending Interest for `data.name` at `node`.
    Put { node: NodeId, data: DataPacket },
    /// The consumer's request finished; `data` is what reached it.
    Complete { flow: FlowId, data: DataPacket },
}

#[derive(Debug, Clone)]
enum Continuation {
    Complete,
    Relay { reply: ContentName },
    AwaitRecord { shard: ResolverIndex, leg: Leg, reply: ContentName },
}

enum Work {
    Interest { node: NodeId, name: ContentName },
    Data { node: NodeId, data: DataPacket },
}

/// Server-side behavior of consumers, cluster nodes, shards, the TLD,
/// nameservers and producers.
#[derive(Debug)]
pub struct BalanceDnService {
    deployment: Deployment,
    payload_bits: NonZeroU32,
    pending: HashMap<(NodeId, ContentName), Continuation>,
    local_legs: HashSet<(NodeId, ContentName)>,
}

impl BalanceDnService {
    pub fn new(deployment: Deployment, payload_bits: NonZeroU32) -> Self {
        Self {
            deployment,
            payload_bits,
            pending: HashMap::new(),
            local_legs: HashSet::new(),
        }
    }

    pub fn deployment(&self) -> &Deployment {
        &self.deployment
    }

    pub fn deployment_mut(&mut self) -> &mut Deployment {
        &mut self.deployment
    }

    pub fn into_deployment(self) -> Deployment {
        self.deployment
    }

    pub fn pending_len(&self) -> usize {
        self.pending.len()
    }

    /// FIB anchors: one routable prefix per node that can serve a leg.
    pub fn anchors(&self) -> Vec<(ContentName, NodeId)> {
        let topo = self.deployment.topology();
        topo.node_ids()
            .filter(|id| topo.role(*id).is_some_and(|r| !matches!(r, crate::topology::Role::Consumer | crate::topology::Role::Router)))
            .map(|id| (ServiceNames::node_prefix(id), id))
            .collect()
    }

    /// Starts a request from `consumer` for `content`.
    pub fn request(
        &mut self,
        consumer: NodeId,
        content: &ContentName,
        flow: FlowId,
        now: SimTime,
    ) -> Vec<AppAction> {
        let cluster = match self.deployment.ingress_for(consumer) {
            Ok((c, _)) => c,
            Err(_) => return Vec::new(),
        };
        let leg = ServiceNames::leg(cluster, Stage::ConsumerToCluster, flow, content);
        self.pending.insert((consumer, leg.clone()), Continuation::Complete);
        let first = AppAction::Express {
            node: consumer,
            name: leg,
            flow,
        };
        self.settle(vec![first], now)
    }

    /// An Interest reached `node`'s local face.
    pub fn on_interest(&mut self, node: NodeId, name: &ContentName, now: SimTime) -> Vec<AppAction> {
        let actions = self.serve(node, name, now);
        self.settle(actions, now)
    }

    /// A Data packet reached `node`'s local face.
    pub fn on_data(&mut self, node: NodeId, data: DataPacket, now: SimTime) -> Vec<AppAction> {
        let actions = self.resume(node, data, now);
        self.settle(actions, now)
    }

    /// Runs actions that stay on one node in-process; returns the rest.
    fn settle(&mut self, actions: Vec<AppAction>, now: SimTime) -> Vec<AppAction> {
        let mut out = Vec::new();
        let mut work: VecDeque<AppAction> = actions.into();
        while let Some(action) = work.pop_front() {
            let step = match action {
                AppAction::Express { node, ref name, .. }
                    if ServiceNames::parse(name).is_some_and(|l| l.target == node) =>
                {
                    self.local_legs.insert((node, name.clone()));
                    Work::Interest {
                        node,
                        name: name.clone(),
                    }
                }
                AppAction::Put { node, data } if self.local_legs.remove(&(node, data.name.clone())) => {
                    Work::Data { node, data }
                }
                other => {
                    out.push(other);
                    continue;
                }
            };
            let next = match step {
                Work::Interest { node, name } => self.serve(node, &name, now),
                Work::Data { node, data } => self.resume(node, data, now),
            };
            work.extend(next);
        }
        out
    }

    fn reply(&self, node: NodeId, to: &ContentName, content: DataContent, bits: u32, flow: FlowId) -> AppAction {
        AppAction::Put {
            node,
            data: DataPacket::new(
                to.clone(),
                NonZeroU32::new(bits).expect("positive reply size"),
                node,
                content,
                flow,
            ),
        }
    }

    fn express(
        &mut self,
        node: NodeId,
        target: NodeId,
        stage: Stage,
        leg: &Leg,
        cont: Continuation,
    ) -> AppAction {
        let name = ServiceNames::leg(target, stage, leg.flow, &leg.content);
        self.pending.insert((node, name.clone()), cont);
        AppAction::Express {
            node,
            name,
            flow: leg.flow,
        }
    }

    fn serve(&mut self, node: NodeId, name: &ContentName, _now: SimTime) -> Vec<AppAction> {
        let Some(leg) = ServiceNames::parse(name) else {
            return Vec::new();
        };
        if leg.target != node {
            return Vec::new();
        }
        let relay = Continuation::Relay {
            reply: name.clone(),
        };
        match leg.stage {
            Stage::ConsumerToCluster => {
                let shard = self.deployment.assign(&leg.content);
                let host = self.deployment.shard_host(shard);
                vec![self.express(node, host, Stage::ClusterToResolver, &leg, relay)]
            }
            Stage::ClusterToResolver => {
                let shard = self.deployment.assign(&leg.content);
                match self.deployment.shard_mut(shard).lookup(&leg.content) {
                    Some(rec) => vec![self.express(node, rec.producer, Stage::Fetch, &leg, relay)],
                    None => {
                        let tld = self.deployment.tld().host();
                        let cont = Continuation::AwaitRecord {
                            shard,
                            leg: leg.clone(),
                            reply: name.clone(),
                        };
                        vec![self.express(node, tld, Stage::ResolverToTld, &leg, cont)]
                    }
                }
            }
            Stage::ResolverToTld => match self.deployment.tld().lookup(&leg.content) {
                Some(ns) => vec![self.express(node, ns, Stage::TldToNameserver, &leg, relay)],
                None => vec![self.reply(node, name, DataContent::NotFound, RECORD_REPLY_BITS, leg.flow)],
            },
            Stage::TldToNameserver => {
                let content = match self.deployment.nameserver(node).and_then(|z| z.lookup(&leg.content)) {
                    Some(r) => DataContent::Locator(r.producer),
                    None => DataContent::NotFound,
                };
                vec![self.reply(node, name, content, RECORD_REPLY_BITS, leg.flow)]
            }
            Stage::Fetch => {
                let content = if self.deployment.producer_of(&leg.content) == Some(node) {
                    DataContent::Content
                } else {
                    DataContent::NotFound
                };
                let bits = match content {
                    DataContent::Content => self.payload_bits.get(),
                    _ => RECORD_REPLY_BITS,
                };
                vec![self.reply(node, name, content, bits, leg.flow)]
            }
            Stage::DataReturn => Vec::new(),
        }
    }

    fn resume(&mut self, node: NodeId, data: DataPacket, now: SimTime) -> Vec<AppAction> {
        let Some(cont) = self.pending.remove(&(node, data.name.clone())) else {
            return Vec::new();
        };
        match cont {
            Continuation::Complete => vec![AppAction::Complete {
                flow: data.flow,
                data,
            }],
            Continuation::Relay { reply } => vec![AppAction::Put {
                node,
                data: DataPacket { name: reply, ..data },
            }],
            Continuation::AwaitRecord { shard, leg, reply } => match data.content {
                DataContent::Locator(producer) => {
                    self.deployment.shard_mut(shard).cache_record(LocatorRecord {
                        name: leg.content.clone(),
                        producer,
                        registered_at: now,
                    });
                    vec![self.express(node, producer, Stage::Fetch, &leg, Continuation::Relay { reply })]
                }
                _ => vec![AppAction::Put {
                    node,
                    data: DataPacket { name: reply, ..data },
                }],
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leg_names_round_trip() {
        let content = ContentName::parse("/cat3/obj19").unwrap();
        let name = ServiceNames::leg(NodeId(42), Stage::TldToNameserver, 7, &content);
        assert_eq!(name.to_string(), "/balancedn/at/42/ns/7/cat3/obj19");
        let leg = ServiceNames::parse(&name).unwrap();
        assert_eq!(leg.target, NodeId(42));
        assert_eq!(leg.stage, Stage::TldToNameserver);
        assert_eq!(leg.flow, 7);
        assert_eq!(leg.content, content);
        assert!(ServiceNames::node_prefix(NodeId(42)).is_prefix_of(&name));
        assert!(ServiceNames::parse(&content).is_none());
        assert!(ServiceNames::parse(&ContentName::parse("/balancedn/at/x/c/1/a").unwrap()).is_none());
    }
}
