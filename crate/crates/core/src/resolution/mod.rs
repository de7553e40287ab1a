//! Hashed resolver placement and the resolver / TLD / nameserver lookup flow.
//!
//! A [`Deployment`] owns the resolver shards, the TLD server and the
//! nameservers placed on a topology. Producers register names: the name hashes
//! to one shard, which keeps an authoritative locator record, and the record
//! is also written to the nameserver delegated for the name's prefix.
//!
//! Resolution runs in six stages. The consumer reaches its nearest resolver
//! cluster node, which hashes the name and forwards to the owning shard. If
//! the shard holds a record the TLD is skipped; otherwise the shard asks the
//! TLD, which forwards to the nameserver, and the reply is cached at the shard
//! on its way back. The shard then fetches from the producer and relays the
//! Data back through the cluster node to the consumer.

mod hierarchy;
mod service;
mod shard;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::crc16::Crc16Variant;
use crate::engine::SimTime;
use crate::name::ContentName;
use crate::node::ContentSource;
use crate::placement::{Placement, PlacementError, ResolverIndex};
use crate::routing::RouteTable;
use crate::topology::{NodeId, Role, Topology, TopologyError};

pub use hierarchy::{NameServer, TldServer};
pub use service::{AppAction, BalanceDnService, ServiceNames};
pub use shard::{lookup_timing_probe, shard_lookup, ResolverShard, DEFAULT_RESOLVER_CACHE};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolutionError {
    #[error(transparent)]
    Placement(#[from] PlacementError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("{requested} shards requested but the topology has only {available} resolver nodes")]
    NotEnoughResolvers { requested: usize, available: usize },
    #[error("topology has no {0} node")]
    MissingRole(Role),
    #[error("node {0} is not a {1}")]
    WrongRole(NodeId, Role),
    #[error("{name} is already registered to producer {existing}")]
    Conflict { name: ContentName, existing: NodeId },
    #[error("no nameserver is delegated for {0}")]
    NoDelegation(ContentName),
    #[error("producer {0} of the resolved record is unreachable")]
    Unreachable(NodeId),
    #[error("probe list is empty")]
    EmptyProbe,
    #[error("repetitions must be at least 1")]
    ZeroRepetitions,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocatorRecord {
    pub name: ContentName,
    pub producer: NodeId,
    pub registered_at: SimTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    ConsumerToCluster,
    ClusterToResolver,
    ResolverToTld,
    TldToNameserver,
    Fetch,
    DataReturn,
}

impl Stage {
    pub const ORDER: [Stage; 6] = [
        Stage::ConsumerToCluster,
        Stage::ClusterToResolver,
        Stage::ResolverToTld,
        Stage::TldToNameserver,
        Stage::Fetch,
        Stage::DataReturn,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::ConsumerToCluster => "consumer->cluster",
            Stage::ClusterToResolver => "cluster->resolver",
            Stage::ResolverToTld => "resolver->tld",
            Stage::TldToNameserver => "tld->nameserver",
            Stage::Fetch => "fetch",
            Stage::DataReturn => "data-return",
        }
    }

    pub fn is_interest(self) -> bool {
        self != Stage::DataReturn
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionOutcome {
    pub name: ContentName,
    /// `None` when the hierarchy has no record for the name.
    pub producer: Option<NodeId>,
    pub cluster: NodeId,
    pub shard: ResolverIndex,
    pub steps: Vec<(Stage, u32)>,
    pub shortcut_taken: bool,
}

impl ResolutionOutcome {
    pub fn resolved(&self) -> bool {
        self.producer.is_some()
    }

    pub fn interest_traversals(&self) -> u32 {
        self.steps
            .iter()
            .filter(|(s, _)| s.is_interest())
            .map(|(_, n)| n)
            .sum()
    }

    pub fn data_traversals(&self) -> u32 {
        self.stage(Stage::DataReturn).unwrap_or(0)
    }

    pub fn stage(&self, stage: Stage) -> Option<u32> {
        self.steps.iter().find(|(s, _)| *s == stage).map(|(_, n)| *n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegistrationReport {
    pub shard: ResolverIndex,
    pub nameserver: NodeId,
    /// Shortest-path link traversals producer -> shard host.
    pub to_resolver: u32,
    /// Shortest-path link traversals producer -> nameserver.
    pub to_nameserver: u32,
    pub already_registered: bool,
}

impl RegistrationReport {
    pub fn traversals(&self) -> u32 {
        self.to_resolver + self.to_nameserver
    }
}

#[derive(Debug, Clone)]
pub struct DeploymentConfig {
    pub resolver_count: usize,
    pub variant: Crc16Variant,
    pub cache_capacity: usize,
}

impl Default for DeploymentConfig {
    fn default() -> Self {
        Self {
            resolver_count: 8,
            variant: Crc16Variant::Arc,
            cache_capacity: DEFAULT_RESOLVER_CACHE,
        }
    }
}

/// Resolver shards, TLD server and nameservers placed on one topology.
///
/// Shard `k` is hosted on the `k`-th resolver-role node in id order. The TLD
/// is the lowest-id `tld` node. Resolver-role nodes all act as cluster ingress
/// points for consumers.
#[derive(Debug)]
pub struct Deployment {
    topology: Arc<Topology>,
    routes: Arc<RouteTable>,
    placement: Placement,
    clusters: Vec<NodeId>,
    shards: Vec<ResolverShard>,
    tld: TldServer,
    nameservers: Vec<NameServer>,
}

impl Deployment {
    pub fn new(
        topology: Arc<Topology>,
        routes: Arc<RouteTable>,
        config: &DeploymentConfig,
    ) -> Result<Self, ResolutionError> {
        let placement = Placement::new(config.resolver_count, config.variant)?;
        let clusters = topology.nodes_with_role(Role::Resolver);
        if clusters.len() < config.resolver_count {
            return Err(ResolutionError::NotEnoughResolvers {
                requested: config.resolver_count,
                available: clusters.len(),
            });
        }
        let shards = clusters[..config.resolver_count]
            .iter()
            .enumerate()
            .map(|(k, host)| {
                ResolverShard::new(ResolverIndex::new_unchecked(k), *host, config.cache_capacity)
            })
            .collect();
        let tld = *topology
            .nodes_with_role(Role::Tld)
            .first()
            .ok_or(ResolutionError::MissingRole(Role::Tld))?;
        let nameservers: Vec<NameServer> = topology
            .nodes_with_role(Role::Nameserver)
            .into_iter()
            .map(NameServer::new)
            .collect();
        if nameservers.is_empty() {
            return Err(ResolutionError::MissingRole(Role::Nameserver));
        }
        Ok(Self {
            topology,
            routes,
            placement,
            clusters,
            shards,
            tld: TldServer::new(tld),
            nameservers,
        })
    }

    pub fn topology(&self) -> &Arc<Topology> {
        &self.topology
    }

    pub fn routes(&self) -> &Arc<RouteTable> {
        &self.routes
    }

    pub fn placement(&self) -> Placement {
        self.placement
    }

    pub fn resolver_count(&self) -> usize {
        self.shards.len()
    }

    pub fn clusters(&self) -> &[NodeId] {
        &self.clusters
    }

    pub fn shards(&self) -> &[ResolverShard] {
        &self.shards
    }

    pub fn shard(&self, index: ResolverIndex) -> &ResolverShard {
        &self.shards[index.value()]
    }

    pub fn shard_mut(&mut self, index: ResolverIndex) -> &mut ResolverShard {
        &mut self.shards[index.value()]
    }

    pub fn tld(&self) -> &TldServer {
        &self.tld
    }

    pub fn nameservers(&self) -> &[NameServer] {
        &self.nameservers
    }

    pub fn nameserver(&self, host: NodeId) -> Option<&NameServer> {
        self.nameservers.iter().find(|n| n.host() == host)
    }

    fn nameserver_mut(&mut self, host: NodeId) -> Option<&mut NameServer> {
        self.nameservers.iter_mut().find(|n| n.host() == host)
    }

    /// Pre-sizes shard and zone tables for about `additional` registrations.
    pub fn reserve(&mut self, additional: usize) {
        let per_shard = additional / self.shards.len() + 1;
        for s in &mut self.shards {
            s.reserve(per_shard);
        }
        let per_zone = additional / self.nameservers.len() + 1;
        for n in &mut self.nameservers {
            n.reserve(per_zone);
        }
    }

    /// Authoritative record counts per shard, in shard order.
    pub fn shard_loads(&self) -> Vec<usize> {
        self.shards.iter().map(ResolverShard::authoritative_len).collect()
    }

    /// Delegates `prefix` at the TLD to the nameserver on `nameserver`.
    pub fn delegate(&mut self, prefix: ContentName, nameserver: NodeId) -> Result<(), ResolutionError> {
        let ns = self
            .nameserver_mut(nameserver)
            .ok_or(ResolutionError::WrongRole(nameserver, Role::Nameserver))?;
        ns.add_prefix(prefix.clone());
        self.tld.delegate(prefix, nameserver);
        Ok(())
    }

    /// Delegates each prefix to the nameservers in turn.
    pub fn delegate_round_robin(&mut self, prefixes: &[ContentName]) -> Result<(), ResolutionError> {
        let hosts: Vec<NodeId> = self.nameservers.iter().map(NameServer::host).collect();
        for (i, p) in prefixes.iter().enumerate() {
            self.delegate(p.clone(), hosts[i % hosts.len()])?;
        }
        Ok(())
    }

    pub fn assign(&self, name: &ContentName) -> ResolverIndex {
        self.placement.assign(name)
    }

    pub fn shard_host(&self, index: ResolverIndex) -> NodeId {
        self.shards[index.value()].host()
    }

    /// Nearest resolver-cluster node to `node`, ties by lowest id.
    pub fn ingress_for(&self, node: NodeId) -> Result<(NodeId, u32), ResolutionError> {
        Ok(self
            .routes
            .nearest(node, &self.clusters)?
            .expect("deployment has at least one cluster"))
    }

    fn check_producer(&self, producer: NodeId) -> Result<(), ResolutionError> {
        match self.topology.role(producer) {
            None => Err(TopologyError::UnknownNode(producer).into()),
            Some(Role::Producer) => Ok(()),
            Some(_) => Err(ResolutionError::WrongRole(producer, Role::Producer)),
        }
    }

    fn existing_producer(&self, name: &ContentName, nameserver: NodeId) -> Option<NodeId> {
        let shard = self.assign(name);
        self.shards[shard.value()]
            .authoritative_record(name)
            .map(|r| r.producer)
            .or_else(|| self.nameserver(nameserver)?.lookup(name).map(|r| r.producer))
    }

    /// Registers `name` for `producer`: the owning shard and the delegated
    /// nameserver both receive an authoritative record.
    pub fn register_content(
        &mut self,
        producer: NodeId,
        name: ContentName,
        now: SimTime,
    ) -> Result<RegistrationReport, ResolutionError> {
        self.register(producer, name, now, true)
    }

    /// Publishes `name` at its nameserver only, leaving the shard cold, as for
    /// content published before the resolver cluster existed. The first
    /// resolution of such a name goes through the TLD.
    pub fn register_in_zone(
        &mut self,
        producer: NodeId,
        name: ContentName,
        now: SimTime,
    ) -> Result<RegistrationReport, ResolutionError> {
        self.register(producer, name, now, false)
    }

    fn register(
        &mut self,
        producer: NodeId,
        name: ContentName,
        now: SimTime,
        place_on_shard: bool,
    ) -> Result<RegistrationReport, ResolutionError> {
        self.check_producer(producer)?;
        let nameserver = self
            .tld
            .lookup(&name)
            .ok_or_else(|| ResolutionError::NoDelegation(name.clone()))?;
        let already_registered = match self.existing_producer(&name, nameserver) {
            Some(p) if p != producer => {
                return Err(ResolutionError::Conflict {
                    name,
                    existing: p,
                })
            }
            Some(_) => true,
            None => false,
        };
        let shard = self.assign(&name);
        let host = self.shard_host(shard);
        let record = LocatorRecord {
            name,
            producer,
            registered_at: now,
        };
        if !already_registered {
            if place_on_shard {
                self.shards[shard.value()].insert_authoritative(record.clone());
            }
            self.nameserver_mut(nameserver)
                .expect("delegation targets a nameserver")
                .insert(record);
        } else if place_on_shard && self.shards[shard.value()].authoritative_record(&record.name).is_none() {
            self.shards[shard.value()].insert_authoritative(record);
        }
        Ok(RegistrationReport {
            shard,
            nameserver,
            to_resolver: self.routes.distance(producer, host)?,
            to_nameserver: self.routes.distance(producer, nameserver)?,
            already_registered,
        })
    }

    /// Producer on record for `name` at its nameserver, if any.
    pub fn producer_of(&self, name: &ContentName) -> Option<NodeId> {
        let ns = self.tld.lookup(name)?;
        self.nameserver(ns)?.lookup(name).map(|r| r.producer)
    }

    /// Runs the resolution flow for one request and returns the per-stage
    /// link traversals. Caches at the shard are updated as a side effect.
    pub fn resolve_and_fetch(
        &mut self,
        consumer: NodeId,
        name: &ContentName,
        now: SimTime,
    ) -> Result<ResolutionOutcome, ResolutionError> {
        if !self.topology.contains(consumer) {
            return Err(TopologyError::UnknownNode(consumer).into());
        }
        let (cluster, to_cluster) = self.ingress_for(consumer)?;
        let shard = self.assign(name);
        let host = self.shard_host(shard);
        let mut steps = vec![
            (Stage::ConsumerToCluster, to_cluster),
            (Stage::ClusterToResolver, self.routes.distance(cluster, host)?),
        ];
        let outcome = |steps: Vec<(Stage, u32)>, producer, shortcut_taken| {
            let mut steps = steps;
            let total: u32 = steps.iter().map(|(_, n)| n).sum();
            steps.push((Stage::DataReturn, total));
            ResolutionOutcome {
                name: name.clone(),
                producer,
                cluster,
                shard,
                steps,
                shortcut_taken,
            }
        };

        let (producer, shortcut) = match self.shards[shard.value()].lookup(name) {
            Some(record) => (record.producer, true),
            None => {
                let tld = self.tld.host();
                steps.push((Stage::ResolverToTld, self.routes.distance(host, tld)?));
                let Some(ns) = self.tld.lookup(name) else {
                    return Ok(outcome(steps, None, false));
                };
                steps.push((Stage::TldToNameserver, self.routes.distance(tld, ns)?));
                let Some(record) = self.nameserver(ns).and_then(|z| z.lookup(name)).cloned() else {
                    return Ok(outcome(steps, None, false));
                };
                let producer = record.producer;
                self.shards[shard.value()].cache_record(LocatorRecord {
                    registered_at: now,
                    ..record
                });
                (producer, false)
            }
        };
        if !self.topology.contains(producer) {
            return Err(ResolutionError::Unreachable(producer));
        }
        steps.push((Stage::Fetch, self.routes.distance(host, producer)?));
        Ok(outcome(steps, Some(producer), shortcut))
    }
}

impl ContentSource for Deployment {
    fn holds(&self, node: NodeId, name: &ContentName) -> bool {
        self.producer_of(name) == Some(node)
    }
}

/// Free-function form of [`Deployment::register_content`].
pub fn register_content(
    deployment: &mut Deployment,
    producer: NodeId,
    name: ContentName,
    now: SimTime,
) -> Result<RegistrationReport, ResolutionError> {
    deployment.register_content(producer, name, now)
}

/// Free-function form of [`Deployment::resolve_and_fetch`].
pub fn resolve_and_fetch(
    deployment: &mut Deployment,
    consumer: NodeId,
    name: &ContentName,
    now: SimTime,
) -> Result<ResolutionOutcome, ResolutionError> {
    deployment.resolve_and_fetch(consumer, name, now)
}

#[cfg(test)]
mod tests {
    use super::*;

    // 0 consumer - 1 router - 2 resolver - 3 router - 4 tld, 3 - 5 nameserver, 1 - 6 producer
    fn small() -> Deployment {
        let t = Topology::parse(
            "node 0 c consumer\nnode 1 r1 router\nnode 2 s resolver\nnode 3 r3 router\n\
             node 4 t tld\nnode 5 ns nameserver\nnode 6 p producer\n\
             link 0 1 1 1000\nlink 1 2 1 1000\nlink 2 3 1 1000\nlink 3 4 1 1000\nlink 3 5 1 1000\nlink 1 6 1 1000\n",
        )
        .unwrap();
        let routes = Arc::new(RouteTable::new(&t));
        let cfg = DeploymentConfig {
            resolver_count: 1,
            ..Default::default()
        };
        let mut d = Deployment::new(Arc::new(t), routes, &cfg).unwrap();
        d.delegate(ContentName::parse("/a").unwrap(), NodeId(5)).unwrap();
        d
    }

    fn n(s: &str) -> ContentName {
        ContentName::parse(s).unwrap()
    }

    #[test]
    fn registration_places_on_hashed_shard() {
        let mut d = small();
        let r = d.register_content(NodeId(6), n("/a/x"), SimTime::ZERO).unwrap();
        assert_eq!(r.shard, d.assign(&n("/a/x")));
        assert_eq!(r.to_resolver, 2);
        assert_eq!(r.to_nameserver, 4);
        assert!(!r.already_registered);
        assert!(d.shard(r.shard).authoritative_record(&n("/a/x")).is_some());
        assert_eq!(d.nameserver(NodeId(5)).unwrap().zone_len(), 1);

        let again = d.register_content(NodeId(6), n("/a/x"), SimTime::ZERO).unwrap();
        assert!(again.already_registered);
        assert_eq!(d.shard_loads(), vec![1]);
        assert_eq!(d.nameserver(NodeId(5)).unwrap().zone_len(), 1);
    }

    #[test]
    fn registration_errors() {
        let mut d = small();
        assert!(matches!(
            d.register_content(NodeId(6), n("/zzz/x"), SimTime::ZERO),
            Err(ResolutionError::NoDelegation(_))
        ));
        assert!(matches!(
            d.register_content(NodeId(1), n("/a/x"), SimTime::ZERO),
            Err(ResolutionError::WrongRole(..))
        ));
    }

    #[test]
    fn shortcut_when_shard_holds_record() {
        let mut d = small();
        d.register_content(NodeId(6), n("/a/x"), SimTime::ZERO).unwrap();
        let o = d.resolve_and_fetch(NodeId(0), &n("/a/x"), SimTime::ZERO).unwrap();
        assert!(o.shortcut_taken);
        assert_eq!(o.producer, Some(NodeId(6)));
        assert!(o.stage(Stage::ResolverToTld).is_none());
        assert!(o.stage(Stage::TldToNameserver).is_none());
        // 0->2 is 2 hops, cluster is the shard host, 2->6 is 2 hops
        assert_eq!(o.interest_traversals(), 4);
        assert_eq!(o.data_traversals(), 4);
    }

    #[test]
    fn cold_shard_goes_through_tld_then_caches() {
        let mut d = small();
        d.register_in_zone(NodeId(6), n("/a/y"), SimTime::ZERO).unwrap();
        let first = d.resolve_and_fetch(NodeId(0), &n("/a/y"), SimTime::ZERO).unwrap();
        assert!(!first.shortcut_taken);
        assert_eq!(first.stage(Stage::ResolverToTld), Some(2));
        assert_eq!(first.stage(Stage::TldToNameserver), Some(2));
        assert_eq!(first.interest_traversals(), 2 + 0 + 2 + 2 + 2);
        let second = d.resolve_and_fetch(NodeId(0), &n("/a/y"), SimTime::ZERO).unwrap();
        assert!(second.shortcut_taken);
        assert!(second.interest_traversals() < first.interest_traversals());
    }

    #[test]
    fn unregistered_name_fails_softly() {
        let mut d = small();
        let o = d.resolve_and_fetch(NodeId(0), &n("/a/none"), SimTime::ZERO).unwrap();
        assert!(!o.resolved());
        assert_eq!(o.stage(Stage::TldToNameserver), Some(2));
        let o = d.resolve_and_fetch(NodeId(0), &n("/nope/none"), SimTime::ZERO).unwrap();
        assert!(!o.resolved());
        assert!(o.stage(Stage::TldToNameserver).is_none());
        assert!(d.resolve_and_fetch(NodeId(42), &n("/a/x"), SimTime::ZERO).is_err());
    }

    #[test]
    fn conflicting_producer_rejected() {
        let t = Topology::parse(
            "node 0 s resolver\nnode 1 t tld\nnode 2 ns nameserver\nnode 3 p producer\nnode 4 q producer\n\
             link 0 1 1 1000\nlink 0 2 1 1000\nlink 0 3 1 1000\nlink 0 4 1 1000\n",
        )
        .unwrap();
        let routes = Arc::new(RouteTable::new(&t));
        let cfg = DeploymentConfig { resolver_count: 1, ..Default::default() };
        let mut d = Deployment::new(Arc::new(t), routes, &cfg).unwrap();
        d.delegate(n("/a"), NodeId(2)).unwrap();
        d.register_content(NodeId(3), n("/a/x"), SimTime::ZERO).unwrap();
        assert!(matches!(
            d.register_content(NodeId(4), n("/a/x"), SimTime::ZERO),
            Err(ResolutionError::Conflict { existing: NodeId(3), .. })
        ));
    }
}
