//! Experiment scenarios: distance cases, all-pairs hop counting, long-distance
//! scaling, and skewed-shard lookup timing.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::num::NonZeroU32;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::crc16::Crc16Variant;
use crate::engine::{EngineError, FlowRecord, LogSink, SimConfig, SimTime, Simulation};
use crate::metrics::{ProbeResult, RequestRecord, ScenarioReport, Scheme};
use crate::name::ContentName;
use crate::node::{ContentSource, DEFAULT_CS_CAPACITY, PIT_LIFETIME};
use crate::packet::DEFAULT_PAYLOAD_BITS;
use crate::placement::{Placement, ResolverIndex};
use crate::resolution::{
    lookup_timing_probe, Deployment, DeploymentConfig, LocatorRecord, ResolutionError, ResolverShard,
    DEFAULT_RESOLVER_CACHE,
};
use crate::routing::RouteTable;
use crate::topology::{NodeId, Role, Topology, TopologyError, PRESET_NAMES};

/// Gap between consecutive requests; longer than a PIT lifetime so requests never interact.
pub const REQUEST_SPACING: SimTime = SimTime::from_secs(5);
pub const CATEGORY_COUNT: usize = 16;
pub const S3_CASES: usize = 16;
pub const S3_REQUESTS_PER_CASE: usize = 32;
pub const S4_PROBE_NAMES: usize = 20_000;
pub const S4_REPETITIONS: usize = 10;

const _: () = assert!(REQUEST_SPACING.as_nanos() > PIT_LIFETIME.as_nanos());

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("cannot read topology file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("topology does not fit scenario {scenario}: {reason}")]
    Mismatch { scenario: ScenarioId, reason: String },
    #[error("--skew only applies to scenario s4")]
    SkewWithoutS4,
    #[error("scenario s4 needs a skew map")]
    MissingSkew,
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScenarioId {
    S1Near,
    S1Mid,
    S1Long,
    S2,
    S3,
    S4,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 6] = [
        ScenarioId::S1Near,
        ScenarioId::S1Mid,
        ScenarioId::S1Long,
        ScenarioId::S2,
        ScenarioId::S3,
        ScenarioId::S4,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioId::S1Near => "s1_near",
            ScenarioId::S1Mid => "s1_mid",
            ScenarioId::S1Long => "s1_long",
            ScenarioId::S2 => "s2",
            ScenarioId::S3 => "s3",
            ScenarioId::S4 => "s4",
        }
    }

    /// Corpus size used when the configuration does not set one.
    pub fn default_content(self) -> usize {
        match self {
            ScenarioId::S1Near | ScenarioId::S1Mid | ScenarioId::S1Long => 16_384,
            ScenarioId::S2 | ScenarioId::S3 | ScenarioId::S4 => 1_000_000,
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScenarioId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| {
                let known: Vec<_> = ScenarioId::ALL.iter().map(|i| i.as_str()).collect();
                format!("unknown scenario '{s}' (expected one of {})", known.join(", "))
            })
    }
}

/// Per-shard item counts for s4. `others` fills every shard not listed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Skew {
    pub per_shard: BTreeMap<usize, usize>,
    pub others: Option<usize>,
}

impl Skew {
    /// Loads for shards `0..n`.
    pub fn loads(&self, n: usize) -> Result<Vec<usize>, ScenarioError> {
        if let Some(bad) = self.per_shard.keys().find(|k| **k >= n) {
            return Err(ScenarioError::Invalid(format!(
                "skew names shard {bad} but only {n} shards exist"
            )));
        }
        (0..n)
            .map(|k| {
                self.per_shard
                    .get(&k)
                    .copied()
                    .or(self.others)
                    .ok_or_else(|| ScenarioError::Invalid(format!("skew gives no count for shard {k}")))
            })
            .collect()
    }
}

impl FromStr for Skew {
    type Err = String;

    /// `i:count,...`, optionally with `others:count`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut skew = Skew::default();
        for part in s.split(',') {
            let (key, count) = part
                .split_once(':')
                .ok_or_else(|| format!("skew entry '{part}' is not <shard>:<count>"))?;
            let count: usize = count
                .parse()
                .map_err(|_| format!("bad item count '{count}' in skew entry '{part}'"))?;
            if key == "others" {
                if skew.others.replace(count).is_some() {
                    return Err("'others' given twice".into());
                }
            } else {
                let shard: usize = key
                    .parse()
                    .map_err(|_| format!("bad shard index '{key}' in skew entry '{part}'"))?;
                if skew.per_shard.insert(shard, count).is_some() {
                    return Err(format!("shard {shard} given twice"));
                }
            }
        }
        Ok(skew)
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub scenario: ScenarioId,
    /// Preset name or path to a topology file.
    pub topology: String,
    pub resolver_count: usize,
    /// Corpus size; `None` uses the scenario default (or the skew total for s4).
    pub content_count: Option<usize>,
    pub skew: Option<Skew>,
    pub seed: u64,
    pub schemes: Vec<Scheme>,
    pub out: Option<PathBuf>,
    pub verbose: bool,
}

impl ScenarioConfig {
    pub fn new(scenario: ScenarioId, topology: impl Into<String>) -> Self {
        Self {
            scenario,
            topology: topology.into(),
            resolver_count: 8,
            content_count: None,
            skew: None,
            seed: 42,
            schemes: vec![Scheme::Flooding, Scheme::BalanceDn],
            out: None,
            verbose: false,
        }
    }

    fn sim_config(&self, cs_capacity: usize) -> SimConfig {
        SimConfig {
            seed: self.seed,
            cs_capacity,
            payload_bits: NonZeroU32::new(DEFAULT_PAYLOAD_BITS).unwrap(),
            log: if self.verbose { LogSink::Stderr } else { LogSink::Off },
        }
    }

    fn has(&self, scheme: Scheme) -> bool {
        self.schemes.contains(&scheme)
    }
}

/// Loads a preset by name, otherwise reads the argument as a file path.
pub fn load_topology(arg: &str) -> Result<Topology, ScenarioError> {
    if PRESET_NAMES.contains(&arg) {
        return Ok(Topology::preset(arg)?);
    }
    let path = PathBuf::from(arg);
    let text = std::fs::read_to_string(&path).map_err(|source| ScenarioError::Io { path, source })?;
    Ok(Topology::parse(&text)?)
}

fn corpus_text(i: usize) -> String {
    format!("/cat{}/obj{}", i % CATEGORY_COUNT, i)
}

/// Synthetic name `i` of the corpus: `/cat<i mod 16>/obj<i>`.
pub fn corpus_name(i: usize) -> ContentName {
    ContentName::parse(&corpus_text(i)).expect("corpus names are well formed")
}

pub fn category_prefixes() -> Vec<ContentName> {
    (0..CATEGORY_COUNT)
        .map(|k| ContentName::parse(&format!("/cat{k}")).unwrap())
        .collect()
}

/// Corpus indices owned by producer `j` of `p` (round-robin ownership), in order.
fn owned_by(j: usize, p: usize, content: usize) -> impl Iterator<Item = usize> {
    (j..content).step_by(p)
}

/// Shard placement plus every corpus name registered (hashed) to its owner.
pub fn build_deployment(
    topology: Arc<Topology>,
    routes: Arc<RouteTable>,
    resolver_count: usize,
    content_count: usize,
) -> Result<Deployment, ScenarioError> {
    let producers = topology.nodes_with_role(Role::Producer);
    if producers.is_empty() {
        return Err(ScenarioError::Invalid("topology has no producer nodes".into()));
    }
    let config = DeploymentConfig {
        resolver_count,
        variant: Crc16Variant::Arc,
        cache_capacity: DEFAULT_RESOLVER_CACHE,
    };
    let mut d = Deployment::new(topology, routes, &config)?;
    d.delegate_round_robin(&category_prefixes())?;
    d.reserve(content_count);
    for i in 0..content_count {
        d.register_content(producers[i % producers.len()], corpus_name(i), SimTime::ZERO)?;
    }
    Ok(d)
}

/// One planned request: consumer, name, and the producer that owns it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlannedRequest {
    pub consumer: NodeId,
    pub content: ContentName,
    pub producer: NodeId,
}

fn schedule(sim: &mut Simulation, plan: &[PlannedRequest]) -> Result<Vec<u64>, EngineError> {
    plan.iter()
        .enumerate()
        .map(|(k, r)| {
            let at = SimTime::from_nanos(REQUEST_SPACING.as_nanos() * k as u64);
            sim.request(at, r.consumer, r.content.clone())
        })
        .collect()
}

fn collect(sim: &Simulation, flows: &[u64]) -> Vec<FlowRecord> {
    flows
        .iter()
        .map(|f| sim.flow(*f).expect("scheduled flows are recorded").clone())
        .collect()
}

/// Runs `plan` under flooding; producers answer for the names they own.
pub fn run_flooding(
    topology: Arc<Topology>,
    plan: &[PlannedRequest],
    config: &SimConfig,
) -> Result<Vec<FlowRecord>, ScenarioError> {
    let source: HashMap<ContentName, NodeId> = plan.iter().map(|r| (r.content.clone(), r.producer)).collect();
    let source: Arc<dyn ContentSource> = Arc::new(source);
    let mut sim = Simulation::flooding(topology, source, config);
    let flows = schedule(&mut sim, plan)?;
    sim.run()?;
    Ok(collect(&sim, &flows))
}

/// Runs `plan` through the packet-level resolution service.
pub fn run_balancedn(
    deployment: Deployment,
    plan: &[PlannedRequest],
    config: &SimConfig,
) -> Result<(Vec<FlowRecord>, Simulation), ScenarioError> {
    let mut sim = Simulation::balancedn(deployment, config)?;
    let flows = schedule(&mut sim, plan)?;
    sim.run()?;
    Ok((collect(&sim, &flows), sim))
}

fn to_records(
    scenario: ScenarioId,
    scheme: Scheme,
    plan: &[PlannedRequest],
    flows: &[FlowRecord],
    routes: &RouteTable,
) -> Result<Vec<RequestRecord>, ScenarioError> {
    plan.iter()
        .zip(flows)
        .map(|(r, f)| {
            Ok(RequestRecord {
                scenario: scenario.as_str().to_string(),
                consumer: r.consumer,
                producer: r.producer,
                distance: routes.distance(r.consumer, r.producer)?,
                scheme,
                interest_traversals: f.interest_traversals,
                data_traversals: f.data_traversals,
                path_hops: f.path_hops,
                bytes: f.bytes,
                latency: f.latency().unwrap_or(SimTime::ZERO),
                satisfied: f.satisfied(),
            })
        })
        .collect()
}

struct Setup {
    topology: Arc<Topology>,
    routes: Arc<RouteTable>,
    content: usize,
}

impl Setup {
    fn new(config: &ScenarioConfig) -> Result<Self, ScenarioError> {
        let topology = Arc::new(load_topology(&config.topology)?);
        let routes = Arc::new(RouteTable::new(&topology));
        Ok(Self {
            topology,
            routes,
            content: config.content_count.unwrap_or(config.scenario.default_content()),
        })
    }

    fn mismatch(&self, scenario: ScenarioId, reason: impl Into<String>) -> ScenarioError {
        ScenarioError::Mismatch {
            scenario,
            reason: reason.into(),
        }
    }

    fn first(&self, role: Role, scenario: ScenarioId) -> Result<NodeId, ScenarioError> {
        self.topology
            .nodes_with_role(role)
            .first()
            .copied()
            .ok_or_else(|| self.mismatch(scenario, format!("no {role} node")))
    }

    /// Takes the first `count` unused corpus names owned by `producer`.
    fn names_for(
        &self,
        producer: NodeId,
        count: usize,
        used: &mut BTreeMap<NodeId, usize>,
    ) -> Result<Vec<ContentName>, ScenarioError> {
        let producers = self.topology.nodes_with_role(Role::Producer);
        let j = producers.iter().position(|p| *p == producer).expect("producer");
        let skip = used.entry(producer).or_insert(0);
        let names: Vec<ContentName> = owned_by(j, producers.len(), self.content)
            .skip(*skip)
            .take(count)
            .map(corpus_name)
            .collect();
        if names.len() < count {
            return Err(ScenarioError::Invalid(format!(
                "corpus of {} names is too small for the requested traffic",
                self.content
            )));
        }
        *skip += count;
        Ok(names)
    }
}

/// Runs the configured scenario and returns its report.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioReport, ScenarioError> {
    match (config.scenario, &config.skew) {
        (ScenarioId::S4, None) => return Err(ScenarioError::MissingSkew),
        (ScenarioId::S4, Some(_)) => {}
        (_, Some(_)) => return Err(ScenarioError::SkewWithoutS4),
        _ => {}
    }
    if config.schemes.is_empty() {
        return Err(ScenarioError::Invalid("no schemes selected".into()));
    }
    match config.scenario {
        ScenarioId::S1Near | ScenarioId::S1Mid | ScenarioId::S1Long => run_s1(config),
        ScenarioId::S2 => run_s2(config),
        ScenarioId::S3 => run_s3(config),
        ScenarioId::S4 => run_s4(config),
    }
}

/// Runs both schemes on `plan` (in parallel) and assembles the report.
fn run_plan(
    config: &ScenarioConfig,
    setup: &Setup,
    plan: &[PlannedRequest],
    cs_capacity: usize,
) -> Result<ScenarioReport, ScenarioError> {
    let sim_config = config.sim_config(cs_capacity);
    let mut report = ScenarioReport::new(config.scenario.as_str());
    let (flood, bdn) = std::thread::scope(|s| {
        let flood = config.has(Scheme::Flooding).then(|| {
            s.spawn(|| run_flooding(Arc::clone(&setup.topology), plan, &sim_config))
        });
        let bdn = if config.has(Scheme::BalanceDn) {
            let deployment = build_deployment(
                Arc::clone(&setup.topology),
                Arc::clone(&setup.routes),
                config.resolver_count,
                setup.content,
            )?;
            report.shard_loads = deployment.shard_loads();
            Some(run_balancedn(deployment, plan, &sim_config).map(|(f, _)| f))
        } else {
            None
        };
        let flood = flood.map(|h| h.join().expect("flooding run panicked"));
        Ok::<_, ScenarioError>((flood, bdn))
    })?;
    if let Some(flows) = flood {
        report
            .records
            .extend(to_records(config.scenario, Scheme::Flooding, plan, &flows?, &setup.routes)?);
    }
    if let Some(flows) = bdn {
        report
            .records
            .extend(to_records(config.scenario, Scheme::BalanceDn, plan, &flows?, &setup.routes)?);
    }
    Ok(report)
}

/// Producer for an s1 case, seen from `consumer`.
pub fn s1_producer(
    topology: &Topology,
    routes: &RouteTable,
    consumer: NodeId,
    scenario: ScenarioId,
) -> Result<NodeId, ScenarioError> {
    let mut by_distance: Vec<(u32, NodeId)> = topology
        .nodes_with_role(Role::Producer)
        .into_iter()
        .map(|p| Ok((routes.distance(consumer, p)?, p)))
        .collect::<Result<_, TopologyError>>()?;
    by_distance.sort();
    let exact = |d: u32| by_distance.iter().find(|(x, _)| *x == d).map(|(_, p)| *p);
    let pick = match scenario {
        ScenarioId::S1Near => exact(1),
        ScenarioId::S1Mid => exact(2),
        _ => by_distance
            .iter()
            .filter(|(d, _)| *d >= 4)
            .max_by_key(|(d, p)| (*d, std::cmp::Reverse(*p)))
            .map(|(_, p)| *p),
    };
    pick.ok_or_else(|| ScenarioError::Mismatch {
        scenario,
        reason: format!("no producer at the required distance from consumer {consumer}"),
    })
}

fn run_s1(config: &ScenarioConfig) -> Result<ScenarioReport, ScenarioError> {
    let setup = Setup::new(config)?;
    let consumer = setup.first(Role::Consumer, config.scenario)?;
    let producer = s1_producer(&setup.topology, &setup.routes, consumer, config.scenario)?;
    let content = setup.names_for(producer, 1, &mut BTreeMap::new())?.remove(0);
    let plan = [PlannedRequest {
        consumer,
        content,
        producer,
    }];
    // cold caches everywhere
    run_plan(config, &setup, &plan, 0)
}

/// Router-role node nearest to `node`, ties by lowest id.
pub fn access_router(topology: &Topology, routes: &RouteTable, node: NodeId) -> Result<Option<NodeId>, TopologyError> {
    Ok(routes.nearest_with_role(topology, node, Role::Router)?.map(|(r, _)| r))
}

/// Every consumer asks once for a distinct name from each producer outside its subnet.
pub fn s2_plan(
    topology: &Topology,
    routes: &RouteTable,
    content: usize,
) -> Result<Vec<PlannedRequest>, ScenarioError> {
    let setup = Setup {
        topology: Arc::new(topology.clone()),
        routes: Arc::new(routes.clone()),
        content,
    };
    let mut used = BTreeMap::new();
    let mut plan = Vec::new();
    for consumer in topology.nodes_with_role(Role::Consumer) {
        let home = access_router(topology, routes, consumer)?;
        for producer in topology.nodes_with_role(Role::Producer) {
            if access_router(topology, routes, producer)? == home {
                continue;
            }
            let content = setup.names_for(producer, 1, &mut used)?.remove(0);
            plan.push(PlannedRequest {
                consumer,
                content,
                producer,
            });
        }
    }
    Ok(plan)
}

fn run_s2(config: &ScenarioConfig) -> Result<ScenarioReport, ScenarioError> {
    let setup = Setup::new(config)?;
    let plan = s2_plan(&setup.topology, &setup.routes, setup.content)?;
    if plan.is_empty() {
        return Err(setup.mismatch(config.scenario, "no cross-subnet consumer/producer pairs"));
    }
    run_plan(config, &setup, &plan, DEFAULT_CS_CAPACITY)
}

/// Indices of `count` evenly spaced picks from `0..len` (all of them when `len == count`).
pub fn evenly_spaced(len: usize, count: usize) -> Vec<usize> {
    if count == 0 || len == 0 {
        return Vec::new();
    }
    if count == 1 {
        return vec![0];
    }
    (0..count)
        .map(|i| (i * (len - 1) + (count - 1) / 2) / (count - 1))
        .collect()
}

/// The s3 cases: (distance, producer) pairs seen from `consumer`.
pub fn s3_cases(
    topology: &Topology,
    routes: &RouteTable,
    consumer: NodeId,
) -> Result<Vec<(u32, NodeId)>, ScenarioError> {
    let mut nearest_at: BTreeMap<u32, NodeId> = BTreeMap::new();
    for p in topology.nodes_with_role(Role::Producer) {
        nearest_at.entry(routes.distance(consumer, p)?).or_insert(p);
    }
    let distinct: Vec<(u32, NodeId)> = nearest_at.into_iter().collect();
    if distinct.len() < S3_CASES {
        return Err(ScenarioError::Mismatch {
            scenario: ScenarioId::S3,
            reason: format!(
                "needs producers at {S3_CASES} distinct distances, found {}",
                distinct.len()
            ),
        });
    }
    Ok(evenly_spaced(distinct.len(), S3_CASES)
        .into_iter()
        .map(|i| distinct[i])
        .collect())
}

fn run_s3(config: &ScenarioConfig) -> Result<ScenarioReport, ScenarioError> {
    let setup = Setup::new(config)?;
    let consumer = setup.first(Role::Consumer, config.scenario)?;
    let mut used = BTreeMap::new();
    let mut plan = Vec::new();
    for (_, producer) in s3_cases(&setup.topology, &setup.routes, consumer)? {
        for content in setup.names_for(producer, S3_REQUESTS_PER_CASE, &mut used)? {
            plan.push(PlannedRequest {
                consumer,
                content,
                producer,
            });
        }
    }
    run_plan(config, &setup, &plan, DEFAULT_CS_CAPACITY)
}

/// Shard tables filled to `loads[k]` authoritative records each, using only
/// corpus names that hash to shard `k`.
pub fn skewed_shards(
    loads: &[usize],
    hosts: &[NodeId],
    producers: &[NodeId],
) -> Result<Vec<ResolverShard>, ScenarioError> {
    let placement = Placement::new(loads.len(), Crc16Variant::Arc).map_err(ResolutionError::from)?;
    let mut shards: Vec<ResolverShard> = loads
        .iter()
        .enumerate()
        .map(|(k, load)| {
            let mut s = ResolverShard::new(ResolverIndex::new_unchecked(k), hosts[k % hosts.len()], 0);
            s.reserve(*load);
            s
        })
        .collect();
    let mut remaining: usize = loads.iter().sum();
    let mut i = 0usize;
    while remaining > 0 {
        let text = corpus_text(i);
        let k = placement.assign_bytes(text.as_bytes()).value();
        if shards[k].authoritative_len() < loads[k] {
            shards[k].insert_authoritative(LocatorRecord {
                name: ContentName::parse(&text).expect("corpus names are well formed"),
                producer: producers[i % producers.len()],
                registered_at: SimTime::ZERO,
            });
            remaining -= 1;
        }
        i += 1;
    }
    Ok(shards)
}

/// Mean probe latency per shard (ms), interleaving shards within each repetition.
pub fn probe_shards(shards: &[ResolverShard], probe_names: usize, repetitions: usize) -> Result<Vec<f64>, ScenarioError> {
    let probes: Vec<Vec<ContentName>> = shards
        .iter()
        .map(|s| {
            let mut names: Vec<ContentName> = s.authoritative().map(|r| r.name.clone()).collect();
            names.sort();
            let step = (names.len() / probe_names.max(1)).max(1);
            names.into_iter().step_by(step).take(probe_names).collect()
        })
        .collect();
    let mut totals = vec![0.0; shards.len()];
    for _ in 0..repetitions {
        for (k, shard) in shards.iter().enumerate() {
            totals[k] += lookup_timing_probe(shard, &probes[k], 1)?;
        }
    }
    Ok(totals.into_iter().map(|t| t / repetitions as f64).collect())
}

fn run_s4(config: &ScenarioConfig) -> Result<ScenarioReport, ScenarioError> {
    let skew = config.skew.as_ref().ok_or(ScenarioError::MissingSkew)?;
    let setup = Setup::new(config)?;
    let loads = skew.loads(config.resolver_count)?;
    if let Some(total) = config.content_count {
        if total != loads.iter().sum::<usize>() {
            return Err(ScenarioError::Invalid(format!(
                "skew counts sum to {} but content count is {total}",
                loads.iter().sum::<usize>()
            )));
        }
    }
    let hosts = setup.topology.nodes_with_role(Role::Resolver);
    if hosts.len() < config.resolver_count {
        return Err(ResolutionError::NotEnoughResolvers {
            requested: config.resolver_count,
            available: hosts.len(),
        }
        .into());
    }
    let producers = setup.topology.nodes_with_role(Role::Producer);
    if producers.is_empty() {
        return Err(setup.mismatch(config.scenario, "no producer nodes"));
    }
    let shards = skewed_shards(&loads, &hosts[..config.resolver_count], &producers)?;
    let means = probe_shards(&shards, S4_PROBE_NAMES, S4_REPETITIONS)?;
    let mut report = ScenarioReport::new(config.scenario.as_str());
    report.shard_loads = loads.clone();
    report.probes = means
        .into_iter()
        .enumerate()
        .map(|(shard, mean_ms)| ProbeResult {
            shard,
            items: loads[shard],
            mean_ms,
        })
        .collect();
    Ok(report)
}
