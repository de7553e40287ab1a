//! Deterministic discrete-event core.
//!
//! One [`Simulation`] owns every node of a topology, a single event queue and
//! a single seeded RNG (used only for nonces). Events at equal times run in
//! scheduling order, so a run is a pure function of its inputs.

mod queue;
mod time;

use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::num::NonZeroU32;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::name::ContentName;
use crate::node::{ContentSource, Disposition, FaceId, NdnNode, NodeCounters, NodeError, Strategy, DEFAULT_CS_CAPACITY, LOCAL_FACE};
use crate::packet::{DataContent, DataPacket, FlowId, InterestPacket, Nonce, Packet, DEFAULT_PAYLOAD_BITS};
use crate::resolution::{AppAction, BalanceDnService, Deployment, ServiceNames, Stage};
use crate::routing::build_fib;
use crate::topology::{LinkDescriptor, NodeId, Topology, TopologyError};

pub use queue::{Event, EventKind, EventQueue};
pub use time::SimTime;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("cannot schedule at {fire_at}, clock is already {clock}")]
    PastEvent { fire_at: SimTime, clock: SimTime },
    #[error("node {from} is not an endpoint of link {a}-{b}")]
    NotOnLink { from: NodeId, a: NodeId, b: NodeId },
    #[error(transparent)]
    Node(#[from] NodeError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// A packet on its way across one link.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Delivery {
    pub to: NodeId,
    pub at: SimTime,
    pub packet: Packet,
}

/// Puts `packet` on `link` at `now`. Arrival is `now + delay + bits/bandwidth`;
/// the packet's hop count and trace record the traversal.
pub fn transmit(link: &LinkDescriptor, mut packet: Packet, from: NodeId, now: SimTime) -> Result<Delivery, EngineError> {
    let to = link.other(from).ok_or(EngineError::NotOnLink {
        from,
        a: link.endpoint_a,
        b: link.endpoint_b,
    })?;
    let at = now + link.delay + link.serialization(packet.wire_bits());
    packet.traverse(to);
    Ok(Delivery { to, at, packet })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogSink {
    #[default]
    Off,
    Stderr,
    Memory,
}

/// One line per dispatched event: time, kind, node, name, hop count.
#[derive(Debug, Default)]
pub struct EventLog {
    sink: LogSink,
    lines: Vec<String>,
}

impl EventLog {
    pub fn new(sink: LogSink) -> Self {
        Self {
            sink,
            lines: Vec::new(),
        }
    }

    fn record(&mut self, now: SimTime, event: &EventKind) {
        if self.sink == LogSink::Off {
            return;
        }
        let (node, name, hops) = match event {
            EventKind::DeliverInterest { to, packet, .. } => (*to, &packet.name, packet.hop_count),
            EventKind::DeliverData { to, packet, .. } => (*to, &packet.name, packet.hop_count),
            EventKind::PitExpiry { node, name } => (*node, name, 0),
            EventKind::RequestInjection { consumer, content, .. } => (*consumer, content, 0),
            EventKind::Registration { producer, name, .. } => (*producer, name, 0),
        };
        let line = format!("{} {} node={} name={} hops={}", now, event.label(), node, name, hops);
        match self.sink {
            LogSink::Stderr => {
                let _ = writeln!(std::io::stderr().lock(), "{line}");
            }
            LogSink::Memory => self.lines.push(line),
            LogSink::Off => {}
        }
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub seed: u64,
    pub cs_capacity: usize,
    pub payload_bits: NonZeroU32,
    pub log: LogSink,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            cs_capacity: DEFAULT_CS_CAPACITY,
            payload_bits: NonZeroU32::new(DEFAULT_PAYLOAD_BITS).unwrap(),
            log: LogSink::Off,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowOutcome {
    Pending,
    Satisfied,
    NotFound,
}

/// Everything measured about one consumer request.
#[derive(Debug, Clone)]
pub struct FlowRecord {
    pub flow: FlowId,
    pub consumer: NodeId,
    pub content: ContentName,
    pub started: SimTime,
    pub finished: Option<SimTime>,
    pub outcome: FlowOutcome,
    /// Node that produced the Data the consumer received.
    pub producer: Option<NodeId>,
    pub interest_traversals: u32,
    pub data_traversals: u32,
    /// Hop count of the Data packet on arrival at the consumer.
    pub path_hops: u32,
    pub bytes: u64,
    pub stages: BTreeMap<Stage, u32>,
    /// Trace of the first Interest of this flow answered from a content store
    /// or producer (flooding); service legs answered by applications are not recorded.
    pub interest_path: Option<Vec<NodeId>>,
}

impl FlowRecord {
    pub fn satisfied(&self) -> bool {
        self.outcome == FlowOutcome::Satisfied
    }

    pub fn latency(&self) -> Option<SimTime> {
        self.finished.map(|f| f - self.started)
    }
}

enum Mode {
    Flooding,
    BalanceDn(Box<BalanceDnService>),
}

pub struct Simulation {
    topology: Arc<Topology>,
    index: HashMap<NodeId, usize>,
    nodes: Vec<NdnNode>,
    queue: EventQueue,
    rng: ChaCha8Rng,
    mode: Mode,
    flows: BTreeMap<FlowId, FlowRecord>,
    next_flow: FlowId,
    log: EventLog,
    processed: u64,
    registration_failures: u64,
}

impl std::fmt::Debug for Simulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Simulation")
            .field("nodes", &self.nodes.len())
            .field("clock", &self.queue.clock())
            .field("queued", &self.queue.len())
            .field("flows", &self.flows.len())
            .finish()
    }
}

impl Simulation {
    fn with_nodes(topology: Arc<Topology>, strategy: Strategy, config: &SimConfig, mode: Mode) -> Self {
        let mut index = HashMap::new();
        let nodes = topology
            .node_ids()
            .enumerate()
            .map(|(i, id)| {
                index.insert(id, i);
                NdnNode::new(id, topology.neighbors(id), strategy, config.cs_capacity)
            })
            .collect();
        Self {
            topology,
            index,
            nodes,
            queue: EventQueue::new(),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            mode,
            flows: BTreeMap::new(),
            next_flow: 1,
            log: EventLog::new(config.log),
            processed: 0,
            registration_failures: 0,
        }
    }

    /// Flooding baseline: every node floods; nodes for which `source` holds a
    /// name answer it.
    pub fn flooding(topology: Arc<Topology>, source: Arc<dyn ContentSource>, config: &SimConfig) -> Self {
        let mut sim = Self::with_nodes(topology, Strategy::Flooding, config, Mode::Flooding);
        for node in &mut sim.nodes {
            node.set_content_source(Arc::clone(&source), config.payload_bits);
        }
        sim
    }

    /// BalanceDN: best-route forwarding toward the resolution servers of `deployment`.
    pub fn balancedn(deployment: Deployment, config: &SimConfig) -> Result<Self, EngineError> {
        let topology = Arc::clone(deployment.topology());
        let routes = Arc::clone(deployment.routes());
        let service = BalanceDnService::new(deployment, config.payload_bits);
        let anchors = service.anchors();
        let mut sim = Self::with_nodes(
            Arc::clone(&topology),
            Strategy::BestRoute,
            config,
            Mode::BalanceDn(Box::new(service)),
        );
        for node in &mut sim.nodes {
            node.fib = build_fib(&topology, &routes, node.id(), &anchors)?;
        }
        Ok(sim)
    }

    pub fn topology(&self) -> &Arc<Topology> {
        &self.topology
    }

    pub fn clock(&self) -> SimTime {
        self.queue.clock()
    }

    pub fn node(&self, id: NodeId) -> Option<&NdnNode> {
        self.index.get(&id).map(|&i| &self.nodes[i])
    }

    pub fn node_mut(&mut self, id: NodeId) -> Option<&mut NdnNode> {
        self.index.get(&id).map(|&i| &mut self.nodes[i])
    }

    pub fn deployment(&self) -> Option<&Deployment> {
        match &self.mode {
            Mode::BalanceDn(s) => Some(s.deployment()),
            Mode::Flooding => None,
        }
    }

    pub fn deployment_mut(&mut self) -> Option<&mut Deployment> {
        match &mut self.mode {
            Mode::BalanceDn(s) => Some(s.deployment_mut()),
            Mode::Flooding => None,
        }
    }

    pub fn flows(&self) -> &BTreeMap<FlowId, FlowRecord> {
        &self.flows
    }

    pub fn flow(&self, flow: FlowId) -> Option<&FlowRecord> {
        self.flows.get(&flow)
    }

    pub fn log(&self) -> &EventLog {
        &self.log
    }

    pub fn processed(&self) -> u64 {
        self.processed
    }

    pub fn registration_failures(&self) -> u64 {
        self.registration_failures
    }

    /// Per-node counters summed over the whole network.
    pub fn totals(&self) -> NodeCounters {
        let mut t = NodeCounters::default();
        for n in &self.nodes {
            let c = n.counters();
            t.interests_received += c.interests_received;
            t.answered += c.answered;
            t.suppressed += c.suppressed;
            t.aggregated += c.aggregated;
            t.pit_created += c.pit_created;
            t.pit_satisfied += c.pit_satisfied;
            t.pit_expired += c.pit_expired;
            t.unroutable += c.unroutable;
            t.data_unsolicited += c.data_unsolicited;
        }
        t
    }

    pub fn live_pit_entries(&self) -> usize {
        self.nodes.iter().map(NdnNode::pit_len).sum()
    }

    /// Every Interest a node received was answered, suppressed, aggregated or
    /// opened a PIT entry, and every PIT entry was satisfied, expired or is live.
    pub fn conserved(&self) -> bool {
        self.nodes.iter().all(|n| {
            let c = n.counters();
            c.interests_received == c.answered + c.suppressed + c.aggregated + c.pit_created
                && c.pit_created == c.pit_satisfied + c.pit_expired + n.pit_len() as u64
        })
    }

    pub fn schedule(&mut self, at: SimTime, kind: EventKind) -> Result<u64, EngineError> {
        self.queue.schedule(at, kind)
    }

    /// Schedules a consumer request and returns its flow id.
    pub fn request(&mut self, at: SimTime, consumer: NodeId, content: ContentName) -> Result<FlowId, EngineError> {
        if !self.index.contains_key(&consumer) {
            return Err(TopologyError::UnknownNode(consumer).into());
        }
        let flow = self.next_flow;
        self.next_flow += 1;
        self.queue.schedule(at, EventKind::RequestInjection { consumer, content, flow })?;
        Ok(flow)
    }

    pub fn run(&mut self) -> Result<u64, EngineError> {
        self.run_until(SimTime::MAX)
    }

    /// Processes events in order until the queue is empty or the next event
    /// lies beyond `deadline`. Returns the number processed.
    pub fn run_until(&mut self, deadline: SimTime) -> Result<u64, EngineError> {
        let mut count = 0;
        while self.queue.peek_time().is_some_and(|t| t <= deadline) {
            let event = self.queue.pop().expect("peeked");
            self.log.record(event.fire_at, &event.kind);
            self.dispatch(event.kind)?;
            count += 1;
        }
        self.processed += count;
        Ok(count)
    }

    fn idx(&self, id: NodeId) -> Result<usize, EngineError> {
        self.index
            .get(&id)
            .copied()
            .ok_or(EngineError::Topology(TopologyError::UnknownNode(id)))
    }

    fn dispatch(&mut self, kind: EventKind) -> Result<(), EngineError> {
        match kind {
            EventKind::DeliverInterest { to, face, packet } => self.process_interest(to, packet, face),
            EventKind::DeliverData { to, face, packet } => self.process_data(to, packet, face),
            EventKind::PitExpiry { node, name } => {
                let now = self.clock();
                let i = self.idx(node)?;
                self.nodes[i].expire_pit(&name, now);
                Ok(())
            }
            EventKind::RequestInjection { consumer, content, flow } => self.inject(consumer, content, flow),
            EventKind::Registration { producer, name, zone_only } => {
                let now = self.clock();
                if let Mode::BalanceDn(service) = &mut self.mode {
                    let d = service.deployment_mut();
                    let result = if zone_only {
                        d.register_in_zone(producer, name, now)
                    } else {
                        d.register_content(producer, name, now)
                    };
                    if result.is_err() {
                        self.registration_failures += 1;
                    }
                }
                Ok(())
            }
        }
    }

    fn inject(&mut self, consumer: NodeId, content: ContentName, flow: FlowId) -> Result<(), EngineError> {
        let now = self.clock();
        self.flows.insert(
            flow,
            FlowRecord {
                flow,
                consumer,
                content: content.clone(),
                started: now,
                finished: None,
                outcome: FlowOutcome::Pending,
                producer: None,
                interest_traversals: 0,
                data_traversals: 0,
                path_hops: 0,
                bytes: 0,
                stages: BTreeMap::new(),
                interest_path: None,
            },
        );
        match &mut self.mode {
            Mode::Flooding => self.express(consumer, content, flow),
            Mode::BalanceDn(service) => {
                let actions = service.request(consumer, &content, flow, now);
                self.apply(actions)
            }
        }
    }

    fn express(&mut self, node: NodeId, name: ContentName, flow: FlowId) -> Result<(), EngineError> {
        let nonce = Nonce::new(self.rng.gen());
        self.process_interest(node, InterestPacket::new(name, nonce, node, flow), LOCAL_FACE)
    }

    fn apply(&mut self, actions: Vec<AppAction>) -> Result<(), EngineError> {
        for action in actions {
            match action {
                AppAction::Express { node, name, flow } => self.express(node, name, flow)?,
                AppAction::Put { node, data } => self.process_data(node, data, LOCAL_FACE)?,
                AppAction::Complete { flow, data } => self.finish(flow, &data),
            }
        }
        Ok(())
    }

    fn finish(&mut self, flow: FlowId, data: &DataPacket) {
        let now = self.clock();
        let Some(rec) = self.flows.get_mut(&flow) else {
            return;
        };
        if rec.finished.is_some() {
            return;
        }
        rec.finished = Some(now);
        rec.path_hops = data.hop_count;
        match data.content {
            DataContent::Content => {
                rec.outcome = FlowOutcome::Satisfied;
                rec.producer = data.trace.first().copied();
            }
            DataContent::NotFound | DataContent::Locator(_) => rec.outcome = FlowOutcome::NotFound,
        }
    }

    fn process_interest(&mut self, at: NodeId, packet: InterestPacket, face: FaceId) -> Result<(), EngineError> {
        let now = self.clock();
        let i = self.idx(at)?;
        let name = packet.name.clone();
        let flow = packet.flow;
        let trace = self
            .flows
            .get(&flow)
            .is_some_and(|r| r.interest_path.is_none())
            .then(|| packet.trace.clone());
        let result = self.nodes[i].on_interest(packet, face, now)?;
        match result.disposition {
            Disposition::Pending { expiry } => {
                self.queue.schedule(expiry, EventKind::PitExpiry { node: at, name })?;
            }
            Disposition::Answered => {
                if let Some(rec) = self.flows.get_mut(&flow) {
                    rec.interest_path = trace;
                }
            }
            _ => {}
        }
        self.emit(at, result.emissions)
    }

    fn process_data(&mut self, at: NodeId, packet: DataPacket, face: FaceId) -> Result<(), EngineError> {
        let now = self.clock();
        let i = self.idx(at)?;
        let emissions = self.nodes[i].on_data(packet, face, now)?;
        self.emit(at, emissions)
    }

    fn emit(&mut self, at: NodeId, emissions: Vec<(FaceId, Packet)>) -> Result<(), EngineError> {
        for (face, packet) in emissions {
            if face.is_local() {
                self.to_app(at, packet)?;
            } else {
                self.send(at, face, packet)?;
            }
        }
        Ok(())
    }

    fn to_app(&mut self, at: NodeId, packet: Packet) -> Result<(), EngineError> {
        let now = self.clock();
        match (&mut self.mode, packet) {
            (Mode::Flooding, Packet::Data(data)) => {
                let flow = data.flow;
                if self
                    .flows
                    .get(&flow)
                    .is_some_and(|r| r.consumer == at && r.content == data.name)
                {
                    self.finish(flow, &data);
                }
                Ok(())
            }
            (Mode::Flooding, Packet::Interest(_)) => Ok(()),
            (Mode::BalanceDn(service), Packet::Interest(interest)) => {
                let actions = service.on_interest(at, &interest.name, now);
                self.apply(actions)
            }
            (Mode::BalanceDn(service), Packet::Data(data)) => {
                let actions = service.on_data(at, data, now);
                self.apply(actions)
            }
        }
    }

    fn send(&mut self, from: NodeId, face: FaceId, packet: Packet) -> Result<(), EngineError> {
        let now = self.clock();
        let i = self.idx(from)?;
        let neighbor = self.nodes[i]
            .neighbor(face)
            .ok_or(NodeError::UnknownFace { node: from, face })?;
        let link = self
            .topology
            .link_between(from, neighbor)
            .expect("faces follow topology links");
        let bits = packet.wire_bits();
        let delivery = transmit(link, packet, from, now)?;
        if let Some(rec) = self.flows.get_mut(&delivery.packet.flow()) {
            rec.bytes += u64::from(bits) / 8;
            match &delivery.packet {
                Packet::Interest(p) => {
                    rec.interest_traversals += 1;
                    if let Some(stage) = ServiceNames::stage_of(&p.name) {
                        *rec.stages.entry(stage).or_insert(0) += 1;
                    }
                }
                Packet::Data(_) => {
                    rec.data_traversals += 1;
                    if matches!(self.mode, Mode::BalanceDn(_)) {
                        *rec.stages.entry(Stage::DataReturn).or_insert(0) += 1;
                    }
                }
            }
        }
        let to = delivery.to;
        let j = self.idx(to)?;
        let in_face = self.nodes[j].face_to(from).expect("links are symmetric");
        let kind = match delivery.packet {
            Packet::Interest(packet) => EventKind::DeliverInterest { to, face: in_face, packet },
            Packet::Data(packet) => EventKind::DeliverData { to, face: in_face, packet },
        };
        self.queue.schedule(delivery.at, kind)?;
        Ok(())
    }
}
