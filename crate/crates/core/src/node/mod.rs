//! Per-node forwarding engine: PIT, FIB, content store, and strategies.

mod cs;
mod fib;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::num::NonZeroU32;
use std::sync::Arc;

use thiserror::Error;

use crate::engine::SimTime;
use crate::name::ContentName;
use crate::packet::{DataContent, DataPacket, InterestPacket, Nonce, Packet, DEFAULT_PAYLOAD_BITS};
use crate::topology::NodeId;

pub use cs::{cs_insert, ContentStore, CsEntry, DEFAULT_CS_CAPACITY};
pub use fib::{FaceId, Fib, FibEntry, LOCAL_FACE};

pub const PIT_LIFETIME: SimTime = SimTime::from_secs(4);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NodeError {
    #[error("node {node} has no face {face}")]
    UnknownFace { node: NodeId, face: FaceId },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Flooding,
    BestRoute,
}

/// Answers whether a node's local producer application can serve a name.
pub trait ContentSource: Send + Sync {
    fn holds(&self, node: NodeId, name: &ContentName) -> bool;
}

impl ContentSource for HashMap<ContentName, NodeId> {
    fn holds(&self, node: NodeId, name: &ContentName) -> bool {
        self.get(name) == Some(&node)
    }
}

#[derive(Debug, Clone)]
pub struct PitEntry {
    pub name: ContentName,
    pub in_faces: BTreeSet<FaceId>,
    pub seen_nonces: HashSet<Nonce>,
    pub expiry: SimTime,
}

/// What happened to an Interest arriving at a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Disposition {
    /// Answered from the content store or the local producer.
    Answered,
    /// Nonce already seen for this name; dropped.
    Suppressed,
    /// Folded into an existing PIT entry.
    Aggregated,
    /// New PIT entry created; it expires at `expiry` unless satisfied first.
    Pending { expiry: SimTime },
}

#[derive(Debug, Clone)]
pub struct InterestResult {
    pub disposition: Disposition,
    pub emissions: Vec<(FaceId, Packet)>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NodeCounters {
    pub interests_received: u64,
    pub answered: u64,
    pub suppressed: u64,
    pub aggregated: u64,
    pub pit_created: u64,
    pub pit_satisfied: u64,
    pub pit_expired: u64,
    pub unroutable: u64,
    pub data_unsolicited: u64,
}

pub struct NdnNode {
    id: NodeId,
    /// `faces[i]` is the neighbor behind face `i + 1`.
    faces: Vec<NodeId>,
    face_of: HashMap<NodeId, FaceId>,
    pit: HashMap<ContentName, PitEntry>,
    dead_nonces: HashSet<(ContentName, Nonce)>,
    pub fib: Fib,
    pub cs: ContentStore,
    pub strategy: Strategy,
    source: Option<Arc<dyn ContentSource>>,
    payload_bits: NonZeroU32,
    counters: NodeCounters,
}

impl std::fmt::Debug for NdnNode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NdnNode")
            .field("id", &self.id)
            .field("faces", &self.faces)
            .field("pit", &self.pit.len())
            .field("fib", &self.fib.len())
            .field("cs", &self.cs.len())
            .field("strategy", &self.strategy)
            .finish()
    }
}

impl NdnNode {
    /// A node whose faces `1..=neighbors.len()` lead to `neighbors`, in the given order.
    pub fn new(id: NodeId, neighbors: &[NodeId], strategy: Strategy, cs_capacity: usize) -> Self {
        let face_of = neighbors
            .iter()
            .enumerate()
            .map(|(i, n)| (*n, FaceId(i as u32 + 1)))
            .collect();
        Self {
            id,
            faces: neighbors.to_vec(),
            face_of,
            pit: HashMap::new(),
            dead_nonces: HashSet::new(),
            fib: Fib::new(),
            cs: ContentStore::new(cs_capacity),
            strategy,
            source: None,
            payload_bits: NonZeroU32::new(DEFAULT_PAYLOAD_BITS).unwrap(),
            counters: NodeCounters::default(),
        }
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn set_content_source(&mut self, source: Arc<dyn ContentSource>, payload_bits: NonZeroU32) {
        self.source = Some(source);
        self.payload_bits = payload_bits;
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Neighbor behind a non-local face.
    pub fn neighbor(&self, face: FaceId) -> Option<NodeId> {
        if face.is_local() {
            return None;
        }
        self.faces.get(face.0 as usize - 1).copied()
    }

    pub fn face_to(&self, neighbor: NodeId) -> Option<FaceId> {
        self.face_of.get(&neighbor).copied()
    }

    pub fn pit_entry(&self, name: &ContentName) -> Option<&PitEntry> {
        self.pit.get(name)
    }

    pub fn pit_len(&self) -> usize {
        self.pit.len()
    }

    pub fn counters(&self) -> NodeCounters {
        self.counters
    }

    fn check_face(&self, face: FaceId) -> Result<(), NodeError> {
        if face.0 as usize <= self.faces.len() {
            Ok(())
        } else {
            Err(NodeError::UnknownFace {
                node: self.id,
                face,
            })
        }
    }

    /// All non-local faces except `in_face`.
    pub fn strategy_flood(&self, in_face: FaceId) -> Vec<FaceId> {
        (1..=self.faces.len() as u32)
            .map(FaceId)
            .filter(|f| *f != in_face)
            .collect()
    }

    /// Lowest-cost face of the longest matching FIB entry.
    pub fn strategy_best_route(&self, name: &ContentName) -> Option<FaceId> {
        self.fib.longest_prefix_match(name)?.best()
    }

    fn route(&self, name: &ContentName, in_face: FaceId) -> Vec<FaceId> {
        match self.strategy {
            Strategy::Flooding => self.strategy_flood(in_face),
            Strategy::BestRoute => self
                .fib
                .longest_prefix_match(name)
                .and_then(|e| e.faces().iter().map(|(f, _)| *f).find(|f| *f != in_face))
                .into_iter()
                .collect(),
        }
    }

    pub fn on_interest(
        &mut self,
        interest: InterestPacket,
        in_face: FaceId,
        now: SimTime,
    ) -> Result<InterestResult, NodeError> {
        self.check_face(in_face)?;
        self.counters.interests_received += 1;
        let nonce = interest.nonce();
        let key = (interest.name.clone(), nonce);
        if self.dead_nonces.contains(&key) {
            self.counters.suppressed += 1;
            return Ok(InterestResult {
                disposition: Disposition::Suppressed,
                emissions: Vec::new(),
            });
        }
        self.dead_nonces.insert(key);

        if let Some(bits) = self.cs.lookup(&interest.name, now) {
            let bits = NonZeroU32::new(bits).unwrap_or(self.payload_bits);
            return Ok(self.answer(&interest, in_face, bits));
        }
        if self
            .source
            .as_ref()
            .is_some_and(|s| s.holds(self.id, &interest.name))
        {
            return Ok(self.answer(&interest, in_face, self.payload_bits));
        }

        if let Some(entry) = self.pit.get_mut(&interest.name) {
            entry.in_faces.insert(in_face);
            entry.seen_nonces.insert(nonce);
            self.counters.aggregated += 1;
            return Ok(InterestResult {
                disposition: Disposition::Aggregated,
                emissions: Vec::new(),
            });
        }

        let expiry = now + PIT_LIFETIME;
        self.pit.insert(
            interest.name.clone(),
            PitEntry {
                name: interest.name.clone(),
                in_faces: BTreeSet::from([in_face]),
                seen_nonces: HashSet::from([nonce]),
                expiry,
            },
        );
        self.counters.pit_created += 1;
        let out = self.route(&interest.name, in_face);
        if out.is_empty() {
            self.counters.unroutable += 1;
        }
        let emissions = out
            .into_iter()
            .map(|f| (f, Packet::Interest(interest.clone())))
            .collect();
        Ok(InterestResult {
            disposition: Disposition::Pending { expiry },
            emissions,
        })
    }

    fn answer(&mut self, interest: &InterestPacket, in_face: FaceId, bits: NonZeroU32) -> InterestResult {
        self.counters.answered += 1;
        let data = DataPacket::new(
            interest.name.clone(),
            bits,
            self.id,
            DataContent::Content,
            interest.flow,
        );
        InterestResult {
            disposition: Disposition::Answered,
            emissions: vec![(in_face, Packet::Data(data))],
        }
    }

    pub fn on_data(
        &mut self,
        data: DataPacket,
        in_face: FaceId,
        now: SimTime,
    ) -> Result<Vec<(FaceId, Packet)>, NodeError> {
        self.check_face(in_face)?;
        let Some(entry) = self.pit.remove(&data.name) else {
            self.counters.data_unsolicited += 1;
            return Ok(Vec::new());
        };
        self.counters.pit_satisfied += 1;
        self.cs.insert(data.name.clone(), data.payload_bits.get(), now);
        Ok(entry
            .in_faces
            .into_iter()
            .filter(|f| *f != in_face)
            .map(|f| (f, Packet::Data(data.clone())))
            .collect())
    }

    /// Drops the PIT entry for `name` if it is still due at `now`. Returns true if one was dropped.
    pub fn expire_pit(&mut self, name: &ContentName, now: SimTime) -> bool {
        match self.pit.get(name) {
            Some(e) if e.expiry <= now => {
                self.pit.remove(name);
                self.counters.pit_expired += 1;
                true
            }
            _ => false,
        }
    }
}
