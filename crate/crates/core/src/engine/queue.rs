use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use super::{EngineError, SimTime};
use crate::name::ContentName;
use crate::node::FaceId;
use crate::packet::{DataPacket, FlowId, InterestPacket};
use crate::topology::NodeId;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventKind {
    DeliverInterest { to: NodeId, face: FaceId, packet: InterestPacket },
    DeliverData { to: NodeId, face: FaceId, packet: DataPacket },
    PitExpiry { node: NodeId, name: ContentName },
    RequestInjection { consumer: NodeId, content: ContentName, flow: FlowId },
    /// `zone_only` publishes at the nameserver without placing on a shard.
    Registration { producer: NodeId, name: ContentName, zone_only: bool },
}

impl EventKind {
    pub fn label(&self) -> &'static str {
        match self {
            EventKind::DeliverInterest { .. } => "deliver_interest",
            EventKind::DeliverData { .. } => "deliver_data",
            EventKind::PitExpiry { .. } => "pit_expiry",
            EventKind::RequestInjection { .. } => "request_injection",
            EventKind::Registration { .. } => "registration",
        }
    }
}

/// Ordered by `(fire_at, sequence)`.
#[derive(Debug, Clone)]
pub struct Event {
    pub fire_at: SimTime,
    pub sequence: u64,
    pub kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.fire_at, self.sequence).cmp(&(other.fire_at, other.sequence))
    }
}

#[derive(Debug, Default)]
pub struct EventQueue {
    heap: BinaryHeap<Reverse<Event>>,
    next_sequence: u64,
    clock: SimTime,
}

impl EventQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clock(&self) -> SimTime {
        self.clock
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn scheduled_total(&self) -> u64 {
        self.next_sequence
    }

    /// Enqueues `kind` to fire at `fire_at`; returns its sequence number.
    pub fn schedule(&mut self, fire_at: SimTime, kind: EventKind) -> Result<u64, EngineError> {
        if fire_at < self.clock {
            return Err(EngineError::PastEvent {
                fire_at,
                clock: self.clock,
            });
        }
        let sequence = self.next_sequence;
        self.next_sequence += 1;
        self.heap.push(Reverse(Event {
            fire_at,
            sequence,
            kind,
        }));
        Ok(sequence)
    }

    pub fn peek_time(&self) -> Option<SimTime> {
        self.heap.peek().map(|Reverse(e)| e.fire_at)
    }

    /// Removes the next event and advances the clock to it.
    pub fn pop(&mut self) -> Option<Event> {
        let Reverse(event) = self.heap.pop()?;
        self.clock = event.fire_at;
        Some(event)
    }
}
