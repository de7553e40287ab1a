//! Interest and Data packets.
//!
//! `trace` and `flow` exist for measurement only; forwarding never reads them.

use std::num::NonZeroU32;

use crate::name::ContentName;
use crate::topology::NodeId;

/// Size charged for every Interest on the wire, in bits.
pub const INTEREST_BITS: u32 = 1024;

/// Default content payload size, in bits.
pub const DEFAULT_PAYLOAD_BITS: u32 = 1024;

/// Payload size of resolver/TLD/nameserver record replies, in bits.
pub const RECORD_REPLY_BITS: u32 = 512;

pub const SIGNATURE_BYTES: usize = 32;

/// Measurement label tying packets back to the request that caused them.
pub type FlowId = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Nonce(u64);

impl Nonce {
    pub fn new(v: u64) -> Self {
        Nonce(v)
    }

    pub fn value(self) -> u64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterestPacket {
    pub name: ContentName,
    nonce: Nonce,
    pub hop_count: u32,
    pub trace: Vec<NodeId>,
    pub flow: FlowId,
}

impl InterestPacket {
    /// A fresh Interest originated at `origin` with zero hops.
    pub fn new(name: ContentName, nonce: Nonce, origin: NodeId, flow: FlowId) -> Self {
        Self {
            name,
            nonce,
            hop_count: 0,
            trace: vec![origin],
            flow,
        }
    }

    pub fn nonce(&self) -> Nonce {
        self.nonce
    }

    pub fn wire_bits(&self) -> u32 {
        INTEREST_BITS
    }

    /// Records one link traversal ending at `to`.
    pub fn traverse(&mut self, to: NodeId) {
        self.hop_count += 1;
        self.trace.push(to);
    }
}

/// What a Data packet carries, beyond its size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataContent {
    /// Opaque content bytes.
    Content,
    /// A locator reply naming the producer of the requested content.
    Locator(NodeId),
    /// Negative reply: the hierarchy has no record.
    NotFound,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataPacket {
    pub name: ContentName,
    pub payload_bits: NonZeroU32,
    pub signature: [u8; SIGNATURE_BYTES],
    pub hop_count: u32,
    pub trace: Vec<NodeId>,
    pub content: DataContent,
    pub flow: FlowId,
}

impl DataPacket {
    pub fn new(
        name: ContentName,
        payload_bits: NonZeroU32,
        origin: NodeId,
        content: DataContent,
        flow: FlowId,
    ) -> Self {
        Self {
            name,
            payload_bits,
            signature: [0; SIGNATURE_BYTES],
            hop_count: 0,
            trace: vec![origin],
            content,
            flow,
        }
    }

    pub fn wire_bits(&self) -> u32 {
        self.payload_bits.get()
    }

    pub fn traverse(&mut self, to: NodeId) {
        self.hop_count += 1;
        self.trace.push(to);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Packet {
    Interest(InterestPacket),
    Data(DataPacket),
}

impl Packet {
    pub fn name(&self) -> &ContentName {
        match self {
            Packet::Interest(i) => &i.name,
            Packet::Data(d) => &d.name,
        }
    }

    pub fn hop_count(&self) -> u32 {
        match self {
            Packet::Interest(i) => i.hop_count,
            Packet::Data(d) => d.hop_count,
        }
    }

    pub fn wire_bits(&self) -> u32 {
        match self {
            Packet::Interest(i) => i.wire_bits(),
            Packet::Data(d) => d.wire_bits(),
        }
    }

    pub fn flow(&self) -> FlowId {
        match self {
            Packet::Interest(i) => i.flow,
            Packet::Data(d) => d.flow,
        }
    }

    pub fn traverse(&mut self, to: NodeId) {
        match self {
            Packet::Interest(i) => i.traverse(to),
            Packet::Data(d) => d.traverse(to),
        }
    }
}
