use std::collections::HashMap;
use std::fmt;

use crate::name::ContentName;

/// A node's interface. Face 0 is the local application face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaceId(pub u32);

pub const LOCAL_FACE: FaceId = FaceId(0);

impl FaceId {
    pub fn is_local(self) -> bool {
        self == LOCAL_FACE
    }
}

impl fmt::Display for FaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibEntry {
    pub prefix: ContentName,
    /// Sorted by (cost, face).
    faces: Vec<(FaceId, u32)>,
}

impl FibEntry {
    pub fn new(prefix: ContentName) -> Self {
        Self {
            prefix,
            faces: Vec::new(),
        }
    }

    pub fn faces(&self) -> &[(FaceId, u32)] {
        &self.faces
    }

    /// Adds a next hop, or updates its cost if the face is already present.
    pub fn add_nexthop(&mut self, face: FaceId, cost: u32) {
        self.faces.retain(|(f, _)| *f != face);
        let pos = self
            .faces
            .partition_point(|&(f, c)| (c, f) < (cost, face));
        self.faces.insert(pos, (face, cost));
    }

    pub fn best(&self) -> Option<FaceId> {
        self.faces.first().map(|(f, _)| *f)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Fib {
    entries: HashMap<ContentName, FibEntry>,
}

impl Fib {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, prefix: ContentName, face: FaceId, cost: u32) {
        self.entries
            .entry(prefix.clone())
            .or_insert_with(|| FibEntry::new(prefix))
            .add_nexthop(face, cost);
    }

    pub fn get(&self, prefix: &ContentName) -> Option<&FibEntry> {
        self.entries.get(prefix)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn longest_prefix_match(&self, name: &ContentName) -> Option<&FibEntry> {
        if self.entries.is_empty() {
            return None;
        }
        name.prefix_bytes_longest_first()
            .find_map(|p| self.entries.get(p))
    }
}
