use std::num::NonZeroUsize;

use lru::LruCache;

use crate::engine::SimTime;
use crate::name::ContentName;

pub const DEFAULT_CS_CAPACITY: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsEntry {
    pub payload_bits: u32,
    pub last_use: SimTime,
}

/// Content store with least-recently-used eviction. Capacity 0 disables caching.
#[derive(Debug)]
pub struct ContentStore {
    capacity: usize,
    entries: Option<LruCache<ContentName, CsEntry>>,
}

impl ContentStore {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            entries: NonZeroUsize::new(capacity).map(LruCache::new),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.as_ref().map_or(0, LruCache::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Inserts or refreshes `name`; returns the evicted name when the store was full.
    pub fn insert(&mut self, name: ContentName, payload_bits: u32, now: SimTime) -> Option<ContentName> {
        let cache = self.entries.as_mut()?;
        let entry = CsEntry {
            payload_bits,
            last_use: now,
        };
        if let Some(existing) = cache.get_mut(&name) {
            *existing = entry;
            return None;
        }
        let evicted = if cache.len() == cache.cap().get() {
            cache.pop_lru().map(|(k, _)| k)
        } else {
            None
        };
        cache.put(name, entry);
        evicted
    }

    /// Looks up `name`, refreshing its recency on a hit.
    pub fn lookup(&mut self, name: &ContentName, now: SimTime) -> Option<u32> {
        let entry = self.entries.as_mut()?.get_mut(name)?;
        entry.last_use = now;
        Some(entry.payload_bits)
    }

    pub fn contains(&self, name: &ContentName) -> bool {
        self.entries.as_ref().is_some_and(|c| c.contains(name))
    }

    /// Names from most to least recently used.
    pub fn names_by_recency(&self) -> Vec<ContentName> {
        self.entries
            .as_ref()
            .map(|c| c.iter().map(|(k, _)| k.clone()).collect())
            .unwrap_or_default()
    }
}

/// Inserts `name` into `cs`; free-function form of [`ContentStore::insert`].
pub fn cs_insert(
    cs: &mut ContentStore,
    name: ContentName,
    payload_bits: u32,
    now: SimTime,
) -> Option<ContentName> {
    cs.insert(name, payload_bits, now)
}
