use std::collections::HashMap;
use std::hint::black_box;
use std::num::NonZeroUsize;
use std::time::Instant;

use lru::LruCache;

use super::{LocatorRecord, ResolutionError};
use crate::name::ContentName;
use crate::placement::ResolverIndex;
use crate::topology::NodeId;

pub const DEFAULT_RESOLVER_CACHE: usize = 10_000;

/// One resolver of the hashed cluster: authoritative records for the names
/// that hash to it, plus an LRU cache of records learned during resolution.
#[derive(Debug)]
pub struct ResolverShard {
    index: ResolverIndex,
    host: NodeId,
    authoritative: HashMap<ContentName, LocatorRecord>,
    cache: Option<LruCache<ContentName, LocatorRecord>>,
}

impl ResolverShard {
    pub fn new(index: ResolverIndex, host: NodeId, cache_capacity: usize) -> Self {
        Self {
            index,
            host,
            authoritative: HashMap::new(),
            cache: NonZeroUsize::new(cache_capacity).map(LruCache::new),
        }
    }

    pub fn index(&self) -> ResolverIndex {
        self.index
    }

    pub fn host(&self) -> NodeId {
        self.host
    }

    pub fn authoritative_len(&self) -> usize {
        self.authoritative.len()
    }

    pub fn cached_len(&self) -> usize {
        self.cache.as_ref().map_or(0, LruCache::len)
    }

    pub fn authoritative(&self) -> impl Iterator<Item = &LocatorRecord> {
        self.authoritative.values()
    }

    pub fn reserve(&mut self, additional: usize) {
        self.authoritative.reserve(additional);
    }

    /// Inserts an authoritative record. The caller guarantees placement.
    pub(crate) fn insert_authoritative(&mut self, record: LocatorRecord) {
        self.authoritative.insert(record.name.clone(), record);
    }

    pub fn authoritative_record(&self, name: &ContentName) -> Option<&LocatorRecord> {
        self.authoritative.get(name)
    }

    /// Caches a record learned from the hierarchy. Authoritative names are left alone.
    pub fn cache_record(&mut self, record: LocatorRecord) {
        if self.authoritative.contains_key(&record.name) {
            return;
        }
        if let Some(cache) = self.cache.as_mut() {
            cache.put(record.name.clone(), record);
        }
    }

    /// Exact-name lookup, authoritative first; a cache hit refreshes recency.
    pub fn lookup(&mut self, name: &ContentName) -> Option<LocatorRecord> {
        if let Some(r) = self.authoritative.get(name) {
            return Some(r.clone());
        }
        self.cache.as_mut()?.get(name).cloned()
    }

    /// Read-only lookup that leaves cache recency untouched.
    pub fn peek(&self, name: &ContentName) -> Option<&LocatorRecord> {
        self.authoritative
            .get(name)
            .or_else(|| self.cache.as_ref()?.peek(name))
    }
}

/// Free-function form of [`ResolverShard::lookup`].
pub fn shard_lookup(shard: &mut ResolverShard, name: &ContentName) -> Option<LocatorRecord> {
    shard.lookup(name)
}

/// Mean wall-clock time of one lookup against `shard`'s tables, in milliseconds,
/// over `repetitions` passes of `probe_names`. One untimed pass warms the caches.
pub fn lookup_timing_probe(
    shard: &ResolverShard,
    probe_names: &[ContentName],
    repetitions: usize,
) -> Result<f64, ResolutionError> {
    if probe_names.is_empty() {
        return Err(ResolutionError::EmptyProbe);
    }
    if repetitions == 0 {
        return Err(ResolutionError::ZeroRepetitions);
    }
    for name in probe_names {
        black_box(shard.peek(black_box(name)));
    }
    let start = Instant::now();
    for _ in 0..repetitions {
        for name in probe_names {
            black_box(shard.peek(black_box(name)));
        }
    }
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let mean = elapsed / (repetitions * probe_names.len()) as f64;
    // clock granularity can round a tiny probe down to zero
    Ok(mean.max(f64::MIN_POSITIVE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::SimTime;
    use crate::placement::ResolverIndex;

    fn rec(name: &str, producer: u32) -> LocatorRecord {
        LocatorRecord {
            name: ContentName::parse(name).unwrap(),
            producer: NodeId(producer),
            registered_at: SimTime::ZERO,
        }
    }

    fn shard(cache: usize) -> ResolverShard {
        ResolverShard::new(ResolverIndex::new_unchecked(0), NodeId(1), cache)
    }

    #[test]
    fn lookup_hits_and_misses() {
        let mut s = shard(2);
        s.insert_authoritative(rec("/a", 5));
        assert_eq!(shard_lookup(&mut s, &rec("/a", 0).name).unwrap().producer, NodeId(5));
        assert!(shard_lookup(&mut s, &rec("/never", 0).name).is_none());
    }

    #[test]
    fn cached_records_evict_lru() {
        let mut s = shard(2);
        s.cache_record(rec("/x", 1));
        s.cache_record(rec("/y", 1));
        // touch /x so /y is the victim
        assert!(s.lookup(&rec("/x", 0).name).is_some());
        s.cache_record(rec("/z", 1));
        assert!(s.lookup(&rec("/y", 0).name).is_none());
        assert!(s.lookup(&rec("/x", 0).name).is_some());
        assert!(s.lookup(&rec("/z", 0).name).is_some());
        assert_eq!(s.cached_len(), 2);
    }

    #[test]
    fn authoritative_never_cached_over() {
        let mut s = shard(1);
        s.insert_authoritative(rec("/a", 5));
        s.cache_record(rec("/a", 9));
        assert_eq!(s.lookup(&rec("/a", 0).name).unwrap().producer, NodeId(5));
        assert_eq!(s.cached_len(), 0);
    }

    #[test]
    fn probe_smoke() {
        let mut s = shard(0);
        s.insert_authoritative(rec("/a", 5));
        let t = lookup_timing_probe(&s, &[rec("/a", 0).name], 1).unwrap();
        assert!(t.is_finite() && t > 0.0);
        assert_eq!(lookup_timing_probe(&s, &[], 1), Err(ResolutionError::EmptyProbe));
        assert_eq!(
            lookup_timing_probe(&s, &[rec("/a", 0).name], 0),
            Err(ResolutionError::ZeroRepetitions)
        );
    }
}
