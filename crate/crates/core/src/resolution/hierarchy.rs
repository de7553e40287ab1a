use std::collections::{BTreeMap, HashMap};

use super::LocatorRecord;
use crate::name::ContentName;
use crate::topology::NodeId;

/// Top-level server: maps name prefixes to the nameserver responsible for them.
#[derive(Debug, Clone)]
pub struct TldServer {
    host: NodeId,
    delegations: BTreeMap<ContentName, NodeId>,
}

impl TldServer {
    pub fn new(host: NodeId) -> Self {
        Self {
            host,
            delegations: BTreeMap::new(),
        }
    }

    pub fn host(&self) -> NodeId {
        self.host
    }

    pub(crate) fn delegate(&mut self, prefix: ContentName, nameserver: NodeId) {
        self.delegations.insert(prefix, nameserver);
    }

    pub fn delegations(&self) -> &BTreeMap<ContentName, NodeId> {
        &self.delegations
    }

    /// Nameserver for the longest delegated prefix of `name`.
    pub fn lookup(&self, name: &ContentName) -> Option<NodeId> {
        name.prefix_bytes_longest_first()
            .find_map(|p| self.delegations.get(p).copied())
    }
}

#[derive(Debug, Clone)]
pub struct NameServer {
    host: NodeId,
    prefixes: Vec<ContentName>,
    zone: HashMap<ContentName, LocatorRecord>,
}

impl NameServer {
    pub fn new(host: NodeId) -> Self {
        Self {
            host,
            prefixes: Vec::new(),
            zone: HashMap::new(),
        }
    }

    pub fn host(&self) -> NodeId {
        self.host
    }

    pub fn prefixes(&self) -> &[ContentName] {
        &self.prefixes
    }

    pub(crate) fn add_prefix(&mut self, prefix: ContentName) {
        if !self.prefixes.contains(&prefix) {
            self.prefixes.push(prefix);
        }
    }

    pub fn covers(&self, name: &ContentName) -> bool {
        self.prefixes.iter().any(|p| p.is_prefix_of(name))
    }

    pub(crate) fn insert(&mut self, record: LocatorRecord) {
        debug_assert!(self.covers(&record.name));
        self.zone.insert(record.name.clone(), record);
    }

    pub fn lookup(&self, name: &ContentName) -> Option<&LocatorRecord> {
        self.zone.get(name)
    }

    pub fn zone_len(&self) -> usize {
        self.zone.len()
    }

    pub fn reserve(&mut self, additional: usize) {
        self.zone.reserve(additional);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tld_longest_prefix() {
        let mut t = TldServer::new(NodeId(1));
        t.delegate(ContentName::parse("/a").unwrap(), NodeId(10));
        t.delegate(ContentName::parse("/a/b").unwrap(), NodeId(11));
        assert_eq!(t.lookup(&ContentName::parse("/a/b/c").unwrap()), Some(NodeId(11)));
        assert_eq!(t.lookup(&ContentName::parse("/a/x").unwrap()), Some(NodeId(10)));
        assert_eq!(t.lookup(&ContentName::parse("/q").unwrap()), None);
    }
}
