//! Resolver assignment: `crc16(canonical name bytes) mod N`.

use std::fmt;

use thiserror::Error;

use crate::crc16::Crc16Variant;
use crate::name::ContentName;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlacementError {
    #[error("resolver count must be at least 1")]
    ZeroResolvers,
}

/// Index of a resolver shard, always below the deployment's resolver count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResolverIndex(u32);

impl ResolverIndex {
    pub fn value(self) -> usize {
        self.0 as usize
    }

    pub(crate) fn new_unchecked(v: usize) -> Self {
        ResolverIndex(v as u32)
    }
}

impl fmt::Display for ResolverIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Maps names to shards for a fixed resolver count and CRC variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Placement {
    resolver_count: u32,
    variant: Crc16Variant,
}

impl Placement {
    pub fn new(resolver_count: usize, variant: Crc16Variant) -> Result<Self, PlacementError> {
        if resolver_count == 0 {
            return Err(PlacementError::ZeroResolvers);
        }
        Ok(Self {
            resolver_count: resolver_count as u32,
            variant,
        })
    }

    pub fn resolver_count(&self) -> usize {
        self.resolver_count as usize
    }

    pub fn variant(&self) -> Crc16Variant {
        self.variant
    }

    pub fn assign(&self, name: &ContentName) -> ResolverIndex {
        self.assign_bytes(name.canonical_bytes())
    }

    /// Same as [`Placement::assign`] on an already-canonical byte string.
    pub fn assign_bytes(&self, canonical: &[u8]) -> ResolverIndex {
        let h = self.variant.engine().checksum(canonical) as u32;
        ResolverIndex(h % self.resolver_count)
    }
}

/// Shard for `name` among `resolver_count` resolvers, using CRC-16/ARC.
pub fn assign_resolver(
    name: &ContentName,
    resolver_count: usize,
) -> Result<ResolverIndex, PlacementError> {
    Ok(Placement::new(resolver_count, Crc16Variant::Arc)?.assign(name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_assignments() {
        let n = ContentName::parse("/x").unwrap();
        assert_eq!(assign_resolver(&n, 1).unwrap().value(), 0);
        assert_eq!(assign_resolver(&n, 0), Err(PlacementError::ZeroResolvers));
        // the check string as a single segment hashes its own canonical form "/123456789"
        let raw = b"123456789";
        assert_eq!(crate::crc16::crc16(raw) % 8, 5);
    }

    proptest! {
        #[test]
        fn in_range_and_pure(seg in "[a-z0-9]{1,16}", n in 1usize..64) {
            let name = ContentName::parse(&format!("/p/{seg}")).unwrap();
            let a = assign_resolver(&name, n).unwrap();
            prop_assert!(a.value() < n);
            prop_assert_eq!(a, assign_resolver(&name, n).unwrap());
        }
    }
}
