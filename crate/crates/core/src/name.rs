//! Hierarchical content names.
//!
//! A name is a non-empty sequence of non-empty byte segments, rendered as
//! `/seg1/seg2/...`. The rendered bytes are what the resolver hash consumes,
//! so the canonical text is stored directly and segments are sliced out of it
//! on demand.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NameError {
    #[error("name is empty")]
    Empty,
    #[error("name must start with '/'")]
    MissingLeadingSlash,
    #[error("name has no segments")]
    NoSegments,
    #[error("empty segment at position {0}")]
    EmptySegment(usize),
    #[error("segment {0} contains a '/' byte")]
    SlashInSegment(usize),
}

/// A content name. Cloning is cheap (shared buffer).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ContentName {
    canonical: Arc<[u8]>,
}

impl ContentName {
    /// Parses `/a/b/c`. Segment positions in errors are 1-based.
    pub fn parse(text: &str) -> Result<Self, NameError> {
        let bytes = text.as_bytes();
        if bytes.is_empty() {
            return Err(NameError::Empty);
        }
        if bytes[0] != b'/' {
            return Err(NameError::MissingLeadingSlash);
        }
        if bytes.len() == 1 {
            return Err(NameError::NoSegments);
        }
        for (i, seg) in bytes[1..].split(|b| *b == b'/').enumerate() {
            if seg.is_empty() {
                return Err(NameError::EmptySegment(i + 1));
            }
        }
        Ok(Self {
            canonical: Arc::from(bytes),
        })
    }

    /// Builds a name from raw segments.
    pub fn from_segments<I, S>(segments: I) -> Result<Self, NameError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        let mut buf = Vec::new();
        for (i, seg) in segments.into_iter().enumerate() {
            let seg = seg.as_ref();
            if seg.is_empty() {
                return Err(NameError::EmptySegment(i + 1));
            }
            if seg.contains(&b'/') {
                return Err(NameError::SlashInSegment(i + 1));
            }
            buf.push(b'/');
            buf.extend_from_slice(seg);
        }
        if buf.is_empty() {
            return Err(NameError::NoSegments);
        }
        Ok(Self {
            canonical: buf.into(),
        })
    }

    /// The `/seg1/seg2` rendering; the exact bytes fed to the resolver hash.
    pub fn canonical_bytes(&self) -> &[u8] {
        &self.canonical
    }

    pub fn segments(&self) -> impl Iterator<Item = &[u8]> + '_ {
        self.canonical[1..].split(|b| *b == b'/')
    }

    pub fn len(&self) -> usize {
        self.segments().count()
    }

    /// Always false; a name has at least one segment.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// The first `count` segments, or `None` if `count` is 0 or exceeds the length.
    pub fn prefix(&self, count: usize) -> Option<ContentName> {
        if count == 0 {
            return None;
        }
        let mut seen = 0;
        for (i, b) in self.canonical.iter().enumerate().skip(1) {
            if *b == b'/' {
                seen += 1;
                if seen == count {
                    return Some(Self {
                        canonical: Arc::from(&self.canonical[..i]),
                    });
                }
            }
        }
        (seen + 1 == count).then(|| self.clone())
    }

    /// True when every segment of `self` is the corresponding leading segment of `other`.
    pub fn is_prefix_of(&self, other: &ContentName) -> bool {
        let a = self.canonical_bytes();
        let b = other.canonical_bytes();
        b.starts_with(a) && (b.len() == a.len() || b[a.len()] == b'/')
    }

    /// `self` followed by all segments of `suffix`.
    pub fn join(&self, suffix: &ContentName) -> ContentName {
        let mut buf = Vec::with_capacity(self.canonical.len() + suffix.canonical.len());
        buf.extend_from_slice(&self.canonical);
        buf.extend_from_slice(&suffix.canonical);
        Self {
            canonical: buf.into(),
        }
    }

    /// Removes `prefix` from the front, returning the remainder if any segments remain.
    pub fn strip_prefix(&self, prefix: &ContentName) -> Option<ContentName> {
        if !prefix.is_prefix_of(self) || prefix.canonical.len() == self.canonical.len() {
            return None;
        }
        Some(Self {
            canonical: Arc::from(&self.canonical[prefix.canonical.len()..]),
        })
    }
}

// Hash and Eq of ContentName are those of its canonical bytes, so maps keyed
// by names can be probed with byte slices.
impl std::borrow::Borrow<[u8]> for ContentName {
    fn borrow(&self) -> &[u8] {
        &self.canonical
    }
}

impl ContentName {
    /// Canonical bytes of every prefix, longest first (the full name included).
    pub fn prefix_bytes_longest_first(&self) -> impl Iterator<Item = &[u8]> + '_ {
        let bytes = &self.canonical[..];
        std::iter::once(bytes).chain(
            (1..bytes.len())
                .rev()
                .filter(move |&i| bytes[i] == b'/')
                .map(move |i| &bytes[..i]),
        )
    }
}

impl fmt::Display for ContentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&String::from_utf8_lossy(&self.canonical))
    }
}

impl fmt::Debug for ContentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ContentName({self})")
    }
}

impl FromStr for ContentName {
    type Err = NameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_segments() {
        let n = ContentName::parse("/a/b").unwrap();
        let segs: Vec<&[u8]> = n.segments().collect();
        assert_eq!(segs, vec![b"a".as_slice(), b"b".as_slice()]);
        assert_eq!(n.to_string(), "/a/b");
        assert_eq!(n.len(), 2);
    }

    #[test]
    fn rejects_malformed() {
        assert_eq!(ContentName::parse(""), Err(NameError::Empty));
        assert_eq!(ContentName::parse("/"), Err(NameError::NoSegments));
        assert_eq!(ContentName::parse("//a"), Err(NameError::EmptySegment(1)));
        assert_eq!(ContentName::parse("/a//b"), Err(NameError::EmptySegment(2)));
        assert_eq!(ContentName::parse("/a/"), Err(NameError::EmptySegment(2)));
        assert_eq!(ContentName::parse("a/b"), Err(NameError::MissingLeadingSlash));
    }

    #[test]
    fn segment_equality() {
        let a = ContentName::parse("/x/y").unwrap();
        let b = ContentName::from_segments(["x", "y"]).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, ContentName::parse("/x/y/z").unwrap());
        assert!(ContentName::from_segments(["a/b"]).is_err());
        assert!(ContentName::from_segments(Vec::<&str>::new()).is_err());
    }

    #[test]
    fn prefixes() {
        let n = ContentName::parse("/a/bb/c").unwrap();
        assert_eq!(n.prefix(1).unwrap().to_string(), "/a");
        assert_eq!(n.prefix(2).unwrap().to_string(), "/a/bb");
        assert_eq!(n.prefix(3).unwrap(), n);
        assert!(n.prefix(4).is_none());
        assert!(n.prefix(0).is_none());

        let ab = ContentName::parse("/a/b").unwrap();
        assert!(ab.prefix(1).unwrap().is_prefix_of(&ab));
        // "/a/b" is not a segment prefix of "/a/bb"
        assert!(!ab.is_prefix_of(&n));

        let root = ContentName::parse("/x").unwrap();
        let joined = root.join(&n);
        assert_eq!(joined.to_string(), "/x/a/bb/c");
        assert_eq!(joined.strip_prefix(&root).unwrap(), n);
        assert!(root.strip_prefix(&root).is_none());
    }

    proptest! {
        #[test]
        fn parse_render_round_trip(segs in prop::collection::vec("[a-zA-Z0-9._-]{1,8}", 1..6)) {
            let text = format!("/{}", segs.join("/"));
            let n = ContentName::parse(&text).unwrap();
            prop_assert_eq!(n.to_string(), text);
            prop_assert_eq!(n.len(), segs.len());
            let again = ContentName::from_segments(n.segments()).unwrap();
            prop_assert_eq!(again, n);
        }
    }
}
