//! BalanceDN: hashed resolver placement for named data networks, simulated
//! against a flooding-search baseline.

pub mod cli;
pub mod crc16;
pub mod engine;
pub mod metrics;
pub mod name;
pub mod node;
pub mod packet;
pub mod placement;
pub mod resolution;
pub mod routing;
pub mod scenario;
pub mod topology;

pub use crc16::{crc16, Crc16Variant};
pub use name::{ContentName, NameError};
pub use placement::{assign_resolver, ResolverIndex};
pub use topology::{NodeId, Role, Topology};
