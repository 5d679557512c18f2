//! Offline runtime verification of multi-traces against interaction models.

pub mod analysis;
pub mod experiment;
pub mod explore;
pub mod formats;
pub mod ir;
pub mod oracle;
pub mod random;
pub mod render;
pub mod semantics;
pub mod trace;

#[cfg(test)]
mod testing;

pub use ir::{Action, ActionKind, Interaction, LifelineId, LifelineSet, MessageId, Position, Signature};
pub use trace::{MultiTrace, ObsFlags, Partition, Trace};
