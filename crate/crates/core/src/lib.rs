//! Suspended square-spiral inductors: layout, electrical model, structural
//! model, network de-embedding and design-space exploration.

pub mod config;
pub mod deembed;
pub mod em;
pub mod error;
pub mod exec;
pub mod explorer;
pub mod geometry;
pub mod material;
pub mod mech;
pub mod network;
pub mod report;
pub mod touchstone;

pub use error::{Error, Result};
pub use exec::Exec;
