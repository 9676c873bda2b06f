//! Configuration, serialization and figure presets.

pub mod config;
pub mod csv;
pub mod presets;
pub mod snapshot;
