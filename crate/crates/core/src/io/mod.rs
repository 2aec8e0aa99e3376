//! File formats: diagnostics and symbol CSV, binary field snapshots.

pub mod csv;
pub mod snapshot;
