//! Run configuration, theorem verification, sweeps, self tests and reports.

pub mod config;
pub mod energy_map;
pub mod report;
pub mod selftest;
pub mod theorem;

pub use config::{MicrolocalQuery, RunConfig};
pub use energy_map::{energy_map, EnergyMapEntry};
pub use selftest::{selftest, Fault, SelftestLevel, SelftestReport};
pub use theorem::{theorem_check, QueryReport, TheoremReport, Verdict};
