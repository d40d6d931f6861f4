//! Graph substrate: the mutable [`Network`], uniform shortest-path
//! sampling, initial-topology generators and edge-list I/O.

mod fenwick;
pub mod generators;
pub mod io;
mod network;
mod paths;

pub use generators::{
    disk_positions, generate_complete, generate_er, generate_honeycomb, generate_satellite_disk, generate_ust,
    link_probability, AcceptanceProfile, DiskParams, GeneratorKind, GeneratorSpec, Generated,
    SatelliteNetwork,
};
pub use network::Network;
pub use paths::{sample_shortest_path, PathSample, PathSampler};
