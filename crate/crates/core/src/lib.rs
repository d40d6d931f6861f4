//! Path percolation on networks.
//!
//! Each time step a uniformly random connected pair of nodes communicates
//! over a uniformly random shortest path, and every link on that path is
//! consumed. Afterwards `alpha` fresh links are placed according to a
//! replenishment scheme. The crate provides the Monte Carlo engine
//! ([`dynamics`]), the measured quantities ([`observables`]) and the
//! mean-field coagulation/fragmentation theory ([`smoluchowski`]).

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod observables;
pub mod output;
pub mod replicas;
pub mod rng;
pub mod smoluchowski;

pub use dynamics::{Scheme, SchemeConfig, Simulation, SteadyConfig, SteadyState, StepRecord};
pub use error::{Error, Result};
pub use graph::{GeneratorKind, GeneratorSpec, Network, PathSample};
pub use observables::{availability, SizeDistribution};
