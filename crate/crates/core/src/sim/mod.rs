//! Finite-length simulation: configuration-model Tanner graphs, erasure
//! peeling and Monte Carlo estimation of word and bit erasure rates.

pub mod graph;
pub mod monte_carlo;
pub mod peel;

pub use graph::{node_perspective, sample_graph, GraphOptions, TannerGraph};
pub use monte_carlo::{monte_carlo, SimConfig, SimCurve, SimPoint};
pub use peel::{peel_decode, PeelOutcome};
