//! Generators and analysis tools for fractal networks.
//!
//! The crate provides three seed-deterministic network models:
//!
//! * **SHM** — the Song-Havlin-Makse growth model with probabilistic edge
//!   rewiring towards offspring,
//! * **RBFM** — a repulsion-based variant where the rewiring probability of
//!   an edge depends on the normalised mean degree of its endpoints,
//! * **LSwTM** — a lattice small-world transition model that rewires grid
//!   edges with logistic degree preference at a fixed node/edge budget,
//!
//! together with a box-covering engine ([`boxcover`]) for measuring fractal
//! dimension, the seven structural metrics used to characterise the models
//! ([`metrics`]), and batch experiment drivers that emit CSV tables and SVG
//! plots ([`experiments`], [`plot`]).
//!
//! Everything random flows through a single ChaCha8 stream seeded from the
//! caller-supplied 64-bit seed, so identical parameters always reproduce
//! identical graphs and identical output files.

pub mod boxcover;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod metrics;
pub mod models;
pub mod plot;

pub use error::{Error, Result};
pub use graph::Graph;
