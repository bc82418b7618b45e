//! Deterministic city-scale simulator of pedestrian evacuation to open
//! spaces during and immediately after an earthquake.
//!
//! The crate models buildings with damage-dependent debris footprints,
//! per-floor egress delays, slope- and debris-modified walking speeds,
//! and open spaces with capacities and lockable gates. A fixed seed
//! makes every run — including multi-threaded runs — bit-reproducible.

pub mod config;
pub mod debris;
pub mod engine;
pub mod error;
pub mod geom;
pub mod io;
pub mod mobility;
pub mod rng;
pub mod synth;
pub mod vulnerability;

pub use error::{Error, Result};
