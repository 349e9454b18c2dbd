//! Benchmark harness for the phase-retrieval solvers.
//!
//! Experiments are configured by flat `key=value` files ([`config`]), run
//! deterministically from derived seeds ([`trial`], [`experiments`]), and
//! emit CSV (UTF-8, LF) plus binary PPM for the image pipeline ([`ppm`]).

pub mod config;
pub mod error;
pub mod experiments;
pub mod ppm;
pub mod trial;
