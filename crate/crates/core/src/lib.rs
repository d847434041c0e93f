//! Algorithmic networks: a concrete prefix-free universal machine, time-varying
//! graphs, networked populations of programs and complexity measures.

pub mod bits;
pub mod experiments;
pub mod machine;
pub mod measures;
pub mod network;
pub mod tvg;
