//! Experiment drivers, family-spec parsing, and the acceptance suite
//! behind the `hcf-lab` binary.

pub mod acceptance;
pub mod experiments;
pub mod famspec;
