//! Ground state representations of Lie groups, computed at finite-dimensional
//! and truncated scale.

pub mod cache;
pub mod cones;
pub mod dirlim;
pub mod error;
pub mod groundstate;
pub mod heisenfock;
pub mod irreps;
pub mod job;
pub mod liealg;
pub mod matcore;

pub use error::{Error, Result};
