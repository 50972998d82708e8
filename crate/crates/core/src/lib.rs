//! Curves and arcs on compact surfaces with boundary: canonical forms,
//! geometric intersection numbers, mapping class orbits and lattice counts.

pub mod classes;
pub mod error;
pub mod experiments;
pub mod functional;
pub mod intersect;
pub mod mcg;
pub mod mlz;
pub mod orbit;
pub mod surface;
pub mod word;

pub use error::{Error, Result};
