//! Characteristic polyhedra and resolution invariants of degree-p hypersurface
//! singularities in positive and mixed characteristic.

pub mod algebra;
pub mod blowup;
pub mod driver;
pub mod error;
pub mod invariants;
pub mod polygon;
pub mod polyhedron;
pub mod prepare;

pub use error::{Error, Result};
