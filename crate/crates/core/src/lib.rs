//! Computational toolkit for Dehn filling distance bounds.
//!
//! Modules, bottom-up:
//! - [`slope`]: slope arithmetic on a torus boundary
//! - [`psl2`]: projective 2x2 complex matrices and representation predicates
//! - [`prodcurves`]: character curves of `Z/p * Z/q`
//! - [`bending`]: amalgam and HNN bending families with Laurent traces
//! - [`census`]: character and dihedral-quotient censuses, distance formulas
//! - [`graphs`]: intersection-graph enumeration in a disk, vertex curvature
//! - [`fillings`]: filling-census compatibility and slope tables

pub mod bending;
pub mod census;
pub mod error;
pub mod fillings;
pub mod graphs;
pub mod laurent;
pub mod prodcurves;
pub mod psl2;
pub mod slope;

pub use error::{Error, Result};
