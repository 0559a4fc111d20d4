//! Climate damage functions that admit spatial and temporal variability of
//! warming.
//!
//! The crate turns gridded or zero-dimensional temperature scenarios into
//! warming moments (mean, mean of squares, variance), evaluates quadratic
//! damage functions on those moments under four variability assumptions,
//! and prices the results as present values and as a social cost of carbon.
//!
//! Module map:
//!
//! - [`grid`]: gridded fields, global series, GDP trajectories and their file formats
//! - [`climatology`]: anomalies, pattern scaling, rolling climatologies, warming moments
//! - [`damage`]: the quadratic damage function and the variability decomposition
//! - [`sectoral`]: seasonal and monthly per-sector coefficients
//! - [`regional`]: RICE regional functions, refit and harmonization
//! - [`economics`]: GDP interpolation, discounting, present values
//! - [`scc`]: carbon pulse response and social cost of carbon

pub mod climatology;
pub mod damage;
pub mod economics;
mod error;
pub mod fmt;
pub mod grid;
pub mod regional;
pub mod scc;
pub mod sectoral;
pub mod variant;

pub use error::{Error, Result};
pub use variant::{Hemisphere, MonthSet, Variant};
