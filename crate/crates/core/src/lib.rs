//! Exact computations with the rank-two presemifields of order q^6 whose
//! left nucleus contains F_(q^3): field tower, q-polynomials, the geometry of
//! PG(3, q^3), linear sets, spread sets, concrete families and invariant-based
//! classification.

pub mod error;
pub mod fieldtower;

pub use error::{Error, Result};
pub use fieldtower::{Fe, FieldTower, FqMatrix};
pub mod linmaps;
pub mod projgeom;
pub mod linsets;
pub mod spreadsets;
pub mod zoo;
pub mod classify;
