//! The field tower F_p ⊂ F_q ⊂ F_(q^2), F_(q^3) ⊂ F_(q^6) and exact linear
//! algebra over its subfields.

mod cache;
mod matrix;
pub(crate) mod poly;
mod tower;

pub use matrix::FqMatrix;
pub use tower::{Fe, FieldTower, DEFAULT_ORDER_BOUND};
